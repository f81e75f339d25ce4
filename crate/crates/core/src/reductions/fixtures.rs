use crate::error::{invalid, Result};
use crate::games::Game;
use crate::model::{ActionSpace, HistorylessSystem, State};
use crate::uncoupled::fixture_game_2x2x2;

pub const FIXTURE_NAMES: [&str; 6] = [
    "fig1",
    "ex-three-stable",
    "ex-unbounded-latched",
    "ring",
    "futile",
    "m1m2",
];

#[derive(Debug, Clone)]
pub enum Fixture {
    System(HistorylessSystem),
    Game(Game),
}

impl Fixture {
    pub fn into_system(self) -> Option<HistorylessSystem> {
        match self {
            Fixture::System(s) => Some(s),
            Fixture::Game(_) => None,
        }
    }

    pub fn into_game(self) -> Option<Game> {
        match self {
            Fixture::Game(g) => Some(g),
            Fixture::System(_) => None,
        }
    }
}

const ALPHA: usize = 0;
const BETA: usize = 1;
const GAMMA: usize = 2;

fn others(a: &State, i: usize) -> impl Iterator<Item = usize> + '_ {
    a.iter()
        .enumerate()
        .filter(move |&(j, _)| j != i)
        .map(|(_, &x)| x)
}

/// Named instances. `n` sizes the `ring` and `futile` families.
pub fn fixture(name: &str, n: Option<usize>) -> Result<Fixture> {
    let sized = |min: usize| match n {
        Some(n) if n >= min => Ok(n),
        Some(n) => Err(invalid(format!("fixture {name} needs n >= {min}, got {n}"))),
        None => Err(invalid(format!("fixture {name} needs n"))),
    };
    let system = match name {
        "fig1" => HistorylessSystem::from_node_rule(ActionSpace::uniform(2, 2)?, |i, a| a[1 - i]),
        "ex-three-stable" => HistorylessSystem::from_node_rule(ActionSpace::uniform(2, 2)?, |i, a| {
            if a[0] == ALPHA && a[1] == ALPHA {
                BETA
            } else {
                a[i]
            }
        }),
        "ex-unbounded-latched" => latched(),
        "ring" => ring(sized(2)?)?,
        "futile" => futile(sized(3)?)?,
        "m1m2" => return Ok(Fixture::Game(fixture_game_2x2x2())),
        other => {
            return Err(invalid(format!(
                "unknown fixture {other:?}; known: {}",
                FIXTURE_NAMES.join(", ")
            )))
        }
    };
    Ok(Fixture::System(system))
}

/// Node 2 copies node 1; node 1 plays β once node 2 has been seen moving
/// from α to β. Node 3 is the latch: 0 saw α, 1 saw β, 2 latched.
fn latched() -> HistorylessSystem {
    let space = ActionSpace::new(vec![2, 2, 3]).expect("fixed sizes");
    HistorylessSystem::from_node_rule(space, |i, a| match i {
        0 => {
            if a[2] == 2 {
                BETA
            } else {
                ALPHA
            }
        }
        1 => a[0],
        _ => {
            if a[2] == 2 || (a[2] == 0 && a[1] == BETA) {
                2
            } else {
                a[1]
            }
        }
    })
}

fn ring(n: usize) -> Result<HistorylessSystem> {
    Ok(HistorylessSystem::from_node_rule(
        ActionSpace::uniform(n, 2)?,
        |i, a| {
            if others(a, i).all(|x| x == ALPHA) {
                ALPHA
            } else {
                BETA
            }
        },
    ))
}

/// Stable states α^n and γ^n, reachable from exactly 4n+2 states.
fn futile(n: usize) -> Result<HistorylessSystem> {
    Ok(HistorylessSystem::from_node_rule(
        ActionSpace::uniform(n, 3)?,
        move |i, a| {
            let rest: Vec<usize> = others(a, i).collect();
            let all = |x: usize| rest.iter().all(|&y| y == x);
            match i {
                0 if all(ALPHA) || all(BETA) => ALPHA,
                1 if all(ALPHA) => ALPHA,
                1 if rest[0] == ALPHA && rest[1..].iter().all(|&y| y == BETA) => GAMMA,
                _ if all(ALPHA) => ALPHA,
                _ if all(GAMMA) => GAMMA,
                _ => BETA,
            }
        },
    ))
}
