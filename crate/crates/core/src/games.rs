//! Finite games with integer utilities and their best-response dynamics.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{ActionSpace, Budget, HistorylessSystem, State};

/// `utilities[i][s]` is node `i`'s payoff at the state with index `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    space: ActionSpace,
    utilities: Vec<Vec<i64>>,
}

/// How [`br_system`] treats several best responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    Refuse,
    Min,
}

impl Game {
    pub fn new(space: ActionSpace, utilities: Vec<Vec<i64>>) -> Result<Self> {
        Budget::default().check("utility table", space.state_count() as u128)?;
        if utilities.len() != space.node_count() {
            return Err(invalid(format!(
                "{} utility tables for {} nodes",
                utilities.len(),
                space.node_count()
            )));
        }
        for (i, u) in utilities.iter().enumerate() {
            if u.len() as u64 != space.state_count() {
                return Err(invalid(format!(
                    "utility table of node {} has {} entries, expected {}",
                    i + 1,
                    u.len(),
                    space.state_count()
                )));
            }
        }
        Ok(Game { space, utilities })
    }

    /// Builds the tables from `u(i, a)`.
    pub fn from_fn<F: Fn(usize, &State) -> i64>(space: ActionSpace, u: F) -> Result<Self> {
        Budget::default().check("utility table", space.state_count() as u128)?;
        let utilities = (0..space.node_count())
            .map(|i| space.states().map(|a| u(i, &a)).collect())
            .collect();
        Game::new(space, utilities)
    }

    pub fn space(&self) -> &ActionSpace {
        &self.space
    }

    pub fn node_count(&self) -> usize {
        self.space.node_count()
    }

    pub fn utility(&self, node: usize, state: &State) -> i64 {
        self.utilities[node][self.space.encode(state) as usize]
    }

    pub fn table(&self, node: usize) -> &[i64] {
        &self.utilities[node]
    }

    /// Best responses of `node` with the others fixed as at state `index`.
    pub(crate) fn best_responses_at(&self, node: usize, index: u64) -> Vec<usize> {
        best_in_column(&self.space, &self.utilities[node], node, index)
    }
}

/// Argmax of `table` over node `node`'s actions, others fixed as at `index`.
pub(crate) fn best_in_column(space: &ActionSpace, table: &[i64], node: usize, index: u64) -> Vec<usize> {
    let w = space.weight(node);
    let own = (index / w) % space.size(node) as u64;
    let base = index - own * w;
    let values: Vec<i64> = (0..space.size(node))
        .map(|x| table[(base + x as u64 * w) as usize])
        .collect();
    let best = *values.iter().max().expect("action spaces are nonempty");
    (0..values.len()).filter(|&x| values[x] == best).collect()
}

pub fn best_responses(game: &Game, node: usize, state: &State) -> Result<Vec<usize>> {
    if node >= game.node_count() {
        return Err(invalid(format!("node {} does not exist", node + 1)));
    }
    let idx = game.space.index_of(state)?;
    Ok(game.best_responses_at(node, idx))
}

pub fn is_pne(game: &Game, state: &State) -> Result<bool> {
    let idx = game.space.index_of(state)?;
    Ok((0..game.node_count()).all(|i| game.best_responses_at(i, idx).contains(&state[i])))
}

pub fn enumerate_pne(game: &Game) -> Vec<State> {
    let mut out = Vec::new();
    for idx in 0..game.space.state_count() {
        let a = game.space.decode(idx);
        if (0..game.node_count()).all(|i| game.best_responses_at(i, idx).contains(&a[i])) {
            out.push(a);
        }
    }
    out
}

/// Best-response dynamics as a historyless system.
pub fn br_system(game: &Game, tie: TieBreak) -> Result<HistorylessSystem> {
    let space = game.space.clone();
    let mut table = Vec::with_capacity(space.state_count() as usize);
    for idx in 0..space.state_count() {
        let mut next = vec![0; game.node_count()];
        for (i, slot) in next.iter_mut().enumerate() {
            let br = game.best_responses_at(i, idx);
            if br.len() > 1 && tie == TieBreak::Refuse {
                return Err(Error::NonUniqueBestResponse {
                    node: i,
                    state: space.decode(idx),
                });
            }
            *slot = br[0];
        }
        table.push(space.encode(&next));
    }
    HistorylessSystem::from_index_table(space, table)
}

/// `u_i(a) = 1` if `f_i(a) = a_i`, else 0.
pub fn induced_game(system: &HistorylessSystem) -> Result<Game> {
    induced_game_within(system, Budget::default())
}

pub fn induced_game_within(system: &HistorylessSystem, budget: Budget) -> Result<Game> {
    let space = system.space().clone();
    budget.check("joint state space", space.state_count() as u128)?;
    let n = space.node_count();
    let mut utilities = vec![Vec::with_capacity(space.state_count() as usize); n];
    for a in space.states() {
        let f = system.reaction(&a);
        for (i, u) in utilities.iter_mut().enumerate() {
            u.push(i64::from(f[i] == a[i]));
        }
    }
    Game::new(space, utilities)
}
