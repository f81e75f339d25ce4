//! Uncoupled protocols: each node builds its reaction from its own utility
//! table only.
//!
//! Deterministic protocols run under the synchronous schedule, which is the
//! only schedule activating every node at every step. Randomized
//! stay-or-roll is analyzed through its support: the set of actions a node
//! plays with positive probability.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{best_in_column, enumerate_pne, Game};
use crate::model::{ActionSpace, ActivationSet, Budget, HistoryWindow, KRecallSystem, State};
use crate::schedule::Schedule;
use crate::simulator::{run, RunVerdict};
use crate::transition::{lift_k_recall, TransitionSystem};

/// One node's private input: its own utility table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeUtility {
    node: usize,
    space: ActionSpace,
    table: Vec<i64>,
}

impl NodeUtility {
    pub fn of(game: &Game, node: usize) -> Self {
        NodeUtility {
            node,
            space: game.space().clone(),
            table: game.table(node).to_vec(),
        }
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn space(&self) -> &ActionSpace {
        &self.space
    }

    pub fn best_responses(&self, state: &State) -> Vec<usize> {
        best_in_column(&self.space, &self.table, self.node, self.space.encode(state))
    }

    pub fn is_best_responding(&self, state: &State) -> bool {
        self.best_responses(state).contains(&state[self.node])
    }
}

/// Lexicographic successor with wraparound: the last node always
/// increments, node `i` increments when every later node is at its top
/// action.
pub fn cyclic_successor(space: &ActionSpace, state: &State) -> State {
    let n = space.node_count();
    let mut next = state.actions().to_vec();
    for i in (0..n).rev() {
        next[i] = (state[i] + 1) % space.size(i);
        if state[i] + 1 < space.size(i) {
            break;
        }
    }
    State::new(next)
}

fn successor_at(space: &ActionSpace, state: &State, node: usize) -> usize {
    cyclic_successor(space, state)[node]
}

/// The 3-recall protocol's reaction for one node at window `(a, b, c)`.
pub fn three_recall_step(u: &NodeUtility, window: &[State]) -> usize {
    let [a, b, c] = window else {
        panic!("three_recall_step needs exactly three states");
    };
    let i = u.node;
    if b == c {
        let br = u.best_responses(c);
        if br.contains(&c[i]) {
            c[i]
        } else {
            br[0]
        }
    } else if a == b {
        successor_at(&u.space, a, i)
    } else {
        c[i]
    }
}

fn require_four_actions(space: &ActionSpace) -> Result<()> {
    if let Some(i) = space.sizes().iter().position(|&k| k < 4) {
        return Err(Error::Unsupported(format!(
            "the 2-recall protocol needs at least four actions per node; node {} has {}",
            i + 1,
            space.size(i)
        )));
    }
    Ok(())
}

/// Which of the three 2-recall cases a window `(a, b)` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoRecallCase {
    MoveOn,
    Query,
    Repeat,
}

pub fn two_recall_case(space: &ActionSpace, a: &State, b: &State) -> TwoRecallCase {
    let diff = |x: usize, y: usize, k: usize| (x + k - y) % k;
    let sizes = space.sizes();
    if a != b && (0..sizes.len()).all(|j| diff(a[j], b[j], sizes[j]) <= 1) {
        TwoRecallCase::MoveOn
    } else if (0..sizes.len()).all(|j| diff(b[j], a[j], sizes[j]) <= 2) {
        TwoRecallCase::Query
    } else {
        TwoRecallCase::Repeat
    }
}

/// The 2-recall protocol's reaction for one node at window `(a, b)`.
pub fn two_recall_step(u: &NodeUtility, window: &[State]) -> Result<usize> {
    require_four_actions(&u.space)?;
    let [a, b] = window else {
        return Err(crate::error::invalid("two_recall_step needs exactly two states"));
    };
    let i = u.node;
    let k = u.space.size(i);
    Ok(match two_recall_case(&u.space, a, b) {
        TwoRecallCase::MoveOn => successor_at(&u.space, a, i),
        TwoRecallCase::Query if u.is_best_responding(b) => b[i],
        TwoRecallCase::Query => (b[i] + k - 1) % k,
        TwoRecallCase::Repeat => b[i],
    })
}

/// Actions node `u.node()` plays with positive probability under
/// stay-or-roll.
pub fn stay_or_roll_support(u: &NodeUtility, state: &State) -> Vec<usize> {
    if u.is_best_responding(state) {
        vec![state[u.node]]
    } else {
        (0..u.space.size(u.node)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    ThreeRecall,
    TwoRecall,
}

impl Protocol {
    pub fn recall(self) -> usize {
        match self {
            Protocol::ThreeRecall => 3,
            Protocol::TwoRecall => 2,
        }
    }
}

/// The joint system where node `i` runs `protocol` on its own utility.
pub fn protocol_system(protocol: Protocol, game: &Game) -> Result<KRecallSystem> {
    let space = game.space().clone();
    if protocol == Protocol::TwoRecall {
        require_four_actions(&space)?;
    }
    let nodes: Vec<NodeUtility> = (0..game.node_count()).map(|i| NodeUtility::of(game, i)).collect();
    KRecallSystem::stationary(space, protocol.recall(), move |w| {
        State::new(
            nodes
                .iter()
                .map(|u| match protocol {
                    Protocol::ThreeRecall => three_recall_step(u, w),
                    Protocol::TwoRecall => two_recall_step(u, w).expect("checked at build time"),
                })
                .collect(),
        )
    })
}

/// Stay-or-roll as a time-dependent system: the dice at time `t` come from
/// stream `t` of a generator seeded with `seed`, so runs are reproducible.
pub fn stay_or_roll_system(game: &Game, seed: u64) -> KRecallSystem {
    let nodes: Vec<NodeUtility> = (0..game.node_count()).map(|i| NodeUtility::of(game, i)).collect();
    KRecallSystem::timed(game.space().clone(), 1, move |w, t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        State::new(
            nodes
                .iter()
                .map(|u| {
                    let a = &w[0];
                    if u.is_best_responding(a) {
                        a[u.node]
                    } else {
                        rng.gen_range(0..u.space.size(u.node))
                    }
                })
                .collect(),
        )
    })
    .expect("k = 1")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum StabilizationVerdict {
    SelfStabilizing,
    /// From `witness` some synchronous run (the only one, for deterministic
    /// protocols) never settles on equilibria.
    Fails { witness: HistoryWindow },
    NoPne,
}

impl StabilizationVerdict {
    pub fn is_self_stabilizing(&self) -> bool {
        matches!(self, StabilizationVerdict::SelfStabilizing)
    }
}

fn pne_mask(game: &Game) -> Vec<bool> {
    let space = game.space();
    let mut mask = vec![false; space.state_count() as usize];
    for p in enumerate_pne(game) {
        mask[space.encode(&p) as usize] = true;
    }
    mask
}

pub fn check_self_stabilization(protocol: Protocol, game: &Game) -> Result<StabilizationVerdict> {
    check_self_stabilization_within(protocol, game, Budget::default())
}

/// Exhaustive over all initial windows: follows the synchronous functional
/// graph and accepts iff every cycle it ends in consists of equilibria.
pub fn check_self_stabilization_within(
    protocol: Protocol,
    game: &Game,
    budget: Budget,
) -> Result<StabilizationVerdict> {
    let space = game.space();
    let windows = (space.state_count() as u128).pow(protocol.recall() as u32);
    budget.check("initial histories", windows)?;
    let pne = pne_mask(game);
    if !pne.contains(&true) {
        return Ok(StabilizationVerdict::NoPne);
    }
    let system = protocol_system(protocol, game)?;
    let lifted = lift_k_recall(&system)?;
    let base = space.state_count();
    let full = ActivationSet::full(space.node_count()).bits() as usize;
    let count = windows as usize;

    const UNKNOWN: u8 = 0;
    const ACTIVE: u8 = 1;
    const GOOD: u8 = 2;
    const BAD: u8 = 3;
    let mut mark = vec![UNKNOWN; count];
    let mut buf = Vec::new();
    let mut next = |w: u64| -> u64 {
        lifted.successors(w, &mut buf);
        buf[full]
    };
    let mut first_bad = None;
    for start in 0..count as u64 {
        if mark[start as usize] != UNKNOWN {
            if mark[start as usize] == BAD && first_bad.is_none() {
                first_bad = Some(start);
            }
            continue;
        }
        let mut path = Vec::new();
        let mut w = start;
        while mark[w as usize] == UNKNOWN {
            mark[w as usize] = ACTIVE;
            path.push(w);
            w = next(w);
        }
        let outcome = if mark[w as usize] == ACTIVE {
            // new cycle: w .. end of path
            let pos = path.iter().position(|&x| x == w).expect("on path");
            if path[pos..].iter().all(|&x| pne[(x % base) as usize]) {
                GOOD
            } else {
                BAD
            }
        } else {
            mark[w as usize]
        };
        for x in path {
            mark[x as usize] = outcome;
        }
        if outcome == BAD && first_bad.is_none() {
            first_bad = Some(start);
        }
    }
    Ok(match first_bad {
        None => StabilizationVerdict::SelfStabilizing,
        Some(w) => StabilizationVerdict::Fails {
            witness: lifted.window(w),
        },
    })
}

/// Whether the synchronous run from `window` settles away from equilibria,
/// as reported by the simulator.
pub fn replay_stabilization_failure(
    protocol: Protocol,
    game: &Game,
    window: &HistoryWindow,
) -> Result<bool> {
    let system = protocol_system(protocol, game)?;
    let pne = pne_mask(game);
    let space = game.space();
    let is_pne = |s: &State| pne[space.encode(s) as usize];
    let (_, verdict) = run(&system, window, &Schedule::Synchronous, 1_000_000)?;
    Ok(match verdict {
        RunVerdict::Converged { state, .. } => !is_pne(&state),
        RunVerdict::Cycling { segment, .. } => segment.iter().any(|s| !is_pne(s)),
        RunVerdict::Stalled { .. } | RunVerdict::BudgetExhausted { .. } => false,
    })
}

/// Successor lists of the synchronous stay-or-roll support graph.
pub fn support_graph(game: &Game) -> Result<Vec<Vec<u64>>> {
    let space = game.space();
    Budget::default().check("joint state space", space.state_count() as u128)?;
    let nodes: Vec<NodeUtility> = (0..game.node_count()).map(|i| NodeUtility::of(game, i)).collect();
    let mut out = Vec::with_capacity(space.state_count() as usize);
    for a in space.states() {
        let supports: Vec<Vec<usize>> = nodes.iter().map(|u| stay_or_roll_support(u, &a)).collect();
        let mut targets = vec![0u64];
        for (i, sup) in supports.iter().enumerate() {
            let w = space.weight(i);
            targets = targets
                .iter()
                .flat_map(|&t| sup.iter().map(move |&x| t + x as u64 * w))
                .collect();
        }
        targets.sort_unstable();
        out.push(targets);
    }
    Ok(out)
}

/// Stay-or-roll self-stabilizes iff an equilibrium is reachable in the
/// support graph from every state (equilibria are absorbing by
/// construction).
pub fn check_self_stabilization_randomized(game: &Game) -> Result<StabilizationVerdict> {
    let pne = pne_mask(game);
    if !pne.contains(&true) {
        return Ok(StabilizationVerdict::NoPne);
    }
    let succ = support_graph(game)?;
    let mut pred = vec![Vec::new(); succ.len()];
    for (a, targets) in succ.iter().enumerate() {
        for &b in targets {
            pred[b as usize].push(a as u64);
        }
    }
    let mut good = pne.clone();
    let mut queue: VecDeque<u64> = (0..pne.len() as u64).filter(|&a| pne[a as usize]).collect();
    while let Some(b) = queue.pop_front() {
        for &a in &pred[b as usize] {
            if !good[a as usize] {
                good[a as usize] = true;
                queue.push_back(a);
            }
        }
    }
    Ok(match good.iter().position(|&g| !g) {
        None => StabilizationVerdict::SelfStabilizing,
        Some(a) => StabilizationVerdict::Fails {
            witness: HistoryWindow::single(game.space().decode(a as u64)),
        },
    })
}

/// First time a seeded stay-or-roll run from `initial` sits at an
/// equilibrium, if within `max_steps`.
pub fn simulate_stay_or_roll(
    game: &Game,
    initial: &State,
    seed: u64,
    max_steps: usize,
) -> Result<Option<usize>> {
    let system = stay_or_roll_system(game, seed);
    let pne = pne_mask(game);
    let space = game.space();
    let (traj, _) = run(
        &system,
        &HistoryWindow::single(initial.clone()),
        &Schedule::Synchronous,
        max_steps,
    )?;
    Ok(traj
        .states
        .iter()
        .position(|s| pne[space.encode(s) as usize]))
}

/// The 2x2x2 game with unique equilibrium (0,0,0) on which stay-or-roll
/// gets stuck: node 3 never leaves action 1 since it is always a best
/// response. Entry `[a][b][c]` lists the three payoffs.
pub fn fixture_game_2x2x2() -> Game {
    const U: [[[[i64; 3]; 2]; 2]; 2] = [
        [[[1, 1, 1], [1, 0, 1]], [[1, 0, 0], [0, 1, 1]]],
        [[[0, 1, 0], [0, 1, 1]], [[0, 0, 0], [1, 0, 1]]],
    ];
    Game::from_fn(ActionSpace::uniform(3, 2).expect("valid"), |i, a| {
        U[a[0]][a[1]][a[2]][i]
    })
    .expect("8 states")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::best_responses;

    fn s(v: &[usize]) -> State {
        State::new(v.to_vec())
    }

    fn coordination() -> Game {
        Game::from_fn(ActionSpace::uniform(2, 2).unwrap(), |_, a| i64::from(a[0] == a[1])).unwrap()
    }

    fn matching_pennies() -> Game {
        Game::from_fn(ActionSpace::uniform(2, 2).unwrap(), |i, a| {
            i64::from((a[0] == a[1]) == (i == 0))
        })
        .unwrap()
    }

    #[test]
    fn successor_carries() {
        let sp = ActionSpace::uniform(2, 2).unwrap();
        assert_eq!(cyclic_successor(&sp, &s(&[0, 0])), s(&[0, 1]));
        assert_eq!(cyclic_successor(&sp, &s(&[0, 1])), s(&[1, 0]));
        assert_eq!(cyclic_successor(&sp, &s(&[1, 1])), s(&[0, 0]));
        let sp23 = ActionSpace::new(vec![2, 3]).unwrap();
        let mut x = s(&[0, 0]);
        let mut len = 0;
        loop {
            x = cyclic_successor(&sp23, &x);
            len += 1;
            if x == s(&[0, 0]) {
                break;
            }
        }
        assert_eq!(len, 6);
    }

    #[test]
    fn fixture_payoffs() {
        let g = fixture_game_2x2x2();
        let u = |a: &[usize]| -> Vec<i64> { (0..3).map(|i| g.utility(i, &s(a))).collect() };
        assert_eq!(u(&[0, 0, 0]), vec![1, 1, 1]);
        assert_eq!(u(&[1, 0, 0]), vec![0, 1, 0]);
        assert_eq!(u(&[1, 1, 1]), vec![1, 0, 1]);
        assert_eq!(enumerate_pne(&g), vec![s(&[0, 0, 0])]);
        assert_eq!(best_responses(&g, 2, &s(&[0, 0, 1])).unwrap(), vec![0, 1]);
    }

    #[test]
    fn stay_or_roll_supports() {
        let g = fixture_game_2x2x2();
        let at = s(&[0, 0, 1]);
        assert_eq!(stay_or_roll_support(&NodeUtility::of(&g, 2), &at), vec![1]);
        assert_eq!(stay_or_roll_support(&NodeUtility::of(&g, 1), &at), vec![0, 1]);
        for i in 0..3 {
            assert_eq!(stay_or_roll_support(&NodeUtility::of(&g, i), &s(&[0, 0, 0])), vec![0]);
        }
    }

    #[test]
    fn three_recall_cases() {
        let g = coordination();
        let u0 = NodeUtility::of(&g, 0);
        // query, best-responding
        assert_eq!(three_recall_step(&u0, &[s(&[1, 0]), s(&[1, 1]), s(&[1, 1])]), 1);
        // query, not best-responding: least best response
        assert_eq!(three_recall_step(&u0, &[s(&[0, 0]), s(&[1, 0]), s(&[1, 0])]), 0);
        // move on from a = (0,1): successor (1,0)
        assert_eq!(three_recall_step(&u0, &[s(&[0, 1]), s(&[0, 1]), s(&[0, 0])]), 1);
        // repeat
        assert_eq!(three_recall_step(&u0, &[s(&[0, 0]), s(&[1, 1]), s(&[0, 1])]), 0);
    }

    #[test]
    fn two_recall_cases() {
        let g = Game::from_fn(ActionSpace::uniform(2, 4).unwrap(), |_, a| i64::from(a[0] == a[1])).unwrap();
        let u0 = NodeUtility::of(&g, 0);
        let sp = g.space();
        // b - a in {0,1,2} everywhere: query
        assert_eq!(two_recall_case(sp, &s(&[0, 0]), &s(&[2, 2])), TwoRecallCase::Query);
        assert_eq!(two_recall_step(&u0, &[s(&[0, 0]), s(&[2, 2])]).unwrap(), 2);
        assert_eq!(two_recall_step(&u0, &[s(&[0, 0]), s(&[2, 1])]).unwrap(), 1);
        // a - b in {0,1}, a != b: move on
        assert_eq!(two_recall_case(sp, &s(&[1, 1]), &s(&[0, 1])), TwoRecallCase::MoveOn);
        assert_eq!(two_recall_step(&u0, &[s(&[1, 1]), s(&[0, 1])]).unwrap(), 1);
        // neither: repeat
        assert_eq!(two_recall_case(sp, &s(&[0, 0]), &s(&[3, 2])), TwoRecallCase::Repeat);
        assert_eq!(two_recall_step(&u0, &[s(&[0, 0]), s(&[3, 2])]).unwrap(), 3);
        let small = NodeUtility::of(&coordination(), 0);
        assert!(matches!(
            two_recall_step(&small, &[s(&[0, 0]), s(&[0, 0])]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn deterministic_checks() {
        assert_eq!(
            check_self_stabilization(Protocol::ThreeRecall, &coordination()).unwrap(),
            StabilizationVerdict::SelfStabilizing
        );
        assert_eq!(
            check_self_stabilization(Protocol::ThreeRecall, &matching_pennies()).unwrap(),
            StabilizationVerdict::NoPne
        );
    }

    #[test]
    fn randomized_check_on_fixture() {
        let g = fixture_game_2x2x2();
        let v = check_self_stabilization_randomized(&g).unwrap();
        assert_eq!(
            v,
            StabilizationVerdict::Fails {
                witness: HistoryWindow::single(s(&[0, 0, 1]))
            }
        );
        assert_eq!(simulate_stay_or_roll(&g, &s(&[0, 0, 1]), 1, 500).unwrap(), None);
    }

    #[test]
    fn stay_or_roll_runs_are_reproducible() {
        let g = coordination();
        let a = simulate_stay_or_roll(&g, &s(&[0, 1]), 9, 1000).unwrap();
        let b = simulate_stay_or_roll(&g, &s(&[0, 1]), 9, 1000).unwrap();
        assert_eq!(a, b);
        assert!(a.is_some());
    }
}
