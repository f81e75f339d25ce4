//! Strategies and brute-force oracles shared by the property tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use ixsys::{ActionSpace, ActivationSet, Game, HistorylessSystem, State};
use proptest::prelude::*;

/// Any historyless system with `1..=max_nodes` nodes of `1..=max_actions`
/// actions, as a reaction table.
pub fn arb_system(max_nodes: usize, max_actions: usize) -> impl Strategy<Value = HistorylessSystem> {
    prop::collection::vec(1..=max_actions, 1..=max_nodes).prop_flat_map(|sizes| {
        let space = ActionSpace::new(sizes).unwrap();
        let count = space.state_count();
        prop::collection::vec(0..count, count as usize)
            .prop_map(move |t| HistorylessSystem::from_index_table(space.clone(), t).unwrap())
    })
}

/// Reaction of node `i` indexed by the others' actions, first node most
/// significant.
pub fn others_key(sizes: &[usize], a: &[usize], i: usize) -> usize {
    (0..sizes.len())
        .filter(|&j| j != i)
        .fold(0, |acc, j| acc * sizes[j] + a[j])
}

pub fn self_independent_from(sizes: Vec<usize>, tables: Vec<Vec<usize>>) -> HistorylessSystem {
    let space = ActionSpace::new(sizes.clone()).unwrap();
    let rows = space
        .states()
        .map(|a| {
            State::new(
                (0..sizes.len())
                    .map(|i| tables[i][others_key(&sizes, &a, i)])
                    .collect(),
            )
        })
        .collect();
    HistorylessSystem::from_table(space, rows).unwrap()
}

pub fn arb_self_independent(
    max_nodes: usize,
    max_actions: usize,
) -> impl Strategy<Value = HistorylessSystem> {
    prop::collection::vec(1..=max_actions, 1..=max_nodes).prop_flat_map(|sizes| {
        let n = sizes.len();
        let per_node: Vec<_> = (0..n)
            .map(|i| {
                let others: usize = (0..n).filter(|&j| j != i).map(|j| sizes[j]).product();
                prop::collection::vec(0..sizes[i], others)
            })
            .collect();
        per_node.prop_map(move |tables| self_independent_from(sizes.clone(), tables))
    })
}

pub fn arb_game(max_nodes: usize, max_actions: usize, max_utility: i64) -> impl Strategy<Value = Game> {
    prop::collection::vec(1..=max_actions, 1..=max_nodes).prop_flat_map(move |sizes| {
        let space = ActionSpace::new(sizes.clone()).unwrap();
        let count = space.state_count() as usize;
        prop::collection::vec(prop::collection::vec(0..=max_utility, count), sizes.len())
            .prop_map(move |u| Game::new(space.clone(), u).unwrap())
    })
}

pub fn subsets(n: usize) -> impl Iterator<Item = ActivationSet> {
    (0..1u64 << n).map(ActivationSet::from_bits)
}

/// Whether some closed walk from `start` changes state at least once and
/// activates every node, found by search over (state, nodes covered,
/// changed yet).
pub fn oscillates_through(sys: &HistorylessSystem, start: &State) -> bool {
    let n = sys.node_count();
    let full = (1u64 << n) - 1;
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(start.clone(), 0u64, false)]);
    while let Some((a, mask, changed)) = queue.pop_front() {
        for s in subsets(n) {
            let b = sys.step(&a, s).unwrap();
            let next = (b.clone(), mask | s.bits(), changed || b != a);
            if next.0 == *start && next.1 == full && next.2 {
                return true;
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    false
}

pub fn reachable(sys: &HistorylessSystem, start: &State) -> Vec<State> {
    let mut seen = vec![start.clone()];
    let mut i = 0;
    while i < seen.len() {
        let a = seen[i].clone();
        for s in subsets(sys.node_count()) {
            let b = sys.step(&a, s).unwrap();
            if !seen.contains(&b) {
                seen.push(b);
            }
        }
        i += 1;
    }
    seen
}

pub fn fixed_points(sys: &HistorylessSystem) -> Vec<State> {
    sys.space().states().filter(|a| sys.reaction(a) == *a).collect()
}

/// Longest induced cycle of the `z`-cube, by trying every vertex subset.
pub fn induced_cycle_oracle(z: usize) -> usize {
    let size = 1u32 << z;
    let adj = |u: u32, v: u32| (u ^ v).count_ones() == 1;
    let mut best = 0;
    for mask in 1u64..1 << size {
        if (mask.count_ones() as usize) < 4.max(best + 1) {
            continue;
        }
        let vs: Vec<u32> = (0..size).filter(|&v| mask >> v & 1 == 1).collect();
        if !vs.iter().all(|&u| vs.iter().filter(|&&v| adj(u, v)).count() == 2) {
            continue;
        }
        let mut comp = vec![vs[0]];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            for &v in &vs {
                if adj(u, v) && !comp.contains(&v) {
                    comp.push(v);
                }
            }
            i += 1;
        }
        if comp.len() == vs.len() {
            best = vs.len();
        }
    }
    best
}
