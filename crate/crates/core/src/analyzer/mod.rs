//! Exact analysis over the full transition graph: one edge per state and
//! activation subset.
//!
//! A fair trajectory fails to converge iff some strongly connected component
//! has an internal state-changing edge and its internal edge labels cover
//! every node. Repeating a closed walk through such a component is a fair
//! oscillation, and the recurrent part of any fair oscillation lives in one.

mod rfair;
mod scc;

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActivationSet, Budget};
use crate::simulator::Witness;
use crate::transition::TransitionSystem;

pub use rfair::{decide_r_convergence, decide_r_convergence_within};
use scc::{tarjan, Components};

/// Edges stored per budgeted state; caps the successor table at
/// `budget * EDGE_FACTOR` entries.
const EDGE_FACTOR: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConvergenceVerdict {
    Convergent,
    NonConvergent { witness: Witness },
}

impl ConvergenceVerdict {
    pub fn is_convergent(&self) -> bool {
        matches!(self, ConvergenceVerdict::Convergent)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            ConvergenceVerdict::Convergent => None,
            ConvergenceVerdict::NonConvergent { witness } => Some(witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Commitment<P> {
    CommittedTo(P),
    Uncommitted,
}

/// Per-state commitment, indexed like the system's states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitMap<P> {
    pub entries: Vec<Commitment<P>>,
}

impl<P> CommitMap<P> {
    pub fn uncommitted_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|c| matches!(c, Commitment::Uncommitted))
            .count()
    }
}

/// Materialized successor table plus a lazily computed SCC decomposition.
pub struct TransitionGraph<'a, T: TransitionSystem> {
    system: &'a T,
    n: usize,
    size: usize,
    succ: Vec<u32>,
    scc: OnceLock<Components>,
}

pub(crate) fn check_size(budget: Budget, what: &'static str, size: u128) -> Result<()> {
    budget.check(what, size)?;
    if size > u32::MAX as u128 {
        return Err(Error::BudgetExceeded {
            what,
            size,
            budget: u32::MAX as u64,
        });
    }
    Ok(())
}

impl<'a, T: TransitionSystem> TransitionGraph<'a, T> {
    pub fn build(system: &'a T) -> Result<Self> {
        Self::build_within(system, Budget::default())
    }

    pub fn build_within(system: &'a T, budget: Budget) -> Result<Self> {
        let n = system.node_count();
        let size = system.state_count() as u128;
        check_size(budget, "transition graph", size)?;
        let edges = size << n;
        let edge_budget = Budget::new(budget.max_states.saturating_mul(EDGE_FACTOR));
        edge_budget.check("transition graph edge table", edges)?;
        let size = size as usize;
        let mut succ = Vec::with_capacity(edges as usize);
        let mut buf = Vec::new();
        for v in 0..size as u64 {
            system.successors(v, &mut buf);
            succ.extend(buf.iter().map(|&w| w as u32));
        }
        Ok(TransitionGraph {
            system,
            n,
            size,
            succ,
            scc: OnceLock::new(),
        })
    }

    pub fn system(&self) -> &T {
        self.system
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn state_count(&self) -> usize {
        self.size
    }

    pub fn degree(&self) -> usize {
        1 << self.n
    }

    /// Target of the edge leaving `v` under the subset with bit pattern `s`.
    pub fn successor(&self, v: u64, s: u64) -> u64 {
        self.succ[(v as usize) << self.n | s as usize] as u64
    }

    pub fn successors(&self, v: u64) -> &[u32] {
        let d = self.degree();
        &self.succ[v as usize * d..(v as usize + 1) * d]
    }

    /// Every edge `(from, set, to)` in index order.
    pub fn edges(&self) -> impl Iterator<Item = (u64, ActivationSet, u64)> + '_ {
        let d = self.degree();
        self.succ.iter().enumerate().map(move |(e, &w)| {
            (
                (e / d) as u64,
                ActivationSet::from_bits((e % d) as u64),
                w as u64,
            )
        })
    }

    fn components(&self) -> &Components {
        self.scc.get_or_init(|| {
            let d = self.degree();
            tarjan(self.size, d, 0..self.size as u32, |v, j| {
                Some(self.succ[v as usize * d + j])
            })
        })
    }

    pub fn scc_count(&self) -> usize {
        self.components().count as usize
    }

    pub fn is_fixed(&self, v: u64) -> bool {
        self.successors(v).iter().all(|&w| w as u64 == v)
    }

    pub fn stable_indices(&self) -> Vec<u64> {
        (0..self.size as u64).filter(|&v| self.is_fixed(v)).collect()
    }

    pub fn stable_states(&self) -> Vec<T::Point> {
        self.stable_indices()
            .into_iter()
            .map(|v| self.system.point(v))
            .collect()
    }

    /// Fixed points reachable from `v`, ascending.
    pub fn spectrum_indices(&self, v: u64) -> Vec<u64> {
        let mut seen = vec![false; self.size];
        let mut queue = VecDeque::from([v as u32]);
        seen[v as usize] = true;
        let mut out = Vec::new();
        while let Some(u) = queue.pop_front() {
            if self.is_fixed(u as u64) {
                out.push(u as u64);
            }
            for &w in self.successors(u as u64) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Whether component `c` supports a fair oscillation.
    fn oscillating(&self, c: u32, members: &[u32]) -> bool {
        let comp = &self.components().comp;
        let full = ActivationSet::full(self.n).bits();
        let mut union = 0u64;
        let mut changing = false;
        for &v in members {
            for (s, &w) in self.successors(v as u64).iter().enumerate() {
                if comp[w as usize] == c {
                    union |= s as u64;
                    changing |= w != v;
                }
            }
        }
        changing && union == full
    }

    pub fn committed(&self) -> CommitMap<T::Point> {
        #[derive(Clone, Copy, PartialEq)]
        enum Reach {
            None,
            One(u32),
            Many,
        }
        fn join(a: Reach, b: Reach) -> Reach {
            match (a, b) {
                (Reach::None, x) | (x, Reach::None) => x,
                (Reach::One(x), Reach::One(y)) if x == y => Reach::One(x),
                _ => Reach::Many,
            }
        }

        let comps = self.components();
        let groups = comps.members();
        let mut reach = vec![Reach::None; groups.len()];
        let mut osc = vec![false; groups.len()];
        // ids are reverse topological, so successors are already final
        for (c, members) in groups.iter().enumerate() {
            let mut r = Reach::None;
            let mut o = self.oscillating(c as u32, members);
            for &v in members {
                if self.is_fixed(v as u64) {
                    r = join(r, Reach::One(v));
                }
                for &w in self.successors(v as u64) {
                    let d = comps.comp[w as usize] as usize;
                    if d != c {
                        r = join(r, reach[d]);
                        o |= osc[d];
                    }
                }
            }
            reach[c] = r;
            osc[c] = o;
        }
        let entries = (0..self.size)
            .map(|v| {
                let c = comps.comp[v] as usize;
                match (reach[c], osc[c]) {
                    (Reach::One(b), false) => Commitment::CommittedTo(self.system.point(b as u64)),
                    _ => Commitment::Uncommitted,
                }
            })
            .collect();
        CommitMap { entries }
    }

    pub fn convergence(&self) -> ConvergenceVerdict {
        let comps = self.components();
        for (c, members) in comps.members().iter().enumerate() {
            if self.oscillating(c as u32, members) {
                let start = members[0];
                let cycle = self.closed_walk(c as u32, members, start);
                return ConvergenceVerdict::NonConvergent {
                    witness: Witness {
                        initial: self.system.window(start as u64),
                        prefix: Vec::new(),
                        cycle,
                    },
                };
            }
        }
        ConvergenceVerdict::Convergent
    }

    /// Shortest path from `from` to `to` staying inside component `c`, as
    /// `(label, target)` hops.
    fn path_within(&self, c: u32, from: u32, to: u32) -> Vec<(u64, u32)> {
        if from == to {
            return Vec::new();
        }
        let comp = &self.components().comp;
        let mut parent: std::collections::HashMap<u32, (u32, u64)> = Default::default();
        let mut queue = VecDeque::from([from]);
        parent.insert(from, (from, 0));
        while let Some(u) = queue.pop_front() {
            for (s, &w) in self.successors(u as u64).iter().enumerate() {
                if comp[w as usize] != c || parent.contains_key(&w) {
                    continue;
                }
                parent.insert(w, (u, s as u64));
                if w == to {
                    let mut hops = Vec::new();
                    let mut x = to;
                    while x != from {
                        let (p, s) = parent[&x];
                        hops.push((s, x));
                        x = p;
                    }
                    hops.reverse();
                    return hops;
                }
                queue.push_back(w);
            }
        }
        unreachable!("components are strongly connected")
    }

    /// A closed walk from `start` inside an oscillating component that
    /// activates every node and changes the state at least once.
    fn closed_walk(&self, c: u32, members: &[u32], start: u32) -> Vec<ActivationSet> {
        let comp = &self.components().comp;
        let full = ActivationSet::full(self.n).bits();
        let mut uncovered = full;
        let mut changed = false;
        let mut cur = start;
        let mut labels: Vec<u64> = Vec::new();
        fn take(labels: &mut Vec<u64>, cur: &mut u32, s: u64, w: u32, uncovered: &mut u64, changed: &mut bool) {
            labels.push(s);
            *uncovered &= !s;
            *changed |= w != *cur;
            *cur = w;
        }
        while uncovered != 0 || !changed {
            let mut best: Option<((u32, bool), u32, u64)> = None;
            for &v in members {
                for (s, &w) in self.successors(v as u64).iter().enumerate() {
                    if comp[w as usize] != c {
                        continue;
                    }
                    let key = ((s as u64 & uncovered).count_ones(), !changed && w != v);
                    if key == (0, false) {
                        continue;
                    }
                    if best.map_or(true, |(k, _, _)| key > k) {
                        best = Some((key, v, s as u64));
                    }
                }
            }
            let (_, v, s) = best.expect("component covers all nodes and changes state");
            for (ls, w) in self.path_within(c, cur, v) {
                take(&mut labels, &mut cur, ls, w, &mut uncovered, &mut changed);
            }
            let w = self.successor(v as u64, s) as u32;
            take(&mut labels, &mut cur, s, w, &mut uncovered, &mut changed);
        }
        for (ls, w) in self.path_within(c, cur, start) {
            take(&mut labels, &mut cur, ls, w, &mut uncovered, &mut changed);
        }
        primitive_root(&labels)
            .iter()
            .map(|&s| ActivationSet::from_bits(s))
            .collect()
    }
}

/// Shortest prefix whose repetition spells `word`.
pub(crate) fn primitive_root<T: PartialEq + Clone>(word: &[T]) -> Vec<T> {
    let len = word.len();
    for p in 1..=len {
        if len % p == 0 && (p..len).all(|i| word[i] == word[i - p]) {
            return word[..p].to_vec();
        }
    }
    word.to_vec()
}

pub fn transition_graph<T: TransitionSystem>(system: &T) -> Result<TransitionGraph<'_, T>> {
    TransitionGraph::build(system)
}

pub fn stable_states<T: TransitionSystem>(system: &T) -> Result<Vec<T::Point>> {
    stable_states_within(system, Budget::default())
}

pub fn stable_states_within<T: TransitionSystem>(
    system: &T,
    budget: Budget,
) -> Result<Vec<T::Point>> {
    check_size(budget, "joint state space", system.state_count() as u128)?;
    let mut buf = Vec::new();
    let mut out = Vec::new();
    for v in 0..system.state_count() {
        system.successors(v, &mut buf);
        if buf.iter().all(|&w| w == v) {
            out.push(system.point(v));
        }
    }
    Ok(out)
}

pub fn spectrum<T: TransitionSystem>(system: &T, point: &T::Point) -> Result<Vec<T::Point>> {
    spectrum_within(system, point, Budget::default())
}

pub fn spectrum_within<T: TransitionSystem>(
    system: &T,
    point: &T::Point,
    budget: Budget,
) -> Result<Vec<T::Point>> {
    let v = system.index_of(point)?;
    let g = TransitionGraph::build_within(system, budget)?;
    Ok(g.spectrum_indices(v)
        .into_iter()
        .map(|b| system.point(b))
        .collect())
}

pub fn committed_map<T: TransitionSystem>(system: &T) -> Result<CommitMap<T::Point>> {
    committed_map_within(system, Budget::default())
}

pub fn committed_map_within<T: TransitionSystem>(
    system: &T,
    budget: Budget,
) -> Result<CommitMap<T::Point>> {
    Ok(TransitionGraph::build_within(system, budget)?.committed())
}

pub fn decide_convergence<T: TransitionSystem>(system: &T) -> Result<ConvergenceVerdict> {
    decide_convergence_within(system, Budget::default())
}

pub fn decide_convergence_within<T: TransitionSystem>(
    system: &T,
    budget: Budget,
) -> Result<ConvergenceVerdict> {
    Ok(TransitionGraph::build_within(system, budget)?.convergence())
}
