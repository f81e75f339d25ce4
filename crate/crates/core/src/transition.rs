//! The generic transition interface consumed by the analyzer: a finite set of
//! indexed states with one successor per activation subset.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{ActionSpace, HistoryWindow, HistorylessSystem, KRecallSystem, State};

pub trait TransitionSystem {
    /// What a graph node stands for (a state, or a window for lifted systems).
    type Point: Clone + fmt::Debug + fmt::Display + PartialEq;

    fn node_count(&self) -> usize;

    fn state_count(&self) -> u64;

    /// Fills `out` with `2^n` entries: `out[s]` is the successor of `index`
    /// under the activation set whose bit pattern is `s`.
    fn successors(&self, index: u64, out: &mut Vec<u64>);

    fn point(&self, index: u64) -> Self::Point;

    fn index_of(&self, point: &Self::Point) -> Result<u64>;

    /// The history a simulator needs to start from this graph node.
    fn window(&self, index: u64) -> HistoryWindow;
}

/// `out[s] = base + sum of delta[i] for bits i of s`, for every subset `s`.
fn subset_sums(base: u64, delta: &[i64], out: &mut Vec<u64>) {
    let n = delta.len();
    out.clear();
    out.reserve(1 << n);
    out.push(base);
    for s in 1..(1usize << n) {
        let low = s.trailing_zeros() as usize;
        let prev = out[s & (s - 1)];
        out.push((prev as i64 + delta[low]) as u64);
    }
}

fn deltas(space: &ActionSpace, from: &[usize], to: &[usize]) -> Vec<i64> {
    (0..space.node_count())
        .map(|i| (to[i] as i64 - from[i] as i64) * space.weight(i) as i64)
        .collect()
}

impl TransitionSystem for HistorylessSystem {
    type Point = State;

    fn node_count(&self) -> usize {
        HistorylessSystem::node_count(self)
    }

    fn state_count(&self) -> u64 {
        self.space().state_count()
    }

    fn successors(&self, index: u64, out: &mut Vec<u64>) {
        let space = self.space();
        let a = space.decode(index);
        let f = space.decode(self.reaction_index(index));
        subset_sums(index, &deltas(space, &a, &f), out);
    }

    fn point(&self, index: u64) -> State {
        self.space().decode(index)
    }

    fn index_of(&self, point: &State) -> Result<u64> {
        self.space().index_of(point)
    }

    fn window(&self, index: u64) -> HistoryWindow {
        HistoryWindow::single(self.point(index))
    }
}

/// A stationary k-recall system viewed as a historyless system over windows
/// of `k` states. Not coordinate-wise over `A^k`; only the transition
/// interface is exposed.
#[derive(Debug, Clone)]
pub struct LiftedSystem {
    inner: KRecallSystem,
    base: u64,
    count: u64,
}

pub fn lift_k_recall(system: &KRecallSystem) -> Result<LiftedSystem> {
    if !system.is_stationary() {
        return Err(Error::Unsupported(
            "a time-dependent system has no finite lifting".into(),
        ));
    }
    let base = system.space().state_count();
    let count = base
        .checked_pow(system.recall() as u32)
        .ok_or_else(|| Error::Unsupported("lifted state count overflows 64 bits".into()))?;
    Ok(LiftedSystem {
        inner: system.clone(),
        base,
        count,
    })
}

impl LiftedSystem {
    pub fn recall(&self) -> usize {
        self.inner.recall()
    }

    pub fn inner(&self) -> &KRecallSystem {
        &self.inner
    }

    fn decode_window(&self, mut index: u64) -> Vec<State> {
        let k = self.inner.recall();
        let mut states = vec![State::new(vec![]); k];
        for j in (0..k).rev() {
            states[j] = self.inner.space().decode(index % self.base);
            index /= self.base;
        }
        states
    }
}

impl TransitionSystem for LiftedSystem {
    type Point = HistoryWindow;

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn state_count(&self) -> u64 {
        self.count
    }

    fn successors(&self, index: u64, out: &mut Vec<u64>) {
        let space = self.inner.space();
        let states = self.decode_window(index);
        let last = states.last().expect("k >= 1");
        let proposal = self.inner.reaction(&states, self.inner.recall() as u64);
        // drop the oldest state, append the new one
        let shifted = (index % (self.count / self.base)) * self.base;
        subset_sums(
            shifted + space.encode(last),
            &deltas(space, last, &proposal),
            out,
        );
    }

    fn point(&self, index: u64) -> HistoryWindow {
        HistoryWindow::new(self.decode_window(index)).expect("k >= 1")
    }

    fn index_of(&self, point: &HistoryWindow) -> Result<u64> {
        let k = self.inner.recall();
        if point.len() < k {
            return Err(Error::InsufficientHistory {
                got: point.len(),
                needed: k,
            });
        }
        let mut idx = 0u64;
        for s in point.recent(k) {
            idx = idx * self.base + self.inner.space().index_of(s)?;
        }
        Ok(idx)
    }

    fn window(&self, index: u64) -> HistoryWindow {
        self.point(index)
    }
}
