//! States, action spaces, activation sets and the reaction semantics shared by
//! every other module.
//!
//! Actions and nodes are 0-based internally. Activation sets print 1-based
//! (`{1,2}`) because that is how schedules are usually written down.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Default cap on materialized joint states (tables, graphs, product graphs).
pub const DEFAULT_STATE_BUDGET: u64 = 1 << 20;

/// Enumeration budget for anything that materializes a table or a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_states: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: DEFAULT_STATE_BUDGET,
        }
    }
}

impl Budget {
    pub fn new(max_states: u64) -> Self {
        Budget { max_states }
    }

    pub fn check(&self, what: &'static str, size: u128) -> Result<()> {
        if size > self.max_states as u128 {
            return Err(Error::BudgetExceeded {
                what,
                size,
                budget: self.max_states,
            });
        }
        Ok(())
    }
}

/// Per-node action counts. States are encoded in mixed radix with node 1 as
/// the most significant digit, so index order is lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpace {
    sizes: Vec<usize>,
    weights: Vec<u64>,
    count: u64,
}

impl ActionSpace {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(invalid("an action space needs at least one node"));
        }
        if sizes.len() > 64 {
            return Err(Error::Unsupported(format!(
                "{} nodes; activation sets are limited to 64 nodes",
                sizes.len()
            )));
        }
        if let Some(i) = sizes.iter().position(|&k| k == 0) {
            return Err(invalid(format!("node {} has an empty action space", i + 1)));
        }
        let mut weights = vec![0u64; sizes.len()];
        let mut acc: u64 = 1;
        for i in (0..sizes.len()).rev() {
            weights[i] = acc;
            acc = acc.checked_mul(sizes[i] as u64).ok_or_else(|| {
                Error::Unsupported("joint state count does not fit in 64 bits".into())
            })?;
        }
        Ok(ActionSpace {
            sizes,
            weights,
            count: acc,
        })
    }

    pub fn uniform(nodes: usize, actions: usize) -> Result<Self> {
        Self::new(vec![actions; nodes])
    }

    pub fn node_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, node: usize) -> usize {
        self.sizes[node]
    }

    pub fn state_count(&self) -> u64 {
        self.count
    }

    pub fn contains(&self, state: &[usize]) -> bool {
        state.len() == self.sizes.len() && state.iter().zip(&self.sizes).all(|(&a, &k)| a < k)
    }

    pub fn check(&self, state: &[usize]) -> Result<()> {
        if state.len() != self.sizes.len() {
            return Err(invalid(format!(
                "state has {} coordinates, expected {}",
                state.len(),
                self.sizes.len()
            )));
        }
        for (i, (&a, &k)) in state.iter().zip(&self.sizes).enumerate() {
            if a >= k {
                return Err(invalid(format!(
                    "action {a} of node {} is out of range 0..{k}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Caller guarantees `state` is valid.
    pub fn encode(&self, state: &[usize]) -> u64 {
        state
            .iter()
            .zip(&self.weights)
            .map(|(&a, &w)| a as u64 * w)
            .sum()
    }

    pub fn index_of(&self, state: &[usize]) -> Result<u64> {
        self.check(state)?;
        Ok(self.encode(state))
    }

    pub fn decode_into(&self, mut index: u64, out: &mut [usize]) {
        debug_assert!(index < self.count);
        for i in (0..self.sizes.len()).rev() {
            let k = self.sizes[i] as u64;
            out[i] = (index % k) as usize;
            index /= k;
        }
    }

    pub fn decode(&self, index: u64) -> State {
        let mut v = vec![0; self.sizes.len()];
        self.decode_into(index, &mut v);
        State(v)
    }

    pub(crate) fn weight(&self, node: usize) -> u64 {
        self.weights[node]
    }

    /// All states in index order.
    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.count).map(move |i| self.decode(i))
    }

    pub fn full_set(&self) -> ActivationSet {
        ActivationSet::full(self.node_count())
    }
}

/// A joint action tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(Vec<usize>);

impl State {
    pub fn new(actions: Vec<usize>) -> Self {
        State(actions)
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn with(&self, node: usize, action: usize) -> State {
        let mut v = self.0.clone();
        v[node] = action;
        State(v)
    }

    /// `a_{-i}`: the state with node `i`'s action dropped.
    pub fn without(&self, node: usize) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != node)
            .map(|(_, &a)| a)
            .collect()
    }
}

impl From<Vec<usize>> for State {
    fn from(v: Vec<usize>) -> Self {
        State(v)
    }
}

impl<const N: usize> From<[usize; N]> for State {
    fn from(v: [usize; N]) -> Self {
        State(v.to_vec())
    }
}

impl Deref for State {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A subset of nodes activated in one time step (bit `i` = node `i+1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ActivationSet(u64);

impl ActivationSet {
    pub const EMPTY: ActivationSet = ActivationSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ActivationSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ActivationSet(u64::MAX)
        } else {
            ActivationSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(node: usize) -> Self {
        ActivationSet(1u64 << node)
    }

    /// Builds a set from 0-based node indices.
    pub fn from_nodes<I: IntoIterator<Item = usize>>(nodes: I) -> Self {
        ActivationSet(nodes.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    /// Builds a set from 1-based node labels, as written in schedules.
    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Result<Self> {
        let mut bits = 0u64;
        for l in labels {
            if l == 0 || l > 64 {
                return Err(invalid(format!("node label {l} is out of range")));
            }
            bits |= 1u64 << (l - 1);
        }
        Ok(ActivationSet(bits))
    }

    pub fn contains(self, node: usize) -> bool {
        node < 64 && self.0 >> node & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: ActivationSet) -> Self {
        ActivationSet(self.0 | other.0)
    }

    pub fn within(self, n: usize) -> bool {
        self.0 & !ActivationSet::full(n).0 == 0
    }

    pub fn check(self, n: usize) -> Result<()> {
        if self.within(n) {
            Ok(())
        } else {
            Err(invalid(format!("activation set {self} names nodes beyond {n}")))
        }
    }

    /// 0-based node indices in increasing order.
    pub fn nodes(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.0 >> i & 1 == 1)
    }

    /// Every subset of `{1..n}` in increasing bit order; the analyzer relies
    /// on subset `s` sitting at position `s`.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = ActivationSet> {
        (0..(1u64 << n)).map(ActivationSet)
    }
}

impl fmt::Display for ActivationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.nodes().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for ActivationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for ActivationSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.nodes().map(|i| i + 1))
    }
}

impl<'de> Deserialize<'de> for ActivationSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<usize>::deserialize(d)?;
        ActivationSet::from_labels(labels).map_err(serde::de::Error::custom)
    }
}

/// A nonempty sequence of states, oldest first.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HistoryWindow(Vec<State>);

impl HistoryWindow {
    pub fn new(states: Vec<State>) -> Result<Self> {
        if states.is_empty() {
            return Err(invalid("a history needs at least one state"));
        }
        Ok(HistoryWindow(states))
    }

    pub fn single(state: State) -> Self {
        HistoryWindow(vec![state])
    }

    pub fn states(&self) -> &[State] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> &State {
        self.0.last().expect("windows are nonempty")
    }

    /// The `k` most recent states.
    pub fn recent(&self, k: usize) -> &[State] {
        &self.0[self.0.len() - k..]
    }

    pub fn check(&self, space: &ActionSpace) -> Result<()> {
        self.0.iter().try_for_each(|s| space.check(s))
    }
}

impl fmt::Debug for HistoryWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl fmt::Display for HistoryWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.states().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// `result_i = proposal_i` for activated `i`, else `current_i`.
pub fn apply_activation(current: &[usize], proposal: &[usize], active: ActivationSet) -> State {
    State(
        current
            .iter()
            .zip(proposal)
            .enumerate()
            .map(|(i, (&c, &p))| if active.contains(i) { p } else { c })
            .collect(),
    )
}

pub type RuleFn = dyn Fn(&State) -> State + Send + Sync;

#[derive(Clone)]
enum Reaction {
    Table(Arc<[u64]>),
    Rule(Arc<RuleFn>),
}

/// A historyless interaction system: every node reacts to the current state.
#[derive(Clone)]
pub struct HistorylessSystem {
    space: ActionSpace,
    reaction: Reaction,
}

impl fmt::Debug for HistorylessSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HistorylessSystem")
            .field("sizes", &self.space.sizes())
            .field("table", &matches!(self.reaction, Reaction::Table(_)))
            .finish()
    }
}

impl HistorylessSystem {
    /// `table[s]` is `f(a)` for the state with index `s`.
    pub fn from_table(space: ActionSpace, table: Vec<State>) -> Result<Self> {
        Budget::default().check("reaction table", space.state_count() as u128)?;
        if table.len() as u64 != space.state_count() {
            return Err(invalid(format!(
                "reaction table has {} rows, expected {}",
                table.len(),
                space.state_count()
            )));
        }
        let mut idx = Vec::with_capacity(table.len());
        for (row, s) in table.iter().enumerate() {
            let i = space
                .index_of(s)
                .map_err(|e| invalid(format!("row {row}: {e}")))?;
            idx.push(i);
        }
        Ok(HistorylessSystem {
            space,
            reaction: Reaction::Table(idx.into()),
        })
    }

    pub fn from_index_table(space: ActionSpace, table: Vec<u64>) -> Result<Self> {
        if table.len() as u64 != space.state_count() {
            return Err(invalid("reaction table length does not match the state count"));
        }
        if table.iter().any(|&i| i >= space.state_count()) {
            return Err(invalid("reaction table names a state outside the space"));
        }
        Ok(HistorylessSystem {
            space,
            reaction: Reaction::Table(table.into()),
        })
    }

    /// A lazily evaluated joint reaction map. The closure must return a
    /// valid state of `space`.
    pub fn from_rule<F>(space: ActionSpace, rule: F) -> Self
    where
        F: Fn(&State) -> State + Send + Sync + 'static,
    {
        HistorylessSystem {
            space,
            reaction: Reaction::Rule(Arc::new(rule)),
        }
    }

    /// Convenience for per-node rules: `rule(i, a)` is `f_i(a)`.
    pub fn from_node_rule<F>(space: ActionSpace, rule: F) -> Self
    where
        F: Fn(usize, &State) -> usize + Send + Sync + 'static,
    {
        let n = space.node_count();
        Self::from_rule(space, move |a| State((0..n).map(|i| rule(i, a)).collect()))
    }

    pub fn identity(space: ActionSpace) -> Self {
        Self::from_rule(space, |a| a.clone())
    }

    pub fn space(&self) -> &ActionSpace {
        &self.space
    }

    pub fn node_count(&self) -> usize {
        self.space.node_count()
    }

    pub fn is_table(&self) -> bool {
        matches!(self.reaction, Reaction::Table(_))
    }

    /// `f(a)`; `state` must be valid.
    pub fn reaction(&self, state: &State) -> State {
        match &self.reaction {
            Reaction::Table(t) => self.space.decode(t[self.space.encode(state) as usize]),
            Reaction::Rule(f) => f(state),
        }
    }

    pub fn reaction_index(&self, index: u64) -> u64 {
        match &self.reaction {
            Reaction::Table(t) => t[index as usize],
            Reaction::Rule(f) => self.space.encode(&f(&self.space.decode(index))),
        }
    }

    /// Evaluates the rule on every state and returns the table form.
    pub fn materialize(&self, budget: Budget) -> Result<HistorylessSystem> {
        if self.is_table() {
            return Ok(self.clone());
        }
        budget.check("joint state space", self.space.state_count() as u128)?;
        let mut table = Vec::with_capacity(self.space.state_count() as usize);
        for s in self.space.states() {
            let r = self.reaction(&s);
            self.space.check(&r).map_err(|e| {
                invalid(format!("reaction at {s} is not a valid state: {e}"))
            })?;
            table.push(self.space.encode(&r));
        }
        Ok(HistorylessSystem {
            space: self.space.clone(),
            reaction: Reaction::Table(table.into()),
        })
    }

    /// The table as explicit states, in index order.
    pub fn table(&self, budget: Budget) -> Result<Vec<State>> {
        budget.check("joint state space", self.space.state_count() as u128)?;
        Ok(self.space.states().map(|s| self.reaction(&s)).collect())
    }

    pub fn step(&self, state: &State, active: ActivationSet) -> Result<State> {
        self.space.check(state)?;
        active.check(self.node_count())?;
        if active.is_empty() {
            return Ok(state.clone());
        }
        Ok(apply_activation(state, &self.reaction(state), active))
    }

    pub fn is_stable(&self, state: &State) -> Result<bool> {
        self.space.check(state)?;
        Ok(self.reaction(state) == *state)
    }

    /// Exhaustive scan for pairs of states that differ only at node `i` but
    /// get different reactions at `i`.
    pub fn check_self_independent(&self, budget: Budget) -> Result<SelfIndependence> {
        budget.check("joint state space", self.space.state_count() as u128)?;
        let table = self.materialize(budget)?;
        let mut violations = Vec::new();
        let mut buf = vec![0; self.node_count()];
        for idx in 0..self.space.state_count() {
            self.space.decode_into(idx, &mut buf);
            let fa = self.space.decode(table.reaction_index(idx));
            for i in 0..self.node_count() {
                // compare against the representative with a_i = 0
                if buf[i] == 0 {
                    continue;
                }
                let base = idx - buf[i] as u64 * self.space.weight(i);
                let fb = self.space.decode(table.reaction_index(base));
                if fa[i] != fb[i] {
                    if violations.len() < MAX_WITNESSES {
                        violations.push(SelfDependence {
                            node: i,
                            state: self.space.decode(base),
                            other: self.space.decode(idx),
                        });
                    } else {
                        return Ok(SelfIndependence { violations });
                    }
                }
            }
        }
        Ok(SelfIndependence { violations })
    }
}

const MAX_WITNESSES: usize = 64;

/// Outcome of [`HistorylessSystem::check_self_independent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfIndependence {
    pub violations: Vec<SelfDependence>,
}

impl SelfIndependence {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `state` and `other` differ only at `node`, yet `f_node` differs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfDependence {
    pub node: usize,
    pub state: State,
    pub other: State,
}

pub type WindowRuleFn = dyn Fn(&[State]) -> State + Send + Sync;
pub type TimedRuleFn = dyn Fn(&[State], u64) -> State + Send + Sync;

#[derive(Clone)]
enum KReaction {
    Stationary(Arc<WindowRuleFn>),
    Timed(Arc<TimedRuleFn>),
}

/// A system whose reactions read the `k` most recent states and, unless
/// stationary, the time counter.
#[derive(Clone)]
pub struct KRecallSystem {
    space: ActionSpace,
    k: usize,
    reaction: KReaction,
}

impl fmt::Debug for KRecallSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KRecallSystem")
            .field("sizes", &self.space.sizes())
            .field("k", &self.k)
            .field("stationary", &self.is_stationary())
            .finish()
    }
}

impl KRecallSystem {
    /// `rule` receives exactly `k` states, oldest first.
    pub fn stationary<F>(space: ActionSpace, k: usize, rule: F) -> Result<Self>
    where
        F: Fn(&[State]) -> State + Send + Sync + 'static,
    {
        if k == 0 {
            return Err(invalid("recall depth must be at least 1"));
        }
        Ok(KRecallSystem {
            space,
            k,
            reaction: KReaction::Stationary(Arc::new(rule)),
        })
    }

    /// `rule` receives the `k` most recent states and the time `t` of the
    /// state being produced.
    pub fn timed<F>(space: ActionSpace, k: usize, rule: F) -> Result<Self>
    where
        F: Fn(&[State], u64) -> State + Send + Sync + 'static,
    {
        if k == 0 {
            return Err(invalid("recall depth must be at least 1"));
        }
        Ok(KRecallSystem {
            space,
            k,
            reaction: KReaction::Timed(Arc::new(rule)),
        })
    }

    pub fn from_historyless(system: &HistorylessSystem) -> Self {
        let sys = system.clone();
        KRecallSystem {
            space: system.space().clone(),
            k: 1,
            reaction: KReaction::Stationary(Arc::new(move |w: &[State]| sys.reaction(&w[0]))),
        }
    }

    pub fn space(&self) -> &ActionSpace {
        &self.space
    }

    pub fn node_count(&self) -> usize {
        self.space.node_count()
    }

    pub fn recall(&self) -> usize {
        self.k
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self.reaction, KReaction::Stationary(_))
    }

    /// Joint reaction to the last `k` states; `t` is ignored when stationary.
    pub fn reaction(&self, recent: &[State], t: u64) -> State {
        debug_assert_eq!(recent.len(), self.k);
        match &self.reaction {
            KReaction::Stationary(f) => f(recent),
            KReaction::Timed(f) => f(recent, t),
        }
    }

    /// The state at time `t`, given a window ending at time `t-1`.
    pub fn step_history(
        &self,
        window: &HistoryWindow,
        t: u64,
        active: ActivationSet,
    ) -> Result<State> {
        if window.len() < self.k {
            return Err(Error::InsufficientHistory {
                got: window.len(),
                needed: self.k,
            });
        }
        if t < self.k as u64 {
            return Err(invalid(format!(
                "reactions are defined from time {} on, got t = {t}",
                self.k
            )));
        }
        window.check(&self.space)?;
        active.check(self.node_count())?;
        let last = window.last();
        if active.is_empty() {
            return Ok(last.clone());
        }
        let proposal = self.reaction(window.recent(self.k), t);
        Ok(apply_activation(last, &proposal, active))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn copy_system() -> HistorylessSystem {
        let space = ActionSpace::uniform(2, 2).unwrap();
        HistorylessSystem::from_node_rule(space, |i, a| a[1 - i])
    }

    #[test]
    fn encode_is_lexicographic() {
        let space = ActionSpace::new(vec![2, 3]).unwrap();
        let all: Vec<_> = space.states().collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(space.encode(&[1, 2]), 5);
        assert_eq!(space.decode(4), State::from([1, 1]));
    }

    #[test]
    fn rejects_empty_action_space() {
        assert!(ActionSpace::new(vec![2, 0]).is_err());
        assert!(ActionSpace::new(vec![]).is_err());
    }

    #[test]
    fn step_follows_copy_rule() {
        let sys = copy_system();
        let full = ActivationSet::full(2);
        assert_eq!(sys.step(&[0, 1].into(), full).unwrap(), State::from([1, 0]));
        assert_eq!(
            sys.step(&[1, 0].into(), ActivationSet::singleton(0)).unwrap(),
            State::from([0, 0])
        );
        assert_eq!(
            sys.step(&[1, 0].into(), ActivationSet::EMPTY).unwrap(),
            State::from([1, 0])
        );
    }

    #[test]
    fn step_rejects_bad_inputs() {
        let sys = copy_system();
        assert!(matches!(
            sys.step(&[0, 2].into(), ActivationSet::EMPTY),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            sys.step(&[0, 0].into(), ActivationSet::singleton(2)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn self_independence_detects_own_action_use() {
        assert!(copy_system()
            .check_self_independent(Budget::default())
            .unwrap()
            .holds());
        let space = ActionSpace::uniform(2, 2).unwrap();
        let keep = HistorylessSystem::identity(space.clone());
        let report = keep.check_self_independent(Budget::default()).unwrap();
        assert!(!report.holds());
        let v = &report.violations[0];
        assert_eq!(v.state.without(v.node), v.other.without(v.node));
        let constant = HistorylessSystem::from_rule(space, |_| State::from([1, 0]));
        assert!(constant
            .check_self_independent(Budget::default())
            .unwrap()
            .holds());
    }

    #[test]
    fn table_and_rule_agree() {
        let rule = copy_system();
        let table = rule.materialize(Budget::default()).unwrap();
        for s in rule.space().states() {
            assert_eq!(rule.reaction(&s), table.reaction(&s));
        }
        let rebuilt =
            HistorylessSystem::from_table(rule.space().clone(), rule.table(Budget::default()).unwrap())
                .unwrap();
        for s in rule.space().states() {
            assert_eq!(rule.reaction(&s), rebuilt.reaction(&s));
        }
    }

    #[test]
    fn materialize_respects_budget() {
        let space = ActionSpace::uniform(4, 4).unwrap();
        let sys = HistorylessSystem::identity(space);
        assert!(matches!(
            sys.materialize(Budget::new(100)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn step_history_requires_k_states() {
        let space = ActionSpace::uniform(2, 2).unwrap();
        let sys = KRecallSystem::stationary(space, 2, |w| w[0].clone()).unwrap();
        let short = HistoryWindow::single(State::from([0, 0]));
        assert_eq!(
            sys.step_history(&short, 2, ActivationSet::full(2)),
            Err(Error::InsufficientHistory { got: 1, needed: 2 })
        );
        let w = HistoryWindow::new(vec![[1, 1].into(), [0, 0].into()]).unwrap();
        assert_eq!(
            sys.step_history(&w, 2, ActivationSet::full(2)).unwrap(),
            State::from([1, 1])
        );
        assert_eq!(
            sys.step_history(&w, 2, ActivationSet::EMPTY).unwrap(),
            State::from([0, 0])
        );
    }

    #[test]
    fn one_recall_wrapper_matches_step() {
        let sys = copy_system();
        let wrapped = KRecallSystem::from_historyless(&sys);
        for s in sys.space().states() {
            for act in ActivationSet::all_subsets(2) {
                let w = HistoryWindow::single(s.clone());
                assert_eq!(
                    wrapped.step_history(&w, 1, act).unwrap(),
                    sys.step(&s, act).unwrap()
                );
            }
        }
    }

    #[test]
    fn activation_set_display() {
        assert_eq!(ActivationSet::EMPTY.to_string(), "{}");
        assert_eq!(ActivationSet::from_nodes([0, 1]).to_string(), "{1,2}");
        assert_eq!(
            ActivationSet::from_labels([3, 1]).unwrap(),
            ActivationSet::from_nodes([0, 2])
        );
    }
}
