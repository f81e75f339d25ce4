//! r-fair convergence: a product of the transition graph with per-node
//! counters of steps since the last activation.

use std::collections::VecDeque;

use crate::error::{invalid, Result};
use crate::model::{ActivationSet, Budget};
use crate::schedule::check_r_fair;
use crate::simulator::Witness;
use crate::transition::TransitionSystem;

use super::scc::{tarjan, UNSEEN};
use super::{check_size, primitive_root, ConvergenceVerdict, TransitionGraph};

pub fn decide_r_convergence<T: TransitionSystem>(
    system: &T,
    r: usize,
) -> Result<ConvergenceVerdict> {
    decide_r_convergence_within(system, r, Budget::default())
}

/// Every infinite path of the product is an r-fair run, so the system is
/// r-convergent iff no cycle reachable from a zero-counter node changes
/// the state.
pub fn decide_r_convergence_within<T: TransitionSystem>(
    system: &T,
    r: usize,
    budget: Budget,
) -> Result<ConvergenceVerdict> {
    if r == 0 {
        return Err(invalid("r must be at least 1"));
    }
    let n = system.node_count();
    let codes = (r as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let size = (system.state_count() as u128).saturating_mul(codes);
    check_size(budget, "r-fair product graph", size)?;
    check_size(budget, "r-fair counter table", codes << n)?;
    let base = TransitionGraph::build_within(system, budget)?;
    let product = Product::new(&base, r);

    let roots = (0..system.state_count()).map(|a| (a * product.codes) as u32);
    let comps = tarjan(
        size as usize,
        product.degree,
        roots.clone(),
        |p, s| product.edge(p, s),
    );
    for (c, members) in comps.members().iter().enumerate() {
        for &p in members {
            for s in 0..product.degree {
                let Some(q) = product.edge(p, s) else { continue };
                if comps.comp[q as usize] != c as u32 || product.state(q) == product.state(p) {
                    continue;
                }
                let (origin, prefix) = product.path(roots.clone(), p, |_| true);
                let mut cycle = vec![s as u64];
                let (_, back) = product.path([q], p, |x| comps.comp[x as usize] == c as u32);
                cycle.extend(back);
                let labels = |v: &[u64]| -> Vec<ActivationSet> {
                    v.iter().map(|&s| ActivationSet::from_bits(s)).collect()
                };
                let witness = Witness {
                    initial: system.window(product.state(origin)),
                    prefix: labels(&prefix),
                    cycle: labels(&primitive_root(&cycle)),
                };
                debug_assert!({
                    let mut word = witness.prefix.clone();
                    for _ in 0..=r {
                        word.extend(&witness.cycle);
                    }
                    check_r_fair(&word, r, n).unwrap_or(false)
                });
                return Ok(ConvergenceVerdict::NonConvergent { witness });
            }
        }
    }
    Ok(ConvergenceVerdict::Convergent)
}

struct Product<'g, 'a, T: TransitionSystem> {
    base: &'g TransitionGraph<'a, T>,
    codes: u64,
    degree: usize,
    /// `next[code * degree + s]`: counters after activating `s`, or
    /// `UNSEEN` when some node would stay idle for `r` steps.
    next: Vec<u32>,
}

impl<'g, 'a, T: TransitionSystem> Product<'g, 'a, T> {
    fn new(base: &'g TransitionGraph<'a, T>, r: usize) -> Self {
        let n = base.node_count();
        let degree = 1usize << n;
        let codes = (r as u64).pow(n as u32);
        let mut next = Vec::with_capacity(codes as usize * degree);
        let mut counters = vec![0usize; n];
        for code in 0..codes {
            let mut x = code;
            for c in counters.iter_mut() {
                *c = (x % r as u64) as usize;
                x /= r as u64;
            }
            for s in 0..degree {
                let mut out = 0u64;
                let mut ok = true;
                for i in (0..n).rev() {
                    let c = if s >> i & 1 == 1 { 0 } else { counters[i] + 1 };
                    if c >= r {
                        ok = false;
                        break;
                    }
                    out = out * r as u64 + c as u64;
                }
                next.push(if ok { out as u32 } else { UNSEEN });
            }
        }
        Product {
            base,
            codes,
            degree,
            next,
        }
    }

    fn state(&self, p: u32) -> u64 {
        p as u64 / self.codes
    }

    fn edge(&self, p: u32, s: usize) -> Option<u32> {
        let (a, code) = (p as u64 / self.codes, p as u64 % self.codes);
        let c = self.next[code as usize * self.degree + s];
        if c == UNSEEN {
            return None;
        }
        Some((self.base.successor(a, s as u64) * self.codes + c as u64) as u32)
    }

    /// Breadth-first path from the first reachable source to `target`,
    /// through nodes accepted by `keep`. Returns the source used and the
    /// labels along the way.
    fn path<I, K>(&self, sources: I, target: u32, keep: K) -> (u32, Vec<u64>)
    where
        I: IntoIterator<Item = u32>,
        K: Fn(u32) -> bool,
    {
        let mut parent: std::collections::HashMap<u32, (u32, u64)> = Default::default();
        let mut queue = VecDeque::new();
        for src in sources {
            if parent.contains_key(&src) {
                continue;
            }
            parent.insert(src, (src, u64::MAX));
            queue.push_back(src);
        }
        while let Some(u) = queue.pop_front() {
            if u == target {
                let mut labels = Vec::new();
                let mut x = u;
                loop {
                    let (p, s) = parent[&x];
                    if s == u64::MAX {
                        labels.reverse();
                        return (x, labels);
                    }
                    labels.push(s);
                    x = p;
                }
            }
            for s in 0..self.degree {
                let Some(w) = self.edge(u, s) else { continue };
                if keep(w) && !parent.contains_key(&w) {
                    parent.insert(w, (u, s as u64));
                    queue.push_back(w);
                }
            }
        }
        unreachable!("target lies in the explored region")
    }
}
