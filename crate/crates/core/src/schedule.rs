//! Schedules: finite descriptions of infinite activation-set streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::ActivationSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Schedule {
    /// A finite list; the stream ends after it.
    Explicit { sets: Vec<ActivationSet> },
    /// `prefix` once, then `cycle` forever.
    Periodic {
        #[serde(default)]
        prefix: Vec<ActivationSet>,
        cycle: Vec<ActivationSet>,
    },
    /// Each node independently active with probability `p` at every step.
    SeededRandom { seed: u64, p: f64 },
    /// Random sets, with any node idle for `r - 1` steps forced on.
    SeededRFair { seed: u64, r: usize },
    Synchronous,
    RoundRobin,
}

impl Schedule {
    pub fn periodic(prefix: Vec<ActivationSet>, cycle: Vec<ActivationSet>) -> Self {
        Schedule::Periodic { prefix, cycle }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let check_all = |sets: &[ActivationSet]| sets.iter().try_for_each(|s| s.check(n));
        match self {
            Schedule::Explicit { sets } => check_all(sets),
            Schedule::Periodic { prefix, cycle } => {
                if cycle.is_empty() {
                    return Err(invalid("periodic schedule needs a nonempty cycle"));
                }
                check_all(prefix)?;
                check_all(cycle)
            }
            Schedule::SeededRandom { p, .. } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(invalid(format!("activation probability {p} is not in [0,1]")));
                }
                Ok(())
            }
            Schedule::SeededRFair { r, .. } => {
                if *r == 0 {
                    return Err(invalid("r must be at least 1"));
                }
                Ok(())
            }
            Schedule::Synchronous | Schedule::RoundRobin => Ok(()),
        }
    }

    /// Schedules whose future depends only on a finite phase counter; runs
    /// under them can be certified as cycling.
    pub fn is_finitely_phased(&self) -> bool {
        matches!(
            self,
            Schedule::Periodic { .. } | Schedule::Synchronous | Schedule::RoundRobin
        )
    }

    pub fn stream(&self, n: usize) -> Result<ScheduleStream> {
        self.validate(n)?;
        let rng = match self {
            Schedule::SeededRandom { seed, .. } | Schedule::SeededRFair { seed, .. } => {
                Some(ChaCha8Rng::seed_from_u64(*seed))
            }
            _ => None,
        };
        Ok(ScheduleStream {
            schedule: self.clone(),
            n,
            t: 0,
            rng,
            idle: vec![0; n],
        })
    }
}

/// Iterator over the activation sets `sigma(1), sigma(2), ...`.
#[derive(Debug, Clone)]
pub struct ScheduleStream {
    schedule: Schedule,
    n: usize,
    t: usize,
    rng: Option<ChaCha8Rng>,
    idle: Vec<usize>,
}

impl ScheduleStream {
    /// Number of sets produced so far.
    pub fn position(&self) -> usize {
        self.t
    }

    /// Phase of the next set for finitely phased schedules; `None` while in a
    /// periodic prefix or for other schedules.
    pub fn phase(&self) -> Option<usize> {
        match &self.schedule {
            Schedule::Synchronous => Some(0),
            Schedule::RoundRobin => Some(self.t % self.n),
            Schedule::Periodic { prefix, cycle } => {
                (self.t >= prefix.len()).then(|| (self.t - prefix.len()) % cycle.len())
            }
            _ => None,
        }
    }
}

impl Iterator for ScheduleStream {
    type Item = ActivationSet;

    fn next(&mut self) -> Option<ActivationSet> {
        let t = self.t;
        let n = self.n;
        let set = match &self.schedule {
            Schedule::Explicit { sets } => *sets.get(t)?,
            Schedule::Periodic { prefix, cycle } => {
                if t < prefix.len() {
                    prefix[t]
                } else {
                    cycle[(t - prefix.len()) % cycle.len()]
                }
            }
            Schedule::Synchronous => ActivationSet::full(n),
            Schedule::RoundRobin => ActivationSet::singleton(t % n),
            Schedule::SeededRandom { p, .. } => {
                let rng = self.rng.as_mut().expect("seeded");
                ActivationSet::from_nodes((0..n).filter(|_| rng.gen_bool(*p)))
            }
            Schedule::SeededRFair { r, .. } => {
                let r = *r;
                let rng = self.rng.as_mut().expect("seeded");
                let mut nodes = Vec::new();
                for i in 0..n {
                    if self.idle[i] + 1 >= r || rng.gen_bool(0.5) {
                        nodes.push(i);
                        self.idle[i] = 0;
                    } else {
                        self.idle[i] += 1;
                    }
                }
                ActivationSet::from_nodes(nodes)
            }
        };
        self.t += 1;
        Some(set)
    }
}

/// The first `length` activation sets (fewer if an explicit list ends).
pub fn schedule_prefix(schedule: &Schedule, n: usize, length: usize) -> Result<Vec<ActivationSet>> {
    Ok(schedule.stream(n)?.take(length).collect())
}

/// Whether every node in `0..n` appears in every window of `r` consecutive
/// entries that lies inside `prefix`.
pub fn check_r_fair(prefix: &[ActivationSet], r: usize, n: usize) -> Result<bool> {
    if r == 0 {
        return Err(invalid("r must be at least 1"));
    }
    let mut last_seen: Vec<Option<usize>> = vec![None; n];
    for (t, set) in prefix.iter().enumerate() {
        for (i, seen) in last_seen.iter_mut().enumerate() {
            if set.contains(i) {
                *seen = Some(t);
            }
        }
        // the window ending at t is [t+1-r, t]
        if t + 1 >= r {
            let start = t + 1 - r;
            if last_seen.iter().any(|s| s.map_or(true, |s| s < start)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(v: &[&[usize]]) -> Vec<ActivationSet> {
        v.iter()
            .map(|s| ActivationSet::from_labels(s.iter().copied()).unwrap())
            .collect()
    }

    #[test]
    fn synchronous_and_round_robin_prefixes() {
        assert_eq!(
            schedule_prefix(&Schedule::Synchronous, 2, 3).unwrap(),
            sets(&[&[1, 2], &[1, 2], &[1, 2]])
        );
        assert_eq!(
            schedule_prefix(&Schedule::RoundRobin, 2, 3).unwrap(),
            sets(&[&[1], &[2], &[1]])
        );
    }

    #[test]
    fn periodic_phase_starts_after_prefix() {
        let s = Schedule::periodic(sets(&[&[1]]), sets(&[&[2], &[1, 2]]));
        let mut st = s.stream(2).unwrap();
        assert_eq!(st.phase(), None);
        st.next();
        assert_eq!(st.phase(), Some(0));
        st.next();
        assert_eq!(st.phase(), Some(1));
        st.next();
        assert_eq!(st.phase(), Some(0));
        assert!(Schedule::periodic(vec![], vec![]).validate(2).is_err());
    }

    #[test]
    fn r_fair_examples() {
        let sync = schedule_prefix(&Schedule::Synchronous, 3, 10).unwrap();
        assert!(check_r_fair(&sync, 1, 3).unwrap());
        let rr = schedule_prefix(&Schedule::RoundRobin, 4, 20).unwrap();
        assert!(check_r_fair(&rr, 4, 4).unwrap());
        assert!(!check_r_fair(&rr, 3, 4).unwrap());
        assert!(!check_r_fair(&sets(&[&[1], &[1], &[2]]), 2, 2).unwrap());
        assert!(check_r_fair(&[], 0, 2).is_err());
    }

    #[test]
    fn seeded_r_fair_is_r_fair_and_reproducible() {
        for r in 1..6 {
            let s = Schedule::SeededRFair { seed: 7 + r as u64, r };
            let a = schedule_prefix(&s, 5, 500).unwrap();
            let b = schedule_prefix(&s, 5, 500).unwrap();
            assert_eq!(a, b);
            assert!(check_r_fair(&a, r, 5).unwrap(), "r = {r}");
        }
    }

    #[test]
    fn explicit_list_ends() {
        let s = Schedule::Explicit {
            sets: sets(&[&[1], &[2]]),
        };
        assert_eq!(schedule_prefix(&s, 2, 10).unwrap().len(), 2);
    }
}
