//! Step-by-step runs of a system under a schedule.

use std::collections::HashMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{
    apply_activation, ActionSpace, ActivationSet, HistoryWindow, HistorylessSystem,
    KRecallSystem, State,
};
use crate::schedule::Schedule;

pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

/// Anything the simulator can drive: historyless and k-recall systems.
pub trait Dynamics {
    fn space(&self) -> &ActionSpace;

    fn recall(&self) -> usize;

    fn is_stationary(&self) -> bool;

    /// Joint reaction at time `t` to the `recall()` most recent states.
    fn propose(&self, recent: &[State], t: u64) -> State;
}

impl Dynamics for HistorylessSystem {
    fn space(&self) -> &ActionSpace {
        HistorylessSystem::space(self)
    }

    fn recall(&self) -> usize {
        1
    }

    fn is_stationary(&self) -> bool {
        true
    }

    fn propose(&self, recent: &[State], _t: u64) -> State {
        self.reaction(&recent[0])
    }
}

impl Dynamics for KRecallSystem {
    fn space(&self) -> &ActionSpace {
        KRecallSystem::space(self)
    }

    fn recall(&self) -> usize {
        KRecallSystem::recall(self)
    }

    fn is_stationary(&self) -> bool {
        KRecallSystem::is_stationary(self)
    }

    fn propose(&self, recent: &[State], t: u64) -> State {
        self.reaction(recent, t)
    }
}

/// A materialized run. `states` starts with the initial window; entry
/// `activations[j]` produced `states[initial.len() + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial: HistoryWindow,
    pub schedule: Schedule,
    pub states: Vec<State>,
    pub activations: Vec<ActivationSet>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectories hold the initial window")
    }

    /// One line per state: `t<TAB>set<TAB>state`. Initial states carry `-`.
    pub fn write_trace<W: Write>(&self, mut out: W) -> io::Result<()> {
        let offset = self.initial.len();
        for (t, s) in self.states.iter().enumerate() {
            if t < offset {
                writeln!(out, "{t}\t-\t{s}")?;
            } else {
                writeln!(out, "{t}\t{}\t{s}", self.activations[t - offset])?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum RunVerdict {
    /// `states[t] == state` for every recorded `t >= time`, and the final
    /// window is a fixed point.
    Converged { state: State, time: usize },
    /// The (window, schedule phase) pair at `start` recurs at
    /// `start + period`; `segment` holds both ends.
    Cycling {
        period: usize,
        start: usize,
        segment: Vec<State>,
        sets: Vec<ActivationSet>,
    },
    /// The state stopped changing at a non-fixed point: the schedule keeps
    /// skipping every node that would move.
    Stalled { state: State, time: usize },
    /// No verdict within `max_steps`, or an explicit schedule ran out.
    BudgetExhausted { last: State },
}

impl RunVerdict {
    pub fn is_cycling(&self) -> bool {
        matches!(self, RunVerdict::Cycling { .. })
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, RunVerdict::Converged { .. })
    }
}

fn is_fixed(recent: &[State], proposal: &State) -> bool {
    let last = recent.last().expect("nonempty");
    proposal == last && recent.iter().all(|s| s == last)
}

pub fn run<D: Dynamics + ?Sized>(
    system: &D,
    initial: &HistoryWindow,
    schedule: &Schedule,
    max_steps: usize,
) -> Result<(Trajectory, RunVerdict)> {
    let space = system.space();
    let n = space.node_count();
    let k = system.recall();
    if max_steps == 0 {
        return Err(invalid("max_steps must be positive"));
    }
    if initial.len() < k {
        return Err(Error::InsufficientHistory {
            got: initial.len(),
            needed: k,
        });
    }
    initial.check(space)?;
    let mut stream = schedule.stream(n)?;
    let exact = system.is_stationary();
    let phased = exact && schedule.is_finitely_phased();

    let offset = initial.len();
    let mut states = initial.states().to_vec();
    let mut activations = Vec::new();
    let mut seen: HashMap<(Vec<u64>, usize), usize> = HashMap::new();

    let verdict = loop {
        let pos = states.len() - 1;
        let recent = &states[pos + 1 - k..];
        let t = (offset + activations.len()) as u64;
        let proposal = system.propose(recent, t);
        if exact && is_fixed(recent, &proposal) {
            let b = states[pos].clone();
            let mut time = pos;
            while time > 0 && states[time - 1] == b {
                time -= 1;
            }
            break RunVerdict::Converged { state: b, time };
        }
        if phased {
            if let Some(phase) = stream.phase() {
                let key = (recent.iter().map(|s| space.encode(s)).collect(), phase);
                if let Some(&start) = seen.get(&key) {
                    let segment = states[start..=pos].to_vec();
                    if segment.iter().all(|s| *s == segment[0]) {
                        let mut time = start;
                        while time > 0 && states[time - 1] == segment[0] {
                            time -= 1;
                        }
                        break RunVerdict::Stalled {
                            state: segment[0].clone(),
                            time,
                        };
                    }
                    break RunVerdict::Cycling {
                        period: pos - start,
                        start,
                        segment,
                        sets: activations[start + 1 - offset..=pos - offset].to_vec(),
                    };
                }
                seen.insert(key, pos);
            }
        }
        if activations.len() >= max_steps {
            break RunVerdict::BudgetExhausted {
                last: states[pos].clone(),
            };
        }
        let Some(set) = stream.next() else {
            break RunVerdict::BudgetExhausted {
                last: states[pos].clone(),
            };
        };
        let next = apply_activation(&states[pos], &proposal, set);
        states.push(next);
        activations.push(set);
    };
    Ok((
        Trajectory {
            initial: initial.clone(),
            schedule: schedule.clone(),
            states,
            activations,
        },
        verdict,
    ))
}

/// An initial history followed by a periodic schedule whose cycle activates
/// every node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub initial: HistoryWindow,
    #[serde(default)]
    pub prefix: Vec<ActivationSet>,
    pub cycle: Vec<ActivationSet>,
}

impl Witness {
    pub fn schedule(&self) -> Schedule {
        Schedule::periodic(self.prefix.clone(), self.cycle.clone())
    }

    pub fn cycle_union(&self) -> ActivationSet {
        self.cycle
            .iter()
            .fold(ActivationSet::EMPTY, |acc, s| acc.union(*s))
    }
}

/// Replays a non-convergence witness. A valid witness yields `Cycling`.
pub fn replay_witness<D: Dynamics + ?Sized>(system: &D, witness: &Witness) -> Result<RunVerdict> {
    let n = system.space().node_count();
    if witness.cycle.is_empty() {
        return Err(Error::InvalidWitness("the schedule cycle is empty".into()));
    }
    if witness.cycle_union() != ActivationSet::full(n) {
        return Err(Error::InvalidWitness(format!(
            "the schedule cycle only activates {}",
            witness.cycle_union()
        )));
    }
    let (_, verdict) = run(system, &witness.initial, &witness.schedule(), DEFAULT_MAX_STEPS)?;
    Ok(verdict)
}
