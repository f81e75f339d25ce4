//! Asynchronous interaction systems: nodes repeatedly react to the joint
//! state under an activation schedule.
//!
//! The crate covers the model itself ([`model`], [`schedule`]), simulation
//! ([`simulator`]), exact analysis over the transition graph ([`analyzer`]),
//! games and best-response dynamics ([`games`]), uncoupled self-stabilizing
//! protocols ([`uncoupled`]) and builders for concrete systems
//! ([`reductions`]).

pub mod analyzer;
pub mod error;
pub mod games;
pub mod model;
pub mod reductions;
pub mod schedule;
pub mod simulator;
pub mod transition;
pub mod uncoupled;

pub use analyzer::{
    committed_map, decide_convergence, decide_r_convergence, spectrum, stable_states,
    Commitment, ConvergenceVerdict, TransitionGraph,
};
pub use error::{Error, Result};
pub use games::{best_responses, br_system, enumerate_pne, induced_game, Game, TieBreak};
pub use model::{
    ActionSpace, ActivationSet, Budget, HistoryWindow, HistorylessSystem, KRecallSystem, State,
    DEFAULT_STATE_BUDGET,
};
pub use schedule::{check_r_fair, schedule_prefix, Schedule};
pub use simulator::{replay_witness, run, Dynamics, RunVerdict, Trajectory, Witness};
pub use transition::{lift_k_recall, LiftedSystem, TransitionSystem};
