//! Builders that compile concrete settings into historyless systems.

mod bgp;
mod circuit;
mod fixtures;
mod majority;
mod snake;
mod tm;

pub use bgp::{build_bgp, BgpInstance, ExportDeny};
pub use circuit::{build_circuit, Circuit, Gate, Wire};
pub use fixtures::{fixture, Fixture, FIXTURE_NAMES};
pub use majority::{build_majority, SocialGraph};
pub use snake::{
    build_disjointness, build_snake_system, is_snake, longest_snake, longest_snake_within,
    snake_map, DisjointnessLayout, Snake, DEFAULT_SNAKE_BUDGET,
};
pub use tm::{build_tm, build_tm_with, HeadAction, TmDescription, TmEncoding, TmRule};
