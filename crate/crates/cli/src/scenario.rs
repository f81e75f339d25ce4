//! Scenario documents: what to build, analyze or simulate.

use ixsys::reductions::{
    build_bgp, build_circuit, build_disjointness, build_majority, build_snake_system, build_tm_with,
    fixture, BgpInstance, Circuit, Fixture, SocialGraph, TmDescription, TmEncoding,
};
use ixsys::uncoupled::Protocol;
use ixsys::{
    ActionSpace, ActivationSet, Game, HistoryWindow, HistorylessSystem, Schedule, State, TieBreak,
};
use serde::Deserialize;

use crate::CliError;

pub const SCENARIO_SCHEMA: &str = "ixsys-scenario/1";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub game: Option<GameSpec>,
    #[serde(default)]
    pub analysis: Option<AnalysisSpec>,
    #[serde(default)]
    pub simulation: Option<SimulationSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSpec {
    /// `table[s]` is the joint reaction at the state with index `s`.
    Table {
        sizes: Vec<usize>,
        table: Vec<Vec<usize>>,
    },
    Circuit(Circuit),
    Majority(SocialGraph),
    Bgp(BgpInstance),
    Tm {
        machine: TmDescription,
        #[serde(default)]
        encoding: TmEncoding,
    },
    Snake {
        n: usize,
    },
    Disjointness {
        n: usize,
        a: Vec<usize>,
        b: Vec<usize>,
    },
    Fixture {
        name: String,
        #[serde(default)]
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GameSpec {
    Table {
        sizes: Vec<usize>,
        utilities: Vec<Vec<i64>>,
        #[serde(default)]
        tie_break: TieBreak,
    },
    Fixture {
        name: String,
        #[serde(default)]
        tie_break: TieBreak,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolSpec {
    ThreeRecall,
    TwoRecall,
    StayOrRoll,
}

impl ProtocolSpec {
    pub fn deterministic(self) -> Option<Protocol> {
        match self {
            ProtocolSpec::ThreeRecall => Some(Protocol::ThreeRecall),
            ProtocolSpec::TwoRecall => Some(Protocol::TwoRecall),
            ProtocolSpec::StayOrRoll => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnalysisSpec {
    Convergence,
    RConvergence { r: usize },
    Spectrum { state: Vec<usize> },
    Committed,
    Pne,
    UncoupledCheck { protocol: ProtocolSpec },
}

/// Seeds left out fall back to the `--seed` flag.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleSpec {
    Explicit {
        sets: Vec<ActivationSet>,
    },
    Periodic {
        #[serde(default)]
        prefix: Vec<ActivationSet>,
        cycle: Vec<ActivationSet>,
    },
    SeededRandom {
        #[serde(default)]
        seed: Option<u64>,
        p: f64,
    },
    SeededRFair {
        #[serde(default)]
        seed: Option<u64>,
        r: usize,
    },
    Synchronous,
    RoundRobin,
}

impl ScheduleSpec {
    pub fn resolve(&self, seed: u64) -> Schedule {
        match self {
            ScheduleSpec::Explicit { sets } => Schedule::Explicit { sets: sets.clone() },
            ScheduleSpec::Periodic { prefix, cycle } => Schedule::periodic(prefix.clone(), cycle.clone()),
            ScheduleSpec::SeededRandom { seed: s, p } => Schedule::SeededRandom {
                seed: s.unwrap_or(seed),
                p: *p,
            },
            ScheduleSpec::SeededRFair { seed: s, r } => Schedule::SeededRFair {
                seed: s.unwrap_or(seed),
                r: *r,
            },
            ScheduleSpec::Synchronous => Schedule::Synchronous,
            ScheduleSpec::RoundRobin => Schedule::RoundRobin,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    /// Oldest state first.
    pub initial: Vec<Vec<usize>>,
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub max_steps: Option<usize>,
}

fn schema(path: &str, message: impl Into<String>) -> CliError {
    CliError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        match inner.classify() {
            serde_json::error::Category::Data => schema(&path, inner.to_string()),
            _ => CliError::Parse(inner.to_string()),
        }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

fn check_state(path: &str, space: &ActionSpace, state: &[usize]) -> Result<(), CliError> {
    space.check(state).map_err(|e| schema(path, e.to_string()))
}

impl Scenario {
    fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCENARIO_SCHEMA {
            return Err(schema(
                "schema",
                format!("expected {SCENARIO_SCHEMA:?}, found {:?}", self.schema),
            ));
        }
        match (&self.system, &self.game) {
            (Some(_), Some(_)) => return Err(schema("game", "give either a system or a game, not both")),
            (None, None) => return Err(schema("system", "a system or a game is required")),
            _ => {}
        }
        if let Some(SystemSpec::Table { sizes, table }) = &self.system {
            let space = ActionSpace::new(sizes.clone()).map_err(|e| schema("system.sizes", e.to_string()))?;
            if table.len() as u64 != space.state_count() {
                return Err(schema(
                    "system.table",
                    format!("{} rows for {} states", table.len(), space.state_count()),
                ));
            }
            for (i, row) in table.iter().enumerate() {
                let path = format!("system.table[{i}]");
                if row.len() != sizes.len() {
                    return Err(schema(&path, format!("row has {} entries for {} nodes", row.len(), sizes.len())));
                }
                check_state(&path, &space, row)?;
            }
        }
        if let Some(GameSpec::Table { sizes, utilities, .. }) = &self.game {
            let space = ActionSpace::new(sizes.clone()).map_err(|e| schema("game.sizes", e.to_string()))?;
            if utilities.len() != sizes.len()
                || utilities.iter().any(|u| u.len() as u64 != space.state_count())
            {
                return Err(schema(
                    "game.utilities",
                    format!("need {} tables of {} payoffs", sizes.len(), space.state_count()),
                ));
            }
        }
        match &self.analysis {
            Some(AnalysisSpec::RConvergence { r: 0 }) => {
                return Err(schema("analysis.r", "r must be at least 1"))
            }
            Some(AnalysisSpec::UncoupledCheck { .. }) if self.game.is_none() => {
                return Err(schema("game", "uncoupled-check needs a game"))
            }
            _ => {}
        }
        if let Some(sim) = &self.simulation {
            if sim.initial.is_empty() {
                return Err(schema("simulation.initial", "at least one state is required"));
            }
            if sim.max_steps == Some(0) {
                return Err(schema("simulation.max_steps", "must be positive"));
            }
            match &sim.schedule {
                ScheduleSpec::SeededRandom { p, .. } if !(0.0..=1.0).contains(p) => {
                    return Err(schema("simulation.schedule.p", "must lie in [0, 1]"))
                }
                ScheduleSpec::SeededRFair { r: 0, .. } => {
                    return Err(schema("simulation.schedule.r", "r must be at least 1"))
                }
                ScheduleSpec::Periodic { cycle, .. } if cycle.is_empty() => {
                    return Err(schema("simulation.schedule.cycle", "must not be empty"))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The declared game, if any.
    pub fn game(&self) -> Result<Option<(Game, TieBreak)>, CliError> {
        let Some(spec) = &self.game else {
            return Ok(None);
        };
        Ok(Some(match spec {
            GameSpec::Table {
                sizes,
                utilities,
                tie_break,
            } => {
                let space = ActionSpace::new(sizes.clone()).map_err(|e| schema("game.sizes", e.to_string()))?;
                let game = Game::new(space, utilities.clone()).map_err(|e| schema("game.utilities", e.to_string()))?;
                (game, *tie_break)
            }
            GameSpec::Fixture { name, tie_break } => {
                let game = fixture(name, None)
                    .map_err(|e| schema("game.name", e.to_string()))?
                    .into_game()
                    .ok_or_else(|| schema("game.name", format!("fixture {name:?} is a system, not a game")))?;
                (game, *tie_break)
            }
        }))
    }

    /// The system under study: the declared system, or the best-response
    /// dynamics of the declared game.
    pub fn system(&self) -> Result<HistorylessSystem, CliError> {
        if let Some((game, tie)) = self.game()? {
            return ixsys::br_system(&game, tie).map_err(CliError::from);
        }
        let spec = self.system.as_ref().expect("validated");
        let at = |path: &'static str| move |e: ixsys::Error| match e {
            ixsys::Error::BudgetExceeded { .. } => CliError::from(e),
            other => schema(path, other.to_string()),
        };
        match spec {
            SystemSpec::Table { sizes, table } => {
                let space = ActionSpace::new(sizes.clone()).map_err(at("system.sizes"))?;
                let rows = table.iter().map(|r| State::new(r.clone())).collect();
                HistorylessSystem::from_table(space, rows).map_err(at("system.table"))
            }
            SystemSpec::Circuit(c) => build_circuit(c).map_err(at("system")),
            SystemSpec::Majority(g) => build_majority(g).map_err(at("system")),
            SystemSpec::Bgp(b) => build_bgp(b).map_err(at("system")),
            SystemSpec::Tm { machine, encoding } => build_tm_with(machine, *encoding).map_err(at("system.machine")),
            SystemSpec::Snake { n } => build_snake_system(*n).map_err(at("system.n")),
            SystemSpec::Disjointness { n, a, b } => build_disjointness(*n, a, b).map_err(at("system")),
            SystemSpec::Fixture { name, n } => match fixture(name, *n).map_err(at("system.name"))? {
                Fixture::System(s) => Ok(s),
                Fixture::Game(_) => Err(schema(
                    "system.name",
                    format!("fixture {name:?} is a game; declare it under \"game\""),
                )),
            },
        }
    }

    pub fn initial_window(&self, space: &ActionSpace) -> Result<Option<HistoryWindow>, CliError> {
        let Some(sim) = &self.simulation else {
            return Ok(None);
        };
        for (i, s) in sim.initial.iter().enumerate() {
            check_state(&format!("simulation.initial[{i}]"), space, s)?;
        }
        let states = sim.initial.iter().map(|s| State::new(s.clone())).collect();
        HistoryWindow::new(states)
            .map(Some)
            .map_err(|e| schema("simulation.initial", e.to_string()))
    }

    pub fn check_analysis_state(&self, space: &ActionSpace) -> Result<(), CliError> {
        if let Some(AnalysisSpec::Spectrum { state }) = &self.analysis {
            check_state("analysis.state", space, state)?;
        }
        Ok(())
    }
}
