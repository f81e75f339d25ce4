mod dot;
mod result;
mod scenario;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use ixsys::analyzer::{decide_r_convergence_within, CommitMap, TransitionGraph};
use ixsys::games::induced_game_within;
use ixsys::uncoupled::{
    check_self_stabilization_randomized, check_self_stabilization_within, StabilizationVerdict,
};
use ixsys::{
    enumerate_pne, run, Budget, Commitment,
    ConvergenceVerdict, Game, HistorylessSystem, State, TransitionSystem, DEFAULT_STATE_BUDGET,
};
use ixsys::simulator::DEFAULT_MAX_STEPS;

use crate::result::{one_based, CommitEntry, Provenance, ResultDocument, Statistics, TableSystem};
use crate::scenario::{parse_scenario, AnalysisSpec, ProtocolSpec, Scenario};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_NEGATIVE: u8 = 10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl From<ixsys::Error> for CliError {
    fn from(e: ixsys::Error) -> Self {
        match e {
            ixsys::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Budget(_) => EXIT_BUDGET,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ixsys", version, about = "Analyze and simulate asynchronous interaction systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario document (JSON).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Seed for every random choice; recorded in the result.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Step limit for simulations (overrides the scenario).
    #[arg(long, global = true)]
    max_steps: Option<usize>,

    /// Largest state or product space to enumerate.
    #[arg(long, global = true, env = "IXSYS_BUDGET", default_value_t = DEFAULT_STATE_BUDGET)]
    budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
enum Command {
    /// Run the scenario's analysis (convergence by default).
    Analyze,
    /// Run the scenario's simulation request.
    Simulate {
        /// Also write a tab-separated trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Pure Nash equilibria of the game (or of the system's induced game).
    Pne,
    /// Self-stabilization of an uncoupled protocol on the scenario's game.
    UncoupledCheck {
        #[arg(long, value_enum)]
        protocol: Option<ProtocolArg>,
    },
    /// Materialize the system's reaction table.
    Build,
    /// Print the transition graph in Graphviz format.
    ExportDot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ProtocolArg {
    ThreeRecall,
    TwoRecall,
    StayOrRoll,
}

impl From<ProtocolArg> for ProtocolSpec {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::ThreeRecall => ProtocolSpec::ThreeRecall,
            ProtocolArg::TwoRecall => ProtocolSpec::TwoRecall,
            ProtocolArg::StayOrRoll => ProtocolSpec::StayOrRoll,
        }
    }
}

struct Context {
    scenario: Scenario,
    provenance: Provenance,
    budget: Budget,
    seed: u64,
    started: Instant,
}

enum Output {
    Document(Box<ResultDocument>, u8),
    Text(String),
}

impl Context {
    fn statistics(&self, nodes: usize, state_count: u64, scc_count: Option<usize>) -> Statistics {
        Statistics {
            nodes,
            state_count,
            scc_count,
            runtime_ms: self.started.elapsed().as_millis(),
        }
    }

    fn document(&self, command: &str, verdict: &str, stats: Statistics) -> ResultDocument {
        ResultDocument::new(command, verdict, stats, self.provenance.clone())
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("plain data serializes")
}

fn analyze(ctx: &Context, analysis: &AnalysisSpec) -> Result<Output, CliError> {
    match analysis {
        AnalysisSpec::Pne => return pne(ctx),
        AnalysisSpec::UncoupledCheck { protocol } => return uncoupled(ctx, *protocol),
        _ => {}
    }
    let system = ctx.scenario.system()?;
    ctx.scenario.check_analysis_state(system.space())?;
    let n = system.node_count();
    let count = system.state_count();
    if let AnalysisSpec::RConvergence { r } = analysis {
        let v = decide_r_convergence_within(&system, *r, ctx.budget)?;
        return Ok(convergence_output(ctx, "analyze", &v, ctx.statistics(n, count, None)));
    }
    let graph = TransitionGraph::build_within(&system, ctx.budget)?;
    let stats = ctx.statistics(n, count, Some(graph.scc_count()));
    Ok(match analysis {
        AnalysisSpec::Convergence => {
            let v = graph.convergence();
            let mut out = convergence_output(ctx, "analyze", &v, stats);
            if let Output::Document(doc, _) = &mut out {
                doc.stable_states = Some(graph.stable_states());
            }
            out
        }
        AnalysisSpec::Spectrum { state } => {
            let v = system.space().encode(state);
            let spec: Vec<State> = graph
                .spectrum_indices(v)
                .into_iter()
                .map(|i| system.point(i))
                .collect();
            let mut doc = ctx.document("analyze", "ok", stats);
            doc.spectrum = Some(spec);
            Output::Document(Box::new(doc), EXIT_OK)
        }
        AnalysisSpec::Committed => {
            let map: CommitMap<State> = graph.committed();
            let entries = map
                .entries
                .iter()
                .enumerate()
                .map(|(i, c)| CommitEntry {
                    state: system.point(i as u64),
                    committed_to: match c {
                        Commitment::CommittedTo(b) => Some(b.clone()),
                        Commitment::Uncommitted => None,
                    },
                })
                .collect();
            let mut doc = ctx.document("analyze", "ok", stats);
            doc.committed = Some(entries);
            Output::Document(Box::new(doc), EXIT_OK)
        }
        AnalysisSpec::RConvergence { .. } | AnalysisSpec::Pne | AnalysisSpec::UncoupledCheck { .. } => {
            unreachable!("dispatched above")
        }
    })
}

fn convergence_output(ctx: &Context, command: &str, v: &ConvergenceVerdict, stats: Statistics) -> Output {
    match v {
        ConvergenceVerdict::Convergent => {
            Output::Document(Box::new(ctx.document(command, "convergent", stats)), EXIT_OK)
        }
        ConvergenceVerdict::NonConvergent { witness } => {
            let mut doc = ctx.document(command, "non-convergent", stats);
            doc.witness = Some(to_json(witness));
            doc.witness_state = Some(one_based(witness.initial.last()));
            Output::Document(Box::new(doc), EXIT_NEGATIVE)
        }
    }
}

fn game_or_induced(ctx: &Context) -> Result<(Game, Option<HistorylessSystem>), CliError> {
    match ctx.scenario.game()? {
        Some((g, _)) => Ok((g, None)),
        None => {
            let system = ctx.scenario.system()?;
            Ok((induced_game_within(&system, ctx.budget)?, Some(system)))
        }
    }
}

fn pne(ctx: &Context) -> Result<Output, CliError> {
    let (game, _) = game_or_induced(ctx)?;
    ctx.budget
        .check("joint state space", game.space().state_count() as u128)?;
    let eq = enumerate_pne(&game);
    let stats = ctx.statistics(game.node_count(), game.space().state_count(), None);
    let mut doc = ctx.document("pne", "ok", stats);
    doc.pne = Some(eq);
    Ok(Output::Document(Box::new(doc), EXIT_OK))
}

fn uncoupled(ctx: &Context, protocol: ProtocolSpec) -> Result<Output, CliError> {
    let Some((game, _)) = ctx.scenario.game()? else {
        return Err(CliError::Schema {
            path: "game".into(),
            message: "uncoupled-check needs a game".into(),
        });
    };
    ctx.budget
        .check("joint state space", game.space().state_count() as u128)?;
    let v = match protocol.deterministic() {
        Some(p) => check_self_stabilization_within(p, &game, ctx.budget)?,
        None => check_self_stabilization_randomized(&game)?,
    };
    let stats = ctx.statistics(game.node_count(), game.space().state_count(), None);
    Ok(match v {
        StabilizationVerdict::SelfStabilizing => {
            Output::Document(Box::new(ctx.document("uncoupled-check", "self-stabilizing", stats)), EXIT_OK)
        }
        StabilizationVerdict::NoPne => {
            Output::Document(Box::new(ctx.document("uncoupled-check", "no-pne", stats)), EXIT_NEGATIVE)
        }
        StabilizationVerdict::Fails { witness } => {
            let mut doc = ctx.document("uncoupled-check", "fails", stats);
            doc.witness_state = Some(one_based(witness.last()));
            doc.witness = Some(to_json(&witness));
            Output::Document(Box::new(doc), EXIT_NEGATIVE)
        }
    })
}

fn simulate(ctx: &Context, max_steps: Option<usize>, trace: Option<&PathBuf>) -> Result<Output, CliError> {
    let system = ctx.scenario.system()?;
    let Some(sim) = &ctx.scenario.simulation else {
        return Err(CliError::Schema {
            path: "simulation".into(),
            message: "simulate needs a simulation request".into(),
        });
    };
    let initial = ctx
        .scenario
        .initial_window(system.space())?
        .expect("simulation present");
    let schedule = sim.schedule.resolve(ctx.seed);
    schedule.validate(system.node_count()).map_err(|e| CliError::Schema {
        path: "simulation.schedule".into(),
        message: e.to_string(),
    })?;
    let steps = max_steps.or(sim.max_steps).unwrap_or(DEFAULT_MAX_STEPS);
    let (traj, verdict) = run(&system, &initial, &schedule, steps)?;
    if let Some(path) = trace {
        let mut buf = Vec::new();
        traj.write_trace(&mut buf)?;
        fs::write(path, buf)?;
    }
    let stats = ctx.statistics(system.node_count(), system.state_count(), None);
    let run = to_json(&verdict);
    let kind = run["verdict"].as_str().unwrap_or("ok").to_owned();
    let mut doc = ctx.document("simulate", &kind, stats);
    doc.run = Some(run);
    Ok(Output::Document(Box::new(doc), EXIT_OK))
}

fn build(ctx: &Context) -> Result<Output, CliError> {
    let system = ctx.scenario.system()?;
    let table = system.table(ctx.budget)?;
    let stats = ctx.statistics(system.node_count(), system.state_count(), None);
    let mut doc = ctx.document("build", "ok", stats);
    doc.system = Some(TableSystem {
        kind: "table",
        sizes: system.space().sizes().to_vec(),
        table,
    });
    Ok(Output::Document(Box::new(doc), EXIT_OK))
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Input("--scenario is required".into()))?;
    let bytes = fs::read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Parse(e.to_string()))?;
    let ctx = Context {
        scenario: parse_scenario(text)?,
        provenance: Provenance::new(&bytes, cli.seed, cli.budget),
        budget: Budget::new(cli.budget),
        seed: cli.seed,
        started: Instant::now(),
    };
    match &cli.command {
        Command::Analyze => {
            let analysis = ctx.scenario.analysis.clone().unwrap_or(AnalysisSpec::Convergence);
            analyze(&ctx, &analysis)
        }
        Command::Simulate { trace } => simulate(&ctx, cli.max_steps, trace.as_ref()),
        Command::Pne => pne(&ctx),
        Command::UncoupledCheck { protocol } => {
            let protocol = *protocol;
            let chosen = protocol.map(ProtocolSpec::from).or(match ctx.scenario.analysis {
                Some(AnalysisSpec::UncoupledCheck { protocol }) => Some(protocol),
                _ => None,
            });
            let protocol = chosen.ok_or_else(|| {
                CliError::Input("give --protocol or an uncoupled-check analysis".into())
            })?;
            uncoupled(&ctx, protocol)
        }
        Command::Build => build(&ctx),
        Command::ExportDot => {
            let system = ctx.scenario.system()?;
            let graph = TransitionGraph::build_within(&system, ctx.budget)?;
            Ok(Output::Text(dot::export_dot(&graph)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = match execute(&cli) {
        Ok(Output::Document(doc, code)) => {
            let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
            s.push('\n');
            (s, code)
        }
        Ok(Output::Text(s)) => (s, EXIT_OK),
        Err(e) => {
            eprintln!("ixsys: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let mut out = io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::from(code)
}
