//! Command-line interface: `validate`, `plan`, `check`, and `gen`.
//!
//! Exit codes are a stable contract. `plan`: 0 optimal plan, 1 proven
//! infeasible ("no"), 2 invalid input, 3 time limit hit with a feasible but
//! unproven plan (still emitted), 4 time limit hit with nothing. `validate`:
//! 0 or 2. `check`: 0 valid with target deployed, 1 otherwise, 2 for bad
//! inputs. `gen`: 0 or 2.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::binding::BindingMetric;
use crate::format;
use crate::model::{Configuration, NodePool, Universe};
use crate::placement;
use crate::planner::{self, PlanMode, PlanOptions, PlanStatus};
use crate::solver;
use crate::verifier::{self, TraceVerdict};

#[derive(Debug, Parser)]
#[command(
    name = "microplan",
    about = "Cost-optimal deployment planning for microservice architectures",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and cross-validate the problem inputs.
    Validate(ProblemArgs),
    /// Compute a deployment plan reaching a cost-optimal configuration.
    Plan(PlanArgs),
    /// Replay a plan file against the inputs and report the verdict.
    Check(CheckArgs),
    /// Generate benchmark problem files.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Universe file: the microservice types.
    #[arg(long)]
    universe: PathBuf,
    /// Node pool file.
    #[arg(long)]
    nodes: PathBuf,
    /// Initial configuration file; defaults to the empty configuration.
    #[arg(long)]
    initial: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Target microservice type to deploy.
    #[arg(long)]
    target: String,
    /// Binding objective: none, min-cross, max-bind, or weighted:PATH.
    #[arg(long, default_value = "none")]
    metric: String,
    /// Plan synthesis mode.
    #[arg(long, default_value = "incremental", value_parser = ["scratch", "incremental"])]
    mode: String,
    /// Overall time limit in seconds.
    #[arg(long)]
    time_limit: Option<u64>,
    /// Per-type instance bound override, TYPE=N; repeatable. Required for
    /// types that consume no resources.
    #[arg(long = "bound")]
    bounds: Vec<String>,
    /// Deterministic seed recorded in the solver budget.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the placement-stage constraint model to this path.
    #[arg(long)]
    emit_model: Option<PathBuf>,
    /// Where to write the plan file.
    #[arg(long, default_value = "plan.json")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Target type the plan must deploy.
    #[arg(long)]
    target: String,
    /// Plan file to replay.
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Number-partition gadget over the weighted binding metric.
    Partition {
        /// Comma-separated element values.
        #[arg(long, value_delimiter = ',')]
        elements: Vec<u64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Bin-packing gadget over node costs.
    Binpack {
        /// Comma-separated item sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u64>,
        /// Bin capacity.
        #[arg(long)]
        capacity: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        seed: u64,
        /// Maximum number of types.
        #[arg(long, default_value_t = 4)]
        types: usize,
        /// Maximum number of nodes.
        #[arg(long, default_value_t = 6)]
        nodes: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

/// Parses the process arguments and runs the command, returning the exit
/// code.
pub fn main() -> u8 {
    run(Cli::parse())
}

pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Validate(args) => cmd_validate(&args),
        Command::Plan(args) => cmd_plan(&args),
        Command::Check(args) => cmd_check(&args),
        Command::Gen(args) => cmd_gen(&args.kind),
    }
}

const EXIT_OK: u8 = 0;
const EXIT_NO_PLAN: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_UNPROVEN: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;
const EXIT_INTERNAL: u8 = 70;

struct Inputs {
    universe: Universe,
    pool: NodePool,
    initial: Configuration,
}

fn read_inputs(args: &ProblemArgs) -> Result<Inputs, String> {
    let read = |path: &Path| -> Result<String, String> {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    };
    let universe = format::parse_universe(&read(&args.universe)?)
        .map_err(|e| format!("{}: {e}", args.universe.display()))?;
    let pool = format::parse_nodes(&read(&args.nodes)?)
        .map_err(|e| format!("{}: {e}", args.nodes.display()))?;
    let initial = match &args.initial {
        Some(path) => format::parse_configuration(&read(path)?)
            .map_err(|e| format!("{}: {e}", path.display()))?,
        None => Configuration::empty(),
    };
    Ok(Inputs {
        universe,
        pool,
        initial,
    })
}

fn cmd_validate(args: &ProblemArgs) -> u8 {
    let inputs = match read_inputs(args) {
        Ok(inputs) => inputs,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_INVALID_INPUT;
        }
    };
    let mut ok = true;
    match inputs.universe.check_well_formed() {
        Ok(()) => println!(
            "universe: ok ({} types, {} interfaces)",
            inputs.universe.len(),
            inputs.universe.interfaces().len()
        ),
        Err(e) => {
            println!("universe: {e}");
            ok = false;
        }
    }
    println!("nodes: ok ({} nodes)", inputs.pool.len());
    match inputs.initial.check_provisional(&inputs.universe, &inputs.pool) {
        Ok(report) if report.is_provisionally_correct() => {
            println!(
                "initial configuration: provisionally correct ({} instances)",
                inputs.initial.instance_count()
            );
        }
        Ok(report) => {
            for violation in report
                .violations
                .iter()
                .filter(|v| !v.is_weak_or_conflict())
            {
                println!("initial configuration: {violation}");
            }
            ok = false;
        }
        Err(e) => {
            println!("initial configuration: {e}");
            ok = false;
        }
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_INVALID_INPUT
    }
}

fn parse_metric(spec: &str) -> Result<BindingMetric, String> {
    match spec {
        "none" => Ok(BindingMetric::None),
        "min-cross" => Ok(BindingMetric::MinimizeCrossNode),
        "max-bind" => Ok(BindingMetric::MaximizeBindings),
        other => match other.strip_prefix("weighted:") {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
                format::parse_metric_file(&text).map_err(|e| format!("{path}: {e}"))
            }
            None => Err(format!(
                "unknown metric {other:?}; expected none, min-cross, max-bind, or weighted:PATH"
            )),
        },
    }
}

fn parse_bounds(specs: &[String]) -> Result<BTreeMap<String, u64>, String> {
    let mut bounds = BTreeMap::new();
    for spec in specs {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| format!("--bound expects TYPE=N, got {spec:?}"))?;
        let value: u64 = value
            .parse()
            .map_err(|_| format!("--bound expects TYPE=N, got {spec:?}"))?;
        bounds.insert(name.to_string(), value);
    }
    Ok(bounds)
}

fn cmd_plan(args: &PlanArgs) -> u8 {
    let inputs = match read_inputs(&args.problem) {
        Ok(inputs) => inputs,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_INVALID_INPUT;
        }
    };
    let metric = match parse_metric(&args.metric) {
        Ok(metric) => metric,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_INVALID_INPUT;
        }
    };
    let bounds = match parse_bounds(&args.bounds) {
        Ok(bounds) => bounds,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_INVALID_INPUT;
        }
    };
    let options = PlanOptions {
        mode: match args.mode.as_str() {
            "scratch" => PlanMode::Scratch,
            _ => PlanMode::Incremental,
        },
        metric,
        bounds,
        time_limit: args.time_limit.map(Duration::from_secs),
        seed: args.seed,
    };

    if let Some(path) = &args.emit_model {
        match emit_placement_model(&inputs, &args.target, &options, path) {
            Ok(()) => println!("model: {}", path.display()),
            Err(message) => {
                eprintln!("error: {message}");
                return EXIT_INVALID_INPUT;
            }
        }
    }

    let outcome = match planner::plan(
        &inputs.universe,
        &inputs.pool,
        &inputs.initial,
        &args.target,
        &options,
    ) {
        Ok(outcome) => outcome,
        Err(planner::PlanError::Input(message)) => {
            eprintln!("error: {message}");
            return EXIT_INVALID_INPUT;
        }
        Err(planner::PlanError::Internal(message)) => {
            eprintln!("internal error: {message}");
            return EXIT_INTERNAL;
        }
    };

    match outcome.status {
        PlanStatus::Infeasible => {
            println!("no");
            EXIT_NO_PLAN
        }
        PlanStatus::Timeout => {
            println!("timeout: no plan found within the time limit");
            EXIT_TIMEOUT
        }
        PlanStatus::Optimal | PlanStatus::FeasibleUnproven => {
            let plan = outcome.plan.expect("plan present on success");
            let summary = outcome.summary.expect("summary present on success");
            let text = format::serialize_plan(&plan, &inputs.universe);
            if let Err(e) = std::fs::write(&args.out, text) {
                eprintln!("error: {}: {e}", args.out.display());
                return EXIT_INVALID_INPUT;
            }
            let proven = outcome.status == PlanStatus::Optimal;
            println!(
                "status: {}",
                if proven {
                    "optimal"
                } else {
                    "feasible (optimality unproven: time limit)"
                }
            );
            println!("cost: {}", summary.cost);
            let counts: Vec<String> = summary
                .instance_counts
                .iter()
                .map(|(ty, n)| format!("{ty}={n}"))
                .collect();
            println!("instances: {}", counts.join(" "));
            let placements: Vec<String> = summary
                .placement
                .iter()
                .map(|((ty, node), n)| format!("{ty}@{node}={n}"))
                .collect();
            println!("placement: {}", placements.join(" "));
            let nodes: Vec<&str> = summary.used_nodes.iter().map(|s| s.as_str()).collect();
            println!("nodes: {}", nodes.join(" "));
            println!("actions: {}", summary.action_count);
            println!("plan: {}", args.out.display());
            if proven {
                EXIT_OK
            } else {
                EXIT_UNPROVEN
            }
        }
    }
}

fn emit_placement_model(
    inputs: &Inputs,
    target: &str,
    options: &PlanOptions,
    path: &Path,
) -> Result<(), String> {
    let bounds = placement::derive_bounds(&inputs.universe, &inputs.pool, &options.bounds)
        .map_err(|e| e.to_string())?;
    let (model, _) = placement::encode(&inputs.universe, &inputs.pool, target, &bounds)
        .map_err(|e| e.to_string())?;
    std::fs::write(path, solver::export_model(&model)).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_check(args: &CheckArgs) -> u8 {
    let inputs = match read_inputs(&args.problem) {
        Ok(inputs) => inputs,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_INVALID_INPUT;
        }
    };
    let plan_text = match std::fs::read_to_string(&args.plan) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {}: {e}", args.plan.display());
            return EXIT_INVALID_INPUT;
        }
    };
    let plan = match format::parse_plan(&plan_text, &inputs.universe) {
        Ok(plan) => plan,
        Err(e) => {
            eprintln!("error: {}: {e}", args.plan.display());
            return EXIT_INVALID_INPUT;
        }
    };

    let trace = verifier::run_plan(&inputs.initial, &plan, &inputs.universe, &inputs.pool);
    match &trace.verdict {
        TraceVerdict::Valid => {
            let output = match verifier::check_problem_output(&trace, &args.target, &inputs.pool) {
                Ok(output) => output,
                Err(e) => {
                    eprintln!("internal error: {e}");
                    return EXIT_INTERNAL;
                }
            };
            if output.has_target {
                println!(
                    "valid: {} steps, final cost {}, target {} deployed",
                    trace.steps.len(),
                    output.final_cost,
                    args.target
                );
                EXIT_OK
            } else {
                println!(
                    "invalid: plan is executable but never deploys target {}",
                    args.target
                );
                EXIT_NO_PLAN
            }
        }
        TraceVerdict::InvalidInitial(finding) => {
            println!("invalid: initial configuration: {finding}");
            EXIT_NO_PLAN
        }
        TraceVerdict::ViolationAt { step, finding } => {
            println!("invalid at step {step}: {finding}");
            EXIT_NO_PLAN
        }
    }
}

fn cmd_gen(kind: &GenKind) -> u8 {
    let (problem, out_dir, note) = match kind {
        GenKind::Partition { elements, out_dir } => {
            match crate::generate::partition_problem(elements) {
                Ok(problem) => (
                    problem,
                    out_dir,
                    "weighted metric written to metric.json".to_string(),
                ),
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INVALID_INPUT;
                }
            }
        }
        GenKind::Binpack {
            sizes,
            capacity,
            out_dir,
        } => match crate::generate::binpack_problem(sizes, *capacity) {
            Ok(problem) => (problem, out_dir, String::new()),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INVALID_INPUT;
            }
        },
        GenKind::Random {
            seed,
            types,
            nodes,
            out_dir,
        } => (
            crate::generate::random_problem(*seed, *types, *nodes),
            out_dir,
            String::new(),
        ),
    };

    if let Err(e) = std::fs::create_dir_all(out_dir) {
        eprintln!("error: {}: {e}", out_dir.display());
        return EXIT_INVALID_INPUT;
    }
    let write = |name: &str, text: String| -> Result<(), String> {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))
    };
    let mut files = vec![
        ("universe.json", format::serialize_universe(&problem.universe)),
        ("nodes.json", format::serialize_nodes(&problem.pool)),
    ];
    if let BindingMetric::Weighted { .. } = &problem.metric {
        match format::serialize_metric(&problem.metric) {
            Ok(text) => files.push(("metric.json", text)),
            Err(e) => {
                eprintln!("internal error: {e}");
                return EXIT_INTERNAL;
            }
        }
    }
    for (name, text) in files {
        if let Err(message) = write(name, text) {
            eprintln!("error: {message}");
            return EXIT_INVALID_INPUT;
        }
    }
    println!("universe: {}", out_dir.join("universe.json").display());
    println!("nodes: {}", out_dir.join("nodes.json").display());
    if !note.is_empty() {
        println!("{note}");
    }
    let mut suggestion = format!(
        "microplan plan --universe {} --nodes {} --target {}",
        out_dir.join("universe.json").display(),
        out_dir.join("nodes.json").display(),
        problem.target
    );
    for (ty, bound) in &problem.bounds {
        suggestion.push_str(&format!(" --bound {ty}={bound}"));
    }
    if let BindingMetric::Weighted { .. } = &problem.metric {
        suggestion.push_str(&format!(
            " --metric weighted:{}",
            out_dir.join("metric.json").display()
        ));
    }
    println!("try: {suggestion}");
    EXIT_OK
}
