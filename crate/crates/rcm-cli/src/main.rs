//! Command-line front end for the resilient coverage toolkit.
//!
//! Subcommands cover the full pipeline: `generate` samples a scenario,
//! `solve` picks an assignment, `attack`/`evaluate` score it under a chosen
//! failure model, `export-ilp` and `bruteforce` provide the exact oracles,
//! `bench` runs batch experiments to CSV, and `rpm` drives the
//! persistent-monitoring grid world.
//!
//! Every failure exits nonzero with a diagnostic naming the stage that
//! failed (`error: parsing the experiment config: ...`).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rcm::bench::{run_experiment, ExperimentConfig};
use rcm::exact::{solve_bruteforce_budgeted, DEFAULT_EXACT_BUDGET};
use rcm::geom::{generate_with_geometry, GeoConfig};
use rcm::ilp::{export_ilp_budgeted, DEFAULT_ILP_BUDGET};
use rcm::rpm::{FailModel, GridWorld, RoundReport, RpmConfig};
use rcm::{
    coverage_value, residual_coverage, solve, validate_solution, AttackModel, FeasibleSolution,
    Scenario, SolverSpec,
};

#[derive(Parser)]
#[command(name = "rcm-cli", version, about = "Resilient coverage maximization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random scenario from generator settings
    Generate(GenerateArgs),
    /// Run one solver on a scenario
    Solve(SolveArgs),
    /// Attack a solution and report the removed trajectories
    Attack(AttackArgs),
    /// Score a solution's residual coverage under a failure model
    Evaluate(EvaluateArgs),
    /// Write a scenario as a CPLEX-LP integer program
    ExportIlp(ExportIlpArgs),
    /// Exhaustively search all assignments for the best residual coverage
    Bruteforce(BruteforceArgs),
    /// Run a batch experiment from a JSON config and emit CSV reports
    Bench(BenchArgs),
    /// Drive the persistent-monitoring grid world for a number of rounds
    Rpm(RpmArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator settings JSON file
    #[arg(long)]
    config: PathBuf,
    /// Scenario output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the world geometry (robot arcs, target positions) here
    #[arg(long)]
    geometry: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// Solver name: obg, org-{u,m}-{i,d}, org-r, ls-{a1,a2}-{i1,i2}, 2pg
    #[arg(long)]
    solver: String,
    /// Seed for randomized solver choices
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the assignment as JSON (robot id -> trajectory id)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    /// Scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// Assignment to attack: inline JSON like '{"0":0,"1":2}' or a file path
    #[arg(long)]
    solution: String,
    /// Failure model: optimal, a1, or a2
    #[arg(long)]
    model: AttackModel,
    /// Number of trajectories to remove (the scenario's alpha when omitted)
    #[arg(long)]
    size: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// Assignment to score: inline JSON like '{"0":0,"1":2}' or a file path
    #[arg(long)]
    solution: String,
    /// Failure model: optimal, a1, or a2
    #[arg(long, default_value = "optimal")]
    model: AttackModel,
    /// Number of trajectories to remove (the scenario's alpha when omitted)
    #[arg(long)]
    size: Option<usize>,
}

#[derive(Args)]
struct ExportIlpArgs {
    /// Scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// LP output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap on enumerated attack subsets
    #[arg(long, default_value_t = DEFAULT_ILP_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct BruteforceArgs {
    /// Scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// Cap on coverage evaluations
    #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment config JSON file
    #[arg(long)]
    config: PathBuf,
    /// Per-row CSV output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aggregate CSV output file (stdout when omitted but --out given)
    #[arg(long)]
    aggregate: Option<PathBuf>,
}

#[derive(Args)]
struct RpmArgs {
    /// Grid-world settings JSON file (defaults when omitted)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rounds to simulate
    #[arg(long, default_value_t = 20)]
    rounds: usize,
    /// Solver replanning the fleet each round
    #[arg(long)]
    solver: String,
    /// Attack size the solver plans against
    #[arg(long, default_value_t = 3)]
    alpha: usize,
    /// Failure model applied after planning: none, a2, or optimal
    #[arg(long, default_value = "none")]
    fail_model: FailModel,
    /// Robots that actually fail each round
    #[arg(long, default_value_t = 0)]
    fail_size: usize,
    /// Override the config's world seed
    #[arg(long)]
    seed: Option<u64>,
    /// Round-report CSV output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a latency snapshot PGM into this directory after every round
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::ExportIlp(args) => cmd_export_ilp(args),
        Command::Bruteforce(args) => cmd_bruteforce(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Rpm(args) => cmd_rpm(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading the generator config {}", args.config.display()))?;
    let cfg: GeoConfig = serde_json::from_str(&text).context("parsing the generator config")?;
    cfg.validate().context("validating the generator config")?;
    let (scenario, geometry) = generate_with_geometry(&cfg);
    if let Some(path) = &args.geometry {
        fs::write(path, geometry.to_json())
            .with_context(|| format!("writing the geometry to {}", path.display()))?;
    }
    emit(args.out.as_deref(), &scenario.to_json(), "the scenario")
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let s = load_scenario(&args.scenario)?;
    let spec = SolverSpec::from_name(&args.solver, args.seed)
        .map_err(anyhow::Error::msg)
        .context("selecting the solver")?;
    let report = solve(&s, &spec);
    let coverage = coverage_value(&s, report.solution.trajectory_ids())
        .context("scoring the chosen assignment")?;
    println!("solution {}", report.solution);
    println!("coverage {coverage:?}");
    println!("f_evals {}", report.f_evals);
    if let Some(path) = &args.out {
        let json = serde_json::to_string(&report.solution).expect("assignments serialize");
        fs::write(path, json)
            .with_context(|| format!("writing the assignment to {}", path.display()))?;
    }
    Ok(())
}

fn cmd_attack(args: AttackArgs) -> Result<()> {
    let s = load_scenario(&args.scenario)?;
    let sol = read_solution(&s, &args.solution)?;
    let size = args.size.unwrap_or(s.alpha());
    let result = residual_coverage(&s, &sol, args.model, size).context("running the attack")?;
    println!("removed {}", fmt_ids(&result.removed));
    println!("residual {:?}", result.residual);
    println!("evals {}", result.evals);
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let s = load_scenario(&args.scenario)?;
    let sol = read_solution(&s, &args.solution)?;
    let size = args.size.unwrap_or(s.alpha());
    let result =
        residual_coverage(&s, &sol, args.model, size).context("evaluating the solution")?;
    println!("residual {:?}", result.residual);
    Ok(())
}

fn cmd_export_ilp(args: ExportIlpArgs) -> Result<()> {
    let s = load_scenario(&args.scenario)?;
    let text =
        export_ilp_budgeted(&s, args.budget).context("exporting the integer program")?;
    emit(args.out.as_deref(), &text, "the LP file")
}

fn cmd_bruteforce(args: BruteforceArgs) -> Result<()> {
    let s = load_scenario(&args.scenario)?;
    let exact = solve_bruteforce_budgeted(&s, args.budget).context("exhaustive search")?;
    println!("solution {}", exact.solution);
    println!("residual {:?}", exact.residual);
    println!("enumerated {}", exact.enumerated);
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading the experiment config {}", args.config.display()))?;
    let cfg: ExperimentConfig =
        serde_json::from_str(&text).context("parsing the experiment config")?;
    let report = run_experiment(&cfg).context("running the experiment")?;
    emit(args.out.as_deref(), &report.rows_csv(), "the row report")?;
    match (&args.aggregate, &args.out) {
        (Some(path), _) => fs::write(path, report.aggregate_csv())
            .with_context(|| format!("writing the aggregate report to {}", path.display())),
        // with rows on stdout a second CSV would corrupt the stream
        (None, Some(_)) => emit(None, &report.aggregate_csv(), "the aggregate report"),
        (None, None) => Ok(()),
    }
}

fn cmd_rpm(args: RpmArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading the world config {}", path.display()))?;
            serde_json::from_str(&text).context("parsing the world config")?
        }
        None => RpmConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.fail_size > cfg.n_robots {
        bail!("fail size {} exceeds the fleet of {}", args.fail_size, cfg.n_robots);
    }
    if cfg.permanent_failures && args.rounds * args.fail_size > cfg.n_robots {
        bail!(
            "{} rounds of {} permanent failures would exhaust the fleet of {}",
            args.rounds,
            args.fail_size,
            cfg.n_robots
        );
    }
    let spec = SolverSpec::from_name(&args.solver, cfg.seed)
        .map_err(anyhow::Error::msg)
        .context("selecting the solver")?;
    if let Some(dir) = &args.snapshot_dir {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating the snapshot directory {}", dir.display()))?;
    }
    let mut world = GridWorld::new(&cfg).context("building the grid world")?;
    let mut csv = String::from(RoundReport::csv_header());
    csv.push('\n');
    for round in 0..args.rounds {
        let report = world
            .step(&spec, args.alpha, args.fail_model, args.fail_size)
            .with_context(|| format!("simulating round {round}"))?;
        csv.push_str(&report.csv_row());
        csv.push('\n');
        if let Some(dir) = &args.snapshot_dir {
            let path = dir.join(format!("round_{round:04}.pgm"));
            fs::write(&path, world.latency_pgm())
                .with_context(|| format!("writing the snapshot {}", path.display()))?;
        }
    }
    emit(args.out.as_deref(), &csv, "the round reports")
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading the scenario {}", path.display()))?;
    Scenario::from_json(&text)
        .with_context(|| format!("parsing the scenario {}", path.display()))
}

/// Accepts either inline JSON (anything starting with `{`) or a file path,
/// and rejects assignments that are not feasible for the scenario.
fn read_solution(s: &Scenario, arg: &str) -> Result<FeasibleSolution> {
    let sol: FeasibleSolution = if arg.trim_start().starts_with('{') {
        serde_json::from_str(arg).context("parsing the inline solution")?
    } else {
        let text = fs::read_to_string(arg)
            .with_context(|| format!("reading the solution file {arg}"))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing the solution file {arg}"))?
    };
    if !validate_solution(s, &sol) {
        bail!("the solution does not assign every robot exactly one of its own trajectories");
    }
    Ok(sol)
}

fn fmt_ids(ids: &[usize]) -> String {
    let mut out = String::from("{");
    for (i, id) in ids.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("p{id}"));
    }
    out.push('}');
    out
}

fn emit(out: Option<&Path>, text: &str, what: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {what} to {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
