//! Command-line front end: `solve`, `sweep`, `export` and `gen`.
//!
//! Flag values override the config file, which overrides built-in
//! defaults. Exit status is 0 on success, 1 for invalid input or I/O
//! failures, and 2 when a solver runs out of its node or iteration budget.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use satroute::analysis::{
    cell_commodities, cell_instance, cell_seed, fixed, run_experiment, summarize, throughput_drop, write_summary_csv,
    write_table_csv,
};
use satroute::config::{parse_config, ExperimentGrid};
use satroute::constellation::TimeVaryingNetwork;
use satroute::joint::{build_joint, solve_epsilon_with_max_tp, step_max_throughputs, DemandMode, EpsilonResult};
use satroute::lp::export_lp_text;
use satroute::mcf::{decompose_paths, Commodity, FlowSolution, RoutingMode};
use satroute::topology::{read_topology, write_topology};

#[derive(Parser)]
#[command(name = "satroute", version, about = "Path-consistent routing over time-varying satellite networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the shared-path throughput summary.
    Solve {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Also write the joint model in LP text format to this file.
        #[arg(long, value_name = "FILE")]
        export_lp: Option<PathBuf>,
        /// List each commodity's paths at every step.
        #[arg(long)]
        paths: bool,
    },
    /// Run the whole grid and write `table.csv` and `summary.csv`.
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        /// Replace the grid's commodity counts with this single value.
        #[arg(long)]
        k: Option<usize>,
        /// Replace the grid's step counts with this single value.
        #[arg(long = "T", value_name = "T")]
        steps: Option<usize>,
        /// Output directory, created if missing.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Write the joint model of one instance in LP text format.
    Export {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Output file; standard output when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Write the generated network of one instance as a topology dump.
    Gen {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Output file; standard output when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    /// JSON grid configuration; built-in defaults when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "per_graph|aggregate")]
    demand_mode: Option<DemandMode>,
    #[arg(long, value_name = "splittable|single_path")]
    routing_mode: Option<RoutingMode>,
}

#[derive(Args)]
struct InstanceArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Commodity count; defaults to the grid's first value.
    #[arg(long)]
    k: Option<usize>,
    /// Step count; defaults to the grid's first value, or to the dump's
    /// length with `--topology`.
    #[arg(long = "T", value_name = "T")]
    steps: Option<usize>,
    /// Trial index within the grid cell.
    #[arg(long, default_value_t = 0)]
    trial: usize,
    /// Read the network from a topology dump instead of generating it.
    #[arg(long, value_name = "FILE")]
    topology: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<satroute::Error> for Failure {
    fn from(e: satroute::Error) -> Self {
        Failure { code: if e.is_resource() { 2 } else { 1 }, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    // Usage errors are input errors; clap's own exit code 2 is reserved
    // here for solver budgets.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve { inst, export_lp, paths } => solve(&inst, export_lp.as_deref(), paths),
        Command::Sweep { grid, k, steps, out } => sweep(&grid, k, steps, &out),
        Command::Export { inst, out } => export(&inst, out.as_deref()),
        Command::Gen { inst, out } => gen(&inst, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_grid(args: &GridArgs) -> CliResult<ExperimentGrid> {
    let mut grid = match &args.config {
        Some(path) => {
            let text = read_file(path)?;
            parse_config(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        }
        None => ExperimentGrid::default(),
    };
    if let Some(seed) = args.seed {
        grid.master_seed = seed;
    }
    if let Some(mode) = args.demand_mode {
        grid.demand_mode = mode;
    }
    if let Some(mode) = args.routing_mode {
        grid.routing_mode = mode;
    }
    Ok(grid)
}

fn revalidate(grid: &ExperimentGrid) -> CliResult<()> {
    grid.validate().map_err(|e| Failure::input(e.to_string()))
}

struct Instance {
    grid: ExperimentGrid,
    k: usize,
    trial: usize,
    seed: u64,
    network: TimeVaryingNetwork,
    commodities: Vec<Commodity>,
}

fn load_instance(args: &InstanceArgs) -> CliResult<Instance> {
    let mut grid = load_grid(&args.grid)?;
    let k = args.k.unwrap_or(grid.k_values[0]);
    grid.k_values = vec![k];
    if args.trial >= grid.trials {
        return Err(Failure::input(format!("trial {} is outside 0..{}", args.trial, grid.trials)));
    }
    let Some(path) = &args.topology else {
        let steps = args.steps.unwrap_or(grid.t_values[0]);
        grid.t_values = vec![steps];
        revalidate(&grid)?;
        let (seed, network, commodities) = cell_instance(&grid, k, steps, args.trial)?;
        return Ok(Instance { grid, k, trial: args.trial, seed, network, commodities });
    };

    let mut network =
        read_topology(&read_file(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some(steps) = args.steps {
        if steps == 0 || steps > network.num_steps() {
            return Err(Failure::input(format!("--T {steps} is outside 1..={}", network.num_steps())));
        }
        network = network.prefix(steps);
    }
    let steps = network.num_steps();
    grid.t_values = vec![steps];
    revalidate(&grid)?;
    let seed = cell_seed(grid.master_seed, k, steps, args.trial);
    let commodities = cell_commodities(&grid, seed, network.num_nodes(), k)?;
    Ok(Instance { grid, k, trial: args.trial, seed, network, commodities })
}

fn solve(args: &InstanceArgs, export_lp: Option<&Path>, paths: bool) -> CliResult<()> {
    let inst = load_instance(args)?;
    let params = inst.grid.joint_params();
    let max_tp = step_max_throughputs(&inst.network, &inst.commodities, params.routing_mode)?;
    if let Some(path) = export_lp {
        let model = build_joint(&inst.network, &inst.commodities, &max_tp, &params)?;
        write_file(path, &export_lp_text(&model.lp).map_err(satroute::Error::from)?)?;
    }
    let result = solve_epsilon_with_max_tp(&inst.network, &inst.commodities, &max_tp, &params)?;
    let mut text = summary_text(&inst, &result);
    if paths {
        text.push_str(&paths_text(&inst.commodities, &result)?);
    }
    print!("{text}");
    Ok(())
}

fn summary_text(inst: &Instance, result: &EpsilonResult) -> String {
    let drop = throughput_drop(result);
    let mut s = String::new();
    let steps = inst.network.num_steps();
    let _ = writeln!(s, "instance k={} T={steps} trial={} seed={}", inst.k, inst.trial, inst.seed);
    for (i, c) in inst.commodities.iter().enumerate() {
        let _ = writeln!(s, "commodity {i}: {} -> {} demand={}", c.source, c.sink, fixed(c.demand));
    }
    let _ = writeln!(s, "epsilon={}", fixed(result.epsilon));
    let _ = writeln!(s, "upper_bound={}", fixed(result.upper_bound));
    let _ = writeln!(s, "proven_optimal={}", result.is_proven_optimal());
    let _ = writeln!(s, "strategy={}", result.strategy);
    for j in 0..steps {
        let ratio = result.ratios[j].map_or_else(|| "n/a".to_string(), fixed);
        let _ = writeln!(
            s,
            "step {j}: max_throughput={} achieved={} ratio={ratio}",
            fixed(result.max_tp[j]),
            fixed(result.achieved[j])
        );
    }
    let _ = writeln!(s, "mean_drop_pct={}", fixed(drop.mean_pct));
    let _ = writeln!(s, "worst_drop_pct={}", fixed(drop.worst_pct));
    s
}

fn paths_text(commodities: &[Commodity], result: &EpsilonResult) -> CliResult<String> {
    let mut s = String::new();
    for (j, flows) in result.flows.iter().enumerate() {
        let step = FlowSolution {
            arcs: result.arcs.clone(),
            commodities: commodities.to_vec(),
            flows: flows.clone(),
            delivered: result.delivered[j].clone(),
            total: result.achieved[j],
            minimal: true,
        };
        let _ = writeln!(s, "paths at step {j}:");
        for i in 0..commodities.len() {
            let split = decompose_paths(&step, i)?;
            let _ = writeln!(s, "  commodity {i}: delivered={}", fixed(step.delivered[i]));
            for p in &split.paths {
                let hops: Vec<String> = p.nodes.iter().map(|n| n.to_string()).collect();
                let _ = writeln!(s, "    {} amount={}", hops.join(" "), fixed(p.amount));
            }
            for c in &split.cycles {
                let hops: Vec<String> = c.nodes.iter().map(|n| n.to_string()).collect();
                let _ = writeln!(s, "    cycle {} amount={}", hops.join(" "), fixed(c.amount));
            }
        }
    }
    Ok(s)
}

fn sweep(args: &GridArgs, k: Option<usize>, steps: Option<usize>, out: &Path) -> CliResult<()> {
    let mut grid = load_grid(args)?;
    if let Some(k) = k {
        grid.k_values = vec![k];
    }
    if let Some(t) = steps {
        grid.t_values = vec![t];
    }
    revalidate(&grid)?;
    fs::create_dir_all(out).map_err(|e| Failure::input(format!("cannot create {}: {e}", out.display())))?;
    let outcome = run_experiment(&grid);

    let mut table = Vec::new();
    write_table_csv(&outcome.rows, &mut table).map_err(|e| Failure::input(e.to_string()))?;
    let mut summary = Vec::new();
    write_summary_csv(&summarize(&outcome.rows), &mut summary).map_err(|e| Failure::input(e.to_string()))?;
    let utf8 = |bytes: Vec<u8>| String::from_utf8(bytes).expect("csv output is UTF-8");
    write_file(&out.join("table.csv"), &utf8(table))?;
    write_file(&out.join("summary.csv"), &utf8(summary))?;
    eprintln!("wrote {} rows to {}", outcome.rows.len(), out.join("table.csv").display());

    for f in &outcome.failures {
        eprintln!("cell k={} T={} trial={} seed={} failed: {}", f.k, f.steps, f.trial, f.seed, f.message);
    }
    match outcome.failures.iter().find(|f| f.resource).or(outcome.failures.first()) {
        None => Ok(()),
        Some(f) => Err(Failure {
            code: if f.resource { 2 } else { 1 },
            message: format!(
                "{} of {} cells failed",
                outcome.failures.len(),
                outcome.failures.len() + outcome.rows.len()
            ),
        }),
    }
}

fn export(args: &InstanceArgs, out: Option<&Path>) -> CliResult<()> {
    let inst = load_instance(args)?;
    let params = inst.grid.joint_params();
    let max_tp = step_max_throughputs(&inst.network, &inst.commodities, params.routing_mode)?;
    let model = build_joint(&inst.network, &inst.commodities, &max_tp, &params)?;
    emit(out, &export_lp_text(&model.lp).map_err(satroute::Error::from)?)
}

fn gen(args: &InstanceArgs, out: Option<&Path>) -> CliResult<()> {
    let inst = load_instance(args)?;
    emit(out, &write_topology(&inst.network))
}
