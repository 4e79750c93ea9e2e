use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sspolicy::heuristics::{bs_policy, mp_policy, read_policy_csv, write_policy_csv, HeuristicConfig};
use sspolicy::instance::read_instance;
use sspolicy::loss::PartitionStrategy;
use sspolicy::model::{build_joint, build_minlp_s, ModelOptions, SegmentTable};
use sspolicy::sdp::{solve_sdp_auto, SdpOptions};
use sspolicy::simulate::{estimate_gap, simulate_policy, write_simulation_csv, SimulationRow};
use sspolicy::solver::ExactBackend;
use sspolicy::testbed::{
    build_instances, run_benchmark, write_summary, BenchmarkConfig, BenchmarkOptions, Method, PatternName,
};
use sspolicy::{Error, Instance, PolicyParameters};

#[derive(Parser)]
#[command(name = "sspolicy", version, about = "Non-stationary (s,S) inventory policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal policy by stochastic dynamic programming.
    Sdp {
        instance: PathBuf,
        /// Inventory grid step.
        #[arg(long, default_value_t = 1.0)]
        grid_step: f64,
        /// Demand quantile beyond which the tails are dropped.
        #[arg(long, default_value_t = 0.9999)]
        truncation: f64,
        /// Write `t,y,G` for every period and grid point.
        #[arg(long)]
        dump_g: Option<PathBuf>,
        /// Write the policy as `t,s_t,S_t,linked_cost`.
        #[arg(long)]
        policy_out: Option<PathBuf>,
    },
    /// Policy from one of the MILP heuristics.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Bs)]
        method: MethodArg,
        /// Linear pieces per loss function.
        #[arg(long, default_value_t = 11)]
        segments: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Minimax)]
        partition: StrategyArg,
        /// Binary search step (default depends on the horizon).
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        lower_bound: Option<f64>,
        #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
        backend: BackendArg,
        /// Directory for LP files (`--backend lp-export`).
        #[arg(long, default_value = "lp")]
        out_dir: PathBuf,
        /// Policy file; printed to stdout when omitted.
        #[arg(long)]
        policy_out: Option<PathBuf>,
    },
    /// Monte Carlo cost of a policy.
    Simulate {
        instance: PathBuf,
        policy: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        /// Reference cost for the gap column.
        #[arg(long)]
        oracle_cost: Option<f64>,
        #[arg(long, default_value = "")]
        instance_id: String,
        #[arg(long, default_value = "")]
        method: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimality-gap study over a test bed.
    Benchmark {
        /// Configuration file; the bundled 8-period grid when omitted.
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
        /// Comma-separated subset of patterns.
        #[arg(long, value_delimiter = ',')]
        patterns: Vec<String>,
        /// Restrict the fixed ordering costs.
        #[arg(long = "K", value_delimiter = ',')]
        fixed: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        methods: Vec<String>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, default_value = "bench")]
        out_dir: PathBuf,
        /// Allow 25-period configurations (needs an external MIP solver for most suffixes).
        #[arg(long)]
        long_horizon: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mp,
    Bs,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    LpExport,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Minimax,
    EqualProbability,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => 2,
        Error::Heuristic { source, .. } => exit_code(source),
        e if e.is_data_error() => 3,
        _ => 4,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn print_policy(policy: &PolicyParameters, extra: Option<(&str, &[f64])>) {
    match extra {
        Some((name, _)) => println!("t,s_t,S_t,{name}"),
        None => println!("t,s_t,S_t"),
    }
    for t in 1..=policy.len() {
        let (s, big_s) = policy.period(t);
        match extra {
            Some((_, v)) => println!("{t},{s},{big_s},{}", v[t - 1]),
            None => println!("{t},{s},{big_s}"),
        }
    }
}

fn sdp(instance: &Path, step: f64, truncation: f64, dump_g: Option<PathBuf>, policy_out: Option<PathBuf>) -> sspolicy::Result<()> {
    let inst = read_instance(instance)?;
    let sol = solve_sdp_auto(&inst, step, &SdpOptions { truncation })?;
    let linked: Vec<f64> = (1..=sol.horizon())
        .map(|t| {
            let i = sol.grid().index_of(sol.policy().period(t).1).expect("policy on grid");
            sol.fixed_cost() + sol.g_table(t)[i]
        })
        .collect();
    print_policy(sol.policy(), Some(("K_plus_G_S", &linked)));
    println!("expected_cost,{}", sol.expected_cost());
    if let Some(p) = dump_g {
        sol.write_g_csv(&p)?;
    }
    if let Some(p) = policy_out {
        write_policy_csv(&p, sol.policy(), Some(&linked))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    instance: &Path,
    method: MethodArg,
    segments: usize,
    partition: StrategyArg,
    step: Option<f64>,
    lower_bound: Option<f64>,
    backend: BackendArg,
    out_dir: &Path,
    policy_out: Option<PathBuf>,
) -> sspolicy::Result<()> {
    let inst = read_instance(instance)?;
    let config = HeuristicConfig {
        segments,
        strategy: match partition {
            StrategyArg::Minimax => PartitionStrategy::Minimax,
            StrategyArg::EqualProbability => PartitionStrategy::EqualProbability,
        },
        bs_step: step,
        bs_lower_bound: lower_bound,
        ..Default::default()
    };
    config.check()?;
    if let BackendArg::LpExport = backend {
        return export_suffixes(&inst, &config, method, out_dir);
    }
    let backend = ExactBackend::default();
    let result = match method {
        MethodArg::Mp => mp_policy(&inst, &config, &backend)?,
        MethodArg::Bs => bs_policy(&inst, &config, &backend)?,
    };
    for (t, approx) in result.approximate.iter().enumerate() {
        if *approx {
            eprintln!("period {}: search ended on an empty bracket, reporting its midpoint", t + 1);
        }
    }
    for (t, multi) in result.multiple_roots.iter().enumerate() {
        if *multi {
            eprintln!("period {}: the cost link has another root below s", t + 1);
        }
    }
    match policy_out {
        Some(p) => write_policy_csv(&p, &result.policy, Some(&result.linked_costs)),
        None => {
            print_policy(&result.policy, Some(("linked_cost", &result.linked_costs)));
            Ok(())
        }
    }
}

fn export_suffixes(inst: &Instance, config: &HeuristicConfig, method: MethodArg, out_dir: &Path) -> sspolicy::Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let partition = config.partition()?;
    let options = ModelOptions::default();
    for k in 1..=inst.horizon() {
        let mut suffix = inst.suffix(k)?;
        suffix.initial_inventory = 0.0;
        let segs = SegmentTable::new(&suffix, &partition);
        let (mut model, name) = match method {
            MethodArg::Mp => (build_joint(&suffix, &segs, &options)?, format!("joint_k{k}.lp")),
            MethodArg::Bs => (build_minlp_s(&suffix, &segs, None, &options)?, format!("s_free_k{k}.lp")),
        };
        model.structure.offset = k;
        let path = out_dir.join(name);
        model.export_lp(&path)?;
        println!("{}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    instance: &Path,
    policy: &Path,
    reps: usize,
    seed: u64,
    oracle_cost: Option<f64>,
    instance_id: &str,
    method: &str,
    out: Option<PathBuf>,
) -> sspolicy::Result<()> {
    if reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    let inst = read_instance(instance)?;
    let (pol, _) = read_policy_csv(policy)?;
    let (result, gap) = match oracle_cost {
        Some(c) => {
            let g = estimate_gap(&inst, &pol, c, reps, seed)?;
            (g.simulation, Some(g.gap_pct))
        }
        None => (simulate_policy(&inst, &pol, reps, seed)?, None),
    };
    if !result.std_error_defined() {
        eprintln!("one replication: standard error undefined, reported as 0");
    }
    if result.truncated_draws > 0 {
        eprintln!(
            "{} of {} demand draws were negative and set to 0",
            result.truncated_draws, result.total_draws
        );
    }
    let id = if instance_id.is_empty() {
        instance.file_stem().and_then(|s| s.to_str()).unwrap_or("instance")
    } else {
        instance_id
    };
    let row = SimulationRow::new(id, method, &result, gap);
    match out {
        Some(p) => write_simulation_csv(&p, &[row]),
        None => {
            println!("instance_id,method,mean,stderr,replications,seed,gap_pct");
            println!(
                "{},{},{},{},{},{},{}",
                row.instance_id,
                row.method,
                row.mean,
                row.stderr,
                row.replications,
                row.seed,
                row.gap_pct.map(|g| g.to_string()).unwrap_or_default()
            );
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn benchmark(
    config: Option<PathBuf>,
    seed: u64,
    jobs: Option<usize>,
    patterns: Vec<String>,
    fixed: Vec<f64>,
    methods: Vec<String>,
    reps: Option<usize>,
    out_dir: &Path,
    long_horizon: bool,
) -> sspolicy::Result<()> {
    let mut cfg = match config {
        Some(p) => BenchmarkConfig::read(p)?,
        None => BenchmarkConfig::bundled(8)?,
    };
    if cfg.horizon > 8 && !long_horizon {
        return Err(usage(format!(
            "{}-period benchmarks need --long-horizon (most suffix models exceed the built-in solver)",
            cfg.horizon
        )));
    }
    if !patterns.is_empty() {
        cfg.patterns = patterns.iter().map(|p| p.parse::<PatternName>()).collect::<Result<_, _>>()?;
    }
    if !fixed.is_empty() {
        cfg.fixed_costs = fixed;
    }
    if !methods.is_empty() {
        cfg.methods = methods.iter().map(|m| m.parse::<Method>()).collect::<Result<_, _>>()?;
    }
    if let Some(r) = reps {
        cfg.replications = r;
    }
    if jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    let instances = build_instances(&cfg)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let detail = out_dir.join("detail.csv");
    let report = run_benchmark(
        &cfg,
        &instances,
        &BenchmarkOptions {
            seed,
            jobs,
            detail_path: Some(detail.clone()),
        },
    )?;
    let summary = out_dir.join("summary.csv");
    write_summary(&summary, &cfg, &report.summary)?;
    eprintln!(
        "{} instances, {} rows reused from {}",
        instances.len(),
        report.resumed,
        detail.display()
    );
    println!("method,dimension,level,instances,failures,mean_gap_pct,median_gap_pct");
    for r in &report.summary {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
        println!(
            "{},{},{},{},{},{},{}",
            r.method,
            r.dimension,
            r.level,
            r.instances,
            r.failures,
            f(r.mean_gap_pct),
            f(r.median_gap_pct)
        );
    }
    Ok(())
}

fn single_threaded() {
    // only the benchmark runs in parallel
    let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sdp {
            instance,
            grid_step,
            truncation,
            dump_g,
            policy_out,
        } => {
            single_threaded();
            sdp(&instance, grid_step, truncation, dump_g, policy_out)
        }
        Command::Solve {
            instance,
            method,
            segments,
            partition,
            step,
            lower_bound,
            backend,
            out_dir,
            policy_out,
        } => {
            single_threaded();
            solve(&instance, method, segments, partition, step, lower_bound, backend, &out_dir, policy_out)
        }
        Command::Simulate {
            instance,
            policy,
            reps,
            seed,
            oracle_cost,
            instance_id,
            method,
            out,
        } => {
            single_threaded();
            simulate(&instance, &policy, reps, seed, oracle_cost, &instance_id, &method, out)
        }
        Command::Benchmark {
            config,
            seed,
            jobs,
            patterns,
            fixed,
            methods,
            reps,
            out_dir,
            long_horizon,
        } => benchmark(config, seed, jobs, patterns, fixed, methods, reps, &out_dir, long_horizon),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
