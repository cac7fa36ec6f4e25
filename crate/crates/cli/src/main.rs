use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use stepsched::exact::DEFAULT_NODE_LIMIT;
use stepsched::generator::{generate_instance, generate_suite_with, GenSpec};
use stepsched::harness::{run_benchmark, solve, ExperimentConfig, Method, SolverOptions};
use stepsched::milp::instance_to_lp;
use stepsched::neighborhoods::PairRule;
use stepsched::swsp::GridSpan;
use stepsched::{evaluate_schedule, validate_jobs, Execution, Instance, Sequence};

/// Total tardiness scheduling with step-deteriorating jobs.
#[derive(Parser)]
#[command(name = "stepsched", version)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance (or a suite) as JSON.
    Gen(GenArgs),
    /// Evaluate a job sequence on an instance and print its total tardiness.
    Eval(EvalArgs),
    /// Solve one instance with one method.
    Solve(SolveArgs),
    /// Run a benchmark described by a JSON config and write the CSV report.
    Bench(BenchArgs),
    /// Write the 0-1 model of an instance in LP format.
    ExportMilp(ExportArgs),
    /// Check an instance file and list every violation.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of jobs.
    #[arg(long, required_unless_present_any = ["table1", "sizes"])]
    n: Option<usize>,
    /// Deteriorating date class: 1 (0, A/2], 2 [A/2, A], 3 (0, A].
    #[arg(long, default_value_t = 1)]
    h_class: u8,
    /// Due date class: 1 (0, Cmax/2], 2 (0, Cmax].
    #[arg(long, default_value_t = 1)]
    d_class: u8,
    /// Penalty scale: b is drawn from 1..=floor(100 tau).
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the eight-job worked example instead of a random instance.
    #[arg(long, conflicts_with_all = ["n", "sizes"])]
    table1: bool,
    /// Generate a suite (every group for each size, comma-separated) into --out-dir.
    #[arg(long, value_delimiter = ',', requires = "out_dir")]
    sizes: Option<Vec<usize>>,
    /// Directory for suite files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated job ids, e.g. 3,2,4,1.
    #[arg(
        long,
        conflicts_with = "sequence_file",
        required_unless_present = "sequence_file"
    )]
    sequence: Option<String>,
    /// File holding comma-separated job ids.
    #[arg(long)]
    sequence_file: Option<PathBuf>,
    /// Also print the per-position schedule.
    #[arg(long)]
    detail: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairRuleArg {
    AdjacentCouples,
    ArbitraryPairs,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Full,
    ExcludeLast,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Seed for vns and gvns.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    iter_max: u64,
    #[arg(long, default_value_t = 150)]
    iter_nip: u64,
    #[arg(long, default_value_t = 75)]
    gamma: u64,
    /// Neighborhoods N1..N_kmax used by vns and gvns.
    #[arg(long, default_value_t = 5)]
    k_max: u8,
    /// Move set of N3: adjacent couples, or any two disjoint transpositions.
    #[arg(long, value_enum, default_value = "adjacent-couples")]
    pair_rule: PairRuleArg,
    /// Largest n accepted by the brute-force solver.
    #[arg(long, default_value_t = stepsched::exact::DEFAULT_BRUTE_FORCE_CAP)]
    n_cap: usize,
    /// Branch-and-bound node budget.
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    node_limit: u64,
    /// Disable adjacent-interchange pruning in branch and bound.
    #[arg(long)]
    no_interchange_pruning: bool,
    #[arg(long, default_value_t = 0.2)]
    w1_min: f64,
    #[arg(long, default_value_t = 0.9)]
    w1_max: f64,
    #[arg(long, default_value_t = 0.1)]
    w2_min: f64,
    #[arg(long, default_value_t = 0.7)]
    w2_max: f64,
    /// w3 used when 1 - w1 - w2 is not positive.
    #[arg(long, default_value_t = 0.1)]
    w3_fallback: f64,
    /// SWSP weight grid levels.
    #[arg(long, value_enum, default_value = "full")]
    grid_span: GridArg,
    /// Repeat the SWSP swap pass until no swap improves.
    #[arg(long)]
    swap_until_fixpoint: bool,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Swsp,
    Vns,
    Gvns,
    Exact,
    Bb,
    Edd,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Swsp => Method::Swsp,
            MethodArg::Vns => Method::Vns,
            MethodArg::Gvns => Method::Gvns,
            MethodArg::Exact => Method::Exact,
            MethodArg::Bb => Method::Bb,
            MethodArg::Edd => Method::Edd,
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; overrides the config. Stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print the report as a markdown table on stdout.
    #[arg(long)]
    markdown: bool,
    /// Write n/a instead of wall times so reruns are byte-identical.
    #[arg(long)]
    no_time: bool,
    /// Exit nonzero if any cell failed.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    /// LP output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    Instance::read(path).with_context(|| format!("loading instance {}", path.display()))
}

fn execution(cli: &Cli) -> Execution {
    if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn cmd_gen(args: &GenArgs, exec: Execution) -> Result<()> {
    if let Some(sizes) = &args.sizes {
        let dir = args.out_dir.as_ref().expect("clap enforces out_dir");
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let suite = generate_suite_with(sizes, args.seed, exec)?;
        for inst in &suite {
            let path = dir.join(format!("{}.json", inst.name()));
            inst.write(&path)?;
        }
        eprintln!("wrote {} instances to {}", suite.len(), dir.display());
        return Ok(());
    }
    let inst = if args.table1 {
        Instance::table1()
    } else {
        let spec = GenSpec {
            tau: args.tau,
            ..GenSpec::new(
                args.n.expect("clap enforces n"),
                args.h_class,
                args.d_class,
                args.seed,
            )
        };
        generate_instance(&spec)?
    };
    let mut text = inst.to_json()?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let inst = read_instance(&args.instance)?;
    let text = match (&args.sequence, &args.sequence_file) {
        (Some(s), _) => s.clone(),
        (None, Some(p)) => {
            fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
        }
        (None, None) => bail!("--sequence or --sequence-file is required"),
    };
    let seq = Sequence::parse(text.trim())?;
    let schedule = evaluate_schedule(&inst, &seq)?;
    if args.detail {
        println!("pos,job,start,p,completion,due,tardiness");
        for (pos, &id) in seq.as_slice().iter().enumerate() {
            let i = id - 1;
            println!(
                "{},{},{},{},{},{},{}",
                pos + 1,
                id,
                schedule.starts[i],
                schedule.processing[i],
                schedule.completions[i],
                inst.job(id).d,
                schedule.tardiness[i]
            );
        }
    }
    println!("{}", schedule.total);
    Ok(())
}

fn cmd_solve(args: &SolveArgs, exec: Execution) -> Result<()> {
    let inst = read_instance(&args.instance)?;
    let mut options = SolverOptions {
        exact_cap: args.n_cap,
        execution: exec,
        ..Default::default()
    };
    options.search.iter_max = args.iter_max;
    options.search.iter_nip = args.iter_nip;
    options.search.gamma = args.gamma;
    options.search.k_max = args.k_max;
    options.search.pair_rule = match args.pair_rule {
        PairRuleArg::AdjacentCouples => PairRule::AdjacentCouples,
        PairRuleArg::ArbitraryPairs => PairRule::ArbitraryPairs,
    };
    options.bb.node_limit = args.node_limit;
    options.bb.interchange_pruning = !args.no_interchange_pruning;
    options.swsp.w1_min = args.w1_min;
    options.swsp.w1_max = args.w1_max;
    options.swsp.w2_min = args.w2_min;
    options.swsp.w2_max = args.w2_max;
    options.swsp.w3_fallback = args.w3_fallback;
    options.swsp.grid_span = match args.grid_span {
        GridArg::Full => GridSpan::Full,
        GridArg::ExcludeLast => GridSpan::ExcludeLast,
    };
    options.swsp.swap_until_fixpoint = args.swap_until_fixpoint;

    let solved = solve(&inst, args.method.into(), &options, Some(args.seed))?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&solved)?);
    } else {
        println!("method: {}", solved.method);
        println!("value: {}", solved.value);
        println!("sequence: {}", solved.sequence);
        if let Some(v) = solved.greedy_value {
            println!("weighted search best: {v}");
        }
        if let Some(p) = solved.proven_optimal {
            println!("proven optimal: {p}");
        }
        if let Some(c) = solved.optimal_set_size {
            println!("optimal sequences: {c}");
        }
        if let Some(c) = solved.nodes_explored {
            println!("nodes explored: {c}");
        }
        if let (Some(i), Some(p)) = (solved.iterations, solved.perturbations) {
            println!("iterations: {i}");
            println!("perturbations: {p}");
        }
    }
    eprintln!("elapsed: {:.3} s", solved.elapsed.as_secs_f64());
    Ok(())
}

/// Returns whether every cell succeeded.
fn cmd_bench(args: &BenchArgs, exec: Execution) -> Result<bool> {
    let mut config = ExperimentConfig::read(&args.config)
        .with_context(|| format!("loading config {}", args.config.display()))?;
    if args.no_time {
        config.record_time = false;
    }
    if exec == Execution::Sequential {
        config.execution = Execution::Sequential;
        config.options.execution = Execution::Sequential;
    }
    if args.out.is_some() {
        config.output = args.out.clone();
    }
    let report = run_benchmark(&config)?;
    for e in &report.errors {
        eprintln!("error: {e}");
    }
    write_output(config.output.as_deref(), &report.to_csv()?)?;
    if args.markdown {
        print!("{}", report.to_markdown());
    }
    Ok(report.errors.is_empty())
}

fn cmd_export(args: &ExportArgs) -> Result<()> {
    let inst = read_instance(&args.instance)?;
    write_output(args.out.as_deref(), &instance_to_lp(&inst))
}

fn cmd_validate(args: &ValidateArgs) -> Result<()> {
    let text = fs::read_to_string(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    let record: stepsched::model::InstanceRecord =
        serde_json::from_str(&text).context("parsing instance JSON")?;
    let report = validate_jobs(&record.jobs);
    if report.is_valid() {
        println!("ok: {} jobs", record.jobs.len());
        Ok(())
    } else {
        bail!("{report}")
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
        #[cfg(not(feature = "parallel"))]
        eprintln!("warning: --threads {t} ignored, built without the parallel feature");
    }
    let exec = execution(&cli);
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, exec)?,
        Command::Eval(a) => cmd_eval(a)?,
        Command::Solve(a) => cmd_solve(a, exec)?,
        Command::Bench(a) => return cmd_bench(a, exec).map(|ok| ok || !a.strict),
        Command::ExportMilp(a) => cmd_export(a)?,
        Command::Validate(a) => cmd_validate(a)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
