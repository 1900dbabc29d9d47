//! The `l2disc` command line.

pub mod io;
pub mod record;
pub mod tables;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::construct::{cross_evaluate, greedy_extend, optimize, GreedyConfig, OptimizerConfig, Trace};
use crate::error::{Error, Result};
use crate::evaluator::squared_discrepancy;
use crate::generators::{fibonacci_lattice, grid, iid_uniform, lattice, replicated_point, sobol, DirectionNumbers};
use crate::kernels::kernel_spec;
use crate::measure::{MeasureId, WeightVector};
use crate::oracle::mc_squared_discrepancy;
use crate::pathology::ArbitrationConfig;
use crate::point_set::PointSet;
use crate::sum::init_thread_pool;

use io::{read_points, write_file, write_points};
use record::RunRecord;

/// Exit status for input, configuration and I/O errors.
pub const EXIT_INVALID: u8 = 2;
/// Exit status for a squared value negative beyond rounding.
pub const EXIT_NUMERIC: u8 = 3;
/// Exit status when a requested `--target` was not reached.
pub const EXIT_TARGET: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "l2disc", version, about = "L2 discrepancy of point sets: evaluation, sampling checks and construction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a point set to CSV.
    Gen(GenArgs),
    /// Squared discrepancy of a point set.
    Disc(DiscArgs),
    /// Monte Carlo estimate from random test sets.
    Oracle(OracleArgs),
    /// Expected IID value, single-point value and crossover per measure and dimension.
    Pathology(PathologyArgs),
    /// Extend a set greedily.
    Greedy(GreedyArgs),
    /// Optimize a set by projected gradient descent.
    Optimize(OptimizeArgs),
    /// Ratio matrix of optimized sets evaluated under each measure.
    Crosseval(CrossevalArgs),
    /// Published tables next to computed values.
    Tables(TablesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Sobol,
    Iid,
    Point,
    Fibonacci,
    Grid,
    Lattice,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coordinates for `--kind point`, comma separated.
    #[arg(long)]
    pub point: Option<String>,
    /// Points per axis for `grid` and `lattice`.
    #[arg(long = "grid-k")]
    pub grid_k: Option<usize>,
    /// Direction-number file for `sobol`; the built-in table covers d <= 16.
    #[arg(long = "direction-numbers")]
    pub direction_numbers: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiscArgs {
    #[arg(long)]
    pub measure: MeasureId,
    /// Weights for the weighted measures, comma separated.
    #[arg(long)]
    pub gamma: Option<WeightVector>,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Optional one-row result CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub measure: MeasureId,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PathologyArgs {
    #[arg(long = "d-max", default_value_t = 10)]
    pub d_max: usize,
    /// Monte Carlo samples for the arbitrated rows; 0 skips them.
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GreedyArgs {
    #[arg(long)]
    pub measure: MeasureId,
    #[arg(long)]
    pub gamma: Option<WeightVector>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    #[arg(long = "grid-k", default_value_t = 101)]
    pub grid_k: usize,
    /// Refinement evaluations per step.
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    /// Output set; the trace goes next to it as `<stem>.trace.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Exit with status 4 if the final root value exceeds this.
    #[arg(long)]
    pub target: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub measure: MeasureId,
    #[arg(long)]
    pub gamma: Option<WeightVector>,
    /// Starting set. Without it, `--init` with `--n` and `--d` generates one.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GenKind::Sobol)]
    pub init: GenKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 50_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub target: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CrossevalArgs {
    /// Directory holding `<measure>.csv` for each optimized set.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Measures to compare; defaults to every optimizable measure with a file.
    #[arg(long, value_delimiter = ',')]
    pub measure: Vec<MeasureId>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long, value_enum)]
    pub which: tables::Which,
    #[arg(long, value_enum, default_value_t = tables::Preset::Desk)]
    pub preset: tables::Preset,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Target { record: Box<RunRecord>, root: f64, target: f64 },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::NegativeSquared(_)) => EXIT_NUMERIC,
            Failure::Lib(_) => EXIT_INVALID,
            Failure::Target { .. } => EXIT_TARGET,
        }
    }
}

/// Parses `args` (program name first), runs the command and reports.
pub fn main_with_args(args: Vec<String>) -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse_from(&args);
    let rest = args.iter().skip(1).cloned().collect();
    let start = Instant::now();
    let outcome = run(cli.command, rest);
    let elapsed = start.elapsed().as_millis() as u64;
    let print = |mut record: RunRecord| {
        record.elapsed_ms = elapsed;
        // A closed pipe (e.g. `| head`) is not an error worth a panic.
        let text = serde_json::to_string_pretty(&record).expect("records serialize");
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    };
    match outcome {
        Ok(record) => {
            print(record);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            let code = failure.exit_code();
            match failure {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Target { record, root, target } => {
                    print(*record);
                    eprintln!("error: root value {root:e} did not reach the target {target:e}");
                }
            }
            ExitCode::from(code)
        }
    }
}

pub fn run(command: Command, args: Vec<String>) -> Result<RunRecord, Failure> {
    match command {
        Command::Gen(a) => cmd_gen(a, args),
        Command::Disc(a) => cmd_disc(a, args),
        Command::Oracle(a) => cmd_oracle(a, args),
        Command::Pathology(a) => cmd_pathology(a, args),
        Command::Greedy(a) => cmd_greedy(a, args),
        Command::Optimize(a) => cmd_optimize(a, args),
        Command::Crosseval(a) => cmd_crosseval(a, args),
        Command::Tables(a) => cmd_tables(a, args),
    }
}

fn required(value: Option<usize>, flag: &str, kind: GenKind) -> Result<usize> {
    value.ok_or_else(|| Error::Config(format!("--{flag} is required for {kind:?}").to_lowercase()))
}

/// Builds a set of the given kind from the generator flags.
pub fn generate(
    kind: GenKind,
    n: Option<usize>,
    d: Option<usize>,
    seed: u64,
    point: Option<&str>,
    grid_k: Option<usize>,
    dirnums: Option<&Path>,
) -> Result<PointSet> {
    match kind {
        GenKind::Sobol => {
            let table = match dirnums {
                Some(path) => DirectionNumbers::load(path)?,
                None => DirectionNumbers::embedded(),
            };
            sobol(required(n, "n", kind)?, required(d, "d", kind)?, &table)
        }
        GenKind::Iid => iid_uniform(required(n, "n", kind)?, required(d, "d", kind)?, seed),
        GenKind::Point => {
            let text = point.ok_or_else(|| Error::Config("--point is required for point".into()))?;
            let p = text
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("`{t}` is not a number"))))
                .collect::<Result<Vec<_>>>()?;
            if let Some(d) = d.filter(|&d| d != p.len()) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.len(),
                });
            }
            replicated_point(&p, required(n, "n", kind)?)
        }
        GenKind::Fibonacci => {
            if let Some(d) = d.filter(|&d| d != 2) {
                return Err(Error::DimensionMismatch { expected: 2, found: d });
            }
            fibonacci_lattice(required(n, "n", kind)?)
        }
        GenKind::Grid => grid(required(grid_k, "grid-k", kind)?, required(d, "d", kind)?),
        GenKind::Lattice => lattice(required(grid_k, "grid-k", kind)?, required(d, "d", kind)?),
    }
}

fn describe(record: &mut RunRecord, measure: Option<MeasureId>, set: &PointSet, gamma: Option<&WeightVector>) {
    record.measure = measure;
    record.n = Some(set.len());
    record.d = Some(set.dim());
    record.gamma = gamma.map(|g| g.as_slice().to_vec());
}

fn cmd_gen(a: GenArgs, args: Vec<String>) -> Result<RunRecord, Failure> {
    let set = generate(a.kind, a.n, a.d, a.seed, a.point.as_deref(), a.grid_k, a.direction_numbers.as_deref())?;
    write_points(&a.out, &set)?;
    let mut record = RunRecord::new("gen", args);
    describe(&mut record, None, &set, None);
    if a.kind == GenKind::Iid {
        record.seeds = vec![a.seed];
    }
    record.outputs = vec![a.out.display().to_string()];
    Ok(record)
}

fn result_csv(path: &Path, record: &RunRecord) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let text = format!(
        "measure,n,d,squared,root,stderr,samples\n{},{},{},{},{},{},{}\n",
        record.measure.map(|m| m.to_string()).unwrap_or_default(),
        record.n.unwrap_or(0),
        record.d.unwrap_or(0),
        opt(record.squared),
        opt(record.root),
        opt(record.stderr),
        record.samples.map(|s| s.to_string()).unwrap_or_default(),
    );
    write_file(path, text.as_bytes())
}

fn cmd_disc(a: DiscArgs, args: Vec<String>) -> Result<RunRecord, Failure> {
    let set = read_points(&a.input)?;
    let spec = kernel_spec(a.measure, set.dim(), a.gamma.clone())?;
    let value = squared_discrepancy(&spec, &set)?.checked()?;
    let mut record = RunRecord::new("disc", args);
    describe(&mut record, Some(a.measure), &set, a.gamma.as_ref());
    record.set_squared(value.value);
    if let Some(out) = &a.out {
        result_csv(out, &record)?;
        record.outputs.push(out.display().to_string());
    }
    Ok(record)
}

fn cmd_oracle(a: OracleArgs, args: Vec<String>) -> Result<RunRecord, Failure> {
    let set = read_points(&a.input)?;
    let est = mc_squared_discrepancy(a.measure, &set, a.samples, a.seed)?;
    let mut record = RunRecord::new("oracle", args);
    describe(&mut record, Some(a.measure), &set, None);
    record.set_squared(est.mean);
    record.stderr = Some(est.stderr);
    record.samples = Some(est.samples as u64);
    record.seeds = vec![a.seed];
    if let Some(out) = &a.out {
        result_csv(out, &record)?;
        record.outputs.push(out.display().to_string());
    }
    Ok(record)
}

fn cmd_pathology(a: PathologyArgs, args: Vec<String>) -> Result<RunRecord, Failure> {
    if a.d_max == 0 {
        return Err(Error::Config("--d-max must be at least 1".into()).into());
    }
    let dims: Vec<usize> = (1..=a.d_max).collect();
    let arbitrate = (a.samples > 0).then_some(ArbitrationConfig {
        samples: a.samples,
        seed: a.seed,
        ..ArbitrationConfig::default()
    });
    tables::write_pathology(&a.out, &dims, arbitrate)?;
    let mut record = RunRecord::new("pathology", args);
    record.d = Some(a.d_max);
    record.samples = arbitrate.map(|c| c.samples as u64);
    record.seeds = arbitrate.map(|c| vec![c.seed]).unwrap_or_default();
    record.outputs = vec![a.out.display().to_string()];
    Ok(record)
}

/// `set.csv` becomes `set.trace.json`.
pub fn trace_path(out: &Path) -> PathBuf {
    out.with_extension("trace.json")
}

fn finish_construction(
    mut record: RunRecord,
    out: &Path,
    set: &PointSet,
    trace: &Trace,
    target: Option<f64>,
) -> Result<RunRecord, Failure> {
    write_points(out, set)?;
    let tpath = trace_path(out);
    write_file(&tpath, serde_json::to_string(trace).map_err(Error::from)?.as_bytes())?;
    record.outputs = vec![out.display().to_string(), tpath.display().to_string()];
    record.evaluations = Some(trace.evaluations);
    let root = record.root.unwrap_or(f64::NAN);
    match target {
        Some(t) if root.is_nan() || root > t => Err(Failure::Target {
            record: Box::new(record),
            root,
            target: t,
        }),
        _ => Ok(record),
    }
}

fn cmd_greedy(a: GreedyArgs, args: Vec<String>) -> Result<RunRecord, Failure> {
    let init = read_points(&a.input)?;
    let spec = kernel_spec(a.measure, init.dim(), a.gamma.clone())?;
    let cfg = GreedyConfig {
        batch: a.batch,
        grid_k: a.grid_k,
        refine_budget: a.budget,
        ..GreedyConfig::default()
    };
    let (set, trace) = greedy_extend(&spec, &init, a.steps, &cfg)?;
    let mut record = RunRecord::new("greedy", args);
    describe(&mut record, Some(a.measure), &set, a.gamma.as_ref());
    record.set_squared(squared_discrepancy(&spec, &set)?.checked()?.value);
    finish_construction(record, &a.out, &set, &trace, a.target)
}

fn cmd_optimize(a: OptimizeArgs, args: Vec<String>) -> Result<RunRecord, Failure> {
    let init = match &a.input {
        Some(path) => read_points(path)?,
        None => generate(a.init, a.n, a.d, a.seed, None, None, None)?,
    };
    let spec = kernel_spec(a.measure, init.dim(), a.gamma.clone())?;
    let cfg = OptimizerConfig {
        restarts: a.restarts,
        iterations: a.iters,
        seed: a.seed,
        ..OptimizerConfig::default()
    };
    let (set, trace) = optimize(&spec, &init, &cfg)?;
    let mut record = RunRecord::new("optimize", args);
    describe(&mut record, Some(a.measure), &set, a.gamma.as_ref());
    record.set_squared(squared_discrepancy(&spec, &set)?.checked()?.value);
    record.seeds = (0..a.restarts as u64).map(|r| a.seed.wrapping_add(r)).collect();
    finish_construction(record, &a.out, &set, &trace, a.target)
}

fn cmd_crosseval(a: CrossevalArgs, args: Vec<String>) -> Result<RunRecord, Failure> {
    let measures: Vec<MeasureId> = if a.measure.is_empty() {
        MeasureId::OPTIMIZABLE
            .into_iter()
            .filter(|m| a.input.join(format!("{m}.csv")).is_file())
            .collect()
    } else {
        a.measure.clone()
    };
    if measures.is_empty() {
        return Err(Error::Config(format!("no `<measure>.csv` files in {}", a.input.display())).into());
    }
    let mut sets = BTreeMap::new();
    for &m in &measures {
        sets.insert(m, read_points(&a.input.join(format!("{m}.csv")))?);
    }
    let matrix = cross_evaluate(&sets, &measures)?;
    let mut text = String::from("evaluated");
    for m in &measures {
        text.push_str(&format!(",{m}"));
    }
    text.push('\n');
    for (i, m) in measures.iter().enumerate() {
        text.push_str(&m.to_string());
        for r in &matrix.ratios[i] {
            text.push_str(&format!(",{r}"));
        }
        text.push('\n');
    }
    write_file(&a.out, text.as_bytes())?;
    let mut record = RunRecord::new("crosseval", args);
    let first = &sets[&measures[0]];
    record.n = Some(first.len());
    record.d = Some(first.dim());
    record.outputs = vec![a.out.display().to_string()];
    Ok(record)
}

fn cmd_tables(a: TablesArgs, args: Vec<String>) -> Result<RunRecord, Failure> {
    let outputs = tables::run(a.which, a.preset, &a.out, a.seed)?;
    let mut record = RunRecord::new("tables", args);
    record.seeds = vec![a.seed];
    record.outputs = outputs.iter().map(|p| p.display().to_string()).collect();
    Ok(record)
}
