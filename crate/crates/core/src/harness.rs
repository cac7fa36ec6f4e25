//! Experiment orchestration: one entry point per solver, deviation metrics
//! and the CSV benchmark report.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    branch_and_bound, brute_force_with, BranchAndBoundOptions, DEFAULT_BRUTE_FORCE_CAP,
};
use crate::exec::Execution;
use crate::generator::{generate_instance, generate_suite_with, group_of, GenSpec};
use crate::metaheuristics::{edd_sequence, gvns, vns, SearchParams};
use crate::model::{Instance, Sequence, Time};
use crate::schedule::{evaluate_schedule, total_tardiness};
use crate::swsp::{swsp_detailed, SwspParams};

pub const CSV_HEADER: [&str; 8] = [
    "group", "n", "method", "best", "mean", "rpd_pct", "mad_pct", "time_s",
];

/// A percentage that may be undefined because its reference value is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Percent {
    Value(f64),
    Undefined,
}

impl Percent {
    pub fn value(self) -> Option<f64> {
        match self {
            Percent::Value(v) => Some(v),
            Percent::Undefined => None,
        }
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Percent::Value(v) => write!(f, "{:.2}", v + 0.0),
            Percent::Undefined => f.write_str("inf"),
        }
    }
}

/// Relative percentage deviation `100 (z_alg - z_best) / z_best`.
///
/// Zero when both values are zero; undefined when only the reference is.
pub fn rpd(z_alg: Time, z_best: Time) -> Percent {
    if z_best == 0 {
        if z_alg == 0 {
            Percent::Value(0.0)
        } else {
            Percent::Undefined
        }
    } else {
        Percent::Value(100.0 * (z_alg - z_best) as f64 / z_best as f64)
    }
}

/// Mean absolute deviation of replication values, as a percentage of their
/// mean: `100 / (R mean) * sum |value - mean|`.
///
/// Values are non-negative tardiness totals, so a zero mean means every
/// value is zero and the deviation is zero too.
pub fn mad(values: &[Time]) -> Percent {
    if values.is_empty() {
        return Percent::Undefined;
    }
    let r = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / r;
    if mean == 0.0 {
        let all_zero = values.iter().all(|&v| v == 0);
        return if all_zero {
            Percent::Value(0.0)
        } else {
            Percent::Undefined
        };
    }
    let spread: f64 = values.iter().map(|&v| (v as f64 - mean).abs()).sum();
    Percent::Value(100.0 * spread / (r * mean))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Bb,
    Edd,
    Swsp,
    Vns,
    Gvns,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Exact,
        Method::Bb,
        Method::Edd,
        Method::Swsp,
        Method::Vns,
        Method::Gvns,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Bb => "bb",
            Method::Edd => "edd",
            Method::Swsp => "swsp",
            Method::Vns => "vns",
            Method::Gvns => "gvns",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Method::Vns | Method::Gvns)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

/// Parameters for every solver; each method reads the part it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub search: SearchParams,
    pub swsp: SwspParams,
    pub exact_cap: usize,
    pub bb: BranchAndBoundOptions,
    /// Parallelism inside a single solve (brute force and SWSP grid).
    pub execution: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            search: SearchParams::default(),
            swsp: SwspParams::default(),
            exact_cap: DEFAULT_BRUTE_FORCE_CAP,
            bb: BranchAndBoundOptions::default(),
            execution: Execution::default(),
        }
    }
}

/// What one solver call produced. Method-specific counters are `None` when
/// they do not apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solved {
    pub method: Method,
    pub sequence: Sequence,
    pub value: Time,
    pub seed: Option<u64>,
    pub proven_optimal: Option<bool>,
    pub optimal_set_size: Option<u64>,
    pub nodes_explored: Option<u64>,
    pub iterations: Option<u64>,
    pub perturbations: Option<u64>,
    /// Weighted-search stage value, SWSP only.
    pub greedy_value: Option<Time>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Solved {
    fn new(method: Method, sequence: Sequence, value: Time) -> Self {
        Solved {
            method,
            sequence,
            value,
            seed: None,
            proven_optimal: None,
            optimal_set_size: None,
            nodes_explored: None,
            iterations: None,
            perturbations: None,
            greedy_value: None,
            elapsed: Duration::ZERO,
        }
    }
}

/// Runs `method` once on `instance`; `seed` overrides the search seed.
pub fn solve(
    instance: &Instance,
    method: Method,
    options: &SolverOptions,
    seed: Option<u64>,
) -> Result<Solved> {
    let started = Instant::now();
    let mut search = options.search;
    if let Some(seed) = seed {
        search.seed = seed;
    }
    let mut solved = match method {
        Method::Exact => {
            let r = brute_force_with(instance, options.exact_cap, options.execution)?;
            let mut s = Solved::new(method, r.best_sequence, r.best_value);
            s.proven_optimal = Some(true);
            s.optimal_set_size = r.optimal_set_size;
            s
        }
        Method::Bb => {
            let r = branch_and_bound(instance, options.bb);
            let mut s = Solved::new(method, r.best_sequence, r.best_value);
            s.proven_optimal = Some(r.proven);
            s.nodes_explored = r.nodes_explored;
            s
        }
        Method::Edd => {
            let seq = edd_sequence(instance);
            let value = total_tardiness(instance, seq.as_slice());
            Solved::new(method, seq, value)
        }
        Method::Swsp => {
            let r = swsp_detailed(instance, &options.swsp, options.execution)?;
            let mut s = Solved::new(method, r.result.best_sequence, r.result.best_value);
            s.greedy_value = Some(r.greedy_value);
            s
        }
        Method::Vns | Method::Gvns => {
            let r = if method == Method::Gvns {
                gvns(instance, &search)?
            } else {
                vns(instance, &search)?
            };
            let mut s = Solved::new(method, r.best_sequence, r.best_value);
            s.seed = r.seed;
            s.iterations = Some(r.iterations);
            s.perturbations = Some(r.perturbations);
            s
        }
    };
    solved.elapsed = started.elapsed();
    Ok(solved)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub sizes: Vec<usize>,
    pub seed: u64,
}

/// Benchmark configuration, normally read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Instance JSON files; relative paths resolve against the config file.
    pub instances: Vec<PathBuf>,
    /// Individually specified generated instances.
    pub generate: Vec<GenSpec>,
    /// A full generated suite.
    pub suite: Option<SuiteSpec>,
    pub methods: Vec<Method>,
    /// Runs per stochastic method and instance.
    pub replications: u32,
    /// Replication `r` uses seed `seed + r`.
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub options: SolverOptions,
    /// Write measured wall times; off gives byte-reproducible reports.
    pub record_time: bool,
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            instances: Vec::new(),
            generate: Vec::new(),
            suite: None,
            methods: vec![Method::Swsp, Method::Vns, Method::Gvns],
            replications: 10,
            seed: 0,
            output: None,
            options: SolverOptions::default(),
            record_time: true,
            execution: Execution::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::InvalidParameter(
                "replications must be at least 1".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one method is required".into(),
            ));
        }
        self.options.search.validate()?;
        self.options.swsp.validate()
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)?;
        if let Some(dir) = path.parent() {
            for p in &mut config.instances {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
            if let Some(out) = config.output.as_mut() {
                if out.is_relative() {
                    *out = dir.join(&*out);
                }
            }
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub group: String,
    pub instance: String,
    pub n: usize,
    pub method: Method,
    pub best: Time,
    pub mean: f64,
    pub rpd_pct: Percent,
    pub mad_pct: Percent,
    pub time_s: Option<f64>,
    pub values: Vec<Time>,
}

impl ReportRow {
    fn fields(&self) -> [String; 8] {
        [
            self.group.clone(),
            self.n.to_string(),
            self.method.to_string(),
            self.best.to_string(),
            format!("{:.2}", self.mean),
            self.rpd_pct.to_string(),
            self.mad_pct.to_string(),
            self.time_s
                .map_or_else(|| "n/a".to_string(), |t| format!("{t:.2}")),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellError {
    pub instance: String,
    pub method: Method,
    pub message: String,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}: {}", self.instance, self.method, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub errors: Vec<CellError>,
}

impl Report {
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(CSV_HEADER)?;
        for row in &self.rows {
            writer.write_record(row.fields())?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::InvalidParameter(format!("csv flush failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("| {} |\n", CSV_HEADER.join(" | "));
        out.push_str(&format!("|{}\n", "---|".repeat(CSV_HEADER.len())));
        for row in &self.rows {
            out.push_str(&format!("| {} |\n", row.fields().join(" | ")));
        }
        out
    }

    /// Rows for one instance, in report order.
    pub fn rows_for<'a>(&'a self, instance: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.instance == instance)
    }
}

struct Cell {
    instance: usize,
    method: Method,
    seed: Option<u64>,
}

struct CellOutcome {
    value: Time,
    elapsed: Duration,
}

/// Collects the configured instances. Load failures become cell errors for
/// every method rather than aborting the batch.
fn collect_instances(config: &ExperimentConfig, errors: &mut Vec<CellError>) -> Vec<Instance> {
    let mut instances = Vec::new();
    let mut fail = |name: String, message: String| {
        for &method in &config.methods {
            errors.push(CellError {
                instance: name.clone(),
                method,
                message: message.clone(),
            });
        }
    };
    for path in &config.instances {
        match Instance::read(path) {
            Ok(inst) => instances.push(inst),
            Err(e) => fail(path.display().to_string(), e.to_string()),
        }
    }
    for spec in &config.generate {
        match generate_instance(spec) {
            Ok(inst) => instances.push(inst),
            Err(e) => fail(spec.instance_name(), e.to_string()),
        }
    }
    if let Some(suite) = &config.suite {
        match generate_suite_with(&suite.sizes, suite.seed, config.execution) {
            Ok(list) => instances.extend(list),
            Err(e) => fail(format!("suite(seed={})", suite.seed), e.to_string()),
        }
    }
    instances
}

fn run_cell(instance: &Instance, cell: &Cell, options: &SolverOptions) -> Result<CellOutcome> {
    let solved = solve(instance, cell.method, options, cell.seed)?;
    // every reported value is re-derived from the sequence before use
    let check = evaluate_schedule(instance, &solved.sequence)?;
    if check.total != solved.value {
        return Err(Error::InvalidSequence(format!(
            "{} reported {} but its sequence evaluates to {}",
            cell.method, solved.value, check.total
        )));
    }
    Ok(CellOutcome {
        value: solved.value,
        elapsed: solved.elapsed,
    })
}

/// Runs every (instance, method, replication) cell and aggregates rows.
///
/// Deterministic methods run once, stochastic ones `replications` times.
/// RPD is measured against the best value any method reached on the same
/// instance; for stochastic rows it is the mean RPD over replications.
pub fn run_benchmark(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let mut errors = Vec::new();
    let instances = collect_instances(config, &mut errors);

    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();

    let mut cells = Vec::new();
    for (idx, inst) in instances.iter().enumerate() {
        for &method in &methods {
            if method == Method::Exact && inst.n() > config.options.exact_cap {
                errors.push(CellError {
                    instance: inst.name().to_string(),
                    method,
                    message: format!(
                        "n = {} exceeds the brute-force cap of {}",
                        inst.n(),
                        config.options.exact_cap
                    ),
                });
                continue;
            }
            if method.is_stochastic() {
                for r in 0..config.replications {
                    cells.push(Cell {
                        instance: idx,
                        method,
                        seed: Some(config.seed.wrapping_add(r as u64)),
                    });
                }
            } else {
                cells.push(Cell {
                    instance: idx,
                    method,
                    seed: None,
                });
            }
        }
    }

    // cells already fan out; keep each solve single-threaded
    let mut cell_options = config.options;
    if config.execution.is_parallel() {
        cell_options.execution = Execution::Sequential;
    }
    let outcomes = config.execution.map(&cells, |cell| {
        run_cell(&instances[cell.instance], cell, &cell_options)
    });

    // (instance, method) -> outcomes in replication order
    let mut grouped: BTreeMap<(usize, Method), Vec<CellOutcome>> = BTreeMap::new();
    let mut failed: BTreeMap<(usize, Method), String> = BTreeMap::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(o) => grouped
                .entry((cell.instance, cell.method))
                .or_default()
                .push(o),
            Err(e) => {
                failed
                    .entry((cell.instance, cell.method))
                    .or_insert_with(|| e.to_string());
            }
        }
    }
    for ((idx, method), message) in failed {
        grouped.remove(&(idx, method));
        errors.push(CellError {
            instance: instances[idx].name().to_string(),
            method,
            message,
        });
    }

    let mut reference: BTreeMap<usize, Time> = BTreeMap::new();
    for ((idx, _), outs) in &grouped {
        let best = outs.iter().map(|o| o.value).min().expect("non-empty");
        let entry = reference.entry(*idx).or_insert(best);
        *entry = (*entry).min(best);
    }

    let mut rows: Vec<ReportRow> = grouped
        .into_iter()
        .map(|((idx, method), outs)| {
            let inst = &instances[idx];
            let values: Vec<Time> = outs.iter().map(|o| o.value).collect();
            let z_best = reference[&idx];
            let r = values.len() as f64;
            let rpds: Vec<Percent> = values.iter().map(|&v| rpd(v, z_best)).collect();
            let rpd_pct = if rpds.contains(&Percent::Undefined) {
                Percent::Undefined
            } else {
                Percent::Value(rpds.iter().filter_map(|p| p.value()).sum::<f64>() / r)
            };
            let time = outs.iter().map(|o| o.elapsed.as_secs_f64()).sum::<f64>() / r;
            ReportRow {
                group: group_of(inst.name()).unwrap_or(inst.name()).to_string(),
                instance: inst.name().to_string(),
                n: inst.n(),
                method,
                best: *values.iter().min().expect("non-empty"),
                mean: values.iter().sum::<Time>() as f64 / r,
                rpd_pct,
                mad_pct: mad(&values),
                time_s: config.record_time.then_some(time),
                values,
            }
        })
        .collect();
    rows.sort_by(|x, y| {
        (&x.group, x.n, x.method, &x.instance).cmp(&(&y.group, y.n, y.method, &y.instance))
    });
    errors.sort_by(|x, y| (&x.instance, x.method).cmp(&(&y.instance, y.method)));
    Ok(Report { rows, errors })
}

/// Runs the benchmark and writes the CSV to `config.output` when set.
pub fn run_and_write(config: &ExperimentConfig) -> Result<Report> {
    let report = run_benchmark(config)?;
    if let Some(path) = &config.output {
        std::fs::write(path, report.to_csv()?).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rpd_examples() {
        assert_eq!(rpd(680, 638).to_string(), "6.58");
        assert_eq!(rpd(638, 638), Percent::Value(0.0));
        assert_eq!(rpd(0, 0), Percent::Value(0.0));
        assert_eq!(rpd(5, 0), Percent::Undefined);
        assert_eq!(rpd(5, 0).to_string(), "inf");
        // signed results are allowed
        assert!(rpd(90, 100).value().unwrap() < 0.0);
    }

    #[test]
    fn mad_examples() {
        assert_eq!(mad(&[90, 110]).to_string(), "10.00");
        assert_eq!(mad(&[7, 7, 7]), Percent::Value(0.0));
        assert_eq!(mad(&[42]), Percent::Value(0.0));
        assert_eq!(mad(&[0, 0]), Percent::Value(0.0));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("cplex".parse::<Method>().is_err());
    }

    #[test]
    fn solve_exact_respects_cap() {
        let inst = Instance::table1();
        let options = SolverOptions {
            exact_cap: 5,
            ..Default::default()
        };
        assert!(matches!(
            solve(&inst, Method::Exact, &options, None),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn config_defaults_from_json() {
        let config: ExperimentConfig =
            serde_json::from_str(r#"{"methods":["swsp","gvns"]}"#).unwrap();
        assert_eq!(config.replications, 10);
        assert_eq!(config.options.search.iter_nip, 150);
        assert!(config.validate().is_ok());
        let bad: ExperimentConfig = serde_json::from_str(r#"{"methods":[]}"#).unwrap();
        assert!(bad.validate().is_err());
        let zero: ExperimentConfig = serde_json::from_str(r#"{"replications":0}"#).unwrap();
        assert!(zero.validate().is_err());
    }
}
