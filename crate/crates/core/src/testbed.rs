//! Demand patterns, benchmark instance grids and the optimality-gap study.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::{bs_policy, mp_policy, HeuristicConfig};
use crate::instance::{CostParameters, Instance, PolicyParameters};
use crate::sdp::{auto_step, solve_sdp_auto, SdpOptions};
use crate::simulate::{estimate_gap, simulate_policy};
use crate::solver::ExactBackend;

const DEMAND_8: &str = include_str!("../data/demand_8.v1.csv");
const DEMAND_25: &str = include_str!("../data/demand_25.v1.csv");
/// Default 8-period benchmark configuration.
pub const DEFAULT_CONFIG_8: &str = include_str!("../data/benchmark_8.json");
/// Default 25-period configuration (no oracle).
pub const DEFAULT_CONFIG_25: &str = include_str!("../data/benchmark_25.json");
pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PatternName {
    Lcy1,
    Lcy2,
    Sin1,
    Sin2,
    Sta,
    Rand,
    Emp1,
    Emp2,
    Emp3,
    Emp4,
}

impl PatternName {
    pub const ALL: [PatternName; 10] = [
        PatternName::Lcy1,
        PatternName::Lcy2,
        PatternName::Sin1,
        PatternName::Sin2,
        PatternName::Sta,
        PatternName::Rand,
        PatternName::Emp1,
        PatternName::Emp2,
        PatternName::Emp3,
        PatternName::Emp4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternName::Lcy1 => "LCY1",
            PatternName::Lcy2 => "LCY2",
            PatternName::Sin1 => "SIN1",
            PatternName::Sin2 => "SIN2",
            PatternName::Sta => "STA",
            PatternName::Rand => "RAND",
            PatternName::Emp1 => "EMP1",
            PatternName::Emp2 => "EMP2",
            PatternName::Emp3 => "EMP3",
            PatternName::Emp4 => "EMP4",
        }
    }
}

impl fmt::Display for PatternName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown demand pattern `{s}`")))
    }
}

fn table_column(data: &str, pattern: PatternName) -> Vec<f64> {
    let mut r = csv::Reader::from_reader(data.as_bytes());
    let col = r
        .headers()
        .expect("bundled header")
        .iter()
        .position(|h| h == pattern.as_str())
        .expect("bundled pattern column");
    r.records()
        .map(|rec| rec.expect("bundled row")[col].parse().expect("bundled number"))
        .collect()
}

/// Means as listed in the bundled demand tables.
pub fn tabulated_means(pattern: PatternName, horizon: usize) -> Result<Vec<f64>> {
    match horizon {
        8 => Ok(table_column(DEMAND_8, pattern)),
        25 => Ok(table_column(DEMAND_25, pattern)),
        _ => Err(Error::InvalidArgument(format!("no demand data for horizon {horizon} (use 8 or 25)"))),
    }
}

fn generated(pattern: PatternName, t: f64) -> Option<f64> {
    let v = match pattern {
        PatternName::Lcy1 => 190.0 * (-(t - 13.0).powi(2) / (2.0 * 25.0)).exp(),
        PatternName::Lcy2 => 170.0 * (-(t - 13.0).powi(2) / (2.0 * 36.0)).exp(),
        PatternName::Sin1 => 70.0 * (0.8 * t).sin() + 80.0,
        PatternName::Sin2 => 30.0 * (0.8 * t).sin() + 100.0,
        PatternName::Sta => 100.0,
        _ => return None,
    };
    Some(v.round())
}

/// Mean demand per period. The 8-period patterns and the 25-period RAND and
/// EMP patterns come from the bundled tables; the other 25-period patterns are
/// generated from their closed forms.
pub fn demand_means(pattern: PatternName, horizon: usize) -> Result<Vec<f64>> {
    let table = tabulated_means(pattern, horizon)?;
    if horizon == 8 {
        return Ok(table);
    }
    Ok((1..=horizon)
        .map(|t| generated(pattern, t as f64).unwrap_or(table[t - 1]))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mp,
    Bs,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mp => "mp",
            Method::Bs => "bs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mp" => Ok(Method::Mp),
            "bs" => Ok(Method::Bs),
            _ => Err(Error::InvalidArgument(format!("unknown method `{s}` (use mp or bs)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub version: u32,
    pub horizon: usize,
    pub patterns: Vec<PatternName>,
    pub fixed_costs: Vec<f64>,
    pub penalty_costs: Vec<f64>,
    pub cvs: Vec<f64>,
    pub holding: f64,
    pub unit: f64,
    pub initial_inventory: f64,
    pub methods: Vec<Method>,
    #[serde(default = "default_mp_segments")]
    pub mp_segments: usize,
    #[serde(default = "default_bs_segments")]
    pub bs_segments: usize,
    #[serde(default)]
    pub bs_step: Option<f64>,
    pub replications: usize,
    /// Compare against the dynamic programming optimum.
    pub oracle: bool,
    /// SDP grid step; `None` picks one per instance.
    #[serde(default)]
    pub sdp_step: Option<f64>,
    #[serde(default = "default_truncation")]
    pub sdp_truncation: f64,
}

fn default_mp_segments() -> usize {
    6
}

fn default_bs_segments() -> usize {
    11
}

fn default_truncation() -> f64 {
    SdpOptions::default().truncation
}

impl BenchmarkConfig {
    /// Bundled configuration for `horizon` (8 or 25).
    pub fn bundled(horizon: usize) -> Result<Self> {
        let text = match horizon {
            8 => DEFAULT_CONFIG_8,
            25 => DEFAULT_CONFIG_25,
            _ => return Err(Error::InvalidArgument(format!("no bundled configuration for horizon {horizon}"))),
        };
        Self::parse(text, Path::new("<bundled>"))
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let found = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if found != CONFIG_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                path: origin.to_path_buf(),
                found,
                expected: CONFIG_SCHEMA_VERSION,
            });
        }
        let cfg: Self = serde_json::from_value(value).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: 0,
            column: 0,
            message: e.to_string(),
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn check(&self) -> Result<()> {
        if self.horizon != 8 && self.horizon != 25 {
            return Err(Error::InvalidArgument(format!("horizon must be 8 or 25, got {}", self.horizon)));
        }
        for (name, empty) in [
            ("patterns", self.patterns.is_empty()),
            ("fixed_costs", self.fixed_costs.is_empty()),
            ("penalty_costs", self.penalty_costs.is_empty()),
            ("cvs", self.cvs.is_empty()),
            ("methods", self.methods.is_empty()),
        ] {
            if empty {
                return Err(Error::InvalidArgument(format!("`{name}` is empty")));
            }
        }
        if self.replications == 0 {
            return Err(Error::InvalidArgument("replications must be positive".into()));
        }
        if self.cvs.iter().any(|c| !(*c >= 0.0)) {
            return Err(Error::InvalidArgument("coefficients of variation must be non-negative".into()));
        }
        Ok(())
    }

    pub fn instance_count(&self) -> usize {
        self.patterns.len() * self.fixed_costs.len() * self.penalty_costs.len() * self.cvs.len()
    }

    fn heuristic(&self, method: Method) -> HeuristicConfig {
        match method {
            Method::Mp => HeuristicConfig {
                segments: self.mp_segments,
                ..Default::default()
            },
            Method::Bs => HeuristicConfig {
                segments: self.bs_segments,
                bs_step: self.bs_step,
                ..Default::default()
            },
        }
    }
}

/// One benchmark instance with its grid coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchInstance {
    pub id: String,
    pub pattern: PatternName,
    pub fixed: f64,
    pub penalty: f64,
    pub cv: f64,
    pub instance: Instance,
}

pub fn instance_id(horizon: usize, pattern: PatternName, fixed: f64, penalty: f64, cv: f64) -> String {
    format!("T{horizon}-{pattern}-K{fixed}-b{penalty}-cv{cv}")
}

/// Cross product pattern x K x b x cv, in that nesting order.
pub fn build_instances(config: &BenchmarkConfig) -> Result<Vec<BenchInstance>> {
    config.check()?;
    let mut out = Vec::with_capacity(config.instance_count());
    for &pattern in &config.patterns {
        let means = demand_means(pattern, config.horizon)?;
        for &fixed in &config.fixed_costs {
            for &penalty in &config.penalty_costs {
                for &cv in &config.cvs {
                    let costs = CostParameters::new(fixed, config.unit, config.holding, penalty);
                    let instance = Instance::with_cv(costs, &means, cv, config.initial_inventory).validate()?;
                    out.push(BenchInstance {
                        id: instance_id(config.horizon, pattern, fixed, penalty, cv),
                        pattern,
                        fixed,
                        penalty,
                        cv,
                        instance,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Per-instance, per-method outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailRow {
    pub instance_id: String,
    pub pattern: PatternName,
    #[serde(rename = "K")]
    pub fixed: f64,
    pub b: f64,
    pub cv: f64,
    pub method: Method,
    pub oracle_cost: Option<f64>,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub replications: usize,
    pub seed: u64,
    pub gap_pct: Option<f64>,
    pub policy_secs: Option<f64>,
    pub oracle_secs: Option<f64>,
    pub truncation_rate: Option<f64>,
    pub error: Option<String>,
}

/// Aggregate over one level of one grouping dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub dimension: String,
    pub level: String,
    pub instances: usize,
    pub failures: usize,
    pub mean_gap_pct: Option<f64>,
    pub median_gap_pct: Option<f64>,
    pub mean_policy_secs: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkOptions {
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Per-instance detail file; rows already present are reused.
    pub detail_path: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub details: Vec<DetailRow>,
    pub summary: Vec<SummaryRow>,
    /// Rows taken from an earlier run.
    pub resumed: usize,
}

fn policy_for(method: Method, instance: &Instance, config: &BenchmarkConfig) -> Result<PolicyParameters> {
    let backend = ExactBackend::default();
    let h = config.heuristic(method);
    Ok(match method {
        Method::Mp => mp_policy(instance, &h, &backend)?.policy,
        Method::Bs => bs_policy(instance, &h, &backend)?.policy,
    })
}

fn run_instance(bench: &BenchInstance, config: &BenchmarkConfig, methods: &[Method], seed: u64) -> Vec<DetailRow> {
    let blank = |method: Method| DetailRow {
        instance_id: bench.id.clone(),
        pattern: bench.pattern,
        fixed: bench.fixed,
        b: bench.penalty,
        cv: bench.cv,
        method,
        oracle_cost: None,
        mean: None,
        stderr: None,
        replications: config.replications,
        seed,
        gap_pct: None,
        policy_secs: None,
        oracle_secs: None,
        truncation_rate: None,
        error: None,
    };
    let mut oracle = None;
    let mut oracle_error = None;
    let mut oracle_secs = None;
    if config.oracle {
        let started = Instant::now();
        let step = config.sdp_step.unwrap_or_else(|| auto_step(&bench.instance));
        let options = SdpOptions {
            truncation: config.sdp_truncation,
        };
        match solve_sdp_auto(&bench.instance, step, &options) {
            Ok(sol) => oracle = Some(sol.expected_cost()),
            Err(e) => oracle_error = Some(format!("oracle: {e}")),
        }
        oracle_secs = Some(started.elapsed().as_secs_f64());
    }
    methods
        .iter()
        .map(|&method| {
            let mut row = blank(method);
            row.oracle_cost = oracle;
            row.oracle_secs = oracle_secs;
            let started = Instant::now();
            let policy = match policy_for(method, &bench.instance, config) {
                Ok(p) => p,
                Err(e) => {
                    row.error = Some(e.to_string());
                    return row;
                }
            };
            row.policy_secs = Some(started.elapsed().as_secs_f64());
            let sim = match oracle {
                Some(cost) => estimate_gap(&bench.instance, &policy, cost, config.replications, seed).map(|g| {
                    row.gap_pct = Some(g.gap_pct);
                    g.simulation
                }),
                None => simulate_policy(&bench.instance, &policy, config.replications, seed),
            };
            match sim {
                Ok(s) => {
                    row.mean = Some(s.mean);
                    row.stderr = Some(s.std_error);
                    row.truncation_rate = Some(s.truncation_rate());
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            if row.error.is_none() {
                row.error = oracle_error.clone();
            }
            row
        })
        .collect()
}

fn read_details(path: &Path) -> Result<Vec<DetailRow>> {
    if !path.exists() {
        return Ok(vec![]);
    }
    let mut r = csv::Reader::from_path(path)?;
    let rows: std::result::Result<Vec<DetailRow>, _> = r.deserialize().collect();
    Ok(rows?)
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T], header: Option<&str>) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    if let Some(h) = header {
        use std::io::Write;
        writeln!(file, "# {h}").map_err(|e| Error::io(path, e))?;
    }
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_details(path: impl AsRef<Path>, rows: &[DetailRow]) -> Result<()> {
    write_rows(path.as_ref(), rows, None)
}

/// Report header: the test bed does not pin holding and unit costs, so the
/// values used are stated with every summary.
pub fn summary_header(config: &BenchmarkConfig) -> String {
    format!(
        "horizon={} holding={} unit={} initial_inventory={} (holding and unit cost assumed; gaps are relative)",
        config.horizon, config.holding, config.unit, config.initial_inventory
    )
}

pub fn write_summary(path: impl AsRef<Path>, config: &BenchmarkConfig, rows: &[SummaryRow]) -> Result<()> {
    write_rows(path.as_ref(), rows, Some(&summary_header(config)))
}

fn median(xs: &mut [f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    })
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Groups by pattern, K, b, cv and overall, per method. Levels keep the order
/// in which they first appear.
pub fn summarize(rows: &[DetailRow]) -> Vec<SummaryRow> {
    let dims: [(&str, fn(&DetailRow) -> String); 5] = [
        ("pattern", |r| r.pattern.to_string()),
        ("K", |r| r.fixed.to_string()),
        ("b", |r| r.b.to_string()),
        ("cv", |r| r.cv.to_string()),
        ("overall", |_| "all".to_string()),
    ];
    let mut methods: Vec<Method> = rows.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let mut out = vec![];
    for method in methods {
        let mine: Vec<&DetailRow> = rows.iter().filter(|r| r.method == method).collect();
        for (dim, key) in dims {
            let mut levels: Vec<String> = vec![];
            let mut groups: BTreeMap<usize, Vec<&DetailRow>> = BTreeMap::new();
            for r in &mine {
                let k = key(r);
                let idx = match levels.iter().position(|l| *l == k) {
                    Some(i) => i,
                    None => {
                        levels.push(k);
                        levels.len() - 1
                    }
                };
                groups.entry(idx).or_default().push(r);
            }
            for (idx, group) in groups {
                let mut gaps: Vec<f64> = group.iter().filter_map(|r| r.gap_pct).collect();
                let secs: Vec<f64> = group.iter().filter_map(|r| r.policy_secs).collect();
                out.push(SummaryRow {
                    method,
                    dimension: dim.to_string(),
                    level: levels[idx].clone(),
                    instances: group.len(),
                    failures: group.iter().filter(|r| r.error.is_some()).count(),
                    mean_gap_pct: mean(&gaps),
                    median_gap_pct: median(&mut gaps),
                    mean_policy_secs: mean(&secs),
                });
            }
        }
    }
    out
}

/// Runs every method on every instance, simulating each policy with the same
/// seed. Method failures are recorded in the detail rows. With a detail path,
/// finished rows are appended as they complete and reused on the next run; the
/// file is rewritten in instance order at the end.
pub fn run_benchmark(config: &BenchmarkConfig, instances: &[BenchInstance], options: &BenchmarkOptions) -> Result<BenchmarkReport> {
    config.check()?;
    let methods = config.methods.clone();
    let mut done: Vec<DetailRow> = match &options.detail_path {
        Some(p) => read_details(p)?,
        None => vec![],
    };
    let wanted: HashSet<(&str, Method)> = instances
        .iter()
        .flat_map(|b| methods.iter().map(move |m| (b.id.as_str(), *m)))
        .collect();
    done.retain(|r| r.seed == options.seed && r.replications == config.replications && wanted.contains(&(r.instance_id.as_str(), r.method)));
    let have: HashSet<(String, Method)> = done.iter().map(|r| (r.instance_id.clone(), r.method)).collect();
    let resumed = done.len();

    let sink = match &options.detail_path {
        Some(p) => {
            write_details(p, &done)?;
            let file = OpenOptions::new().append(true).open(p).map_err(|e| Error::io(p, e))?;
            Some(Mutex::new(csv::WriterBuilder::new().has_headers(done.is_empty()).from_writer(file)))
        }
        None => None,
    };

    let work = || -> Result<Vec<DetailRow>> {
        let per: Vec<Result<Vec<DetailRow>>> = instances
            .par_iter()
            .map(|bench| {
                let todo: Vec<Method> = methods
                    .iter()
                    .copied()
                    .filter(|m| !have.contains(&(bench.id.clone(), *m)))
                    .collect();
                if todo.is_empty() {
                    return Ok(vec![]);
                }
                let rows = run_instance(bench, config, &todo, options.seed);
                if let Some(sink) = &sink {
                    let mut w = sink.lock().expect("detail writer");
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    w.flush().map_err(|e| Error::io(options.detail_path.clone().unwrap_or_default(), e))?;
                }
                Ok(rows)
            })
            .collect();
        let mut fresh = vec![];
        for r in per {
            fresh.extend(r?);
        }
        Ok(fresh)
    };
    let fresh = match options.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    drop(sink);

    let position = |r: &DetailRow| {
        let i = instances.iter().position(|b| b.id == r.instance_id).unwrap_or(usize::MAX);
        (i, r.method)
    };
    let mut details = done;
    details.extend(fresh);
    details.sort_by_key(position);
    if let Some(p) = &options.detail_path {
        write_details(p, &details)?;
    }
    let summary = summarize(&details);
    Ok(BenchmarkReport {
        details,
        summary,
        resumed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_period_table_rows() {
        assert_eq!(
            demand_means(PatternName::Lcy1, 8).unwrap(),
            vec![15.0, 16.0, 15.0, 14.0, 11.0, 7.0, 6.0, 3.0]
        );
        assert_eq!(demand_means(PatternName::Sta, 8).unwrap(), vec![10.0; 8]);
        assert_eq!(demand_means(PatternName::Emp4, 8).unwrap()[4], 51.0);
    }

    #[test]
    fn generated_long_patterns_match_table() {
        for p in [
            PatternName::Lcy1,
            PatternName::Lcy2,
            PatternName::Sin1,
            PatternName::Sin2,
            PatternName::Sta,
        ] {
            assert_eq!(demand_means(p, 25).unwrap(), tabulated_means(p, 25).unwrap(), "{p}");
        }
        assert_eq!(demand_means(PatternName::Lcy1, 25).unwrap()[12], 190.0);
        assert_eq!(demand_means(PatternName::Sta, 25).unwrap(), vec![100.0; 25]);
    }

    #[test]
    fn unsupported_horizon() {
        assert!(demand_means(PatternName::Sta, 12).is_err());
    }

    #[test]
    fn pattern_names_parse() {
        for p in PatternName::ALL {
            assert_eq!(p.as_str().parse::<PatternName>().unwrap(), p);
        }
        assert_eq!("sta".parse::<PatternName>().unwrap(), PatternName::Sta);
        assert!("FOO".parse::<PatternName>().is_err());
    }

    #[test]
    fn bundled_grid_has_270_instances() {
        let cfg = BenchmarkConfig::bundled(8).unwrap();
        let all = build_instances(&cfg).unwrap();
        assert_eq!(all.len(), 270);
        let ids: HashSet<&str> = all.iter().map(|b| b.id.as_str()).collect();
        assert_eq!(ids.len(), 270);
        for b in &all {
            b.instance.check().unwrap();
            assert_eq!(b.id, instance_id(8, b.pattern, b.fixed, b.penalty, b.cv));
        }
        let one = BenchmarkConfig {
            patterns: vec![PatternName::Rand],
            ..cfg
        };
        assert_eq!(build_instances(&one).unwrap().len(), 27);
    }

    #[test]
    fn long_config_builds_with_zero_demand_periods() {
        let cfg = BenchmarkConfig::bundled(25).unwrap();
        let all = build_instances(&cfg).unwrap();
        assert_eq!(all.len(), 270);
        let emp2 = all.iter().find(|b| b.pattern == PatternName::Emp2).unwrap();
        assert_eq!(emp2.instance.demands[24].std_dev, 0.0);
    }

    #[test]
    fn config_version_is_checked() {
        let text = DEFAULT_CONFIG_8.replace("\"version\": 1", "\"version\": 2");
        assert!(matches!(
            BenchmarkConfig::parse(&text, Path::new("x")),
            Err(Error::SchemaVersion { found: 2, .. })
        ));
        let text = DEFAULT_CONFIG_8.replace("\"horizon\": 8", "\"horizon\": 9");
        assert!(BenchmarkConfig::parse(&text, Path::new("x")).is_err());
    }

    #[test]
    fn summary_means_are_exact() {
        let cfg = BenchmarkConfig::bundled(8).unwrap();
        let insts = build_instances(&cfg).unwrap();
        let rows: Vec<DetailRow> = insts[..4]
            .iter()
            .enumerate()
            .map(|(i, b)| DetailRow {
                instance_id: b.id.clone(),
                pattern: b.pattern,
                fixed: b.fixed,
                b: b.penalty,
                cv: b.cv,
                method: Method::Bs,
                oracle_cost: Some(1.0),
                mean: Some(1.0),
                stderr: Some(0.0),
                replications: 1,
                seed: 0,
                gap_pct: Some(i as f64),
                policy_secs: Some(1.0),
                oracle_secs: None,
                truncation_rate: None,
                error: None,
            })
            .collect();
        let s = summarize(&rows);
        let overall = s.iter().find(|r| r.dimension == "overall").unwrap();
        assert_eq!(overall.instances, 4);
        assert_eq!(overall.mean_gap_pct, Some(1.5));
        assert_eq!(overall.median_gap_pct, Some(1.5));
        let cv = s.iter().filter(|r| r.dimension == "cv").count();
        assert_eq!(cv, 3);
    }
}
