//! Benchmark harness: the brute-force oracle, experiment sweeps and their
//! CSV serialization.
//!
//! The CSV schema is fixed:
//!
//! ```text
//! density,instance,strategy,policy,width,optimum,wall_time_s,nodes,cand_evals,relaxed_dds
//! ```
//!
//! Data rows carry integer counters; per-density summary rows use the
//! instance id `mean` and carry arithmetic means. Rows parse back exactly
//! (floats are written in shortest round-trip form).

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::bitset::VertexSet;
use crate::bnb::{solve, SolveResult};
use crate::clustering::PolicyKind;
use crate::graph::{generate_instance, parse_graph, serialize_graph, WeightedGraph};
use crate::strategies::{Strategy, StrategyConfig};

/// Exact optimum by recursive enumeration over available-vertex sets,
/// independent of the diagram machinery. Branches on the vertex of maximum
/// induced degree; once the remainder is edgeless it sums the weights.
pub fn brute_force(g: &WeightedGraph) -> Result<u64, OracleError> {
    brute_force_subset(g, &g.vertices())
}

/// [`brute_force`] restricted to the subgraph induced by `avail`.
pub fn brute_force_subset(g: &WeightedGraph, avail: &VertexSet) -> Result<u64, OracleError> {
    let size = avail.count();
    if size > 30 {
        return Err(OracleError::TooLarge { n: size });
    }
    Ok(enumerate(g, avail.clone()))
}

fn enumerate(g: &WeightedGraph, avail: VertexSet) -> u64 {
    let mut pick = None;
    for v in avail.iter() {
        let deg = g.neighbors(v).intersection_count(&avail);
        if pick.is_none_or(|(_, best)| deg > best) {
            pick = Some((v, deg));
        }
    }
    let Some((v, deg)) = pick else { return 0 };
    if deg == 0 {
        // No edges left: take everything.
        return avail.iter().map(|u| g.weight(u)).sum();
    }
    let mut without = avail.clone();
    without.remove(v);
    let exclude = enumerate(g, without);
    let mut with = avail;
    with.subtract(g.neighbors(v));
    with.remove(v);
    let include = g.weight(v) + enumerate(g, with);
    exclude.max(include)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for enumeration (n = {n} > 30)")]
    TooLarge { n: usize },
}

/// One solved (instance, configuration) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub density: f64,
    pub instance: String,
    pub strategy: Strategy,
    /// `None` for the baseline, which has no cluster policy.
    pub policy: Option<PolicyKind>,
    pub width: usize,
    pub optimum: u64,
    pub wall_time_s: f64,
    pub nodes: u64,
    pub cand_evals: u64,
    pub relaxed_dds: u64,
}

/// Per-density aggregate over the instances of one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub density: f64,
    pub strategy: Strategy,
    pub policy: Option<PolicyKind>,
    pub width: usize,
    pub mean_optimum: f64,
    pub mean_wall_time_s: f64,
    pub mean_nodes: f64,
    pub mean_cand_evals: f64,
    pub mean_relaxed_dds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CsvRow {
    Data(ExperimentRow),
    Summary(SummaryRow),
}

pub const CSV_HEADER: &str =
    "density,instance,strategy,policy,width,optimum,wall_time_s,nodes,cand_evals,relaxed_dds";

/// Instance id used by summary rows.
pub const SUMMARY_INSTANCE: &str = "mean";

fn policy_token(policy: &Option<PolicyKind>) -> String {
    match policy {
        Some(p) => p.to_string(),
        None => "-".to_string(),
    }
}

fn parse_policy(token: &str) -> Result<Option<PolicyKind>, CsvError> {
    if token == "-" {
        Ok(None)
    } else {
        PolicyKind::from_str(token)
            .map(Some)
            .map_err(|reason| CsvError::BadField {
                field: "policy",
                reason,
            })
    }
}

impl CsvRow {
    pub fn to_line(&self) -> String {
        let mut out = String::new();
        match self {
            CsvRow::Data(r) => {
                write!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.density,
                    r.instance,
                    r.strategy,
                    policy_token(&r.policy),
                    r.width,
                    r.optimum,
                    r.wall_time_s,
                    r.nodes,
                    r.cand_evals,
                    r.relaxed_dds
                )
                .unwrap();
            }
            CsvRow::Summary(r) => {
                write!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.density,
                    SUMMARY_INSTANCE,
                    r.strategy,
                    policy_token(&r.policy),
                    r.width,
                    r.mean_optimum,
                    r.mean_wall_time_s,
                    r.mean_nodes,
                    r.mean_cand_evals,
                    r.mean_relaxed_dds
                )
                .unwrap();
            }
        }
        out
    }

    pub fn parse(line: &str) -> Result<CsvRow, CsvError> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(CsvError::FieldCount { found: fields.len() });
        }
        fn num<T: FromStr>(field: &'static str, token: &str) -> Result<T, CsvError> {
            token.parse().map_err(|_| CsvError::BadField {
                field,
                reason: format!("cannot parse `{token}`"),
            })
        }
        let density = num("density", fields[0])?;
        let strategy = Strategy::from_str(fields[2]).map_err(|reason| CsvError::BadField {
            field: "strategy",
            reason,
        })?;
        let policy = parse_policy(fields[3])?;
        let width = num("width", fields[4])?;
        if fields[1] == SUMMARY_INSTANCE {
            Ok(CsvRow::Summary(SummaryRow {
                density,
                strategy,
                policy,
                width,
                mean_optimum: num("optimum", fields[5])?,
                mean_wall_time_s: num("wall_time_s", fields[6])?,
                mean_nodes: num("nodes", fields[7])?,
                mean_cand_evals: num("cand_evals", fields[8])?,
                mean_relaxed_dds: num("relaxed_dds", fields[9])?,
            }))
        } else {
            Ok(CsvRow::Data(ExperimentRow {
                density,
                instance: fields[1].to_string(),
                strategy,
                policy,
                width,
                optimum: num("optimum", fields[5])?,
                wall_time_s: num("wall_time_s", fields[6])?,
                nodes: num("nodes", fields[7])?,
                cand_evals: num("cand_evals", fields[8])?,
                relaxed_dds: num("relaxed_dds", fields[9])?,
            }))
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CsvError {
    #[error("expected 10 comma-separated fields, found {found}")]
    FieldCount { found: usize },
    #[error("bad {field} field: {reason}")]
    BadField { field: &'static str, reason: String },
}

/// A strategy/policy pair as listed on the sweep command line, e.g.
/// `baseline`, `cbc:fixed`, `pas-vo:adaptive`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConfigSpec {
    pub strategy: Strategy,
    pub policy: PolicyKind,
}

impl ConfigSpec {
    /// All seven strategy × policy combinations.
    pub fn all() -> Vec<ConfigSpec> {
        let mut out = vec![ConfigSpec {
            strategy: Strategy::Baseline,
            policy: PolicyKind::Fixed,
        }];
        for strategy in [Strategy::Cbc, Strategy::Pas, Strategy::PasVo] {
            for policy in [PolicyKind::Fixed, PolicyKind::Adaptive] {
                out.push(ConfigSpec { strategy, policy });
            }
        }
        out
    }

    fn row_policy(&self) -> Option<PolicyKind> {
        match self.strategy {
            Strategy::Baseline => None,
            _ => Some(self.policy),
        }
    }
}

impl FromStr for ConfigSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None => Ok(ConfigSpec {
                strategy: s.parse()?,
                policy: PolicyKind::Fixed,
            }),
            Some((strategy, policy)) => Ok(ConfigSpec {
                strategy: strategy.parse()?,
                policy: policy.parse()?,
            }),
        }
    }
}

impl std::fmt::Display for ConfigSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.strategy {
            Strategy::Baseline => write!(f, "baseline"),
            s => write!(f, "{}:{}", s, self.policy),
        }
    }
}

/// Parameters of one sweep invocation.
#[derive(Clone, Debug)]
pub struct SweepParams {
    pub densities: Vec<f64>,
    pub n: usize,
    pub instances_per_density: usize,
    pub configs: Vec<ConfigSpec>,
    pub width: usize,
    pub seed: u64,
    /// Instance files are cached here on first generation and reused after.
    pub cache_dir: Option<PathBuf>,
    /// Worker threads for the solves; 1 keeps everything sequential.
    pub jobs: usize,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: crate::graph::ParseError,
    },
    #[error("writing results: {0}")]
    Sink(#[from] std::io::Error),
}

/// Runs the sweep: every instance under every configuration, one data row
/// per solve, then one summary row per (density, configuration). Rows are
/// written to `sink` as they are emitted and returned for programmatic use.
pub fn run_sweep(params: &SweepParams, sink: &mut dyn Write) -> Result<Vec<CsvRow>, SweepError> {
    let instances = collect_instances(params)?;
    let solves = run_solves(params, &instances);

    let mut rows: Vec<CsvRow> = Vec::new();
    writeln!(sink, "{CSV_HEADER}")?;
    let mut solve_iter = solves.iter();
    for (di, &density) in params.densities.iter().enumerate() {
        for i in 0..params.instances_per_density {
            let (name, _) = &instances[di * params.instances_per_density + i];
            for spec in &params.configs {
                let result = solve_iter.next().expect("one result per task");
                let row = CsvRow::Data(ExperimentRow {
                    density,
                    instance: name.clone(),
                    strategy: spec.strategy,
                    policy: spec.row_policy(),
                    width: params.width,
                    optimum: result.optimum,
                    wall_time_s: result.wall_time.as_secs_f64(),
                    nodes: result.nodes_processed,
                    cand_evals: result.candidate_evaluations,
                    relaxed_dds: result.relaxed_compilations,
                });
                writeln!(sink, "{}", row.to_line())?;
                rows.push(row);
            }
        }
    }

    for &density in &params.densities {
        for spec in &params.configs {
            let group: Vec<&ExperimentRow> = rows
                .iter()
                .filter_map(|r| match r {
                    CsvRow::Data(d)
                        if d.density == density
                            && d.strategy == spec.strategy
                            && d.policy == spec.row_policy() =>
                    {
                        Some(d)
                    }
                    _ => None,
                })
                .collect();
            let count = group.len() as f64;
            let mean = |f: &dyn Fn(&ExperimentRow) -> f64| {
                group.iter().map(|r| f(r)).sum::<f64>() / count
            };
            let row = CsvRow::Summary(SummaryRow {
                density,
                strategy: spec.strategy,
                policy: spec.row_policy(),
                width: params.width,
                mean_optimum: mean(&|r| r.optimum as f64),
                mean_wall_time_s: mean(&|r| r.wall_time_s),
                mean_nodes: mean(&|r| r.nodes as f64),
                mean_cand_evals: mean(&|r| r.cand_evals as f64),
                mean_relaxed_dds: mean(&|r| r.relaxed_dds as f64),
            });
            writeln!(sink, "{}", row.to_line())?;
            rows.push(row);
        }
    }
    sink.flush()?;
    Ok(rows)
}

/// Generates (or loads from the cache directory) every instance of the sweep.
fn collect_instances(
    params: &SweepParams,
) -> Result<Vec<(String, WeightedGraph)>, SweepError> {
    let mut instances = Vec::new();
    for (di, &density) in params.densities.iter().enumerate() {
        for i in 0..params.instances_per_density {
            let name = format!("n{}-d{}-i{:02}", params.n, density, i);
            let seed = params
                .seed
                .wrapping_add((di * params.instances_per_density + i) as u64);
            let g = match &params.cache_dir {
                Some(dir) => load_or_generate(dir, &name, params.n, density, seed)?,
                None => generate_instance(params.n, density, seed),
            };
            instances.push((name, g));
        }
    }
    Ok(instances)
}

fn load_or_generate(
    dir: &Path,
    name: &str,
    n: usize,
    density: f64,
    seed: u64,
) -> Result<WeightedGraph, SweepError> {
    let path = dir.join(format!("{name}.graph"));
    if path.exists() {
        let text = fs::read_to_string(&path).map_err(|source| SweepError::Io {
            path: path.clone(),
            source,
        })?;
        parse_graph(&text).map_err(|source| SweepError::Parse { path, source })
    } else {
        let g = generate_instance(n, density, seed);
        fs::create_dir_all(dir).map_err(|source| SweepError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        fs::write(&path, serialize_graph(&g)).map_err(|source| SweepError::Io { path, source })?;
        Ok(g)
    }
}

/// Solves every (instance, config) task, optionally fanning out over a rayon
/// pool. Results come back in task order either way.
fn run_solves(params: &SweepParams, instances: &[(String, WeightedGraph)]) -> Vec<SolveResult> {
    let tasks: Vec<(&WeightedGraph, StrategyConfig)> = instances
        .iter()
        .flat_map(|(_, g)| {
            params.configs.iter().map(move |spec| {
                (
                    g,
                    StrategyConfig::new(spec.strategy, spec.policy, params.width, params.seed),
                )
            })
        })
        .collect();
    if params.jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(params.jobs)
            .build()
            .expect("rayon pool");
        pool.install(|| tasks.par_iter().map(|(g, cfg)| solve(g, cfg)).collect())
    } else {
        tasks.iter().map(|(g, cfg)| solve(g, cfg)).collect()
    }
}
