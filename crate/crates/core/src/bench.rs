//! Benchmark harness: runs planners against an A* reference and aggregates
//! cost and expansion ratios, overall and per hardness bucket.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::ExactCost;
use crate::dataset::{derive_seed, InstanceRecord};
use crate::grid::{GridMap, MovePolicy};
use crate::heuristics::{octile, HeuristicKind, HeuristicMap};
use crate::hmap_io::{self, HmapError, ReadOptions};
use crate::oracle::{cf_map, OracleError, PpmNumerator, TaskOracle};
use crate::search::{solve, SearchConfig, SearchError, Status, TieBreak, Variant};

/// Lower edges of the default hardness buckets; the last bucket is open.
pub const DEFAULT_BUCKET_EDGES: [f64; 4] = [1.05, 1.25, 1.5, 2.0];
pub const QUANTILE_METHOD: &str = "linear interpolation between order statistics";
pub const DEFAULT_WEIGHT: f64 = 2.0;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid planner spec '{spec}': {reason}")]
    Spec { spec: String, reason: String },
    #[error("instance {id}: {reason}")]
    Contract { id: String, reason: String },
    #[error("instance {id}: {source}")]
    Search {
        id: String,
        #[source]
        source: SearchError,
    },
    #[error("instance {id}: {source}")]
    Oracle {
        id: String,
        #[source]
        source: OracleError,
    },
    #[error("instance {id}: heuristic map {path}: {source}")]
    Hmap {
        id: String,
        path: PathBuf,
        #[source]
        source: HmapError,
    },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Where a planner's heuristic map comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapSource {
    /// Ground truth computed on the fly.
    Oracle,
    /// `<hmaps>/<instance>.<kind>.hmap`, e.g. predictor output.
    File,
    /// Every cell 0.
    Zero,
    /// Uniform noise seeded by instance.
    Random,
}

impl MapSource {
    pub fn name(self) -> &'static str {
        match self {
            MapSource::Oracle => "oracle",
            MapSource::File => "file",
            MapSource::Zero => "zero",
            MapSource::Random => "random",
        }
    }
}

impl FromStr for MapSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(MapSource::Oracle),
            "file" => Ok(MapSource::File),
            "zero" => Ok(MapSource::Zero),
            "random" => Ok(MapSource::Random),
            other => Err(format!("unknown map source '{other}'")),
        }
    }
}

/// One planner in a benchmark, parsed from `name[:w][:source]`.
///
/// `w` defaults to 2 for weighted variants; `source` defaults to `oracle`
/// for variants that need a heuristic map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerSpec {
    pub variant: Variant,
    pub weight: f64,
    pub source: Option<MapSource>,
}

impl PlannerSpec {
    pub fn astar() -> Self {
        PlannerSpec {
            variant: Variant::AStar,
            weight: 1.0,
            source: None,
        }
    }

    pub fn new(variant: Variant, weight: f64, source: Option<MapSource>) -> Self {
        let weight = if variant.uses_weight() { weight } else { 1.0 };
        let source = variant.map_kind().map(|_| source.unwrap_or(MapSource::Oracle));
        PlannerSpec {
            variant,
            weight,
            source,
        }
    }

    /// Canonical label, e.g. `focal:2:oracle`.
    pub fn label(&self) -> String {
        let mut s = self.variant.name().to_string();
        if self.variant.uses_weight() {
            s.push_str(&format!(":{}", self.weight));
        }
        if let Some(src) = self.source {
            s.push(':');
            s.push_str(src.name());
        }
        s
    }

    /// Comma-separated list of specs.
    pub fn parse_list(list: &str) -> Result<Vec<PlannerSpec>, BenchError> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for PlannerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PlannerSpec {
    type Err = BenchError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| BenchError::Spec {
            spec: spec.to_string(),
            reason,
        };
        let mut parts = spec.split(':');
        let variant: Variant = parts
            .next()
            .unwrap_or_default()
            .parse()
            .map_err(err)?;
        let mut weight = None;
        let mut source = None;
        for part in parts {
            if let Ok(w) = part.parse::<f64>() {
                if weight.is_some() || source.is_some() {
                    return Err(err("weight must come right after the name".into()));
                }
                if !variant.uses_weight() {
                    return Err(err(format!("{} takes no weight", variant.name())));
                }
                if !(w.is_finite() && w >= 1.0) {
                    return Err(err(format!("weight must be >= 1, got {w}")));
                }
                weight = Some(w);
            } else {
                if source.is_some() {
                    return Err(err("too many fields".into()));
                }
                if variant.map_kind().is_none() {
                    return Err(err(format!("{} takes no heuristic map", variant.name())));
                }
                source = Some(part.parse().map_err(err)?);
            }
        }
        Ok(PlannerSpec::new(variant, weight.unwrap_or(DEFAULT_WEIGHT), source))
    }
}

/// An instance together with its loaded grid.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub record: InstanceRecord,
    pub grid: Arc<GridMap>,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub policy: MovePolicy,
    pub tie_break: TieBreak,
    pub numerator: PpmNumerator,
    /// Directory with per-instance HMAP files for `file` sources.
    pub hmaps: Option<PathBuf>,
    pub raw_pp: bool,
    /// Seeds `random` heuristic maps.
    pub seed: u64,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
    pub expansion_limit: Option<u64>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            policy: MovePolicy::Permissive,
            tie_break: TieBreak::HighG,
            numerator: PpmNumerator::GridOptimal,
            hmaps: None,
            raw_pp: false,
            seed: 0,
            jobs: None,
            expansion_limit: None,
        }
    }
}

/// One planner on one instance. Ratios are percentages and are absent for
/// failed runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub instance_id: String,
    pub planner_id: String,
    pub status: Status,
    pub hardness: f64,
    pub optimal_cardinals: u32,
    pub optimal_diagonals: u32,
    pub optimal_cost: f64,
    pub cost_cardinals: Option<u32>,
    pub cost_diagonals: Option<u32>,
    pub cost: Option<f64>,
    pub cost_ratio: Option<f64>,
    pub expansions: u64,
    pub reference_expansions: u64,
    pub expansions_ratio: Option<f64>,
    pub generated: u64,
    pub reexpansions: u64,
    pub optimal: bool,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerSummary {
    pub planner_id: String,
    pub runs: usize,
    pub failures: usize,
    /// Percentage of all runs, failures included, that matched the optimum exactly.
    pub optimal_found_ratio: f64,
    pub cost_ratio_mean: Option<f64>,
    pub cost_ratio_std: Option<f64>,
    pub expansions_ratio_mean: Option<f64>,
    pub expansions_ratio_std: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub planner_id: String,
    pub lower: f64,
    /// `None` for the open last bucket.
    pub upper: Option<f64>,
    pub count: usize,
    pub cost_ratio: Option<FiveNumber>,
    pub expansions_ratio: Option<FiveNumber>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotData {
    pub quantile_method: String,
    pub edges: Vec<f64>,
    pub rows: Vec<BucketRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub reference: String,
    pub instances: usize,
    /// Standard deviations are population deviations.
    pub std_kind: String,
    pub planners: Vec<PlannerSummary>,
    pub buckets: BoxplotData,
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub rows: Vec<RunMetrics>,
    pub report: AggregateReport,
}

/// Runs every planner on every instance against the A* reference.
///
/// A* is always run; if the planner list lacks it, an A* row is prepended.
/// Rows are ordered by instance, then planner, whatever the thread count.
pub fn evaluate(
    instances: &[BenchInstance],
    planners: &[PlannerSpec],
    options: &BenchOptions,
) -> Result<BenchOutput, BenchError> {
    let mut planners = planners.to_vec();
    if !planners.iter().any(|p| p.variant == Variant::AStar) {
        planners.insert(0, PlannerSpec::astar());
    }
    let run = || -> Result<Vec<Vec<RunMetrics>>, BenchError> {
        instances
            .par_iter()
            .map(|inst| run_instance(inst, &planners, options))
            .collect()
    };
    let per_instance = match options.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| BenchError::Config(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let rows: Vec<RunMetrics> = per_instance.into_iter().flatten().collect();
    let labels: Vec<String> = planners.iter().map(PlannerSpec::label).collect();
    let report = aggregate(&rows, &labels, instances.len(), &DEFAULT_BUCKET_EDGES);
    Ok(BenchOutput { rows, report })
}

fn run_instance(
    inst: &BenchInstance,
    planners: &[PlannerSpec],
    options: &BenchOptions,
) -> Result<Vec<RunMetrics>, BenchError> {
    let rec = &inst.record;
    let grid = inst.grid.as_ref();
    let id = &rec.id;
    let task = rec.task(grid).map_err(|source| BenchError::Search {
        id: id.clone(),
        source,
    })?;
    let search_err = |source| BenchError::Search {
        id: id.clone(),
        source,
    };

    let reference = solve(&task, &configure(SearchConfig::astar(), options)).map_err(search_err)?;
    match reference.cost {
        Some(c) if c == rec.optimal_cost => {}
        other => {
            return Err(BenchError::Contract {
                id: id.clone(),
                reason: format!(
                    "reference A* found {:?}, record says {}",
                    other.map(|c| c.to_string()),
                    rec.optimal_cost
                ),
            })
        }
    }

    let mut oracle: Option<TaskOracle> = None;
    let mut rows = Vec::with_capacity(planners.len());
    for p in planners {
        let map = match (p.variant.map_kind(), p.source) {
            (Some(kind), Some(source)) => {
                Some(heuristic_map(inst, &task, kind, source, options, &mut oracle)?)
            }
            _ => None,
        };
        let config = SearchConfig::new(p.variant, p.weight, map.as_ref()).map_err(search_err)?;
        let result = if p.variant == Variant::AStar {
            reference.clone()
        } else {
            solve(&task, &configure(config, options)).map_err(search_err)?
        };
        rows.push(metrics(rec, &p.label(), &result, reference.expansions));
    }
    Ok(rows)
}

fn configure<'m>(c: SearchConfig<'m>, options: &BenchOptions) -> SearchConfig<'m> {
    let c = c.with_policy(options.policy).with_tie_break(options.tie_break);
    match options.expansion_limit {
        Some(l) => c.with_expansion_limit(l),
        None => c,
    }
}

fn heuristic_map(
    inst: &BenchInstance,
    task: &crate::search::PTask<'_>,
    kind: HeuristicKind,
    source: MapSource,
    options: &BenchOptions,
    oracle: &mut Option<TaskOracle>,
) -> Result<HeuristicMap, BenchError> {
    let grid = inst.grid.as_ref();
    let id = &inst.record.id;
    let (h, w) = (grid.height(), grid.width());
    match source {
        MapSource::Zero => Ok(HeuristicMap::uniform(kind, h, w, 0.0).expect("0 is in range")),
        MapSource::Random => Ok(random_map(grid, task.goal, kind, derive_seed(options.seed, &format!("{id}/{}", kind.tag())))),
        MapSource::File => {
            let dir = options.hmaps.as_ref().ok_or_else(|| {
                BenchError::Config("planner reads heuristic maps from files but no hmap directory was given".into())
            })?;
            let path = dir.join(hmap_io::file_name(id, kind));
            let decoded = hmap_io::load(&path, ReadOptions { raw_pp: options.raw_pp })
                .map_err(|source| BenchError::Hmap {
                    id: id.clone(),
                    path: path.clone(),
                    source,
                })?;
            let map = decoded.map;
            if map.kind() != kind {
                return Err(BenchError::Hmap {
                    id: id.clone(),
                    path,
                    source: HmapError::Format(format!("expected {} map, file holds {}", kind.tag(), map.kind().tag())),
                });
            }
            Ok(map)
        }
        MapSource::Oracle => match kind {
            HeuristicKind::Cf if oracle.is_none() => Ok(cf_map(grid, task.goal, options.policy)),
            _ => {
                if oracle.is_none() {
                    *oracle = Some(
                        TaskOracle::compute(task, options.policy, options.numerator).map_err(|source| {
                            BenchError::Oracle {
                                id: id.clone(),
                                source,
                            }
                        })?,
                    );
                }
                let o = oracle.as_ref().unwrap();
                Ok(match kind {
                    HeuristicKind::Cf => o.cf(grid),
                    HeuristicKind::Pp => o.ppm.clone(),
                    HeuristicKind::Abs => o.hstar(grid),
                })
            }
        },
    }
}

/// Uniform noise of the given kind: CF and PP in `[0, 1]`, ABS in
/// `[0, 2·octile(n, goal)]`.
pub fn random_map(grid: &GridMap, goal: crate::grid::Cell, kind: HeuristicKind, seed: u64) -> HeuristicMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = grid
        .cells()
        .map(|c| {
            let u: f64 = rng.random();
            match kind {
                HeuristicKind::Cf | HeuristicKind::Pp => u,
                HeuristicKind::Abs => 2.0 * u * octile(c, goal).to_f64(),
            }
        })
        .collect();
    HeuristicMap::new_continuous(kind, grid.height(), grid.width(), values).expect("values in range")
}

fn metrics(rec: &InstanceRecord, planner: &str, r: &crate::search::SearchResult, reference: u64) -> RunMetrics {
    let opt = rec.optimal_cost;
    let failed = !r.is_found();
    let cost = r.cost.filter(|_| !failed);
    let optimal = cost == Some(opt);
    let cost_ratio = cost.map(|c| if c == opt { 100.0 } else { cost_ratio(c, opt) });
    let expansions_ratio = (!failed).then(|| 100.0 * r.expansions as f64 / reference as f64);
    RunMetrics {
        instance_id: rec.id.clone(),
        planner_id: planner.to_string(),
        status: r.status,
        hardness: rec.hardness,
        optimal_cardinals: opt.cardinals,
        optimal_diagonals: opt.diagonals,
        optimal_cost: opt.to_f64(),
        cost_cardinals: cost.map(|c| c.cardinals),
        cost_diagonals: cost.map(|c| c.diagonals),
        cost: cost.map(ExactCost::to_f64),
        cost_ratio,
        expansions: r.expansions,
        reference_expansions: reference,
        expansions_ratio,
        generated: r.generated,
        reexpansions: r.reexpansions,
        optimal,
        failed,
    }
}

fn cost_ratio(found: ExactCost, optimal: ExactCost) -> f64 {
    if optimal.is_zero() {
        100.0
    } else {
        100.0 * found.to_f64() / optimal.to_f64()
    }
}

/// Mean and population standard deviation. Values are summed in sorted
/// order so the result does not depend on input order.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    dev.sort_by(f64::total_cmp);
    let var = dev.iter().sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

/// Quantile of sorted data, interpolating linearly between order statistics
/// at position `q·(n-1)`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn five_number(values: &[f64]) -> Option<FiveNumber> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(FiveNumber {
        min: v[0],
        q1: quantile_sorted(&v, 0.25),
        median: quantile_sorted(&v, 0.5),
        q3: quantile_sorted(&v, 0.75),
        max: v[v.len() - 1],
    })
}

pub fn summarize(rows: &[RunMetrics], planner: &str) -> PlannerSummary {
    let mine: Vec<&RunMetrics> = rows.iter().filter(|r| r.planner_id == planner).collect();
    let ok: Vec<&&RunMetrics> = mine.iter().filter(|r| !r.failed).collect();
    let costs: Vec<f64> = ok.iter().filter_map(|r| r.cost_ratio).collect();
    let exps: Vec<f64> = ok.iter().filter_map(|r| r.expansions_ratio).collect();
    let c = mean_std(&costs);
    let e = mean_std(&exps);
    let optimal = mine.iter().filter(|r| r.optimal).count();
    PlannerSummary {
        planner_id: planner.to_string(),
        runs: mine.len(),
        failures: mine.len() - ok.len(),
        optimal_found_ratio: if mine.is_empty() {
            0.0
        } else {
            100.0 * optimal as f64 / mine.len() as f64
        },
        cost_ratio_mean: c.map(|x| x.0),
        cost_ratio_std: c.map(|x| x.1),
        expansions_ratio_mean: e.map(|x| x.0),
        expansions_ratio_std: e.map(|x| x.1),
    }
}

/// Five-number summaries per planner and hardness bucket. Bucket `i` is
/// `[edges[i], edges[i+1])`, the last one is unbounded. Instances below the
/// first edge fall in no bucket. Failed runs are left out.
pub fn bucket_by_hardness(rows: &[RunMetrics], edges: &[f64]) -> BoxplotData {
    let mut planners: Vec<&str> = Vec::new();
    for r in rows {
        if !planners.contains(&r.planner_id.as_str()) {
            planners.push(&r.planner_id);
        }
    }
    let mut out = Vec::new();
    for p in planners {
        for (i, &lower) in edges.iter().enumerate() {
            let upper = edges.get(i + 1).copied();
            let inside: Vec<&RunMetrics> = rows
                .iter()
                .filter(|r| r.planner_id == p && !r.failed)
                .filter(|r| r.hardness >= lower && upper.is_none_or(|u| r.hardness < u))
                .collect();
            let costs: Vec<f64> = inside.iter().filter_map(|r| r.cost_ratio).collect();
            let exps: Vec<f64> = inside.iter().filter_map(|r| r.expansions_ratio).collect();
            out.push(BucketRow {
                planner_id: p.to_string(),
                lower,
                upper,
                count: inside.len(),
                cost_ratio: five_number(&costs),
                expansions_ratio: five_number(&exps),
            });
        }
    }
    BoxplotData {
        quantile_method: QUANTILE_METHOD.to_string(),
        edges: edges.to_vec(),
        rows: out,
    }
}

pub fn aggregate(rows: &[RunMetrics], planners: &[String], instances: usize, edges: &[f64]) -> AggregateReport {
    AggregateReport {
        reference: Variant::AStar.name().to_string(),
        instances,
        std_kind: "population".to_string(),
        planners: planners.iter().map(|p| summarize(rows, p)).collect(),
        buckets: bucket_by_hardness(rows, edges),
    }
}

pub fn write_results_csv<W: Write>(rows: &[RunMetrics], sink: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<RunMetrics>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<Result<Vec<RunMetrics>, _>>()?;
    Ok(rows)
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<(), BenchError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes `results.csv` and `report.json` into `dir`.
pub fn write_outputs(output: &BenchOutput, dir: impl AsRef<Path>) -> Result<(), BenchError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    write_results_csv(&output.rows, BufWriter::new(File::create(dir.join("results.csv"))?))?;
    write_json(&output.report, dir.join("report.json"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{sample_instances, generate_map, MapGenConfig};

    fn instances(n_maps: u64) -> Vec<BenchInstance> {
        let mut out = Vec::new();
        for s in 0..n_maps {
            let grid = Arc::new(
                generate_map(&MapGenConfig {
                    tile_size: 16,
                    seed: s,
                    ..MapGenConfig::default()
                })
                .unwrap(),
            );
            for record in sample_instances(&grid, &format!("m{s}"), 4, 1, MovePolicy::Permissive) {
                out.push(BenchInstance {
                    record,
                    grid: grid.clone(),
                });
            }
        }
        out
    }

    #[test]
    fn spec_parsing() {
        let p: PlannerSpec = "focal".parse().unwrap();
        assert_eq!(p.label(), "focal:2:oracle");
        let p: PlannerSpec = "wastar:1.5".parse().unwrap();
        assert_eq!((p.variant, p.weight, p.source), (Variant::WAStar, 1.5, None));
        let p: PlannerSpec = "focal:4:random".parse().unwrap();
        assert_eq!(p.source, Some(MapSource::Random));
        let p: PlannerSpec = "wastar-cf:file".parse().unwrap();
        assert_eq!(p.label(), "wastar-cf:file");
        for bad in ["dijkstra", "astar:2", "wastar:0.5", "wastar:oracle", "focal:oracle:2", "focal:2:nope", "gbfs-ppm:zero:zero"] {
            assert!(bad.parse::<PlannerSpec>().is_err(), "{bad}");
        }
        assert_eq!(PlannerSpec::parse_list("astar, wastar:2").unwrap().len(), 2);
    }

    #[test]
    fn reference_identity() {
        let inst = instances(2);
        let out = evaluate(&inst, &[PlannerSpec::astar()], &BenchOptions::default()).unwrap();
        let s = &out.report.planners[0];
        assert_eq!(s.planner_id, "astar");
        assert_eq!(s.optimal_found_ratio, 100.0);
        assert_eq!(s.cost_ratio_mean, Some(100.0));
        assert_eq!(s.cost_ratio_std, Some(0.0));
        assert_eq!(s.expansions_ratio_mean, Some(100.0));
        assert_eq!(s.expansions_ratio_std, Some(0.0));
        assert!(out.rows.iter().all(|r| r.expansions_ratio == Some(100.0)));
    }

    #[test]
    fn weighted_rows_and_determinism() {
        let inst = instances(3);
        let planners = PlannerSpec::parse_list("wastar:2,focal:2:random,wastar-cf,gbfs-ppm,astar-hl").unwrap();
        let a = evaluate(&inst, &planners, &BenchOptions::default()).unwrap();
        // A* prepended
        assert_eq!(a.report.planners[0].planner_id, "astar");
        assert_eq!(a.rows.len(), inst.len() * 6);
        let wa = a.report.planners.iter().find(|p| p.planner_id == "wastar:2").unwrap();
        assert!(wa.cost_ratio_mean.unwrap() <= 200.0);
        let cf = a.report.planners.iter().find(|p| p.planner_id == "wastar-cf:oracle").unwrap();
        assert_eq!(cf.optimal_found_ratio, 100.0);
        let hl = a.report.planners.iter().find(|p| p.planner_id == "astar-hl:oracle").unwrap();
        assert_eq!(hl.optimal_found_ratio, 100.0);
        let b = evaluate(
            &inst,
            &planners,
            &BenchOptions {
                jobs: Some(2),
                ..BenchOptions::default()
            },
        )
        .unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn failures_are_counted_not_averaged() {
        let inst = instances(1);
        let out = evaluate(
            &inst,
            &["wastar:2".parse().unwrap()],
            &BenchOptions {
                expansion_limit: Some(3),
                ..BenchOptions::default()
            },
        );
        // the reference itself hits the limit, which breaks the contract
        assert!(matches!(out, Err(BenchError::Contract { .. })));

        let ok = metrics(
            &inst[0].record,
            "x",
            &crate::search::SearchResult {
                status: Status::LimitExceeded,
                path: None,
                cost: None,
                expansions: 5,
                generated: 9,
                reexpansions: 0,
                f_min_final: 0.0,
            },
            10,
        );
        assert!(ok.failed && ok.cost_ratio.is_none() && ok.expansions_ratio.is_none());
        let s = summarize(&[ok], "x");
        assert_eq!((s.runs, s.failures, s.cost_ratio_mean), (1, 1, None));
    }

    #[test]
    fn missing_hmap_dir_is_config_error() {
        let inst = instances(1);
        let out = evaluate(&inst, &["wastar-cf:file".parse().unwrap()], &BenchOptions::default());
        assert!(matches!(out, Err(BenchError::Config(_))));
    }

    // independent sort-based quantiles: rank-based formula written out per case
    #[test]
    fn quantiles() {
        let v = [7.0, 1.0, 3.0, 5.0];
        let f = five_number(&v).unwrap();
        // sorted 1 3 5 7; q1 at pos 0.75 -> 1 + 0.75·2
        assert_eq!(f, FiveNumber { min: 1.0, q1: 2.5, median: 4.0, q3: 5.5, max: 7.0 });
        let c = five_number(&[4.2; 9]).unwrap();
        assert_eq!(c.median, 4.2);
        assert_eq!(five_number(&[2.0]).unwrap().q3, 2.0);
        assert!(five_number(&[]).is_none());
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!((m, s), (5.0, 2.0));
    }

    fn row(planner: &str, hardness: f64, ratio: f64) -> RunMetrics {
        RunMetrics {
            instance_id: format!("{hardness}"),
            planner_id: planner.into(),
            status: Status::Found,
            hardness,
            optimal_cardinals: 1,
            optimal_diagonals: 0,
            optimal_cost: 1.0,
            cost_cardinals: Some(1),
            cost_diagonals: Some(0),
            cost: Some(1.0),
            cost_ratio: Some(ratio),
            expansions: 1,
            reference_expansions: 1,
            expansions_ratio: Some(ratio),
            generated: 1,
            reexpansions: 0,
            optimal: ratio == 100.0,
            failed: false,
        }
    }

    #[test]
    fn buckets() {
        let rows: Vec<_> = (0..5).map(|i| row("p", 1.1, 100.0 + i as f64)).collect();
        let b = bucket_by_hardness(&rows, &DEFAULT_BUCKET_EDGES);
        assert_eq!(b.rows.len(), 4);
        let counts: Vec<usize> = b.rows.iter().map(|r| r.count).collect();
        assert_eq!(counts, [5, 0, 0, 0]);
        assert_eq!(b.rows[0].cost_ratio.unwrap().median, 102.0);
        assert!(b.rows[1].cost_ratio.is_none());
        assert_eq!(b.rows[3].upper, None);
        let edge = bucket_by_hardness(&[row("p", 2.0, 100.0), row("p", 1.0, 100.0)], &DEFAULT_BUCKET_EDGES);
        assert_eq!(edge.rows.iter().map(|r| r.count).collect::<Vec<_>>(), [0, 0, 0, 1]);
    }

    #[test]
    fn aggregation_is_order_independent() {
        let rows: Vec<_> = (0..50).map(|i| row("p", 1.0 + i as f64 / 20.0, 100.0 + (i * 37 % 11) as f64 / 3.0)).collect();
        let mut rev = rows.clone();
        rev.reverse();
        let names = ["p".to_string()];
        assert_eq!(aggregate(&rows, &names, 50, &DEFAULT_BUCKET_EDGES), aggregate(&rev, &names, 50, &DEFAULT_BUCKET_EDGES));
    }

    #[test]
    fn csv_round_trip() {
        let mut rows = vec![row("p", 1.2, 101.0)];
        let mut failed = row("q", 1.3, 0.0);
        failed.failed = true;
        failed.cost = None;
        failed.cost_ratio = None;
        failed.expansions_ratio = None;
        failed.cost_cardinals = None;
        failed.cost_diagonals = None;
        failed.status = Status::NoPath;
        rows.push(failed);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_results_csv(&rows, File::create(&path).unwrap()).unwrap();
        assert_eq!(read_results_csv(&path).unwrap(), rows);
    }
}
