//! Command-line front end. `run` never panics on bad input: it prints a JSON
//! error object on stderr and returns the exit code (1 invalid input,
//! 2 I/O failure, 3 internal contract violation).

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::bench::{self, BenchError, BenchInstance, BenchOptions, PlannerSpec, DEFAULT_BUCKET_EDGES};
use crate::dataset::{self, DatasetError, InstanceRecord, MapGenConfig, ObstacleStyle, Split};
use crate::grid::{Cell, GridError, GridMap, MovePolicy};
use crate::heuristics::{HeuristicKind, HeuristicMap};
use crate::hmap_io::{self, HmapError, ReadOptions};
use crate::oracle::{OracleError, PpmNumerator, TaskOracle};
use crate::search::{solve, PTask, SearchConfig, SearchError, TieBreak, Variant};

pub const SEED_ENV: &str = "GRIDPATH_SEED";

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
    Contract(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Contract(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Io(_) => "io",
            CliError::Contract(_) => "contract",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) | CliError::Contract(m) => m,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "kind": self.kind(), "message": self.message(), "exit_code": self.exit_code() } })
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io(e) => e.into(),
            DatasetError::Grid(e) => e.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<HmapError> for CliError {
    fn from(e: HmapError) -> Self {
        match e {
            HmapError::Io(e) => e.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::ContractViolation(_) => CliError::Contract(e.to_string()),
            OracleError::NoPath { .. } => CliError::Validation(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        let msg = e.to_string();
        match e {
            BenchError::Contract { .. } => CliError::Contract(msg),
            BenchError::Oracle { source, .. } => match CliError::from(source) {
                CliError::Contract(_) => CliError::Contract(msg),
                _ => CliError::Validation(msg),
            },
            BenchError::Hmap { source: HmapError::Io(_), .. } | BenchError::Io(_) | BenchError::Json(_) => {
                CliError::Io(msg)
            }
            BenchError::Csv(ref c) if c.is_io_error() => CliError::Io(msg),
            _ => CliError::Validation(msg),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "gridpath", version, about = "Grid pathfinding workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate procedural maps (MovingAI text format).
    GenMaps(GenMapsArgs),
    /// Sample problem instances on every map of a directory.
    GenInstances(GenInstancesArgs),
    /// Write ground-truth heuristic maps for each instance.
    Oracle(OracleArgs),
    /// Solve one instance.
    Solve(SolveArgs),
    /// Run planners on an instance set and aggregate metrics.
    Bench(BenchArgs),
    /// Hardness-bucketed five-number summaries from a results file.
    BoxplotData(BoxplotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Permissive,
    NoCornerCutting,
}

impl From<PolicyArg> for MovePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Permissive => MovePolicy::Permissive,
            PolicyArg::NoCornerCutting => MovePolicy::NoCornerCutting,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StyleArg {
    Rects,
    Scatter,
    Maze,
}

impl From<StyleArg> for ObstacleStyle {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::Rects => ObstacleStyle::RandomRects,
            StyleArg::Scatter => ObstacleStyle::RandomScatter,
            StyleArg::Maze => ObstacleStyle::Maze,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum EmitArg {
    Cf,
    Ppm,
    Hstar,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NumeratorArg {
    Grid,
    Theta,
}

impl From<NumeratorArg> for PpmNumerator {
    fn from(n: NumeratorArg) -> Self {
        match n {
            NumeratorArg::Grid => PpmNumerator::GridOptimal,
            NumeratorArg::Theta => PpmNumerator::ThetaCost,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgoArg {
    Astar,
    Wastar,
    WastarCf,
    Focal,
    GbfsPpm,
    AstarHl,
}

impl From<AlgoArg> for Variant {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Astar => Variant::AStar,
            AlgoArg::Wastar => Variant::WAStar,
            AlgoArg::WastarCf => Variant::WAStarCf,
            AlgoArg::Focal => Variant::Focal,
            AlgoArg::GbfsPpm => Variant::GbfsPpm,
            AlgoArg::AstarHl => Variant::AStarHl,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TieBreakArg {
    HighG,
    LowG,
}

impl From<TieBreakArg> for TieBreak {
    fn from(t: TieBreakArg) -> Self {
        match t {
            TieBreakArg::HighG => TieBreak::HighG,
            TieBreakArg::LowG => TieBreak::LowG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum SplitArg {
    All,
    Train,
    Val,
    Test,
}

#[derive(Debug, Args)]
pub struct GenMapsArgs {
    #[arg(long, value_enum, default_value = "rects")]
    pub style: StyleArg,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    /// Falls back to $GRIDPATH_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 32)]
    pub tile_size: usize,
    #[arg(long, default_value_t = 2)]
    pub tiles_per_side: usize,
    /// Also write the 15 augmented variants of every map.
    #[arg(long)]
    pub augment: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenInstancesArgs {
    #[arg(long)]
    pub maps: PathBuf,
    #[arg(long, alias = "instances-per-map", default_value_t = dataset::DEFAULT_INSTANCES_PER_MAP)]
    pub per_map: usize,
    /// Applied to the test split.
    #[arg(long, default_value_t = dataset::DEFAULT_MIN_HARDNESS)]
    pub min_hardness: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "permissive")]
    pub policy: PolicyArg,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub instances: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    pub emit: EmitArg,
    #[arg(long, value_enum, default_value = "grid")]
    pub ppm_numerator: NumeratorArg,
    #[arg(long, value_enum, default_value = "permissive")]
    pub policy: PolicyArg,
    #[arg(long, value_enum, default_value = "all")]
    pub split: SplitArg,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file (JSON lines). Use with --instance.
    #[arg(long, requires = "instance")]
    pub instances: Option<PathBuf>,
    #[arg(long)]
    pub instance: Option<String>,
    /// Map file for an ad-hoc task. Use with --start and --goal.
    #[arg(long, conflicts_with = "instances", requires_all = ["start", "goal"])]
    pub map: Option<PathBuf>,
    /// `ROW,COL`
    #[arg(long, value_parser = parse_cell)]
    pub start: Option<Cell>,
    #[arg(long, value_parser = parse_cell)]
    pub goal: Option<Cell>,
    #[arg(long, value_enum, default_value = "astar")]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = bench::DEFAULT_WEIGHT)]
    pub w: f64,
    /// Heuristic map for map-guided algorithms.
    #[arg(long, conflicts_with = "oracle")]
    pub hmap: Option<PathBuf>,
    /// Compute the ground-truth map instead of reading --hmap.
    #[arg(long)]
    pub oracle: bool,
    /// Keep continuous PP values from the file.
    #[arg(long)]
    pub raw_pp: bool,
    #[arg(long, value_enum, default_value = "high-g")]
    pub tie_break: TieBreakArg,
    #[arg(long, value_enum, default_value = "permissive")]
    pub policy: PolicyArg,
    #[arg(long)]
    pub expansion_limit: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub instances: PathBuf,
    /// Comma-separated `name[:w][:source]`, e.g. `astar,wastar:2,focal:2:oracle,wastar-cf:file`.
    /// Names: astar, wastar, wastar-cf, focal, gbfs-ppm, astar-hl. w defaults to 2.
    /// Sources: oracle (default), file (from --hmaps), zero, random.
    #[arg(long, default_value = "astar,wastar:2")]
    pub planners: String,
    #[arg(long)]
    pub hmaps: Option<PathBuf>,
    #[arg(long)]
    pub raw_pp: bool,
    #[arg(long, value_enum, default_value = "all")]
    pub split: SplitArg,
    /// Use only the first N selected instances.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, value_enum, default_value = "grid")]
    pub ppm_numerator: NumeratorArg,
    #[arg(long, value_enum, default_value = "high-g")]
    pub tie_break: TieBreakArg,
    #[arg(long, value_enum, default_value = "permissive")]
    pub policy: PolicyArg,
    /// Seeds `random` heuristic maps.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoxplotArgs {
    #[arg(long)]
    pub results: PathBuf,
    /// Lower bucket edges; the last bucket is open-ended.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BUCKET_EDGES.to_vec())]
    pub buckets: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_cell(s: &str) -> Result<Cell, String> {
    let (r, c) = s.split_once(',').ok_or("expected ROW,COL")?;
    let r = r.trim().parse().map_err(|e| format!("row: {e}"))?;
    let c = c.trim().parse().map_err(|e| format!("col: {e}"))?;
    Ok(Cell::new(r, c))
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            return report(&CliError::Validation(e.render().to_string().trim().to_string()));
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> i32 {
    eprintln!("{}", e.to_json());
    e.exit_code()
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::GenMaps(a) => gen_maps(a),
        Command::GenInstances(a) => gen_instances(a),
        Command::Oracle(a) => oracle(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::BoxplotData(a) => boxplot(a),
    }
}

/// Explicit flag, else `$GRIDPATH_SEED`, else 0.
pub fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn validate_jobs(jobs: Option<usize>) -> CliResult<()> {
    if jobs == Some(0) {
        return Err(CliError::Validation("--jobs must be at least 1".into()));
    }
    Ok(())
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    validate_jobs(jobs)?;
    match jobs {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(f)),
        None => Ok(f()),
    }
}

fn print_json(value: &serde_json::Value) -> CliResult<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn gen_maps(a: GenMapsArgs) -> CliResult<()> {
    let seed = resolve_seed(a.seed)?;
    let base = MapGenConfig {
        tile_size: a.tile_size,
        tiles_per_side: a.tiles_per_side,
        style: a.style.into(),
        density: a.density,
        seed,
    };
    base.validate()?;
    if a.augment && !a.tiles_per_side.is_multiple_of(2) {
        return Err(CliError::Validation("--augment needs an even --tiles-per-side".into()));
    }
    fs::create_dir_all(&a.out)?;
    let mut written = 0;
    for i in 0..a.count {
        let cfg = MapGenConfig {
            seed: dataset::derive_seed(seed, &format!("map/{i}")),
            ..base
        };
        let map = dataset::generate_map(&cfg)?;
        let base_id = format!("{}-s{seed}-{i:05}", base.style);
        let variants = if a.augment {
            dataset::augment(&map)?
        } else {
            vec![map]
        };
        for (v, m) in variants.iter().enumerate() {
            let path = a.out.join(format!("{}.map", dataset::augmented_map_id(&base_id, v)));
            fs::write(path, m.to_movingai())?;
            written += 1;
        }
    }
    let meta = json!({
        "generator": "procedural approximation of hand-made benchmark tiles",
        "style": base.style,
        "density": base.density,
        "seed": seed,
        "tile_size": base.tile_size,
        "tiles_per_side": base.tiles_per_side,
        "base_maps": a.count,
        "augmented": a.augment,
        "files": written,
    });
    fs::write(a.out.join("meta.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    print_json(&meta)
}

/// `*.map` files in a directory, sorted by name.
fn map_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "map"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Validation(format!("no .map files in {}", dir.display())));
    }
    Ok(files)
}

fn gen_instances(a: GenInstancesArgs) -> CliResult<()> {
    let seed = resolve_seed(a.seed)?;
    if a.per_map == 0 {
        return Err(CliError::Validation("--per-map must be at least 1".into()));
    }
    if !a.min_hardness.is_finite() {
        return Err(CliError::Validation("--min-hardness must be finite".into()));
    }
    let files = map_files(&a.maps)?;
    let policy: MovePolicy = a.policy.into();
    let per_map = with_jobs(a.jobs, || {
        files
            .par_iter()
            .map(|path| -> CliResult<Vec<InstanceRecord>> {
                let grid = GridMap::load(path)?;
                let id = path.file_stem().unwrap_or_default().to_string_lossy().to_string();
                let mut recs = dataset::sample_instances(&grid, &id, a.per_map, seed, policy);
                for r in &mut recs {
                    r.map_file = Some(path.display().to_string());
                }
                Ok(recs)
            })
            .collect::<CliResult<Vec<_>>>()
    })??;
    let sampled: usize = per_map.iter().map(Vec::len).sum();
    let (splits, rejected) = dataset::build_splits(per_map.into_iter().flatten().collect(), seed, a.min_hardness);
    let summary = json!({
        "maps": files.len(),
        "sampled": sampled,
        "train": splits.train.len(),
        "val": splits.val.len(),
        "test": splits.test.len(),
        "test_rejected_by_hardness": rejected,
        "min_hardness": a.min_hardness,
        "seed": seed,
    });
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    dataset::save_jsonl(&splits.into_records(), &a.out)?;
    print_json(&summary)
}

/// Loads instance records and their grids. Map paths are tried as written,
/// then relative to the instance file's directory.
struct InstanceSet {
    items: Vec<BenchInstance>,
}

impl InstanceSet {
    fn load(path: &Path, split: SplitArg) -> CliResult<Self> {
        let records = dataset::load_jsonl(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut cache: HashMap<PathBuf, Arc<GridMap>> = HashMap::new();
        let mut items = Vec::with_capacity(records.len());
        for r in records {
            let keep = match split {
                SplitArg::All => true,
                SplitArg::Train => r.split == Some(Split::Train),
                SplitArg::Val => r.split == Some(Split::Val),
                SplitArg::Test => r.split == Some(Split::Test),
            };
            if !keep {
                continue;
            }
            let file = r
                .map_file
                .as_ref()
                .ok_or_else(|| CliError::Validation(format!("instance {} has no map_file", r.id)))?;
            let mut p = PathBuf::from(file);
            if !p.exists() && p.is_relative() {
                p = base.join(file);
            }
            let grid = match cache.get(&p) {
                Some(g) => g.clone(),
                None => {
                    let g = Arc::new(GridMap::load(&p).map_err(|e| match e {
                        GridError::Io(io) => CliError::Io(format!("{}: {io}", p.display())),
                        other => CliError::Validation(format!("{}: {other}", p.display())),
                    })?);
                    cache.insert(p, g.clone());
                    g
                }
            };
            items.push(BenchInstance { record: r, grid });
        }
        Ok(InstanceSet { items })
    }

    fn find(&self, id: &str) -> CliResult<&BenchInstance> {
        self.items
            .iter()
            .find(|i| i.record.id == id)
            .ok_or_else(|| CliError::Validation(format!("no instance with id {id:?}")))
    }
}

fn oracle(a: OracleArgs) -> CliResult<()> {
    let set = InstanceSet::load(&a.instances, a.split)?;
    fs::create_dir_all(&a.out)?;
    let policy: MovePolicy = a.policy.into();
    let numerator: PpmNumerator = a.ppm_numerator.into();
    let emit = a.emit;
    let out = &a.out;
    let counts = with_jobs(a.jobs, || {
        set.items
            .par_iter()
            .map(|inst| -> CliResult<usize> {
                let grid = inst.grid.as_ref();
                let task = inst.record.task(grid)?;
                let mut maps: Vec<HeuristicMap> = Vec::new();
                if matches!(emit, EmitArg::Ppm | EmitArg::All) {
                    let o = TaskOracle::compute(&task, policy, numerator)?;
                    if emit == EmitArg::All {
                        maps.push(o.cf(grid));
                        maps.push(o.hstar(grid));
                    }
                    maps.push(o.ppm);
                } else if emit == EmitArg::Cf {
                    maps.push(crate::oracle::cf_map(grid, task.goal, policy));
                } else {
                    maps.push(crate::oracle::hstar_map(grid, task.goal, policy));
                }
                for m in &maps {
                    hmap_io::save(m, out.join(hmap_io::file_name(&inst.record.id, m.kind())))?;
                }
                Ok(maps.len())
            })
            .collect::<CliResult<Vec<usize>>>()
    })??;
    print_json(&json!({
        "instances": set.items.len(),
        "files": counts.iter().sum::<usize>(),
        "out": out.display().to_string(),
    }))
}

fn solve_cmd(a: SolveArgs) -> CliResult<()> {
    let variant: Variant = a.algo.into();
    let policy: MovePolicy = a.policy.into();
    let set;
    let adhoc;
    let (id, grid, start, goal, optimal) = match (&a.instances, &a.map) {
        (Some(path), _) => {
            set = InstanceSet::load(path, SplitArg::All)?;
            let inst = set.find(a.instance.as_deref().unwrap_or_default())?;
            let r = &inst.record;
            (Some(r.id.clone()), inst.grid.as_ref(), r.start, r.goal, Some(r.optimal_cost))
        }
        (None, Some(map)) => {
            adhoc = GridMap::load(map)?;
            (None, &adhoc, a.start.unwrap(), a.goal.unwrap(), None)
        }
        (None, None) => {
            return Err(CliError::Validation(
                "give --instances FILE --instance ID, or --map FILE --start R,C --goal R,C".into(),
            ))
        }
    };
    let task = PTask::new(grid, start, goal)?;
    let map = match variant.map_kind() {
        None => {
            if a.hmap.is_some() || a.oracle {
                return Err(CliError::Validation(format!("{} takes no heuristic map", variant.name())));
            }
            None
        }
        Some(kind) => Some(if a.oracle {
            oracle_map(&task, kind, policy)?
        } else {
            let path = a
                .hmap
                .as_ref()
                .ok_or_else(|| CliError::Validation(format!("{} needs --hmap FILE or --oracle", variant.name())))?;
            hmap_io::load(path, ReadOptions { raw_pp: a.raw_pp })?.map
        }),
    };
    let weight = if variant.uses_weight() { a.w } else { 1.0 };
    let mut config = SearchConfig::new(variant, weight, map.as_ref())?
        .with_policy(policy)
        .with_tie_break(a.tie_break.into());
    if let Some(l) = a.expansion_limit {
        config = config.with_expansion_limit(l);
    }
    let result = solve(&task, &config)?;
    if a.json {
        let mut v = json!({
            "instance": id,
            "algo": variant.name(),
            "w": weight,
            "start": start,
            "goal": goal,
        });
        let obj = v.as_object_mut().unwrap();
        for (k, val) in serde_json::to_value(&result)?.as_object().unwrap() {
            obj.insert(k.clone(), val.clone());
        }
        if let Some(opt) = optimal {
            obj.insert("optimal_cost".into(), serde_json::to_value(opt)?);
            obj.insert("optimal".into(), json!(result.cost == Some(opt)));
        }
        print_json(&v)
    } else {
        let mut out = io::stdout().lock();
        writeln!(out, "status      {:?}", result.status)?;
        if let Some(c) = result.cost {
            writeln!(out, "cost        {c}")?;
        }
        if let Some(opt) = optimal {
            writeln!(out, "optimal     {opt}")?;
        }
        writeln!(out, "expansions  {}", result.expansions)?;
        writeln!(out, "generated   {}", result.generated)?;
        if let Some(p) = &result.path {
            writeln!(out, "path length {}", p.len())?;
        }
        Ok(())
    }
}

fn oracle_map(task: &PTask<'_>, kind: HeuristicKind, policy: MovePolicy) -> CliResult<HeuristicMap> {
    Ok(match kind {
        HeuristicKind::Cf => crate::oracle::cf_map(task.grid, task.goal, policy),
        HeuristicKind::Abs => crate::oracle::hstar_map(task.grid, task.goal, policy),
        HeuristicKind::Pp => TaskOracle::compute(task, policy, PpmNumerator::GridOptimal)?.ppm,
    })
}

fn bench_cmd(a: BenchArgs) -> CliResult<()> {
    validate_jobs(a.jobs)?;
    let planners = PlannerSpec::parse_list(&a.planners)?;
    if planners.is_empty() {
        return Err(CliError::Validation("--planners is empty".into()));
    }
    if planners.iter().any(|p| p.source == Some(bench::MapSource::File)) && a.hmaps.is_none() {
        return Err(CliError::Validation("planners with a file source need --hmaps DIR".into()));
    }
    let mut set = InstanceSet::load(&a.instances, a.split)?;
    if let Some(n) = a.limit {
        set.items.truncate(n);
    }
    if set.items.is_empty() {
        return Err(CliError::Validation("no instances selected".into()));
    }
    let options = BenchOptions {
        policy: a.policy.into(),
        tie_break: a.tie_break.into(),
        numerator: a.ppm_numerator.into(),
        hmaps: a.hmaps.clone(),
        raw_pp: a.raw_pp,
        seed: resolve_seed(a.seed)?,
        jobs: a.jobs,
        expansion_limit: None,
    };
    let output = bench::evaluate(&set.items, &planners, &options)?;
    bench::write_outputs(&output, &a.out)?;
    print_json(&serde_json::to_value(&output.report.planners)?)
}

fn boxplot(a: BoxplotArgs) -> CliResult<()> {
    if a.buckets.is_empty() || a.buckets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Validation("--buckets must be strictly increasing".into()));
    }
    let rows = bench::read_results_csv(&a.results)?;
    if rows.is_empty() {
        return Err(CliError::Validation(format!("{} has no rows", a.results.display())));
    }
    let data = bench::bucket_by_hardness(&rows, &a.buckets);
    bench::write_json(&data, &a.out)?;
    print_json(&json!({ "rows": data.rows.len(), "out": a.out.display().to_string() }))
}
