//! Procedural maps, augmentation, instance sampling, hardness filtering and
//! train/val/test splitting.
//!
//! Maps are built from `tiles_per_side²` independently generated square
//! tiles. The obstacle styles are rough stand-ins for hand-made benchmark
//! tiles (rooms, scattered blocks, bugtrap-like mazes), not a reproduction
//! of any specific map set.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::costs::ExactCost;
use crate::grid::{Cell, GridError, GridMap, MovePolicy};
use crate::heuristics::octile;
use crate::oracle::dijkstra_map;
use crate::search::{PTask, SearchError};

pub const DEFAULT_MIN_HARDNESS: f64 = 1.05;
pub const DEFAULT_INSTANCES_PER_MAP: usize = 10;
/// Augmented copies produced per base map.
pub const AUGMENTATIONS: usize = 16;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("map of {height}x{width} cannot be split into square quadrants")]
    Dimension { height: usize, width: usize },
    #[error("{path}:{line}: {message}")]
    Record {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Hashes a seed and a label into a new 64-bit seed. Stable across platforms.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstacleStyle {
    RandomRects,
    RandomScatter,
    Maze,
}

impl ObstacleStyle {
    pub fn name(self) -> &'static str {
        match self {
            ObstacleStyle::RandomRects => "rects",
            ObstacleStyle::RandomScatter => "scatter",
            ObstacleStyle::Maze => "maze",
        }
    }
}

impl fmt::Display for ObstacleStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObstacleStyle {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rects" | "random-rects" => Ok(ObstacleStyle::RandomRects),
            "scatter" | "random-scatter" => Ok(ObstacleStyle::RandomScatter),
            "maze" => Ok(ObstacleStyle::Maze),
            other => Err(DatasetError::Config(format!("unknown obstacle style '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapGenConfig {
    pub tile_size: usize,
    pub tiles_per_side: usize,
    pub style: ObstacleStyle,
    /// Nominal obstacle density in `[0, 1)`. For mazes it is the chance that
    /// a wall segment not needed for connectivity stays closed.
    pub density: f64,
    pub seed: u64,
}

impl Default for MapGenConfig {
    fn default() -> Self {
        MapGenConfig {
            tile_size: 32,
            tiles_per_side: 2,
            style: ObstacleStyle::RandomRects,
            density: 0.3,
            seed: 0,
        }
    }
}

impl MapGenConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.tile_size == 0 || self.tiles_per_side == 0 {
            return Err(DatasetError::Config("tile size and tile count must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.density) {
            return Err(DatasetError::Config(format!(
                "density must be in [0, 1), got {}",
                self.density
            )));
        }
        Ok(())
    }

    pub fn side(&self) -> usize {
        self.tile_size * self.tiles_per_side
    }
}

/// Composes `tiles_per_side²` tiles, each drawn from its own derived seed.
pub fn generate_map(config: &MapGenConfig) -> Result<GridMap, DatasetError> {
    config.validate()?;
    let t = config.tile_size;
    let side = config.side();
    let mut blocked = vec![false; side * side];
    for ti in 0..config.tiles_per_side {
        for tj in 0..config.tiles_per_side {
            let seed = derive_seed(config.seed, &format!("tile/{ti}/{tj}"));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tile = match config.style {
                ObstacleStyle::RandomRects => rect_tile(t, config.density, &mut rng),
                ObstacleStyle::RandomScatter => scatter_tile(t, config.density, &mut rng),
                ObstacleStyle::Maze => maze_tile(t, config.density, &mut rng),
            };
            for r in 0..t {
                for c in 0..t {
                    blocked[(ti * t + r) * side + tj * t + c] = tile[r * t + c];
                }
            }
        }
    }
    Ok(GridMap::new(side, side, blocked)?)
}

fn scatter_tile(t: usize, density: f64, rng: &mut ChaCha8Rng) -> Vec<bool> {
    (0..t * t).map(|_| rng.random_bool(density)).collect()
}

// Rectangles are dropped until their summed area reaches the nominal
// density; overlaps make the real fraction lower.
fn rect_tile(t: usize, density: f64, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut tile = vec![false; t * t];
    let target = density * (t * t) as f64;
    let max_side = (t / 4).max(1);
    let mut placed = 0.0;
    while placed < target {
        let h = rng.random_range(1..=max_side);
        let w = rng.random_range(1..=max_side);
        let r0 = rng.random_range(0..=t - h);
        let c0 = rng.random_range(0..=t - w);
        for r in r0..r0 + h {
            for c in c0..c0 + w {
                tile[r * t + c] = true;
            }
        }
        placed += (h * w) as f64;
    }
    tile
}

const MAZE_PITCH: usize = 4;

// Rooms sit on a lattice of pitch 4 inside a free border strip. A random
// spanning tree over the rooms (plus one exit to the border) is carved
// open; every other wall segment stays closed with probability `density`.
// Tiles smaller than 12 cells have no room for a lattice and stay free.
fn maze_tile(t: usize, density: f64, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut tile = vec![false; t * t];
    let p = MAZE_PITCH;
    if t < 3 * p || density == 0.0 {
        return tile;
    }
    // lattice lines at p, 2p, .., m·p; rooms (a, b) for a, b in 0..n
    let m = (t - p) / p;
    let n = m - 1;
    // wall ids: horizontal segment (a, b) on line a (0..=n) spanning room column b;
    // vertical segment (a, b) on line b (0..=n) spanning room row a
    let h_id = |a: usize, b: usize| a * n + b;
    let v_id = |a: usize, b: usize| (n + 1) * n + a * (n + 1) + b;
    let mut open = vec![false; 2 * (n + 1) * n];

    let mut seen = vec![false; n * n];
    let start = rng.random_range(0..n * n);
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(&room) = stack.last() {
        let (a, b) = (room / n, room % n);
        let mut options = Vec::with_capacity(4);
        if a > 0 && !seen[room - n] {
            options.push((room - n, h_id(a, b)));
        }
        if a + 1 < n && !seen[room + n] {
            options.push((room + n, h_id(a + 1, b)));
        }
        if b > 0 && !seen[room - 1] {
            options.push((room - 1, v_id(a, b)));
        }
        if b + 1 < n && !seen[room + 1] {
            options.push((room + 1, v_id(a, b + 1)));
        }
        if options.is_empty() {
            stack.pop();
            continue;
        }
        let (next, wall) = options[rng.random_range(0..options.len())];
        open[wall] = true;
        seen[next] = true;
        stack.push(next);
    }
    let mut outer: Vec<usize> = Vec::with_capacity(4 * n);
    for k in 0..n {
        outer.extend([h_id(0, k), h_id(n, k), v_id(k, 0), v_id(k, n)]);
    }
    open[outer[rng.random_range(0..outer.len())]] = true;

    let closed: Vec<bool> = open.iter().map(|&o| !o && rng.random_bool(density)).collect();
    let mut block = |r: usize, c: usize| tile[r * t + c] = true;
    for a in 0..=n {
        for b in 0..n {
            if closed[h_id(a, b)] {
                let row = (a + 1) * p;
                for c in (b + 1) * p..=(b + 2) * p {
                    block(row, c);
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..=n {
            if closed[v_id(a, b)] {
                let col = (b + 1) * p;
                for r in (a + 1) * p..=(a + 2) * p {
                    block(r, col);
                }
            }
        }
    }
    tile
}

/// The eight symmetries of a square, indexed `mirror·4 + quarter_turns`.
/// The mirror (left-right flip) is applied before the clockwise rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dihedral(u8);

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral(0);

    pub fn new(index: u8) -> Self {
        assert!(index < 8, "dihedral index {index} out of range");
        Dihedral(index)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    fn mirrored(self) -> bool {
        self.0 >= 4
    }

    fn turns(self) -> u8 {
        self.0 % 4
    }

    pub fn inverse(self) -> Dihedral {
        if self.mirrored() {
            self
        } else {
            Dihedral((4 - self.turns()) % 4)
        }
    }

    /// Source coordinates in an `n×n` square for target `(r, c)`.
    fn source(self, n: usize, r: usize, c: usize) -> (usize, usize) {
        // undo rotation, then undo mirror
        let (mut r, mut c) = (r, c);
        for _ in 0..self.turns() {
            // one clockwise turn maps (r, c) -> (c, n-1-r)
            (r, c) = (n - 1 - c, r);
        }
        if self.mirrored() {
            c = n - 1 - c;
        }
        (r, c)
    }

    /// Applies the transform to a row-major `n×n` block.
    pub fn apply<T: Copy>(self, n: usize, block: &[T]) -> Vec<T> {
        assert_eq!(block.len(), n * n);
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let (sr, sc) = self.source(n, r, c);
                out.push(block[sr * n + sc]);
            }
        }
        out
    }
}

/// Per-variant transform index for quadrants (top-left, top-right,
/// bottom-left, bottom-right).
pub const AUGMENT_TABLE: [[u8; 4]; AUGMENTATIONS] = [
    [0, 0, 0, 0],
    [1, 1, 1, 1],
    [2, 2, 2, 2],
    [3, 3, 3, 3],
    [4, 4, 4, 4],
    [5, 5, 5, 5],
    [6, 6, 6, 6],
    [7, 7, 7, 7],
    [0, 4, 2, 6],
    [4, 0, 6, 2],
    [1, 3, 5, 7],
    [3, 1, 7, 5],
    [2, 6, 0, 4],
    [6, 2, 4, 0],
    [5, 7, 1, 3],
    [7, 5, 3, 1],
];

/// All 16 augmented variants of a map; variant 0 is the map itself.
pub fn augment(map: &GridMap) -> Result<Vec<GridMap>, DatasetError> {
    (0..AUGMENTATIONS).map(|v| augment_variant(map, v)).collect()
}

pub fn augment_variant(map: &GridMap, variant: usize) -> Result<GridMap, DatasetError> {
    let transforms = AUGMENT_TABLE[variant].map(Dihedral::new);
    transform_quadrants(map, transforms)
}

/// Applies one dihedral transform to each quadrant independently.
pub fn transform_quadrants(map: &GridMap, transforms: [Dihedral; 4]) -> Result<GridMap, DatasetError> {
    let (h, w) = (map.height(), map.width());
    if h % 2 != 0 || w % 2 != 0 || h != w {
        return Err(DatasetError::Dimension { height: h, width: w });
    }
    let q = h / 2;
    let mut blocked = vec![false; h * w];
    for (k, t) in transforms.iter().enumerate() {
        let (r0, c0) = ((k / 2) * q, (k % 2) * q);
        let block: Vec<bool> = (0..q * q)
            .map(|i| map.is_blocked(Cell::new(r0 + i / q, c0 + i % q)))
            .collect();
        let out = t.apply(q, &block);
        for i in 0..q * q {
            blocked[(r0 + i / q) * w + c0 + i % q] = out[i];
        }
    }
    Ok(GridMap::new(h, w, blocked)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// One problem instance with its oracle optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub map_id: String,
    /// Identity of the map before augmentation; drives the split.
    pub base_map_id: String,
    /// Where the map can be loaded from, if it lives in a file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_file: Option<String>,
    pub start: Cell,
    pub goal: Cell,
    pub optimal_cost: ExactCost,
    pub hardness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

impl InstanceRecord {
    pub fn task<'g>(&self, grid: &'g GridMap) -> Result<PTask<'g>, SearchError> {
        PTask::new(grid, self.start, self.goal)
    }
}

/// `optimal / octile(start, goal)`; 1 for trivial tasks.
pub fn hardness(start: Cell, goal: Cell, optimal: ExactCost) -> f64 {
    let h = octile(start, goal);
    if h.is_zero() {
        1.0
    } else {
        optimal.to_f64() / h.to_f64()
    }
}

/// Draws one task: the goal uniformly over free cells, the start uniformly
/// among the farthest third (rounded up) of the cells reachable from the
/// goal. `None` when the drawn goal has no reachable neighbor.
pub fn sample_instance(
    grid: &GridMap,
    map_id: &str,
    seed: u64,
    policy: MovePolicy,
) -> Option<InstanceRecord> {
    let free: Vec<Cell> = grid.free_cells().collect();
    if free.len() < 2 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goal = free[rng.random_range(0..free.len())];
    let dist = dijkstra_map(grid, goal, policy);
    let mut reachable: Vec<(ExactCost, Cell)> = grid
        .cells()
        .filter(|&c| c != goal)
        .filter_map(|c| dist.get(c).map(|d| (d, c)))
        .collect();
    if reachable.is_empty() {
        return None;
    }
    // farthest first, row-major among equals
    reachable.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let pool = reachable.len().div_ceil(3);
    let (optimal_cost, start) = reachable[rng.random_range(0..pool)];
    Some(InstanceRecord {
        id: format!("{map_id}/{seed:016x}"),
        map_id: map_id.to_string(),
        base_map_id: map_id.to_string(),
        map_file: None,
        start,
        goal,
        optimal_cost,
        hardness: hardness(start, goal, optimal_cost),
        split: None,
    })
}

/// Keeps records with `hardness ≥ min_hardness`.
pub fn filter_hardness(records: Vec<InstanceRecord>, min_hardness: f64) -> Vec<InstanceRecord> {
    records.into_iter().filter(|r| r.hardness >= min_hardness).collect()
}

/// 8:1:1 bucket of a base map id, stable for a given seed.
pub fn split_of(base_map_id: &str, seed: u64) -> Split {
    match derive_seed(seed, base_map_id) % 10 {
        0..=7 => Split::Train,
        8 => Split::Val,
        _ => Split::Test,
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Splits {
    pub train: Vec<InstanceRecord>,
    pub val: Vec<InstanceRecord>,
    pub test: Vec<InstanceRecord>,
}

impl Splits {
    pub fn len(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn into_records(self) -> Vec<InstanceRecord> {
        let mut all = self.train;
        all.extend(self.val);
        all.extend(self.test);
        all
    }
}

/// Partitions records by base map, tagging each with its split.
pub fn split(records: Vec<InstanceRecord>, seed: u64) -> Splits {
    let mut out = Splits::default();
    for mut r in records {
        let s = split_of(&r.base_map_id, seed);
        r.split = Some(s);
        match s {
            Split::Train => out.train.push(r),
            Split::Val => out.val.push(r),
            Split::Test => out.test.push(r),
        }
    }
    out
}

/// Splits records by base map and drops test records below `min_hardness`.
/// Training and validation records are kept whatever their hardness.
pub fn build_splits(records: Vec<InstanceRecord>, seed: u64, min_hardness: f64) -> (Splits, usize) {
    let mut splits = split(records, seed);
    let before = splits.test.len();
    splits.test = filter_hardness(splits.test, min_hardness);
    let rejected = before - splits.test.len();
    (splits, rejected)
}

pub fn write_jsonl<W: Write>(records: &[InstanceRecord], mut sink: W) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut sink, r)?;
        sink.write_all(b"\n")?;
    }
    sink.flush()
}

pub fn save_jsonl(records: &[InstanceRecord], path: impl AsRef<Path>) -> io::Result<()> {
    write_jsonl(records, BufWriter::new(File::create(path)?))
}

pub fn read_jsonl<R: BufRead>(source: R, origin: &str) -> Result<Vec<InstanceRecord>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| DatasetError::Record {
            path: origin.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn load_jsonl(path: impl AsRef<Path>) -> Result<Vec<InstanceRecord>, DatasetError> {
    let path = path.as_ref();
    read_jsonl(BufReader::new(File::open(path)?), &path.display().to_string())
}

/// File stem for an augmented map: `<base>-aNN`.
pub fn augmented_map_id(base: &str, variant: usize) -> String {
    format!("{base}-a{variant:02}")
}

/// Inverse of [`augmented_map_id`]; ids without the suffix are their own base.
pub fn base_map_id(map_id: &str) -> &str {
    match map_id.rsplit_once("-a") {
        Some((base, v)) if v.len() == 2 && v.bytes().all(|b| b.is_ascii_digit()) => base,
        _ => map_id,
    }
}

/// Samples `per_map` tasks on a map. Seeds derive from `(seed, map_id, k)`.
pub fn sample_instances(
    grid: &GridMap,
    map_id: &str,
    per_map: usize,
    seed: u64,
    policy: MovePolicy,
) -> Vec<InstanceRecord> {
    (0..per_map)
        .filter_map(|k| {
            let s = derive_seed(seed, &format!("{map_id}/{k}"));
            let mut r = sample_instance(grid, map_id, s, policy)?;
            r.id = format!("{map_id}/{k}");
            r.base_map_id = base_map_id(map_id).to_string();
            Some(r)
        })
        .collect()
}
