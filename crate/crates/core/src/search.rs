//! Best-first grid search: A*, weighted A*, weighted A* with a per-cell
//! correction factor, focal search, greedy search on path probabilities and
//! A* on an absolute heuristic map.
//!
//! All variants share the same OPEN/CLOSED bookkeeping. A successor is
//! (re)inserted into OPEN only when its g-value strictly improves, and the
//! search stops when the goal is removed from OPEN. Exact g-values are kept
//! in every variant; the OPEN key is exact for plain A* and a float wherever
//! a weight or a heuristic map enters.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::ops::Bound;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::ExactCost;
use crate::grid::{Cell, GridMap, MovePolicy};
use crate::heuristics::{octile, HeuristicError, HeuristicKind, HeuristicMap};

/// Correction factors at or below this are treated as "no information".
pub const CF_EPSILON: f64 = 1e-6;
/// Heuristic value used instead of dividing by a vanishing correction factor.
pub const H_SENTINEL: f64 = 1e12;

const FOCAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error("{0} needs a heuristic map")]
    MissingMap(Variant),
    #[error("suboptimality weight must be finite and >= 1, got {0}")]
    InvalidWeight(f64),
    #[error("invalid task: {0}")]
    InvalidTask(String),
}

/// A pathfinding problem on a borrowed grid.
#[derive(Debug, Clone, Copy)]
pub struct PTask<'g> {
    pub grid: &'g GridMap,
    pub start: Cell,
    pub goal: Cell,
}

impl<'g> PTask<'g> {
    pub fn new(grid: &'g GridMap, start: Cell, goal: Cell) -> Result<Self, SearchError> {
        for (name, c) in [("start", start), ("goal", goal)] {
            if !grid.in_bounds(c) {
                return Err(SearchError::InvalidTask(format!("{name} {c} out of bounds")));
            }
            if grid.is_blocked(c) {
                return Err(SearchError::InvalidTask(format!("{name} {c} is blocked")));
            }
        }
        Ok(PTask { grid, start, goal })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// f = g + octile
    AStar,
    /// f = g + w·octile
    WAStar,
    /// f = g + octile / cf(n)
    WAStarCf,
    /// OPEN ordered by g + octile, expansion picks the highest path
    /// probability among nodes with f ≤ w·f_min
    Focal,
    /// Highest path probability first, smaller f on ties
    GbfsPpm,
    /// f = g + hmap(n)
    AStarHl,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::AStar,
        Variant::WAStar,
        Variant::WAStarCf,
        Variant::Focal,
        Variant::GbfsPpm,
        Variant::AStarHl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::AStar => "astar",
            Variant::WAStar => "wastar",
            Variant::WAStarCf => "wastar-cf",
            Variant::Focal => "focal",
            Variant::GbfsPpm => "gbfs-ppm",
            Variant::AStarHl => "astar-hl",
        }
    }

    /// The heuristic map kind this variant consumes, if any.
    pub fn map_kind(self) -> Option<HeuristicKind> {
        match self {
            Variant::AStar | Variant::WAStar => None,
            Variant::WAStarCf => Some(HeuristicKind::Cf),
            Variant::Focal | Variant::GbfsPpm => Some(HeuristicKind::Pp),
            Variant::AStarHl => Some(HeuristicKind::Abs),
        }
    }

    pub fn uses_weight(self) -> bool {
        matches!(self, Variant::WAStar | Variant::Focal)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

/// Preference among OPEN nodes with equal keys.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    HighG,
    LowG,
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "high-g" => Ok(TieBreak::HighG),
            "low-g" => Ok(TieBreak::LowG),
            _ => Err(format!("unknown tie-break {s:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig<'m> {
    pub variant: Variant,
    pub weight: f64,
    pub heuristic_map: Option<&'m HeuristicMap>,
    pub tie_break: TieBreak,
    pub expansion_limit: Option<u64>,
    pub policy: MovePolicy,
    /// Assert the focal selection invariant on every expansion.
    pub check_invariants: bool,
}

impl<'m> SearchConfig<'m> {
    /// Checks that the weight is usable and the map kind matches the variant.
    pub fn new(
        variant: Variant,
        weight: f64,
        heuristic_map: Option<&'m HeuristicMap>,
    ) -> Result<Self, SearchError> {
        let config = SearchConfig {
            variant,
            weight,
            heuristic_map,
            tie_break: TieBreak::HighG,
            expansion_limit: None,
            policy: MovePolicy::Permissive,
            check_invariants: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if !self.weight.is_finite() || self.weight < 1.0 {
            return Err(SearchError::InvalidWeight(self.weight));
        }
        match (self.variant.map_kind(), self.heuristic_map) {
            (Some(kind), Some(map)) => {
                map.expect_kind(kind)?;
            }
            (Some(_), None) => return Err(SearchError::MissingMap(self.variant)),
            (None, _) => {}
        }
        Ok(())
    }

    pub fn astar() -> Self {
        Self::new(Variant::AStar, 1.0, None).expect("valid")
    }

    pub fn wastar(weight: f64) -> Result<Self, SearchError> {
        Self::new(Variant::WAStar, weight, None)
    }

    pub fn wastar_cf(cf: &'m HeuristicMap) -> Result<Self, SearchError> {
        Self::new(Variant::WAStarCf, 1.0, Some(cf))
    }

    pub fn focal(weight: f64, pp: &'m HeuristicMap) -> Result<Self, SearchError> {
        Self::new(Variant::Focal, weight, Some(pp))
    }

    pub fn gbfs_ppm(pp: &'m HeuristicMap) -> Result<Self, SearchError> {
        Self::new(Variant::GbfsPpm, 1.0, Some(pp))
    }

    pub fn astar_hl(abs: &'m HeuristicMap) -> Result<Self, SearchError> {
        Self::new(Variant::AStarHl, 1.0, Some(abs))
    }

    pub fn with_policy(mut self, policy: MovePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn with_expansion_limit(mut self, limit: u64) -> Self {
        self.expansion_limit = Some(limit);
        self
    }

    pub fn with_invariant_checks(mut self, on: bool) -> Self {
        self.check_invariants = on;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Found,
    NoPath,
    LimitExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: Status,
    pub path: Option<Vec<Cell>>,
    pub cost: Option<ExactCost>,
    /// Nodes moved from OPEN to CLOSED, the goal included.
    pub expansions: u64,
    /// Successor insertions and g-value updates in OPEN.
    pub generated: u64,
    /// Expansions of a cell that had already been closed before.
    pub reexpansions: u64,
    /// Smallest f in OPEN at the final selection. For greedy search this is
    /// the f-value of the last selected node.
    pub f_min_final: f64,
}

impl SearchResult {
    pub fn is_found(&self) -> bool {
        self.status == Status::Found
    }
}

#[derive(Debug, Clone, Copy)]
enum FKey {
    Exact(ExactCost),
    Float(f64),
}

impl FKey {
    fn value(self) -> f64 {
        match self {
            FKey::Exact(c) => c.to_f64(),
            FKey::Float(v) => v,
        }
    }

    fn compare(self, other: FKey) -> Ordering {
        match (self, other) {
            (FKey::Exact(a), FKey::Exact(b)) => a.cmp(&b),
            _ => self.value().total_cmp(&other.value()),
        }
    }
}

/// OPEN entry. `Less` means "expand earlier".
#[derive(Debug, Clone, Copy)]
struct Key {
    pp: f64,
    f: FKey,
    g: ExactCost,
    high_g: bool,
    idx: usize,
}

impl Key {
    /// Greatest possible key with f-value `f`, used to bound range queries.
    fn upper_probe(f: f64, high_g: bool) -> Key {
        Key {
            pp: 0.0,
            f: FKey::Float(f),
            g: if high_g {
                ExactCost::ZERO
            } else {
                ExactCost::new(u32::MAX, u32::MAX)
            },
            high_g,
            idx: usize::MAX,
        }
    }

    fn with_pp(self, pp: f64) -> Key {
        Key { pp, ..self }
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .pp
            .total_cmp(&self.pp)
            .then_with(|| self.f.compare(other.f))
            .then_with(|| {
                if self.high_g {
                    other.g.cmp(&self.g)
                } else {
                    self.g.cmp(&other.g)
                }
            })
            .then_with(|| self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

struct Evaluator<'a> {
    variant: Variant,
    weight: f64,
    map: Option<&'a HeuristicMap>,
    goal: Cell,
    high_g: bool,
}

impl Evaluator<'_> {
    fn f(&self, cell: Cell, g: ExactCost) -> FKey {
        let h = octile(cell, self.goal);
        match self.variant {
            Variant::AStar | Variant::GbfsPpm => FKey::Exact(g + h),
            Variant::Focal => FKey::Float((g + h).to_f64()),
            Variant::WAStar => FKey::Float(split_sum(g, h, self.weight)),
            Variant::WAStarCf => {
                if h.is_zero() {
                    return FKey::Float(g.to_f64());
                }
                let cf = self.map_value(cell);
                if cf > CF_EPSILON {
                    FKey::Float(split_sum(g, h, 1.0 / cf))
                } else {
                    FKey::Float(g.to_f64() + H_SENTINEL)
                }
            }
            Variant::AStarHl => FKey::Float(g.to_f64() + self.map_value(cell)),
        }
    }

    fn pp(&self, cell: Cell) -> f64 {
        match self.variant {
            Variant::GbfsPpm => self.map_value(cell),
            _ => 0.0,
        }
    }

    fn map_value(&self, cell: Cell) -> f64 {
        self.map.expect("validated at construction").get(cell)
    }

    fn key(&self, cell: Cell, idx: usize, g: ExactCost) -> Key {
        Key {
            pp: self.pp(cell),
            f: self.f(cell, g),
            g,
            high_g: self.high_g,
            idx,
        }
    }
}

/// `(g.c + s·h.c) + (g.d + s·h.d)·√2`. With `s = 1` this is bit-identical
/// to `(g + h).to_f64()`.
fn split_sum(g: ExactCost, h: ExactCost, scale: f64) -> f64 {
    (g.cardinals as f64 + scale * h.cardinals as f64)
        + (g.diagonals as f64 + scale * h.diagonals as f64) * std::f64::consts::SQRT_2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeState {
    Unseen,
    Open,
    Closed,
}

struct Nodes {
    g: Vec<Option<ExactCost>>,
    parent: Vec<usize>,
    state: Vec<NodeState>,
    ever_closed: Vec<bool>,
    expansions: u64,
    generated: u64,
    reexpansions: u64,
}

impl Nodes {
    fn new(n: usize) -> Self {
        Nodes {
            g: vec![None; n],
            parent: vec![usize::MAX; n],
            state: vec![NodeState::Unseen; n],
            ever_closed: vec![false; n],
            expansions: 0,
            generated: 0,
            reexpansions: 0,
        }
    }

    fn close(&mut self, idx: usize) {
        self.state[idx] = NodeState::Closed;
        self.expansions += 1;
        if self.ever_closed[idx] {
            self.reexpansions += 1;
        }
        self.ever_closed[idx] = true;
    }

    fn finish(&self, grid: &GridMap, status: Status, goal: Option<usize>, f_min: f64) -> SearchResult {
        let (path, cost) = match goal {
            Some(goal) => {
                let mut path = vec![grid.cell(goal)];
                let mut at = goal;
                while self.parent[at] != usize::MAX {
                    at = self.parent[at];
                    path.push(grid.cell(at));
                }
                path.reverse();
                (Some(path), self.g[goal])
            }
            None => (None, None),
        };
        SearchResult {
            status,
            path,
            cost,
            expansions: self.expansions,
            generated: self.generated,
            reexpansions: self.reexpansions,
            f_min_final: f_min,
        }
    }
}

/// Runs the configured search on `task`.
pub fn solve(task: &PTask<'_>, config: &SearchConfig<'_>) -> Result<SearchResult, SearchError> {
    config.validate()?;
    let task = PTask::new(task.grid, task.start, task.goal)?;
    if let Some(map) = config.heuristic_map {
        map.check_dimensions(task.grid)?;
    }
    let eval = Evaluator {
        variant: config.variant,
        weight: config.weight,
        map: config.heuristic_map,
        goal: task.goal,
        high_g: config.tie_break == TieBreak::HighG,
    };
    Ok(match config.variant {
        Variant::Focal => solve_focal(&task, config, &eval),
        _ => solve_ordered(&task, config, &eval),
    })
}

fn limit_hit(config: &SearchConfig<'_>, nodes: &Nodes) -> bool {
    config.expansion_limit.is_some_and(|l| nodes.expansions >= l)
}

fn solve_ordered(task: &PTask<'_>, config: &SearchConfig<'_>, eval: &Evaluator<'_>) -> SearchResult {
    let grid = task.grid;
    let goal = grid.index(task.goal);
    let mut nodes = Nodes::new(grid.len());
    let mut open = BinaryHeap::new();
    let mut f_min = f64::INFINITY;

    let start = grid.index(task.start);
    nodes.g[start] = Some(ExactCost::ZERO);
    nodes.state[start] = NodeState::Open;
    open.push(Reverse(eval.key(task.start, start, ExactCost::ZERO)));

    loop {
        if limit_hit(config, &nodes) {
            return nodes.finish(grid, Status::LimitExceeded, None, f_min);
        }
        let Some(Reverse(top)) = open.pop() else {
            return nodes.finish(grid, Status::NoPath, None, f_min);
        };
        let idx = top.idx;
        if nodes.state[idx] != NodeState::Open || nodes.g[idx] != Some(top.g) {
            continue;
        }
        nodes.close(idx);
        f_min = top.f.value();
        if idx == goal {
            return nodes.finish(grid, Status::Found, Some(goal), f_min);
        }
        let cell = grid.cell(idx);
        for (next, kind) in grid.neighbors(cell, config.policy) {
            let j = grid.index(next);
            let g = top.g + kind.cost();
            if nodes.g[j].is_none_or(|old| g < old) {
                nodes.g[j] = Some(g);
                nodes.parent[j] = idx;
                nodes.state[j] = NodeState::Open;
                nodes.generated += 1;
                open.push(Reverse(eval.key(next, j, g)));
            }
        }
    }
}

/// Focal search with an exactly maintained FOCAL list.
///
/// OPEN is ordered by (f, tie-break); FOCAL holds the OPEN nodes with
/// `f ≤ w·f_min`, ordered by path probability (higher first), then by the
/// OPEN order. Before each selection FOCAL is resynchronised with the
/// current f_min by sweeping the OPEN range between the old and new bounds.
fn solve_focal(task: &PTask<'_>, config: &SearchConfig<'_>, eval: &Evaluator<'_>) -> SearchResult {
    let grid = task.grid;
    let pp_map = config.heuristic_map.expect("validated");
    let pp_of = |idx: usize| pp_map.get(grid.cell(idx));
    let w = config.weight;
    let high_g = eval.high_g;
    let goal = grid.index(task.goal);

    let mut nodes = Nodes::new(grid.len());
    let mut open: BTreeSet<Key> = BTreeSet::new();
    let mut focal: BTreeSet<Key> = BTreeSet::new();
    let mut open_key: Vec<Option<Key>> = vec![None; grid.len()];

    let start = grid.index(task.start);
    let start_key = eval.key(task.start, start, ExactCost::ZERO);
    let mut bound = w * start_key.f.value();
    nodes.g[start] = Some(ExactCost::ZERO);
    nodes.state[start] = NodeState::Open;
    open.insert(start_key);
    focal.insert(start_key.with_pp(pp_of(start)));
    open_key[start] = Some(start_key);
    let mut f_min = start_key.f.value();

    loop {
        if limit_hit(config, &nodes) {
            return nodes.finish(grid, Status::LimitExceeded, None, f_min);
        }
        let Some(first) = open.first() else {
            return nodes.finish(grid, Status::NoPath, None, f_min);
        };
        f_min = first.f.value();
        let new_bound = w * f_min;
        if new_bound > bound {
            let range = (
                Bound::Excluded(Key::upper_probe(bound, high_g)),
                Bound::Included(Key::upper_probe(new_bound, high_g)),
            );
            for k in open.range(range) {
                focal.insert(k.with_pp(pp_of(k.idx)));
            }
        } else if new_bound < bound {
            let range = (
                Bound::Excluded(Key::upper_probe(new_bound, high_g)),
                Bound::Included(Key::upper_probe(bound, high_g)),
            );
            for k in open.range(range) {
                focal.remove(&k.with_pp(pp_of(k.idx)));
            }
        }
        bound = new_bound;

        let chosen = *focal.first().expect("the f_min node is always in FOCAL");
        if config.check_invariants {
            check_focal(&open, &focal, &chosen, w, bound);
        }
        focal.remove(&chosen);
        let chosen = chosen.with_pp(0.0);
        open.remove(&chosen);
        let idx = chosen.idx;
        open_key[idx] = None;
        nodes.close(idx);
        if idx == goal {
            return nodes.finish(grid, Status::Found, Some(goal), f_min);
        }

        let cell = grid.cell(idx);
        for (next, kind) in grid.neighbors(cell, config.policy) {
            let j = grid.index(next);
            let g = chosen.g + kind.cost();
            if nodes.g[j].is_some_and(|old| g >= old) {
                continue;
            }
            if let Some(old) = open_key[j].take() {
                open.remove(&old);
                focal.remove(&old.with_pp(pp_of(j)));
            }
            nodes.g[j] = Some(g);
            nodes.parent[j] = idx;
            nodes.state[j] = NodeState::Open;
            nodes.generated += 1;
            let key = eval.key(next, j, g);
            open.insert(key);
            if key.f.value() <= bound {
                focal.insert(key.with_pp(pp_of(j)));
            }
            open_key[j] = Some(key);
        }
    }
}

fn check_focal(open: &BTreeSet<Key>, focal: &BTreeSet<Key>, chosen: &Key, w: f64, bound: f64) {
    let min_f = open
        .iter()
        .map(|k| k.f.value())
        .fold(f64::INFINITY, f64::min);
    assert!(
        chosen.f.value() <= w * min_f + FOCAL_TOLERANCE,
        "focal selection f={} exceeds w·f_min={}",
        chosen.f.value(),
        w * min_f
    );
    let expected = open.iter().filter(|k| k.f.value() <= bound).count();
    assert_eq!(focal.len(), expected, "FOCAL out of sync with OPEN");
}
