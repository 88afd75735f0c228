//! Ground-truth generation: exact distance fields, correction-factor maps,
//! cost-to-go maps, Theta* any-angle paths and path-probability maps.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::ExactCost;
use crate::grid::{Cell, GridMap, MovePolicy};
use crate::heuristics::{euclidean, octile, HeuristicKind, HeuristicMap, PP_THRESHOLD};
use crate::search::{PTask, H_SENTINEL};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("no path from {start} to {goal}")]
    NoPath { start: Cell, goal: Cell },
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

/// Exact shortest-path cost from `source` to every cell; `None` where unreachable.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    source: Cell,
    height: usize,
    width: usize,
    values: Vec<Option<ExactCost>>,
}

impl DistanceMap {
    pub fn source(&self) -> Cell {
        self.source
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, cell: Cell) -> Option<ExactCost> {
        self.values[cell.row * self.width + cell.col]
    }

    pub fn values(&self) -> &[Option<ExactCost>] {
        &self.values
    }

    pub fn reachable_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// Cost-to-go as an ABS map: the distance where reachable, the sentinel
    /// at unreachable free cells and 0 on blocked cells.
    pub fn to_abs_map(&self, grid: &GridMap) -> HeuristicMap {
        let values = grid
            .cells()
            .map(|c| match self.get(c) {
                Some(d) => d.to_f64(),
                None if grid.is_free(c) => H_SENTINEL,
                None => 0.0,
            })
            .collect();
        HeuristicMap::new(HeuristicKind::Abs, self.height, self.width, values)
            .expect("distances are finite and non-negative")
    }
}

/// Uniform-cost search from `source` over the whole grid.
pub fn dijkstra_map(grid: &GridMap, source: Cell, policy: MovePolicy) -> DistanceMap {
    assert!(grid.is_free(source), "dijkstra source {source} is blocked");
    let mut values = vec![None; grid.len()];
    let mut done = vec![false; grid.len()];
    let mut heap = BinaryHeap::new();
    values[grid.index(source)] = Some(ExactCost::ZERO);
    heap.push(Reverse((ExactCost::ZERO, grid.index(source))));
    while let Some(Reverse((d, idx))) = heap.pop() {
        if done[idx] {
            continue;
        }
        done[idx] = true;
        for (next, kind) in grid.neighbors(grid.cell(idx), policy) {
            let j = grid.index(next);
            let cand = d + kind.cost();
            if values[j].is_none_or(|old| cand < old) {
                values[j] = Some(cand);
                heap.push(Reverse((cand, j)));
            }
        }
    }
    DistanceMap {
        source,
        height: grid.height(),
        width: grid.width(),
        values,
    }
}

/// Correction factor `octile(n, goal) / h*(n)`; 1 at the goal, 0 on blocked
/// and unreachable cells.
pub fn cf_map(grid: &GridMap, goal: Cell, policy: MovePolicy) -> HeuristicMap {
    let dist = dijkstra_map(grid, goal, policy);
    let values = grid
        .cells()
        .map(|c| match dist.get(c) {
            _ if c == goal => 1.0,
            Some(hstar) => octile(c, goal).to_f64() / hstar.to_f64(),
            None => 0.0,
        })
        .collect();
    HeuristicMap::new(HeuristicKind::Cf, grid.height(), grid.width(), values)
        .expect("octile is admissible, so cf lies in [0, 1]")
}

/// Perfect cost-to-go to `goal` as an ABS map.
pub fn hstar_map(grid: &GridMap, goal: Cell, policy: MovePolicy) -> HeuristicMap {
    dijkstra_map(grid, goal, policy).to_abs_map(grid)
}

/// Walks the cells whose interior the segment between the centers of `a`
/// and `b` intersects, in order from `a` to `b`.
///
/// Cell `(r, c)` is the unit square centred at `(r, c)`. Boundary crossings
/// are ordered with integer arithmetic: the k-th row boundary is hit at
/// `t = (2k+1)/(2|dr|)`, the k-th column boundary at `(2k+1)/(2|dc|)`. When
/// both coincide the segment passes exactly through a lattice corner and
/// moves diagonally without entering the two side cells; `on_corner` gets
/// those side cells. Either callback can stop the walk by returning `false`.
fn traverse(
    a: Cell,
    b: Cell,
    mut on_cell: impl FnMut(Cell) -> bool,
    mut on_corner: impl FnMut(Cell, Cell) -> bool,
) -> bool {
    let dr = b.row as i64 - a.row as i64;
    let dc = b.col as i64 - a.col as i64;
    let (sr, sc) = (dr.signum(), dc.signum());
    let (nr, nc) = (dr.abs(), dc.abs());
    let (mut r, mut c) = (a.row as i64, a.col as i64);
    let (mut kr, mut kc) = (0i64, 0i64);
    let at = |r: i64, c: i64| Cell::new(r as usize, c as usize);
    if !on_cell(a) {
        return false;
    }
    while (r, c) != (b.row as i64, b.col as i64) {
        let order = if nr == 0 {
            Ordering::Greater
        } else if nc == 0 {
            Ordering::Less
        } else {
            ((2 * kr + 1) * nc).cmp(&((2 * kc + 1) * nr))
        };
        match order {
            Ordering::Less => {
                r += sr;
                kr += 1;
            }
            Ordering::Greater => {
                c += sc;
                kc += 1;
            }
            Ordering::Equal => {
                if !on_corner(at(r + sr, c), at(r, c + sc)) {
                    return false;
                }
                r += sr;
                c += sc;
                kr += 1;
                kc += 1;
            }
        }
        if !on_cell(at(r, c)) {
            return false;
        }
    }
    true
}

/// True when the center-to-center segment crosses no blocked cell and does
/// not squeeze through a corner shared by two blocked cells.
pub fn line_of_sight(grid: &GridMap, a: Cell, b: Cell) -> bool {
    traverse(
        a,
        b,
        |c| grid.is_free(c),
        |x, y| !(grid.is_blocked(x) && grid.is_blocked(y)),
    )
}

/// Cells whose interior the segment `a → b` intersects, endpoints included.
pub fn segment_cells(a: Cell, b: Cell) -> Vec<Cell> {
    let mut out = Vec::new();
    traverse(
        a,
        b,
        |c| {
            out.push(c);
            true
        },
        |_, _| true,
    );
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnyAnglePath {
    pub waypoints: Vec<Cell>,
    /// Sum of Euclidean segment lengths.
    pub cost: f64,
}

impl AnyAnglePath {
    fn from_waypoints(waypoints: Vec<Cell>) -> Self {
        let cost = waypoints.windows(2).map(|w| euclidean(w[0], w[1])).sum();
        AnyAnglePath { waypoints, cost }
    }
}

#[derive(Debug, Clone, Copy)]
struct ThetaEntry {
    f: f64,
    g: f64,
    idx: usize,
}

impl Ord for ThetaEntry {
    // Max-heap: smaller f first, then larger g, then lower index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for ThetaEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ThetaEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ThetaEntry {}

/// Basic Theta*: A* over grid moves with Euclidean costs where a successor
/// inherits its parent's parent whenever the two see each other.
///
/// Direct moves between adjacent cells are always admitted, including a
/// diagonal squeeze the movement policy allows but line of sight does not.
pub fn theta_star(task: &PTask<'_>, policy: MovePolicy) -> Result<AnyAnglePath, OracleError> {
    let grid = task.grid;
    let start = grid.index(task.start);
    let goal = grid.index(task.goal);
    let mut g = vec![f64::INFINITY; grid.len()];
    let mut parent = vec![usize::MAX; grid.len()];
    let mut closed = vec![false; grid.len()];
    let mut open = BinaryHeap::new();
    g[start] = 0.0;
    parent[start] = start;
    open.push(ThetaEntry {
        f: euclidean(task.start, task.goal),
        g: 0.0,
        idx: start,
    });

    while let Some(top) = open.pop() {
        let idx = top.idx;
        if closed[idx] || top.g != g[idx] {
            continue;
        }
        closed[idx] = true;
        if idx == goal {
            let mut chain = vec![grid.cell(goal)];
            let mut at = goal;
            while parent[at] != at {
                at = parent[at];
                chain.push(grid.cell(at));
            }
            chain.reverse();
            return Ok(AnyAnglePath::from_waypoints(collapse_collinear(grid, chain)));
        }
        let cell = grid.cell(idx);
        let up = parent[idx];
        for (next, _) in grid.neighbors(cell, policy) {
            let j = grid.index(next);
            if closed[j] {
                continue;
            }
            let (cand, via) = if up != idx && line_of_sight(grid, grid.cell(up), next) {
                (g[up] + euclidean(grid.cell(up), next), up)
            } else {
                (g[idx] + euclidean(cell, next), idx)
            };
            if cand < g[j] {
                g[j] = cand;
                parent[j] = via;
                open.push(ThetaEntry {
                    f: cand + euclidean(next, task.goal),
                    g: cand,
                    idx: j,
                });
            }
        }
    }
    Err(OracleError::NoPath {
        start: task.start,
        goal: task.goal,
    })
}

// Drops middle points of straight runs. A run that includes a squeeze
// diagonal between two blocked cells is kept split, since the merged
// segment would have no line of sight.
fn collapse_collinear(grid: &GridMap, points: Vec<Cell>) -> Vec<Cell> {
    let mut out: Vec<Cell> = Vec::with_capacity(points.len());
    for p in points {
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let (ux, uy) = (b.row as i64 - a.row as i64, b.col as i64 - a.col as i64);
            let (vx, vy) = (p.row as i64 - b.row as i64, p.col as i64 - b.col as i64);
            if ux * vy == uy * vx && ux * vx + uy * vy > 0 && line_of_sight(grid, a, p) {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

/// Union of the cells crossed by each segment of the path.
pub fn rasterize(path: &AnyAnglePath) -> BTreeSet<Cell> {
    let mut cells: BTreeSet<Cell> = path.waypoints.iter().copied().collect();
    for w in path.waypoints.windows(2) {
        cells.extend(segment_cells(w[0], w[1]));
    }
    cells
}

/// What the path-probability ratio is measured against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PpmNumerator {
    /// Grid-optimal cost from the two distance maps.
    #[default]
    GridOptimal,
    /// Any-angle cost of the Theta* path.
    ThetaCost,
}

/// Path-probability map for a task.
///
/// For each cell reachable from both ends the ratio
/// `C / (d_start(n) + d_goal(n))` is kept if it is at least 0.95 and zeroed
/// otherwise; cells on the rasterized Theta* path are forced to 1.
pub fn build_ppm(
    task: &PTask<'_>,
    d_start: &DistanceMap,
    d_goal: &DistanceMap,
    theta: &AnyAnglePath,
    numerator: PpmNumerator,
) -> Result<HeuristicMap, OracleError> {
    let grid = task.grid;
    for (name, d, src) in [("start", d_start, task.start), ("goal", d_goal, task.goal)] {
        if d.height != grid.height() || d.width != grid.width() {
            return Err(OracleError::ContractViolation(format!(
                "{name} distance map is {}x{}, grid is {}x{}",
                d.height,
                d.width,
                grid.height(),
                grid.width()
            )));
        }
        if d.source != src {
            return Err(OracleError::ContractViolation(format!(
                "{name} distance map has source {}, expected {src}",
                d.source
            )));
        }
    }
    let optimal = d_start.get(task.goal).ok_or(OracleError::NoPath {
        start: task.start,
        goal: task.goal,
    })?;
    let c = match numerator {
        PpmNumerator::GridOptimal => optimal.to_f64(),
        PpmNumerator::ThetaCost => theta.cost,
    };
    let on_path = rasterize(theta);
    let values = grid
        .cells()
        .map(|n| {
            if on_path.contains(&n) {
                return 1.0;
            }
            match (d_start.get(n), d_goal.get(n)) {
                (Some(a), Some(b)) => {
                    let through = (a + b).to_f64();
                    let ratio = if through > 0.0 { c / through } else { 1.0 };
                    if ratio >= PP_THRESHOLD {
                        ratio.min(1.0)
                    } else {
                        0.0
                    }
                }
                _ => 0.0,
            }
        })
        .collect();
    HeuristicMap::new(HeuristicKind::Pp, grid.height(), grid.width(), values)
        .map_err(|e| OracleError::ContractViolation(e.to_string()))
}

/// Every ground-truth artifact for one task.
#[derive(Debug, Clone)]
pub struct TaskOracle {
    pub d_start: DistanceMap,
    pub d_goal: DistanceMap,
    pub theta: AnyAnglePath,
    pub ppm: HeuristicMap,
}

impl TaskOracle {
    pub fn compute(
        task: &PTask<'_>,
        policy: MovePolicy,
        numerator: PpmNumerator,
    ) -> Result<Self, OracleError> {
        let d_start = dijkstra_map(task.grid, task.start, policy);
        let d_goal = dijkstra_map(task.grid, task.goal, policy);
        if d_start.get(task.goal).is_none() {
            return Err(OracleError::NoPath {
                start: task.start,
                goal: task.goal,
            });
        }
        let theta = theta_star(task, policy)?;
        let ppm = build_ppm(task, &d_start, &d_goal, &theta, numerator)?;
        Ok(TaskOracle {
            d_start,
            d_goal,
            theta,
            ppm,
        })
    }

    /// Correction factors toward the task goal, reusing the goal distance map.
    pub fn cf(&self, grid: &GridMap) -> HeuristicMap {
        let goal = self.d_goal.source;
        let values = grid
            .cells()
            .map(|c| match self.d_goal.get(c) {
                _ if c == goal => 1.0,
                Some(h) => octile(c, goal).to_f64() / h.to_f64(),
                None => 0.0,
            })
            .collect();
        HeuristicMap::new(HeuristicKind::Cf, grid.height(), grid.width(), values).expect("cf in [0, 1]")
    }

    pub fn hstar(&self, grid: &GridMap) -> HeuristicMap {
        self.d_goal.to_abs_map(grid)
    }
}
