//! Reference implementations shared by the integration tests. They avoid the
//! library's own movement and search code on purpose.
#![allow(dead_code)]

use gridpath::{Cell, ExactCost, GridMap, MovePolicy};
use proptest::prelude::*;

pub const OFFSETS: [(isize, isize); 8] = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)];

fn free(grid: &GridMap, r: isize, c: isize) -> bool {
    r >= 0
        && c >= 0
        && (r as usize) < grid.height()
        && (c as usize) < grid.width()
        && !grid.is_blocked(Cell::new(r as usize, c as usize))
}

/// Moves allowed from `cell`, derived from the movement rule directly.
pub fn moves(grid: &GridMap, cell: Cell, policy: MovePolicy) -> Vec<(Cell, ExactCost)> {
    let (r, c) = (cell.row as isize, cell.col as isize);
    let mut out = Vec::new();
    for (dr, dc) in OFFSETS {
        if !free(grid, r + dr, c + dc) {
            continue;
        }
        let diagonal = dr != 0 && dc != 0;
        if diagonal
            && policy == MovePolicy::NoCornerCutting
            && !(free(grid, r + dr, c) && free(grid, r, c + dc))
        {
            continue;
        }
        let cost = if diagonal { ExactCost::DIAGONAL } else { ExactCost::CARDINAL };
        out.push((Cell::new((r + dr) as usize, (c + dc) as usize), cost));
    }
    out
}

/// Bellman-Ford style relaxation until nothing changes.
pub fn bellman(grid: &GridMap, source: Cell, policy: MovePolicy) -> Vec<Option<ExactCost>> {
    let w = grid.width();
    let mut d: Vec<Option<ExactCost>> = vec![None; grid.len()];
    d[source.row * w + source.col] = Some(ExactCost::ZERO);
    loop {
        let mut changed = false;
        for i in 0..grid.len() {
            let Some(di) = d[i] else { continue };
            let cell = Cell::new(i / w, i % w);
            for (n, cost) in moves(grid, cell, policy) {
                let j = n.row * w + n.col;
                let cand = di + cost;
                if d[j].is_none_or(|old| cand < old) {
                    d[j] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            return d;
        }
    }
}

pub fn dist(grid: &GridMap, d: &[Option<ExactCost>], c: Cell) -> Option<ExactCost> {
    d[c.row * grid.width() + c.col]
}

/// Checks adjacency, freeness, endpoints and the claimed cost of a path.
pub fn check_path(grid: &GridMap, path: &[Cell], start: Cell, goal: Cell, policy: MovePolicy, cost: ExactCost) {
    assert_eq!(path.first(), Some(&start));
    assert_eq!(path.last(), Some(&goal));
    let mut total = ExactCost::ZERO;
    for w in path.windows(2) {
        let step = moves(grid, w[0], policy)
            .into_iter()
            .find(|(n, _)| *n == w[1])
            .unwrap_or_else(|| panic!("illegal move {} -> {}", w[0], w[1]));
        total = total + step.1;
    }
    assert_eq!(total, cost);
}

/// Random grid up to `max`×`max` with blocked probability up to 0.4.
pub fn arb_grid(max: usize) -> impl Strategy<Value = GridMap> {
    (1..=max, 1..=max, 0.0..0.4f64).prop_flat_map(|(h, w, p)| {
        proptest::collection::vec(proptest::bool::weighted(p), h * w)
            .prop_map(move |b| GridMap::new(h, w, b).unwrap())
    })
}

/// A grid with at least one free cell plus two free cells picked from it.
pub fn arb_grid_task(max: usize) -> impl Strategy<Value = (GridMap, Cell, Cell)> {
    (arb_grid(max), any::<proptest::sample::Index>(), any::<proptest::sample::Index>())
        .prop_filter_map("needs a free cell", |(g, a, b)| {
            let free: Vec<Cell> = g.free_cells().collect();
            if free.is_empty() {
                return None;
            }
            let s = *a.get(&free);
            let t = *b.get(&free);
            Some((g, s, t))
        })
}

pub fn policies() -> impl Strategy<Value = MovePolicy> {
    prop_oneof![Just(MovePolicy::Permissive), Just(MovePolicy::NoCornerCutting)]
}
