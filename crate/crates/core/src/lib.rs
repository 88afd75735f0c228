//! Grid pathfinding workbench.
//!
//! Search algorithms for 8-connected grids with unit cardinal and √2 diagonal
//! moves (A*, weighted A*, weighted A* with per-cell correction factors,
//! focal search and greedy search guided by path-probability maps), the
//! oracles that produce ground-truth heuristic maps for them, procedural
//! dataset generation and a benchmark harness.
//!
//! ```
//! use gridpath::{Cell, GridMap, PTask, SearchConfig, solve};
//!
//! let grid = GridMap::from_ascii(&["...", ".#.", "..."]).unwrap();
//! let task = PTask::new(&grid, Cell::new(0, 0), Cell::new(2, 2)).unwrap();
//! let result = solve(&task, &SearchConfig::astar()).unwrap();
//! assert_eq!(result.cost.unwrap().to_f64(), 2.0 + std::f64::consts::SQRT_2);
//! ```

pub mod bench;
pub mod cli;
pub mod costs;
pub mod dataset;
pub mod grid;
pub mod heuristics;
pub mod hmap_io;
pub mod oracle;
pub mod search;

pub use costs::ExactCost;
pub use grid::{Cell, GridMap, MoveKind, MovePolicy};
pub use heuristics::{chebyshev, euclidean, octile, HeuristicKind, HeuristicMap};
pub use search::{solve, PTask, SearchConfig, SearchResult, Status, TieBreak, Variant};
