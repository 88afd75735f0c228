//! Focal search guided by path-probability maps of varying quality.
//!
//! cargo run --example focal_ppm

use gridpath::bench::random_map;
use gridpath::dataset::{self, MapGenConfig, ObstacleStyle};
use gridpath::oracle::{PpmNumerator, TaskOracle};
use gridpath::{solve, HeuristicKind, HeuristicMap, MovePolicy, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = dataset::generate_map(&MapGenConfig {
        style: ObstacleStyle::Maze,
        density: 0.6,
        seed: 3,
        ..MapGenConfig::default()
    })?;
    let record = (0..)
        .filter_map(|k| dataset::sample_instance(&grid, "maze", k, MovePolicy::Permissive))
        .find(|r| r.hardness >= 1.2)
        .unwrap();
    let task = record.task(&grid)?;
    println!("{} -> {}, optimal {:.3}, hardness {:.3}", record.start, record.goal, record.optimal_cost.to_f64(), record.hardness);

    let oracle = TaskOracle::compute(&task, MovePolicy::Permissive, PpmNumerator::GridOptimal)?;
    let zero = HeuristicMap::uniform(HeuristicKind::Pp, grid.height(), grid.width(), 0.0)?;
    let noise = random_map(&grid, task.goal, HeuristicKind::Pp, 1);
    let astar = solve(&task, &SearchConfig::astar())?;
    println!("A*: {} expansions", astar.expansions);

    for w in [1.1, 1.5, 2.0, 4.0] {
        for (name, pp) in [("oracle", &oracle.ppm), ("zero", &zero), ("random", &noise)] {
            let r = solve(&task, &SearchConfig::focal(w, pp)?)?;
            let cost = r.cost.unwrap().to_f64();
            println!(
                "focal w={w:<3} {name:<6}: cost ratio {:6.2}%  expansions {:4} ({:5.1}% of A*)",
                100.0 * cost / record.optimal_cost.to_f64(),
                r.expansions,
                100.0 * r.expansions as f64 / astar.expansions as f64
            );
        }
    }
    Ok(())
}

