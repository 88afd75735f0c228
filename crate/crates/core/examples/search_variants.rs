//! Every search variant on one task, with its expansion counters.
//!
//! cargo run --example search_variants

use gridpath::dataset::{self, MapGenConfig, ObstacleStyle};
use gridpath::oracle::{cf_map, hstar_map, PpmNumerator, TaskOracle};
use gridpath::{solve, Cell, MovePolicy, PTask, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = dataset::generate_map(&MapGenConfig {
        style: ObstacleStyle::RandomRects,
        density: 0.35,
        seed: 11,
        ..MapGenConfig::default()
    })?;
    let free: Vec<Cell> = grid.free_cells().collect();
    let (start, goal) = (free[0], free[free.len() - 1]);
    let task = PTask::new(&grid, start, goal)?;
    let policy = MovePolicy::Permissive;

    let oracle = TaskOracle::compute(&task, policy, PpmNumerator::GridOptimal)?;
    let cf = cf_map(&grid, goal, policy);
    let abs = hstar_map(&grid, goal, policy);

    let configs = [
        ("A*", SearchConfig::astar()),
        ("WA* w=2", SearchConfig::wastar(2.0)?),
        ("WA*+CF", SearchConfig::wastar_cf(&cf)?),
        ("Focal w=2 + PPM", SearchConfig::focal(2.0, &oracle.ppm)?),
        ("GBFS + PPM", SearchConfig::gbfs_ppm(&oracle.ppm)?),
        ("A*+HL (h*)", SearchConfig::astar_hl(&abs)?),
    ];
    println!("{start} -> {goal} on a {}x{} map", grid.height(), grid.width());
    println!("{:<16} {:>10} {:>11} {:>10}", "planner", "cost", "expansions", "generated");
    for (name, cfg) in &configs {
        let r = solve(&task, cfg)?;
        let cost = r.cost.map(|c| format!("{:.3}", c.to_f64())).unwrap_or_else(|| "-".into());
        println!("{name:<16} {cost:>10} {:>11} {:>10}", r.expansions, r.generated);
    }
    Ok(())
}
