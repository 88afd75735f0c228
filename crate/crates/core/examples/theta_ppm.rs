//! Any-angle paths, their rasterization and the resulting PPM.
//!
//! cargo run --example theta_ppm

use gridpath::oracle::{rasterize, PpmNumerator, TaskOracle};
use gridpath::{Cell, GridMap, MovePolicy, PTask};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridMap::from_ascii(&[
        "................",
        "......#.........",
        "......#....##...",
        "......#....##...",
        "..####.....##...",
        "...........##...",
        "................",
    ])?;
    let task = PTask::new(&grid, Cell::new(6, 0), Cell::new(0, 15))?;
    let oracle = TaskOracle::compute(&task, MovePolicy::Permissive, PpmNumerator::GridOptimal)?;

    let waypoints: Vec<String> = oracle.theta.waypoints.iter().map(|c| c.to_string()).collect();
    println!("Theta* waypoints: {}", waypoints.join(" -> "));
    println!(
        "any-angle cost {:.3}, grid optimum {:.3}",
        oracle.theta.cost,
        oracle.d_start.get(task.goal).unwrap().to_f64()
    );

    let raster = rasterize(&oracle.theta);
    println!("\nPPM (* = Theta* raster, digit = hundredths above 0.9, . = zero):");
    for r in 0..grid.height() {
        let row: String = (0..grid.width())
            .map(|c| {
                let cell = Cell::new(r, c);
                let v = oracle.ppm.get(cell);
                if grid.is_blocked(cell) {
                    '#'
                } else if raster.contains(&cell) {
                    '*'
                } else if v == 0.0 {
                    '.'
                } else {
                    char::from_digit(((v - 0.9) * 100.0).floor().min(9.0) as u32, 10).unwrap()
                }
            })
            .collect();
        println!("{row}");
    }
    Ok(())
}
