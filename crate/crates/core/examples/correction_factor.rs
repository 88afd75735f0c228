//! Correction factors and the perfect heuristic toward a goal.
//!
//! cargo run --example correction_factor

use gridpath::oracle::{cf_map, dijkstra_map, hstar_map};
use gridpath::{octile, solve, Cell, GridMap, MovePolicy, PTask, SearchConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridMap::from_ascii(&[
        "..........",
        "..#######.",
        "........#.",
        "..#####.#.",
        "......#...",
        "......#...",
    ])?;
    let goal = Cell::new(0, 9);
    let policy = MovePolicy::Permissive;
    let cf = cf_map(&grid, goal, policy);
    let hstar = hstar_map(&grid, goal, policy);
    let dist = dijkstra_map(&grid, goal, policy);

    println!("correction factor octile/h* per cell (goal {goal}):");
    for r in 0..grid.height() {
        let row: Vec<String> = (0..grid.width())
            .map(|c| {
                let cell = Cell::new(r, c);
                if grid.is_blocked(cell) {
                    "  ## ".into()
                } else {
                    format!("{:5.2}", cf.get(cell))
                }
            })
            .collect();
        println!("{}", row.join(""));
    }

    let start = Cell::new(4, 3);
    let d = dist.get(start).unwrap();
    println!(
        "\n{start}: octile {:.3}, true distance {:.3}, h* map {:.3}",
        octile(start, goal).to_f64(),
        d.to_f64(),
        hstar.get(start)
    );

    let task = PTask::new(&grid, start, goal)?;
    let a = solve(&task, &SearchConfig::astar())?;
    let w = solve(&task, &SearchConfig::wastar_cf(&cf)?)?;
    println!("A*: {} expansions; WA*+CF: {} expansions, same cost: {}", a.expansions, w.expansions, a.cost == w.cost);
    Ok(())
}
