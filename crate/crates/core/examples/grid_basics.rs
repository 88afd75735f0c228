//! Parsing maps, movement rules and the MovingAI format.
//!
//! cargo run --example grid_basics

use gridpath::{Cell, GridMap, MovePolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridMap::from_ascii(&[
        "....#...",
        ".##.#.#.",
        ".#....#.",
        ".#.##...",
        "...#....",
    ])?;
    println!("{}x{} grid, {:.0}% blocked", grid.height(), grid.width(), 100.0 * grid.blocked_fraction());

    let cell = Cell::new(2, 2);
    for policy in [MovePolicy::Permissive, MovePolicy::NoCornerCutting] {
        let moves: Vec<String> = grid
            .neighbors(cell, policy)
            .into_iter()
            .map(|(n, kind)| format!("{n} {:?}", kind))
            .collect();
        println!("{policy:?} moves from {cell}: {}", moves.join(", "));
    }

    // squeezing between two diagonal blocks is a policy question
    let (a, b) = (Cell::new(1, 3), Cell::new(2, 4));
    for policy in [MovePolicy::Permissive, MovePolicy::NoCornerCutting] {
        println!("{a} -> {b} under {policy:?}: {:?}", grid.move_cost(a, b, policy));
    }

    let text = grid.to_movingai();
    println!("\nMovingAI form:\n{text}");
    assert_eq!(GridMap::from_movingai(&text)?, grid);

    let big = grid.rescale(10, 16);
    println!("rescaled to {}x{}:\n{big}", big.height(), big.width());
    Ok(())
}
