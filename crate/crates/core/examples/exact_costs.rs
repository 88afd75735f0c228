//! Path costs as (cardinal, diagonal) move counts compared exactly.
//!
//! cargo run --example exact_costs

use gridpath::{octile, Cell, ExactCost};

fn main() {
    let a = ExactCost::new(3, 2);
    let b = ExactCost::new(4, 1);
    println!("{a} = {:.6}", a.to_f64());
    println!("{b} = {:.6}", b.to_f64());
    println!("{a} vs {b}: {:?}", a.compare(b));
    println!("sum: {}", a + b);

    // 99 and 70√2 differ by about 0.005
    let close = (ExactCost::new(99, 0), ExactCost::new(0, 70));
    println!(
        "{} vs {}: {:?} (floats differ by {:.2e})",
        close.0,
        close.1,
        close.0.compare(close.1),
        close.0.to_f64() - close.1.to_f64()
    );

    let h = octile(Cell::new(0, 0), Cell::new(7, 4));
    println!("octile (0,0) -> (7,4): {h} = {:.4}", h.to_f64());
    println!("as JSON: {}", serde_json::to_string(&h).unwrap());
}
