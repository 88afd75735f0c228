//! Benchmarking planners against the A* reference.
//!
//! cargo run --release --example benchmark_table

use std::sync::Arc;

use gridpath::bench::{self, BenchInstance, BenchOptions, PlannerSpec};
use gridpath::dataset::{self, MapGenConfig, ObstacleStyle};
use gridpath::MovePolicy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut instances = Vec::new();
    for i in 0..20 {
        let cfg = MapGenConfig {
            style: ObstacleStyle::RandomRects,
            density: 0.35,
            seed: dataset::derive_seed(5, &format!("bench/{i}")),
            ..MapGenConfig::default()
        };
        let grid = Arc::new(dataset::generate_map(&cfg)?);
        let recs = dataset::sample_instances(&grid, &format!("rects-{i}"), 10, 5, MovePolicy::Permissive);
        for record in dataset::filter_hardness(recs, dataset::DEFAULT_MIN_HARDNESS) {
            instances.push(BenchInstance { record, grid: grid.clone() });
        }
    }

    let planners = PlannerSpec::parse_list("wastar:2,wastar-cf:oracle,focal:2:oracle,focal:2:zero,gbfs-ppm:oracle")?;
    let out = bench::evaluate(&instances, &planners, &BenchOptions::default())?;

    println!("{} instances, reference {}", out.report.instances, out.report.reference);
    println!("{:<20} {:>12} {:>16} {:>9}", "planner", "cost ratio", "expansions ratio", "optimal");
    for p in &out.report.planners {
        println!(
            "{:<20} {:>11.2}% {:>15.2}% {:>8.1}%",
            p.planner_id,
            p.cost_ratio_mean.unwrap_or(f64::NAN),
            p.expansions_ratio_mean.unwrap_or(f64::NAN),
            p.optimal_found_ratio
        );
    }
    println!("\nfocal:2:oracle expansions ratio by hardness bucket:");
    for row in out.report.buckets.rows.iter().filter(|r| r.planner_id == "focal:2:oracle") {
        let upper = row.upper.map(|u| format!("{u}")).unwrap_or_else(|| "inf".into());
        let median = row.expansions_ratio.map(|f| format!("{:.1}%", f.median)).unwrap_or_else(|| "-".into());
        println!("  [{}, {upper}): n={:<4} median {median}", row.lower, row.count);
    }
    Ok(())
}
