//! Map generation, augmentation, instance sampling and splitting.
//!
//! cargo run --example dataset_pipeline

use gridpath::dataset::{self, MapGenConfig, ObstacleStyle};
use gridpath::MovePolicy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 42;
    let mut records = Vec::new();
    for (i, style) in [ObstacleStyle::RandomRects, ObstacleStyle::RandomScatter, ObstacleStyle::Maze]
        .into_iter()
        .cycle()
        .take(12)
        .enumerate()
    {
        let cfg = MapGenConfig {
            style,
            density: if style == ObstacleStyle::Maze { 0.6 } else { 0.3 },
            seed: dataset::derive_seed(seed, &format!("map/{i}")),
            ..MapGenConfig::default()
        };
        let base = dataset::generate_map(&cfg)?;
        let base_id = format!("{style}-s{seed}-{i:05}");
        if i < 3 {
            println!("{base_id}: {:.0}% blocked", 100.0 * base.blocked_fraction());
        }
        for (v, map) in dataset::augment(&base)?.into_iter().enumerate() {
            let id = dataset::augmented_map_id(&base_id, v);
            records.extend(dataset::sample_instances(&map, &id, 10, seed, MovePolicy::Permissive));
        }
    }
    let total = records.len();
    let (splits, rejected) = dataset::build_splits(records, seed, dataset::DEFAULT_MIN_HARDNESS);
    println!(
        "{total} instances: train {}, val {}, test {} ({rejected} easy test instances dropped)",
        splits.train.len(),
        splits.val.len(),
        splits.test.len()
    );

    let mut out = Vec::new();
    dataset::write_jsonl(&splits.test[..2.min(splits.test.len())], &mut out)?;
    print!("{}", String::from_utf8(out)?);
    Ok(())
}
