//! Writing and reading heuristic maps in the HMAP binary format.
//!
//! cargo run --example hmap_exchange

use gridpath::hmap_io::{self, ReadOptions};
use gridpath::oracle::{cf_map, PpmNumerator, TaskOracle};
use gridpath::{Cell, GridMap, HeuristicKind, HeuristicMap, MovePolicy, PTask};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridMap::from_ascii(&["......", ".####.", "......"])?;
    let task = PTask::new(&grid, Cell::new(2, 0), Cell::new(0, 5))?;
    let oracle = TaskOracle::compute(&task, MovePolicy::Permissive, PpmNumerator::GridOptimal)?;
    let cf = cf_map(&grid, task.goal, MovePolicy::Permissive);

    let tmp = tempfile::tempdir()?;
    let dir = tmp.path();
    for map in [&oracle.ppm, &cf] {
        let path = dir.join(hmap_io::file_name("demo/0", map.kind()));
        let bytes = hmap_io::save(map, &path)?;
        let back = hmap_io::load(&path, ReadOptions::default())?;
        // values are stored as f32
        let drift = map.values().iter().zip(back.map.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("{}: {bytes} bytes, kind {}, max drift {drift:.1e}", path.display(), back.map.kind().tag());
    }

    // out-of-band PP values are clamped on read unless raw values are asked for
    let noisy = HeuristicMap::new_continuous(HeuristicKind::Pp, 1, 3, vec![0.5, 0.97, 1.0])?;
    let bytes = hmap_io::to_bytes(&noisy);
    let clamped = hmap_io::read_hmap(bytes.as_slice(), ReadOptions::default())?;
    let raw = hmap_io::read_hmap(bytes.as_slice(), ReadOptions { raw_pp: true })?;
    println!("clamped {:?} ({} changed), raw {:?}", clamped.map.values(), clamped.clamped, raw.map.values());

    Ok(())
}
