//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Run with `cargo test --test acceptance`.

mod common;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gridpath::bench::{self, random_map, BenchInstance, BenchOptions, PlannerSpec};
use gridpath::dataset::{self, InstanceRecord, MapGenConfig, ObstacleStyle, Split};
use gridpath::hmap_io::{self, ReadOptions};
use gridpath::oracle::{cf_map, rasterize, PpmNumerator, TaskOracle};
use gridpath::{
    octile, solve, Cell, ExactCost, GridMap, HeuristicKind, HeuristicMap, MovePolicy, PTask, SearchConfig,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POLICY: MovePolicy = MovePolicy::Permissive;
const WEIGHTS: [f64; 4] = [1.1, 1.5, 2.0, 4.0];
const BOUND_TOLERANCE: f64 = 1e-9;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

struct Suite {
    outcomes: Vec<Outcome>,
    // reexpansions summed over every octile A* run in the suite
    astar_runs: u64,
    astar_reexpansions: u64,
}

impl Suite {
    fn record(&mut self, name: &'static str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.outcomes.push(Outcome { name, pass, detail });
    }

    fn astar(&mut self, task: &PTask<'_>) -> gridpath::SearchResult {
        let r = solve(task, &SearchConfig::astar().with_policy(POLICY)).unwrap();
        self.astar_runs += 1;
        self.astar_reexpansions += r.reexpansions;
        r
    }
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

/// Random scatter grid, at most 64×64, density in [0.1, 0.4], with a start
/// and a goal reachable from it (per the relaxation oracle).
struct RandomCase {
    grid: GridMap,
    start: Cell,
    goal: Cell,
    optimal: ExactCost,
}

fn random_cases(n: usize, seed: u64) -> Vec<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let h = rng.random_range(8..=64);
        let w = rng.random_range(8..=64);
        let density = rng.random_range(0.1..=0.4);
        let blocked = (0..h * w).map(|_| rng.random_bool(density)).collect();
        let grid = GridMap::new(h, w, blocked).unwrap();
        let free: Vec<Cell> = grid.free_cells().collect();
        if free.len() < 2 {
            continue;
        }
        let start = free[rng.random_range(0..free.len())];
        let d = common::bellman(&grid, start, POLICY);
        let reachable: Vec<Cell> = grid
            .cells()
            .filter(|&c| c != start && common::dist(&grid, &d, c).is_some())
            .collect();
        if reachable.is_empty() {
            continue;
        }
        let goal = reachable[rng.random_range(0..reachable.len())];
        let optimal = common::dist(&grid, &d, goal).unwrap();
        out.push(RandomCase {
            grid,
            start,
            goal,
            optimal,
        });
    }
    out
}

/// Instances from the dataset generator with hardness ≥ 1.05.
fn hard_instances(n: usize, seed: u64) -> Vec<BenchInstance> {
    let styles = [
        (ObstacleStyle::RandomRects, 0.3),
        (ObstacleStyle::Maze, 0.6),
        (ObstacleStyle::RandomScatter, 0.25),
    ];
    let mut out = Vec::with_capacity(n);
    let mut k = 0u64;
    while out.len() < n {
        let (style, density) = styles[k as usize % styles.len()];
        let cfg = MapGenConfig {
            style,
            density,
            seed: dataset::derive_seed(seed, &format!("accept/{k}")),
            ..MapGenConfig::default()
        };
        let grid = Arc::new(dataset::generate_map(&cfg).unwrap());
        let id = format!("{style}-{k}");
        let recs = dataset::sample_instances(&grid, &id, 10, seed, POLICY);
        for record in dataset::filter_hardness(recs, dataset::DEFAULT_MIN_HARDNESS) {
            if out.len() < n {
                out.push(BenchInstance {
                    record,
                    grid: grid.clone(),
                });
            }
        }
        k += 1;
    }
    out
}

fn optimality(suite: &mut Suite, cases: &[RandomCase], oracle_time: Duration) {
    let t0 = Instant::now();
    let mut equal = 0;
    for c in cases {
        let task = PTask::new(&c.grid, c.start, c.goal).unwrap();
        let r = suite.astar(&task);
        if r.cost == Some(c.optimal) {
            let path = r.path.as_ref().unwrap();
            common::check_path(&c.grid, path, c.start, c.goal, POLICY, c.optimal);
            equal += 1;
        }
    }
    let elapsed = t0.elapsed() + oracle_time;
    suite.record(
        "optimality oracle equivalence",
        equal == cases.len() && elapsed <= Duration::from_secs(120),
        format!(
            "A* cost equals relaxation cost on {equal}/{} random grids (8..64 side, density 0.1..0.4); {} including the oracle (limit 120 s)",
            cases.len(),
            secs(elapsed)
        ),
    );
}

fn bounded_suboptimality(suite: &mut Suite, cases: &[RandomCase]) {
    let t0 = Instant::now();
    let mut checks = 0usize;
    let mut violations = Vec::new();
    let mut worst = 0.0f64;
    for (i, c) in cases.iter().enumerate() {
        let task = PTask::new(&c.grid, c.start, c.goal).unwrap();
        let (h, w) = (c.grid.height(), c.grid.width());
        let oracle = TaskOracle::compute(&task, POLICY, PpmNumerator::GridOptimal).unwrap().ppm;
        let zero = HeuristicMap::uniform(HeuristicKind::Pp, h, w, 0.0).unwrap();
        let noise = random_map(&c.grid, c.goal, HeuristicKind::Pp, i as u64);
        let opt = c.optimal.to_f64();
        for wt in WEIGHTS {
            let mut runs = vec![("wastar", solve(&task, &SearchConfig::wastar(wt).unwrap()).unwrap())];
            for (name, pp) in [("focal/oracle", &oracle), ("focal/zero", &zero), ("focal/random", &noise)] {
                let cfg = SearchConfig::focal(wt, pp).unwrap().with_invariant_checks(true);
                runs.push((name, solve(&task, &cfg).unwrap()));
            }
            for (name, r) in runs {
                checks += 1;
                let cost = r.cost.map(ExactCost::to_f64).unwrap_or(f64::INFINITY);
                worst = worst.max(cost / opt);
                if cost > wt * opt + BOUND_TOLERANCE {
                    violations.push(format!("case {i} {name} w={wt}: {cost} > {wt}·{opt}"));
                }
            }
        }
    }
    suite.record(
        "bounded suboptimality",
        violations.is_empty(),
        format!(
            "{} of {checks} runs within w·optimal + 1e-9 (WA*, Focal with oracle/zero/random PPM, w in 1.1/1.5/2/4, {} instances); worst ratio {worst:.4}; {}{}",
            checks - violations.len(),
            cases.len(),
            secs(t0.elapsed()),
            violations.first().map(|v| format!("; first violation {v}")).unwrap_or_default()
        ),
    );
}

fn oracle_cf(suite: &mut Suite, cases: &[RandomCase]) {
    let mut optimal = 0usize;
    let (mut cf_exp, mut astar_exp) = (0u64, 0u64);
    for c in cases {
        let task = PTask::new(&c.grid, c.start, c.goal).unwrap();
        let cf = cf_map(&c.grid, c.goal, POLICY);
        let r = solve(&task, &SearchConfig::wastar_cf(&cf).unwrap()).unwrap();
        let a = suite.astar(&task);
        if r.cost == Some(c.optimal) {
            optimal += 1;
        }
        cf_exp += r.expansions;
        astar_exp += a.expansions;
    }
    let n = cases.len() as f64;
    let ratio = 100.0 * optimal as f64 / n;
    let (cf_mean, a_mean) = (cf_exp as f64 / n, astar_exp as f64 / n);
    suite.record(
        "oracle-CF optimality",
        optimal == cases.len() && cf_mean <= a_mean,
        format!("optimal found {ratio:.2}%; mean expansions WA*+CF {cf_mean:.1} vs A* {a_mean:.1}"),
    );
}

fn oracle_ppm(suite: &mut Suite, instances: &[BenchInstance]) {
    let t0 = Instant::now();
    let planners = [PlannerSpec::new(gridpath::Variant::Focal, 2.0, Some(bench::MapSource::Oracle))];
    let out = bench::evaluate(instances, &planners, &BenchOptions::default()).unwrap();
    let elapsed = t0.elapsed();
    for r in out.rows.iter().filter(|r| r.planner_id == "astar") {
        suite.astar_runs += 1;
        suite.astar_reexpansions += r.reexpansions;
    }
    let fs = out.report.planners.iter().find(|p| p.planner_id == "focal:2:oracle").unwrap();
    let exp = fs.expansions_ratio_mean.unwrap_or(f64::INFINITY);
    let cost = fs.cost_ratio_mean.unwrap_or(f64::INFINITY);
    let min_h = instances.iter().map(|i| i.record.hardness).fold(f64::INFINITY, f64::min);
    suite.record(
        "oracle-PPM efficiency",
        fs.failures == 0 && exp < 60.0 && cost <= 102.0 && elapsed <= Duration::from_secs(300),
        format!(
            "FS+PPM w=2 on {} generated instances (hardness >= {min_h:.3}): expansions ratio {exp:.2}% (limit < 60), cost ratio {cost:.3}% (limit <= 102), failures {}; {} (limit 300 s)",
            instances.len(),
            fs.failures,
            secs(elapsed)
        ),
    );
}

fn ppm_invariants(suite: &mut Suite, instances: &[BenchInstance]) {
    let (mut theta_cells, mut nonzero, mut shortest) = (0usize, 0usize, 0usize);
    let mut bad = Vec::new();
    for inst in instances {
        let grid = inst.grid.as_ref();
        let task = inst.record.task(grid).unwrap();
        let o = TaskOracle::compute(&task, POLICY, PpmNumerator::GridOptimal).unwrap();
        let opt = o.d_start.get(task.goal).unwrap();
        for c in rasterize(&o.theta) {
            theta_cells += 1;
            if o.ppm.get(c) != 1.0 {
                bad.push(format!("{}: theta cell {c} has pp {}", inst.record.id, o.ppm.get(c)));
            }
        }
        for c in grid.cells() {
            let v = o.ppm.get(c);
            if v != 0.0 {
                nonzero += 1;
                if !(0.95..=1.0).contains(&v) {
                    bad.push(format!("{}: pp {v} at {c}", inst.record.id));
                }
            }
            if let (Some(a), Some(b)) = (o.d_start.get(c), o.d_goal.get(c)) {
                if a + b == opt {
                    shortest += 1;
                    if v != 1.0 {
                        bad.push(format!("{}: shortest-path cell {c} has pp {v}", inst.record.id));
                    }
                }
            }
        }
    }
    suite.record(
        "PPM construction invariants",
        bad.is_empty(),
        format!(
            "{} instances: {theta_cells} rasterized Theta* cells, {nonzero} nonzero cells, {shortest} shortest-path cells checked; {} violations{}",
            instances.len(),
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
        ),
    );
}

fn hardness_filter(suite: &mut Suite) {
    let styles = [
        (ObstacleStyle::RandomRects, 0.3),
        (ObstacleStyle::Maze, 0.6),
        (ObstacleStyle::RandomScatter, 0.25),
    ];
    let mut grids: HashMap<String, GridMap> = HashMap::new();
    let mut records: Vec<InstanceRecord> = Vec::new();
    let mut base = 0usize;
    let seed = 7;
    let (splits, rejected) = loop {
        for _ in 0..20 {
            let (style, density) = styles[base % styles.len()];
            let cfg = MapGenConfig {
                style,
                density,
                seed: dataset::derive_seed(seed, &format!("base/{base}")),
                ..MapGenConfig::default()
            };
            let map = dataset::generate_map(&cfg).unwrap();
            let base_id = format!("{style}-{base:04}");
            for (v, m) in dataset::augment(&map).unwrap().into_iter().enumerate() {
                let id = dataset::augmented_map_id(&base_id, v);
                records.extend(dataset::sample_instances(&m, &id, dataset::DEFAULT_INSTANCES_PER_MAP, seed, POLICY));
                grids.insert(id, m);
            }
            base += 1;
        }
        let (splits, rejected) = dataset::build_splits(records.clone(), seed, dataset::DEFAULT_MIN_HARDNESS);
        if splits.test.len() >= 1000 {
            break (splits, rejected);
        }
    };
    // recompute hardness of every test record from an independent search
    let mut below = 0;
    for r in &splits.test {
        let grid = &grids[&r.map_id];
        let res = solve(&PTask::new(grid, r.start, r.goal).unwrap(), &SearchConfig::astar()).unwrap();
        let h = res.cost.unwrap().to_f64() / octile(r.start, r.goal).to_f64();
        if h < 1.05 || r.hardness < 1.05 || r.split != Some(Split::Test) {
            below += 1;
        }
    }
    let mut split_of_base: HashMap<&str, HashSet<Split>> = HashMap::new();
    for r in splits.train.iter().chain(&splits.val).chain(&splits.test) {
        split_of_base.entry(&r.base_map_id).or_default().insert(r.split.unwrap());
    }
    let mixed = split_of_base.values().filter(|s| s.len() > 1).count();

    let empty = GridMap::empty(64, 64);
    let empty_recs: Vec<InstanceRecord> = (0..200)
        .filter_map(|k| dataset::sample_instance(&empty, "empty", k, POLICY))
        .collect();
    let all_unit = empty_recs.iter().all(|r| r.hardness == 1.0);
    let kept = dataset::filter_hardness(empty_recs.clone(), dataset::DEFAULT_MIN_HARDNESS).len();

    suite.record(
        "hardness filter",
        splits.test.len() >= 1000 && below == 0 && mixed == 0 && all_unit && kept == 0,
        format!(
            "{} base maps x16 augmentations, {} records; test split {} records ({rejected} rejected), {below} below 1.05 on recomputation; {mixed} base maps split across subsets; empty grid: {}/{} hardness exactly 1.0, {kept} kept",
            base,
            records.len(),
            splits.test.len(),
            empty_recs.iter().filter(|r| r.hardness == 1.0).count(),
            empty_recs.len()
        ),
    );
}

fn random_hmap(rng: &mut ChaCha8Rng) -> HeuristicMap {
    let kind = [HeuristicKind::Cf, HeuristicKind::Pp, HeuristicKind::Abs][rng.random_range(0..3)];
    let (h, w) = (rng.random_range(1..=64), rng.random_range(1..=64));
    let values: Vec<f64> = (0..h * w)
        .map(|_| match kind {
            HeuristicKind::Cf => match rng.random_range(0..10) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random::<f64>(),
            },
            HeuristicKind::Pp => match rng.random_range(0..3) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random_range(0.95..=1.0),
            },
            HeuristicKind::Abs => match rng.random_range(0..20) {
                0 => gridpath::search::H_SENTINEL,
                _ => rng.random_range(0.0..5000.0),
            },
        })
        .collect();
    HeuristicMap::new(kind, h, w, values).unwrap()
}

fn format_round_trips(suite: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut hmap_ok = 0;
    for _ in 0..1000 {
        let map = random_hmap(&mut rng);
        let first = hmap_io::to_bytes(&map);
        let decoded = hmap_io::read_hmap(first.as_slice(), ReadOptions::default()).unwrap();
        let second = hmap_io::to_bytes(&decoded.map);
        let payload_exact = decoded
            .map
            .values()
            .iter()
            .zip(first[hmap_io::HEADER_LEN..].chunks_exact(4))
            .all(|(v, b)| (*v as f32).to_bits() == u32::from_le_bytes(b.try_into().unwrap()));
        if first == second
            && payload_exact
            && decoded.clamped == 0
            && first.len() == 20 + 4 * map.height() * map.width()
        {
            hmap_ok += 1;
        }
    }

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "map"))
        .collect();
    names.sort();
    let mut map_ok = 0;
    let mut map_checks = 0;
    let mut notes = Vec::new();
    for path in &names {
        let text = std::fs::read_to_string(path).unwrap();
        let grid = GridMap::from_movingai(&text).unwrap();
        // symbol-level oracle over the raw rows
        let rows: Vec<&str> = text.lines().skip(4).collect();
        let symbols_match = rows.len() == grid.height()
            && rows.iter().enumerate().all(|(r, row)| {
                row.chars().enumerate().all(|(c, ch)| {
                    grid.is_blocked(Cell::new(r, c)) == matches!(ch, '@' | 'O' | 'T' | 'W' | 'S')
                })
            });
        for (label, g) in [
            ("native", grid.clone()),
            ("64", grid.rescale(64, 64)),
            ("128", grid.rescale(128, 128)),
        ] {
            map_checks += 1;
            let back = GridMap::from_movingai(&g.to_movingai()).unwrap();
            let dims_ok = label == "native" || (g.height(), g.width()) == (label.parse().unwrap(), label.parse().unwrap());
            if back == g && dims_ok && symbols_match {
                map_ok += 1;
            } else {
                notes.push(format!("{} {label}", path.file_name().unwrap().to_string_lossy()));
            }
        }
    }
    suite.record(
        "format round-trips",
        hmap_ok == 1000 && names.len() == 3 && map_ok == map_checks,
        format!(
            "HMAP bit-exact {hmap_ok}/1000; MovingAI {map_ok}/{map_checks} round-trips over {} fixture maps at native, 64 and 128{}",
            names.len(),
            if notes.is_empty() { String::new() } else { format!("; failed: {}", notes.join(", ")) }
        ),
    );
}

fn exact_comparator(suite: &mut Suite) {
    const MAX: u32 = 200;
    // floor(√2·2^100) as 128-bit fixed point; truncation error < 200·2^-100,
    // far below the smallest gap |a - b√2| ≈ 1.7e-3 for counts up to 200
    let root2: u128 = (BigUint::from(2u32) << 200u32).sqrt().try_into().unwrap();
    let n = (MAX + 1) as usize;
    let mut costs = Vec::with_capacity(n * n);
    let mut fixed = Vec::with_capacity(n * n);
    for c in 0..=MAX {
        for d in 0..=MAX {
            costs.push(ExactCost::new(c, d));
            fixed.push(((c as u128) << 100) + d as u128 * root2);
        }
    }
    let t0 = Instant::now();
    let mut disagreements = 0u64;
    for i in 0..costs.len() {
        let (a, fa) = (costs[i], fixed[i]);
        for j in 0..costs.len() {
            let expected = if i == j { Ordering::Equal } else { fa.cmp(&fixed[j]) };
            if a.compare(costs[j]) != expected {
                disagreements += 1;
            }
        }
    }
    let total = (costs.len() * costs.len()) as u64;
    suite.record(
        "exact comparator",
        disagreements == 0,
        format!(
            "{} of {total} ordered pairs with counts <= {MAX} agree with the 128-bit fixed-point oracle; {}",
            total - disagreements,
            secs(t0.elapsed())
        ),
    );
}

fn main() {
    let t0 = Instant::now();
    let mut suite = Suite {
        outcomes: Vec::new(),
        astar_runs: 0,
        astar_reexpansions: 0,
    };
    let t_cases = Instant::now();
    let cases = random_cases(500, 2024);
    let oracle_time = t_cases.elapsed();
    let hard = hard_instances(500, 31);

    optimality(&mut suite, &cases, oracle_time);
    bounded_suboptimality(&mut suite, &cases);
    oracle_cf(&mut suite, &cases);
    oracle_ppm(&mut suite, &hard);
    ppm_invariants(&mut suite, &hard[..200]);
    hardness_filter(&mut suite);
    format_round_trips(&mut suite);
    exact_comparator(&mut suite);
    let reexp = suite.astar_reexpansions;
    let runs = suite.astar_runs;
    suite.record(
        "no re-expansion",
        reexp == 0 && runs > 0,
        format!("{reexp} re-expansions across {runs} octile A* runs in this suite"),
    );

    let failed: Vec<&Outcome> = suite.outcomes.iter().filter(|o| !o.pass).collect();
    println!(
        "acceptance: {}/{} criteria passed in {}",
        suite.outcomes.len() - failed.len(),
        suite.outcomes.len(),
        secs(t0.elapsed())
    );
    if !failed.is_empty() {
        for o in failed {
            eprintln!("failed: {} ({})", o.name, o.detail);
        }
        std::process::exit(1);
    }
}
