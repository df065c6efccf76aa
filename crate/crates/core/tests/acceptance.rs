//! End-to-end acceptance suite. Each criterion prints exactly one
//! PASS/FAIL line; the test fails at the end if any criterion failed, so a
//! single failure never hides the others. Run with `--nocapture` to see
//! the lines on success too.

use std::time::Instant;

use pickroute_core::baseline::{solve_ancar, BaselineConfig};
use pickroute_core::cost::{edge_cost, CostContext, RobotState, Target};
use pickroute_core::datagen::{
    adapt_demand, default_catalog, delivery_count, generate_instance, synthetic_base, GenSpec,
};
use pickroute_core::domain::compute_domain;
use pickroute_core::io::{format_instance, parse_instance};
use pickroute_core::model::{
    approx_eq_rel, brute_force_optimum, manhattan, validate_instance, validate_solution,
    DeliveryStation, Family, Instance, PickingTask, Point, Robot, RobotId, Solution, StationId,
    TaskId, COST_TOLERANCE,
};
use pickroute_core::rng::{derive_seed, SplitMix64};
use pickroute_core::scheduler::{solve, SchedulerConfig};
use pickroute_core::stats::{mann_whitney_u, MwuMethod};

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn pass(detail: impl Into<String>) -> Self {
        Outcome {
            ok: true,
            detail: detail.into(),
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Outcome {
            ok: false,
            detail: detail.into(),
        }
    }
}

fn grid_extent(tasks: usize) -> i32 {
    (((tasks * 8) as f64).sqrt().ceil() as i32).max(20)
}

fn fleet_size(tasks: usize) -> usize {
    (tasks / 20).clamp(3, 25)
}

/// One seeded instance of the given family and size.
fn make_instance(family: Family, tasks: usize, seed: u64) -> Instance {
    let base = synthetic_base(
        tasks,
        fleet_size(tasks),
        100,
        grid_extent(tasks),
        30,
        derive_seed(seed, 0xBA5E),
    )
    .expect("base generates");
    let catalog = default_catalog();
    let spec = GenSpec::new(&base, family, seed, &catalog);
    generate_instance(&spec).expect("instance generates")
}

fn run_both(instance: &Instance) -> (Solution, Solution) {
    let done = solve(instance, &SchedulerConfig::default()).expect("done-cpta solves");
    let ancar = solve_ancar(instance, &BaselineConfig::default()).expect("a-ncar solves");
    (done, ancar)
}

/// Criterion 1 — feasibility over 200 generated instances of all four
/// families with sizes up to 500 tasks; every solution from both solvers
/// must validate cleanly, within the runtime budget. Also records the wall
/// times of the large instances for criterion 4.
fn criterion_1(timings: &mut Vec<(usize, f64, f64)>) -> Outcome {
    let started = Instant::now();
    let sizes = [12, 20, 35, 60, 90, 140, 200, 280, 380, 500];
    let mut checked = 0usize;
    let mut violations = Vec::new();

    for family in Family::ALL {
        for (si, &tasks) in sizes.iter().enumerate() {
            for rep in 0..5u64 {
                let seed = derive_seed(1001, (checked as u64) << 8 | rep) ^ (si as u64);
                let instance = make_instance(family, tasks, seed);
                let report = validate_instance(&instance);
                if !report.is_valid() {
                    violations.push(format!("{}: invalid instance", instance.name));
                    continue;
                }
                let (done, ancar) = run_both(&instance);
                for solution in [&done, &ancar] {
                    let report = validate_solution(&instance, solution);
                    if !report.is_valid() {
                        violations.push(format!(
                            "{} / {}: {report}",
                            instance.name, solution.algorithm
                        ));
                    }
                }
                if tasks >= 420 {
                    timings.push((tasks, done.wall_time, ancar.wall_time));
                }
                checked += 1;
            }
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    if !violations.is_empty() {
        return Outcome::fail(format!(
            "{} violations out of {checked} instances: {}",
            violations.len(),
            violations.join("; ")
        ));
    }
    if checked != 200 {
        return Outcome::fail(format!("expected 200 instances, ran {checked}"));
    }
    if elapsed >= 300.0 {
        return Outcome::fail(format!("took {elapsed:.1}s, budget is 300s"));
    }
    Outcome::pass(format!(
        "200/200 instances, all solutions valid for both solvers, {elapsed:.1}s"
    ))
}

/// Random instance within the brute-force limits: at most 8 tasks, 3
/// robots, 2 stations.
fn tiny_instance(rng: &mut SplitMix64) -> Instance {
    let m = 1 + (rng.next_u64() % 8) as usize;
    let p = 1 + (rng.next_u64() % 2) as usize;
    let n = 1 + (rng.next_u64() % 3) as usize;
    let cell = |rng: &mut SplitMix64| Point {
        x: rng.gen_range_i32(0, 12),
        y: rng.gen_range_i32(0, 12),
    };
    let robots: Vec<Robot> = (1..=n)
        .map(|i| Robot {
            id: RobotId(i as u32),
            start: cell(rng),
            capacity: 10 + (rng.next_u64() % 40) as u32,
            speed: 0.5 + (rng.next_u64() % 8) as f64 / 4.0,
        })
        .collect();
    let max_cap = robots.iter().map(|r| r.capacity).max().unwrap();
    let tasks: Vec<PickingTask> = (1..=m)
        .map(|i| PickingTask {
            id: TaskId(i as u32),
            pos: cell(rng),
            demand: 1 + (rng.next_u64() % u64::from(max_cap)) as u32,
        })
        .collect();
    let stations: Vec<DeliveryStation> = (1..=p)
        .map(|i| DeliveryStation {
            id: StationId(i as u32),
            pos: cell(rng),
        })
        .collect();
    Instance {
        name: format!("tiny-t{m}-r{n}-d{p}"),
        family: Family::Smt,
        tasks,
        stations,
        robots,
    }
}

/// The domination map computed the obvious way: a full double loop per
/// task, then a second scan collecting every robot within the tolerance.
fn naive_domains(
    states: &[RobotState],
    ctx: &CostContext<'_>,
) -> Option<(Vec<Vec<usize>>, Vec<Vec<TaskId>>)> {
    let mut psi = vec![Vec::new(); ctx.tasks.len()];
    let mut phi = vec![Vec::new(); states.len()];
    for task in ctx.tasks {
        if !ctx.is_remaining(task.id) {
            continue;
        }
        let costs: Vec<f64> = states
            .iter()
            .map(|s| edge_cost(s.pos, Target::Pick(task), s, ctx).seconds())
            .collect();
        let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            return None;
        }
        for (r, &c) in costs.iter().enumerate() {
            if c.is_finite() && approx_eq_rel(c, best, COST_TOLERANCE) {
                psi[task.id.index()].push(r);
                phi[r].push(task.id);
            }
        }
    }
    Some((psi, phi))
}

/// Criterion 2 — tiny-instance oracle: the brute-force optimum never
/// exceeds either heuristic, and compute_domain matches the naive oracle
/// exactly on randomized configurations.
fn criterion_2() -> Outcome {
    let mut rng = SplitMix64::new(20_240_817);
    let mut ratio_sum = 0.0;
    let mut failures = Vec::new();

    for i in 0..50 {
        let instance = tiny_instance(&mut rng);
        assert!(validate_instance(&instance).is_valid(), "{}", instance.name);
        let optimum = match brute_force_optimum(&instance) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("tiny #{i}: brute force failed: {e}"));
                continue;
            }
        };
        let (done, ancar) = run_both(&instance);
        let slack = 1e-9 * optimum.total_cost.max(1.0);
        for solution in [&done, &ancar] {
            if solution.total_cost + slack < optimum.total_cost {
                failures.push(format!(
                    "tiny #{i}: {} cost {} beats the optimum {}",
                    solution.algorithm, solution.total_cost, optimum.total_cost
                ));
            }
        }
        if optimum.total_cost > 0.0 {
            ratio_sum += done.total_cost / optimum.total_cost;
        } else {
            ratio_sum += 1.0;
        }
    }

    let mut domain_checks = 0;
    while domain_checks < 100 {
        let instance = tiny_instance(&mut rng);
        let mut ctx = CostContext::new(&instance.tasks, &instance.stations);
        for task in &instance.tasks {
            if rng.next_u64() % 4 == 0 {
                ctx.remove(task.id);
            }
        }
        let states: Vec<RobotState> = instance
            .robots
            .iter()
            .map(|robot| {
                let mut state = RobotState::new(robot);
                state.pos = Point {
                    x: rng.gen_range_i32(0, 12),
                    y: rng.gen_range_i32(0, 12),
                };
                state.gamma = 1 + (rng.next_u64() % u64::from(robot.capacity)) as u32;
                state
            })
            .collect();

        let naive = naive_domains(&states, &ctx);
        match (compute_domain(&states, &ctx, COST_TOLERANCE), naive) {
            (Ok(domains), Some((psi, phi))) => {
                for task in &instance.tasks {
                    if domains.psi(task.id) != psi[task.id.index()].as_slice() {
                        failures.push(format!(
                            "domain check {domain_checks}: psi({}) differs",
                            task.id
                        ));
                    }
                }
                for r in 0..states.len() {
                    if domains.phi(r) != phi[r].as_slice() {
                        failures.push(format!("domain check {domain_checks}: phi({r}) differs"));
                    }
                }
            }
            (Err(_), None) => {}
            (got, want) => {
                failures.push(format!(
                    "domain check {domain_checks}: feasibility disagrees (lib {}, naive {})",
                    got.is_ok(),
                    want.is_some()
                ));
            }
        }
        domain_checks += 1;
    }

    if !failures.is_empty() {
        return Outcome::fail(failures.join("; "));
    }
    Outcome::pass(format!(
        "50/50 tiny instances within optimum bound (mean done-cpta/optimum = {:.3}), \
         100/100 domain maps equal the naive oracle",
        ratio_sum / 50.0
    ))
}

/// Criterion 3 — comparative cost on the heterogeneous multi-station
/// family: over 20 seeded instances of 100-500 tasks, the dispatcher's
/// mean cost is at most 0.90 of the baseline's mean cost.
fn criterion_3() -> Outcome {
    let started = Instant::now();
    let sizes = [100, 150, 220, 300, 420];
    let mut done_sum = 0.0;
    let mut ancar_sum = 0.0;
    let mut count = 0;
    for (si, &tasks) in sizes.iter().enumerate() {
        for rep in 0..4u64 {
            let seed = derive_seed(3003, (si as u64) << 16 | rep);
            let instance = make_instance(Family::Smt, tasks, seed);
            let (done, ancar) = run_both(&instance);
            done_sum += done.total_cost;
            ancar_sum += ancar.total_cost;
            count += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let ratio = done_sum / ancar_sum;
    if elapsed >= 600.0 {
        return Outcome::fail(format!("took {elapsed:.1}s, budget is 600s"));
    }
    if ratio > 0.90 {
        return Outcome::fail(format!(
            "mean cost ratio done-cpta/a-ncar = {ratio:.4} over {count} SMT instances (need <= 0.90)"
        ));
    }
    Outcome::pass(format!(
        "mean cost ratio done-cpta/a-ncar = {ratio:.4} over {count} SMT instances, {elapsed:.1}s"
    ))
}

/// Criterion 4 — comparative wall time: strictly faster from 420 tasks on
/// (using the runs recorded by criterion 1), at least 5x faster from 800.
fn criterion_4(timings: &[(usize, f64, f64)]) -> Outcome {
    let mut failures = Vec::new();
    for &(tasks, done, ancar) in timings {
        if done >= ancar {
            failures.push(format!(
                "{tasks} tasks: done-cpta {done:.4}s vs a-ncar {ancar:.4}s"
            ));
        }
    }

    let mut ratios = Vec::new();
    for (i, &tasks) in [800usize, 800, 1000, 1000].iter().enumerate() {
        let instance = make_instance(Family::Smt, tasks, derive_seed(4004, i as u64));
        let (done, ancar) = run_both(&instance);
        let ratio = ancar.wall_time / done.wall_time;
        ratios.push(format!("{tasks}t: {ratio:.1}x"));
        if ratio < 5.0 {
            failures.push(format!(
                "{tasks} tasks: a-ncar/done-cpta wall ratio {ratio:.2} (need >= 5)"
            ));
        }
    }

    if !failures.is_empty() {
        return Outcome::fail(failures.join("; "));
    }
    Outcome::pass(format!(
        "done-cpta faster on all {} instances >= 420 tasks; large-instance speedups: {}",
        timings.len(),
        ratios.join(", ")
    ))
}

/// Criterion 5 — dataset fidelity: the station-count rule, the demand
/// adaptation identity, the naming scheme, and byte-identical regeneration.
fn criterion_5() -> Outcome {
    let mut failures = Vec::new();

    if delivery_count(181) != 4 {
        failures.push(format!("delivery_count(181) = {}", delivery_count(181)));
    }
    for (m, want) in [(1, 1), (3, 1), (21, 2), (1000, 5)] {
        if delivery_count(m) != want {
            failures.push(format!(
                "delivery_count({m}) = {} (want {want})",
                delivery_count(m)
            ));
        }
    }
    for demand in 1..=100 {
        if adapt_demand(100.0, demand, 100) != demand {
            failures.push(format!("adapt_demand identity broken at {demand}"));
            break;
        }
    }

    let base = synthetic_base(181, 23, 100, 40, 30, 6006).expect("base generates");
    let catalog = default_catalog();
    let spec = GenSpec::new(&base, Family::Smt, 777, &catalog);
    let instance = generate_instance(&spec).expect("generates");
    if instance.name != "SMT-t181-r23-d4" {
        failures.push(format!("name scheme: got {}", instance.name));
    }
    let again = generate_instance(&spec).expect("generates");
    if format_instance(&instance) != format_instance(&again) {
        failures.push("regeneration with the same seed is not byte-identical".to_string());
    }

    if !failures.is_empty() {
        return Outcome::fail(failures.join("; "));
    }
    Outcome::pass(
        "delivery_count(181)=4, adapt_demand identity, name SMT-t181-r23-d4, \
         byte-identical regeneration"
            .to_string(),
    )
}

/// Criterion 6 — the property suites, re-run here as compact seeded
/// versions so the acceptance binary checks them directly.
fn criterion_6() -> Outcome {
    let mut rng = SplitMix64::new(60_606);
    let mut failures = Vec::new();

    // Manhattan metric axioms.
    for _ in 0..1000 {
        let p = |rng: &mut SplitMix64| Point {
            x: rng.gen_range_i32(-1000, 1000),
            y: rng.gen_range_i32(-1000, 1000),
        };
        let (a, b, c) = (p(&mut rng), p(&mut rng), p(&mut rng));
        if (manhattan(a, b) == 0) != (a == b)
            || manhattan(a, b) != manhattan(b, a)
            || manhattan(a, c) > manhattan(a, b) + manhattan(b, c)
        {
            failures.push(format!("metric axiom violated at {a} {b} {c}"));
            break;
        }
    }

    // Edge-cost case totality, exclusivity of the side conditions, and
    // speed-halving.
    for i in 0..200 {
        let instance = tiny_instance(&mut rng);
        let ctx = CostContext::new(&instance.tasks, &instance.stations);
        let robot = &instance.robots[0];
        let mut state = RobotState::new(robot);
        state.gamma = 1 + (rng.next_u64() % u64::from(robot.capacity)) as u32;
        let task = &instance.tasks[0];
        let cost = edge_cost(state.pos, Target::Pick(task), &state, &ctx);
        let case_ok = match cost.case() {
            1 => task.demand > state.capacity,
            2 | 3 => task.demand <= state.gamma,
            4 | 5 => task.demand > state.gamma && task.demand <= state.capacity,
            _ => false,
        };
        if !case_ok {
            failures.push(format!(
                "case {} side condition violated (rep {i})",
                cost.case()
            ));
            break;
        }
        let mut slow = state.clone();
        slow.speed /= 2.0;
        let slow_cost = edge_cost(state.pos, Target::Pick(task), &slow, &ctx);
        if cost.is_finite() && slow_cost.seconds() != 2.0 * cost.seconds() {
            failures.push(format!("speed halving not exact (rep {i})"));
            break;
        }
    }

    // Uniform speed scaling leaves domains unchanged.
    'scaling: for i in 0..20 {
        let instance = make_instance(Family::ALL[i % 4], 30, derive_seed(660, i as u64));
        let ctx = CostContext::new(&instance.tasks, &instance.stations);
        let states: Vec<RobotState> = instance.robots.iter().map(RobotState::new).collect();
        let base = compute_domain(&states, &ctx, COST_TOLERANCE).expect("servable");
        for factor in [0.5, 2.0, 4.0] {
            let mut scaled_states = states.clone();
            for s in &mut scaled_states {
                s.speed *= factor;
            }
            let scaled = compute_domain(&scaled_states, &ctx, COST_TOLERANCE).expect("servable");
            for r in 0..states.len() {
                if base.phi(r) != scaled.phi(r) {
                    failures.push(format!("phi({r}) changed under speed scaling {factor}"));
                    break 'scaling;
                }
            }
            for t in &instance.tasks {
                if base.psi(t.id) != scaled.psi(t.id) {
                    failures.push(format!(
                        "psi({}) changed under speed scaling {factor}",
                        t.id
                    ));
                    break 'scaling;
                }
            }
        }
    }

    // io round-trip identity on generated instances.
    for i in 0..20 {
        let instance = make_instance(Family::ALL[i % 4], 15 + i, derive_seed(661, i as u64));
        match parse_instance(&format_instance(&instance)) {
            Ok(parsed) if parsed == instance => {}
            Ok(_) => {
                failures.push(format!("io round-trip changed {}", instance.name));
                break;
            }
            Err(e) => {
                failures.push(format!("io round-trip failed on {}: {e}", instance.name));
                break;
            }
        }
    }

    // Mann-Whitney symmetry, and exact agreement with a bitmask
    // enumeration for pooled sizes up to 10.
    for i in 0..100 {
        let na = 1 + (rng.next_u64() % 5) as usize;
        let nb = 1 + (rng.next_u64() % 5) as usize;
        let a: Vec<f64> = (0..na).map(|_| (rng.next_u64() % 8) as f64).collect();
        let b: Vec<f64> = (0..nb).map(|_| (rng.next_u64() % 8) as f64).collect();
        let ab = mann_whitney_u(&a, &b);
        let ba = mann_whitney_u(&b, &a);
        if ab.p_value != ba.p_value {
            failures.push(format!("mwu asymmetric (rep {i})"));
            break;
        }
        if ab.method != MwuMethod::Exact {
            failures.push(format!(
                "mwu not exact for pooled size {} (rep {i})",
                na + nb
            ));
            break;
        }
        if (ab.p_value - bitmask_mwu_p(&a, &b)).abs() > 1e-12 {
            failures.push(format!("mwu exact p disagrees with enumeration (rep {i})"));
            break;
        }
    }

    if !failures.is_empty() {
        return Outcome::fail(failures.join("; "));
    }
    Outcome::pass(
        "metric axioms, cost cases + speed halving, domain scale invariance, \
         io round-trip, mwu symmetry + exact agreement"
            .to_string(),
    )
}

/// Independent exact Mann-Whitney p by enumerating all subsets.
fn bitmask_mwu_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let n = pooled.len();
    let na = a.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[idx[j + 1]] == pooled[idx[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    let offset = (na * (na + 1)) as f64 / 2.0;
    let nm = (na * (n - na)) as f64;
    let extremity = |u: f64| u.min(nm - u);
    let observed: f64 = ranks[..na].iter().sum::<f64>() - offset;
    let e_obs = extremity(observed);
    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let r: f64 = (0..n)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| sorted[k])
            .sum();
        if extremity(r - offset) <= e_obs + 1e-9 {
            hits += 1;
        }
        total += 1;
    }
    hits as f64 / total as f64
}

/// Criterion 7 — determinism: two full harness runs with the same base
/// seed produce byte-identical CSV reports.
fn criterion_7() -> Outcome {
    use pickroute_core::experiment::{
        comparisons_csv, run_experiment, runs_csv, summary_csv, ExperimentConfig,
        ExperimentInstance,
    };
    let base_smt = synthetic_base(30, 4, 100, 22, 30, 70).expect("base generates");
    let base_xmt = synthetic_base(20, 3, 80, 20, 25, 71).expect("base generates");
    let config = ExperimentConfig {
        instances: vec![
            ExperimentInstance::Regenerate {
                base: base_smt,
                family: Family::Smt,
            },
            ExperimentInstance::Regenerate {
                base: base_xmt,
                family: Family::Xmt,
            },
        ],
        variations: 5,
        base_seed: 4242,
        ..ExperimentConfig::default()
    };
    let first = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(format!("first run failed: {e}")),
    };
    let second = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(format!("second run failed: {e}")),
    };
    let pairs = [
        ("runs.csv", runs_csv(&first), runs_csv(&second)),
        ("summary.csv", summary_csv(&first), summary_csv(&second)),
        (
            "comparisons.csv",
            comparisons_csv(&first),
            comparisons_csv(&second),
        ),
    ];
    for (name, a, b) in &pairs {
        if a != b {
            return Outcome::fail(format!("{name} differs between identically seeded runs"));
        }
    }
    Outcome::pass(format!(
        "runs.csv, summary.csv, comparisons.csv byte-identical over {} runs each",
        first.runs.len()
    ))
}

#[test]
fn acceptance() {
    let mut timings = Vec::new();
    let results = [
        (1, criterion_1(&mut timings)),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4(&timings)),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7()),
    ];
    let mut failed = 0;
    for (id, outcome) in &results {
        let verdict = if outcome.ok { "PASS" } else { "FAIL" };
        println!("criterion {id}: {verdict} - {}", outcome.detail);
        if !outcome.ok {
            failed += 1;
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criterion(s) failed");
}
