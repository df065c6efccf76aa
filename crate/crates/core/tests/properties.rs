//! Property suites over the geometry, cost cases, solvers, io, and stats.

use proptest::prelude::*;

use pickroute_core::baseline::{improve_route, path_meters, solve_ancar, BaselineConfig};
use pickroute_core::cost::{edge_cost, nearest_station, CostContext, EdgeCost, RobotState, Target};
use pickroute_core::datagen::{default_catalog, generate_instance, synthetic_base, GenSpec};
use pickroute_core::domain::compute_domain;
use pickroute_core::io::{format_instance, parse_instance};
use pickroute_core::model::{
    manhattan, route_cost, validate_instance, validate_solution, DeliveryStation, Family, Instance,
    PickingTask, Point, Robot, RobotId, StationId, TaskId, COST_TOLERANCE,
};
use pickroute_core::scheduler::{solve, SchedulerConfig};
use pickroute_core::stats::mann_whitney_u;

fn point() -> impl Strategy<Value = Point> {
    (any::<i32>(), any::<i32>()).prop_map(|(x, y)| Point { x, y })
}

proptest! {
    #[test]
    fn manhattan_is_non_negative_and_identity(a in point(), b in point()) {
        let d = manhattan(a, b);
        prop_assert_eq!(d == 0, a == b);
    }

    #[test]
    fn manhattan_is_symmetric(a in point(), b in point()) {
        prop_assert_eq!(manhattan(a, b), manhattan(b, a));
    }

    #[test]
    fn manhattan_satisfies_the_triangle_inequality(a in point(), b in point(), c in point()) {
        prop_assert!(manhattan(a, c) <= manhattan(a, b) + manhattan(b, c));
    }
}

// ---------------------------------------------------------------------------
// Edge cost cases
// ---------------------------------------------------------------------------

/// A straightforward re-derivation of the five-case estimate, written as a
/// direct scan without the incremental bookkeeping of the library version.
fn oracle_edge_cost(
    from: Point,
    task: &PickingTask,
    state: &RobotState,
    ctx: &CostContext<'_>,
) -> EdgeCost {
    if task.demand > state.capacity {
        return EdgeCost::Infeasible;
    }
    let other_fits = |budget: u32| {
        ctx.remaining_ids()
            .any(|t| t != task.id && ctx.tasks[t.index()].demand <= budget)
    };
    let tail = manhattan(task.pos, nearest_station(task.pos, ctx.stations).pos);
    if state.gamma >= task.demand {
        let leg = manhattan(from, task.pos);
        if other_fits(state.gamma - task.demand) {
            EdgeCost::Travel(leg as f64 / state.speed)
        } else {
            EdgeCost::TravelThenDeliver((leg + tail) as f64 / state.speed)
        }
    } else {
        let via = nearest_station(from, ctx.stations);
        let detour = manhattan(from, via.pos) + manhattan(via.pos, task.pos);
        if other_fits(state.capacity - task.demand) {
            EdgeCost::DeliverThenTravel(detour as f64 / state.speed)
        } else {
            EdgeCost::DeliverTravelDeliver((detour + tail) as f64 / state.speed)
        }
    }
}

fn small_point() -> impl Strategy<Value = Point> {
    (0..60i32, 0..60i32).prop_map(|(x, y)| Point { x, y })
}

#[derive(Debug, Clone)]
struct CostScenario {
    tasks: Vec<PickingTask>,
    stations: Vec<DeliveryStation>,
    removed: Vec<usize>,
    robot: Robot,
    gamma: u32,
    from: Point,
    target: usize,
}

fn cost_scenario() -> impl Strategy<Value = CostScenario> {
    let tasks = prop::collection::vec((small_point(), 1..120u32), 1..8);
    let stations = prop::collection::vec(small_point(), 1..4);
    (tasks, stations, any::<u64>()).prop_flat_map(|(task_data, station_pos, salt)| {
        let m = task_data.len();
        let tasks: Vec<PickingTask> = task_data
            .iter()
            .enumerate()
            .map(|(i, &(pos, demand))| PickingTask {
                id: TaskId(i as u32 + 1),
                pos,
                demand,
            })
            .collect();
        let stations: Vec<DeliveryStation> = station_pos
            .iter()
            .enumerate()
            .map(|(i, &pos)| DeliveryStation {
                id: StationId(i as u32 + 1),
                pos,
            })
            .collect();
        (
            Just(tasks),
            Just(stations),
            prop::collection::vec(0..m, 0..m),
            (1..150u32, small_point(), small_point()),
            0..m,
            Just(salt),
        )
            .prop_map(
                |(tasks, stations, removed, (capacity, start, from), target, salt)| {
                    let gamma = (salt % u64::from(capacity) + 1) as u32;
                    CostScenario {
                        tasks,
                        stations,
                        removed,
                        robot: Robot {
                            id: RobotId(1),
                            start,
                            capacity,
                            speed: 1.0 + (salt % 7) as f64 / 4.0,
                        },
                        gamma,
                        from,
                        target,
                    }
                },
            )
    })
}

proptest! {
    #[test]
    fn edge_cost_matches_the_direct_derivation(scenario in cost_scenario()) {
        let mut ctx = CostContext::new(&scenario.tasks, &scenario.stations);
        for &i in &scenario.removed {
            let id = TaskId(i as u32 + 1);
            if id.0 != scenario.target as u32 + 1 && ctx.is_remaining(id) {
                ctx.remove(id);
            }
        }
        let mut state = RobotState::new(&scenario.robot);
        state.gamma = scenario.gamma.min(state.capacity);
        let task = &scenario.tasks[scenario.target];

        let got = edge_cost(scenario.from, Target::Pick(task), &state, &ctx);
        let want = oracle_edge_cost(scenario.from, task, &state, &ctx);
        prop_assert_eq!(got.case(), want.case());
        if want.is_finite() {
            prop_assert!((got.seconds() - want.seconds()).abs() < 1e-12);
        }

        // Case side conditions.
        match got.case() {
            1 => prop_assert!(task.demand > state.capacity),
            2 | 3 => prop_assert!(task.demand <= state.gamma),
            4 | 5 => prop_assert!(task.demand > state.gamma && task.demand <= state.capacity),
            _ => unreachable!(),
        }

        // Station targets are always plain travel.
        let station = &scenario.stations[0];
        let st = edge_cost(scenario.from, Target::Station(station), &state, &ctx);
        prop_assert_eq!(st.case(), 2);
        let direct = manhattan(scenario.from, station.pos) as f64 / state.speed;
        prop_assert!((st.seconds() - direct).abs() < 1e-12);
    }

    #[test]
    fn halving_the_speed_doubles_every_finite_estimate(scenario in cost_scenario()) {
        let ctx = CostContext::new(&scenario.tasks, &scenario.stations);
        let mut state = RobotState::new(&scenario.robot);
        state.gamma = scenario.gamma.min(state.capacity);
        let mut slow = state.clone();
        slow.speed = state.speed / 2.0;

        let task = &scenario.tasks[scenario.target];
        let fast_cost = edge_cost(scenario.from, Target::Pick(task), &state, &ctx);
        let slow_cost = edge_cost(scenario.from, Target::Pick(task), &slow, &ctx);
        prop_assert_eq!(fast_cost.case(), slow_cost.case());
        if fast_cost.is_finite() {
            prop_assert_eq!(slow_cost.seconds(), 2.0 * fast_cost.seconds());
        }
    }
}

// ---------------------------------------------------------------------------
// Generated instances: solvers, domains, io
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct GenParams {
    tasks: usize,
    robots: usize,
    capacity: u32,
    family: Family,
    base_seed: u64,
    seed: u64,
}

fn gen_params() -> impl Strategy<Value = GenParams> {
    (
        1..40usize,
        1..6usize,
        20..200u32,
        0..4usize,
        any::<u64>(),
        any::<u64>(),
    )
        .prop_map(
            |(tasks, robots, capacity, family, base_seed, seed)| GenParams {
                tasks,
                robots,
                capacity,
                family: Family::ALL[family],
                base_seed,
                seed,
            },
        )
}

fn build_instance(params: GenParams) -> Option<Instance> {
    let base = synthetic_base(
        params.tasks,
        params.robots,
        params.capacity,
        24,
        (params.capacity / 3).max(1),
        params.base_seed,
    )
    .ok()?;
    let catalog = default_catalog();
    let spec = GenSpec::new(&base, params.family, params.seed, &catalog);
    generate_instance(&spec).ok()
}

fn scale_speeds(instance: &Instance, factor: f64) -> Instance {
    let mut scaled = instance.clone();
    for robot in &mut scaled.robots {
        robot.speed *= factor;
    }
    scaled
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_outputs_always_validate(params in gen_params()) {
        let instance = match build_instance(params) {
            Some(i) => i,
            None => return Ok(()),
        };
        prop_assume!(validate_instance(&instance).is_valid());

        let done = solve(&instance, &SchedulerConfig::default()).unwrap();
        let report = validate_solution(&instance, &done);
        prop_assert!(report.is_valid(), "done-cpta: {report}");

        let ancar = solve_ancar(&instance, &BaselineConfig::default()).unwrap();
        let report = validate_solution(&instance, &ancar);
        prop_assert!(report.is_valid(), "a-ncar: {report}");
    }

    #[test]
    fn halving_all_speeds_doubles_both_solvers_exactly(params in gen_params()) {
        let instance = match build_instance(params) {
            Some(i) => i,
            None => return Ok(()),
        };
        let slowed = scale_speeds(&instance, 0.5);

        let fast = solve(&instance, &SchedulerConfig::default()).unwrap();
        let slow = solve(&slowed, &SchedulerConfig::default()).unwrap();
        prop_assert_eq!(&fast.routes, &slow.routes);
        prop_assert_eq!(slow.total_cost, 2.0 * fast.total_cost);

        let fast = solve_ancar(&instance, &BaselineConfig::default()).unwrap();
        let slow = solve_ancar(&slowed, &BaselineConfig::default()).unwrap();
        prop_assert_eq!(&fast.routes, &slow.routes);
        prop_assert_eq!(slow.total_cost, 2.0 * fast.total_cost);
    }

    #[test]
    fn uniform_speed_scaling_preserves_domains(params in gen_params(), shift in 0..4u32) {
        let instance = match build_instance(params) {
            Some(i) => i,
            None => return Ok(()),
        };
        let factor = f64::from(1u32 << shift) / 2.0; // 0.5, 1, 2, 4
        let scaled = scale_speeds(&instance, factor);

        let ctx = CostContext::new(&instance.tasks, &instance.stations);
        let states: Vec<RobotState> = instance.robots.iter().map(RobotState::new).collect();
        let base = compute_domain(&states, &ctx, COST_TOLERANCE).unwrap();

        let scaled_ctx = CostContext::new(&scaled.tasks, &scaled.stations);
        let scaled_states: Vec<RobotState> =
            scaled.robots.iter().map(RobotState::new).collect();
        let other = compute_domain(&scaled_states, &scaled_ctx, COST_TOLERANCE).unwrap();

        for r in 0..instance.robots.len() {
            prop_assert_eq!(base.phi(r), other.phi(r), "robot {}", r);
        }
        for t in &instance.tasks {
            prop_assert_eq!(base.psi(t.id), other.psi(t.id), "task {}", t.id);
        }
    }

    #[test]
    fn format_then_parse_is_the_identity(params in gen_params()) {
        let instance = match build_instance(params) {
            Some(i) => i,
            None => return Ok(()),
        };
        let parsed = parse_instance(&format_instance(&instance)).unwrap();
        prop_assert_eq!(parsed, instance);
    }
}

// ---------------------------------------------------------------------------
// Two-opt
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn two_opt_never_worsens_and_keeps_the_tasks(
        task_pos in prop::collection::vec(small_point(), 1..12),
        station_pos in prop::collection::vec(small_point(), 1..3),
        start in small_point(),
        order_seed in any::<u64>(),
    ) {
        let tasks: Vec<PickingTask> = task_pos
            .iter()
            .enumerate()
            .map(|(i, &pos)| PickingTask { id: TaskId(i as u32 + 1), pos, demand: 1 })
            .collect();
        let stations: Vec<DeliveryStation> = station_pos
            .iter()
            .enumerate()
            .map(|(i, &pos)| DeliveryStation { id: StationId(i as u32 + 1), pos })
            .collect();
        let ctx = CostContext::new(&tasks, &stations);

        let mut order: Vec<TaskId> = tasks.iter().map(|t| t.id).collect();
        let mut rng = pickroute_core::rng::SplitMix64::new(order_seed);
        rng.shuffle(&mut order);

        // `path_meters` includes the closing leg to the station nearest to
        // the last pick — the exact objective the 2-opt pass minimizes.
        let before = path_meters(start, &order, &ctx);
        let mut improved = order.clone();
        improve_route(start, &mut improved, &ctx);
        let after = path_meters(start, &improved, &ctx);

        prop_assert!(after <= before, "2-opt worsened {before} -> {after}");

        let mut a = order;
        let mut b = improved;
        a.sort_unstable_by_key(|t| t.0);
        b.sort_unstable_by_key(|t| t.0);
        prop_assert_eq!(a, b);
    }
}

// ---------------------------------------------------------------------------
// Parser robustness
// ---------------------------------------------------------------------------

fn format_token() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("NAME : x".to_string()),
        Just("TYPE : HFMDVRP-DV".to_string()),
        Just("TYPE : CVRP".to_string()),
        Just("DIMENSION : 4".to_string()),
        Just("PICKING : 2".to_string()),
        Just("STATIONS : 1".to_string()),
        Just("ROBOTS : 1".to_string()),
        Just("CAPACITY : 10".to_string()),
        Just("EDGE_WEIGHT_TYPE : MANHATTAN".to_string()),
        Just("NODE_COORD_SECTION".to_string()),
        Just("DEMAND_SECTION".to_string()),
        Just("STATION_SECTION".to_string()),
        Just("DEPOT_SECTION".to_string()),
        Just("ROBOT_SECTION".to_string()),
        Just("EOF".to_string()),
        Just("-1".to_string()),
        (any::<i64>(), any::<i64>(), any::<i64>()).prop_map(|(a, b, c)| format!("{a} {b} {c}")),
        "[ -~]{0,20}",
    ]
}

proptest! {
    #[test]
    fn parser_survives_arbitrary_text(text in "\\PC*") {
        let _ = parse_instance(&text);
    }

    #[test]
    fn parser_survives_shuffled_format_fragments(
        lines in prop::collection::vec(format_token(), 0..25),
    ) {
        let text = lines.join("\n");
        if let Ok(instance) = parse_instance(&text) {
            // Anything accepted must at least be structurally coherent.
            prop_assert!(!instance.stations.is_empty());
        }
    }
}

// ---------------------------------------------------------------------------
// Mann-Whitney
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn mwu_is_symmetric_and_in_range(
        a in prop::collection::vec(0..40u32, 1..25),
        b in prop::collection::vec(0..40u32, 1..25),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let ab = mann_whitney_u(&a, &b);
        let ba = mann_whitney_u(&b, &a);
        prop_assert!(ab.p_value > 0.0 && ab.p_value <= 1.0);
        prop_assert_eq!(ab.p_value, ba.p_value);
        prop_assert_eq!(ab.u + ba.u, (a.len() * b.len()) as f64);
    }
}

// ---------------------------------------------------------------------------
// Route pricing consistency
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reported_total_cost_matches_the_route_sum(params in gen_params()) {
        let instance = match build_instance(params) {
            Some(i) => i,
            None => return Ok(()),
        };
        for solution in [
            solve(&instance, &SchedulerConfig::default()).unwrap(),
            solve_ancar(&instance, &BaselineConfig::default()).unwrap(),
        ] {
            let recomputed: f64 = instance
                .robots
                .iter()
                .zip(&solution.routes)
                .map(|(robot, route)| route_cost(&instance, robot, route))
                .sum();
            prop_assert!(
                (solution.total_cost - recomputed).abs() <= 1e-9 * recomputed.max(1.0),
                "{}: reported {} recomputed {}",
                solution.algorithm,
                solution.total_cost,
                recomputed
            );
        }
    }
}
