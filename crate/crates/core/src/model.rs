//! Problem model: instances, solutions, validation, and the exact oracle.
//!
//! Distances are Manhattan on an integer grid (meters); travel cost is time
//! in seconds, `meters / speed`. A robot route is an open path starting at
//! the robot's start cell and ending at a delivery station; capacity is
//! consumed by picks and restored to full by every station visit.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Relative tolerance used for all cost comparisons (argmin ties, cost
/// cross-checks). Two costs within this relative distance count as equal.
pub const COST_TOLERANCE: f64 = 1e-9;

/// `|a - b| <= rel * max(|a|, |b|)`; exact equality (including `0 == 0`)
/// always passes.
#[inline]
pub fn approx_eq_rel(a: f64, b: f64, rel: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Grid cell in meters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Manhattan (L1) distance in meters. `abs_diff` keeps the arithmetic exact
/// for the whole `i32` coordinate range.
#[inline]
pub fn manhattan(a: Point, b: Point) -> u64 {
    a.x.abs_diff(b.x) as u64 + a.y.abs_diff(b.y) as u64
}

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            /// Zero-based position in the owning instance vector.
            #[inline]
            pub fn index(self) -> usize {
                (self.0 - 1) as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Picking task identifier, dense and 1-based.
    TaskId
);
id_type!(
    /// Delivery station identifier, dense and 1-based.
    StationId
);
id_type!(
    /// Robot identifier, dense and 1-based.
    RobotId
);

/// One picking order: a grid cell and an integer demand in kilograms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PickingTask {
    pub id: TaskId,
    pub pos: Point,
    pub demand: u32,
}

/// Delivery station (depot): picked goods can be dropped here at any time;
/// a visit restores the robot to full capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeliveryStation {
    pub id: StationId,
    pub pos: Point,
}

/// A robot with its start cell, payload capacity in kilograms, and speed in
/// meters per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Robot {
    pub id: RobotId,
    pub start: Point,
    pub capacity: u32,
    pub speed: f64,
}

/// Instance family.
///
/// * `Xmt` — one station, homogeneous fleet co-located at the station.
/// * `Rmt` — one station, heterogeneous fleet co-located at the station.
/// * `Wmt` — several stations, homogeneous fleet dispersed over the grid.
/// * `Smt` — several stations, heterogeneous fleet dispersed over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Xmt,
    Rmt,
    Wmt,
    Smt,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Xmt, Family::Rmt, Family::Wmt, Family::Smt];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Xmt => "XMT",
            Family::Rmt => "RMT",
            Family::Wmt => "WMT",
            Family::Smt => "SMT",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_uppercase().as_str() {
            "XMT" => Some(Family::Xmt),
            "RMT" => Some(Family::Rmt),
            "WMT" => Some(Family::Wmt),
            "SMT" => Some(Family::Smt),
            _ => None,
        }
    }

    /// Single-station families keep the whole fleet at the station.
    pub fn single_station(self) -> bool {
        matches!(self, Family::Xmt | Family::Rmt)
    }

    /// Families whose fleets must share one capacity and speed.
    pub fn homogeneous(self) -> bool {
        matches!(self, Family::Xmt | Family::Wmt)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub family: Family,
    pub tasks: Vec<PickingTask>,
    pub stations: Vec<DeliveryStation>,
    pub robots: Vec<Robot>,
}

impl Instance {
    pub fn task(&self, id: TaskId) -> &PickingTask {
        &self.tasks[id.index()]
    }

    pub fn station(&self, id: StationId) -> &DeliveryStation {
        &self.stations[id.index()]
    }

    pub fn robot(&self, id: RobotId) -> &Robot {
        &self.robots[id.index()]
    }

    /// Largest capacity in the fleet, 0 for an empty fleet.
    pub fn max_capacity(&self) -> u32 {
        self.robots.iter().map(|r| r.capacity).max().unwrap_or(0)
    }
}

/// One step of a robot route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteStep {
    Pick(TaskId),
    Deliver(StationId),
}

/// Solver output: one route per robot (same order as `Instance::robots`),
/// plus the headline metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Vec<RouteStep>>,
    /// Total travel time over all robots, in seconds.
    pub total_cost: f64,
    /// Number of `Deliver` steps over all routes.
    pub depot_visits: u32,
    /// Number of robots with at least one `Pick` step.
    pub used_robots: u32,
    /// Solver wall time in seconds (the solve call only, monotonic clock).
    pub wall_time: f64,
    pub algorithm: String,
    pub seed: u64,
}

/// Travel time in seconds of `route` executed by `robot`, starting from the
/// robot's start cell. An empty route costs 0.
pub fn route_cost(instance: &Instance, robot: &Robot, route: &[RouteStep]) -> f64 {
    let mut meters: u64 = 0;
    let mut pos = robot.start;
    for step in route {
        let next = match step {
            RouteStep::Pick(t) => instance.task(*t).pos,
            RouteStep::Deliver(s) => instance.station(*s).pos,
        };
        meters += manhattan(pos, next);
        pos = next;
    }
    meters as f64 / robot.speed
}

/// A single rule violation found by a validator.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoStations,
    NoRobots,
    IdNotDense {
        kind: &'static str,
        position: usize,
        found: u32,
    },
    ZeroDemand {
        task: TaskId,
    },
    DemandExceedsFleet {
        task: TaskId,
        demand: u32,
        max_capacity: u32,
    },
    ZeroCapacity {
        robot: RobotId,
    },
    BadSpeed {
        robot: RobotId,
        speed: f64,
    },
    StationCountForFamily {
        family: Family,
        stations: usize,
    },
    RobotNotAtStation {
        robot: RobotId,
    },
    FleetNotHomogeneous {
        family: Family,
    },
    RouteCountMismatch {
        routes: usize,
        robots: usize,
    },
    UnknownTask {
        robot: RobotId,
        task: TaskId,
    },
    UnknownStation {
        robot: RobotId,
        station: StationId,
    },
    TaskNotCovered {
        task: TaskId,
    },
    TaskCoveredTwice {
        task: TaskId,
        count: usize,
    },
    CapacityExceeded {
        robot: RobotId,
        step: usize,
        load: u32,
        capacity: u32,
    },
    MissingTerminalDeliver {
        robot: RobotId,
    },
    CostMismatch {
        reported: f64,
        recomputed: f64,
    },
    DepotVisitsMismatch {
        reported: u32,
        actual: u32,
    },
    UsedRobotsMismatch {
        reported: u32,
        actual: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStations => write!(f, "instance has no delivery stations"),
            Violation::NoRobots => write!(f, "instance has no robots"),
            Violation::IdNotDense {
                kind,
                position,
                found,
            } => write!(
                f,
                "{kind} id at position {position} should be {} but is {found}",
                position + 1
            ),
            Violation::ZeroDemand { task } => write!(f, "task {task} has zero demand"),
            Violation::DemandExceedsFleet {
                task,
                demand,
                max_capacity,
            } => write!(
                f,
                "task {task} demand {demand} exceeds the largest robot capacity {max_capacity}"
            ),
            Violation::ZeroCapacity { robot } => write!(f, "robot {robot} has zero capacity"),
            Violation::BadSpeed { robot, speed } => {
                write!(
                    f,
                    "robot {robot} has non-positive or non-finite speed {speed}"
                )
            }
            Violation::StationCountForFamily { family, stations } => write!(
                f,
                "family {family} requires exactly one station but the instance has {stations}"
            ),
            Violation::RobotNotAtStation { robot } => write!(
                f,
                "robot {robot} must start at the station for a single-station family"
            ),
            Violation::FleetNotHomogeneous { family } => write!(
                f,
                "family {family} requires one capacity and speed across the fleet"
            ),
            Violation::RouteCountMismatch { routes, robots } => {
                write!(f, "solution has {routes} routes for {robots} robots")
            }
            Violation::UnknownTask { robot, task } => {
                write!(f, "route of robot {robot} references unknown task {task}")
            }
            Violation::UnknownStation { robot, station } => write!(
                f,
                "route of robot {robot} references unknown station {station}"
            ),
            Violation::TaskNotCovered { task } => {
                write!(f, "task {task} is not picked by any route")
            }
            Violation::TaskCoveredTwice { task, count } => {
                write!(f, "task {task} is picked {count} times")
            }
            Violation::CapacityExceeded {
                robot,
                step,
                load,
                capacity,
            } => write!(
                f,
                "robot {robot} carries {load} kg after step {step}, over its capacity {capacity}"
            ),
            Violation::MissingTerminalDeliver { robot } => {
                write!(
                    f,
                    "route of robot {robot} does not end at a delivery station"
                )
            }
            Violation::CostMismatch {
                reported,
                recomputed,
            } => write!(
                f,
                "reported total cost {reported} does not match recomputed {recomputed}"
            ),
            Violation::DepotVisitsMismatch { reported, actual } => {
                write!(
                    f,
                    "reported depot visits {reported}, routes contain {actual}"
                )
            }
            Violation::UsedRobotsMismatch { reported, actual } => {
                write!(f, "reported used robots {reported}, routes show {actual}")
            }
        }
    }
}

/// Collected violations; empty means valid. Validators never bail early, so
/// a report lists every broken rule at once.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks structural instance rules: dense 1-based ids, positive demands
/// within fleet reach, positive capacities and speeds, and the family
/// constraints on station count, fleet homogeneity, and robot starts.
pub fn validate_instance(instance: &Instance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let v = &mut report.violations;

    if instance.stations.is_empty() {
        v.push(Violation::NoStations);
    }
    if instance.robots.is_empty() {
        v.push(Violation::NoRobots);
    }
    for (i, t) in instance.tasks.iter().enumerate() {
        if t.id.0 as usize != i + 1 {
            v.push(Violation::IdNotDense {
                kind: "task",
                position: i,
                found: t.id.0,
            });
        }
        if t.demand == 0 {
            v.push(Violation::ZeroDemand { task: t.id });
        }
    }
    for (i, s) in instance.stations.iter().enumerate() {
        if s.id.0 as usize != i + 1 {
            v.push(Violation::IdNotDense {
                kind: "station",
                position: i,
                found: s.id.0,
            });
        }
    }
    for (i, r) in instance.robots.iter().enumerate() {
        if r.id.0 as usize != i + 1 {
            v.push(Violation::IdNotDense {
                kind: "robot",
                position: i,
                found: r.id.0,
            });
        }
        if r.capacity == 0 {
            v.push(Violation::ZeroCapacity { robot: r.id });
        }
        if !(r.speed.is_finite() && r.speed > 0.0) {
            v.push(Violation::BadSpeed {
                robot: r.id,
                speed: r.speed,
            });
        }
    }

    let max_cap = instance.max_capacity();
    if !instance.robots.is_empty() {
        for t in &instance.tasks {
            if t.demand > max_cap {
                v.push(Violation::DemandExceedsFleet {
                    task: t.id,
                    demand: t.demand,
                    max_capacity: max_cap,
                });
            }
        }
    }

    if instance.family.single_station() {
        if instance.stations.len() != 1 {
            v.push(Violation::StationCountForFamily {
                family: instance.family,
                stations: instance.stations.len(),
            });
        } else {
            let home = instance.stations[0].pos;
            for r in &instance.robots {
                if r.start != home {
                    v.push(Violation::RobotNotAtStation { robot: r.id });
                }
            }
        }
    }
    if instance.family.homogeneous() && !instance.robots.is_empty() {
        let first = &instance.robots[0];
        let uniform = instance
            .robots
            .iter()
            .all(|r| r.capacity == first.capacity && r.speed == first.speed);
        if !uniform {
            v.push(Violation::FleetNotHomogeneous {
                family: instance.family,
            });
        }
    }

    report
}

/// Checks a solution against its instance: exact task coverage, capacity
/// along every route, terminal station visits, and that the reported
/// metrics match the routes.
pub fn validate_solution(instance: &Instance, solution: &Solution) -> ValidationReport {
    let mut report = ValidationReport::default();
    let v = &mut report.violations;

    if solution.routes.len() != instance.robots.len() {
        v.push(Violation::RouteCountMismatch {
            routes: solution.routes.len(),
            robots: instance.robots.len(),
        });
        return report;
    }

    let mut covered = vec![0usize; instance.tasks.len()];
    let mut delivers = 0u32;
    let mut used = 0u32;
    let mut recomputed = 0.0f64;

    for (idx, route) in solution.routes.iter().enumerate() {
        let robot = &instance.robots[idx];
        let mut load = 0u32;
        let mut picked_any = false;
        let mut route_ok = true;
        for (step_no, step) in route.iter().enumerate() {
            match step {
                RouteStep::Pick(t) => {
                    if t.0 == 0 || t.index() >= instance.tasks.len() {
                        v.push(Violation::UnknownTask {
                            robot: robot.id,
                            task: *t,
                        });
                        route_ok = false;
                        continue;
                    }
                    covered[t.index()] += 1;
                    picked_any = true;
                    load += instance.task(*t).demand;
                    if load > robot.capacity {
                        v.push(Violation::CapacityExceeded {
                            robot: robot.id,
                            step: step_no,
                            load,
                            capacity: robot.capacity,
                        });
                    }
                }
                RouteStep::Deliver(s) => {
                    if s.0 == 0 || s.index() >= instance.stations.len() {
                        v.push(Violation::UnknownStation {
                            robot: robot.id,
                            station: *s,
                        });
                        route_ok = false;
                        continue;
                    }
                    delivers += 1;
                    load = 0;
                }
            }
        }
        if picked_any {
            used += 1;
        }
        if !route.is_empty() && !matches!(route.last(), Some(RouteStep::Deliver(_))) {
            v.push(Violation::MissingTerminalDeliver { robot: robot.id });
        }
        if route_ok {
            recomputed += route_cost(instance, robot, route);
        }
    }

    for (i, count) in covered.iter().enumerate() {
        match count {
            0 => v.push(Violation::TaskNotCovered {
                task: TaskId(i as u32 + 1),
            }),
            1 => {}
            n => v.push(Violation::TaskCoveredTwice {
                task: TaskId(i as u32 + 1),
                count: *n,
            }),
        }
    }

    if !approx_eq_rel(solution.total_cost, recomputed, COST_TOLERANCE) {
        v.push(Violation::CostMismatch {
            reported: solution.total_cost,
            recomputed,
        });
    }
    if solution.depot_visits != delivers {
        v.push(Violation::DepotVisitsMismatch {
            reported: solution.depot_visits,
            actual: delivers,
        });
    }
    if solution.used_robots != used {
        v.push(Violation::UsedRobotsMismatch {
            reported: solution.used_robots,
            actual: used,
        });
    }

    report
}

/// Errors from [`brute_force_optimum`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BruteForceError {
    #[error("instance too large for exhaustive search: {tasks} tasks, {robots} robots (limits: 8 tasks, 3 robots)")]
    TooLarge { tasks: usize, robots: usize },
    #[error("no feasible assignment: some task fits no robot")]
    NoFeasibleAssignment,
}

const BRUTE_FORCE_MAX_TASKS: usize = 8;
const BRUTE_FORCE_MAX_ROBOTS: usize = 3;

/// Exhaustive optimum for tiny instances (at most 8 tasks and 3 robots).
///
/// Enumerates every assignment of tasks to robots and every visit order per
/// robot; station visits inside a route are placed optimally by dynamic
/// programming over (last reset point, station). Route comparison happens in
/// exact integer meters per robot, so the result is the true optimum under
/// the model, not a float approximation.
pub fn brute_force_optimum(instance: &Instance) -> Result<Solution, BruteForceError> {
    let started = std::time::Instant::now();
    let m = instance.tasks.len();
    let n = instance.robots.len();
    if m > BRUTE_FORCE_MAX_TASKS || n > BRUTE_FORCE_MAX_ROBOTS {
        return Err(BruteForceError::TooLarge {
            tasks: m,
            robots: n,
        });
    }
    if n == 0 {
        return Err(BruteForceError::NoFeasibleAssignment);
    }

    let mut best_cost = f64::INFINITY;
    let mut best_routes: Option<Vec<Vec<RouteStep>>> = None;

    let mut assign = vec![0usize; m];
    loop {
        // Group per robot, skipping assignments where a task can never fit.
        let mut groups: Vec<Vec<TaskId>> = vec![Vec::new(); n];
        let mut feasible = true;
        for (t_idx, &r_idx) in assign.iter().enumerate() {
            if instance.tasks[t_idx].demand > instance.robots[r_idx].capacity {
                feasible = false;
                break;
            }
            groups[r_idx].push(TaskId(t_idx as u32 + 1));
        }
        if feasible {
            let mut total = 0.0f64;
            let mut routes: Vec<Vec<RouteStep>> = Vec::with_capacity(n);
            let mut all_ok = true;
            for (r_idx, group) in groups.iter().enumerate() {
                let robot = &instance.robots[r_idx];
                match best_route_for(instance, robot, group) {
                    Some((meters, route)) => {
                        total += meters as f64 / robot.speed;
                        routes.push(route);
                    }
                    None => {
                        all_ok = false;
                        break;
                    }
                }
            }
            if all_ok && total < best_cost {
                best_cost = total;
                best_routes = Some(routes);
            }
        }

        // Next assignment in mixed-radix order.
        let mut pos = 0;
        while pos < m {
            assign[pos] += 1;
            if assign[pos] < n {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
        if pos == m {
            break;
        }
    }

    let routes = best_routes.ok_or(BruteForceError::NoFeasibleAssignment)?;
    let depot_visits = routes
        .iter()
        .flatten()
        .filter(|s| matches!(s, RouteStep::Deliver(_)))
        .count() as u32;
    let used_robots = routes
        .iter()
        .filter(|r| r.iter().any(|s| matches!(s, RouteStep::Pick(_))))
        .count() as u32;
    Ok(Solution {
        routes,
        total_cost: best_cost,
        depot_visits,
        used_robots,
        wall_time: started.elapsed().as_secs_f64(),
        algorithm: "brute-force".to_string(),
        seed: 0,
    })
}

/// Cheapest route over all visit orders of `group`, in integer meters.
/// Returns `None` when no order admits a feasible capacity split (only
/// possible if a single demand exceeds the robot's capacity).
fn best_route_for(
    instance: &Instance,
    robot: &Robot,
    group: &[TaskId],
) -> Option<(u64, Vec<RouteStep>)> {
    if group.is_empty() {
        return Some((0, Vec::new()));
    }
    let mut best: Option<(u64, Vec<RouteStep>)> = None;
    let mut perm: Vec<TaskId> = group.to_vec();
    for_each_permutation(&mut perm, &mut |order| {
        if let Some((meters, route)) = segmented_route(instance, robot, order) {
            if best.as_ref().map_or(true, |(b, _)| meters < *b) {
                best = Some((meters, route));
            }
        }
    });
    best
}

/// Optimal station placement for a fixed pick order, by DP over the index of
/// the last pick before a station visit and the station chosen there.
fn segmented_route(
    instance: &Instance,
    robot: &Robot,
    order: &[TaskId],
) -> Option<(u64, Vec<RouteStep>)> {
    let k = order.len();
    let n_st = instance.stations.len();
    let pos = |t: TaskId| instance.task(t).pos;
    let demand = |t: TaskId| instance.task(t).demand;

    // prefix_load[i] = total demand of order[..i]
    let mut prefix_load = vec![0u64; k + 1];
    for i in 0..k {
        prefix_load[i + 1] = prefix_load[i] + demand(order[i]) as u64;
    }
    let seg_fits =
        |a: usize, b: usize| prefix_load[b + 1] - prefix_load[a] <= robot.capacity as u64;

    // chain[i] = meters of order[0] -> ... -> order[i]
    let mut chain = vec![0u64; k];
    for i in 1..k {
        chain[i] = chain[i - 1] + manhattan(pos(order[i - 1]), pos(order[i]));
    }
    let chain_between = |a: usize, b: usize| chain[b] - chain[a];

    #[derive(Clone, Copy)]
    enum Parent {
        Start,
        Via(usize, usize),
    }

    // dp[j][s] = min meters for start -> picks 0..=j -> station s, with the
    // visit to s happening right after pick j.
    let mut dp = vec![vec![u64::MAX; n_st]; k];
    let mut parent = vec![vec![Parent::Start; n_st]; k];
    for j in 0..k {
        for (s_idx, st) in instance.stations.iter().enumerate() {
            let tail = manhattan(pos(order[j]), st.pos);
            let mut cand = u64::MAX;
            let mut par = Parent::Start;
            if seg_fits(0, j) {
                cand = manhattan(robot.start, pos(order[0])) + chain_between(0, j) + tail;
            }
            for jp in 0..j {
                if !seg_fits(jp + 1, j) {
                    continue;
                }
                for sp in 0..n_st {
                    if dp[jp][sp] == u64::MAX {
                        continue;
                    }
                    let via = dp[jp][sp]
                        + manhattan(instance.stations[sp].pos, pos(order[jp + 1]))
                        + chain_between(jp + 1, j)
                        + tail;
                    if via < cand {
                        cand = via;
                        par = Parent::Via(jp, sp);
                    }
                }
            }
            dp[j][s_idx] = cand;
            parent[j][s_idx] = par;
        }
    }

    let (best_s, best_meters) = (0..n_st)
        .map(|s| (s, dp[k - 1][s]))
        .min_by_key(|&(s, m)| (m, s))?;
    if best_meters == u64::MAX {
        return None;
    }

    // Rebuild the step list by walking parents backwards.
    let mut segments: Vec<(usize, usize, usize)> = Vec::new(); // (first pick, last pick, station)
    let mut j = k - 1;
    let mut s = best_s;
    loop {
        match parent[j][s] {
            Parent::Start => {
                segments.push((0, j, s));
                break;
            }
            Parent::Via(jp, sp) => {
                segments.push((jp + 1, j, s));
                j = jp;
                s = sp;
            }
        }
    }
    segments.reverse();
    let mut route = Vec::with_capacity(k + segments.len());
    for (a, b, s_idx) in segments {
        for t in &order[a..=b] {
            route.push(RouteStep::Pick(*t));
        }
        route.push(RouteStep::Deliver(StationId(s_idx as u32 + 1)));
    }
    Some((best_meters, route))
}

/// Heap's algorithm; calls `f` for every permutation of `items`.
fn for_each_permutation<T, F: FnMut(&[T])>(items: &mut [T], f: &mut F) {
    let n = items.len();
    f(items);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
