//! a-nCAR baseline: cluster-first route-second construction, adapted to
//! dispersed heterogeneous fleets.
//!
//! Each iteration auditions every robot: grow a feasible cluster from the
//! robot's current cell by nearest-neighbor (capacity bounded), improve the
//! visit order, price the open path including the closing leg to the
//! station nearest the last pick, and commit only the cheapest robot's
//! route. Committed robots continue from the station they closed at. The
//! route improvement step is plain 2-opt to a local optimum — a deliberate,
//! configuration-visible substitution for the heavyweight tour conversion
//! used by the original cluster heuristic.

use crate::cost::{nearest_station, CostContext};
use crate::model::{manhattan, route_cost, Instance, Point, RouteStep, Solution, TaskId};
use crate::scheduler::SolveError;

/// Route improvement applied to each candidate cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RouteImprovement {
    /// 2-opt segment reversals until no move shortens the path.
    #[default]
    TwoOpt,
}

/// Tuning knobs for [`solve_ancar`].
#[derive(Debug, Clone, Default)]
pub struct BaselineConfig {
    pub improvement: RouteImprovement,
}

/// A capacity-feasible group of picks in visit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleCluster {
    pub tasks: Vec<TaskId>,
    pub total_demand: u32,
}

impl FeasibleCluster {
    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }
}

/// Grows a cluster from `pos` by repeatedly taking the nearest remaining
/// pick that still fits the residual capacity (distance ties go to the
/// lowest task id). Stops when nothing fits.
pub fn build_feasible_cluster(pos: Point, capacity: u32, ctx: &CostContext<'_>) -> FeasibleCluster {
    let mut cluster = FeasibleCluster {
        tasks: Vec::new(),
        total_demand: 0,
    };
    let mut taken = vec![false; ctx.tasks.len()];
    let mut cur = pos;
    let mut residual = capacity;
    loop {
        let mut best: Option<(u64, TaskId)> = None;
        for t in ctx.remaining_ids() {
            if taken[t.index()] {
                continue;
            }
            let task = &ctx.tasks[t.index()];
            if task.demand > residual {
                continue;
            }
            let key = (manhattan(cur, task.pos), t);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let Some((_, chosen)) = best else { break };
        let task = &ctx.tasks[chosen.index()];
        taken[chosen.index()] = true;
        cluster.tasks.push(chosen);
        cluster.total_demand += task.demand;
        residual -= task.demand;
        cur = task.pos;
    }
    cluster
}

fn terminal_meters(p: Point, ctx: &CostContext<'_>) -> u64 {
    manhattan(p, nearest_station(p, ctx.stations).pos)
}

/// Meters of the open path `start -> order... -> nearest station to the
/// last pick`. Empty orders cost nothing.
pub fn path_meters(start: Point, order: &[TaskId], ctx: &CostContext<'_>) -> u64 {
    let Some(&last) = order.last() else { return 0 };
    let mut total = 0;
    let mut cur = start;
    for &t in order {
        let p = ctx.tasks[t.index()].pos;
        total += manhattan(cur, p);
        cur = p;
    }
    total + terminal_meters(ctx.tasks[last.index()].pos, ctx)
}

/// Improves the visit order in place by 2-opt: best-improvement passes over
/// all segment reversals until none shortens the path. The closing station
/// leg follows the (possibly new) last pick of each candidate move. All
/// comparison happens in exact integer meters, so the result never costs
/// more than the input order.
pub fn improve_route(start: Point, order: &mut Vec<TaskId>, ctx: &CostContext<'_>) {
    let k = order.len();
    if k < 2 {
        return;
    }
    let pos = |t: TaskId| ctx.tasks[t.index()].pos;
    loop {
        let mut best_delta: i64 = 0;
        let mut best_move: Option<(usize, usize)> = None;
        for i in 0..k - 1 {
            let prev = if i == 0 { start } else { pos(order[i - 1]) };
            for j in i + 1..k {
                let delta = if j < k - 1 {
                    let next = pos(order[j + 1]);
                    manhattan(prev, pos(order[j])) as i64 + manhattan(pos(order[i]), next) as i64
                        - manhattan(prev, pos(order[i])) as i64
                        - manhattan(pos(order[j]), next) as i64
                } else {
                    manhattan(prev, pos(order[j])) as i64 - manhattan(prev, pos(order[i])) as i64
                        + terminal_meters(pos(order[i]), ctx) as i64
                        - terminal_meters(pos(order[j]), ctx) as i64
                };
                if delta < best_delta {
                    best_delta = delta;
                    best_move = Some((i, j));
                }
            }
        }
        let Some((i, j)) = best_move else { break };
        order[i..=j].reverse();
    }
}

/// Runs the baseline on `instance`. Candidate clusters always budget the
/// robot's full capacity: every committed route ends at a station, so the
/// robot starts its next route unloaded.
pub fn solve_ancar(instance: &Instance, config: &BaselineConfig) -> Result<Solution, SolveError> {
    let RouteImprovement::TwoOpt = config.improvement;
    let started = std::time::Instant::now();
    let n = instance.robots.len();
    let mut ctx = CostContext::new(&instance.tasks, &instance.stations);
    let mut pos: Vec<Point> = instance.robots.iter().map(|r| r.start).collect();
    let mut routes: Vec<Vec<RouteStep>> = vec![Vec::new(); n];
    let mut depot_visits = 0u32;

    while ctx.remaining_count() > 0 {
        let mut best: Option<(f64, usize, Vec<TaskId>)> = None;
        for (r, robot) in instance.robots.iter().enumerate() {
            let cluster = build_feasible_cluster(pos[r], robot.capacity, &ctx);
            if cluster.is_empty() {
                continue;
            }
            let mut order = cluster.tasks;
            improve_route(pos[r], &mut order, &ctx);
            let seconds = path_meters(pos[r], &order, &ctx) as f64 / robot.speed;
            if best.as_ref().map_or(true, |(b, _, _)| seconds < *b) {
                best = Some((seconds, r, order));
            }
        }
        let Some((_, r, order)) = best else {
            // Nothing fits any robot: some remaining demand beats every
            // capacity. Report the first such task.
            let max_cap = instance.max_capacity();
            let task = ctx
                .remaining_ids()
                .find(|t| ctx.tasks[t.index()].demand > max_cap)
                .expect("empty candidate set implies an oversized task");
            return Err(SolveError::Unservable(crate::domain::TaskUnservable {
                task,
            }));
        };
        let last = *order.last().expect("committed cluster is non-empty");
        let station = nearest_station(ctx.tasks[last.index()].pos, ctx.stations);
        for &t in &order {
            routes[r].push(RouteStep::Pick(t));
            ctx.remove(t);
        }
        routes[r].push(RouteStep::Deliver(station.id));
        depot_visits += 1;
        pos[r] = station.pos;
    }

    let total_cost: f64 = routes
        .iter()
        .zip(&instance.robots)
        .map(|(route, robot)| route_cost(instance, robot, route))
        .sum();
    let used_robots = routes
        .iter()
        .filter(|r| r.iter().any(|s| matches!(s, RouteStep::Pick(_))))
        .count() as u32;

    Ok(Solution {
        routes,
        total_cost,
        depot_visits,
        used_robots,
        wall_time: started.elapsed().as_secs_f64(),
        algorithm: "a-ncar".to_string(),
        seed: 0,
    })
}
