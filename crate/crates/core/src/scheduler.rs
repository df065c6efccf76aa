//! DoNe-CPTA: domain-driven nearest-task dispatching with a cyclic
//! arrival-time queue.
//!
//! The dispatcher repeats two phases until every pick is assigned. First it
//! computes the domination map (which robots price each task cheapest).
//! Then it serves robots in simulated arrival order: the queue head takes
//! the cheapest task it dominates — detouring via a station when the task
//! does not fit its remaining capacity — and re-enters the queue with the
//! travel time of the leg it just committed to. Popping the head advances
//! simulated time, so every other slot shrinks by the head's time; robots
//! whose slot hits zero, robots whose dominated task was taken, and the head
//! itself get stale domains, and the next stale head triggers a fresh
//! domain computation. Finally, every route that does not already end at a
//! station gets a closing station visit.

use crate::cost::{nearest_station, CostContext, RobotState};
use crate::domain::{min_cost_task, DomainCache, DomainMap, TaskUnservable};
use crate::model::{
    manhattan, route_cost, DeliveryStation, Instance, RouteStep, Solution, StationId,
    COST_TOLERANCE,
};

/// Tuning knobs for [`solve`]. The defaults match the published behavior;
/// the guard exists only to turn a would-be infinite loop into an error.
#[derive(Debug, Clone)]
pub struct SchedulerConfig {
    /// Relative tolerance for argmin ties in the domination map.
    pub tie_tolerance: f64,
    /// Upper bound on outer (domain-recompute) iterations; `None` derives
    /// `10 * tasks + 8 * robots` from the instance.
    pub max_outer_iterations: Option<usize>,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            tie_tolerance: COST_TOLERANCE,
            max_outer_iterations: None,
        }
    }
}

/// Solver failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Unservable(#[from] TaskUnservable),
    #[error("no progress after {iterations} domain recomputations; instance may be degenerate")]
    ProgressGuard { iterations: usize },
}

/// Arrival queue: at most one slot per robot, ordered by remaining arrival
/// time (ascending), then by domain size (descending), then by robot index.
/// Slot times persist across domain recomputations.
#[derive(Debug, Clone)]
pub struct ArrivalQueue {
    order: Vec<usize>,
    times: Vec<f64>,
    present: Vec<bool>,
}

impl ArrivalQueue {
    pub fn new(robot_count: usize) -> Self {
        Self {
            order: Vec::with_capacity(robot_count),
            times: vec![0.0; robot_count],
            present: vec![false; robot_count],
        }
    }

    /// (Re)admits every robot, keeping accumulated times, and sorts. On the
    /// first call all times are zero, so the order is driven by domain size.
    pub fn prepare(&mut self, domains: &DomainMap) {
        self.order.clear();
        self.order.extend(0..self.times.len());
        self.present.fill(true);
        self.sort(domains);
    }

    fn sort(&mut self, domains: &DomainMap) {
        let times = &self.times;
        self.order.sort_by(|&a, &b| {
            times[a]
                .total_cmp(&times[b])
                .then_with(|| domains.phi(b).len().cmp(&domains.phi(a).len()))
                .then_with(|| a.cmp(&b))
        });
    }

    pub fn head(&self) -> Option<usize> {
        self.order.first().copied()
    }

    /// Removes the head and returns it with its stored time. The head has
    /// arrived, so its own slot time resets to zero.
    pub fn pop_head(&mut self) -> Option<(usize, f64)> {
        if self.order.is_empty() {
            return None;
        }
        let head = self.order.remove(0);
        let time = self.times[head];
        self.times[head] = 0.0;
        self.present[head] = false;
        Some((head, time))
    }

    /// Advances simulated time by the popped head's slot time: every queued
    /// slot shrinks by `head_time` (floored at zero). A slot that transitions
    /// to zero marks its robot's domain stale, and the head's own domain is
    /// always marked stale — it just acted on it.
    pub fn decrease_arrival_time(&mut self, head: usize, head_time: f64, domains: &mut DomainMap) {
        for &r in &self.order {
            if self.times[r] > 0.0 && self.times[r] - head_time <= 0.0 {
                self.times[r] = 0.0;
                domains.invalidate(r);
            } else if self.times[r] > 0.0 {
                self.times[r] -= head_time;
            }
        }
        domains.invalidate(head);
        self.sort(domains);
    }

    /// Re-enters `robot` with the travel time of its new leg. The robot is
    /// immediately eligible to surface again if its time is minimal.
    pub fn set_arrival_time(&mut self, robot: usize, seconds: f64, domains: &DomainMap) {
        self.times[robot] = seconds;
        if !self.present[robot] {
            self.present[robot] = true;
            self.order.push(robot);
        }
        self.sort(domains);
    }

    pub fn time(&self, robot: usize) -> f64 {
        self.times[robot]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Station the robot should unload at next: the nearest one to its current
/// cell (ties to the lowest id).
pub fn best_depot(state: &RobotState, stations: &[DeliveryStation]) -> StationId {
    nearest_station(state.pos, stations).id
}

/// Appends a closing station visit to every non-empty route that does not
/// already end with one. Returns the number of visits added.
pub fn add_last_depots(states: &mut [RobotState], stations: &[DeliveryStation]) -> u32 {
    let mut added = 0;
    for state in states {
        if state.route.is_empty() || matches!(state.route.last(), Some(RouteStep::Deliver(_))) {
            continue;
        }
        let station = nearest_station(state.pos, stations);
        state.route.push(RouteStep::Deliver(station.id));
        state.pos = station.pos;
        state.gamma = state.capacity;
        added += 1;
    }
    added
}

/// Runs the dispatcher on `instance`. The instance is expected to pass
/// `validate_instance`; an unservable task surfaces as [`SolveError`].
pub fn solve(instance: &Instance, config: &SchedulerConfig) -> Result<Solution, SolveError> {
    let started = std::time::Instant::now();
    let n = instance.robots.len();
    let mut states: Vec<RobotState> = instance.robots.iter().map(RobotState::new).collect();
    let mut ctx = CostContext::new(&instance.tasks, &instance.stations);
    let mut aq = ArrivalQueue::new(n);
    let guard = config
        .max_outer_iterations
        .unwrap_or(10 * instance.tasks.len().max(1) + 8 * n);

    let mut depot_visits: u32 = 0;
    let mut outer = 0usize;
    let mut cache = DomainCache::new();
    while ctx.remaining_count() > 0 {
        outer += 1;
        if outer > guard {
            return Err(SolveError::ProgressGuard { iterations: guard });
        }
        let domains = cache.refresh(&states, &ctx, config.tie_tolerance)?;
        #[cfg(test)]
        assert_eq!(
            *domains,
            crate::domain::compute_domain(&states, &ctx, config.tie_tolerance).unwrap(),
            "incremental domains diverged from scratch recomputation"
        );
        aq.prepare(domains);
        for (r, state) in states.iter_mut().enumerate() {
            state.executing = aq.time(r) > 0.0;
        }

        while let Some(peek) = aq.head() {
            if !domains.is_valid(peek) {
                break;
            }
            let (head, head_time) = aq.pop_head().expect("queue non-empty");
            aq.decrease_arrival_time(head, head_time, domains);

            let candidates: Vec<_> = domains
                .phi(head)
                .iter()
                .copied()
                .filter(|t| ctx.is_remaining(*t))
                .collect();
            let Some(task_id) = min_cost_task(&candidates, &states[head], &ctx) else {
                // Nothing dominated: the robot stays out of the queue until
                // the next domain computation readmits it.
                continue;
            };

            let demand = ctx.tasks[task_id.index()].demand;
            let state = &mut states[head];
            if state.gamma < demand {
                // The chosen task does not fit: unload first. The task stays
                // unassigned and is reconsidered once the robot resurfaces.
                let station = nearest_station(state.pos, ctx.stations);
                let seconds = manhattan(state.pos, station.pos) as f64 / state.speed;
                state.route.push(RouteStep::Deliver(station.id));
                state.pos = station.pos;
                state.gamma = state.capacity;
                depot_visits += 1;
                aq.set_arrival_time(head, seconds, domains);
                states[head].executing = seconds > 0.0;
            } else {
                let target = ctx.tasks[task_id.index()].pos;
                let seconds = manhattan(state.pos, target) as f64 / state.speed;
                state.route.push(RouteStep::Pick(task_id));
                state.pos = target;
                state.gamma -= demand;
                ctx.remove(task_id);
                aq.set_arrival_time(head, seconds, domains);
                states[head].executing = seconds > 0.0;
                domains.invalidate_dominators(task_id);
            }

            if ctx.remaining_count() == 0 {
                break;
            }
        }
    }

    depot_visits += add_last_depots(&mut states, &instance.stations);

    let routes: Vec<Vec<RouteStep>> = states.into_iter().map(|s| s.route).collect();
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
        algorithm: "done-cpta".to_string(),
        seed: 0,
    })
}
