//! Edge cost estimation between a robot and a candidate target.
//!
//! The estimator prices the move a dispatcher is about to rank: the travel
//! leg itself, plus the station legs that the move would force sooner or
//! later. Five mutually exclusive cases cover every situation; station
//! targets are always plain travel, and a pick whose demand exceeds the
//! robot's total capacity is priced infeasible so argmin logic can treat
//! every candidate uniformly.

use crate::model::{
    manhattan, DeliveryStation, PickingTask, Point, Robot, RobotId, RouteStep, TaskId,
};

/// Mutable per-robot solver state: current cell, remaining capacity, and the
/// route built so far.
#[derive(Debug, Clone)]
pub struct RobotState {
    pub robot: RobotId,
    pub pos: Point,
    /// Remaining payload capacity in kilograms (`γ`).
    pub gamma: u32,
    /// Total payload capacity in kilograms (`Γ`).
    pub capacity: u32,
    pub speed: f64,
    /// True while the robot holds a nonzero slot in the arrival queue.
    pub executing: bool,
    pub route: Vec<RouteStep>,
}

impl RobotState {
    pub fn new(robot: &Robot) -> Self {
        Self {
            robot: robot.id,
            pos: robot.start,
            gamma: robot.capacity,
            capacity: robot.capacity,
            speed: robot.speed,
            executing: false,
            route: Vec::new(),
        }
    }
}

/// Shared lookup context for cost queries: the task and station tables plus
/// the set of still-unassigned picks. Tracks the two smallest remaining
/// demands so "does any other pick still fit" queries are O(1).
#[derive(Debug, Clone)]
pub struct CostContext<'a> {
    pub tasks: &'a [PickingTask],
    pub stations: &'a [DeliveryStation],
    remaining: Vec<bool>,
    /// Still-unassigned task indices, ascending; the dense mirror of
    /// `remaining` that the pricing loops walk.
    remaining_list: Vec<u32>,
    min1: Option<(u32, TaskId)>,
    min2: Option<(u32, TaskId)>,
    tail_meters: Vec<u64>,
    removed_log: Vec<TaskId>,
}

impl<'a> CostContext<'a> {
    /// Context with every task still unassigned.
    pub fn new(tasks: &'a [PickingTask], stations: &'a [DeliveryStation]) -> Self {
        let tail_meters = tasks
            .iter()
            .map(|t| manhattan(t.pos, nearest_station(t.pos, stations).pos))
            .collect();
        let mut ctx = Self {
            tasks,
            stations,
            remaining: vec![true; tasks.len()],
            remaining_list: (0..tasks.len() as u32).collect(),
            min1: None,
            min2: None,
            tail_meters,
            removed_log: Vec::new(),
        };
        ctx.rescan_minima();
        ctx
    }

    fn rescan_minima(&mut self) {
        self.min1 = None;
        self.min2 = None;
        for t in self.tasks {
            if !self.remaining[t.id.index()] {
                continue;
            }
            let entry = (t.demand, t.id);
            match self.min1 {
                None => self.min1 = Some(entry),
                Some(m1) if entry < m1 => {
                    self.min2 = self.min1;
                    self.min1 = Some(entry);
                }
                Some(_) => match self.min2 {
                    None => self.min2 = Some(entry),
                    Some(m2) if entry < m2 => self.min2 = Some(entry),
                    Some(_) => {}
                },
            }
        }
    }

    pub fn is_remaining(&self, task: TaskId) -> bool {
        self.remaining[task.index()]
    }

    pub fn remaining_count(&self) -> usize {
        self.remaining_list.len()
    }

    /// Still-unassigned task ids in ascending order.
    pub fn remaining_ids(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.remaining_list.iter().map(|&i| TaskId(i + 1))
    }

    /// Marks a task as assigned; refreshes the demand minima if the removed
    /// task was one of the tracked two.
    pub fn remove(&mut self, task: TaskId) {
        if std::mem::replace(&mut self.remaining[task.index()], false) {
            let slot = self
                .remaining_list
                .binary_search(&(task.index() as u32))
                .expect("remaining list out of sync");
            self.remaining_list.remove(slot);
            self.removed_log.push(task);
            let tracked = |slot: Option<(u32, TaskId)>| slot.is_some_and(|(_, id)| id == task);
            if tracked(self.min1) || tracked(self.min2) {
                self.rescan_minima();
            }
        }
    }

    /// Every removal so far, in order. Incremental consumers remember how
    /// far they have read instead of re-scanning the full pool.
    pub(crate) fn removed_log(&self) -> &[TaskId] {
        &self.removed_log
    }

    /// Smallest demand among remaining tasks other than `exclude`.
    #[inline]
    pub fn min_other_demand(&self, exclude: TaskId) -> Option<u32> {
        match self.min1 {
            Some((d, id)) if id != exclude => Some(d),
            Some(_) => self.min2.map(|(d, _)| d),
            None => None,
        }
    }

    /// True iff some remaining pick other than `exclude` has demand at most
    /// `budget`.
    #[inline]
    fn other_fits(&self, exclude: TaskId, budget: u32) -> bool {
        self.min_other_demand(exclude).is_some_and(|d| d <= budget)
    }

    /// Meters from a task to its closest station, precomputed at build time.
    #[inline]
    pub fn tail_meters(&self, task: TaskId) -> u64 {
        self.tail_meters[task.index()]
    }

    /// The two smallest remaining (demand, id) pairs. A change in this pair
    /// is the only way assignment of *other* robots can shift the
    /// fits-afterwards branches of [`edge_cost`], so caches key on it.
    pub(crate) fn demand_pair(&self) -> (Option<(u32, TaskId)>, Option<(u32, TaskId)>) {
        (self.min1, self.min2)
    }
}

/// Closest station to `pos` by Manhattan distance; ties resolve to the
/// lowest station id. Panics only on an empty station list, which validated
/// instances exclude.
pub fn nearest_station<'a>(pos: Point, stations: &'a [DeliveryStation]) -> &'a DeliveryStation {
    stations
        .iter()
        .min_by_key(|s| (manhattan(pos, s.pos), s.id))
        .expect("instance has at least one station")
}

/// What an edge cost query points at.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Pick(&'a PickingTask),
    Station(&'a DeliveryStation),
}

/// Priced edge, tagged with the case that produced it. `Infeasible` orders
/// above every finite cost via [`EdgeCost::seconds`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeCost {
    /// Case 1: the pick's demand exceeds the robot's total capacity.
    Infeasible,
    /// Case 2: plain travel; a station target, or a currently-feasible pick
    /// after which some other remaining pick still fits.
    Travel(f64),
    /// Case 3: travel to a currently-feasible pick after which nothing else
    /// fits, so the forced station leg after the pick is priced in.
    TravelThenDeliver(f64),
    /// Case 4: the pick only fits after a station visit; detour via the
    /// station nearest to the robot, then to the pick.
    DeliverThenTravel(f64),
    /// Case 5: like case 4, and nothing else fits after the pick either, so
    /// the station leg after the pick is priced in as well.
    DeliverTravelDeliver(f64),
}

impl EdgeCost {
    /// Price in seconds; infinity for the infeasible case.
    pub fn seconds(&self) -> f64 {
        match self {
            EdgeCost::Infeasible => f64::INFINITY,
            EdgeCost::Travel(c)
            | EdgeCost::TravelThenDeliver(c)
            | EdgeCost::DeliverThenTravel(c)
            | EdgeCost::DeliverTravelDeliver(c) => *c,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, EdgeCost::Infeasible)
    }

    /// Case number, 1 through 5.
    pub fn case(&self) -> u8 {
        match self {
            EdgeCost::Infeasible => 1,
            EdgeCost::Travel(_) => 2,
            EdgeCost::TravelThenDeliver(_) => 3,
            EdgeCost::DeliverThenTravel(_) => 4,
            EdgeCost::DeliverTravelDeliver(_) => 5,
        }
    }
}

/// Whether `target` can be served next by a robot in `state`. Stations are
/// always reachable; a pick is reachable when it fits the remaining
/// capacity, or — for a robot that has not picked anything yet
/// (`first_pick`) — when it fits the total capacity.
pub fn is_feasible(target: Target<'_>, state: &RobotState, first_pick: bool) -> bool {
    match target {
        Target::Station(_) => true,
        Target::Pick(task) => {
            (first_pick && state.capacity >= task.demand) || state.gamma >= task.demand
        }
    }
}

/// Prices the edge from `from` to `target` for a robot in `state`.
///
/// The estimate anticipates forced station legs: if taking the pick would
/// leave no other remaining pick servable, the leg from the pick to its
/// nearest station is added (cases 3 and 5); if the pick does not fit right
/// now but fits after unloading, the detour through the station nearest to
/// the robot is added (cases 4 and 5). The anticipated legs exist only for
/// ranking — the dispatcher inserts real station visits separately.
pub fn edge_cost(
    from: Point,
    target: Target<'_>,
    state: &RobotState,
    ctx: &CostContext<'_>,
) -> EdgeCost {
    let speed = state.speed;
    match target {
        Target::Station(s) => EdgeCost::Travel(manhattan(from, s.pos) as f64 / speed),
        Target::Pick(task) => {
            if task.demand > state.capacity {
                return EdgeCost::Infeasible;
            }
            if state.gamma >= task.demand {
                let meters = manhattan(from, task.pos);
                let after = state.gamma - task.demand;
                if ctx.other_fits(task.id, after) {
                    EdgeCost::Travel(meters as f64 / speed)
                } else {
                    let tail = ctx.tail_meters(task.id);
                    EdgeCost::TravelThenDeliver((meters + tail) as f64 / speed)
                }
            } else {
                let via = nearest_station(from, ctx.stations);
                let detour = manhattan(from, via.pos) + manhattan(via.pos, task.pos);
                let after = state.capacity - task.demand;
                if ctx.other_fits(task.id, after) {
                    EdgeCost::DeliverThenTravel(detour as f64 / speed)
                } else {
                    let tail = ctx.tail_meters(task.id);
                    EdgeCost::DeliverTravelDeliver((detour + tail) as f64 / speed)
                }
            }
        }
    }
}

/// Prices every remaining pick for one robot, emitting `(task index,
/// seconds)` pairs in ascending task order. Same arithmetic as
/// [`edge_cost`] — the station nearest the robot is looked up once instead
/// of per task, which the column-oriented domain cache leans on.
pub(crate) fn price_column(
    state: &RobotState,
    ctx: &CostContext<'_>,
    mut emit: impl FnMut(usize, f64),
) {
    let speed = state.speed;
    let from = state.pos;
    let via = nearest_station(from, ctx.stations);
    let via_meters = manhattan(from, via.pos);
    for &ti in &ctx.remaining_list {
        let t = ti as usize;
        let task = &ctx.tasks[t];
        let seconds = if task.demand > state.capacity {
            f64::INFINITY
        } else if state.gamma >= task.demand {
            let meters = manhattan(from, task.pos);
            if ctx.other_fits(task.id, state.gamma - task.demand) {
                meters as f64 / speed
            } else {
                (meters + ctx.tail_meters[t]) as f64 / speed
            }
        } else {
            let detour = via_meters + manhattan(via.pos, task.pos);
            if ctx.other_fits(task.id, state.capacity - task.demand) {
                detour as f64 / speed
            } else {
                (detour + ctx.tail_meters[t]) as f64 / speed
            }
        };
        emit(t, seconds);
    }
}

/// Prices the remaining picks for a set of robots in one pass over the
/// pool, row by row; `emit` receives `(robot index, task index, seconds)`.
/// Same arithmetic as [`edge_cost`], with the per-robot station detour and
/// the per-task smallest-other-demand hoisted out of the inner loop.
pub(crate) fn price_columns(
    robots: &[(usize, &RobotState)],
    ctx: &CostContext<'_>,
    mut emit: impl FnMut(usize, usize, f64),
) {
    struct Hoisted {
        r: usize,
        pos: Point,
        via_pos: Point,
        via_meters: u64,
        gamma: u32,
        capacity: u32,
        speed: f64,
    }
    let hoisted: Vec<Hoisted> = robots
        .iter()
        .map(|&(r, state)| {
            let via = nearest_station(state.pos, ctx.stations);
            Hoisted {
                r,
                pos: state.pos,
                via_pos: via.pos,
                via_meters: manhattan(state.pos, via.pos),
                gamma: state.gamma,
                capacity: state.capacity,
                speed: state.speed,
            }
        })
        .collect();
    for &ti in &ctx.remaining_list {
        let t = ti as usize;
        let task = &ctx.tasks[t];
        let tail = ctx.tail_meters[t];
        let min_other = ctx.min_other_demand(task.id);
        for h in &hoisted {
            let seconds = if task.demand > h.capacity {
                f64::INFINITY
            } else if h.gamma >= task.demand {
                let meters = manhattan(h.pos, task.pos);
                if min_other.is_some_and(|d| d <= h.gamma - task.demand) {
                    meters as f64 / h.speed
                } else {
                    (meters + tail) as f64 / h.speed
                }
            } else {
                let detour = h.via_meters + manhattan(h.via_pos, task.pos);
                if min_other.is_some_and(|d| d <= h.capacity - task.demand) {
                    detour as f64 / h.speed
                } else {
                    (detour + tail) as f64 / h.speed
                }
            };
            emit(h.r, t, seconds);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DeliveryStation, PickingTask, Point, StationId};

    fn st(id: u32, x: i32, y: i32) -> DeliveryStation {
        DeliveryStation {
            id: StationId(id),
            pos: Point::new(x, y),
        }
    }

    fn pick(id: u32, x: i32, y: i32, demand: u32) -> PickingTask {
        PickingTask {
            id: TaskId(id),
            pos: Point::new(x, y),
            demand,
        }
    }

    fn state(gamma: u32, capacity: u32, speed: f64) -> RobotState {
        RobotState {
            robot: RobotId(1),
            pos: Point::new(0, 0),
            gamma,
            capacity,
            speed,
            executing: false,
            route: Vec::new(),
        }
    }

    #[test]
    fn nearest_station_picks_closest() {
        let stations = vec![st(1, 10, 0), st(2, 2, 1)];
        assert_eq!(
            nearest_station(Point::new(0, 0), &stations).id,
            StationId(2)
        );
    }

    #[test]
    fn nearest_station_tie_resolves_to_lowest_id() {
        let stations = vec![st(1, 3, 0), st(2, 0, 3)];
        assert_eq!(
            nearest_station(Point::new(0, 0), &stations).id,
            StationId(1)
        );
    }

    #[test]
    fn nearest_station_single() {
        let stations = vec![st(1, -4, 7)];
        assert_eq!(
            nearest_station(Point::new(9, 9), &stations).id,
            StationId(1)
        );
    }

    #[test]
    fn is_feasible_rules() {
        let s = state(5, 50, 1.0);
        let station = st(1, 0, 0);
        assert!(is_feasible(Target::Station(&station), &s, false));
        let light = pick(1, 1, 1, 5);
        assert!(is_feasible(Target::Pick(&light), &s, false));
        let heavy = pick(2, 1, 1, 30);
        assert!(!is_feasible(Target::Pick(&heavy), &s, false));
        // Untouched robot: total capacity decides.
        assert!(is_feasible(Target::Pick(&heavy), &s, true));
        let oversized = pick(3, 1, 1, 60);
        assert!(!is_feasible(Target::Pick(&oversized), &s, true));
    }

    #[test]
    fn station_target_is_plain_travel() {
        let tasks = vec![pick(1, 4, 0, 30)];
        let stations = vec![st(1, 2, 0), st(2, 20, 20)];
        let ctx = CostContext::new(&tasks, &stations);
        let s = state(5, 50, 1.0);
        let c = edge_cost(Point::new(0, 0), Target::Station(&stations[1]), &s, &ctx);
        assert_eq!(c, EdgeCost::Travel(40.0));
    }

    #[test]
    fn oversized_pick_is_infeasible() {
        let tasks = vec![pick(1, 4, 0, 80)];
        let stations = vec![st(1, 2, 0)];
        let ctx = CostContext::new(&tasks, &stations);
        let s = state(50, 50, 1.0);
        let c = edge_cost(Point::new(0, 0), Target::Pick(&tasks[0]), &s, &ctx);
        assert_eq!(c, EdgeCost::Infeasible);
        assert_eq!(c.seconds(), f64::INFINITY);
    }

    #[test]
    fn last_feasible_pick_prices_the_forced_station_leg() {
        // Sole remaining pick, feasible now: travel 4 plus the 2-meter leg
        // to its nearest station.
        let tasks = vec![pick(1, 4, 0, 30)];
        let stations = vec![st(1, 2, 0), st(2, 20, 20)];
        let ctx = CostContext::new(&tasks, &stations);
        let s = state(40, 50, 1.0);
        let c = edge_cost(Point::new(0, 0), Target::Pick(&tasks[0]), &s, &ctx);
        assert_eq!(c, EdgeCost::TravelThenDeliver(6.0));
    }

    #[test]
    fn overloaded_robot_prices_the_detour_and_tail() {
        // Same pick but the robot is nearly full: detour via the station at
        // (2,0), then the pick, then its station leg: 2 + 2 + 2.
        let tasks = vec![pick(1, 4, 0, 30)];
        let stations = vec![st(1, 2, 0), st(2, 20, 20)];
        let ctx = CostContext::new(&tasks, &stations);
        let s = state(5, 50, 1.0);
        let c = edge_cost(Point::new(0, 0), Target::Pick(&tasks[0]), &s, &ctx);
        assert_eq!(c, EdgeCost::DeliverTravelDeliver(6.0));
    }

    #[test]
    fn other_remaining_pick_keeps_plain_travel() {
        let tasks = vec![pick(1, 4, 0, 10), pick(2, 8, 0, 10)];
        let stations = vec![st(1, 2, 0)];
        let ctx = CostContext::new(&tasks, &stations);
        let s = state(50, 50, 1.0);
        let c = edge_cost(Point::new(0, 0), Target::Pick(&tasks[0]), &s, &ctx);
        assert_eq!(c, EdgeCost::Travel(4.0));
    }

    #[test]
    fn detour_case_without_tail_when_something_still_fits() {
        let tasks = vec![pick(1, 4, 0, 30), pick(2, 8, 0, 10)];
        let stations = vec![st(1, 2, 0)];
        let ctx = CostContext::new(&tasks, &stations);
        let s = state(5, 50, 1.0);
        let c = edge_cost(Point::new(0, 0), Target::Pick(&tasks[0]), &s, &ctx);
        // 2 to the station, 2 onwards to the pick; task 2 (d=10) fits the
        // remaining 20 afterwards, so no tail.
        assert_eq!(c, EdgeCost::DeliverThenTravel(4.0));
    }

    #[test]
    fn removal_refreshes_the_demand_minima() {
        let tasks = vec![pick(1, 0, 0, 5), pick(2, 1, 0, 7), pick(3, 2, 0, 9)];
        let stations = vec![st(1, 5, 5)];
        let mut ctx = CostContext::new(&tasks, &stations);
        assert_eq!(ctx.min_other_demand(TaskId(1)), Some(7));
        assert_eq!(ctx.min_other_demand(TaskId(2)), Some(5));
        ctx.remove(TaskId(1));
        assert_eq!(ctx.min_other_demand(TaskId(2)), Some(9));
        ctx.remove(TaskId(3));
        assert_eq!(ctx.min_other_demand(TaskId(2)), None);
        assert_eq!(ctx.remaining_count(), 1);
    }

    #[test]
    fn full_robot_with_feasible_pick_never_detours() {
        // gamma == capacity and the pick fits: only cases 2 and 3 reachable.
        let tasks = vec![pick(1, 3, 3, 20), pick(2, -3, 1, 20)];
        let stations = vec![st(1, 1, 1)];
        let ctx = CostContext::new(&tasks, &stations);
        let s = state(50, 50, 1.0);
        for t in &tasks {
            let c = edge_cost(Point::new(0, 0), Target::Pick(t), &s, &ctx);
            assert!(matches!(
                c,
                EdgeCost::Travel(_) | EdgeCost::TravelThenDeliver(_)
            ));
        }
    }
}
