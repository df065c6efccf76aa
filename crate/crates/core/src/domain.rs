//! Task domination: which robots price a task cheapest right now.
//!
//! For every unassigned task the estimator is evaluated against every robot;
//! the task's domain `ψ(t)` is the argmin set (ties within a relative
//! tolerance all count), and `φ(r)` is the transpose — the tasks a robot
//! currently dominates. Validity flags on the robot side let the dispatcher
//! invalidate stale domains without recomputing immediately.
//!
//! [`compute_domain`] prices every task against every robot from scratch.
//! [`DomainCache`] produces the same map incrementally: between two
//! computations only robots that moved or changed load need their column
//! re-priced, unless the pool's two smallest demands changed (which shifts
//! the fits-afterwards branches for everyone and forces a full refill).

use crate::cost::{
    edge_cost, price_column, price_columns, CostContext, EdgeCost, RobotState, Target,
};
use crate::model::{approx_eq_rel, Point, TaskId};

/// Argmin map between remaining tasks and robots, plus per-robot validity.
/// Freshly computed maps are valid for every robot; `phi`/`psi` stay exact
/// transposes of each other.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMap {
    phi: Vec<Vec<TaskId>>,
    psi: Vec<Vec<usize>>,
    valid: Vec<bool>,
}

impl DomainMap {
    /// Tasks dominated by the robot at `robot_idx`, ascending id.
    pub fn phi(&self, robot_idx: usize) -> &[TaskId] {
        &self.phi[robot_idx]
    }

    /// Robot indices dominating `task`, ascending.
    pub fn psi(&self, task: TaskId) -> &[usize] {
        &self.psi[task.index()]
    }

    pub fn robot_count(&self) -> usize {
        self.phi.len()
    }

    pub fn is_valid(&self, robot_idx: usize) -> bool {
        self.valid[robot_idx]
    }

    pub fn invalidate(&mut self, robot_idx: usize) {
        self.valid[robot_idx] = false;
    }

    /// Invalidates every robot dominating `task` (the dispatcher's reaction
    /// to that task being taken).
    pub fn invalidate_dominators(&mut self, task: TaskId) {
        for &r in &self.psi[task.index()] {
            self.valid[r] = false;
        }
    }
}

#[cfg(test)]
pub(crate) fn stub_domains(phi: Vec<Vec<TaskId>>, task_count: usize) -> DomainMap {
    let mut psi: Vec<Vec<usize>> = vec![Vec::new(); task_count];
    for (r, tasks) in phi.iter().enumerate() {
        for t in tasks {
            psi[t.index()].push(r);
        }
    }
    let valid = vec![true; phi.len()];
    DomainMap { phi, psi, valid }
}

/// A task no robot can ever serve: its demand exceeds every capacity.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("task {task} is unservable: no robot prices it below infinity")]
pub struct TaskUnservable {
    pub task: TaskId,
}

/// Builds the domination map for the remaining tasks in `ctx`.
///
/// Per task: one pass finds the cheapest finite estimate over all robots, a
/// second collects every robot within `tie_tolerance` (relative) of it. A
/// task with no finite estimate aborts with [`TaskUnservable`] — on a
/// validated instance that cannot happen.
pub fn compute_domain(
    states: &[RobotState],
    ctx: &CostContext<'_>,
    tie_tolerance: f64,
) -> Result<DomainMap, TaskUnservable> {
    let n = states.len();
    let mut phi: Vec<Vec<TaskId>> = vec![Vec::new(); n];
    let mut psi: Vec<Vec<usize>> = vec![Vec::new(); ctx.tasks.len()];
    let mut scratch = vec![f64::INFINITY; n];

    for t in ctx.remaining_ids() {
        let task = &ctx.tasks[t.index()];
        let mut best = f64::INFINITY;
        for (r, state) in states.iter().enumerate() {
            let c = edge_cost(state.pos, Target::Pick(task), state, ctx);
            scratch[r] = c.seconds();
            if scratch[r] < best {
                best = scratch[r];
            }
        }
        if !best.is_finite() {
            return Err(TaskUnservable { task: t });
        }
        for r in 0..n {
            if scratch[r].is_finite() && approx_eq_rel(scratch[r], best, tie_tolerance) {
                psi[t.index()].push(r);
                phi[r].push(t);
            }
        }
    }

    Ok(DomainMap {
        phi,
        psi,
        valid: vec![true; n],
    })
}

/// Sentinel for an empty tracked slot; never collides with a robot index.
const NO_ROBOT: u32 = u32::MAX;

/// Per-row fast-path filter, sized for a single 16-byte load. A re-priced
/// cell whose robot is neither tracked slot and whose price exceeds `gate`
/// cannot move the row minima or its tie set, so it needs no bookkeeping.
/// Tied and unservable rows pin `gate` to `+inf`, forcing every cell of the
/// row through the careful path.
#[derive(Debug, Clone, Copy)]
struct RowGate {
    gate: f64,
    min_robot: u32,
    second_robot: u32,
}

/// The two smallest remaining (demand, id) pairs, as tracked by
/// [`CostContext::demand_pair`].
type DemandPair = (Option<(u32, TaskId)>, Option<(u32, TaskId)>);

/// Smallest remaining demand excluding `id`, evaluated against a frozen
/// pair; mirrors what the estimator's fits-afterwards checks see.
fn min_other_of(pair: DemandPair, id: TaskId) -> Option<u32> {
    match pair.0 {
        Some((d, first)) if first != id => Some(d),
        Some(_) => pair.1.map(|(d, _)| d),
        None => None,
    }
}

/// Incremental provider of the same map [`compute_domain`] builds.
///
/// The cached cost matrix stays exact between refreshes because an entry
/// depends only on its robot's position and load, static task and station
/// data, and the pool's two smallest remaining demands. A refresh therefore
/// re-prices just the columns of robots whose position or load changed;
/// when the smallest-demand pair changed it repairs the few affected rows,
/// falling back to a full refill when the smallest demand value itself
/// moved (or on first use). Each row carries its two cheapest entries and
/// an exact `psi` tie set, synchronised on every change; `phi` and the
/// validity flags are then rebuilt in one cheap ascending pass. Costs are
/// produced by the same arithmetic in either path, so refreshed maps are
/// bit-identical to scratch ones — the tests drive both through random
/// event sequences and require equality.
///
/// The map lives inside the cache and is handed out mutably; callers may
/// flip validity flags between refreshes but must leave `phi`/`psi` alone,
/// which the borrow rules already enforce outside this module.
#[derive(Debug)]
pub struct DomainCache {
    map: DomainMap,
    robots: usize,
    tasks: usize,
    tolerance: f64,
    /// Row-major `tasks × robots` price matrix: entry `(t, r)` lives at
    /// `t * robots + r`, so one task's row is contiguous for rescans.
    cost: Vec<f64>,
    /// Fast-path filter plus the robots holding each row's two cheapest
    /// entries (`NO_ROBOT` for an empty or surrendered slot).
    gates: Vec<RowGate>,
    /// Exact cheapest entry of each row.
    min_val: Vec<f64>,
    /// Runner-up entry; exact while `second_robot` is tracked, otherwise a
    /// lower bound on every non-minimum cell (which is all the gate and the
    /// tie check need to stay sound).
    second_val: Vec<f64>,
    /// Whether `psi` holds more than the minimum robot.
    tied: Vec<bool>,
    robot_sig: Vec<(Point, u32)>,
    pair_sig: DemandPair,
    seen_removed: usize,
    filled: bool,
}

impl DomainCache {
    pub fn new() -> Self {
        DomainCache {
            map: DomainMap {
                phi: Vec::new(),
                psi: Vec::new(),
                valid: Vec::new(),
            },
            robots: 0,
            tasks: 0,
            tolerance: f64::NAN,
            cost: Vec::new(),
            gates: Vec::new(),
            min_val: Vec::new(),
            second_val: Vec::new(),
            tied: Vec::new(),
            robot_sig: Vec::new(),
            pair_sig: (None, None),
            seen_removed: 0,
            filled: false,
        }
    }

    /// Brings the cache up to date with `states`/`ctx` and returns the map,
    /// valid for every robot. Equivalent to a fresh [`compute_domain`]
    /// call, including the error case.
    pub fn refresh(
        &mut self,
        states: &[RobotState],
        ctx: &CostContext<'_>,
        tie_tolerance: f64,
    ) -> Result<&mut DomainMap, TaskUnservable> {
        let pair = ctx.demand_pair();
        let log = ctx.removed_log();
        let invalidated = !self.filled
            || self.robots != states.len()
            || self.tasks != ctx.tasks.len()
            || self.tolerance.to_bits() != tie_tolerance.to_bits()
            || log.len() < self.seen_removed
            || self.pair_needs_fill(pair);
        if invalidated {
            self.fill(states, ctx, tie_tolerance);
        } else {
            // Rows of assigned tasks go stale and are never read again;
            // only their psi entries must empty out for map equality.
            for i in self.seen_removed..log.len() {
                self.map.psi[log[i].index()].clear();
            }
            self.seen_removed = log.len();
            if self.pair_sig != pair {
                self.repair_pair_rows(pair, states, ctx);
            }
            let mut changed: Vec<(usize, &RobotState)> = Vec::new();
            for (r, state) in states.iter().enumerate() {
                if self.robot_sig[r] != (state.pos, state.gamma) {
                    self.robot_sig[r] = (state.pos, state.gamma);
                    changed.push((r, state));
                }
            }
            if !changed.is_empty() {
                let n = self.robots;
                price_columns(&changed, ctx, |r, t, c| {
                    let g = self.gates[t];
                    let ru = r as u32;
                    if c > g.gate && ru != g.min_robot && ru != g.second_robot {
                        self.cost[t * n + r] = c;
                    } else {
                        self.touch_cell(t, r, c);
                    }
                });
            }
        }
        self.rebuild_map(ctx)?;
        Ok(&mut self.map)
    }

    /// Whether a demand-pair change is too broad to repair row by row. With
    /// the smallest demand *value* intact, only tasks named in the old or
    /// new pair can see a different fits-afterwards threshold; a changed
    /// value (or a pool shrunk below two tasks) shifts it for everyone.
    fn pair_needs_fill(&self, pair: DemandPair) -> bool {
        if self.pair_sig == pair {
            return false;
        }
        !matches!(
            (self.pair_sig, pair),
            ((Some(o1), Some(_)), (Some(n1), Some(_))) if o1.0 == n1.0
        )
    }

    /// Re-prices the rows whose fits-afterwards threshold moved with the
    /// demand pair; see [`DomainCache::pair_needs_fill`].
    fn repair_pair_rows(&mut self, pair: DemandPair, states: &[RobotState], ctx: &CostContext<'_>) {
        let old = self.pair_sig;
        let named = [
            old.0.map(|(_, id)| id),
            old.1.map(|(_, id)| id),
            pair.0.map(|(_, id)| id),
            pair.1.map(|(_, id)| id),
        ];
        for (i, id) in named.iter().enumerate() {
            let Some(id) = *id else { continue };
            if named[..i].contains(&Some(id)) || !ctx.is_remaining(id) {
                continue;
            }
            if min_other_of(old, id) == min_other_of(pair, id) {
                continue;
            }
            let t = id.index();
            let n = self.robots;
            let row = &mut self.cost[t * n..(t + 1) * n];
            for (cell, state) in row.iter_mut().zip(states) {
                *cell = edge_cost(state.pos, Target::Pick(&ctx.tasks[t]), state, ctx).seconds();
            }
            self.resync_row(t);
        }
        self.pair_sig = pair;
    }

    fn fill(&mut self, states: &[RobotState], ctx: &CostContext<'_>, tie_tolerance: f64) {
        let n = states.len();
        let m = ctx.tasks.len();
        self.robots = n;
        self.tasks = m;
        self.tolerance = tie_tolerance;
        self.cost.clear();
        self.cost.resize(m * n, f64::INFINITY);
        self.gates.clear();
        self.gates.resize(
            m,
            RowGate {
                gate: f64::INFINITY,
                min_robot: NO_ROBOT,
                second_robot: NO_ROBOT,
            },
        );
        self.min_val.clear();
        self.min_val.resize(m, f64::INFINITY);
        self.second_val.clear();
        self.second_val.resize(m, f64::INFINITY);
        self.tied.clear();
        self.tied.resize(m, false);
        self.map.phi.resize(n, Vec::new());
        self.map.psi.resize(m, Vec::new());
        for row in &mut self.map.psi {
            row.clear();
        }
        self.map.valid.clear();
        self.map.valid.resize(n, true);
        self.robot_sig.clear();
        self.robot_sig
            .extend(states.iter().map(|s| (s.pos, s.gamma)));
        self.seen_removed = ctx.removed_log().len();

        let cost = &mut self.cost;
        for (r, state) in states.iter().enumerate() {
            price_column(state, ctx, |t, c| cost[t * n + r] = c);
        }
        for t in ctx.remaining_ids() {
            self.resync_row(t.index());
        }

        self.pair_sig = ctx.demand_pair();
        self.filled = true;
    }

    /// Folds a price that may interact with row `t`'s tracked slots or tie
    /// set. After every call the minimum stays exact and the runner-up
    /// stays a sound lower bound with respect to the matrix contents, which
    /// is what makes sequential column reconciliation sound.
    fn touch_cell(&mut self, t: usize, r: usize, c: f64) {
        let n = self.robots;
        let cell = &mut self.cost[t * n + r];
        if cell.to_bits() == c.to_bits() {
            return;
        }
        *cell = c;
        let ru = r as u32;
        let g = self.gates[t];
        let min = self.min_val[t];
        let second = self.second_val[t];
        if ru == g.min_robot {
            if c <= min || c <= second {
                self.min_val[t] = c;
            } else {
                // the minimum robot got more expensive than the runner-up
                self.resync_row(t);
                return;
            }
        } else if c < min {
            self.second_val[t] = min;
            self.min_val[t] = c;
            self.gates[t].second_robot = g.min_robot;
            self.gates[t].min_robot = ru;
        } else if ru == g.second_robot {
            if c <= second {
                return self.set_second(t, c, ru, min);
            }
            if self.tied[t] {
                // the runner-up was a tie member, so membership re-derives
                self.finish_row(t);
                return;
            }
            // The runner-up fell behind some untracked robot. Its old value
            // still bounds every non-minimum cell from below, so it stays
            // behind as a sound underestimate instead of forcing a rescan;
            // the next promotion or resync restores exactness.
            self.gates[t].second_robot = NO_ROBOT;
            return;
        } else if c < second {
            return self.set_second(t, c, ru, min);
        } else if self.tied[t] || (c.is_finite() && approx_eq_rel(c, min, self.tolerance)) {
            // tie membership can shift even though the slots stand
            self.finish_row(t);
            return;
        } else {
            return;
        }
        self.finish_row(t);
    }

    /// Installs a new runner-up. The minimum robot is untouched, so as long
    /// as the row stays untied only the gate needs recomputing; a tie
    /// forming or already present goes through the full re-derivation.
    fn set_second(&mut self, t: usize, c: f64, ru: u32, min: f64) {
        self.second_val[t] = c;
        self.gates[t].second_robot = ru;
        if !self.tied[t] && !(c.is_finite() && approx_eq_rel(c, min, self.tolerance)) {
            let tie_edge = min * (1.0 + 2.0 * self.tolerance);
            self.gates[t].gate = if c > tie_edge { c } else { tie_edge };
        } else {
            self.finish_row(t);
        }
    }

    /// Recomputes row `t`'s two cheapest entries from its (exact) prices,
    /// then re-derives the gate, tie flag, and `psi` row.
    fn resync_row(&mut self, t: usize) {
        let n = self.robots;
        let mut min_val = f64::INFINITY;
        let mut min_robot = NO_ROBOT;
        let mut second_val = f64::INFINITY;
        let mut second_robot = NO_ROBOT;
        for (r, &v) in self.cost[t * n..(t + 1) * n].iter().enumerate() {
            if v < min_val {
                second_val = min_val;
                second_robot = min_robot;
                min_val = v;
                min_robot = r as u32;
            } else if v < second_val {
                second_val = v;
                second_robot = r as u32;
            }
        }
        self.min_val[t] = min_val;
        self.second_val[t] = second_val;
        self.gates[t].min_robot = min_robot;
        self.gates[t].second_robot = second_robot;
        self.finish_row(t);
    }

    /// Re-derives the gate, the tie flag, and the `psi` row from row `t`'s
    /// tracked slots. The gate is `max(second, min * (1 + 2·tol))`: the
    /// factor strictly exceeds `1 / (1 - tol)`, so prices above it are
    /// provably outside the tie tolerance of the minimum.
    fn finish_row(&mut self, t: usize) {
        let min = self.min_val[t];
        let second = self.second_val[t];
        if !min.is_finite() {
            // unservable row; the map rebuild turns it into the error
            self.gates[t].gate = f64::INFINITY;
            self.tied[t] = false;
            self.map.psi[t].clear();
            return;
        }
        if second.is_finite() && approx_eq_rel(second, min, self.tolerance) {
            self.gates[t].gate = f64::INFINITY;
            self.tied[t] = true;
            let n = self.robots;
            let row = &self.cost[t * n..(t + 1) * n];
            let psi = &mut self.map.psi[t];
            psi.clear();
            for (r, &v) in row.iter().enumerate() {
                if v.is_finite() && approx_eq_rel(v, min, self.tolerance) {
                    psi.push(r);
                }
            }
        } else {
            let tie_edge = min * (1.0 + 2.0 * self.tolerance);
            self.gates[t].gate = if second > tie_edge { second } else { tie_edge };
            self.tied[t] = false;
            let mr = self.gates[t].min_robot as usize;
            let psi = &mut self.map.psi[t];
            if psi.len() != 1 || psi[0] != mr {
                psi.clear();
                psi.push(mr);
            }
        }
    }

    /// Rebuilds `phi` and the validity flags from the per-row state. `psi`
    /// rows are exact at all times, so a single ascending pass over the
    /// remaining pool recreates every robot's list already sorted —
    /// mirroring the scratch construction, including the error case.
    fn rebuild_map(&mut self, ctx: &CostContext<'_>) -> Result<(), TaskUnservable> {
        let DomainMap { phi, psi, valid } = &mut self.map;
        for column in phi.iter_mut() {
            column.clear();
        }
        for flag in valid.iter_mut() {
            *flag = true;
        }
        for id in ctx.remaining_ids() {
            let t = id.index();
            if !self.min_val[t].is_finite() {
                return Err(TaskUnservable { task: id });
            }
            if self.tied[t] {
                for &r in &psi[t] {
                    phi[r].push(id);
                }
            } else {
                phi[self.gates[t].min_robot as usize].push(id);
            }
        }
        Ok(())
    }
}

impl Default for DomainCache {
    fn default() -> Self {
        Self::new()
    }
}

/// Cheapest candidate task for one robot; ties resolve to the lowest task
/// id (candidates are scanned in ascending order and only strict
/// improvements replace the incumbent). `None` for an empty candidate list.
pub fn min_cost_task(
    candidates: &[TaskId],
    state: &RobotState,
    ctx: &CostContext<'_>,
) -> Option<TaskId> {
    let mut best: Option<(f64, TaskId)> = None;
    for &t in candidates {
        let cost = edge_cost(state.pos, Target::Pick(&ctx.tasks[t.index()]), state, ctx);
        let seconds = cost.seconds();
        if best.map_or(true, |(b, _)| seconds < b) {
            best = Some((seconds, t));
        }
    }
    best.map(|(_, t)| t)
}

/// Convenience for callers that need the priced estimate alongside.
pub fn cost_of(task: TaskId, state: &RobotState, ctx: &CostContext<'_>) -> EdgeCost {
    edge_cost(
        state.pos,
        Target::Pick(&ctx.tasks[task.index()]),
        state,
        ctx,
    )
}
