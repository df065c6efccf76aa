//! Dataset generation: derives the four instance families from a classic
//! single-depot base instance.
//!
//! * `XMT` keeps the base as-is: one station, homogeneous fleet at the
//!   station, base demands.
//! * `RMT` swaps in a heterogeneous fleet sampled from a robot catalog and
//!   rescales demands to the fleet's mean capacity.
//! * `WMT` keeps the homogeneous fleet but disperses robots and stations
//!   over free grid cells; station count grows logarithmically with the
//!   task count.
//! * `SMT` combines both: sampled fleet, rescaled demands, dispersed
//!   robots and stations.
//!
//! All randomness flows through one [`SplitMix64`] stream seeded by the
//! caller, in a fixed draw order (fleet, then stations, then robot starts),
//! so a `(base, family, seed)` triple always regenerates the same instance.

use crate::model::{
    DeliveryStation, Family, Instance, PickingTask, Point, Robot, RobotId, StationId,
};
use crate::rng::SplitMix64;
use std::collections::HashSet;

/// One robot model a generated fleet can draw from.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotCatalogEntry {
    pub model: String,
    pub capacity: u32,
    pub speed: f64,
}

/// Problems reading a catalog file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("catalog line {line}: expected `model<TAB>capacity<TAB>speed`")]
    Malformed { line: usize },
    #[error("catalog is empty")]
    Empty,
}

/// Parses a tab-separated catalog: `model<TAB>capacity_kg<TAB>speed_m_s`,
/// `#` comments and blank lines ignored.
pub fn parse_catalog(text: &str) -> Result<Vec<RobotCatalogEntry>, CatalogError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t').map(str::trim);
        let entry = (|| {
            let model = parts.next()?.to_string();
            let capacity: u32 = parts.next()?.parse().ok()?;
            let speed: f64 = parts.next()?.parse().ok()?;
            if model.is_empty() || capacity == 0 || !(speed.is_finite() && speed > 0.0) {
                return None;
            }
            Some(RobotCatalogEntry {
                model,
                capacity,
                speed,
            })
        })();
        match entry {
            Some(e) => entries.push(e),
            None => return Err(CatalogError::Malformed { line: idx + 1 }),
        }
    }
    if entries.is_empty() {
        return Err(CatalogError::Empty);
    }
    Ok(entries)
}

/// The catalog shipped with the crate (25 commercial AMR models). Also
/// available as an editable file at `src/data/robot_catalog.tsv`.
pub fn default_catalog() -> Vec<RobotCatalogEntry> {
    parse_catalog(include_str!("data/robot_catalog.tsv")).expect("embedded catalog parses")
}

/// Normal-draw fleet sampling parameters. A capacity stratum maps a draw
/// value to the largest catalog capacity eligible for the pick; draws above
/// the last bound open the whole catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetSampling {
    pub mean: f64,
    pub std_dev: f64,
    /// `(draw_upper_bound, capacity_cap)`, checked in order.
    pub strata: Vec<(f64, u32)>,
}

impl FleetSampling {
    /// Defaults: mean at the smallest catalog capacity, wide spread, and
    /// strata biased toward light robots.
    pub fn for_catalog(catalog: &[RobotCatalogEntry]) -> Self {
        let mean = catalog.iter().map(|e| e.capacity).min().unwrap_or(17) as f64;
        Self {
            mean,
            std_dev: 578.0,
            strata: vec![
                (17.0, 18),
                (55.0, 55),
                (80.0, 80),
                (100.0, 100),
                (200.0, 300),
                (500.0, 500),
                (750.0, 1000),
            ],
        }
    }
}

/// Dataset generation failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("base instance unsuitable: {reason}")]
    BaseMalformed { reason: &'static str },
    #[error("grid too small: need {needed} free cells, bounding box offers {free}")]
    GridFull { needed: usize, free: u64 },
    #[error("fleet sampling made no progress; check mean/std/strata against the catalog")]
    SamplingStalled,
    #[error("sampled fleet cannot carry the heaviest adapted demand {demand}")]
    FleetTooWeak { demand: u32 },
}

/// Stations to create for `m` picking tasks: `max(1, floor(ln m - 1))`.
pub fn delivery_count(m: usize) -> usize {
    let ln = (m.max(1) as f64).ln();
    (ln - 1.0).floor().max(1.0) as usize
}

/// Rescales a base demand to a heterogeneous fleet: round-half-up of
/// `fleet_mean * demand / base_capacity`, at least 1.
pub fn adapt_demand(fleet_mean: f64, demand: u32, base_capacity: u32) -> u32 {
    let scaled = fleet_mean * demand as f64 / base_capacity as f64;
    ((scaled + 0.5).floor() as u64).max(1).min(u32::MAX as u64) as u32
}

/// Draws `n` robots from `catalog`. Each slot repeats a normal draw until
/// it lands in `[0, max catalog capacity]`, maps the value to a capacity
/// stratum, and picks uniformly among catalog entries within the stratum's
/// cap (falling back to the lightest entries if none qualify).
pub fn sample_fleet(
    catalog: &[RobotCatalogEntry],
    n: usize,
    sampling: &FleetSampling,
    rng: &mut SplitMix64,
) -> Result<Vec<RobotCatalogEntry>, GenError> {
    assert!(!catalog.is_empty(), "catalog must not be empty");
    let max_cap = catalog.iter().map(|e| e.capacity).max().unwrap() as f64;
    let min_cap = catalog.iter().map(|e| e.capacity).min().unwrap();
    let mut fleet = Vec::with_capacity(n);
    for _ in 0..n {
        let mut attempts = 0u32;
        let entry = loop {
            attempts += 1;
            if attempts > 10_000 {
                return Err(GenError::SamplingStalled);
            }
            let draw = rng.next_normal(sampling.mean, sampling.std_dev);
            if !(0.0..=max_cap).contains(&draw) {
                continue;
            }
            let cap = sampling
                .strata
                .iter()
                .find(|(bound, _)| draw <= *bound)
                .map(|(_, cap)| *cap);
            let eligible: Vec<usize> = match cap {
                Some(c) => (0..catalog.len())
                    .filter(|&i| catalog[i].capacity <= c)
                    .collect(),
                None => (0..catalog.len()).collect(),
            };
            let pool = if eligible.is_empty() {
                (0..catalog.len())
                    .filter(|&i| catalog[i].capacity == min_cap)
                    .collect()
            } else {
                eligible
            };
            let pick = rng.gen_range_u64(0, pool.len() as u64 - 1) as usize;
            break catalog[pool[pick]].clone();
        };
        fleet.push(entry);
    }
    Ok(fleet)
}

/// Everything [`generate_instance`] needs.
#[derive(Debug, Clone)]
pub struct GenSpec<'a> {
    pub base: &'a Instance,
    pub family: Family,
    pub seed: u64,
    pub catalog: &'a [RobotCatalogEntry],
    pub sampling: FleetSampling,
}

impl<'a> GenSpec<'a> {
    /// Spec with the default catalog-driven sampling parameters.
    pub fn new(
        base: &'a Instance,
        family: Family,
        seed: u64,
        catalog: &'a [RobotCatalogEntry],
    ) -> Self {
        let sampling = FleetSampling::for_catalog(catalog);
        Self {
            base,
            family,
            seed,
            catalog,
            sampling,
        }
    }
}

fn check_base(base: &Instance) -> Result<(), GenError> {
    if base.stations.len() != 1 {
        return Err(GenError::BaseMalformed {
            reason: "base must have exactly one station",
        });
    }
    if base.robots.is_empty() {
        return Err(GenError::BaseMalformed {
            reason: "base must have at least one robot",
        });
    }
    if base.tasks.is_empty() {
        return Err(GenError::BaseMalformed {
            reason: "base must have at least one task",
        });
    }
    let first = &base.robots[0];
    if !base
        .robots
        .iter()
        .all(|r| r.capacity == first.capacity && r.speed == first.speed)
    {
        return Err(GenError::BaseMalformed {
            reason: "base fleet must be homogeneous",
        });
    }
    Ok(())
}

/// Samples `count` distinct grid cells inside `(lo, hi)` that avoid
/// `occupied`. Rejection-samples while the grid is sparse and falls back to
/// a full shuffle of the free cells when it is crowded; both paths draw
/// from the same stream, so results stay seed-deterministic.
fn distinct_free_cells(
    lo: Point,
    hi: Point,
    occupied: &mut HashSet<Point>,
    count: usize,
    rng: &mut SplitMix64,
) -> Result<Vec<Point>, GenError> {
    let width = (hi.x as i64 - lo.x as i64 + 1) as u64;
    let height = (hi.y as i64 - lo.y as i64 + 1) as u64;
    let cells = width.saturating_mul(height);
    let free = cells.saturating_sub(occupied.len() as u64);
    if (count as u64) > free {
        return Err(GenError::GridFull {
            needed: count,
            free,
        });
    }

    let mut out = Vec::with_capacity(count);
    if (count as u64).saturating_mul(2) <= free {
        let mut attempts: u64 = 0;
        let budget = 1000 + 64 * count as u64;
        while out.len() < count && attempts < budget {
            attempts += 1;
            let p = Point::new(rng.gen_range_i32(lo.x, hi.x), rng.gen_range_i32(lo.y, hi.y));
            if occupied.insert(p) {
                out.push(p);
            }
        }
    }
    if out.len() < count {
        // Crowded grid: enumerate the free cells and shuffle.
        let mut pool: Vec<Point> = Vec::new();
        for x in lo.x..=hi.x {
            for y in lo.y..=hi.y {
                let p = Point::new(x, y);
                if !occupied.contains(&p) {
                    pool.push(p);
                }
            }
        }
        rng.shuffle(&mut pool);
        while out.len() < count {
            let p = pool.pop().expect("free cell count was checked");
            occupied.insert(p);
            out.push(p);
        }
    }
    Ok(out)
}

/// Generates one instance. Draw order per seed: fleet (heterogeneous
/// families), stations, robot starts. The instance name encodes the shape:
/// `<FAMILY>-t<tasks>-r<robots>-d<stations>`.
pub fn generate_instance(spec: &GenSpec<'_>) -> Result<Instance, GenError> {
    check_base(spec.base)?;
    let base = spec.base;
    let family = spec.family;
    let m = base.tasks.len();
    let n = base.robots.len();
    let base_capacity = base.robots[0].capacity;
    let base_speed = base.robots[0].speed;
    let mut rng = SplitMix64::new(spec.seed);

    // Fleet first: demand adaptation depends on its mean capacity.
    let fleet: Option<Vec<RobotCatalogEntry>> = if family.homogeneous() {
        None
    } else {
        let mut fleet = sample_fleet(spec.catalog, n, &spec.sampling, &mut rng)?;
        let mean = |f: &[RobotCatalogEntry]| {
            f.iter().map(|e| e.capacity as f64).sum::<f64>() / f.len() as f64
        };
        let max_adapted = |mu: f64| {
            base.tasks
                .iter()
                .map(|t| adapt_demand(mu, t.demand, base_capacity))
                .max()
                .unwrap_or(1)
        };
        let fleet_max = |f: &[RobotCatalogEntry]| f.iter().map(|e| e.capacity).max().unwrap();
        if max_adapted(mean(&fleet)) > fleet_max(&fleet) {
            // Defensive: only reachable when a base demand exceeds the base
            // capacity. Swap the last slot for a heaviest-model pick.
            let top = spec.catalog.iter().map(|e| e.capacity).max().unwrap();
            let heavy: Vec<&RobotCatalogEntry> =
                spec.catalog.iter().filter(|e| e.capacity == top).collect();
            let pick = rng.gen_range_u64(0, heavy.len() as u64 - 1) as usize;
            let slot = fleet.len() - 1;
            fleet[slot] = heavy[pick].clone();
            let worst = max_adapted(mean(&fleet));
            if worst > fleet_max(&fleet) {
                return Err(GenError::FleetTooWeak { demand: worst });
            }
        }
        Some(fleet)
    };

    let demands: Vec<u32> = match &fleet {
        None => base.tasks.iter().map(|t| t.demand).collect(),
        Some(fleet) => {
            let mu = fleet.iter().map(|e| e.capacity as f64).sum::<f64>() / fleet.len() as f64;
            base.tasks
                .iter()
                .map(|t| adapt_demand(mu, t.demand, base_capacity))
                .collect()
        }
    };

    let tasks: Vec<PickingTask> = base
        .tasks
        .iter()
        .zip(&demands)
        .map(|(t, &demand)| PickingTask {
            id: t.id,
            pos: t.pos,
            demand,
        })
        .collect();

    let (stations, starts): (Vec<DeliveryStation>, Vec<Point>) = if family.single_station() {
        let station = DeliveryStation {
            id: StationId(1),
            pos: base.stations[0].pos,
        };
        let starts = vec![station.pos; n];
        (vec![station], starts)
    } else {
        let p = delivery_count(m);
        let all_points = base
            .tasks
            .iter()
            .map(|t| t.pos)
            .chain(base.stations.iter().map(|s| s.pos));
        let (lo, hi) = all_points.clone().fold(
            (
                Point::new(i32::MAX, i32::MAX),
                Point::new(i32::MIN, i32::MIN),
            ),
            |(lo, hi), p| {
                (
                    Point::new(lo.x.min(p.x), lo.y.min(p.y)),
                    Point::new(hi.x.max(p.x), hi.y.max(p.y)),
                )
            },
        );
        let mut occupied: HashSet<Point> = base.tasks.iter().map(|t| t.pos).collect();
        let station_cells = distinct_free_cells(lo, hi, &mut occupied, p, &mut rng)?;
        let start_cells = distinct_free_cells(lo, hi, &mut occupied, n, &mut rng)?;
        let stations = station_cells
            .into_iter()
            .enumerate()
            .map(|(i, pos)| DeliveryStation {
                id: StationId(i as u32 + 1),
                pos,
            })
            .collect();
        (stations, start_cells)
    };

    let robots: Vec<Robot> = match &fleet {
        None => starts
            .iter()
            .enumerate()
            .map(|(i, &start)| Robot {
                id: RobotId(i as u32 + 1),
                start,
                capacity: base_capacity,
                speed: base_speed,
            })
            .collect(),
        Some(fleet) => starts
            .iter()
            .zip(fleet)
            .enumerate()
            .map(|(i, (&start, entry))| Robot {
                id: RobotId(i as u32 + 1),
                start,
                capacity: entry.capacity,
                speed: entry.speed,
            })
            .collect(),
    };

    Ok(Instance {
        name: format!("{}-t{}-r{}-d{}", family, m, n, stations.len()),
        family,
        tasks,
        stations,
        robots,
    })
}

/// Builds a synthetic single-depot base: depot in the middle of an
/// `extent x extent` grid, `m` distinct task cells with uniform demands in
/// `[1, max_demand]`, and `k` homogeneous robots at the depot. Useful for
/// experiments without external benchmark files.
pub fn synthetic_base(
    m: usize,
    k: usize,
    capacity: u32,
    extent: i32,
    max_demand: u32,
    seed: u64,
) -> Result<Instance, GenError> {
    assert!(extent > 0 && m > 0 && k > 0 && capacity > 0);
    let max_demand = max_demand.clamp(1, capacity);
    let mut rng = SplitMix64::new(seed);
    let depot = Point::new(extent / 2, extent / 2);
    let mut occupied = HashSet::from([depot]);
    let cells = distinct_free_cells(
        Point::new(0, 0),
        Point::new(extent, extent),
        &mut occupied,
        m,
        &mut rng,
    )?;
    let tasks = cells
        .into_iter()
        .enumerate()
        .map(|(i, pos)| PickingTask {
            id: crate::model::TaskId(i as u32 + 1),
            pos,
            demand: rng.gen_range_u64(1, max_demand as u64) as u32,
        })
        .collect();
    let robots = (0..k)
        .map(|i| Robot {
            id: RobotId(i as u32 + 1),
            start: depot,
            capacity,
            speed: 1.0,
        })
        .collect();
    Ok(Instance {
        name: format!("SYN-n{m}-k{k}"),
        family: Family::Xmt,
        tasks,
        stations: vec![DeliveryStation {
            id: StationId(1),
            pos: depot,
        }],
        robots,
    })
}
