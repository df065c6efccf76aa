//! Instance and solution file formats.
//!
//! Instances use a TSPLIB-style text layout. The native variant is tagged
//! `TYPE : HFMDVRP-DV` and lists picking tasks, delivery stations, and a
//! robot fleet with per-robot start cells, capacities, and speeds:
//!
//! ```text
//! NAME : SMT-t5-r2-d2
//! TYPE : HFMDVRP-DV
//! FAMILY : SMT
//! PICKING : 5
//! STATIONS : 2
//! ROBOTS : 2
//! EDGE_WEIGHT_TYPE : MANHATTAN
//! NODE_COORD_SECTION
//! 1 10 4
//! ...               (tasks 1..=PICKING, then stations)
//! DEMAND_SECTION
//! 1 12
//! ...               (every node; stations carry 0)
//! STATION_SECTION
//! 6
//! 7
//! -1
//! ROBOT_SECTION
//! 1 3 3 100 1.5     (id, x, y, capacity, speed)
//! 2 9 0 55 2
//! EOF
//! ```
//!
//! Classic CVRP files (`DIMENSION` + `CAPACITY` + `DEPOT_SECTION`) are also
//! accepted: depot nodes become delivery stations, the remaining nodes
//! become picking tasks, and the fleet is `k` robots of the file capacity at
//! speed 1 starting on the first depot. `k` comes from a `VEHICLES` or
//! `TRUCKS` header, else a `-k<digits>` suffix in the name, else a
//! "trucks: <digits>" note in the comment, else 1. `EDGE_WEIGHT_TYPE`
//! may read `EUC_2D` in such files, but distances are always Manhattan here.
//!
//! Written files are canonical: fixed header order, ids ascending, single
//! spaces, `\n` line ends. `parse_instance(format_instance(x)) == x` for
//! every valid instance. Solutions are stored as versioned JSON.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    DeliveryStation, Family, Instance, PickingTask, Point, Robot, RobotId, Solution, StationId,
    TaskId,
};

/// A malformed file, pointing at the offending 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// File-level failure: unreadable path or malformed content.
#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Read(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Version stamp written into solution JSON files.
pub const SOLUTION_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct SolutionFile {
    version: u32,
    #[serde(flatten)]
    solution: Solution,
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

/// Render `instance` in the canonical native format.
pub fn format_instance(instance: &Instance) -> String {
    let m = instance.tasks.len();
    let p = instance.stations.len();
    let mut out = String::new();
    out.push_str(&format!("NAME : {}\n", instance.name));
    out.push_str("TYPE : HFMDVRP-DV\n");
    out.push_str(&format!("FAMILY : {}\n", instance.family));
    out.push_str(&format!("PICKING : {m}\n"));
    out.push_str(&format!("STATIONS : {p}\n"));
    out.push_str(&format!("ROBOTS : {}\n", instance.robots.len()));
    out.push_str("EDGE_WEIGHT_TYPE : MANHATTAN\n");
    out.push_str("NODE_COORD_SECTION\n");
    for task in &instance.tasks {
        out.push_str(&format!("{} {} {}\n", task.id, task.pos.x, task.pos.y));
    }
    for station in &instance.stations {
        let node = m + station.id.index() + 1;
        out.push_str(&format!("{node} {} {}\n", station.pos.x, station.pos.y));
    }
    out.push_str("DEMAND_SECTION\n");
    for task in &instance.tasks {
        out.push_str(&format!("{} {}\n", task.id, task.demand));
    }
    for node in m + 1..=m + p {
        out.push_str(&format!("{node} 0\n"));
    }
    out.push_str("STATION_SECTION\n");
    for node in m + 1..=m + p {
        out.push_str(&format!("{node}\n"));
    }
    out.push_str("-1\n");
    out.push_str("ROBOT_SECTION\n");
    for robot in &instance.robots {
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            robot.id, robot.start.x, robot.start.y, robot.capacity, robot.speed
        ));
    }
    out.push_str("EOF\n");
    out
}

/// Write `instance` to `path` in the canonical native format.
pub fn write_instance(path: &Path, instance: &Instance) -> Result<(), IoError> {
    fs::write(path, format_instance(instance))?;
    Ok(())
}

/// Serialize a solution to pretty JSON with a format version stamp.
pub fn format_solution(solution: &Solution) -> String {
    let file = SolutionFile {
        version: SOLUTION_FORMAT_VERSION,
        solution: solution.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("solution serializes");
    text.push('\n');
    text
}

/// Write a solution JSON file.
pub fn write_solution(path: &Path, solution: &Solution) -> Result<(), IoError> {
    fs::write(path, format_solution(solution))?;
    Ok(())
}

/// Parse a solution JSON file, rejecting unknown format versions.
pub fn parse_solution(text: &str) -> Result<Solution, ParseError> {
    let file: SolutionFile =
        serde_json::from_str(text).map_err(|e| ParseError::new(e.line().max(1), e.to_string()))?;
    if file.version != SOLUTION_FORMAT_VERSION {
        return Err(ParseError::new(
            1,
            format!(
                "unsupported solution format version {} (expected {})",
                file.version, SOLUTION_FORMAT_VERSION
            ),
        ));
    }
    Ok(file.solution)
}

/// Read and parse a solution JSON file.
pub fn read_solution(path: &Path) -> Result<Solution, IoError> {
    let text = fs::read_to_string(path)?;
    Ok(parse_solution(&text)?)
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Read and parse an instance file (native or classic CVRP layout). Invalid
/// UTF-8 bytes are replaced before parsing, so this never panics.
pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    Ok(parse_instance(&text)?)
}

#[derive(Default)]
struct Headers {
    name: Option<String>,
    file_type: Option<String>,
    comment: Option<String>,
    family: Option<(Family, usize)>,
    dimension: Option<usize>,
    picking: Option<usize>,
    stations: Option<usize>,
    robots: Option<usize>,
    capacity: Option<u32>,
    vehicles: Option<(usize, usize)>,
}

#[derive(Default)]
struct Sections {
    /// Per node id: coordinates and the defining line.
    coords: Vec<Option<(Point, usize)>>,
    /// Per node id: demand and the defining line.
    demands: Vec<Option<(u32, usize)>>,
    /// Station / depot node ids in listed order, with their lines.
    station_nodes: Vec<(usize, usize)>,
    /// Per robot id: robot and the defining line.
    robots: Vec<Option<(Robot, usize)>>,
    saw_station_section: bool,
    saw_robot_section: bool,
}

/// Parse an instance from text in either accepted layout.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut headers = Headers::default();
    let mut sections = Sections::default();
    let mut last_line = 0;

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut pending: Option<(usize, &str)> = None;
    loop {
        let (line_no, line) = match pending.take().or_else(|| lines.next()) {
            Some(x) => x,
            None => break,
        };
        last_line = line_no;
        if line.is_empty() {
            continue;
        }
        let keyword = line.trim_end_matches(':').trim_end();
        match keyword {
            "EOF" => {
                for (no, rest) in lines.by_ref() {
                    if !rest.trim().is_empty() {
                        return Err(ParseError::new(no, "content after EOF"));
                    }
                }
                break;
            }
            "NODE_COORD_SECTION" => {
                let count = node_count(&headers, line_no)?;
                sections.coords = vec![None; count];
                read_node_lines(
                    &mut lines,
                    &mut pending,
                    line_no,
                    count,
                    |no, id, fields| {
                        if fields.len() != 2 {
                            return Err(ParseError::new(no, "expected: <node> <x> <y>"));
                        }
                        let x = parse_coord(no, fields[0])?;
                        let y = parse_coord(no, fields[1])?;
                        store(&mut sections.coords, id, (Point { x, y }, no), no, "node")
                    },
                )?;
            }
            "DEMAND_SECTION" => {
                let count = node_count(&headers, line_no)?;
                sections.demands = vec![None; count];
                read_node_lines(
                    &mut lines,
                    &mut pending,
                    line_no,
                    count,
                    |no, id, fields| {
                        if fields.len() != 1 {
                            return Err(ParseError::new(no, "expected: <node> <demand>"));
                        }
                        let d: u32 = fields[0].parse().map_err(|_| {
                            ParseError::new(no, format!("invalid demand `{}`", fields[0]))
                        })?;
                        store(&mut sections.demands, id, (d, no), no, "node")
                    },
                )?;
            }
            "STATION_SECTION" | "DEPOT_SECTION" => {
                sections.saw_station_section = true;
                read_id_list(&mut lines, line_no, &mut sections.station_nodes)?;
            }
            "ROBOT_SECTION" => {
                sections.saw_robot_section = true;
                let count = headers.robots.ok_or_else(|| {
                    ParseError::new(line_no, "ROBOT_SECTION requires a ROBOTS header first")
                })?;
                let count = checked_count(count, line_no)?;
                sections.robots = vec![None; count];
                read_node_lines(
                    &mut lines,
                    &mut pending,
                    line_no,
                    count,
                    |no, id, fields| {
                        if fields.len() != 4 {
                            return Err(ParseError::new(
                                no,
                                "expected: <robot> <x> <y> <capacity> <speed>",
                            ));
                        }
                        let x = parse_coord(no, fields[0])?;
                        let y = parse_coord(no, fields[1])?;
                        let capacity: u32 = fields[2].parse().map_err(|_| {
                            ParseError::new(no, format!("invalid capacity `{}`", fields[2]))
                        })?;
                        let speed: f64 = fields[3].parse().map_err(|_| {
                            ParseError::new(no, format!("invalid speed `{}`", fields[3]))
                        })?;
                        let robot = Robot {
                            id: RobotId(id as u32),
                            start: Point { x, y },
                            capacity,
                            speed,
                        };
                        store(&mut sections.robots, id, (robot, no), no, "robot")
                    },
                )?;
            }
            _ => parse_header_line(&mut headers, line_no, line)?,
        }
    }

    assemble(headers, sections, last_line.max(1))
}

/// Upper bound on declared node and robot counts; guards allocations
/// against absurd headers.
const MAX_COUNT: usize = 10_000_000;

fn checked_count(count: usize, line_no: usize) -> Result<usize, ParseError> {
    if count > MAX_COUNT {
        return Err(ParseError::new(
            line_no,
            format!("declared count {count} exceeds the limit of {MAX_COUNT}"),
        ));
    }
    Ok(count)
}

/// Number of nodes the coordinate and demand sections must cover.
fn node_count(headers: &Headers, line_no: usize) -> Result<usize, ParseError> {
    if let Some(m) = headers.picking {
        let p = headers
            .stations
            .ok_or_else(|| ParseError::new(line_no, "PICKING given without STATIONS"))?;
        if let Some(dim) = headers.dimension {
            if dim != m + p {
                return Err(ParseError::new(
                    line_no,
                    format!("DIMENSION {dim} contradicts PICKING {m} + STATIONS {p}"),
                ));
            }
        }
        checked_count(m.saturating_add(p), line_no)
    } else if let Some(dim) = headers.dimension {
        checked_count(dim, line_no)
    } else {
        Err(ParseError::new(
            line_no,
            "section before DIMENSION or PICKING/STATIONS headers",
        ))
    }
}

fn parse_coord(line: usize, s: &str) -> Result<i32, ParseError> {
    // Tolerate a redundant `.0` tail, common in exported data.
    let trimmed = s.strip_suffix(".0").unwrap_or(s);
    trimmed
        .parse::<i32>()
        .map_err(|_| ParseError::new(line, format!("invalid integer coordinate `{s}`")))
}

fn store<T>(
    slots: &mut [Option<T>],
    id: usize,
    value: T,
    line: usize,
    what: &str,
) -> Result<(), ParseError> {
    if id == 0 || id > slots.len() {
        return Err(ParseError::new(
            line,
            format!("{what} id {id} out of range 1..={}", slots.len()),
        ));
    }
    if slots[id - 1].is_some() {
        return Err(ParseError::new(line, format!("duplicate {what} id {id}")));
    }
    slots[id - 1] = Some(value);
    Ok(())
}

/// Read exactly `count` id-prefixed entry lines, handing the id and the
/// remaining fields to `entry`. Blank lines are skipped; a non-entry line
/// before `count` entries is an error, and the first line after the last
/// entry is pushed back for the main loop.
fn read_node_lines<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    pending: &mut Option<(usize, &'a str)>,
    section_line: usize,
    count: usize,
    mut entry: impl FnMut(usize, usize, &[&str]) -> Result<(), ParseError>,
) -> Result<(), ParseError> {
    let mut seen = 0;
    let mut last = section_line;
    while seen < count {
        let (no, line) = match lines.next() {
            Some(x) => x,
            None => {
                return Err(ParseError::new(
                    last,
                    format!("section ended after {seen} of {count} entries"),
                ))
            }
        };
        last = no;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let id: usize = match fields[0].parse() {
            Ok(id) => id,
            Err(_) => {
                return Err(ParseError::new(
                    no,
                    format!(
                        "expected {} more section entries, found `{line}`",
                        count - seen
                    ),
                ))
            }
        };
        entry(no, id, &fields[1..])?;
        seen += 1;
    }
    if let Some(next) = lines.next() {
        *pending = Some(next);
    }
    Ok(())
}

/// Read whitespace-separated node ids until a `-1` terminator.
fn read_id_list<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    section_line: usize,
    out: &mut Vec<(usize, usize)>,
) -> Result<(), ParseError> {
    for (no, line) in lines {
        for field in line.split_whitespace() {
            if field == "-1" {
                return Ok(());
            }
            let id: usize = field.parse().map_err(|_| {
                ParseError::new(
                    no,
                    format!("expected a node id or -1 terminator, found `{field}`"),
                )
            })?;
            out.push((id, no));
        }
    }
    Err(ParseError::new(
        section_line,
        "id list missing -1 terminator",
    ))
}

fn parse_header_line(headers: &mut Headers, line_no: usize, line: &str) -> Result<(), ParseError> {
    let (key, value) = match line.split_once(':') {
        Some((k, v)) => (k.trim(), v.trim()),
        None => {
            return Err(ParseError::new(
                line_no,
                format!("unrecognized line `{line}`"),
            ))
        }
    };
    let parse_usize = |v: &str| {
        v.parse::<usize>()
            .map_err(|_| ParseError::new(line_no, format!("{key} needs an integer, got `{v}`")))
    };
    match key.to_ascii_uppercase().as_str() {
        "NAME" => headers.name = Some(value.to_string()),
        "TYPE" => {
            if value != "HFMDVRP-DV" && value != "CVRP" {
                return Err(ParseError::new(
                    line_no,
                    format!("unsupported TYPE `{value}` (expected HFMDVRP-DV or CVRP)"),
                ));
            }
            headers.file_type = Some(value.to_string());
        }
        "COMMENT" => headers.comment = Some(value.to_string()),
        "FAMILY" => {
            let family = Family::parse(value)
                .ok_or_else(|| ParseError::new(line_no, format!("unknown FAMILY `{value}`")))?;
            headers.family = Some((family, line_no));
        }
        "DIMENSION" => headers.dimension = Some(parse_usize(value)?),
        "PICKING" => headers.picking = Some(parse_usize(value)?),
        "STATIONS" => headers.stations = Some(parse_usize(value)?),
        "ROBOTS" => headers.robots = Some(parse_usize(value)?),
        "CAPACITY" => {
            headers.capacity = Some(value.parse::<u32>().map_err(|_| {
                ParseError::new(line_no, format!("CAPACITY needs an integer, got `{value}`"))
            })?)
        }
        "VEHICLES" | "TRUCKS" => headers.vehicles = Some((parse_usize(value)?, line_no)),
        "EDGE_WEIGHT_TYPE" => {
            if value != "MANHATTAN" && value != "EUC_2D" {
                return Err(ParseError::new(
                    line_no,
                    format!("unsupported EDGE_WEIGHT_TYPE `{value}`"),
                ));
            }
        }
        // Tolerated TSPLIB noise (display hints and the like).
        _ => {}
    }
    Ok(())
}

fn assemble(headers: Headers, sections: Sections, eof_line: usize) -> Result<Instance, ParseError> {
    if headers.picking.is_some() {
        assemble_native(headers, sections, eof_line)
    } else if headers.dimension.is_some() {
        assemble_classic(headers, sections, eof_line)
    } else {
        Err(ParseError::new(
            eof_line,
            "missing DIMENSION or PICKING/STATIONS/ROBOTS headers",
        ))
    }
}

/// Check that coordinate and demand slots are fully populated.
fn complete_nodes(sections: &Sections, count: usize, eof_line: usize) -> Result<(), ParseError> {
    if sections.coords.len() != count || sections.coords.iter().any(Option::is_none) {
        return Err(ParseError::new(
            eof_line,
            "NODE_COORD_SECTION missing or incomplete",
        ));
    }
    if sections.demands.len() != count || sections.demands.iter().any(Option::is_none) {
        return Err(ParseError::new(
            eof_line,
            "DEMAND_SECTION missing or incomplete",
        ));
    }
    Ok(())
}

fn assemble_native(
    headers: Headers,
    sections: Sections,
    eof_line: usize,
) -> Result<Instance, ParseError> {
    let m = headers.picking.unwrap_or(0);
    let p = headers
        .stations
        .ok_or_else(|| ParseError::new(eof_line, "missing STATIONS header"))?;
    let n = headers
        .robots
        .ok_or_else(|| ParseError::new(eof_line, "missing ROBOTS header"))?;
    if p == 0 {
        return Err(ParseError::new(eof_line, "STATIONS must be at least 1"));
    }
    complete_nodes(&sections, m + p, eof_line)?;

    if !sections.saw_station_section {
        return Err(ParseError::new(eof_line, "missing STATION_SECTION"));
    }
    let mut listed = vec![false; p];
    for &(id, line) in &sections.station_nodes {
        if id <= m || id > m + p {
            return Err(ParseError::new(
                line,
                format!(
                    "station node {id} outside the station range {}..={}",
                    m + 1,
                    m + p
                ),
            ));
        }
        if listed[id - m - 1] {
            return Err(ParseError::new(
                line,
                format!("duplicate station node {id}"),
            ));
        }
        listed[id - m - 1] = true;
    }
    if !listed.iter().all(|&x| x) {
        return Err(ParseError::new(
            eof_line,
            "STATION_SECTION does not list every station node",
        ));
    }

    let mut tasks = Vec::with_capacity(m);
    for node in 1..=m {
        let (pos, _) = sections.coords[node - 1].unwrap();
        let (demand, _) = sections.demands[node - 1].unwrap();
        tasks.push(PickingTask {
            id: TaskId(node as u32),
            pos,
            demand,
        });
    }
    let mut stations = Vec::with_capacity(p);
    for node in m + 1..=m + p {
        let (pos, _) = sections.coords[node - 1].unwrap();
        let (demand, line) = sections.demands[node - 1].unwrap();
        if demand != 0 {
            return Err(ParseError::new(
                line,
                format!("station node {node} must have zero demand"),
            ));
        }
        stations.push(DeliveryStation {
            id: StationId((node - m) as u32),
            pos,
        });
    }
    if !sections.saw_robot_section && n > 0 {
        return Err(ParseError::new(eof_line, "missing ROBOT_SECTION"));
    }
    if sections.robots.len() != n || sections.robots.iter().any(Option::is_none) {
        return Err(ParseError::new(eof_line, "ROBOT_SECTION incomplete"));
    }
    let robots: Vec<Robot> = sections
        .robots
        .into_iter()
        .map(|slot| slot.unwrap().0)
        .collect();

    let family = resolve_family(&headers, &stations, &robots);
    Ok(Instance {
        name: headers.name.unwrap_or_else(|| "unnamed".to_string()),
        family,
        tasks,
        stations,
        robots,
    })
}

fn assemble_classic(
    headers: Headers,
    sections: Sections,
    eof_line: usize,
) -> Result<Instance, ParseError> {
    let dim = headers.dimension.unwrap_or(0);
    complete_nodes(&sections, dim, eof_line)?;
    let capacity = headers
        .capacity
        .ok_or_else(|| ParseError::new(eof_line, "classic file needs a CAPACITY header"))?;
    if capacity == 0 {
        return Err(ParseError::new(eof_line, "CAPACITY must be positive"));
    }
    if sections.station_nodes.is_empty() {
        return Err(ParseError::new(
            eof_line,
            "classic file needs a DEPOT_SECTION",
        ));
    }

    let mut is_depot = vec![false; dim];
    let mut stations = Vec::new();
    for &(id, line) in &sections.station_nodes {
        if id == 0 || id > dim {
            return Err(ParseError::new(
                line,
                format!("depot node {id} out of range 1..={dim}"),
            ));
        }
        if is_depot[id - 1] {
            return Err(ParseError::new(line, format!("duplicate depot node {id}")));
        }
        is_depot[id - 1] = true;
        let (pos, _) = sections.coords[id - 1].unwrap();
        let (demand, dline) = sections.demands[id - 1].unwrap();
        if demand != 0 {
            return Err(ParseError::new(
                dline,
                format!("depot node {id} must have zero demand"),
            ));
        }
        stations.push(DeliveryStation {
            id: StationId(stations.len() as u32 + 1),
            pos,
        });
    }

    // Non-depot nodes become picking tasks, renumbered in node order.
    let mut tasks = Vec::with_capacity(dim - stations.len());
    for node in 1..=dim {
        if is_depot[node - 1] {
            continue;
        }
        let (pos, _) = sections.coords[node - 1].unwrap();
        let (demand, _) = sections.demands[node - 1].unwrap();
        tasks.push(PickingTask {
            id: TaskId(tasks.len() as u32 + 1),
            pos,
            demand,
        });
    }

    let fleet_size = classic_fleet_size(&headers)?;
    let start = stations[0].pos;
    let robots: Vec<Robot> = (1..=fleet_size)
        .map(|i| Robot {
            id: RobotId(i as u32),
            start,
            capacity,
            speed: 1.0,
        })
        .collect();

    let family = resolve_family(&headers, &stations, &robots);
    Ok(Instance {
        name: headers.name.unwrap_or_else(|| "unnamed".to_string()),
        family,
        tasks,
        stations,
        robots,
    })
}

/// Fleet size of a classic file: VEHICLES/TRUCKS header, else `-k<digits>`
/// in the name, else "trucks: <digits>" in the comment, else 1.
fn classic_fleet_size(headers: &Headers) -> Result<usize, ParseError> {
    if let Some((k, line)) = headers.vehicles {
        if k == 0 {
            return Err(ParseError::new(line, "fleet size must be positive"));
        }
        return Ok(k);
    }
    if let Some(name) = &headers.name {
        if let Some(k) = k_suffix(name) {
            return Ok(k);
        }
    }
    if let Some(comment) = &headers.comment {
        let lower = comment.to_ascii_lowercase();
        if let Some(at) = lower.find("trucks") {
            if let Some(k) = first_int(&lower[at + "trucks".len()..]) {
                if k > 0 {
                    return Ok(k);
                }
            }
        }
    }
    Ok(1)
}

/// Last `-k<digits>` group in a name like `E-n76-k8`.
fn k_suffix(name: &str) -> Option<usize> {
    let lower = name.to_ascii_lowercase();
    let bytes = lower.as_bytes();
    let mut best = None;
    for i in 0..bytes.len().saturating_sub(2) {
        if bytes[i] == b'-' && bytes[i + 1] == b'k' && bytes[i + 2].is_ascii_digit() {
            let digits: String = lower[i + 2..]
                .chars()
                .take_while(char::is_ascii_digit)
                .collect();
            if let Ok(k) = digits.parse::<usize>() {
                if k > 0 {
                    best = Some(k);
                }
            }
        }
    }
    best
}

/// First decimal integer in `s`, if any fits a usize.
fn first_int(s: &str) -> Option<usize> {
    let start = s.find(|c: char| c.is_ascii_digit())?;
    let digits: String = s[start..]
        .chars()
        .take_while(char::is_ascii_digit)
        .collect();
    digits.parse().ok()
}

/// FAMILY header when present, else a structural guess from station count
/// and fleet uniformity.
fn resolve_family(headers: &Headers, stations: &[DeliveryStation], robots: &[Robot]) -> Family {
    if let Some((family, _)) = headers.family {
        return family;
    }
    let homogeneous = robots
        .windows(2)
        .all(|w| w[0].capacity == w[1].capacity && w[0].speed == w[1].speed);
    match (stations.len() == 1, homogeneous) {
        (true, true) => Family::Xmt,
        (true, false) => Family::Rmt,
        (false, true) => Family::Wmt,
        (false, false) => Family::Smt,
    }
}
