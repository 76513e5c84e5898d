//! C ABI over the waypath core.
//!
//! Every function returns a [`WpStatus`]; results come back through out
//! pointers. On failure the message is kept per thread and can be copied out
//! with [`wp_last_error`]. Handles are opaque and must be released with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, UnwindSafe};
use std::path::Path;
use std::ptr;

use waypath::geometry::{steer_from_theta, theta_multi, theta_single, Direction, GeometryError, ImagePoint, ThetaDeg};
use waypath::net::{decode, encode, NetError, WireMessage};
use waypath::pathfind::{dijkstra, Cell, OccupancyGrid, PathfindError};
use waypath::sim::{run_mission, MissionReport, Outcome, Phase, Scenario, SimError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    /// Input text or file could not be parsed.
    Parse = 3,
    NotFound = 4,
    Io = 5,
    /// Geometry undefined for the given points.
    Degenerate = 6,
    Unreachable = 7,
    /// Output buffer too small; the needed size is reported.
    BufferTooSmall = 8,
    Protocol = 9,
    /// The operation failed for a reason not covered above.
    Failed = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpDirection {
    Straight = 0,
    Left = 1,
    Right = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpOutcome {
    Done = 0,
    Trapped = 1,
    Timeout = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpMessageKind {
    Theta = 0,
    Range = 1,
    TargetFound = 2,
    LaneLost = 3,
    Done = 4,
    Error = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpPhase {
    TurningToTarget = 0,
    DrivingStraight = 1,
    Avoiding = 2,
    Done = 3,
}

/// One trajectory sample.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpSample {
    pub t_s: f64,
    pub x_cm: f64,
    pub y_cm: f64,
    pub heading_deg: f64,
    pub phase: WpPhase,
}

/// Opaque scenario handle.
pub struct WpScenario(Scenario);

/// Opaque mission report handle.
pub struct WpMission(MissionReport);

/// Opaque occupancy grid handle.
pub struct WpGrid(OccupancyGrid);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: WpStatus, message: impl Into<String>) -> WpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), (WpStatus, String)> + UnwindSafe) -> WpStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            WpStatus::Ok
        }
        Ok(Err((status, msg))) => fail(status, msg),
        Err(_) => fail(WpStatus::Panic, "internal panic"),
    }
}

type Failure = (WpStatus, String);

fn null(name: &str) -> Failure {
    (WpStatus::NullArgument, format!("{name} is null"))
}

fn geometry(e: GeometryError) -> Failure {
    let status = match e {
        GeometryError::NonFinite(_) => WpStatus::InvalidArgument,
        _ => WpStatus::Degenerate,
    };
    (status, e.to_string())
}

fn pathfind(e: PathfindError) -> Failure {
    let status = match e {
        PathfindError::Unreachable { .. } | PathfindError::BlockedEndpoint(_) => WpStatus::Unreachable,
        PathfindError::GridParse { .. } => WpStatus::Parse,
        PathfindError::ZeroLengthBearing(_) => WpStatus::Degenerate,
        _ => WpStatus::InvalidArgument,
    };
    (status, e.to_string())
}

fn sim(e: SimError) -> Failure {
    let status = match &e {
        SimError::Parse { .. } => WpStatus::Parse,
        SimError::NotFound(_) => WpStatus::NotFound,
        SimError::Io(_) => WpStatus::Io,
        SimError::InvalidScenario(_) => WpStatus::InvalidArgument,
        _ => WpStatus::Failed,
    };
    (status, e.to_string())
}

fn net(e: NetError) -> Failure {
    let status = match e {
        NetError::Encode(_) => WpStatus::InvalidArgument,
        _ => WpStatus::Protocol,
    };
    (status, e.to_string())
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (WpStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

/// Copies `s` plus a NUL into `buf`. `written` (optional) receives the byte
/// count without the NUL, or the size needed when the buffer is too small.
unsafe fn copy_out(s: &str, buf: *mut c_char, len: usize, written: *mut usize) -> Result<(), Failure> {
    if let Some(w) = written.as_mut() {
        *w = s.len();
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    if s.len() + 1 > len {
        return Err((
            WpStatus::BufferTooSmall,
            format!("need {} bytes, have {len}", s.len() + 1),
        ));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated). An empty string means the last call succeeded.
///
/// # Safety
/// `buf` must point to `len` writable bytes; `written` may be null.
#[no_mangle]
pub unsafe extern "C" fn wp_last_error(buf: *mut c_char, len: usize, written: *mut usize) -> WpStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_out(&msg, buf, len, written) {
        Ok(()) => WpStatus::Ok,
        Err((status, _)) => status,
    }
}

/// Steering angle from one midline, in degrees; positive turns right.
///
/// # Safety
/// `theta_deg` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_theta_single(
    top_h: f64,
    top_v: f64,
    bottom_h: f64,
    bottom_v: f64,
    theta_deg: *mut f64,
) -> WpStatus {
    guard(|| {
        let out = out(theta_deg, "theta_deg")?;
        let t = theta_single(ImagePoint::new(top_h, top_v), ImagePoint::new(bottom_h, bottom_v)).map_err(geometry)?;
        *out = t.value();
        Ok(())
    })
}

/// Steering angle from the previous midline and the current top endpoint.
///
/// # Safety
/// `theta_deg` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_theta_multi(
    prev_top_h: f64,
    prev_top_v: f64,
    prev_bottom_h: f64,
    prev_bottom_v: f64,
    curr_top_h: f64,
    curr_top_v: f64,
    theta_deg: *mut f64,
) -> WpStatus {
    guard(|| {
        let out = out(theta_deg, "theta_deg")?;
        let t = theta_multi(
            ImagePoint::new(prev_top_h, prev_top_v),
            ImagePoint::new(prev_bottom_h, prev_bottom_v),
            ImagePoint::new(curr_top_h, curr_top_v),
        )
        .map_err(geometry)?;
        *out = t.value();
        Ok(())
    })
}

/// Turn-in-place command for a steering angle at the default turn rate.
///
/// # Safety
/// `direction` and `duration_s` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wp_steer(theta_deg: f64, direction: *mut WpDirection, duration_s: *mut f64) -> WpStatus {
    guard(|| {
        let (dir_out, dur_out) = (out(direction, "direction")?, out(duration_s, "duration_s")?);
        let theta = ThetaDeg::new(theta_deg).map_err(geometry)?;
        let cmd = steer_from_theta(theta);
        *dir_out = match cmd.direction {
            Direction::Straight => WpDirection::Straight,
            Direction::Left => WpDirection::Left,
            Direction::Right => WpDirection::Right,
        };
        *dur_out = cmd.duration_s;
        Ok(())
    })
}

/// Creates an empty grid.
///
/// # Safety
/// `grid` must be a valid pointer; the handle it receives is freed with
/// [`wp_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn wp_grid_new(cols: usize, rows: usize, cell_size_cm: f64, grid: *mut *mut WpGrid) -> WpStatus {
    guard(|| {
        let out = out(grid, "grid")?;
        let g = OccupancyGrid::new(cols, rows, cell_size_cm).map_err(pathfind)?;
        *out = Box::into_raw(Box::new(WpGrid(g)));
        Ok(())
    })
}

/// Parses the text grid format (header `cols rows cell_size`, then rows of
/// `.` and `#`).
///
/// # Safety
/// `source` must be a NUL-terminated string and `grid` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_grid_parse(source: *const c_char, grid: *mut *mut WpGrid) -> WpStatus {
    guard(|| {
        let out = out(grid, "grid")?;
        let g = OccupancyGrid::parse(text(source, "source")?).map_err(pathfind)?;
        *out = Box::into_raw(Box::new(WpGrid(g)));
        Ok(())
    })
}

/// # Safety
/// `grid` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn wp_grid_set_blocked(grid: *mut WpGrid, col: usize, row: usize, blocked: bool) -> WpStatus {
    guard(|| {
        let g = &mut out(grid, "grid")?.0;
        let cell = Cell::new(col, row);
        if !g.in_bounds(cell) {
            return Err(pathfind(PathfindError::OutOfBounds(cell)));
        }
        g.set_blocked(cell, blocked);
        Ok(())
    })
}

/// Shortest 8-connected path cost in cm and the operation count.
///
/// # Safety
/// `grid` must be a live handle; `cost_cm` and `ops` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wp_grid_dijkstra(
    grid: *const WpGrid,
    source_col: usize,
    source_row: usize,
    goal_col: usize,
    goal_row: usize,
    cost_cm: *mut f64,
    ops: *mut u64,
) -> WpStatus {
    guard(|| {
        let g = &grid.as_ref().ok_or_else(|| null("grid"))?.0;
        let (cost_out, ops_out) = (out(cost_cm, "cost_cm")?, out(ops, "ops")?);
        let r = dijkstra(g, Cell::new(source_col, source_row), Cell::new(goal_col, goal_row)).map_err(pathfind)?;
        *cost_out = r.cost;
        *ops_out = r.ops;
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wp_grid_free(grid: *mut WpGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Encodes one wire line, including the trailing newline. `value` is used by
/// THETA and RANGE, `error_text` by ERROR (may be null otherwise).
///
/// # Safety
/// `buf` must point to `len` writable bytes; `error_text` must be null or a
/// NUL-terminated string; `written` may be null.
#[no_mangle]
pub unsafe extern "C" fn wp_wire_encode(
    kind: WpMessageKind,
    value: f64,
    error_text: *const c_char,
    buf: *mut c_char,
    len: usize,
    written: *mut usize,
) -> WpStatus {
    guard(|| {
        let msg = match kind {
            WpMessageKind::Theta => WireMessage::Theta(value),
            WpMessageKind::Range => WireMessage::Range(value),
            WpMessageKind::TargetFound => WireMessage::TargetFound,
            WpMessageKind::LaneLost => WireMessage::LaneLost,
            WpMessageKind::Done => WireMessage::Done,
            WpMessageKind::Error => WireMessage::Error(text(error_text, "error_text")?.to_string()),
        };
        let line = encode(&msg).map_err(net)?;
        copy_out(&line, buf, len, written)
    })
}

/// Decodes one wire line. `value` receives the THETA or RANGE payload (0
/// otherwise). For ERROR the text is copied into `error_buf` when it is not
/// null.
///
/// # Safety
/// `line` must be a NUL-terminated string; `kind` and `value` valid pointers;
/// `error_buf` null or `error_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wp_wire_decode(
    line: *const c_char,
    kind: *mut WpMessageKind,
    value: *mut f64,
    error_buf: *mut c_char,
    error_len: usize,
) -> WpStatus {
    guard(|| {
        let (kind_out, value_out) = (out(kind, "kind")?, out(value, "value")?);
        let msg = decode(text(line, "line")?).map_err(net)?;
        *value_out = 0.0;
        *kind_out = match msg {
            WireMessage::Theta(v) => {
                *value_out = v;
                WpMessageKind::Theta
            }
            WireMessage::Range(v) => {
                *value_out = v;
                WpMessageKind::Range
            }
            WireMessage::TargetFound => WpMessageKind::TargetFound,
            WireMessage::LaneLost => WpMessageKind::LaneLost,
            WireMessage::Done => WpMessageKind::Done,
            WireMessage::Error(t) => {
                if !error_buf.is_null() {
                    copy_out(&t, error_buf, error_len, ptr::null_mut())?;
                }
                WpMessageKind::Error
            }
        };
        Ok(())
    })
}

/// Loads a scenario JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `scenario` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_scenario_load(path: *const c_char, scenario: *mut *mut WpScenario) -> WpStatus {
    guard(|| {
        let out = out(scenario, "scenario")?;
        let s = Scenario::load(Path::new(text(path, "path")?)).map_err(sim)?;
        *out = Box::into_raw(Box::new(WpScenario(s)));
        Ok(())
    })
}

/// Parses a scenario from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `scenario` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_scenario_from_json(json: *const c_char, scenario: *mut *mut WpScenario) -> WpStatus {
    guard(|| {
        let out = out(scenario, "scenario")?;
        let s = Scenario::from_json(text(json, "json")?).map_err(sim)?;
        *out = Box::into_raw(Box::new(WpScenario(s)));
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wp_scenario_free(scenario: *mut WpScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs a full simulated mission. Trapped and timed-out missions still
/// succeed here; check [`wp_mission_outcome`].
///
/// # Safety
/// `scenario` must be a live handle and `mission` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_mission_run(scenario: *const WpScenario, mission: *mut *mut WpMission) -> WpStatus {
    guard(|| {
        let s = &scenario.as_ref().ok_or_else(|| null("scenario"))?.0;
        let out = out(mission, "mission")?;
        let report = run_mission(s).map_err(sim)?;
        *out = Box::into_raw(Box::new(WpMission(report)));
        Ok(())
    })
}

/// Outcome, elapsed simulated seconds and driven path length in cm.
///
/// # Safety
/// `mission` must be a live handle; the out pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn wp_mission_summary(
    mission: *const WpMission,
    outcome: *mut WpOutcome,
    elapsed_s: *mut f64,
    path_length_cm: *mut f64,
) -> WpStatus {
    guard(|| {
        let r = &mission.as_ref().ok_or_else(|| null("mission"))?.0;
        if let Some(o) = outcome.as_mut() {
            *o = match r.outcome {
                Outcome::Done => WpOutcome::Done,
                Outcome::Trapped => WpOutcome::Trapped,
                Outcome::Timeout => WpOutcome::Timeout,
            };
        }
        if let Some(e) = elapsed_s.as_mut() {
            *e = r.elapsed_s;
        }
        if let Some(p) = path_length_cm.as_mut() {
            *p = r.path_length_cm;
        }
        Ok(())
    })
}

/// Convenience accessor for the outcome alone.
///
/// # Safety
/// `mission` must be a live handle and `outcome` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_mission_outcome(mission: *const WpMission, outcome: *mut WpOutcome) -> WpStatus {
    if outcome.is_null() {
        return fail(WpStatus::NullArgument, "outcome is null");
    }
    wp_mission_summary(mission, outcome, ptr::null_mut(), ptr::null_mut())
}

/// Number of trajectory samples.
///
/// # Safety
/// `mission` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_mission_sample_count(mission: *const WpMission, count: *mut usize) -> WpStatus {
    guard(|| {
        let r = &mission.as_ref().ok_or_else(|| null("mission"))?.0;
        *out(count, "count")? = r.trajectory.len();
        Ok(())
    })
}

/// # Safety
/// `mission` must be a live handle and `sample` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_mission_sample(mission: *const WpMission, index: usize, sample: *mut WpSample) -> WpStatus {
    guard(|| {
        let r = &mission.as_ref().ok_or_else(|| null("mission"))?.0;
        let dst = out(sample, "sample")?;
        let s = r.trajectory.get(index).ok_or_else(|| {
            (
                WpStatus::InvalidArgument,
                format!("sample {index} out of range ({} samples)", r.trajectory.len()),
            )
        })?;
        *dst = WpSample {
            t_s: s.t_s,
            x_cm: s.position.x,
            y_cm: s.position.y,
            heading_deg: s.heading_deg,
            phase: match s.phase {
                Phase::TurningToTarget => WpPhase::TurningToTarget,
                Phase::DrivingStraight => WpPhase::DrivingStraight,
                Phase::Avoiding => WpPhase::Avoiding,
                Phase::Done => WpPhase::Done,
            },
        };
        Ok(())
    })
}

/// # Safety
/// `mission` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wp_mission_free(mission: *mut WpMission) {
    if !mission.is_null() {
        drop(Box::from_raw(mission));
    }
}
