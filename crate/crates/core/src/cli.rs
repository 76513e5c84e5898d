//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit status: 0 on success, 1 when the mission or
//! benchmark itself fails, 2 for bad usage or unreadable input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::geometry::ThetaDeg;
use crate::net::{
    run_loopback_mission, run_robot_client, serve_planner, ClientConfig, ClientOutcome, ServerConfig, SessionOutcome,
    SimExecutor, DEFAULT_PORT, PORT_ENV,
};
use crate::pathfind::{compare_planners, Cell, ComparisonReport, OccupancyGrid, PathfindError, WorldPoint};
use crate::sim::{
    plan_initial_theta, render_onboard, trajectory_csv, trajectory_svg, Bounds, MissionReport, Outcome, Pose, Scenario,
    SimError,
};
use crate::vision::{overlay, GrayImage, LanePipeline, LaneTracker, VisionError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "waypath", version, about = "Robot navigation workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a mission through an in-process planner/robot session.
    Mission(MissionArgs),
    /// Run the lane pipeline on PGM frames or a rendered frame.
    Lane(LaneArgs),
    /// Compare Dijkstra and theta planning on a grid.
    Bench(BenchArgs),
    /// Serve theta to robot clients.
    Serve(ServeArgs),
    /// Connect to a planner and drive the simulated robot.
    Robot(RobotArgs),
}

#[derive(Debug, Args)]
struct Overrides {
    /// Simulation time step, seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Forward speed, cm/s.
    #[arg(long)]
    speed: Option<f64>,
}

#[derive(Debug, Args)]
struct MissionArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "waypath-out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Args)]
struct LaneArgs {
    /// PGM frames, in order.
    images: Vec<PathBuf>,
    /// Render the frame from the scenario (or a built-in lane testbed).
    #[arg(long)]
    synthetic: bool,
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Robot yaw for the synthetic frame, degrees counterclockwise.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    yaw: f64,
    /// Also report the multi-iteration theta over the frame sequence.
    #[arg(long)]
    multi: bool,
    #[arg(long, default_value = "waypath-out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridSize {
    cols: usize,
    rows: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (c, r) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected COLSxROWS, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        Ok(GridSize {
            cols: parse(c)?,
            rows: parse(r)?,
        })
    }
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Grid file: a "cols rows cell_size_cm" header, then rows of '.' and '#'.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    grid: Option<PathBuf>,
    /// Random grid of the given size.
    #[arg(long, value_name = "COLSxROWS")]
    random: Option<GridSize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of blocked cells for --random.
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "waypath-out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, env = PORT_ENV, default_value_t = DEFAULT_PORT)]
    port: u16,
    /// Exit after this many sessions.
    #[arg(long)]
    sessions: Option<usize>,
}

#[derive(Debug, Args)]
struct RobotArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, env = PORT_ENV, default_value_t = DEFAULT_PORT)]
    port: u16,
    #[arg(long, default_value = "waypath-out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

/// A failed run: exit status plus the message for stderr.
struct Failure(i32, String);

impl Failure {
    fn usage(msg: impl ToString) -> Self {
        Failure(EXIT_USAGE, msg.to_string())
    }

    fn domain(msg: impl ToString) -> Self {
        Failure(EXIT_FAILURE, msg.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Parse { .. } | SimError::NotFound(_) | SimError::Io(_) | SimError::InvalidScenario(_) => {
                Failure::usage(e)
            }
            other => Failure::domain(other),
        }
    }
}

type CliResult = Result<i32, Failure>;

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Mission(a) => cmd_mission(&a, out),
        Command::Lane(a) => cmd_lane(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Serve(a) => cmd_serve(&a, out),
        Command::Robot(a) => cmd_robot(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn load_scenario(path: &Path, overrides: Option<&Overrides>) -> Result<Scenario, Failure> {
    let mut scenario = Scenario::load(path)?;
    if let Some(o) = overrides {
        if let Some(dt) = o.dt {
            scenario.params.dt = dt;
        }
        if let Some(speed) = o.speed {
            scenario.params.forward_speed = speed;
        }
        scenario.validate()?;
    }
    Ok(scenario)
}

fn prepare_out(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct MissionSummary<'a> {
    scenario: &'a str,
    outcome: Outcome,
    signaled: bool,
    initial_theta_deg: f64,
    elapsed_s: f64,
    path_length_cm: f64,
    final_distance_cm: f64,
}

fn write_mission_artifacts(scenario: &Scenario, report: &MissionReport, dir: &Path) -> Result<(), Failure> {
    prepare_out(dir)?;
    write_file(&dir.join("trajectory.csv"), trajectory_csv(&report.trajectory))?;
    write_file(&dir.join("transcript.txt"), report.transcript.as_str())?;
    write_file(
        &dir.join("trajectory.svg"),
        trajectory_svg(scenario, &report.trajectory),
    )?;
    let summary = MissionSummary {
        scenario: &scenario.name,
        outcome: report.outcome,
        signaled: report.signaled,
        initial_theta_deg: report.initial_theta.value(),
        elapsed_s: report.elapsed_s,
        path_length_cm: report.path_length_cm,
        final_distance_cm: report.final_distance_cm,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(&dir.join("mission.json"), json + "\n")
}

fn print_mission(report: &MissionReport, out: &mut dyn Write) {
    let _ = writeln!(
        out,
        "outcome={} elapsed_s={:.3} path_length_cm={:.2} final_distance_cm={:.2} signaled={}",
        report.outcome, report.elapsed_s, report.path_length_cm, report.final_distance_cm, report.signaled
    );
}

fn mission_code(report: &MissionReport) -> i32 {
    if report.outcome == Outcome::Done {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn cmd_mission(args: &MissionArgs, out: &mut dyn Write) -> CliResult {
    let scenario = load_scenario(&args.scenario, Some(&args.overrides))?;
    let run = run_loopback_mission(&scenario).map_err(Failure::domain)?;
    let report = match (run.mission, &run.client.outcome) {
        (Some(report), _) => report,
        (None, ClientOutcome::ProtocolFailure(reason)) => return Err(Failure::domain(reason)),
        (None, _) => {
            let reason = match run.server.outcome {
                SessionOutcome::PlannerError(e) => e,
                other => format!("{other:?}"),
            };
            return Err(Failure::domain(format!("mission did not run: {reason}")));
        }
    };
    write_mission_artifacts(&scenario, &report, &args.out)?;
    print_mission(&report, out);
    Ok(mission_code(&report))
}

fn lane_testbed(yaw_ccw_deg: f64) -> Scenario {
    let mut s = Scenario::open_field(
        Bounds {
            width: 200.0,
            height: 800.0,
        },
        WorldPoint::new(100.0, 50.0),
        -yaw_ccw_deg,
        WorldPoint::new(100.0, 700.0),
    );
    s.name = "lane testbed".into();
    s.lanes = vec![
        vec![WorldPoint::new(80.0, 0.0), WorldPoint::new(80.0, 800.0)],
        vec![WorldPoint::new(120.0, 0.0), WorldPoint::new(120.0, 800.0)],
    ];
    s
}

fn lane_frames(args: &LaneArgs) -> Result<Vec<GrayImage>, Failure> {
    if args.synthetic {
        if !args.images.is_empty() {
            return Err(Failure::usage("--synthetic takes no image paths"));
        }
        let base = match &args.scenario {
            Some(path) => load_scenario(path, None)?,
            None => lane_testbed(0.0),
        };
        let render = |yaw: f64| {
            let pose = Pose {
                position: base.robot.position,
                heading_deg: base.robot.heading_deg - yaw,
            };
            render_onboard(pose, &base, &base.camera.onboard)
        };
        // with --multi: the robot keeps yawing the same way between frames
        let yaws: Vec<f64> = if args.multi {
            vec![0.0, args.yaw]
        } else {
            vec![args.yaw]
        };
        return Ok(yaws.into_iter().map(render).collect());
    }
    if args.images.is_empty() {
        return Err(Failure::usage("give at least one PGM frame or --synthetic"));
    }
    args.images
        .iter()
        .map(|p| GrayImage::read_pgm(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))))
        .collect()
}

/// Keeps "-0.00" out of printed angles.
fn unsigned_zero(deg: f64) -> f64 {
    if deg.abs() < 0.005 {
        0.0
    } else {
        deg
    }
}

fn cmd_lane(args: &LaneArgs, out: &mut dyn Write) -> CliResult {
    let frames = lane_frames(args)?;
    if args.multi && frames.len() < 2 {
        return Err(Failure::usage("--multi needs at least two frames"));
    }
    let pipeline = LanePipeline::default();
    let mut tracker = LaneTracker::new();
    let mut last = None;
    for img in &frames {
        let frame = pipeline.detect(img).map_err(Failure::domain)?;
        let obs = match tracker.observe(&frame.lines, img.width(), img.height()) {
            Ok(obs) => obs,
            Err(e @ VisionError::LaneLost { .. }) => {
                let _ = writeln!(out, "lane_lost");
                return Err(Failure::domain(e));
            }
            Err(e) => return Err(Failure::domain(e)),
        };
        last = Some((frame, obs));
    }
    let (frame, obs) = last.expect("at least one frame");
    let theta = obs.theta_single().map_err(Failure::domain)?;
    prepare_out(&args.out)?;
    write_file(&args.out.join("edges.pgm"), frame.edges.to_pgm())?;
    write_file(&args.out.join("overlay.pgm"), overlay(&frame.edges, &obs).to_pgm())?;
    let _ = writeln!(out, "theta_deg={:.2}", unsigned_zero(theta.value()));
    if obs.degraded {
        let _ = writeln!(out, "degraded=true");
    }
    if args.multi {
        let multi = tracker
            .theta_multi()
            .expect("two frames observed")
            .map_err(Failure::domain)?;
        let _ = writeln!(out, "theta_multi_deg={:.2}", unsigned_zero(multi.value()));
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BenchGrid {
    source: &'static str,
    cols: usize,
    rows: usize,
    seed: Option<u64>,
    density: Option<f64>,
    free_cells: usize,
}

#[derive(Serialize)]
struct PlannerStable {
    mean_ops: f64,
    cost_cm: f64,
}

#[derive(Serialize)]
struct BenchStable {
    grid: BenchGrid,
    trials: usize,
    reachable: bool,
    dijkstra: Option<PlannerStable>,
    theta: Option<PlannerStable>,
    ops_ratio: Option<f64>,
}

/// Timing fields, kept apart so the stable section can be compared exactly.
#[derive(Serialize)]
struct BenchVolatile {
    dijkstra_mean_time_s: f64,
    theta_mean_time_s: f64,
    speedup: f64,
}

#[derive(Serialize)]
struct BenchReport {
    stable: BenchStable,
    volatile: Option<BenchVolatile>,
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult {
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let (grid, meta) = match (&args.grid, args.random) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let grid = OccupancyGrid::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            (grid, ("file", None, None))
        }
        (None, Some(size)) => {
            let grid =
                OccupancyGrid::random(size.cols, size.rows, 1.0, args.density, args.seed).map_err(Failure::usage)?;
            (grid, ("random", Some(args.seed), Some(args.density)))
        }
        (None, None) => return Err(Failure::usage("give --grid or --random")),
    };
    let source = Cell::new(0, 0);
    let goal = Cell::new(grid.cols() - 1, grid.rows() - 1);
    let result = compare_planners(&grid, source, goal, args.trials);
    let grid_meta = BenchGrid {
        source: meta.0,
        cols: grid.cols(),
        rows: grid.rows(),
        seed: meta.1,
        density: meta.2,
        free_cells: grid.free_count(),
    };
    let (report, code) = match result {
        Ok(r) => (bench_report(grid_meta, &r), EXIT_OK),
        Err(PathfindError::Unreachable { .. } | PathfindError::BlockedEndpoint(_)) => {
            let stable = BenchStable {
                grid: grid_meta,
                trials: args.trials,
                reachable: false,
                dijkstra: None,
                theta: None,
                ops_ratio: None,
            };
            (BenchReport { stable, volatile: None }, EXIT_FAILURE)
        }
        Err(e) => return Err(Failure::usage(e)),
    };
    prepare_out(&args.out)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&args.out.join("bench.json"), json + "\n")?;
    match (&report.stable.dijkstra, &report.stable.theta, &report.volatile) {
        (Some(d), Some(t), Some(v)) => {
            let _ = writeln!(
                out,
                "{:<10} {:>14} {:>14} {:>12}",
                "planner", "mean_time_s", "mean_ops", "cost_cm"
            );
            let _ = writeln!(
                out,
                "{:<10} {:>14.3e} {:>14.1} {:>12.3}",
                "dijkstra", v.dijkstra_mean_time_s, d.mean_ops, d.cost_cm
            );
            let _ = writeln!(
                out,
                "{:<10} {:>14.3e} {:>14.1} {:>12.3}",
                "theta", v.theta_mean_time_s, t.mean_ops, t.cost_cm
            );
            let _ = writeln!(
                out,
                "speedup={:.1} ops_ratio={:.1}",
                v.speedup,
                report.stable.ops_ratio.unwrap_or(1.0)
            );
        }
        _ => {
            let _ = writeln!(out, "dijkstra: goal unreachable");
        }
    }
    Ok(code)
}

fn bench_report(grid: BenchGrid, r: &ComparisonReport) -> BenchReport {
    BenchReport {
        stable: BenchStable {
            grid,
            trials: r.trials,
            reachable: true,
            dijkstra: Some(PlannerStable {
                mean_ops: r.dijkstra.mean_ops,
                cost_cm: r.dijkstra.cost_cm,
            }),
            theta: Some(PlannerStable {
                mean_ops: r.theta.mean_ops,
                cost_cm: r.theta.cost_cm,
            }),
            ops_ratio: Some(r.ops_ratio),
        },
        volatile: Some(BenchVolatile {
            dijkstra_mean_time_s: r.dijkstra.mean_time_s,
            theta_mean_time_s: r.theta.mean_time_s,
            speedup: r.speedup,
        }),
    }
}

fn cmd_serve(args: &ServeArgs, out: &mut dyn Write) -> CliResult {
    let scenario = load_scenario(&args.scenario, None)?;
    let listener = TcpListener::bind(("0.0.0.0", args.port))
        .map_err(|e| Failure::usage(format!("cannot listen on port {}: {e}", args.port)))?;
    let _ = writeln!(out, "listening on port {}", args.port);
    let _ = out.flush();
    let config = ServerConfig {
        max_sessions: args.sessions,
        ..ServerConfig::default()
    };
    let planner = || -> Result<ThetaDeg, String> { plan_initial_theta(&scenario).map_err(|e| e.to_string()) };
    let reports = serve_planner(listener, planner, &config).map_err(Failure::domain)?;
    for (i, r) in reports.iter().enumerate() {
        let _ = writeln!(out, "session {} {:?}", i + 1, r.outcome);
        let _ = out.write_all(r.log.render().as_bytes());
    }
    let all_ok = reports.iter().all(|r| r.completed());
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_robot(args: &RobotArgs, out: &mut dyn Write) -> CliResult {
    let scenario = load_scenario(&args.scenario, Some(&args.overrides))?;
    let mut executor = SimExecutor::new(scenario.clone());
    let client = run_robot_client((args.host.as_str(), args.port), &mut executor, &ClientConfig::default())
        .map_err(Failure::domain)?;
    if let ClientOutcome::ProtocolFailure(reason) = &client.outcome {
        return Err(Failure::domain(format!("protocol failure: {reason}")));
    }
    let report = executor
        .report
        .ok_or_else(|| Failure::domain(format!("{:?}", client.outcome)))?;
    write_mission_artifacts(&scenario, &report, &args.out)?;
    print_mission(&report, out);
    Ok(mission_code(&report))
}
