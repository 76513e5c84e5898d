use std::fmt::Write as _;

use super::{Scenario, TrajectorySample};

pub const CSV_HEADER: &str = "t_s,x_cm,y_cm,heading_deg,phase";

pub fn trajectory_csv(trajectory: &[TrajectorySample]) -> String {
    let mut out = String::with_capacity(48 * (trajectory.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in trajectory {
        let _ = writeln!(
            out,
            "{:.3},{:.3},{:.3},{:.3},{}",
            s.t_s, s.position.x, s.position.y, s.heading_deg, s.phase
        );
    }
    out
}

/// World plot: bounds, obstacles, target, start and the driven path. One SVG
/// unit is one centimeter, with north up.
pub fn trajectory_svg(scenario: &Scenario, trajectory: &[TrajectorySample]) -> String {
    let (w, h) = (scenario.bounds.width, scenario.bounds.height);
    let y = |wy: f64| h - wy;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.2} {h:.2}" width="{w:.0}" height="{h:.0}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{w:.2}" height="{h:.2}" fill="#ffffff" stroke="#000000" stroke-width="1"/>"##
    );
    for lane in &scenario.lanes {
        let pts: Vec<String> = lane.iter().map(|p| format!("{:.2},{:.2}", p.x, y(p.y))).collect();
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#999999" stroke-width="{:.2}"/>"##,
            pts.join(" "),
            scenario.lane_tape_width_cm
        );
    }
    for o in &scenario.obstacles {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="#555555"/>"##,
            o.center.x,
            y(o.center.y),
            o.radius
        );
    }
    let t = &scenario.target;
    let _ = writeln!(
        out,
        r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="#2e8b57" fill-opacity="0.4"/>"##,
        t.position.x,
        y(t.position.y),
        t.radius
    );
    let start = scenario.robot.position;
    let _ = writeln!(
        out,
        r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#1f4e9c" stroke-width="1"/>"##,
        start.x,
        y(start.y),
        scenario.robot.radius
    );
    if !trajectory.is_empty() {
        let mut pts: Vec<String> = Vec::with_capacity(trajectory.len());
        for s in trajectory {
            let p = format!("{:.2},{:.2}", s.position.x, y(s.position.y));
            // turns in place repeat the same point
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##,
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}
