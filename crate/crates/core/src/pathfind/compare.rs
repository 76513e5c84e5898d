use serde::{Deserialize, Serialize};

use super::{dijkstra, theta_plan, Cell, OccupancyGrid, PathfindError};

/// Floor for mean timings so ratios stay finite on very fast runs.
const MIN_TIME_S: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerStats {
    pub planner: String,
    pub mean_time_s: f64,
    pub mean_ops: f64,
    pub cost_cm: f64,
}

/// Dijkstra vs theta planning over the same endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub trials: usize,
    pub dijkstra: PlannerStats,
    pub theta: PlannerStats,
    /// Dijkstra mean time over theta mean time.
    pub speedup: f64,
    /// Dijkstra mean ops over theta mean ops.
    pub ops_ratio: f64,
}

/// Runs both planners `trials` times, sequentially. Theta planning starts at
/// the source cell center facing north and aims at the goal cell center.
/// When source and goal coincide no planning is needed: both costs are 0 and
/// both ratios are reported as 1.
pub fn compare_planners(
    grid: &OccupancyGrid,
    source: Cell,
    goal: Cell,
    trials: usize,
) -> Result<ComparisonReport, PathfindError> {
    if trials == 0 {
        return Err(PathfindError::NoTrials);
    }
    let (mut d_time, mut d_ops, mut d_cost) = (0.0, 0.0, 0.0);
    for _ in 0..trials {
        let r = dijkstra(grid, source, goal)?;
        d_time += r.wall_time_s;
        d_ops += r.ops as f64;
        d_cost = r.cost;
    }
    let n = trials as f64;
    let dijkstra_stats = PlannerStats {
        planner: "dijkstra".into(),
        mean_time_s: d_time / n,
        mean_ops: d_ops / n,
        cost_cm: d_cost,
    };

    if source == goal {
        return Ok(ComparisonReport {
            trials,
            dijkstra: dijkstra_stats,
            theta: PlannerStats {
                planner: "theta".into(),
                mean_time_s: 0.0,
                mean_ops: 0.0,
                cost_cm: 0.0,
            },
            speedup: 1.0,
            ops_ratio: 1.0,
        });
    }

    let (from, to) = (grid.center(source), grid.center(goal));
    let (mut t_time, mut t_ops, mut t_cost) = (0.0, 0.0, 0.0);
    for _ in 0..trials {
        let (r, _) = theta_plan(from, 0.0, to)?;
        t_time += r.wall_time_s;
        t_ops += r.ops as f64;
        t_cost = r.cost;
    }
    let theta_stats = PlannerStats {
        planner: "theta".into(),
        mean_time_s: t_time / n,
        mean_ops: t_ops / n,
        cost_cm: t_cost,
    };
    Ok(ComparisonReport {
        trials,
        speedup: dijkstra_stats.mean_time_s.max(MIN_TIME_S) / theta_stats.mean_time_s.max(MIN_TIME_S),
        ops_ratio: dijkstra_stats.mean_ops / theta_stats.mean_ops,
        dijkstra: dijkstra_stats,
        theta: theta_stats,
    })
}
