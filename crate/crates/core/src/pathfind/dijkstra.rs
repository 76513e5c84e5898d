use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use ordered_float::OrderedFloat;

use super::{Cell, OccupancyGrid, PathfindError, PlanResult};

const NEIGHBORS: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// 8-connected shortest path. Diagonal steps cost `sqrt(2)` cells and may not
/// squeeze between two blocked cells that touch at a corner. `ops` counts
/// heap pushes, heap pops and edge relaxation attempts.
pub fn dijkstra(grid: &OccupancyGrid, source: Cell, goal: Cell) -> Result<PlanResult, PathfindError> {
    let started = Instant::now();
    for cell in [source, goal] {
        if !grid.in_bounds(cell) {
            return Err(PathfindError::OutOfBounds(cell));
        }
        if grid.is_blocked(cell) {
            return Err(PathfindError::BlockedEndpoint(cell));
        }
    }
    let straight = grid.cell_size();
    let diagonal = straight * std::f64::consts::SQRT_2;

    let mut dist = vec![f64::INFINITY; grid.len()];
    let mut parent = vec![usize::MAX; grid.len()];
    let mut done = vec![false; grid.len()];
    // min-heap on (cost, cell index)
    let mut heap = BinaryHeap::new();
    let mut ops = 0u64;

    let src = grid.index(source);
    let dst = grid.index(goal);
    dist[src] = 0.0;
    heap.push(Reverse((OrderedFloat(0.0), src)));
    ops += 1;

    while let Some(Reverse((OrderedFloat(cost), i))) = heap.pop() {
        ops += 1;
        if done[i] {
            continue;
        }
        done[i] = true;
        if i == dst {
            break;
        }
        let here = grid.cell_at(i);
        for (dc, dr) in NEIGHBORS {
            let (nc, nr) = (here.col as isize + dc, here.row as isize + dr);
            if nc < 0 || nr < 0 || nc >= grid.cols() as isize || nr >= grid.rows() as isize {
                continue;
            }
            let next = Cell::new(nc as usize, nr as usize);
            if grid.is_blocked(next) {
                continue;
            }
            let step = if dc != 0 && dr != 0 {
                let side_a = Cell::new(nc as usize, here.row);
                let side_b = Cell::new(here.col, nr as usize);
                if grid.is_blocked(side_a) && grid.is_blocked(side_b) {
                    continue;
                }
                diagonal
            } else {
                straight
            };
            let j = grid.index(next);
            if done[j] {
                continue;
            }
            ops += 1;
            let candidate = cost + step;
            if candidate < dist[j] {
                dist[j] = candidate;
                parent[j] = i;
                heap.push(Reverse((OrderedFloat(candidate), j)));
                ops += 1;
            }
        }
    }

    if !dist[dst].is_finite() {
        return Err(PathfindError::Unreachable { from: source, goal });
    }
    let mut cells = vec![dst];
    while let Some(&last) = cells.last() {
        if last == src {
            break;
        }
        cells.push(parent[last]);
    }
    cells.reverse();
    Ok(PlanResult {
        path: cells.into_iter().map(|i| grid.center(grid.cell_at(i))).collect(),
        cost: dist[dst],
        ops,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    /// Exhaustive oracle: DFS over all simple paths with the same move rules.
    fn brute_force_cost(grid: &OccupancyGrid, source: Cell, goal: Cell) -> Option<f64> {
        fn walk(grid: &OccupancyGrid, at: Cell, goal: Cell, seen: &mut Vec<bool>, cost: f64, best: &mut Option<f64>) {
            if at == goal {
                if best.is_none_or(|b| cost < b) {
                    *best = Some(cost);
                }
                return;
            }
            for (dc, dr) in NEIGHBORS {
                let (nc, nr) = (at.col as isize + dc, at.row as isize + dr);
                if nc < 0 || nr < 0 || nc >= grid.cols() as isize || nr >= grid.rows() as isize {
                    continue;
                }
                let next = Cell::new(nc as usize, nr as usize);
                if grid.is_blocked(next) || seen[grid.index(next)] {
                    continue;
                }
                let diag = dc != 0 && dr != 0;
                if diag
                    && grid.is_blocked(Cell::new(nc as usize, at.row))
                    && grid.is_blocked(Cell::new(at.col, nr as usize))
                {
                    continue;
                }
                let step = if diag { SQRT2 } else { 1.0 } * grid.cell_size();
                let i = grid.index(next);
                seen[i] = true;
                walk(grid, next, goal, seen, cost + step, best);
                seen[i] = false;
            }
        }
        if grid.is_blocked(source) || grid.is_blocked(goal) {
            return None;
        }
        let mut seen = vec![false; grid.len()];
        seen[grid.index(source)] = true;
        let mut best = None;
        walk(grid, source, goal, &mut seen, 0.0, &mut best);
        best
    }

    #[test]
    fn empty_3x3_diagonal() {
        let grid = OccupancyGrid::new(3, 3, 1.0).unwrap();
        let r = dijkstra(&grid, Cell::new(0, 0), Cell::new(2, 2)).unwrap();
        let oracle = brute_force_cost(&grid, Cell::new(0, 0), Cell::new(2, 2)).unwrap();
        assert!((r.cost - oracle).abs() < 1e-12);
        assert!((r.cost - 2.0 * SQRT2).abs() < 1e-12);
        assert_eq!(r.path.first(), Some(&grid.center(Cell::new(0, 0))));
        assert_eq!(r.path.last(), Some(&grid.center(Cell::new(2, 2))));
    }

    #[test]
    fn source_equals_goal() {
        let grid = OccupancyGrid::new(4, 4, 2.0).unwrap();
        let r = dijkstra(&grid, Cell::new(1, 1), Cell::new(1, 1)).unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.path.len(), 1);
    }

    #[test]
    fn walled_goal_is_unreachable() {
        let mut grid = OccupancyGrid::new(3, 3, 1.0).unwrap();
        for c in [Cell::new(1, 2), Cell::new(1, 1), Cell::new(2, 1)] {
            grid.set_blocked(c, true);
        }
        assert!(matches!(
            dijkstra(&grid, Cell::new(0, 0), Cell::new(2, 2)),
            Err(PathfindError::Unreachable { .. })
        ));
    }

    #[test]
    fn blocked_center_detours_through_corner() {
        let mut grid = OccupancyGrid::new(3, 3, 1.0).unwrap();
        grid.set_blocked(Cell::new(1, 1), true);
        let r = dijkstra(&grid, Cell::new(0, 0), Cell::new(2, 2)).unwrap();
        let oracle = brute_force_cost(&grid, Cell::new(0, 0), Cell::new(2, 2)).unwrap();
        assert!((r.cost - oracle).abs() < 1e-12);
        assert!((r.cost - (2.0 + SQRT2)).abs() < 1e-12);
    }

    #[test]
    fn no_squeezing_through_diagonal_gap() {
        let mut grid = OccupancyGrid::new(2, 2, 1.0).unwrap();
        grid.set_blocked(Cell::new(1, 0), true);
        grid.set_blocked(Cell::new(0, 1), true);
        assert!(matches!(
            dijkstra(&grid, Cell::new(0, 0), Cell::new(1, 1)),
            Err(PathfindError::Unreachable { .. })
        ));
    }

    #[test]
    fn endpoint_checks() {
        let mut grid = OccupancyGrid::new(2, 2, 1.0).unwrap();
        assert!(matches!(
            dijkstra(&grid, Cell::new(5, 0), Cell::new(1, 1)),
            Err(PathfindError::OutOfBounds(_))
        ));
        grid.set_blocked(Cell::new(1, 1), true);
        assert!(matches!(
            dijkstra(&grid, Cell::new(0, 0), Cell::new(1, 1)),
            Err(PathfindError::BlockedEndpoint(_))
        ));
    }

    #[test]
    fn cost_is_sum_of_steps() {
        let mut checked = 0;
        for seed in 0..20 {
            let grid = OccupancyGrid::random(12, 9, 3.0, 0.25, seed).unwrap();
            let Ok(r) = dijkstra(&grid, Cell::new(0, 0), Cell::new(11, 8)) else {
                continue;
            };
            let walked: f64 = r.path.windows(2).map(|w| w[0].distance(&w[1])).sum();
            assert!((walked - r.cost).abs() < 1e-9);
            checked += 1;
        }
        assert!(checked > 5);
    }

    fn grid_from_bits(cols: usize, rows: usize, bits: u32) -> OccupancyGrid {
        let mut g = OccupancyGrid::new(cols, rows, 1.0).unwrap();
        for i in 0..cols * rows {
            let c = g.cell_at(i);
            g.set_blocked(c, bits & (1 << i) != 0);
        }
        g
    }

    proptest! {
        #[test]
        fn matches_exhaustive_oracle_up_to_4x4(cols in 1usize..=4, rows in 1usize..=4, bits in any::<u32>(),
                                               s in any::<prop::sample::Index>(), t in any::<prop::sample::Index>()) {
            let grid = grid_from_bits(cols, rows, bits);
            let source = grid.cell_at(s.index(cols * rows));
            let goal = grid.cell_at(t.index(cols * rows));
            let oracle = brute_force_cost(&grid, source, goal);
            match dijkstra(&grid, source, goal) {
                Ok(r) => prop_assert!((r.cost - oracle.unwrap()).abs() < 1e-9),
                Err(_) => prop_assert!(oracle.is_none()),
            }
        }

        #[test]
        fn blocking_never_shortens(bits in any::<u32>(), extra in 1usize..15) {
            let grid = grid_from_bits(4, 4, bits & !(1 | 1 << 15));
            let (s, g) = (Cell::new(0, 0), Cell::new(3, 3));
            let mut more = grid.clone();
            more.set_blocked(more.cell_at(extra), true);
            if let Ok(after) = dijkstra(&more, s, g) {
                let before = dijkstra(&grid, s, g).unwrap();
                prop_assert!(after.cost >= before.cost - 1e-12);
            }
        }

        #[test]
        fn ops_are_deterministic(seed in any::<u64>()) {
            let grid = OccupancyGrid::random(15, 15, 1.0, 0.2, seed).unwrap();
            let a = dijkstra(&grid, Cell::new(0, 0), Cell::new(14, 14));
            let b = dijkstra(&grid, Cell::new(0, 0), Cell::new(14, 14));
            match (a, b) {
                (Ok(a), Ok(b)) => { prop_assert_eq!(a.ops, b.ops); prop_assert_eq!(a.path, b.path); }
                (Err(a), Err(b)) => prop_assert_eq!(a, b),
                _ => prop_assert!(false),
            }
        }
    }
}
