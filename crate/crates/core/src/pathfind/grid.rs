use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PathfindError, WorldPoint};

/// Grid cell address, column then row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub col: usize,
    pub row: usize,
}

impl Cell {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

/// Blocked/free cells over a rectangular area. Row 0 is the first row of the
/// text form; cell `(c, r)` has its center at `((c + 0.5) s, (r + 0.5) s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyGrid {
    cols: usize,
    rows: usize,
    cell_size_bits: u64,
    blocked: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(cols: usize, rows: usize, cell_size: f64) -> Result<Self, PathfindError> {
        if cols == 0 || rows == 0 {
            return Err(PathfindError::InvalidGrid(format!(
                "grid must be at least 1x1, got {cols}x{rows}"
            )));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(PathfindError::InvalidGrid(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        Ok(Self {
            cols,
            rows,
            cell_size_bits: cell_size.to_bits(),
            blocked: vec![false; cols * rows],
        })
    }

    /// Uniformly random obstacles at `density`, with both corner cells
    /// `(0, 0)` and `(cols-1, rows-1)` kept free.
    pub fn random(cols: usize, rows: usize, cell_size: f64, density: f64, seed: u64) -> Result<Self, PathfindError> {
        let mut grid = Self::new(cols, rows, cell_size)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for b in grid.blocked.iter_mut() {
            *b = rng.random::<f64>() < density;
        }
        grid.blocked[0] = false;
        let last = grid.blocked.len() - 1;
        grid.blocked[last] = false;
        Ok(grid)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cell_size(&self) -> f64 {
        f64::from_bits(self.cell_size_bits)
    }

    pub fn len(&self) -> usize {
        self.blocked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocked.is_empty()
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.col < self.cols && cell.row < self.rows
    }

    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.cols + cell.col
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.cols, index / self.cols)
    }

    pub fn is_blocked(&self, cell: Cell) -> bool {
        self.blocked[self.index(cell)]
    }

    pub fn set_blocked(&mut self, cell: Cell, blocked: bool) {
        let i = self.index(cell);
        self.blocked[i] = blocked;
    }

    pub fn free_count(&self) -> usize {
        self.blocked.iter().filter(|b| !**b).count()
    }

    pub fn center(&self, cell: Cell) -> WorldPoint {
        let s = self.cell_size();
        WorldPoint::new((cell.col as f64 + 0.5) * s, (cell.row as f64 + 0.5) * s)
    }

    /// Parses the text form: a `cols rows cell_size_cm` header, then one line
    /// per row of `.` (free) and `#` (blocked).
    pub fn parse(text: &str) -> Result<Self, PathfindError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(PathfindError::GridParse {
            line: 1,
            message: "empty grid file".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || PathfindError::GridParse {
            line: 1,
            message: format!("expected 'cols rows cell_size_cm', got '{header}'"),
        };
        if fields.len() != 3 {
            return Err(bad_header());
        }
        let cols: usize = fields[0].parse().map_err(|_| bad_header())?;
        let rows: usize = fields[1].parse().map_err(|_| bad_header())?;
        let cell: f64 = fields[2].parse().map_err(|_| bad_header())?;
        let mut grid = Self::new(cols, rows, cell)?;
        let mut row = 0;
        for (n, line) in lines {
            let line = line.trim_end();
            if row >= rows {
                return Err(PathfindError::GridParse {
                    line: n + 1,
                    message: format!("more than {rows} rows"),
                });
            }
            if line.chars().count() != cols {
                return Err(PathfindError::GridParse {
                    line: n + 1,
                    message: format!("expected {cols} cells, got {}", line.chars().count()),
                });
            }
            for (col, ch) in line.chars().enumerate() {
                let blocked = match ch {
                    '.' => false,
                    '#' => true,
                    other => {
                        return Err(PathfindError::GridParse {
                            line: n + 1,
                            message: format!("unexpected character '{other}'"),
                        })
                    }
                };
                grid.set_blocked(Cell::new(col, row), blocked);
            }
            row += 1;
        }
        if row != rows {
            return Err(PathfindError::GridParse {
                line: text.lines().count(),
                message: format!("expected {rows} rows, got {row}"),
            });
        }
        Ok(grid)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.cols, self.rows, self.cell_size());
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push(if self.is_blocked(Cell::new(c, r)) { '#' } else { '.' });
            }
            let _ = writeln!(out);
        }
        out
    }
}
