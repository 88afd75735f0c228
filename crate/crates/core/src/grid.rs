//! Occupancy grids, 8-connected movement and map file formats.

use std::fmt;
use std::fs;
use std::path::Path;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::ExactCost;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid grid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> GridError {
    GridError::Parse {
        line,
        message: message.into(),
    }
}

/// Grid cell coordinates. Serialized as `[row, col]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }
}

impl From<(usize, usize)> for Cell {
    fn from((row, col): (usize, usize)) -> Self {
        Cell { row, col }
    }
}

impl From<Cell> for (usize, usize) {
    fn from(c: Cell) -> Self {
        (c.row, c.col)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    Cardinal,
    Diagonal,
}

impl MoveKind {
    pub fn cost(self) -> ExactCost {
        match self {
            MoveKind::Cardinal => ExactCost::CARDINAL,
            MoveKind::Diagonal => ExactCost::DIAGONAL,
        }
    }
}

/// Whether a diagonal move may squeeze past blocked cardinal cells.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MovePolicy {
    /// A diagonal move only needs its target cell to be free.
    #[default]
    Permissive,
    /// A diagonal move also needs both shared cardinal cells to be free.
    NoCornerCutting,
}

// Clockwise from north; north is row - 1.
const DIRECTIONS: [(isize, isize, MoveKind); 8] = [
    (-1, 0, MoveKind::Cardinal),
    (-1, 1, MoveKind::Diagonal),
    (0, 1, MoveKind::Cardinal),
    (1, 1, MoveKind::Diagonal),
    (1, 0, MoveKind::Cardinal),
    (1, -1, MoveKind::Diagonal),
    (0, -1, MoveKind::Cardinal),
    (-1, -1, MoveKind::Diagonal),
];

pub type Neighbors = ArrayVec<(Cell, MoveKind), 8>;

/// Immutable occupancy grid, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridMap {
    height: usize,
    width: usize,
    blocked: Vec<bool>,
}

impl GridMap {
    pub fn new(height: usize, width: usize, blocked: Vec<bool>) -> Result<Self, GridError> {
        if height == 0 || width == 0 {
            return Err(GridError::Invalid(format!(
                "dimensions must be positive, got {height}x{width}"
            )));
        }
        if blocked.len() != height * width {
            return Err(GridError::Invalid(format!(
                "expected {} cells, got {}",
                height * width,
                blocked.len()
            )));
        }
        Ok(GridMap {
            height,
            width,
            blocked,
        })
    }

    pub fn empty(height: usize, width: usize) -> Self {
        Self::new(height, width, vec![false; height * width]).expect("positive dimensions")
    }

    /// Builds a grid from rows of `.` (free) and `#`/`@` (blocked). Handy for tests.
    pub fn from_ascii(rows: &[&str]) -> Result<Self, GridError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut blocked = Vec::with_capacity(height * width);
        for (i, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(parse_err(i + 1, "ragged row"));
            }
            for ch in row.chars() {
                blocked.push(match ch {
                    '.' => false,
                    '#' | '@' => true,
                    other => return Err(parse_err(i + 1, format!("unknown symbol {other:?}"))),
                });
            }
        }
        Self::new(height, width, blocked)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.blocked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocked.is_empty()
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.row < self.height && cell.col < self.width
    }

    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(self.in_bounds(cell), "{cell} out of bounds");
        cell.row * self.width + cell.col
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index / self.width, index % self.width)
    }

    pub fn is_blocked(&self, cell: Cell) -> bool {
        self.blocked[self.index(cell)]
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        !self.is_blocked(cell)
    }

    pub fn is_free_at(&self, row: isize, col: isize) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.height
            && (col as usize) < self.width
            && !self.blocked[row as usize * self.width + col as usize]
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.len()).map(move |i| self.cell(i))
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells().filter(move |&c| self.is_free(c))
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked.iter().filter(|&&b| b).count()
    }

    pub fn blocked_fraction(&self) -> f64 {
        self.blocked_count() as f64 / self.len() as f64
    }

    /// Free in-bounds neighbors of a free cell, clockwise from north.
    pub fn neighbors(&self, cell: Cell, policy: MovePolicy) -> Neighbors {
        assert!(
            self.in_bounds(cell) && self.is_free(cell),
            "neighbors queried for blocked or out-of-bounds cell {cell}"
        );
        let (r, c) = (cell.row as isize, cell.col as isize);
        let mut out = Neighbors::new();
        for &(dr, dc, kind) in &DIRECTIONS {
            if !self.is_free_at(r + dr, c + dc) {
                continue;
            }
            if kind == MoveKind::Diagonal
                && policy == MovePolicy::NoCornerCutting
                && !(self.is_free_at(r + dr, c) && self.is_free_at(r, c + dc))
            {
                continue;
            }
            out.push((Cell::new((r + dr) as usize, (c + dc) as usize), kind));
        }
        out
    }

    /// Cost of a single move between adjacent cells, `None` if not a legal move.
    pub fn move_cost(&self, from: Cell, to: Cell, policy: MovePolicy) -> Option<ExactCost> {
        self.neighbors(from, policy)
            .into_iter()
            .find(|(c, _)| *c == to)
            .map(|(_, k)| k.cost())
    }

    /// Sums the move costs of a path; `None` if any step is not a legal move.
    pub fn path_cost(&self, path: &[Cell], policy: MovePolicy) -> Option<ExactCost> {
        if path.is_empty() || path.iter().any(|&c| !self.in_bounds(c) || self.is_blocked(c)) {
            return None;
        }
        path.windows(2).try_fold(ExactCost::ZERO, |acc, w| {
            self.move_cost(w[0], w[1], policy).map(|m| acc + m)
        })
    }

    /// Block-wise resampling to `target_h × target_w`. An output cell is
    /// blocked when at least half of its source block is blocked.
    pub fn rescale(&self, target_h: usize, target_w: usize) -> GridMap {
        assert!(target_h >= 1 && target_w >= 1, "target dimensions must be positive");
        let span = |i: usize, src: usize, dst: usize| {
            let lo = i * src / dst;
            let hi = ((i + 1) * src / dst).max(lo + 1);
            lo..hi
        };
        let mut blocked = Vec::with_capacity(target_h * target_w);
        for i in 0..target_h {
            let rows = span(i, self.height, target_h);
            for j in 0..target_w {
                let cols = span(j, self.width, target_w);
                let mut total = 0usize;
                let mut hits = 0usize;
                for r in rows.clone() {
                    for c in cols.clone() {
                        total += 1;
                        hits += self.blocked[r * self.width + c] as usize;
                    }
                }
                blocked.push(2 * hits >= total);
            }
        }
        GridMap {
            height: target_h,
            width: target_w,
            blocked,
        }
    }

    /// Parses a MovingAI `.map` file.
    pub fn from_movingai(text: &str) -> Result<GridMap, GridError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let mut height = None;
        let mut width = None;
        let mut saw_type = false;
        loop {
            let (no, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, "unexpected end of header"))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let value = parts.next();
            if parts.next().is_some() {
                return Err(parse_err(no, format!("malformed header line {line:?}")));
            }
            match (key, value) {
                ("type", Some(_)) => saw_type = true,
                ("height", Some(v)) => {
                    height = Some(parse_dim(v).ok_or_else(|| parse_err(no, "bad height"))?)
                }
                ("width", Some(v)) => {
                    width = Some(parse_dim(v).ok_or_else(|| parse_err(no, "bad width"))?)
                }
                ("map", None) => break,
                _ => return Err(parse_err(no, format!("malformed header line {line:?}"))),
            }
        }
        if !saw_type {
            return Err(parse_err(1, "missing `type` header"));
        }
        let height = height.ok_or_else(|| parse_err(1, "missing `height` header"))?;
        let width = width.ok_or_else(|| parse_err(1, "missing `width` header"))?;

        let mut blocked = Vec::with_capacity(height * width);
        let mut rows = 0;
        let mut last_line = 0;
        for (no, line) in lines {
            last_line = no;
            if line.is_empty() {
                continue;
            }
            if rows == height {
                return Err(parse_err(no, format!("more than {height} map rows")));
            }
            if line.len() != width {
                return Err(parse_err(
                    no,
                    format!("row has {} symbols, expected {width}", line.len()),
                ));
            }
            for ch in line.chars() {
                blocked.push(match ch {
                    '.' | 'G' => false,
                    '@' | 'O' | 'T' | 'W' | 'S' => true,
                    other => return Err(parse_err(no, format!("unknown map symbol {other:?}"))),
                });
            }
            rows += 1;
        }
        if rows != height {
            return Err(parse_err(
                last_line,
                format!("expected {height} map rows, found {rows}"),
            ));
        }
        GridMap::new(height, width, blocked)
    }

    pub fn to_movingai(&self) -> String {
        let mut out = format!(
            "type octile\nheight {}\nwidth {}\nmap\n",
            self.height, self.width
        );
        self.push_rows(&mut out, '.', '@');
        out
    }

    /// Parses the compact format: `H W` then H rows of `.`/`#`.
    pub fn from_compact(text: &str) -> Result<GridMap, GridError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        let (no, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let (height, width) = match dims.as_slice() {
            [h, w] => (
                parse_dim(h).ok_or_else(|| parse_err(no, "bad height"))?,
                parse_dim(w).ok_or_else(|| parse_err(no, "bad width"))?,
            ),
            _ => return Err(parse_err(no, "expected `H W` header")),
        };
        let mut blocked = Vec::with_capacity(height * width);
        let mut rows = 0;
        for (no, line) in lines {
            if rows == height {
                return Err(parse_err(no, format!("more than {height} map rows")));
            }
            if line.len() != width {
                return Err(parse_err(no, format!("row has {} symbols, expected {width}", line.len())));
            }
            for ch in line.chars() {
                blocked.push(match ch {
                    '.' => false,
                    '#' => true,
                    other => return Err(parse_err(no, format!("unknown map symbol {other:?}"))),
                });
            }
            rows += 1;
        }
        if rows != height {
            return Err(parse_err(no, format!("expected {height} map rows, found {rows}")));
        }
        GridMap::new(height, width, blocked)
    }

    pub fn to_compact(&self) -> String {
        let mut out = format!("{} {}\n", self.height, self.width);
        self.push_rows(&mut out, '.', '#');
        out
    }

    /// Parses either format, detected from the first non-empty line.
    pub fn parse(text: &str) -> Result<GridMap, GridError> {
        let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or_default();
        if first.trim_start().starts_with("type") {
            Self::from_movingai(text)
        } else {
            Self::from_compact(text)
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<GridMap, GridError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    fn push_rows(&self, out: &mut String, free: char, blocked: char) {
        for row in self.blocked.chunks(self.width) {
            out.extend(row.iter().map(|&b| if b { blocked } else { free }));
            out.push('\n');
        }
    }
}

fn parse_dim(s: &str) -> Option<usize> {
    s.parse::<usize>().ok().filter(|&v| v > 0)
}

impl fmt::Display for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.push_rows(&mut s, '.', '#');
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: &Neighbors) -> Vec<(Cell, MoveKind)> {
        n.iter().copied().collect()
    }

    #[test]
    fn full_neighborhood() {
        let g = GridMap::empty(3, 3);
        let n = g.neighbors(Cell::new(1, 1), MovePolicy::Permissive);
        assert_eq!(n.len(), 8);
        assert_eq!(n.iter().filter(|(_, k)| *k == MoveKind::Cardinal).count(), 4);
        // clockwise from north
        assert_eq!(n[0].0, Cell::new(0, 1));
        assert_eq!(n[1].0, Cell::new(0, 2));
        assert_eq!(n[7].0, Cell::new(0, 0));
    }

    #[test]
    fn blocked_diagonal_target() {
        let g = GridMap::from_ascii(&["...", ".#.", "..."]).unwrap();
        let n = g.neighbors(Cell::new(0, 0), MovePolicy::Permissive);
        assert_eq!(
            set(&n),
            vec![
                (Cell::new(0, 1), MoveKind::Cardinal),
                (Cell::new(1, 0), MoveKind::Cardinal)
            ]
        );
    }

    #[test]
    fn corner_cutting_discriminator() {
        let g = GridMap::from_ascii(&[".#.", "#..", "..."]).unwrap();
        let p = g.neighbors(Cell::new(0, 0), MovePolicy::Permissive);
        assert_eq!(set(&p), vec![(Cell::new(1, 1), MoveKind::Diagonal)]);
        let s = g.neighbors(Cell::new(0, 0), MovePolicy::NoCornerCutting);
        assert!(s.is_empty());
    }

    #[test]
    #[should_panic]
    fn neighbors_of_blocked_cell_panics() {
        let g = GridMap::from_ascii(&["#."]).unwrap();
        g.neighbors(Cell::new(0, 0), MovePolicy::Permissive);
    }

    #[test]
    fn movingai_basic() {
        let g = GridMap::from_movingai("type octile\nheight 2\nwidth 2\nmap\n..\n.@\n").unwrap();
        assert_eq!((g.height(), g.width()), (2, 2));
        assert_eq!(g.blocked_count(), 1);
        assert!(g.is_blocked(Cell::new(1, 1)));
    }

    #[test]
    fn movingai_symbols() {
        let g = GridMap::from_movingai("type octile\nheight 1\nwidth 7\nmap\n.GT@OWS\n").unwrap();
        let blocked: Vec<bool> = (0..7).map(|c| g.is_blocked(Cell::new(0, c))).collect();
        assert_eq!(blocked, vec![false, false, true, true, true, true, true]);
    }

    #[test]
    fn movingai_errors() {
        let too_many = "type octile\nheight 2\nwidth 2\nmap\n..\n..\n..\n";
        match GridMap::from_movingai(too_many) {
            Err(GridError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
        let too_few = "type octile\nheight 3\nwidth 2\nmap\n..\n..\n";
        assert!(matches!(
            GridMap::from_movingai(too_few),
            Err(GridError::Parse { .. })
        ));
        let bad_width = "type octile\nheight 1\nwidth 3\nmap\n..\n";
        assert!(matches!(
            GridMap::from_movingai(bad_width),
            Err(GridError::Parse { line: 5, .. })
        ));
        let bad_symbol = "type octile\nheight 1\nwidth 2\nmap\n.x\n";
        assert!(matches!(
            GridMap::from_movingai(bad_symbol),
            Err(GridError::Parse { line: 5, .. })
        ));
        let bad_header = "type octile\nheight two\nwidth 2\nmap\n..\n";
        assert!(matches!(
            GridMap::from_movingai(bad_header),
            Err(GridError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn movingai_round_trip() {
        let g = GridMap::from_ascii(&["..#.", "#...", "..##"]).unwrap();
        assert_eq!(GridMap::from_movingai(&g.to_movingai()).unwrap(), g);
        assert_eq!(GridMap::parse(&g.to_movingai()).unwrap(), g);
    }

    #[test]
    fn compact_round_trip() {
        let g = GridMap::from_ascii(&["..#.", "#...", "..##"]).unwrap();
        let text = g.to_compact();
        assert!(text.starts_with("3 4\n..#.\n"));
        assert_eq!(GridMap::parse(&text).unwrap(), g);
        assert!(GridMap::from_compact("2 2\n..\n").is_err());
    }

    #[test]
    fn rescale_rules() {
        let g = GridMap::empty(4, 4);
        assert_eq!(g.rescale(2, 2), GridMap::empty(2, 2));
        let one = GridMap::from_ascii(&["#.", ".."]).unwrap();
        assert!(one.rescale(1, 1).is_free(Cell::new(0, 0)));
        let two = GridMap::from_ascii(&["#.", ".#"]).unwrap();
        assert!(two.rescale(1, 1).is_blocked(Cell::new(0, 0)));
    }

    #[test]
    fn rescale_upsamples_by_nearest_block() {
        let g = GridMap::from_ascii(&["#.", ".."]).unwrap();
        let up = g.rescale(4, 4);
        assert_eq!(up.blocked_count(), 4);
        assert!(up.is_blocked(Cell::new(1, 1)));
        assert!(up.is_free(Cell::new(2, 2)));
    }

    #[test]
    fn path_cost_validation() {
        let g = GridMap::from_ascii(&["...", ".#.", "..."]).unwrap();
        let p = [Cell::new(0, 0), Cell::new(0, 1), Cell::new(0, 2), Cell::new(1, 2)];
        assert_eq!(g.path_cost(&p, MovePolicy::Permissive), Some(ExactCost::new(3, 0)));
        let bad = [Cell::new(0, 0), Cell::new(1, 1)];
        assert_eq!(g.path_cost(&bad, MovePolicy::Permissive), None);
        let jump = [Cell::new(0, 0), Cell::new(0, 2)];
        assert_eq!(g.path_cost(&jump, MovePolicy::Permissive), None);
    }
}
