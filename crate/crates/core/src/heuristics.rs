//! Instance-independent distance heuristics and per-cell heuristic maps.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costs::ExactCost;
use crate::grid::{Cell, GridMap};

/// Lower edge of the nonzero path-probability range.
pub const PP_THRESHOLD: f64 = 0.95;

#[derive(Debug, Error, PartialEq)]
pub enum HeuristicError {
    #[error("expected a {expected} map, got {actual}")]
    KindMismatch {
        expected: HeuristicKind,
        actual: HeuristicKind,
    },
    #[error("expected {expected} values, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("{kind} value {value} at index {index} is out of range")]
    Range {
        kind: HeuristicKind,
        index: usize,
        value: f64,
    },
    #[error("map is {map_h}x{map_w}, grid is {grid_h}x{grid_w}")]
    Dimensions {
        map_h: usize,
        map_w: usize,
        grid_h: usize,
        grid_w: usize,
    },
}

/// What a heuristic map holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeuristicKind {
    /// Correction factor `h/h*` in `[0, 1]`.
    Cf,
    /// Path probability, `{0} ∪ [0.95, 1]` for ground truth.
    Pp,
    /// Absolute cost-to-go estimate, non-negative.
    Abs,
}

impl HeuristicKind {
    pub fn code(self) -> u8 {
        match self {
            HeuristicKind::Cf => 0,
            HeuristicKind::Pp => 1,
            HeuristicKind::Abs => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(HeuristicKind::Cf),
            1 => Some(HeuristicKind::Pp),
            2 => Some(HeuristicKind::Abs),
            _ => None,
        }
    }

    /// Short file-name tag: `cf`, `pp`, `abs`.
    pub fn tag(self) -> &'static str {
        match self {
            HeuristicKind::Cf => "cf",
            HeuristicKind::Pp => "pp",
            HeuristicKind::Abs => "abs",
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeuristicKind::Cf => "CF",
            HeuristicKind::Pp => "PP",
            HeuristicKind::Abs => "ABS",
        })
    }
}

fn deltas(a: Cell, b: Cell) -> (usize, usize) {
    (a.row.abs_diff(b.row), a.col.abs_diff(b.col))
}

/// Octile distance, exact: `(max - min)` cardinal moves plus `min` diagonal moves.
pub fn octile(a: Cell, b: Cell) -> ExactCost {
    let (dx, dy) = deltas(a, b);
    let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
    ExactCost::new((hi - lo) as u32, lo as u32)
}

pub fn chebyshev(a: Cell, b: Cell) -> f64 {
    let (dx, dy) = deltas(a, b);
    dx.max(dy) as f64
}

pub fn euclidean(a: Cell, b: Cell) -> f64 {
    let (dx, dy) = deltas(a, b);
    (dx as f64).hypot(dy as f64)
}

/// Row-major per-cell scalar field tagged with its kind.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicMap {
    kind: HeuristicKind,
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl HeuristicMap {
    /// Builds a map, checking length, finiteness and the kind's value range.
    pub fn new(
        kind: HeuristicKind,
        height: usize,
        width: usize,
        values: Vec<f64>,
    ) -> Result<Self, HeuristicError> {
        Self::build(kind, height, width, values, true)
    }

    /// Like [`HeuristicMap::new`] but PP values only need to lie in `[0, 1]`.
    /// Predictors emit continuous path probabilities; focal and greedy search
    /// only rank by them.
    pub fn new_continuous(
        kind: HeuristicKind,
        height: usize,
        width: usize,
        values: Vec<f64>,
    ) -> Result<Self, HeuristicError> {
        Self::build(kind, height, width, values, false)
    }

    fn build(
        kind: HeuristicKind,
        height: usize,
        width: usize,
        values: Vec<f64>,
        strict_pp: bool,
    ) -> Result<Self, HeuristicError> {
        if values.len() != height * width || height == 0 || width == 0 {
            return Err(HeuristicError::Length {
                expected: height * width,
                actual: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            let ok = value.is_finite()
                && match kind {
                    HeuristicKind::Cf => (0.0..=1.0).contains(&value),
                    HeuristicKind::Pp if strict_pp => {
                        value == 0.0 || (PP_THRESHOLD..=1.0).contains(&value)
                    }
                    HeuristicKind::Pp => (0.0..=1.0).contains(&value),
                    HeuristicKind::Abs => value >= 0.0,
                };
            if !ok {
                return Err(HeuristicError::Range { kind, index, value });
            }
        }
        Ok(HeuristicMap {
            kind,
            height,
            width,
            values,
        })
    }

    /// A map holding one value everywhere.
    pub fn uniform(kind: HeuristicKind, height: usize, width: usize, value: f64) -> Result<Self, HeuristicError> {
        Self::new_continuous(kind, height, width, vec![value; height * width])
    }

    pub fn kind(&self) -> HeuristicKind {
        self.kind
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Stored value at `cell`. Panics when the cell is outside the map.
    pub fn get(&self, cell: Cell) -> f64 {
        assert!(
            cell.row < self.height && cell.col < self.width,
            "{cell} outside {}x{} heuristic map",
            self.height,
            self.width
        );
        self.values[cell.row * self.width + cell.col]
    }

    pub fn expect_kind(&self, expected: HeuristicKind) -> Result<&Self, HeuristicError> {
        if self.kind == expected {
            Ok(self)
        } else {
            Err(HeuristicError::KindMismatch {
                expected,
                actual: self.kind,
            })
        }
    }

    /// Typed lookup for consumers that require a particular kind.
    pub fn lookup(&self, expected: HeuristicKind, cell: Cell) -> Result<f64, HeuristicError> {
        Ok(self.expect_kind(expected)?.get(cell))
    }

    pub fn check_dimensions(&self, grid: &GridMap) -> Result<(), HeuristicError> {
        if self.height == grid.height() && self.width == grid.width() {
            Ok(())
        } else {
            Err(HeuristicError::Dimensions {
                map_h: self.height,
                map_w: self.width,
                grid_h: grid.height(),
                grid_w: grid.width(),
            })
        }
    }
}
