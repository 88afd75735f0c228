//! Exact path costs for the 8-connected grid with unit cardinal moves and
//! √2 diagonal moves.
//!
//! A cost is stored as the pair `(cardinals, diagonals)` and compared with
//! integer algebra only, so two path costs are equal exactly when their move
//! counts are equal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cost counter overflow")]
pub struct CostOverflow;

/// Path cost `cardinals + diagonals·√2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "CostRepr", from = "CostRepr")]
pub struct ExactCost {
    pub cardinals: u32,
    pub diagonals: u32,
}

impl ExactCost {
    pub const ZERO: ExactCost = ExactCost {
        cardinals: 0,
        diagonals: 0,
    };
    pub const CARDINAL: ExactCost = ExactCost {
        cardinals: 1,
        diagonals: 0,
    };
    pub const DIAGONAL: ExactCost = ExactCost {
        cardinals: 0,
        diagonals: 1,
    };

    pub const fn new(cardinals: u32, diagonals: u32) -> Self {
        ExactCost {
            cardinals,
            diagonals,
        }
    }

    pub fn checked_add(self, other: ExactCost) -> Result<ExactCost, CostOverflow> {
        Ok(ExactCost {
            cardinals: self.cardinals.checked_add(other.cardinals).ok_or(CostOverflow)?,
            diagonals: self.diagonals.checked_add(other.diagonals).ok_or(CostOverflow)?,
        })
    }

    /// `cardinals + diagonals·√2` in double precision.
    pub fn to_f64(self) -> f64 {
        self.cardinals as f64 + self.diagonals as f64 * std::f64::consts::SQRT_2
    }

    pub fn is_zero(self) -> bool {
        self.cardinals == 0 && self.diagonals == 0
    }

    /// Exact three-way comparison of the real values.
    ///
    /// `c1 + d1·√2` vs `c2 + d2·√2` reduces to the sign of `a - b·√2` with
    /// `a = c1 - c2` and `b = d2 - d1`; when both sides share a sign the
    /// squares are compared instead. √2 is irrational, so equality only
    /// happens when both counters match.
    pub fn compare(self, other: ExactCost) -> Ordering {
        let a = self.cardinals as i64 - other.cardinals as i64;
        let b = other.diagonals as i64 - self.diagonals as i64;
        match (a.signum(), b.signum()) {
            (0, 0) => Ordering::Equal,
            (sa, sb) if sa >= 0 && sb <= 0 => Ordering::Greater,
            (sa, sb) if sa <= 0 && sb >= 0 => Ordering::Less,
            (1, 1) => {
                let lhs = (a as i128) * (a as i128);
                let rhs = 2 * (b as i128) * (b as i128);
                lhs.cmp(&rhs)
            }
            _ => {
                // both negative: a < b·√2  <=>  |a| > |b|·√2
                let lhs = (a as i128) * (a as i128);
                let rhs = 2 * (b as i128) * (b as i128);
                rhs.cmp(&lhs)
            }
        }
    }
}

impl Ord for ExactCost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(*other)
    }
}

impl PartialOrd for ExactCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ExactCost {
    type Output = ExactCost;

    fn add(self, rhs: ExactCost) -> ExactCost {
        self.checked_add(rhs).expect("exact cost overflow")
    }
}

impl fmt::Display for ExactCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}+{}√2 ({:.4})",
            self.cardinals,
            self.diagonals,
            self.to_f64()
        )
    }
}

#[derive(Serialize, Deserialize)]
struct CostRepr {
    cardinals: u32,
    diagonals: u32,
    #[serde(default, skip_deserializing)]
    value: f64,
}

impl From<ExactCost> for CostRepr {
    fn from(c: ExactCost) -> Self {
        CostRepr {
            cardinals: c.cardinals,
            diagonals: c.diagonals,
            value: c.to_f64(),
        }
    }
}

impl From<CostRepr> for ExactCost {
    fn from(r: CostRepr) -> Self {
        ExactCost::new(r.cardinals, r.diagonals)
    }
}
