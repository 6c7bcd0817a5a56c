//! The probability-interval bilattice.
//!
//! Closed intervals `[lo, hi] ⊆ [0,1]` carry two orders. The belief order
//! `≤_B` compares both endpoints upwards; the knowledge order `≤_K` says the
//! right-hand side is at least as precise (its lower bound is higher and its
//! upper bound lower). The knowledge join can produce intervals with
//! `lo > hi`. Those are kept as ordinary values here: [`is_consistent`] only
//! reports them, it never repairs them.
//!
//! The ignorance operators [`and_ig`] / [`or_ig`] are the Fréchet bounds for
//! conjunction and disjunction of events whose correlation is unknown. They
//! are commutative but are not lattice operations for either order.

pub mod expr;

use std::fmt;

use num_traits::{One, Zero};

use crate::prob::{format_decimal, in_unit, Prob};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("interval endpoint {0} lies outside [0,1]")]
pub struct IntervalError(pub String);

/// `[lo, hi]` with both endpoints in `[0,1]`. `lo > hi` is representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProbInterval {
    lo: Prob,
    hi: Prob,
}

impl ProbInterval {
    pub fn new(lo: Prob, hi: Prob) -> Result<Self, IntervalError> {
        for p in [&lo, &hi] {
            if !in_unit(p) {
                return Err(IntervalError(format_decimal(p)));
            }
        }
        Ok(ProbInterval { lo, hi })
    }

    pub fn point(p: Prob) -> Result<Self, IntervalError> {
        ProbInterval::new(p.clone(), p)
    }

    /// Total ignorance, the bottom of `≤_K`.
    pub fn unknown() -> Self {
        ProbInterval { lo: Prob::zero(), hi: Prob::one() }
    }

    pub fn certain() -> Self {
        ProbInterval { lo: Prob::one(), hi: Prob::one() }
    }

    pub fn impossible() -> Self {
        ProbInterval { lo: Prob::zero(), hi: Prob::zero() }
    }

    pub fn lo(&self) -> &Prob {
        &self.lo
    }

    pub fn hi(&self) -> &Prob {
        &self.hi
    }

    pub fn is_consistent(&self) -> bool {
        self.lo <= self.hi
    }

    pub fn contains(&self, p: &Prob) -> bool {
        self.lo <= *p && *p <= self.hi
    }

    /// Set inclusion for consistent intervals.
    pub fn is_within(&self, outer: &ProbInterval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }
}

impl fmt::Display for ProbInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_decimal(&self.lo), format_decimal(&self.hi))
    }
}

fn min(a: &Prob, b: &Prob) -> Prob {
    if a <= b { a.clone() } else { b.clone() }
}

fn max(a: &Prob, b: &Prob) -> Prob {
    if a >= b { a.clone() } else { b.clone() }
}

/// `[x,y] ≤_B [x1,y1]` iff `x ≤ x1` and `y ≤ y1`.
pub fn leq_b(a: &ProbInterval, b: &ProbInterval) -> bool {
    a.lo <= b.lo && a.hi <= b.hi
}

/// `[x,y] ≤_K [x1,y1]` iff `x ≤ x1` and `y ≥ y1`.
pub fn leq_k(a: &ProbInterval, b: &ProbInterval) -> bool {
    a.lo <= b.lo && a.hi >= b.hi
}

/// Knowledge meet `∧_kn`: `[min{x,x1}, max{y,y1}]`.
pub fn meet_k(a: &ProbInterval, b: &ProbInterval) -> ProbInterval {
    ProbInterval { lo: min(&a.lo, &b.lo), hi: max(&a.hi, &b.hi) }
}

/// Knowledge join `∨_kn`: `[max{x,x1}, min{y,y1}]`. Disjoint arguments give
/// an inconsistent result.
pub fn join_k(a: &ProbInterval, b: &ProbInterval) -> ProbInterval {
    ProbInterval { lo: max(&a.lo, &b.lo), hi: min(&a.hi, &b.hi) }
}

/// `[max{0, x+x1-1}, min{y,y1}]`.
pub fn and_ig(a: &ProbInterval, b: &ProbInterval) -> ProbInterval {
    let frechet = &a.lo + &b.lo - Prob::one();
    ProbInterval { lo: max(&Prob::zero(), &frechet), hi: min(&a.hi, &b.hi) }
}

/// `[max{x,x1}, min{1, y+y1}]`.
pub fn or_ig(a: &ProbInterval, b: &ProbInterval) -> ProbInterval {
    let sum = &a.hi + &b.hi;
    ProbInterval { lo: max(&a.lo, &b.lo), hi: min(&Prob::one(), &sum) }
}

pub fn is_consistent(i: &ProbInterval) -> bool {
    i.is_consistent()
}
