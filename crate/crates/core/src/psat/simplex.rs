//! Two-phase revised simplex with Bland's rule, generic over exact
//! rationals and `f64`.
//!
//! Columns are sparse; a column without explicit coefficients has a 1 in
//! each listed row, which is the shape of every world column.

#![allow(clippy::needless_range_loop)]

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::prob::{to_f64, Prob};

/// Feasibility and pricing tolerance in floating point mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

const FLOAT_ITERATION_CAP: usize = 200_000;

pub trait LpScalar: Clone + Debug {
    /// Dual prices prepared for repeated pricing.
    type Duals;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_prob(p: &Prob) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_neg(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_zero(&self) -> bool {
        !self.is_neg() && !self.is_pos()
    }
    fn less(&self, o: &Self) -> bool;
    fn prepare(y: Vec<Self>) -> Self::Duals;
    /// Whether `cost - y·a` is negative for column `a`.
    fn reduced_negative(duals: &Self::Duals, cost: &Self, col: &Column<Self>) -> bool;
    /// `None` means iterations are unbounded (exact arithmetic cannot cycle
    /// under Bland's rule).
    fn iteration_cap() -> Option<usize>;
}

#[derive(Debug, Clone)]
pub struct Column<S> {
    pub rows: Vec<u32>,
    /// Parallel to `rows`; all ones when absent.
    pub coefs: Option<Vec<S>>,
}

impl<S: LpScalar> Column<S> {
    pub fn ones(rows: Vec<u32>) -> Self {
        Column { rows, coefs: None }
    }

    fn entries(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.rows.iter().enumerate().map(move |(k, &r)| {
            let c = match &self.coefs {
                Some(cs) => cs[k].clone(),
                None => S::one(),
            };
            (r as usize, c)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `minimize cost·x  s.t.  rows, x >= 0`.
#[derive(Debug, Clone)]
pub struct Lp<S> {
    pub rows: Vec<(Sense, S)>,
    pub cols: Vec<Column<S>>,
    pub cost: Vec<S>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome<S> {
    Optimal { x: Vec<S>, value: S },
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("iteration limit reached")]
    IterationLimit,
    #[error("unbounded objective")]
    Unbounded,
}

enum Kind {
    Structural(usize),
    Slack(usize, bool),
    Artificial(usize),
}

struct Tableau<'a, S: LpScalar> {
    lp: &'a Lp<S>,
    /// Row `i` was multiplied by `-1` to make its right-hand side non-negative.
    flipped: Vec<bool>,
    /// Row of each slack column, in column order.
    slacks: Vec<usize>,
    m: usize,
    basis: Vec<usize>,
    binv: Vec<Vec<S>>,
    xb: Vec<S>,
    iterations: usize,
}

impl<'a, S: LpScalar> Tableau<'a, S> {
    fn n_struct(&self) -> usize {
        self.lp.cols.len()
    }

    fn n_total(&self) -> usize {
        self.n_struct() + self.slacks.len() + self.m
    }

    fn kind(&self, j: usize) -> Kind {
        let n = self.n_struct();
        if j < n {
            Kind::Structural(j)
        } else if j < n + self.slacks.len() {
            let r = self.slacks[j - n];
            Kind::Slack(r, self.lp.rows[r].0 == Sense::Le)
        } else {
            Kind::Artificial(j - n - self.slacks.len())
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_struct() + self.slacks.len()
    }

    /// Column `j` of the row-flipped constraint matrix.
    fn column(&self, j: usize) -> Vec<(usize, S)> {
        let sign = |r: usize, c: S| if self.flipped[r] { c.neg() } else { c };
        match self.kind(j) {
            Kind::Structural(s) => self.lp.cols[s].entries().map(|(r, c)| (r, sign(r, c))).collect(),
            Kind::Slack(r, le) => vec![(r, sign(r, if le { S::one() } else { S::one().neg() }))],
            Kind::Artificial(r) => vec![(r, S::one())],
        }
    }

    fn ftran(&self, col: &[(usize, S)]) -> Vec<S> {
        (0..self.m)
            .map(|i| {
                let mut acc = S::zero();
                for (r, c) in col {
                    let b = &self.binv[i][*r];
                    if !b.is_zero() {
                        acc = acc.add(&b.mul(c));
                    }
                }
                acc
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[S]) {
        let piv = alpha[r].clone();
        for k in 0..self.m {
            self.binv[r][k] = self.binv[r][k].div(&piv);
        }
        self.xb[r] = self.xb[r].div(&piv);
        let pivot_row = self.binv[r].clone();
        let pivot_x = self.xb[r].clone();
        for i in 0..self.m {
            if i == r || alpha[i].is_zero() {
                continue;
            }
            let f = alpha[i].clone();
            for (k, pr) in pivot_row.iter().enumerate() {
                if !pr.is_zero() {
                    self.binv[i][k] = self.binv[i][k].sub(&f.mul(pr));
                }
            }
            self.xb[i] = self.xb[i].sub(&f.mul(&pivot_x));
        }
        self.basis[r] = q;
    }

    /// Runs the simplex loop for `cost` (indexed over all columns).
    fn optimize(&mut self, cost: &dyn Fn(usize) -> S, allow_artificial: bool) -> Result<(), LpError> {
        let n_total = self.n_total();
        loop {
            if let Some(cap) = S::iteration_cap() {
                if self.iterations >= cap {
                    return Err(LpError::IterationLimit);
                }
            }
            let mut y = vec![S::zero(); self.m];
            for (i, &b) in self.basis.iter().enumerate() {
                let cb = cost(b);
                if cb.is_zero() {
                    continue;
                }
                for (k, yk) in y.iter_mut().enumerate() {
                    if !self.binv[i][k].is_zero() {
                        *yk = yk.add(&cb.mul(&self.binv[i][k]));
                    }
                }
            }
            // Structural pricing works on unflipped columns.
            let y_struct: Vec<S> = y.iter().enumerate().map(|(r, v)| if self.flipped[r] { v.neg() } else { v.clone() }).collect();
            let duals = S::prepare(y_struct);
            let mut in_basis = vec![false; n_total];
            for &b in &self.basis {
                in_basis[b] = true;
            }
            let mut entering = None;
            for j in 0..n_total {
                if in_basis[j] || (!allow_artificial && self.is_artificial(j)) {
                    continue;
                }
                let negative = match self.kind(j) {
                    Kind::Structural(s) => S::reduced_negative(&duals, &cost(j), &self.lp.cols[s]),
                    _ => {
                        let mut d = cost(j);
                        for (r, c) in self.column(j) {
                            d = d.sub(&c.mul(&y[r]));
                        }
                        d.is_neg()
                    }
                };
                if negative {
                    entering = Some(j);
                    break;
                }
            }
            let Some(q) = entering else { return Ok(()) };
            let alpha = self.ftran(&self.column(q));
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.m {
                if !alpha[i].is_pos() {
                    continue;
                }
                let ratio = self.xb[i].div(&alpha[i]);
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio.less(best) || (!best.less(&ratio) && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return Err(LpError::Unbounded) };
            self.pivot(r, q, &alpha);
            self.iterations += 1;
        }
    }

    fn drive_out_artificials(&mut self) {
        let n_real = self.n_struct() + self.slacks.len();
        for r in 0..self.m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let mut in_basis = vec![false; n_real];
            for &b in &self.basis {
                if b < n_real {
                    in_basis[b] = true;
                }
            }
            for j in 0..n_real {
                if in_basis[j] {
                    continue;
                }
                let col = self.column(j);
                let mut v = S::zero();
                for (k, c) in &col {
                    v = v.add(&self.binv[r][*k].mul(c));
                }
                if !v.is_zero() {
                    let alpha = self.ftran(&col);
                    self.pivot(r, j, &alpha);
                    break;
                }
            }
        }
    }
}

/// Solves `lp`. With `optimize == false` only feasibility is established
/// and the first feasible basic solution is returned with value 0.
pub fn solve<S: LpScalar>(lp: &Lp<S>, optimize: bool) -> Result<LpOutcome<S>, LpError> {
    let m = lp.rows.len();
    let flipped: Vec<bool> = lp.rows.iter().map(|(_, b)| b.is_neg()).collect();
    let slacks: Vec<usize> = (0..m).filter(|&r| lp.rows[r].0 != Sense::Eq).collect();
    let binv = (0..m).map(|i| (0..m).map(|k| if i == k { S::one() } else { S::zero() }).collect()).collect();
    let xb = lp.rows.iter().map(|(_, b)| if b.is_neg() { b.neg() } else { b.clone() }).collect();
    let n_before_art = lp.cols.len() + slacks.len();
    let mut t = Tableau { lp, flipped, slacks, m, basis: (0..m).map(|r| n_before_art + r).collect(), binv, xb, iterations: 0 };

    t.optimize(&|j| if j >= n_before_art { S::one() } else { S::zero() }, true)?;
    let mut infeasibility = S::zero();
    for (i, &b) in t.basis.iter().enumerate() {
        if t.is_artificial(b) {
            infeasibility = infeasibility.add(&t.xb[i]);
        }
    }
    if infeasibility.is_pos() {
        return Ok(LpOutcome::Infeasible);
    }
    t.drive_out_artificials();
    let n_struct = lp.cols.len();
    if optimize {
        t.optimize(&|j| if j < n_struct { lp.cost[j].clone() } else { S::zero() }, false)?;
    }
    let mut x = vec![S::zero(); n_struct];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n_struct {
            x[b] = t.xb[i].clone();
        }
    }
    let value = if optimize {
        x.iter().zip(&lp.cost).fold(S::zero(), |acc, (xi, ci)| acc.add(&xi.mul(ci)))
    } else {
        S::zero()
    };
    Ok(LpOutcome::Optimal { x, value })
}

/// Exact duals, plus an integer image `D·y` when it fits in `i128`.
pub struct ExactDuals {
    y: Vec<Prob>,
    scaled: Option<(i128, Vec<i128>)>,
}

fn scale_exact(y: &[Prob]) -> Option<(i128, Vec<i128>)> {
    let mut d = BigInt::one();
    for v in y {
        d = d.lcm(v.denom());
    }
    let bound = BigInt::one() << 100u32;
    if d > bound {
        return None;
    }
    let mut out = Vec::with_capacity(y.len());
    for v in y {
        let s = v.numer() * (&d / v.denom());
        if s.abs() > bound {
            return None;
        }
        out.push(s.to_i128()?);
    }
    Some((d.to_i128()?, out))
}

impl LpScalar for Prob {
    type Duals = ExactDuals;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_prob(p: &Prob) -> Self {
        p.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn less(&self, o: &Self) -> bool {
        self < o
    }
    fn prepare(y: Vec<Self>) -> ExactDuals {
        let scaled = scale_exact(&y);
        ExactDuals { y, scaled }
    }
    fn reduced_negative(duals: &ExactDuals, cost: &Self, col: &Column<Self>) -> bool {
        if let (Some((d, ys)), None, true) = (&duals.scaled, &col.coefs, cost.is_integer()) {
            if let Some(c) = cost.to_integer().to_i128().and_then(|c| c.checked_mul(*d)) {
                let mut acc = c;
                let mut overflow = false;
                for &r in &col.rows {
                    match acc.checked_sub(ys[r as usize]) {
                        Some(v) => acc = v,
                        None => {
                            overflow = true;
                            break;
                        }
                    }
                }
                if !overflow {
                    return acc < 0;
                }
            }
        }
        let mut d = cost.clone();
        for (r, c) in col.entries() {
            d -= c * &duals.y[r];
        }
        d.is_negative()
    }
    fn iteration_cap() -> Option<usize> {
        None
    }
}

impl LpScalar for f64 {
    type Duals = Vec<f64>;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_prob(p: &Prob) -> Self {
        to_f64(p)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOLERANCE
    }
    fn is_pos(&self) -> bool {
        *self > FLOAT_TOLERANCE
    }
    fn less(&self, o: &Self) -> bool {
        *self < o - FLOAT_TOLERANCE
    }
    fn prepare(y: Vec<Self>) -> Vec<f64> {
        y
    }
    fn reduced_negative(y: &Vec<f64>, cost: &Self, col: &Column<Self>) -> bool {
        let mut d = *cost;
        for (r, c) in col.entries() {
            d -= c * y[r];
        }
        d < -FLOAT_TOLERANCE
    }
    fn iteration_cap() -> Option<usize> {
        Some(FLOAT_ITERATION_CAP)
    }
}
