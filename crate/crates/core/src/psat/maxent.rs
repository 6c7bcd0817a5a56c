use num_traits::{One, Signed, Zero};

use crate::ground::{herbrand_base, PProgram};
use crate::prob::{from_f64_grid, Prob};

use super::search::{feasible, search, solve_exact_lp, BranchChoice, Compiled, Flow, Row};
use super::simplex::{Column, Lp, Sense};
use super::world::{Mask, World, WorldDistribution};
use super::{PsatError, SolveOptions};

const ENTROPY_TOLERANCE: f64 = 1e-8;
const VIOLATION_TOLERANCE: f64 = 1e-6;
const GRID_BITS: u32 = 40;

/// The entropy-maximal model of a program.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntModel {
    pub distribution: WorldDistribution,
    /// Entropy of `distribution` in nats.
    pub entropy: f64,
    /// The branch the model was found on.
    pub choices: Vec<BranchChoice>,
    pub branch_count: usize,
}

/// The model with the greatest entropy `-Σ p ln p`.
///
/// Each feasible branch is maximized separately by cyclic I-projection onto
/// its halfspaces; the floating point optimum is rounded onto a dyadic grid
/// and, when rounding leaves the branch polytope, pulled back in by the
/// smallest convex step towards a feasible point.
pub fn max_entropy_model(pp: &PProgram, opts: &SolveOptions) -> Result<MaxEntModel, PsatError> {
    opts.validate()?;
    let base = herbrand_base(pp, opts.max_world_atoms)?;
    let compiled = Compiled::new(&pp.clauses, &base)?;
    let n = compiled.n_atoms;
    let mut best: Option<MaxEntModel> = None;
    let branch_count = search(&compiled, &opts.epsilon, opts.lp_mode, &mut |rows, choices| {
        if !feasible(n, rows, opts.lp_mode)? {
            return Ok(Flow::Continue);
        }
        let p = maximize(n, rows, opts.max_sweeps)?;
        let q = exact_model(n, rows, &p)?;
        let distribution = WorldDistribution::new(n, World::all(n).zip(q)).expect("exact models are normalized");
        let entropy = distribution.entropy();
        if best.as_ref().is_none_or(|b| entropy > b.entropy) {
            best = Some(MaxEntModel { distribution, entropy, choices: choices.to_vec(), branch_count: 0 });
        }
        Ok(Flow::Continue)
    })?;
    let mut model = best.ok_or(PsatError::InconsistentProgram)?;
    model.branch_count = branch_count;
    Ok(model)
}

/// `mass(T) <= b`.
struct Halfspace {
    t: Mask,
    negated: bool,
    b: f64,
}

impl Halfspace {
    fn contains(&self, bits: u64) -> bool {
        self.t.holds(bits) != self.negated
    }
}

fn halfspaces(rows: &[Row]) -> Vec<Halfspace> {
    rows.iter()
        .map(|r| {
            let rhs = crate::prob::to_f64(&r.rhs);
            match r.sense {
                Sense::Le => Halfspace { t: r.mask, negated: false, b: rhs },
                Sense::Ge => Halfspace { t: r.mask, negated: true, b: 1.0 - rhs },
                Sense::Eq => unreachable!("branch rows are inequalities"),
            }
        })
        .collect()
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

fn maximize(n: usize, rows: &[Row], max_sweeps: usize) -> Result<Vec<f64>, PsatError> {
    let size = 1usize << n;
    let mut live = vec![true; size];
    let mut active = Vec::new();
    for h in halfspaces(rows) {
        if h.b <= 0.0 {
            for (w, l) in live.iter_mut().enumerate() {
                if h.contains(w as u64) {
                    *l = false;
                }
            }
        } else if h.b < 1.0 {
            active.push(h);
        }
    }
    let support = live.iter().filter(|&&l| l).count();
    if support == 0 {
        return Err(PsatError::LpNumericalFailure("feasible branch has no support".into()));
    }
    let mut p: Vec<f64> = live.iter().map(|&l| if l { 1.0 / support as f64 } else { 0.0 }).collect();
    let mut lambda = vec![0.0f64; active.len()];
    let mut h_prev = entropy(&p);
    for _ in 0..max_sweeps {
        for (j, h) in active.iter().enumerate() {
            let q: f64 = (0..size).filter(|&w| h.contains(w as u64)).map(|w| p[w]).sum();
            let target = if q <= 0.0 {
                f64::NEG_INFINITY
            } else if q >= 1.0 {
                return Err(PsatError::LpNumericalFailure("halfspace holds all of the mass".into()));
            } else {
                (q * (1.0 - h.b) / (h.b * (1.0 - q))).ln()
            };
            let delta = target.max(-lambda[j]);
            if delta == 0.0 || !delta.is_finite() {
                continue;
            }
            lambda[j] += delta;
            let factor = (-delta).exp();
            let total = 1.0 - q + q * factor;
            for (w, x) in p.iter_mut().enumerate() {
                if h.contains(w as u64) {
                    *x *= factor;
                }
                *x /= total;
            }
        }
        let h_now = entropy(&p);
        let violation = active
            .iter()
            .map(|h| (0..size).filter(|&w| h.contains(w as u64)).map(|w| p[w]).sum::<f64>() - h.b)
            .fold(0.0f64, f64::max);
        if (h_now - h_prev).abs() < ENTROPY_TOLERANCE && violation < VIOLATION_TOLERANCE {
            return Ok(p);
        }
        h_prev = h_now;
    }
    Err(PsatError::NonConvergence(max_sweeps))
}

fn row_mass(mask: Mask, q: &[Prob]) -> Prob {
    q.iter().enumerate().filter(|(w, _)| mask.holds(*w as u64)).map(|(_, x)| x).sum()
}

fn satisfies_rows(rows: &[Row], q: &[Prob]) -> bool {
    rows.iter().all(|r| {
        let m = row_mass(r.mask, q);
        match r.sense {
            Sense::Le => m <= r.rhs,
            Sense::Ge => m >= r.rhs,
            Sense::Eq => m == r.rhs,
        }
    })
}

/// Rounds `p` to exact rationals that satisfy every branch row.
fn exact_model(n: usize, rows: &[Row], p: &[f64]) -> Result<Vec<Prob>, PsatError> {
    let mut q: Vec<Prob> = p.iter().map(|&x| from_f64_grid(x.max(0.0), GRID_BITS)).collect();
    let total: Prob = q.iter().sum();
    if total.is_zero() {
        return Err(PsatError::LpNumericalFailure("rounded model is zero".into()));
    }
    for x in &mut q {
        *x /= &total;
    }
    if satisfies_rows(rows, &q) {
        return Ok(q);
    }
    repair(n, rows, q)
}

/// Finds the least `t` such that `(1-t)·q + u` satisfies `rows` for some
/// `u >= 0` with `Σ u = t`.
fn repair(n: usize, rows: &[Row], q: Vec<Prob>) -> Result<Vec<Prob>, PsatError> {
    let size = 1usize << n;
    // Row 0: Σ u - t = 0; rows 1..=m: branch rows; row m+1: t <= 1.
    let m = rows.len();
    let mut lp_rows = vec![(Sense::Eq, Prob::zero())];
    let mut t_rows = vec![0u32];
    let mut t_coefs = vec![-Prob::one()];
    for (i, r) in rows.iter().enumerate() {
        let mass = row_mass(r.mask, &q);
        lp_rows.push((r.sense, &r.rhs - &mass));
        t_rows.push(i as u32 + 1);
        t_coefs.push(-mass);
    }
    lp_rows.push((Sense::Le, Prob::one()));
    t_rows.push(m as u32 + 1);
    t_coefs.push(Prob::one());
    let mut cols = Vec::with_capacity(size + 1);
    let mut cost = Vec::with_capacity(size + 1);
    for w in 0..size as u64 {
        let mut rs = vec![0u32];
        rs.extend(rows.iter().enumerate().filter(|(_, r)| r.mask.holds(w)).map(|(i, _)| i as u32 + 1));
        cols.push(Column::ones(rs));
        cost.push(Prob::zero());
    }
    cols.push(Column { rows: t_rows, coefs: Some(t_coefs) });
    cost.push(Prob::one());
    let lp = Lp { rows: lp_rows, cols, cost };
    let (x, _) = solve_exact_lp(&lp, true)?
        .ok_or_else(|| PsatError::LpNumericalFailure("repair problem is infeasible".into()))?;
    let t = &x[size];
    let keep = Prob::one() - t;
    let out: Vec<Prob> = q.iter().zip(&x[..size]).map(|(qi, ui)| &keep * qi + ui).collect();
    debug_assert!(out.iter().all(|v| !v.is_negative()));
    Ok(out)
}
