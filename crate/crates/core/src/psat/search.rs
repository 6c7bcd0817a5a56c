use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::ground::{herbrand_base, HerbrandBase, PClause, PProgram};
use crate::interval::ProbInterval;
use crate::model::{BasicFormula, Calendar, Diagnostic, DiagnosticKind, TAtom, TPAnnotation, TimePoint};
use crate::prob::Prob;

use super::simplex::{self, Column, Lp, LpError, LpOutcome, Sense};
use super::world::{Mask, World, WorldDistribution};
use super::{clamp_unit, LpMode, PsatError, SolveOptions};

/// The alternative a clause is satisfied by on one branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchChoice {
    /// The head mass lies in the head interval.
    HeadIn,
    /// Body literal `k` has mass at most `lo - ε`.
    BodyLow(usize),
    /// Body literal `k` has mass at least `hi + ε`.
    BodyHigh(usize),
}

/// `mass(mask) sense rhs`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Row {
    pub mask: Mask,
    pub sense: Sense,
    pub rhs: Prob,
}

/// A p-program compiled against a fixed base.
pub(crate) struct Compiled {
    pub n_atoms: usize,
    clauses: Vec<CompiledClause>,
    /// `[max lo, min hi]` of the facts about each single atom.
    fact_bounds: HashMap<u64, (Prob, Prob)>,
}

struct CompiledClause {
    head: Mask,
    head_iv: ProbInterval,
    body: Vec<(Mask, ProbInterval)>,
}

impl Compiled {
    pub fn new(clauses: &[PClause], base: &HerbrandBase) -> Result<Self, PsatError> {
        let mut compiled = Vec::new();
        let mut fact_bounds: HashMap<u64, (Prob, Prob)> = HashMap::new();
        for c in clauses {
            let head = Mask::of(&BasicFormula::single(c.head.clone()), base)?;
            let body = c
                .body
                .iter()
                .map(|l| Ok((Mask::of(&l.formula, base)?, l.interval.clone())))
                .collect::<Result<Vec<_>, PsatError>>()?;
            if body.is_empty() {
                let Mask::All(bit) = head else { unreachable!("heads are single atoms") };
                let e = fact_bounds.entry(bit).or_insert_with(|| (Prob::zero(), Prob::one()));
                if c.head_iv.lo() > &e.0 {
                    e.0 = c.head_iv.lo().clone();
                }
                if c.head_iv.hi() < &e.1 {
                    e.1 = c.head_iv.hi().clone();
                }
            }
            compiled.push(CompiledClause { head, head_iv: c.head_iv.clone(), body });
        }
        Ok(Compiled { n_atoms: base.len(), clauses: compiled, fact_bounds })
    }

    /// Alternatives for clause `k` that can contribute models, in search
    /// order.
    fn options(&self, k: usize, eps: &Prob) -> Vec<BranchChoice> {
        let c = &self.clauses[k];
        let head_rows = head_rows(c);
        if head_rows.is_empty() {
            // The head interval is [0,1]: every other alternative only
            // removes models.
            return vec![BranchChoice::HeadIn];
        }
        let mut out = vec![BranchChoice::HeadIn];
        for (i, (mask, iv)) in c.body.iter().enumerate() {
            let fact = match mask {
                Mask::All(bit) if bit.count_ones() == 1 => self.fact_bounds.get(bit),
                _ => None,
            };
            let low = iv.lo() - eps;
            if !low.is_negative() && !fact.is_some_and(|(flo, _)| *flo > low) {
                out.push(BranchChoice::BodyLow(i));
            }
            let high = iv.hi() + eps;
            if high <= Prob::one() && !fact.is_some_and(|(_, fhi)| *fhi < high) {
                out.push(BranchChoice::BodyHigh(i));
            }
        }
        out
    }

    fn rows(&self, k: usize, choice: BranchChoice, eps: &Prob) -> Vec<Row> {
        let c = &self.clauses[k];
        match choice {
            BranchChoice::HeadIn => head_rows(c),
            BranchChoice::BodyLow(i) => {
                let (mask, iv) = &c.body[i];
                vec![Row { mask: *mask, sense: Sense::Le, rhs: iv.lo() - eps }]
            }
            BranchChoice::BodyHigh(i) => {
                let (mask, iv) = &c.body[i];
                vec![Row { mask: *mask, sense: Sense::Ge, rhs: iv.hi() + eps }]
            }
        }
    }
}

fn head_rows(c: &CompiledClause) -> Vec<Row> {
    let mut rows = Vec::new();
    if c.head_iv.lo().is_positive() {
        rows.push(Row { mask: c.head, sense: Sense::Ge, rhs: c.head_iv.lo().clone() });
    }
    if c.head_iv.hi() < &Prob::one() {
        rows.push(Row { mask: c.head, sense: Sense::Le, rhs: c.head_iv.hi().clone() });
    }
    rows
}

/// Builds the LP over all `2^n` worlds: row 0 is `Σ p = 1`, row `i + 1` is
/// `rows[i]`. The objective minimizes `sign · mass(objective)`.
fn build_lp<S: simplex::LpScalar>(n_atoms: usize, rows: &[Row], objective: Option<(Mask, bool)>) -> Lp<S> {
    let mut lp_rows = vec![(Sense::Eq, S::one())];
    lp_rows.extend(rows.iter().map(|r| (r.sense, S::from_prob(&r.rhs))));
    let mut cols = Vec::with_capacity(1 << n_atoms);
    let mut cost = Vec::with_capacity(1 << n_atoms);
    for w in World::all(n_atoms) {
        let mut rs = vec![0u32];
        rs.extend(rows.iter().enumerate().filter(|(_, r)| r.mask.holds(w.bits())).map(|(i, _)| i as u32 + 1));
        cols.push(Column::ones(rs));
        cost.push(match objective {
            Some((m, maximize)) if m.holds(w.bits()) => {
                if maximize {
                    S::one().neg()
                } else {
                    S::one()
                }
            }
            _ => S::zero(),
        });
    }
    Lp { rows: lp_rows, cols, cost }
}

fn lp_failure(e: LpError) -> PsatError {
    PsatError::LpNumericalFailure(e.to_string())
}

/// Solves the branch LP exactly, returning the world masses and objective.
pub(crate) fn solve_exact(
    n_atoms: usize,
    rows: &[Row],
    objective: Option<(Mask, bool)>,
) -> Result<Option<(Vec<Prob>, Prob)>, PsatError> {
    solve_exact_lp(&build_lp::<Prob>(n_atoms, rows, objective), objective.is_some())
}

pub(crate) fn solve_exact_lp(lp: &Lp<Prob>, optimize: bool) -> Result<Option<(Vec<Prob>, Prob)>, PsatError> {
    match simplex::solve(lp, optimize).map_err(lp_failure)? {
        LpOutcome::Optimal { x, value } => Ok(Some((x, value))),
        LpOutcome::Infeasible => Ok(None),
    }
}

fn solve_float(n_atoms: usize, rows: &[Row], objective: Option<(Mask, bool)>) -> Result<Option<f64>, PsatError> {
    let lp = build_lp::<f64>(n_atoms, rows, objective);
    match simplex::solve(&lp, objective.is_some()).map_err(lp_failure)? {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Infeasible => Ok(None),
    }
}

pub(crate) fn feasible(n_atoms: usize, rows: &[Row], mode: LpMode) -> Result<bool, PsatError> {
    Ok(match mode {
        LpMode::Exact => solve_exact(n_atoms, rows, None)?.is_some(),
        LpMode::Float => solve_float(n_atoms, rows, None)?.is_some(),
    })
}

pub(crate) enum Flow {
    Continue,
    Stop,
}

/// Called once per complete branch with its rows and choices.
pub(crate) type LeafFn<'a> = dyn FnMut(&[Row], &[BranchChoice]) -> Result<Flow, PsatError> + 'a;

/// Depth-first search over branch choices in clause order. `leaf` is called
/// with the rows of every complete branch not pruned on the way down; it
/// decides feasibility itself.
pub(crate) fn search(
    compiled: &Compiled,
    eps: &Prob,
    mode: LpMode,
    leaf: &mut LeafFn<'_>,
) -> Result<usize, PsatError> {
    let mut st = SearchState { compiled, eps, mode, rows: Vec::new(), choices: Vec::new(), branches: 0 };
    st.dfs(0, leaf)?;
    Ok(st.branches)
}

struct SearchState<'a> {
    compiled: &'a Compiled,
    eps: &'a Prob,
    mode: LpMode,
    rows: Vec<Row>,
    choices: Vec<BranchChoice>,
    branches: usize,
}

impl SearchState<'_> {
    fn dfs(
        &mut self,
        k: usize,
        leaf: &mut LeafFn<'_>,
    ) -> Result<Flow, PsatError> {
        if k == self.compiled.clauses.len() {
            self.branches += 1;
            return leaf(&self.rows, &self.choices);
        }
        let options = self.compiled.options(k, self.eps);
        if options.len() > 1 && !self.rows.is_empty() && !feasible(self.compiled.n_atoms, &self.rows, self.mode)? {
            return Ok(Flow::Continue);
        }
        for choice in options {
            let added = self.compiled.rows(k, choice, self.eps);
            let n = added.len();
            self.rows.extend(added);
            self.choices.push(choice);
            let flow = self.dfs(k + 1, leaf)?;
            self.choices.pop();
            self.rows.truncate(self.rows.len() - n);
            if let Flow::Stop = flow {
                return Ok(Flow::Stop);
            }
        }
        Ok(Flow::Continue)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    /// No model at `ε`, but one exists once strict violations are allowed
    /// to touch the interval boundary.
    UnknownEps,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Inconsistent => "INCONSISTENT",
            Verdict::UnknownEps => "UNKNOWN_EPS",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Consistency {
    pub verdict: Verdict,
    /// A model, for consistent programs.
    pub witness: Option<WorldDistribution>,
    /// The branch the witness satisfies.
    pub choices: Vec<BranchChoice>,
    /// Complete branches examined.
    pub branch_count: usize,
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        self.verdict == Verdict::Consistent
    }
}

fn checked_base(pp: &PProgram, opts: &SolveOptions) -> Result<HerbrandBase, PsatError> {
    opts.validate()?;
    Ok(herbrand_base(pp, opts.max_world_atoms)?)
}

fn distribution(n_atoms: usize, x: Vec<Prob>) -> WorldDistribution {
    let entries = World::all(n_atoms).zip(x).filter(|(_, p)| !p.is_zero());
    WorldDistribution::new(n_atoms, entries).expect("LP solutions are normalized")
}

/// Decides whether the p-program has a model.
pub fn check_consistency(pp: &PProgram, opts: &SolveOptions) -> Result<Consistency, PsatError> {
    let base = checked_base(pp, opts)?;
    let compiled = Compiled::new(&pp.clauses, &base)?;
    let mut found: Option<(Vec<Prob>, Vec<BranchChoice>)> = None;
    let branch_count = search(&compiled, &opts.epsilon, opts.lp_mode, &mut |rows, choices| {
        if opts.lp_mode == LpMode::Float && solve_float(compiled.n_atoms, rows, None)?.is_none() {
            return Ok(Flow::Continue);
        }
        match solve_exact(compiled.n_atoms, rows, None)? {
            Some((x, _)) => {
                found = Some((x, choices.to_vec()));
                Ok(Flow::Stop)
            }
            None if opts.lp_mode == LpMode::Float => Err(PsatError::LpNumericalFailure(
                "floating point feasibility not confirmed by the exact solver".into(),
            )),
            None => Ok(Flow::Continue),
        }
    })?;
    if let Some((x, choices)) = found {
        return Ok(Consistency {
            verdict: Verdict::Consistent,
            witness: Some(distribution(compiled.n_atoms, x)),
            choices,
            branch_count,
        });
    }
    let mut boundary = false;
    let zero = Prob::zero();
    search(&compiled, &zero, opts.lp_mode, &mut |rows, _| {
        boundary = feasible(compiled.n_atoms, rows, opts.lp_mode)?;
        Ok(if boundary { Flow::Stop } else { Flow::Continue })
    })?;
    let verdict = if boundary { Verdict::UnknownEps } else { Verdict::Inconsistent };
    Ok(Consistency { verdict, witness: None, choices: Vec::new(), branch_count })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tightening {
    pub interval: ProbInterval,
    pub branch_count: usize,
}

/// The tightest `[min, max]` of `mass(f)` over all models of the program.
///
/// Atoms of `f` missing from the base are added to it; they are
/// unconstrained by the program.
pub fn tighten(pp: &PProgram, f: &BasicFormula, opts: &SolveOptions) -> Result<Tightening, PsatError> {
    opts.validate()?;
    if !f.is_ground() {
        return Err(PsatError::InvalidProgram(format!("formula `{f}` is not ground")));
    }
    let base = extend_base(&pp.base, f);
    if base.len() > opts.max_world_atoms {
        return Err(crate::ground::BaseTooLarge { size: base.len(), cap: opts.max_world_atoms }.into());
    }
    let compiled = Compiled::new(&pp.clauses, &base)?;
    let target = Mask::of(f, &base)?;
    let mut bounds: Option<(Prob, Prob)> = None;
    let branch_count = search(&compiled, &opts.epsilon, opts.lp_mode, &mut |rows, _| {
        let (lo, hi) = match opts.lp_mode {
            LpMode::Exact => {
                let lo = solve_exact(compiled.n_atoms, rows, Some((target, false)))?.map(|(_, v)| v);
                let hi = solve_exact(compiled.n_atoms, rows, Some((target, true)))?.map(|(_, v)| -v);
                (lo, hi)
            }
            LpMode::Float => {
                let lo = solve_float(compiled.n_atoms, rows, Some((target, false)))?;
                let hi = solve_float(compiled.n_atoms, rows, Some((target, true)))?.map(|v| -v);
                let exact = |v: f64| Prob::from_float(v).map(clamp_unit);
                (lo.and_then(exact), hi.and_then(exact))
            }
        };
        let (lo, hi) = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            (None, None) => return Ok(Flow::Continue),
            _ => return Err(PsatError::LpNumericalFailure("feasible branch became infeasible".into())),
        };
        bounds = Some(match bounds.take() {
            None => (lo, hi),
            Some((a, b)) => (if lo < a { lo } else { a }, if hi > b { hi } else { b }),
        });
        Ok(Flow::Continue)
    })?;
    let (lo, hi) = bounds.ok_or(PsatError::InconsistentProgram)?;
    Ok(Tightening { interval: ProbInterval::new(lo, hi).expect("LP optima lie in [0,1]"), branch_count })
}

fn extend_base(base: &HerbrandBase, f: &BasicFormula) -> HerbrandBase {
    let missing: Vec<TAtom> = f.atoms.iter().filter(|a| !base.contains(a)).cloned().collect();
    if missing.is_empty() {
        base.clone()
    } else {
        base.extended(missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntailPoint {
    pub time: TimePoint,
    pub formula: BasicFormula,
    /// `[ω_L(t), ω_U(t)]` of the query.
    pub required: ProbInterval,
    /// The tightened interval of the program.
    pub derived: ProbInterval,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entailment {
    pub holds: bool,
    pub points: Vec<EntailPoint>,
    pub warnings: Vec<Diagnostic>,
}

/// Whether every model of the program satisfies `F : μ`, checked at each
/// point of `sol(C)`.
pub fn entails(
    pp: &PProgram,
    formula: &BasicFormula,
    annot: &TPAnnotation,
    calendar: &Calendar,
    opts: &SolveOptions,
) -> Result<Entailment, PsatError> {
    if !check_consistency(pp, opts)?.is_consistent() {
        return Err(PsatError::InconsistentProgram);
    }
    let sol = annot.solve(calendar).map_err(|e| PsatError::InvalidProgram(e.to_string()))?;
    let mut warnings = Vec::new();
    if sol.is_empty() {
        warnings.push(Diagnostic::warning(
            DiagnosticKind::EmptySolutionSet,
            annot.span,
            format!("query constraint `{}` has no solution; entailment holds vacuously", annot.constraint),
        ));
    }
    let mut points = Vec::new();
    for &t in &sol {
        let ft = formula.substitute_time(t);
        let derived = tighten(pp, &ft, opts)?.interval;
        let required = annot.interval_in(&sol, t);
        let holds = derived.is_within(&required);
        points.push(EntailPoint { time: t, formula: ft, required, derived, holds });
    }
    Ok(Entailment { holds: points.iter().all(|p| p.holds), points, warnings })
}
