use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::ground::{BodyLiteral, HerbrandBase, PClause, PProgram};
use crate::interval::ProbInterval;
use crate::model::{AnnotatedFormula, BasicFormula, Calendar, PTProgram, TPAnnotation, TPClause, TemporalConstraint, TimePoint, WeightFunction};
use crate::prob::Prob;
use crate::psat::{ki_satisfies_tp, max_entropy_model, world_satisfies, SolveOptions, World, WorldDistribution};

use super::thread::{CompressedAtom, CompressedBase};
use super::{CompressionError, LabeledFormula, Skeleton};

/// Principal variable of every evolution annotation.
pub const EVOLUTION_VAR: &str = "Y";

/// Per-label intervals, per time point.
pub type Slices = BTreeMap<String, BTreeMap<TimePoint, ProbInterval>>;

/// The time points of `slices`, checked to form a contiguous run of the
/// calendar.
pub fn slice_times(slices: &Slices, cal: &Calendar) -> Result<Vec<TimePoint>, CompressionError> {
    let times: BTreeSet<TimePoint> = slices.values().flat_map(|m| m.keys().copied()).collect();
    let times: Vec<TimePoint> = times.into_iter().collect();
    if let Some(&t) = times.iter().find(|&&t| !cal.contains(t)) {
        return Err(CompressionError::TimePointOutsideCalendar(t));
    }
    if times.is_empty() {
        return Err(CompressionError::InvalidProfile("no time slices".into()));
    }
    if times.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(CompressionError::NonContiguous(times));
    }
    Ok(times)
}

fn labels(skeleton: &Skeleton) -> impl Iterator<Item = &LabeledFormula> {
    skeleton.clauses.iter().flat_map(|c| std::iter::once(&c.head).chain(&c.body))
}

fn check_labels(skeleton: &Skeleton, slices: &Slices, times: &[TimePoint]) -> Result<(), CompressionError> {
    let used: BTreeSet<&str> = labels(skeleton).map(|l| l.label.as_str()).collect();
    if let Some(extra) = slices.keys().find(|k| !used.contains(k.as_str())) {
        return Err(CompressionError::UnknownLabel(extra.clone()));
    }
    for label in used {
        for &t in times {
            if !slices.get(label).is_some_and(|m| m.contains_key(&t)) {
                return Err(CompressionError::MissingTimeSlice { label: label.into(), time: t });
            }
        }
    }
    Ok(())
}

fn evolution_annotation(label: &str, slices: &Slices, times: &[TimePoint]) -> TPAnnotation {
    let per = &slices[label];
    let lower = times.iter().map(|t| per[t].lo().clone()).collect();
    let upper = times.iter().map(|t| per[t].hi().clone()).collect();
    let constraint = match times {
        [t] => TemporalConstraint::at(EVOLUTION_VAR, *t),
        _ => TemporalConstraint::between(EVOLUTION_VAR, times[0], times[times.len() - 1]),
    };
    TPAnnotation::new(constraint, WeightFunction::List(lower), WeightFunction::List(upper))
}

/// The single PT-program whose annotations list each formula's interval at
/// every time point of the slices.
pub fn build_evolution_program(skeleton: &Skeleton, slices: &Slices) -> Result<PTProgram, CompressionError> {
    let times = slice_times(slices, &skeleton.calendar)?;
    check_labels(skeleton, slices, &times)?;
    let clauses = skeleton
        .clauses
        .iter()
        .map(|c| {
            let head = c.head.formula.atoms[0].clone();
            let head_annot = evolution_annotation(&c.head.label, slices, &times);
            let body = c
                .body
                .iter()
                .map(|l| AnnotatedFormula { formula: l.formula.clone(), annot: evolution_annotation(&l.label, slices, &times) })
                .collect();
            TPClause::rule(head, head_annot, body)
        })
        .collect();
    Ok(PTProgram::new(skeleton.calendar, clauses))
}

/// The skeleton's p-program at time `t`, every atom placed at `t`.
pub fn slice_program(skeleton: &Skeleton, slices: &Slices, t: TimePoint) -> Result<PProgram, CompressionError> {
    let at = |l: &LabeledFormula| -> Result<ProbInterval, CompressionError> {
        slices
            .get(&l.label)
            .and_then(|m| m.get(&t))
            .cloned()
            .ok_or_else(|| CompressionError::MissingTimeSlice { label: l.label.clone(), time: t })
    };
    let mut clauses = Vec::new();
    for c in &skeleton.clauses {
        let body = c
            .body
            .iter()
            .map(|l| Ok(BodyLiteral { formula: l.formula.substitute_time(t), interval: at(l)?, time: t }))
            .collect::<Result<Vec<_>, CompressionError>>()?;
        clauses.push(PClause { head: c.head.formula.atoms[0].at(t), head_iv: at(&c.head)?, body });
    }
    Ok(PProgram::from_clauses(clauses))
}

/// The compressed base of a skeleton.
pub fn skeleton_base(skeleton: &Skeleton) -> CompressedBase {
    CompressedBase::new(labels(skeleton).flat_map(|l| l.formula.atoms.iter().map(CompressedAtom::of)))
}

/// A time-indexed family of distributions over the worlds of a compressed
/// base: bit `i` of a world is `base.atoms()[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionProfile {
    pub base: CompressedBase,
    pub interval: Vec<TimePoint>,
    pub dists: BTreeMap<TimePoint, WorldDistribution>,
}

impl EvolutionProfile {
    pub fn new(
        base: CompressedBase,
        dists: BTreeMap<TimePoint, WorldDistribution>,
        cal: &Calendar,
    ) -> Result<Self, CompressionError> {
        for (&t, d) in &dists {
            if !cal.contains(t) {
                return Err(CompressionError::TimePointOutsideCalendar(t));
            }
            if d.atoms() != base.len() {
                return Err(CompressionError::InvalidProfile(format!(
                    "distribution at {t} covers {} atoms, the base has {}",
                    d.atoms(),
                    base.len()
                )));
            }
        }
        let interval = dists.keys().copied().collect();
        Ok(EvolutionProfile { base, interval, dists })
    }
}

/// The profile whose slice at each time is the maximum-entropy model of the
/// skeleton's p-program at that time.
pub fn derive_profile(skeleton: &Skeleton, slices: &Slices, opts: &SolveOptions) -> Result<EvolutionProfile, CompressionError> {
    let times = slice_times(slices, &skeleton.calendar)?;
    check_labels(skeleton, slices, &times)?;
    let cbase = skeleton_base(skeleton);
    let mut dists = BTreeMap::new();
    for &t in &times {
        let pp = slice_program(skeleton, slices, t)?;
        let m = max_entropy_model(&pp, opts)?;
        let entries = m.distribution.iter().map(|(w, p)| {
            let mut j = World::empty(cbase.len());
            for atom in w.true_atoms(&pp.base) {
                j.set(cbase.index_of(&CompressedAtom::of(atom)).expect("slice atoms are skeleton atoms"), true);
            }
            (j, p.clone())
        });
        dists.insert(t, WorldDistribution::new(cbase.len(), entries).expect("relabeling preserves mass"));
    }
    EvolutionProfile::new(cbase, dists, &skeleton.calendar)
}

/// An assignment to the compressed base, tagged with the time it is read at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TaggedWorld {
    pub time: TimePoint,
    pub assignment: World,
}

impl TaggedWorld {
    /// The world over `base` whose true atoms are `r(d)@time` for the true
    /// `r(d)` of the assignment.
    pub fn flatten(&self, cbase: &CompressedBase, base: &HerbrandBase) -> World {
        let mut w = World::empty(base.len());
        for i in self.assignment.true_indices() {
            let atom = cbase.atoms()[i].at(self.time);
            w.set(base.index_of(&atom).expect("time-expanded base"), true);
        }
        w
    }
}

/// The mass of every tagged world: `PI(t)(J) / |S_τ|`.
pub fn tagged_masses(pi: &EvolutionProfile, cal: &Calendar) -> Vec<(TaggedWorld, Prob)> {
    let n = Prob::from_integer(cal.len().into());
    pi.dists
        .iter()
        .flat_map(|(&time, d)| d.iter().map(move |(&assignment, p)| (TaggedWorld { time, assignment }, p.clone())))
        .map(|(tw, p)| (tw, p / &n))
        .collect()
}

/// An evolution distribution together with the base its worlds range over.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionModel {
    pub base: HerbrandBase,
    /// Normalized when the profile covers the whole calendar.
    pub distribution: Option<WorldDistribution>,
    /// Raw masses per world; sums to `|Δ_τ| / |S_τ|`.
    pub masses: BTreeMap<World, Prob>,
}

/// `KI = DI / |S_τ|`, projected onto worlds over the time-expanded base.
/// All-false assignments from every time accumulate on the empty world.
pub fn evolution_distribution(pi: &EvolutionProfile, cal: &Calendar) -> EvolutionModel {
    let base = pi.base.time_expanded(cal);
    let mut masses: BTreeMap<World, Prob> = BTreeMap::new();
    for (tw, p) in tagged_masses(pi, cal) {
        *masses.entry(tw.flatten(&pi.base, &base)).or_insert_with(Prob::zero) += p;
    }
    let distribution = WorldDistribution::new(base.len(), masses.iter().map(|(w, p)| (*w, p.clone()))).ok();
    EvolutionModel { base, distribution, masses }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Masses of the averaged distribution itself.
    Literal,
    /// Masses conditioned on the time tag, i.e. `|S_τ|` times the slice.
    Conditional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceCheck {
    pub formula: BasicFormula,
    pub time: TimePoint,
    pub mass: Prob,
    pub required: ProbInterval,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionReport {
    pub mode: VerifyMode,
    pub checks: Vec<SliceCheck>,
    /// Whether the averaged distribution is a model of the program; only
    /// computed in literal mode.
    pub model: Option<bool>,
}

impl EvolutionReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds) && self.model != Some(false)
    }
}

/// Measures every annotated formula of `program` at each of its time points.
/// Discrepancies are reported, never raised.
pub fn verify_evolution(
    pi: &EvolutionProfile,
    program: &PTProgram,
    mode: VerifyMode,
) -> Result<EvolutionReport, CompressionError> {
    let cal = &program.calendar;
    let ev = evolution_distribution(pi, cal);
    let tagged = tagged_masses(pi, cal);
    let scale = Prob::from_integer(cal.len().into());
    let satisfies = |w: &World, f: &BasicFormula| world_satisfies(w, f, &ev.base).expect("program atoms lie in the time-expanded base");
    let mut seen = BTreeSet::new();
    let mut checks = Vec::new();
    for c in &program.clauses {
        let head = BasicFormula::single(c.head.clone());
        let entries = std::iter::once((&head, &c.head_annot)).chain(c.body.iter().map(|b| (&b.formula, &b.annot)));
        for (f, a) in entries {
            if !seen.insert((f.clone(), a.clone())) {
                continue;
            }
            let sol = a.solve(cal).map_err(|e| CompressionError::InvalidProfile(e.to_string()))?;
            for &t in &sol {
                let ft = f.substitute_time(t);
                let mass = match mode {
                    VerifyMode::Literal => {
                        ev.masses.iter().filter(|(w, _)| satisfies(w, &ft)).map(|(_, p)| p).sum()
                    }
                    VerifyMode::Conditional => {
                        let at_t: Prob = tagged
                            .iter()
                            .filter(|(tw, _)| tw.time == t && satisfies(&tw.flatten(&pi.base, &ev.base), &ft))
                            .map(|(_, p)| p)
                            .sum();
                        at_t * &scale
                    }
                };
                let required = a.interval_in(&sol, t);
                let holds = required.contains(&mass);
                checks.push(SliceCheck { formula: ft, time: t, mass, required, holds });
            }
        }
    }
    let model = match (mode, &ev.distribution) {
        (VerifyMode::Literal, Some(d)) => {
            Some(ki_satisfies_tp(program, &ev.base, d).map_err(CompressionError::Psat)?)
        }
        (VerifyMode::Literal, None) => Some(false),
        (VerifyMode::Conditional, _) => None,
    };
    Ok(EvolutionReport { mode, checks, model })
}
