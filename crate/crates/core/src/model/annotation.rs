use std::fmt;

use super::constraint::{solve_constraint, ConstraintError, TemporalConstraint};
use super::diagnostic::{Diagnostic, DiagnosticKind, SourceSpan};
use super::time::{Calendar, TimePoint};
use super::weight::WeightFunction;
use crate::interval::ProbInterval;
use crate::prob::{format_decimal, in_unit, Prob};

/// `⟨C, ω_L, ω_U⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TPAnnotation {
    pub constraint: TemporalConstraint,
    pub lower: WeightFunction,
    pub upper: WeightFunction,
    pub span: SourceSpan,
}

impl TPAnnotation {
    pub fn new(constraint: TemporalConstraint, lower: WeightFunction, upper: WeightFunction) -> Self {
        TPAnnotation { constraint, lower, upper, span: SourceSpan::default() }
    }

    /// `⟨y=t, #, #⟩`, the annotation of a certain fact.
    pub fn certain_at(principal: &str, t: TimePoint) -> Self {
        Self::new(TemporalConstraint::at(principal, t), WeightFunction::Sharp, WeightFunction::Sharp)
    }

    /// `⟨y=t, [lo], [hi]⟩`.
    pub fn constant_at(principal: &str, t: TimePoint, interval: &ProbInterval) -> Self {
        Self::new(
            TemporalConstraint::at(principal, t),
            WeightFunction::List(vec![interval.lo().clone()]),
            WeightFunction::List(vec![interval.hi().clone()]),
        )
    }

    pub fn principal(&self) -> &str {
        &self.constraint.principal
    }

    pub fn solve(&self, cal: &Calendar) -> Result<Vec<TimePoint>, ConstraintError> {
        solve_constraint(&self.constraint, cal)
    }

    /// `[ω_L(t), ω_U(t)]` for a `t` of the given solution set.
    pub fn interval_in(&self, sol: &[TimePoint], t: TimePoint) -> ProbInterval {
        let lo = self.lower.value_in(sol, t);
        let hi = self.upper.value_in(sol, t);
        ProbInterval::new(lo, hi).expect("validated weights lie in [0,1]")
    }
}

impl fmt::Display for TPAnnotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.constraint, WeightDisplay(&self.lower), WeightDisplay(&self.upper))
    }
}

struct WeightDisplay<'a>(&'a WeightFunction);

impl fmt::Display for WeightDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            WeightFunction::Sharp => f.write_str("#"),
            WeightFunction::Uniform => f.write_str("uniform"),
            WeightFunction::List(values) => {
                f.write_str("[")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(&format_decimal(v))?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Well-formedness of an annotation against a calendar.
///
/// An empty solution set only warns: the annotated formula is then
/// vacuously satisfied. Non-normal constraints cannot be checked before
/// their independent variables are grounded and yield no diagnostics.
pub fn validate_annotation(a: &TPAnnotation, cal: &Calendar) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for w in [&a.lower, &a.upper] {
        if let WeightFunction::List(values) = w {
            for v in values.iter().filter(|v| !in_unit(v)) {
                out.push(Diagnostic::error(
                    DiagnosticKind::ProbabilityOutOfRange,
                    a.span,
                    format!("weight {} lies outside [0,1]", format_decimal(v)),
                ));
            }
        }
    }
    if !a.constraint.is_normal() {
        return out;
    }
    let sol = match a.solve(cal) {
        Ok(sol) => sol,
        Err(e) => {
            out.push(Diagnostic::error(DiagnosticKind::ConstraintEvaluation, a.constraint.span, e.to_string()));
            return out;
        }
    };
    if sol.is_empty() {
        out.push(Diagnostic::warning(
            DiagnosticKind::EmptySolutionSet,
            a.constraint.span,
            format!("constraint `{}` has no solution in calendar {cal}; the formula is vacuously satisfied", a.constraint),
        ));
    }
    let mut shape_ok = true;
    for (side, w) in [("lower", &a.lower), ("upper", &a.upper)] {
        match w {
            WeightFunction::List(values) if values.len() != sol.len() => {
                shape_ok = false;
                out.push(Diagnostic::error(
                    DiagnosticKind::LengthMismatch,
                    a.span,
                    format!("{side} weight list has {} values but |sol(C)| = {}", values.len(), sol.len()),
                ));
            }
            WeightFunction::Sharp if sol.len() != 1 => {
                shape_ok = false;
                out.push(Diagnostic::error(
                    DiagnosticKind::SharpCardinality,
                    a.span,
                    format!("{side} weight `#` needs |sol(C)| = 1, found {}", sol.len()),
                ));
            }
            _ => {}
        }
    }
    if shape_ok && out.iter().all(|d| !d.is_error()) {
        for &t in &sol {
            let lo: Prob = a.lower.value_in(&sol, t);
            let hi: Prob = a.upper.value_in(&sol, t);
            if lo > hi {
                out.push(Diagnostic::error(
                    DiagnosticKind::LowerExceedsUpper,
                    a.span,
                    format!("at time {t} lower bound {} exceeds upper bound {}", format_decimal(&lo), format_decimal(&hi)),
                ));
            }
        }
    }
    out
}
