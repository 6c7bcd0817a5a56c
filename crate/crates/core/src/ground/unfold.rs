use std::fmt;

use crate::interval::ProbInterval;
use crate::model::{BasicFormula, Calendar, Diagnostic, DiagnosticKind, PTProgram, TAtom, TPClause, TimePoint};

use super::{GroundError, HerbrandBase};

/// `F(t) : [lo, hi]` in the body of a p-clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyLiteral {
    pub formula: BasicFormula,
    pub interval: ProbInterval,
    /// The solution point the formula was instantiated at.
    pub time: TimePoint,
}

/// `A(t) : [lo, hi] ← F1(t1) : [lo1, hi1] ∧ ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PClause {
    pub head: TAtom,
    pub head_iv: ProbInterval,
    pub body: Vec<BodyLiteral>,
}

impl fmt::Display for PClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.head, self.head_iv)?;
        for (i, lit) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " <- " } else { " and " })?;
            write!(f, "{} : {}", lit.formula, lit.interval)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PProgram {
    pub clauses: Vec<PClause>,
    pub base: HerbrandBase,
    /// Clauses whose head constraint has no solution.
    pub warnings: Vec<Diagnostic>,
}

impl PProgram {
    /// Builds a program from already unfolded clauses.
    pub fn from_clauses(clauses: Vec<PClause>) -> Self {
        let base = HerbrandBase::new(
            clauses.iter().flat_map(|c| std::iter::once(&c.head).chain(c.body.iter().flat_map(|l| &l.formula.atoms))).cloned(),
        );
        PProgram { clauses, base, warnings: Vec::new() }
    }
}

/// One p-clause per point of the head's solution set. Every body conjunct
/// contributes one literal per point of its own solution set.
///
/// Object terms are left as they are, so a non-ground clause unfolds to
/// non-ground p-clauses.
pub fn unfold_clause(clause: &TPClause, cal: &Calendar) -> Result<Vec<PClause>, GroundError> {
    let mut body = Vec::new();
    for conj in &clause.body {
        if !conj.annot.constraint.is_normal() {
            return Err(GroundError::NonNormal(conj.annot.constraint.to_string()));
        }
        let sol = conj.annot.solve(cal)?;
        for &t in &sol {
            body.push(BodyLiteral {
                formula: strip(conj.formula.substitute_time(t)),
                interval: conj.annot.interval_in(&sol, t),
                time: t,
            });
        }
    }
    if !clause.head_annot.constraint.is_normal() {
        return Err(GroundError::NonNormal(clause.head_annot.constraint.to_string()));
    }
    let sol = clause.head_annot.solve(cal)?;
    Ok(sol
        .iter()
        .map(|&t| {
            let head = match clause.head.time_point() {
                Some(_) => clause.head.clone(),
                None => clause.head.at(t),
            };
            PClause {
                head: TAtom { span: Default::default(), ..head },
                head_iv: clause.head_annot.interval_in(&sol, t),
                body: body.clone(),
            }
        })
        .collect())
}

fn strip(mut f: BasicFormula) -> BasicFormula {
    f.span = Default::default();
    for a in &mut f.atoms {
        a.span = Default::default();
    }
    f
}

/// Unfolds an object-ground program into its p-program.
pub fn unfold(gp: &PTProgram) -> Result<PProgram, GroundError> {
    let mut clauses = Vec::new();
    let mut warnings = Vec::new();
    for clause in &gp.clauses {
        if !clause.is_object_ground() {
            return Err(GroundError::NotGround(crate::parser::render_clause(clause)));
        }
        let unfolded = unfold_clause(clause, &gp.calendar)?;
        if unfolded.is_empty() {
            warnings.push(Diagnostic::warning(
                DiagnosticKind::EmptySolutionSet,
                clause.span,
                format!("head constraint `{}` has no solution; the clause unfolds to nothing", clause.head_annot.constraint),
            ));
        }
        clauses.extend(unfolded);
    }
    let mut pp = PProgram::from_clauses(clauses);
    pp.warnings = warnings;
    Ok(pp)
}
