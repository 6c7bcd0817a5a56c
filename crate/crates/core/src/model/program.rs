use std::collections::{BTreeMap, BTreeSet};

use super::annotation::{validate_annotation, TPAnnotation};
use super::diagnostic::{Diagnostic, DiagnosticKind, SourceSpan};
use super::term::{BasicFormula, ObjTerm, TAtom, TimeTerm};
use super::time::Calendar;

/// `F : μ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnnotatedFormula {
    pub formula: BasicFormula,
    pub annot: TPAnnotation,
}

/// `A : μ ← F1 : μ1 ∧ ... ∧ Fm : μm`; a fact when the body is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TPClause {
    pub head: TAtom,
    pub head_annot: TPAnnotation,
    pub body: Vec<AnnotatedFormula>,
    pub span: SourceSpan,
}

impl TPClause {
    pub fn fact(head: TAtom, head_annot: TPAnnotation) -> Self {
        TPClause { head, head_annot, body: Vec::new(), span: SourceSpan::default() }
    }

    pub fn rule(head: TAtom, head_annot: TPAnnotation, body: Vec<AnnotatedFormula>) -> Self {
        TPClause { head, head_annot, body, span: SourceSpan::default() }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// Every t-atom of the clause, head first.
    pub fn atoms(&self) -> impl Iterator<Item = &TAtom> {
        std::iter::once(&self.head).chain(self.body.iter().flat_map(|b| b.formula.atoms.iter()))
    }

    /// Every annotation of the clause, head first.
    pub fn annotations(&self) -> impl Iterator<Item = &TPAnnotation> {
        std::iter::once(&self.head_annot).chain(self.body.iter().map(|b| &b.annot))
    }

    /// Object variables in order of first occurrence.
    pub fn object_vars(&self) -> Vec<String> {
        let mut vars: Vec<String> = Vec::new();
        for v in self.atoms().flat_map(TAtom::object_vars) {
            if !vars.iter().any(|x| x == v) {
                vars.push(v.to_string());
            }
        }
        vars
    }

    /// Temporal variables occurring as non-principal variables of some
    /// constraint of the clause.
    pub fn independent_time_vars(&self) -> BTreeSet<String> {
        self.annotations().flat_map(|a| a.constraint.independent_vars()).collect()
    }

    pub fn is_object_ground(&self) -> bool {
        self.atoms().all(TAtom::is_object_ground)
    }

    pub fn substitute_objects(&self, subst: &BTreeMap<String, String>) -> TPClause {
        TPClause {
            head: self.head.substitute_objects(subst),
            head_annot: self.head_annot.clone(),
            body: self
                .body
                .iter()
                .map(|b| AnnotatedFormula { formula: b.formula.substitute_objects(subst), annot: b.annot.clone() })
                .collect(),
            span: self.span,
        }
    }
}

/// A finite set of tp-clauses over one calendar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PTProgram {
    pub calendar: Calendar,
    pub clauses: Vec<TPClause>,
    /// Object constants: everything occurring in the clauses plus any added
    /// through [`PTProgram::with_constants`].
    pub constants: BTreeSet<String>,
}

impl PTProgram {
    pub fn new(calendar: Calendar, clauses: Vec<TPClause>) -> Self {
        let constants = occurring_constants(&clauses);
        PTProgram { calendar, clauses, constants }
    }

    pub fn empty(calendar: Calendar) -> Self {
        Self::new(calendar, Vec::new())
    }

    /// Extends the object universe used by grounding.
    pub fn with_constants<I, S>(mut self, constants: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.constants.extend(constants.into_iter().map(Into::into));
        self
    }

    /// All structural and annotation diagnostics (errors and warnings).
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut arity: BTreeMap<&str, (usize, SourceSpan)> = BTreeMap::new();
        for clause in &self.clauses {
            for atom in clause.atoms() {
                match arity.get(atom.predicate.as_str()) {
                    Some((n, first)) if *n != atom.args.len() => out.push(Diagnostic::error(
                        DiagnosticKind::ArityMismatch,
                        atom.span,
                        format!(
                            "`{}` used with {} arguments, but with {n} at {first}",
                            atom.predicate,
                            atom.args.len()
                        ),
                    )),
                    Some(_) => {}
                    None => {
                        arity.insert(&atom.predicate, (atom.args.len(), atom.span));
                    }
                }
                if let TimeTerm::Point(t) = atom.time {
                    if !self.calendar.contains(t) {
                        out.push(Diagnostic::error(
                            DiagnosticKind::TimePointOutsideCalendar,
                            atom.span,
                            format!("time point {t} of `{atom}` is outside calendar {}", self.calendar),
                        ));
                    }
                }
            }
            check_principal(&BasicFormula::single(clause.head.clone()), &clause.head_annot, &mut out);
            for b in &clause.body {
                check_principal(&b.formula, &b.annot, &mut out);
            }
            for a in clause.annotations() {
                out.extend(validate_annotation(a, &self.calendar));
            }
        }
        out
    }
}

fn check_principal(f: &BasicFormula, annot: &TPAnnotation, out: &mut Vec<Diagnostic>) {
    for atom in &f.atoms {
        if let TimeTerm::Var(v) = &atom.time {
            if v != annot.principal() {
                out.push(Diagnostic::error(
                    DiagnosticKind::TemporalVariableMismatch,
                    atom.span,
                    format!(
                        "`{atom}` uses temporal variable {v} but its annotation binds {}",
                        annot.principal()
                    ),
                ));
            }
        }
    }
}

fn occurring_constants(clauses: &[TPClause]) -> BTreeSet<String> {
    clauses
        .iter()
        .flat_map(TPClause::atoms)
        .flat_map(|a| a.args.iter())
        .filter_map(|t| match t {
            ObjTerm::Const(c) => Some(c.clone()),
            ObjTerm::Var(_) => None,
        })
        .collect()
}
