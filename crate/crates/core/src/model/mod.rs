//! Domain vocabulary: calendars, t-atoms, temporal constraints, weight
//! functions, tp-annotations, tp-clauses and PT-programs.

mod annotation;
mod constraint;
mod diagnostic;
mod program;
mod term;
mod time;
mod weight;

pub use annotation::{validate_annotation, TPAnnotation};
pub use constraint::{solve_constraint, CmpOp, ConstraintError, ConstraintExpr, TemporalConstraint, TimeExpr};
pub use diagnostic::{Diagnostic, DiagnosticKind, Severity, SourceSpan};
pub use program::{AnnotatedFormula, PTProgram, TPClause};
pub use term::{substitute_time, BasicFormula, Connective, ObjTerm, TAtom, TimeTerm};
pub use time::{Calendar, CalendarError, TimePoint, MAX_CALENDAR_POINTS};
pub use weight::{weight_at, WeightFunction};
