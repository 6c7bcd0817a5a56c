//! Temporal constraints and their solution sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::diagnostic::SourceSpan;
use super::time::{Calendar, TimePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Le,
    Lt,
    Eq,
    Ne,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn apply(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }
}

/// Integer arithmetic over temporal variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeExpr {
    Int(i64),
    Var(String),
    Add(Box<TimeExpr>, Box<TimeExpr>),
    Sub(Box<TimeExpr>, Box<TimeExpr>),
    Mul(Box<TimeExpr>, Box<TimeExpr>),
    Neg(Box<TimeExpr>),
}

impl TimeExpr {
    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            TimeExpr::Int(_) => {}
            TimeExpr::Var(v) => {
                out.insert(v);
            }
            TimeExpr::Add(a, b) | TimeExpr::Sub(a, b) | TimeExpr::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            TimeExpr::Neg(a) => a.collect_vars(out),
        }
    }

    fn substitute(&self, keep: &str, env: &BTreeMap<String, TimePoint>) -> TimeExpr {
        match self {
            TimeExpr::Var(v) if v != keep => match env.get(v) {
                Some(t) => TimeExpr::Int(*t),
                None => self.clone(),
            },
            TimeExpr::Int(_) | TimeExpr::Var(_) => self.clone(),
            TimeExpr::Add(a, b) => TimeExpr::Add(Box::new(a.substitute(keep, env)), Box::new(b.substitute(keep, env))),
            TimeExpr::Sub(a, b) => TimeExpr::Sub(Box::new(a.substitute(keep, env)), Box::new(b.substitute(keep, env))),
            TimeExpr::Mul(a, b) => TimeExpr::Mul(Box::new(a.substitute(keep, env)), Box::new(b.substitute(keep, env))),
            TimeExpr::Neg(a) => TimeExpr::Neg(Box::new(a.substitute(keep, env))),
        }
    }

    pub fn eval(&self, principal: &str, t: TimePoint) -> Result<i64, ConstraintError> {
        let overflow = || ConstraintError::Overflow;
        Ok(match self {
            TimeExpr::Int(n) => *n,
            TimeExpr::Var(v) if v == principal => t,
            TimeExpr::Var(v) => return Err(ConstraintError::NonNormal(v.clone())),
            TimeExpr::Add(a, b) => a.eval(principal, t)?.checked_add(b.eval(principal, t)?).ok_or_else(overflow)?,
            TimeExpr::Sub(a, b) => a.eval(principal, t)?.checked_sub(b.eval(principal, t)?).ok_or_else(overflow)?,
            TimeExpr::Mul(a, b) => a.eval(principal, t)?.checked_mul(b.eval(principal, t)?).ok_or_else(overflow)?,
            TimeExpr::Neg(a) => a.eval(principal, t)?.checked_neg().ok_or_else(overflow)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            TimeExpr::Add(..) | TimeExpr::Sub(..) => 1,
            TimeExpr::Mul(..) => 2,
            TimeExpr::Neg(_) => 3,
            TimeExpr::Int(n) if *n < 0 => 3,
            TimeExpr::Int(_) | TimeExpr::Var(_) => 4,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for TimeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeExpr::Int(n) => write!(f, "{n}"),
            TimeExpr::Var(v) => f.write_str(v),
            // Binary operators are left-associative: a right operand of
            // equal precedence needs parentheses.
            TimeExpr::Add(a, b) => {
                a.fmt_operand(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_operand(f, 2)
            }
            TimeExpr::Sub(a, b) => {
                a.fmt_operand(f, 1)?;
                f.write_str(" - ")?;
                b.fmt_operand(f, 2)
            }
            TimeExpr::Mul(a, b) => {
                a.fmt_operand(f, 2)?;
                f.write_str(" * ")?;
                b.fmt_operand(f, 3)
            }
            TimeExpr::Neg(a) => {
                f.write_str("-")?;
                a.fmt_operand(f, 4)
            }
        }
    }
}

/// Boolean structure of a constraint. Every leaf compares the principal
/// variable, which is stored once on [`TemporalConstraint`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintExpr {
    Cmp(CmpOp, TimeExpr),
    /// `y:lo~hi`, shorthand for `y >= lo and y <= hi`.
    Range(TimeExpr, TimeExpr),
    And(Box<ConstraintExpr>, Box<ConstraintExpr>),
    Or(Box<ConstraintExpr>, Box<ConstraintExpr>),
    Not(Box<ConstraintExpr>),
}

impl ConstraintExpr {
    pub fn and(a: ConstraintExpr, b: ConstraintExpr) -> Self {
        ConstraintExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ConstraintExpr, b: ConstraintExpr) -> Self {
        ConstraintExpr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: ConstraintExpr) -> Self {
        ConstraintExpr::Not(Box::new(a))
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            ConstraintExpr::Cmp(_, e) => e.collect_vars(out),
            ConstraintExpr::Range(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ConstraintExpr::And(a, b) | ConstraintExpr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ConstraintExpr::Not(a) => a.collect_vars(out),
        }
    }

    fn substitute(&self, keep: &str, env: &BTreeMap<String, TimePoint>) -> ConstraintExpr {
        match self {
            ConstraintExpr::Cmp(op, e) => ConstraintExpr::Cmp(*op, e.substitute(keep, env)),
            ConstraintExpr::Range(a, b) => ConstraintExpr::Range(a.substitute(keep, env), b.substitute(keep, env)),
            ConstraintExpr::And(a, b) => ConstraintExpr::and(a.substitute(keep, env), b.substitute(keep, env)),
            ConstraintExpr::Or(a, b) => ConstraintExpr::or(a.substitute(keep, env), b.substitute(keep, env)),
            ConstraintExpr::Not(a) => ConstraintExpr::not(a.substitute(keep, env)),
        }
    }

    pub fn eval(&self, principal: &str, t: TimePoint) -> Result<bool, ConstraintError> {
        Ok(match self {
            ConstraintExpr::Cmp(op, e) => op.apply(t, e.eval(principal, t)?),
            ConstraintExpr::Range(lo, hi) => lo.eval(principal, t)? <= t && t <= hi.eval(principal, t)?,
            // Both sides are evaluated so that a non-normal leaf is always
            // reported, whatever the short-circuit outcome.
            ConstraintExpr::And(a, b) => {
                let (x, y) = (a.eval(principal, t)?, b.eval(principal, t)?);
                x && y
            }
            ConstraintExpr::Or(a, b) => {
                let (x, y) = (a.eval(principal, t)?, b.eval(principal, t)?);
                x || y
            }
            ConstraintExpr::Not(a) => !a.eval(principal, t)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            ConstraintExpr::Or(..) => 1,
            ConstraintExpr::And(..) => 2,
            ConstraintExpr::Not(_) => 3,
            ConstraintExpr::Cmp(..) | ConstraintExpr::Range(..) => 4,
        }
    }

    fn fmt_with(&self, principal: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let operand = |e: &ConstraintExpr, min: u8, f: &mut fmt::Formatter<'_>| {
            if e.precedence() < min {
                f.write_str("(")?;
                e.fmt_with(principal, f)?;
                f.write_str(")")
            } else {
                e.fmt_with(principal, f)
            }
        };
        match self {
            ConstraintExpr::Cmp(op, e) => write!(f, "{principal} {} {e}", op.symbol()),
            ConstraintExpr::Range(lo, hi) => {
                write!(f, "{principal}:")?;
                lo.fmt_operand(f, 1)?;
                f.write_str("~")?;
                hi.fmt_operand(f, 1)
            }
            ConstraintExpr::And(a, b) => {
                operand(a, 2, f)?;
                f.write_str(" and ")?;
                operand(b, 3, f)
            }
            ConstraintExpr::Or(a, b) => {
                operand(a, 1, f)?;
                f.write_str(" or ")?;
                operand(b, 2, f)
            }
            ConstraintExpr::Not(a) => {
                f.write_str("not ")?;
                operand(a, 3, f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("constraint is not normal: variable `{0}` is unbound")]
    NonNormal(String),
    #[error("integer overflow while evaluating a temporal term")]
    Overflow,
}

/// `c(y, y1, ..., yk)` with principal variable `y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TemporalConstraint {
    pub principal: String,
    pub expr: ConstraintExpr,
    pub span: SourceSpan,
}

impl TemporalConstraint {
    pub fn new(principal: impl Into<String>, expr: ConstraintExpr) -> Self {
        TemporalConstraint { principal: principal.into(), expr, span: SourceSpan::default() }
    }

    /// `y = t`.
    pub fn at(principal: impl Into<String>, t: TimePoint) -> Self {
        Self::new(principal, ConstraintExpr::Cmp(CmpOp::Eq, TimeExpr::Int(t)))
    }

    /// `y:lo~hi`.
    pub fn between(principal: impl Into<String>, lo: TimePoint, hi: TimePoint) -> Self {
        Self::new(principal, ConstraintExpr::Range(TimeExpr::Int(lo), TimeExpr::Int(hi)))
    }

    /// Variables other than the principal one.
    pub fn independent_vars(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        self.expr.collect_vars(&mut vars);
        vars.into_iter().filter(|v| *v != self.principal).map(str::to_string).collect()
    }

    pub fn is_normal(&self) -> bool {
        self.independent_vars().is_empty()
    }

    /// Binds independent variables; the principal variable is never touched.
    pub fn substitute(&self, env: &BTreeMap<String, TimePoint>) -> TemporalConstraint {
        TemporalConstraint { expr: self.expr.substitute(&self.principal, env), ..self.clone() }
    }

    pub fn holds_at(&self, t: TimePoint) -> Result<bool, ConstraintError> {
        self.expr.eval(&self.principal, t)
    }

    pub fn solve(&self, cal: &Calendar) -> Result<Vec<TimePoint>, ConstraintError> {
        solve_constraint(self, cal)
    }
}

impl fmt::Display for TemporalConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt_with(&self.principal, f)
    }
}

/// `sol(C)`: the calendar points satisfying `c`, in calendar order.
pub fn solve_constraint(c: &TemporalConstraint, cal: &Calendar) -> Result<Vec<TimePoint>, ConstraintError> {
    if let Some(v) = c.independent_vars().into_iter().next() {
        return Err(ConstraintError::NonNormal(v));
    }
    let mut sol = Vec::new();
    for t in cal.points() {
        if c.holds_at(t)? {
            sol.push(t);
        }
    }
    Ok(sol)
}
