use std::collections::BTreeMap;
use std::fmt;

use super::diagnostic::SourceSpan;
use super::time::TimePoint;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjTerm {
    Const(String),
    Var(String),
}

impl ObjTerm {
    pub fn is_ground(&self) -> bool {
        matches!(self, ObjTerm::Const(_))
    }
}

impl fmt::Display for ObjTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjTerm::Const(c) => f.write_str(c),
            ObjTerm::Var(v) => f.write_str(v),
        }
    }
}

/// The single temporal position of a t-atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeTerm {
    Point(TimePoint),
    Var(String),
}

impl fmt::Display for TimeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeTerm::Point(t) => write!(f, "{t}"),
            TimeTerm::Var(v) => f.write_str(v),
        }
    }
}

/// `pred(args)@time`.
///
/// The derived ordering is lexicographic on predicate, arguments, then
/// time; it is the canonical Herbrand base order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TAtom {
    pub predicate: String,
    pub args: Vec<ObjTerm>,
    pub time: TimeTerm,
    pub span: SourceSpan,
}

impl TAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<ObjTerm>, time: TimeTerm) -> Self {
        TAtom { predicate: predicate.into(), args, time, span: SourceSpan::default() }
    }

    /// Ground atom from constant names.
    pub fn ground(predicate: &str, args: &[&str], time: TimePoint) -> Self {
        TAtom::new(
            predicate,
            args.iter().map(|a| ObjTerm::Const(a.to_string())).collect(),
            TimeTerm::Point(time),
        )
    }

    pub fn is_object_ground(&self) -> bool {
        self.args.iter().all(ObjTerm::is_ground)
    }

    pub fn is_ground(&self) -> bool {
        self.is_object_ground() && matches!(self.time, TimeTerm::Point(_))
    }

    pub fn time_point(&self) -> Option<TimePoint> {
        match self.time {
            TimeTerm::Point(t) => Some(t),
            TimeTerm::Var(_) => None,
        }
    }

    pub fn at(&self, t: TimePoint) -> TAtom {
        TAtom { time: TimeTerm::Point(t), ..self.clone() }
    }

    pub fn object_vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|a| match a {
            ObjTerm::Var(v) => Some(v.as_str()),
            ObjTerm::Const(_) => None,
        })
    }

    pub fn substitute_objects(&self, subst: &BTreeMap<String, String>) -> TAtom {
        let args = self
            .args
            .iter()
            .map(|a| match a {
                ObjTerm::Var(v) => match subst.get(v) {
                    Some(c) => ObjTerm::Const(c.clone()),
                    None => a.clone(),
                },
                ObjTerm::Const(_) => a.clone(),
            })
            .collect();
        TAtom { args, ..self.clone() }
    }
}

impl fmt::Display for TAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        write!(f, "@{}", self.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    Single,
    And,
    Or,
}

/// A t-atom or a homogeneous conjunction/disjunction of t-atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasicFormula {
    pub connective: Connective,
    pub atoms: Vec<TAtom>,
    pub span: SourceSpan,
}

impl BasicFormula {
    pub fn single(atom: TAtom) -> Self {
        BasicFormula { connective: Connective::Single, span: atom.span, atoms: vec![atom] }
    }

    pub fn and(atoms: Vec<TAtom>) -> Self {
        Self::compound(Connective::And, atoms)
    }

    pub fn or(atoms: Vec<TAtom>) -> Self {
        Self::compound(Connective::Or, atoms)
    }

    fn compound(connective: Connective, atoms: Vec<TAtom>) -> Self {
        let connective = if atoms.len() == 1 { Connective::Single } else { connective };
        BasicFormula { connective, atoms, span: SourceSpan::default() }
    }

    pub fn is_ground(&self) -> bool {
        self.atoms.iter().all(TAtom::is_ground)
    }

    pub fn is_object_ground(&self) -> bool {
        self.atoms.iter().all(TAtom::is_object_ground)
    }

    /// Replaces every temporal variable by `t`; ground time positions stay.
    pub fn substitute_time(&self, t: TimePoint) -> BasicFormula {
        let atoms = self
            .atoms
            .iter()
            .map(|a| match a.time {
                TimeTerm::Var(_) => a.at(t),
                TimeTerm::Point(_) => a.clone(),
            })
            .collect();
        BasicFormula { atoms, ..self.clone() }
    }

    pub fn substitute_objects(&self, subst: &BTreeMap<String, String>) -> BasicFormula {
        BasicFormula {
            atoms: self.atoms.iter().map(|a| a.substitute_objects(subst)).collect(),
            ..self.clone()
        }
    }

    /// The temporal variables used by the atoms, in order of appearance.
    pub fn time_vars(&self) -> Vec<&str> {
        let mut vars: Vec<&str> = Vec::new();
        for a in &self.atoms {
            if let TimeTerm::Var(v) = &a.time {
                if !vars.contains(&v.as_str()) {
                    vars.push(v);
                }
            }
        }
        vars
    }
}

/// Replaces each atom's time position with `t`.
pub fn substitute_time(f: &BasicFormula, t: TimePoint) -> BasicFormula {
    f.substitute_time(t)
}

impl fmt::Display for BasicFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = match self.connective {
            Connective::Or => " or ",
            _ => " and ",
        };
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}
