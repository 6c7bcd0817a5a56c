//! Grounding of PT-programs and their unfolding into interval-annotated
//! p-programs.

mod base;
mod unfold;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use crate::model::{Connective, Diagnostic, ObjTerm, PTProgram, TAtom, TPClause, TimePoint};

pub use base::{herbrand_base, BaseTooLarge, HerbrandBase};
pub use unfold::{unfold, unfold_clause, BodyLiteral, PClause, PProgram};

/// Upper bound on the number of clause instances a grounding may produce.
pub const MAX_GROUND_INSTANCES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroundingMode {
    /// Every object variable over every constant.
    Full,
    /// Only instances whose body atoms can be produced by some head, plus
    /// those whose omission could change the models.
    #[default]
    Relevant,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroundError {
    #[error("clause at {span} has object variables but the program has no constants")]
    UniverseEmpty { span: crate::model::SourceSpan },
    #[error("grounding exceeds {MAX_GROUND_INSTANCES} clause instances")]
    TooManyInstances,
    #[error("ground program is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("clause `{0}` is not ground in its object terms")]
    NotGround(String),
    #[error("constraint `{0}` is not normal")]
    NonNormal(String),
    #[error(transparent)]
    Constraint(#[from] crate::model::ConstraintError),
}

/// `(predicate, object args)`: an atom with its time position dropped.
type Signature = (String, Vec<String>);

fn signature(atom: &TAtom) -> Option<Signature> {
    let args = atom
        .args
        .iter()
        .map(|a| match a {
            ObjTerm::Const(c) => Some(c.clone()),
            ObjTerm::Var(_) => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some((atom.predicate.clone(), args))
}

/// Grounds object variables over the program's constants and independent
/// temporal variables over the calendar.
///
/// Instances are ordered by source clause, then by their substitution.
pub fn ground_program(p: &PTProgram, mode: GroundingMode) -> Result<PTProgram, GroundError> {
    let substitutions = match mode {
        GroundingMode::Full => full_substitutions(p)?,
        GroundingMode::Relevant => relevant_substitutions(p)?,
    };
    let mut clauses = Vec::new();
    for (clause, substs) in p.clauses.iter().zip(substitutions) {
        for subst in substs {
            let named: BTreeMap<String, String> = clause.object_vars().into_iter().zip(subst).collect();
            let instance = clause.substitute_objects(&named);
            ground_time_vars(&instance, p, &mut clauses)?;
        }
    }
    let gp = PTProgram { calendar: p.calendar, clauses, constants: p.constants.clone() };
    let errors: Vec<Diagnostic> = gp.validate().into_iter().filter(Diagnostic::is_error).collect();
    if errors.is_empty() {
        Ok(gp)
    } else {
        Err(GroundError::Invalid(errors))
    }
}

fn ground_time_vars(clause: &TPClause, p: &PTProgram, out: &mut Vec<TPClause>) -> Result<(), GroundError> {
    let vars: Vec<String> = clause.independent_time_vars().into_iter().collect();
    if vars.is_empty() {
        out.push(clause.clone());
        return Ok(());
    }
    let points: Vec<TimePoint> = p.calendar.points().collect();
    let mut idx = vec![0usize; vars.len()];
    loop {
        if out.len() >= MAX_GROUND_INSTANCES {
            return Err(GroundError::TooManyInstances);
        }
        let env: BTreeMap<String, TimePoint> = vars.iter().cloned().zip(idx.iter().map(|&i| points[i])).collect();
        let mut c = clause.clone();
        c.head_annot.constraint = c.head_annot.constraint.substitute(&env);
        for b in &mut c.body {
            b.annot.constraint = b.annot.constraint.substitute(&env);
        }
        out.push(c);
        // Odometer over calendar^k, last variable fastest.
        let mut k = vars.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < points.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn check_universe(p: &PTProgram) -> Result<(), GroundError> {
    if p.constants.is_empty() {
        if let Some(c) = p.clauses.iter().find(|c| !c.is_object_ground()) {
            return Err(GroundError::UniverseEmpty { span: c.span });
        }
    }
    Ok(())
}

fn full_substitutions(p: &PTProgram) -> Result<Vec<BTreeSet<Vec<String>>>, GroundError> {
    check_universe(p)?;
    let constants: Vec<&String> = p.constants.iter().collect();
    let mut total = 0usize;
    let mut out = Vec::new();
    for clause in &p.clauses {
        let n = clause.object_vars().len();
        let count = constants.len().checked_pow(n as u32).ok_or(GroundError::TooManyInstances)?;
        total = total.saturating_add(count);
        if total > MAX_GROUND_INSTANCES {
            return Err(GroundError::TooManyInstances);
        }
        let mut substs = BTreeSet::new();
        let mut idx = vec![0usize; n];
        'odometer: loop {
            substs.insert(idx.iter().map(|&i| constants[i].clone()).collect());
            let mut k = n;
            loop {
                if k == 0 {
                    break 'odometer;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < constants.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        out.push(substs);
    }
    Ok(out)
}

/// Fixpoint over time-free signatures: a clause instance is kept once every
/// body atom matches a signature produced by a kept head. Head-only
/// variables range over all constants.
fn relevant_substitutions(p: &PTProgram) -> Result<Vec<BTreeSet<Vec<String>>>, GroundError> {
    check_universe(p)?;
    let constants: Vec<String> = p.constants.iter().cloned().collect();
    let mut produced: BTreeSet<Signature> = BTreeSet::new();
    let mut out: Vec<BTreeSet<Vec<String>>> = vec![BTreeSet::new(); p.clauses.len()];
    let mut total = 0usize;
    loop {
        let mut changed = false;
        for (ci, clause) in p.clauses.iter().enumerate() {
            let vars = clause.object_vars();
            let body_atoms: Vec<&TAtom> = clause.body.iter().flat_map(|b| b.formula.atoms.iter()).collect();
            let mut found = Vec::new();
            match_body(&body_atoms, &produced, &mut BTreeMap::new(), &mut found);
            for binding in found {
                let free: Vec<&String> = vars.iter().filter(|v| !binding.contains_key(*v)).collect();
                if !free.is_empty() && constants.is_empty() {
                    return Err(GroundError::UniverseEmpty { span: clause.span });
                }
                let mut idx = vec![0usize; free.len()];
                'odometer: loop {
                    let mut full = binding.clone();
                    for (v, &i) in free.iter().zip(&idx) {
                        full.insert((*v).clone(), constants[i].clone());
                    }
                    let subst: Vec<String> = vars.iter().map(|v| full[v].clone()).collect();
                    if out[ci].insert(subst) {
                        total += 1;
                        if total > MAX_GROUND_INSTANCES {
                            return Err(GroundError::TooManyInstances);
                        }
                        let head = clause.head.substitute_objects(&full);
                        if produced.insert(signature(&head).expect("head is object-ground")) {
                            changed = true;
                        }
                    }
                    let mut k = free.len();
                    loop {
                        if k == 0 {
                            break 'odometer;
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < constants.len() {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
        }
        if !changed {
            keep_unsafe_drops(p, &constants, &mut out, total)?;
            return Ok(out);
        }
    }
}

/// Restores dropped instances whose omission could change the models.
///
/// Making every atom false whose signature no kept clause mentions leaves the
/// kept clauses untouched. A dropped instance is then satisfied outright when
/// one of its atomic or conjunctive body literals contains such an atom and
/// has a positive lower bound. Every other dropped instance is kept, until
/// nothing changes.
fn keep_unsafe_drops(
    p: &PTProgram,
    constants: &[String],
    out: &mut [BTreeSet<Vec<String>>],
    mut total: usize,
) -> Result<(), GroundError> {
    loop {
        let mut mentioned: BTreeSet<Signature> = BTreeSet::new();
        for (clause, substs) in p.clauses.iter().zip(out.iter()) {
            for subst in substs {
                let named: BTreeMap<String, String> = clause.object_vars().into_iter().zip(subst.iter().cloned()).collect();
                mentioned.extend(clause.substitute_objects(&named).atoms().filter_map(signature));
            }
        }
        let mut changed = false;
        for (ci, clause) in p.clauses.iter().enumerate() {
            let vars = clause.object_vars();
            let mut idx = vec![0usize; vars.len()];
            if !vars.is_empty() && constants.is_empty() {
                continue;
            }
            'odometer: loop {
                let subst: Vec<String> = idx.iter().map(|&i| constants[i].clone()).collect();
                if !out[ci].contains(&subst) {
                    let named: BTreeMap<String, String> = vars.iter().cloned().zip(subst.iter().cloned()).collect();
                    if !vacuous_when_absent(&clause.substitute_objects(&named), &mentioned, &p.calendar) {
                        out[ci].insert(subst);
                        total += 1;
                        if total > MAX_GROUND_INSTANCES {
                            return Err(GroundError::TooManyInstances);
                        }
                        changed = true;
                    }
                }
                let mut k = vars.len();
                loop {
                    if k == 0 {
                        break 'odometer;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < constants.len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Whether `clause` has a body literal whose mass is zero, and below its
/// lower bound, once all atoms outside `mentioned` are false.
fn vacuous_when_absent(clause: &TPClause, mentioned: &BTreeSet<Signature>, cal: &crate::model::Calendar) -> bool {
    clause.body.iter().any(|b| {
        if b.formula.connective == Connective::Or {
            return false;
        }
        let absent = b.formula.atoms.iter().any(|a| signature(a).is_some_and(|s| !mentioned.contains(&s)));
        if !absent || !b.annot.constraint.independent_vars().is_empty() {
            return false;
        }
        let Ok(sol) = b.annot.solve(cal) else { return false };
        sol.iter().any(|&t| b.annot.interval_in(&sol, t).lo().is_positive())
    })
}

fn match_body(
    atoms: &[&TAtom],
    produced: &BTreeSet<Signature>,
    binding: &mut BTreeMap<String, String>,
    found: &mut Vec<BTreeMap<String, String>>,
) {
    let Some((first, rest)) = atoms.split_first() else {
        found.push(binding.clone());
        return;
    };
    for (_, args) in produced.iter().filter(|(p, a)| *p == first.predicate && a.len() == first.args.len()) {
        let mut added = Vec::new();
        let ok = first.args.iter().zip(args).all(|(term, c)| match term {
            ObjTerm::Const(k) => k == c,
            ObjTerm::Var(v) => match binding.get(v) {
                Some(bound) => bound == c,
                None => {
                    binding.insert(v.clone(), c.clone());
                    added.push(v.clone());
                    true
                }
            },
        });
        if ok {
            match_body(rest, produced, binding, found);
        }
        for v in added {
            binding.remove(&v);
        }
    }
}
