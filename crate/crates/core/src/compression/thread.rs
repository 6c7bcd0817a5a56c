use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::ground::HerbrandBase;
use crate::model::{Calendar, ObjTerm, TAtom, TimePoint, TimeTerm};
use crate::prob::Prob;
use crate::psat::{World, WorldDistribution};

use super::CompressionError;

/// A t-atom with its time position removed: `r(d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompressedAtom {
    pub predicate: String,
    pub args: Vec<ObjTerm>,
}

impl CompressedAtom {
    pub fn new(predicate: &str, args: &[&str]) -> Self {
        CompressedAtom { predicate: predicate.into(), args: args.iter().map(|a| ObjTerm::Const(a.to_string())).collect() }
    }

    pub fn of(atom: &TAtom) -> Self {
        CompressedAtom { predicate: atom.predicate.clone(), args: atom.args.clone() }
    }

    pub fn at(&self, t: TimePoint) -> TAtom {
        TAtom::new(self.predicate.clone(), self.args.clone(), TimeTerm::Point(t))
    }
}

impl fmt::Display for CompressedAtom {
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
        Ok(())
    }
}

/// The distinct timeless atoms of a base, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedBase {
    atoms: Vec<CompressedAtom>,
}

impl CompressedBase {
    pub fn new(atoms: impl IntoIterator<Item = CompressedAtom>) -> Self {
        let set: BTreeSet<_> = atoms.into_iter().collect();
        CompressedBase { atoms: set.into_iter().collect() }
    }

    pub fn of(base: &HerbrandBase) -> Self {
        Self::new(base.atoms().iter().map(CompressedAtom::of))
    }

    pub fn atoms(&self) -> &[CompressedAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &CompressedAtom) -> Option<usize> {
        self.atoms.binary_search(atom).ok()
    }

    /// `{r(d)@t | r(d) in self, t in cal}`.
    pub fn time_expanded(&self, cal: &Calendar) -> HerbrandBase {
        HerbrandBase::new(self.atoms.iter().flat_map(|a| cal.points().map(move |t| a.at(t))))
    }
}

/// A world in compressed form: each timeless atom maps to the time points
/// at which it holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Thread {
    sets: BTreeMap<CompressedAtom, BTreeSet<TimePoint>>,
}

impl Thread {
    /// The thread mapping every atom of `domain` to the empty set.
    pub fn empty(domain: &CompressedBase) -> Self {
        Thread { sets: domain.atoms().iter().map(|a| (a.clone(), BTreeSet::new())).collect() }
    }

    pub fn from_sets(sets: impl IntoIterator<Item = (CompressedAtom, BTreeSet<TimePoint>)>) -> Self {
        Thread { sets: sets.into_iter().collect() }
    }

    /// `th(r(d))`; empty for atoms outside the domain.
    pub fn times(&self, atom: &CompressedAtom) -> BTreeSet<TimePoint> {
        self.sets.get(atom).cloned().unwrap_or_default()
    }

    pub fn holds_at(&self, atom: &CompressedAtom, t: TimePoint) -> bool {
        self.sets.get(atom).is_some_and(|s| s.contains(&t))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CompressedAtom, &BTreeSet<TimePoint>)> {
        self.sets.iter()
    }

    /// All `2^(|domain|·|cal|)` threads.
    pub fn all<'a>(domain: &'a CompressedBase, cal: &'a Calendar) -> impl Iterator<Item = Thread> + 'a {
        let points: Vec<TimePoint> = cal.points().collect();
        let width = domain.len() * points.len();
        assert!(width < 64, "too many threads to enumerate");
        (0..1u64 << width).map(move |bits| {
            let sets = domain.atoms().iter().enumerate().map(|(i, a)| {
                let times = points.iter().enumerate().filter(|(j, _)| bits >> (i * points.len() + j) & 1 == 1).map(|(_, &t)| t);
                (a.clone(), times.collect())
            });
            Thread::from_sets(sets)
        })
    }
}

/// Reads a world off as a thread over the compressed base.
pub fn compress(w: &World, base: &HerbrandBase) -> Thread {
    let mut th = Thread::empty(&CompressedBase::of(base));
    for i in w.true_indices() {
        let atom = &base.atoms()[i];
        let t = atom.time_point().expect("base atoms are ground");
        th.sets.entry(CompressedAtom::of(atom)).or_default().insert(t);
    }
    th
}

/// The world in which `r(d)@t` holds exactly when `t ∈ th(r(d))`.
pub fn flatten(th: &Thread, base: &HerbrandBase, cal: &Calendar) -> Result<World, CompressionError> {
    let mut w = World::empty(base.len());
    for (atom, times) in &th.sets {
        for &t in times {
            if !cal.contains(t) {
                return Err(CompressionError::TimePointOutsideCalendar(t));
            }
            let ta = atom.at(t);
            let i = base.index_of(&ta).ok_or_else(|| CompressionError::AtomNotInBase(ta.to_string()))?;
            w.set(i, true);
        }
    }
    Ok(w)
}

/// A probability mass function over threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadDistribution {
    mass: BTreeMap<Thread, Prob>,
}

impl ThreadDistribution {
    pub fn new(entries: impl IntoIterator<Item = (Thread, Prob)>) -> Result<Self, CompressionError> {
        let mut mass: BTreeMap<Thread, Prob> = BTreeMap::new();
        let mut total = Prob::zero();
        for (th, p) in entries {
            if p.is_negative() {
                return Err(CompressionError::InvalidProfile("negative thread probability".into()));
            }
            total += &p;
            if !p.is_zero() {
                *mass.entry(th).or_insert_with(Prob::zero) += p;
            }
        }
        if !total.is_one() {
            return Err(CompressionError::InvalidProfile(format!("thread probabilities sum to {total}")));
        }
        Ok(ThreadDistribution { mass })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Thread, &Prob)> {
        self.mass.iter()
    }
}

/// The distribution over threads induced by a world distribution.
pub fn compress_distribution(ki: &WorldDistribution, base: &HerbrandBase) -> ThreadDistribution {
    ThreadDistribution::new(ki.iter().map(|(w, p)| (compress(w, base), p.clone()))).expect("compression preserves mass")
}

/// `Σ kt(th)` over the threads with `t ∈ th(atom)`.
pub fn thread_prob(kt: &ThreadDistribution, atom: &CompressedAtom, t: TimePoint) -> Prob {
    kt.iter().filter(|(th, _)| th.holds_at(atom, t)).map(|(_, p)| p).sum()
}
