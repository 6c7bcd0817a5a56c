use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::ground::{HerbrandBase, PProgram};
use crate::model::{BasicFormula, Connective, PTProgram, TAtom};
use crate::prob::{to_f64, Prob};

use super::PsatError;

/// Largest base a [`World`] can index.
pub const MAX_WORLD_BITS: usize = 64;

/// A Herbrand interpretation: bit `i` is the truth value of base atom `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    bits: u64,
    len: u8,
}

impl World {
    /// The world with every atom false.
    pub fn empty(len: usize) -> Self {
        assert!(len <= MAX_WORLD_BITS, "a world holds at most {MAX_WORLD_BITS} atoms");
        World { bits: 0, len: len as u8 }
    }

    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_WORLD_BITS, "a world holds at most {MAX_WORLD_BITS} atoms");
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        assert_eq!(bits & !mask, 0, "bits beyond the world length");
        World { bits, len: len as u8 }
    }

    /// The world over `base` in which exactly `atoms` are true.
    pub fn from_atoms<'a>(base: &HerbrandBase, atoms: impl IntoIterator<Item = &'a TAtom>) -> Result<Self, PsatError> {
        let mut w = World::empty(base.len());
        for a in atoms {
            let i = base.index_of(a).ok_or_else(|| PsatError::AtomNotInBase(a.to_string()))?;
            w.set(i, true);
        }
        Ok(w)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len(), "bit {i} outside a world of {} atoms", self.len);
        self.bits >> i & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len(), "bit {i} outside a world of {} atoms", self.len);
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn true_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.get(i))
    }

    pub fn true_atoms<'b>(&self, base: &'b HerbrandBase) -> Vec<&'b TAtom> {
        self.true_indices().map(|i| &base.atoms()[i]).collect()
    }

    /// All `2^len` worlds in bit order.
    pub fn all(len: usize) -> impl Iterator<Item = World> {
        assert!(len < MAX_WORLD_BITS, "cannot enumerate 2^{len} worlds");
        (0..1u64 << len).map(move |bits| World { bits, len: len as u8 })
    }
}

impl fmt::Debug for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "World(")?;
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DistributionError {
    #[error("negative world probability")]
    Negative,
    #[error("world probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("worlds of different lengths")]
    MixedLengths,
}

/// A probability mass function over worlds. Absent worlds have mass 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldDistribution {
    len: usize,
    mass: BTreeMap<World, Prob>,
}

impl WorldDistribution {
    /// Validates non-negativity and exact normalization. Zero entries are
    /// dropped; repeated worlds accumulate.
    pub fn new(len: usize, entries: impl IntoIterator<Item = (World, Prob)>) -> Result<Self, DistributionError> {
        let mut mass: BTreeMap<World, Prob> = BTreeMap::new();
        let mut total = Prob::zero();
        for (w, p) in entries {
            if w.len() != len {
                return Err(DistributionError::MixedLengths);
            }
            if p.is_negative() {
                return Err(DistributionError::Negative);
            }
            total += &p;
            if !p.is_zero() {
                *mass.entry(w).or_insert_with(Prob::zero) += p;
            }
        }
        if !total.is_one() {
            return Err(DistributionError::NotNormalized(total.to_string()));
        }
        Ok(WorldDistribution { len, mass })
    }

    pub fn point(w: World) -> Self {
        WorldDistribution { len: w.len(), mass: BTreeMap::from([(w, Prob::one())]) }
    }

    /// Equal mass on all `2^len` worlds.
    pub fn uniform(len: usize) -> Self {
        let p = Prob::new(1.into(), num_bigint::BigInt::one() << len);
        WorldDistribution { len, mass: World::all(len).map(|w| (w, p.clone())).collect() }
    }

    /// Number of atoms of the worlds.
    pub fn atoms(&self) -> usize {
        self.len
    }

    pub fn get(&self, w: &World) -> Prob {
        self.mass.get(w).cloned().unwrap_or_else(Prob::zero)
    }

    /// Worlds with non-zero mass in world order.
    pub fn iter(&self) -> impl Iterator<Item = (&World, &Prob)> {
        self.mass.iter()
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.mass.values().map(to_f64).filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
    }
}

/// Bit masks of a ground formula over a base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mask {
    /// Every bit set (single atoms and conjunctions).
    All(u64),
    /// Some bit set.
    Any(u64),
}

impl Mask {
    pub fn of(f: &BasicFormula, base: &HerbrandBase) -> Result<Mask, PsatError> {
        let mut bits = 0u64;
        for a in &f.atoms {
            let i = base.index_of(a).ok_or_else(|| PsatError::AtomNotInBase(a.to_string()))?;
            bits |= 1 << i;
        }
        Ok(match f.connective {
            Connective::Or => Mask::Any(bits),
            Connective::Single | Connective::And => Mask::All(bits),
        })
    }

    pub fn holds(self, bits: u64) -> bool {
        match self {
            Mask::All(m) => bits & m == m,
            Mask::Any(m) => bits & m != 0,
        }
    }
}

/// Truth of a ground formula in a world over `base`.
pub fn world_satisfies(w: &World, f: &BasicFormula, base: &HerbrandBase) -> Result<bool, PsatError> {
    Ok(Mask::of(f, base)?.holds(w.bits()))
}

/// `Σ ki(w)` over the worlds satisfying `f`.
pub fn formula_mass(ki: &WorldDistribution, f: &BasicFormula, base: &HerbrandBase) -> Result<Prob, PsatError> {
    let mask = Mask::of(f, base)?;
    Ok(ki.iter().filter(|(w, _)| mask.holds(w.bits())).map(|(_, p)| p).sum())
}

/// Whether `ki` is a model of the p-program: every clause has its head mass
/// inside the head interval or some body literal mass outside its interval.
pub fn ki_satisfies(pp: &PProgram, ki: &WorldDistribution) -> Result<bool, PsatError> {
    for c in &pp.clauses {
        let head = formula_mass(ki, &BasicFormula::single(c.head.clone()), &pp.base)?;
        if c.head_iv.contains(&head) {
            continue;
        }
        let mut body_violated = false;
        for lit in &c.body {
            if !lit.interval.contains(&formula_mass(ki, &lit.formula, &pp.base)?) {
                body_violated = true;
                break;
            }
        }
        if !body_violated {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Satisfaction of an object-ground PT-program read directly on its
/// tp-clauses: a clause holds when its head annotation holds at every head
/// solution point, or some body annotation fails at one of its points.
pub fn ki_satisfies_tp(gp: &PTProgram, base: &HerbrandBase, ki: &WorldDistribution) -> Result<bool, PsatError> {
    let holds = |f: &BasicFormula, a: &crate::model::TPAnnotation| -> Result<bool, PsatError> {
        let sol = a.solve(&gp.calendar).map_err(|e| PsatError::InvalidProgram(e.to_string()))?;
        for &t in &sol {
            let ft = f.substitute_time(t);
            let mass = match ft.atoms.iter().all(|x| base.contains(x)) {
                true => formula_mass(ki, &ft, base)?,
                false => return Err(PsatError::AtomNotInBase(ft.to_string())),
            };
            if !a.interval_in(&sol, t).contains(&mass) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    for c in &gp.clauses {
        if holds(&BasicFormula::single(c.head.clone()), &c.head_annot)? {
            continue;
        }
        let mut body_holds = true;
        for b in &c.body {
            if !holds(&b.formula, &b.annot)? {
                body_holds = false;
                break;
            }
        }
        if body_holds {
            return Ok(false);
        }
    }
    Ok(true)
}
