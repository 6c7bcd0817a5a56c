use std::collections::HashMap;

use crate::model::TAtom;

use super::PProgram;

/// The ground atoms of a p-program in canonical order. An atom's index is
/// its bit position in a world.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HerbrandBase {
    atoms: Vec<TAtom>,
    index: HashMap<TAtom, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("Herbrand base has {size} atoms, above the limit of {cap}")]
pub struct BaseTooLarge {
    pub size: usize,
    pub cap: usize,
}

impl HerbrandBase {
    /// Sorts and deduplicates `atoms`. Panics on atoms that are not ground.
    pub fn new(atoms: impl IntoIterator<Item = TAtom>) -> Self {
        let mut atoms: Vec<TAtom> = atoms
            .into_iter()
            .map(|mut a| {
                assert!(a.is_ground(), "Herbrand base atoms must be ground: {a}");
                a.span = Default::default();
                a
            })
            .collect();
        atoms.sort();
        atoms.dedup();
        let index = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        HerbrandBase { atoms, index }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[TAtom] {
        &self.atoms
    }

    pub fn get(&self, i: usize) -> Option<&TAtom> {
        self.atoms.get(i)
    }

    pub fn index_of(&self, atom: &TAtom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn contains(&self, atom: &TAtom) -> bool {
        self.index.contains_key(atom)
    }

    /// This base plus `more`, re-sorted.
    pub fn extended(&self, more: impl IntoIterator<Item = TAtom>) -> HerbrandBase {
        HerbrandBase::new(self.atoms.iter().cloned().chain(more))
    }
}

/// The base of `pp`, refused when larger than `cap`.
pub fn herbrand_base(pp: &PProgram, cap: usize) -> Result<HerbrandBase, BaseTooLarge> {
    if pp.base.len() > cap {
        return Err(BaseTooLarge { size: pp.base.len(), cap });
    }
    Ok(pp.base.clone())
}
