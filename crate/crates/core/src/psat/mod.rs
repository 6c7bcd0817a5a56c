//! Possible-world semantics: satisfaction checking, interval PSAT by branch
//! search plus linear programming, tightening, entailment and
//! maximum-entropy model selection.
//!
//! A p-clause `H : [a,b] ← F1 : [a1,b1] ∧ ...` is satisfied by a world
//! distribution when the head mass lies in `[a,b]` or some body mass lies
//! outside its interval. Each clause therefore contributes one of several
//! linear alternatives ([`BranchChoice`]); a program is consistent when
//! some combination of alternatives has a feasible LP over the world
//! probabilities. Strict violations `mass < a` are closed off as
//! `mass <= a - ε`.

mod maxent;
mod search;
pub mod simplex;
mod world;

use num_traits::{One, Signed, Zero};

use crate::ground::BaseTooLarge;
use crate::prob::{ratio, Prob};

pub use maxent::{max_entropy_model, MaxEntModel};
pub use search::{check_consistency, entails, tighten, BranchChoice, Consistency, EntailPoint, Entailment, Tightening, Verdict};
pub use world::{
    formula_mass, ki_satisfies, ki_satisfies_tp, world_satisfies, DistributionError, World, WorldDistribution, MAX_WORLD_BITS,
};

/// Hard ceiling on `max_world_atoms`: `2^24` LP columns.
pub const MAX_SUPPORTED_WORLD_ATOMS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LpMode {
    /// Rational simplex; results are exact.
    #[default]
    Exact,
    /// `f64` simplex with tolerance [`simplex::FLOAT_TOLERANCE`]. Witnesses
    /// are re-derived exactly.
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Margin realizing strict violation of a body interval.
    pub epsilon: Prob,
    pub max_world_atoms: usize,
    pub lp_mode: LpMode,
    /// Sweep limit of the entropy maximizer.
    pub max_sweeps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { epsilon: ratio(1, 1_000_000), max_world_atoms: 16, lp_mode: LpMode::Exact, max_sweeps: 100_000 }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), PsatError> {
        if !self.epsilon.is_positive() || self.epsilon >= Prob::one() {
            return Err(PsatError::InvalidOptions(format!("epsilon must lie in (0,1), got {}", self.epsilon)));
        }
        if self.max_world_atoms == 0 || self.max_world_atoms > MAX_SUPPORTED_WORLD_ATOMS {
            return Err(PsatError::InvalidOptions(format!(
                "max_world_atoms must lie in 1..={MAX_SUPPORTED_WORLD_ATOMS}, got {}",
                self.max_world_atoms
            )));
        }
        if self.max_sweeps == 0 {
            return Err(PsatError::InvalidOptions("max_sweeps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PsatError {
    #[error(transparent)]
    BaseTooLarge(#[from] BaseTooLarge),
    #[error("atom `{0}` is not in the Herbrand base")]
    AtomNotInBase(String),
    #[error("the program has no model")]
    InconsistentProgram,
    #[error("floating point LP failed: {0}")]
    LpNumericalFailure(String),
    #[error("entropy maximization did not converge within {0} sweeps")]
    NonConvergence(usize),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
}

/// Clamps into `[0,1]`.
pub(crate) fn clamp_unit(x: Prob) -> Prob {
    if x.is_negative() {
        Prob::zero()
    } else if x > Prob::one() {
        Prob::one()
    } else {
        x
    }
}

#[cfg(test)]
mod tests;
