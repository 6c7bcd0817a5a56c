use num_traits::{One, Zero};

use super::constraint::{solve_constraint, ConstraintError, TemporalConstraint};
use super::time::{Calendar, TimePoint};
use crate::prob::Prob;

/// A probabilistic weight function over the solution set of a constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightFunction {
    /// One value per solution point, in time order.
    List(Vec<Prob>),
    /// The constant 1 on a singleton solution set (`#`).
    Sharp,
    /// `1/|sol(C)|` at every solution point.
    Uniform,
}

impl WeightFunction {
    /// Weight at `t` given the (already solved) solution set.
    pub fn value_in(&self, sol: &[TimePoint], t: TimePoint) -> Prob {
        let Ok(rank) = sol.binary_search(&t) else {
            return Prob::zero();
        };
        match self {
            WeightFunction::List(values) => values.get(rank).cloned().unwrap_or_else(Prob::zero),
            WeightFunction::Sharp => Prob::one(),
            WeightFunction::Uniform => Prob::new(1.into(), sol.len().into()),
        }
    }
}

/// `ω_C(t)`; zero outside `sol(C)`.
pub fn weight_at(
    w: &WeightFunction,
    c: &TemporalConstraint,
    cal: &Calendar,
    t: TimePoint,
) -> Result<Prob, ConstraintError> {
    let sol = solve_constraint(c, cal)?;
    Ok(w.value_in(&sol, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{parse_literal, ratio};

    fn list(values: &[&str]) -> WeightFunction {
        WeightFunction::List(values.iter().map(|v| parse_literal(v).unwrap()).collect())
    }

    #[test]
    fn list_weights_follow_solution_rank() {
        let cal = Calendar::range(1, 8).unwrap();
        let c = TemporalConstraint::between("Y", 3, 5);
        let w = list(&["0.25", "0.15", "0.1"]);
        assert_eq!(weight_at(&w, &c, &cal, 4).unwrap(), ratio(15, 100));
        assert_eq!(weight_at(&w, &c, &cal, 7).unwrap(), Prob::zero());
    }

    #[test]
    fn sharp_is_one_at_its_point() {
        let cal = Calendar::range(1, 8).unwrap();
        let c = TemporalConstraint::at("Y", 1);
        assert_eq!(weight_at(&WeightFunction::Sharp, &c, &cal, 1).unwrap(), Prob::one());
        assert_eq!(weight_at(&WeightFunction::Sharp, &c, &cal, 2).unwrap(), Prob::zero());
    }

    #[test]
    fn uniform_sums_to_one() {
        let cal = Calendar::range(1, 8).unwrap();
        let c = TemporalConstraint::between("Y", 2, 7);
        let total: Prob = cal.points().map(|t| weight_at(&WeightFunction::Uniform, &c, &cal, t).unwrap()).sum();
        assert_eq!(total, Prob::one());
        assert_eq!(weight_at(&WeightFunction::Uniform, &c, &cal, 1).unwrap(), Prob::zero());
    }
}
