use crate::model::{BasicFormula, Calendar};

/// A basic formula whose annotation is looked up by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledFormula {
    pub formula: BasicFormula,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonClause {
    pub head: LabeledFormula,
    pub body: Vec<LabeledFormula>,
}

/// A p-program without annotations, shared by every time slice of an
/// evolution profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub calendar: Calendar,
    pub clauses: Vec<SkeletonClause>,
}
