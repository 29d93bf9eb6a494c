use alloc::string::String;

use crate::model::ItemId;
use crate::rational::Rational;

/// Errors reported by the solvers.
///
/// Every operation is a pure function; errors describe why the input could
/// not be processed rather than any internal failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The instance or uncertainty set violates a structural invariant.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    /// A cost entry is missing for an item.
    #[error("invalid instance: missing cost for item {0}")]
    MissingCost(ItemId),
    /// A requested selection, leader solution or capacity is infeasible.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// The leader solution leaves the follower too few items.
    #[error("infeasible leader solution: follower needs {needed} items but only {available} are available")]
    InfeasibleLeader { needed: usize, available: usize },
    /// The operation does not apply to this instance shape.
    #[error("wrong variant: {0}")]
    WrongVariant(String),
    /// A documented precondition of the algorithm is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An oracle or enumeration would exceed its configured budget.
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u128 },
}

impl Error {
    pub(crate) fn range(what: &str, value: &Rational) -> Self {
        Error::Infeasible(alloc::format!("{what} {value} is out of range"))
    }
}

pub type Result<T> = core::result::Result<T, Error>;
