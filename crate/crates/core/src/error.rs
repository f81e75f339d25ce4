use thiserror::Error;

use crate::model::State;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("history window holds {got} states but the system needs {needed}")]
    InsufficientHistory { got: usize, needed: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{what} has {size} elements, over the enumeration budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        size: u128,
        budget: u64,
    },

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("node {} has several best responses at {state}", node + 1)]
    NonUniqueBestResponse { node: usize, state: State },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
