use thiserror::Error;

/// Errors raised by instance construction, oracles and the algorithms built on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContractError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("agent {index} out of range for {n} agents")]
    AgentOutOfRange { index: usize, n: usize },
    #[error("agent {0} is not a member of the set")]
    NotMember(usize),
    #[error("set {0} has infinite payment and cannot be incentivized")]
    InfeasibleSet(String),
    #[error("{n} agents exceeds the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("ratio undefined: optimum at the small budget is zero")]
    UndefinedRatio,
}

impl ContractError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        ContractError::Input(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        ContractError::Precondition(msg.into())
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            ContractError::Input(_) => "input",
            ContractError::AgentOutOfRange { .. } => "agent-out-of-range",
            ContractError::NotMember(_) => "not-member",
            ContractError::InfeasibleSet(_) => "infeasible-set",
            ContractError::TooLarge { .. } => "too-large",
            ContractError::Precondition(_) => "precondition",
            ContractError::ContractViolation(_) => "contract-violation",
            ContractError::UndefinedRatio => "undefined-ratio",
        }
    }
}

pub type Result<T> = std::result::Result<T, ContractError>;
