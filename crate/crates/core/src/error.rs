use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("identifier `{0}` is used both as an action and as a proposition")]
    SymbolClash(String),

    #[error("`{0}` is not a formula")]
    NotAFormula(String),

    #[error("`{0}` is not a parameter (a proposition or the domain of a testable expression)")]
    NotAParameter(String),

    #[error("parameter set is not Fischer-Ladner closed: `{0}` requires missing `{1}`")]
    NotFlClosed(String, String),

    #[error("closure deficiency: `{0}` is neither in the parameter set nor decomposable over it")]
    ClosureDeficiency(String),

    #[error("`{0}` is outside the regular expressions over the parameter literals")]
    NotOverLiterals(String),

    #[error(
        "resource budget exceeded: |Γ| = {gamma}, {free} free parameters give {candidates} candidate atoms (limit {limit})"
    )]
    Budget { gamma: usize, free: usize, candidates: u128, limit: usize },

    #[error("closure grew beyond {0} parameters")]
    ClosureTooLarge(usize),

    #[error("model enumeration needs {needed} models, over the budget of {limit}")]
    OracleBudget { needed: u128, limit: u128 },

    #[error("atom does not belong to this parameter set")]
    AtomMismatch,

    #[error("automata are over different atom universes")]
    AlphabetMismatch,

    #[error("model does not name `{0}`")]
    UnnamedSymbol(String),

    #[error("state {0} is out of range")]
    StateOutOfRange(usize),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}
