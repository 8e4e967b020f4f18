use thiserror::Error;

/// Errors surfaced by the analysis and simulation modules.
///
/// Specs are validated at construction time; evaluation paths only fail on
/// domain violations (e.g. an infeasible target hit ratio).
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or transform stack violates a precondition.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// An argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A target rate or cost exceeds what the flow can deliver.
    #[error("infeasible target {requested} (supremum {supremum})")]
    Infeasible { requested: f64, supremum: f64 },

    /// An iterative procedure exhausted its budget without converging.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A simulation or measurement was configured inconsistently.
    #[error("bad configuration: {0}")]
    BadConfig(String),
}
