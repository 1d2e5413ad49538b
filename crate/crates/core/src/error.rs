use thiserror::Error;

/// Errors surfaced by group construction and the desk-scale computations.
///
/// Anything that indicates a bug in this library (a non-associative product
/// of two validated tables, say) panics instead; `Error` is reserved for
/// conditions the caller can provoke with legal inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group input: {0}")]
    Parse(String),

    #[error("group order {0} exceeds the dense-table bound {1}")]
    OrderBound(usize, usize),

    #[error("subgroup enumeration needs order <= {limit}, got {order}")]
    EnumerationBound { order: usize, limit: usize },

    #[error("subgroup of order {sub} is not normal in the scope of order {scope}")]
    NotNormal { sub: usize, scope: usize },

    #[error("subgroup is not strongly closed in the fusion system")]
    NotStronglyClosed,

    #[error("required containment fails: {sub} is not inside {sup}")]
    Containment { sub: String, sup: String },

    #[error("operation needs subgroups of a common parent group")]
    ParentMismatch,

    #[error("coefficient precision {p}^{k} is below the exponent {exponent} of the coefficient group")]
    PrecisionTooLow { p: u64, k: u32, exponent: u64 },

    #[error("the element is not characteristic for the fusion system")]
    NotCharacteristic,

    #[error("power iteration did not reach an idempotent within {0} steps")]
    IdempotentSearch(usize),

    #[error("{0}")]
    Unsupported(String),
}
