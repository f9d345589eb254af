//! Typed errors for the whole engine.
//!
//! Every failure mode a caller can act on gets its own variant; the CLI maps
//! the variant name into its diagnostics and exit code.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Embedding a root of unity into `Q(zeta_N)` where its order does not divide `N`.
    #[error("incompatible-order: root of unity of order {order} does not embed in Q(zeta_{target})")]
    IncompatibleOrder { order: u64, target: u64 },

    /// Division by zero in a cyclotomic field.
    #[error("singular-value: division by zero in a cyclotomic field")]
    SingularValue,

    /// Convolution of two lattice functions whose supports are not proper over bounded boxes.
    #[error("improper-convolution: {0}")]
    ImproperConvolution(String),

    /// Pushforward along a map that is not proper on the support.
    #[error("improper-pushforward: {0}")]
    ImproperPushforward(String),

    /// Finite Fourier transform of a function that is not periodic for the stated lattice.
    #[error("not-periodic: function is not {0}-periodic")]
    NotPeriodic(String),

    /// Series division by a series whose leading term is not a unit times a monomial.
    #[error("not-invertible: series leading term is not a unit times a pure monomial")]
    NotInvertible,

    /// A truncated-series operation ran out of certified orders.
    #[error("precision: valid order exhausted in variable {variable}; re-expand to depth {suggested}")]
    Precision { variable: usize, suggested: i64 },

    /// The expansion center gamma fails a genericity certificate.
    #[error("non-generic-gamma: {0}")]
    NonGenericGamma(String),

    /// A chamber point lies on an admissible wall or a zonotope boundary.
    #[error("non-generic-chamber-point: {0}; perturb the point (or use --auto-perturb)")]
    NonGenericChamberPoint(String),

    /// The weight list does not span the dual space where a full-rank span is required.
    #[error("not-full-rank: weight list spans a proper subspace")]
    NotFullRank,

    /// A polarizing vector pairs to zero with some weight.
    #[error("not-polarizing: <alpha,tau> = 0 for weight index {index}")]
    NotPolarizing { index: usize },

    /// Szenes evaluation requested outside the chamber's validity region.
    #[error("outside-region: lambda is not in ell*chamber - zonotope; use the decomposition instead")]
    OutsideRegion,

    /// Operation restricted to a special case that does not hold.
    #[error("unsupported-case: {0}")]
    UnsupportedCase(String),

    /// Oracle size guard tripped.
    #[error("oracle-guard: |T_ell| = {size} exceeds the limit {limit}; pass --force or set VERLINDE_MAX_ORACLE")]
    OracleGuard { size: u128, limit: u128 },

    /// Malformed problem configuration (schema-level).
    #[error("config: {pointer}: {message}")]
    Config { pointer: String, message: String },

    /// Internal invariant violation; indicates a bug.
    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable name of the error kind, used by the CLI.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Error::IncompatibleOrder { .. } => "incompatible-order",
            Error::SingularValue => "singular-value",
            Error::ImproperConvolution(_) => "improper-convolution",
            Error::ImproperPushforward(_) => "improper-pushforward",
            Error::NotPeriodic(_) => "not-periodic",
            Error::NotInvertible => "not-invertible",
            Error::Precision { .. } => "precision",
            Error::NonGenericGamma(_) => "non-generic-gamma",
            Error::NonGenericChamberPoint(_) => "non-generic-chamber-point",
            Error::NotFullRank => "not-full-rank",
            Error::NotPolarizing { .. } => "not-polarizing",
            Error::OutsideRegion => "outside-region",
            Error::UnsupportedCase(_) => "unsupported-case",
            Error::OracleGuard { .. } => "oracle-guard",
            Error::Config { .. } => "config",
            Error::Internal(_) => "internal",
        }
    }
}
