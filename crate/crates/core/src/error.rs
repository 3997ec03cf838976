use alloc::string::String;
use alloc::vec::Vec;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A vector argument does not match the instance dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Instance data violates a construction invariant.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// Argument outside the canonical domain of V or V*.
    #[error("value {value} outside domain {domain}")]
    DomainViolation { domain: &'static str, value: f64 },

    /// The dual point lies outside S_a: the recovery matrix G is singular.
    /// Carries the offending spectral entries d_i with |d_i| <= saTol.
    #[error("dual point outside S_a: singular d entries {0:?}")]
    SingularRecovery(Vec<f64>),

    /// The symmetric eigensolver did not converge.
    #[error("eigendecomposition of A failed")]
    EigenFailure,

    /// Non-finite value encountered while evaluating dual residuals.
    #[error("non-finite residual during {0}")]
    NonFiniteResidual(&'static str),

    /// Two independent computations of the same quantity disagree.
    #[error("internal consistency violation: {0}")]
    Inconsistency(&'static str),

    /// Two distinct S_a+ stationary points recovered different minimizers.
    #[error("distinct S_a+ witnesses recover different primal points (x-distance {0})")]
    DistinctGlobalWitnesses(f64),

    /// A stationary point violates the complementary-dual equality chain.
    #[error("complementary-dual equality violated: pi = {pi}, pi_d = {pi_d}")]
    DualityGapViolation { pi: f64, pi_d: f64 },

    /// Invalid argument to a solver driver.
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    /// The quartic surface produced no sample points in any direction.
    #[error("no points found on the quartic surface; it may be empty")]
    EmptySurface,
}

pub type Result<T> = core::result::Result<T, Error>;
