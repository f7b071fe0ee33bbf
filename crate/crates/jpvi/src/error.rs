use thiserror::Error;

/// Errors shared across the numerical pipeline.
#[derive(Error, Debug, Clone)]
pub enum Error {
    /// A pivot of the triangular factorization is not a finite number;
    /// the caller should retry at higher precision.
    #[error("non-finite pivot encountered during factorization")]
    NonFinitePivot,

    /// The matrix is not positive definite; carries the index of the
    /// first nonpositive pivot.
    #[error("matrix not positive definite (first bad pivot at index {0})")]
    NotPositiveDefinite(usize),

    /// Quadrature or series refinement hit its level/term cap without
    /// meeting the requested tolerance.
    #[error("failed to converge to the requested tolerance")]
    NotConverged,

    /// Argument outside the supported domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Evaluation requested at a pole of a partial-fraction expression.
    #[error("evaluation at a pole (z in {{0, 1, t}})")]
    PoleEvaluation,

    /// A_n(z) vanished where the ODE coefficient needs 1/A_n(z).
    #[error("zero denominator: A_n(z) = 0")]
    ZeroDenominator,

    /// The PVI trajectory came too close to the singular loci {0, 1, t}.
    #[error("trajectory reached the singular locus of Painlevé VI")]
    SingularLocus,

    /// The adaptive step size underflowed.
    #[error("adaptive step size underflow")]
    StepUnderflow,

    /// Precision escalation reached its cap without producing a usable
    /// factorization.
    #[error("precision exhausted (escalation cap reached)")]
    PrecisionExhausted,
}

pub type Result<T> = std::result::Result<T, Error>;
