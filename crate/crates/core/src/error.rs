//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of the analysis pipeline.
///
/// Variants carry a short human-readable context string so that callers
/// (notably the command-line front end) can report which quantity failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A pointwise potential was requested for a nonlocal equation.
    #[error("nonlocal equations have no pointwise effective potential")]
    NonlocalUnsupported,

    /// Two roots of the potential polynomial coincide within tolerance.
    #[error("degenerate roots: {0}")]
    DegenerateRoots(String),

    /// The parameters lie on the discriminant variety (constant or solitary states).
    #[error("parameters lie on the discriminant variety")]
    OnGamma,

    /// No interval with positive `E - V` between two simple real roots exists.
    #[error("no bounded periodic orbit: {0}")]
    NoBoundedOrbit(String),

    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Quadrature did not converge or produced a non-finite value.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// A linear system is exactly singular.
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// A linear system exceeds the configured condition-number ceiling.
    #[error("ill-conditioned system (condition estimate {cond:.3e} > {cond_max:.3e})")]
    IllConditioned { cond: f64, cond_max: f64 },

    /// A non-degeneracy hypothesis of the modulation theory fails.
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    /// A closed form was evaluated where its discriminant is not positive.
    #[error("degenerate discriminant: {0}")]
    DegenerateDiscriminant(String),

    /// Parameters violate the existence constraints of an explicit wave family.
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// A small-amplitude denominator vanishes (m(k) = m(nk) or m(k) = 1).
    #[error("resonance: {0}")]
    Resonance(String),

    /// A characteristic-polynomial coefficient violates its realness/parity symmetry.
    #[error("parity violation: {0}")]
    ParityViolation(String),

    /// The Fourier resolution of a Bloch discretization is insufficient.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    /// Eigenvalue branches could not be matched unambiguously across Bloch frequencies.
    #[error("branch mixing: {0}")]
    BranchMixing(String),

    /// A dispersion symbol was evaluated outside its domain.
    #[error("symbol domain error: {0}")]
    SymbolDomain(String),

    /// Malformed input that does not fit any of the categories above.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
