use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by model validation, the eigensolver, and the propagators.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter violates its documented constraint.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The eigenvalue scan terminated before finding the requested number of
    /// states below the internal search ceiling.
    #[error("found only {found} of {required} eigenvalues below k1 = {ceiling} 1/fm")]
    RootCount {
        found: usize,
        required: usize,
        ceiling: f64,
    },

    /// A bracketed root failed to converge.
    #[error("root refinement did not converge in bracket [{lo}, {hi}]")]
    RootBracket { lo: f64, hi: f64 },

    /// An energy/parity pair handed to the state builder does not solve the
    /// matching condition.
    #[error("energy {energy} MeV ({parity}) leaves matching residual {residual:e}")]
    MatchingResidual {
        energy: f64,
        parity: &'static str,
        residual: f64,
    },

    /// Wavefunction evaluation outside the hard box.
    #[error("position {x} fm lies outside the box [-{box_half_length}, {box_half_length}] fm")]
    OutsideBox { x: f64, box_half_length: f64 },

    /// Basis orthonormality defect above tolerance after construction.
    #[error("orthonormality defect {defect:e} exceeds tolerance {tolerance:e}")]
    Orthonormality { defect: f64, tolerance: f64 },

    /// The spatial profile is too narrow for the sampling grid.
    #[error("sigma_x = {sigma_x} fm is under 4 grid spacings ({spacing} fm); refine the grid")]
    GridResolution { sigma_x: f64, spacing: f64 },

    /// Norm drift during integration beyond the quality threshold.
    #[error("norm defect {defect:e} at t = {t} fm exceeds 1e-4; decrease dt")]
    NormDefect { t: f64, defect: f64 },

    /// The trajectory is still changing inside the requested settle window.
    #[error("occupations drift by {drift:e} over the settle margin (tolerance {tolerance:e})")]
    NotSettled { drift: f64, tolerance: f64 },

    /// An occupation vector with no weight cannot define an expectation value.
    #[error("occupations sum to zero; expectation values are undefined")]
    EmptyOccupations,

    /// An ensemble member failed; the seed identifies the realization.
    #[error("ensemble member with seed {seed} failed: {source}")]
    MemberFailed {
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}
