//! Spectral simulator for the formation and dissociation of a bound state in
//! a one-dimensional square well inside a hard box, driven by time-dependent
//! Gaussian pulse trains or stochastic square-pulse noise.
//!
//! The static problem is solved exactly in a truncated eigenbasis
//! ([`eigen`]); the drive factorizes into a spatial profile and a time
//! signal ([`pulses`]), which reduces the time-dependent coupling to one
//! dense matrix ([`coupling`]). Dynamics run in the interaction picture with
//! fixed-step RK4 ([`evolution`]), with a matrix-exponential reference
//! propagator for verification. First-order time-dependent perturbation
//! theory and its breakdown diagnostic live in [`perturbation`]; derived
//! quantities (mean energy, distribution widths, energy-time uncertainty
//! products) in [`observables`]; Monte-Carlo averaging over noise
//! realizations in [`ensemble`].
//!
//! The crate is data-parallel with rayon by default; build with
//! `--no-default-features` for the sequential fallback. Both produce
//! identical results.

pub mod coupling;
pub mod eigen;
pub mod ensemble;
pub mod error;
pub mod evolution;
pub mod model;
pub mod observables;
mod par;
pub mod perturbation;
pub mod pulses;
pub mod quadrature;

mod linalg;

pub use coupling::{compute_coupling, CouplingMatrix};
pub use eigen::{
    build_basis, build_state, evaluate_psi, solve_eigenvalues, EigenState, Parity, SpectralBasis,
    DEFAULT_GRID_POINTS,
};
pub use ensemble::{mean_energy_curve, run_ensemble, EnsembleResult, EnsembleSpec};
pub use error::{Error, Result};
pub use evolution::{evolve, evolve_oracle, rhs, StateVector, Trajectory};
pub use model::{static_potential, Potential, UnitSystem, WellConfig, HBAR_C, PROTON_MASS_ENERGY};
pub use observables::{
    energy_spread, final_distribution, find_peaks, mean_energy, uncertainty_product,
    DistributionSummary, Peak,
};
pub use par::execution_mode;
pub use perturbation::{
    first_order_amplitudes, gaussian_transition_probability, validity_report, PerturbativeResult,
    ValidityPoint,
};
pub use pulses::{
    GaussianTrain, RealizedSquareTrain, Schedule, SpatialProfile, StochasticSquareTrain,
};
