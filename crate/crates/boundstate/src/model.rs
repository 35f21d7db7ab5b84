//! Physical constants, unit conventions, and the static well-in-a-box
//! configuration shared by every other module.
//!
//! All energies are in MeV, all lengths and times in fm, with hbar = 1, so
//! dimensionless products divide by [`HBAR_C`].

use crate::error::{Error, Result};

/// hbar * c in MeV fm (CODATA rounded).
pub const HBAR_C: f64 = 197.327;

/// Proton rest-mass energy in MeV.
pub const PROTON_MASS_ENERGY: f64 = 938.272;

/// Unit constants bundled as a value for callers that want them together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// Energy-length constant, MeV fm.
    pub hbar_c: f64,
    /// Proton rest-mass energy, MeV.
    pub proton_mass_energy: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self {
            hbar_c: HBAR_C,
            proton_mass_energy: PROTON_MASS_ENERGY,
        }
    }
}

/// Attractive square well of half-width `a` centered in a hard box of
/// half-length `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellConfig {
    /// Well depth, negative, MeV.
    pub v0: f64,
    /// Half-width of the well, fm.
    pub a: f64,
    /// Half-length of the box, fm.
    pub l: f64,
    /// Mass energy of the particle, MeV.
    pub m: f64,
    /// Number of eigenstates kept in the truncated basis.
    pub n_basis: usize,
}

impl WellConfig {
    /// Deuteron-like defaults: v0 = -18 MeV, well diameter 1.2 fm, box
    /// half-length 100 fm, reduced nucleon mass, 110 basis states.
    pub fn deuteron() -> Self {
        Self {
            v0: -18.0,
            a: 0.6,
            l: 100.0,
            m: PROTON_MASS_ENERGY / 2.0,
            n_basis: 110,
        }
    }

    /// Check every parameter constraint, naming the first violation.
    pub fn validate(&self) -> Result<()> {
        if !(self.v0 < 0.0) {
            return Err(Error::Config(format!("v0 must be negative, got {}", self.v0)));
        }
        if !(self.a > 0.0 && self.a < self.l) {
            return Err(Error::Config(format!(
                "well half-width must satisfy 0 < a < l, got a = {}, l = {}",
                self.a, self.l
            )));
        }
        if !(self.m > 0.0) {
            return Err(Error::Config(format!("mass must be positive, got {}", self.m)));
        }
        if self.n_basis == 0 {
            return Err(Error::Config("n_basis must be at least 1".into()));
        }
        Ok(())
    }

    /// 2m / (hbar c)^2 in 1/(MeV fm^2); converts energies to squared
    /// wavenumbers.
    pub(crate) fn kinematic_factor(&self) -> f64 {
        2.0 * self.m / (HBAR_C * HBAR_C)
    }

    /// Wavenumber bound sqrt(2 m |v0|) / hbar c separating bound and
    /// scattering branches.
    pub(crate) fn well_wavenumber(&self) -> f64 {
        (self.kinematic_factor() * (-self.v0)).sqrt()
    }
}

impl Default for WellConfig {
    fn default() -> Self {
        Self::deuteron()
    }
}

/// Value of the static potential at a point: finite inside the box, a hard
/// wall outside. The wall is represented structurally, never as a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Finite(f64),
    Infinite,
}

/// Static potential of the well-in-a-box at position `x`.
pub fn static_potential(cfg: &WellConfig, x: f64) -> Potential {
    if x.abs() > cfg.l {
        Potential::Infinite
    } else if x.abs() <= cfg.a {
        Potential::Finite(cfg.v0)
    } else {
        Potential::Finite(0.0)
    }
}
