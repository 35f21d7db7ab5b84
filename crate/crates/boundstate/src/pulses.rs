//! Time-dependent external drives: Gaussian pulse trains and stochastic
//! square-pulse noise.
//!
//! Every schedule factorizes exactly as `potential(x, t) = spatial(x) * g(t)`
//! with a shared Gaussian spatial profile. The coupling module exploits this:
//! the spatial matrix is computed once and the scalar signal `g(t)` scales it
//! during integration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Gaussian spatial profile `amplitude * exp(-(x - center)^2 / (2 sigma_x^2))`.
///
/// For stochastic schedules the amplitude is fixed at 1 MeV and the
/// per-window random amplitudes ride in the time signal instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialProfile {
    /// Peak strength, MeV.
    pub amplitude: f64,
    /// Center position, fm.
    pub center: f64,
    /// Width, fm.
    pub sigma_x: f64,
}

impl SpatialProfile {
    pub fn new(amplitude: f64, center: f64, sigma_x: f64) -> Result<Self> {
        if !(sigma_x > 0.0) {
            return Err(Error::Config(format!(
                "sigma_x must be positive, got {sigma_x}"
            )));
        }
        Ok(Self {
            amplitude,
            center,
            sigma_x,
        })
    }

    /// Centered profile, the default placement over the well.
    pub fn centered(amplitude: f64, sigma_x: f64) -> Result<Self> {
        Self::new(amplitude, 0.0, sigma_x)
    }

    /// Profile value at `x`, MeV.
    pub fn evaluate(&self, x: f64) -> f64 {
        let d = (x - self.center) / self.sigma_x;
        self.amplitude * (-0.5 * d * d).exp()
    }
}

/// Train of Gaussian pulses in time with one shared width.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTrain {
    pub profile: SpatialProfile,
    /// Temporal width of every pulse, fm.
    pub sigma_t: f64,
    /// Pulse center times, strictly increasing, fm.
    pub centers: Vec<f64>,
}

impl GaussianTrain {
    pub fn new(profile: SpatialProfile, sigma_t: f64, centers: Vec<f64>) -> Result<Self> {
        if !(sigma_t > 0.0) {
            return Err(Error::Config(format!(
                "sigma_t must be positive, got {sigma_t}"
            )));
        }
        if centers.is_empty() {
            return Err(Error::Config("pulse train needs at least one center".into()));
        }
        if centers.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "pulse centers must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            profile,
            sigma_t,
            centers,
        })
    }

    pub fn single(profile: SpatialProfile, sigma_t: f64, t0: f64) -> Result<Self> {
        Self::new(profile, sigma_t, vec![t0])
    }

    /// Dimensionless time signal: sum of unit-height Gaussians. Tails are
    /// evaluated exactly, with no cutoff.
    pub fn signal(&self, t: f64) -> f64 {
        let b = 1.0 / (2.0 * self.sigma_t * self.sigma_t);
        self.centers
            .iter()
            .map(|&tk| (-b * (t - tk) * (t - tk)).exp())
            .sum()
    }
}

/// Stochastic square-pulse drive: contiguous windows of length
/// `hold_factor * delta_t`, each holding one amplitude drawn from
/// `Normal(0, sigma_v^2)`.
///
/// The spatial profile amplitude is forced to 1 MeV so the signal carries
/// the random amplitudes, measured in units of 1 MeV.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticSquareTrain {
    pub profile: SpatialProfile,
    /// Standard deviation of the window amplitudes, MeV.
    pub sigma_v: f64,
    /// Base time step of the noise, fm.
    pub delta_t: f64,
    /// Number of base steps each amplitude is held.
    pub hold_factor: u32,
    /// Number of windows.
    pub n_pulses: usize,
    /// RNG seed; realizations are deterministic given the seed.
    pub seed: u64,
}

impl StochasticSquareTrain {
    pub fn new(
        mut profile: SpatialProfile,
        sigma_v: f64,
        delta_t: f64,
        hold_factor: u32,
        n_pulses: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(sigma_v >= 0.0) {
            return Err(Error::Config(format!(
                "sigma_v must be non-negative, got {sigma_v}"
            )));
        }
        if !(delta_t > 0.0) {
            return Err(Error::Config(format!(
                "delta_t must be positive, got {delta_t}"
            )));
        }
        if hold_factor == 0 {
            return Err(Error::Config("hold_factor must be at least 1".into()));
        }
        if n_pulses == 0 {
            return Err(Error::Config("n_pulses must be at least 1".into()));
        }
        profile.amplitude = 1.0;
        Ok(Self {
            profile,
            sigma_v,
            delta_t,
            hold_factor,
            n_pulses,
            seed,
        })
    }

    /// Length of one amplitude window, fm.
    pub fn window_length(&self) -> f64 {
        self.hold_factor as f64 * self.delta_t
    }

    /// Total active time of the noise, fm.
    pub fn total_length(&self) -> f64 {
        self.n_pulses as f64 * self.window_length()
    }

    /// Draw the window amplitudes; deterministic for a given seed.
    pub fn realize(&self) -> RealizedSquareTrain {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let normal = Normal::new(0.0, self.sigma_v).expect("validated sigma_v");
        let amplitudes = (0..self.n_pulses)
            .map(|_| normal.sample(&mut rng))
            .collect();
        RealizedSquareTrain {
            train: self.clone(),
            amplitudes,
        }
    }
}

/// A stochastic train with its window amplitudes drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedSquareTrain {
    pub train: StochasticSquareTrain,
    /// One amplitude per window, MeV.
    pub amplitudes: Vec<f64>,
}

impl RealizedSquareTrain {
    /// Signal in units of 1 MeV: the active window's amplitude, zero before
    /// t = 0 and after the last window.
    pub fn signal(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let j = (t / self.train.window_length()) as usize;
        if j >= self.amplitudes.len() {
            return 0.0;
        }
        self.amplitudes[j]
    }
}

/// A realized drive of either kind, evaluated through one interface.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Gaussian(GaussianTrain),
    Stochastic(RealizedSquareTrain),
}

impl Schedule {
    pub fn spatial_profile(&self) -> &SpatialProfile {
        match self {
            Schedule::Gaussian(g) => &g.profile,
            Schedule::Stochastic(s) => &s.train.profile,
        }
    }

    /// Dimensionless (Gaussian) or MeV-valued (stochastic) time signal g(t).
    pub fn time_signal(&self, t: f64) -> f64 {
        match self {
            Schedule::Gaussian(g) => g.signal(t),
            Schedule::Stochastic(s) => s.signal(t),
        }
    }

    /// Full drive potential at (x, t); positions outside the box are a
    /// domain error.
    pub fn potential_at(&self, box_half_length: f64, x: f64, t: f64) -> Result<f64> {
        if x.abs() > box_half_length {
            return Err(Error::OutsideBox {
                x,
                box_half_length,
            });
        }
        Ok(self.spatial_profile().evaluate(x) * self.time_signal(t))
    }

    /// Time after which the drive stays negligible: last pulse center plus
    /// `margin_sigmas` widths for Gaussian trains, end of the last window for
    /// stochastic noise.
    pub fn quiet_after(&self, margin_sigmas: f64) -> f64 {
        match self {
            Schedule::Gaussian(g) => {
                g.centers.last().copied().unwrap_or(0.0) + margin_sigmas * g.sigma_t
            }
            Schedule::Stochastic(s) => s.train.total_length(),
        }
    }

    /// For stochastic schedules, the window length the integrator step must
    /// divide.
    pub fn step_alignment(&self) -> Option<f64> {
        match self {
            Schedule::Gaussian(_) => None,
            Schedule::Stochastic(s) => Some(s.train.window_length()),
        }
    }
}

impl From<GaussianTrain> for Schedule {
    fn from(g: GaussianTrain) -> Self {
        Schedule::Gaussian(g)
    }
}

impl From<RealizedSquareTrain> for Schedule {
    fn from(s: RealizedSquareTrain) -> Self {
        Schedule::Stochastic(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile() -> SpatialProfile {
        SpatialProfile::centered(100.0, 1.2).unwrap()
    }

    #[test]
    fn gaussian_peak_and_tail() {
        let train = GaussianTrain::single(profile(), 1.0, 50.0).unwrap();
        assert!((train.signal(50.0) - 1.0).abs() < 1e-15);
        let expected = (-12.5f64).exp();
        assert!((train.signal(55.0) - expected).abs() < 1e-18);
    }

    #[test]
    fn train_signal_adds_single_pulses() {
        let train = GaussianTrain::new(profile(), 2.0, vec![10.0, 20.0, 35.0]).unwrap();
        let singles: Vec<GaussianTrain> = train
            .centers
            .iter()
            .map(|&c| GaussianTrain::single(profile(), 2.0, c).unwrap())
            .collect();
        for t in [0.0, 9.0, 15.5, 22.0, 60.0] {
            let summed: f64 = singles.iter().map(|s| s.signal(t)).sum();
            assert!((train.signal(t) - summed).abs() < 1e-15);
        }
    }

    #[test]
    fn potential_peaks_at_both_centers() {
        let sched: Schedule = GaussianTrain::single(profile(), 1.0, 50.0).unwrap().into();
        let v = sched.potential_at(100.0, 0.0, 50.0).unwrap();
        assert!((v - 100.0).abs() < 1e-12);
        let v = sched.potential_at(100.0, 1.2, 50.0).unwrap();
        assert!((v - 100.0 * (-0.5f64).exp()).abs() < 1e-12);
        assert!(sched.potential_at(100.0, 101.0, 50.0).is_err());
    }

    #[test]
    fn realization_is_deterministic() {
        let train =
            StochasticSquareTrain::new(profile(), 50.0, 0.02, 5, 200, 42).unwrap();
        let a = train.realize();
        let b = train.realize();
        assert_eq!(a.amplitudes, b.amplitudes);
        let other = StochasticSquareTrain { seed: 43, ..train }.realize();
        assert_ne!(a.amplitudes, other.amplitudes);
    }

    #[test]
    fn realized_std_matches_sigma_v() {
        let train =
            StochasticSquareTrain::new(profile(), 50.0, 0.02, 5, 2000, 7).unwrap();
        let r = train.realize();
        let mean: f64 = r.amplitudes.iter().sum::<f64>() / 2000.0;
        let var: f64 =
            r.amplitudes.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / 1999.0;
        let std = var.sqrt();
        assert!((std - 50.0).abs() < 5.0, "std = {std}");
        // mean of N(0, sigma^2) over 2000 draws stays within 4 standard errors
        assert!(mean.abs() < 4.0 * 50.0 / (2000.0f64).sqrt(), "mean = {mean}");
    }

    #[test]
    fn window_indexing_is_contiguous() {
        let train = StochasticSquareTrain::new(profile(), 50.0, 0.02, 5, 3, 1).unwrap();
        let r = train.realize();
        assert_eq!(r.signal(0.0), r.amplitudes[0]);
        assert_eq!(r.signal(0.0999), r.amplitudes[0]);
        assert_eq!(r.signal(0.1001), r.amplitudes[1]);
        assert_eq!(r.signal(0.2999), r.amplitudes[2]);
        assert_eq!(r.signal(0.3001), 0.0);
        assert_eq!(r.signal(-0.5), 0.0);
    }

    #[test]
    fn adjacent_window_amplitudes_decorrelated() {
        // sample mean of products of adjacent windows stays near zero
        let train =
            StochasticSquareTrain::new(profile(), 1.0, 0.02, 5, 100_000, 99).unwrap();
        let r = train.realize();
        let n = r.amplitudes.len() - 1;
        let corr: f64 = r
            .amplitudes
            .windows(2)
            .map(|w| w[0] * w[1])
            .sum::<f64>()
            / n as f64;
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr = {corr}");
    }

    proptest! {
        #[test]
        fn factorization_is_exact(
            x in -99.0f64..99.0,
            t in -10.0f64..210.0,
            sigma_x in 0.05f64..5.0,
            sigma_t in 0.1f64..20.0,
        ) {
            let p = SpatialProfile::centered(100.0, sigma_x).unwrap();
            let g: Schedule = GaussianTrain::new(p, sigma_t, vec![40.0, 90.0]).unwrap().into();
            let s: Schedule = StochasticSquareTrain::new(p, 50.0, 0.02, 5, 1000, 3)
                .unwrap()
                .realize()
                .into();
            for sched in [&g, &s] {
                let full = sched.potential_at(100.0, x, t).unwrap();
                let product = sched.spatial_profile().evaluate(x) * sched.time_signal(t);
                prop_assert_eq!(full, product);
            }
        }
    }
}
