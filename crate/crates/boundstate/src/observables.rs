//! Derived quantities of a run: mean energy, distribution widths, peak
//! structure, and the energy-time uncertainty product.

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::model::HBAR_C;

/// Occupation-weighted mean energy, Sum E_n w_n / Sum w_n.
///
/// The ratio form makes the result invariant under uniform rescaling of the
/// weights, so unnormalized occupation vectors are fine.
pub fn mean_energy(energies: &[f64], occupations: &[f64]) -> Result<f64> {
    let total: f64 = occupations.iter().sum();
    if total <= 0.0 {
        return Err(Error::EmptyOccupations);
    }
    let weighted: f64 = energies
        .iter()
        .zip(occupations)
        .map(|(e, w)| e * w)
        .sum();
    Ok(weighted / total)
}

/// Standard deviation of the energy under the occupation weights.
pub fn energy_spread(energies: &[f64], occupations: &[f64]) -> Result<f64> {
    let mean = mean_energy(energies, occupations)?;
    let total: f64 = occupations.iter().sum();
    let var: f64 = energies
        .iter()
        .zip(occupations)
        .map(|(e, w)| w * (e - mean) * (e - mean))
        .sum::<f64>()
        / total;
    Ok(var.max(0.0).sqrt())
}

/// Dimensionless product dE * sigma_t / hbar c; at least 1/2 for any
/// quantum-limited spread.
pub fn uncertainty_product(delta_e: f64, sigma_t: f64) -> f64 {
    delta_e * sigma_t / HBAR_C
}

/// Snapshot statistics of a settled final distribution.
#[derive(Debug, Clone)]
pub struct DistributionSummary {
    /// Final occupations, one per state.
    pub occupations: Vec<f64>,
    pub initial_index: usize,
    /// Whether the initial state's occupation entered the statistics.
    pub includes_initial: bool,
    /// Mean energy of the counted states, MeV.
    pub mean_energy: f64,
    /// Standard deviation of the energy, MeV.
    pub energy_std: f64,
    /// Doubled standard deviation, the full-spread convention.
    pub energy_spread_2x: f64,
}

impl DistributionSummary {
    /// Build from a final occupation vector, optionally masking the
    /// initially prepared state out of the statistics.
    pub fn from_occupations(
        energies: &[f64],
        occupations: &[f64],
        initial_index: usize,
        include_initial: bool,
    ) -> Result<Self> {
        let mut weights = occupations.to_vec();
        if !include_initial {
            weights[initial_index] = 0.0;
        }
        let mean = mean_energy(energies, &weights)?;
        let std = energy_spread(energies, &weights)?;
        Ok(Self {
            occupations: occupations.to_vec(),
            initial_index,
            includes_initial: include_initial,
            mean_energy: mean,
            energy_std: std,
            energy_spread_2x: 2.0 * std,
        })
    }

    /// Uncertainty product of this distribution against a pulse width, using
    /// the doubled-spread convention.
    pub fn uncertainty_product_2x(&self, sigma_t: f64) -> f64 {
        uncertainty_product(self.energy_spread_2x, sigma_t)
    }
}

/// Drift tolerance for a distribution to count as settled.
pub const SETTLE_TOLERANCE: f64 = 1e-6;

/// Snapshot the end of a trajectory after verifying the occupations stopped
/// moving.
///
/// The last `settle_margin` fm of samples must show every occupation
/// constant to [`SETTLE_TOLERANCE`]; otherwise the pulse was still active
/// and the snapshot would be meaningless. Statistics exclude the initially
/// prepared state, which otherwise dominates every moment.
pub fn final_distribution(
    trajectory: &Trajectory,
    energies: &[f64],
    settle_margin: f64,
) -> Result<DistributionSummary> {
    let t_final = *trajectory.times.last().expect("nonempty trajectory");
    let window_start = t_final - settle_margin;
    let first_sample = trajectory
        .times
        .iter()
        .position(|&t| t >= window_start)
        .unwrap_or(trajectory.n_samples() - 1);

    let mut drift = 0.0f64;
    let last = trajectory.final_occupations();
    for s in first_sample..trajectory.n_samples() {
        for (a, b) in trajectory.occupations_at(s).iter().zip(last) {
            drift = drift.max((a - b).abs());
        }
    }
    if drift > SETTLE_TOLERANCE {
        return Err(Error::NotSettled {
            drift,
            tolerance: SETTLE_TOLERANCE,
        });
    }
    DistributionSummary::from_occupations(energies, last, trajectory.initial_index, false)
}

/// A local maximum of a final-state distribution.
#[derive(Debug, Clone)]
pub struct Peak {
    /// State index of the maximum.
    pub index: usize,
    /// Energy at the maximum, MeV.
    pub energy: f64,
    pub height: f64,
    /// Second-moment width of the peak over its basin, MeV.
    pub width: f64,
}

/// Local maxima with height at least `prominence_frac` of the global
/// maximum; each peak's width is the energy standard deviation over the
/// basin between the surrounding minima.
pub fn find_peaks(energies: &[f64], occupations: &[f64], prominence_frac: f64) -> Vec<Peak> {
    let n = occupations.len();
    if n < 3 {
        return Vec::new();
    }
    let global_max = occupations.iter().cloned().fold(0.0, f64::max);
    let threshold = prominence_frac * global_max;
    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        let h = occupations[i];
        if h < threshold || h < occupations[i - 1] || h < occupations[i + 1] {
            continue;
        }
        // strict rise on at least one side breaks plateau ties
        if h == occupations[i - 1] && h == occupations[i + 1] {
            continue;
        }
        let mut lo = i;
        while lo > 0 && occupations[lo - 1] < occupations[lo] {
            lo -= 1;
        }
        let mut hi = i;
        while hi + 1 < n && occupations[hi + 1] < occupations[hi] {
            hi += 1;
        }
        let basin_e = &energies[lo..=hi];
        let basin_w = &occupations[lo..=hi];
        let width = energy_spread(basin_e, basin_w).unwrap_or(0.0);
        peaks.push(Peak {
            index: i,
            energy: energies[i],
            height: h,
            width,
        });
    }
    peaks
}

/// First time a state's occupation moves past `frac` of its total change
/// over the trajectory.
pub fn response_time(trajectory: &Trajectory, state: usize, frac: f64) -> Option<f64> {
    let series = trajectory.state_series(state);
    let start = series.first()?;
    let end = series.last()?;
    let total = end - start;
    if total == 0.0 {
        return None;
    }
    let threshold = frac * total.abs();
    series
        .iter()
        .position(|&y| (y - start).abs() > threshold)
        .map(|i| trajectory.times[i])
}

/// Largest per-state drift of the occupations over all samples at times at
/// or after `t_from`.
pub fn occupation_drift_after(trajectory: &Trajectory, t_from: f64) -> f64 {
    let first = match trajectory.times.iter().position(|&t| t >= t_from) {
        Some(i) => i,
        None => return 0.0,
    };
    let n = trajectory.n_states();
    let mut drift = 0.0f64;
    for s in first..trajectory.n_samples() {
        let occ = trajectory.occupations_at(s);
        let base = trajectory.occupations_at(first);
        for k in 0..n {
            drift = drift.max((occ[k] - base[k]).abs());
        }
    }
    drift
}
