//! Monte-Carlo averaging of trajectories over realizations of the
//! stochastic drive.
//!
//! Members evolve independently (in parallel under the default feature) and
//! are reduced into running sums strictly in member-index order, so the
//! result is identical for any thread count. Memory stays bounded by
//! processing members in fixed batches and dropping each trajectory after
//! reduction.

use ndarray::Array2;

use crate::coupling::CouplingMatrix;
use crate::eigen::SpectralBasis;
use crate::error::{Error, Result};
use crate::evolution::{evolve, Trajectory};
use crate::par;
use crate::pulses::{Schedule, StochasticSquareTrain};

/// A stochastic-noise ensemble: the base schedule's seed acts as the base
/// seed, member i draws from `base_seed + i`.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub base: StochasticSquareTrain,
    pub n_realizations: usize,
}

impl EnsembleSpec {
    pub fn new(base: StochasticSquareTrain, n_realizations: usize) -> Result<Self> {
        if n_realizations == 0 {
            return Err(Error::Config("ensemble needs at least one member".into()));
        }
        Ok(Self {
            base,
            n_realizations,
        })
    }

    /// Seed of the i-th realization.
    pub fn member_seed(&self, index: usize) -> u64 {
        self.base.seed.wrapping_add(index as u64)
    }

    fn member_schedule(&self, index: usize) -> Schedule {
        StochasticSquareTrain {
            seed: self.member_seed(index),
            ..self.base.clone()
        }
        .realize()
        .into()
    }
}

/// Pointwise-in-time averages over the ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    /// Sample times, fm, shared by every member.
    pub times: Vec<f64>,
    /// Row per sample time, column per state: member-averaged occupations.
    pub mean_occupations: Array2<f64>,
    /// Member-averaged mean energy per sample, MeV.
    pub mean_energy: Vec<f64>,
    /// Standard error of the mean energy per sample, MeV.
    pub stderr_mean_energy: Vec<f64>,
    pub n_members: usize,
    pub initial_index: usize,
}

impl EnsembleResult {
    /// Mean occupation of one state over a contiguous time bin.
    pub fn binned_occupation(&self, state: usize, t_lo: f64, t_hi: f64) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (s, &t) in self.times.iter().enumerate() {
            if t >= t_lo && t < t_hi {
                sum += self.mean_occupations[(s, state)];
                count += 1;
            }
        }
        sum / count.max(1) as f64
    }
}

/// Mean-energy time series of an ensemble.
pub fn mean_energy_curve(result: &EnsembleResult) -> (&[f64], &[f64]) {
    (&result.times, &result.mean_energy)
}

/// Evolve every member of `spec` and average occupations and mean energy
/// pointwise in time.
///
/// Members run in index batches; each batch evolves in parallel and then
/// folds into the running sums in index order, keeping the reduction
/// deterministic.
pub fn run_ensemble(
    basis: &SpectralBasis,
    coupling: &CouplingMatrix,
    spec: &EnsembleSpec,
    initial_index: usize,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<EnsembleResult> {
    let k = spec.n_realizations;
    let batch = batch_size();

    let mut sum_occ: Option<Array2<f64>> = None;
    let mut times: Vec<f64> = Vec::new();
    let mut sum_me: Vec<f64> = Vec::new();
    let mut sum_me_sq: Vec<f64> = Vec::new();

    let mut start = 0usize;
    while start < k {
        let count = batch.min(k - start);
        let members: Vec<(u64, Result<Trajectory>)> = par::indexed_map(count, |i| {
            let index = start + i;
            let schedule = spec.member_schedule(index);
            let traj = evolve(
                basis,
                coupling,
                &schedule,
                initial_index,
                t_end,
                dt,
                sample_every,
            );
            (spec.member_seed(index), traj)
        });
        for (seed, traj) in members {
            let traj = traj.map_err(|e| Error::MemberFailed {
                seed,
                source: Box::new(e),
            })?;
            if sum_occ.is_none() {
                times = traj.times.clone();
                sum_occ = Some(Array2::zeros((traj.n_samples(), traj.n_states())));
                sum_me = vec![0.0; traj.n_samples()];
                sum_me_sq = vec![0.0; traj.n_samples()];
            }
            let acc = sum_occ.as_mut().expect("initialized above");
            *acc += &traj.occupations;
            for (s, &me) in traj.mean_energy.iter().enumerate() {
                sum_me[s] += me;
                sum_me_sq[s] += me * me;
            }
        }
        start += count;
    }

    let kf = k as f64;
    let mean_occupations = sum_occ.expect("at least one member") / kf;
    let mean_energy: Vec<f64> = sum_me.iter().map(|s| s / kf).collect();
    let stderr_mean_energy: Vec<f64> = sum_me
        .iter()
        .zip(&sum_me_sq)
        .map(|(s, sq)| {
            if k < 2 {
                return 0.0;
            }
            let mean = s / kf;
            let var = ((sq - kf * mean * mean) / (kf - 1.0)).max(0.0);
            (var / kf).sqrt()
        })
        .collect();

    Ok(EnsembleResult {
        times,
        mean_occupations,
        mean_energy,
        stderr_mean_energy,
        n_members: k,
        initial_index,
    })
}

fn batch_size() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads().max(1)
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
