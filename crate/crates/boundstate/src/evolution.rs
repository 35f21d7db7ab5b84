//! Interaction-picture propagation of the amplitude equations with
//! fixed-step RK4, and a piecewise-constant matrix-exponential reference
//! propagator for verification.
//!
//! The free phases are absorbed into the ansatz, so the right-hand side is
//! driven purely by the pulse: rotate into the lab frame, apply the dense
//! coupling, rotate back. One evaluation costs one real-matrix times
//! complex-vector product. Fixed steps keep runs bit-reproducible and make
//! stochastic window boundaries land exactly on step boundaries.

use ndarray::Array2;
use num_complex::Complex64;

use crate::coupling::CouplingMatrix;
use crate::eigen::SpectralBasis;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::model::HBAR_C;
use crate::pulses::Schedule;

/// Norm-defect threshold treated as an integration failure.
pub const NORM_DEFECT_LIMIT: f64 = 1e-4;

/// Interaction-picture amplitudes at one instant.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub c_tilde: Vec<Complex64>,
    /// Time, fm.
    pub t: f64,
}

impl StateVector {
    /// Unit amplitude on one basis state.
    pub fn basis_state(n_states: usize, index: usize) -> Self {
        let mut c_tilde = vec![Complex64::ZERO; n_states];
        c_tilde[index] = Complex64::ONE;
        Self { c_tilde, t: 0.0 }
    }

    pub fn occupations(&self) -> Vec<f64> {
        self.c_tilde.iter().map(|c| c.norm_sqr()).collect()
    }

    /// 1 - sum of occupations; zero in exact arithmetic.
    pub fn norm_defect(&self) -> f64 {
        1.0 - self.c_tilde.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

/// Sampled time series of one propagation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub initial_index: usize,
    /// Sample times, fm.
    pub times: Vec<f64>,
    /// Row per sample, column per state: occupations.
    pub occupations: Array2<f64>,
    /// 1 - total occupation per sample.
    pub norm_defect: Vec<f64>,
    /// Occupation-weighted mean energy per sample, MeV.
    pub mean_energy: Vec<f64>,
}

impl Trajectory {
    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    pub fn n_states(&self) -> usize {
        self.occupations.ncols()
    }

    pub fn occupations_at(&self, sample: usize) -> &[f64] {
        self.occupations
            .row(sample)
            .to_slice()
            .expect("row-major trajectory")
    }

    pub fn final_occupations(&self) -> &[f64] {
        self.occupations_at(self.n_samples() - 1)
    }

    /// Occupation time series of one state.
    pub fn state_series(&self, n: usize) -> Vec<f64> {
        self.occupations.column(n).to_vec()
    }

    pub fn max_norm_defect(&self) -> f64 {
        self.norm_defect.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Amplitude derivative at time `t` for signal value `g_value`.
///
/// `level_freqs[n]` is E_n / hbar c; transition frequencies enter as
/// differences through the rotation by the free phases.
pub fn rhs(
    c_tilde: &[Complex64],
    t: f64,
    coupling: &CouplingMatrix,
    g_value: f64,
    level_freqs: &[f64],
) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; c_tilde.len()];
    let mut rotated = vec![Complex64::ZERO; c_tilde.len()];
    let mut phases = vec![Complex64::ZERO; c_tilde.len()];
    rhs_into(
        &mut out,
        c_tilde,
        t,
        coupling,
        g_value,
        level_freqs,
        &mut rotated,
        &mut phases,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn rhs_into(
    out: &mut [Complex64],
    c_tilde: &[Complex64],
    t: f64,
    coupling: &CouplingMatrix,
    g_value: f64,
    level_freqs: &[f64],
    rotated: &mut [Complex64],
    phases: &mut [Complex64],
) {
    let n = c_tilde.len();
    if g_value == 0.0 {
        out.fill(Complex64::ZERO);
        return;
    }
    // phases[n] = e^{-i E_n t / hbar c}
    for ((p, &f), (r, c)) in phases
        .iter_mut()
        .zip(level_freqs)
        .zip(rotated.iter_mut().zip(c_tilde))
    {
        let (s, co) = (f * t).sin_cos();
        *p = Complex64::new(co, -s);
        *r = *p * c;
    }
    let scale = g_value / HBAR_C;
    for j in 0..n {
        let row = coupling.row(j);
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for (m, u) in row.iter().zip(rotated.iter()) {
            acc_re += m * u.re;
            acc_im += m * u.im;
        }
        // -i * scale * e^{+i E_j t / hbar} * acc; the forward phase is the
        // conjugate of the stored one
        let p = phases[j].conj();
        let w = Complex64::new(acc_re, acc_im) * p;
        out[j] = Complex64::new(scale * w.im, -scale * w.re);
    }
}

fn validate_run(
    basis: &SpectralBasis,
    coupling: &CouplingMatrix,
    schedule: &Schedule,
    initial_index: usize,
    t_end: f64,
    dt: f64,
) -> Result<usize> {
    let dim = coupling.n_basis();
    if dim > basis.n_basis() {
        return Err(Error::Config(format!(
            "coupling dimension {} exceeds basis size {}",
            dim,
            basis.n_basis()
        )));
    }
    if initial_index >= dim {
        return Err(Error::Config(format!(
            "initial index {initial_index} outside the {dim}-state system"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    if !(t_end > 0.0) {
        return Err(Error::Config(format!("t_end must be positive, got {t_end}")));
    }
    if let Some(window) = schedule.step_alignment() {
        let per = window / dt;
        if (per - per.round()).abs() > 1e-9 * per.round().max(1.0) {
            return Err(Error::Config(format!(
                "dt = {dt} must divide the noise window {window} fm"
            )));
        }
    }
    Ok(dim)
}

/// Propagate a unit amplitude on `initial_index` from t = 0 to `t_end`.
///
/// Occupations, norm defect, and mean energy are recorded at t = 0, every
/// `sample_every`-th step, and the final step. The system dimension is taken
/// from the coupling matrix, so a truncated matrix runs a truncated system
/// against the same basis.
pub fn evolve(
    basis: &SpectralBasis,
    coupling: &CouplingMatrix,
    schedule: &Schedule,
    initial_index: usize,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    let dim = validate_run(basis, coupling, schedule, initial_index, t_end, dt)?;
    let initial = StateVector::basis_state(dim, initial_index);
    evolve_state(
        basis,
        coupling,
        schedule,
        &initial,
        initial_index,
        t_end,
        dt,
        sample_every,
    )
}

/// Propagate an arbitrary initial amplitude vector; the workhorse behind
/// [`evolve`] and the reversibility checks.
#[allow(clippy::too_many_arguments)]
pub fn evolve_state(
    basis: &SpectralBasis,
    coupling: &CouplingMatrix,
    schedule: &Schedule,
    initial: &StateVector,
    initial_index: usize,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    let dim = validate_run(basis, coupling, schedule, initial_index, t_end, dt)?;
    if initial.c_tilde.len() != dim {
        return Err(Error::Config(format!(
            "initial state has {} amplitudes for a {dim}-state system",
            initial.c_tilde.len()
        )));
    }
    let sample_every = sample_every.max(1);
    let energies: Vec<f64> = basis.states()[..dim].iter().map(|s| s.energy).collect();
    let freqs: Vec<f64> = energies.iter().map(|e| e / HBAR_C).collect();

    let n_steps = ((t_end / dt).round() as usize).max(1);
    let mut c = initial.c_tilde.clone();
    let mut k1 = vec![Complex64::ZERO; dim];
    let mut k2 = vec![Complex64::ZERO; dim];
    let mut k3 = vec![Complex64::ZERO; dim];
    let mut k4 = vec![Complex64::ZERO; dim];
    let mut stage = vec![Complex64::ZERO; dim];
    let mut rotated = vec![Complex64::ZERO; dim];
    let mut phases = vec![Complex64::ZERO; dim];

    let n_samples = n_steps / sample_every + 2;
    let mut recorder = Recorder::new(dim, n_samples, initial_index, energies);
    recorder.record(0.0, &c)?;

    for step in 0..n_steps {
        let t = step as f64 * dt;
        let g0 = schedule.time_signal(t);
        let gh = schedule.time_signal(t + 0.5 * dt);
        let g1 = schedule.time_signal(t + dt);

        rhs_into(&mut k1, &c, t, coupling, g0, &freqs, &mut rotated, &mut phases);
        for i in 0..dim {
            stage[i] = c[i] + 0.5 * dt * k1[i];
        }
        rhs_into(
            &mut k2,
            &stage,
            t + 0.5 * dt,
            coupling,
            gh,
            &freqs,
            &mut rotated,
            &mut phases,
        );
        for i in 0..dim {
            stage[i] = c[i] + 0.5 * dt * k2[i];
        }
        rhs_into(
            &mut k3,
            &stage,
            t + 0.5 * dt,
            coupling,
            gh,
            &freqs,
            &mut rotated,
            &mut phases,
        );
        for i in 0..dim {
            stage[i] = c[i] + dt * k3[i];
        }
        rhs_into(
            &mut k4,
            &stage,
            t + dt,
            coupling,
            g1,
            &freqs,
            &mut rotated,
            &mut phases,
        );
        let sixth = dt / 6.0;
        for i in 0..dim {
            c[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }

        let done = step + 1 == n_steps;
        if (step + 1) % sample_every == 0 || done {
            recorder.record((step + 1) as f64 * dt, &c)?;
        }
    }
    Ok(recorder.finish())
}

/// Reference propagator: Schroedinger-picture evolution by exact matrix
/// exponentials of the Hamiltonian frozen at each step midpoint.
///
/// Each step is exactly unitary, so norm is conserved by construction. Cost
/// is one dense eigendecomposition per step; meant for small truncations.
/// Samples every step.
pub fn evolve_oracle(
    basis: &SpectralBasis,
    coupling: &CouplingMatrix,
    schedule: &Schedule,
    initial_index: usize,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let dim = validate_run(basis, coupling, schedule, initial_index, t_end, dt)?;
    let energies: Vec<f64> = basis.states()[..dim].iter().map(|s| s.energy).collect();
    let n_steps = ((t_end / dt).round() as usize).max(1);

    // Schroedinger picture amplitudes
    let mut c = vec![Complex64::ZERO; dim];
    c[initial_index] = Complex64::ONE;
    let mut recorder = Recorder::new(dim, n_steps + 1, initial_index, energies.clone());
    recorder.record(0.0, &c)?;

    let mut h = Array2::<f64>::zeros((dim, dim));
    let mut work = vec![Complex64::ZERO; dim];
    for step in 0..n_steps {
        let t_mid = (step as f64 + 0.5) * dt;
        let g = schedule.time_signal(t_mid);
        for j in 0..dim {
            for i in 0..dim {
                h[(j, i)] = g * coupling.element(j, i);
            }
            h[(j, j)] += energies[j];
        }
        let eig = symmetric_eigen(&h);
        let q = &eig.vectors;
        // work = Q^T c
        for (k, w) in work.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (i, ci) in c.iter().enumerate() {
                acc += q[(i, k)] * ci;
            }
            *w = acc;
        }
        // rotate eigenphases and map back
        for (k, w) in work.iter_mut().enumerate() {
            let (s, co) = (eig.values[k] * dt / HBAR_C).sin_cos();
            *w *= Complex64::new(co, -s);
        }
        for (i, ci) in c.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (k, w) in work.iter().enumerate() {
                acc += q[(i, k)] * w;
            }
            *ci = acc;
        }
        recorder.record((step + 1) as f64 * dt, &c)?;
    }
    Ok(recorder.finish())
}

struct Recorder {
    initial_index: usize,
    energies: Vec<f64>,
    times: Vec<f64>,
    occupations: Vec<f64>,
    norm_defect: Vec<f64>,
    mean_energy: Vec<f64>,
    dim: usize,
}

impl Recorder {
    fn new(dim: usize, capacity: usize, initial_index: usize, energies: Vec<f64>) -> Self {
        Self {
            initial_index,
            energies,
            times: Vec::with_capacity(capacity),
            occupations: Vec::with_capacity(capacity * dim),
            norm_defect: Vec::with_capacity(capacity),
            mean_energy: Vec::with_capacity(capacity),
            dim,
        }
    }

    fn record(&mut self, t: f64, c: &[Complex64]) -> Result<()> {
        let mut total = 0.0;
        let mut weighted = 0.0;
        for (ci, e) in c.iter().zip(&self.energies) {
            let w = ci.norm_sqr();
            self.occupations.push(w);
            total += w;
            weighted += w * e;
        }
        let defect = 1.0 - total;
        if defect.abs() > NORM_DEFECT_LIMIT {
            return Err(Error::NormDefect { t, defect });
        }
        self.times.push(t);
        self.norm_defect.push(defect);
        self.mean_energy.push(weighted / total);
        Ok(())
    }

    fn finish(self) -> Trajectory {
        let n_samples = self.times.len();
        Trajectory {
            initial_index: self.initial_index,
            times: self.times,
            occupations: Array2::from_shape_vec((n_samples, self.dim), self.occupations)
                .expect("consistent sample shape"),
            norm_defect: self.norm_defect,
            mean_energy: self.mean_energy,
        }
    }
}
