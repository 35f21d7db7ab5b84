//! Eigensolver for the well-in-a-box: transcendental matching conditions for
//! the energy eigenvalues and piecewise closed forms for the normalized
//! parity eigenfunctions.
//!
//! Bound states (E < 0) decay exponentially outside the well; box states
//! (E > 0) oscillate everywhere. Both branches reduce to real matching
//! conditions between the inner wavenumber `k2` and the outer decay constant
//! or wavenumber `k1`. The solver brackets sign changes of pole-free forms of
//! those conditions on a fine wavenumber scan and bisects each bracket to
//! machine precision; derivative-based iteration is unsafe here because the
//! raw tan/cot forms have poles between roots.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::{WellConfig, HBAR_C};
use crate::par;
use crate::quadrature::Grid;

/// Default spatial sampling resolution for [`build_basis`].
pub const DEFAULT_GRID_POINTS: usize = 8192;

/// Minimum accepted sampling resolution.
pub const MIN_GRID_POINTS: usize = 2001;

/// Orthonormality tolerance enforced at basis construction.
pub const ORTHO_TOLERANCE: f64 = 1e-6;

/// Residual tolerance accepted by [`build_state`] for a claimed eigenvalue.
const RESIDUAL_ACCEPT: f64 = 1e-8;

/// Reflection symmetry of an eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl Parity {
    pub fn label(self) -> &'static str {
        match self {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Parity::Symmetric => 1.0,
            Parity::Antisymmetric => -1.0,
        }
    }
}

/// One normalized stationary state of the static well.
///
/// `k1` is the outer decay constant for E < 0 and the outer wavenumber for
/// E > 0; `k2` is the wavenumber inside the well. `outer_amp` is the overall
/// normalization constant multiplying the outer-region shape (its sign fixes
/// the global convention: the wavefunction rises positive away from the left
/// wall), and `inner_amp` the coefficient of the inner cosine or sine.
#[derive(Debug, Clone)]
pub struct EigenState {
    pub parity: Parity,
    /// Energy in MeV.
    pub energy: f64,
    /// Outer wavenumber or decay constant, 1/fm.
    pub k1: f64,
    /// Inner wavenumber, 1/fm.
    pub k2: f64,
    /// Normalization amplitude of the outer branch, 1/sqrt(fm).
    pub outer_amp: f64,
    /// Amplitude of the inner cos/sin branch, 1/sqrt(fm).
    pub inner_amp: f64,
    a: f64,
    l: f64,
}

impl EigenState {
    /// Left outer shape with unit amplitude.
    fn outer_left_shape(&self, x: f64) -> f64 {
        if self.energy < 0.0 {
            (self.k1 * x).exp() - (-self.k1 * (2.0 * self.l + x)).exp()
        } else {
            (self.k1 * (x + self.l)).sin()
        }
    }

    fn inner_shape(&self, x: f64) -> f64 {
        match self.parity {
            Parity::Symmetric => (self.k2 * x).cos(),
            Parity::Antisymmetric => (self.k2 * x).sin(),
        }
    }

    fn evaluate_unchecked(&self, x: f64) -> f64 {
        if x <= -self.a {
            self.outer_amp * self.outer_left_shape(x)
        } else if x >= self.a {
            self.parity.sign() * self.outer_amp * self.outer_left_shape(-x)
        } else {
            self.inner_amp * self.inner_shape(x)
        }
    }
}

/// Evaluate a state's wavefunction at `x`; positions outside the box are a
/// domain error.
pub fn evaluate_psi(state: &EigenState, x: f64) -> Result<f64> {
    if x.abs() > state.l {
        return Err(Error::OutsideBox {
            x,
            box_half_length: state.l,
        });
    }
    Ok(state.evaluate_unchecked(x))
}

// Pole-free matching functions. A root of each function in the scanned
// wavenumber is an eigenvalue of the corresponding parity.
//
// Bound branch, scanned in k2 on (0, w): with u = k1 (l - a) and
// q = (1 - e^{-2u}) / k1 (kept stable near u -> 0 via expm1),
//   symmetric:     k2 sin(k2 a) q - cos(k2 a) (1 + e^{-2u})
//   antisymmetric: k2 cos(k2 a) q + sin(k2 a) (1 + e^{-2u})
//
// Scattering branch, scanned in k1 on (0, inf):
//   symmetric:     k2 sin(k2 a) sin(k1 (l-a)) - k1 cos(k2 a) cos(k1 (l-a))
//   antisymmetric: k2 cos(k2 a) sin(k1 (l-a)) + k1 sin(k2 a) cos(k1 (l-a))

fn bound_matching(cfg: &WellConfig, k2: f64, parity: Parity) -> f64 {
    let w = cfg.well_wavenumber();
    let k1 = (w * w - k2 * k2).max(0.0).sqrt();
    let span = cfg.l - cfg.a;
    let u = k1 * span;
    // (1 - e^{-2u}) / k1, finite as k1 -> 0
    let q = if u > 1e-8 {
        -(-2.0 * u).exp_m1() / k1
    } else {
        span * (2.0 - 2.0 * u + 4.0 * u * u / 3.0)
    };
    let plus = 1.0 + (-2.0 * u).exp();
    match parity {
        Parity::Symmetric => k2 * (k2 * cfg.a).sin() * q - (k2 * cfg.a).cos() * plus,
        Parity::Antisymmetric => k2 * (k2 * cfg.a).cos() * q + (k2 * cfg.a).sin() * plus,
    }
}

fn scattering_matching(cfg: &WellConfig, k1: f64, parity: Parity) -> f64 {
    let w = cfg.well_wavenumber();
    let k2 = (k1 * k1 + w * w).sqrt();
    let (s1, c1) = (k1 * (cfg.l - cfg.a)).sin_cos();
    let (s2, c2) = (k2 * cfg.a).sin_cos();
    match parity {
        Parity::Symmetric => k2 * s2 * s1 - k1 * c2 * c1,
        Parity::Antisymmetric => k2 * c2 * s1 + k1 * s2 * c1,
    }
}

/// Normalized matching residual at a claimed eigenvalue, dimensionless.
fn matching_residual(cfg: &WellConfig, energy: f64, parity: Parity) -> f64 {
    let (k1, k2) = wavenumbers(cfg, energy);
    let scale = k1 + k2 + 1.0 / cfg.l;
    let raw = if energy < 0.0 {
        bound_matching(cfg, k2, parity)
    } else {
        scattering_matching(cfg, k1, parity)
    };
    (raw / scale).abs()
}

fn wavenumbers(cfg: &WellConfig, energy: f64) -> (f64, f64) {
    let kf = cfg.kinematic_factor();
    let k1 = (kf * energy.abs()).sqrt();
    let k2 = (kf * (energy - cfg.v0)).sqrt();
    (k1, k2)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo * fhi > 0.0 {
        return Err(Error::RootBracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo) < 1e-16 * mid.abs() {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solve for the `n_basis` lowest eigenvalues with their parities, sorted by
/// ascending energy.
pub fn solve_eigenvalues(cfg: &WellConfig) -> Result<Vec<(f64, Parity)>> {
    cfg.validate()?;
    let mut roots: Vec<(f64, Parity)> = Vec::with_capacity(cfg.n_basis + 4);
    let kf = cfg.kinematic_factor();
    let w = cfg.well_wavenumber();
    let span = cfg.l - cfg.a;

    // Bound branch: scan the inner wavenumber. The matching functions
    // oscillate on the scale pi/a in k2 and vary smoothly otherwise.
    let k2_lo = w * 1e-9;
    let k2_hi = w * (1.0 - 1e-12);
    if k2_hi > k2_lo {
        let step = (std::f64::consts::PI / (8.0 * cfg.a)).min((k2_hi - k2_lo) / 64.0);
        for parity in [Parity::Symmetric, Parity::Antisymmetric] {
            let f = |k2: f64| bound_matching(cfg, k2, parity);
            let mut k = k2_lo;
            let mut fk = f(k);
            while k < k2_hi {
                let k_next = (k + step).min(k2_hi);
                let f_next = f(k_next);
                if fk * f_next <= 0.0 && (fk != 0.0 || f_next != 0.0) {
                    let k2_root = bisect(&f, k, k_next)?;
                    let energy = -(w * w - k2_root * k2_root).max(0.0) / kf;
                    roots.push((energy, parity));
                }
                k = k_next;
                fk = f_next;
            }
        }
    }

    // Scattering branch: scan the outer wavenumber in steps small against
    // the box-quantization spacing pi/(l - a). The inner phase k2 a moves
    // slower than k1 (l - a) because dk2/dk1 < 1, so one step size covers
    // both oscillation scales.
    let step = std::f64::consts::PI / (8.0 * span);
    let needed = cfg.n_basis;
    let ceiling = (needed as f64 + 4.0) * std::f64::consts::PI / span.min(2.0 * cfg.a) * 2.0;
    let mut k = step * 1e-6;
    let mut prev = [
        scattering_matching(cfg, k, Parity::Symmetric),
        scattering_matching(cfg, k, Parity::Antisymmetric),
    ];
    while roots.len() < needed + 2 {
        let k_next = k + step;
        if k_next > ceiling {
            if roots.len() >= needed {
                break;
            }
            return Err(Error::RootCount {
                found: roots.len(),
                required: needed,
                ceiling,
            });
        }
        for (idx, parity) in [Parity::Symmetric, Parity::Antisymmetric].into_iter().enumerate() {
            let f = |k1: f64| scattering_matching(cfg, k1, parity);
            let f_next = f(k_next);
            if prev[idx] * f_next <= 0.0 && (prev[idx] != 0.0 || f_next != 0.0) {
                let k1_root = bisect(&f, k, k_next)?;
                roots.push((k1_root * k1_root / kf, parity));
            }
            prev[idx] = f_next;
        }
        k = k_next;
    }

    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.truncate(cfg.n_basis);
    if roots.len() < cfg.n_basis {
        return Err(Error::RootCount {
            found: roots.len(),
            required: cfg.n_basis,
            ceiling,
        });
    }
    Ok(roots)
}

/// Construct the normalized eigenfunction for a solved `(energy, parity)`
/// pair.
///
/// Normalization uses the closed-form piecewise integrals of the squared
/// branches, so the unit norm holds to machine precision on any grid. The
/// global sign makes the wavefunction positive just inside the left wall.
pub fn build_state(cfg: &WellConfig, energy: f64, parity: Parity) -> Result<EigenState> {
    cfg.validate()?;
    let residual = matching_residual(cfg, energy, parity);
    if !(residual <= RESIDUAL_ACCEPT) {
        return Err(Error::MatchingResidual {
            energy,
            parity: parity.label(),
            residual,
        });
    }
    let (k1, k2) = wavenumbers(cfg, energy);
    let (a, l) = (cfg.a, cfg.l);

    // Unnormalized coefficients (c_outer, c_inner) of the outer-left shape
    // and the inner cos/sin, from value continuity at the well edge. When
    // the continuity factors are both small the parameterization with the
    // larger denominator is used; at a genuine root they cannot both vanish
    // unless the node sits exactly on the edge.
    let (mut c_outer, mut c_inner) = if energy < 0.0 {
        let d = (-k1 * a).exp() - (k1 * (a - 2.0 * l)).exp();
        match parity {
            Parity::Symmetric => (1.0, d / (k2 * a).cos()),
            Parity::Antisymmetric => (1.0, -d / (k2 * a).sin()),
        }
    } else {
        // c1 * sin(k1 (l-a)) = c2 * [cos or sin](k2 a) at |x| = a
        let outer_at_a = (k1 * (l - a)).sin();
        let inner_at_a = match parity {
            Parity::Symmetric => (k2 * a).cos(),
            Parity::Antisymmetric => (k2 * a).sin(),
        };
        let (c1, c2) = if inner_at_a.abs() >= outer_at_a.abs() {
            (1.0, outer_at_a / inner_at_a)
        } else {
            (inner_at_a / outer_at_a, 1.0)
        };
        // odd states carry -c1 on the left outer branch in the mirrored form
        match parity {
            Parity::Symmetric => (c1, c2),
            Parity::Antisymmetric => (-c1, c2),
        }
    };

    // fix the global sign: outer-left slope at -l must be positive
    if c_outer < 0.0 {
        c_outer = -c_outer;
        c_inner = -c_inner;
    }

    let norm_sq = norm_integral(cfg, energy, parity, k1, k2, c_outer, c_inner);
    let amp = 1.0 / norm_sq.sqrt();

    Ok(EigenState {
        parity,
        energy,
        k1,
        k2,
        outer_amp: amp * c_outer,
        inner_amp: amp * c_inner,
        a,
        l,
    })
}

/// Closed-form norm of the unnormalized piecewise state.
fn norm_integral(
    cfg: &WellConfig,
    energy: f64,
    parity: Parity,
    k1: f64,
    k2: f64,
    c_outer: f64,
    c_inner: f64,
) -> f64 {
    let (a, l) = (cfg.a, cfg.l);
    let outer = if energy < 0.0 {
        // int_a^l (e^{-k1 x} - e^{k1 (x - 2l)})^2 dx
        let e2a = (-2.0 * k1 * a).exp();
        let e2l = (-2.0 * k1 * l).exp();
        let e_mix = (2.0 * k1 * (a - 2.0 * l)).exp();
        (e2a - e2l) / (2.0 * k1) - 2.0 * (l - a) * e2l + (e2l - e_mix) / (2.0 * k1)
    } else {
        // int_a^l sin^2(k1 (l - x)) dx
        0.5 * (l - a) - (2.0 * k1 * (l - a)).sin() / (4.0 * k1)
    };
    let half_osc = (2.0 * k2 * a).sin() / (2.0 * k2);
    let inner = match parity {
        Parity::Symmetric => a + half_osc,
        Parity::Antisymmetric => a - half_osc,
    };
    2.0 * c_outer * c_outer * outer + c_inner * c_inner * inner
}

/// Truncated eigenbasis with sampled wavefunctions on a shared grid.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    cfg: WellConfig,
    states: Vec<EigenState>,
    grid: Grid,
    /// Row n holds psi_n sampled on the grid.
    sampled: Array2<f64>,
    ortho_defect: f64,
}

impl SpectralBasis {
    pub fn cfg(&self) -> &WellConfig {
        &self.cfg
    }

    pub fn n_basis(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[EigenState] {
        &self.states
    }

    pub fn state(&self, n: usize) -> &EigenState {
        &self.states[n]
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }

    /// Level phase frequencies E_n / hbar c in 1/fm; differences give the
    /// transition frequencies.
    pub fn level_frequencies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy / HBAR_C).collect()
    }

    /// Sampled psi_n on the grid.
    pub fn psi_row(&self, n: usize) -> &[f64] {
        self.sampled.row(n).to_slice().expect("row-major basis")
    }

    pub fn sampled(&self) -> &Array2<f64> {
        &self.sampled
    }

    /// Largest pairwise orthonormality defect measured at construction.
    pub fn ortho_defect(&self) -> f64 {
        self.ortho_defect
    }

    /// Sign changes of psi_n across the open interval (-l, l).
    pub fn node_count(&self, n: usize) -> usize {
        let row = self.psi_row(n);
        let mut nodes = 0;
        let mut last = 0.0f64;
        for &v in &row[1..row.len() - 1] {
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                nodes += 1;
            }
            last = v;
        }
        nodes
    }
}

/// Solve, build, and sample the full truncated basis; validates pairwise
/// orthonormality on the grid before returning.
pub fn build_basis(cfg: &WellConfig, grid_points: usize) -> Result<SpectralBasis> {
    cfg.validate()?;
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::Config(format!(
            "grid_points must be at least {MIN_GRID_POINTS}, got {grid_points}"
        )));
    }
    let roots = solve_eigenvalues(cfg)?;
    let states = par::try_indexed_map(roots.len(), |n| {
        let (energy, parity) = roots[n];
        build_state(cfg, energy, parity)
    })?;

    let grid = Grid::uniform(cfg.l, grid_points)?;
    let n = states.len();
    let rows = par::indexed_map(n, |i| {
        let state = &states[i];
        grid.points()
            .iter()
            .map(|&x| state.evaluate_unchecked(x))
            .collect::<Vec<f64>>()
    });
    let mut sampled = Array2::zeros((n, grid_points));
    for (i, row) in rows.into_iter().enumerate() {
        sampled.row_mut(i).assign(&ndarray::ArrayView1::from(&row));
    }

    let basis = SpectralBasis {
        cfg: *cfg,
        states,
        grid,
        sampled,
        ortho_defect: 0.0,
    };
    let defect = max_orthonormality_defect(&basis);
    if !(defect <= ORTHO_TOLERANCE) {
        return Err(Error::Orthonormality {
            defect,
            tolerance: ORTHO_TOLERANCE,
        });
    }
    Ok(SpectralBasis {
        ortho_defect: defect,
        ..basis
    })
}

fn max_orthonormality_defect(basis: &SpectralBasis) -> f64 {
    let n = basis.n_basis();
    let defects = par::indexed_map(n, |j| {
        let pj = basis.psi_row(j);
        let mut worst = 0.0f64;
        for i in j..n {
            let overlap = basis.grid.integrate_product(pj, basis.psi_row(i));
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((overlap - target).abs());
        }
        worst
    });
    defects.into_iter().fold(0.0, f64::max)
}
