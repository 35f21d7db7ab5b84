//! Time-independent spatial coupling matrix between eigenstates and the
//! drive profile.
//!
//! Because every schedule factorizes as `spatial(x) * g(t)`, the full
//! time-dependent coupling is `g(t) * M` with
//! `M[j][n] = amplitude * int psi_j(x) exp(-(x - x0)^2 / (2 sigma_x^2)) psi_n(x) dx`,
//! evaluated by the same quadrature rule the basis was validated with.

use ndarray::Array2;

use crate::eigen::SpectralBasis;
use crate::error::{Error, Result};
use crate::par;
use crate::pulses::SpatialProfile;

/// Dense real symmetric coupling matrix in MeV.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    matrix: Array2<f64>,
    profile: SpatialProfile,
}

impl CouplingMatrix {
    pub fn n_basis(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn profile(&self) -> &SpatialProfile {
        &self.profile
    }

    pub fn element(&self, j: usize, n: usize) -> f64 {
        self.matrix[(j, n)]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        self.matrix.row(j).to_slice().expect("row-major matrix")
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// View of the leading `k x k` block, for truncated verification runs.
    pub fn truncated(&self, k: usize) -> CouplingMatrix {
        CouplingMatrix {
            matrix: self
                .matrix
                .slice(ndarray::s![..k, ..k])
                .to_owned(),
            profile: self.profile,
        }
    }
}

/// Compute the coupling matrix of `profile` in the given basis.
///
/// The profile must be resolved by the sampling grid; a width under four
/// grid spacings is rejected.
pub fn compute_coupling(basis: &SpectralBasis, profile: &SpatialProfile) -> Result<CouplingMatrix> {
    let spacing = basis.grid().spacing();
    if profile.sigma_x < 4.0 * spacing {
        return Err(Error::GridResolution {
            sigma_x: profile.sigma_x,
            spacing,
        });
    }
    let n = basis.n_basis();
    let n_grid = basis.grid().len();

    // weights folded with the profile once; every entry is then one
    // triple-product sum
    let weighted: Vec<f64> = basis
        .grid()
        .points()
        .iter()
        .zip(basis.grid().weights())
        .map(|(&x, &w)| w * profile.evaluate(x))
        .collect();

    let rows = par::indexed_map(n, |j| {
        let pj = basis.psi_row(j);
        let mut row = vec![0.0; n];
        for i in j..n {
            let pi = basis.psi_row(i);
            let mut acc = 0.0;
            for k in 0..n_grid {
                acc += weighted[k] * pj[k] * pi[k];
            }
            row[i] = acc;
        }
        row
    });

    // mirror the upper triangle so symmetry is exact, not just to quadrature
    let mut matrix = Array2::zeros((n, n));
    for (j, row) in rows.into_iter().enumerate() {
        for i in j..n {
            matrix[(j, i)] = row[i];
            matrix[(i, j)] = row[i];
        }
    }
    Ok(CouplingMatrix {
        matrix,
        profile: *profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::build_basis;
    use crate::model::WellConfig;
    use crate::quadrature::Grid;
    use std::sync::OnceLock;

    fn basis() -> &'static SpectralBasis {
        static BASIS: OnceLock<SpectralBasis> = OnceLock::new();
        BASIS.get_or_init(|| {
            let cfg = WellConfig {
                n_basis: 30,
                ..WellConfig::deuteron()
            };
            build_basis(&cfg, 4097).unwrap()
        })
    }

    #[test]
    fn symmetry_is_exact() {
        let m = compute_coupling(basis(), &SpatialProfile::new(100.0, 0.3, 1.2).unwrap())
            .unwrap();
        for j in 0..m.n_basis() {
            for i in 0..m.n_basis() {
                assert_eq!(m.element(j, i), m.element(i, j));
            }
        }
    }

    #[test]
    fn centered_profile_blocks_cross_parity() {
        let m = compute_coupling(basis(), &SpatialProfile::centered(100.0, 1.2).unwrap())
            .unwrap();
        let b = basis();
        for j in 0..m.n_basis() {
            for i in 0..m.n_basis() {
                if b.state(j).parity != b.state(i).parity {
                    assert!(
                        m.element(j, i).abs() <= 1e-8 * 100.0,
                        "M[{j}][{i}] = {}",
                        m.element(j, i)
                    );
                }
            }
        }
        assert!(m.element(0, 0) > 0.0);
    }

    #[test]
    fn off_center_profile_couples_parities() {
        let m = compute_coupling(basis(), &SpatialProfile::new(100.0, 0.3, 1.2).unwrap())
            .unwrap();
        let b = basis();
        let mut max_cross = 0.0f64;
        for j in 0..m.n_basis() {
            for i in 0..m.n_basis() {
                if b.state(j).parity != b.state(i).parity {
                    max_cross = max_cross.max(m.element(j, i).abs());
                }
            }
        }
        assert!(max_cross > 1e-3, "max cross-parity entry {max_cross}");
    }

    #[test]
    fn wide_profile_approaches_identity_times_amplitude() {
        let m = compute_coupling(basis(), &SpatialProfile::centered(100.0, 1e4).unwrap())
            .unwrap();
        for j in 0..m.n_basis() {
            for i in 0..m.n_basis() {
                let target = if i == j { 100.0 } else { 0.0 };
                assert!(
                    (m.element(j, i) - target).abs() <= 1e-3 * 100.0,
                    "M[{j}][{i}] = {}",
                    m.element(j, i)
                );
            }
        }
    }

    #[test]
    fn scaling_in_amplitude_is_exact() {
        let p1 = SpatialProfile::centered(100.0, 1.2).unwrap();
        let p2 = SpatialProfile::centered(200.0, 1.2).unwrap();
        let m1 = compute_coupling(basis(), &p1).unwrap();
        let m2 = compute_coupling(basis(), &p2).unwrap();
        for j in 0..m1.n_basis() {
            for i in 0..m1.n_basis() {
                assert_eq!(2.0 * m1.element(j, i), m2.element(j, i));
            }
        }
    }

    #[test]
    fn element_matches_refined_quadrature_oracle() {
        // independent oracle: the same integral on a 10x finer Simpson grid,
        // evaluating the piecewise closed forms directly
        let b = basis();
        let profile = SpatialProfile::centered(100.0, 1.2).unwrap();
        let m = compute_coupling(b, &profile).unwrap();
        let fine = Grid::uniform(b.cfg().l, (b.grid().len() - 1) * 10 + 1).unwrap();
        for (j, i) in [(0usize, 0usize), (0, 2), (5, 9), (0, 24)] {
            let sj = b.state(j);
            let si = b.state(i);
            let oracle: f64 = fine
                .points()
                .iter()
                .zip(fine.weights())
                .map(|(&x, &w)| {
                    w * profile.evaluate(x)
                        * crate::eigen::evaluate_psi(sj, x).unwrap()
                        * crate::eigen::evaluate_psi(si, x).unwrap()
                })
                .sum();
            let got = m.element(j, i);
            assert!(
                (got - oracle).abs() <= 1e-7 * oracle.abs().max(1e-6),
                "M[{j}][{i}]: {got} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn narrow_profile_needs_fine_grid() {
        let err = compute_coupling(basis(), &SpatialProfile::centered(100.0, 0.05).unwrap());
        assert!(matches!(err, Err(Error::GridResolution { .. })));
    }
}
