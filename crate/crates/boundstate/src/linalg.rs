//! Cyclic Jacobi eigendecomposition for small dense real symmetric matrices.
//!
//! Used by the matrix-exponential reference propagator, which diagonalizes
//! the frozen Hamiltonian once per step. Sweep until the off-diagonal norm
//! is at rounding level; for the sizes involved (a handful of states) this
//! converges in a few sweeps.

use ndarray::Array2;

/// Eigenvalues and orthonormal eigenvectors (columns) of a symmetric matrix.
pub(crate) struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

pub(crate) fn symmetric_eigen(matrix: &Array2<f64>) -> SymmetricEigen {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols());
    let mut a = matrix.clone();
    let mut v = Array2::eye(n);

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * n as f64 {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = 0.5 * (aqq - app) / apq;
                // smaller-magnitude root of t^2 + 2 theta t - 1 = 0
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let values = (0..n).map(|i| a[(i, i)]).collect();
    SymmetricEigen { values, vectors: v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn diagonalizes_known_matrix() {
        let m = arr2(&[[2.0, 1.0], [1.0, 2.0]]);
        let eig = symmetric_eigen(&m);
        let mut vals = eig.values.clone();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn reconstructs_and_is_orthogonal() {
        // fixed pseudo-random symmetric matrix
        let n = 9;
        let mut m = Array2::zeros((n, n));
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            for j in i..n {
                let x = next();
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        let eig = symmetric_eigen(&m);
        let v = &eig.vectors;
        let vt = v.t();
        let gram = vt.dot(v);
        let mut recon = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += v[(i, k)] * eig.values[k] * v[(j, k)];
                }
                recon[(i, j)] = acc;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - id).abs() < 1e-12);
                assert!((recon[(i, j)] - m[(i, j)]).abs() < 1e-12);
            }
        }
    }
}
