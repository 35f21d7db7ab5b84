//! Uniform grid on [-l, l] with composite Simpson weights.
//!
//! One grid is shared by eigenstate normalization checks, orthonormality
//! validation, and coupling-matrix assembly, so their quadrature errors are
//! commensurate. The weight vector is kept exactly symmetric under index
//! reversal; integrals of odd functions over the symmetric grid then cancel
//! pairwise down to rounding, which is what makes the parity selection rule
//! in the coupling matrix exact in practice.

use crate::error::{Error, Result};

/// Uniform quadrature grid with per-point weights.
#[derive(Debug, Clone)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
    spacing: f64,
}

impl Grid {
    /// Uniform grid of `n_points` on [-half_length, half_length] with
    /// composite Simpson weights.
    ///
    /// An even number of intervals uses plain composite Simpson. An odd
    /// number blends Simpson with a 3/8 rule at one end; averaging the
    /// head-blend and tail-blend variants restores weight symmetry at the
    /// same order of accuracy.
    pub fn uniform(half_length: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Config(format!(
                "grid needs at least 3 points, got {n_points}"
            )));
        }
        if !(half_length > 0.0) {
            return Err(Error::Config(format!(
                "grid half-length must be positive, got {half_length}"
            )));
        }
        let spacing = 2.0 * half_length / (n_points - 1) as f64;
        let points = (0..n_points)
            .map(|i| -half_length + i as f64 * spacing)
            .collect();
        let weights = symmetric_simpson_weights(n_points, spacing);
        Ok(Self {
            points,
            weights,
            spacing,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Integrate samples taken on this grid.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        assert_eq!(samples.len(), self.weights.len());
        self.weights
            .iter()
            .zip(samples)
            .map(|(w, f)| w * f)
            .sum()
    }

    /// Integrate the product of two sample vectors (an overlap integral).
    pub fn integrate_product(&self, f: &[f64], g: &[f64]) -> f64 {
        assert_eq!(f.len(), self.weights.len());
        assert_eq!(g.len(), self.weights.len());
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }
}

fn simpson_blend_weights(n_points: usize, h: f64, three_eighths_at_head: bool) -> Vec<f64> {
    let mut w = vec![0.0; n_points];
    let n_intervals = n_points - 1;
    if n_intervals % 2 == 0 {
        accumulate_simpson(&mut w, 0, n_intervals, h);
    } else if three_eighths_at_head {
        accumulate_three_eighths(&mut w, 0, h);
        accumulate_simpson(&mut w, 3, n_intervals - 3, h);
    } else {
        accumulate_simpson(&mut w, 0, n_intervals - 3, h);
        accumulate_three_eighths(&mut w, n_intervals - 3, h);
    }
    w
}

fn symmetric_simpson_weights(n_points: usize, h: f64) -> Vec<f64> {
    let n_intervals = n_points - 1;
    if n_intervals % 2 == 0 {
        return simpson_blend_weights(n_points, h, false);
    }
    // 4-point minimum for the 3/8 rule
    assert!(n_points >= 4);
    let head = simpson_blend_weights(n_points, h, true);
    let tail = simpson_blend_weights(n_points, h, false);
    head.iter().zip(&tail).map(|(a, b)| 0.5 * (a + b)).collect()
}

fn accumulate_simpson(w: &mut [f64], start: usize, n_intervals: usize, h: f64) {
    debug_assert!(n_intervals % 2 == 0);
    let third = h / 3.0;
    let mut i = start;
    while i + 2 <= start + n_intervals {
        w[i] += third;
        w[i + 1] += 4.0 * third;
        w[i + 2] += third;
        i += 2;
    }
}

fn accumulate_three_eighths(w: &mut [f64], start: usize, h: f64) {
    let c = 3.0 * h / 8.0;
    w[start] += c;
    w[start + 1] += 3.0 * c;
    w[start + 2] += 3.0 * c;
    w[start + 3] += c;
}
