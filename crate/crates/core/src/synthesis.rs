//! Evaluation of expansions `Σ_m c_m Y_k^m` on every node of a grid.
//!
//! On ring `i` the expansion is a trigonometric polynomial in θ with
//! coefficients `c_m L_m(t_i)`, so one inverse FFT per ring and per row
//! evaluates it on all `n_θ` longitudes.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::quadrature::QuadratureGrid;
use crate::special::order_sweep_into;

/// `L_m(t)` for `m = -k..=k`, so that `Y_k^m(φ, θ) = L_m(cos φ) e^{imθ}`.
pub(crate) fn signed_legendre_row(k: usize, t: f64, s: f64, out: &mut [f64], scratch: &mut [f64]) {
    order_sweep_into(k, t, s, scratch);
    for m in 0..=k {
        out[k + m] = scratch[m];
        if m > 0 {
            let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
            out[k - m] = sign * scratch[m];
        }
    }
}

/// Row-major coefficient rows of length `2k+1`.
pub(crate) struct RowSynthesizer<'a> {
    k: usize,
    rows: usize,
    coeffs: &'a [Complex64],
    fft: Arc<dyn Fft<f64>>,
    n_theta: usize,
}

impl<'a> RowSynthesizer<'a> {
    pub(crate) fn new(k: usize, coeffs: &'a [Complex64], grid: &QuadratureGrid) -> Self {
        let width = 2 * k + 1;
        assert_eq!(
            coeffs.len() % width,
            0,
            "coefficient rows must have length 2k+1"
        );
        let n_theta = grid.n_theta();
        let fft = FftPlanner::new().plan_fft_inverse(n_theta);
        Self {
            k,
            rows: coeffs.len() / width,
            coeffs,
            fft,
            n_theta,
        }
    }

    /// Values of every row on ring `i`, laid out `rows × n_θ`.
    pub(crate) fn ring(&self, grid: &QuadratureGrid, ring: usize) -> Vec<Complex64> {
        let k = self.k;
        let width = 2 * k + 1;
        let n = self.n_theta;
        let mut legendre = vec![0.0; width];
        let mut scratch = vec![0.0; k + 1];
        signed_legendre_row(
            k,
            grid.cos_phi()[ring],
            grid.sin_phi()[ring],
            &mut legendre,
            &mut scratch,
        );
        let mut buf = vec![Complex64::new(0.0, 0.0); self.rows * n];
        for r in 0..self.rows {
            let row = &self.coeffs[r * width..(r + 1) * width];
            let spec = &mut buf[r * n..(r + 1) * n];
            for (idx, (c, l)) in row.iter().zip(&legendre).enumerate() {
                let m = idx as i64 - k as i64;
                let bin = m.rem_euclid(n as i64) as usize;
                spec[bin] += c * l;
            }
        }
        self.fft.process(&mut buf);
        buf
    }

    /// Parallel map over rings, results in ring order.
    pub(crate) fn map_rings<T, F>(&self, grid: &QuadratureGrid, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize, &[Complex64]) -> T + Sync,
    {
        (0..grid.n_phi())
            .into_par_iter()
            .map(|i| {
                let vals = self.ring(grid, i);
                f(i, &vals)
            })
            .collect()
    }

    pub(crate) fn rows(&self) -> usize {
        self.rows
    }

    pub(crate) fn n_theta(&self) -> usize {
        self.n_theta
    }
}

/// Per-row `∫|f|² dV` and `∫|f|⁴ dV`.
pub(crate) fn row_moments(
    k: usize,
    coeffs: &[Complex64],
    grid: &QuadratureGrid,
) -> (Vec<f64>, Vec<f64>) {
    let synth = RowSynthesizer::new(k, coeffs, grid);
    let rows = synth.rows();
    let n = synth.n_theta();
    let per_ring = synth.map_rings(grid, |i, vals| {
        let w = grid.point_weight(i);
        let mut out = Vec::with_capacity(2 * rows);
        for r in 0..rows {
            let chunk = &vals[r * n..(r + 1) * n];
            let mut s2 = crate::numeric::NeumaierSum::default();
            let mut s4 = crate::numeric::NeumaierSum::default();
            for v in chunk {
                let a = v.norm_sqr();
                s2.add(a);
                s4.add(a * a);
            }
            out.push(w * s2.value());
            out.push(w * s4.value());
        }
        out
    });
    let mut l2 = Vec::with_capacity(rows);
    let mut l4 = Vec::with_capacity(rows);
    for r in 0..rows {
        l2.push(crate::numeric::compensated_sum(
            per_ring.iter().map(|v| v[2 * r]),
        ));
        l4.push(crate::numeric::compensated_sum(
            per_ring.iter().map(|v| v[2 * r + 1]),
        ));
    }
    (l2, l4)
}
