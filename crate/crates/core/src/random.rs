//! Haar-random orthonormal bases of the degree-k eigenspace and the
//! `Λ⁴_k` functional `Σ_j ‖φ_j‖⁴_{L⁴}`.
//!
//! Bases are stored in coefficient space: row `j` of a [`CoefficientBasis`]
//! expands `φ_j` over `Y_k^{-k}, …, Y_k^k`. A unitary `U` acting on the
//! standard basis gives `φ_j = Σ_m U_{jm} Y_k^m`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numeric::compensated_sum;
use crate::quadrature::QuadratureGrid;
use crate::synthesis::row_moments;

/// Max entry deviation of `U†U` from the identity accepted for a sample.
pub const UNITARY_TOLERANCE: f64 = 1e-12;
/// Max deviation of a coefficient Gram matrix from the identity.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;
/// Accepted deviation of a synthesized row's L² norm from 1.
pub const ROW_NORM_TOLERANCE: f64 = 1e-6;

/// Master seed with derived per-trial seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// `master ⊕ splitmix64(index)`.
    pub fn trial_seed(&self, index: u64) -> u64 {
        self.0 ^ splitmix64(index)
    }

    pub fn trial_rng(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.trial_seed(index))
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard complex Gaussian, `E|g|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid("unitary", "matrix is not square"));
        }
        let u = Self { matrix };
        let defect = u.unitarity_defect();
        if defect > UNITARY_TOLERANCE {
            return Err(invalid(
                "unitary",
                format!("U†U deviates from I by {defect:e}"),
            ));
        }
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// `max |(U†U − I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        identity_defect(&(self.matrix.adjoint() * &self.matrix))
    }
}

pub(crate) fn identity_defect(g: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let e = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - e).norm());
        }
    }
    worst
}

/// Haar unitary of size `n`, deterministic in `seed`.
pub fn sample_haar_unitary(n: usize, seed: u64) -> UnitaryMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_haar_unitary_with(n, &mut rng)
}

/// Haar unitary from a Ginibre matrix: `G = QR`, then column `j` of `Q` is
/// multiplied by `R_jj/|R_jj|` so that the factorization has a positive
/// diagonal and the law of `Q` is exactly Haar.
pub fn sample_haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    assert!(n >= 1, "unitary dimension must be positive");
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        entries.push(complex_gaussian(rng));
    }
    let g = DMatrix::from_column_slice(n, n, &entries);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix { matrix: q }
}

/// First `cols` columns of a Haar unitary of size `n`.
///
/// Gram–Schmidt on `cols` Ginibre columns (with one reorthogonalization
/// pass) has the same law as the leading columns of the QR sampler, at
/// O(n·cols²) instead of O(n³).
pub fn haar_columns<R: Rng + ?Sized>(n: usize, cols: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    assert!(cols <= n && n >= 1);
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for _ in 0..cols {
        let mut v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        for _pass in 0..2 {
            for q in &out {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        out.push(v);
    }
    out
}

/// An orthonormal family of degree-`k` harmonics in coefficient form.
///
/// Up to `2k+1` rows; a full basis has exactly `2k+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBasis {
    k: usize,
    coeffs: DMatrix<Complex64>,
}

impl CoefficientBasis {
    pub fn new(k: usize, coeffs: DMatrix<Complex64>) -> Result<Self> {
        let width = 2 * k + 1;
        if coeffs.ncols() != width || coeffs.nrows() > width || coeffs.nrows() == 0 {
            return Err(invalid(
                "basis",
                format!(
                    "{}x{} coefficients do not fit degree {k}",
                    coeffs.nrows(),
                    coeffs.ncols()
                ),
            ));
        }
        let b = Self { k, coeffs };
        let defect = b.orthonormality_defect();
        if defect > ORTHONORMAL_TOLERANCE {
            return Err(invalid(
                "basis",
                format!("rows not orthonormal (defect {defect:e})"),
            ));
        }
        Ok(b)
    }

    pub fn identity(k: usize) -> Self {
        let n = 2 * k + 1;
        Self {
            k,
            coeffs: DMatrix::identity(n, n),
        }
    }

    pub fn from_unitary(k: usize, u: &UnitaryMatrix) -> Result<Self> {
        if u.dim() != 2 * k + 1 {
            return Err(invalid(
                "basis",
                format!("U is {0}x{0}, need {1}", u.dim(), 2 * k + 1),
            ));
        }
        Ok(Self {
            k,
            coeffs: u.matrix.clone(),
        })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.nrows() == 0
    }

    pub fn is_complete(&self) -> bool {
        self.coeffs.nrows() == 2 * self.k + 1
    }

    pub fn coefficients(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    pub fn row(&self, j: usize) -> Vec<Complex64> {
        self.coeffs.row(j).iter().copied().collect()
    }

    pub(crate) fn from_rows_unchecked(k: usize, coeffs: DMatrix<Complex64>) -> Self {
        Self { k, coeffs }
    }

    pub(crate) fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for j in 0..self.coeffs.nrows() {
            out.extend(self.coeffs.row(j).iter().copied());
        }
        out
    }

    /// `max |(C C†)_{ij} − δ_{ij}|`.
    pub fn orthonormality_defect(&self) -> f64 {
        identity_defect(&(&self.coeffs * self.coeffs.adjoint()))
    }
}

/// `‖φ_j‖⁴_{L⁴}` for every row, after checking each row has unit L² norm
/// on the grid.
pub fn row_l4_norms(basis: &CoefficientBasis, grid: &QuadratureGrid) -> Result<Vec<f64>> {
    let k = basis.k;
    let spec = grid.spec();
    if !spec.exact_for_quartic(k) {
        return Err(Error::GridResolution {
            need_phi: 2 * k + 1,
            need_theta: 4 * k + 1,
            have_phi: spec.n_phi,
            have_theta: spec.n_theta,
        });
    }
    let (l2, l4) = row_moments(k, &basis.row_major(), grid);
    for v in &l2 {
        let norm = v.sqrt();
        if (norm - 1.0).abs() > ROW_NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
    }
    Ok(l4)
}

/// `Λ⁴_k = Σ_j ∫ |φ_j|⁴ dV`.
pub fn lambda4(basis: &CoefficientBasis, grid: &QuadratureGrid) -> Result<f64> {
    Ok(compensated_sum(row_l4_norms(basis, grid)?))
}

/// `E Λ⁴_k` under Haar measure, `2N²/(4π(N+1))` with `N = 2k+1`.
///
/// Each row of a Haar unitary is uniform on the unit sphere of `C^N`, for
/// which `E|⟨u, v⟩|⁴ = 2|v|⁴/(N(N+1))`; with `|Y(x)|² = N/(4π)` pointwise
/// the integral over the sphere gives the value.
pub fn haar_mean_lambda4(k: usize) -> f64 {
    let n = (2 * k + 1) as f64;
    2.0 * n * n / (4.0 * PI * (n + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialValue {
    pub trial: u64,
    pub k: usize,
    pub lambda4: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloLambda4 {
    pub k: usize,
    pub master_seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub values: Vec<TrialValue>,
}

/// `Λ⁴_k` over `trials` Haar-random bases; trial `i` uses
/// `RngSeed(seed).trial_seed(i)` so results do not depend on scheduling.
pub fn monte_carlo_lambda4(
    k: usize,
    trials: usize,
    seed: u64,
    grid: &QuadratureGrid,
) -> Result<MonteCarloLambda4> {
    if trials < 2 {
        return Err(invalid("trials", format!("need at least 2, got {trials}")));
    }
    let master = RngSeed(seed);
    let values: Vec<TrialValue> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = master.trial_seed(trial);
            let u = sample_haar_unitary(2 * k + 1, trial_seed);
            let basis = CoefficientBasis::from_unitary(k, &u)?;
            Ok(TrialValue {
                trial,
                k,
                lambda4: lambda4(&basis, grid)?,
                seed: trial_seed,
            })
        })
        .collect::<Result<_>>()?;
    let (mean, stderr) = mean_stderr(values.iter().map(|v| v.lambda4));
    Ok(MonteCarloLambda4 {
        k,
        master_seed: seed,
        mean,
        stderr,
        values,
    })
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr<I: IntoIterator<Item = f64>>(xs: I) -> (f64, f64) {
    let xs: Vec<f64> = xs.into_iter().collect();
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = compensated_sum(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Which product of entries of the first row is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EntryPattern {
    /// `|U₁₁|²`
    AbsSquared,
    /// `|U₁₁|⁴`
    AbsFourth,
    /// `|U₁₁|² |U₁₂|²`
    PairedSameRow,
}

impl std::str::FromStr for EntryPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abs2" | "|u|^2" => Ok(Self::AbsSquared),
            "abs4" | "|u|^4" => Ok(Self::AbsFourth),
            "pair" | "|u|^2|u'|^2" => Ok(Self::PairedSameRow),
            other => Err(invalid(
                "pattern",
                format!("unknown entry pattern {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

const SAMPLE_CHUNK: usize = 4096;

/// Draws `samples` values of `f(first columns of a Haar unitary)` in chunks
/// with their own seeds; result order is fixed by chunk index.
fn sample_columns<F>(n: usize, cols: usize, samples: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&[Vec<Complex64>]) -> f64 + Sync,
{
    let master = RngSeed(seed);
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = master.trial_rng(c as u64);
            let len = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                let cols = haar_columns(n, cols, &mut rng);
                out.push(f(&cols));
            }
            out
        })
        .collect()
}

/// Monte Carlo estimate of an entry moment of an `n × n` Haar unitary.
pub fn entry_moment(
    n: usize,
    pattern: EntryPattern,
    samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if n == 0 || samples < 2 {
        return Err(invalid(
            "entry moment",
            "need n >= 1 and at least 2 samples",
        ));
    }
    if pattern == EntryPattern::PairedSameRow && n < 2 {
        return Err(invalid("entry moment", "pairing needs n >= 2"));
    }
    let cols = if pattern == EntryPattern::PairedSameRow {
        2
    } else {
        1
    };
    let xs = sample_columns(n, cols, samples, seed, |c| {
        let a = c[0][0].norm_sqr();
        match pattern {
            EntryPattern::AbsSquared => a,
            EntryPattern::AbsFourth => a * a,
            EntryPattern::PairedSameRow => a * c[1][0].norm_sqr(),
        }
    });
    let (mean, stderr) = mean_stderr(xs);
    Ok(MomentEstimate {
        mean,
        stderr,
        samples,
    })
}

/// Moments of `√N·U₁₁` compared with a standard complex Gaussian `(1, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianLimitReport {
    pub k: usize,
    pub n: usize,
    pub samples: usize,
    pub second_moment: f64,
    pub second_stderr: f64,
    pub fourth_moment: f64,
    pub fourth_stderr: f64,
    /// Euclidean distance of `(second, fourth)` from `(1, 2)`.
    pub distance: f64,
}

pub fn gaussian_limit_check(k: usize, samples: usize, seed: u64) -> Result<GaussianLimitReport> {
    if k < 8 {
        return Err(invalid(
            "k",
            format!("Gaussian limit check needs k >= 8, got {k}"),
        ));
    }
    if samples < 2 {
        return Err(invalid("samples", "need at least 2"));
    }
    let n = 2 * k + 1;
    let nf = n as f64;
    let xs = sample_columns(n, 1, samples, seed, |c| nf * c[0][0].norm_sqr());
    let (second_moment, second_stderr) = mean_stderr(xs.iter().copied());
    let (fourth_moment, fourth_stderr) = mean_stderr(xs.iter().map(|x| x * x));
    Ok(GaussianLimitReport {
        k,
        n,
        samples,
        second_moment,
        second_stderr,
        fourth_moment,
        fourth_stderr,
        distance: ((second_moment - 1.0).powi(2) + (fourth_moment - 2.0).powi(2)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_grid;

    #[test]
    fn unitary_by_construction() {
        for (n, seed) in [(1usize, 3u64), (2, 4), (7, 5), (65, 6)] {
            let u = sample_haar_unitary(n, seed);
            assert!(u.unitarity_defect() <= UNITARY_TOLERANCE, "n={n}");
        }
        let u = sample_haar_unitary(1, 9);
        assert!((u.entry(0, 0).norm() - 1.0).abs() < 1e-14);
        assert!(UnitaryMatrix::new(DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0))).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(sample_haar_unitary(5, 42), sample_haar_unitary(5, 42));
        assert_ne!(sample_haar_unitary(5, 42), sample_haar_unitary(5, 43));
        let s = RngSeed(7);
        assert_ne!(s.trial_seed(0), s.trial_seed(1));
    }

    #[test]
    fn two_by_two_second_moment() {
        // E|U₁₁|² = 1/N
        let samples = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..samples)
            .map(|_| sample_haar_unitary_with(2, &mut rng).entry(0, 0).norm_sqr())
            .collect();
        let (mean, se) = mean_stderr(xs);
        assert!((mean - 0.5).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn entry_moments_two_by_two() {
        let e2 = entry_moment(2, EntryPattern::AbsSquared, 100_000, 1).unwrap();
        assert!((e2.mean - 0.5).abs() < 3.0 * e2.stderr);
        let e4 = entry_moment(2, EntryPattern::AbsFourth, 100_000, 2).unwrap();
        assert!((e4.mean - 1.0 / 3.0).abs() < 3.0 * e4.stderr, "{e4:?}");
        let ep = entry_moment(2, EntryPattern::PairedSameRow, 100_000, 3).unwrap();
        assert!((ep.mean - 1.0 / 6.0).abs() < 3.0 * ep.stderr, "{ep:?}");
        assert!(entry_moment(1, EntryPattern::PairedSameRow, 10, 0).is_err());
    }

    #[test]
    fn column_sampler_agrees_with_qr_sampler() {
        // the two samplers must share the law of |U₁₁|⁴ for N = 3: 2/(N(N+1)) = 1/6
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..40_000)
            .map(|_| {
                sample_haar_unitary_with(3, &mut rng)
                    .entry(0, 0)
                    .norm_sqr()
                    .powi(2)
            })
            .collect();
        let (a, sa) = mean_stderr(xs);
        let b = entry_moment(3, EntryPattern::AbsFourth, 40_000, 6).unwrap();
        assert!((a - b.mean).abs() < 3.0 * (sa * sa + b.stderr * b.stderr).sqrt());
        assert!((a - 1.0 / 6.0).abs() < 3.0 * sa);
    }

    #[test]
    fn lambda4_identity_k1() {
        let g = build_grid(1, 1.0).unwrap();
        let v = lambda4(&CoefficientBasis::identity(1), &g).unwrap();
        assert!((v - 21.0 / (20.0 * PI)).abs() < 1e-13);
        assert!(v >= 3.0 / (4.0 * PI));
    }

    #[test]
    fn lambda4_rejects_coarse_grid_and_bad_rows() {
        let g = build_grid(2, 1.0).unwrap();
        assert!(matches!(
            lambda4(&CoefficientBasis::identity(3), &g),
            Err(Error::GridResolution { .. })
        ));
        let bad = DMatrix::from_element(1, 3, Complex64::new(1.0, 0.0));
        assert!(CoefficientBasis::new(1, bad).is_err());
    }

    #[test]
    fn weyl_sum_is_basis_invariant() {
        let k = 6;
        let g = build_grid(k, 1.0).unwrap();
        let u = sample_haar_unitary(2 * k + 1, 17);
        let basis = CoefficientBasis::from_unitary(k, &u).unwrap();
        let target = (2 * k + 1) as f64 / (4.0 * PI);
        let rows = basis.row_major();
        let synth = crate::synthesis::RowSynthesizer::new(k, &rows, &g);
        let n = g.n_theta();
        for i in 0..g.n_phi() {
            let vals = synth.ring(&g, i);
            for j in 0..n {
                let s: f64 = (0..basis.len()).map(|r| vals[r * n + j].norm_sqr()).sum();
                assert!((s - target).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lambda4_lower_bound_on_samples() {
        let k = 4;
        let g = build_grid(k, 1.0).unwrap();
        for seed in 0..10 {
            let u = sample_haar_unitary(2 * k + 1, seed);
            let v = lambda4(&CoefficientBasis::from_unitary(k, &u).unwrap(), &g).unwrap();
            assert!(v >= (2 * k + 1) as f64 / (4.0 * PI));
        }
    }

    #[test]
    fn monte_carlo_reproducible_and_matches_exact_mean() {
        let k = 3;
        let g = build_grid(k, 1.0).unwrap();
        let a = monte_carlo_lambda4(k, 400, 99, &g).unwrap();
        let b = monte_carlo_lambda4(k, 400, 99, &g).unwrap();
        assert_eq!(a.values, b.values);
        let exact = haar_mean_lambda4(k);
        assert!(
            (a.mean - exact).abs() < 3.0 * a.stderr,
            "{} vs {exact}",
            a.mean
        );
        assert!(monte_carlo_lambda4(k, 1, 0, &g).is_err());
    }

    #[test]
    fn haar_invariance_smoke() {
        // V = diagonal phases composed with a cyclic shift
        let k = 3;
        let n = 2 * k + 1;
        let g = build_grid(k, 1.0).unwrap();
        let mut v = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            v[((i + 1) % n, i)] = Complex64::from_polar(1.0, 0.7 * i as f64);
        }
        let (mut plain, mut moved) = (Vec::new(), Vec::new());
        for t in 0..300u64 {
            let u = sample_haar_unitary(n, 1000 + t);
            plain.push(lambda4(&CoefficientBasis::from_unitary(k, &u).unwrap(), &g).unwrap());
            let vu = UnitaryMatrix::new(&v * u.matrix()).unwrap();
            moved.push(lambda4(&CoefficientBasis::from_unitary(k, &vu).unwrap(), &g).unwrap());
        }
        let (m1, s1) = mean_stderr(plain);
        let (m2, s2) = mean_stderr(moved);
        assert!((m1 - m2).abs() < 4.0 * (s1 * s1 + s2 * s2).sqrt());
    }

    #[test]
    fn gaussian_limit() {
        let r = gaussian_limit_check(32, 10_000, 8).unwrap();
        assert!((1.8..=2.2).contains(&r.fourth_moment), "{r:?}");
        assert!((r.second_moment - 1.0).abs() < 3.0 * r.second_stderr);
        let small = gaussian_limit_check(8, 100_000, 9).unwrap();
        let large = gaussian_limit_check(64, 100_000, 10).unwrap();
        assert!(large.distance < small.distance, "{small:?} {large:?}");
        assert!(gaussian_limit_check(7, 100, 0).is_err());
    }

    #[test]
    fn pattern_parsing() {
        assert_eq!(
            "abs4".parse::<EntryPattern>().unwrap(),
            EntryPattern::AbsFourth
        );
        assert!("nope".parse::<EntryPattern>().is_err());
    }
}
