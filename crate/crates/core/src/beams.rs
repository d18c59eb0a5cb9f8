//! Partial bases of Gaussian beams: highest-weight harmonics with respect
//! to rotated circle actions, placed on well-separated great circles and
//! orthonormalized in coefficient space.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::harmonics::eval_beam;
use crate::numeric::{compensated_sum, Vec3};
use crate::quadrature::{fibonacci_axes, GreatCircle, QuadratureGrid};
use crate::random::{identity_defect, row_l4_norms, CoefficientBasis, RngSeed};
use crate::synthesis::signed_legendre_row;

/// Tolerance on the Gram matrix of an orthonormalized family.
pub const ORTHONORMALIZED_TOLERANCE: f64 = 1e-9;
/// Gram eigenvalues at or below this are treated as rank deficiency.
pub const GRAM_EIGENVALUE_FLOOR: f64 = 1e-10;

/// Expansion of the beam on the circle with `axis` over `Y_k^{-k..k}`,
/// projected on the smallest grid exact for degree-`2k` products.
pub fn beam_coefficients(k: usize, axis: &Vec3) -> Result<Vec<Complex64>> {
    let grid = QuadratureGrid::with_sizes(k + 1, 2 * k + 1)?;
    beam_coefficients_on(k, axis, &grid)
}

/// [`beam_coefficients`] on a caller-supplied grid.
pub fn beam_coefficients_on(
    k: usize,
    axis: &Vec3,
    grid: &QuadratureGrid,
) -> Result<Vec<Complex64>> {
    let spec = grid.spec();
    if !spec.exact_for_quadratic(k) {
        return Err(Error::GridResolution {
            need_phi: k + 1,
            need_theta: 2 * k + 1,
            have_phi: spec.n_phi,
            have_theta: spec.n_theta,
        });
    }
    let circle = GreatCircle::new(*axis)?;
    let axis = circle.axis();
    let width = 2 * k + 1;
    let n = grid.n_theta();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let per_ring: Vec<Vec<Complex64>> = (0..grid.n_phi())
        .into_par_iter()
        .map(|i| {
            let mut buf: Vec<Complex64> = (0..n)
                .map(|j| eval_beam(k, &axis, &grid.point(i, j)))
                .collect();
            fft.process(&mut buf);
            let mut legendre = vec![0.0; width];
            let mut scratch = vec![0.0; k + 1];
            signed_legendre_row(
                k,
                grid.cos_phi()[i],
                grid.sin_phi()[i],
                &mut legendre,
                &mut scratch,
            );
            let w = grid.point_weight(i);
            (0..width)
                .map(|idx| {
                    let m = idx as i64 - k as i64;
                    buf[m.rem_euclid(n as i64) as usize] * (w * legendre[idx])
                })
                .collect()
        })
        .collect();
    Ok((0..width)
        .map(|idx| {
            Complex64::new(
                compensated_sum(per_ring.iter().map(|r| r[idx].re)),
                compensated_sum(per_ring.iter().map(|r| r[idx].im)),
            )
        })
        .collect())
}

/// `⟨b₁, b₂⟩ = ∫ b₁ conj(b₂) dV` through the coefficient vectors.
pub fn beam_overlap(k: usize, axis1: &Vec3, axis2: &Vec3) -> Result<Complex64> {
    let a = beam_coefficients(k, axis1)?;
    let b = beam_coefficients(k, axis2)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum())
}

/// Largest count allowed for a separation `δ`: `J (1 − cos(δ/2)) ≤ 1`.
///
/// Each circle is a pair of antipodal axes whose caps of radius `δ/2` must
/// be disjoint, so `2J` caps of area `2π(1 − cos(δ/2))` fit in `4π`. For
/// small `δ` this is `J ≲ 8/δ²`.
pub fn packing_bound(delta: f64) -> f64 {
    1.0 / (1.0 - (delta / 2.0).cos())
}

const ANGLE_SLACK: f64 = 1e-12;

/// `count` circles with pairwise angle at least `delta`.
///
/// Greedy selection over a Fibonacci lattice on the upper hemisphere
/// (refined up to 2¹⁸ points), then seeded random candidates if the lattice
/// cannot reach the count. The first axis is always the north pole.
pub fn place_separated_axes(count: usize, delta: f64, seed: u64) -> Result<Vec<GreatCircle>> {
    let infeasible = |reason: String| Error::PackingInfeasible {
        count,
        delta,
        reason,
    };
    if count == 0 {
        return Err(invalid("count", "need at least one circle"));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(invalid("delta", format!("{delta} must be positive")));
    }
    if delta > FRAC_PI_2 + ANGLE_SLACK && count > 1 {
        return Err(infeasible("circles are never more than π/2 apart".into()));
    }
    if count as f64 > packing_bound(delta) {
        return Err(infeasible(format!(
            "area bound allows at most {:.1}",
            packing_bound(delta)
        )));
    }
    let pole = GreatCircle::equator();
    if count == 1 {
        return Ok(vec![pole]);
    }
    let accepts = |chosen: &[GreatCircle], c: &GreatCircle| {
        chosen
            .iter()
            .all(|o| o.angle_to(c) >= delta * (1.0 - ANGLE_SLACK))
    };
    let mut lattice = (4 * count).max(64);
    let mut best: Vec<GreatCircle> = Vec::new();
    while lattice <= 1 << 18 {
        let mut chosen = vec![pole];
        for a in fibonacci_axes(lattice).into_iter().skip(1) {
            let c = GreatCircle::from_direction(a)?;
            if accepts(&chosen, &c) {
                chosen.push(c);
                if chosen.len() == count {
                    return Ok(chosen);
                }
            }
        }
        if chosen.len() > best.len() {
            best = chosen;
        }
        lattice *= 4;
    }
    let mut rng = RngSeed(seed).trial_rng(0);
    for _ in 0..200_000 {
        let z: f64 = rng.random_range(0.0..=1.0);
        let t: f64 = rng.random_range(0.0..2.0 * PI);
        let r = ((1.0 - z) * (1.0 + z)).sqrt();
        let c = GreatCircle::from_direction([r * t.cos(), r * t.sin(), z])?;
        if accepts(&best, &c) {
            best.push(c);
            if best.len() == count {
                return Ok(best);
            }
        }
    }
    Err(infeasible(format!("placed only {} circles", best.len())))
}

/// Beams on a set of circles with their coefficient rows.
#[derive(Debug, Clone)]
pub struct BeamFamily {
    k: usize,
    circles: Vec<GreatCircle>,
    coeffs: DMatrix<Complex64>,
    min_angle: f64,
}

impl BeamFamily {
    pub fn new(k: usize, circles: Vec<GreatCircle>) -> Result<Self> {
        if circles.is_empty() {
            return Err(invalid("family", "no circles"));
        }
        let rows: Vec<Vec<Complex64>> = circles
            .par_iter()
            .map(|c| beam_coefficients(k, &c.axis()))
            .collect::<Result<_>>()?;
        let width = 2 * k + 1;
        let coeffs = DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]);
        let mut min_angle = FRAC_PI_2;
        for (i, a) in circles.iter().enumerate() {
            for b in &circles[i + 1..] {
                min_angle = min_angle.min(a.angle_to(b));
            }
        }
        Ok(Self {
            k,
            circles,
            coeffs,
            min_angle,
        })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    pub fn circles(&self) -> &[GreatCircle] {
        &self.circles
    }

    pub fn coefficients(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    /// Smallest pairwise circle angle (π/2 for a single beam).
    pub fn min_angle(&self) -> f64 {
        self.min_angle
    }

    /// `G_ij = ⟨b_i, b_j⟩`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        &self.coeffs * self.coeffs.adjoint()
    }

    /// The family with its members reordered: row `i` of the result is row
    /// `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let circles = order.iter().map(|&i| self.circles[i]).collect();
        let coeffs = DMatrix::from_fn(order.len(), self.coeffs.ncols(), |i, j| {
            self.coeffs[(order[i], j)]
        });
        Self {
            k: self.k,
            circles,
            coeffs,
            min_angle: self.min_angle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrthoMethod {
    /// Gram–Schmidt in the given order, two passes.
    Sequential,
    /// Löwdin `G^{-1/2}`.
    #[default]
    Symmetric,
}

impl fmt::Display for OrthoMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrthoMethod::Sequential => "sequential",
            OrthoMethod::Symmetric => "symmetric",
        })
    }
}

impl FromStr for OrthoMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" | "gram-schmidt" => Ok(Self::Sequential),
            "symmetric" | "lowdin" => Ok(Self::Symmetric),
            other => Err(invalid("method", format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthonormalizationReport {
    pub method: OrthoMethod,
    pub gram_condition: f64,
    pub l4_before: Vec<f64>,
    pub l4_after: Vec<f64>,
    /// `l4_after / l4_before` per vector.
    pub retention: Vec<f64>,
    pub min_retention: f64,
    pub mean_retention: f64,
    pub orthonormality_defect: f64,
}

/// Orthonormalizes the family; `grid` must integrate quartic degree-`k`
/// products exactly (it is used for the L⁴ norms in the report).
pub fn orthonormalize(
    family: &BeamFamily,
    method: OrthoMethod,
    grid: &QuadratureGrid,
) -> Result<(CoefficientBasis, OrthonormalizationReport)> {
    let gram = family.gram();
    let eig = gram.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo <= GRAM_EIGENVALUE_FLOOR {
        return Err(Error::RankDeficient { min_eigenvalue: lo });
    }
    let after = match method {
        OrthoMethod::Symmetric => {
            let v = &eig.eigenvectors;
            let d =
                DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.powf(-0.5), 0.0)));
            let inv_sqrt = v * d * v.adjoint();
            inv_sqrt * &family.coeffs
        }
        OrthoMethod::Sequential => gram_schmidt_rows(&family.coeffs),
    };
    let defect = identity_defect(&(&after * after.adjoint()));
    if defect > ORTHONORMALIZED_TOLERANCE {
        return Err(invalid(
            "orthonormalize",
            format!("result not orthonormal (defect {defect:e})"),
        ));
    }
    let before_basis = CoefficientBasis::from_rows_unchecked(family.k, family.coeffs.clone());
    let after_basis = CoefficientBasis::from_rows_unchecked(family.k, after);
    let l4_before = row_l4_norms(&before_basis, grid)?;
    let l4_after = row_l4_norms(&after_basis, grid)?;
    let retention: Vec<f64> = l4_after
        .iter()
        .zip(&l4_before)
        .map(|(a, b)| a / b)
        .collect();
    let min_retention = retention.iter().copied().fold(f64::INFINITY, f64::min);
    let mean_retention = compensated_sum(retention.iter().copied()) / retention.len() as f64;
    Ok((
        after_basis,
        OrthonormalizationReport {
            method,
            gram_condition: hi / lo,
            l4_before,
            l4_after,
            retention,
            min_retention,
            mean_retention,
            orthonormality_defect: defect,
        },
    ))
}

fn gram_schmidt_rows(c: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = c.clone();
    for i in 0..out.nrows() {
        for _pass in 0..2 {
            for j in 0..i {
                // ⟨row_i, row_j⟩ = Σ_m r_i,m conj(r_j,m)
                let proj: Complex64 = (0..out.ncols())
                    .map(|m| out[(i, m)] * out[(j, m)].conj())
                    .sum();
                for m in 0..out.ncols() {
                    let v = out[(j, m)];
                    out[(i, m)] -= proj * v;
                }
            }
        }
        let norm = out.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for m in 0..out.ncols() {
            out[(i, m)] /= norm;
        }
    }
    out
}

/// Extends an orthonormal fragment to a full basis by pivoted Gram–Schmidt
/// QR of the standard unit vectors against the fragment's span.
pub fn complete_basis(fragment: &CoefficientBasis) -> Result<CoefficientBasis> {
    let k = fragment.degree();
    let n = 2 * k + 1;
    let mut rows: Vec<Vec<Complex64>> = (0..fragment.len()).map(|j| fragment.row(j)).collect();
    let mut pool: Vec<Vec<Complex64>> = (0..n)
        .map(|m| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[m] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let project_out = |v: &mut Vec<Complex64>, basis: &[Vec<Complex64>]| {
        for _pass in 0..2 {
            for b in basis {
                let proj: Complex64 = v.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
        }
    };
    for v in pool.iter_mut() {
        project_out(v, &rows);
    }
    while rows.len() < n {
        let (best, norm) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if norm < 1e-8 {
            return Err(Error::RankDeficient {
                min_eigenvalue: norm,
            });
        }
        let mut v = pool.swap_remove(best);
        project_out(&mut v, &rows);
        let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        for p in pool.iter_mut() {
            project_out(p, std::slice::from_ref(&v));
        }
        rows.push(v);
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    CoefficientBasis::new(k, m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamExperimentConfig {
    pub k: usize,
    /// `J = max(1, ⌊k^{1−e}⌋)` for each exponent `e`.
    pub count_exponents: Vec<f64>,
    /// Minimum circle separations tried for every count.
    pub separations: Vec<f64>,
    pub method: OrthoMethod,
    pub seed: u64,
}

/// One configuration of [`beam_experiment`]; CSV columns follow the field order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamExperimentRow {
    pub k: usize,
    #[serde(rename = "J")]
    pub j: usize,
    pub delta: f64,
    pub count_exponent: f64,
    pub method: OrthoMethod,
    pub seed: u64,
    pub min_ret: f64,
    pub mean_ret: f64,
    pub gram_cond: f64,
    pub sum_l4: f64,
    /// `max |(C C†) − I|` after orthonormalization.
    pub ortho_defect: f64,
    pub min_l4_over_sqrt_k: f64,
    pub mean_l4_over_sqrt_k: f64,
    pub max_l4_over_sqrt_k: f64,
    /// `k log k`, the standard basis scale.
    pub k_log_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedConfiguration {
    pub j: usize,
    pub delta: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamExperiment {
    pub rows: Vec<BeamExperimentRow>,
    pub skipped: Vec<SkippedConfiguration>,
}

pub fn beam_count(k: usize, exponent: f64) -> usize {
    ((k as f64).powf(1.0 - exponent).floor() as usize).max(1)
}

/// Places, orthonormalizes and measures a beam family for every
/// `(count exponent, separation)` pair. Infeasible placements and
/// rank-deficient families are recorded as skipped.
pub fn beam_experiment(
    config: &BeamExperimentConfig,
    grid: &QuadratureGrid,
) -> Result<BeamExperiment> {
    let k = config.k;
    if k == 0 {
        return Err(invalid("k", "beams need k >= 1"));
    }
    let sqrt_k = (k as f64).sqrt();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &e in &config.count_exponents {
        let j = beam_count(k, e);
        for &delta in &config.separations {
            let placed = place_separated_axes(j, delta, config.seed);
            let circles = match placed {
                Ok(c) => c,
                Err(err @ Error::PackingInfeasible { .. }) => {
                    skipped.push(SkippedConfiguration {
                        j,
                        delta,
                        reason: err.to_string(),
                    });
                    continue;
                }
                Err(other) => return Err(other),
            };
            let family = BeamFamily::new(k, circles)?;
            let (_, report) = match orthonormalize(&family, config.method, grid) {
                Ok(r) => r,
                Err(err @ Error::RankDeficient { .. }) => {
                    skipped.push(SkippedConfiguration {
                        j,
                        delta,
                        reason: err.to_string(),
                    });
                    continue;
                }
                Err(other) => return Err(other),
            };
            let ratios: Vec<f64> = report.l4_after.iter().map(|v| v / sqrt_k).collect();
            rows.push(BeamExperimentRow {
                k,
                j,
                delta,
                count_exponent: e,
                method: config.method,
                seed: config.seed,
                min_ret: report.min_retention,
                mean_ret: report.mean_retention,
                gram_cond: report.gram_condition,
                sum_l4: compensated_sum(report.l4_after.iter().copied()),
                ortho_defect: report.orthonormality_defect,
                min_l4_over_sqrt_k: ratios.iter().copied().fold(f64::INFINITY, f64::min),
                mean_l4_over_sqrt_k: compensated_sum(ratios.iter().copied()) / ratios.len() as f64,
                max_l4_over_sqrt_k: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                k_log_k: k as f64 * (k as f64).ln(),
            });
        }
    }
    Ok(BeamExperiment { rows, skipped })
}

/// Pairs `(smaller δ, larger δ)` at equal `(k, J)` where the minimum
/// retention drops as the separation grows.
pub fn separation_monotonicity_violations(rows: &[BeamExperimentRow]) -> Vec<(f64, f64, usize)> {
    let mut out = Vec::new();
    for a in rows {
        for b in rows {
            if a.k == b.k && a.j == b.j && a.delta < b.delta && b.min_ret < a.min_ret - 1e-12 {
                out.push((a.delta, b.delta, a.j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{make_field, FieldKind};
    use crate::numeric::{dot, norm};
    use crate::quadrature::build_grid;
    use crate::random::sample_haar_unitary;

    fn binomial(n: usize, r: usize) -> f64 {
        let mut acc = 0.0f64;
        for i in 0..r {
            acc += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
        }
        acc.exp()
    }

    fn axis_at(beta: f64, psi: f64) -> Vec3 {
        [beta.sin() * psi.cos(), beta.sin() * psi.sin(), beta.cos()]
    }

    #[test]
    fn pole_beams() {
        let k = 10;
        let c = beam_coefficients(k, &[0.0, 0.0, 1.0]).unwrap();
        for (i, v) in c.iter().enumerate() {
            let e = if i == 2 * k { 1.0 } else { 0.0 };
            assert!((v.norm() - e).abs() < 1e-12);
        }
        let c = beam_coefficients(k, &[0.0, 0.0, -1.0]).unwrap();
        for (i, v) in c.iter().enumerate() {
            let e = if i == 0 { 1.0 } else { 0.0 };
            assert!((v.norm() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn coefficient_moduli_follow_binomial_law() {
        // rotated highest weight: |a_m|² = C(2k, k+m) cos^{2(k+m)}(β/2) sin^{2(k−m)}(β/2)
        let k = 12;
        for beta in [0.3, 1.0, 2.2] {
            let c = beam_coefficients(k, &axis_at(beta, 0.8)).unwrap();
            let unit: f64 = c.iter().map(|v| v.norm_sqr()).sum();
            assert!((unit - 1.0).abs() < 1e-10);
            for (idx, v) in c.iter().enumerate() {
                let p = idx;
                let expect = binomial(2 * k, p)
                    * (beta / 2.0).cos().powi(2 * p as i32)
                    * (beta / 2.0).sin().powi(2 * (2 * k - p) as i32);
                assert!((v.norm_sqr() - expect).abs() < 1e-12, "β={beta} idx={idx}");
            }
        }
    }

    #[test]
    fn synthesis_round_trip() {
        let k = 8;
        let g = build_grid(k, 1.0).unwrap();
        for axis in [axis_at(0.4, 1.0), axis_at(1.3, 4.0), axis_at(2.9, 0.2)] {
            let coeffs = beam_coefficients(k, &axis).unwrap();
            let synth = make_field(&FieldKind::Coefficient { k, coeffs }, &g).unwrap();
            let direct = make_field(&FieldKind::Beam { k, axis }, &g).unwrap();
            for (a, b) in synth.values().iter().zip(direct.values()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn grid_resolution_error() {
        let g = QuadratureGrid::with_sizes(3, 5).unwrap();
        assert!(matches!(
            beam_coefficients_on(8, &[0.0, 0.0, 1.0], &g),
            Err(Error::GridResolution { .. })
        ));
    }

    #[test]
    fn overlap_examples() {
        let a = axis_at(0.7, 0.3);
        assert!((beam_overlap(5, &a, &a).unwrap().norm() - 1.0).abs() < 1e-12);
        let v = beam_overlap(1, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!((v.norm() - 0.5).abs() < 1e-12);
        let b = axis_at(0.7 + PI / 4.0, 0.3);
        for k in [3usize, 8, 16] {
            let one = beam_overlap(k, &a, &b).unwrap().norm();
            let two = beam_overlap(2 * k, &a, &b).unwrap().norm();
            assert!((two - one * one).abs() < 1e-8);
            assert!((one - (PI / 8.0).cos().powi(2 * k as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_rotation_invariant() {
        let k = 6;
        let a = axis_at(0.5, 0.1);
        let b = axis_at(1.4, 2.0);
        let base = beam_overlap(k, &a, &b).unwrap().norm();
        for seed in 0..20u64 {
            let u = sample_haar_unitary(3, seed);
            // real orthogonal matrix from the real part of a QR of a random matrix
            let m = nalgebra::Matrix3::from_fn(|i, j| u.entry(i, j).re + 0.3 * u.entry(j, i).im);
            let q = m.qr().q();
            let rot = |v: &Vec3| {
                let w = q * nalgebra::Vector3::new(v[0], v[1], v[2]);
                [w[0], w[1], w[2]]
            };
            let v = beam_overlap(k, &rot(&a), &rot(&b)).unwrap().norm();
            assert!((v - base).abs() < 1e-10);
        }
    }

    #[test]
    fn placement_examples() {
        assert_eq!(
            place_separated_axes(1, 0.3, 0).unwrap(),
            vec![GreatCircle::equator()]
        );
        let two = place_separated_axes(2, FRAC_PI_2, 0).unwrap();
        assert!(dot(&two[0].axis(), &two[1].axis()).abs() < 1e-12);
        let many = place_separated_axes(50, 0.2, 7).unwrap();
        assert_eq!(many.len(), 50);
        for (i, a) in many.iter().enumerate() {
            assert!((norm(&a.axis()) - 1.0).abs() < 1e-12);
            for b in &many[i + 1..] {
                assert!(a.angle_to(b) >= 0.2 * (1.0 - 1e-12));
            }
        }
        assert!(matches!(
            place_separated_axes(1000, 0.2, 0),
            Err(Error::PackingInfeasible { .. })
        ));
        assert!(matches!(
            place_separated_axes(2, 2.0, 0),
            Err(Error::PackingInfeasible { .. })
        ));
    }

    #[test]
    fn orthonormalize_examples() {
        let k = 6;
        let g = build_grid(k, 1.0).unwrap();
        let single = BeamFamily::new(
            k,
            vec![GreatCircle::from_direction([0.2, 0.1, 1.0]).unwrap()],
        )
        .unwrap();
        for method in [OrthoMethod::Sequential, OrthoMethod::Symmetric] {
            let (b, r) = orthonormalize(&single, method, &g).unwrap();
            for m in 0..(2 * k + 1) {
                assert!((b.coefficients()[(0, m)] - single.coefficients()[(0, m)]).norm() < 1e-12);
            }
            assert!((r.min_retention - 1.0).abs() < 1e-12);
        }
        let dup = BeamFamily::new(k, vec![GreatCircle::equator(), GreatCircle::equator()]).unwrap();
        assert!(matches!(
            orthonormalize(&dup, OrthoMethod::Symmetric, &g),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn near_orthogonal_pair_keeps_l4() {
        let k = 32;
        let g = build_grid(k, 1.0).unwrap();
        let fam = BeamFamily::new(
            k,
            vec![
                GreatCircle::equator(),
                GreatCircle::new([1.0, 0.0, 0.0]).unwrap(),
            ],
        )
        .unwrap();
        assert!(fam.gram()[(0, 1)].norm() <= 1e-6);
        for method in [OrthoMethod::Sequential, OrthoMethod::Symmetric] {
            let (_, r) = orthonormalize(&fam, method, &g).unwrap();
            assert!(r.min_retention >= 0.999, "{r:?}");
        }
    }

    #[test]
    fn symmetric_is_permutation_equivariant() {
        let k = 10;
        let g = build_grid(k, 1.0).unwrap();
        let circles = place_separated_axes(6, 0.5, 1).unwrap();
        let fam = BeamFamily::new(k, circles).unwrap();
        let order = [3usize, 0, 5, 1, 4, 2];
        let perm = fam.permuted(&order);
        let (a, _) = orthonormalize(&fam, OrthoMethod::Symmetric, &g).unwrap();
        let (b, _) = orthonormalize(&perm, OrthoMethod::Symmetric, &g).unwrap();
        for (i, &src) in order.iter().enumerate() {
            for m in 0..(2 * k + 1) {
                let d = (b.coefficients()[(i, m)] - a.coefficients()[(src, m)]).norm();
                assert!(d < 1e-12, "{d}");
            }
        }
        // sequential depends on order
        let (c, _) = orthonormalize(&fam, OrthoMethod::Sequential, &g).unwrap();
        let (d, _) = orthonormalize(&perm, OrthoMethod::Sequential, &g).unwrap();
        let diff: f64 = order
            .iter()
            .enumerate()
            .map(|(i, &src)| (d.coefficients().row(i) - c.coefficients().row(src)).norm())
            .sum();
        assert!(diff > 1e-6);
    }

    #[test]
    fn completion_gives_full_basis() {
        let k = 5;
        let g = build_grid(k, 1.0).unwrap();
        let fam = BeamFamily::new(k, place_separated_axes(3, 0.8, 0).unwrap()).unwrap();
        let (frag, _) = orthonormalize(&fam, OrthoMethod::Symmetric, &g).unwrap();
        let full = complete_basis(&frag).unwrap();
        assert!(full.is_complete());
        assert!(full.orthonormality_defect() < 1e-12);
        for j in 0..frag.len() {
            assert_eq!(full.row(j), frag.row(j));
        }
    }

    #[test]
    fn experiment_single_beam_ratio() {
        let mut vals = Vec::new();
        for k in [64usize, 128] {
            let g = build_grid(k, 1.0).unwrap();
            let cfg = BeamExperimentConfig {
                k,
                count_exponents: vec![1.0],
                separations: vec![0.5],
                method: OrthoMethod::Symmetric,
                seed: 0,
            };
            let out = beam_experiment(&cfg, &g).unwrap();
            assert_eq!(out.rows.len(), 1);
            assert_eq!(out.rows[0].j, 1);
            vals.push(out.rows[0].mean_l4_over_sqrt_k);
        }
        assert!((vals[0] - vals[1]).abs() / vals[1] < 0.03, "{vals:?}");
    }

    #[test]
    fn experiment_records_infeasible() {
        let k = 16;
        let g = build_grid(k, 1.0).unwrap();
        let cfg = BeamExperimentConfig {
            k,
            count_exponents: vec![0.0],
            separations: vec![1.4],
            method: OrthoMethod::Sequential,
            seed: 0,
        };
        let out = beam_experiment(&cfg, &g).unwrap();
        assert!(out.rows.is_empty());
        assert_eq!(out.skipped.len(), 1);
    }

    #[test]
    fn method_parsing() {
        assert_eq!(
            "lowdin".parse::<OrthoMethod>().unwrap(),
            OrthoMethod::Symmetric
        );
        assert_eq!(OrthoMethod::Sequential.to_string(), "sequential");
        assert!("qr".parse::<OrthoMethod>().is_err());
    }
}
