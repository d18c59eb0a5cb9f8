//! The standard basis `Y_k^m`, its distinguished members (zonal `Z_k`,
//! highest weight `Q_k`, rotated beams), the projection kernel `Π_k` and
//! pointwise ℓᵖ(m) sums over one eigenspace.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numeric::{compensated_sum, cross, dot, norm, Vec3};
use crate::quadrature::{geodesic_distance, HarmonicField, QuadratureGrid, SpherePoint};
use crate::special::{self, highest_weight_constant, legendre_p_unchecked};
use crate::synthesis::{signed_legendre_row, RowSynthesizer};

/// Degree `k`, eigenvalue `λ = sqrt(k(k+1))` and multiplicity `2k+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenvalueInfo {
    pub k: usize,
    pub lambda: f64,
    pub multiplicity: usize,
}

impl EigenvalueInfo {
    pub fn new(k: usize) -> Self {
        let kf = k as f64;
        Self {
            k,
            lambda: (kf * (kf + 1.0)).sqrt(),
            multiplicity: 2 * k + 1,
        }
    }

    pub fn lambda_squared(&self) -> f64 {
        (self.k * (self.k + 1)) as f64
    }
}

/// `r = min_± dist(x, ±(0,0,1))`, in `[0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PolarDistance(f64);

impl PolarDistance {
    pub fn of(x: &SpherePoint) -> Self {
        Self(x.sin_phi().atan2(x.cos_phi().abs()))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

fn order_check(k: usize, m: i64) -> Result<()> {
    if m.unsigned_abs() as usize > k {
        Err(Error::Order { k, m })
    } else {
        Ok(())
    }
}

/// `Y_k^m(x)`; negative orders through `Y_k^{-m} = (-1)^m conj(Y_k^m)`.
pub fn eval_ykm(k: usize, m: i64, x: &SpherePoint) -> Result<Complex64> {
    order_check(k, m)?;
    let am = m.unsigned_abs() as usize;
    let n = special::normalized_assoc_legendre(k, am, x.cos_phi())?;
    let v = Complex64::from_polar(n, am as f64 * x.theta());
    if m < 0 {
        let sign = if am % 2 == 1 { -1.0 } else { 1.0 };
        Ok(sign * v.conj())
    } else {
        Ok(v)
    }
}

/// `[Y_k^{-k}(x), …, Y_k^k(x)]` from one O(k) Legendre sweep.
pub fn eval_basis_row(k: usize, x: &SpherePoint) -> Vec<Complex64> {
    let mut legendre = vec![0.0; 2 * k + 1];
    let mut scratch = vec![0.0; k + 1];
    signed_legendre_row(k, x.cos_phi(), x.sin_phi(), &mut legendre, &mut scratch);
    let theta = x.theta();
    legendre
        .iter()
        .enumerate()
        .map(|(idx, l)| {
            let m = idx as f64 - k as f64;
            Complex64::from_polar(1.0, m * theta) * l
        })
        .collect()
}

/// `|Y_k^m(x)|` for `m = 0..=k`; the moduli for `-m` are the same.
pub fn basis_moduli(k: usize, x: &SpherePoint) -> Vec<f64> {
    let mut v = special::order_sweep(k, x.cos_phi(), x.sin_phi());
    v.iter_mut().for_each(|a| *a = a.abs());
    v
}

/// `Π_k(x, y) = ((2k+1)/4π) P_k(cos d(x, y))`.
pub fn projection_kernel(k: usize, x: &SpherePoint, y: &SpherePoint) -> f64 {
    let c = x.dot(y).clamp(-1.0, 1.0);
    (2 * k + 1) as f64 / (4.0 * PI) * legendre_p_unchecked(k, c)
}

/// `Σ_m Y_k^m(x) conj(Y_k^m(y))` summed explicitly.
pub fn projection_kernel_sum(k: usize, x: &SpherePoint, y: &SpherePoint) -> Complex64 {
    let rx = eval_basis_row(k, x);
    let ry = eval_basis_row(k, y);
    rx.iter().zip(&ry).map(|(a, b)| a * b.conj()).sum()
}

/// `(Σ_m |Y_k^m(x)|^p)^{1/p}`.
pub fn ell_p_sum(k: usize, x: &SpherePoint, p: f64) -> Result<f64> {
    ell_p_sum_colatitude(k, x.cos_phi(), x.sin_phi(), p)
}

/// [`ell_p_sum`] at colatitude given by `(cos φ, sin φ)`; the sum does not
/// depend on longitude.
pub fn ell_p_sum_colatitude(k: usize, cos_phi: f64, sin_phi: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid("p", format!("{p} < 1")));
    }
    let row = special::order_sweep(k, cos_phi, sin_phi);
    if p == f64::INFINITY {
        return Ok(row.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let pow = |v: f64| -> f64 {
        let a2 = v * v;
        match p {
            2.0 => a2,
            4.0 => a2 * a2,
            _ => v.abs().powf(p),
        }
    };
    let total =
        compensated_sum(
            row.iter()
                .enumerate()
                .map(|(m, &v)| if m == 0 { pow(v) } else { 2.0 * pow(v) }),
        );
    Ok(total.powf(1.0 / p))
}

/// `∫_0^{2π} |Π_k(x, e^{iθ}x)|² dθ` on `4k+1` equispaced angles, where
/// `e^{iθ}x` is rotation about the x₃-axis. The integrand is a trigonometric
/// polynomial of degree `2k`, so the rule is exact.
pub fn theta_integral(k: usize, x: &SpherePoint) -> f64 {
    let n = 4 * k + 1;
    let h = 2.0 * PI / n as f64;
    h * compensated_sum((0..n).map(|j| {
        let y = x.rotate_about_pole(h * j as f64);
        projection_kernel(k, x, &y).powi(2)
    }))
}

/// Which case of the pointwise ℓ⁴ envelope applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EnvelopeBranch {
    /// `r ≤ 2/k`: `k^{1/2}`.
    Polar,
    /// `r ≥ 2/k`: `k^{1/4} r^{-1/4} (log kr)^{1/4}`.
    Bulk,
}

/// The envelope `k^{1/2}` (`r ≤ 2/k`) or `k^{1/4} r^{-1/4} (log kr)^{1/4}`
/// (`r > 2/k`), with `log kr` clamped below by `log 2`.
pub fn pointwise_envelope(k: usize, r: f64) -> (f64, EnvelopeBranch) {
    let kf = k as f64;
    if r <= 2.0 / kf {
        (kf.sqrt(), EnvelopeBranch::Polar)
    } else {
        let log = (kf * r).ln().max(std::f64::consts::LN_2);
        ((kf / r * log).powf(0.25), EnvelopeBranch::Bulk)
    }
}

/// `(Σ_m |Y_k^m(x)|⁴)^{1/4}` divided by [`pointwise_envelope`].
pub fn pointwise_bound_ratio(k: usize, x: &SpherePoint) -> Result<f64> {
    if k < 2 {
        return Err(invalid("k", format!("envelope needs k >= 2, got {k}")));
    }
    let r = PolarDistance::of(x).value();
    let (env, _) = pointwise_envelope(k, r);
    Ok(ell_p_sum(k, x, 4.0)? / env)
}

/// `|Π_k(x, y)| k^{-1/2} (k^{-1} + d(x, y))^{1/2}`.
pub fn kernel_bound_ratio(k: usize, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k", "kernel bound needs k >= 1"));
    }
    let kf = k as f64;
    let d = geodesic_distance(x, y);
    Ok(projection_kernel(k, x, y).abs() * (1.0 / kf + d).sqrt() / kf.sqrt())
}

/// `σ(q) = max(2(1/2 − 1/q) − 1/2, (1/2)(1/2 − 1/q))`, `q > 2` (∞ allowed).
pub fn sigma_exponent(q: f64) -> Result<f64> {
    if q.is_nan() || q <= 2.0 {
        return Err(invalid("q", format!("σ(q) needs q > 2, got {q}")));
    }
    let a = 0.5 - 1.0 / q;
    Ok((2.0 * a - 0.5).max(0.5 * a))
}

/// 3×3 rotation taking `axis` to `(0, 0, 1)`.
///
/// Rodrigues rotation about `axis × e₃`; identity when aligned and the
/// π-rotation about the x₁-axis when anti-aligned.
pub fn rotation_to_pole(axis: &Vec3) -> [[f64; 3]; 3] {
    let e3 = [0.0, 0.0, 1.0];
    let c = cross(axis, &e3);
    let s = norm(&c);
    let cos = dot(axis, &e3);
    if s < 1e-15 {
        return if cos > 0.0 {
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        } else {
            [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]
        };
    }
    let n = [c[0] / s, c[1] / s, c[2] / s];
    let one_c = 1.0 - cos;
    let mut r = [[0.0; 3]; 3];
    let skew = [[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let id = if i == j { 1.0 } else { 0.0 };
            *v = id * cos + s * skew[i][j] + one_c * n[i] * n[j];
        }
    }
    r
}

/// Highest-weight harmonic with respect to the circle with the given axis,
/// `c_k ((Rx)₁ + i(Rx)₂)^k` with `R` from [`rotation_to_pole`].
pub fn eval_beam(k: usize, axis: &Vec3, x: &SpherePoint) -> Complex64 {
    let r = rotation_to_pole(axis);
    eval_beam_rotated(k, &r, x)
}

fn eval_beam_rotated(k: usize, r: &[[f64; 3]; 3], x: &SpherePoint) -> Complex64 {
    let p = x.xyz();
    let y1 = r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2];
    let y2 = r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2];
    let z = Complex64::new(y1, y2);
    let modulus = z.norm();
    if k == 0 {
        return Complex64::new(highest_weight_constant(0), 0.0);
    }
    if modulus == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    // sign makes the unrotated beam coincide with Y_k^k
    let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
    let ln_mod = special::ln_diagonal_constant(k) + k as f64 * modulus.ln();
    Complex64::from_polar(sign * ln_mod.exp(), k as f64 * z.arg())
}

/// Field families that can be sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Standard {
        k: usize,
        m: i64,
    },
    Zonal {
        k: usize,
    },
    HighestWeight {
        k: usize,
    },
    Beam {
        k: usize,
        axis: Vec3,
    },
    /// `Σ_m coeffs[m + k] Y_k^m`.
    Coefficient {
        k: usize,
        coeffs: Vec<Complex64>,
    },
}

impl FieldKind {
    pub fn degree(&self) -> usize {
        match self {
            FieldKind::Standard { k, .. }
            | FieldKind::Zonal { k }
            | FieldKind::HighestWeight { k }
            | FieldKind::Beam { k, .. }
            | FieldKind::Coefficient { k, .. } => *k,
        }
    }

    pub fn label(&self) -> String {
        match self {
            FieldKind::Standard { k, m } => format!("Y_{k}_{m}"),
            FieldKind::Zonal { k } => format!("Z_{k}"),
            FieldKind::HighestWeight { k } => format!("Q_{k}"),
            FieldKind::Beam { k, axis } => {
                format!("beam_{k}_({:.4},{:.4},{:.4})", axis[0], axis[1], axis[2])
            }
            FieldKind::Coefficient { k, .. } => format!("coeff_{k}"),
        }
    }
}

/// Samples the requested function on every grid node.
pub fn make_field<'g>(kind: &FieldKind, grid: &'g QuadratureGrid) -> Result<HarmonicField<'g>> {
    let n_theta = grid.n_theta();
    let values: Vec<Complex64> = match kind {
        FieldKind::Standard { k, m } => {
            order_check(*k, *m)?;
            standard_field(grid, *k, *m)
        }
        FieldKind::Zonal { k } => standard_field(grid, *k, 0),
        FieldKind::HighestWeight { k } => standard_field(grid, *k, *k as i64),
        FieldKind::Beam { k, axis } => {
            let n = norm(axis);
            if (n - 1.0).abs() > crate::quadrature::UNIT_TOLERANCE {
                return Err(invalid("axis", format!("|a| = {n} is not 1")));
            }
            let r = rotation_to_pole(axis);
            (0..grid.n_phi())
                .into_par_iter()
                .flat_map_iter(|i| (0..n_theta).map(move |j| (i, j)))
                .map(|(i, j)| eval_beam_rotated(*k, &r, &grid.point(i, j)))
                .collect()
        }
        FieldKind::Coefficient { k, coeffs } => {
            if coeffs.len() != 2 * k + 1 {
                return Err(invalid(
                    "coefficients",
                    format!("need {} entries, got {}", 2 * k + 1, coeffs.len()),
                ));
            }
            let synth = RowSynthesizer::new(*k, coeffs, grid);
            synth.map_rings(grid, |_, v| v.to_vec()).concat()
        }
    };
    HarmonicField::new(grid, values, kind.label())
}

fn standard_field(grid: &QuadratureGrid, k: usize, m: i64) -> Vec<Complex64> {
    let am = m.unsigned_abs() as usize;
    let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    let n_theta = grid.n_theta();
    let phases: Vec<Complex64> = grid
        .theta()
        .iter()
        .map(|t| Complex64::from_polar(1.0, m as f64 * t))
        .collect();
    (0..grid.n_phi())
        .into_par_iter()
        .flat_map_iter(|i| {
            let t = grid.cos_phi()[i];
            let l = special::normalized_assoc_legendre(k, am, t).unwrap_or(0.0) * sign;
            let phases = &phases;
            (0..n_theta).map(move |j| phases[j] * l)
        })
        .collect()
}

/// `(Σ_m |Y_k^m|⁴)^{1/4}` per ring of the grid.
pub fn ell4_profile(k: usize, grid: &QuadratureGrid) -> Vec<f64> {
    (0..grid.n_phi())
        .into_par_iter()
        .map(|i| {
            ell_p_sum_colatitude(k, grid.cos_phi()[i], grid.sin_phi()[i], 4.0)
                .expect("p = 4 is valid")
        })
        .collect()
}
