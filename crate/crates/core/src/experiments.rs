//! The quantitative experiments: power-law fits of norms, the averaged L⁴
//! table, envelope and superlevel sweeps, tube ratios, and the identity
//! suite behind `verify`.
//!
//! Every `|Y_k^m|²` is invariant under rotation about the x₃-axis, so
//! integrals of the standard basis reduce to one-dimensional Gauss–Legendre
//! sums in `t = cos φ`; the certificates report the node count against the
//! polynomial degree of the integrand.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::harmonics::{
    ell_p_sum, ell_p_sum_colatitude, make_field, pointwise_envelope, projection_kernel,
    projection_kernel_sum, sigma_exponent, theta_integral, EigenvalueInfo, EnvelopeBranch,
    FieldKind,
};
use crate::numeric::compensated_sum;
use crate::quadrature::{
    build_grid, gauss_legendre, lp_integral, sup_circles, tube_mass, ArcSegment, GreatCircle,
    QuadratureGrid, SpherePoint, MIN_TUBE_RINGS,
};
use crate::random::{identity_defect, lambda4, CoefficientBasis};
use crate::special::{normalized_assoc_legendre, order_sweep, wallis_integral};

/// Pass/fail outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: String,
    pub detail: String,
}

impl Gate {
    pub fn new(
        name: impl Into<String>,
        passed: bool,
        value: f64,
        bound: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed,
            value,
            bound: bound.into(),
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Node counts of a rule against the degree of what it integrates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCertificate {
    pub n_phi: usize,
    /// `0` for one-dimensional rules in `cos φ`.
    pub n_theta: usize,
    /// Gauss–Legendre is exact up to degree `2 n_φ − 1` in `cos φ`.
    pub exact_degree: usize,
    /// Polynomial degree of the integrand in `cos φ`, when it is one.
    pub integrand_degree: Option<usize>,
    pub exact: bool,
}

impl GridCertificate {
    fn one_dimensional(n: usize, integrand_degree: Option<usize>) -> Self {
        let exact_degree = 2 * n - 1;
        Self {
            n_phi: n,
            n_theta: 0,
            exact_degree,
            integrand_degree,
            exact: integrand_degree.is_some_and(|d| d <= exact_degree),
        }
    }

    fn of_grid(grid: &QuadratureGrid, integrand_degree: Option<usize>) -> Self {
        let spec = grid.spec();
        let exact_degree = spec.exact_degree_phi().min(spec.exact_degree_theta());
        Self {
            n_phi: spec.n_phi,
            n_theta: spec.n_theta,
            exact_degree,
            integrand_degree,
            exact: integrand_degree.is_some_and(|d| d <= exact_degree),
        }
    }
}

/// Gauss–Legendre nodes and weights in `t = cos φ` with `n` nodes.
struct Rule1d {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule1d {
    fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    /// `∫_{S²} g(cos φ) dV`.
    fn integrate(&self, values: &[f64]) -> f64 {
        2.0 * PI * compensated_sum(values.iter().zip(&self.weights).map(|(v, w)| v * w))
    }

    fn sin(t: f64) -> f64 {
        ((1.0 - t) * (1.0 + t)).sqrt()
    }
}

/// Serializes an exponent, writing `∞` as the string `"inf"`.
pub fn serialize_exponent<S: serde::Serializer>(
    q: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if q.is_infinite() {
        s.serialize_str(if *q > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*q)
    }
}

pub fn serialize_exponents<S: serde::Serializer>(
    qs: &[f64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Exp(f64);
    impl Serialize for Exp {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            serialize_exponent(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(qs.len()))?;
    for &q in qs {
        seq.serialize_element(&Exp(q))?;
    }
    seq.end()
}

/// `(ln k, ln v)` least squares fit `ln v = exponent·ln k + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// Slope of the same data against `ln λ`, `λ = sqrt(k(k+1))`.
    pub lambda_exponent: f64,
    pub k_min: usize,
    pub k_max: usize,
    #[serde(serialize_with = "serialize_exponent")]
    pub q: f64,
    pub target: f64,
}

/// Residual RMS above which a fitted slope is not trusted.
pub const MAX_FIT_RESIDUAL: f64 = 0.05;

impl PowerLawFit {
    /// Slope within `tol` of the target and residual RMS within
    /// [`MAX_FIT_RESIDUAL`].
    pub fn matches_target(&self, tol: f64) -> bool {
        (self.exponent - self.target).abs() <= tol && self.residual_rms <= MAX_FIT_RESIDUAL
    }
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|a| (a - mx).powi(2)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = compensated_sum(
        x.iter()
            .zip(y)
            .map(|(a, b)| (b - intercept - slope * a).powi(2)),
    );
    (slope, intercept, (rss / n).sqrt())
}

/// Fits `values ≈ e^c k^s` over `ks`.
pub fn fit_power_law(ks: &[usize], values: &[f64], q: f64, target: f64) -> Result<PowerLawFit> {
    if ks.len() != values.len() {
        return Err(invalid("fit", "k and value lists differ in length"));
    }
    let distinct = {
        let mut v = ks.to_vec();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    if distinct < 2 || ks.contains(&0) {
        return Err(invalid("k-range", "need two distinct positive k"));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(invalid("fit", format!("cannot take the log of {v}")));
    }
    let lk: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
    let ll: Vec<f64> = ks
        .iter()
        .map(|&k| EigenvalueInfo::new(k).lambda.ln())
        .collect();
    let lv: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (exponent, intercept, residual_rms) = least_squares(&lk, &lv);
    let (lambda_exponent, _, _) = least_squares(&ll, &lv);
    Ok(PowerLawFit {
        exponent,
        intercept,
        residual_rms,
        lambda_exponent,
        k_min: *ks.iter().min().unwrap(),
        k_max: *ks.iter().max().unwrap(),
        q,
        target,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingFamily {
    Zonal,
    HighestWeight,
}

impl ScalingFamily {
    fn order(self, k: usize) -> usize {
        match self {
            ScalingFamily::Zonal => 0,
            ScalingFamily::HighestWeight => k,
        }
    }

    /// Predicted exponent of `‖f‖_q` in `k`.
    pub fn target_exponent(self, q: f64) -> Result<f64> {
        match self {
            ScalingFamily::Zonal => sigma_exponent(q),
            ScalingFamily::HighestWeight => {
                if q == 2.0 {
                    Ok(0.0)
                } else {
                    let a = 0.5 - 1.0 / q;
                    Ok(0.5 * a)
                }
            }
        }
    }
}

impl FromStr for ScalingFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zonal" => Ok(Self::Zonal),
            "highest_weight" | "highest-weight" => Ok(Self::HighestWeight),
            other => Err(invalid("family", format!("unknown family {other:?}"))),
        }
    }
}

impl std::fmt::Display for ScalingFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScalingFamily::Zonal => "zonal",
            ScalingFamily::HighestWeight => "highest_weight",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub k: usize,
    pub lambda: f64,
    pub norm: f64,
    pub n_nodes: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingExperiment {
    pub family: ScalingFamily,
    #[serde(serialize_with = "serialize_exponent")]
    pub q: f64,
    pub rows: Vec<ScalingRow>,
    pub fit: PowerLawFit,
}

/// `‖Y_k^m‖_{L^q}` from the rotation-invariant profile `|N_k^m(t)|`.
///
/// For even `q` (or even `qm`) the integrand is a polynomial of degree
/// `qk` in `t` and the rule is chosen exact for it. `q = ∞` takes the max
/// over the nodes together with both poles.
pub fn standard_lq_norm(
    k: usize,
    m: usize,
    q: f64,
    oversample: f64,
) -> Result<(f64, GridCertificate)> {
    if m > k {
        return Err(Error::Order { k, m: m as i64 });
    }
    if q.is_nan() || q < 1.0 {
        return Err(invalid("q", format!("{q} < 1")));
    }
    if !(oversample.is_finite() && oversample >= 1.0) {
        return Err(invalid("oversample", format!("{oversample} < 1")));
    }
    if q == f64::INFINITY {
        let n = (((4 * k + 1) as f64 * oversample).ceil() as usize) | 1;
        let (nodes, _) = gauss_legendre(n);
        let max = nodes
            .iter()
            .chain(&[1.0, -1.0])
            .map(|&t| normalized_assoc_legendre(k, m, t).map(f64::abs))
            .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))?;
        return Ok((max, GridCertificate::one_dimensional(n, None)));
    }
    let polynomial = q.fract() == 0.0
        && ((q as u64).is_multiple_of(2) || (q as u64 * m as u64).is_multiple_of(2));
    let degree = (q.ceil() as usize) * k;
    let n = (((degree + 2) / 2) as f64 * oversample).ceil() as usize;
    let rule = Rule1d::new(n.max(1));
    let vals: Vec<f64> = rule
        .nodes
        .iter()
        .map(|&t| normalized_assoc_legendre(k, m, t).map(|v| v.abs().powf(q)))
        .collect::<Result<_>>()?;
    let cert = GridCertificate::one_dimensional(rule.len(), polynomial.then_some(q as usize * k));
    Ok((rule.integrate(&vals).powf(1.0 / q), cert))
}

/// Norms of `Z_k` or `Q_k` over `ks` and the power-law fit against the
/// predicted exponent.
pub fn scaling_experiment(
    family: ScalingFamily,
    q: f64,
    ks: &[usize],
    oversample: f64,
) -> Result<ScalingExperiment> {
    if ks.len() < 4 {
        return Err(invalid(
            "k-range",
            format!("need at least 4 degrees, got {}", ks.len()),
        ));
    }
    if ks.contains(&0) {
        return Err(invalid("k-range", "degrees must be positive"));
    }
    if q.is_nan() || q < 1.0 {
        return Err(invalid("q", format!("{q} < 1")));
    }
    if family == ScalingFamily::Zonal && (q.is_nan() || q < 8.0) {
        return Err(invalid(
            "q",
            format!("zonal fits need q >= 8 or q = inf to stay clear of the kink at 6, got {q}"),
        ));
    }
    let target = family.target_exponent(q)?;
    let rows: Vec<ScalingRow> = ks
        .par_iter()
        .map(|&k| {
            let (norm, cert) = standard_lq_norm(k, family.order(k), q, oversample)?;
            Ok(ScalingRow {
                k,
                lambda: EigenvalueInfo::new(k).lambda,
                norm,
                n_nodes: cert.n_phi,
                exact: cert.exact,
            })
        })
        .collect::<Result<_>>()?;
    let norms: Vec<f64> = rows.iter().map(|r| r.norm).collect();
    let fit = fit_power_law(ks, &norms, q, target)?;
    Ok(ScalingExperiment {
        family,
        q,
        rows,
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageL4Row {
    pub k: usize,
    /// `(2k+1)^{-1} Σ_m ‖Y_k^m‖⁴_{L⁴}`.
    pub a_k: f64,
    /// `A_k / ln k`; absent for `k < 2`.
    pub ratio: Option<f64>,
    /// `Λ⁴_k` of the standard basis, `(2k+1) A_k`.
    pub lambda4_standard: f64,
    pub n_nodes: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageL4Experiment {
    pub rows: Vec<AverageL4Row>,
    /// `min` of the ratio over rows with `k ≥ 2`.
    pub band_low: f64,
    pub band_high: f64,
    /// `A_k` strictly increasing along the given order of `ks`.
    pub increasing: bool,
}

impl AverageL4Experiment {
    pub fn band_width(&self) -> f64 {
        self.band_high / self.band_low
    }
}

/// `A_k` for one degree; `Σ_m |Y_k^m|⁴` has degree `4k` in `cos φ`.
pub fn average_l4(k: usize, oversample: f64) -> Result<(f64, GridCertificate)> {
    if !(oversample.is_finite() && oversample >= 1.0) {
        return Err(invalid("oversample", format!("{oversample} < 1")));
    }
    let n = ((2 * k + 1) as f64 * oversample).ceil() as usize;
    let rule = Rule1d::new(n);
    let vals: Vec<f64> = rule
        .nodes
        .iter()
        .map(|&t| ell_p_sum_colatitude(k, t, Rule1d::sin(t), 4.0).map(|v| v.powi(4)))
        .collect::<Result<_>>()?;
    let cert = GridCertificate::one_dimensional(n, Some(4 * k));
    Ok((rule.integrate(&vals) / (2 * k + 1) as f64, cert))
}

pub fn average_l4_experiment(ks: &[usize], oversample: f64) -> Result<AverageL4Experiment> {
    if ks.is_empty() {
        return Err(invalid("k-range", "no degrees given"));
    }
    let rows: Vec<AverageL4Row> = ks
        .par_iter()
        .map(|&k| {
            let (a_k, cert) = average_l4(k, oversample)?;
            Ok(AverageL4Row {
                k,
                a_k,
                ratio: (k >= 2).then(|| a_k / (k as f64).ln()),
                lambda4_standard: a_k * (2 * k + 1) as f64,
                n_nodes: cert.n_phi,
                exact: cert.exact,
            })
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let band_low = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let band_high = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let increasing = rows.windows(2).all(|w| w[1].a_k > w[0].a_k);
    Ok(AverageL4Experiment {
        rows,
        band_low,
        band_high,
        increasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub k: usize,
    /// `sup_r` of the ℓ⁴ sum over the envelope.
    pub sup_ratio: f64,
    pub argmax_r: f64,
    pub argmax_branch: EnvelopeBranch,
    /// Ratio at the pole, `r = 0`.
    pub pole_ratio: f64,
    /// Closed form `sqrt((2k+1)/4π) / k^{1/2}`.
    pub pole_closed_form: f64,
    /// `sup_{r ≥ 2/k} (ℓ⁴ sum)⁴ r / (k ln(kr))`, `ln` clamped below by `ln 2`.
    pub profile_sup: f64,
    pub n_colatitudes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeExperiment {
    pub rows: Vec<EnvelopeRow>,
    /// `max / min` of the per-k sup ratios.
    pub band: f64,
}

/// Sweeps `r ∈ [0, π/2]` on `max(n_colat, 32k + 1)` equispaced colatitudes.
pub fn pointwise_envelope_experiment(ks: &[usize], n_colat: usize) -> Result<EnvelopeExperiment> {
    if ks.is_empty() {
        return Err(invalid("k-range", "no degrees given"));
    }
    if let Some(k) = ks.iter().find(|&&k| k < 2) {
        return Err(invalid("k", format!("envelope needs k >= 2, got {k}")));
    }
    let rows: Vec<EnvelopeRow> = ks
        .par_iter()
        .map(|&k| {
            let kf = k as f64;
            let n = n_colat.max(32 * k + 1).max(2);
            let mut best = (f64::NEG_INFINITY, 0.0, EnvelopeBranch::Polar);
            let mut profile_sup: f64 = 0.0;
            let mut pole_ratio = f64::NAN;
            for i in 0..n {
                let r = 0.5 * PI * i as f64 / (n - 1) as f64;
                let (s, c) = r.sin_cos();
                let ell4 = ell_p_sum_colatitude(k, c, s, 4.0)?;
                let (env, branch) = pointwise_envelope(k, r);
                let ratio = ell4 / env;
                if i == 0 {
                    pole_ratio = ratio;
                }
                if ratio > best.0 {
                    best = (ratio, r, branch);
                }
                if r >= 2.0 / kf {
                    let log = (kf * r).ln().max(std::f64::consts::LN_2);
                    profile_sup = profile_sup.max(ell4.powi(4) * r / (kf * log));
                }
            }
            Ok(EnvelopeRow {
                k,
                sup_ratio: best.0,
                argmax_r: best.1,
                argmax_branch: best.2,
                pole_ratio,
                pole_closed_form: ((2.0 * kf + 1.0) / (4.0 * PI)).sqrt() / kf.sqrt(),
                profile_sup,
                n_colatitudes: n,
            })
        })
        .collect::<Result<_>>()?;
    let hi = rows
        .iter()
        .map(|r| r.sup_ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = rows
        .iter()
        .map(|r| r.sup_ratio)
        .fold(f64::INFINITY, f64::min);
    Ok(EnvelopeExperiment {
        rows,
        band: hi / lo,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperlevelRow {
    pub k: usize,
    pub c: f64,
    /// `C λ^{1/2}`.
    pub threshold: f64,
    /// Area of `{x : ℓ⁴ sum ≥ C λ^{1/2}}`.
    pub measure: f64,
    /// `λ^{1/2}` times the area.
    pub scaled: f64,
    /// Largest ℓ⁴ sum on the rule, over `λ^{1/2}`.
    pub max_over_sqrt_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperlevelExperiment {
    pub rows: Vec<SuperlevelRow>,
    /// Largest scaled measure for each `C`, in the order given.
    pub sup_scaled: Vec<(f64, f64)>,
}

/// Measures of ℓ⁴ superlevel sets on a Gauss–Legendre rule with
/// `⌈(2k+1)·oversample⌉` nodes in `cos φ`.
pub fn superlevel_experiment(
    ks: &[usize],
    cs: &[f64],
    oversample: f64,
) -> Result<SuperlevelExperiment> {
    if ks.is_empty() || cs.is_empty() {
        return Err(invalid("superlevel", "need at least one degree and one C"));
    }
    if let Some(k) = ks.iter().find(|&&k| k < 2) {
        return Err(invalid(
            "k",
            format!("superlevel sweep needs k >= 2, got {k}"),
        ));
    }
    if let Some(c) = cs.iter().find(|c| c.is_nan() || **c < 0.0) {
        return Err(invalid("C", format!("{c} must be nonnegative")));
    }
    if !(oversample.is_finite() && oversample >= 1.0) {
        return Err(invalid("oversample", format!("{oversample} < 1")));
    }
    let per_k: Vec<Vec<SuperlevelRow>> = ks
        .par_iter()
        .map(|&k| {
            let n = ((2 * k + 1) as f64 * oversample).ceil() as usize;
            let rule = Rule1d::new(n);
            let ell4: Vec<f64> = rule
                .nodes
                .iter()
                .map(|&t| ell_p_sum_colatitude(k, t, Rule1d::sin(t), 4.0))
                .collect::<Result<_>>()?;
            let sqrt_lambda = EigenvalueInfo::new(k).lambda.sqrt();
            let max = ell4.iter().copied().fold(0.0, f64::max);
            Ok(cs
                .iter()
                .map(|&c| {
                    let threshold = c * sqrt_lambda;
                    let ind: Vec<f64> = ell4
                        .iter()
                        .map(|&v| if v >= threshold { 1.0 } else { 0.0 })
                        .collect();
                    let measure = rule.integrate(&ind);
                    SuperlevelRow {
                        k,
                        c,
                        threshold,
                        measure,
                        scaled: sqrt_lambda * measure,
                        max_over_sqrt_lambda: max / sqrt_lambda,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SuperlevelRow> = per_k.into_iter().flatten().collect();
    let sup_scaled = cs
        .iter()
        .map(|&c| {
            let s = rows
                .iter()
                .filter(|r| r.c == c)
                .map(|r| r.scaled)
                .fold(0.0, f64::max);
            (c, s)
        })
        .collect();
    Ok(SuperlevelExperiment { rows, sup_scaled })
}

/// Arc offsets per sampled circle in the tube sup.
pub const ARC_OFFSETS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeRatioRow {
    pub k: usize,
    /// Order `m ≥ 0`; `|Y_k^{-m}| = |Y_k^m|` gives the same row.
    pub m: usize,
    pub l4_norm: f64,
    /// Largest `‖Y_k^m‖²_{L²(T)}` over the sampled unit-arc tubes.
    pub tube_sup: f64,
    /// `x₃` component of the axis of the maximizing circle.
    pub sup_axis_z: f64,
    pub sup_offset: usize,
    /// `‖f‖₄ / (λ^{1/8} (tube_sup)^{1/12} + 1)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeRatioExperiment {
    pub rows: Vec<TubeRatioRow>,
    pub max_ratio: f64,
    /// `(k, max_m ratio)` in the order given.
    pub per_k_max: Vec<(usize, f64)>,
    /// Fewest φ-rings met by any sampled tube.
    pub min_rings_inside: usize,
    pub grids: Vec<GridCertificate>,
}

/// Oversampling that puts at least [`MIN_TUBE_RINGS`] rings across a tube
/// of width `λ^{-1/2}`.
fn tube_oversample(k: usize, requested: f64) -> f64 {
    let lambda = EigenvalueInfo::new(k.max(1)).lambda;
    let width = lambda.powf(-0.5).min(PI / 2.0);
    let need = (MIN_TUBE_RINGS + 2) as f64 * PI / (2.0 * width * (2 * k + 1) as f64);
    requested.max(need)
}

/// For every `(k, m)`: the L⁴ norm, the largest L² mass in a tube of width
/// `λ^{-1/2}` around a unit-length arc, and their combination.
///
/// Arcs are sampled on [`sup_circles`] with [`ARC_OFFSETS`] evenly spaced
/// starting angles; a sampled sup is a lower bound for the true one.
pub fn tube_ratio_experiment(ks: &[usize], oversample: f64) -> Result<TubeRatioExperiment> {
    if ks.is_empty() {
        return Err(invalid("k-range", "no degrees given"));
    }
    if ks.contains(&0) {
        return Err(invalid("k", "tube ratios need k >= 1"));
    }
    if !(oversample.is_finite() && oversample >= 1.0) {
        return Err(invalid("oversample", format!("{oversample} < 1")));
    }
    let mut rows = Vec::new();
    let mut per_k_max = Vec::new();
    let mut grids = Vec::new();
    let mut min_rings_inside = usize::MAX;
    for &k in ks {
        let info = EigenvalueInfo::new(k);
        let grid = build_grid(k, tube_oversample(k, oversample))?;
        grids.push(GridCertificate::of_grid(&grid, Some(2 * k)));
        let width = info.lambda.powf(-0.5);
        let arcs: Vec<(f64, usize, ArcSegment)> = sup_circles(k)
            .into_iter()
            .flat_map(|c| {
                (0..ARC_OFFSETS).map(move |o| {
                    let start = 2.0 * PI * o as f64 / ARC_OFFSETS as f64;
                    (c.axis()[2], o, ArcSegment::new(c, start, 1.0))
                })
            })
            .collect();
        let profiles: Vec<(Vec<f64>, usize)> = arcs
            .par_iter()
            .map(|(_, _, arc)| {
                let p = arc_tube_profile(&grid, arc, width);
                let rings = p.iter().filter(|&&a| a > 0.0).count();
                (p, rings)
            })
            .collect();
        min_rings_inside = min_rings_inside.min(profiles.iter().map(|p| p.1).min().unwrap_or(0));
        let squares: Vec<Vec<f64>> = (0..grid.n_phi())
            .map(|i| {
                order_sweep(k, grid.cos_phi()[i], grid.sin_phi()[i])
                    .into_iter()
                    .map(|v| v * v)
                    .collect()
            })
            .collect();
        let mut k_max: f64 = 0.0;
        for m in 0..=k {
            let (l4, _) = standard_lq_norm(k, m, 4.0, 1.0)?;
            let mut best = (f64::NEG_INFINITY, 0.0, 0);
            for ((z, o, _), (profile, _)) in arcs.iter().zip(&profiles) {
                let mass = compensated_sum(profile.iter().zip(&squares).map(|(a, sq)| a * sq[m]));
                if mass > best.0 {
                    best = (mass, *z, *o);
                }
            }
            let ratio = l4 / (info.lambda.powf(0.125) * best.0.powf(1.0 / 12.0) + 1.0);
            k_max = k_max.max(ratio);
            rows.push(TubeRatioRow {
                k,
                m,
                l4_norm: l4,
                tube_sup: best.0,
                sup_axis_z: best.1,
                sup_offset: best.2,
                ratio,
            });
        }
        per_k_max.push((k, k_max));
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(TubeRatioExperiment {
        rows,
        max_ratio,
        per_k_max,
        min_rings_inside,
        grids,
    })
}

/// Per-ring area of the grid nodes within `width` of `arc`. Rings whose
/// colatitude is farther than `width` from the arc's colatitude range are
/// skipped; the range is taken from 65 points along the arc with a margin
/// exceeding the sampling error.
fn arc_tube_profile(grid: &QuadratureGrid, arc: &ArcSegment, width: f64) -> Vec<f64> {
    let samples = 64;
    let (lo, hi) = (0..=samples).fold((PI, 0.0f64), |(lo, hi), s| {
        let phi = arc.point_at(arc.length() * s as f64 / samples as f64).phi();
        (lo.min(phi), hi.max(phi))
    });
    let margin = width + arc.length() / samples as f64;
    (0..grid.n_phi())
        .map(|i| {
            let phi = grid.sin_phi()[i].atan2(grid.cos_phi()[i]);
            if phi < lo - margin || phi > hi + margin {
                return 0.0;
            }
            let count = (0..grid.n_theta())
                .filter(|&j| arc.distance(&grid.point(i, j)) <= width)
                .count();
            count as f64 * grid.point_weight(i)
        })
        .collect()
}

/// `erf(1)`: the Gaussian-limit mass of `Q_k` in the tube of width `k^{-1/2}`.
pub const ERF_1: f64 = 0.842_700_792_949_714_9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub k: usize,
    pub width: f64,
    /// Mass of `Q_k` within `width` of the equator.
    pub highest_weight_mass: f64,
    pub zonal_mass: f64,
    pub rings_inside: usize,
    pub resolved: bool,
}

/// Equatorial tube masses of `Q_k` and `Z_k` at width `k^{-1/2}`, with
/// per-node membership on `build_grid(k, oversample)`.
pub fn concentration_experiment(ks: &[usize], oversample: f64) -> Result<Vec<ConcentrationRow>> {
    ks.iter()
        .map(|&k| {
            if k == 0 {
                return Err(invalid("k", "concentration needs k >= 1"));
            }
            let grid = build_grid(k, oversample)?;
            let width = (k as f64).powf(-0.5);
            let eq = GreatCircle::equator();
            let q = tube_mass(
                &make_field(&FieldKind::HighestWeight { k }, &grid)?,
                &eq,
                width,
            )?;
            let z = tube_mass(&make_field(&FieldKind::Zonal { k }, &grid)?, &eq, width)?;
            Ok(ConcentrationRow {
                k,
                width,
                highest_weight_mass: q.mass,
                zonal_mass: z.mass,
                rings_inside: q.rings_inside,
                resolved: q.resolved,
            })
        })
        .collect()
}

/// Quadrature Gram matrix of `Y_k^{-k}, …, Y_k^k` on `grid`.
///
/// On ring `i` the θ-sum of `Y_k^m conj(Y_k^{m'})` is
/// `L_m L_{m'} Σ_j e^{i(m−m')θ_j}`, so the Gram matrix is assembled from
/// the ring Legendre rows and the discrete exponential sums.
pub fn standard_gram(k: usize, grid: &QuadratureGrid) -> DMatrix<Complex64> {
    let width = 2 * k + 1;
    let n_theta = grid.n_theta();
    let dtheta = 2.0 * PI / n_theta as f64;
    let exp_sums: Vec<Complex64> = (0..2 * width - 1)
        .map(|d| {
            let d = d as f64 - (width - 1) as f64;
            let s: Complex64 = grid
                .theta()
                .iter()
                .map(|t| Complex64::from_polar(1.0, d * t))
                .sum();
            s * dtheta
        })
        .collect();
    let mut legendre = vec![0.0; width];
    let mut scratch = vec![0.0; k + 1];
    let rows: Vec<Vec<f64>> = (0..grid.n_phi())
        .map(|i| {
            crate::synthesis::signed_legendre_row(
                k,
                grid.cos_phi()[i],
                grid.sin_phi()[i],
                &mut legendre,
                &mut scratch,
            );
            legendre.clone()
        })
        .collect();
    DMatrix::from_fn(width, width, |a, b| {
        let radial = compensated_sum(
            rows.iter()
                .enumerate()
                .map(|(i, l)| grid.gl_weight(i) * l[a] * l[b]),
        );
        radial * exp_sums[a + width - 1 - b]
    })
}

/// Tolerances of the identity suite.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
pub const GRAM_TOLERANCE: f64 = 1e-11;
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub k: usize,
    /// `max |Σ_m |Y_k^m(x)|² / ((2k+1)/4π) − 1|`.
    pub ell2_rel: f64,
    /// `max |Σ_m Y(x) conj Y(y) − Π_k(x, y)| / ((2k+1)/4π)`.
    pub addition_rel: f64,
    /// `max |2π (ℓ⁴ sum)⁴ − θ-integral| / θ-integral`.
    pub theta_rel: f64,
    /// `max |G − I|` for the quadrature Gram matrix.
    pub gram_defect: f64,
}

pub fn random_sphere_points(n: usize, seed: u64) -> Vec<SpherePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let th: f64 = rng.random_range(0.0..2.0 * PI);
            SpherePoint::from_angles(z.clamp(-1.0, 1.0).acos(), th)
        })
        .collect()
}

/// Exact identities of the standard basis at `points` random points per degree.
pub fn identity_sweep(k_max: usize, points: usize, seed: u64) -> Result<Vec<IdentityRow>> {
    (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let xs = random_sphere_points(points, seed ^ (k as u64).wrapping_mul(0x9e37_79b9));
            let ys = random_sphere_points(points, !seed ^ (k as u64).wrapping_mul(0x9e37_79b9));
            let scale = (2 * k + 1) as f64 / (4.0 * PI);
            let mut ell2_rel: f64 = 0.0;
            let mut addition_rel: f64 = 0.0;
            let mut theta_rel: f64 = 0.0;
            for (x, y) in xs.iter().zip(&ys) {
                let s2 = ell_p_sum(k, x, 2.0)?.powi(2);
                ell2_rel = ell2_rel.max((s2 / scale - 1.0).abs());
                let sum = projection_kernel_sum(k, x, y);
                let closed = projection_kernel(k, x, y);
                addition_rel = addition_rel.max((sum - closed).norm() / scale);
                let lhs = 2.0 * PI * ell_p_sum(k, x, 4.0)?.powi(4);
                let rhs = theta_integral(k, x);
                theta_rel = theta_rel.max((lhs - rhs).abs() / rhs);
            }
            let grid = build_grid(k, 1.0)?;
            let gram_defect = identity_defect(&standard_gram(k, &grid));
            Ok(IdentityRow {
                k,
                ell2_rel,
                addition_rel,
                theta_rel,
                gram_defect,
            })
        })
        .collect()
}

/// Closed forms of the degree-one fourth moments from Wallis integrals
/// `W(n) = ∫_0^π sin^n φ dφ`: `(‖Q₁‖₄⁴, ‖Y_1^0‖₄⁴, Λ⁴₁)`.
pub fn degree_one_oracles() -> (f64, f64, f64) {
    // |Q₁|² = (3/8π) sin²φ and |Y_1^0|² = (3/4π) cos²φ.
    let q1 = (3.0 / (8.0 * PI)).powi(2) * 2.0 * PI * wallis_integral(5);
    let cos4_sin = wallis_integral(1) - 2.0 * wallis_integral(3) + wallis_integral(5);
    let y10 = (3.0 / (4.0 * PI)).powi(2) * 2.0 * PI * cos4_sin;
    (q1, y10, y10 + 2.0 * q1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormRow {
    pub quantity: String,
    pub computed: f64,
    pub oracle: f64,
    pub closed_form: f64,
    pub error: f64,
}

/// Degree-one fourth moments from grid quadrature against the Wallis oracles.
pub fn closed_form_checks() -> Result<Vec<ClosedFormRow>> {
    let grid = build_grid(1, 1.0)?;
    let q1 = lp_integral(&make_field(&FieldKind::HighestWeight { k: 1 }, &grid)?, 4.0);
    let y10 = lp_integral(&make_field(&FieldKind::Zonal { k: 1 }, &grid)?, 4.0);
    let l1 = lambda4(&CoefficientBasis::identity(1), &grid)?;
    let (oq, oy, ol) = degree_one_oracles();
    let make = |quantity: &str, computed: f64, oracle: f64, closed: f64| ClosedFormRow {
        quantity: quantity.to_string(),
        computed,
        oracle,
        closed_form: closed,
        error: (computed - closed).abs().max((oracle - closed).abs()),
    };
    Ok(vec![
        make("Q1_L4^4", q1, oq, 3.0 / (10.0 * PI)),
        make("Y1_0_L4^4", y10, oy, 9.0 / (20.0 * PI)),
        make("Lambda4_1_standard", l1, ol, 21.0 / (20.0 * PI)),
    ])
}

/// Gates over an identity sweep and the degree-one closed forms.
pub fn identity_gates(rows: &[IdentityRow], closed: &[ClosedFormRow]) -> Vec<Gate> {
    let worst = |f: fn(&IdentityRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let k_max = rows.iter().map(|r| r.k).max().unwrap_or(0);
    let mut gates = vec![
        {
            let v = worst(|r| r.ell2_rel);
            Gate::new(
                "ell2_identity",
                v <= IDENTITY_TOLERANCE,
                v,
                format!("<= {IDENTITY_TOLERANCE:e}"),
            )
        },
        {
            let v = worst(|r| r.addition_rel);
            Gate::new(
                "addition_theorem",
                v <= IDENTITY_TOLERANCE,
                v,
                format!("<= {IDENTITY_TOLERANCE:e}"),
            )
        },
        {
            let v = worst(|r| r.theta_rel);
            Gate::new(
                "theta_integral_identity",
                v <= IDENTITY_TOLERANCE,
                v,
                format!("<= {IDENTITY_TOLERANCE:e}"),
            )
        },
        {
            let v = worst(|r| r.gram_defect);
            Gate::new(
                "standard_gram",
                v <= GRAM_TOLERANCE,
                v,
                format!("<= {GRAM_TOLERANCE:e}"),
            )
        },
    ];
    for g in &mut gates {
        g.detail = format!("k = 0..={k_max}");
    }
    for c in closed {
        gates.push(Gate::new(
            c.quantity.clone(),
            c.error <= CLOSED_FORM_TOLERANCE,
            c.error,
            format!("<= {CLOSED_FORM_TOLERANCE:e}"),
        ));
    }
    gates
}

/// The exact-identity suite.
pub fn verify_suite(
    k_max: usize,
    points: usize,
    seed: u64,
) -> Result<(Vec<IdentityRow>, Vec<Gate>)> {
    let rows = identity_sweep(k_max, points, seed)?;
    let closed = closed_form_checks()?;
    let gates = identity_gates(&rows, &closed);
    Ok((rows, gates))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_fit_recovers_exact_law() {
        let ks = [4usize, 8, 16, 32];
        let v: Vec<f64> = ks.iter().map(|&k| 3.0 * (k as f64).powf(0.3)).collect();
        let fit = fit_power_law(&ks, &v, 4.0, 0.3).unwrap();
        assert!((fit.exponent - 0.3).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-12);
        assert!(fit.matches_target(1e-9));
        assert!(fit_power_law(&[4, 4], &[1.0, 2.0], 4.0, 0.0).is_err());
    }

    #[test]
    fn scaling_range_and_kink_errors() {
        assert!(scaling_experiment(ScalingFamily::HighestWeight, 4.0, &[8, 16, 32], 1.0).is_err());
        assert!(scaling_experiment(ScalingFamily::Zonal, 6.0, &[8, 16, 32, 64], 1.0).is_err());
        assert!(scaling_experiment(ScalingFamily::Zonal, 4.0, &[8, 16, 32, 64], 1.0).is_err());
        assert!(scaling_experiment(ScalingFamily::Zonal, 8.0, &[8, 16, 32, 64], 1.0).is_ok());
    }

    #[test]
    fn highest_weight_l2_is_flat() {
        let e = scaling_experiment(
            ScalingFamily::HighestWeight,
            2.0,
            &[16, 32, 64, 128, 256],
            1.0,
        )
        .unwrap();
        assert!(e.fit.exponent.abs() < 1e-6, "{}", e.fit.exponent);
        for r in &e.rows {
            assert!((r.norm - 1.0).abs() < 1e-12);
            assert!(r.exact);
        }
    }

    #[test]
    fn zonal_sup_is_pole_value() {
        for k in [3usize, 40, 200] {
            let (v, _) = standard_lq_norm(k, 0, f64::INFINITY, 1.0).unwrap();
            assert!((v - ((2 * k + 1) as f64 / (4.0 * PI)).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn lq_norm_matches_grid_quadrature() {
        let k = 7;
        let grid = build_grid(k, 2.0).unwrap();
        for m in [0usize, 3, 7] {
            let f = make_field(&FieldKind::Standard { k, m: m as i64 }, &grid).unwrap();
            let (n4, cert) = standard_lq_norm(k, m, 4.0, 1.0).unwrap();
            assert!(cert.exact);
            assert!((n4 - f.lp_norm(4.0).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn average_l4_degree_one() {
        let (a1, cert) = average_l4(1, 1.0).unwrap();
        assert!(cert.exact);
        assert!((a1 - 7.0 / (20.0 * PI)).abs() < 1e-14);
        let e = average_l4_experiment(&[1, 2, 4], 1.0).unwrap();
        assert!(e.rows[0].ratio.is_none());
        assert!(e.increasing);
    }

    #[test]
    fn average_l4_matches_identity_basis() {
        let k = 6;
        let grid = build_grid(k, 1.0).unwrap();
        let l = lambda4(&CoefficientBasis::identity(k), &grid).unwrap();
        let (a, _) = average_l4(k, 1.0).unwrap();
        assert!((a * 13.0 - l).abs() < 1e-12 * l);
    }

    #[test]
    fn envelope_pole_value() {
        let e = pointwise_envelope_experiment(&[8, 64], 100).unwrap();
        for r in &e.rows {
            assert!((r.pole_ratio - r.pole_closed_form).abs() < 1e-12);
            assert!(r.sup_ratio >= r.pole_ratio);
            assert!(r.n_colatitudes > 32 * r.k);
        }
        assert!(pointwise_envelope_experiment(&[1], 10).is_err());
    }

    #[test]
    fn superlevel_limits() {
        let e = superlevel_experiment(&[8, 16], &[0.0, 1e6], 2.0).unwrap();
        for r in &e.rows {
            if r.c == 0.0 {
                assert!((r.measure - 4.0 * PI).abs() < 1e-12);
            } else {
                assert_eq!(r.measure, 0.0);
            }
        }
    }

    #[test]
    fn tube_ratio_small_degrees() {
        let e = tube_ratio_experiment(&[2, 6], 1.0).unwrap();
        assert_eq!(e.rows.len(), 3 + 7);
        assert!(e.min_rings_inside >= MIN_TUBE_RINGS);
        for r in &e.rows {
            assert!(r.tube_sup > 0.0 && r.tube_sup <= 1.0 + 1e-12);
            assert!(r.ratio.is_finite() && r.ratio > 0.0);
        }
        let q6 = e.rows.iter().find(|r| r.k == 6 && r.m == 6).unwrap();
        assert!(
            (q6.sup_axis_z.abs() - 1.0).abs() < 1e-12,
            "Q_6 sup off the equator"
        );
    }

    #[test]
    fn banded_profile_matches_full_scan() {
        let grid = build_grid(12, 1.5).unwrap();
        for c in sup_circles(12).iter().step_by(7) {
            for o in 0..ARC_OFFSETS {
                let arc = ArcSegment::new(*c, o as f64, 1.0);
                let full = grid.ring_profile(|y| arc.distance(y) <= 0.3);
                assert_eq!(arc_tube_profile(&grid, &arc, 0.3), full);
            }
        }
    }

    #[test]
    fn concentration_small_degree() {
        let rows = concentration_experiment(&[16], 2.0).unwrap();
        let r = &rows[0];
        assert!(r.resolved);
        assert!(r.highest_weight_mass > 0.7 && r.highest_weight_mass < 1.0);
        assert!(r.zonal_mass < r.highest_weight_mass);
    }

    #[test]
    fn gram_is_identity() {
        for k in [0usize, 1, 5, 20] {
            let g = build_grid(k, 1.0).unwrap();
            assert!(identity_defect(&standard_gram(k, &g)) < 1e-12);
        }
        // With 8 longitudes, m − m' = ±8 aliases onto zero.
        let coarse = QuadratureGrid::with_sizes(11, 8).unwrap();
        assert!(identity_defect(&standard_gram(5, &coarse)) > 1e-3);
    }

    #[test]
    fn closed_forms() {
        let (q, y, l) = degree_one_oracles();
        assert!((q - 3.0 / (10.0 * PI)).abs() < 1e-15);
        assert!((y - 9.0 / (20.0 * PI)).abs() < 1e-15);
        assert!((l - 21.0 / (20.0 * PI)).abs() < 1e-15);
        for row in closed_form_checks().unwrap() {
            assert!(row.error < 1e-13, "{row:?}");
        }
    }

    #[test]
    fn identity_sweep_small() {
        let (rows, gates) = verify_suite(8, 20, 1).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(gates.iter().all(|g| g.passed), "{gates:?}");
    }
}
