//! Legendre polynomials, fully normalized associated Legendre functions and
//! the Wallis/central-binomial quantities that give closed-form norms.
//!
//! Normalization: `normalized_assoc_legendre(k, m, t)` returns the factor
//! `N_k^m(t)` with `Y_k^m(φ, θ) = N_k^m(cos φ) e^{imθ}` orthonormal on the unit
//! sphere, i.e. `2π ∫ N_k^m(t)^2 dt = 1`. The Condon–Shortley phase `(-1)^m` is
//! included.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Slack allowed on `|t| <= 1` before a domain error is raised.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// A degree/order pair `(k, m)` with `|m| <= k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DegreeOrder {
    k: usize,
    m: i64,
}

impl DegreeOrder {
    pub fn new(k: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > k {
            return Err(Error::Order { k, m });
        }
        Ok(Self { k, m })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> i64 {
        self.m
    }

    /// Position of this order in a basis row indexed `m = -k..=k`.
    pub fn row_index(&self) -> usize {
        (self.m + self.k as i64) as usize
    }
}

fn check_domain(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain { value: t });
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// Classical Legendre polynomial `P_k(t)` by the three-term recurrence.
pub fn legendre_p(k: usize, t: f64) -> Result<f64> {
    let t = check_domain(t)?;
    Ok(legendre_p_unchecked(k, t))
}

pub(crate) fn legendre_p_unchecked(k: usize, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, t);
    for n in 1..k {
        let n = n as f64;
        let next = ((2.0 * n + 1.0) * t * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln(Γ(j + 1/2) / Γ(j + 1))`, accurate to a few ulps for every `j`.
///
/// Small `j` use the exact product; large `j` use the difference of the two
/// Stirling series with the leading terms cancelled analytically.
pub fn ln_half_gamma_ratio(j: u64) -> f64 {
    const SWITCH: u64 = 24;
    if j < SWITCH {
        let mut r = PI.sqrt();
        for i in 1..=j {
            let i = i as f64;
            r *= (i - 0.5) / i;
        }
        return r.ln();
    }
    let jf = j as f64;
    let z1 = jf + 0.5;
    let z2 = jf + 1.0;
    let lead = jf * (-0.5 / z2).ln_1p() - 0.5 * z2.ln() + 0.5;
    lead + stirling_tail(z1) - stirling_tail(z2)
}

fn stirling_tail(z: f64) -> f64 {
    // Σ B_{2n} / (2n(2n-1) z^{2n-1}), n = 1..7
    const COEFFS: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in COEFFS.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// Central binomial ratio `(2j)! / (4^j (j!)^2)`.
pub fn central_binomial_ratio(j: u64) -> f64 {
    (ln_half_gamma_ratio(j) - 0.5 * PI.ln()).exp()
}

/// `∫_0^π sin^n φ dφ`.
pub fn wallis_integral(n: u64) -> f64 {
    let j = n / 2;
    let ratio = ln_half_gamma_ratio(j);
    if n.is_multiple_of(2) {
        PI.sqrt() * ratio.exp()
    } else {
        PI.sqrt() / ((j as f64 + 0.5) * ratio.exp())
    }
}

/// `ln |N_k^k|` without the `sin^k φ` factor: `ln sqrt((2k+1)/(4π) · (2k)!/(4^k (k!)^2))`.
pub(crate) fn ln_diagonal_constant(k: usize) -> f64 {
    let kf = k as f64;
    0.5 * ((2.0 * kf + 1.0) / (4.0 * PI)).ln()
        + 0.5 * (ln_half_gamma_ratio(k as u64) - 0.5 * PI.ln())
}

/// Modulus of the normalizing constant `c_k` in `Q_k = c_k (x1 + i x2)^k`.
pub fn highest_weight_constant(k: usize) -> f64 {
    ln_diagonal_constant(k).exp()
}

/// Cached `ln(n!)` values.
#[derive(Debug, Clone)]
pub struct LogGammaTable {
    ln_factorial: Vec<f64>,
}

impl LogGammaTable {
    /// Table covering `0..=max_n`; larger arguments fall back to Stirling.
    pub fn new(max_n: usize) -> Self {
        let mut ln_factorial = Vec::with_capacity(max_n + 1);
        let mut acc = NeumaierSum::default();
        ln_factorial.push(0.0);
        for n in 1..=max_n {
            acc.add((n as f64).ln());
            ln_factorial.push(acc.value());
        }
        Self { ln_factorial }
    }

    /// Process-wide table up to 8192, built once.
    pub fn shared() -> &'static LogGammaTable {
        static TABLE: OnceLock<LogGammaTable> = OnceLock::new();
        TABLE.get_or_init(|| LogGammaTable::new(8192))
    }

    pub fn max_n(&self) -> usize {
        self.ln_factorial.len() - 1
    }

    pub fn ln_factorial(&self, n: usize) -> f64 {
        match self.ln_factorial.get(n) {
            Some(v) => *v,
            None => {
                let z = n as f64 + 1.0;
                (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + stirling_tail(z)
            }
        }
    }
}

/// Two-word floating value `mantissa · 2^exponent` used to carry the
/// Legendre recurrences through ranges far outside f64.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    mantissa: f64,
    exponent: i32,
}

const RESCALE_BITS: i32 = 400;
const RESCALE_UP: f64 = 2.582_249_878_086_908_6e120; // 2^400
const RESCALE_DOWN: f64 = 3.872_591_914_849_318e-121; // 2^-400

impl Scaled {
    fn from_ln(ln_value: f64, sign: f64) -> Self {
        let exponent = (ln_value / std::f64::consts::LN_2).floor() as i32;
        let mantissa = sign * (ln_value - exponent as f64 * std::f64::consts::LN_2).exp();
        Self { mantissa, exponent }
    }
}

fn ldexp(x: f64, e: i32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let half = e / 2;
    x * 2f64.powi(half) * 2f64.powi(e - half)
}

/// `N_k^m(t)` for `0 <= m <= k` via the diagonal start and the upward
/// recurrence in degree.
pub fn normalized_assoc_legendre(k: usize, m: usize, t: f64) -> Result<f64> {
    if m > k {
        return Err(Error::Order { k, m: m as i64 });
    }
    let t = check_domain(t)?;
    let s = ((1.0 - t) * (1.0 + t)).sqrt();
    let column = degree_column(k, m, t, s);
    Ok(column[k - m])
}

/// `[N_m^m(t), N_{m+1}^m(t), …, N_kmax^m(t)]` at fixed order `m`.
pub fn legendre_degree_column(kmax: usize, m: usize, t: f64) -> Result<Vec<f64>> {
    if m > kmax {
        return Err(Error::Order {
            k: kmax,
            m: m as i64,
        });
    }
    let t = check_domain(t)?;
    let s = ((1.0 - t) * (1.0 + t)).sqrt();
    Ok(degree_column(kmax, m, t, s))
}

fn degree_column(kmax: usize, m: usize, t: f64, s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax - m + 1);
    if m > 0 && s == 0.0 {
        out.resize(kmax - m + 1, 0.0);
        return out;
    }
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    let ln_diag = if m == 0 {
        -0.5 * (4.0 * PI).ln()
    } else {
        ln_diagonal_constant(m) + m as f64 * s.ln()
    };
    let diag = Scaled::from_ln(ln_diag, sign);
    let mut exponent = diag.exponent;
    let mut prev = 0.0;
    let mut cur = diag.mantissa;
    out.push(ldexp(cur, exponent));
    let mf = m as f64;
    for l in (m + 1)..=kmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = if l == m + 1 {
            0.0
        } else {
            let l1 = lf - 1.0;
            ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt()
        };
        let next = a * (t * cur - b * prev);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_UP {
            cur *= RESCALE_DOWN;
            prev *= RESCALE_DOWN;
            exponent += RESCALE_BITS;
        }
        out.push(ldexp(cur, exponent));
    }
    out
}

/// All orders at fixed degree: `[N_k^0(t), N_k^1(t), …, N_k^k(t)]`.
///
/// One O(k) sweep of the order recurrence
/// `c_{m-1} N^{m-1} = -(2m cot φ N^m + c_m N^{m+1})`, `c_m = sqrt((k-m)(k+m+1))`,
/// started at the diagonal `m = k`. Downward in `m` follows the growing
/// solution through the polar cap, which keeps it stable.
pub fn legendre_order_sweep(k: usize, t: f64) -> Result<Vec<f64>> {
    let t = check_domain(t)?;
    let s = ((1.0 - t) * (1.0 + t)).sqrt();
    Ok(order_sweep(k, t, s))
}

/// Same as [`legendre_order_sweep`] with `(cos φ, sin φ)` supplied directly.
pub(crate) fn order_sweep(k: usize, t: f64, s: f64) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    order_sweep_into(k, t, s, &mut out);
    out
}

pub(crate) fn order_sweep_into(k: usize, t: f64, s: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), k + 1);
    if k == 0 {
        out[0] = 1.0 / (4.0 * PI).sqrt();
        return;
    }
    if s == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        let parity = if t < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        out[0] = parity * ((2 * k + 1) as f64 / (4.0 * PI)).sqrt();
        return;
    }
    let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
    let diag = Scaled::from_ln(ln_diagonal_constant(k) + k as f64 * s.ln(), sign);
    let cot = t / s;
    let kf = k as f64;
    let c = |m: f64| ((kf - m) * (kf + m + 1.0)).sqrt();

    let mut exponent = diag.exponent;
    let mut upper = 0.0; // N^{m+1}
    let mut cur = diag.mantissa; // N^m
    out[k] = ldexp(cur, exponent);
    for m in (1..=k).rev() {
        let mf = m as f64;
        let lower = -(2.0 * mf * cot * cur + c(mf) * upper) / c(mf - 1.0);
        upper = cur;
        cur = lower;
        if cur.abs() > RESCALE_UP {
            cur *= RESCALE_DOWN;
            upper *= RESCALE_DOWN;
            exponent += RESCALE_BITS;
        }
        out[m - 1] = ldexp(cur, exponent);
    }
}
