//! Product quadrature on S², points and great circles, and the integrals
//! built on them: Lᵖ norms, tube masses and superlevel measures.
//!
//! The grid is Gauss–Legendre in `t = cos φ` times a uniform grid in θ. With
//! `n_φ` nodes and `n_θ` longitudes it integrates exactly every polynomial of
//! degree `≤ 2n_φ − 1` in `t` times a trigonometric polynomial of degree
//! `≤ n_θ − 1` in θ.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{compensated_sum, cross, dot, norm, scale, Vec3};

/// Default cap on the number of grid points.
pub const DEFAULT_POINT_CAP: usize = 50_000_000;

/// Unit-vector tolerance for points and axes.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Gauss–Legendre nodes and weights on [-1, 1], nodes in decreasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        if p != 0.0 || dp == 0.0 {
            dp = nf * (x * p - pm1) / (x * x - 1.0);
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let j = j as f64;
        let next = ((2.0 * j + 1.0) * x * cur - j * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// A point of the unit sphere with its spherical coordinates cached.
///
/// Chart: `x = (sin φ cos θ, sin φ sin θ, cos φ)`, `φ ∈ [0, π]`, `θ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    xyz: Vec3,
    cos_phi: f64,
    sin_phi: f64,
    theta: f64,
}

impl SpherePoint {
    pub fn from_angles(phi: f64, theta: f64) -> Self {
        let (sin_phi, cos_phi) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        Self {
            xyz: [sin_phi * ct, sin_phi * st, cos_phi],
            cos_phi,
            sin_phi: sin_phi.abs(),
            theta: theta.rem_euclid(2.0 * PI),
        }
    }

    /// Point from an exact unit vector; rejects vectors off the sphere.
    pub fn from_unit(xyz: Vec3) -> Result<Self> {
        let n = norm(&xyz);
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(invalid("point", format!("|x| = {n} is not 1")));
        }
        Ok(Self::from_unit_unchecked(xyz))
    }

    /// Normalizes any nonzero direction onto the sphere.
    pub fn from_direction(v: Vec3) -> Result<Self> {
        let n = norm(&v);
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid("point", "zero or non-finite direction"));
        }
        Ok(Self::from_unit_unchecked(scale(&v, 1.0 / n)))
    }

    pub(crate) fn from_unit_unchecked(xyz: Vec3) -> Self {
        let sin_phi = xyz[0].hypot(xyz[1]);
        let theta = if sin_phi == 0.0 {
            0.0
        } else {
            xyz[1].atan2(xyz[0]).rem_euclid(2.0 * PI)
        };
        Self {
            xyz,
            cos_phi: xyz[2].clamp(-1.0, 1.0),
            sin_phi,
            theta,
        }
    }

    pub fn north_pole() -> Self {
        Self::from_unit_unchecked([0.0, 0.0, 1.0])
    }

    pub fn south_pole() -> Self {
        Self::from_unit_unchecked([0.0, 0.0, -1.0])
    }

    pub fn xyz(&self) -> Vec3 {
        self.xyz
    }

    pub fn cos_phi(&self) -> f64 {
        self.cos_phi
    }

    pub fn sin_phi(&self) -> f64 {
        self.sin_phi
    }

    pub fn phi(&self) -> f64 {
        self.sin_phi.atan2(self.cos_phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn antipode(&self) -> Self {
        Self::from_unit_unchecked(scale(&self.xyz, -1.0))
    }

    /// Rotation by `angle` about the x₃-axis.
    pub fn rotate_about_pole(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let [x, y, z] = self.xyz;
        Self {
            xyz: [c * x - s * y, s * x + c * y, z],
            cos_phi: self.cos_phi,
            sin_phi: self.sin_phi,
            theta: (self.theta + angle).rem_euclid(2.0 * PI),
        }
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        dot(&self.xyz, &other.xyz)
    }
}

/// Geodesic distance `arccos(x·y)` in the two-argument form.
pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> f64 {
    let c = cross(&x.xyz, &y.xyz);
    norm(&c).atan2(x.dot(y))
}

/// A closed geodesic `{x : x·a = 0}` given by its unit axis `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreatCircle {
    axis: Vec3,
}

impl GreatCircle {
    pub fn new(axis: Vec3) -> Result<Self> {
        let n = norm(&axis);
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(invalid("axis", format!("|a| = {n} is not 1")));
        }
        Ok(Self { axis })
    }

    pub fn from_direction(v: Vec3) -> Result<Self> {
        let n = norm(&v);
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid("axis", "zero or non-finite direction"));
        }
        Ok(Self {
            axis: scale(&v, 1.0 / n),
        })
    }

    pub fn equator() -> Self {
        Self {
            axis: [0.0, 0.0, 1.0],
        }
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    /// Distance from `y` to the circle, `|arcsin(y·a)|`.
    pub fn distance(&self, y: &SpherePoint) -> f64 {
        let along = dot(&y.xyz, &self.axis);
        let perp = norm(&cross(&y.xyz, &self.axis));
        along.abs().atan2(perp)
    }

    /// Angle between two circles, `min(∠(a, a'), π − ∠(a, a'))`.
    pub fn angle_to(&self, other: &GreatCircle) -> f64 {
        let c = dot(&self.axis, &other.axis).abs();
        let s = norm(&cross(&self.axis, &other.axis));
        s.atan2(c)
    }

    /// An orthonormal frame `(u, v)` spanning the circle's plane.
    pub fn frame(&self) -> (Vec3, Vec3) {
        let a = self.axis;
        let helper = if a[2].abs() < 0.9 {
            [0.0, 0.0, 1.0]
        } else {
            [1.0, 0.0, 0.0]
        };
        let u = cross(&helper, &a);
        let u = scale(&u, 1.0 / norm(&u));
        let v = cross(&a, &u);
        (u, v)
    }
}

/// A geodesic segment of a great circle starting at angle `start` in the
/// circle's frame and running for `length` radians.
#[derive(Debug, Clone, Copy)]
pub struct ArcSegment {
    circle: GreatCircle,
    u: Vec3,
    v: Vec3,
    start: f64,
    length: f64,
    start_point: Vec3,
    end_point: Vec3,
}

impl ArcSegment {
    pub fn new(circle: GreatCircle, start: f64, length: f64) -> Self {
        let (u, v) = circle.frame();
        let at = |ang: f64| {
            let (s, c) = ang.sin_cos();
            [
                c * u[0] + s * v[0],
                c * u[1] + s * v[1],
                c * u[2] + s * v[2],
            ]
        };
        Self {
            circle,
            u,
            v,
            start,
            length,
            start_point: at(start),
            end_point: at(start + length),
        }
    }

    pub fn circle(&self) -> GreatCircle {
        self.circle
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// The point `s` radians along the arc from its start.
    pub fn point_at(&self, s: f64) -> SpherePoint {
        let (sn, cs) = (self.start + s).sin_cos();
        let xyz = [
            cs * self.u[0] + sn * self.v[0],
            cs * self.u[1] + sn * self.v[1],
            cs * self.u[2] + sn * self.v[2],
        ];
        SpherePoint::from_unit_unchecked(xyz)
    }

    pub fn distance(&self, y: &SpherePoint) -> f64 {
        let c1 = dot(&y.xyz, &self.u);
        let c2 = dot(&y.xyz, &self.v);
        let rel = (c2.atan2(c1) - self.start).rem_euclid(2.0 * PI);
        if rel <= self.length {
            return self.circle.distance(y);
        }
        let d0 = norm(&cross(&y.xyz, &self.start_point)).atan2(dot(&y.xyz, &self.start_point));
        let d1 = norm(&cross(&y.xyz, &self.end_point)).atan2(dot(&y.xyz, &self.end_point));
        d0.min(d1)
    }
}

/// Serializable description of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_phi: usize,
    pub n_theta: usize,
    pub band_limit: usize,
    pub oversample: f64,
}

impl GridSpec {
    /// Highest polynomial degree in `cos φ` integrated exactly.
    pub fn exact_degree_phi(&self) -> usize {
        2 * self.n_phi - 1
    }

    /// Highest trigonometric degree in θ integrated exactly.
    pub fn exact_degree_theta(&self) -> usize {
        self.n_theta - 1
    }

    /// Whether products of four degree-`k` harmonics are integrated exactly.
    pub fn exact_for_quartic(&self, k: usize) -> bool {
        self.exact_degree_phi() >= 4 * k && self.exact_degree_theta() >= 4 * k
    }

    /// Whether products of two degree-`k` harmonics are integrated exactly.
    pub fn exact_for_quadratic(&self, k: usize) -> bool {
        self.exact_degree_phi() >= 2 * k && self.exact_degree_theta() >= 2 * k
    }
}

/// Gauss–Legendre × uniform product grid.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    spec: GridSpec,
    cos_phi: Vec<f64>,
    sin_phi: Vec<f64>,
    gl_weights: Vec<f64>,
    theta: Vec<f64>,
    cos_theta: Vec<f64>,
    sin_theta: Vec<f64>,
}

/// Grid for band parameter `k`: `n_φ = ⌈(2k+1)·oversample⌉`, `n_θ = ⌈(4k+1)·oversample⌉`.
pub fn build_grid(k: usize, oversample: f64) -> Result<QuadratureGrid> {
    build_grid_with_cap(k, oversample, DEFAULT_POINT_CAP)
}

pub fn build_grid_with_cap(k: usize, oversample: f64, cap: usize) -> Result<QuadratureGrid> {
    if !(oversample.is_finite() && oversample >= 1.0) {
        return Err(invalid("oversample", format!("{oversample} < 1")));
    }
    let n_phi = ((2 * k + 1) as f64 * oversample).ceil() as usize;
    let n_theta = ((4 * k + 1) as f64 * oversample).ceil() as usize;
    let mut grid = QuadratureGrid::with_sizes_capped(n_phi, n_theta, cap)?;
    grid.spec.band_limit = k;
    grid.spec.oversample = oversample;
    Ok(grid)
}

impl QuadratureGrid {
    /// Grid with explicit sizes; the band limit recorded is the largest `k`
    /// it integrates quartic products for.
    pub fn with_sizes(n_phi: usize, n_theta: usize) -> Result<Self> {
        Self::with_sizes_capped(n_phi, n_theta, DEFAULT_POINT_CAP)
    }

    fn with_sizes_capped(n_phi: usize, n_theta: usize, cap: usize) -> Result<Self> {
        if n_phi == 0 || n_theta == 0 {
            return Err(invalid("grid", "empty grid"));
        }
        let points = n_phi.saturating_mul(n_theta);
        if points > cap {
            return Err(Error::Resource { points, cap });
        }
        let (nodes, gl_weights) = gauss_legendre(n_phi);
        let sin_phi = nodes
            .iter()
            .map(|t| ((1.0 - t) * (1.0 + t)).sqrt())
            .collect();
        let theta: Vec<f64> = (0..n_theta)
            .map(|j| 2.0 * PI * j as f64 / n_theta as f64)
            .collect();
        let cos_theta = theta.iter().map(|t| t.cos()).collect();
        let sin_theta = theta.iter().map(|t| t.sin()).collect();
        let band_limit = ((2 * n_phi - 1) / 4).min((n_theta - 1) / 4);
        Ok(Self {
            spec: GridSpec {
                n_phi,
                n_theta,
                band_limit,
                oversample: 1.0,
            },
            cos_phi: nodes,
            sin_phi,
            gl_weights,
            theta,
            cos_theta,
            sin_theta,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn n_phi(&self) -> usize {
        self.spec.n_phi
    }

    pub fn n_theta(&self) -> usize {
        self.spec.n_theta
    }

    pub fn len(&self) -> usize {
        self.spec.n_phi * self.spec.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cos_phi(&self) -> &[f64] {
        &self.cos_phi
    }

    pub fn sin_phi(&self) -> &[f64] {
        &self.sin_phi
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Gauss–Legendre weight of ring `i` (sums to 2).
    pub fn gl_weight(&self, ring: usize) -> f64 {
        self.gl_weights[ring]
    }

    /// Area weight of every point on ring `i`.
    pub fn point_weight(&self, ring: usize) -> f64 {
        self.gl_weights[ring] * 2.0 * PI / self.spec.n_theta as f64
    }

    pub fn index(&self, ring: usize, col: usize) -> usize {
        ring * self.spec.n_theta + col
    }

    pub fn point(&self, ring: usize, col: usize) -> SpherePoint {
        let s = self.sin_phi[ring];
        SpherePoint {
            xyz: [
                s * self.cos_theta[col],
                s * self.sin_theta[col],
                self.cos_phi[ring],
            ],
            cos_phi: self.cos_phi[ring],
            sin_phi: s,
            theta: self.theta[col],
        }
    }

    pub fn points(&self) -> impl Iterator<Item = SpherePoint> + '_ {
        (0..self.n_phi()).flat_map(move |i| (0..self.n_theta()).map(move |j| self.point(i, j)))
    }

    pub fn total_weight(&self) -> f64 {
        compensated_sum((0..self.n_phi()).map(|i| self.point_weight(i) * self.n_theta() as f64))
    }

    /// `∫ g dV` where `g(i, j)` is the integrand at ring `i`, column `j`.
    ///
    /// Rings are reduced in parallel, then combined in ring order, so the
    /// result does not depend on the thread schedule.
    pub fn integrate<F>(&self, g: F) -> f64
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let rings: Vec<f64> = (0..self.n_phi())
            .into_par_iter()
            .map(|i| self.point_weight(i) * compensated_sum((0..self.n_theta()).map(|j| g(i, j))))
            .collect();
        compensated_sum(rings)
    }

    /// `∫ g dV` for an integrand depending on the ring only.
    pub fn integrate_zonal(&self, ring_values: &[f64]) -> f64 {
        debug_assert_eq!(ring_values.len(), self.n_phi());
        2.0 * PI * compensated_sum(ring_values.iter().zip(&self.gl_weights).map(|(v, w)| v * w))
    }

    /// Per-ring area of `{(i, j) : inside(point)}`; integrating a zonal
    /// integrand over the set is then a dot product with this profile.
    pub fn ring_profile<F>(&self, inside: F) -> Vec<f64>
    where
        F: Fn(&SpherePoint) -> bool + Sync,
    {
        (0..self.n_phi())
            .into_par_iter()
            .map(|i| {
                let count = (0..self.n_theta())
                    .filter(|&j| inside(&self.point(i, j)))
                    .count();
                count as f64 * self.point_weight(i)
            })
            .collect()
    }
}

/// Complex samples of one function on a grid.
#[derive(Debug, Clone)]
pub struct HarmonicField<'g> {
    grid: &'g QuadratureGrid,
    values: Vec<Complex64>,
    label: String,
}

impl<'g> HarmonicField<'g> {
    pub fn new(
        grid: &'g QuadratureGrid,
        values: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(
                "field",
                format!("{} values for a grid of {}", values.len(), grid.len()),
            ));
        }
        Ok(Self {
            grid,
            values,
            label: label.into(),
        })
    }

    pub fn from_real(
        grid: &'g QuadratureGrid,
        values: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::new(
            grid,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            label,
        )
    }

    pub fn grid(&self) -> &'g QuadratureGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, ring: usize, col: usize) -> Complex64 {
        self.values[self.grid.index(ring, col)]
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }

    pub fn l2_norm(&self) -> f64 {
        let n_theta = self.grid.n_theta();
        self.grid
            .integrate(|i, j| self.values[i * n_theta + j].norm_sqr())
            .sqrt()
    }

    /// Hermitian inner product `∫ f ḡ dV`.
    pub fn inner(&self, other: &HarmonicField<'_>) -> Complex64 {
        let n_theta = self.grid.n_theta();
        let re = self.grid.integrate(|i, j| {
            let k = i * n_theta + j;
            (self.values[k] * other.values[k].conj()).re
        });
        let im = self.grid.integrate(|i, j| {
            let k = i * n_theta + j;
            (self.values[k] * other.values[k].conj()).im
        });
        Complex64::new(re, im)
    }
}

/// `(∫ |f|ᵖ dV)^{1/p}`; `p = ∞` gives the largest modulus over the nodes.
pub fn lp_norm(f: &HarmonicField<'_>, p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        return Ok(f.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(invalid("p", format!("{p} is not in [1, ∞]")));
    }
    Ok(lp_integral(f, p).powf(1.0 / p))
}

/// `∫ |f|ᵖ dV`.
pub fn lp_integral(f: &HarmonicField<'_>, p: f64) -> f64 {
    let n_theta = f.grid.n_theta();
    let vals = &f.values;
    let pow = |v: Complex64| -> f64 {
        let a2 = v.norm_sqr();
        match p {
            2.0 => a2,
            4.0 => a2 * a2,
            _ => a2.powf(p / 2.0),
        }
    };
    f.grid.integrate(|i, j| pow(vals[i * n_theta + j]))
}

/// Result of a tube integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeMass {
    pub mass: f64,
    /// Number of φ-rings with at least one node inside the tube.
    pub rings_inside: usize,
    /// False when fewer than [`MIN_TUBE_RINGS`] rings fall inside.
    pub resolved: bool,
}

pub const MIN_TUBE_RINGS: usize = 8;

/// Normalization tolerance enforced by [`tube_mass`].
pub const UNIT_FIELD_TOLERANCE: f64 = 1e-6;

/// `∫_{|arcsin(y·a)| ≤ width} |f|² dV` over the grid nodes inside the tube.
pub fn tube_mass(f: &HarmonicField<'_>, circle: &GreatCircle, width: f64) -> Result<TubeMass> {
    if width.is_nan() || width <= 0.0 {
        return Err(invalid("width", format!("{width} must be positive")));
    }
    let l2 = f.l2_norm();
    if (l2 - 1.0).abs() > UNIT_FIELD_TOLERANCE {
        return Err(Error::NotNormalized { norm: l2 });
    }
    Ok(set_mass(f, |y| {
        circle.distance(y) <= width || width >= FRAC_PI_2
    }))
}

/// Same as [`tube_mass`] around a finite arc of a great circle.
pub fn arc_tube_mass(f: &HarmonicField<'_>, arc: &ArcSegment, width: f64) -> Result<TubeMass> {
    if width.is_nan() || width <= 0.0 {
        return Err(invalid("width", format!("{width} must be positive")));
    }
    let l2 = f.l2_norm();
    if (l2 - 1.0).abs() > UNIT_FIELD_TOLERANCE {
        return Err(Error::NotNormalized { norm: l2 });
    }
    Ok(set_mass(f, |y| arc.distance(y) <= width))
}

fn set_mass<F>(f: &HarmonicField<'_>, inside: F) -> TubeMass
where
    F: Fn(&SpherePoint) -> bool + Sync,
{
    let grid = f.grid;
    let n_theta = grid.n_theta();
    let per_ring: Vec<(f64, bool)> = (0..grid.n_phi())
        .into_par_iter()
        .map(|i| {
            let mut any = false;
            let s = compensated_sum((0..n_theta).filter_map(|j| {
                if inside(&grid.point(i, j)) {
                    any = true;
                    Some(f.values[i * n_theta + j].norm_sqr())
                } else {
                    None
                }
            }));
            (s * grid.point_weight(i), any)
        })
        .collect();
    let rings_inside = per_ring.iter().filter(|r| r.1).count();
    TubeMass {
        mass: compensated_sum(per_ring.iter().map(|r| r.0)),
        rings_inside,
        resolved: rings_inside >= MIN_TUBE_RINGS,
    }
}

/// Area of `{x : |f(x)| ≥ threshold}` by grid weights.
pub fn superlevel_measure(f: &HarmonicField<'_>, threshold: f64) -> f64 {
    let n_theta = f.grid.n_theta();
    f.grid.integrate(|i, j| {
        if f.values[i * n_theta + j].norm() >= threshold {
            1.0
        } else {
            0.0
        }
    })
}

/// `n` axes on the closed upper hemisphere from a Fibonacci lattice, the
/// first one the north pole and the last one on the equator.
pub fn fibonacci_axes(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    match n {
        0 => Vec::new(),
        1 => vec![[0.0, 0.0, 1.0]],
        _ => (0..n)
            .map(|i| {
                let z = 1.0 - i as f64 / (n - 1) as f64;
                let r = ((1.0 - z) * (1.0 + z)).sqrt();
                let (s, c) = (golden * i as f64).sin_cos();
                [r * c, r * s, z]
            })
            .collect(),
    }
}

/// Circles used to approximate a sup over all geodesics: the equator plus
/// `max(64, 4k)` Fibonacci axes.
pub fn sup_circles(k: usize) -> Vec<GreatCircle> {
    let mut out = vec![GreatCircle::equator()];
    out.extend(
        fibonacci_axes(64.max(4 * k))
            .into_iter()
            .skip(1)
            .map(|a| GreatCircle { axis: a }),
    );
    out
}
