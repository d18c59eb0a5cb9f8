//! One job per command-line subcommand: run an experiment, attach its
//! gates and certificates, and return a [`Report`].

use serde::Serialize;

use crate::beams::{
    beam_experiment, separation_monotonicity_violations, BeamExperimentConfig, OrthoMethod,
    ORTHONORMALIZED_TOLERANCE,
};
use crate::error::{invalid, Result};
use crate::experiments::{
    average_l4_experiment, concentration_experiment, pointwise_envelope_experiment,
    scaling_experiment, serialize_exponent, serialize_exponents, superlevel_experiment,
    tube_ratio_experiment, verify_suite, Gate, ScalingFamily, ERF_1,
};
use crate::harmonics::{make_field, EigenvalueInfo, FieldKind};
use crate::quadrature::{build_grid, lp_norm, tube_mass, GreatCircle, MIN_TUBE_RINGS};
use crate::random::{gaussian_limit_check, haar_mean_lambda4, monte_carlo_lambda4};
use crate::report::{Report, ReportBuilder};

/// `k_min, 2k_min, 4k_min, …` up to `k_max`.
pub fn doubling_range(k_min: usize, k_max: usize) -> Result<Vec<usize>> {
    if k_min == 0 || k_max < k_min {
        return Err(invalid(
            "k-range",
            format!("need 1 <= k-min <= k-max, got {k_min}..{k_max}"),
        ));
    }
    let mut out = vec![k_min];
    while let Some(next) = out
        .last()
        .and_then(|k| k.checked_mul(2))
        .filter(|k| *k <= k_max)
    {
        out.push(next);
    }
    Ok(out)
}

/// Compares the largest value over the upper half of the k-range with the
/// largest over the lower half; a bounded series stays within `factor`.
pub fn growth_gate(name: &str, series: &[(usize, f64)], factor: f64) -> Gate {
    let mut ks: Vec<usize> = series.iter().map(|s| s.0).collect();
    ks.sort_unstable();
    ks.dedup();
    let split = ks.get(ks.len() / 2).copied().unwrap_or(0);
    let max_of = |pred: &dyn Fn(usize) -> bool| {
        series
            .iter()
            .filter(|s| pred(s.0))
            .map(|s| s.1)
            .fold(0.0, f64::max)
    };
    let upper = max_of(&|k| k >= split);
    let lower = max_of(&|k| k < split);
    let growth = if upper == 0.0 { 0.0 } else { upper / lower };
    let finite = series.iter().all(|s| s.1.is_finite());
    Gate::new(
        name,
        finite && growth <= factor,
        growth,
        format!("<= {factor}"),
    )
    .with_detail(format!("max over k >= {split}: {upper}; below: {lower}"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormsParams {
    pub kind: String,
    pub k: usize,
    pub m: i64,
    pub axis: Option<[f64; 3]>,
    #[serde(serialize_with = "serialize_exponents")]
    pub qs: Vec<f64>,
    pub oversample: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct NormRow {
    field: String,
    k: usize,
    #[serde(serialize_with = "serialize_exponent")]
    p: f64,
    norm: f64,
    exact: bool,
}

/// Accepted deviation of `‖f‖₂` from 1 in [`norms`].
pub const UNIT_NORM_GATE: f64 = 1e-10;

pub fn field_kind(kind: &str, k: usize, m: i64, axis: Option<[f64; 3]>) -> Result<FieldKind> {
    match kind {
        "standard" => Ok(FieldKind::Standard { k, m }),
        "zonal" => Ok(FieldKind::Zonal { k }),
        "highest_weight" | "highest-weight" => Ok(FieldKind::HighestWeight { k }),
        "beam" => {
            let a = axis.ok_or_else(|| invalid("axis", "beam fields need an axis"))?;
            let c = GreatCircle::from_direction(a)?;
            Ok(FieldKind::Beam { k, axis: c.axis() })
        }
        other => Err(invalid("field", format!("unknown field {other:?}"))),
    }
}

pub fn norms(p: &NormsParams) -> Result<Report> {
    let mut b = ReportBuilder::new("norms", p)?;
    let kind = field_kind(&p.kind, p.k, p.m, p.axis)?;
    let grid = build_grid(p.k, p.oversample)?;
    let spec = grid.spec();
    b.grid(spec)?;
    let f = make_field(&kind, &grid)?;
    let mut ps = vec![2.0, 4.0];
    for &q in &p.qs {
        if !ps.contains(&q) {
            ps.push(q);
        }
    }
    if !ps.contains(&f64::INFINITY) {
        ps.push(f64::INFINITY);
    }
    let mut rows = Vec::new();
    for &q in &ps {
        let exact = q.fract() == 0.0
            && (q as u64).is_multiple_of(2)
            && (q as usize) * p.k <= spec.exact_degree_phi().min(spec.exact_degree_theta());
        rows.push(NormRow {
            field: kind.label(),
            k: p.k,
            p: q,
            norm: lp_norm(&f, q)?,
            exact,
        });
    }
    let l2 = rows[0].norm;
    b.gate(Gate::new(
        "unit_l2",
        (l2 - 1.0).abs() <= UNIT_NORM_GATE,
        (l2 - 1.0).abs(),
        format!("<= {UNIT_NORM_GATE:e}"),
    ));
    if p.k >= 1 {
        let width = (p.k as f64).powf(-0.5);
        let t = tube_mass(&f, &GreatCircle::equator(), width)?;
        b.output("equatorial_tube_width", width)?;
        b.output("equatorial_tube_mass", t)?;
    }
    b.rows(&rows)?;
    Ok(b.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvgL4Params {
    pub ks: Vec<usize>,
    pub oversample: f64,
}

/// Largest accepted `C/c` for the `A_k / ln k` band.
pub const AVERAGE_BAND_LIMIT: f64 = 5.0;

pub fn avg_l4(p: &AvgL4Params) -> Result<Report> {
    let mut b = ReportBuilder::new("avg-l4", p)?;
    let e = average_l4_experiment(&p.ks, p.oversample)?;
    b.grid(serde_json::json!({
        "rule": "gauss-legendre in cos(phi)",
        "nodes": e.rows.iter().map(|r| (r.k, r.n_nodes, 4 * r.k, r.exact)).collect::<Vec<_>>(),
    }))?;
    b.output("band_low", e.band_low)?;
    b.output("band_high", e.band_high)?;
    b.output("increasing", e.increasing)?;
    if e.rows.iter().filter(|r| r.ratio.is_some()).count() >= 2 {
        let w = e.band_width();
        b.gate(Gate::new(
            "log_band",
            w <= AVERAGE_BAND_LIMIT,
            w,
            format!("C/c <= {AVERAGE_BAND_LIMIT}"),
        ));
    }
    b.gate(Gate::new(
        "strictly_increasing",
        e.increasing,
        e.increasing as u8 as f64,
        "true",
    ));
    b.gate(Gate::new(
        "exact_quadrature",
        e.rows.iter().all(|r| r.exact),
        e.rows.iter().filter(|r| !r.exact).count() as f64,
        "0 inexact rules",
    ));
    b.rows(&e.rows)?;
    Ok(b.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingParams {
    pub family: ScalingFamily,
    #[serde(serialize_with = "serialize_exponent")]
    pub q: f64,
    pub ks: Vec<usize>,
    pub oversample: f64,
    pub tolerance: f64,
}

pub fn scaling(p: &ScalingParams) -> Result<Report> {
    let mut b = ReportBuilder::new("scaling", p)?;
    let e = scaling_experiment(p.family, p.q, &p.ks, p.oversample)?;
    b.grid(serde_json::json!({
        "rule": "gauss-legendre in cos(phi)",
        "nodes": e.rows.iter().map(|r| (r.k, r.n_nodes, r.exact)).collect::<Vec<_>>(),
    }))?;
    b.output("fit", &e.fit)?;
    let f = &e.fit;
    b.gate(
        Gate::new(
            "slope",
            f.matches_target(p.tolerance),
            f.exponent,
            format!("{} +/- {} with residual RMS <= 0.05", f.target, p.tolerance),
        )
        .with_detail(format!("residual RMS {}", f.residual_rms)),
    );
    b.rows(&e.rows)?;
    Ok(b.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseParams {
    pub ks: Vec<usize>,
    pub n_colat: usize,
}

/// Largest accepted `max/min` of the per-k envelope constants.
pub const ENVELOPE_BAND_LIMIT: f64 = 3.0;

pub fn pointwise(p: &PointwiseParams) -> Result<Report> {
    let mut b = ReportBuilder::new("pointwise", p)?;
    let e = pointwise_envelope_experiment(&p.ks, p.n_colat)?;
    b.grid(serde_json::json!({
        "rule": "equispaced colatitudes on [0, pi/2]",
        "points": e.rows.iter().map(|r| (r.k, r.n_colatitudes)).collect::<Vec<_>>(),
    }))?;
    b.output("band", e.band)?;
    let finite = e.rows.iter().all(|r| r.sup_ratio.is_finite());
    b.gate(Gate::new(
        "envelope_band",
        finite && e.band <= ENVELOPE_BAND_LIMIT,
        e.band,
        format!("<= {ENVELOPE_BAND_LIMIT}"),
    ));
    b.rows(&e.rows)?;
    Ok(b.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomOnbParams {
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub oversample: f64,
    /// Samples for the entry moments; `0` skips them.
    pub samples: usize,
}

/// Accepted band for `mean Λ⁴_k / (2(2k+1))`.
pub const CONJECTURE_BAND: (f64, f64) = (0.9, 1.1);

pub fn random_onb(p: &RandomOnbParams) -> Result<Report> {
    let mut b = ReportBuilder::new("random-onb", p)?.seed(p.seed);
    let grid = build_grid(p.k, p.oversample)?;
    b.grid(serde_json::json!({
        "spec": grid.spec(),
        "quartic_exact": grid.spec().exact_for_quartic(p.k),
    }))?;
    let mc = monte_carlo_lambda4(p.k, p.trials, p.seed, &grid)?;
    let n = (2 * p.k + 1) as f64;
    let ratio = mc.mean / (2.0 * n);
    b.output("mean", mc.mean)?;
    b.output("stderr", mc.stderr)?;
    b.output("conjecture_ratio", ratio)?;
    b.output("conjecture_ratio_stderr", mc.stderr / (2.0 * n))?;
    b.output("haar_mean_exact", haar_mean_lambda4(p.k))?;
    b.output(
        "probability_measure_ratio",
        4.0 * std::f64::consts::PI * ratio,
    )?;
    let (lo, hi) = CONJECTURE_BAND;
    b.gate(Gate::new(
        "conjecture_band",
        (lo..=hi).contains(&ratio),
        ratio,
        format!("[{lo}, {hi}]"),
    ));
    if p.samples > 0 && p.k >= 8 {
        let g = gaussian_limit_check(p.k, p.samples, p.seed)?;
        b.output("entry_moments", g)?;
        let dev2 = (g.second_moment - 1.0).abs();
        b.gate(Gate::new(
            "entry_second_moment",
            dev2 <= 3.0 * g.second_stderr,
            dev2,
            format!("<= 3 sigma = {}", 3.0 * g.second_stderr),
        ));
        let dev4 = (g.fourth_moment - 2.0).abs();
        b.gate(Gate::new(
            "entry_fourth_moment",
            dev4 <= 0.1,
            dev4,
            "<= 0.1",
        ));
    }
    b.rows(&mc.values)?;
    Ok(b.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamsParams {
    pub k: usize,
    pub count_exponents: Vec<f64>,
    pub separations: Vec<f64>,
    pub method: OrthoMethod,
    pub seed: u64,
    pub oversample: f64,
}

pub fn beams(p: &BeamsParams) -> Result<Report> {
    let mut b = ReportBuilder::new("beams", p)?.seed(p.seed);
    let grid = build_grid(p.k, p.oversample)?;
    b.grid(serde_json::json!({
        "spec": grid.spec(),
        "quartic_exact": grid.spec().exact_for_quartic(p.k),
    }))?;
    let config = BeamExperimentConfig {
        k: p.k,
        count_exponents: p.count_exponents.clone(),
        separations: p.separations.clone(),
        method: p.method,
        seed: p.seed,
    };
    let e = beam_experiment(&config, &grid)?;
    b.output("skipped", &e.skipped)?;
    b.output(
        "separation_monotonicity_violations",
        separation_monotonicity_violations(&e.rows),
    )?;
    let worst = e.rows.iter().map(|r| r.ortho_defect).fold(0.0, f64::max);
    b.gate(Gate::new(
        "orthonormal",
        worst <= ORTHONORMALIZED_TOLERANCE,
        worst,
        format!("<= {ORTHONORMALIZED_TOLERANCE:e}"),
    ));
    b.rows(&e.rows)?;
    Ok(b.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeRatioParams {
    pub ks: Vec<usize>,
    pub oversample: f64,
    /// Degrees for the equatorial concentration check of `Q_k` and `Z_k`.
    pub concentration_ks: Vec<usize>,
    pub concentration_oversample: f64,
}

/// Bound on the tube ratio, i.e. the inequality holds with constant 1.
pub const TUBE_RATIO_BOUND: f64 = 1.0;
/// Allowed growth of the per-k maximum from the lower to the upper half of
/// the range.
pub const GROWTH_FACTOR: f64 = 1.5;
pub const CONCENTRATION_TOLERANCE: f64 = 0.02;
pub const ZONAL_TUBE_LIMIT: f64 = 0.15;

pub fn tube_ratio(p: &TubeRatioParams) -> Result<Report> {
    let mut b = ReportBuilder::new("tube-ratio", p)?;
    let e = tube_ratio_experiment(&p.ks, p.oversample)?;
    b.grid(&e.grids)?;
    b.output("max_ratio", e.max_ratio)?;
    b.output("per_k_max", &e.per_k_max)?;
    b.output("min_rings_inside", e.min_rings_inside)?;
    b.gate(Gate::new(
        "ratio_bound",
        e.max_ratio <= TUBE_RATIO_BOUND,
        e.max_ratio,
        format!("<= {TUBE_RATIO_BOUND}"),
    ));
    if p.ks.len() >= 2 {
        b.gate(growth_gate("ratio_growth", &e.per_k_max, GROWTH_FACTOR));
    }
    b.gate(Gate::new(
        "tubes_resolved",
        e.min_rings_inside >= MIN_TUBE_RINGS,
        e.min_rings_inside as f64,
        format!(">= {MIN_TUBE_RINGS} rings"),
    ));
    let off_equator: Vec<usize> = e
        .rows
        .iter()
        .filter(|r| r.m == r.k && (r.sup_axis_z.abs() - 1.0).abs() > 1e-12)
        .map(|r| r.k)
        .collect();
    b.gate(
        Gate::new(
            "highest_weight_sup_on_equator",
            off_equator.is_empty(),
            off_equator.len() as f64,
            "0",
        )
        .with_detail(format!("{off_equator:?}")),
    );
    if !p.concentration_ks.is_empty() {
        let rows = concentration_experiment(&p.concentration_ks, p.concentration_oversample)?;
        for r in &rows {
            let dev = (r.highest_weight_mass - ERF_1).abs();
            b.gate(Gate::new(
                format!("highest_weight_tube_k{}", r.k),
                r.resolved && dev <= CONCENTRATION_TOLERANCE,
                r.highest_weight_mass,
                format!("erf(1) +/- {CONCENTRATION_TOLERANCE}"),
            ));
            b.gate(Gate::new(
                format!("zonal_tube_k{}", r.k),
                r.zonal_mass <= ZONAL_TUBE_LIMIT,
                r.zonal_mass,
                format!("<= {ZONAL_TUBE_LIMIT}"),
            ));
        }
        b.output("concentration", rows)?;
    }
    b.rows(&e.rows)?;
    Ok(b.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperlevelParams {
    pub ks: Vec<usize>,
    pub cs: Vec<f64>,
    pub oversample: f64,
}

pub fn superlevel(p: &SuperlevelParams) -> Result<Report> {
    let mut b = ReportBuilder::new("superlevel", p)?;
    let e = superlevel_experiment(&p.ks, &p.cs, p.oversample)?;
    b.grid(serde_json::json!({
        "rule": "gauss-legendre in cos(phi)",
        "nodes": p.ks.iter().map(|&k| (k, ((2 * k + 1) as f64 * p.oversample).ceil() as usize)).collect::<Vec<_>>(),
    }))?;
    b.output("sup_scaled", &e.sup_scaled)?;
    for &c in &p.cs {
        let series: Vec<(usize, f64)> = e
            .rows
            .iter()
            .filter(|r| r.c == c)
            .map(|r| (r.k, r.scaled))
            .collect();
        if series.len() >= 2 {
            b.gate(growth_gate(
                &format!("bounded_C{c}"),
                &series,
                GROWTH_FACTOR,
            ));
        }
    }
    b.rows(&e.rows)?;
    Ok(b.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyParams {
    pub k_max: usize,
    pub points: usize,
    pub seed: u64,
}

pub fn verify(p: &VerifyParams) -> Result<Report> {
    let mut b = ReportBuilder::new("verify", p)?.seed(p.seed);
    b.grid(serde_json::json!({
        "gram": "build_grid(k, 1)",
        "theta_integral": "4k+1 equispaced rotations",
    }))?;
    let (rows, gates) = verify_suite(p.k_max, p.points, p.seed)?;
    for g in gates {
        b.gate(g);
    }
    b.output("lambda_max", EigenvalueInfo::new(p.k_max).lambda)?;
    b.rows(&rows)?;
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling() {
        assert_eq!(
            doubling_range(8, 256).unwrap(),
            vec![8, 16, 32, 64, 128, 256]
        );
        assert_eq!(doubling_range(3, 20).unwrap(), vec![3, 6, 12]);
        assert!(doubling_range(0, 4).is_err());
        assert!(doubling_range(5, 4).is_err());
    }

    #[test]
    fn growth_gate_cases() {
        assert!(growth_gate("g", &[(1, 1.0), (2, 1.2), (3, 1.3), (4, 1.4)], 1.5).passed);
        assert!(!growth_gate("g", &[(1, 1.0), (2, 1.0), (3, 3.0), (4, 1.0)], 1.5).passed);
        assert!(growth_gate("g", &[(1, 0.0), (2, 0.0)], 1.5).passed);
        assert!(!growth_gate("g", &[(1, 0.0), (2, 0.1)], 1.5).passed);
    }

    #[test]
    fn norms_report() {
        let r = norms(&NormsParams {
            kind: "highest_weight".into(),
            k: 8,
            m: 0,
            axis: None,
            qs: vec![6.0],
            oversample: 2.0,
        })
        .unwrap();
        assert!(r.passed());
        assert_eq!(r.rows.len(), 4);
        assert!(field_kind("beam", 3, 0, None).is_err());
        assert!(field_kind("nope", 3, 0, None).is_err());
    }

    #[test]
    fn verify_small() {
        let r = verify(&VerifyParams {
            k_max: 6,
            points: 10,
            seed: 3,
        })
        .unwrap();
        assert!(r.passed());
        assert_eq!(r.rows.len(), 7);
    }
}
