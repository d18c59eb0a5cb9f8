//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphere_l4::beams::{beam_coefficients, beam_overlap, orthonormalize, BeamFamily, OrthoMethod};
use sphere_l4::experiments::{
    average_l4_experiment, closed_form_checks, concentration_experiment, identity_gates,
    identity_sweep, pointwise_envelope_experiment, scaling_experiment, tube_ratio_experiment,
    ScalingFamily, ERF_1,
};
use sphere_l4::harmonics::{make_field, FieldKind};
use sphere_l4::quadrature::{build_grid, GreatCircle};
use sphere_l4::random::{entry_moment, haar_mean_lambda4, monte_carlo_lambda4, EntryPattern};
use sphere_l4::runner::{self, growth_gate, SuperlevelParams, GROWTH_FACTOR, TUBE_RATIO_BOUND};
use sphere_l4::special::wallis_integral;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        summary: summary.into(),
    }
}

fn random_axis(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let t: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * t.cos(), r * t.sin(), z]
}

fn exact_identities() -> Outcome {
    let rows = identity_sweep(64, 200, 20_240_601).expect("identity sweep");
    let gates = identity_gates(&rows, &[]);
    let passed = gates.iter().all(|g| g.passed);
    let parts: Vec<String> = gates
        .iter()
        .map(|g| format!("{}={:.2e}", g.name, g.value))
        .collect();
    outcome(passed, format!("k<=64, 200 points: {}", parts.join(", ")))
}

fn closed_form_norms() -> Outcome {
    // W(n) = ∫_0^π sin^n, by the two-term recursion from W(0) = π, W(1) = 2.
    let mut w = vec![PI, 2.0];
    for n in 2..=5 {
        w.push((n as f64 - 1.0) / n as f64 * w[n - 2]);
    }
    let wallis_ok = (0..=5).all(|n| (wallis_integral(n as u64) - w[n]).abs() <= 1e-14);
    let q1 = (3.0 / (8.0 * PI)).powi(2) * 2.0 * PI * w[5];
    let y10 = (3.0 / (4.0 * PI)).powi(2) * 2.0 * PI * (w[1] - 2.0 * w[3] + w[5]);
    let oracles = [q1, y10, y10 + 2.0 * q1];
    let closed = [3.0 / (10.0 * PI), 9.0 / (20.0 * PI), 21.0 / (20.0 * PI)];
    let oracle_ok = oracles
        .iter()
        .zip(&closed)
        .all(|(a, b)| (a - b).abs() <= 1e-11);
    let rows = closed_form_checks().expect("closed forms");
    let computed_ok = rows
        .iter()
        .zip(&closed)
        .all(|(r, c)| (r.computed - c).abs() <= 1e-11);
    let worst = rows
        .iter()
        .zip(&closed)
        .map(|(r, c)| (r.computed - c).abs())
        .fold(0.0, f64::max);
    outcome(
        wallis_ok && oracle_ok && computed_ok,
        format!(
            "Q1, Y1_0, Lambda4_1: max error {worst:.2e} (Wallis oracles agree: {})",
            wallis_ok && oracle_ok
        ),
    )
}

fn log_average() -> Outcome {
    let e = average_l4_experiment(&[8, 16, 32, 64, 128, 256], 1.0).expect("average");
    let exact = e.rows.iter().all(|r| r.exact);
    let passed = exact && e.band_width() <= 5.0 && e.increasing;
    outcome(
        passed,
        format!(
            "A_k/ln k in [{:.4}, {:.4}], C/c = {:.3}, increasing = {}",
            e.band_low,
            e.band_high,
            e.band_width(),
            e.increasing
        ),
    )
}

fn scaling_exponents() -> Outcome {
    let ks = [16, 32, 64, 128, 256];
    let cases = [
        (ScalingFamily::HighestWeight, 4.0, 0.125),
        (ScalingFamily::Zonal, f64::INFINITY, 0.5),
        (ScalingFamily::HighestWeight, 8.0, 0.1875),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (family, q, expected) in cases {
        let e = scaling_experiment(family, q, &ks, 1.0).expect("scaling");
        let ok = (e.fit.exponent - expected).abs() <= 0.02 && e.fit.residual_rms <= 0.05;
        passed &= ok;
        parts.push(format!(
            "{family} q={q}: {:.4} (rms {:.1e})",
            e.fit.exponent, e.fit.residual_rms
        ));
    }
    outcome(passed, parts.join("; "))
}

fn random_onb() -> Outcome {
    let k = 32;
    let seed = 0x5eed_0032;
    let grid = build_grid(k, 1.0).expect("grid");
    let a = monte_carlo_lambda4(k, 200, seed, &grid).expect("monte carlo");
    let b = monte_carlo_lambda4(k, 200, seed, &grid).expect("monte carlo");
    let bitwise = a.values.len() == b.values.len()
        && a.values
            .iter()
            .zip(&b.values)
            .all(|(x, y)| x.lambda4.to_bits() == y.lambda4.to_bits() && x.seed == y.seed);
    let n = (2 * k + 1) as f64;
    let ratio = a.mean / (2.0 * n);
    let in_band = (0.9..=1.1).contains(&ratio);
    outcome(
        in_band && bitwise,
        format!(
            "mean Lambda4/(2(2k+1)) = {ratio:.5} +/- {:.1e} (band [0.9, 1.1]); bitwise reproducible = {bitwise}; \
             exact Haar mean {:.4} vs sample {:.4}; same ratio in the normalized measure = {:.4}",
            a.stderr / (2.0 * n),
            haar_mean_lambda4(k),
            a.mean,
            4.0 * PI * ratio
        ),
    )
}

fn entry_moments() -> Outcome {
    let n = 65usize;
    let nf = n as f64;
    let m2 = entry_moment(n, EntryPattern::AbsSquared, 100_000, 65).expect("moment");
    let m4 = entry_moment(n, EntryPattern::AbsFourth, 100_000, 66).expect("moment");
    let (e2, s2) = (nf * m2.mean, nf * m2.stderr);
    let e4 = nf * nf * m4.mean;
    let ok2 = (e2 - 1.0).abs() <= 3.0 * s2;
    let ok4 = (e4 - 2.0).abs() <= 0.1;
    outcome(
        ok2 && ok4,
        format!(
            "E|sqrt(N)U|^2 = {e2:.5} (3 sigma {:.4}), E|sqrt(N)U|^4 = {e4:.4}",
            3.0 * s2
        ),
    )
}

fn concentration() -> Outcome {
    let erf1 = statrs::function::erf::erf(1.0);
    let rows = concentration_experiment(&[64, 256], 4.0).expect("tubes");
    // statrs' erf is accurate to about 1e-11.
    let mut passed = (erf1 - ERF_1).abs() < 1e-10;
    let mut parts = Vec::new();
    for r in &rows {
        passed &= r.resolved && (r.highest_weight_mass - erf1).abs() <= 0.02;
        parts.push(format!("Q_{} mass {:.4}", r.k, r.highest_weight_mass));
        if r.k == 256 {
            passed &= r.zonal_mass <= 0.15;
            parts.push(format!("Z_256 mass {:.4}", r.zonal_mass));
        }
    }
    outcome(passed, format!("{} (erf(1) = {erf1:.4})", parts.join(", ")))
}

fn envelope_superlevel_tube() -> Outcome {
    let ks = [8, 16, 32, 64, 128, 256];
    let env = pointwise_envelope_experiment(&ks, 2048).expect("envelope");
    let env_ok = env.band <= 3.0 && env.rows.iter().all(|r| r.sup_ratio.is_finite());
    let sl = runner::superlevel(&SuperlevelParams {
        ks: ks.to_vec(),
        cs: vec![1.0],
        oversample: 4.0,
    })
    .expect("superlevel");
    let sl_ok = sl.passed();
    let sl_max = sl
        .rows
        .iter()
        .filter_map(|r| r["scaled"].as_f64())
        .fold(0.0, f64::max);
    let all_k: Vec<usize> = (1..=64).collect();
    let tube = tube_ratio_experiment(&all_k, 1.0).expect("tube ratio");
    let growth = growth_gate("ratio_growth", &tube.per_k_max, GROWTH_FACTOR);
    let tube_ok = tube.max_ratio <= TUBE_RATIO_BOUND
        && growth.passed
        && tube.rows.iter().all(|r| r.ratio.is_finite());
    outcome(
        env_ok && sl_ok && tube_ok,
        format!(
            "envelope band {:.3}; sup lambda^(1/2)*measure at C=1: {sl_max:.3e}; \
             tube ratio max {:.4} over {} (k,m) with growth {:.3}",
            env.band,
            tube.max_ratio,
            tube.rows.len(),
            growth.value
        ),
    )
}

fn beam_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut round_trip: f64 = 0.0;
    for k in 1..=64usize {
        let axis = random_axis(&mut rng);
        let axis = GreatCircle::from_direction(axis).expect("axis").axis();
        let coeffs = beam_coefficients(k, &axis).expect("coefficients");
        let grid = build_grid(k, 1.0).expect("grid");
        let synth = make_field(&FieldKind::Coefficient { k, coeffs }, &grid).expect("field");
        let direct = make_field(&FieldKind::Beam { k, axis }, &grid).expect("field");
        let worst = synth
            .values()
            .iter()
            .zip(direct.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        round_trip = round_trip.max(worst);
    }
    let alpha = PI / 4.0;
    let a1 = [0.0, 0.0, 1.0];
    let a2 = [alpha.sin(), 0.0, alpha.cos()];
    let mut doubling: f64 = 0.0;
    for k in [2usize, 8, 16, 32] {
        let ok = beam_overlap(k, &a1, &a2).expect("overlap").norm();
        let o2k = beam_overlap(2 * k, &a1, &a2).expect("overlap").norm();
        doubling = doubling.max((o2k - ok * ok).abs());
    }
    let grid64 = build_grid(64, 1.0).expect("grid");
    let pair = BeamFamily::new(
        64,
        vec![
            GreatCircle::equator(),
            GreatCircle::new([1.0, 0.0, 0.0]).unwrap(),
        ],
    )
    .expect("family");
    let (_, report) =
        orthonormalize(&pair, OrthoMethod::Symmetric, &grid64).expect("orthonormalize");
    let k = 16;
    let grid16 = build_grid(k, 1.0).expect("grid");
    let circles: Vec<GreatCircle> = (0..6)
        .map(|_| GreatCircle::from_direction(random_axis(&mut rng)).unwrap())
        .collect();
    let family = BeamFamily::new(k, circles).expect("family");
    let order = [3usize, 0, 5, 1, 4, 2];
    let (base, _) =
        orthonormalize(&family, OrthoMethod::Symmetric, &grid16).expect("orthonormalize");
    let (perm, _) = orthonormalize(&family.permuted(&order), OrthoMethod::Symmetric, &grid16)
        .expect("orthonormalize");
    let mut equivariance: f64 = 0.0;
    for (i, &src) in order.iter().enumerate() {
        let d = perm
            .row(i)
            .iter()
            .zip(base.row(src))
            .map(|(a, b): (&Complex64, Complex64)| (a - b).norm())
            .fold(0.0, f64::max);
        equivariance = equivariance.max(d);
    }
    let passed = round_trip <= 1e-10
        && doubling <= 1e-8
        && report.min_retention >= 0.99
        && equivariance <= 1e-12;
    outcome(
        passed,
        format!(
            "round trip {round_trip:.2e}; overlap doubling {doubling:.2e}; orthogonal-pair retention {:.6}; \
             permutation equivariance {equivariance:.2e}",
            report.min_retention
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exact identities", exact_identities),
        ("closed-form norms", closed_form_norms),
        ("log-k average", log_average),
        ("scaling exponents", scaling_exponents),
        ("random ONB mean", random_onb),
        ("entry moments", entry_moments),
        ("tube concentration", concentration),
        (
            "envelope, superlevel and tube-ratio bounds",
            envelope_superlevel_tube,
        ),
        ("beam machinery", beam_machinery),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failures += 1;
        }
        println!(
            "{status} criterion {} ({name}) [{:.1}s]: {}",
            i + 1,
            started.elapsed().as_secs_f64(),
            o.summary
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
