//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any FAIL.

use std::time::Instant;

use decaysum::bounds::{baseline_bounds, gamma2_lower_bound, gamma2_upper_bound, gamma2_upper_profile};
use decaysum::evaluation::{sample_errors, ErrorReport, ExperimentConfig};
use decaysum::mechanism::build_mechanism;
use decaysum::numeric::derive_seed;
use decaysum::series::{closed_form_coeff, exponential_coeff, sqrt_series_for, MAX_BELL_ORDER};
use decaysum::toeplitz::{build_factor, reconstruct_mf};
use decaysum::{DecayFunction, MechanismKind, PrivacyParams, StreamDistribution};
use decaysum_cli::{cmd_run, RunConfig, StreamSource};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn poly(c: u32) -> DecayFunction {
    DecayFunction::polynomial(c).unwrap()
}

fn exp(alpha: f64) -> DecayFunction {
    DecayFunction::exponential(alpha).unwrap()
}

/// Direct `f(n)`, independent of the library's decay evaluation.
fn weight(f: &DecayFunction, n: usize) -> f64 {
    match f {
        DecayFunction::Constant => 1.0,
        DecayFunction::Polynomial { c } => 1.0 / (n as f64).powi(*c as i32),
        DecayFunction::Exponential { alpha } => 1.0 / alpha.powi(n as i32 - 1),
        DecayFunction::SlidingWindow { w } => (n <= *w) as u8 as f64,
        DecayFunction::Custom(t) => t.get(n - 1).copied().unwrap_or(0.0),
    }
}

/// `Σ_{i ≤ t} x_i f(t − i + 1)` by direct summation.
fn oracle(f: &DecayFunction, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|t| (0..=t).map(|i| x[i] * weight(f, t - i + 1)).sum())
        .collect()
}

fn family_grid() -> Vec<DecayFunction> {
    let mut fams = vec![DecayFunction::Constant];
    fams.extend((1..=5).map(poly));
    fams.extend([1.25, 1.5, 2.0].map(exp));
    fams
}

fn reconstruction() -> Outcome {
    let start = Instant::now();
    let t = 1024;
    let mut worst = 0.0f64;
    for f in family_grid() {
        let l = build_factor(&f, t).unwrap();
        let m = reconstruct_mf(&l).unwrap();
        for i in 0..t {
            for j in 0..t {
                let want = if i >= j { weight(&f, i - j + 1) } else { 0.0 };
                worst = worst.max((m[i * t + j] - want).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-9 && secs < 10.0, format!("max |LL - M_f| = {worst:.3e}, {secs:.2} s"))
}

fn coefficient_gaps() -> Outcome {
    let start = Instant::now();
    let gap = |c: u32| {
        let a = sqrt_series_for(&poly(c), 2049).unwrap();
        weight(&poly(c), 2049) / 2.0 - a.coeffs()[2048]
    };
    let (g1, g2) = (gap(1), gap(2));
    let secs = start.elapsed().as_secs_f64();
    let pass = (3e-8..=1.2e-7).contains(&g1) && (5e-15..=3e-14).contains(&g2) && secs < 5.0;
    outcome(pass, format!("c=1 gap = {g1:.4e} (want [3e-8, 1.2e-7]), c=2 gap = {g2:.4e} (want [5e-15, 3e-14]), {secs:.2} s"))
}

fn bound_certificates() -> Outcome {
    let certs = [0.13, 0.0125, 0.003, 5e-4, 1.25e-4];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, cert) in certs.iter().enumerate() {
        let f = poly(i as u32 + 1);
        let lower = gamma2_lower_bound(&f).unwrap();
        let profile = gamma2_upper_profile(&f, 4096).unwrap();
        // T = 1 has no 2 × 2 submatrix; both bounds are 1 there.
        let gaps = profile.iter().enumerate().map(|(k, u)| if k == 0 { 0.0 } else { u - lower });
        let worst = gaps.clone().fold(0.0f64, f64::max);
        let at_end = profile[profile.len() - 1] - lower;
        let ok = worst <= *cert && at_end >= cert / 2.0;
        pass &= ok;
        parts.push(format!("c={} max gap {worst:.4e} vs {cert:e}{}", i + 1, if ok { "" } else { " [violated]" }));
    }
    outcome(pass, parts.join("; "))
}

fn constant_recovery() -> Outcome {
    let t = 2048;
    let upper = gamma2_upper_bound(&DecayFunction::Constant, t).unwrap();
    // H_{2047,1} = Σ_{n=1}^{2046} 1/n.
    let h: f64 = (1..2047).rev().map(|n| 1.0 / n as f64).sum();
    let closed = 1.0 + h / std::f64::consts::PI;
    let pass = upper <= closed && upper >= closed - 0.5;
    outcome(pass, format!("upper = {upper:.6}, 1 + H/pi = {closed:.6}"))
}

fn orderings() -> Outcome {
    let mut fams: Vec<DecayFunction> = (1..=5).map(poly).collect();
    fams.extend([1.25, 1.5, 2.0, 4.0].map(exp));
    let mut violations = Vec::new();
    let mut checked = 0;
    for f in &fams {
        for t in [2, 16, 256, 4096] {
            let ours = gamma2_upper_bound(f, t).unwrap();
            let prior = baseline_bounds(f, t).unwrap();
            checked += 1;
            if ours >= prior || ours.is_nan() {
                violations.push(format!("{f} T={t}"));
            }
        }
    }
    outcome(violations.is_empty(), format!("{checked} cells, violations: {violations:?}"))
}

fn route_agreement() -> Outcome {
    let mut worst = 0.0f64;
    for f in family_grid() {
        let series = sqrt_series_for(&f, MAX_BELL_ORDER + 1).unwrap();
        let alpha = match f {
            DecayFunction::Constant => Some(1.0),
            DecayFunction::Exponential { alpha } => Some(alpha),
            _ => None,
        };
        for n in 0..=MAX_BELL_ORDER {
            let s = series.coeffs()[n];
            let closed = closed_form_coeff(&f, n).unwrap();
            worst = worst.max((closed - s).abs() / s.abs());
            if let Some(alpha) = alpha {
                let e = exponential_coeff(alpha, n).unwrap();
                worst = worst.max((e - s).abs() / s.abs());
                worst = worst.max((e - closed).abs() / e.abs());
            }
        }
    }
    outcome(worst <= 1e-9, format!("max relative disagreement {worst:.3e}"))
}

fn noiseless_equivalence() -> Outcome {
    let t = 512;
    let privacy = PrivacyParams::new(1.0, 1e-5, 1.0).unwrap().unsafe_no_privacy();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let smooth = family_grid();
    let windows = [1, 7, 512].map(|w| DecayFunction::sliding_window(w).unwrap());
    let mut worst = 0.0f64;
    for k in 0..100 {
        let x: Vec<f64> = (0..t).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let f = &smooth[k % smooth.len()];
        let w = &windows[k % windows.len()];
        let cases = [
            (MechanismKind::Factorization, f),
            (MechanismKind::GaussianBaseline, f),
            (MechanismKind::SlidingWindow, w),
            (MechanismKind::GaussianBaseline, w),
        ];
        for (kind, decay) in cases {
            let mut m = build_mechanism(kind, decay, t, privacy, k as u64).unwrap();
            let out = m.run(&x).unwrap();
            let want = oracle(decay, &x);
            for (a, b) in out.iter().zip(&want) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    outcome(worst <= 1e-10, format!("100 streams, T = {t}, max |out - oracle| = {worst:.3e}"))
}

fn noise_law() -> Outcome {
    let start = Instant::now();
    let t = 256;
    let f = poly(1);
    let privacy = PrivacyParams::new(1.0, 1e-5, 1.0).unwrap();
    let trials = 10_000;
    let l = build_factor(&f, t).unwrap();
    let r = l.first_column();
    let col_sq: f64 = r.iter().map(|v| v * v).sum();
    let sigma_sq = privacy.sigma_multiplier().powi(2) * col_sq;

    // One batch: the full seeded experiment as reported by the library.
    let config = ExperimentConfig {
        mechanism: MechanismKind::Factorization,
        decay: f.clone(),
        horizon: t,
        privacy,
        trials,
        distribution: StreamDistribution::Uniform,
        seed: derive_seed(8, 0, 0),
    };
    let all = sample_errors(&config).unwrap();
    let report = ErrorReport::from_errors(&config, &all).unwrap();
    let mut pass = report.empirical_l22 <= report.bound_l22;
    let mut parts = vec![format!(
        "l22 {:.5e} vs bound {:.5e}",
        report.empirical_l22, report.bound_l22
    )];
    for step in [1, 128, 256] {
        let want = sigma_sq * r[..step].iter().map(|v| v * v).sum::<f64>();
        let mean = all.iter().map(|e| e[step - 1]).sum::<f64>() / trials as f64;
        let var = all.iter().map(|e| (e[step - 1] - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let rel = (var / want - 1.0).abs();
        pass &= rel < 0.1;
        parts.push(format!("t={step} var/law = {:.4}", var / want));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    parts.push(format!("{secs:.2} s"));
    outcome(pass, parts.join(", "))
}

fn determinism() -> Outcome {
    let config = RunConfig {
        decay: poly(2),
        horizon: Some(300),
        mechanism: MechanismKind::Factorization,
        privacy: PrivacyParams::new(0.8, 1e-6, 1.0).unwrap(),
        seed: 1234,
        source: StreamSource::Distribution(StreamDistribution::Uniform),
    };
    let run = || {
        let mut out = Vec::new();
        cmd_run(&config, &mut std::io::empty(), &mut out).unwrap();
        out
    };
    let (a, b) = (run(), run());
    outcome(a == b && !a.is_empty(), format!("{} bytes, identical = {}", a.len(), a == b))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("reconstruction", reconstruction),
        ("coefficient gap golden values", coefficient_gaps),
        ("bound-gap certificates", bound_certificates),
        ("constant-decay recovery", constant_recovery),
        ("orderings against prior bounds", orderings),
        ("coefficient route agreement", route_agreement),
        ("noiseless mechanism equivalence", noiseless_equivalence),
        ("noise law", noise_law),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!("{} criterion {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
