//! Acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL but do not fail
//! the binary; see the README for why they cannot hold as stated. Any other
//! failure exits nonzero.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use circstab::experiments::{discretization_scan, holder_fit, stability_scan};
use circstab::measures::{
    cesaro_average, discrepancy, dk_suite, lacunary_lower_bound, lacunary_observable,
    periodic_average_exact, rotation_orbit, wasserstein, AtomicMeasure, Lebesgue,
};
use circstab::response::{fd_response, response_pairing, solve_homological, DEFAULT_BURN_IN};
use circstab::{
    continued_fraction, continued_fraction_exact, golden_mean, CirclePoint, ExactReal,
    ExperimentConfig, FourierSeries, MeasureKind, ScalingRecord,
};
use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: &[u32] = &[9];

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn ols(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    ols(&pts)
}

fn physical(records: &[ScalingRecord]) -> Vec<ScalingRecord> {
    records
        .iter()
        .filter(|r| r.measure_kind == MeasureKind::Physical)
        .cloned()
        .collect()
}

fn ar_records() -> Vec<ScalingRecord> {
    let cfg = ExperimentConfig::from_json(
        r#"{"alpha":"golden","family":{"type":"AttractorRepeller"},"ladder":[5,6,7,8,9,10,11,12,13,14,15],"seed":1}"#,
    )
    .unwrap();
    let rep = stability_scan(&cfg).unwrap();
    assert!(rep.failures.is_empty(), "{:?}", rep.failures);
    physical(&rep.records)
}

fn lower_bound_exponent() -> Outcome {
    let recs = ar_records();
    let prof = continued_fraction(golden_mean(), 20).unwrap();
    // W for the cycle {i/q} is exactly 1/(4q)
    let exact = recs
        .iter()
        .all(|r| (r.w_distance - 0.25 / prof.convergents[r.param as usize].q as f64).abs() < 1e-10);
    let fit = holder_fit(&recs).unwrap();
    Outcome {
        pass: (fit.slope - 0.5).abs() <= 0.05 && exact,
        detail: format!(
            "slope {:.4} (ci {:.4}..{:.4}, r2 {:.6}) over j = 5..15, W = 1/(4q) exactly: {exact}",
            fit.slope, fit.ci.0, fit.ci.1, fit.r2
        ),
    }
}

fn lower_bound_constant() -> Outcome {
    let gamma = 1.01;
    let recs = ar_records();
    let worst = recs
        .iter()
        .map(|r| r.w_distance / (0.25 * r.size_param.powf(1.0 / (gamma + 1.0))))
        .fold(f64::INFINITY, f64::min);
    Outcome {
        pass: worst >= 1.0 && recs.len() == 11,
        detail: format!(
            "min W / (delta^(1/2.01) / 4) = {worst:.4} over {} convergents",
            recs.len()
        ),
    }
}

fn denjoy_koksma() -> Outcome {
    let r = dk_suite(1000, 20_240_601).unwrap();
    Outcome {
        pass: r.violations == 0,
        detail: format!(
            "{} cases, {} violations, worst lhs/bound {:.4}",
            r.cases, r.violations, r.worst_ratio
        ),
    }
}

fn discrepancy_rate() -> Outcome {
    let ns = [1e2, 1e3, 1e4, 1e5, 1e6];
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for &n in &ns {
        let d = discrepancy(&rotation_orbit(
            golden_mean(),
            CirclePoint::ZERO,
            n as usize,
        ))
        .unwrap();
        lo.push(d.lower);
        hi.push(d.upper);
    }
    let (sl, sh) = (log_slope(&ns, &lo), log_slope(&ns, &hi));
    let ok = |s: f64| (-1.0..=-0.88).contains(&s);
    Outcome {
        pass: ok(sl) && ok(sh),
        detail: format!("slope of lower ends {sl:.4}, of upper ends {sh:.4}; window [-1, -0.88]"),
    }
}

fn cesaro_rate() -> Outcome {
    let ns = [1e2, 1e3, 1e4, 1e5, 1e6];
    let d0 = AtomicMeasure::dirac(CirclePoint::ZERO);
    let ws: Vec<f64> = ns
        .iter()
        .map(|&n| {
            wasserstein(
                &cesaro_average(&d0, golden_mean(), n as u64).unwrap(),
                &Lebesgue,
            )
            .unwrap()
        })
        .collect();
    let s = log_slope(&ns, &ws);
    Outcome {
        pass: s <= -0.88,
        detail: format!("slope {s:.4}, W at 1e6 = {:.3e}", ws[4]),
    }
}

fn linear_response() -> Outcome {
    let alpha = golden_mean();
    let u = FourierSeries::cosine(1, 1.0);
    // with u = psi = cos(2 pi x) only n = +-1 contribute:
    // 2 Re[2 pi i (1/2)(1/2) / (1 - e^{2 pi i alpha})] = -(pi/2) cot(pi alpha)
    let closed = -(PI / 2.0) / (PI * alpha).tan();
    let pairing = response_pairing(&u, alpha, &u).unwrap();
    let prof = continued_fraction(alpha, 24).unwrap();
    let fd = fd_response(&u, &prof, &u, &[1e-2, 1e-3], 10_000_000, DEFAULT_BURN_IN).unwrap();
    let rel = ((fd.estimate - closed) / closed).abs();
    Outcome {
        pass: rel <= 0.05 && (pairing - closed).abs() < 1e-12,
        detail: format!(
            "estimate {:.6}, closed form {closed:.6}, pairing {pairing:.6}, rel error {rel:.2e}",
            fd.estimate
        ),
    }
}

fn homological_residual() -> Outcome {
    let alpha = golden_mean();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let deg = rng.random_range(1..=32);
        let cos: Vec<f64> = (0..deg).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sin: Vec<f64> = (0..deg).map(|_| rng.random_range(-1.0..1.0)).collect();
        let u = FourierSeries::from_cos_sin(rng.random_range(-1.0..1.0), &cos, &sin);
        let v = solve_homological(&u, alpha, 32).unwrap();
        let m = u.mean();
        for k in 0..10_000 {
            let x = k as f64 / 10_000.0;
            let r = v.eval(x + alpha) - v.eval(x) - (u.eval(x) - m);
            worst = worst.max(r.abs());
        }
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max residual {worst:.3e} over 100 polynomials on a 1e4 grid"),
    }
}

fn transport_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a = common::random_atomic(&mut rng, 12);
        let b = common::random_atomic(&mut rng, 12);
        worst = worst.max((wasserstein(&a, &b).unwrap() - common::transport_lp(&a, &b)).abs());
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("max |closed form - min-cost flow| = {worst:.2e} over 200 pairs"),
    }
}

/// Per measure kind, `C = W(N = 100) N^0.45` and every later N must satisfy
/// `W <= C N^-0.45`.
fn check_decay(label: &str, map_json: &str) -> (bool, String) {
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"alpha":"golden","family":{{"type":"Discretization","map":{map_json}}},"ladder":[100,1000,10000,100000,1000000]}}"#
    ))
    .unwrap();
    let rep = discretization_scan(&cfg).unwrap();
    assert!(rep.failures.is_empty(), "{:?}", rep.failures);
    let mut ok = true;
    let mut notes = Vec::new();
    for kind in [
        MeasureKind::Physical,
        MeasureKind::WorstCycle,
        MeasureKind::BestCycle,
    ] {
        let series: Vec<&ScalingRecord> = rep
            .records
            .iter()
            .filter(|r| r.measure_kind == kind)
            .collect();
        let c = series[0].w_distance * 100f64.powf(0.45);
        let worst = series
            .iter()
            .map(|r| (r.w_distance / (c * r.param.powf(-0.45)), r.param))
            .fold((0.0, 0.0), |a: (f64, f64), b| if b.0 > a.0 { b } else { a });
        if worst.0 > 1.0 {
            ok = false;
        }
        notes.push(format!(
            "{} C={c:.4} max W/bound {:.3} at N={}",
            kind.as_str(),
            worst.0,
            worst.1
        ));
    }
    (ok, format!("{label}: {}", notes.join(", ")))
}

fn discretization_stability() -> Outcome {
    let (a, da) = check_decay("rotation", r#"{"type":"Rotation"}"#);
    let (b, db) = check_decay("conjugated", r#"{"type":"Conjugated","h":{"a":[0.2]}}"#);
    Outcome {
        pass: a && b,
        detail: format!("{da}; {db}"),
    }
}

fn lacunary_bound() -> Outcome {
    let alpha = ExactReal::lacunary(1).unwrap();
    let prof = continued_fraction_exact(&alpha, 1).unwrap();
    let q = prof.convergents.last().unwrap().q;
    let psi = lacunary_observable(1).unwrap();
    let v = periodic_average_exact(&psi, q).unwrap();
    let lb = lacunary_lower_bound(1);
    // same average in floating point along the orbit of 0
    let direct: f64 = (0..q).map(|k| psi.eval(k as f64 / q as f64)).sum::<f64>() / q as f64;
    let agree = BigRational::from_f64(direct).is_some_and(|d| d == v);
    Outcome {
        pass: q == 16 && v >= lb && agree,
        detail: format!(
            "period {q}, average {v} >= bound {lb}: {}, float sum agrees: {agree}",
            v >= lb
        ),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            1,
            "lower-bound exponent",
            Duration::from_secs(60),
            lower_bound_exponent,
        ),
        (
            2,
            "lower-bound constant",
            Duration::from_secs(60),
            lower_bound_constant,
        ),
        (
            3,
            "Denjoy-Koksma suite",
            Duration::from_secs(120),
            denjoy_koksma,
        ),
        (
            4,
            "discrepancy rate",
            Duration::from_secs(120),
            discrepancy_rate,
        ),
        (
            5,
            "Cesaro convergence",
            Duration::from_secs(60),
            cesaro_rate,
        ),
        (
            6,
            "linear response",
            Duration::from_secs(180),
            linear_response,
        ),
        (
            7,
            "homological residual",
            Duration::from_secs(10),
            homological_residual,
        ),
        (
            8,
            "transport oracle",
            Duration::from_secs(60),
            transport_oracle,
        ),
        (
            9,
            "discretization stability",
            Duration::from_secs(300),
            discretization_stability,
        ),
        (
            10,
            "lacunary observable bound",
            Duration::from_secs(1),
            lacunary_bound,
        ),
    ];
    let mut unexpected = Vec::new();
    for (id, name, budget, run) in criteria {
        let t = Instant::now();
        let out = run();
        let dt = t.elapsed();
        let pass = out.pass && dt <= budget;
        let tag = if pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {id} ({name}): {} [{:.2}s of {}s]",
            out.detail,
            dt.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            if KNOWN_FAILURES.contains(&id) {
                println!("     criterion {id} is a documented failure, see README");
            } else {
                unexpected.push(id);
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
