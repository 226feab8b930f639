//! Acceptance criteria. Each criterion prints one PASS/FAIL line.
//!
//! Runs with a custom harness so the lines are always visible. A criterion
//! listed in `KNOWN_UNATTAINABLE` still prints its honest verdict but does
//! not change the exit status; every other failure does.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kahler_hardy::filter_models::{cepstrum_contour_oracle, complex_cepstrum, ArfimaModel, C0Convention, ContourOptions};
use kahler_hardy::kahler::{
    check_kahler, connection_closed, connection_fd_oracle, max_abs_diff, metric_closed, metric_fd_oracle,
    metric_series, potential_closed, potential_series, CMatrix, Connection, GeometryConfig, Transform,
};
use kahler_hardy::polylog::{li, zeta};
use kahler_hardy::sampling::{ModelSampler, SamplerOptions};
use kahler_hardy::weighted_hardy::{
    bergman_metric, bergman_metric_check, kernel_series, reproducing_kernel, weighted_distance, WeightSequence,
};
use kahler_hardy::{Complex64, Error};

/// Sub-checks whose literal statement cannot hold for any input.
const KNOWN_UNATTAINABLE: &[&str] = &["6-literal"];

struct Verdict {
    id: &'static str,
    title: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn within(&mut self, what: &str, error: f64, tolerance: f64) {
        self.notes.push(format!("{what} {error:.1e} (tol {tolerance:.0e})"));
        if !(error <= tolerance) {
            self.failures.push(format!("{what}: {error:e} > {tolerance:e}"));
        }
    }

    fn holds(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn budget(&mut self, start: Instant, seconds: f64) {
        let t = start.elapsed().as_secs_f64();
        if t > seconds {
            self.failures.push(format!("runtime {t:.2} s > {seconds} s"));
        }
    }
}

fn run(id: &'static str, title: &'static str, f: impl FnOnce(&mut Checks) -> Result<(), Error>) -> Verdict {
    let start = Instant::now();
    let mut checks = Checks::default();
    if let Err(e) = f(&mut checks) {
        checks.failures.push(format!("error: {e}"));
    }
    let passed = checks.failures.is_empty();
    let detail = if passed { checks.notes.join("; ") } else { checks.failures.join("; ") };
    Verdict {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn power(m: f64) -> WeightSequence {
    WeightSequence::power(m).unwrap()
}

fn model(d: f64, poles: &[Complex64], zeros: &[Complex64]) -> ArfimaModel {
    ArfimaModel::unit_gain(d, poles.to_vec(), zeros.to_vec()).unwrap()
}

fn connection_diff_pattern(g: &Connection, expected: impl Fn(usize, usize, usize) -> Complex64) -> f64 {
    g.iter().map(|((i, j, k), v)| (v - expected(i, j, k)).norm()).fold(0.0, f64::max)
}

fn criterion_1(ch: &mut Checks) -> Result<(), Error> {
    let start = Instant::now();
    let lambda = [c(0.5, 0.0), c(0.3, 0.2)];
    let mu = c(0.25, 0.0);
    let cfg = GeometryConfig::new(model(0.2, &lambda, &[mu]), power(0.0));
    let closed = metric_closed(&cfg)?;
    ch.within("g00 - pi^2/6", (closed[(0, 0)] - c(PI * PI / 6.0, 0.0)).norm(), 1e-12);
    let one = c(1.0, 0.0);
    let roots = [(-1.0, lambda[0]), (-1.0, lambda[1]), (1.0, mu)];
    let mut pattern = CMatrix::zeros(4, 4);
    pattern[(0, 0)] = c(PI * PI / 6.0, 0.0);
    for (j, &(gj, xj)) in roots.iter().enumerate() {
        // log(1 - conj λ)/conj λ for poles, -log(1 - conj μ)/conj μ for zeros
        let v = -gj * (one - xj.conj()).ln() / xj.conj();
        pattern[(0, j + 1)] = v;
        pattern[(j + 1, 0)] = v.conj();
        for (i, &(gi, xi)) in roots.iter().enumerate() {
            pattern[(i + 1, j + 1)] = gi * gj / (one - xi * xj.conj());
        }
    }
    ch.within("closed vs pattern", max_abs_diff(&closed, &pattern), 1e-12);
    ch.within("closed vs series", max_abs_diff(&closed, &metric_series(&cfg)?.value), 1e-9);
    ch.within("closed vs fd", max_abs_diff(&closed, &metric_fd_oracle(&cfg)?), 1e-6);
    ch.budget(start, 1.0);
    Ok(())
}

fn criterion_2(ch: &mut Checks) -> Result<(), Error> {
    let start = Instant::now();
    let (l, m) = (c(0.5, 0.0), c(0.25, 0.0));
    let cfg = GeometryConfig::new(model(0.0, &[l], &[m]), power(1.0));
    let one = c(1.0, 0.0);
    let k = ((one - l * m.conj()) * (one - m * l.conj()) / ((one - l * l.conj()) * (one - m * m.conj())))
        .ln()
        .re;
    let closed_k = potential_closed(&cfg)?;
    ch.within("K closed vs formula", (closed_k - k).abs(), 1e-12);
    ch.within("K closed vs series", (closed_k - potential_series(&cfg)?.value).abs(), 1e-12);
    let roots = [(-1.0, l), (1.0, m)];
    let mut pattern = CMatrix::zeros(2, 2);
    for (i, &(gi, xi)) in roots.iter().enumerate() {
        for (j, &(gj, xj)) in roots.iter().enumerate() {
            pattern[(i, j)] = gi * gj / (one - xi * xj.conj()).powi(2);
        }
    }
    ch.within("metric closed vs pattern", max_abs_diff(&metric_closed(&cfg)?, &pattern), 1e-10);
    ch.within("metric series vs pattern", max_abs_diff(&metric_series(&cfg)?.value, &pattern), 1e-10);
    let gamma = connection_closed(&cfg)?;
    let expected = |i: usize, j: usize, k: usize| {
        if i != j {
            return c(0.0, 0.0);
        }
        let (gi, xi) = roots[i];
        let (gk, xk) = roots[k];
        gi * gk * 2.0 * xk.conj() / (one - xi * xk.conj()).powi(3)
    };
    ch.within("connection closed vs pattern", connection_diff_pattern(&gamma, expected), 1e-12);
    let fd = connection_fd_oracle(&cfg)?;
    ch.within("connection pattern vs fd", connection_diff_pattern(&fd, expected), 1e-4);
    ch.budget(start, 1.0);
    Ok(())
}

fn criterion_3(ch: &mut Checks) -> Result<(), Error> {
    let start = Instant::now();
    let mut sampler = ModelSampler::new(2024, SamplerOptions::default());
    let (mut hermitian, mut closure) = (0.0f64, 0.0f64);
    let mut cases = 0;
    for _ in 0..100 {
        let m = sampler.model();
        let mut orders = vec![0.0, 0.5, -1.0];
        if m.d == 0.0 {
            orders.push(1.0);
        }
        for order in orders {
            let r = check_kahler(&GeometryConfig::new(m.clone(), power(order)))?;
            hermitian = hermitian.max(r.hermitian);
            closure = closure.max(r.closure);
            cases += 1;
        }
    }
    ch.within(&format!("{cases} cases: hermitian"), hermitian, 1e-6);
    ch.within("closure", closure, 1e-6);
    ch.budget(start, 20.0);
    Ok(())
}

fn criterion_4(ch: &mut Checks) -> Result<(), Error> {
    let start = Instant::now();
    let opts = SamplerOptions {
        max_poles: 1,
        max_zeros: 1,
        ..SamplerOptions::default()
    };
    let mut sampler = ModelSampler::new(404, opts);
    let models: Vec<ArfimaModel> = (0..20).map(|_| sampler.model()).collect();
    for t in [Transform::Identity, Transform::Log, Transform::LogSquaredModulus] {
        let mut worst: f64 = 0.0;
        for m in &models {
            let cfg = GeometryConfig::new(m.clone(), power(0.0))
                .transform(t)
                .truncation(32)
                .contour(ContourOptions::with_grid(256));
            worst = worst.max(max_abs_diff(&metric_fd_oracle(&cfg)?, &metric_series(&cfg)?.value));
        }
        ch.within(t.as_str(), worst, 1e-5);
    }
    ch.budget(start, 10.0);
    Ok(())
}

fn criterion_5(ch: &mut Checks) -> Result<(), Error> {
    let start = Instant::now();
    let opts = SamplerOptions {
        max_poles: 3,
        max_zeros: 3,
        max_modulus: 0.9,
        min_separation: 0.0,
        ..SamplerOptions::default()
    };
    let mut sampler = ModelSampler::new(55, opts);
    let n = 64;
    let mut worst: f64 = 0.0;
    let mut with_d = 0;
    for _ in 0..200 {
        let m = sampler.model();
        with_d += (m.d != 0.0) as usize;
        let analytic = complex_cepstrum(&m, n, C0Convention::LogGain);
        let contour = cepstrum_contour_oracle(&m, n, &ContourOptions::for_truncation(n))?;
        for s in 1..=n {
            worst = worst.max((analytic.coeffs[s] - contour.coeffs[s]).norm());
        }
    }
    ch.holds("some models have d != 0", with_d > 0);
    ch.within(&format!("200 models ({with_d} with d != 0), s <= 64"), worst, 1e-8);
    ch.budget(start, 5.0);
    Ok(())
}

/// Partial sum `Σ_{s=1}^{N} d²/s`.
fn d_partial_sum(d: f64, n: usize) -> f64 {
    (1..=n).rev().map(|s| d * d / s as f64).sum()
}

fn criterion_6(ch: &mut Checks) -> Result<(), Error> {
    let cfg = GeometryConfig::new(model(0.3, &[c(0.5, 0.0)], &[]), power(1.0));
    ch.holds("(d=0.3, m=1) potential not Divergent", matches!(potential_series(&cfg), Err(Error::Divergent(_))));
    ch.holds("(d=0.3, m=1) metric not Divergent", matches!(metric_closed(&cfg), Err(Error::Divergent(_))));
    let d: f64 = 0.3;
    let n = 1_000_000;
    let s = d_partial_sum(d, n);
    let s_tenth = d_partial_sum(d, n / 10);
    // partial sums track d² log N without bound
    ch.within("S_N / (d^2 log N) - 1", (s / (d * d * (n as f64).ln()) - 1.0).abs(), 0.05);
    ch.within(
        "S_N - S_{N/10} - d^2 log 10",
        (s - s_tenth - d * d * 10f64.ln()).abs(),
        1e-5,
    );
    let cfg = GeometryConfig::new(model(0.0, &[c(0.5, 0.2), c(-0.4, 0.0)], &[c(0.3, -0.3)]), power(3.0));
    ch.within(
        "(d=0, m=3) potential closed vs series",
        (potential_closed(&cfg)? - potential_series(&cfg)?.value).abs(),
        1e-9,
    );
    ch.within(
        "(d=0, m=3) metric closed vs series",
        max_abs_diff(&metric_closed(&cfg)?, &metric_series(&cfg)?.value),
        1e-9,
    );
    Ok(())
}

/// The literal threshold: partial sums exceed `10·d²·log N` at `N = 10⁶`.
/// Since `Σ_{s≤N} 1/s < 1 + log N`, this cannot hold for any `N ≥ 2`.
fn criterion_6_literal(ch: &mut Checks) -> Result<(), Error> {
    let d: f64 = 0.3;
    let n = 1_000_000;
    let s = d_partial_sum(d, n);
    let threshold = 10.0 * d * d * (n as f64).ln();
    ch.notes.push(format!("S_N = {s:.6} > {threshold:.6}"));
    ch.holds(&format!("S_N = {s:.6} does not exceed 10 d^2 log N = {threshold:.6}"), s > threshold);
    Ok(())
}

fn criterion_7(ch: &mut Checks) -> Result<(), Error> {
    let mut sampler = ModelSampler::new(7, SamplerOptions::default());
    let w = power(0.0);
    let n = 512;
    let (mut symmetry, mut identity, mut slack) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut separated = true;
    for _ in 0..1000 {
        let [a, b, cc] = [(); 3].map(|_| complex_cepstrum(&sampler.model(), n, C0Convention::One));
        let ab = weighted_distance(&a, &b, &w)?.value;
        let ba = weighted_distance(&b, &a, &w)?.value;
        let bc = weighted_distance(&b, &cc, &w)?.value;
        let ac = weighted_distance(&a, &cc, &w)?.value;
        symmetry = symmetry.max((ab - ba).abs());
        identity = identity.max(weighted_distance(&a, &a, &w)?.value);
        if a.coeffs != b.coeffs {
            separated &= ab > 0.0;
        }
        slack = slack.min(ab + bc - ac);
    }
    ch.within("symmetry", symmetry, 0.0);
    ch.within("d(a, a)", identity, 0.0);
    ch.holds("distinct coefficients at distance zero", separated);
    ch.notes.push(format!("min triangle slack {slack:.1e}"));
    ch.holds(&format!("triangle slack {slack:e} < -1e-12"), slack >= -1e-12);
    Ok(())
}

fn criterion_8(ch: &mut Checks) -> Result<(), Error> {
    let mut sampler = ModelSampler::new(8, SamplerOptions::default());
    let families = [
        ("szego", WeightSequence::hardy()),
        ("bergman", WeightSequence::bergman()),
        ("power(-1)", power(-1.0)),
        ("power(0)", power(0.0)),
        ("power(0.5)", power(0.5)),
        ("power(2)", power(2.0)),
    ];
    for (name, w) in &families {
        let mut worst: f64 = 0.0;
        let mut rng = sampler.clone();
        for _ in 0..100 {
            let (u, v) = (rng.point_in_disk(0.9), rng.point_in_disk(0.9));
            let closed = reproducing_kernel(w, u, v, 1e-15)?;
            worst = worst.max((closed - kernel_series(w, u, v, 4000)?).norm());
        }
        ch.within(name, worst, 1e-10);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (u, v) = (sampler.point_in_disk(0.8), sampler.point_in_disk(0.8));
        worst = worst.max((bergman_metric_check(u, v, 1e-4)? - bergman_metric(u, v)).norm());
    }
    let fixed = (bergman_metric_check(c(0.3, 0.0), c(0.0, 0.4), 1e-4)? - 2.0 / c(1.0, -0.12).powi(2)).norm();
    ch.within("bergman metric fd", worst.max(fixed), 1e-6);
    Ok(())
}

/// `f'(z)` from `K` samples on a small circle around `z`; a central
/// difference stencil whose error decays geometrically in `K`.
fn ring_derivative(f: impl Fn(Complex64) -> Complex64, z: Complex64, radius: f64, k: usize) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for j in 0..k {
        let w = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / k as f64);
        acc += f(z + radius * w) / w;
    }
    acc / (radius * k as f64)
}

fn criterion_9(ch: &mut Checks) -> Result<(), Error> {
    let mut sampler = ModelSampler::new(9, SamplerOptions::default());
    let points: Vec<Complex64> = (0..100).map(|_| sampler.point_in_disk(0.9)).collect();
    let mut worst: f64 = 0.0;
    for m in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        for &z in &points {
            let dz = ring_derivative(|w| li(m, w).unwrap(), z, 0.04, 64);
            worst = worst.max((li(m - 1.0, z)? - z * dz).norm());
        }
    }
    ch.within("recurrence", worst, 1e-8);

    let one = c(1.0, 0.0);
    let closed: [(f64, fn(Complex64) -> Complex64); 4] = [
        (0.0, |z| z / (1.0 - z)),
        (-1.0, |z| z / (1.0 - z).powi(2)),
        (-2.0, |z| z * (1.0 + z) / (1.0 - z).powi(3)),
        (-3.0, |z| z * (1.0 + 4.0 * z + z * z) / (1.0 - z).powi(4)),
    ];
    let mut worst: f64 = 0.0;
    for (m, form) in closed {
        for &z in &points {
            let series: Complex64 = (1..4000).rev().map(|s| z.powu(s) * (s as f64).powf(-m)).sum();
            worst = worst.max((form(z) - series).norm()).max((li(m, z)? - series).norm());
        }
    }
    let _ = one;
    ch.within("closed vs series", worst, 1e-10);

    let mut monotone = true;
    for m in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let values: Vec<f64> = (1..=90).map(|k| li(m, c(k as f64 / 100.0, 0.0)).unwrap().re).collect();
        monotone &= values.windows(2).all(|w| w[0] < w[1]);
    }
    ch.holds("Li_m increasing on (0, 0.9]", monotone);

    let z2 = (zeta(2.0, 1e-15)? - PI * PI / 6.0).abs();
    let z4 = (zeta(4.0, 1e-15)? - PI.powi(4) / 90.0).abs();
    let z15 = (zeta(1.5, 1e-15)? - 2.612_375_348_685_488_3).abs();
    ch.within("zeta(2), zeta(4), zeta(1.5)", z2.max(z4).max(z15), 1e-12);
    let examples = [
        (li(0.0, c(0.5, 0.0))? - 1.0).norm(),
        (li(2.0, c(1.0, 0.0))? - PI * PI / 6.0).norm(),
        (li(1.0, c(0.5, 0.0))? - 2f64.ln()).norm(),
        (li(-1.0, c(0.5, 0.0))? - 2.0).norm(),
    ];
    ch.within("examples", examples.iter().copied().fold(0.0, f64::max), 1e-12);
    Ok(())
}

fn main() -> ExitCode {
    let verdicts = [
        run("1", "m=0 metric reproduction", criterion_1),
        run("2", "m=1 mutual-information geometry", criterion_2),
        run("3", "Kahler-condition suite", criterion_3),
        run("4", "potential as squared norm", criterion_4),
        run("5", "cepstrum oracle agreement", criterion_5),
        run("6", "divergence guard", criterion_6),
        run("6-literal", "partial sums exceed 10 d^2 log N at N=1e6", criterion_6_literal),
        run("7", "distance axioms", criterion_7),
        run("8", "kernel closed forms", criterion_8),
        run("9", "polylog engine", criterion_9),
    ];
    let mut hard_failures = 0;
    for v in &verdicts {
        let known = KNOWN_UNATTAINABLE.contains(&v.id);
        let status = if v.passed { "PASS" } else { "FAIL" };
        let tag = if !v.passed && known { " [known unattainable]" } else { "" };
        println!(
            "{status} criterion {:<9} {} ({:.2} s){tag}: {}",
            v.id,
            v.title,
            v.elapsed.as_secs_f64(),
            v.detail
        );
        if !v.passed && !known {
            hard_failures += 1;
        }
    }
    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{hard_failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
