//! Randomized cross-route verification.
//!
//! Each suite compares two independent routes over seeded random models and
//! records the worst discrepancy against a fixed tolerance. The report holds
//! no timings, so a fixed seed gives a bit-identical report.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Result;
use crate::filter_models::{complex_cepstrum, ArfimaModel, C0Convention};
use crate::kahler::{
    check_kahler, connection_closed, connection_fd_oracle, max_abs_diff, metric_closed, metric_fd_oracle,
    metric_series, potential_closed, potential_series, CMatrix, GeometryConfig,
};
use crate::par::Execution;
use crate::sampling::{ModelSampler, SamplerOptions};
use crate::weighted_hardy::{weighted_distance, WeightSequence};

pub const SERIES_VS_CLOSED: &str = "series_vs_closed";
pub const CLOSED_VS_FD: &str = "closed_vs_fd";
pub const KAHLER_CONDITIONS: &str = "kahler_conditions";
pub const CONNECTION_FD: &str = "connection_fd";
pub const METRIC_AXIOMS: &str = "metric_axioms";
pub const M0_REPRODUCTION: &str = "m0_reproduction";
pub const M1_REPRODUCTION: &str = "m1_reproduction";

const MAX_LISTED_FAILURES: usize = 5;

/// Deliberate defects used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Negates the closed-form metric before comparing it.
    FlipClosedMetricSign,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub models: usize,
    pub execution: Execution,
    pub mutation: Option<Mutation>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            models: 12,
            execution: Execution::Parallel,
            mutation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub tolerance: f64,
    pub cases: usize,
    pub max_error: f64,
    pub failures: Vec<String>,
    pub failure_count: usize,
}

impl SuiteResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            cases: 0,
            max_error: 0.0,
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    fn record(&mut self, label: impl FnOnce() -> String, error: f64) {
        self.cases += 1;
        if error.is_nan() || self.max_error < error {
            self.max_error = error;
        }
        if !(error <= self.tolerance) {
            self.fail(format!("{}: error {error:e}", label()));
        }
    }

    fn record_result(&mut self, label: impl FnOnce() -> String, outcome: Result<f64>) {
        match outcome {
            Ok(e) => self.record(label, e),
            Err(e) => {
                self.cases += 1;
                self.fail(format!("{}: {e}", label()));
            }
        }
    }

    fn fail(&mut self, message: String) {
        self.failure_count += 1;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(message);
        }
    }

    fn merge(&mut self, other: SuiteResult) {
        self.cases += other.cases;
        if other.max_error.is_nan() || self.max_error < other.max_error {
            self.max_error = other.max_error;
        }
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(f);
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed(),
            "cases": self.cases,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "failure_count": self.failure_count,
            "failures": self.failures,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub models: usize,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "models": self.models,
            "passed": self.passed(),
            "failing": self.failing(),
            "suites": self.suites.iter().map(SuiteResult::to_json).collect::<Vec<_>>(),
        })
    }
}

fn suites() -> Vec<SuiteResult> {
    vec![
        SuiteResult::new(SERIES_VS_CLOSED, 1e-9),
        SuiteResult::new(CLOSED_VS_FD, 1e-6),
        SuiteResult::new(KAHLER_CONDITIONS, 1e-6),
        SuiteResult::new(CONNECTION_FD, 1e-4),
        SuiteResult::new(METRIC_AXIOMS, 1e-10),
        SuiteResult::new(M0_REPRODUCTION, 1e-12),
        SuiteResult::new(M1_REPRODUCTION, 1e-12),
    ]
}

/// Power orders exercised for a model.
fn orders(model: &ArfimaModel) -> Vec<f64> {
    let mut m = vec![0.0, 0.5, -1.0];
    if model.d == 0.0 {
        m.push(1.0);
    }
    m
}

fn closed_metric(cfg: &GeometryConfig, mutation: Option<Mutation>) -> Result<CMatrix> {
    let g = metric_closed(cfg)?;
    Ok(match mutation {
        Some(Mutation::FlipClosedMetricSign) => -g,
        None => g,
    })
}

fn smallest_eigenvalue(g: &CMatrix) -> f64 {
    if g.is_empty() {
        return f64::INFINITY;
    }
    let h = (g + g.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// All per-model suites for one model.
fn check_model(index: usize, model: &ArfimaModel, mutation: Option<Mutation>) -> Vec<SuiteResult> {
    let mut out = suites();
    for m in orders(model) {
        let weight = WeightSequence::power(m).expect("finite order");
        let cfg = GeometryConfig::new(model.clone(), weight).execution(Execution::Sequential);
        let label = || format!("model {index}, m = {m}");
        let closed = closed_metric(&cfg, mutation);

        let series_vs_closed = (|| {
            let series = metric_series(&cfg)?.value;
            let k = (potential_series(&cfg)?.value - potential_closed(&cfg)?).abs();
            Ok(max_abs_diff(&series, closed.as_ref().map_err(Clone::clone)?).max(k))
        })();
        out[0].record_result(label, series_vs_closed);

        let closed_vs_fd = (|| Ok(max_abs_diff(&metric_fd_oracle(&cfg)?, closed.as_ref().map_err(Clone::clone)?)))();
        out[1].record_result(label, closed_vs_fd);

        let kahler = check_kahler(&cfg).map(|r| r.hermitian.max(r.closure));
        out[2].record_result(label, kahler);

        let connection = (|| Ok(connection_closed(&cfg)?.max_abs_diff(&connection_fd_oracle(&cfg)?)))();
        out[3].record_result(label, connection);

        match closed {
            Ok(g) => {
                out[4].record(label, max_abs_diff(&g, &g.adjoint()));
                let lambda = smallest_eigenvalue(&g);
                if !(lambda > 0.0) {
                    out[4].fail(format!("{}: metric not positive definite (eigenvalue {lambda:e})", label()));
                }
            }
            Err(e) => {
                out[4].cases += 1;
                out[4].fail(format!("{}: {e}", label()));
            }
        }
        let fd_hermitian = metric_fd_oracle(&cfg).map(|g| max_abs_diff(&g, &g.adjoint()));
        out[4].record_result(label, fd_hermitian);
    }
    out
}

/// Distance axioms on consecutive triples.
fn check_distances(models: &[ArfimaModel], suite: &mut SuiteResult) {
    let w = WeightSequence::hardy();
    let n = 256;
    let cepstra: Vec<_> = models.iter().map(|m| complex_cepstrum(m, n, C0Convention::One)).collect();
    for i in 0..models.len() {
        let (a, b, c) = (&cepstra[i], &cepstra[(i + 1) % models.len()], &cepstra[(i + 2) % models.len()]);
        let outcome = (|| {
            let ab = weighted_distance(a, b, &w)?.value;
            let ba = weighted_distance(b, a, &w)?.value;
            let bc = weighted_distance(b, c, &w)?.value;
            let ac = weighted_distance(a, c, &w)?.value;
            let aa = weighted_distance(a, a, &w)?.value;
            let symmetry = (ab - ba).abs();
            let triangle = (ac - ab - bc).max(0.0);
            Ok(symmetry.max(triangle).max(aa))
        })();
        suite.record_result(|| format!("distance triple {i}"), outcome);
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn m0_reproduction(suite: &mut SuiteResult, mutation: Option<Mutation>) {
    let lambda = [c(0.5, 0.0), c(0.3, 0.2)];
    let mu = c(0.25, 0.0);
    let model = ArfimaModel::unit_gain(0.2, lambda.to_vec(), vec![mu]).expect("valid model");
    let cfg = GeometryConfig::new(model, WeightSequence::power(0.0).expect("m = 0"));
    let g = match closed_metric(&cfg, mutation) {
        Ok(g) => g,
        Err(e) => {
            suite.cases += 1;
            return suite.fail(format!("m = 0 metric: {e}"));
        }
    };
    let one = c(1.0, 0.0);
    let roots = [(-1.0, lambda[0]), (-1.0, lambda[1]), (1.0, mu)];
    let mut expected = CMatrix::zeros(4, 4);
    expected[(0, 0)] = c(PI * PI / 6.0, 0.0);
    for (j, &(gj, xj)) in roots.iter().enumerate() {
        let v = -gj * (one - xj.conj()).ln() / xj.conj();
        expected[(0, j + 1)] = v;
        expected[(j + 1, 0)] = v.conj();
        for (i, &(gi, xi)) in roots.iter().enumerate() {
            expected[(i + 1, j + 1)] = gi * gj / (one - xi * xj.conj());
        }
    }
    suite.record(|| "m = 0 metric pattern".into(), max_abs_diff(&g, &expected));
}

fn m1_reproduction(suite: &mut SuiteResult, mutation: Option<Mutation>) {
    let (l, m) = (c(0.5, 0.0), c(0.25, 0.0));
    let model = ArfimaModel::unit_gain(0.0, vec![l], vec![m]).expect("valid model");
    let cfg = GeometryConfig::new(model, WeightSequence::power(1.0).expect("m = 1"));
    let one = c(1.0, 0.0);
    let k = ((one - l * m.conj()) * (one - m * l.conj()) / ((one - l * l.conj()) * (one - m * m.conj())))
        .ln()
        .re;
    suite.record_result(|| "m = 1 potential".into(), potential_closed(&cfg).map(|v| (v - k).abs()));
    let outcome = closed_metric(&cfg, mutation).map(|g| {
        let roots = [(-1.0, l), (1.0, m)];
        let mut err: f64 = 0.0;
        for (i, &(gi, xi)) in roots.iter().enumerate() {
            for (j, &(gj, xj)) in roots.iter().enumerate() {
                let e = gi * gj / (one - xi * xj.conj()).powi(2);
                err = err.max((g[(i, j)] - e).norm());
            }
        }
        err
    });
    suite.record_result(|| "m = 1 metric pattern".into(), outcome);
}

/// Runs every suite.
pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let mut sampler = ModelSampler::new(opts.seed, SamplerOptions::default());
    let models: Vec<ArfimaModel> = (0..opts.models).map(|_| sampler.model()).collect();
    let indexed: Vec<(usize, &ArfimaModel)> = models.iter().enumerate().collect();
    let per_model = opts
        .execution
        .map(&indexed, |&(i, m)| check_model(i, m, opts.mutation));
    let mut out = suites();
    for results in per_model {
        for (acc, r) in out.iter_mut().zip(results) {
            acc.merge(r);
        }
    }
    check_distances(&models, &mut out[4]);
    m0_reproduction(&mut out[5], opts.mutation);
    m1_reproduction(&mut out[6], opts.mutation);
    VerifyReport {
        seed: opts.seed,
        models: opts.models,
        suites: out,
    }
}
