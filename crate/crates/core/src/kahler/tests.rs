use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;
use crate::error::Error;
use crate::filter_models::ArfimaModel;
use crate::weighted_hardy::WeightSequence;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn power(m: f64) -> WeightSequence {
    WeightSequence::power(m).unwrap()
}

fn model(d: f64, poles: &[Complex64], zeros: &[Complex64]) -> ArfimaModel {
    ArfimaModel::unit_gain(d, poles.to_vec(), zeros.to_vec()).unwrap()
}

fn ar1(l: f64) -> ArfimaModel {
    model(0.0, &[c(l, 0.0)], &[])
}

#[test]
fn potential_examples() {
    let gain = GeometryConfig::new(model(0.0, &[], &[]), power(0.0));
    assert_eq!(potential_series(&gain).unwrap().value, 1.0);
    assert_eq!(potential_closed(&gain).unwrap(), 1.0);
    let gain_half = GeometryConfig::new(model(0.0, &[], &[]), power(0.5));
    assert_eq!(potential_closed(&gain_half).unwrap(), 0.0);

    let arma = GeometryConfig::new(model(0.0, &[c(0.5, 0.0)], &[c(0.25, 0.0)]), power(1.0));
    let expected = 0.085_157_808_340_306_77;
    assert!((potential_series(&arma).unwrap().value - expected).abs() < 1e-13);
    assert!((potential_closed(&arma).unwrap() - expected).abs() < 1e-14);

    let frac = GeometryConfig::new(model(0.3, &[], &[]), power(0.0));
    let expected = 0.09 * PI * PI / 6.0 + 1.0;
    assert!((potential_series(&frac).unwrap().value - expected).abs() < 1e-13);
    assert!((potential_closed(&frac).unwrap() - expected).abs() < 1e-14);

    let a0 = GeometryConfig::new(ar1(0.5), power(0.0));
    assert!((potential_closed(&a0).unwrap() - 1.267_652_639_082_732_6).abs() < 1e-14);
    let a1 = GeometryConfig::new(ar1(0.5), power(1.0));
    assert!((potential_closed(&a1).unwrap() - 0.287_682_072_451_780_9).abs() < 1e-14);
}

#[test]
fn metric_examples() {
    let a0 = GeometryConfig::new(ar1(0.5), power(0.0));
    let g = metric_series(&a0).unwrap().value;
    assert!((g[(0, 0)] - c(4.0 / 3.0, 0.0)).norm() < 1e-13);
    let a1 = GeometryConfig::new(ar1(0.5), power(1.0));
    assert!((metric_closed(&a1).unwrap()[(0, 0)] - c(16.0 / 9.0, 0.0)).norm() < 1e-14);
    assert!((metric_series(&a1).unwrap().value[(0, 0)] - c(16.0 / 9.0, 0.0)).norm() < 1e-12);

    let with_d = GeometryConfig::new(model(0.2, &[c(0.5, 0.0)], &[]), power(0.0));
    let g = metric_closed(&with_d).unwrap();
    assert!((g[(0, 0)].re - PI * PI / 6.0).abs() < 1e-14);
    assert!((g[(0, 1)] - c(0.5f64.ln() / 0.5, 0.0)).norm() < 1e-14);
    assert!((g[(0, 1)].re + 1.386_294_361_119_890_6).abs() < 1e-14);

    let arma = GeometryConfig::new(model(0.0, &[c(0.5, 0.0)], &[c(0.25, 0.0)]), power(1.0));
    let g = metric_closed(&arma).unwrap();
    assert!((g[(0, 1)] - c(-1.0 / (0.875f64 * 0.875), 0.0)).norm() < 1e-14);

    for m in [-1.0, 0.0, 0.5, 2.0] {
        let zero = GeometryConfig::new(model(0.0, &[c(0.0, 0.0)], &[]), power(m));
        assert_eq!(metric_closed(&zero).unwrap()[(0, 0)], c(1.0, 0.0));
    }
}

#[test]
fn metric_fd_examples() {
    let a0 = GeometryConfig::new(ar1(0.5), power(0.0));
    let h = hessian_fd(&a0).unwrap();
    assert!((h.mixed[(0, 0)] - c(4.0 / 3.0, 0.0)).norm() < 1e-6);
    assert!(holomorphic_block_fd(&a0).unwrap()[(0, 0)].norm() < 1e-6);
    let cfg = GeometryConfig::new(model(0.2, &[c(0.5, 0.1), c(-0.3, 0.6)], &[c(0.25, -0.2)]), power(0.0));
    let h = hessian_fd(&cfg).unwrap();
    let g = metric_closed(&cfg).unwrap();
    assert!(max_abs_diff(&h.mixed, &g) < 1e-6, "{}", max_abs_diff(&h.mixed, &g));
    assert!(max_abs_diff(&h.mixed, &h.mixed.adjoint()) < 1e-10);
}

#[test]
fn connection_examples() {
    let a0 = GeometryConfig::new(ar1(0.5), power(0.0));
    let closed = connection_closed(&a0).unwrap();
    assert!((closed.get(0, 0, 0) - c(0.5 / 0.5625, 0.0)).norm() < 1e-14);
    let series = connection_series(&a0).unwrap().value;
    assert!(closed.max_abs_diff(&series) < 1e-12);
    let fd = connection_fd_oracle(&a0).unwrap();
    assert!(closed.max_abs_diff(&fd) < 1e-4);

    let a1 = GeometryConfig::new(ar1(0.5), power(1.0));
    let closed = connection_closed(&a1).unwrap();
    assert!((closed.get(0, 0, 0) - c(1.0 / 0.421_875, 0.0)).norm() < 1e-13);

    let cfg = GeometryConfig::new(model(0.2, &[c(0.5, 0.1)], &[c(0.25, -0.2)]), power(0.5));
    let closed = connection_closed(&cfg).unwrap();
    let series = connection_series(&cfg).unwrap().value;
    let fd = connection_fd_oracle(&cfg).unwrap();
    assert!(closed.max_abs_diff(&series) < 1e-11, "{}", closed.max_abs_diff(&series));
    assert!(closed.max_abs_diff(&fd) < 1e-4, "{}", closed.max_abs_diff(&fd));
    for ((i, j, _), v) in closed.iter() {
        if i != j || i == 0 {
            assert_eq!(v, c(0.0, 0.0));
        }
    }
}

#[test]
fn ricci_examples() {
    for l in [0.5, 0.0] {
        let cfg = GeometryConfig::new(ar1(l), power(1.0));
        let r = ricci_fd(&cfg).unwrap();
        let expected = -2.0 / (1.0 - l * l).powi(2);
        assert!((r[(0, 0)] - c(expected, 0.0)).norm() < 1e-4, "{}", r[(0, 0)]);
    }
    let cfg = GeometryConfig::new(model(0.1, &[c(0.5, 0.2)], &[c(-0.3, 0.1)]), power(0.0));
    let r = ricci_fd(&cfg).unwrap();
    assert!(max_abs_diff(&r, &r.adjoint()) < 1e-8);
}

#[test]
fn degenerate_models_are_flagged() {
    let cfg = GeometryConfig::new(model(0.0, &[c(0.4, 0.0), c(0.4, 0.0)], &[]), power(0.0));
    assert!(metric_closed(&cfg).is_ok());
    assert!(matches!(ricci_fd(&cfg), Err(Error::DegenerateMetric { .. })));
    let id = CMatrix::identity(2, 2);
    assert!(matches!(laplace_beltrami(&cfg, &id), Err(Error::DegenerateMetric { .. })));
}

#[test]
fn laplace_beltrami_examples() {
    let cfg = GeometryConfig::new(ar1(0.5), power(0.0));
    let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
    assert!((laplace_beltrami(&cfg, &one).unwrap() - c(1.5, 0.0)).norm() < 1e-14);
    assert_eq!(laplace_beltrami(&cfg, &CMatrix::zeros(1, 1)).unwrap(), c(0.0, 0.0));
    let cfg = GeometryConfig::new(model(0.2, &[c(0.5, 0.1)], &[c(0.25, -0.2)]), power(0.0));
    let g = metric_closed(&cfg).unwrap();
    assert!((laplace_beltrami(&cfg, &g).unwrap() - c(6.0, 0.0)).norm() < 1e-12);
}

#[test]
fn kahler_conditions_hold() {
    for m in [0.0, 0.5, 1.0] {
        let cfg = GeometryConfig::new(model(0.0, &[c(0.5, 0.3), c(-0.6, 0.0)], &[c(0.2, -0.4)]), power(m));
        let r = check_kahler(&cfg).unwrap();
        assert!(r.hermitian < 1e-6 && r.closure < 1e-6, "m = {m}: {r:?}");
    }
    let cfg = GeometryConfig::new(model(0.3, &[c(0.5, 0.0)], &[]), power(0.0));
    let r = check_kahler(&cfg).unwrap();
    assert!(r.hermitian < 1e-6 && r.closure < 1e-6, "{r:?}");
    let one = GeometryConfig::new(ar1(0.4), power(0.0));
    assert_eq!(check_kahler(&one).unwrap().closure, 0.0);
}

#[test]
fn divergent_configurations_are_rejected() {
    let cfg = GeometryConfig::new(model(0.3, &[c(0.5, 0.0)], &[]), power(1.0));
    assert!(matches!(potential_series(&cfg), Err(Error::Divergent(_))));
    assert!(matches!(potential_closed(&cfg), Err(Error::Divergent(_))));
    assert!(matches!(metric_series(&cfg), Err(Error::Divergent(_))));
    assert!(matches!(metric_fd_oracle(&cfg), Err(Error::Divergent(_))));
    // d = 0 but in the chart: g_00 = Σ s^{m-2} still diverges
    let cfg = GeometryConfig::new(ar1(0.5), power(1.0)).include_d(true);
    assert!(matches!(metric_closed(&cfg), Err(Error::Divergent(_))));
    assert!(potential_closed(&cfg).is_ok());
    // d = 0, m = 3: finite, closed form agrees with the series
    let cfg = GeometryConfig::new(model(0.0, &[c(0.5, 0.2)], &[c(-0.3, 0.0)]), power(3.0));
    let s = potential_series(&cfg).unwrap().value;
    assert!((s - potential_closed(&cfg).unwrap()).abs() < 1e-9);
}

#[test]
fn step_too_large_is_reported() {
    let cfg = GeometryConfig::new(ar1(0.99), power(0.0)).fd_step(1e-2);
    assert!(matches!(metric_fd_oracle(&cfg), Err(Error::StepTooLarge { .. })));
}

#[test]
fn generic_transforms_match_their_potential() {
    let m = model(0.2, &[c(0.5, 0.1)], &[c(0.3, -0.2)]);
    for t in [Transform::Identity, Transform::Log, Transform::LogSquaredModulus] {
        let cfg = GeometryConfig::new(m.clone(), power(0.0)).transform(t).truncation(32);
        let series = metric_series(&cfg).unwrap().value;
        let fd = metric_fd_oracle(&cfg).unwrap();
        assert!(max_abs_diff(&series, &fd) < 1e-5, "{}: {}", t.as_str(), max_abs_diff(&series, &fd));
    }
}

#[test]
fn non_power_weights_use_series() {
    let cfg = GeometryConfig::new(model(0.2, &[c(0.5, 0.1)], &[c(0.3, -0.2)]), WeightSequence::bergman());
    let g = metric_series(&cfg).unwrap().value;
    let fd = metric_fd_oracle(&cfg).unwrap();
    assert!(max_abs_diff(&g, &fd) < 1e-6);
    assert!(matches!(metric_closed(&cfg), Err(Error::IncompatibleWeight(_))));
}

#[test]
fn report_contains_both_routes() {
    let cfg = GeometryConfig::new(model(0.2, &[c(0.5, 0.1)], &[]), power(0.0));
    let opts = ReportOptions {
        potential: true,
        metric: true,
        connection: true,
        ricci: true,
        check: true,
    };
    let r = build_report(&cfg, opts).unwrap();
    assert!(max_abs_diff(r.metric.as_ref().unwrap(), r.metric_closed.as_ref().unwrap()) < 1e-9);
    let j = r.to_json();
    assert_eq!(j["coordinates"][0], "d");
    assert!((j["metric"][0][0][0].as_f64().unwrap() - PI * PI / 6.0).abs() < 1e-9);
    assert!(j["diagnostics"]["terms"].as_u64().unwrap() > 0);
}
