//! Coefficient-level route for an arbitrary transform: the coefficients
//! `f_s(ξ)` are computed numerically (impulse response, analytic cepstrum or
//! contour power cepstrum) at a fixed truncation `N`, and their holomorphic
//! derivatives are taken by central differences along the real axis of each
//! coordinate. The metric and connection then follow from
//! `g_{ab̄} = Σ ω_s ∂_a f_s conj(∂_b f_s)` and
//! `Γ_{ab,c̄} = Σ ω_s ∂_a ∂_b f_s conj(∂_c f_s)`.

use std::sync::Mutex;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fd::{self, FdScheme};
use crate::filter_models::{complex_cepstrum_params, impulse_response_params, power_cepstrum_params, FilterParams};

use super::{CMatrix, Connection, GeometryConfig, Point, SeriesValue, Transform};

/// Stencil order of the coefficient derivatives.
const ORDER: usize = 6;

pub(crate) fn coefficients(cfg: &GeometryConfig, params: &FilterParams, n: usize) -> Result<Vec<Complex64>> {
    match cfg.transform {
        Transform::Identity => Ok(impulse_response_params(params, n)),
        Transform::Log => {
            let mut c = complex_cepstrum_params(params, n);
            c[0] = Complex64::new(cfg.c0.value(&cfg.model), 0.0);
            Ok(c)
        }
        Transform::LogSquaredModulus => power_cepstrum_params(params, n, &cfg.contour_options(n)),
    }
}

pub(crate) fn weighted_square(cfg: &GeometryConfig, f: &[Complex64]) -> Result<f64> {
    let mut total = 0.0;
    for (s, v) in f.iter().enumerate().skip(cfg.weight.first_index()) {
        total += cfg.weight.eval(s)? * v.norm_sqr();
    }
    Ok(total)
}

pub(crate) fn potential_at(cfg: &GeometryConfig, point: &Point, n: usize) -> Result<f64> {
    weighted_square(cfg, &coefficients(cfg, &point.params(), n)?)
}

pub(crate) fn potential(cfg: &GeometryConfig) -> Result<SeriesValue<f64>> {
    let n = cfg.generic_truncation();
    Ok(SeriesValue {
        value: potential_at(cfg, &cfg.point(), n)?,
        terms: n + 1,
        tail_bound: f64::NAN,
    })
}

/// Checks that a stencil of the given rank keeps every root inside the disk.
pub(crate) fn check_reach(point: &Point, scheme: &FdScheme, rank: usize) -> Result<()> {
    let reach = point.root_modulus() + scheme.reach(rank);
    if reach >= 1.0 {
        return Err(Error::StepTooLarge { reach });
    }
    Ok(())
}

/// Evaluates `f` on perturbed points, remembering the first failure so the
/// stencil closures can stay infallible.
pub(crate) struct Probe<'a, T> {
    f: Box<dyn Fn(&Point) -> Result<T> + Sync + 'a>,
    base: Point,
    error: Mutex<Option<Error>>,
}

impl<'a, T> Probe<'a, T> {
    pub fn new(base: Point, f: impl Fn(&Point) -> Result<T> + Sync + 'a) -> Self {
        Self {
            f: Box::new(f),
            base,
            error: Mutex::new(None),
        }
    }

    pub fn eval_or(&self, x: &[f64], fallback: impl FnOnce() -> T) -> T {
        match (self.f)(&self.base.with_real(x)) {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.error.lock().expect("probe lock");
                if slot.is_none() {
                    *slot = Some(e);
                }
                fallback()
            }
        }
    }

    pub fn finish(self) -> Result<()> {
        match self.error.into_inner().expect("probe lock") {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

struct Derivatives {
    coeffs: Vec<Complex64>,
    first: Vec<Vec<Complex64>>,
    second: Option<Vec<Vec<Vec<Complex64>>>>,
}

fn derivatives(cfg: &GeometryConfig, point: &Point, n: usize, with_second: bool) -> Result<Derivatives> {
    let scheme = FdScheme::new(cfg.fd_step, ORDER)?;
    check_reach(point, &scheme, if with_second { 2 } else { 1 })?;
    let dim = point.dim();
    let coeffs = coefficients(cfg, &point.params(), n)?;
    let probe = Probe::new(point.clone(), |p: &Point| coefficients(cfg, &p.params(), n));
    let nan = || vec![Complex64::new(f64::NAN, f64::NAN); n + 1];
    let f = |x: &[f64]| probe.eval_or(x, nan);
    let x0 = point.real();
    let first = cfg
        .execution
        .map_range(dim, |a| fd::mixed_partial(&f, &x0, &[2 * a], &scheme));
    let second = if with_second {
        let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|a| (a..dim).map(move |b| (a, b))).collect();
        let vals = cfg
            .execution
            .map(&pairs, |&(a, b)| fd::mixed_partial(&f, &x0, &[2 * a, 2 * b], &scheme));
        let mut out = vec![vec![Vec::new(); dim]; dim];
        for ((a, b), v) in pairs.into_iter().zip(vals) {
            out[b][a] = v.clone();
            out[a][b] = v;
        }
        Some(out)
    } else {
        None
    };
    probe.finish()?;
    Ok(Derivatives { coeffs, first, second })
}

fn weights(cfg: &GeometryConfig, n: usize) -> Result<Vec<f64>> {
    cfg.weight.table(n)
}

pub(crate) fn metric_at(cfg: &GeometryConfig, point: &Point, n: usize) -> Result<CMatrix> {
    let der = derivatives(cfg, point, n, false)?;
    let w = weights(cfg, n)?;
    let dim = point.dim();
    let mut g = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            let v: Complex64 = (0..=n).map(|s| der.first[a][s] * der.first[b][s].conj() * w[s]).sum();
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
        g[(a, a)].im = 0.0;
    }
    debug_assert_eq!(der.coeffs.len(), n + 1);
    Ok(g)
}

pub(crate) fn metric(cfg: &GeometryConfig) -> Result<SeriesValue<CMatrix>> {
    let n = cfg.generic_truncation();
    Ok(SeriesValue {
        value: metric_at(cfg, &cfg.point(), n)?,
        terms: n + 1,
        tail_bound: f64::NAN,
    })
}

pub(crate) fn connection(cfg: &GeometryConfig) -> Result<SeriesValue<Connection>> {
    let n = cfg.generic_truncation();
    let point = cfg.point();
    let der = derivatives(cfg, &point, n, true)?;
    let second = der.second.expect("requested second derivatives");
    let w = weights(cfg, n)?;
    let dim = point.dim();
    let mut out = Connection::zeros(dim);
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let v: Complex64 = (0..=n).map(|s| second[a][b][s] * der.first[c][s].conj() * w[s]).sum();
                out.set(a, b, c, v);
            }
        }
    }
    Ok(SeriesValue {
        value: out,
        terms: n + 1,
        tail_bound: f64::NAN,
    })
}
