//! Finite-difference oracles on the potential, and the Kähler-condition
//! checks.
//!
//! The potential is evaluated at a truncation fixed at the centre point, so
//! every stencil point differentiates the same smooth function. Second
//! derivatives use nested 6th-order central stencils; third derivatives use
//! nested 4th-order stencils.

use num_complex::Complex64;

use crate::error::Result;
use crate::fd::{self, FdScheme};

use super::generic::{self, check_reach, Probe};
use super::guard::{require_finite_metric, require_finite_potential};
use super::{closed, series, CMatrix, Connection, GeometryConfig, Point, Transform};

const HESSIAN_ORDER: usize = 6;
const THIRD_ORDER: usize = 4;

/// Mixed and holomorphic Wirtinger Hessians of the potential.
#[derive(Debug, Clone, PartialEq)]
pub struct WirtingerHessian {
    /// `∂_a ∂_b̄ K`.
    pub mixed: CMatrix,
    /// `∂_a ∂_b K`. Not a metric component: it equals
    /// `Σ ω_s ∂_a ∂_b f_s conj(f_s)` and is generally nonzero.
    pub holomorphic: CMatrix,
    pub step: f64,
    pub truncation: usize,
}

/// Truncation shared by all stencil points.
pub(crate) fn fixed_truncation(cfg: &GeometryConfig) -> Result<usize> {
    match (cfg.transform, cfg.truncation) {
        (_, Some(n)) => Ok(n),
        (Transform::Log, None) => Ok(series::log_potential(cfg, &cfg.point(), None)?.terms),
        (_, None) => Ok(cfg.generic_truncation()),
    }
}

pub(crate) fn potential_at(cfg: &GeometryConfig, point: &Point, n: usize) -> Result<f64> {
    match cfg.transform {
        Transform::Log => Ok(series::log_potential(cfg, point, Some(n))?.value),
        _ => generic::potential_at(cfg, point, n),
    }
}

/// Metric by the analytic route at an arbitrary point: closed form when
/// available, otherwise the series at truncation `n`.
pub(crate) fn analytic_metric_at(cfg: &GeometryConfig, point: &Point, n: usize) -> Result<CMatrix> {
    match (cfg.transform, cfg.weight.power_order()) {
        (Transform::Log, Some(m)) => closed::metric_at(point, m),
        (Transform::Log, None) => Ok(series::log_metric(cfg, point, Some(n))?.value),
        _ => generic::metric_at(cfg, point, n),
    }
}

fn potential_tensor(cfg: &GeometryConfig, rank: usize, order: usize) -> Result<(fd::SymmetricTensor, FdScheme, usize)> {
    require_finite_potential(cfg)?;
    require_finite_metric(cfg)?;
    let scheme = FdScheme::new(cfg.fd_step, order)?;
    let point = cfg.point();
    check_reach(&point, &scheme, rank)?;
    let n = fixed_truncation(cfg)?;
    let probe = Probe::new(point.clone(), |p: &Point| potential_at(cfg, p, n));
    let f = |x: &[f64]| probe.eval_or(x, || f64::NAN);
    let t = fd::real_derivatives(&f, &point.real(), rank, &scheme, cfg.execution);
    probe.finish()?;
    Ok((t, scheme, n))
}

/// Wirtinger Hessian of the potential by central differences.
pub fn hessian_fd(cfg: &GeometryConfig) -> Result<WirtingerHessian> {
    let (t, scheme, n) = potential_tensor(cfg, 2, HESSIAN_ORDER)?;
    let dim = cfg.dim();
    let mut mixed = CMatrix::zeros(dim, dim);
    let mut holomorphic = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            mixed[(a, b)] = fd::wirtinger(&t, &[(a, false), (b, true)]);
            holomorphic[(a, b)] = fd::wirtinger(&t, &[(a, false), (b, false)]);
        }
    }
    Ok(WirtingerHessian {
        mixed,
        holomorphic,
        step: scheme.step,
        truncation: n,
    })
}

/// `g_{ab̄} = ∂_a ∂_b̄ K` by finite differences of the potential.
pub fn metric_fd_oracle(cfg: &GeometryConfig) -> Result<CMatrix> {
    Ok(hessian_fd(cfg)?.mixed)
}

/// `Γ_{ab,c̄} = ∂_a ∂_b ∂_c̄ K` by finite differences of the potential.
pub fn connection_fd_oracle(cfg: &GeometryConfig) -> Result<Connection> {
    let (t, _, _) = potential_tensor(cfg, 3, THIRD_ORDER)?;
    let dim = cfg.dim();
    let mut out = Connection::zeros(dim);
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                out.set(a, b, c, fd::wirtinger(&t, &[(a, false), (b, false), (c, true)]));
            }
        }
    }
    Ok(out)
}

/// Holomorphic block `g_{ab}` of the metric read off the length element:
/// the Wirtinger Hessian `∂_a ∂_b` of `D(ξ) = Σ ω_s |f_s(ξ) - f_s(ξ₀)|²`
/// at `ξ₀`, by central differences.
pub fn holomorphic_block_fd(cfg: &GeometryConfig) -> Result<CMatrix> {
    require_finite_metric(cfg)?;
    let scheme = FdScheme::new(cfg.fd_step, HESSIAN_ORDER)?;
    let point = cfg.point();
    check_reach(&point, &scheme, 2)?;
    let n = fixed_truncation(cfg)?;
    let base = generic::coefficients(cfg, &point.params(), n)?;
    let probe = Probe::new(point.clone(), |p: &Point| {
        let f = generic::coefficients(cfg, &p.params(), n)?;
        let diff: Vec<Complex64> = f.iter().zip(&base).map(|(a, b)| a - b).collect();
        generic::weighted_square(cfg, &diff)
    });
    let f = |x: &[f64]| probe.eval_or(x, || f64::NAN);
    let t = fd::real_derivatives(&f, &point.real(), 2, &scheme, cfg.execution);
    probe.finish()?;
    let dim = cfg.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            out[(a, b)] = fd::wirtinger(&t, &[(a, false), (b, false)]);
        }
    }
    Ok(out)
}

/// Residuals of the Kähler conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KahlerResiduals {
    /// `max |g_{ab}|` from [`holomorphic_block_fd`].
    pub hermitian: f64,
    /// `max |∂_a g_{bc̄} - ∂_b g_{ac̄}|` and its conjugate counterpart.
    pub closure: f64,
}

/// Evaluates both Kähler conditions at the configured point.
pub fn check_kahler(cfg: &GeometryConfig) -> Result<KahlerResiduals> {
    let hermitian = holomorphic_block_fd(cfg)?.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let dim = cfg.dim();
    if dim < 2 {
        return Ok(KahlerResiduals { hermitian, closure: 0.0 });
    }
    let scheme = FdScheme::new(cfg.fd_step, HESSIAN_ORDER)?;
    let point = cfg.point();
    check_reach(&point, &scheme, 1)?;
    let n = fixed_truncation(cfg)?;
    let probe = Probe::new(point.clone(), |p: &Point| {
        analytic_metric_at(cfg, p, n).map(|g| g.transpose().iter().copied().collect::<Vec<_>>())
    });
    let nan = || vec![Complex64::new(f64::NAN, f64::NAN); dim * dim];
    let f = |x: &[f64]| probe.eval_or(x, nan);
    let x0 = point.real();
    // row-major: entry (b, c) at b * dim + c
    let holo = cfg
        .execution
        .map_range(dim, |a| fd::wirtinger_first(&f, &x0, a, false, &scheme));
    let anti = cfg
        .execution
        .map_range(dim, |a| fd::wirtinger_first(&f, &x0, a, true, &scheme));
    probe.finish()?;
    let mut closure: f64 = 0.0;
    for a in 0..dim {
        for b in a + 1..dim {
            for c in 0..dim {
                // ∂_a g_{bc̄} = ∂_b g_{ac̄}
                closure = closure.max((holo[a][b * dim + c] - holo[b][a * dim + c]).norm());
                // ∂_ā g_{cb̄} = ∂_b̄ g_{cā}
                closure = closure.max((anti[a][c * dim + b] - anti[b][c * dim + a]).norm());
            }
        }
    }
    Ok(KahlerResiduals { hermitian, closure })
}
