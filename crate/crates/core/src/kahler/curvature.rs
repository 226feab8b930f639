//! Ricci curvature and the Laplace–Beltrami operator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fd::{self, FdScheme};

use super::generic::{check_reach, Probe};
use super::guard::require_finite_metric;
use super::oracle::{analytic_metric_at, fixed_truncation};
use super::{CMatrix, GeometryConfig, Point};

const ORDER: usize = 6;
const DEGENERACY_RATIO: f64 = 1e-12;

/// Fails with [`Error::DegenerateMetric`] when
/// `|det g| < 1e-12 · (max row norm)^n`.
pub(crate) fn check_nondegenerate(g: &CMatrix) -> Result<Complex64> {
    let n = g.nrows();
    let det = g.clone().determinant();
    let row_norm = g
        .row_iter()
        .map(|r| r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let threshold = DEGENERACY_RATIO * row_norm.powi(n as i32);
    if !(det.norm() >= threshold) || det.norm() == 0.0 {
        return Err(Error::DegenerateMetric {
            det: det.norm(),
            threshold,
        });
    }
    Ok(det)
}

/// `R_{ab̄} = -∂_a ∂_b̄ log |det g|`, differentiating the analytic metric by
/// central differences.
pub fn ricci_fd(cfg: &GeometryConfig) -> Result<CMatrix> {
    require_finite_metric(cfg)?;
    let scheme = FdScheme::new(cfg.fd_step, ORDER)?;
    let point = cfg.point();
    check_reach(&point, &scheme, 2)?;
    let n = fixed_truncation(cfg)?;
    check_nondegenerate(&analytic_metric_at(cfg, &point, n)?)?;
    let probe = Probe::new(point.clone(), |p: &Point| {
        analytic_metric_at(cfg, p, n).map(|g| g.determinant().norm().ln())
    });
    let f = |x: &[f64]| probe.eval_or(x, || f64::NAN);
    let t = fd::real_derivatives(&f, &point.real(), 2, &scheme, cfg.execution);
    probe.finish()?;
    let dim = cfg.dim();
    let mut r = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            r[(a, b)] = -fd::wirtinger(&t, &[(a, false), (b, true)]);
        }
    }
    Ok(r)
}

/// `Δf = 2 g^{ab̄} ∂_a ∂_b̄ f` for the given mixed Hessian of `f`.
pub fn laplace_beltrami(cfg: &GeometryConfig, hessian: &CMatrix) -> Result<Complex64> {
    let dim = cfg.dim();
    if hessian.nrows() != dim || hessian.ncols() != dim {
        return Err(Error::InvalidInput(format!(
            "hessian is {}x{}, chart has dimension {dim}",
            hessian.nrows(),
            hessian.ncols()
        )));
    }
    require_finite_metric(cfg)?;
    let n = fixed_truncation(cfg)?;
    let g = analytic_metric_at(cfg, &cfg.point(), n)?;
    check_nondegenerate(&g)?;
    let inv = g.try_inverse().ok_or(Error::DegenerateMetric {
        det: 0.0,
        threshold: 0.0,
    })?;
    Ok((inv * hessian).trace() * 2.0)
}
