//! Polylogarithm closed forms for `φ = log` and power weights `ω_s = s^m`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polylog::{self, PolylogRequest};

use super::guard::{require_finite_metric, require_finite_potential};
use super::series::c0_term;
use super::{CMatrix, Connection, GeometryConfig, Point, Slot, Transform};

const POLYLOG_TOLERANCE: f64 = 1e-16;

fn power_order(cfg: &GeometryConfig) -> Result<f64> {
    if cfg.transform != Transform::Log {
        return Err(Error::InvalidInput(format!(
            "closed forms exist only for the log transform, not '{}'",
            cfg.transform.as_str()
        )));
    }
    cfg.weight.power_order().ok_or_else(|| {
        Error::IncompatibleWeight(format!(
            "closed forms need a power weight w_s = s^m, got {}",
            cfg.weight.description
        ))
    })
}

fn li(order: f64, z: Complex64) -> Result<Complex64> {
    polylog::polylog(&PolylogRequest::new(order, z).tolerance(POLYLOG_TOLERANCE))
}

fn li_ratio(order: f64, z: Complex64) -> Result<Complex64> {
    polylog::polylog_ratio(order, z, POLYLOG_TOLERANCE, polylog::DEFAULT_MAX_TERMS)
}

/// `(Li_a(x) - Li_b(x)) / x² = Σ_{s≥2} (s^{-a} - s^{-b}) x^{s-2}`.
///
/// The quotient loses accuracy as `x → 0`, where the series is used instead.
fn polylog_second_difference(a: f64, b: f64, x: Complex64) -> Result<Complex64> {
    if x.norm() >= 0.1 {
        return Ok((li(a, x)? - li(b, x)?) / (x * x));
    }
    let r = x.norm();
    let p = (-a).max(-b).max(0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pw = Complex64::new(1.0, 0.0);
    for s in 2..10_000usize {
        let sf = s as f64;
        sum += pw * (sf.powf(-a) - sf.powf(-b));
        pw *= x;
        // |s^{-a} - s^{-b}| ≤ 2 s^p
        if super::series::tail(2.0, p, r, s, 2) <= POLYLOG_TOLERANCE * (1.0 + sum.norm()) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergent {
        max_terms: 10_000,
        tail_bound: f64::NAN,
    })
}

pub(crate) fn potential_at(cfg: &GeometryConfig, point: &Point, m: f64) -> Result<f64> {
    let order = 2.0 - m;
    let roots: Vec<(f64, Complex64)> = point.roots().collect();
    let mut k = Complex64::new(0.0, 0.0);
    for (gi, xi) in &roots {
        for (gj, xj) in &roots {
            k += li(order, xi * xj.conj())? * (gi * gj);
        }
    }
    let d = point.d();
    if d != Complex64::new(0.0, 0.0) {
        if m >= 1.0 {
            return Err(Error::Divergent(format!(
                "potential: |d|^2 Li_{{2-m}}(1) diverges for d = {d} != 0 and m = {m} >= 1"
            )));
        }
        for (g, x) in &roots {
            k += (d * li(order, x.conj())? + d.conj() * li(order, *x)?) * *g;
        }
        k += d.norm_sqr() * polylog::zeta(order, POLYLOG_TOLERANCE)?;
    }
    Ok(k.re + c0_term(cfg)?)
}

/// `K = Σ γ_i γ_j Li_{2-m}(ξ_i ξ̄_j) + Σ γ_i (d Li_{2-m}(ξ̄_i) + d̄ Li_{2-m}(ξ_i))
///  + |d|² ζ(2-m) + ω_0 |c_0|²`.
pub fn potential_closed(cfg: &GeometryConfig) -> Result<f64> {
    let m = power_order(cfg)?;
    require_finite_potential(cfg)?;
    potential_at(cfg, &cfg.point(), m)
}

pub(crate) fn metric_at(point: &Point, m: f64) -> Result<CMatrix> {
    let n = point.dim();
    let mut g = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let (sa, sb) = (point.slots[a], point.slots[b]);
            let (xa, xb) = (point.coords[a], point.coords[b]);
            let v = match (sa, sb) {
                (Slot::D, Slot::D) => Complex64::new(polylog::zeta(2.0 - m, POLYLOG_TOLERANCE)?, 0.0),
                (Slot::D, _) => li_ratio(1.0 - m, xb.conj())? * sb.gamma(),
                _ => li_ratio(-m, xa * xb.conj())? * (sa.gamma() * sb.gamma()),
            };
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
        g[(a, a)].im = 0.0;
    }
    Ok(g)
}

/// Metric from `ζ(2-m)`, `γ_j Li_{1-m}(ξ̄_j)/ξ̄_j` and
/// `γ_i γ_j Li_{-m}(ξ_i ξ̄_j)/(ξ_i ξ̄_j)`.
pub fn metric_closed(cfg: &GeometryConfig) -> Result<CMatrix> {
    let m = power_order(cfg)?;
    require_finite_metric(cfg)?;
    metric_at(&cfg.point(), m)
}

pub(crate) fn connection_at(point: &Point, m: f64) -> Result<Connection> {
    let n = point.dim();
    let mut out = Connection::zeros(n);
    for i in 0..n {
        let si = point.slots[i];
        if si == Slot::D {
            continue;
        }
        let xi = point.coords[i];
        for k in 0..n {
            let sk = point.slots[k];
            let v = if sk == Slot::D {
                polylog_second_difference(-m, 1.0 - m, xi)? * si.gamma()
            } else {
                let xk = point.coords[k].conj();
                xk * polylog_second_difference(-m - 1.0, -m, xi * xk)? * (si.gamma() * sk.gamma())
            };
            out.set(i, i, k, v);
        }
    }
    Ok(out)
}

/// `Γ_{ii,0̄} = γ_i (Li_{-m}(ξ_i) - Li_{1-m}(ξ_i)) / ξ_i²` and
/// `Γ_{ii,k̄} = γ_i γ_k ξ̄_k (Li_{-m-1}(x) - Li_{-m}(x)) / x²`, `x = ξ_i ξ̄_k`;
/// all other components are exactly zero.
pub fn connection_closed(cfg: &GeometryConfig) -> Result<Connection> {
    let m = power_order(cfg)?;
    connection_at(&cfg.point(), m)
}
