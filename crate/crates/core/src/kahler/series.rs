//! Truncated-series route.
//!
//! For `φ = log` the coefficient derivatives are analytic:
//! `∂_d c_s = -1/s` and `∂_{ξ_i} c_s = -γ_i ξ_i^{s-1}`. Each entry is summed
//! until a geometric majorant of its tail (built from `ω_t ≤ C t^p`) drops
//! below the configured tolerance. The slowly convergent `Σ ω_s / s²` sums of
//! the `d` coordinate are summed explicitly to a fixed index and completed
//! with an evaluated remainder ([`WeightSequence::inverse_square_tail`]).
//!
//! Other transforms delegate to the coefficient-level route in
//! [`super::generic`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::weighted_hardy::WeightSequence;

use super::generic;
use super::guard::{inverse_square_total, require_finite_metric, require_finite_potential};
use super::{CMatrix, Connection, GeometryConfig, Point, SeriesValue, Slot, Transform};

/// Explicit terms of `Σ ω_s / s²` before the remainder takes over.
const INVERSE_SQUARE_HEAD: usize = 64;

/// Bound on `Σ_{t>n} c t^p r^{t-shift}` for `0 ≤ r < 1`, `n + 1 ≥ shift`.
pub(crate) fn tail(c: f64, p: f64, r: f64, n: usize, shift: usize) -> f64 {
    if c == 0.0 || (r == 0.0 && n + 1 > shift) {
        return 0.0;
    }
    let next = (n + 1) as f64;
    let ratio = r * ((next + 1.0) / next).powf(p.max(0.0));
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    c * next.powf(p) * r.powi((n + 1 - shift) as i32) / (1.0 - ratio)
}

/// Sums `term(s)` for `s = 1, 2, …` until `tail(s) ≤ tolerance`, or over
/// exactly `fixed` terms when given.
pub(crate) fn adaptive_sum(
    mut term: impl FnMut(usize) -> Result<Complex64>,
    tail_after: impl Fn(usize) -> f64,
    tolerance: f64,
    max_terms: usize,
    fixed: Option<usize>,
) -> Result<(Complex64, usize, f64)> {
    let mut sum = Complex64::new(0.0, 0.0);
    if let Some(n) = fixed {
        for s in 1..=n {
            sum += term(s)?;
        }
        return Ok((sum, n, tail_after(n)));
    }
    for s in 1..=max_terms {
        sum += term(s)?;
        let t = tail_after(s);
        if t <= tolerance {
            return Ok((sum, s, t));
        }
    }
    Err(Error::NonConvergent {
        max_terms,
        tail_bound: tail_after(max_terms),
    })
}

/// Weights `ω_0..=ω_n`, zero below the family's first index.
struct WeightCache<'a> {
    weight: &'a WeightSequence,
    values: Vec<f64>,
}

impl<'a> WeightCache<'a> {
    fn new(weight: &'a WeightSequence) -> Self {
        Self {
            weight,
            values: Vec::new(),
        }
    }

    fn get(&mut self, s: usize) -> Result<f64> {
        while self.values.len() <= s {
            let next = self.values.len();
            self.values.push(self.weight.eval_or_zero(next)?);
        }
        Ok(self.values[s])
    }
}

/// `K = ‖f‖²_ω` summed over the transform's coefficients.
pub fn potential_series(cfg: &GeometryConfig) -> Result<SeriesValue<f64>> {
    require_finite_potential(cfg)?;
    match cfg.transform {
        Transform::Log => log_potential(cfg, &cfg.point(), cfg.truncation),
        _ => generic::potential(cfg),
    }
}

/// `g_{ab̄} = Σ ω_s ∂_a f_s conj(∂_b f_s)`.
pub fn metric_series(cfg: &GeometryConfig) -> Result<SeriesValue<CMatrix>> {
    require_finite_metric(cfg)?;
    match cfg.transform {
        Transform::Log => log_metric(cfg, &cfg.point(), cfg.truncation),
        _ => generic::metric(cfg),
    }
}

/// `Γ_{ab,c̄} = Σ ω_s ∂_a ∂_b f_s conj(∂_c f_s)`.
pub fn connection_series(cfg: &GeometryConfig) -> Result<SeriesValue<Connection>> {
    match cfg.transform {
        Transform::Log => log_connection(cfg, &cfg.point(), cfg.truncation),
        _ => generic::connection(cfg),
    }
}

pub(crate) fn c0_term(cfg: &GeometryConfig) -> Result<f64> {
    if cfg.weight.first_index() == 0 {
        Ok(cfg.weight.eval(0)? * cfg.c0.value(&cfg.model).powi(2))
    } else {
        Ok(0.0)
    }
}

/// `φ = log` potential at `point`; `fixed` pins the truncation.
pub(crate) fn log_potential(cfg: &GeometryConfig, point: &Point, fixed: Option<usize>) -> Result<SeriesValue<f64>> {
    let d = point.d();
    let roots: Vec<(f64, Complex64)> = point.roots().collect();
    let n_roots = roots.len() as f64;
    let rho = point.root_modulus();
    let (c, p) = cfg.weight.majorant();
    let mut weights = WeightCache::new(&cfg.weight);
    let mut powers: Vec<Complex64> = roots.iter().map(|(_, r)| *r).collect();
    // c_s = (A_s - d) / s with A_s = -Σ γ_i ξ_i^s
    let term = |s: usize| -> Result<Complex64> {
        let mut a = Complex64::new(0.0, 0.0);
        for (pw, (g, r)) in powers.iter_mut().zip(&roots) {
            a -= *g * *pw;
            *pw *= r;
        }
        let w = weights.get(s)?;
        Ok(Complex64::new(w * (a - d).norm_sqr() / (s * s) as f64, 0.0))
    };
    let tail_after = |n: usize| {
        tail(c * n_roots * n_roots, p - 2.0, rho * rho, n, 0) + tail(2.0 * c * n_roots * d.norm(), p - 2.0, rho, n, 0)
    };
    let (sum, terms, tail_bound) = adaptive_sum(term, tail_after, cfg.tolerance, cfg.max_terms, fixed)?;
    let mut value = sum.re + c0_term(cfg)?;
    if d != Complex64::new(0.0, 0.0) {
        value += d.norm_sqr() * cfg.weight.inverse_square_tail(terms)?;
    }
    Ok(SeriesValue {
        value,
        terms,
        tail_bound,
    })
}

/// `φ = log` metric at `point`; `fixed` pins the truncation of every entry.
pub(crate) fn log_metric(cfg: &GeometryConfig, point: &Point, fixed: Option<usize>) -> Result<SeriesValue<CMatrix>> {
    let n = point.dim();
    let (c, p) = cfg.weight.majorant();
    let mut out = CMatrix::zeros(n, n);
    let mut terms = 0;
    let mut tail_total = 0.0;
    let mut weights = WeightCache::new(&cfg.weight);
    for a in 0..n {
        for b in a..n {
            let (sa, sb) = (point.slots[a], point.slots[b]);
            let (xa, xb) = (point.coords[a], point.coords[b]);
            let (value, used, t) = match (sa, sb) {
                (Slot::D, Slot::D) => {
                    let head_n = fixed.unwrap_or(INVERSE_SQUARE_HEAD);
                    let mut head = 0.0;
                    for s in 1..=head_n {
                        head += weights.get(s)? / (s * s) as f64;
                    }
                    inverse_square_total(cfg, "metric g_00")?;
                    let rest = cfg.weight.inverse_square_tail(head_n)?;
                    (Complex64::new(head + rest, 0.0), head_n, 0.0)
                }
                (Slot::D, _) => {
                    // γ_b Σ ω_s conj(ξ_b)^{s-1} / s
                    let x = xb.conj();
                    let mut pw = Complex64::new(1.0, 0.0);
                    let (sum, used, t) = adaptive_sum(
                        |s| {
                            let v = pw * (weights.get(s)? / s as f64);
                            pw *= x;
                            Ok(v)
                        },
                        |m| tail(c, p - 1.0, x.norm(), m, 1),
                        cfg.tolerance,
                        cfg.max_terms,
                        fixed,
                    )?;
                    (sum * sb.gamma(), used, t)
                }
                _ => {
                    // γ_a γ_b Σ ω_s (ξ_a conj(ξ_b))^{s-1}
                    let x = xa * xb.conj();
                    let mut pw = Complex64::new(1.0, 0.0);
                    let (sum, used, t) = adaptive_sum(
                        |s| {
                            let v = pw * weights.get(s)?;
                            pw *= x;
                            Ok(v)
                        },
                        |m| tail(c, p, x.norm(), m, 1),
                        cfg.tolerance,
                        cfg.max_terms,
                        fixed,
                    )?;
                    (sum * (sa.gamma() * sb.gamma()), used, t)
                }
            };
            out[(a, b)] = value;
            out[(b, a)] = value.conj();
            terms = terms.max(used);
            tail_total += if a == b { t } else { 2.0 * t };
        }
    }
    for a in 0..n {
        out[(a, a)].im = 0.0;
    }
    Ok(SeriesValue {
        value: out,
        terms,
        tail_bound: tail_total,
    })
}

/// `φ = log` connection at `point`. Only `Γ_{ii,k̄}` with `ξ_i` a root can be
/// nonzero, because `∂_a ∂_b c_s = 0` unless `a = b` is a root coordinate.
pub(crate) fn log_connection(
    cfg: &GeometryConfig,
    point: &Point,
    fixed: Option<usize>,
) -> Result<SeriesValue<Connection>> {
    let n = point.dim();
    let (c, p) = cfg.weight.majorant();
    let mut out = Connection::zeros(n);
    let mut terms = 0;
    let mut tail_total = 0.0;
    let mut weights = WeightCache::new(&cfg.weight);
    for i in 0..n {
        let si = point.slots[i];
        if si == Slot::D {
            continue;
        }
        let xi = point.coords[i];
        for k in 0..n {
            let sk = point.slots[k];
            let (value, used, t) = if sk == Slot::D {
                // γ_i Σ ω_s (s-1)/s ξ_i^{s-2}
                let mut pw = Complex64::new(1.0, 0.0);
                let (sum, used, t) = adaptive_sum(
                    |s| {
                        if s == 1 {
                            return Ok(Complex64::new(0.0, 0.0));
                        }
                        let v = pw * (weights.get(s)? * (s - 1) as f64 / s as f64);
                        pw *= xi;
                        Ok(v)
                    },
                    |m| tail(c, p, xi.norm(), m.max(1), 2),
                    cfg.tolerance,
                    cfg.max_terms,
                    fixed,
                )?;
                (sum * si.gamma(), used, t)
            } else {
                // γ_i γ_k Σ ω_s (s-1) ξ_i^{s-2} conj(ξ_k)^{s-1}
                let xk = point.coords[k].conj();
                let rho = xi.norm().max(xk.norm());
                let mut pi = Complex64::new(1.0, 0.0);
                let mut pk = xk;
                let (sum, used, t) = adaptive_sum(
                    |s| {
                        if s == 1 {
                            return Ok(Complex64::new(0.0, 0.0));
                        }
                        let v = pi * pk * (weights.get(s)? * (s - 1) as f64);
                        pi *= xi;
                        pk *= xk;
                        Ok(v)
                    },
                    |m| tail(c * rho, p + 1.0, rho * rho, m.max(1), 2),
                    cfg.tolerance,
                    cfg.max_terms,
                    fixed,
                )?;
                (sum * (si.gamma() * sk.gamma()), used, t)
            };
            out.set(i, i, k, value);
            terms = terms.max(used);
            tail_total += t;
        }
    }
    Ok(SeriesValue {
        value: out,
        terms,
        tail_bound: tail_total,
    })
}
