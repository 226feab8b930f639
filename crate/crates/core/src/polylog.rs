//! Polylogarithm `Li_m(z) = Σ_{s≥1} z^s / s^m` for real order `m` on the
//! closed unit disk, and the Riemann zeta function for real `s > 1`.
//!
//! Dispatch:
//! - non-positive integer `m`: rational closed form `P_n(z) / (1 - z)^{n+1}`
//!   built from `Li_0(z) = z/(1-z)` with the recurrence
//!   `Li_{m-1}(z) = z d/dz Li_m(z)`;
//! - `m = 1`: `-log(1 - z)` on the principal branch;
//! - otherwise the defining series, stopped once a geometric majorant of the
//!   tail drops below the requested tolerance.
//!
//! On the boundary `|z| = 1` only `m > 1` is accepted; `z = 1` is routed to
//! [`zeta`].

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-15;
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// Parameters of a single polylogarithm evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolylogRequest {
    pub order: f64,
    pub argument: Complex64,
    /// Absolute bound on the truncated tail.
    pub tolerance: f64,
    pub max_terms: usize,
}

impl PolylogRequest {
    pub fn new(order: f64, argument: Complex64) -> Self {
        Self {
            order,
            argument,
            tolerance: DEFAULT_TOLERANCE,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    pub fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.order.is_finite() {
            return Err(Error::InvalidInput(format!("polylog order {} is not finite", self.order)));
        }
        if !(self.argument.re.is_finite() && self.argument.im.is_finite()) {
            return Err(Error::InvalidInput("polylog argument is not finite".into()));
        }
        check_tolerance(self.tolerance, self.max_terms)?;
        if self.argument.norm() > 1.0 {
            return Err(Error::InvalidInput(format!(
                "polylog argument |z| = {} lies outside the closed unit disk",
                self.argument.norm()
            )));
        }
        Ok(())
    }
}

fn check_tolerance(tolerance: f64, max_terms: usize) -> Result<()> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tolerance}")));
    }
    if max_terms == 0 {
        return Err(Error::InvalidInput("max_terms must be at least 1".into()));
    }
    Ok(())
}

/// Evaluates `Li_m(z)` with absolute error at most `req.tolerance`.
pub fn polylog(req: &PolylogRequest) -> Result<Complex64> {
    req.validate()?;
    let m = req.order;
    let z = req.argument;

    if z.norm() >= 1.0 {
        if m <= 1.0 {
            return Err(Error::DivergentInput(format!(
                "Li_{m}(z) diverges on |z| = 1 for order m <= 1"
            )));
        }
        if z == Complex64::new(1.0, 0.0) {
            return zeta(m, req.tolerance).map(Complex64::from);
        }
        return boundary_series(m, z, req.tolerance, req.max_terms);
    }

    if let Some(n) = non_positive_integer(m) {
        return Ok(negative_integer_order(n, z));
    }
    if m == 1.0 {
        return Ok(-(Complex64::new(1.0, 0.0) - z).ln());
    }
    power_series(m, z, 0, req.tolerance, req.max_terms)
}

/// `Li_m(z)` with default tolerance and term budget.
pub fn li(order: f64, z: Complex64) -> Result<Complex64> {
    polylog(&PolylogRequest::new(order, z))
}

/// `Li_m(z) / z`, with the removable singularity at the origin handled by the
/// shifted series `Σ_{s≥1} z^{s-1} / s^m` (exactly 1 at `z = 0`).
pub fn polylog_ratio(order: f64, z: Complex64, tolerance: f64, max_terms: usize) -> Result<Complex64> {
    let req = PolylogRequest {
        order,
        argument: z,
        tolerance,
        max_terms,
    };
    req.validate()?;
    if z.norm() >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "polylog_ratio requires |z| < 1, got {}",
            z.norm()
        )));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let closed = order == 1.0 || non_positive_integer(order).is_some();
    if closed && z.norm() >= 0.25 {
        return Ok(polylog(&req)? / z);
    }
    power_series(order, z, 1, tolerance, max_terms)
}

/// `Li_m(z) / z` with default tolerance and term budget.
pub fn li_ratio(order: f64, z: Complex64) -> Result<Complex64> {
    polylog_ratio(order, z, DEFAULT_TOLERANCE, DEFAULT_MAX_TERMS)
}

fn non_positive_integer(m: f64) -> Option<u32> {
    (m <= 0.0 && m.fract() == 0.0 && m > -1024.0).then(|| (-m) as u32)
}

/// Numerator coefficients of `Li_{-n}(z) = P_n(z) / (1 - z)^{n+1}`.
///
/// `P_0 = z` and `P_{n+1} = z (P_n' (1 - z) + (n + 1) P_n)`.
fn negative_order_numerator(n: u32) -> Vec<f64> {
    let mut p = vec![0.0, 1.0];
    for k in 0..n {
        let deriv: Vec<f64> = p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect();
        // q = P'(1 - z) + (k + 1) P
        let mut q = vec![0.0; p.len() + 1];
        for (i, c) in deriv.iter().enumerate() {
            q[i] += c;
            q[i + 1] -= c;
        }
        for (i, c) in p.iter().enumerate() {
            q[i] += (k + 1) as f64 * c;
        }
        // multiply by z
        let mut next = vec![0.0; q.len() + 1];
        next[1..].copy_from_slice(&q);
        while next.len() > 2 && *next.last().unwrap() == 0.0 {
            next.pop();
        }
        p = next;
    }
    p
}

fn negative_integer_order(n: u32, z: Complex64) -> Complex64 {
    let num = negative_order_numerator(n)
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    num / (Complex64::new(1.0, 0.0) - z).powi(n as i32 + 1)
}

/// Upper bound on `Σ_{t>s} r^{t-shift} t^{-m}` for `r < 1`.
fn series_tail(m: f64, r: f64, s: usize, shift: i32) -> f64 {
    let next = (s + 1) as f64;
    let ratio = if m >= 0.0 {
        r
    } else {
        r * ((next + 1.0) / next).powf(-m)
    };
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let first = r.powf(next - shift as f64) * next.powf(-m);
    first / (1.0 - ratio)
}

/// `Σ_{s≥1} z^{s-shift} / s^m` for `|z| < 1`.
fn power_series(m: f64, z: Complex64, shift: i32, tolerance: f64, max_terms: usize) -> Result<Complex64> {
    let r = z.norm();
    if r == 0.0 {
        return Ok(if shift == 1 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    }
    let integer_order = m.fract() == 0.0 && m.abs() < 64.0;
    let mut zp = if shift == 1 { Complex64::new(1.0, 0.0) } else { z };
    let mut sum = Complex64::new(0.0, 0.0);
    for s in 1..=max_terms {
        let sf = s as f64;
        let scale = if integer_order { sf.powi(-(m as i32)) } else { sf.powf(-m) };
        sum += zp * scale;
        zp *= z;
        if series_tail(m, r, s, shift) <= tolerance {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergent {
        max_terms,
        tail_bound: series_tail(m, r, max_terms, shift),
    })
}

/// Direct series on `|z| = 1`, `z ≠ 1`, `m > 1`. Partial sums of `z^s` are
/// bounded by `2 / |1 - z|`, so summation by parts bounds the tail by
/// `2 (S+1)^{-m} / |1 - z|`.
fn boundary_series(m: f64, z: Complex64, tolerance: f64, max_terms: usize) -> Result<Complex64> {
    let scale = 2.0 / (Complex64::new(1.0, 0.0) - z).norm();
    let tail = |s: usize| scale * ((s + 1) as f64).powf(-m);
    let mut zp = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for s in 1..=max_terms {
        zp *= z;
        sum += zp * (s as f64).powf(-m);
        if tail(s) <= tolerance {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergent {
        max_terms,
        tail_bound: tail(max_terms),
    })
}

/// Riemann zeta `ζ(s)` for real `s > 1`, computed from the alternating
/// (Dirichlet eta) series `ζ(s) = η(s) / (1 - 2^{1-s})` with Borwein's
/// convergence acceleration.
pub fn zeta(s: f64, tolerance: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::InvalidInput(format!("zeta requires real s > 1, got {s}")));
    }
    check_tolerance(tolerance, 1)?;
    let denom = 1.0 - 2f64.powf(1.0 - s);
    // Borwein: |error(η)| <= 3 / (3 + √8)^n.
    let rate = (3.0 + 8f64.sqrt()).ln();
    let target = (tolerance * denom).max(1e-300);
    let n = (((3.0 / target).ln() / rate).ceil() as usize + 2).clamp(8, 400);
    Ok(eta_borwein(s, n) / denom)
}

/// `Σ_{t>n} t^a` for real `a < -1`.
///
/// Terms below `t = 32` are summed directly; the remainder uses the
/// Euler–Maclaurin formula through the `B_10` correction, which leaves an
/// error far below double precision for the exponents used here.
pub fn power_sum_tail(a: f64, n: usize) -> Result<f64> {
    if !(a < -1.0) {
        return Err(Error::DivergentInput(format!("Σ t^{a} diverges for exponent >= -1")));
    }
    const START: usize = 32;
    const BERNOULLI: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let m = (n + 1).max(START);
    let mut sum: f64 = (n + 1..m).map(|t| (t as f64).powf(a)).sum();
    let mf = m as f64;
    sum += -mf.powf(a + 1.0) / (a + 1.0) + 0.5 * mf.powf(a);
    // falling factorial a (a-1) ... (a-j+1) and (2k)!
    let mut falling = a;
    let mut factorial = 2.0;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let order = 2 * k + 1;
        sum -= b / factorial * falling * mf.powf(a - order as f64);
        falling *= (a - order as f64) * (a - order as f64 - 1.0);
        factorial *= ((order + 2) * (order + 3)) as f64;
    }
    Ok(sum)
}

/// Dirichlet eta via Borwein's algorithm 2 with `n` terms.
fn eta_borwein(s: f64, n: usize) -> f64 {
    let nf = n as f64;
    // d_k = n Σ_{i≤k} (n+i-1)! 4^i / ((n-i)! (2i)!), built from term ratios.
    let mut d = Vec::with_capacity(n + 1);
    let mut term = 1.0;
    let mut acc = 1.0;
    d.push(acc);
    for i in 1..=n {
        let fi = i as f64;
        term *= 4.0 * (nf + fi - 1.0) * (nf - fi + 1.0) / ((2.0 * fi) * (2.0 * fi - 1.0));
        acc += term;
        d.push(acc);
    }
    let dn = d[n];
    let mut sum = 0.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (d[k] - dn) / ((k + 1) as f64).powf(s);
    }
    -sum / dn
}
