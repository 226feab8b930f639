//! ARMA/ARFIMA filters, their impulse responses and cepstra.
//!
//! The transfer function is
//! `h(z) = σ²/2π · Π(1 - μ_j z⁻¹) / Π(1 - λ_i z⁻¹) · (1 - z⁻¹)^d`
//! with all poles `λ_i` and zeros `μ_j` strictly inside the unit disk.
//!
//! Cepstrum convention. Expanding `log(1 - ξ z⁻¹) = -Σ_s ξ^s z^{-s} / s` gives
//! for `s ≥ 1`
//!
//! ```text
//! c_s = -(d + Σ_i γ_i ξ_i^s) / s,    γ = -1 for poles, +1 for zeros,
//! ```
//!
//! i.e. `c_s = (Σ λ^s - Σ μ^s - d) / s`, so an AR(1) pole at 0.5 has
//! `c_1 = +0.5`. This is the sign reproduced by the contour integral
//! [`cepstrum_contour_oracle`]. Quadratic quantities built from the cepstrum
//! (norms, metrics) do not depend on this overall sign.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::weighted_hardy::{CoefficientSeries, Envelope, SeriesKind};

/// An ARFIMA(p, d, q) filter.
#[derive(Debug, Clone, PartialEq)]
pub struct ArfimaModel {
    pub sigma: f64,
    pub d: f64,
    pub poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
}

impl ArfimaModel {
    pub fn new(sigma: f64, d: f64, poles: Vec<Complex64>, zeros: Vec<Complex64>) -> Result<Self> {
        let model = Self { sigma, d, poles, zeros };
        model.validate()?;
        Ok(model)
    }

    /// Unit-gain model (`σ² = 2π`).
    pub fn unit_gain(d: f64, poles: Vec<Complex64>, zeros: Vec<Complex64>) -> Result<Self> {
        Self::new((2.0 * PI).sqrt(), d, poles, zeros)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma: must be positive and finite, got {}", self.sigma)));
        }
        if !self.d.is_finite() {
            return Err(Error::InvalidInput(format!("d: must be finite, got {}", self.d)));
        }
        for (name, roots) in [("poles", &self.poles), ("zeros", &self.zeros)] {
            for (i, r) in roots.iter().enumerate() {
                if !(r.re.is_finite() && r.im.is_finite()) {
                    return Err(Error::InvalidInput(format!("{name}[{i}]: not finite")));
                }
                if !(r.norm() < 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "{name}[{i}]: modulus {} is not inside the unit disk",
                        r.norm()
                    )));
                }
            }
        }
        Ok(())
    }

    /// `σ² / 2π`.
    pub fn gain(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * PI)
    }

    /// Largest pole or zero modulus (0 for a pure gain).
    pub fn max_modulus(&self) -> f64 {
        self.poles.iter().chain(&self.zeros).map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub fn params(&self) -> FilterParams {
        FilterParams {
            gain: self.gain(),
            d: Complex64::new(self.d, 0.0),
            poles: self.poles.clone(),
            zeros: self.zeros.clone(),
        }
    }

    /// Parses `{"sigma": …, "d": …, "poles": [[re, im], …], "zeros": […]}`;
    /// `sigma` is required, the rest default to zero/empty.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidInput("model: expected a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "sigma" | "d" | "poles" | "zeros") {
                return Err(Error::InvalidInput(format!("{key}: unknown field")));
            }
        }
        let sigma = obj
            .get("sigma")
            .ok_or_else(|| Error::InvalidInput("sigma: required field is missing".into()))?
            .as_f64()
            .ok_or_else(|| Error::InvalidInput("sigma: expected a number".into()))?;
        let d = match obj.get("d") {
            None => 0.0,
            Some(v) => v.as_f64().ok_or_else(|| Error::InvalidInput("d: expected a number".into()))?,
        };
        let roots = |name: &str| -> Result<Vec<Complex64>> {
            let Some(v) = obj.get(name) else {
                return Ok(Vec::new());
            };
            let arr = v
                .as_array()
                .ok_or_else(|| Error::InvalidInput(format!("{name}: expected an array of [re, im] pairs")))?;
            arr.iter()
                .enumerate()
                .map(|(i, p)| {
                    let pair = p.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                        Error::InvalidInput(format!("{name}[{i}]: expected a [re, im] pair"))
                    })?;
                    let re = pair[0].as_f64();
                    let im = pair[1].as_f64();
                    match (re, im) {
                        (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                        _ => Err(Error::InvalidInput(format!("{name}[{i}]: components must be numbers"))),
                    }
                })
                .collect()
        };
        Self::new(sigma, d, roots("poles")?, roots("zeros")?)
    }

    pub fn to_json(&self) -> Value {
        let pairs = |v: &[Complex64]| v.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>();
        json!({
            "sigma": self.sigma,
            "d": self.d,
            "poles": pairs(&self.poles),
            "zeros": pairs(&self.zeros),
        })
    }
}

/// Filter parameters with a complex fractional order, as needed when the
/// geometry differentiates along complex directions of `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterParams {
    pub gain: f64,
    pub d: Complex64,
    pub poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
}

impl FilterParams {
    fn log_transfer(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let zi = one / z;
        let mut acc = Complex64::new(self.gain.ln(), 0.0);
        for mu in &self.zeros {
            acc += (one - mu * zi).ln();
        }
        for lambda in &self.poles {
            acc -= (one - lambda * zi).ln();
        }
        if self.d != Complex64::new(0.0, 0.0) {
            acc += self.d * (one - zi).ln();
        }
        acc
    }
}

/// Which coordinates the geometry uses, in order `[d?, λ_1..λ_p, μ_1..μ_q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateChart {
    pub include_d: bool,
    pub labels: Vec<String>,
}

impl CoordinateChart {
    pub fn new(model: &ArfimaModel, include_d: bool) -> Self {
        let mut labels = Vec::new();
        if include_d {
            labels.push("d".to_string());
        }
        labels.extend((1..=model.poles.len()).map(|i| format!("lambda_{i}")));
        labels.extend((1..=model.zeros.len()).map(|j| format!("mu_{j}")));
        Self { include_d, labels }
    }

    /// Chart including `d` exactly when the model has `d ≠ 0`.
    pub fn default_for(model: &ArfimaModel) -> Self {
        Self::new(model, model.d != 0.0)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Value of `c_0`: `1` on the constant-gain submanifold, or `log(σ²/2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum C0Convention {
    #[default]
    One,
    LogGain,
}

impl C0Convention {
    pub fn value(&self, model: &ArfimaModel) -> f64 {
        match self {
            C0Convention::One => 1.0,
            C0Convention::LogGain => model.gain().ln(),
        }
    }
}

/// `h(z)` on the principal branch of `(1 - z⁻¹)^d`.
pub fn transfer_eval(model: &ArfimaModel, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) || !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidInput(format!("transfer function needs a finite z ≠ 0, got {z}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let zi = one / z;
    if let Some(i) = model.poles.iter().position(|l| *l == z) {
        return Err(Error::PoleHit(format!("z = {z} equals poles[{i}]")));
    }
    let mut h = Complex64::new(model.gain(), 0.0);
    for mu in &model.zeros {
        h *= one - mu * zi;
    }
    for lambda in &model.poles {
        h /= one - lambda * zi;
    }
    if model.d != 0.0 {
        let base = one - zi;
        if model.d.fract() == 0.0 && model.d.abs() < 1024.0 {
            if base == Complex64::new(0.0, 0.0) && model.d < 0.0 {
                return Err(Error::PoleHit(format!("z = 1 is a pole of (1 - 1/z)^{}", model.d)));
            }
            h *= base.powi(model.d as i32);
        } else {
            if base == Complex64::new(0.0, 0.0) {
                return Err(Error::BranchPoint(model.d));
            }
            h *= (model.d * base.ln()).exp();
        }
    }
    Ok(h)
}

/// Impulse response `h_0..=h_N` of the model.
pub fn impulse_response(model: &ArfimaModel, n: usize) -> CoefficientSeries {
    CoefficientSeries::new(impulse_response_params(&model.params(), n), SeriesKind::Transfer)
}

/// Power-series coefficients of `Π (1 - r x)` in `x`.
fn root_polynomial(roots: &[Complex64]) -> Vec<Complex64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        poly.push(Complex64::new(0.0, 0.0));
        for k in (1..poly.len()).rev() {
            let prev = poly[k - 1];
            poly[k] -= r * prev;
        }
    }
    poly
}

pub fn impulse_response_params(params: &FilterParams, n: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let num = root_polynomial(&params.zeros);
    let den = root_polynomial(&params.poles);
    let mut arma = vec![zero; n + 1];
    for s in 0..=n {
        let mut v = num.get(s).copied().unwrap_or(zero);
        for k in 1..den.len().min(s + 1) {
            v -= den[k] * arma[s - k];
        }
        arma[s] = v;
    }
    // (1 - x)^d = Σ b_s x^s, b_s = b_{s-1} (s - 1 - d) / s
    let mut binom = vec![zero; n + 1];
    binom[0] = Complex64::new(1.0, 0.0);
    for s in 1..=n {
        binom[s] = binom[s - 1] * (Complex64::new(s as f64 - 1.0, 0.0) - params.d) / s as f64;
    }
    (0..=n)
        .map(|s| (0..=s).map(|k| arma[k] * binom[s - k]).sum::<Complex64>() * params.gain)
        .collect()
}

/// Analytic complex cepstrum `c_0..=c_N`.
///
/// Bitwise-equal pole/zero pairs are cancelled before summation, so such a
/// model has exactly the cepstrum of the reduced model.
pub fn complex_cepstrum(model: &ArfimaModel, n: usize, c0: C0Convention) -> CoefficientSeries {
    let mut coeffs = complex_cepstrum_params(&model.params(), n);
    coeffs[0] = Complex64::new(c0.value(model), 0.0);
    let (poles, zeros) = cancel_common_roots(&model.poles, &model.zeros);
    CoefficientSeries::new(coeffs, SeriesKind::ComplexCepstrum).with_envelope(Envelope {
        harmonic: model.d.abs(),
        amplitude: (poles.len() + zeros.len()) as f64,
        rho: model.max_modulus(),
    })
}

fn cancel_common_roots(poles: &[Complex64], zeros: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut poles = poles.to_vec();
    let mut zeros_left = Vec::with_capacity(zeros.len());
    for z in zeros {
        if let Some(i) = poles.iter().position(|p| p == z) {
            poles.remove(i);
        } else {
            zeros_left.push(*z);
        }
    }
    (poles, zeros_left)
}

/// `c_s` for `s ≥ 1` (and `c_0 = log gain`) with complex `d`.
pub fn complex_cepstrum_params(params: &FilterParams, n: usize) -> Vec<Complex64> {
    let (poles, zeros) = cancel_common_roots(&params.poles, &params.zeros);
    let mut pole_pow = poles.clone();
    let mut zero_pow = zeros.clone();
    let mut out = Vec::with_capacity(n + 1);
    out.push(Complex64::new(params.gain.ln(), 0.0));
    for s in 1..=n {
        let mut acc = Complex64::new(0.0, 0.0) - params.d;
        for (p, base) in pole_pow.iter_mut().zip(&poles) {
            acc += *p;
            *p *= base;
        }
        for (z, base) in zero_pow.iter_mut().zip(&zeros) {
            acc -= *z;
            *z *= base;
        }
        out.push(acc / s as f64);
    }
    out
}

/// Settings of the contour-integral oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions {
    /// Coarsest grid; must be a power of two and at least `4N`.
    pub grid_size: usize,
    /// Number of grid doublings combined by Richardson extrapolation.
    pub levels: usize,
    /// Largest accepted change between the last two extrapolation orders.
    pub tolerance: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            grid_size: 1024,
            levels: 4,
            tolerance: 1e-6,
        }
    }
}

impl ContourOptions {
    pub fn with_grid(grid_size: usize) -> Self {
        Self {
            grid_size,
            ..Self::default()
        }
    }

    /// Smallest valid default-style options for truncation `n`.
    pub fn for_truncation(n: usize) -> Self {
        Self::with_grid(Self::default().grid_size.max((4 * n).next_power_of_two()))
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !self.grid_size.is_power_of_two() || self.grid_size < 4 || self.grid_size < 4 * n {
            return Err(Error::InvalidInput(format!(
                "grid_size {} must be a power of two >= max(4, 4N) with N = {n}",
                self.grid_size
            )));
        }
        if self.levels < 2 {
            return Err(Error::InvalidInput("contour oracle needs at least 2 grid levels".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("contour tolerance must be positive".into()));
        }
        Ok(())
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// `(1/M) Σ_k L(θ_k) e^{i s θ_k}` for `s = 0..=n` on the half-bin offset grid
/// `θ_k = 2π (k + ½) / M`, which never samples `z = 1`.
fn offset_grid_coefficients(sample: &dyn Fn(Complex64) -> Complex64, m: usize, n: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = (0..m)
        .map(|k| {
            let theta = 2.0 * PI * (k as f64 + 0.5) / m as f64;
            sample(Complex64::from_polar(1.0, theta))
        })
        .collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m).process(&mut buf));
    (0..=n)
        .map(|s| buf[s] * Complex64::from_polar(1.0 / m as f64, PI * s as f64 / m as f64))
        .collect()
}

/// Trapezoid sums on `levels` doubling grids combined by Richardson
/// extrapolation in powers of `1/M`.
fn extrapolated_coefficients(
    sample: &dyn Fn(Complex64) -> Complex64,
    n: usize,
    opts: &ContourOptions,
) -> Result<Vec<Complex64>> {
    opts.validate(n)?;
    let mut table: Vec<Vec<Vec<Complex64>>> = vec![(0..opts.levels)
        .map(|l| offset_grid_coefficients(sample, opts.grid_size << l, n))
        .collect()];
    for j in 1..opts.levels {
        let f = (1u64 << j) as f64;
        let prev = &table[j - 1];
        let next: Vec<Vec<Complex64>> = (0..prev.len() - 1)
            .map(|l| {
                prev[l + 1]
                    .iter()
                    .zip(&prev[l])
                    .map(|(fine, coarse)| (fine * f - coarse) / (f - 1.0))
                    .collect()
            })
            .collect();
        table.push(next);
    }
    let best = &table[opts.levels - 1][0];
    let runner_up = &table[opts.levels - 2][1];
    let change = best
        .iter()
        .zip(runner_up)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if !(change <= opts.tolerance) {
        return Err(Error::GridTooCoarse {
            change,
            tolerance: opts.tolerance,
        });
    }
    Ok(best.clone())
}

/// Cepstrum from the contour integral `c_s = (1/2πi) ∮ log h(z) z^s dz/z`,
/// evaluated numerically. `c_0` is `log(σ²/2π)`.
pub fn cepstrum_contour_oracle(model: &ArfimaModel, n: usize, opts: &ContourOptions) -> Result<CoefficientSeries> {
    let params = model.params();
    let coeffs = extrapolated_coefficients(&|z| params.log_transfer(z), n, opts)?;
    Ok(CoefficientSeries::new(coeffs, SeriesKind::ComplexCepstrum))
}

/// Fourier coefficients `p_0..=p_N` of `log |h(e^{iθ})|²`.
pub fn power_cepstrum(model: &ArfimaModel, n: usize, opts: &ContourOptions) -> Result<CoefficientSeries> {
    Ok(CoefficientSeries::new(power_cepstrum_params(&model.params(), n, opts)?, SeriesKind::PowerCepstrum))
}

/// Power cepstrum of `2 Re log h` on the circle. For complex `d` the
/// coefficients with `s ≥ 1` remain holomorphic in the parameters.
pub fn power_cepstrum_params(params: &FilterParams, n: usize, opts: &ContourOptions) -> Result<Vec<Complex64>> {
    extrapolated_coefficients(&|z| Complex64::new(2.0 * params.log_transfer(z).re, 0.0), n, opts)
}
