//! Weight sequences `ω_s`, weighted Hardy norms and distances of coefficient
//! series, and the reproducing kernels `k_u(v) = Σ ū^s v^s / ω_s`.
//!
//! Families and their weights:
//!
//! | family           | `ω_s`                        | first index |
//! |------------------|------------------------------|-------------|
//! | `hardy`          | `1`                          | 0 |
//! | `sobolev(k)`     | `1 + s² + … + s^{2k}`        | 0 |
//! | `dirichlet`      | `s` (semi-norm)              | 1 |
//! | `dirichlet-norm` | `1 + s`                      | 0 |
//! | `bergman`        | `1 / (1 + s)`                | 0 |
//! | `power(m)`       | `s^m`, plus `ω_0 = 1` if `m = 0` | 0 or 1 |
//! | `custom`         | table, then error or repeat-last | 0 |
//!
//! Sums skip indices below the first index, so the Dirichlet and power
//! families act as semi-norms on the constant term.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fd::{self, FdScheme};
use crate::polylog;

/// Behaviour of a custom weight table past its last entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    Error,
    RepeatLast,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    Hardy,
    Sobolev { order: u32 },
    Dirichlet,
    DirichletNorm,
    Bergman,
    Power { m: f64 },
    Custom { table: Vec<f64>, extension: Extension },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    pub family: WeightFamily,
    pub description: String,
}

impl WeightSequence {
    pub fn hardy() -> Self {
        Self::from_family(WeightFamily::Hardy)
    }

    pub fn sobolev(order: u32) -> Self {
        Self::from_family(WeightFamily::Sobolev { order })
    }

    pub fn dirichlet() -> Self {
        Self::from_family(WeightFamily::Dirichlet)
    }

    pub fn dirichlet_norm() -> Self {
        Self::from_family(WeightFamily::DirichletNorm)
    }

    pub fn bergman() -> Self {
        Self::from_family(WeightFamily::Bergman)
    }

    pub fn power(m: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidInput(format!("power weight exponent must be finite, got {m}")));
        }
        Ok(Self::from_family(WeightFamily::Power { m }))
    }

    pub fn custom(table: Vec<f64>, extension: Extension) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidInput("custom weight table is empty".into()));
        }
        if let Some((i, w)) = table.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidInput(format!("table[{i}] = {w} is not a positive finite weight")));
        }
        Ok(Self::from_family(WeightFamily::Custom { table, extension }))
    }

    fn from_family(family: WeightFamily) -> Self {
        let description = match &family {
            WeightFamily::Hardy => "hardy: w_s = 1".to_string(),
            WeightFamily::Sobolev { order } => format!("sobolev({order}): w_s = 1 + s^2 + ... + s^{}", 2 * order),
            WeightFamily::Dirichlet => "dirichlet: w_s = s".to_string(),
            WeightFamily::DirichletNorm => "dirichlet-norm: w_s = 1 + s".to_string(),
            WeightFamily::Bergman => "bergman: w_s = 1/(1+s)".to_string(),
            WeightFamily::Power { m } => format!("power({m}): w_s = s^{m}"),
            WeightFamily::Custom { table, extension } => {
                let ext = match extension {
                    Extension::Error => "error",
                    Extension::RepeatLast => "repeat-last",
                };
                format!("custom: {} entries, {ext} beyond table", table.len())
            }
        };
        Self { family, description }
    }

    /// Power exponent if this is a `power(m)` weight.
    pub fn power_order(&self) -> Option<f64> {
        match self.family {
            WeightFamily::Power { m } => Some(m),
            WeightFamily::Hardy => Some(0.0),
            _ => None,
        }
    }

    /// Smallest index carrying a weight.
    pub fn first_index(&self) -> usize {
        match self.family {
            WeightFamily::Dirichlet => 1,
            WeightFamily::Power { m } if m != 0.0 => 1,
            _ => 0,
        }
    }

    /// `ω_s`; indices outside the family's domain are an error.
    pub fn eval(&self, s: usize) -> Result<f64> {
        if s < self.first_index() {
            return Err(Error::InvalidIndex {
                index: s,
                weight: self.description.clone(),
            });
        }
        let sf = s as f64;
        Ok(match &self.family {
            WeightFamily::Hardy => 1.0,
            WeightFamily::Sobolev { order } => {
                let s2 = sf * sf;
                let mut term = 1.0;
                let mut total = 1.0;
                for _ in 0..*order {
                    term *= s2;
                    total += term;
                }
                total
            }
            WeightFamily::Dirichlet => sf,
            WeightFamily::DirichletNorm => 1.0 + sf,
            WeightFamily::Bergman => 1.0 / (1.0 + sf),
            WeightFamily::Power { m } => {
                if *m == 0.0 {
                    1.0
                } else if m.fract() == 0.0 && m.abs() < 64.0 {
                    sf.powi(*m as i32)
                } else {
                    sf.powf(*m)
                }
            }
            WeightFamily::Custom { table, extension } => match table.get(s) {
                Some(w) => *w,
                None => match extension {
                    Extension::RepeatLast => *table.last().expect("non-empty table"),
                    Extension::Error => {
                        return Err(Error::IncompatibleWeight(format!(
                            "index {s} lies beyond the {}-entry custom weight table",
                            table.len()
                        )))
                    }
                },
            },
        })
    }

    /// `ω_s`, or zero for indices below [`first_index`](Self::first_index).
    pub fn eval_or_zero(&self, s: usize) -> Result<f64> {
        if s < self.first_index() {
            Ok(0.0)
        } else {
            self.eval(s)
        }
    }

    /// Weights `ω_0..=ω_n` with zeros below the first index.
    pub fn table(&self, n: usize) -> Result<Vec<f64>> {
        (0..=n).map(|s| self.eval_or_zero(s)).collect()
    }

    /// `(C, p)` with `ω_t ≤ C t^p` for all `t ≥ 1`.
    pub fn majorant(&self) -> (f64, f64) {
        match &self.family {
            WeightFamily::Hardy => (1.0, 0.0),
            WeightFamily::Sobolev { order } => ((order + 1) as f64, 2.0 * *order as f64),
            WeightFamily::Dirichlet => (1.0, 1.0),
            WeightFamily::DirichletNorm => (2.0, 1.0),
            WeightFamily::Bergman => (1.0, -1.0),
            WeightFamily::Power { m } => (1.0, *m),
            WeightFamily::Custom { table, .. } => (table.iter().cloned().fold(0.0, f64::max), 0.0),
        }
    }

    /// `Σ_{t>n} ω_t / t²` when finite, used for the `d`–`d` entries of the
    /// geometry. The remainder past `n` is evaluated, not just bounded.
    pub fn inverse_square_tail(&self, n: usize) -> Result<f64> {
        let t2 = polylog::power_sum_tail(-2.0, n)?;
        match &self.family {
            WeightFamily::Hardy | WeightFamily::Sobolev { order: 0 } => Ok(t2),
            WeightFamily::Power { m } if *m < 1.0 => polylog::power_sum_tail(m - 2.0, n),
            WeightFamily::Bergman => Ok(t2 - 1.0 / (n + 1) as f64),
            WeightFamily::Custom {
                table,
                extension: Extension::RepeatLast,
            } => {
                let last = *table.last().expect("non-empty table");
                let explicit: f64 = (n + 1..table.len()).map(|t| (table[t] - last) / (t * t) as f64).sum();
                Ok(explicit + last * t2)
            }
            WeightFamily::Custom {
                extension: Extension::Error,
                ..
            } => Err(Error::IncompatibleWeight(
                "an infinite weighted sum needs weights beyond a custom table with extension 'error'".into(),
            )),
            _ => Err(Error::Divergent(format!("Σ w_s / s^2 diverges for weight {}", self.description))),
        }
    }

    /// Parses `{"family": …, "m": …, "table": […], "extension": …}`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidInput("weight: expected a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "family" | "m" | "table" | "extension" | "description") {
                return Err(Error::InvalidInput(format!("weight.{key}: unknown field")));
            }
        }
        let family = obj
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidInput("weight.family: missing or not a string".into()))?;
        let m = match obj.get("m") {
            None => None,
            Some(v) => Some(
                v.as_f64()
                    .ok_or_else(|| Error::InvalidInput("weight.m: expected a number".into()))?,
            ),
        };
        let need_m = || m.ok_or_else(|| Error::InvalidInput(format!("weight.m: required for family '{family}'")));
        let mut w = match family {
            "hardy" => Self::hardy(),
            "dirichlet" => Self::dirichlet(),
            "dirichlet-norm" => Self::dirichlet_norm(),
            "bergman" => Self::bergman(),
            "sobolev" => {
                let k = need_m()?;
                if !(k >= 0.0 && k.fract() == 0.0 && k <= 32.0) {
                    return Err(Error::InvalidInput(format!(
                        "weight.m: sobolev order must be a non-negative integer, got {k}"
                    )));
                }
                Self::sobolev(k as u32)
            }
            "power" => Self::power(need_m()?).map_err(|e| Error::InvalidInput(format!("weight.m: {e}")))?,
            "custom" => {
                let table = obj
                    .get("table")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidInput("weight.table: required array for family 'custom'".into()))?
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.as_f64()
                            .ok_or_else(|| Error::InvalidInput(format!("weight.table[{i}]: expected a number")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let extension = match obj.get("extension").map(|v| v.as_str()) {
                    None => Extension::Error,
                    Some(Some("error")) => Extension::Error,
                    Some(Some("repeat-last")) => Extension::RepeatLast,
                    Some(_) => {
                        return Err(Error::InvalidInput(
                            "weight.extension: expected \"error\" or \"repeat-last\"".into(),
                        ))
                    }
                };
                Self::custom(table, extension).map_err(|e| Error::InvalidInput(format!("weight.{e}")))?
            }
            other => return Err(Error::InvalidInput(format!("weight.family: unknown family '{other}'"))),
        };
        if let Some(d) = obj.get("description").and_then(Value::as_str) {
            w.description = d.to_string();
        }
        Ok(w)
    }

    pub fn to_json(&self) -> Value {
        match &self.family {
            WeightFamily::Hardy => json!({"family": "hardy"}),
            WeightFamily::Sobolev { order } => json!({"family": "sobolev", "m": order}),
            WeightFamily::Dirichlet => json!({"family": "dirichlet"}),
            WeightFamily::DirichletNorm => json!({"family": "dirichlet-norm"}),
            WeightFamily::Bergman => json!({"family": "bergman"}),
            WeightFamily::Power { m } => json!({"family": "power", "m": m}),
            WeightFamily::Custom { table, extension } => json!({
                "family": "custom",
                "table": table,
                "extension": match extension { Extension::Error => "error", Extension::RepeatLast => "repeat-last" },
            }),
        }
    }
}

/// Upper bound on `C Σ_{t>n} t^p r^t` for `0 ≤ r < 1`.
pub fn geometric_tail(c: f64, p: f64, r: f64, n: usize) -> f64 {
    if r == 0.0 || c == 0.0 {
        return 0.0;
    }
    let next = (n + 1) as f64;
    let ratio = r * ((next + 1.0) / next).powf(p.max(0.0));
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    c * next.powf(p) * r.powf(next) / (1.0 - ratio)
}

/// What a series of coefficients represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Transfer,
    ComplexCepstrum,
    PowerCepstrum,
    Generic,
}

impl SeriesKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesKind::Transfer => "transfer",
            SeriesKind::ComplexCepstrum => "complex-cepstrum",
            SeriesKind::PowerCepstrum => "power-cepstrum",
            SeriesKind::Generic => "generic",
        }
    }
}

/// Decay certificate `|f_s| ≤ (harmonic + amplitude·ρ^s) / s` for `s ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub harmonic: f64,
    pub amplitude: f64,
    pub rho: f64,
}

/// Coefficients `f_0..=f_N` of a one-sided series.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    pub coeffs: Vec<Complex64>,
    pub kind: SeriesKind,
    pub envelope: Option<Envelope>,
}

impl CoefficientSeries {
    pub fn new(coeffs: Vec<Complex64>, kind: SeriesKind) -> Self {
        Self {
            coeffs,
            kind,
            envelope: None,
        }
    }

    pub fn generic(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs, SeriesKind::Generic)
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Self {
        self.envelope = Some(envelope);
        self
    }

    /// Truncation index `N`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Bound on `Σ_{s>N} ω_s |f_s|²`, when a decay certificate is attached.
    pub fn tail_bound(&self, w: &WeightSequence) -> Option<f64> {
        let env = self.envelope?;
        let n = self.truncation();
        let (c, p) = w.majorant();
        // |f|² ≤ 2 h² / s² + 2 a² ρ^{2s} / s²
        let mut total = 0.0;
        if env.harmonic != 0.0 {
            total += 2.0 * env.harmonic.powi(2) * c * polylog::power_sum_tail(p - 2.0, n).ok()?;
        }
        if env.amplitude != 0.0 {
            total += 2.0 * env.amplitude.powi(2) * geometric_tail(c, p - 2.0, env.rho * env.rho, n);
        }
        Some(total)
    }
}

/// A weighted norm or distance with its truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    /// Bound on the omitted part of the squared norm, if known.
    pub tail_bound: Option<f64>,
    pub terms: usize,
}

fn weighted_square(coeffs: &[Complex64], w: &WeightSequence) -> Result<f64> {
    let mut total = 0.0;
    for (s, f) in coeffs.iter().enumerate() {
        if s < w.first_index() {
            continue;
        }
        let omega = w.eval(s)?;
        total += omega * f.norm_sqr();
    }
    Ok(total)
}

/// `‖f‖_ω = (Σ_{s≤N} ω_s |f_s|²)^{1/2}`.
pub fn weighted_norm(f: &CoefficientSeries, w: &WeightSequence) -> Result<NormValue> {
    Ok(NormValue {
        value: weighted_square(&f.coeffs, w)?.sqrt(),
        tail_bound: f.tail_bound(w),
        terms: f.coeffs.len(),
    })
}

/// `‖f - g‖_ω`, zero-padding the shorter series.
pub fn weighted_distance(f: &CoefficientSeries, g: &CoefficientSeries, w: &WeightSequence) -> Result<NormValue> {
    let diff = coefficient_difference(f, g);
    let tail_bound = match (f.tail_bound(w), g.tail_bound(w)) {
        (Some(a), Some(b)) => Some((a.sqrt() + b.sqrt()).powi(2)),
        _ => None,
    };
    Ok(NormValue {
        value: weighted_square(&diff, w)?.sqrt(),
        tail_bound,
        terms: diff.len(),
    })
}

/// Per-index contributions `ω_s |f_s - g_s|²` to the squared distance.
pub fn distance_contributions(f: &CoefficientSeries, g: &CoefficientSeries, w: &WeightSequence) -> Result<Vec<f64>> {
    coefficient_difference(f, g)
        .iter()
        .enumerate()
        .map(|(s, d)| Ok(w.eval_or_zero(s)? * d.norm_sqr()))
        .collect()
}

fn coefficient_difference(f: &CoefficientSeries, g: &CoefficientSeries) -> Vec<Complex64> {
    let len = f.coeffs.len().max(g.coeffs.len());
    let zero = Complex64::new(0.0, 0.0);
    (0..len)
        .map(|s| f.coeffs.get(s).copied().unwrap_or(zero) - g.coeffs.get(s).copied().unwrap_or(zero))
        .collect()
}

fn check_disk(name: &str, z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::InvalidInput(format!("{name} must lie in the open unit disk, |{name}| = {}", z.norm())));
    }
    Ok(())
}

/// Reproducing kernel `k_u(v) = Σ_s ū^s v^s / ω_s`.
///
/// Closed forms with `x = ū v`: Szegő `1/(1-x)`, Bergman `1/(1-x)²`,
/// Dirichlet semi-norm `-log(1-x)`, Dirichlet norm `(1/x) log(1/(1-x))`,
/// power `Li_m(x)` (plus 1 when `m = 0`). Other families are summed directly.
pub fn reproducing_kernel(w: &WeightSequence, u: Complex64, v: Complex64, tolerance: f64) -> Result<Complex64> {
    check_disk("u", u)?;
    check_disk("v", v)?;
    let x = u.conj() * v;
    let one = Complex64::new(1.0, 0.0);
    let max_terms = polylog::DEFAULT_MAX_TERMS;
    match &w.family {
        WeightFamily::Hardy => Ok(one / (one - x)),
        WeightFamily::Bergman => Ok(one / ((one - x) * (one - x))),
        WeightFamily::Dirichlet => polylog::polylog(&polylog::PolylogRequest::new(1.0, x).tolerance(tolerance)),
        WeightFamily::DirichletNorm => polylog::polylog_ratio(1.0, x, tolerance, max_terms),
        WeightFamily::Power { m } => {
            let li = polylog::polylog(&polylog::PolylogRequest::new(*m, x).tolerance(tolerance))?;
            Ok(if *m == 0.0 { li + one } else { li })
        }
        WeightFamily::Sobolev { .. } | WeightFamily::Custom { .. } => kernel_adaptive(w, x, tolerance, max_terms),
    }
}

fn kernel_adaptive(w: &WeightSequence, x: Complex64, tolerance: f64, max_terms: usize) -> Result<Complex64> {
    let r = x.norm();
    let inv_min = match &w.family {
        WeightFamily::Custom { table, .. } => 1.0 / table.iter().cloned().fold(f64::INFINITY, f64::min),
        _ => 1.0,
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut xp = Complex64::new(1.0, 0.0);
    for s in 0..max_terms {
        let omega = match w.eval(s) {
            Ok(o) => o,
            // The space has no coordinates past a custom table with extension 'error'.
            Err(Error::IncompatibleWeight(_)) => return Ok(sum),
            Err(e) => return Err(e),
        };
        sum += xp / omega;
        xp *= x;
        let tail = inv_min * r.powi(s as i32 + 1) / (1.0 - r);
        if tail <= tolerance {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergent {
        max_terms,
        tail_bound: inv_min * r.powi(max_terms as i32) / (1.0 - r),
    })
}

/// Plain partial sum `Σ_{s<terms} ū^s v^s / ω_s`, the series oracle for
/// [`reproducing_kernel`].
pub fn kernel_series(w: &WeightSequence, u: Complex64, v: Complex64, terms: usize) -> Result<Complex64> {
    let x = u.conj() * v;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut xp = Complex64::new(1.0, 0.0);
    for s in 0..terms {
        if s >= w.first_index() {
            sum += xp / w.eval(s)?;
        }
        xp *= x;
    }
    Ok(sum)
}

/// Analytic Bergman metric `2 / (1 - ū v)²`.
pub fn bergman_metric(u: Complex64, v: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let t = one - u.conj() * v;
    2.0 / (t * t)
}

/// `∂_v ∂_ū log k_u(v)` of the Bergman kernel by central Wirtinger
/// differences with the given step; should equal [`bergman_metric`].
pub fn bergman_metric_check(u: Complex64, v: Complex64, step: f64) -> Result<Complex64> {
    if !(u.norm() < 0.95 && v.norm() < 0.95) {
        return Err(Error::InvalidInput("bergman_metric_check needs |u|, |v| < 0.95".into()));
    }
    let scheme = FdScheme::new(step, 4)?;
    let margin = 0.95 - u.norm().max(v.norm());
    if scheme.reach(1) >= margin + 0.05 {
        return Err(Error::StepTooLarge { reach: scheme.reach(1) });
    }
    let bergman = WeightSequence::bergman();
    let log_kernel = |x: &[f64]| -> Complex64 {
        let u = Complex64::new(x[0], x[1]);
        let v = Complex64::new(x[2], x[3]);
        match reproducing_kernel(&bergman, u, v, 1e-15) {
            Ok(k) => k.ln(),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let x = [u.re, u.im, v.re, v.im];
    Ok(fd::wirtinger_second_complex(&log_kernel, &x, (1, false), (0, true), &scheme))
}
