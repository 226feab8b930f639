//! Kähler geometry of filter manifolds: potential `K = ‖φ∘h‖²_ω`, metric
//! `g_{ij̄} = ∂_i ∂_j̄ K`, connection `Γ_{ij,k̄} = ∂_i ∂_j ∂_k̄ K` and Ricci
//! curvature `R_{ij̄} = -∂_i ∂_j̄ log det g`.
//!
//! Three independent routes are provided and cross-checked by the test
//! suites:
//!
//! - truncated series over the coefficients `f_s` with certified tails
//!   ([`potential_series`], [`metric_series`], [`connection_series`]);
//! - polylogarithm closed forms for `φ = log` and `ω_s = s^m`
//!   ([`potential_closed`], [`metric_closed`], [`connection_closed`]);
//! - Wirtinger finite differences of the potential ([`metric_fd_oracle`],
//!   [`connection_fd_oracle`]).
//!
//! Sign conventions for `φ = log`, with `γ = -1` for poles and `+1` for zeros:
//!
//! ```text
//! g_{00}  = Σ ω_s / s²                     = ζ(2-m)
//! g_{0j̄}  = γ_j Σ ω_s ξ̄_j^{s-1} / s        = γ_j Li_{1-m}(ξ̄_j) / ξ̄_j
//! g_{ij̄}  = γ_i γ_j Σ ω_s (ξ_i ξ̄_j)^{s-1}  = γ_i γ_j Li_{-m}(x) / x,  x = ξ_i ξ̄_j
//! Γ_{ii,0̄} = γ_i Σ ω_s (s-1)/s ξ_i^{s-2}   = γ_i (Li_{-m}(ξ_i) - Li_{1-m}(ξ_i)) / ξ_i²
//! Γ_{ii,k̄} = γ_i γ_k ξ̄_k (Li_{-m-1}(x) - Li_{-m}(x)) / x²,  x = ξ_i ξ̄_k
//! ```
//!
//! and every other connection component vanishes. Coordinate `0` is the
//! fractional order `d` when the chart includes it.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::filter_models::{ArfimaModel, C0Convention, ContourOptions, CoordinateChart, FilterParams};
use crate::par::Execution;
use crate::weighted_hardy::WeightSequence;

mod closed;
mod curvature;
mod generic;
mod guard;
mod oracle;
mod report;
mod series;

pub use closed::{connection_closed, metric_closed, potential_closed};
pub use curvature::{laplace_beltrami, ricci_fd};
pub use guard::{divergence_guard, GuardVerdict};
pub use oracle::{check_kahler, connection_fd_oracle, hessian_fd, holomorphic_block_fd, metric_fd_oracle, KahlerResiduals, WirtingerHessian};
pub use report::{build_report, GeometryReport, ReportOptions};
pub use series::{connection_series, metric_series, potential_series};

pub type CMatrix = DMatrix<Complex64>;

/// Truncation used by the coefficient-level routes of `φ = identity` and
/// `φ = log|·|²` when none is configured.
pub const DEFAULT_GENERIC_TRUNCATION: usize = 128;

/// The transformation `φ` applied to the transfer function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transform {
    /// `f_s = h_s`, the impulse response.
    Identity,
    /// `f_s = c_s`, the complex cepstrum.
    #[default]
    Log,
    /// `f_s = p_s`, the power cepstrum of `log |h|²`.
    LogSquaredModulus,
}

impl Transform {
    pub fn as_str(&self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Log => "log",
            Transform::LogSquaredModulus => "log-squared-modulus",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "identity" => Some(Transform::Identity),
            "log" => Some(Transform::Log),
            "log-squared-modulus" => Some(Transform::LogSquaredModulus),
            _ => None,
        }
    }
}

/// One evaluation point of the geometry together with its numerical policy.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub model: ArfimaModel,
    pub chart: CoordinateChart,
    pub weight: WeightSequence,
    pub transform: Transform,
    /// Fixed truncation `N`. When `None`, the `φ = log` series grow `N`
    /// until the tail bound meets `tolerance`, and the other transforms use
    /// [`DEFAULT_GENERIC_TRUNCATION`].
    pub truncation: Option<usize>,
    /// Absolute tail tolerance of the adaptive series.
    pub tolerance: f64,
    pub max_terms: usize,
    pub fd_step: f64,
    pub c0: C0Convention,
    /// Contour grid for the power cepstrum; `None` picks a default for `N`.
    pub contour: Option<ContourOptions>,
    pub execution: Execution,
}

impl GeometryConfig {
    /// `φ = log` geometry with the default chart (includes `d` iff `d ≠ 0`).
    pub fn new(model: ArfimaModel, weight: WeightSequence) -> Self {
        let chart = CoordinateChart::default_for(&model);
        Self {
            model,
            chart,
            weight,
            transform: Transform::Log,
            truncation: None,
            tolerance: 1e-13,
            max_terms: 1 << 20,
            fd_step: 1e-3,
            c0: C0Convention::One,
            contour: None,
            execution: Execution::default(),
        }
    }

    pub fn include_d(mut self, include: bool) -> Self {
        self.chart = CoordinateChart::new(&self.model, include);
        self
    }

    pub fn transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    pub fn truncation(mut self, n: usize) -> Self {
        self.truncation = Some(n);
        self
    }

    pub fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn fd_step(mut self, step: f64) -> Self {
        self.fd_step = step;
        self
    }

    pub fn c0(mut self, c0: C0Convention) -> Self {
        self.c0 = c0;
        self
    }

    pub fn contour(mut self, opts: ContourOptions) -> Self {
        self.contour = Some(opts);
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub(crate) fn generic_truncation(&self) -> usize {
        self.truncation.unwrap_or(DEFAULT_GENERIC_TRUNCATION)
    }

    pub(crate) fn contour_options(&self, n: usize) -> ContourOptions {
        self.contour.unwrap_or_else(|| ContourOptions::for_truncation(n))
    }

    pub(crate) fn point(&self) -> Point {
        Point::new(&self.model, self.chart.include_d)
    }
}

/// Role of a chart coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    D,
    Pole,
    Zero,
}

impl Slot {
    pub(crate) fn gamma(self) -> f64 {
        match self {
            Slot::D => 0.0,
            Slot::Pole => -1.0,
            Slot::Zero => 1.0,
        }
    }
}

/// Chart coordinates of a model, possibly off the real-`d` slice.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Point {
    pub slots: Vec<Slot>,
    pub coords: Vec<Complex64>,
    /// `d` when it is not a chart coordinate.
    pub fixed_d: Complex64,
    pub gain: f64,
}

impl Point {
    pub fn new(model: &ArfimaModel, include_d: bool) -> Self {
        let mut slots = Vec::new();
        let mut coords = Vec::new();
        if include_d {
            slots.push(Slot::D);
            coords.push(Complex64::new(model.d, 0.0));
        }
        for p in &model.poles {
            slots.push(Slot::Pole);
            coords.push(*p);
        }
        for z in &model.zeros {
            slots.push(Slot::Zero);
            coords.push(*z);
        }
        Self {
            slots,
            coords,
            fixed_d: Complex64::new(if include_d { 0.0 } else { model.d }, 0.0),
            gain: model.gain(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn real(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn with_real(&self, x: &[f64]) -> Self {
        let mut p = self.clone();
        for (i, c) in p.coords.iter_mut().enumerate() {
            *c = Complex64::new(x[2 * i], x[2 * i + 1]);
        }
        p
    }

    pub fn d(&self) -> Complex64 {
        match self.slots.first() {
            Some(Slot::D) => self.coords[0],
            _ => self.fixed_d,
        }
    }

    /// `(γ, ξ)` of every pole and zero.
    pub fn roots(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.slots
            .iter()
            .zip(&self.coords)
            .filter(|(s, _)| **s != Slot::D)
            .map(|(s, c)| (s.gamma(), *c))
    }

    pub fn root_modulus(&self) -> f64 {
        self.roots().map(|(_, r)| r.norm()).fold(0.0, f64::max)
    }

    pub fn params(&self) -> FilterParams {
        let mut poles = Vec::new();
        let mut zeros = Vec::new();
        for (slot, c) in self.slots.iter().zip(&self.coords) {
            match slot {
                Slot::Pole => poles.push(*c),
                Slot::Zero => zeros.push(*c),
                Slot::D => {}
            }
        }
        FilterParams {
            gain: self.gain,
            d: self.d(),
            poles,
            zeros,
        }
    }
}

/// A series evaluation with its truncation certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    /// Largest number of terms used by any entry.
    pub terms: usize,
    /// Sum of the per-entry tail bounds.
    pub tail_bound: f64,
}

/// `Γ_{ij,k̄}` stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    pub n: usize,
    data: Vec<Complex64>,
}

impl Connection {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex64) {
        self.data[(i * self.n + j) * self.n + k] = v;
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Connection) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize, usize), Complex64)> + '_ {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .map(move |(idx, v)| ((idx / (n * n), (idx / n) % n, idx % n), *v))
    }
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests;
