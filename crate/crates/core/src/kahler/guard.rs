//! Convergence guard for the `|d|²` term.
//!
//! For `φ = log` the cepstrum carries a harmonic part `-d/s`, so the potential
//! contains `|d|² Σ ω_s / s²`. With `ω_s = s^m` this diverges for `m ≥ 1`
//! unless `d = 0`, and the `g_{00}` metric entry diverges for `m ≥ 1` even
//! at `d = 0`.

use crate::error::{Error, Result};
use crate::filter_models::{ArfimaModel, CoordinateChart};
use crate::weighted_hardy::{WeightFamily, WeightSequence};

use super::{GeometryConfig, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardVerdict {
    Finite,
    Divergent,
    Unknown,
}

impl GuardVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            GuardVerdict::Finite => "finite",
            GuardVerdict::Divergent => "divergent",
            GuardVerdict::Unknown => "unknown",
        }
    }
}

/// Classifies the geometry of `model` on `chart` under `weight`.
///
/// Power weights are divergent exactly when the chart contains a nonzero
/// `d` and `m ≥ 1`. Other families are classified by the convergence of
/// `Σ ω_s / s²`; custom tables that cannot be extended compare partial sums
/// at `N` and `2N` and report [`GuardVerdict::Unknown`] if they still move.
pub fn divergence_guard(model: &ArfimaModel, chart: &CoordinateChart, weight: &WeightSequence) -> GuardVerdict {
    if !(chart.include_d && model.d != 0.0) {
        return GuardVerdict::Finite;
    }
    if let Some(m) = weight.power_order() {
        return if m >= 1.0 { GuardVerdict::Divergent } else { GuardVerdict::Finite };
    }
    match weight.inverse_square_tail(0) {
        Ok(_) => GuardVerdict::Finite,
        Err(Error::Divergent(_)) => GuardVerdict::Divergent,
        Err(_) => partial_sum_verdict(weight),
    }
}

fn partial_sum_verdict(weight: &WeightSequence) -> GuardVerdict {
    let WeightFamily::Custom { table, .. } = &weight.family else {
        return GuardVerdict::Unknown;
    };
    let partial = |n: usize| -> f64 { (1..=n.min(table.len() - 1)).map(|s| table[s] / (s * s) as f64).sum() };
    let n = (table.len() - 1) / 2;
    if n >= 1 && (partial(2 * n) - partial(n)).abs() <= 1e-12 {
        GuardVerdict::Finite
    } else {
        GuardVerdict::Unknown
    }
}

fn divergent_d(cfg: &GeometryConfig, what: &str) -> Error {
    Error::Divergent(format!(
        "{what}: the |d|^2 term diverges for weight {} (d = {}, requires d = 0 or m < 1)",
        cfg.weight.description, cfg.model.d
    ))
}

/// `Σ ω_s / s²`, or the reason it is unavailable.
pub(crate) fn inverse_square_total(cfg: &GeometryConfig, what: &str) -> Result<f64> {
    match cfg.weight.inverse_square_tail(0) {
        Err(Error::Divergent(_)) => Err(divergent_d(cfg, what)),
        other => other,
    }
}

/// Rejects potentials whose infinite series diverge.
pub(crate) fn require_finite_potential(cfg: &GeometryConfig) -> Result<()> {
    if cfg.model.d == 0.0 {
        return Ok(());
    }
    match cfg.transform {
        Transform::Log | Transform::LogSquaredModulus => inverse_square_total(cfg, "potential").map(|_| ()),
        // h_s ~ s^{-1-d}, so Σ s^m |h_s|² needs m < 1 + 2d.
        Transform::Identity => match cfg.weight.power_order() {
            Some(m) if m >= 1.0 + 2.0 * cfg.model.d => Err(Error::Divergent(format!(
                "potential: Σ s^m |h_s|^2 diverges for m = {m} >= 1 + 2d with d = {}",
                cfg.model.d
            ))),
            _ => Ok(()),
        },
    }
}

/// Rejects metrics whose `d` row diverges: with `d` in the chart, `g_{00}`
/// needs `Σ ω_s / s² < ∞` whatever the value of `d`.
pub(crate) fn require_finite_metric(cfg: &GeometryConfig) -> Result<()> {
    if !cfg.chart.include_d {
        return Ok(());
    }
    match cfg.transform {
        Transform::Log | Transform::LogSquaredModulus => inverse_square_total(cfg, "metric g_00").map(|_| ()),
        Transform::Identity => require_finite_potential(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighted_hardy::Extension;

    fn model(d: f64) -> ArfimaModel {
        ArfimaModel::unit_gain(d, vec![num_complex::Complex64::new(0.5, 0.0)], vec![]).unwrap()
    }

    #[test]
    fn power_examples() {
        let m03 = model(0.3);
        let chart = CoordinateChart::new(&m03, true);
        let p = |m: f64| WeightSequence::power(m).unwrap();
        assert_eq!(divergence_guard(&m03, &chart, &p(1.0)), GuardVerdict::Divergent);
        assert_eq!(divergence_guard(&m03, &chart, &p(0.5)), GuardVerdict::Finite);
        let m0 = model(0.0);
        assert_eq!(divergence_guard(&m0, &CoordinateChart::new(&m0, true), &p(3.0)), GuardVerdict::Finite);
        assert_eq!(
            divergence_guard(&m03, &CoordinateChart::new(&m03, false), &p(2.0)),
            GuardVerdict::Finite
        );
    }

    #[test]
    fn other_families() {
        let m = model(0.3);
        let chart = CoordinateChart::new(&m, true);
        assert_eq!(divergence_guard(&m, &chart, &WeightSequence::bergman()), GuardVerdict::Finite);
        assert_eq!(divergence_guard(&m, &chart, &WeightSequence::dirichlet()), GuardVerdict::Divergent);
        let short = WeightSequence::custom(vec![1.0; 4], Extension::Error).unwrap();
        assert_eq!(divergence_guard(&m, &chart, &short), GuardVerdict::Unknown);
    }
}
