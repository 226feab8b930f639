//! Bundled geometry evaluation and its JSON form.

use serde_json::{json, Value};

use crate::error::Result;

use super::{
    check_kahler, connection_closed, connection_series, metric_closed, metric_series, potential_closed,
    potential_series, ricci_fd, CMatrix, Connection, GeometryConfig, Transform,
};

/// Which parts of the geometry to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReportOptions {
    pub potential: bool,
    pub metric: bool,
    pub connection: bool,
    pub ricci: bool,
    /// Also evaluate the Kähler-condition residuals.
    pub check: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Convergence {
    /// Largest truncation used by a series route.
    pub terms: usize,
    pub potential_tail_bound: Option<f64>,
    pub metric_tail_bound: Option<f64>,
    pub connection_tail_bound: Option<f64>,
    pub tolerance: f64,
    pub fd_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub labels: Vec<String>,
    pub transform: Transform,
    pub weight: String,
    pub potential: Option<f64>,
    pub potential_closed: Option<f64>,
    pub metric: Option<CMatrix>,
    pub metric_closed: Option<CMatrix>,
    pub connection: Option<Connection>,
    pub connection_closed: Option<Connection>,
    pub ricci: Option<CMatrix>,
    pub hermitian_residual: Option<f64>,
    pub closed_form_residual: Option<f64>,
    pub convergence: Convergence,
}

/// Computes the requested parts. Closed forms are added alongside the
/// series values whenever `φ = log` and the weight is a power weight.
pub fn build_report(cfg: &GeometryConfig, opts: ReportOptions) -> Result<GeometryReport> {
    let has_closed = cfg.transform == Transform::Log && cfg.weight.power_order().is_some();
    let mut report = GeometryReport {
        labels: cfg.chart.labels.clone(),
        transform: cfg.transform,
        weight: cfg.weight.description.clone(),
        potential: None,
        potential_closed: None,
        metric: None,
        metric_closed: None,
        connection: None,
        connection_closed: None,
        ricci: None,
        hermitian_residual: None,
        closed_form_residual: None,
        convergence: Convergence {
            tolerance: cfg.tolerance,
            fd_step: cfg.fd_step,
            ..Default::default()
        },
    };
    if opts.potential {
        let k = potential_series(cfg)?;
        report.convergence.terms = report.convergence.terms.max(k.terms);
        report.convergence.potential_tail_bound = Some(k.tail_bound);
        report.potential = Some(k.value);
        if has_closed {
            report.potential_closed = Some(potential_closed(cfg)?);
        }
    }
    if opts.metric {
        let g = metric_series(cfg)?;
        report.convergence.terms = report.convergence.terms.max(g.terms);
        report.convergence.metric_tail_bound = Some(g.tail_bound);
        report.metric = Some(g.value);
        if has_closed {
            report.metric_closed = Some(metric_closed(cfg)?);
        }
    }
    if opts.connection {
        let c = connection_series(cfg)?;
        report.convergence.terms = report.convergence.terms.max(c.terms);
        report.convergence.connection_tail_bound = Some(c.tail_bound);
        report.connection = Some(c.value);
        if has_closed {
            report.connection_closed = Some(connection_closed(cfg)?);
        }
    }
    if opts.ricci {
        report.ricci = Some(ricci_fd(cfg)?);
    }
    if opts.check {
        let r = check_kahler(cfg)?;
        report.hermitian_residual = Some(r.hermitian);
        report.closed_form_residual = Some(r.closure);
    }
    Ok(report)
}

fn complex_json(z: &num_complex::Complex64) -> Value {
    json!([z.re, z.im])
}

/// Row-major nested `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(&m[(i, j)])).collect()))
            .collect(),
    )
}

/// `Γ[i][j][k]` as nested `[re, im]` pairs.
pub fn connection_json(c: &Connection) -> Value {
    let n = c.n;
    Value::Array(
        (0..n)
            .map(|i| {
                Value::Array(
                    (0..n)
                        .map(|j| Value::Array((0..n).map(|k| complex_json(&c.get(i, j, k))).collect()))
                        .collect(),
                )
            })
            .collect(),
    )
}

impl GeometryReport {
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("coordinates".into(), json!(self.labels));
        obj.insert("transform".into(), json!(self.transform.as_str()));
        obj.insert("weight".into(), json!(self.weight));
        let mut put = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                obj.insert(key.into(), v);
            }
        };
        put("potential", self.potential.map(|v| json!(v)));
        put("potential_closed", self.potential_closed.map(|v| json!(v)));
        put("metric", self.metric.as_ref().map(matrix_json));
        put("metric_closed", self.metric_closed.as_ref().map(matrix_json));
        put("connection", self.connection.as_ref().map(connection_json));
        put("connection_closed", self.connection_closed.as_ref().map(connection_json));
        put("ricci", self.ricci.as_ref().map(matrix_json));
        put("hermitian_residual", self.hermitian_residual.map(|v| json!(v)));
        put("closed_form_residual", self.closed_form_residual.map(|v| json!(v)));
        let c = &self.convergence;
        obj.insert(
            "diagnostics".into(),
            json!({
                "terms": c.terms,
                "potential_tail_bound": c.potential_tail_bound,
                "metric_tail_bound": c.metric_tail_bound,
                "connection_tail_bound": c.connection_tail_bound,
                "tolerance": c.tolerance,
                "fd_step": c.fd_step,
            }),
        );
        Value::Object(obj)
    }
}
