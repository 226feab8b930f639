use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Value};

use kahler_hardy::filter_models::{
    complex_cepstrum, impulse_response, power_cepstrum, ArfimaModel, C0Convention, ContourOptions,
};
use kahler_hardy::kahler::{build_report, GeometryConfig, GeometryReport, ReportOptions, Transform};
use kahler_hardy::par::Execution;
use kahler_hardy::verify::{run_verify, Mutation, VerifyOptions};
use kahler_hardy::weighted_hardy::{
    distance_contributions, reproducing_kernel, weighted_distance, CoefficientSeries, WeightSequence,
};

use crate::args::{
    C0Arg, CepstrumArgs, Cli, Command, DistanceArgs, DistanceMatrixArgs, DistanceOptions, GeometryArgs, KernelArgs,
    OutputFormat, SeriesArg, SeriesArgs, TransformArg, VerifyArgs, WeightArgs,
};
use crate::output::{complex_cells, complex_json, emit, num, Table};
use crate::Failure;

const TRIANGLE_SLACK: f64 = 1e-12;

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Cepstrum(a) => cepstrum(a),
        Command::Impulse(a) => series_command(&a, SeriesArg::Impulse, C0Convention::One, None),
        Command::Potential(a) => geometry(a, ReportOptions { potential: true, ..Default::default() }),
        Command::Metric(a) => geometry(
            a,
            ReportOptions {
                potential: true,
                metric: true,
                ..Default::default()
            },
        ),
        Command::Connection(a) => geometry(
            a,
            ReportOptions {
                potential: true,
                metric: true,
                connection: true,
                ..Default::default()
            },
        ),
        Command::Ricci(a) => geometry(
            a,
            ReportOptions {
                potential: true,
                metric: true,
                ricci: true,
                ..Default::default()
            },
        ),
        Command::Distance(a) => distance(a),
        Command::DistanceMatrix(a) => distance_matrix(a),
        Command::Kernel(a) => kernel(a),
        Command::Verify(a) => verify(a),
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: malformed JSON: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ArfimaModel, Failure> {
    ArfimaModel::from_json(&read_json(path)?).map_err(|e| Failure {
        message: format!("{}: {}", path.display(), Failure::from(e).message),
        code: 2,
    })
}

fn load_weight(args: &WeightArgs) -> Result<WeightSequence, Failure> {
    if let Some(m) = args.order_m {
        return Ok(WeightSequence::power(m).map_err(|e| Failure::input(format!("--order-m: {e}")))?);
    }
    let Some(spec) = &args.weight else {
        return Ok(WeightSequence::hardy());
    };
    let value = if spec.trim_start().starts_with('{') {
        serde_json::from_str(spec).map_err(|e| Failure::input(format!("--weight: malformed JSON: {e}")))?
    } else {
        read_json(Path::new(spec))?
    };
    WeightSequence::from_json(&value).map_err(|e| Failure::input(format!("--weight: {}", Failure::from(e).message)))
}

fn c0_convention(c0: C0Arg) -> C0Convention {
    match c0 {
        C0Arg::One => C0Convention::One,
        C0Arg::LogGain => C0Convention::LogGain,
    }
}

fn transform(t: TransformArg) -> Transform {
    match t {
        TransformArg::Identity => Transform::Identity,
        TransformArg::Log => Transform::Log,
        TransformArg::LogSquaredModulus => Transform::LogSquaredModulus,
    }
}

fn coefficient_series(
    model: &ArfimaModel,
    kind: SeriesArg,
    n: usize,
    c0: C0Convention,
    grid: Option<usize>,
) -> Result<CoefficientSeries, Failure> {
    Ok(match kind {
        SeriesArg::Complex => complex_cepstrum(model, n, c0),
        SeriesArg::Impulse => impulse_response(model, n),
        SeriesArg::Power => {
            let opts = grid.map_or_else(|| ContourOptions::for_truncation(n), ContourOptions::with_grid);
            power_cepstrum(model, n, &opts)?
        }
    })
}

fn series_json(series: &CoefficientSeries, weight: &WeightSequence) -> Value {
    json!({
        "kind": series.kind.as_str(),
        "truncation": series.truncation(),
        "coefficients": series.coeffs.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
        "weight": weight.description,
        "tail_bound": series.tail_bound(weight),
    })
}

fn series_command(a: &SeriesArgs, kind: SeriesArg, c0: C0Convention, grid: Option<usize>) -> Result<(), Failure> {
    let model = load_model(&a.model)?;
    let weight = load_weight(&a.weight)?;
    let series = coefficient_series(&model, kind, a.truncation, c0, grid)?;
    emit(
        &a.output,
        OutputFormat::Json,
        || series_json(&series, &weight),
        || {
            let mut t = Table::new(["s", "value_re", "value_im"]);
            for (s, z) in series.coeffs.iter().enumerate() {
                let [re, im] = complex_cells(*z);
                t.push([s.to_string(), re, im]);
            }
            t
        },
    )
}

fn cepstrum(a: CepstrumArgs) -> Result<(), Failure> {
    series_command(&a.series, a.kind, c0_convention(a.c0), a.grid_size)
}

fn geometry_config(a: &GeometryArgs) -> Result<GeometryConfig, Failure> {
    let model = load_model(&a.model)?;
    let weight = load_weight(&a.weight)?;
    let mut cfg = GeometryConfig::new(model, weight)
        .transform(transform(a.transform))
        .c0(c0_convention(a.c0));
    if a.include_d {
        cfg = cfg.include_d(true);
    } else if a.exclude_d {
        cfg = cfg.include_d(false);
    }
    if let Some(n) = a.truncation {
        cfg = cfg.truncation(n);
    }
    if let Some(t) = a.tolerance {
        if !(t > 0.0) {
            return Err(Failure::input("--tolerance must be positive"));
        }
        cfg = cfg.tolerance(t);
    }
    if let Some(h) = a.fd_step {
        if !(h > 0.0) {
            return Err(Failure::input("--fd-step must be positive"));
        }
        cfg = cfg.fd_step(h);
    }
    Ok(cfg)
}

fn report_table(r: &GeometryReport) -> Table {
    let mut t = Table::new(["quantity", "i", "j", "k", "value_re", "value_im"]);
    let scalar = |t: &mut Table, name: &str, v: Option<f64>| {
        if let Some(v) = v {
            t.push([name.to_string(), String::new(), String::new(), String::new(), num(v), num(0.0)]);
        }
    };
    scalar(&mut t, "potential", r.potential);
    scalar(&mut t, "potential_closed", r.potential_closed);
    for (name, m) in [("metric", &r.metric), ("metric_closed", &r.metric_closed), ("ricci", &r.ricci)] {
        if let Some(m) = m {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let [re, im] = complex_cells(m[(i, j)]);
                    t.push([name.to_string(), i.to_string(), j.to_string(), String::new(), re, im]);
                }
            }
        }
    }
    for (name, c) in [("connection", &r.connection), ("connection_closed", &r.connection_closed)] {
        if let Some(c) = c {
            for ((i, j, k), v) in c.iter() {
                let [re, im] = complex_cells(v);
                t.push([name.to_string(), i.to_string(), j.to_string(), k.to_string(), re, im]);
            }
        }
    }
    scalar(&mut t, "hermitian_residual", r.hermitian_residual);
    scalar(&mut t, "closed_form_residual", r.closed_form_residual);
    t
}

fn geometry(a: GeometryArgs, mut opts: ReportOptions) -> Result<(), Failure> {
    let cfg = geometry_config(&a)?;
    opts.check = a.check;
    let report = build_report(&cfg, opts)?;
    emit(&a.output, OutputFormat::Json, || report.to_json(), || report_table(&report))
}

fn distance_series(model: &ArfimaModel, o: &DistanceOptions) -> Result<CoefficientSeries, Failure> {
    let kind = match o.transform {
        TransformArg::Identity => SeriesArg::Impulse,
        TransformArg::Log => SeriesArg::Complex,
        TransformArg::LogSquaredModulus => SeriesArg::Power,
    };
    coefficient_series(model, kind, o.truncation, c0_convention(o.c0), None)
}

fn distance(a: DistanceArgs) -> Result<(), Failure> {
    let [p, q] = a.model.as_slice() else {
        return Err(Failure::input(format!(
            "distance needs exactly two --model files, got {}",
            a.model.len()
        )));
    };
    let o = &a.options;
    let weight = load_weight(&o.weight)?;
    let f = distance_series(&load_model(p)?, o)?;
    let g = distance_series(&load_model(q)?, o)?;
    let d = weighted_distance(&f, &g, &weight)?;
    let contributions = distance_contributions(&f, &g, &weight)?;
    emit(
        &o.output,
        OutputFormat::Json,
        || {
            json!({
                "distance": d.value,
                "tail_bound": d.tail_bound,
                "terms": d.terms,
                "weight": weight.description,
                "transform": transform(o.transform).as_str(),
                "contributions": contributions,
            })
        },
        || {
            let mut t = Table::new(["key", "value"]);
            t.push(["distance".to_string(), num(d.value)]);
            if let Some(b) = d.tail_bound {
                t.push(["tail_bound".to_string(), num(b)]);
            }
            for (s, c) in contributions.iter().enumerate() {
                t.push([format!("contribution_{s}"), num(*c)]);
            }
            t
        },
    )
}

fn model_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Failure::input(format!("{}: no *.json model files", dir.display())));
    }
    Ok(files)
}

/// Largest violation of `d(i,k) ≤ d(i,j) + d(j,k)`.
fn triangle_violation(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                worst = worst.max(m[i][k] - m[i][j] - m[j][k]);
            }
        }
    }
    worst
}

fn distance_matrix(a: DistanceMatrixArgs) -> Result<(), Failure> {
    let o = &a.options;
    let files = model_files(&a.dir)?;
    let weight = load_weight(&o.weight)?;
    let exec = Execution::Parallel;
    let series = exec
        .map(&files, |p| load_model(p).and_then(|m| distance_series(&m, o)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let n = files.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values = exec
        .map(&pairs, |&(i, j)| weighted_distance(&series[i], &series[j], &weight).map(|d| d.value))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut matrix = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        matrix[i][j] = v;
        matrix[j][i] = v;
    }
    let symmetric = (0..n).all(|i| matrix[i][i] == 0.0 && (0..n).all(|j| matrix[i][j] == matrix[j][i]));
    if !symmetric {
        return Err(Failure {
            code: 3,
            message: "distance matrix is not symmetric with zero diagonal".into(),
        });
    }
    let violation = triangle_violation(&matrix);
    if violation > TRIANGLE_SLACK {
        return Err(Failure {
            code: 3,
            message: format!("distance matrix violates the triangle inequality by {violation:e}"),
        });
    }
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()))
        .collect();
    emit(
        &o.output,
        OutputFormat::Csv,
        || json!({ "models": names, "weight": weight.description, "matrix": matrix }),
        || {
            let mut t = Table::new(std::iter::once("model".to_string()).chain(names.iter().cloned()));
            for (name, row) in names.iter().zip(&matrix) {
                t.push(std::iter::once(name.clone()).chain(row.iter().map(|v| num(*v))));
            }
            t
        },
    )
}

fn parse_complex(flag: &str, text: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::input(format!("--{flag}: expected `re,im` or `re`, got {text:?}"));
    let parts: Vec<&str> = text.trim().trim_start_matches('[').trim_end_matches(']').split(',').collect();
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err(bad()),
    }
}

fn kernel(a: KernelArgs) -> Result<(), Failure> {
    let u = parse_complex("u", &a.u)?;
    let v = parse_complex("v", &a.v)?;
    let weight = load_weight(&a.weight)?;
    let k = reproducing_kernel(&weight, u, v, a.tolerance)?;
    emit(
        &a.output,
        OutputFormat::Json,
        || {
            json!({
                "u": complex_json(u),
                "v": complex_json(v),
                "weight": weight.description,
                "value": complex_json(k),
            })
        },
        || {
            let mut t = Table::new(["value_re", "value_im"]);
            t.push(complex_cells(k));
            t
        },
    )
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let report = run_verify(&VerifyOptions {
        seed: a.seed,
        models: a.models,
        execution: Execution::Parallel,
        mutation: a.inject_sign_error.then_some(Mutation::FlipClosedMetricSign),
    });
    emit(&a.output, OutputFormat::Json, || report.to_json(), || {
        let mut t = Table::new(["suite", "passed", "cases", "max_error", "tolerance", "failure_count"]);
        for s in &report.suites {
            t.push([
                s.name.to_string(),
                s.passed().to_string(),
                s.cases.to_string(),
                num(s.max_error),
                num(s.tolerance),
                s.failure_count.to_string(),
            ]);
        }
        t
    })?;
    if report.passed() {
        return Ok(());
    }
    let details: Vec<String> = report
        .suites
        .iter()
        .filter(|s| !s.passed())
        .map(|s| format!("{} ({})", s.name, s.failures.first().map_or("", String::as_str)))
        .collect();
    Err(Failure {
        code: 1,
        message: format!("verification failed: {}", details.join("; ")),
    })
}
