use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use rip_lab_core::format::{parse_graph, parse_matrix, serialize_graph, serialize_matrix};
use rip_lab_core::{
    cholesky_reduce_detailed, coherence as coherence_of, exact_rip_with, exponent_preset,
    gen_bernoulli_sensing, gen_gnp_half, gen_model_a, gen_model_b, lazy_certify_with, plant_clique,
    preset, run_distinguishing_experiment, spectral_clique_refuter_detailed, DenseMatrix, Error,
    ExactOptions, ExperimentConfig, Graph, NullStatistic, RectSpec, ReductionParams, RefuterAnswer,
    Seed, PRESET_NAMES, UNIT_COLUMN_TOL,
};

use crate::report::ReportFile;

pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_NOT_UNIT: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }

    fn internal(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::Parse { .. } | Error::NotClique(..) => EXIT_USAGE,
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::NotUnitColumns { .. } => EXIT_NOT_UNIT,
            Error::NoConvergence(_) => EXIT_INTERNAL,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Sizes the global worker pool from `RIP_LAB_THREADS` when set.
pub fn configure_threads() -> CliResult {
    let Ok(raw) = std::env::var("RIP_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::usage(format!(
            "RIP_LAB_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::internal(format!("cannot start worker pool: {e}")))
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> CliResult {
    fs::write(path, text)
        .map_err(|e| CliError::internal(format!("cannot write {}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> CliResult<DenseMatrix> {
    parse_matrix(&read_input(path)?)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> CliResult<Graph> {
    parse_graph(&read_input(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize")
}

fn emit_report(out: Option<&Path>, mut report: ReportFile, start: Instant) -> CliResult {
    let Some(path) = out else {
        return Ok(());
    };
    report.wall_time_ns = start.elapsed().as_nanos() as u64;
    write_output(path, &report.to_json())
}

fn require_unit_columns(phi: &DenseMatrix) -> CliResult {
    for j in 0..phi.cols() {
        let norm = phi.column_norm(j);
        if (norm - 1.0).abs() > UNIT_COLUMN_TOL {
            return Err(Error::NotUnitColumns {
                column: j,
                norm,
                tol: UNIT_COLUMN_TOL,
            }
            .into());
        }
    }
    Ok(())
}

pub fn exact(
    matrix: &Path,
    order: usize,
    threshold: Option<f64>,
    budget: u128,
    out: Option<&Path>,
) -> CliResult {
    let start = Instant::now();
    let phi = load_matrix(matrix)?;
    if let Some(t) = threshold {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::usage(format!(
                "threshold must be finite and >= 0, got {t}"
            )));
        }
    }
    let (report, witness) = exact_rip_with(&phi, order, &ExactOptions { budget, threshold })?;
    println!("delta={}", report.value);
    let file = ReportFile::new(
        "exact",
        None,
        json!({
            "matrix": matrix.display().to_string(),
            "rows": phi.rows(),
            "cols": phi.cols(),
            "order": order,
            "threshold": threshold,
            "budget": budget,
        }),
        json!({ "report": to_value(&report), "witness": to_value(&witness) }),
    );
    emit_report(out, file, start)
}

pub fn lazy(
    matrix: &Path,
    probe_order: usize,
    delta: f64,
    budget: u128,
    out: Option<&Path>,
) -> CliResult {
    let start = Instant::now();
    let phi = load_matrix(matrix)?;
    let (cert, report) = lazy_certify_with(&phi, probe_order, delta, budget)?;
    println!(
        "epsilon={} k_max={}",
        cert.probe_parameter, cert.max_certified_order
    );
    let file = ReportFile::new(
        "lazy",
        None,
        json!({
            "matrix": matrix.display().to_string(),
            "rows": phi.rows(),
            "cols": phi.cols(),
            "probe_order": probe_order,
            "delta": delta,
            "budget": budget,
        }),
        json!({
            "certificate": to_value(&cert),
            "report": to_value(&report),
            "enumeration_savings": cert.enumeration_savings(),
        }),
    );
    emit_report(out, file, start)
}

pub fn coherence(matrix: &Path, out: Option<&Path>) -> CliResult {
    let start = Instant::now();
    let phi = load_matrix(matrix)?;
    require_unit_columns(&phi)?;
    let mu = coherence_of(&phi)?;
    println!("mu={mu}");
    let file = ReportFile::new(
        "coherence",
        None,
        json!({
            "matrix": matrix.display().to_string(),
            "rows": phi.rows(),
            "cols": phi.cols(),
        }),
        json!({ "coherence": mu }),
    );
    emit_report(out, file, start)
}

pub enum GenerateKind {
    Bernoulli { n: usize, big_n: usize },
    ModelA { n: usize },
    ModelB { n: usize, c: f64 },
    Gnp { n: usize },
    Planted { n: usize, t: usize },
}

pub fn generate(kind: GenerateKind, seed: Seed, out: &Path, report: Option<&Path>) -> CliResult {
    let start = Instant::now();
    let (name, params, text, results) = match kind {
        GenerateKind::Bernoulli { n, big_n } => {
            let m = gen_bernoulli_sensing(n, big_n, seed)?;
            (
                "bernoulli",
                json!({ "n": n, "N": big_n }),
                serialize_matrix(&m),
                json!({}),
            )
        }
        GenerateKind::ModelA { n } => {
            let m = gen_model_a(n, seed)?;
            (
                "model-a",
                json!({ "n": n }),
                serialize_matrix(&m),
                json!({}),
            )
        }
        GenerateKind::ModelB { n, c } => {
            let m = gen_model_b(n, c, seed)?;
            (
                "model-b",
                json!({ "n": n, "c": c }),
                serialize_matrix(&m),
                json!({}),
            )
        }
        GenerateKind::Gnp { n } => {
            let g = gen_gnp_half(n, seed)?;
            let edges = g.edge_count();
            (
                "gnp",
                json!({ "n": n }),
                serialize_graph(&g),
                json!({ "edges": edges }),
            )
        }
        GenerateKind::Planted { n, t } => {
            let base = gen_gnp_half(n, seed)?;
            let inst = plant_clique(&base, t, seed)?;
            let line = clique_line(inst.planted.indices());
            println!("{line}");
            (
                "planted",
                json!({ "n": n, "t": t }),
                serialize_graph(&inst.graph),
                json!({
                    "edges": inst.graph.edge_count(),
                    "planted": inst.planted.indices(),
                    "clique": line,
                }),
            )
        }
    };
    write_output(out, &text)?;
    let file = ReportFile::new(&format!("generate {name}"), Some(seed), params, results);
    emit_report(report, file, start)
}

fn clique_line(vertices: &[usize]) -> String {
    let mut s = String::from("clique:");
    for v in vertices {
        s.push(' ');
        s.push_str(&v.to_string());
    }
    s
}

fn reduction_params(c: f64, psd_tol: f64) -> CliResult<ReductionParams> {
    let params = ReductionParams { c, psd_tol };
    params.validate()?;
    if let Some(w) = params.policy_warning() {
        eprintln!("warning: {w}");
    }
    Ok(params)
}

pub fn reduce(graph: &Path, c: f64, psd_tol: f64, out: &Path, report: Option<&Path>) -> CliResult {
    let start = Instant::now();
    let g = load_graph(graph)?;
    let params = reduction_params(c, psd_tol)?;
    let red = cholesky_reduce_detailed(&g, &params)?;
    write_output(out, &serialize_matrix(&red.matrix))?;
    if !red.psd {
        eprintln!("note: not-psd");
    }
    let file = ReportFile::new(
        "reduce",
        None,
        json!({
            "graph": graph.display().to_string(),
            "n": g.vertex_count(),
            "c": c,
            "psd_tol": psd_tol,
        }),
        json!({
            "psd": red.psd,
            "smallest_eigenvalue": red.smallest_eigenvalue,
            "note": if red.psd { Value::Null } else { json!("not-psd") },
        }),
    );
    emit_report(report, file, start)
}

pub fn refute(graph: &Path, k: usize, out: Option<&Path>) -> CliResult {
    let start = Instant::now();
    let g = load_graph(graph)?;
    let outcome = spectral_clique_refuter_detailed(&g, k)?;
    println!(
        "{}",
        match outcome.answer {
            RefuterAnswer::Yes => "yes",
            RefuterAnswer::NoClique => "no-clique",
        }
    );
    let file = ReportFile::new(
        "refute",
        None,
        json!({ "graph": graph.display().to_string(), "n": g.vertex_count(), "k": k }),
        to_value(&outcome),
    );
    emit_report(out, file, start)
}

pub struct ExperimentSpec {
    pub preset: Option<String>,
    pub epsilon: Option<f64>,
    pub n: Option<usize>,
    pub clique_size: Option<usize>,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Seed,
    pub null_statistic: Option<NullStatistic>,
    pub budget: Option<u128>,
    pub rect: bool,
    pub extra_cols: Option<usize>,
    pub aspect: usize,
}

fn base_config(spec: &ExperimentSpec) -> CliResult<ExperimentConfig> {
    match spec.preset.as_deref() {
        Some("exponent") => {
            let n = spec
                .n
                .ok_or_else(|| CliError::usage("preset exponent needs --n"))?;
            let eps = spec
                .epsilon
                .ok_or_else(|| CliError::usage("preset exponent needs --epsilon"))?;
            Ok(exponent_preset(n, eps)?)
        }
        Some(name) => preset(name).ok_or_else(|| {
            CliError::usage(format!(
                "unknown preset {name:?}; known: {}, exponent",
                PRESET_NAMES.join(", ")
            ))
        }),
        None => {
            let missing =
                |flag: &str| CliError::usage(format!("{flag} is required without --preset"));
            let n = spec.n.ok_or_else(|| missing("--n"))?;
            let t = spec.clique_size.ok_or_else(|| missing("--clique-size"))?;
            let k = spec.k.ok_or_else(|| missing("--k"))?;
            let delta = spec.delta.ok_or_else(|| missing("--delta"))?;
            Ok(ExperimentConfig::new(n, t, k, delta))
        }
    }
}

fn build_config(spec: &ExperimentSpec) -> CliResult<ExperimentConfig> {
    let mut cfg = base_config(spec)?;
    if spec.preset.as_deref() != Some("exponent") {
        if let Some(n) = spec.n {
            cfg.n = n;
        }
    }
    if spec.preset.is_some() {
        if let Some(t) = spec.clique_size {
            cfg.clique_size = t;
        }
        if let Some(k) = spec.k {
            cfg.k = k;
        }
        if let Some(d) = spec.delta {
            cfg.delta = d;
        }
    }
    if let Some(c) = spec.c {
        cfg.params.c = c;
    }
    if let Some(trials) = spec.trials {
        cfg.trials = trials;
    }
    if let Some(stat) = spec.null_statistic {
        cfg.null_statistic = stat;
    }
    if let Some(b) = spec.budget {
        cfg.budget = b;
    }
    cfg.base_seed = spec.seed;
    if spec.rect {
        cfg.rect = Some(match spec.extra_cols {
            Some(extra_cols) => RectSpec { extra_cols },
            None => RectSpec::with_aspect(cfg.n, spec.aspect)?,
        });
    } else if spec.extra_cols.is_some() {
        return Err(CliError::usage("--extra-cols needs --rect"));
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn experiment(spec: ExperimentSpec, out: Option<&Path>) -> CliResult {
    let start = Instant::now();
    let cfg = build_config(&spec)?;
    if let Some(w) = cfg.params.policy_warning() {
        eprintln!("warning: {w}");
    }
    let report = run_distinguishing_experiment(&cfg)?;
    let s = &report.separation;
    println!(
        "true_positives={}/{} false_positives={}/{}",
        s.true_positives, s.planted_trials, s.false_positives, s.null_trials
    );
    let mut params = to_value(&cfg);
    if let Some(name) = &spec.preset {
        params["preset"] = json!(name);
    }
    let file = ReportFile::new("experiment", Some(cfg.base_seed), params, to_value(&report));
    emit_report(out, file, start)
}
