//! The five subcommands. Each computes everything in memory first and then
//! writes its files atomically, so a failed command leaves no partial output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use diffusim_core::curvefit::{build_reference_curves, fit_series, normalize_series};
use diffusim_core::experiment::{run_ensemble, run_ensemble_with, Axis, Grid, SHARED_GRAPH_STREAM};
use diffusim_core::{
    derive_run_rng, EnsembleStats, FitGrid, GraphSpec, MetricStats, MetricTarget, ReferenceConfig,
    SimConfig, Trajectory,
};
use serde::Deserialize;
use serde_json::Value;

use crate::config;
use crate::error::CliError;
use crate::output::{flag, fmt_f64, fmt_opt, write_atomic, Table};

pub const RUNS_CSV: &str = "runs.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const TRAJECTORIES_CSV: &str = "trajectories.csv";
pub const SWEEP_SUMMARY_CSV: &str = "sweep_summary.csv";
pub const FIT_CSV: &str = "fit.csv";
pub const REFERENCES_CSV: &str = "references.csv";
pub const EDGE_LIST: &str = "graph.edgelist";
pub const CURVE_CSV: &str = "curve.csv";

pub const RUNS_HEADER: [&str; 14] = [
    "run_index",
    "model",
    "scheme",
    "n",
    "k",
    "beta",
    "seed_count",
    "master_seed",
    "t_to_pct1",
    "t_1_to_99",
    "censored_1",
    "censored_99",
    "final_infected",
    "steps_executed",
];

pub const SUMMARY_HEADER: [&str; 8] = [
    "metric",
    "mean",
    "std",
    "cv",
    "min",
    "max",
    "censored_count",
    "runs",
];

const STAT_COLUMNS: [&str; 6] = ["mean", "std", "cv", "min", "max", "censored_count"];

fn stat_cells(s: &MetricStats) -> [String; 6] {
    [
        fmt_f64(s.mean),
        fmt_f64(s.std),
        fmt_f64(s.cv),
        fmt_opt(s.min),
        fmt_opt(s.max),
        s.censored.to_string(),
    ]
}

/// `(t, infected)` at `t = 0` and wherever the count changes.
fn change_points(traj: &Trajectory) -> Vec<(usize, u32)> {
    let counts = traj.counts();
    let mut out = vec![(0, counts[0])];
    out.extend(
        counts
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] != w[1])
            .map(|(i, w)| (i + 1, w[1])),
    );
    out
}

/// Runs an ensemble and writes `runs.csv`, `trajectories.csv` and
/// `summary.csv` (in that order) to `out`.
pub fn cmd_run(
    config_path: &Path,
    out: &Path,
    overrides: &[String],
) -> Result<Vec<PathBuf>, CliError> {
    let cfg = config::load_config(config_path, overrides)?;
    write_run(&cfg, out)
}

pub fn write_run(cfg: &SimConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let ens = run_ensemble_with(cfg, |_, traj| (traj.node_count(), change_points(traj)))?;

    let (k, beta) = match cfg.graph {
        GraphSpec::WattsStrogatz { k, beta, .. } => (k.to_string(), fmt_f64(Some(beta))),
        _ => (String::new(), String::new()),
    };
    let mut runs = Table::new(RUNS_HEADER)?;
    let mut trajectories = Table::new(["run_index", "t", "infected"])?;
    for (rec, (n, points)) in ens.records.iter().zip(&ens.extras) {
        let std = &rec.standard;
        runs.row([
            rec.run_index.to_string(),
            cfg.model.name().to_string(),
            cfg.scheme.name().to_string(),
            n.to_string(),
            k.clone(),
            beta.clone(),
            cfg.seed_count.to_string(),
            cfg.master_seed.to_string(),
            fmt_opt(std.to_1pct.value()),
            fmt_opt(std.spread_1_99.value()),
            flag(std.to_1pct.is_censored()).to_string(),
            flag(std.to_99pct.is_censored()).to_string(),
            rec.final_infected.to_string(),
            rec.steps_executed.to_string(),
        ])?;
        for &(t, c) in points {
            trajectories.row([rec.run_index.to_string(), t.to_string(), c.to_string()])?;
        }
    }

    let mut summary = Table::new(SUMMARY_HEADER)?;
    for s in &ens.stats.metrics {
        let mut row = vec![s.target.name()];
        row.extend(stat_cells(s));
        row.push(s.runs().to_string());
        summary.row(row)?;
    }

    Ok(vec![
        write_atomic(out, RUNS_CSV, &runs.into_bytes()?)?,
        write_atomic(out, TRAJECTORIES_CSV, &trajectories.into_bytes()?)?,
        write_atomic(out, SUMMARY_CSV, &summary.into_bytes()?)?,
    ])
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Runs one ensemble per grid cell and writes `sweep_summary.csv`: one row
/// per cell with the cell's axis values, a status, the run count, and six
/// statistics columns per metric (`<metric>_mean`, ...).
pub fn cmd_sweep(
    config_path: &Path,
    out: &Path,
    overrides: &[String],
) -> Result<Vec<PathBuf>, CliError> {
    let (doc, base_dir) = config::load_sweep(config_path, overrides)?;
    for axis in &doc.grid {
        if axis.key.is_empty() || axis.key.split('.').any(str::is_empty) {
            return Err(CliError::Validation(format!(
                "sweep: invalid axis key {:?}",
                axis.key
            )));
        }
    }
    let grid = Grid::new(
        doc.grid
            .iter()
            .map(|a| Axis {
                name: a.key.clone(),
                values: a.values.clone(),
            })
            .collect(),
    )
    .map_err(|e| CliError::Validation(format!("sweep: {e}")))?;

    let configs: Vec<Result<SimConfig, CliError>> = grid
        .cells()
        .into_iter()
        .map(|cell| {
            let mut d = doc.base.clone();
            for (key, value) in cell {
                config::set_path(&mut d, key, value)?;
            }
            config::parse_config(d, base_dir.as_deref())
        })
        .collect();
    let metrics: Vec<MetricTarget> = configs
        .iter()
        .find_map(|c| c.as_ref().ok())
        .map_or_else(SimConfig::default_metrics, |c| c.metrics.clone());

    let mut header: Vec<String> = vec!["cell_index".into()];
    header.extend(grid.axes().iter().map(|a| a.name.clone()));
    header.push("status".into());
    header.push("runs".into());
    for m in &metrics {
        header.extend(STAT_COLUMNS.iter().map(|c| format!("{}_{c}", m.name())));
    }
    let mut table = Table::new(&header)?;

    for (index, (cell, cfg)) in grid.cells().into_iter().zip(configs).enumerate() {
        let outcome: Result<EnsembleStats, CliError> =
            cfg.and_then(|c| run_ensemble(&c).map(|(_, s)| s).map_err(CliError::from));
        let mut row = vec![index.to_string()];
        row.extend(cell.iter().map(|(_, v)| cell_text(v)));
        match outcome {
            Ok(stats) => {
                row.push("ok".into());
                row.push(stats.runs.to_string());
                for m in &metrics {
                    match stats.metric(m) {
                        Some(s) => row.extend(stat_cells(s)),
                        None => row.extend(STAT_COLUMNS.iter().map(|_| String::new())),
                    }
                }
            }
            Err(e) => {
                row.push(format!("error: {e}"));
                row.push(String::new());
                row.extend((0..metrics.len() * STAT_COLUMNS.len()).map(|_| String::new()));
            }
        }
        table.row(row)?;
    }
    Ok(vec![write_atomic(
        out,
        SWEEP_SUMMARY_CSV,
        &table.into_bytes()?,
    )?])
}

/// Reads a series CSV with header `t,value` or `value`.
pub fn read_series(path: &Path) -> Result<Vec<f64>, CliError> {
    let file =
        std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let bad = |line: u64, reason: String| {
        CliError::Validation(format!("{}: line {line}: {reason}", path.display()))
    };
    let headers = reader.headers()?.clone();
    let with_t = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["t", "value"] => true,
        ["value"] => false,
        _ => {
            return Err(bad(
                1,
                format!(
                    "expected header \"t,value\" or \"value\", got {:?}",
                    headers.as_slice()
                ),
            ))
        }
    };
    let mut values = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let parse = |s: &str, what: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(line, format!("{what} {s:?} is not a finite number")))
        };
        if with_t {
            let t = parse(&record[0], "t")?;
            if t <= last_t {
                return Err(bad(
                    line,
                    format!("t must increase strictly (got {t} after {last_t})"),
                ));
            }
            last_t = t;
            values.push(parse(&record[1], "value")?);
        } else {
            values.push(parse(&record[0], "value")?);
        }
    }
    Ok(values)
}

pub fn load_reference(path: Option<&Path>) -> Result<ReferenceConfig, CliError> {
    match path {
        None => Ok(ReferenceConfig::shipped()),
        Some(p) => config::parse_reference_config(config::read_document(p)?, p.parent()),
    }
}

/// Fits a series against the three reference curves and writes `fit.csv`
/// and `references.csv`.
pub fn cmd_fit(
    series: &Path,
    out: &Path,
    reference: Option<&Path>,
) -> Result<Vec<PathBuf>, CliError> {
    let values = read_series(series)?;
    let obs = normalize_series(&values)
        .map_err(|e| CliError::Validation(format!("{}: {e}", series.display())))?;
    let reference = load_reference(reference)?;
    let curves = build_reference_curves(&reference)?;
    let result = fit_series(&obs, &curves, &FitGrid::default())
        .map_err(|e| CliError::Validation(format!("{}: {e}", series.display())))?;
    if result.low_confidence {
        eprintln!("warning: the series is constant; the model choice is low-confidence");
    }

    let mut fit = Table::new([
        "model",
        "sse",
        "time_scale",
        "time_offset",
        "amplitude",
        "best",
    ])?;
    for m in &result.per_model {
        fit.row([
            m.model.name().to_string(),
            fmt_f64(Some(m.sse)),
            fmt_f64(Some(m.params.time_scale)),
            fmt_f64(Some(m.params.time_offset)),
            fmt_f64(Some(m.params.amplitude)),
            flag(m.model == result.best_model).to_string(),
        ])?;
    }
    let mut refs = Table::new(["model", "fingerprint", "t", "value"])?;
    for c in &curves {
        let fp = format!("{:016x}", c.fingerprint);
        for (t, v) in c.curve.iter().enumerate() {
            refs.row([
                c.model.name().to_string(),
                fp.clone(),
                t.to_string(),
                fmt_f64(Some(*v)),
            ])?;
        }
    }
    Ok(vec![
        write_atomic(out, REFERENCES_CSV, &refs.into_bytes()?)?,
        write_atomic(out, FIT_CSV, &fit.into_bytes()?)?,
    ])
}

/// Builds the configured graph from the shared-graph stream and writes it
/// as an edge list.
pub fn cmd_gen_graph(
    config_path: &Path,
    out: &Path,
    overrides: &[String],
) -> Result<Vec<PathBuf>, CliError> {
    let mut doc = config::read_document(config_path)?;
    config::apply_overrides(&mut doc, overrides)?;
    let cfg = config::parse_graph_config(doc, config_path.parent())?;
    let mut rng = derive_run_rng(cfg.master_seed, SHARED_GRAPH_STREAM);
    let graph = cfg.graph.generate(&mut rng)?;
    let mut bytes = Vec::new();
    graph.save_edge_list(&mut bytes)?;
    Ok(vec![write_atomic(out, EDGE_LIST, &bytes)?])
}

#[derive(Deserialize)]
struct RunRow {
    run_index: usize,
    n: usize,
    steps_executed: usize,
}

#[derive(Deserialize)]
struct TrajectoryRow {
    run_index: usize,
    t: usize,
    infected: u64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let file =
        std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| match CliError::from(e) {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Default)]
struct Welford {
    k: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.k += 1;
        let d = x - self.mean;
        self.mean += d / self.k as f64;
        self.m2 += d * (x - self.mean);
    }

    fn std(&self) -> f64 {
        if self.k > 1 {
            (self.m2 / (self.k - 1) as f64).sqrt()
        } else {
            0.0
        }
    }
}

/// Aggregates `runs.csv` and `trajectories.csv` from a run directory into a
/// per-step mean/std adoption curve. Runs that stopped early hold their
/// final count up to the longest run.
pub fn cmd_report(input: &Path, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let runs: Vec<RunRow> = read_rows(&input.join(RUNS_CSV))?;
    let rows: Vec<TrajectoryRow> = read_rows(&input.join(TRAJECTORIES_CSV))?;
    if runs.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no runs",
            input.join(RUNS_CSV).display()
        )));
    }
    let invalid = |msg: String| {
        CliError::Validation(format!("{}: {msg}", input.join(TRAJECTORIES_CSV).display()))
    };

    let mut points: BTreeMap<usize, Vec<(usize, u64)>> =
        runs.iter().map(|r| (r.run_index, Vec::new())).collect();
    for row in rows {
        let list = points
            .get_mut(&row.run_index)
            .ok_or_else(|| invalid(format!("run {} is not listed in runs.csv", row.run_index)))?;
        if list.last().is_some_and(|&(t, _)| t >= row.t) {
            return Err(invalid(format!(
                "run {}: steps out of order",
                row.run_index
            )));
        }
        list.push((row.t, row.infected));
    }
    let horizon = runs.iter().map(|r| r.steps_executed).max().unwrap_or(0);

    let mut counts = vec![Welford::default(); horizon + 1];
    let mut fractions = vec![Welford::default(); horizon + 1];
    let by_index: BTreeMap<usize, &RunRow> = runs.iter().map(|r| (r.run_index, r)).collect();
    for (index, list) in &points {
        let run = by_index[index];
        if list.first().map(|p| p.0) != Some(0) {
            return Err(invalid(format!("run {index}: missing the t = 0 row")));
        }
        let mut next = 0;
        let mut current = 0u64;
        for t in 0..=horizon {
            while next < list.len() && list[next].0 == t {
                current = list[next].1;
                next += 1;
            }
            counts[t].push(current as f64);
            fractions[t].push(current as f64 / run.n as f64);
        }
        if next < list.len() {
            return Err(invalid(format!("run {index}: rows beyond the longest run")));
        }
    }

    let mut table = Table::new([
        "t",
        "mean_infected",
        "std_infected",
        "mean_fraction",
        "std_fraction",
        "runs",
    ])?;
    for (t, (c, f)) in counts.iter().zip(&fractions).enumerate() {
        table.row([
            t.to_string(),
            fmt_f64(Some(c.mean)),
            fmt_f64(Some(c.std())),
            fmt_f64(Some(f.mean)),
            fmt_f64(Some(f.std())),
            c.k.to_string(),
        ])?;
    }
    Ok(vec![write_atomic(out, CURVE_CSV, &table.into_bytes()?)?])
}
