//! Reproducible ensembles, parameter sweeps and the exact Global-model oracle.
//!
//! # Random streams
//!
//! Every run owns a ChaCha8 stream derived from `(master_seed, run_index)`:
//!
//! 1. Four successive SplitMix64 outputs, seeded with `master_seed`, are
//!    written little-endian into a 32-byte ChaCha key.
//! 2. The ChaCha stream id is set to `run_index`.
//!
//! Within a run the stream is consumed in a fixed order: graph generation
//! (only when the graph is regenerated per run and the generator is random),
//! seed selection, then the dynamics. A graph shared by all runs is built from
//! stream id [`SHARED_GRAPH_STREAM`] of the same key. Runs may execute in any
//! order or in parallel; results are collected by run index, so output depends
//! only on the configuration.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{self, ModelKind, UpdateScheme};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSpec, NodeId};
use crate::metrics::{self, MetricResult, Trajectory};

pub type SimRng = ChaCha8Rng;

/// Stream id used for a graph shared across all runs of an ensemble.
pub const SHARED_GRAPH_STREAM: u64 = u64::MAX;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent, deterministic random stream for one run.
pub fn derive_run_rng(master_seed: u64, run_index: u64) -> SimRng {
    let mut state = master_seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(run_index);
    rng
}

/// A measurement taken on every run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricTarget {
    /// Time until a fraction of the network is infected.
    Fraction(f64),
    /// Time from reaching the lower fraction to reaching the upper one.
    Spread(f64, f64),
}

impl MetricTarget {
    pub fn evaluate(&self, traj: &Trajectory) -> Result<MetricResult> {
        match *self {
            MetricTarget::Fraction(f) => metrics::time_to_fraction(traj, f),
            MetricTarget::Spread(lo, hi) => metrics::spread_time(traj, lo, hi),
        }
    }

    pub fn validate(&self) -> Result<()> {
        // an empty trajectory is enough to exercise the argument checks
        let probe = Trajectory::from_counts(1, vec![1])?;
        self.evaluate(&probe).map(|_| ())
    }

    /// Column-friendly name: `t_to_pct1`, `t_1_to_99`, ...
    pub fn name(&self) -> String {
        match *self {
            MetricTarget::Fraction(f) => format!("t_to_pct{}", pct(f)),
            MetricTarget::Spread(lo, hi) => format!("t_{}_to_{}", pct(lo), pct(hi)),
        }
    }
}

fn pct(f: f64) -> String {
    let p = f * 100.0;
    let r = p.round();
    if (p - r).abs() < 1e-9 {
        format!("{}", r as i64)
    } else {
        format!("{p}")
    }
}

impl fmt::Display for MetricTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Full parameterisation of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub graph: GraphSpec,
    pub model: ModelKind,
    pub scheme: UpdateScheme,
    pub seed_count: usize,
    pub runs: usize,
    pub max_steps: usize,
    pub master_seed: u64,
    pub regenerate_graph_per_run: bool,
    pub metrics: Vec<MetricTarget>,
}

impl SimConfig {
    pub fn default_metrics() -> Vec<MetricTarget> {
        vec![
            MetricTarget::Fraction(0.01),
            MetricTarget::Spread(0.01, 0.99),
        ]
    }

    /// Defaults: synchronous, one seed, one run, `max_steps = 200 n`,
    /// graph regenerated per run, time-to-1% and 1%-99% spread.
    ///
    /// File-backed graphs have no known `n` here; `max_steps` is left at 0 and
    /// must be set before use.
    pub fn new(graph: GraphSpec, model: ModelKind) -> Self {
        let max_steps = graph.node_count().map_or(0, |n| 200 * n);
        SimConfig {
            graph,
            model,
            scheme: UpdateScheme::Synchronous,
            seed_count: 1,
            runs: 1,
            max_steps,
            master_seed: 0,
            regenerate_graph_per_run: true,
            metrics: Self::default_metrics(),
        }
    }

    /// Desk-scale documentation default: WS n=1000, k=10, beta=0.05.
    pub fn default_small_world(model: ModelKind) -> Self {
        Self::new(
            GraphSpec::WattsStrogatz {
                n: 1000,
                k: 10,
                beta: 0.05,
            },
            model,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        self.model.validate()?;
        if self.runs == 0 {
            return Err(Error::invalid("runs", "must be at least 1"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be at least 1"));
        }
        if let Some(n) = self.graph.node_count() {
            self.check_seed_count(n)?;
        }
        for m in &self.metrics {
            m.validate()?;
        }
        Ok(())
    }

    fn check_seed_count(&self, n: usize) -> Result<()> {
        if self.seed_count == 0 || self.seed_count > n {
            return Err(Error::invalid(
                "seed_count",
                format!("must lie in [1, {n}], got {}", self.seed_count),
            ));
        }
        Ok(())
    }

    fn shared_graph(&self) -> Result<Option<Graph>> {
        if self.regenerate_graph_per_run && self.graph.is_random() {
            return Ok(None);
        }
        let mut rng = derive_run_rng(self.master_seed, SHARED_GRAPH_STREAM);
        let g = self.graph.generate(&mut rng)?;
        self.check_seed_count(g.node_count())?;
        Ok(Some(g))
    }
}

/// The spreading times reported for every run regardless of configured
/// metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandardTimes {
    pub to_1pct: MetricResult,
    pub to_99pct: MetricResult,
    pub spread_1_99: MetricResult,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub run_index: usize,
    pub graph_fingerprint: u64,
    pub seeds: Vec<NodeId>,
    /// One entry per configured metric, in configuration order.
    pub metrics: Vec<MetricResult>,
    pub standard: StandardTimes,
    pub final_infected: usize,
    pub steps_executed: usize,
}

/// Aggregate of one metric over an ensemble. Statistics cover uncensored
/// runs only; censored runs are tallied separately.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricStats {
    pub target: MetricTarget,
    pub uncensored: usize,
    pub censored: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std: Option<f64>,
    /// `std / mean`, only for `mean > 0`.
    pub cv: Option<f64>,
    pub min: Option<usize>,
    pub max: Option<usize>,
}

impl MetricStats {
    pub fn from_results(
        target: MetricTarget,
        results: impl IntoIterator<Item = MetricResult>,
    ) -> Self {
        let mut censored = 0;
        let mut values = Vec::new();
        for r in results {
            match r {
                MetricResult::Value(v) => values.push(v),
                MetricResult::Censored(_) => censored += 1,
            }
        }
        let k = values.len();
        let (mean, std) = if k == 0 {
            (None, None)
        } else {
            let mean = values.iter().map(|&v| v as f64).sum::<f64>() / k as f64;
            let std = if k > 1 {
                let ss: f64 = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
                (ss / (k - 1) as f64).sqrt()
            } else {
                0.0
            };
            (Some(mean), Some(std))
        };
        let cv = match (mean, std) {
            (Some(m), Some(s)) if m > 0.0 => Some(s / m),
            _ => None,
        };
        MetricStats {
            target,
            uncensored: k,
            censored,
            mean,
            std,
            cv,
            min: values.iter().copied().min(),
            max: values.iter().copied().max(),
        }
    }

    pub fn runs(&self) -> usize {
        self.uncensored + self.censored
    }

    /// Standard error of the mean over uncensored runs.
    pub fn std_error(&self) -> Option<f64> {
        self.std.map(|s| s / (self.uncensored as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub runs: usize,
    pub metrics: Vec<MetricStats>,
}

impl EnsembleStats {
    pub fn from_records(targets: &[MetricTarget], records: &[RunRecord]) -> Self {
        let metrics = targets
            .iter()
            .enumerate()
            .map(|(i, &t)| MetricStats::from_results(t, records.iter().map(|r| r.metrics[i])))
            .collect();
        EnsembleStats {
            runs: records.len(),
            metrics,
        }
    }

    pub fn metric(&self, target: &MetricTarget) -> Option<&MetricStats> {
        self.metrics.iter().find(|m| &m.target == target)
    }
}

/// Output of one ensemble where every run also yields a caller-defined value.
#[derive(Debug, Clone)]
pub struct EnsembleOutput<T> {
    pub records: Vec<RunRecord>,
    pub extras: Vec<T>,
    pub stats: EnsembleStats,
}

fn execute_run(
    config: &SimConfig,
    shared: Option<&Graph>,
    run_index: usize,
) -> Result<(RunRecord, Trajectory)> {
    let mut rng = derive_run_rng(config.master_seed, run_index as u64);
    let owned;
    let g = match shared {
        Some(g) => g,
        None => {
            owned = config.graph.generate(&mut rng)?;
            &owned
        }
    };
    let seeds = dynamics::seed_random(g, config.seed_count, &mut rng)?;
    let traj = dynamics::run(
        config.model,
        g,
        &seeds,
        config.scheme,
        config.max_steps,
        &mut rng,
    )?;
    let metrics = config
        .metrics
        .iter()
        .map(|m| m.evaluate(&traj))
        .collect::<Result<Vec<_>>>()?;
    let standard = StandardTimes {
        to_1pct: metrics::time_to_fraction(&traj, 0.01)?,
        to_99pct: metrics::time_to_fraction(&traj, 0.99)?,
        spread_1_99: metrics::spread_time(&traj, 0.01, 0.99)?,
    };
    let record = RunRecord {
        run_index,
        graph_fingerprint: g.fingerprint(),
        seeds: seeds.nodes().to_vec(),
        metrics,
        standard,
        final_infected: traj.final_count(),
        steps_executed: traj.steps(),
    };
    Ok((record, traj))
}

/// Runs the ensemble and maps each trajectory through `extract`.
///
/// Runs execute on the current rayon pool; output is ordered by run index
/// and independent of the pool size.
pub fn run_ensemble_with<T, F>(config: &SimConfig, extract: F) -> Result<EnsembleOutput<T>>
where
    T: Send,
    F: Fn(&RunRecord, &Trajectory) -> T + Sync,
{
    config.validate()?;
    let shared = config.shared_graph()?;
    let results: Vec<(RunRecord, T)> = (0..config.runs)
        .into_par_iter()
        .map(|i| {
            let (record, traj) = execute_run(config, shared.as_ref(), i)?;
            let extra = extract(&record, &traj);
            Ok((record, extra))
        })
        .collect::<Result<_>>()?;
    let (records, extras): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let stats = EnsembleStats::from_records(&config.metrics, &records);
    Ok(EnsembleOutput {
        records,
        extras,
        stats,
    })
}

pub fn run_ensemble(config: &SimConfig) -> Result<(Vec<RunRecord>, EnsembleStats)> {
    let out = run_ensemble_with(config, |_, _| ())?;
    Ok((out.records, out.stats))
}

/// Pointwise mean of the runs' adoption curves; shorter runs are extended
/// with their final value.
pub fn mean_adoption_curve(config: &SimConfig) -> Result<Vec<f64>> {
    let out = run_ensemble_with(config, |_, traj| metrics::adoption_curve(traj))?;
    let len = out.extras.iter().map(Vec::len).max().unwrap_or(0);
    let mut mean = vec![0.0; len];
    for curve in &out.extras {
        let last = *curve.last().unwrap();
        for (t, m) in mean.iter_mut().enumerate() {
            *m += curve.get(t).copied().unwrap_or(last);
        }
    }
    let runs = out.extras.len() as f64;
    mean.iter_mut().for_each(|m| *m /= runs);
    Ok(mean)
}

/// One sweep dimension: a named field and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis<V> {
    pub name: String,
    pub values: Vec<V>,
}

/// Cartesian grid; the first axis varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<V> {
    axes: Vec<Axis<V>>,
}

impl<V: Clone> Grid<V> {
    pub fn new(axes: Vec<Axis<V>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("grid", "sweep grid has no axes"));
        }
        if let Some(a) = axes.iter().find(|a| a.values.is_empty()) {
            return Err(Error::invalid(a.name.clone(), "sweep axis has no values"));
        }
        Ok(Grid { axes })
    }

    pub fn axes(&self) -> &[Axis<V>] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All cells in lexicographic order over the declared axis order.
    pub fn cells(&self) -> Vec<Vec<(&str, V)>> {
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; self.axes.len()];
        loop {
            out.push(
                self.axes
                    .iter()
                    .zip(&idx)
                    .map(|(a, &i)| (a.name.as_str(), a.values[i].clone()))
                    .collect(),
            );
            let mut d = self.axes.len();
            loop {
                if d == 0 {
                    return out;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.axes[d].values.len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepCell<V> {
    pub index: usize,
    pub assignment: Vec<(String, V)>,
    /// Ensemble statistics, or the error that stopped this cell.
    pub outcome: std::result::Result<EnsembleStats, String>,
}

/// Runs one ensemble per grid cell. `build` turns a cell assignment into a
/// configuration; a failure in one cell is recorded and the sweep continues.
pub fn sweep<V, B>(grid: &Grid<V>, build: B) -> Vec<SweepCell<V>>
where
    V: Clone,
    B: Fn(&[(&str, V)]) -> Result<SimConfig>,
{
    grid.cells()
        .into_iter()
        .enumerate()
        .map(|(index, cell)| {
            let outcome = build(&cell)
                .and_then(|cfg| run_ensemble(&cfg))
                .map(|(_, stats)| stats)
                .map_err(|e| e.to_string());
            SweepCell {
                index,
                assignment: cell.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
                outcome,
            }
        })
        .collect()
}

/// Exact distribution of the synchronous Global-model infected count.
///
/// The count is a Markov chain on `{0..n}` with
/// `I(t+1) = I(t) + Binomial(n - I(t), I(t) / n)`.
#[derive(Debug, Clone)]
pub struct GlobalCountDp {
    n: usize,
    /// `dist[t][i] = P(I_t = i)`
    dist: Vec<Vec<f64>>,
}

impl GlobalCountDp {
    pub fn distribution(&self, t: usize) -> &[f64] {
        &self.dist[t]
    }

    pub fn steps(&self) -> usize {
        self.dist.len() - 1
    }

    pub fn mean(&self, t: usize) -> f64 {
        self.dist[t]
            .iter()
            .enumerate()
            .map(|(i, p)| i as f64 * p)
            .sum()
    }

    pub fn variance(&self, t: usize) -> f64 {
        let m = self.mean(t);
        self.dist[t]
            .iter()
            .enumerate()
            .map(|(i, p)| (i as f64 - m).powi(2) * p)
            .sum()
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.dist.len()).map(|t| self.mean(t)).collect()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }
}

/// Propagates the exact count distribution for `steps` steps from `i0`
/// infected nodes. `O(steps * n^2)`.
pub fn global_count_dp(n: usize, i0: usize, steps: usize) -> Result<GlobalCountDp> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if i0 > n {
        return Err(Error::invalid(
            "i0",
            format!("must lie in [0, {n}], got {i0}"),
        ));
    }
    let mut ln_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }

    // transition rows, computed lazily per occupied state
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; n + 1];
    let row = |i: usize| -> Vec<f64> {
        let m = n - i;
        let p = i as f64 / n as f64;
        let mut pmf = vec![0.0; m + 1];
        if i == 0 || m == 0 {
            pmf[0] = 1.0;
            return pmf;
        }
        let (lp, lq) = (p.ln(), (1.0 - p).ln());
        for (k, slot) in pmf.iter_mut().enumerate() {
            let ln_c = ln_fact[m] - ln_fact[k] - ln_fact[m - k];
            *slot = (ln_c + k as f64 * lp + (m - k) as f64 * lq).exp();
        }
        pmf
    };

    let mut dist = Vec::with_capacity(steps + 1);
    let mut cur = vec![0.0; n + 1];
    cur[i0] = 1.0;
    dist.push(cur.clone());
    for _ in 0..steps {
        let mut next = vec![0.0; n + 1];
        for (i, &mass) in cur.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let pmf = rows[i].get_or_insert_with(|| row(i));
            for (k, &q) in pmf.iter().enumerate() {
                next[i + k] += mass * q;
            }
        }
        dist.push(next.clone());
        cur = next;
    }
    Ok(GlobalCountDp { n, dist })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn cycle_config(n: usize, model: ModelKind) -> SimConfig {
        SimConfig::new(GraphSpec::DirectedCycle { n }, model)
    }

    #[test]
    fn run_streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = derive_run_rng(42, 0).random_iter().take(1000).collect();
        let b: Vec<u64> = derive_run_rng(42, 0).random_iter().take(1000).collect();
        let c: Vec<u64> = derive_run_rng(42, 1).random_iter().take(1000).collect();
        let d: Vec<u64> = derive_run_rng(43, 0).random_iter().take(1000).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn run_streams_are_uniform() {
        for idx in [0u64, 1, 7, 1 << 40] {
            let mut rng = derive_run_rng(2024, idx);
            let mean: f64 = (0..100_000).map(|_| rng.random::<f64>()).sum::<f64>() / 1e5;
            assert!((0.49..=0.51).contains(&mean), "{idx}: {mean}");
        }
    }

    #[test]
    fn cycle_ensemble_is_deterministic() {
        let mut cfg = cycle_config(50, ModelKind::Group);
        cfg.runs = 10;
        cfg.metrics = vec![MetricTarget::Fraction(1.0)];
        let (records, stats) = run_ensemble(&cfg).unwrap();
        assert_eq!(records.len(), 10);
        assert!(records
            .iter()
            .all(|r| r.metrics[0] == MetricResult::Value(49)));
        let m = &stats.metrics[0];
        assert_eq!(m.mean, Some(49.0));
        assert_eq!(m.std, Some(0.0));
        assert_eq!(m.censored, 0);
    }

    #[test]
    fn two_node_global_mean() {
        let mut cfg = SimConfig::new(GraphSpec::Complete { n: 2 }, ModelKind::Global);
        cfg.runs = 10_000;
        cfg.master_seed = 5;
        cfg.metrics = vec![MetricTarget::Fraction(1.0)];
        let (_, stats) = run_ensemble(&cfg).unwrap();
        let mean = stats.metrics[0].mean.unwrap();
        assert!((mean - 2.0).abs() <= 0.1, "{mean}");
    }

    #[test]
    fn single_run_stats() {
        let mut cfg = cycle_config(8, ModelKind::Group);
        cfg.metrics = vec![MetricTarget::Fraction(0.5)];
        let (records, stats) = run_ensemble(&cfg).unwrap();
        let v = records[0].metrics[0].value().unwrap();
        assert_eq!(stats.metrics[0].mean, Some(v as f64));
        assert_eq!(stats.metrics[0].std, Some(0.0));
    }

    #[test]
    fn censored_runs_are_excluded() {
        let stats = MetricStats::from_results(
            MetricTarget::Fraction(0.5),
            [
                MetricResult::Value(10),
                MetricResult::Censored(99),
                MetricResult::Value(20),
            ],
        );
        assert_eq!(stats.censored, 1);
        assert_eq!(stats.uncensored, 2);
        assert_eq!(stats.mean, Some(15.0));
        assert_eq!(stats.min, Some(10));
        assert_eq!(stats.max, Some(20));
        let all_censored =
            MetricStats::from_results(MetricTarget::Fraction(0.5), [MetricResult::Censored(3)]);
        assert_eq!(all_censored.mean, None);
        assert_eq!(all_censored.cv, None);
        let zero = MetricStats::from_results(MetricTarget::Fraction(0.5), [MetricResult::Value(0)]);
        assert_eq!(zero.cv, None);
    }

    #[test]
    fn truncated_runs_are_censored() {
        let mut cfg = cycle_config(50, ModelKind::Group);
        cfg.max_steps = 10;
        cfg.runs = 3;
        let (records, stats) = run_ensemble(&cfg).unwrap();
        assert!(records
            .iter()
            .all(|r| r.steps_executed == 10 && r.final_infected == 11));
        assert_eq!(stats.metrics[1].censored, 3);
    }

    #[test]
    fn output_independent_of_thread_count() {
        let mut cfg = SimConfig::new(
            GraphSpec::WattsStrogatz {
                n: 200,
                k: 6,
                beta: 0.1,
            },
            ModelKind::Group,
        );
        cfg.runs = 24;
        cfg.master_seed = 77;
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| run_ensemble(&cfg)).unwrap();
        let b = four.install(|| run_ensemble(&cfg)).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn shared_graph_mode() {
        let mut cfg = SimConfig::new(
            GraphSpec::WattsStrogatz {
                n: 100,
                k: 4,
                beta: 0.2,
            },
            ModelKind::Global,
        );
        cfg.runs = 5;
        cfg.regenerate_graph_per_run = false;
        let (records, _) = run_ensemble(&cfg).unwrap();
        assert!(records
            .windows(2)
            .all(|w| w[0].graph_fingerprint == w[1].graph_fingerprint));
        cfg.regenerate_graph_per_run = true;
        let (records, _) = run_ensemble(&cfg).unwrap();
        assert!(records
            .windows(2)
            .any(|w| w[0].graph_fingerprint != w[1].graph_fingerprint));
    }

    #[test]
    fn config_validation() {
        let mut cfg = cycle_config(10, ModelKind::Group);
        cfg.runs = 0;
        assert!(run_ensemble(&cfg).is_err());
        let mut cfg = cycle_config(10, ModelKind::Group);
        cfg.seed_count = 11;
        assert!(run_ensemble(&cfg).is_err());
        let mut cfg = cycle_config(10, ModelKind::Group);
        cfg.metrics = vec![MetricTarget::Spread(0.9, 0.1)];
        assert!(run_ensemble(&cfg).is_err());
    }

    #[test]
    fn metric_names() {
        assert_eq!(MetricTarget::Fraction(0.01).name(), "t_to_pct1");
        assert_eq!(MetricTarget::Fraction(1.0).name(), "t_to_pct100");
        assert_eq!(MetricTarget::Spread(0.01, 0.99).name(), "t_1_to_99");
        assert_eq!(MetricTarget::Fraction(0.125).name(), "t_to_pct12.5");
    }

    #[test]
    fn grid_order_and_validation() {
        let grid = Grid::new(vec![
            Axis {
                name: "n".into(),
                values: vec![10, 20],
            },
            Axis {
                name: "model".into(),
                values: vec![0, 1],
            },
        ])
        .unwrap();
        let cells: Vec<Vec<i32>> = grid
            .cells()
            .into_iter()
            .map(|c| c.into_iter().map(|(_, v)| v).collect())
            .collect();
        assert_eq!(
            cells,
            vec![vec![10, 0], vec![10, 1], vec![20, 0], vec![20, 1]]
        );
        assert!(Grid::<i32>::new(vec![]).is_err());
        assert!(Grid::<i32>::new(vec![Axis {
            name: "n".into(),
            values: vec![]
        }])
        .is_err());
    }

    #[test]
    fn sweep_runs_each_cell() {
        let grid = Grid::new(vec![Axis {
            name: "model".into(),
            values: vec![ModelKind::Group, ModelKind::Global],
        }])
        .unwrap();
        let cells = sweep(&grid, |cell| {
            let mut cfg = cycle_config(20, cell[0].1);
            cfg.runs = 3;
            Ok(cfg)
        });
        assert_eq!(cells.len(), 2);
        assert!(cells.iter().all(|c| c.outcome.is_ok()));
    }

    #[test]
    fn sweep_records_failures() {
        let grid = Grid::new(vec![Axis {
            name: "n".into(),
            values: vec![1usize, 10],
        }])
        .unwrap();
        let cells = sweep(&grid, |cell| Ok(cycle_config(cell[0].1, ModelKind::Group)));
        assert!(cells[0].outcome.is_err());
        assert!(cells[1].outcome.is_ok());
    }

    #[test]
    fn dp_degenerate_starts() {
        let empty = global_count_dp(50, 0, 10).unwrap();
        assert!(empty.means().iter().all(|&m| m == 0.0));
        let full = global_count_dp(50, 50, 10).unwrap();
        assert!(full.means().iter().all(|&m| m == 50.0));
        assert!(global_count_dp(50, 51, 10).is_err());
    }

    #[test]
    fn dp_conserves_probability() {
        let dp = global_count_dp(200, 2, 30).unwrap();
        for t in 0..=30 {
            let total: f64 = dp.distribution(t).iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "t={t}: {total}");
        }
    }

    #[test]
    fn dp_expected_increment() {
        // E[dI | I = i] = (n - i) i / n, exactly one step from a point mass
        let n = 40;
        for i in [1usize, 7, 20, 39] {
            let dp = global_count_dp(n, i, 1).unwrap();
            let expected = i as f64 + (n - i) as f64 * i as f64 / n as f64;
            assert!((dp.mean(1) - expected).abs() < 1e-9);
        }
    }
}
