//! JSON configuration documents and `key=value` overrides.
//!
//! A run configuration looks like
//!
//! ```json
//! {
//!   "model": "group",
//!   "graph": { "type": "ws", "n": 100, "k": 4, "beta": 0.1 },
//!   "master_seed": 7
//! }
//! ```
//!
//! Optional keys: `tau_c` (required for `"fixed"`), `scheme`
//! (`"synchronous"` or `"async_single_node"`), `seed_count`, `runs`,
//! `max_steps` (default `200 * n`), `regenerate_graph_per_run` and `metrics`
//! (a list whose entries are a fraction `f` or a pair `[f_lo, f_hi]`).
//! Unknown keys are rejected. Overrides address keys by dotted path
//! (`graph.n=500`) and are applied to the document, in order, before it is
//! validated.

use std::path::{Path, PathBuf};

use diffusim_core::{GraphSpec, MetricTarget, ModelKind, ReferenceConfig, SimConfig, UpdateScheme};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<String>,
    tau_c: Option<f64>,
    graph: RawGraph,
    scheme: Option<String>,
    seed_count: Option<usize>,
    runs: Option<usize>,
    max_steps: Option<usize>,
    master_seed: u64,
    regenerate_graph_per_run: Option<bool>,
    metrics: Option<Vec<RawMetric>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
enum RawGraph {
    #[serde(rename = "ws", alias = "watts_strogatz")]
    WattsStrogatz { n: usize, k: usize, beta: f64 },
    #[serde(rename = "ba", alias = "barabasi_albert")]
    BarabasiAlbert {
        n: usize,
        m0: Option<usize>,
        m_attach: usize,
    },
    #[serde(rename = "complete")]
    Complete { n: usize },
    #[serde(rename = "cycle", alias = "directed_cycle")]
    DirectedCycle { n: usize },
    #[serde(rename = "file")]
    File { path: PathBuf },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawMetric {
    Fraction(f64),
    Spread([f64; 2]),
}

/// Sweep document: a base configuration and an ordered list of axes.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDocument {
    pub base: Value,
    pub grid: Vec<SweepAxis>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<Value>,
}

/// Parses `key=value`; the value is JSON when it parses as JSON and a plain
/// string otherwise.
pub fn parse_override(text: &str) -> Result<(String, Value), CliError> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| CliError::Validation(format!("override {text:?} is not key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::Validation(format!(
            "override {text:?} has an empty key"
        )));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

/// Sets `path` (dotted) in `doc`, creating intermediate objects.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<(), CliError> {
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = cur.as_object_mut().ok_or_else(|| {
            CliError::Validation(format!(
                "cannot set `{path}`: `{}` is not an object",
                parts[..i].join(".")
            ))
        })?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split always yields at least one part")
}

pub fn apply_overrides(doc: &mut Value, overrides: &[String]) -> Result<(), CliError> {
    for o in overrides {
        let (key, value) = parse_override(o)?;
        set_path(doc, &key, value)?;
    }
    Ok(())
}

pub fn read_document(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn graph_key(name: &str) -> String {
    match name {
        "n" | "k" | "beta" | "m0" | "m_attach" | "path" => format!("graph.{name}"),
        other => other.to_string(),
    }
}

/// Maps a core validation error onto the config key it concerns.
pub(crate) fn keyed(err: diffusim_core::Error) -> CliError {
    match err {
        diffusim_core::Error::InvalidParameter { name, reason } => {
            CliError::Validation(format!("`{}`: {reason}", graph_key(&name)))
        }
        diffusim_core::Error::Io(e) => CliError::Io(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

fn parse_model(name: Option<&str>, tau_c: Option<f64>) -> Result<ModelKind, CliError> {
    match name {
        None => Err(CliError::Validation("`model`: missing".into())),
        Some("group") => Ok(ModelKind::Group),
        Some("global") => Ok(ModelKind::Global),
        Some("fixed") => {
            let tau = tau_c.ok_or_else(|| {
                CliError::Validation("`tau_c`: required when model is \"fixed\"".into())
            })?;
            ModelKind::fixed(tau).map_err(keyed)
        }
        Some(other) => Err(CliError::Validation(format!(
            "`model`: unknown model {other:?} (expected fixed, group or global)"
        ))),
    }
}

fn parse_scheme(name: Option<&str>) -> Result<UpdateScheme, CliError> {
    match name {
        None | Some("synchronous") | Some("sync") => Ok(UpdateScheme::Synchronous),
        Some("async_single_node") | Some("async") => Ok(UpdateScheme::AsyncSingleNode),
        Some(other) => Err(CliError::Validation(format!(
            "`scheme`: unknown scheme {other:?} (expected synchronous or async_single_node)"
        ))),
    }
}

fn graph_spec(raw: RawGraph, base_dir: Option<&Path>) -> GraphSpec {
    match raw {
        RawGraph::WattsStrogatz { n, k, beta } => GraphSpec::WattsStrogatz { n, k, beta },
        RawGraph::BarabasiAlbert { n, m0, m_attach } => GraphSpec::BarabasiAlbert {
            n,
            m0: m0.unwrap_or(m_attach),
            m_attach,
        },
        RawGraph::Complete { n } => GraphSpec::Complete { n },
        RawGraph::DirectedCycle { n } => GraphSpec::DirectedCycle { n },
        RawGraph::File { path } => {
            let path = match base_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path,
            };
            GraphSpec::File { path }
        }
    }
}

/// Parsed document that may omit `model` (graph generation, reference
/// curves).
struct Partial {
    model: Option<String>,
    tau_c: Option<f64>,
    config: SimConfig,
}

fn parse_partial(doc: Value, base_dir: Option<&Path>) -> Result<Partial, CliError> {
    let raw: RawConfig =
        serde_json::from_value(doc).map_err(|e| CliError::Validation(format!("config: {e}")))?;
    let graph = graph_spec(raw.graph, base_dir);
    graph.validate().map_err(keyed)?;
    let scheme = parse_scheme(raw.scheme.as_deref())?;

    let max_steps = match raw.max_steps {
        Some(m) => m,
        None => {
            let n = match graph.node_count() {
                Some(n) => n,
                None => {
                    // file graphs: the header gives n
                    let mut rng = diffusim_core::derive_run_rng(0, 0);
                    graph.generate(&mut rng).map_err(keyed)?.node_count()
                }
            };
            200 * n
        }
    };

    let metrics = match raw.metrics {
        None => SimConfig::default_metrics(),
        Some(list) if list.is_empty() => {
            return Err(CliError::Validation("`metrics`: list is empty".into()))
        }
        Some(list) => list
            .into_iter()
            .map(|m| match m {
                RawMetric::Fraction(f) => MetricTarget::Fraction(f),
                RawMetric::Spread([lo, hi]) => MetricTarget::Spread(lo, hi),
            })
            .collect(),
    };
    for m in &metrics {
        m.validate()
            .map_err(|e| CliError::Validation(format!("`metrics`: {e}")))?;
    }

    let mut config = SimConfig::new(graph, ModelKind::Group);
    config.scheme = scheme;
    config.seed_count = raw.seed_count.unwrap_or(1);
    config.runs = raw.runs.unwrap_or(1);
    config.max_steps = max_steps;
    config.master_seed = raw.master_seed;
    config.regenerate_graph_per_run = raw.regenerate_graph_per_run.unwrap_or(true);
    config.metrics = metrics;

    Ok(Partial {
        model: raw.model,
        tau_c: raw.tau_c,
        config,
    })
}

/// Fully validated simulation configuration.
pub fn parse_config(doc: Value, base_dir: Option<&Path>) -> Result<SimConfig, CliError> {
    let partial = parse_partial(doc, base_dir)?;
    let mut config = partial.config;
    config.model = parse_model(partial.model.as_deref(), partial.tau_c)?;
    config.validate().map_err(keyed)?;
    Ok(config)
}

/// Graph section plus seed only; `model` may be absent.
pub fn parse_graph_config(doc: Value, base_dir: Option<&Path>) -> Result<SimConfig, CliError> {
    Ok(parse_partial(doc, base_dir)?.config)
}

/// Reference-curve configuration: a run document whose `model` is ignored;
/// `tau_c` sets the Fixed family's probability (default as shipped).
pub fn parse_reference_config(
    doc: Value,
    base_dir: Option<&Path>,
) -> Result<ReferenceConfig, CliError> {
    let partial = parse_partial(doc, base_dir)?;
    let fixed_tau_c = partial
        .tau_c
        .unwrap_or(ReferenceConfig::shipped().fixed_tau_c);
    ModelKind::fixed(fixed_tau_c).map_err(keyed)?;
    let reference = ReferenceConfig {
        base: partial.config,
        fixed_tau_c,
    };
    reference.base.validate().map_err(keyed)?;
    Ok(reference)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<SimConfig, CliError> {
    let mut doc = read_document(path)?;
    apply_overrides(&mut doc, overrides)?;
    parse_config(doc, path.parent())
}

pub fn load_sweep(
    path: &Path,
    overrides: &[String],
) -> Result<(SweepDocument, Option<PathBuf>), CliError> {
    let doc = read_document(path)?;
    let mut sweep: SweepDocument =
        serde_json::from_value(doc).map_err(|e| CliError::Validation(format!("sweep: {e}")))?;
    apply_overrides(&mut sweep.base, overrides)?;
    Ok((sweep, path.parent().map(Path::to_path_buf)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn minimal() -> Value {
        json!({
            "model": "group",
            "graph": {"type": "ws", "n": 100, "k": 4, "beta": 0.1},
            "master_seed": 7
        })
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(minimal(), None).unwrap();
        assert_eq!(cfg.runs, 1);
        assert_eq!(cfg.seed_count, 1);
        assert_eq!(cfg.scheme, UpdateScheme::Synchronous);
        assert_eq!(cfg.max_steps, 20_000);
        assert_eq!(cfg.master_seed, 7);
        assert!(cfg.regenerate_graph_per_run);
        assert_eq!(cfg.model, ModelKind::Group);
        assert_eq!(cfg.metrics, SimConfig::default_metrics());
    }

    #[test]
    fn odd_k_names_key() {
        let mut doc = minimal();
        doc["graph"]["k"] = json!(5);
        let err = parse_config(doc, None).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        assert!(err.to_string().contains("graph.k"), "{err}");
    }

    #[test]
    fn override_beats_file_value() {
        let mut doc = minimal();
        doc["runs"] = json!(10);
        apply_overrides(&mut doc, &["runs=50".to_string()]).unwrap();
        assert_eq!(parse_config(doc, None).unwrap().runs, 50);
    }

    #[test]
    fn overrides_apply_in_order() {
        let mut doc = minimal();
        apply_overrides(
            &mut doc,
            &[
                "graph.n=500".into(),
                "graph.n=600".into(),
                "scheme=async".into(),
            ],
        )
        .unwrap();
        let cfg = parse_config(doc, None).unwrap();
        assert_eq!(cfg.graph.node_count(), Some(600));
        assert_eq!(cfg.scheme, UpdateScheme::AsyncSingleNode);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut doc = minimal();
        doc["colour"] = json!("red");
        let err = parse_config(doc, None).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");

        let mut doc = minimal();
        doc["graph"]["p"] = json!(0.3);
        let err = parse_config(doc, None).unwrap_err();
        assert!(err.to_string().contains('p'), "{err}");
    }

    #[test]
    fn fixed_requires_tau() {
        let mut doc = minimal();
        doc["model"] = json!("fixed");
        assert!(parse_config(doc.clone(), None)
            .unwrap_err()
            .to_string()
            .contains("tau_c"));
        doc["tau_c"] = json!(0.3);
        assert_eq!(
            parse_config(doc, None).unwrap().model,
            ModelKind::Fixed { tau_c: 0.3 }
        );
    }

    #[test]
    fn metrics_and_graph_variants() {
        let doc = json!({
            "model": "global",
            "graph": {"type": "ba", "n": 50, "m0": 3, "m_attach": 2},
            "master_seed": 1,
            "metrics": [0.5, [0.1, 0.9]]
        });
        let cfg = parse_config(doc, None).unwrap();
        assert_eq!(
            cfg.metrics,
            vec![MetricTarget::Fraction(0.5), MetricTarget::Spread(0.1, 0.9)]
        );
        let bad = json!({
            "model": "global",
            "graph": {"type": "cycle", "n": 5},
            "master_seed": 1,
            "metrics": [[0.9, 0.1]]
        });
        assert!(parse_config(bad, None).is_err());
    }

    #[test]
    fn malformed_overrides() {
        assert!(parse_override("runs").is_err());
        assert!(parse_override("=3").is_err());
        assert!(parse_override("graph..n=3").is_err());
        assert_eq!(parse_override("scheme=async").unwrap().1, json!("async"));
        let mut doc = minimal();
        assert!(set_path(&mut doc, "master_seed.x", json!(1)).is_err());
    }

    #[test]
    fn missing_model_only_matters_for_runs() {
        let mut doc = minimal();
        doc.as_object_mut().unwrap().remove("model");
        assert!(parse_config(doc.clone(), None).is_err());
        assert!(parse_graph_config(doc, None).is_ok());
    }
}
