//! Classification of observed adoption curves against the three model
//! families.
//!
//! Each family is represented by a reference curve: the ensemble-mean
//! adoption curve of one model under a shared configuration. An observed
//! series (normalised by its maximum) is compared with every reference under
//! an affine time map and an amplitude,
//!
//! ```text
//! fitted(t) = amplitude * R(time_scale * t + time_offset)
//! ```
//!
//! where `t` counts observation samples and `R` is the reference curve
//! stretched so that, at `time_scale = 1` and `time_offset = 0`, it spans the
//! observation window exactly. `R` is linearly interpolated and clamped at
//! its endpoints. Parameters start from the best point of a coarse grid and
//! are refined by three passes of coordinate descent with step halving.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::dynamics::ModelKind;
use crate::error::{Error, Result};
use crate::experiment::{mean_adoption_curve, SimConfig};
use crate::graph::{fnv1a, GraphSpec};

/// Minimum length of an observed series.
pub const MIN_SERIES_LEN: usize = 8;

/// Model family label. Declaration order is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelTag {
    Fixed,
    Group,
    Global,
}

impl ModelTag {
    pub const ALL: [ModelTag; 3] = [ModelTag::Fixed, ModelTag::Group, ModelTag::Global];

    pub fn name(&self) -> &'static str {
        match self {
            ModelTag::Fixed => "fixed",
            ModelTag::Group => "group",
            ModelTag::Global => "global",
        }
    }

    pub fn of(model: &ModelKind) -> Self {
        match model {
            ModelKind::Fixed { .. } => ModelTag::Fixed,
            ModelKind::Group => ModelTag::Group,
            ModelKind::Global => ModelTag::Global,
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scales a non-negative series by its maximum.
pub fn normalize_series(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::invalid("series", "series is empty"));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::invalid(
            "series",
            format!("values must be finite and non-negative, found {bad}"),
        ));
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::invalid("series", "series is all zero"));
    }
    Ok(values.iter().map(|v| v / max).collect())
}

/// Ensemble-mean adoption curve of one model family.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCurve {
    pub model: ModelTag,
    pub curve: Vec<f64>,
    /// FNV-1a hash of the generating configuration.
    pub fingerprint: u64,
}

impl ReferenceCurve {
    /// `R(x)`, linearly interpolated, clamped outside `[0, len - 1]`.
    fn at(&self, x: f64) -> f64 {
        let last = self.curve.len() - 1;
        if last == 0 || x <= 0.0 {
            return self.curve[0];
        }
        if x >= last as f64 {
            return self.curve[last];
        }
        let i = x.floor() as usize;
        let frac = x - i as f64;
        if frac == 0.0 {
            self.curve[i]
        } else {
            self.curve[i] + frac * (self.curve[i + 1] - self.curve[i])
        }
    }
}

/// Configuration the three reference curves are generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceConfig {
    /// Shared ensemble settings; its `model` field is replaced per family.
    pub base: SimConfig,
    /// Transmission probability used for the Fixed family.
    pub fixed_tau_c: f64,
}

impl ReferenceConfig {
    /// Shipped reference: a preferential-attachment tree (`m_attach = 1`).
    /// Hubs are reached quickly under Fixed, slowly under Group, and the
    /// topology is irrelevant under Global, so the three mean curves differ
    /// in shape and not only in time scale.
    pub fn shipped() -> Self {
        let mut base = SimConfig::new(
            GraphSpec::BarabasiAlbert {
                n: 1000,
                m0: 2,
                m_attach: 1,
            },
            ModelKind::Group,
        );
        base.runs = 200;
        base.master_seed = 20_130_401;
        ReferenceConfig {
            base,
            fixed_tau_c: 0.2,
        }
    }

    fn config_for(&self, tag: ModelTag) -> SimConfig {
        let mut cfg = self.base.clone();
        cfg.model = match tag {
            ModelTag::Fixed => ModelKind::Fixed {
                tau_c: self.fixed_tau_c,
            },
            ModelTag::Group => ModelKind::Group,
            ModelTag::Global => ModelKind::Global,
        };
        cfg
    }

    /// Stable hash of every field that influences the curves.
    pub fn fingerprint(&self) -> u64 {
        let b = &self.base;
        let text = format!(
            "graph={:?};scheme={};seed_count={};runs={};max_steps={};master_seed={};regen={};tau_c={}",
            b.graph,
            b.scheme.name(),
            b.seed_count,
            b.runs,
            b.max_steps,
            b.master_seed,
            b.regenerate_graph_per_run,
            self.fixed_tau_c
        );
        fnv1a(text.as_bytes())
    }
}

/// One mean adoption curve per family, in tag order.
pub fn build_reference_curves(config: &ReferenceConfig) -> Result<Vec<ReferenceCurve>> {
    let fingerprint = config.fingerprint();
    ModelTag::ALL
        .iter()
        .map(|&tag| {
            Ok(ReferenceCurve {
                model: tag,
                curve: mean_adoption_curve(&config.config_for(tag))?,
                fingerprint,
            })
        })
        .collect()
}

/// Starting lattice for the parameter search.
#[derive(Debug, Clone, PartialEq)]
pub struct FitGrid {
    pub time_scales: Vec<f64>,
    /// Offsets span `[-offset_span * L, offset_span * L]` for a series of
    /// length `L`.
    pub offset_span: f64,
    pub offset_points: usize,
    pub amplitudes: Vec<f64>,
}

impl Default for FitGrid {
    fn default() -> Self {
        FitGrid {
            time_scales: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            offset_span: 0.25,
            offset_points: 9,
            amplitudes: vec![0.5, 0.75, 1.0],
        }
    }
}

impl FitGrid {
    fn offsets(&self, len: usize) -> Vec<f64> {
        let half = self.offset_span * len as f64;
        match self.offset_points {
            0 => vec![0.0],
            1 => vec![0.0],
            k => (0..k)
                .map(|i| -half + 2.0 * half * i as f64 / (k - 1) as f64)
                .collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.time_scales.is_empty() || self.time_scales.iter().any(|&a| a.is_nan() || a <= 0.0) {
            return Err(Error::invalid("time_scales", "need positive time scales"));
        }
        if self.amplitudes.is_empty() || self.amplitudes.iter().any(|&c| c.is_nan() || c <= 0.0) {
            return Err(Error::invalid("amplitudes", "need positive amplitudes"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub time_scale: f64,
    pub time_offset: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    pub model: ModelTag,
    pub sse: f64,
    pub params: FitParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub best_model: ModelTag,
    pub sse: f64,
    pub params: FitParams,
    /// One entry per reference curve, in tag order.
    pub per_model: Vec<ModelFit>,
    /// Set when the observation is constant and carries no shape.
    pub low_confidence: bool,
}

struct Objective<'a> {
    obs: &'a [f64],
    reference: &'a ReferenceCurve,
    stretch: f64,
}

impl Objective<'_> {
    fn sse(&self, p: &FitParams) -> f64 {
        self.obs
            .iter()
            .enumerate()
            .map(|(t, &y)| {
                let x = (p.time_scale * t as f64 + p.time_offset) * self.stretch;
                let r = y - p.amplitude * self.reference.at(x);
                r * r
            })
            .sum()
    }
}

const REFINE_PASSES: usize = 3;
const MAX_MOVES_PER_COORD: usize = 64;

fn fit_one(obs: &[f64], reference: &ReferenceCurve, grid: &FitGrid) -> ModelFit {
    let len = obs.len();
    let stretch = (reference.curve.len() - 1) as f64 / (len - 1) as f64;
    let objective = Objective {
        obs,
        reference,
        stretch,
    };

    let mut best = FitParams {
        time_scale: grid.time_scales[0],
        time_offset: 0.0,
        amplitude: grid.amplitudes[0],
    };
    let mut best_sse = f64::INFINITY;
    for &a in &grid.time_scales {
        for b in grid.offsets(len) {
            for &c in &grid.amplitudes {
                let p = FitParams {
                    time_scale: a,
                    time_offset: b,
                    amplitude: c,
                };
                let s = objective.sse(&p);
                if s < best_sse {
                    best_sse = s;
                    best = p;
                }
            }
        }
    }

    // time_scale moves multiplicatively so it stays positive
    let mut log_step = 0.5f64;
    let mut offset_step = len as f64 / 16.0;
    let mut amp_step = 0.125f64;
    for _ in 0..REFINE_PASSES {
        for coord in 0..3 {
            for _ in 0..MAX_MOVES_PER_COORD {
                let candidates = match coord {
                    0 => [
                        FitParams {
                            time_scale: best.time_scale * log_step.exp2(),
                            ..best
                        },
                        FitParams {
                            time_scale: best.time_scale * (-log_step).exp2(),
                            ..best
                        },
                    ],
                    1 => [
                        FitParams {
                            time_offset: best.time_offset + offset_step,
                            ..best
                        },
                        FitParams {
                            time_offset: best.time_offset - offset_step,
                            ..best
                        },
                    ],
                    _ => [
                        FitParams {
                            amplitude: best.amplitude + amp_step,
                            ..best
                        },
                        FitParams {
                            amplitude: best.amplitude - amp_step,
                            ..best
                        },
                    ],
                };
                let mut moved = false;
                for cand in candidates {
                    if cand.amplitude <= 0.0 {
                        continue;
                    }
                    let s = objective.sse(&cand);
                    if s < best_sse {
                        best_sse = s;
                        best = cand;
                        moved = true;
                        break;
                    }
                }
                if !moved {
                    break;
                }
            }
        }
        log_step /= 2.0;
        offset_step /= 2.0;
        amp_step /= 2.0;
    }

    ModelFit {
        model: reference.model,
        sse: best_sse,
        params: best,
    }
}

fn by_sse_then_tag(a: &ModelFit, b: &ModelFit) -> Ordering {
    a.sse.total_cmp(&b.sse).then(a.model.cmp(&b.model))
}

/// Fits a normalised observation against every reference curve.
pub fn fit_series(obs: &[f64], refs: &[ReferenceCurve], grid: &FitGrid) -> Result<FitResult> {
    if obs.len() < MIN_SERIES_LEN {
        return Err(Error::invalid(
            "series",
            format!("need at least {MIN_SERIES_LEN} samples, got {}", obs.len()),
        ));
    }
    if obs.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("series", "values must be finite"));
    }
    if refs.is_empty() {
        return Err(Error::invalid("references", "no reference curves"));
    }
    if let Some(r) = refs.iter().find(|r| r.curve.is_empty()) {
        return Err(Error::invalid(
            "references",
            format!("reference curve for {} is empty", r.model),
        ));
    }
    grid.validate()?;

    let mut per_model: Vec<ModelFit> = refs.par_iter().map(|r| fit_one(obs, r, grid)).collect();
    per_model.sort_by_key(|f| f.model);
    let best = per_model
        .iter()
        .min_by(|a, b| by_sse_then_tag(a, b))
        .cloned()
        .unwrap();

    let (lo, hi) = obs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    Ok(FitResult {
        best_model: best.model,
        sse: best.sse,
        params: best.params,
        per_model,
        low_confidence: hi - lo < 1e-12,
    })
}
