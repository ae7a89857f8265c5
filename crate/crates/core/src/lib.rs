//! Seeded simulation of information diffusion on directed graphs.
//!
//! Three infection rules are supported:
//!
//! * **Fixed**: every infected in-neighbour independently transmits with a
//!   constant probability `tau_c`.
//! * **Group**: a susceptible node adopts with probability equal to the
//!   infected fraction of its in-neighbourhood (word of mouth).
//! * **Global**: a susceptible node adopts with probability equal to the
//!   infected fraction of the whole network (search-engine exposure).
//!
//! The crate is organised bottom-up: [`graph`] builds substrates, [`dynamics`]
//! advances infection states, [`metrics`] extracts spreading times,
//! [`experiment`] runs reproducible ensembles and sweeps, and [`curvefit`]
//! classifies observed adoption curves against the three model families.

pub mod curvefit;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;

pub use curvefit::{
    FitGrid, FitParams, FitResult, ModelFit, ModelTag, ReferenceConfig, ReferenceCurve,
};
pub use dynamics::{ModelKind, SeedSet, StateVector, UpdateScheme};
pub use error::{Error, Result};
pub use experiment::{
    derive_run_rng, EnsembleStats, MetricStats, MetricTarget, RunRecord, SimConfig, SimRng,
};
pub use graph::{Graph, GraphSpec, NodeId};
pub use metrics::{MetricResult, Trajectory};
