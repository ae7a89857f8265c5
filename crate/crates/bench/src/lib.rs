//! Fixtures shared by the criterion benchmarks under `benches/`.

use diffusim_core::experiment::SHARED_GRAPH_STREAM;
use diffusim_core::{derive_run_rng, Graph, GraphSpec, ModelKind, SimConfig, UpdateScheme};

pub const BENCH_SEED: u64 = 0x5eed;

pub fn small_world_spec(n: usize) -> GraphSpec {
    GraphSpec::WattsStrogatz {
        n,
        k: 10,
        beta: 0.05,
    }
}

/// The graph a shared-graph ensemble with [`BENCH_SEED`] would use.
pub fn small_world(n: usize) -> Graph {
    small_world_spec(n)
        .generate(&mut derive_run_rng(BENCH_SEED, SHARED_GRAPH_STREAM))
        .expect("valid benchmark graph")
}

pub fn ensemble_config(n: usize, model: ModelKind, scheme: UpdateScheme, runs: usize) -> SimConfig {
    let mut cfg = SimConfig::new(small_world_spec(n), model);
    cfg.scheme = scheme;
    cfg.runs = runs;
    cfg.master_seed = BENCH_SEED;
    cfg
}
