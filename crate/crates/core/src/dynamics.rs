//! Infection state machine for the Fixed, Group and Global rules.
//!
//! Infection is absorbing: once a node's bit is set it stays set. The next
//! state at `t + 1` is always computed from the current state at `t`.
//!
//! Two code paths compute the same dynamics. [`infection_probability`] and
//! [`step`] recompute everything from the state vector and serve as the
//! reference; [`run`] drives an incremental engine that keeps per-node counts
//! of infected in-neighbours. Given the same random stream both produce the
//! same trajectory.

use std::fmt;

use fixedbitset::FixedBitSet;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::metrics::Trajectory;

/// Infection rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// Each infected in-neighbour transmits independently with `tau_c`.
    Fixed { tau_c: f64 },
    /// Probability is the infected fraction of the in-neighbourhood.
    Group,
    /// Probability is the infected fraction of the whole network.
    Global,
}

impl ModelKind {
    pub fn fixed(tau_c: f64) -> Result<Self> {
        let m = ModelKind::Fixed { tau_c };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelKind::Fixed { tau_c } if !(0.0..=1.0).contains(&tau_c) => Err(Error::invalid(
                "tau_c",
                format!("must lie in [0, 1], got {tau_c}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Fixed { .. } => "fixed",
            ModelKind::Group => "group",
            ModelKind::Global => "global",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateScheme {
    /// Every susceptible node draws once per step, in ascending id order,
    /// against probabilities computed from the pre-step state.
    #[default]
    Synchronous,
    /// One uniformly chosen node is updated per step.
    AsyncSingleNode,
}

impl UpdateScheme {
    pub fn name(&self) -> &'static str {
        match self {
            UpdateScheme::Synchronous => "synchronous",
            UpdateScheme::AsyncSingleNode => "async_single_node",
        }
    }
}

impl fmt::Display for UpdateScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-node infection bits at step `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVector {
    infected: FixedBitSet,
    t: usize,
    infected_count: usize,
}

impl StateVector {
    /// All-susceptible state at `t = 0`.
    pub fn new(n: usize) -> Self {
        StateVector {
            infected: FixedBitSet::with_capacity(n),
            t: 0,
            infected_count: 0,
        }
    }

    pub fn from_seeds(n: usize, seeds: &SeedSet) -> Result<Self> {
        let mut s = Self::new(n);
        for &u in seeds.nodes() {
            if u.index() >= n {
                return Err(Error::NodeOutOfRange { node: u.index(), n });
            }
            s.infect(u);
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.infected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infected.is_empty()
    }

    #[inline]
    pub fn is_infected(&self, u: NodeId) -> bool {
        self.infected.contains(u.index())
    }

    #[inline]
    pub fn infected_count(&self) -> usize {
        self.infected_count
    }

    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn infected_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.infected.ones().map(|i| NodeId(i as u32))
    }

    /// Sets `u`; returns false if it was already infected.
    pub(crate) fn infect(&mut self, u: NodeId) -> bool {
        if self.infected.put(u.index()) {
            false
        } else {
            self.infected_count += 1;
            true
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedOrigin {
    Random { count: usize },
    Explicit,
}

/// Initially infected nodes, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    nodes: Vec<NodeId>,
    origin: SeedOrigin,
}

impl SeedSet {
    pub fn explicit(n: usize, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
        if nodes.is_empty() {
            return Err(Error::invalid("seeds", "seed set must not be empty"));
        }
        if let Some(bad) = nodes.iter().find(|u| u.index() >= n) {
            return Err(Error::NodeOutOfRange {
                node: bad.index(),
                n,
            });
        }
        nodes.sort_unstable();
        if let Some(w) = nodes.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid("seeds", format!("duplicate seed {}", w[0])));
        }
        Ok(SeedSet {
            nodes,
            origin: SeedOrigin::Explicit,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn origin(&self) -> SeedOrigin {
        self.origin
    }
}

/// Uniform sample of `count` distinct nodes (partial Fisher-Yates).
pub fn seed_random<R: Rng + ?Sized>(g: &Graph, count: usize, rng: &mut R) -> Result<SeedSet> {
    let n = g.node_count();
    if count == 0 || count > n {
        return Err(Error::invalid(
            "seed_count",
            format!("must lie in [1, {n}], got {count}"),
        ));
    }
    let mut ids: Vec<u32> = (0..n as u32).collect();
    for i in 0..count {
        let j = rng.random_range(i..n);
        ids.swap(i, j);
    }
    ids.truncate(count);
    ids.sort_unstable();
    Ok(SeedSet {
        nodes: ids.into_iter().map(NodeId).collect(),
        origin: SeedOrigin::Random { count },
    })
}

#[inline]
fn rule(
    model: ModelKind,
    infected_in: usize,
    in_degree: usize,
    infected_total: usize,
    n: usize,
) -> f64 {
    match model {
        ModelKind::Fixed { tau_c } => {
            if infected_in == 0 {
                0.0
            } else {
                1.0 - (1.0 - tau_c).powi(infected_in as i32)
            }
        }
        ModelKind::Group => {
            if in_degree == 0 {
                0.0
            } else {
                infected_in as f64 / in_degree as f64
            }
        }
        ModelKind::Global => infected_total as f64 / n as f64,
    }
}

/// Probability that susceptible node `u` becomes infected in the next step.
///
/// * Fixed: `1 - (1 - tau_c)^d`, `d` = infected in-neighbours.
/// * Group: `d / in_degree(u)`, zero for an empty in-neighbourhood.
/// * Global: `infected_count / n`.
pub fn infection_probability(
    model: ModelKind,
    g: &Graph,
    s: &StateVector,
    u: NodeId,
) -> Result<f64> {
    g.check(u)?;
    if s.len() != g.node_count() {
        return Err(Error::invalid(
            "state",
            format!("state has {} nodes, graph has {}", s.len(), g.node_count()),
        ));
    }
    if s.is_infected(u) {
        return Err(Error::AlreadyInfected(u.index()));
    }
    Ok(probability_unchecked(model, g, s, u))
}

fn probability_unchecked(model: ModelKind, g: &Graph, s: &StateVector, u: NodeId) -> f64 {
    let nbrs = g.in_slice(u);
    let infected_in = match model {
        ModelKind::Global => 0,
        _ => nbrs.iter().filter(|&&v| s.is_infected(v)).count(),
    };
    rule(
        model,
        infected_in,
        nbrs.len(),
        s.infected_count(),
        g.node_count(),
    )
}

/// Advances `s` by one step, recomputing every probability from `s`.
///
/// # Panics
///
/// If `s` does not have one bit per graph node.
pub fn step<R: Rng + ?Sized>(
    model: ModelKind,
    g: &Graph,
    s: &StateVector,
    scheme: UpdateScheme,
    rng: &mut R,
) -> StateVector {
    let n = g.node_count();
    assert_eq!(s.len(), n, "state size does not match graph");
    let mut next = s.clone();
    match scheme {
        UpdateScheme::Synchronous => {
            for u in g.nodes() {
                if s.is_infected(u) {
                    continue;
                }
                let r: f64 = rng.random();
                if r < probability_unchecked(model, g, s, u) {
                    next.infect(u);
                }
            }
        }
        UpdateScheme::AsyncSingleNode => {
            let w = NodeId(rng.random_range(0..n) as u32);
            if !s.is_infected(w) {
                let r: f64 = rng.random();
                if r < probability_unchecked(model, g, s, w) {
                    next.infect(w);
                }
            }
        }
    }
    next.t += 1;
    next
}

/// Incremental simulation state: keeps infected in-neighbour counts and the
/// number of susceptible nodes that have at least one infected in-neighbour.
struct Engine<'g> {
    g: &'g Graph,
    model: ModelKind,
    state: StateVector,
    infected_in: Vec<u32>,
    frontier: usize,
    infection_time: Vec<Option<usize>>,
    fresh: Vec<NodeId>,
}

impl<'g> Engine<'g> {
    fn new(model: ModelKind, g: &'g Graph, seeds: &SeedSet) -> Result<Self> {
        let n = g.node_count();
        let mut engine = Engine {
            g,
            model,
            state: StateVector::new(n),
            infected_in: vec![0; n],
            frontier: 0,
            infection_time: vec![None; n],
            fresh: Vec::new(),
        };
        for &u in seeds.nodes() {
            g.check(u)?;
            engine.mark(u);
        }
        Ok(engine)
    }

    fn mark(&mut self, u: NodeId) {
        if !self.state.infect(u) {
            return;
        }
        self.infection_time[u.index()] = Some(self.state.t);
        if self.infected_in[u.index()] > 0 {
            self.frontier -= 1;
        }
        for &w in self.g.out_slice(u) {
            if self.state.is_infected(w) {
                continue;
            }
            let c = &mut self.infected_in[w.index()];
            if *c == 0 {
                self.frontier += 1;
            }
            *c += 1;
        }
    }

    #[inline]
    fn probability(&self, u: NodeId) -> f64 {
        rule(
            self.model,
            self.infected_in[u.index()] as usize,
            self.g.in_degree(u),
            self.state.infected_count(),
            self.g.node_count(),
        )
    }

    /// No further infection can ever happen.
    fn is_absorbing(&self) -> bool {
        if self.state.infected_count() == self.g.node_count() {
            return true;
        }
        match self.model {
            ModelKind::Global => self.state.infected_count() == 0,
            ModelKind::Group => self.frontier == 0,
            ModelKind::Fixed { tau_c } => self.frontier == 0 || tau_c == 0.0,
        }
    }

    fn step<R: Rng + ?Sized>(&mut self, scheme: UpdateScheme, rng: &mut R) {
        let mut fresh = std::mem::take(&mut self.fresh);
        fresh.clear();
        match scheme {
            UpdateScheme::Synchronous => {
                for u in self.g.nodes() {
                    if self.state.is_infected(u) {
                        continue;
                    }
                    let r: f64 = rng.random();
                    if r < self.probability(u) {
                        fresh.push(u);
                    }
                }
            }
            UpdateScheme::AsyncSingleNode => {
                let w = NodeId(rng.random_range(0..self.g.node_count()) as u32);
                if !self.state.is_infected(w) {
                    let r: f64 = rng.random();
                    if r < self.probability(w) {
                        fresh.push(w);
                    }
                }
            }
        }
        self.state.t += 1;
        for &u in &fresh {
            self.mark(u);
        }
        self.fresh = fresh;
    }
}

/// Runs from `seeds` at `t = 0` until every node is infected or
/// `t == max_steps`.
///
/// When the state becomes absorbing before either condition (for example a
/// Group run whose infected set has no susceptible out-neighbours), the
/// remaining steps cannot change anything and the count series is extended
/// with the final value up to `max_steps`.
pub fn run<R: Rng + ?Sized>(
    model: ModelKind,
    g: &Graph,
    seeds: &SeedSet,
    scheme: UpdateScheme,
    max_steps: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    model.validate()?;
    if max_steps == 0 {
        return Err(Error::invalid("max_steps", "must be at least 1"));
    }
    if seeds.is_empty() {
        return Err(Error::invalid("seeds", "seed set must not be empty"));
    }
    let n = g.node_count();
    let mut engine = Engine::new(model, g, seeds)?;
    let mut counts: Vec<u32> = vec![engine.state.infected_count() as u32];

    while engine.state.infected_count() < n && engine.state.t < max_steps {
        if engine.is_absorbing() {
            let last = *counts.last().unwrap();
            counts.resize(max_steps + 1, last);
            break;
        }
        engine.step(scheme, rng);
        counts.push(engine.state.infected_count() as u32);
    }

    Ok(Trajectory::new(n, counts, engine.infection_time, max_steps))
}
