//! Directed graphs used as diffusion substrates.
//!
//! A [`Graph`] is immutable once built and stores both adjacency directions
//! in compressed sparse row form with sorted neighbour lists, so iteration
//! order (and therefore every downstream random draw) is deterministic.
//!
//! Undirected generators (small-world, preferential attachment) expand each
//! undirected edge into two opposed arcs, so a node's in-degree equals its
//! undirected degree.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use rand::Rng;

use crate::error::{Error, Result};

/// Dense node index in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph from an arc list `(v, u)` meaning `v -> u`.
    ///
    /// Self-loops, duplicate arcs and out-of-range endpoints are rejected.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::invalid("n", "node count exceeds u32 range"));
        }
        let mut list: Vec<(u32, u32)> = arcs.into_iter().collect();
        for &(v, u) in &list {
            let (vi, ui) = (v as usize, u as usize);
            if vi >= n {
                return Err(Error::NodeOutOfRange { node: vi, n });
            }
            if ui >= n {
                return Err(Error::NodeOutOfRange { node: ui, n });
            }
            if v == u {
                return Err(Error::invalid("arcs", format!("self-loop on node {v}")));
            }
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(
                "arcs",
                format!("duplicate arc {} -> {}", w[0].0, w[0].1),
            ));
        }
        Ok(Self::from_sorted_unique(n, &list))
    }

    fn from_sorted_unique(n: usize, arcs: &[(u32, u32)]) -> Self {
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(v, u) in arcs {
            out_offsets[v as usize + 1] += 1;
            in_offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets = arcs.iter().map(|&(_, u)| NodeId(u)).collect();

        // Arcs are sorted by (v, u), so filling in-lists in arc order leaves
        // every in-list sorted by source.
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![NodeId(0); arcs.len()];
        for &(v, u) in arcs {
            let slot = &mut cursor[u as usize];
            in_sources[*slot] = NodeId(v);
            *slot += 1;
        }

        Graph {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        }
    }

    fn from_undirected(n: usize, adj: &[BTreeSet<u32>]) -> Self {
        let mut arcs = Vec::with_capacity(adj.iter().map(BTreeSet::len).sum());
        for (v, nbrs) in adj.iter().enumerate() {
            arcs.extend(nbrs.iter().map(|&u| (v as u32, u)));
        }
        // adjacency is symmetric and iterated in (v, u) order already
        Self::from_sorted_unique(n, &arcs)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n as u32).map(NodeId)
    }

    /// All arcs `(v, u)` in ascending order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |v| self.out_slice(v).iter().map(move |&u| (v, u)))
    }

    pub fn contains_arc(&self, v: NodeId, u: NodeId) -> bool {
        v.index() < self.n && self.out_slice(v).binary_search(&u).is_ok()
    }

    /// Nodes with an arc into `u`, ascending.
    pub fn in_neighbors(&self, u: NodeId) -> Result<&[NodeId]> {
        self.check(u)?;
        Ok(self.in_slice(u))
    }

    /// Nodes `u` receives arcs from `v`, ascending.
    pub fn out_neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check(v)?;
        Ok(self.out_slice(v))
    }

    pub fn in_degree(&self, u: NodeId) -> usize {
        self.in_slice(u).len()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_slice(v).len()
    }

    #[inline]
    pub(crate) fn in_slice(&self, u: NodeId) -> &[NodeId] {
        let i = u.index();
        &self.in_sources[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    #[inline]
    pub(crate) fn out_slice(&self, v: NodeId) -> &[NodeId] {
        let i = v.index();
        &self.out_targets[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    pub(crate) fn check(&self, u: NodeId) -> Result<()> {
        if u.index() < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: u.index(),
                n: self.n,
            })
        }
    }

    /// Stable 64-bit FNV-1a fingerprint of the node count and arc set.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write(&(self.n as u64).to_le_bytes());
        for (v, u) in self.arcs() {
            h.write(&v.0.to_le_bytes());
            h.write(&u.0.to_le_bytes());
        }
        h.finish()
    }

    /// Writes the edge-list text format: the node count on the first line,
    /// then one `v u` line per arc.
    pub fn save_edge_list<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "{}", self.n)?;
        for (v, u) in self.arcs() {
            writeln!(sink, "{v} {u}")?;
        }
        sink.flush()?;
        Ok(())
    }

    pub fn load_edge_list<R: BufRead>(source: R) -> Result<Self> {
        let mut lines = source.lines().enumerate();
        let n = match lines.next() {
            None => {
                return Err(Error::Parse {
                    line: 1,
                    reason: "missing node-count header".into(),
                })
            }
            Some((_, line)) => {
                let line = line?;
                line.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: 1,
                    reason: format!("invalid node-count header {:?}", line.trim()),
                })?
            }
        };

        let mut arcs = Vec::new();
        let mut seen = BTreeSet::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let parse_err = |reason: String| Error::Parse {
                line: lineno,
                reason,
            };
            let mut fields = trimmed.split_whitespace();
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(parse_err(format!("expected `v u`, found {trimmed:?}")));
            };
            let v: u32 = a
                .parse()
                .map_err(|_| parse_err(format!("invalid node id {a:?}")))?;
            let u: u32 = b
                .parse()
                .map_err(|_| parse_err(format!("invalid node id {b:?}")))?;
            if v as usize >= n || u as usize >= n {
                return Err(parse_err(format!(
                    "arc {v} -> {u} inconsistent with header n = {n}"
                )));
            }
            if v == u {
                return Err(parse_err(format!("self-loop on node {v}")));
            }
            if !seen.insert((v, u)) {
                return Err(parse_err(format!("duplicate arc {v} -> {u}")));
            }
            arcs.push((v, u));
        }
        arcs.sort_unstable();
        Ok(Self::from_sorted_unique(n, &arcs))
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = Fnv64::new();
    h.write(bytes);
    h.finish()
}

struct Fnv64(u64);

impl Fnv64 {
    fn new() -> Self {
        Fnv64(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Generator selection for a diffusion substrate.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    WattsStrogatz {
        n: usize,
        k: usize,
        beta: f64,
    },
    BarabasiAlbert {
        n: usize,
        m0: usize,
        m_attach: usize,
    },
    Complete {
        n: usize,
    },
    DirectedCycle {
        n: usize,
    },
    File {
        path: PathBuf,
    },
}

impl GraphSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphSpec::WattsStrogatz { n, k, beta } => check_ws(n, k, beta),
            GraphSpec::BarabasiAlbert { n, m0, m_attach } => check_ba(n, m0, m_attach),
            GraphSpec::Complete { n } | GraphSpec::DirectedCycle { n } => check_min_nodes(n),
            GraphSpec::File { .. } => Ok(()),
        }
    }

    /// Node count, if known without touching the filesystem.
    pub fn node_count(&self) -> Option<usize> {
        match *self {
            GraphSpec::WattsStrogatz { n, .. }
            | GraphSpec::BarabasiAlbert { n, .. }
            | GraphSpec::Complete { n }
            | GraphSpec::DirectedCycle { n } => Some(n),
            GraphSpec::File { .. } => None,
        }
    }

    /// True when building the graph consumes random draws.
    pub fn is_random(&self) -> bool {
        matches!(
            self,
            GraphSpec::WattsStrogatz { .. } | GraphSpec::BarabasiAlbert { .. }
        )
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        match self {
            &GraphSpec::WattsStrogatz { n, k, beta } => watts_strogatz(n, k, beta, rng),
            &GraphSpec::BarabasiAlbert { n, m0, m_attach } => barabasi_albert(n, m0, m_attach, rng),
            &GraphSpec::Complete { n } => complete_graph(n),
            &GraphSpec::DirectedCycle { n } => directed_cycle(n),
            GraphSpec::File { path } => {
                let file = std::fs::File::open(path)?;
                Graph::load_edge_list(std::io::BufReader::new(file))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphSpec::WattsStrogatz { .. } => "ws",
            GraphSpec::BarabasiAlbert { .. } => "ba",
            GraphSpec::Complete { .. } => "complete",
            GraphSpec::DirectedCycle { .. } => "cycle",
            GraphSpec::File { .. } => "file",
        }
    }
}

fn check_min_nodes(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(
            "n",
            format!("need at least 2 nodes, got {n}"),
        ));
    }
    if n > u32::MAX as usize {
        return Err(Error::invalid("n", "node count exceeds u32 range"));
    }
    Ok(())
}

fn check_ws(n: usize, k: usize, beta: f64) -> Result<()> {
    check_min_nodes(n)?;
    if k == 0 || !k.is_multiple_of(2) {
        return Err(Error::invalid(
            "k",
            format!("must be a positive even number, got {k}"),
        ));
    }
    if k >= n {
        return Err(Error::invalid(
            "k",
            format!("must be smaller than n = {n}, got {k}"),
        ));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid(
            "beta",
            format!("must lie in [0, 1], got {beta}"),
        ));
    }
    Ok(())
}

fn check_ba(n: usize, m0: usize, m_attach: usize) -> Result<()> {
    if m_attach < 1 {
        return Err(Error::invalid("m_attach", "must be at least 1"));
    }
    if m0 < m_attach {
        return Err(Error::invalid(
            "m0",
            format!("seed clique size {m0} is smaller than m_attach = {m_attach}"),
        ));
    }
    if n <= m0 {
        return Err(Error::invalid(
            "n",
            format!("must exceed m0 = {m0}, got {n}"),
        ));
    }
    check_min_nodes(n)
}

/// Small-world graph: a ring lattice where each node links to its `k`
/// nearest neighbours, then every lattice edge has its far endpoint rewired
/// with probability `beta`.
///
/// Edges are visited lap by lap (`j = 1..=k/2`, then node order). One uniform
/// draw decides each rewire; the new endpoint is drawn uniformly until it is
/// neither `i` nor already adjacent to `i`, giving up after `n` attempts and
/// keeping the lattice edge. The undirected edge count, and hence the arc
/// count `n * k`, is independent of `beta`.
pub fn watts_strogatz<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    beta: f64,
    rng: &mut R,
) -> Result<Graph> {
    check_ws(n, k, beta)?;
    let half = k / 2;
    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=half {
            let u = (i + j) % n;
            adj[i].insert(u as u32);
            adj[u].insert(i as u32);
        }
    }

    for j in 1..=half {
        for i in 0..n {
            if rng.random::<f64>() >= beta {
                continue;
            }
            let old = ((i + j) % n) as u32;
            for _ in 0..n {
                let w = rng.random_range(0..n) as u32;
                if w as usize == i || adj[i].contains(&w) {
                    continue;
                }
                adj[i].remove(&old);
                adj[old as usize].remove(&(i as u32));
                adj[i].insert(w);
                adj[w as usize].insert(i as u32);
                break;
            }
        }
    }

    Ok(Graph::from_undirected(n, &adj))
}

/// Preferential-attachment growth from a complete seed clique of `m0` nodes.
///
/// Each new node attaches `m_attach` distinct undirected edges; a target is
/// drawn from the endpoint multiset, so selection is proportional to current
/// degree. While every existing node has degree zero (`m0 == 1`) the target is
/// uniform.
pub fn barabasi_albert<R: Rng + ?Sized>(
    n: usize,
    m0: usize,
    m_attach: usize,
    rng: &mut R,
) -> Result<Graph> {
    check_ba(n, m0, m_attach)?;
    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * (m0 * m0 + n * m_attach));
    for a in 0..m0 as u32 {
        for b in a + 1..m0 as u32 {
            adj[a as usize].insert(b);
            adj[b as usize].insert(a);
            endpoints.push(a);
            endpoints.push(b);
        }
    }

    let mut chosen = Vec::with_capacity(m_attach);
    for new in m0 as u32..n as u32 {
        chosen.clear();
        while chosen.len() < m_attach {
            let cand = if endpoints.is_empty() {
                rng.random_range(0..new)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !chosen.contains(&cand) {
                chosen.push(cand);
            }
        }
        for &c in &chosen {
            adj[new as usize].insert(c);
            adj[c as usize].insert(new);
            endpoints.push(new);
            endpoints.push(c);
        }
    }

    Ok(Graph::from_undirected(n, &adj))
}

/// All `n (n - 1)` ordered arcs.
pub fn complete_graph(n: usize) -> Result<Graph> {
    check_min_nodes(n)?;
    let n32 = n as u32;
    let arcs: Vec<(u32, u32)> = (0..n32)
        .flat_map(|v| (0..n32).filter(move |&u| u != v).map(move |u| (v, u)))
        .collect();
    Ok(Graph::from_sorted_unique(n, &arcs))
}

/// Arcs `i -> (i + 1) mod n`.
pub fn directed_cycle(n: usize) -> Result<Graph> {
    check_min_nodes(n)?;
    Graph::from_arcs(n, (0..n as u32).map(|i| (i, ((i as usize + 1) % n) as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arc_set(g: &Graph) -> Vec<(u32, u32)> {
        g.arcs().map(|(v, u)| (v.0, u.0)).collect()
    }

    fn assert_well_formed(g: &Graph) {
        let arcs = arc_set(g);
        let in_sum: usize = g.nodes().map(|u| g.in_degree(u)).sum();
        let out_sum: usize = g.nodes().map(|u| g.out_degree(u)).sum();
        assert_eq!(arcs.len(), in_sum);
        assert_eq!(arcs.len(), out_sum);
        assert!(arcs.iter().all(|(v, u)| v != u));
        assert!(arcs.windows(2).all(|w| w[0] < w[1]));
        for u in g.nodes() {
            for &v in g.in_neighbors(u).unwrap() {
                assert!(g.contains_arc(v, u));
            }
        }
    }

    /// Local clustering over the undirected view, by direct triangle count.
    fn local_clustering(g: &Graph, u: NodeId) -> f64 {
        let nbrs = g.out_neighbors(u).unwrap();
        let d = nbrs.len();
        let mut links = 0;
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if g.contains_arc(a, b) {
                    links += 1;
                }
            }
        }
        links as f64 / (d * (d - 1) / 2) as f64
    }

    #[test]
    fn ring_lattice_without_rewiring() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = watts_strogatz(20, 4, 0.0, &mut rng).unwrap();
        assert_eq!(g.arc_count(), 80);
        for u in g.nodes() {
            assert_eq!(g.in_degree(u), 4);
            assert_eq!(g.out_degree(u), 4);
        }
        assert_well_formed(&g);
    }

    #[test]
    fn ring_lattice_clustering() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = watts_strogatz(20, 4, 0.0, &mut rng).unwrap();
        // 3(k-2) / (4(k-1)) with k = 4
        let analytic = 3.0 * 2.0 / (4.0 * 3.0);
        for u in g.nodes() {
            assert_eq!(local_clustering(&g, u), 0.5);
        }
        assert_eq!(analytic, 0.5);
    }

    #[test]
    fn ws_arc_count_and_determinism() {
        let a = watts_strogatz(1000, 10, 0.05, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = watts_strogatz(1000, 10, 0.05, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a.arc_count(), 10_000);
        assert_eq!(arc_set(&a), arc_set(&b));
        assert_well_formed(&a);
        // some rewiring actually happened
        let lattice = watts_strogatz(1000, 10, 0.0, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_ne!(arc_set(&a), arc_set(&lattice));
    }

    #[test]
    fn ws_full_rewire_keeps_arc_count() {
        let g = watts_strogatz(30, 6, 1.0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(g.arc_count(), 180);
        assert_well_formed(&g);
    }

    #[test]
    fn ws_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for (n, k, beta, key) in [
            (20, 5, 0.1, "k"),
            (20, 20, 0.1, "k"),
            (20, 0, 0.1, "k"),
            (20, 4, 1.5, "beta"),
            (20, 4, -0.1, "beta"),
        ] {
            match watts_strogatz(n, k, beta, &mut rng) {
                Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, key),
                other => panic!("expected invalid {key}, got {other:?}"),
            }
        }
    }

    #[test]
    fn ba_edge_count() {
        let g = barabasi_albert(10, 3, 1, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(g.arc_count(), 2 * (3 + 7));
        assert_well_formed(&g);
    }

    #[test]
    fn ba_forced_attachment() {
        let g = barabasi_albert(3, 2, 2, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(g.in_neighbors(NodeId(2)).unwrap(), &[NodeId(0), NodeId(1)]);
    }

    #[test]
    fn ba_deterministic() {
        let a = barabasi_albert(200, 2, 2, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let b = barabasi_albert(200, 2, 2, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        assert_eq!(arc_set(&a), arc_set(&b));
        assert_eq!(a.arc_count(), 2 * (1 + 198 * 2));
    }

    #[test]
    fn ba_single_seed_node() {
        let g = barabasi_albert(6, 1, 1, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(g.arc_count(), 10);
    }

    #[test]
    fn ba_rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(barabasi_albert(10, 1, 2, &mut rng).is_err());
        assert!(barabasi_albert(3, 3, 1, &mut rng).is_err());
        assert!(barabasi_albert(10, 3, 0, &mut rng).is_err());
    }

    #[test]
    fn complete_graphs() {
        assert_eq!(complete_graph(3).unwrap().arc_count(), 6);
        assert_eq!(arc_set(&complete_graph(2).unwrap()), vec![(0, 1), (1, 0)]);
        let g = complete_graph(13).unwrap();
        assert!(g.nodes().all(|u| g.in_degree(u) == 12));
        assert!(complete_graph(1).is_err());
    }

    #[test]
    fn cycles() {
        assert_eq!(
            arc_set(&directed_cycle(3).unwrap()),
            vec![(0, 1), (1, 2), (2, 0)]
        );
        let g = directed_cycle(5).unwrap();
        assert_eq!(g.arc_count(), 5);
        assert!(g.nodes().all(|u| g.in_degree(u) == 1));
        assert_eq!(arc_set(&directed_cycle(2).unwrap()), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn neighbor_queries() {
        let c = directed_cycle(3).unwrap();
        assert_eq!(c.in_neighbors(NodeId(1)).unwrap(), &[NodeId(0)]);
        let k = complete_graph(3).unwrap();
        assert_eq!(k.in_neighbors(NodeId(0)).unwrap(), &[NodeId(1), NodeId(2)]);
        assert!(matches!(
            c.in_neighbors(NodeId(3)),
            Err(Error::NodeOutOfRange { node: 3, n: 3 })
        ));
    }

    #[test]
    fn from_arcs_rejects_bad_input() {
        assert!(Graph::from_arcs(3, [(0, 0)]).is_err());
        assert!(Graph::from_arcs(3, [(0, 1), (0, 1)]).is_err());
        assert!(Graph::from_arcs(3, [(0, 3)]).is_err());
    }

    #[test]
    fn edge_list_text() {
        let g = directed_cycle(3).unwrap();
        let mut buf = Vec::new();
        g.save_edge_list(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "3\n0 1\n1 2\n2 0\n"
        );
        let back = Graph::load_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn edge_list_errors() {
        match Graph::load_edge_list("3\n0 x\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match Graph::load_edge_list("3\n0 1\n\n0 7\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Graph::load_edge_list("".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Graph::load_edge_list("three\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(Graph::load_edge_list("3\n0 1\n0 1\n".as_bytes()).is_err());
    }

    #[test]
    fn edge_list_empty_body() {
        let g = Graph::load_edge_list("4\n".as_bytes()).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.arc_count(), 0);
    }

    #[test]
    fn fingerprint_distinguishes() {
        let a = directed_cycle(4).unwrap();
        let b = complete_graph(4).unwrap();
        assert_eq!(a.fingerprint(), directed_cycle(4).unwrap().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
