//! Immutable undirected simple graphs, G(n, p) generation and the
//! distance-bounded neighborhood queries used by the rule sets and checkers.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Dense zero-based node identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    #[inline]
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Undirected simple graph with sorted adjacency lists.
///
/// Symmetric, loop-free and duplicate-free by construction; there is no way
/// to mutate a graph once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edges: usize,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edges: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges (in either orientation) and ids outside `[0, n)`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::NodeOutOfRange {
                        node: NodeId::from(x),
                        n,
                    });
                }
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop at node {u}")));
            }
            adjacency[u].push(NodeId::from(v));
            adjacency[v].push(NodeId::from(u));
            m += 1;
        }
        for (v, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Invalid(format!(
                    "duplicate edge {{{v}, {}}}",
                    w[0]
                )));
            }
        }
        Ok(Graph {
            adjacency,
            edges: m,
        })
    }

    /// Path 0 - 1 - ... - (n-1).
    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("valid path")
    }

    /// Cycle on `n >= 3` nodes.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("valid cycle")
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("valid star")
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
            .expect("valid complete graph")
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId::from)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Sorted neighbor list of `v`.
    ///
    /// Panics if `v` is out of range; see [`Graph::checked_neighbors`].
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    pub fn checked_neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.check(v)?;
        Ok(self.neighbors(v))
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.node_count()
    }

    pub fn check(&self, v: NodeId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: v,
                n: self.node_count(),
            })
        }
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Nodes at distance 1 or 2 from `v`, sorted, never including `v`.
    pub fn dist2_neighborhood(&self, v: NodeId) -> Result<Vec<NodeId>> {
        self.check(v)?;
        let mut out: Vec<NodeId> = self
            .neighbors(v)
            .iter()
            .flat_map(|&u| std::iter::once(u).chain(self.neighbors(u).iter().copied()))
            .filter(|&w| w != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// `true` iff a breadth-first search from `a` truncated at depth 2 does
    /// not reach `b`.
    pub fn pairwise_distance_gt2(&self, a: NodeId, b: NodeId) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SameNode(a));
        }
        let reached = self
            .neighbors(a)
            .iter()
            .any(|&u| u == b || self.has_edge(u, b));
        Ok(!reached)
    }
}

/// Parameters of an Erdős–Rényi G(n, p) draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphGenSpec {
    pub nodes: usize,
    /// Independent probability of each unordered pair being an edge.
    pub density: f64,
    pub seed: u64,
}

impl GraphGenSpec {
    pub fn new(nodes: usize, density: f64, seed: u64) -> Self {
        GraphGenSpec {
            nodes,
            density,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::InvalidSpec("node count must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::InvalidSpec(format!(
                "density {} outside [0, 1]",
                self.density
            )));
        }
        Ok(())
    }
}

/// Draws a G(n, p) graph. Every unordered pair is an edge independently
/// with probability `density`; the result depends only on the spec.
///
/// Uses geometric skipping over the pair sequence (Batagelj and Brandes),
/// so the cost is proportional to `n + m` rather than `n^2`.
pub fn gen_random_graph(spec: &GraphGenSpec) -> Result<Graph> {
    spec.validate()?;
    let n = spec.nodes;
    let p = spec.density;
    if p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    // pairs (w, v) with w < v, enumerated row by row
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.gen();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w = w.saturating_add(1).saturating_add(skip.min(i64::MAX as f64 / 4.0) as i64);
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Graph::from_edges(n, edges)
}
