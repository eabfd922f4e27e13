//! Graph supports, adjacency structures and their sufficient statistics.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The support of a random graph: vertex count, directedness and loop policy.
///
/// Fixes the number of edge variables e* and, for directed loopless spaces,
/// the number of dyads D*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphSpace {
    pub n_vertices: usize,
    pub directed: bool,
    pub loops: bool,
}

impl GraphSpace {
    pub fn new(n_vertices: usize, directed: bool, loops: bool) -> Self {
        Self {
            n_vertices,
            directed,
            loops,
        }
    }

    pub fn directed(n_vertices: usize) -> Self {
        Self::new(n_vertices, true, false)
    }

    pub fn undirected(n_vertices: usize) -> Self {
        Self::new(n_vertices, false, false)
    }

    /// Number of edge variables, e*.
    pub fn edge_vars(&self) -> usize {
        let n = self.n_vertices;
        let off = if self.directed {
            n * n.saturating_sub(1)
        } else {
            n * n.saturating_sub(1) / 2
        };
        if self.loops {
            off + n
        } else {
            off
        }
    }

    /// Number of unordered vertex pairs, D*.
    pub fn dyads(&self) -> usize {
        self.n_vertices * self.n_vertices.saturating_sub(1) / 2
    }

    /// True for the directed, loopless spaces on which dyad statistics are defined.
    pub fn supports_dyads(&self) -> bool {
        self.directed && !self.loops
    }

    pub fn require_dyadic(&self) -> Result<()> {
        if self.supports_dyads() {
            Ok(())
        } else {
            Err(Error::UnsupportedSpace(format!(
                "dyad statistics need a directed loopless space (directed={}, loops={})",
                self.directed, self.loops
            )))
        }
    }

    /// Whether (i, j) is an edge variable of this space, in its canonical orientation.
    pub fn is_edge_var(&self, i: usize, j: usize) -> bool {
        let n = self.n_vertices;
        if i >= n || j >= n {
            return false;
        }
        if i == j {
            return self.loops;
        }
        self.directed || i < j
    }

    /// All edge variables in lexicographic (row-major) order.
    pub fn edge_var_list(&self) -> Vec<(usize, usize)> {
        let n = self.n_vertices;
        let mut out = Vec::with_capacity(self.edge_vars());
        for i in 0..n {
            for j in 0..n {
                if self.is_edge_var(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Unordered vertex pairs `(i, j)` with `i < j`, row-major.
    pub fn dyad_list(&self) -> Vec<(usize, usize)> {
        let n = self.n_vertices;
        let mut out = Vec::with_capacity(self.dyads());
        for i in 0..n {
            for j in (i + 1)..n {
                out.push((i, j));
            }
        }
        out
    }
}

/// Edge and null counts, e(y) and n(y).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCounts {
    pub edges: usize,
    pub nulls: usize,
}

/// Dyad census (M, A, N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DyadCensus {
    pub mutual: usize,
    pub asymmetric: usize,
    pub null: usize,
}

impl DyadCensus {
    pub fn new(mutual: usize, asymmetric: usize, null: usize) -> Self {
        Self {
            mutual,
            asymmetric,
            null,
        }
    }

    pub fn total(&self) -> usize {
        self.mutual + self.asymmetric + self.null
    }
}

/// Graph-level indices recorded along contagion traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GliRecord {
    pub density: f64,
    /// `None` when the graph has no ties to reciprocate.
    pub edgewise_reciprocity: Option<f64>,
    pub connectedness: f64,
}

/// Binary adjacency structure over a [`GraphSpace`]. Dense, 0-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    space: GraphSpace,
    adj: Vec<bool>,
}

impl Graph {
    pub fn empty(space: GraphSpace) -> Self {
        let n = space.n_vertices;
        Self {
            space,
            adj: vec![false; n * n],
        }
    }

    pub fn complete(space: GraphSpace) -> Self {
        let mut g = Self::empty(space);
        for (i, j) in space.edge_var_list() {
            g.set(i, j, true);
        }
        g
    }

    /// Builds a graph from 0-indexed edges, rejecting anything outside the support.
    pub fn from_edges(space: GraphSpace, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(space);
        for &(i, j) in edges {
            g.try_set(i, j, true)?;
        }
        Ok(g)
    }

    /// Builds a graph from edge-variable states in lexicographic order.
    pub fn from_edge_states(space: GraphSpace, states: &[bool]) -> Result<Self> {
        let vars = space.edge_var_list();
        if vars.len() != states.len() {
            return Err(Error::Mismatch(format!(
                "expected {} edge states, got {}",
                vars.len(),
                states.len()
            )));
        }
        let mut g = Self::empty(space);
        for (&(i, j), &s) in vars.iter().zip(states) {
            g.set(i, j, s);
        }
        Ok(g)
    }

    pub fn space(&self) -> GraphSpace {
        self.space
    }

    pub fn n_vertices(&self) -> usize {
        self.space.n_vertices
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.space.n_vertices + j]
    }

    /// Sets an edge variable. Undirected graphs keep both triangles in sync.
    ///
    /// The caller guarantees `(i, j)` lies in the support.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i != j || self.space.loops);
        let n = self.space.n_vertices;
        self.adj[i * n + j] = value;
        if !self.space.directed {
            self.adj[j * n + i] = value;
        }
    }

    /// Checked variant of [`Graph::set`].
    pub fn try_set(&mut self, i: usize, j: usize, value: bool) -> Result<()> {
        let n = self.space.n_vertices;
        if i >= n || j >= n {
            return Err(Error::SupportViolation {
                i: i + 1,
                j: j + 1,
                reason: format!("vertex out of range 1..={n}"),
            });
        }
        if i == j && !self.space.loops {
            return Err(Error::SupportViolation {
                i: i + 1,
                j: j + 1,
                reason: "loops are not permitted".into(),
            });
        }
        self.set(i, j, value);
        Ok(())
    }

    /// Edge-variable states in lexicographic order.
    pub fn edge_states(&self) -> Vec<bool> {
        self.space
            .edge_var_list()
            .into_iter()
            .map(|(i, j)| self.has_edge(i, j))
            .collect()
    }

    /// Realized edges as 0-indexed pairs in canonical orientation.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.space
            .edge_var_list()
            .into_iter()
            .filter(|&(i, j)| self.has_edge(i, j))
            .collect()
    }

    /// e(y) and n(y) = e* - e(y).
    pub fn edge_counts(&self) -> EdgeCounts {
        let edges = self.edge_count();
        EdgeCounts {
            edges,
            nulls: self.space.edge_vars() - edges,
        }
    }

    pub fn edge_count(&self) -> usize {
        let n = self.space.n_vertices;
        let mut e = 0;
        for i in 0..n {
            let row = &self.adj[i * n..(i + 1) * n];
            if self.space.directed {
                e += row.iter().enumerate().filter(|&(j, &b)| b && (j != i)).count();
                if self.space.loops && row[i] {
                    e += 1;
                }
            } else {
                let start = if self.space.loops { i } else { i + 1 };
                e += row[start..].iter().filter(|&&b| b).count();
            }
        }
        e
    }

    /// Dyad census (M, A, N). Only defined on directed loopless spaces.
    pub fn dyad_census(&self) -> Result<DyadCensus> {
        self.space.require_dyadic()?;
        Ok(self.census_off_diagonal())
    }

    fn census_off_diagonal(&self) -> DyadCensus {
        let n = self.space.n_vertices;
        let mut c = DyadCensus::default();
        for i in 0..n {
            for j in (i + 1)..n {
                match (self.has_edge(i, j), self.has_edge(j, i)) {
                    (true, true) => c.mutual += 1,
                    (false, false) => c.null += 1,
                    _ => c.asymmetric += 1,
                }
            }
        }
        c
    }

    /// Density, edgewise reciprocity and Krackhardt connectedness.
    pub fn gli(&self) -> GliRecord {
        let e_star = self.space.edge_vars();
        let density = if e_star == 0 {
            0.0
        } else {
            self.edge_count() as f64 / e_star as f64
        };
        let edgewise_reciprocity = if self.space.directed {
            let c = self.census_off_diagonal();
            let ties = 2 * c.mutual + c.asymmetric;
            (ties > 0).then(|| 2.0 * c.mutual as f64 / ties as f64)
        } else {
            let any = self
                .space
                .edge_var_list()
                .into_iter()
                .any(|(i, j)| i != j && self.has_edge(i, j));
            any.then_some(1.0)
        };
        GliRecord {
            density,
            edgewise_reciprocity,
            connectedness: self.connectedness(),
        }
    }

    /// Fraction of unordered vertex pairs joined in the weakly symmetrized graph.
    /// Zero for graphs with fewer than two vertices.
    pub fn connectedness(&self) -> f64 {
        let n = self.space.n_vertices;
        if n < 2 {
            return 0.0;
        }
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && self.has_edge(i, j) {
                    uf.union(i, j);
                }
            }
        }
        let mut sizes = vec![0usize; n];
        for v in 0..n {
            sizes[uf.find(v)] += 1;
        }
        let joined: usize = sizes.iter().map(|&s| s * s.saturating_sub(1) / 2).sum();
        joined as f64 / (n * (n - 1) / 2) as f64
    }

    /// Canonical encoding: bit k holds the k-th edge variable in lexicographic order.
    pub fn encode(&self) -> Result<u64> {
        let e_star = self.space.edge_vars();
        if e_star > 64 {
            return Err(Error::SpaceTooLarge { edge_vars: e_star });
        }
        Ok(self
            .space
            .edge_var_list()
            .into_iter()
            .enumerate()
            .filter(|&(_, (i, j))| self.has_edge(i, j))
            .fold(0u64, |acc, (k, _)| acc | (1 << k)))
    }

    pub fn decode(space: GraphSpace, code: u64) -> Result<Self> {
        let vars = space.edge_var_list();
        if vars.len() > 64 {
            return Err(Error::SpaceTooLarge {
                edge_vars: vars.len(),
            });
        }
        if vars.len() < 64 && code >> vars.len() != 0 {
            return Err(Error::Parse(format!("code {code} exceeds {} bits", vars.len())));
        }
        let mut g = Self::empty(space);
        for (k, (i, j)) in vars.into_iter().enumerate() {
            if code >> k & 1 == 1 {
                g.set(i, j, true);
            }
        }
        Ok(g)
    }

    /// Graph with every edge variable flipped.
    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.space);
        for (i, j) in self.space.edge_var_list() {
            g.set(i, j, !self.has_edge(i, j));
        }
        g
    }

    /// Relabels vertices: vertex `v` of `self` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut g = Self::empty(self.space);
        for (i, j) in self.edges() {
            g.set(perm[i], perm[j], true);
        }
        g
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
