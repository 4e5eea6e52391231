//! Finite metric multigraphs.
//!
//! A [`MetricGraph`] is a connected multigraph (loops and parallel edges are
//! allowed) together with a positive finite length on every edge. Each edge
//! `(tail, head)` is identified with the interval `[0, length]`, the tail
//! sitting at `0`. A loop has `tail == head` but still owns two distinct
//! end slots, so it contributes two to the degree of its vertex.

mod families;
mod io;
pub mod random;
mod surgery;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

pub use families::{generate, Family};
pub use io::{EdgeRecord, GraphFile};
pub use surgery::{
    contract, degree_two_neighbor_of_leaf, delete_pendant_edge, identify_vertices, split_vertex,
    subdivide, SurgeryResult,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must contain at least one edge")]
    NoEdges,
    #[error("duplicate vertex id '{0}'")]
    DuplicateVertex(String),
    #[error("duplicate edge id '{0}'")]
    DuplicateEdge(String),
    #[error("edge '{edge}' references unknown vertex '{vertex}'")]
    UnknownEndpoint { edge: String, vertex: String },
    #[error("nonpositive length on edge '{edge}': {length}")]
    NonpositiveLength { edge: String, length: f64 },
    #[error("non-finite length on edge '{edge}'")]
    NonFiniteLength { edge: String },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("unknown edge '{0}'")]
    UnknownEdge(String),
    #[error("dirichlet vertex '{0}' not in vertices")]
    UnknownDirichletVertex(String),
    #[error("subdivision point {t} outside (0, {length}) on edge '{edge}'")]
    SubdivisionOutOfRange { edge: String, t: f64, length: f64 },
    #[error("cannot contract loop '{0}'")]
    LoopContraction(String),
    #[error("cannot contract or delete the last edge '{0}'")]
    LastEdge(String),
    #[error("edge '{0}' is not a pendant edge")]
    NotPendant(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("invalid family parameter: {0}")]
    InvalidFamily(String),
    #[error("expected {expected} edge lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
    #[error("graph file: {0}")]
    Parse(String),
}

/// Which end of an edge: `Tail` is `x = 0`, `Head` is `x = length`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Tail,
    Head,
}

/// One end slot of an edge. Loops have two distinct slots at the same vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: End,
}

impl EdgeEnd {
    pub fn tail(edge: usize) -> Self {
        Self { edge, end: End::Tail }
    }

    pub fn head(edge: usize) -> Self {
        Self { edge, end: End::Head }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    pub fn endpoint(&self, end: End) -> usize {
        match end {
            End::Tail => self.tail,
            End::Head => self.head,
        }
    }

    /// The endpoint opposite to `v`; for loops this is `v` itself.
    pub fn other(&self, v: usize) -> usize {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<EdgeEnd>>,
}

impl MetricGraph {
    /// Builds a graph from vertex ids and `(edge id, tail id, head id, length)`
    /// tuples, checking every invariant including connectivity.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (String, String, String, f64)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut built = Vec::new();
        for (id, tail, head, length) in edges {
            let lookup = |v: &String| {
                index.get(v).copied().ok_or_else(|| GraphError::UnknownEndpoint {
                    edge: id.clone(),
                    vertex: v.clone(),
                })
            };
            let (t, h) = (lookup(&tail)?, lookup(&head)?);
            built.push(Edge { id, tail: t, head: h, length });
        }
        Self::from_parts(vertices, built, true)
    }

    /// Index-based constructor used by surgery. Connectivity is only enforced
    /// when `require_connected` is set.
    pub(crate) fn from_parts(
        vertices: Vec<String>,
        edges: Vec<Edge>,
        require_connected: bool,
    ) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !seen.insert(e.id.as_str()) {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            if !e.length.is_finite() {
                return Err(GraphError::NonFiniteLength { edge: e.id.clone() });
            }
            if e.length <= 0.0 {
                return Err(GraphError::NonpositiveLength { edge: e.id.clone(), length: e.length });
            }
            for v in [e.tail, e.head] {
                if v >= vertices.len() {
                    return Err(GraphError::UnknownEndpoint {
                        edge: e.id.clone(),
                        vertex: format!("#{v}"),
                    });
                }
            }
        }
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            incidence[e.tail].push(EdgeEnd::tail(i));
            incidence[e.head].push(EdgeEnd::head(i));
        }
        let g = Self { vertices, edges, incidence };
        if require_connected && !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub(crate) fn require_vertex(&self, id: &str) -> Result<usize, GraphError> {
        self.vertex_index(id).ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
    }

    pub(crate) fn require_edge(&self, id: &str) -> Result<usize, GraphError> {
        self.edge_index(id).ok_or_else(|| GraphError::UnknownEdge(id.to_string()))
    }

    /// Edge ends incident to `v`, in edge order with the tail slot first.
    pub fn incidence(&self, v: usize) -> &[EdgeEnd] {
        &self.incidence[v]
    }

    pub fn end_vertex(&self, end: EdgeEnd) -> usize {
        self.edges[end.edge].endpoint(end.end)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn min_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.vertices.len()];
        let mut components = 0;
        for start in 0..self.vertices.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for end in &self.incidence[v] {
                    let w = self.edges[end.edge].other(v);
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// First Betti number `m - n + c` (`c` components; `c = 1` for valid graphs).
    pub fn betti(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    /// Vertices of degree one, in vertex order.
    pub fn pendant_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.degree(v) == 1).collect()
    }

    pub fn pendant_count(&self) -> usize {
        self.pendant_vertices().len()
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.betti() == 0
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(Edge::is_loop)
    }

    /// No loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut pairs = BTreeSet::new();
        self.edges.iter().all(|e| {
            let key = (e.tail.min(e.head), e.tail.max(e.head));
            !e.is_loop() && pairs.insert(key)
        })
    }

    /// Number of edges joining `u` and `v` (loops at `u` when `u == v`).
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| (e.tail == u && e.head == v) || (e.tail == v && e.head == u))
            .count()
    }

    /// A pendant edge is one incident to a vertex of degree one.
    pub fn is_pendant_edge(&self, e: usize) -> bool {
        let edge = &self.edges[e];
        !edge.is_loop() && (self.degree(edge.tail) == 1 || self.degree(edge.head) == 1)
    }

    /// Same combinatorics, new lengths (validated).
    pub fn with_lengths(&self, lengths: &[f64]) -> Result<Self, GraphError> {
        if lengths.len() != self.edges.len() {
            return Err(GraphError::LengthCount { expected: self.edges.len(), got: lengths.len() });
        }
        let edges = self
            .edges
            .iter()
            .zip(lengths)
            .map(|(e, &length)| Edge { length, ..e.clone() })
            .collect();
        Self::from_parts(self.vertices.clone(), edges, false)
    }

    pub fn with_edge_length(&self, e: usize, length: f64) -> Result<Self, GraphError> {
        let mut lengths = self.lengths();
        lengths[e] = length;
        self.with_lengths(&lengths)
    }

    /// Multiplies every length by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self, GraphError> {
        let lengths: Vec<f64> = self.edges.iter().map(|e| c * e.length).collect();
        self.with_lengths(&lengths)
    }

    /// Whether the graph is `K_{1,3}`: one vertex of degree three joined by
    /// single edges to three leaves.
    pub fn is_claw(&self) -> bool {
        self.vertex_count() == 4
            && self.edge_count() == 3
            && self.is_tree()
            && (0..4).filter(|&v| self.degree(v) == 3).count() == 1
    }

    /// Whether the graph is the complete simple graph on four vertices.
    pub fn is_k4(&self) -> bool {
        self.vertex_count() == 4
            && self.edge_count() == 6
            && self.is_simple()
            && (0..4).all(|v| self.degree(v) == 3)
    }

    /// Whether deleting some vertex leaves an induced subgraph that is a tree
    /// on the remaining `n - 1` vertices. Only meaningful for simple graphs.
    pub fn admits_induced_tree_of_order_n_minus_1(&self) -> bool {
        let n = self.vertex_count();
        if n < 2 {
            return false;
        }
        (0..n).any(|removed| {
            let kept: Vec<usize> = self
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.tail != removed && e.head != removed)
                .map(|(i, _)| i)
                .collect();
            if kept.len() != n - 2 {
                return false;
            }
            // union-find over the remaining vertices
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                p[x] = r;
                r
            }
            for &i in &kept {
                let (a, b) = (find(&mut parent, self.edges[i].tail), find(&mut parent, self.edges[i].head));
                if a == b {
                    return false;
                }
                parent[a] = b;
            }
            true
        })
    }

    /// `(β, pendant vertex ids)`.
    pub fn betti_and_pendants(&self) -> (usize, Vec<String>) {
        let pendants = self.pendant_vertices().into_iter().map(|v| self.vertices[v].clone()).collect();
        (self.betti(), pendants)
    }
}

/// Dirichlet vertex set `D`. Empty means the pure Neumann (Kirchhoff) problem.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundarySpec {
    dirichlet: BTreeSet<String>,
}

impl BoundarySpec {
    pub fn neumann() -> Self {
        Self::default()
    }

    pub fn dirichlet<I>(vertices: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        Self { dirichlet: vertices.into_iter().map(Into::into).collect() }
    }

    pub fn is_neumann(&self) -> bool {
        self.dirichlet.is_empty()
    }

    pub fn len(&self) -> usize {
        self.dirichlet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirichlet.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> {
        self.dirichlet.iter().map(String::as_str)
    }

    pub fn contains(&self, v: &str) -> bool {
        self.dirichlet.contains(v)
    }

    /// Per-vertex Dirichlet flags for `g`.
    pub fn mask(&self, g: &MetricGraph) -> Result<Vec<bool>, GraphError> {
        let mut mask = vec![false; g.vertex_count()];
        for v in &self.dirichlet {
            let i = g
                .vertex_index(v)
                .ok_or_else(|| GraphError::UnknownDirichletVertex(v.clone()))?;
            mask[i] = true;
        }
        Ok(mask)
    }

    /// Image of `D` under a surgery's vertex map. Removed vertices drop out.
    pub fn mapped(&self, surgery: &SurgeryResult) -> Self {
        let dirichlet = self
            .dirichlet
            .iter()
            .flat_map(|v| surgery.vertex_map.get(v).cloned().unwrap_or_default())
            .collect();
        Self { dirichlet }
    }

    pub fn with_vertex(&self, v: impl Into<String>) -> Self {
        let mut d = self.clone();
        d.dirichlet.insert(v.into());
        d
    }

    pub fn without_vertex(&self, v: &str) -> Self {
        let mut d = self.clone();
        d.dirichlet.remove(v);
        d
    }
}

/// Vertex/edge ids that do not collide with existing ones.
pub(crate) fn fresh_id(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}~{i}"))
        .find(|c| !taken.contains(c))
        .expect("infinite candidate sequence")
}
