//! Local graph modifications. Every operation returns the new graph along
//! with total maps from old vertex and edge ids to their images. Fresh ids
//! are derived by suffixing: subdividing `e7` yields `e7.a`, `e7.b` and the
//! vertex `e7.v`; splitting `w` yields `w.0`, `w.1`, ...

use std::collections::{BTreeMap, BTreeSet};

use super::{fresh_id, Edge, EdgeEnd, End, GraphError, MetricGraph};

#[derive(Clone, Debug)]
pub struct SurgeryResult {
    pub graph: MetricGraph,
    /// Old vertex id to its images; empty when the vertex was removed.
    pub vertex_map: BTreeMap<String, Vec<String>>,
    /// Old edge id to its images; empty when the edge was removed.
    pub edge_map: BTreeMap<String, Vec<String>>,
    /// Only vertex splitting can produce `false`.
    pub connected: bool,
}

fn identity_vertex_map(g: &MetricGraph) -> BTreeMap<String, Vec<String>> {
    g.vertices().iter().map(|v| (v.clone(), vec![v.clone()])).collect()
}

fn identity_edge_map(g: &MetricGraph) -> BTreeMap<String, Vec<String>> {
    g.edges().iter().map(|e| (e.id.clone(), vec![e.id.clone()])).collect()
}

/// Replaces edge `edge` by two edges of lengths `t` and `length - t` meeting
/// at a fresh vertex of degree two. Subdividing a loop yields two parallel
/// edges.
pub fn subdivide(g: &MetricGraph, edge: &str, t: f64) -> Result<SurgeryResult, GraphError> {
    let e = g.require_edge(edge)?;
    let old = g.edge(e);
    if !(t > 0.0 && t < old.length) {
        return Err(GraphError::SubdivisionOutOfRange { edge: old.id.clone(), t, length: old.length });
    }
    let vertex_ids: BTreeSet<String> = g.vertices().iter().cloned().collect();
    let mid_id = fresh_id(&format!("{}.v", old.id), &vertex_ids);
    let mut edge_ids: BTreeSet<String> = g.edges().iter().map(|e| e.id.clone()).collect();
    let a_id = fresh_id(&format!("{}.a", old.id), &edge_ids);
    edge_ids.insert(a_id.clone());
    let b_id = fresh_id(&format!("{}.b", old.id), &edge_ids);

    let mut vertices = g.vertices().to_vec();
    vertices.push(mid_id);
    let mid = vertices.len() - 1;
    let mut edges = Vec::with_capacity(g.edge_count() + 1);
    for (i, edge) in g.edges().iter().enumerate() {
        if i == e {
            edges.push(Edge { id: a_id.clone(), tail: edge.tail, head: mid, length: t });
            edges.push(Edge { id: b_id.clone(), tail: mid, head: edge.head, length: edge.length - t });
        } else {
            edges.push(edge.clone());
        }
    }
    let mut edge_map = identity_edge_map(g);
    edge_map.insert(old.id.clone(), vec![a_id, b_id]);
    Ok(SurgeryResult {
        graph: MetricGraph::from_parts(vertices, edges, true)?,
        vertex_map: identity_vertex_map(g),
        edge_map,
        connected: true,
    })
}

/// Merges `vertices` into the first one listed. Edges between them become
/// loops; nothing is deleted.
pub fn identify_vertices(g: &MetricGraph, vertices: &[&str]) -> Result<SurgeryResult, GraphError> {
    let targets: Vec<usize> =
        vertices.iter().map(|v| g.require_vertex(v)).collect::<Result<_, _>>()?;
    let Some(&keep) = targets.first() else {
        return Err(GraphError::InvalidPartition("no vertices to identify".into()));
    };
    let removed: BTreeSet<usize> = targets.iter().copied().filter(|&v| v != keep).collect();
    let (new_vertices, index) = reindex(g, &removed, keep);
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge { tail: index[e.tail], head: index[e.head], ..e.clone() })
        .collect();
    let mut vertex_map = identity_vertex_map(g);
    for &v in &removed {
        vertex_map.insert(g.vertex_id(v).to_string(), vec![g.vertex_id(keep).to_string()]);
    }
    let graph = MetricGraph::from_parts(new_vertices, edges, false)?;
    let connected = graph.is_connected();
    Ok(SurgeryResult { graph, vertex_map, edge_map: identity_edge_map(g), connected })
}

/// Vertex list without `removed`, and the old-to-new index map. Removed
/// vertices map to the new index of `fallback`.
fn reindex(g: &MetricGraph, removed: &BTreeSet<usize>, fallback: usize) -> (Vec<String>, Vec<usize>) {
    let mut vertices = Vec::new();
    let mut index = vec![usize::MAX; g.vertex_count()];
    for v in 0..g.vertex_count() {
        if !removed.contains(&v) {
            index[v] = vertices.len();
            vertices.push(g.vertex_id(v).to_string());
        }
    }
    for &v in removed {
        index[v] = index[fallback];
    }
    (vertices, index)
}

/// Contracts the non-loop edge `edge`: its head is identified with its tail
/// and the edge disappears. Other lengths are unchanged; parallel edges that
/// collapse become loops.
pub fn contract(g: &MetricGraph, edge: &str) -> Result<SurgeryResult, GraphError> {
    let e = g.require_edge(edge)?;
    let old = g.edge(e);
    if old.is_loop() {
        return Err(GraphError::LoopContraction(old.id.clone()));
    }
    if g.edge_count() < 2 {
        return Err(GraphError::LastEdge(old.id.clone()));
    }
    let (keep, gone) = (old.tail, old.head);
    let (vertices, index) = reindex(g, &BTreeSet::from([gone]), keep);
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != e)
        .map(|(_, x)| Edge { tail: index[x.tail], head: index[x.head], ..x.clone() })
        .collect();
    let mut vertex_map = identity_vertex_map(g);
    vertex_map.insert(g.vertex_id(gone).to_string(), vec![g.vertex_id(keep).to_string()]);
    let mut edge_map = identity_edge_map(g);
    edge_map.insert(old.id.clone(), vec![]);
    Ok(SurgeryResult {
        graph: MetricGraph::from_parts(vertices, edges, true)?,
        vertex_map,
        edge_map,
        connected: true,
    })
}

/// Replaces `vertex` by one new vertex per part of `partition`; each edge end
/// at `vertex` is reattached to the vertex of its part. The result may be
/// disconnected, which is reported through [`SurgeryResult::connected`].
pub fn split_vertex(
    g: &MetricGraph,
    vertex: &str,
    partition: &[Vec<EdgeEnd>],
) -> Result<SurgeryResult, GraphError> {
    let v = g.require_vertex(vertex)?;
    if partition.is_empty() || partition.iter().any(Vec::is_empty) {
        return Err(GraphError::InvalidPartition("every part must be non-empty".into()));
    }
    let incident: BTreeSet<EdgeEnd> = g.incidence(v).iter().copied().collect();
    let mut part_of = BTreeMap::new();
    for (i, part) in partition.iter().enumerate() {
        for &end in part {
            if !incident.contains(&end) {
                return Err(GraphError::InvalidPartition(format!(
                    "{:?} end of edge '{}' is not at vertex '{vertex}'",
                    end.end,
                    g.edges().get(end.edge).map_or("?", |e| e.id.as_str()),
                )));
            }
            if part_of.insert(end, i).is_some() {
                return Err(GraphError::InvalidPartition(format!(
                    "edge end of '{}' listed twice",
                    g.edge(end.edge).id
                )));
            }
        }
    }
    if part_of.len() != incident.len() {
        return Err(GraphError::InvalidPartition(format!(
            "partition covers {} of {} edge ends at '{vertex}'",
            part_of.len(),
            incident.len()
        )));
    }

    let mut taken: BTreeSet<String> = g.vertices().iter().cloned().collect();
    let mut new_ids = Vec::new();
    for i in 0..partition.len() {
        let id = fresh_id(&format!("{vertex}.{i}"), &taken);
        taken.insert(id.clone());
        new_ids.push(id);
    }
    let mut vertices = Vec::new();
    let mut index = vec![0; g.vertex_count()];
    let mut part_index = Vec::new();
    for w in 0..g.vertex_count() {
        if w == v {
            for id in &new_ids {
                part_index.push(vertices.len());
                vertices.push(id.clone());
            }
        } else {
            index[w] = vertices.len();
            vertices.push(g.vertex_id(w).to_string());
        }
    }
    let place = |edge: usize, end: End, old: usize| -> usize {
        if old == v {
            part_index[part_of[&EdgeEnd { edge, end }]]
        } else {
            index[old]
        }
    };
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| Edge {
            tail: place(i, End::Tail, e.tail),
            head: place(i, End::Head, e.head),
            ..e.clone()
        })
        .collect();
    let graph = MetricGraph::from_parts(vertices, edges, false)?;
    let mut vertex_map = identity_vertex_map(g);
    vertex_map.insert(vertex.to_string(), new_ids);
    let connected = graph.is_connected();
    Ok(SurgeryResult { graph, vertex_map, edge_map: identity_edge_map(g), connected })
}

/// Removes a pendant edge together with its degree-one vertex.
pub fn delete_pendant_edge(g: &MetricGraph, edge: &str) -> Result<SurgeryResult, GraphError> {
    let e = g.require_edge(edge)?;
    let old = g.edge(e);
    if g.edge_count() < 2 {
        return Err(GraphError::LastEdge(old.id.clone()));
    }
    if !g.is_pendant_edge(e) {
        return Err(GraphError::NotPendant(old.id.clone()));
    }
    let leaf = if g.degree(old.head) == 1 { old.head } else { old.tail };
    let (vertices, index) = reindex(g, &BTreeSet::from([leaf]), old.other(leaf));
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != e)
        .map(|(_, x)| Edge { tail: index[x.tail], head: index[x.head], ..x.clone() })
        .collect();
    let mut vertex_map = identity_vertex_map(g);
    vertex_map.insert(g.vertex_id(leaf).to_string(), vec![]);
    let mut edge_map = identity_edge_map(g);
    edge_map.insert(old.id.clone(), vec![]);
    Ok(SurgeryResult {
        graph: MetricGraph::from_parts(vertices, edges, true)?,
        vertex_map,
        edge_map,
        connected: true,
    })
}

/// In a tree with at least two edges and no two leaf edges sharing a vertex,
/// some vertex of degree two is adjacent to a leaf. Returns the first such
/// vertex in vertex order. A violated hypothesis is an error; `Ok(None)`
/// would mean the structural fact itself failed.
pub fn degree_two_neighbor_of_leaf(g: &MetricGraph) -> Result<Option<String>, GraphError> {
    if !g.is_tree() {
        return Err(GraphError::HypothesisFailed("graph is not a tree".into()));
    }
    if g.edge_count() < 2 {
        return Err(GraphError::HypothesisFailed("tree has fewer than two edges".into()));
    }
    let mut leaf_edges_at = vec![0usize; g.vertex_count()];
    for e in g.edges() {
        if g.degree(e.tail) == 1 {
            leaf_edges_at[e.head] += 1;
        }
        if g.degree(e.head) == 1 {
            leaf_edges_at[e.tail] += 1;
        }
    }
    if let Some(w) = leaf_edges_at.iter().position(|&c| c >= 2) {
        return Err(GraphError::HypothesisFailed(format!(
            "leaf edges are incident at vertex '{}'",
            g.vertex_id(w)
        )));
    }
    Ok((0..g.vertex_count())
        .find(|&w| {
            g.degree(w) == 2
                && g.incidence(w).iter().any(|end| g.degree(g.edge(end.edge).other(w)) == 1)
        })
        .map(|w| g.vertex_id(w).to_string()))
}
