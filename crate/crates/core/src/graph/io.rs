use serde::{Deserialize, Serialize};

use super::{BoundarySpec, GraphError, MetricGraph};

/// On-disk graph format:
///
/// ```json
/// {"vertices": ["w","x"], "edges": [{"id":"wx","ends":["w","x"],"length":1.0}], "dirichlet": ["x"]}
/// ```
///
/// `dirichlet` is optional; absent or empty means the Neumann problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dirichlet: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: String,
    pub ends: [String; 2],
    pub length: f64,
}

impl GraphFile {
    pub fn from_graph(g: &MetricGraph, b: &BoundarySpec) -> Self {
        Self {
            vertices: g.vertices().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    id: e.id.clone(),
                    ends: [g.vertex_id(e.tail).to_string(), g.vertex_id(e.head).to_string()],
                    length: e.length,
                })
                .collect(),
            dirichlet: b.vertices().map(str::to_string).collect(),
        }
    }

    /// Parses and validates. JSON syntax errors carry serde's line/column.
    pub fn parse(text: &str) -> Result<(MetricGraph, BoundarySpec), GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        file.into_graph()
    }

    pub fn into_graph(self) -> Result<(MetricGraph, BoundarySpec), GraphError> {
        let g = MetricGraph::new(
            self.vertices,
            self.edges.into_iter().map(|e| {
                let [tail, head] = e.ends;
                (e.id, tail, head, e.length)
            }),
        )?;
        let b = BoundarySpec::dirichlet(self.dirichlet);
        b.mask(&g)?;
        Ok((g, b))
    }
}
