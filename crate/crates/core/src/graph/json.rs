use serde::{Deserialize, Serialize};

use super::{Edge, Graph};
use crate::error::{Error, Result};

/// Graph interchange format:
/// `{"n": N, "directed": bool, "edges": [[i, j, w], ...]}` with 1-based
/// node indices. Every directed edge is listed; an undirected graph lists
/// both orientations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize, f64)>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson {
            n: g.node_count(),
            directed: g.is_directed(),
            edges: g
                .edges()
                .iter()
                .map(|e| (e.tail + 1, e.head + 1, e.weight))
                .collect(),
        }
    }
}

impl GraphJson {
    /// Validates the record and builds the graph. The first violation is
    /// reported with its 1-based edge coordinates.
    pub fn into_graph(self) -> Result<Graph> {
        for &(i, j, w) in &self.edges {
            let bad = |reason: String| Error::InvalidEdge {
                tail: i,
                head: j,
                reason,
            };
            if i == 0 || j == 0 || i > self.n || j > self.n {
                return Err(bad(format!("endpoint outside 1..={}", self.n)));
            }
            if i == j {
                return Err(bad("self-loop".into()));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(bad(format!("weight {w} must be finite and positive")));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|&(i, j, w)| Edge::new(i - 1, j - 1, w))
            .collect();
        let g = Graph::new(self.n, edges)?;
        if !self.directed {
            if let Some(e) = g
                .edges()
                .iter()
                .find(|e| g.weight(e.head, e.tail) != Some(e.weight))
            {
                return Err(Error::InvalidEdge {
                    tail: e.tail + 1,
                    head: e.head + 1,
                    reason: "declared undirected but the reverse edge is missing or has a different weight"
                        .into(),
                });
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph json is always serializable")
    }
}

impl Graph {
    pub fn to_json(&self) -> String {
        GraphJson::from(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let record: GraphJson = serde_json::from_str(text)?;
        record.into_graph()
    }
}
