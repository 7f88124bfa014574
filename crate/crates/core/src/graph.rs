//! Decorated plumbing graphs and their JSON file format.
//!
//! A vertex carries a genus `g_v` and a weight `m_v >= 1`; the surface it
//! stands for has self-intersection `-m_v`. Edges form a multiset of
//! unordered pairs of distinct vertices, stored in input order so that each
//! edge (and hence each neck curve downstream) keeps its own identity.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, VecDeque};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexLabel {
    pub id: String,
    pub genus: u32,
    pub weight: u32,
}

impl VertexLabel {
    pub fn new(id: impl Into<String>, genus: u32, weight: u32) -> Self {
        Self {
            id: id.into(),
            genus,
            weight,
        }
    }

    pub fn self_intersection(&self) -> i64 {
        -i64::from(self.weight)
    }
}

/// An edge between two vertex indices. `tail` is the first endpoint as given
/// in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{position}: {message}")]
    Field { position: String, message: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("{position}: duplicate vertex id {id:?}")]
    DuplicateId { position: String, id: String },
    #[error("{position}: unknown vertex id {id:?}")]
    UnknownVertex { position: String, id: String },
    #[error("{position}: loop at vertex {id:?} (edges must join distinct vertices)")]
    Loop { position: String, id: String },
    #[error("{position}: weight must be at least 1 (self-intersection strictly negative), got self-intersection {selfint}")]
    SelfIntersection { position: String, selfint: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingGraph {
    vertices: Vec<VertexLabel>,
    edges: Vec<Edge>,
    index: BTreeMap<String, usize>,
}

impl PlumbingGraph {
    /// Builds a graph from labels and id pairs. Vertex order is kept as given
    /// and becomes the row order of the intersection matrix.
    pub fn new<S: AsRef<str>>(
        vertices: Vec<VertexLabel>,
        edges: &[(S, S)],
    ) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if v.weight == 0 {
                return Err(GraphError::SelfIntersection {
                    position: format!("vertices[{i}]"),
                    selfint: 0,
                });
            }
            if index.insert(v.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateId {
                    position: format!("vertices[{i}]"),
                    id: v.id.clone(),
                });
            }
        }
        let mut out = Vec::with_capacity(edges.len());
        for (k, (a, b)) in edges.iter().enumerate() {
            let (a, b) = (a.as_ref(), b.as_ref());
            let lookup = |id: &str, slot: usize| {
                index
                    .get(id)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownVertex {
                        position: format!("edges[{k}][{slot}]"),
                        id: id.to_string(),
                    })
            };
            let tail = lookup(a, 0)?;
            let head = lookup(b, 1)?;
            if tail == head {
                return Err(GraphError::Loop {
                    position: format!("edges[{k}]"),
                    id: a.to_string(),
                });
            }
            out.push(Edge { tail, head });
        }
        Ok(Self {
            vertices,
            edges: out,
            index,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, GraphError> {
        let value: Value = serde_json::from_str(text).map_err(|e| GraphError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<Self, GraphError> {
        let field = |position: &str, message: &str| GraphError::Field {
            position: position.to_string(),
            message: message.to_string(),
        };
        let obj = value
            .as_object()
            .ok_or_else(|| field("$", "expected an object with \"vertices\" and \"edges\""))?;
        let raw_vertices = obj
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| field("$.vertices", "expected an array"))?;
        let mut vertices = Vec::with_capacity(raw_vertices.len());
        for (i, rv) in raw_vertices.iter().enumerate() {
            let pos = format!("vertices[{i}]");
            let id = match rv.get("id") {
                Some(Value::String(s)) => s.clone(),
                Some(Value::Number(n)) => n.to_string(),
                _ => return Err(field(&format!("{pos}.id"), "expected a string")),
            };
            let genus = rv
                .get("genus")
                .and_then(Value::as_i64)
                .ok_or_else(|| field(&format!("{pos}.genus"), "expected an integer"))?;
            if genus < 0 {
                return Err(field(&format!("{pos}.genus"), "genus must be nonnegative"));
            }
            let selfint = rv
                .get("selfint")
                .and_then(Value::as_i64)
                .ok_or_else(|| field(&format!("{pos}.selfint"), "expected an integer"))?;
            if selfint >= 0 {
                return Err(GraphError::SelfIntersection {
                    position: format!("{pos}.selfint"),
                    selfint,
                });
            }
            let genus = u32::try_from(genus)
                .map_err(|_| field(&format!("{pos}.genus"), "genus out of range"))?;
            let weight = u32::try_from(-selfint)
                .map_err(|_| field(&format!("{pos}.selfint"), "self-intersection out of range"))?;
            vertices.push(VertexLabel { id, genus, weight });
        }
        let raw_edges = match obj.get("edges") {
            None => Vec::new(),
            Some(Value::Array(a)) => a.clone(),
            Some(_) => return Err(field("$.edges", "expected an array")),
        };
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (k, re) in raw_edges.iter().enumerate() {
            let pair = re
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| field(&format!("edges[{k}]"), "expected a pair of vertex ids"))?;
            let name = |v: &Value, slot: usize| match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(field(&format!("edges[{k}][{slot}]"), "expected a vertex id")),
            };
            edges.push((name(&pair[0], 0)?, name(&pair[1], 1)?));
        }
        Self::new(vertices, &edges)
    }

    pub fn to_json_value(&self) -> Value {
        let vertices: Vec<Value> = self
            .vertices
            .iter()
            .map(|v| {
                serde_json::json!({
                    "id": v.id,
                    "genus": v.genus,
                    "selfint": v.self_intersection(),
                })
            })
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| serde_json::json!([self.vertices[e.tail].id, self.vertices[e.head].id]))
            .collect();
        serde_json::json!({ "vertices": vertices, "edges": edges })
    }

    pub fn vertices(&self) -> &[VertexLabel] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &VertexLabel {
        &self.vertices[i]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Total number of edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Id-to-row map for the intersection matrix.
    pub fn index_map(&self) -> &BTreeMap<String, usize> {
        &self.index
    }

    /// Degree counted with edge multiplicity.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.tail == v || e.head == v)
            .count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for e in &self.edges {
            d[e.tail] += 1;
            d[e.head] += 1;
        }
        d
    }

    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| (e.tail == a && e.head == b) || (e.tail == b && e.head == a))
            .count()
    }

    pub fn total_genus(&self) -> u64 {
        self.vertices.iter().map(|v| u64::from(v.genus)).sum()
    }

    /// First Betti number of the underlying multigraph, `E - n + c`.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    /// Vertices reachable from `start`, ignoring edge `skip` if given.
    fn reach(&self, start: usize, skip: Option<usize>) -> Vec<bool> {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for (k, e) in self.edges.iter().enumerate() {
            if Some(k) == skip {
                continue;
            }
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn component_count(&self) -> usize {
        let n = self.vertices.len();
        let mut label = vec![false; n];
        let mut count = 0;
        for v in 0..n {
            if !label[v] {
                count += 1;
                for (w, hit) in self.reach(v, None).into_iter().enumerate() {
                    label[w] |= hit;
                }
            }
        }
        count
    }

    /// Single-vertex graphs count as connected.
    pub fn is_connected(&self) -> bool {
        self.reach(0, None).iter().all(|&s| s)
    }

    /// Vertices on the tail side of edge `k` after deleting it, or `None` if
    /// the edge lies on a cycle.
    pub fn bridge_side(&self, k: usize) -> Option<Vec<bool>> {
        let e = self.edges[k];
        let side = self.reach(e.tail, Some(k));
        if side[e.head] {
            None
        } else {
            Some(side)
        }
    }

    pub fn is_bridge(&self, k: usize) -> bool {
        self.bridge_side(k).is_some()
    }
}
