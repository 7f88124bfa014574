//! Exact checks of the plumbing hypotheses: no loops, `m_v >= d_v`, and the
//! positivity / definiteness conditions, including the four-way equivalence
//! that holds under `m_v >= d_v` on a connected graph.

use crate::graph::PlumbingGraph;
use crate::lattice::{IntersectionMatrix, SolveError};
use crate::rational::{self, ExactRational};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Random positive right-hand sides tried for the "every b" condition, on top
/// of the all-ones vector.
pub const BASKET_RANDOM: usize = 8;
/// Seed of the basket used by [`definiteness_conditions`].
pub const BASKET_SEED: u64 = 0x05ee_d0fb;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HypothesisError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertices {0:?} have weight below their degree (m_v < d_v)")]
    DegreeTooLarge(Vec<String>),
    #[error("graph fails the plumbing hypotheses: {0}")]
    Rejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCheck {
    pub degrees: Vec<usize>,
    pub weights: Vec<u32>,
    /// `m_v >= d_v` per vertex.
    pub ok: Vec<bool>,
    /// Some vertex has `m_v > d_v`.
    pub strict_vertex_exists: bool,
}

impl DegreeCheck {
    pub fn all_ok(&self) -> bool {
        self.ok.iter().all(|&b| b)
    }
}

pub fn check_degrees(graph: &PlumbingGraph) -> DegreeCheck {
    let degrees = graph.degrees();
    let weights: Vec<u32> = graph.vertices().iter().map(|v| v.weight).collect();
    let ok = degrees
        .iter()
        .zip(&weights)
        .map(|(&d, &m)| m as usize >= d)
        .collect();
    let strict_vertex_exists = degrees.iter().zip(&weights).any(|(&d, &m)| m as usize > d);
    DegreeCheck {
        degrees,
        weights,
        ok,
        strict_vertex_exists,
    }
}

/// The four equivalent conditions, each decided on its own route.
///
/// `for_every_b` cannot be decided by enumeration. It is reported from a
/// finite basket of positive vectors (all-ones plus seeded random ones); the
/// universal statement follows from `negative_definite`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinitenessConditions {
    pub for_every_b: bool,
    pub for_some_b: bool,
    pub strict_vertex: bool,
    pub negative_definite: bool,
    pub basket_size: usize,
}

impl DefinitenessConditions {
    pub fn all_agree(&self) -> bool {
        let v = self.negative_definite;
        self.for_every_b == v && self.for_some_b == v && self.strict_vertex == v
    }
}

fn require_layout_hypotheses(graph: &PlumbingGraph) -> Result<DegreeCheck, HypothesisError> {
    if !graph.is_connected() {
        return Err(HypothesisError::Disconnected);
    }
    let degrees = check_degrees(graph);
    if !degrees.all_ok() {
        return Err(HypothesisError::DegreeTooLarge(failing_ids(graph, &degrees)));
    }
    Ok(degrees)
}

fn failing_ids(graph: &PlumbingGraph, degrees: &DegreeCheck) -> Vec<String> {
    degrees
        .ok
        .iter()
        .enumerate()
        .filter(|(_, &ok)| !ok)
        .map(|(i, _)| graph.vertex(i).id.clone())
        .collect()
}

pub fn random_positive_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<ExactRational> {
    (0..n)
        .map(|_| rational::ratio(rng.gen_range(1..=100), rng.gen_range(1..=100)))
        .collect()
}

pub fn definiteness_conditions(graph: &PlumbingGraph) -> Result<DefinitenessConditions, HypothesisError> {
    let mut rng = ChaCha8Rng::seed_from_u64(BASKET_SEED);
    definiteness_conditions_with(graph, &mut rng, BASKET_RANDOM)
}

pub fn definiteness_conditions_with<R: Rng>(
    graph: &PlumbingGraph,
    rng: &mut R,
    random_vectors: usize,
) -> Result<DefinitenessConditions, HypothesisError> {
    let degrees = require_layout_hypotheses(graph)?;
    let q = IntersectionMatrix::from_graph(graph);
    let n = q.dim();
    let ones = vec![rational::one(); n];
    let for_some_b = q.solve_positive(&ones).is_ok();
    let mut for_every_b = for_some_b;
    for _ in 0..random_vectors {
        if !for_every_b {
            break;
        }
        let b = random_positive_vector(rng, n);
        for_every_b = q.solve_positive(&b).is_ok();
    }
    Ok(DefinitenessConditions {
        for_every_b,
        for_some_b,
        strict_vertex: degrees.strict_vertex_exists,
        negative_definite: q.is_negative_definite().negative_definite,
        basket_size: random_vectors + 1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Vertex ids in matrix row order.
    pub vertex_order: Vec<String>,
    pub connected: bool,
    pub loops_ok: bool,
    pub degree_ok: bool,
    pub strict_vertex_exists: bool,
    pub negative_definite: bool,
    pub row_sums: Vec<i64>,
    #[serde(with = "crate::lattice::bigint_vec")]
    pub minors: Vec<BigInt>,
    #[serde(with = "crate::lattice::bigint_vec")]
    pub minor_signs: Vec<BigInt>,
    /// Solution of `-Q a = (1, .., 1)` when it exists and is positive.
    #[serde(with = "crate::rational::opt_vec_as_string")]
    pub positive_solution_witness: Option<Vec<ExactRational>>,
    pub failing_vertices: Vec<String>,
    pub conditions: Option<DefinitenessConditions>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.connected
            && self.loops_ok
            && self.degree_ok
            && self.negative_definite
            && self.positive_solution_witness.is_some()
    }

    pub fn summary(&self) -> String {
        let mut reasons = Vec::new();
        if !self.connected {
            reasons.push("graph is disconnected".to_string());
        }
        if !self.degree_ok {
            reasons.push(format!("m_v < d_v at {:?}", self.failing_vertices));
        }
        if !self.negative_definite {
            reasons.push("intersection form is not negative definite".to_string());
        }
        if self.positive_solution_witness.is_none() {
            reasons.push("-Q a = 1 has no positive solution".to_string());
        }
        if reasons.is_empty() {
            "all hypotheses hold".to_string()
        } else {
            reasons.join("; ")
        }
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        out.push_str(&format!("vertices: {}\n", self.vertex_order.join(", ")));
        out.push_str(&format!("connected: {}\n", self.connected));
        out.push_str(&format!("loops_ok: {}\n", self.loops_ok));
        out.push_str(&format!("degree_ok: {}\n", self.degree_ok));
        out.push_str(&format!("strict_vertex_exists: {}\n", self.strict_vertex_exists));
        out.push_str(&format!("negative_definite: {}\n", self.negative_definite));
        out.push_str(&format!("row_sums: {:?}\n", self.row_sums));
        out.push_str(&format!("leading_minors: [{}]\n", join(&self.minors)));
        out.push_str(&format!("signed_minors: [{}]\n", join(&self.minor_signs)));
        match &self.positive_solution_witness {
            Some(a) => {
                let a: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                out.push_str(&format!("positive_solution(b=1): [{}]\n", a.join(", ")));
            }
            None => out.push_str("positive_solution(b=1): none\n"),
        }
        if let Some(d) = &self.conditions {
            out.push_str(&format!(
                "conditions: (1) every b [basket of {}]: {}, (2) some b: {}, (3) strict vertex: {}, (4) negative definite: {}\n",
                d.basket_size, d.for_every_b, d.for_some_b, d.strict_vertex, d.negative_definite
            ));
        }
        out.push_str(&format!("verdict: {}\n", self.summary()));
        out
    }
}

pub fn validate(graph: &PlumbingGraph) -> ValidationReport {
    let q = IntersectionMatrix::from_graph(graph);
    let degrees = check_degrees(graph);
    let cert = q.is_negative_definite();
    let ones = vec![rational::one(); q.dim()];
    let witness = match q.solve_positive(&ones) {
        Ok(a) => Some(a),
        Err(SolveError::NotPositive { .. } | SolveError::NotSolvable) => None,
        Err(e) => unreachable!("all-ones right-hand side is well formed: {e}"),
    };
    ValidationReport {
        vertex_order: graph.vertices().iter().map(|v| v.id.clone()).collect(),
        connected: graph.is_connected(),
        loops_ok: graph.edges().iter().all(|e| e.tail != e.head),
        degree_ok: degrees.all_ok(),
        strict_vertex_exists: degrees.strict_vertex_exists,
        negative_definite: cert.negative_definite,
        row_sums: q.row_sums().0,
        minors: cert.minors,
        minor_signs: cert.signed_minors,
        positive_solution_witness: witness,
        failing_vertices: failing_ids(graph, &degrees),
        conditions: definiteness_conditions(graph).ok(),
    }
}

/// A graph known to satisfy every hypothesis, or one the caller has chosen
/// to push through anyway (`hypotheses_verified == false`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedGraph {
    graph: PlumbingGraph,
    verified: bool,
}

impl ValidatedGraph {
    pub fn new(graph: PlumbingGraph) -> Result<Self, HypothesisError> {
        let report = validate(&graph);
        if report.passes() {
            Ok(Self {
                graph,
                verified: true,
            })
        } else {
            Err(HypothesisError::Rejected(report.summary()))
        }
    }

    /// Skips the definiteness requirement. Connectivity and `m_v >= d_v` are
    /// still needed to lay out the sockets.
    pub fn forced(graph: PlumbingGraph) -> Result<Self, HypothesisError> {
        let verified = validate(&graph).passes();
        require_layout_hypotheses(&graph)?;
        Ok(Self { graph, verified })
    }

    pub fn graph(&self) -> &PlumbingGraph {
        &self.graph
    }

    pub fn hypotheses_verified(&self) -> bool {
        self.verified
    }

    pub fn into_inner(self) -> PlumbingGraph {
        self.graph
    }
}

impl std::ops::Deref for ValidatedGraph {
    type Target = PlumbingGraph;
    fn deref(&self) -> &PlumbingGraph {
        &self.graph
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexLabel;

    fn graph(vs: &[(&str, u32, u32)], es: &[(&str, &str)]) -> PlumbingGraph {
        PlumbingGraph::new(
            vs.iter().map(|&(id, g, m)| VertexLabel::new(id, g, m)).collect(),
            es,
        )
        .unwrap()
    }

    #[test]
    fn degree_examples() {
        let d = check_degrees(&graph(&[("T", 1, 1), ("S", 0, 2)], &[("T", "S")]));
        assert_eq!(d.degrees, vec![1, 1]);
        assert!(d.all_ok() && d.strict_vertex_exists);

        let d = check_degrees(&graph(&[("a", 0, 1), ("b", 0, 1)], &[("a", "b")]));
        assert!(d.all_ok() && !d.strict_vertex_exists);

        let d = check_degrees(&graph(&[("x", 0, 3)], &[]));
        assert_eq!(d.degrees, vec![0]);
        assert!(d.all_ok() && d.strict_vertex_exists);
    }

    #[test]
    fn definiteness_examples() {
        let s = definiteness_conditions(&graph(&[("T", 1, 1), ("S", 0, 2)], &[("T", "S")])).unwrap();
        assert!(s.for_every_b && s.for_some_b && s.strict_vertex && s.negative_definite);

        let s = definiteness_conditions(&graph(&[("a", 0, 1), ("b", 0, 1)], &[("a", "b")])).unwrap();
        assert!(!s.for_every_b && !s.for_some_b && !s.strict_vertex && !s.negative_definite);

        let s = definiteness_conditions(&graph(&[("x", 0, 1)], &[])).unwrap();
        assert!(s.all_agree() && s.negative_definite);
    }

    #[test]
    fn definiteness_rejects_violated_preconditions() {
        assert_eq!(
            definiteness_conditions(&graph(&[("a", 0, 1), ("b", 0, 1)], &[])),
            Err(HypothesisError::Disconnected)
        );
        assert_eq!(
            definiteness_conditions(&graph(&[("a", 0, 1), ("b", 0, 2)], &[("a", "b"), ("a", "b")])),
            Err(HypothesisError::DegreeTooLarge(vec!["a".into()]))
        );
    }

    #[test]
    fn validation_of_counterexample() {
        let r = validate(&graph(&[("a", 0, 1), ("b", 0, 1)], &[("a", "b")]));
        assert!(!r.passes());
        assert!(!r.negative_definite);
        assert!(!r.strict_vertex_exists);
        assert!(r.positive_solution_witness.is_none());
        assert!(ValidatedGraph::new(graph(&[("a", 0, 1), ("b", 0, 1)], &[("a", "b")])).is_err());
        let forced = ValidatedGraph::forced(graph(&[("a", 0, 1), ("b", 0, 1)], &[("a", "b")])).unwrap();
        assert!(!forced.hypotheses_verified());
    }

    #[test]
    fn report_is_serializable() {
        let r = validate(&graph(&[("T", 1, 1), ("S", 0, 2)], &[("T", "S")]));
        assert!(r.passes());
        let text = serde_json::to_string(&r).unwrap();
        let back: ValidationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(r.to_text().contains("negative_definite: true"));
    }
}
