//! The area system `-π Σ_j Q_ij A_j/m_j = B_i`, solved exactly with
//! `B` given in units of `π`.

use super::model::{DiskBundleModel, ModelError};
use crate::lattice::{IntersectionMatrix, SolveError};
use crate::rational::{self, ExactRational};
use crate::validate::ValidatedGraph;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AreaError {
    #[error("expected {expected} target areas, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("target area of {0} must be positive")]
    NonPositiveTarget(String),
    #[error("internal consistency: the area system of a validated graph has no positive solution ({0})")]
    Inconsistent(String),
    #[error("vertex {vertex}: {source}")]
    Model { vertex: String, source: ModelError },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaAssignment {
    pub vertices: Vec<String>,
    /// `B_v / π`.
    #[serde(with = "crate::rational::vec_as_string")]
    pub targets: Vec<ExactRational>,
    /// `A_v`.
    #[serde(with = "crate::rational::vec_as_string")]
    pub areas: Vec<ExactRational>,
    /// Every shared `δ` below this satisfies `2 m_v π δ < B_v`.
    #[serde(with = "crate::rational::as_string")]
    pub delta_bound: ExactRational,
    /// The `δ` used for the per-vertex models: half the bound.
    #[serde(with = "crate::rational::as_string")]
    pub delta: ExactRational,
}

impl AreaAssignment {
    /// `(-Q (A/m))_v` for each vertex, which must equal `B_v / π`.
    pub fn residual_targets(&self, graph: &ValidatedGraph) -> Vec<ExactRational> {
        let q = IntersectionMatrix::from_graph(graph);
        let y = self.scaled(graph);
        q.apply(&y).into_iter().map(|x| -x).collect()
    }

    fn scaled(&self, graph: &ValidatedGraph) -> Vec<ExactRational> {
        self.areas
            .iter()
            .zip(graph.vertices())
            .map(|(a, v)| a / BigRational::from_integer(v.weight.into()))
            .collect()
    }

    pub fn verify(&self, graph: &ValidatedGraph) -> bool {
        self.residual_targets(graph) == self.targets
            && self.areas.iter().all(|a| a.is_positive())
            && graph.vertices().iter().zip(&self.targets).all(|(v, b)| {
                rational::int(2 * v.weight as i64) * &self.delta_bound <= *b
                    && rational::int(2 * v.weight as i64) * &self.delta < *b
            })
    }

    /// The disk bundle model of each vertex. Its marked points are one per
    /// incident edge (with `A_i = A_w`, `n_i = m_w` for the neighbour `w`)
    /// followed by `m_v - d_v` unused points with `A_i = 0`.
    pub fn vertex_models(&self, graph: &ValidatedGraph) -> Result<Vec<DiskBundleModel>, AreaError> {
        let n = graph.vertex_count();
        let mut out = Vec::with_capacity(n);
        for v in 0..n {
            let label = graph.vertex(v);
            let mut ai = Vec::new();
            let mut ni = Vec::new();
            for e in graph.edges() {
                if e.tail == v || e.head == v {
                    let w = e.other(v);
                    ai.push(self.areas[w].clone());
                    ni.push(graph.vertex(w).weight);
                }
            }
            while ai.len() < label.weight as usize {
                ai.push(rational::zero());
                ni.push(1);
            }
            let model = DiskBundleModel::new(
                label.genus,
                label.weight,
                self.areas[v].clone(),
                ai,
                ni,
                self.delta.clone(),
            )
            .map_err(|source| AreaError::Model {
                vertex: label.id.clone(),
                source,
            })?;
            out.push(model);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for ((v, b), a) in self.vertices.iter().zip(&self.targets).zip(&self.areas) {
            s.push_str(&format!("{v}: B = {b}π  A = {a}\n"));
        }
        s.push_str(&format!("delta < {}  (chosen delta = {})\n", self.delta_bound, self.delta));
        s
    }
}

pub fn solve_area_system(graph: &ValidatedGraph, targets: &[ExactRational]) -> Result<AreaAssignment, AreaError> {
    let n = graph.vertex_count();
    if targets.len() != n {
        return Err(AreaError::Dimension {
            expected: n,
            got: targets.len(),
        });
    }
    if let Some(i) = targets.iter().position(|b| !b.is_positive()) {
        return Err(AreaError::NonPositiveTarget(graph.vertex(i).id.clone()));
    }
    let q = IntersectionMatrix::from_graph(graph);
    let y = q.solve_positive(targets).map_err(|e| match e {
        SolveError::Dimension { expected, got } => AreaError::Dimension { expected, got },
        other => AreaError::Inconsistent(other.to_string()),
    })?;
    let areas: Vec<ExactRational> = y
        .iter()
        .zip(graph.vertices())
        .map(|(y, v)| y * BigRational::from_integer(v.weight.into()))
        .collect();
    let delta_bound = targets
        .iter()
        .zip(graph.vertices())
        .map(|(b, v)| b / BigRational::from_integer((2 * v.weight).into()))
        .min()
        .expect("nonempty graph");
    let delta = &delta_bound / rational::int(2);
    Ok(AreaAssignment {
        vertices: graph.vertices().iter().map(|v| v.id.clone()).collect(),
        targets: targets.to_vec(),
        areas,
        delta_bound,
        delta,
    })
}
