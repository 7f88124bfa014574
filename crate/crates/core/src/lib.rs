//! Convex plumbings of symplectic disk bundles: graph hypotheses, the
//! Lefschetz fibration and open book read off the graph, homology of the
//! page, chart-local symplectic models and cut-and-paste invariants.

pub mod cli;
pub mod fiber;
pub mod graph;
pub mod homology;
pub mod invariants;
pub mod lattice;
pub mod rational;
pub mod symplectic;
pub mod validate;

pub use fiber::{build_fiber, build_lefschetz, build_open_book, compile, CompiledFibration, FiberSurface};
pub use graph::{GraphError, PlumbingGraph, VertexLabel};
pub use homology::{homology_basis, CurveClass, CurveKind, HomologyModel, IntMatrix, WordEntry};
pub use invariants::{boundary_homology, relation_library, substitute, SubstitutionRelation};
pub use lattice::IntersectionMatrix;
pub use rational::ExactRational;
pub use validate::{validate, ValidatedGraph, ValidationReport};
