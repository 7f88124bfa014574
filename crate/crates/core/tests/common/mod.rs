#![allow(dead_code)]

use plumbing_core::graph::{PlumbingGraph, VertexLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn load(name: &str) -> PlumbingGraph {
    PlumbingGraph::from_json_str(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct Family {
    pub max_vertices: usize,
    pub max_multiplicity: usize,
    pub max_excess: u32,
    pub max_genus: u32,
}

impl Default for Family {
    fn default() -> Self {
        Self {
            max_vertices: 8,
            max_multiplicity: 3,
            max_excess: 3,
            max_genus: 2,
        }
    }
}

/// Connected loop-free multigraph with `d_v <= m_v <= d_v + max_excess`.
pub fn random_graph<R: Rng>(rng: &mut R, family: Family) -> PlumbingGraph {
    let n = rng.gen_range(1..=family.max_vertices);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut mult = vec![vec![0usize; n]; n];
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
        mult[u][v] += 1;
    }
    let extra = if n > 1 { rng.gen_range(0..=n) } else { 0 };
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let (a, b) = (a.min(b), a.max(b));
        if a != b && mult[a][b] < family.max_multiplicity {
            mult[a][b] += 1;
            edges.push(if rng.gen() { (a, b) } else { (b, a) });
        }
    }
    let mut degree = vec![0u32; n];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let vertices = (0..n)
        .map(|i| {
            let m = (degree[i] + rng.gen_range(0..=family.max_excess)).max(1);
            VertexLabel::new(format!("v{i}"), rng.gen_range(0..=family.max_genus), m)
        })
        .collect();
    let named: Vec<(String, String)> = edges.iter().map(|&(a, b)| (format!("v{a}"), format!("v{b}"))).collect();
    PlumbingGraph::new(vertices, &named).unwrap()
}

pub fn random_family(seed: u64, count: usize, family: Family) -> Vec<PlumbingGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_graph(&mut rng, family)).collect()
}
