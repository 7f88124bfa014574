//! First homology of the page with its intersection pairing, and the action
//! of twist words on it.
//!
//! Basis order for a page of genus `g` with `b >= 1` boundary components:
//! the `g` symplectic pairs first (per-vertex handles `a_i[v], b_i[v]` in
//! vertex order, then one `x[e], y[e]` pair per chord `e` of a BFS spanning
//! tree), then the boundary classes `bd_1 .. bd_{b-1}` of the free sockets in
//! canonical order. The last free socket is eliminated: its class is minus
//! the sum of the others.
//!
//! `x[e]` is the belt circle of chord `e`. The belt circle of a tree edge is
//! then forced by the subsurface relation on the tail side of its
//! fundamental cut: the oriented boundary circles of any union of pieces sum
//! to zero.
//!
//! Equality of word actions is a necessary condition for equality in the
//! mapping class group, not a sufficient one.

use crate::fiber::{neck_curves_of, FiberSurface, NeckCurve, NeckKind, Socket, RIGHT_TWIST_SIGN};
use crate::graph::PlumbingGraph;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

pub const EQUALITY_CAVEAT: &str = "homology-level necessary condition";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomologyError {
    #[error("page has no boundary; the model needs b >= 1")]
    ClosedPage,
    #[error("unknown curve id {0:?}")]
    UnknownCurve(String),
    #[error("class has length {got}, model rank is {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("twist exponent must be +1 or -1, got {0}")]
    Exponent(i64),
    #[error("integer overflow while multiplying twist matrices")]
    Overflow,
    #[error("word entry must give exactly one of \"neck\" or \"class\"")]
    Entry,
}

/// Dense square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut rows = vec![vec![0; n]; n];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 1;
        }
        Self { rows }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        Self {
            rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i]).collect()).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let n = self.dim();
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.rows[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let t = a.checked_mul(other.rows[k][j])?;
                    rows[i][j] = rows[i][j].checked_add(t)?;
                }
            }
        }
        Some(Self { rows })
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, e: u32) -> Option<Self> {
        let mut out = Self::identity(self.dim());
        for _ in 0..e {
            out = out.checked_mul(self)?;
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    pub fn zero(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Self(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    fn add_scaled(&mut self, other: &CurveClass, s: i64) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }
}

/// Isotopy-level shape of a neck curve on the page, read off the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// Bounds a disk on the page.
    Inessential,
    /// Cobounds an annulus with a boundary component.
    BoundaryParallel,
    /// Separating but not boundary-parallel.
    Separating,
    NonSeparating,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedNeck {
    pub curve: NeckCurve,
    pub class: CurveClass,
    pub kind: CurveKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyModel {
    pub genus: u64,
    pub boundary_count: u64,
    pub labels: Vec<String>,
    pairing: IntMatrix,
    necks: Vec<ClassifiedNeck>,
}

/// A twist word: entries apply as matrices multiplied in written order.
pub type TwistWord = Vec<(CurveClass, i64)>;

impl HomologyModel {
    /// The model of an abstract page with no neck data.
    pub fn standard(genus: u64, boundary_count: u64) -> Result<Self, HomologyError> {
        if boundary_count == 0 {
            return Err(HomologyError::ClosedPage);
        }
        let mut labels = Vec::new();
        for i in 1..=genus {
            labels.push(format!("a{i}"));
            labels.push(format!("b{i}"));
        }
        for j in 1..boundary_count {
            labels.push(format!("bd{j}"));
        }
        Ok(Self {
            genus,
            boundary_count,
            pairing: standard_pairing(genus as usize, labels.len()),
            labels,
            necks: Vec::new(),
        })
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn pairing(&self) -> &IntMatrix {
        &self.pairing
    }

    pub fn necks(&self) -> &[ClassifiedNeck] {
        &self.necks
    }

    pub fn pair(&self, x: &CurveClass, y: &CurveClass) -> i64 {
        let px = self.pairing.transpose().apply(&x.0);
        px.iter().zip(&y.0).map(|(a, b)| a * b).sum()
    }

    pub fn check_class(&self, c: &CurveClass) -> Result<(), HomologyError> {
        if c.0.len() != self.rank() {
            return Err(HomologyError::Dimension {
                expected: self.rank(),
                got: c.0.len(),
            });
        }
        Ok(())
    }

    pub fn class_of_neck(&self, id: &str) -> Result<&CurveClass, HomologyError> {
        self.neck(id).map(|n| &n.class)
    }

    pub fn neck(&self, id: &str) -> Result<&ClassifiedNeck, HomologyError> {
        self.necks
            .iter()
            .find(|n| n.curve.id == id)
            .ok_or_else(|| HomologyError::UnknownCurve(id.to_string()))
    }

    /// Whether `c` pairs to zero with everything.
    pub fn in_radical(&self, c: &CurveClass) -> bool {
        self.pairing.apply(&c.0).iter().all(|&x| x == 0)
    }

    /// `T_c^{±1}`, column `j` is the image of basis vector `j`.
    pub fn transvection_power(&self, c: &CurveClass, exponent: i64) -> Result<IntMatrix, HomologyError> {
        self.check_class(c)?;
        if exponent != 1 && exponent != -1 {
            return Err(HomologyError::Exponent(exponent));
        }
        let r = self.rank();
        let s = RIGHT_TWIST_SIGN * exponent;
        // <e_j, c> = (P c)_j
        let pc = self.pairing.apply(&c.0);
        let mut rows = IntMatrix::identity(r).rows;
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry += s * pc[j] * c.0[i];
            }
        }
        Ok(IntMatrix { rows })
    }

    pub fn transvection(&self, c: &CurveClass) -> Result<IntMatrix, HomologyError> {
        self.transvection_power(c, 1)
    }

    pub fn word_action(&self, word: &[(CurveClass, i64)]) -> Result<IntMatrix, HomologyError> {
        let mut acc = IntMatrix::identity(self.rank());
        for (c, e) in word {
            let t = self.transvection_power(c, *e)?;
            acc = acc.checked_mul(&t).ok_or(HomologyError::Overflow)?;
        }
        Ok(acc)
    }

    pub fn preserves_pairing(&self, m: &IntMatrix) -> bool {
        m.transpose()
            .checked_mul(&self.pairing)
            .and_then(|x| x.checked_mul(m))
            .is_some_and(|x| x == self.pairing)
    }

    pub fn homologically_equal(
        &self,
        w1: &[(CurveClass, i64)],
        w2: &[(CurveClass, i64)],
    ) -> Result<HomologyComparison, HomologyError> {
        let action1 = self.word_action(w1)?;
        let action2 = self.word_action(w2)?;
        Ok(HomologyComparison {
            equal: action1 == action2,
            action1,
            action2,
            caveat: EQUALITY_CAVEAT.to_string(),
        })
    }

    /// One right twist per neck curve, in canonical order.
    pub fn multitwist(&self) -> TwistWord {
        self.necks.iter().map(|n| (n.class.clone(), 1)).collect()
    }

    pub fn resolve(&self, entries: &[WordEntry]) -> Result<TwistWord, HomologyError> {
        entries
            .iter()
            .map(|e| {
                let class = match (&e.neck, &e.class) {
                    (Some(id), None) => self.class_of_neck(id)?.clone(),
                    (None, Some(v)) => {
                        let c = CurveClass(v.clone());
                        self.check_class(&c)?;
                        c
                    }
                    _ => return Err(HomologyError::Entry),
                };
                Ok((class, e.power))
            })
            .collect()
    }
}

fn standard_pairing(genus: usize, rank: usize) -> IntMatrix {
    let mut p = vec![vec![0i64; rank]; rank];
    for i in 0..genus {
        p[2 * i][2 * i + 1] = 1;
        p[2 * i + 1][2 * i] = -1;
    }
    IntMatrix { rows: p }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyComparison {
    pub equal: bool,
    pub action1: IntMatrix,
    pub action2: IntMatrix,
    pub caveat: String,
}

/// A word entry as read from JSON: either a neck id or explicit coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neck: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<Vec<i64>>,
    #[serde(default = "default_power")]
    pub power: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<CurveKind>,
}

fn default_power() -> i64 {
    1
}

impl WordEntry {
    pub fn class(class: Vec<i64>, power: i64) -> Self {
        Self {
            neck: None,
            class: Some(class),
            power,
            kind: None,
        }
    }

    pub fn neck(id: impl Into<String>, power: i64) -> Self {
        Self {
            neck: Some(id.into()),
            class: None,
            power,
            kind: None,
        }
    }

    pub fn with_kind(mut self, kind: CurveKind) -> Self {
        self.kind = Some(kind);
        self
    }
}

/// Spanning-tree data shared by the class computation.
struct TreeData {
    in_tree: Vec<bool>,
    tree_adj: Vec<Vec<(usize, usize)>>,
}

fn bfs_tree(graph: &PlumbingGraph) -> TreeData {
    let n = graph.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for (k, e) in graph.edges().iter().enumerate() {
        adj[e.tail].push((e.head, k));
        adj[e.head].push((e.tail, k));
    }
    let mut in_tree = vec![false; graph.edge_count()];
    let mut tree_adj = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, k) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                in_tree[k] = true;
                tree_adj[v].push((w, k));
                tree_adj[w].push((v, k));
                queue.push_back(w);
            }
        }
    }
    TreeData { in_tree, tree_adj }
}

/// Tail side of the fundamental cut of tree edge `k`.
fn tree_side(tree: &TreeData, graph: &PlumbingGraph, k: usize) -> Vec<bool> {
    let start = graph.edges()[k].tail;
    let mut side = vec![false; graph.vertex_count()];
    side[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(w, j) in &tree.tree_adj[v] {
            if j != k && !side[w] {
                side[w] = true;
                stack.push(w);
            }
        }
    }
    side
}

pub fn homology_basis(fiber: &FiberSurface) -> Result<HomologyModel, HomologyError> {
    if fiber.boundary_count == 0 {
        return Err(HomologyError::ClosedPage);
    }
    let graph = fiber.to_graph();
    let tree = bfs_tree(&graph);
    let free = fiber.free_sockets_canonical();

    let mut labels = Vec::new();
    for p in &fiber.pieces {
        for i in 1..=p.genus {
            labels.push(format!("a{i}[{}]", p.vertex));
            labels.push(format!("b{i}[{}]", p.vertex));
        }
    }
    let mut chord_slot = vec![None; graph.edge_count()];
    for k in (0..graph.edge_count()).filter(|&k| !tree.in_tree[k]) {
        chord_slot[k] = Some(labels.len());
        labels.push(format!("x[e{k}]"));
        labels.push(format!("y[e{k}]"));
    }
    let genus = labels.len() / 2;
    debug_assert_eq!(genus as u64, fiber.genus);
    let bd_start = labels.len();
    for j in 1..free.len() {
        labels.push(format!("bd{j}"));
    }
    let rank = labels.len();

    let socket_class = |s: &Socket| -> CurveClass {
        let pos = free.iter().position(|f| f == s).expect("free socket");
        if pos + 1 < free.len() {
            CurveClass::unit(rank, bd_start + pos)
        } else {
            let mut c = CurveClass::zero(rank);
            for j in 0..free.len() - 1 {
                c.0[bd_start + j] = -1;
            }
            c
        }
    };
    let vidx = |s: &Socket| graph.index_of(&s.vertex).expect("socket vertex");

    let edge_class = |k: usize| -> CurveClass {
        if let Some(slot) = chord_slot[k] {
            return CurveClass::unit(rank, slot);
        }
        let side = tree_side(&tree, &graph, k);
        let mut c = CurveClass::zero(rank);
        for s in free.iter().filter(|s| side[vidx(s)]) {
            c.add_scaled(&socket_class(s), -1);
        }
        for (j, e) in graph.edges().iter().enumerate() {
            if let Some(slot) = chord_slot[j] {
                match (side[e.tail], side[e.head]) {
                    (true, false) => c.0[slot] -= 1,
                    (false, true) => c.0[slot] += 1,
                    _ => {}
                }
            }
        }
        c
    };

    let necks = neck_curves_of(fiber)
        .into_iter()
        .map(|curve| {
            let (class, kind) = match &curve.kind {
                NeckKind::BoundaryParallel { socket } => {
                    (socket_class(socket), CurveKind::BoundaryParallel)
                }
                NeckKind::Edge { edge, .. } => (edge_class(*edge), edge_kind(&graph, *edge)),
            };
            ClassifiedNeck { curve, class, kind }
        })
        .collect();

    Ok(HomologyModel {
        genus: fiber.genus,
        boundary_count: fiber.boundary_count,
        pairing: standard_pairing(genus, rank),
        labels,
        necks,
    })
}

fn edge_kind(graph: &PlumbingGraph, k: usize) -> CurveKind {
    let Some(side) = graph.bridge_side(k) else {
        return CurveKind::NonSeparating;
    };
    // A side of the cut: its pieces, internal tubes, one disk for the neck.
    let side_shape = |on: bool| {
        let verts: Vec<usize> = (0..graph.vertex_count()).filter(|&v| side[v] == on).collect();
        let internal = graph
            .edges()
            .iter()
            .filter(|e| side[e.tail] == on && side[e.head] == on)
            .count() as i64;
        let genus: i64 = verts.iter().map(|&v| i64::from(graph.vertex(v).genus)).sum::<i64>()
            + internal
            - verts.len() as i64
            + 1;
        let degrees = graph.degrees();
        let free: i64 = verts
            .iter()
            .map(|&v| i64::from(graph.vertex(v).weight) - degrees[v] as i64)
            .sum();
        (genus, free)
    };
    let shapes = [side_shape(true), side_shape(false)];
    if shapes.contains(&(0, 0)) {
        CurveKind::Inessential
    } else if shapes.contains(&(0, 1)) {
        CurveKind::BoundaryParallel
    } else {
        CurveKind::Separating
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::build_fiber;
    use crate::graph::VertexLabel;
    use crate::validate::ValidatedGraph;

    fn model(vs: &[(&str, u32, u32)], es: &[(&str, &str)]) -> HomologyModel {
        let g = PlumbingGraph::new(
            vs.iter().map(|&(id, g, m)| VertexLabel::new(id, g, m)).collect(),
            es,
        )
        .unwrap();
        homology_basis(&build_fiber(&ValidatedGraph::new(g).unwrap())).unwrap()
    }

    fn torus_page() -> HomologyModel {
        HomologyModel::standard(1, 1).unwrap()
    }

    fn at_bt(power: usize) -> TwistWord {
        let a = CurveClass(vec![1, 0]);
        let b = CurveClass(vec![0, 1]);
        (0..power).flat_map(|_| [(a.clone(), 1), (b.clone(), 1)]).collect()
    }

    #[test]
    fn basis_examples() {
        let m = torus_page();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.pair(&CurveClass(vec![1, 0]), &CurveClass(vec![0, 1])), 1);

        let annulus = model(&[("u", 0, 2), ("w", 0, 2)], &[("u", "w")]);
        assert_eq!(annulus.rank(), 1);
        assert_eq!(annulus.labels, vec!["bd1"]);
        assert!(annulus.pairing().rows().iter().flatten().all(|&x| x == 0));

        let m = HomologyModel::standard(2, 3).unwrap();
        assert_eq!(m.rank(), 6);
        assert_eq!(crate::lattice::rank(m.pairing().rows()), 4);

        assert_eq!(HomologyModel::standard(1, 0), Err(HomologyError::ClosedPage));
    }

    #[test]
    fn neck_class_examples() {
        let m = model(&[("T", 1, 1), ("S", 0, 2)], &[("T", "S")]);
        assert_eq!(m.rank(), 2);
        for n in m.necks() {
            assert!(n.class.is_zero(), "{n:?}");
            assert_eq!(n.kind, CurveKind::BoundaryParallel);
        }

        let m = model(&[("u", 0, 2), ("w", 0, 2)], &[("u", "w")]);
        let edge = m
            .necks()
            .iter()
            .find(|n| matches!(n.curve.kind, NeckKind::Edge { .. }))
            .unwrap();
        assert_eq!(edge.class.0.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1]);
        assert_eq!(edge.kind, CurveKind::BoundaryParallel);
        assert!(m.class_of_neck("nope").is_err());
    }

    #[test]
    fn chord_necks_are_nonseparating() {
        let m = model(&[("a", 0, 3), ("b", 0, 3)], &[("a", "b"), ("a", "b")]);
        assert_eq!((m.genus, m.boundary_count), (1, 2));
        let edge_necks: Vec<_> = m
            .necks()
            .iter()
            .filter(|n| matches!(n.curve.kind, NeckKind::Edge { .. }))
            .collect();
        assert_eq!(edge_necks.len(), 2);
        for n in &edge_necks {
            assert_eq!(n.kind, CurveKind::NonSeparating);
            assert!(!m.in_radical(&n.class));
        }
    }

    #[test]
    fn inessential_leaf_neck() {
        let m = model(&[("a", 0, 3), ("leaf", 0, 1)], &[("a", "leaf")]);
        let edge = m.necks().iter().find(|n| matches!(n.curve.kind, NeckKind::Edge { .. })).unwrap();
        assert_eq!(edge.kind, CurveKind::Inessential);
        assert!(edge.class.is_zero());
    }

    #[test]
    fn transvection_examples() {
        let m = torus_page();
        assert!(m.transvection(&CurveClass::zero(2)).unwrap().is_identity());
        let t = m.transvection(&CurveClass(vec![1, 0])).unwrap();
        assert_eq!(t.apply(&[0, 1]), vec![-1, 1]);
        assert_eq!(t.apply(&[1, 0]), vec![1, 0]);

        let m = HomologyModel::standard(1, 2).unwrap();
        assert!(m.transvection(&CurveClass(vec![0, 0, 1])).unwrap().is_identity());
        assert!(matches!(
            m.transvection(&CurveClass(vec![1, 0])),
            Err(HomologyError::Dimension { .. })
        ));
    }

    #[test]
    fn word_action_examples() {
        let m = torus_page();
        let d = CurveClass::zero(2);
        assert!(m.word_action(&[(d.clone(), 1), (d.clone(), 1)]).unwrap().is_identity());

        let six = m.word_action(&at_bt(1)).unwrap().pow(6).unwrap();
        assert!(six.is_identity());
        assert!(!m.word_action(&at_bt(1)).unwrap().pow(3).unwrap().is_identity());
        assert!(m.word_action(&at_bt(12)).unwrap().is_identity());

        let a = CurveClass(vec![1, 0]);
        assert!(m.word_action(&[(a.clone(), 1), (a, -1)]).unwrap().is_identity());
    }

    #[test]
    fn homological_equality_examples() {
        let m = torus_page();
        let d = CurveClass::zero(2);
        let r = m.homologically_equal(&[(d.clone(), 1), (d.clone(), 1)], &at_bt(12)).unwrap();
        assert!(r.equal);
        assert_eq!(r.caveat, EQUALITY_CAVEAT);
        assert!(m.homologically_equal(&[(d, 1)], &at_bt(6)).unwrap().equal);
        let a = CurveClass(vec![1, 0]);
        let b = CurveClass(vec![0, 1]);
        assert!(!m.homologically_equal(&[(a, 1)], &[(b, 1)]).unwrap().equal);
    }

    #[test]
    fn resolves_word_entries() {
        let m = model(&[("T", 1, 1), ("S", 0, 2)], &[("T", "S")]);
        let w = m
            .resolve(&[WordEntry::neck("c1", 1), WordEntry::class(vec![1, 0], -1)])
            .unwrap();
        assert_eq!(w[1], (CurveClass(vec![1, 0]), -1));
        assert!(m.resolve(&[WordEntry::neck("c9", 1)]).is_err());
        let bad = WordEntry {
            neck: None,
            class: None,
            power: 1,
            kind: None,
        };
        assert_eq!(m.resolve(&[bad]), Err(HomologyError::Entry));
        assert!(matches!(
            m.transvection_power(&CurveClass(vec![1, 0]), 2),
            Err(HomologyError::Exponent(2))
        ));
    }
}
