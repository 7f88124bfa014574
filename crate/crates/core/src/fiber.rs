//! Fiber surface, neck curves, open book and Lefschetz data of a validated
//! plumbing graph.
//!
//! Each vertex `v` contributes a closed genus `g_v` surface with `m_v`
//! numbered sockets (boundary circles). Edges, in input order, consume the
//! lowest free socket at each endpoint and join the two sockets by a tube;
//! the `m_v - d_v` sockets left over are capped by nothing and become
//! boundary components of the page. Every tube and every free socket carries
//! one neck curve, and the monodromy is one right-handed twist per neck.

use crate::graph::{PlumbingGraph, VertexLabel};
use crate::validate::ValidatedGraph;
use serde::{Deserialize, Serialize};

/// Sign attached to every monodromy twist. `+1` is a right-handed twist and
/// acts on homology by `x -> x + <x, c> c`.
pub const RIGHT_TWIST_SIGN: i64 = 1;

pub const INTERCHANGE_FORMAT: &str = "plumbing-lefschetz/1";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Socket {
    pub vertex: String,
    /// 1-based, at most the vertex weight.
    pub index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub vertex: String,
    pub genus: u32,
    pub sockets: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    /// Edge position in the input graph.
    pub edge: usize,
    /// How many earlier edges join the same pair of vertices.
    pub multiplicity_index: usize,
    pub tail: Socket,
    pub head: Socket,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeSockets {
    pub vertex: String,
    pub sockets: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberSurface {
    pub genus: u64,
    pub boundary_count: u64,
    pub pieces: Vec<Piece>,
    pub gluings: Vec<Gluing>,
    pub free_sockets: Vec<FreeSockets>,
}

impl FiberSurface {
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary_count as i64
    }

    /// Free sockets sorted by `(vertex id, socket index)`.
    pub fn free_sockets_canonical(&self) -> Vec<Socket> {
        let mut all: Vec<Socket> = self
            .free_sockets
            .iter()
            .flat_map(|f| {
                f.sockets.iter().map(|&index| Socket {
                    vertex: f.vertex.clone(),
                    index,
                })
            })
            .collect();
        all.sort();
        all
    }

    /// The plumbing graph this surface was built from.
    pub fn to_graph(&self) -> PlumbingGraph {
        let vertices = self
            .pieces
            .iter()
            .map(|p| VertexLabel::new(p.vertex.clone(), p.genus, p.sockets))
            .collect();
        let mut gluings: Vec<&Gluing> = self.gluings.iter().collect();
        gluings.sort_by_key(|g| g.edge);
        let edges: Vec<(String, String)> = gluings
            .iter()
            .map(|g| (g.tail.vertex.clone(), g.head.vertex.clone()))
            .collect();
        PlumbingGraph::new(vertices, &edges).expect("pieces and gluings form a valid graph")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "location", rename_all = "snake_case")]
pub enum NeckKind {
    /// Belt circle of the tube for input edge `edge`, oriented as a boundary
    /// circle of the tail piece.
    Edge {
        edge: usize,
        tail: Socket,
        head: Socket,
        multiplicity_index: usize,
    },
    /// Parallel copy of a free socket, oriented as a boundary component of
    /// the page.
    BoundaryParallel { socket: Socket },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeckCurve {
    pub id: String,
    #[serde(flatten)]
    pub kind: NeckKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Handedness {
    Right,
}

impl Handedness {
    pub fn sign(self) -> i64 {
        match self {
            Handedness::Right => RIGHT_TWIST_SIGN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Twist {
    pub curve: String,
    pub handedness: Handedness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenBook {
    pub page: FiberSurface,
    pub curves: Vec<NeckCurve>,
    pub monodromy: Vec<Twist>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "component", rename_all = "snake_case")]
pub enum SingularComponent {
    /// One of the input surfaces `C_v`.
    Closed { vertex: String, genus: u32 },
    /// Normal disk over an unused marked point of `C_v`.
    Disk { vertex: String, socket: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LefschetzFibrationData {
    pub fiber: FiberSurface,
    pub vanishing_cycles: Vec<NeckCurve>,
    pub singular_fiber: Vec<SingularComponent>,
    pub double_point_count: usize,
}

fn socket_layout(graph: &PlumbingGraph) -> (Vec<Gluing>, Vec<FreeSockets>) {
    let mut next = vec![1u32; graph.vertex_count()];
    let mut gluings = Vec::with_capacity(graph.edge_count());
    for (k, e) in graph.edges().iter().enumerate() {
        let multiplicity_index = graph.edges()[..k]
            .iter()
            .filter(|f| {
                (f.tail == e.tail && f.head == e.head) || (f.tail == e.head && f.head == e.tail)
            })
            .count();
        let mut take = |v: usize| {
            let s = Socket {
                vertex: graph.vertex(v).id.clone(),
                index: next[v],
            };
            next[v] += 1;
            s
        };
        let tail = take(e.tail);
        let head = take(e.head);
        gluings.push(Gluing {
            edge: k,
            multiplicity_index,
            tail,
            head,
        });
    }
    let free = graph
        .vertices()
        .iter()
        .zip(&next)
        .map(|(v, &first)| FreeSockets {
            vertex: v.id.clone(),
            sockets: (first..=v.weight).collect(),
        })
        .collect();
    (gluings, free)
}

pub fn build_fiber(graph: &ValidatedGraph) -> FiberSurface {
    let n = graph.vertex_count() as i64;
    let e = graph.edge_count() as i64;
    let genus = graph.total_genus() as i64 + e - n + 1;
    let (gluings, free_sockets) = socket_layout(graph);
    let boundary_count = free_sockets.iter().map(|f| f.sockets.len() as u64).sum();
    FiberSurface {
        genus: genus as u64,
        boundary_count,
        pieces: graph
            .vertices()
            .iter()
            .map(|v| Piece {
                vertex: v.id.clone(),
                genus: v.genus,
                sockets: v.weight,
            })
            .collect(),
        gluings,
        free_sockets,
    }
}

/// Neck curves of a fiber in canonical order: boundary-parallel necks by
/// `(vertex id, socket)`, then edge necks by `(sorted endpoint ids,
/// multiplicity index)`. Ids are `c1..ck` in that order.
pub fn neck_curves_of(fiber: &FiberSurface) -> Vec<NeckCurve> {
    let mut kinds: Vec<NeckKind> = fiber
        .free_sockets_canonical()
        .into_iter()
        .map(|socket| NeckKind::BoundaryParallel { socket })
        .collect();
    let mut edges: Vec<&Gluing> = fiber.gluings.iter().collect();
    edges.sort_by(|a, b| {
        let key = |g: &Gluing| {
            let (x, y) = (g.tail.vertex.clone(), g.head.vertex.clone());
            (if x <= y { (x, y) } else { (y, x) }, g.multiplicity_index, g.edge)
        };
        key(a).cmp(&key(b))
    });
    kinds.extend(edges.into_iter().map(|g| NeckKind::Edge {
        edge: g.edge,
        tail: g.tail.clone(),
        head: g.head.clone(),
        multiplicity_index: g.multiplicity_index,
    }));
    kinds
        .into_iter()
        .enumerate()
        .map(|(i, kind)| NeckCurve {
            id: format!("c{}", i + 1),
            kind,
        })
        .collect()
}

pub fn neck_curves(graph: &ValidatedGraph) -> Vec<NeckCurve> {
    neck_curves_of(&build_fiber(graph))
}

pub fn build_open_book(graph: &ValidatedGraph) -> OpenBook {
    let page = build_fiber(graph);
    let curves = neck_curves_of(&page);
    let monodromy = curves
        .iter()
        .map(|c| Twist {
            curve: c.id.clone(),
            handedness: Handedness::Right,
        })
        .collect();
    OpenBook {
        page,
        curves,
        monodromy,
    }
}

pub fn build_lefschetz(graph: &ValidatedGraph) -> LefschetzFibrationData {
    let fiber = build_fiber(graph);
    let vanishing_cycles = neck_curves_of(&fiber);
    let mut singular_fiber: Vec<SingularComponent> = graph
        .vertices()
        .iter()
        .map(|v| SingularComponent::Closed {
            vertex: v.id.clone(),
            genus: v.genus,
        })
        .collect();
    singular_fiber.extend(fiber.free_sockets_canonical().into_iter().map(|s| {
        SingularComponent::Disk {
            vertex: s.vertex,
            socket: s.index,
        }
    }));
    LefschetzFibrationData {
        double_point_count: vanishing_cycles.len(),
        fiber,
        vanishing_cycles,
        singular_fiber,
    }
}

pub fn chi_fiber(fiber: &FiberSurface) -> i64 {
    fiber.euler_characteristic()
}

/// `Σ (2 - 2 g_v) - E`, the Euler characteristic of the plumbed 4-manifold.
pub fn chi_plumbing(graph: &PlumbingGraph) -> i64 {
    graph
        .vertices()
        .iter()
        .map(|v| 2 - 2 * i64::from(v.genus))
        .sum::<i64>()
        - graph.edge_count() as i64
}

/// One 0-handle's worth of fiber plus one 2-handle per vanishing cycle must
/// reproduce the plumbing's Euler characteristic.
pub fn chi_total_check(graph: &ValidatedGraph) -> bool {
    let fiber = build_fiber(graph);
    let k = neck_curves_of(&fiber).len() as i64;
    chi_fiber(&fiber) + k == chi_plumbing(graph)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSummary {
    pub genus: u64,
    pub boundary: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerSummary {
    pub chi_fiber: i64,
    pub vanishing_cycles: usize,
    pub chi_plumbing: i64,
}

/// The open-book / Lefschetz interchange document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledFibration {
    pub format: String,
    pub hypotheses_verified: bool,
    pub page: PageSummary,
    pub pieces: Vec<Piece>,
    pub gluings: Vec<Gluing>,
    pub free_sockets: Vec<FreeSockets>,
    pub curves: Vec<NeckCurve>,
    pub monodromy: Vec<String>,
    pub singular_fiber: Vec<SingularComponent>,
    pub euler: EulerSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterchangeError {
    #[error("invalid interchange JSON: {0}")]
    Json(String),
    #[error("unsupported interchange format {0:?}")]
    Format(String),
}

impl CompiledFibration {
    pub fn fiber(&self) -> FiberSurface {
        FiberSurface {
            genus: self.page.genus,
            boundary_count: self.page.boundary,
            pieces: self.pieces.clone(),
            gluings: self.gluings.clone(),
            free_sockets: self.free_sockets.clone(),
        }
    }

    pub fn curve(&self, id: &str) -> Option<&NeckCurve> {
        self.curves.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("interchange serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, InterchangeError> {
        let doc: Self =
            serde_json::from_str(text).map_err(|e| InterchangeError::Json(e.to_string()))?;
        if doc.format != INTERCHANGE_FORMAT {
            return Err(InterchangeError::Format(doc.format));
        }
        Ok(doc)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "page: genus {}, {} boundary component(s)\n",
            self.page.genus, self.page.boundary
        ));
        if !self.hypotheses_verified {
            out.push_str("WARNING: hypotheses not verified (forced)\n");
        }
        out.push_str(&format!("vanishing cycles (k = {}):\n", self.curves.len()));
        for c in &self.curves {
            match &c.kind {
                NeckKind::BoundaryParallel { socket } => out.push_str(&format!(
                    "  {}: boundary-parallel at {} socket {}\n",
                    c.id, socket.vertex, socket.index
                )),
                NeckKind::Edge { tail, head, .. } => out.push_str(&format!(
                    "  {}: neck {}#{} -- {}#{}\n",
                    c.id, tail.vertex, tail.index, head.vertex, head.index
                )),
            }
        }
        out.push_str(&format!(
            "monodromy: product of right twists along {}\n",
            self.monodromy.join(" ")
        ));
        let parts: Vec<String> = self
            .singular_fiber
            .iter()
            .map(|c| match c {
                SingularComponent::Closed { vertex, genus } => format!("C[{vertex}] (genus {genus})"),
                SingularComponent::Disk { vertex, socket } => format!("D[{vertex}#{socket}]"),
            })
            .collect();
        out.push_str(&format!("singular fiber: {}\n", parts.join(" + ")));
        out.push_str(&format!(
            "euler: chi(fiber) = {}, k = {}, chi(plumbing) = {}\n",
            self.euler.chi_fiber, self.euler.vanishing_cycles, self.euler.chi_plumbing
        ));
        out
    }
}

pub fn compile(graph: &ValidatedGraph) -> CompiledFibration {
    let lf = build_lefschetz(graph);
    let fiber = lf.fiber;
    CompiledFibration {
        format: INTERCHANGE_FORMAT.to_string(),
        hypotheses_verified: graph.hypotheses_verified(),
        page: PageSummary {
            genus: fiber.genus,
            boundary: fiber.boundary_count,
        },
        monodromy: lf.vanishing_cycles.iter().map(|c| c.id.clone()).collect(),
        euler: EulerSummary {
            chi_fiber: chi_fiber(&fiber),
            vanishing_cycles: lf.vanishing_cycles.len(),
            chi_plumbing: chi_plumbing(graph),
        },
        pieces: fiber.pieces,
        gluings: fiber.gluings,
        free_sockets: fiber.free_sockets,
        curves: lf.vanishing_cycles,
        singular_fiber: lf.singular_fiber,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn validated(vs: &[(&str, u32, u32)], es: &[(&str, &str)]) -> ValidatedGraph {
        let g = PlumbingGraph::new(
            vs.iter().map(|&(id, g, m)| VertexLabel::new(id, g, m)).collect(),
            es,
        )
        .unwrap();
        ValidatedGraph::new(g).unwrap()
    }

    fn torus_sphere() -> ValidatedGraph {
        validated(&[("T", 1, 1), ("S", 0, 2)], &[("T", "S")])
    }

    fn chain22() -> ValidatedGraph {
        validated(&[("u", 0, 2), ("w", 0, 2)], &[("u", "w")])
    }

    #[test]
    fn fiber_examples() {
        let f = build_fiber(&torus_sphere());
        assert_eq!((f.genus, f.boundary_count), (1, 1));
        let f = build_fiber(&validated(&[("x", 0, 1)], &[]));
        assert_eq!((f.genus, f.boundary_count), (0, 1));
        let f = build_fiber(&chain22());
        assert_eq!((f.genus, f.boundary_count), (0, 2));
        assert_eq!(f.euler_characteristic(), 0);
    }

    #[test]
    fn socket_assignment_uses_lowest_free_socket() {
        let f = build_fiber(&validated(
            &[("a", 0, 3), ("b", 0, 3), ("c", 0, 2)],
            &[("a", "b"), ("b", "c"), ("a", "b")],
        ));
        let g = &f.gluings;
        assert_eq!((g[0].tail.index, g[0].head.index), (1, 1));
        assert_eq!((g[1].tail.index, g[1].head.index), (2, 1));
        assert_eq!((g[2].tail.index, g[2].head.index), (2, 3));
        assert_eq!(g[2].multiplicity_index, 1);
        assert_eq!(f.free_sockets[0].sockets, vec![3]);
        assert!(f.free_sockets[1].sockets.is_empty());
        assert_eq!(f.free_sockets[2].sockets, vec![2]);
    }

    #[test]
    fn neck_counts() {
        let necks = neck_curves(&torus_sphere());
        assert_eq!(necks.len(), 2);
        assert!(matches!(necks[0].kind, NeckKind::BoundaryParallel { ref socket } if socket.vertex == "S" && socket.index == 2));
        assert!(matches!(necks[1].kind, NeckKind::Edge { edge: 0, .. }));
        assert_eq!(neck_curves(&validated(&[("x", 2, 5)], &[])).len(), 5);
        assert_eq!(neck_curves(&chain22()).len(), 3);
    }

    #[test]
    fn canonical_order_sorts_by_ids() {
        let necks = neck_curves(&validated(
            &[("z", 0, 3), ("a", 0, 3)],
            &[("z", "a"), ("a", "z")],
        ));
        let order: Vec<String> = necks
            .iter()
            .map(|c| match &c.kind {
                NeckKind::BoundaryParallel { socket } => format!("b:{}", socket.vertex),
                NeckKind::Edge { edge, .. } => format!("e:{edge}"),
            })
            .collect();
        assert_eq!(order, vec!["b:a", "b:z", "e:0", "e:1"]);
    }

    #[test]
    fn open_book_examples() {
        let ob = build_open_book(&torus_sphere());
        assert_eq!(ob.monodromy.len(), 2);
        assert!(ob.monodromy.iter().all(|t| t.handedness == Handedness::Right));
        let ob = build_open_book(&validated(&[("x", 0, 1)], &[]));
        assert_eq!((ob.page.genus, ob.page.boundary_count, ob.monodromy.len()), (0, 1, 1));
        let ob = build_open_book(&chain22());
        assert_eq!((ob.page.genus, ob.page.boundary_count, ob.monodromy.len()), (0, 2, 3));
    }

    #[test]
    fn lefschetz_examples() {
        let lf = build_lefschetz(&torus_sphere());
        assert_eq!(lf.double_point_count, 2);
        assert_eq!(
            lf.singular_fiber,
            vec![
                SingularComponent::Closed { vertex: "T".into(), genus: 1 },
                SingularComponent::Closed { vertex: "S".into(), genus: 0 },
                SingularComponent::Disk { vertex: "S".into(), socket: 2 },
            ]
        );
        let lf = build_lefschetz(&validated(&[("C", 3, 4)], &[]));
        assert_eq!(lf.singular_fiber.len(), 5);
        assert_eq!(lf.vanishing_cycles.len(), 4);
        let lf = build_lefschetz(&chain22());
        let disks = lf
            .singular_fiber
            .iter()
            .filter(|c| matches!(c, SingularComponent::Disk { .. }))
            .count();
        assert_eq!((disks, lf.double_point_count), (2, 3));
    }

    #[test]
    fn euler_examples() {
        let g = torus_sphere();
        assert_eq!(chi_fiber(&build_fiber(&g)), -1);
        assert_eq!(chi_plumbing(&g), 1);
        assert!(chi_total_check(&g));
        let g = validated(&[("x", 0, 1)], &[]);
        assert_eq!(chi_fiber(&build_fiber(&g)), 1);
        assert_eq!(chi_plumbing(&g), 2);
        assert!(chi_total_check(&g));
    }

    #[test]
    fn interchange_round_trips() {
        let doc = compile(&validated(
            &[("a", 1, 3), ("b", 0, 2), ("c", 2, 4)],
            &[("a", "b"), ("b", "c"), ("c", "a")],
        ));
        let text = doc.to_json();
        assert_eq!(CompiledFibration::from_json(&text).unwrap(), doc);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["curves"][0]["kind"], "boundary_parallel");
        assert!(v["curves"][0]["location"]["socket"].is_object());
        assert_eq!(doc.fiber().to_graph().edge_count(), 3);
    }

    #[test]
    fn interchange_rejects_foreign_format() {
        let mut doc = compile(&torus_sphere());
        doc.format = "something-else".into();
        assert!(matches!(
            CompiledFibration::from_json(&doc.to_json()),
            Err(InterchangeError::Format(_))
        ));
    }
}
