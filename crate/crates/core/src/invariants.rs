//! Cut-and-paste bookkeeping: Euler characteristics of Lefschetz pieces,
//! monodromy substitution reports, boundary homology of the plumbing, and a
//! small library of substitution relations.

use crate::fiber::{build_fiber, chi_plumbing};
use crate::homology::{homology_basis, CurveClass, CurveKind, HomologyError, HomologyModel, WordEntry};
use crate::homology::IntMatrix;
use crate::lattice::IntersectionMatrix;
use crate::validate::ValidatedGraph;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

pub const RELATION_FORMAT: &str = "plumbing-relation/1";

/// `χ` of a Lefschetz fibration over the disk with the given page and
/// `word_length` singular fibers.
pub fn chi_lefschetz(page: Page, word_length: usize) -> i64 {
    2 - 2 * page.genus as i64 - page.boundary as i64 + word_length as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub genus: u64,
    pub boundary: u64,
}

impl fmt::Display for Page {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(genus {}, boundary {})", self.genus, self.boundary)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationError {
    #[error("relation file: {0}")]
    File(String),
    #[error("unsupported relation format {0:?}")]
    Format(String),
    #[error("relation words must give classes explicitly, not neck ids")]
    NeckReference,
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("tau and tau_prime act differently on H1 of the page\ntau:\n{tau}tau_prime:\n{tau_prime}")]
    HomologyMismatch { tau: String, tau_prime: String },
    #[error("cannot compose relations on pages {0} and {1}")]
    PageMismatch(Page, Page),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstituteError {
    #[error("relation page {relation} does not match the graph's page {graph}")]
    PageMismatch { relation: Page, graph: Page },
    #[error("tau is not the graph's multitwist: {0}")]
    TauMismatch(String),
    #[error("the graph's page basis differs from the standard basis of the relation page")]
    Basis,
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RelationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<String>,
    name: String,
    page: Page,
    tau: Vec<WordEntry>,
    tau_prime: Vec<WordEntry>,
    #[serde(default)]
    citation: String,
}

/// A pair of twist words on an abstract page whose actions on `H1` agree.
/// Construction checks the homology action; isotopy is recorded as the
/// `citation` only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubstitutionRelation {
    name: String,
    page: Page,
    tau: Vec<WordEntry>,
    tau_prime: Vec<WordEntry>,
    citation: String,
}

fn matrix_text(m: &IntMatrix) -> String {
    let mut s = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>4}")).collect();
        s.push_str(&format!("  [{}]\n", cells.join("")));
    }
    s
}

impl SubstitutionRelation {
    pub fn new(
        name: impl Into<String>,
        page: Page,
        tau: Vec<WordEntry>,
        tau_prime: Vec<WordEntry>,
        citation: impl Into<String>,
    ) -> Result<Self, RelationError> {
        let rel = Self {
            name: name.into(),
            page,
            tau,
            tau_prime,
            citation: citation.into(),
        };
        let model = rel.page_model()?;
        if rel.tau.iter().chain(&rel.tau_prime).any(|e| e.neck.is_some()) {
            return Err(RelationError::NeckReference);
        }
        let cmp = model.homologically_equal(&model.resolve(&rel.tau)?, &model.resolve(&rel.tau_prime)?)?;
        if !cmp.equal {
            return Err(RelationError::HomologyMismatch {
                tau: matrix_text(&cmp.action1),
                tau_prime: matrix_text(&cmp.action2),
            });
        }
        Ok(rel)
    }

    pub fn from_json_str(text: &str) -> Result<Self, RelationError> {
        let f: RelationFile = serde_json::from_str(text).map_err(|e| RelationError::File(e.to_string()))?;
        if let Some(fmt) = &f.format {
            if fmt != RELATION_FORMAT {
                return Err(RelationError::Format(fmt.clone()));
            }
        }
        Self::new(f.name, f.page, f.tau, f.tau_prime, f.citation)
    }

    pub fn to_json(&self) -> String {
        let f = RelationFile {
            format: Some(RELATION_FORMAT.to_string()),
            name: self.name.clone(),
            page: self.page,
            tau: self.tau.clone(),
            tau_prime: self.tau_prime.clone(),
            citation: self.citation.clone(),
        };
        serde_json::to_string_pretty(&f).expect("relation serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn page(&self) -> Page {
        self.page
    }

    pub fn tau(&self) -> &[WordEntry] {
        &self.tau
    }

    pub fn tau_prime(&self) -> &[WordEntry] {
        &self.tau_prime
    }

    pub fn citation(&self) -> &str {
        &self.citation
    }

    pub fn page_model(&self) -> Result<HomologyModel, HomologyError> {
        HomologyModel::standard(self.page.genus, self.page.boundary)
    }

    /// `(τ, τ')` followed by `(σ, σ')` gives `(τσ, τ'σ')`.
    pub fn compose(&self, other: &Self) -> Result<Self, RelationError> {
        if self.page != other.page {
            return Err(RelationError::PageMismatch(self.page, other.page));
        }
        let cat = |a: &[WordEntry], b: &[WordEntry]| a.iter().chain(b).cloned().collect::<Vec<_>>();
        Self::new(
            format!("{} * {}", self.name, other.name),
            self.page,
            cat(&self.tau, &other.tau),
            cat(&self.tau_prime, &other.tau_prime),
            format!("composite of: {}; {}", self.citation, other.citation),
        )
    }

    /// `τ' = τ`.
    pub fn identity(name: impl Into<String>, page: Page, tau: Vec<WordEntry>) -> Result<Self, RelationError> {
        Self::new(name, page, tau.clone(), tau, "trivial")
    }
}

fn torus_words(squared: bool) -> (Vec<WordEntry>, Vec<WordEntry>) {
    let reps = if squared { 2 } else { 1 };
    let d = WordEntry::class(vec![0, 0], 1).with_kind(CurveKind::BoundaryParallel);
    let a = WordEntry::class(vec![1, 0], 1).with_kind(CurveKind::NonSeparating);
    let b = WordEntry::class(vec![0, 1], 1).with_kind(CurveKind::NonSeparating);
    let tau = vec![d; reps];
    let tau_prime = (0..6 * reps).flat_map(|_| [a.clone(), b.clone()]).collect();
    (tau, tau_prime)
}

/// The shipped relations. Each one passes its own homology check; a failure
/// here is a programming error.
pub fn relation_library() -> Vec<SubstitutionRelation> {
    let page = Page { genus: 1, boundary: 1 };
    let (t1, p1) = torus_words(false);
    let (t2, p2) = torus_words(true);
    vec![
        SubstitutionRelation::new(
            "torus relation",
            page,
            t1,
            p1,
            "t_d = (t_a t_b)^6 on the torus with one boundary component; classical chain relation",
        )
        .expect("shipped relation"),
        SubstitutionRelation::new(
            "torus relation squared",
            page,
            t2,
            p2,
            "t_d^2 = (t_a t_b)^12, the square of the torus relation",
        )
        .expect("shipped relation"),
    ]
}

pub fn find_relation(name: &str) -> Option<SubstitutionRelation> {
    relation_library().into_iter().find(|r| r.name == name)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyStatus {
    pub equal: bool,
    pub caveat: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutPasteReport {
    pub relation: String,
    pub page: Page,
    pub k: usize,
    pub k_prime: usize,
    pub chi_z: i64,
    pub chi_z_prime: i64,
    pub delta_chi: i64,
    /// `χ` of the plumbing from the graph, which must equal `chi_z`.
    pub chi_plumbing: i64,
    /// Signature of the plumbing side; the replacement's is not computed.
    pub signature_z: i64,
    pub homology: HomologyStatus,
    pub hypotheses_verified: bool,
    pub citation: String,
}

impl CutPasteReport {
    pub fn to_text(&self) -> String {
        format!(
            "relation: {}\npage: {}\nk = {}  k' = {}\nchi(Z) = {}  chi(Z') = {}  delta chi = {}\n\
             chi(plumbing) = {}\nsignature(Z) = {}\nhomology actions equal: {} ({})\n\
             hypotheses verified: {}\ncitation: {}\n",
            self.relation,
            self.page,
            self.k,
            self.k_prime,
            self.chi_z,
            self.chi_z_prime,
            self.delta_chi,
            self.chi_plumbing,
            self.signature_z,
            self.homology.equal,
            self.homology.caveat,
            self.hypotheses_verified,
            self.citation
        )
    }
}

/// Multiset match of `(class, kind, power)`; entries without a kind match
/// any kind. Returns the entries of `tau` left unmatched.
fn match_tau(multitwist: &[(CurveClass, CurveKind)], tau: &[(CurveClass, Option<CurveKind>, i64)]) -> Vec<String> {
    let mut pool: Vec<Option<(CurveClass, CurveKind)>> = multitwist.iter().cloned().map(Some).collect();
    let mut order: Vec<&(CurveClass, Option<CurveKind>, i64)> = tau.iter().collect();
    order.sort_by_key(|e| e.1.is_none());
    let mut unmatched = Vec::new();
    for (class, kind, power) in order {
        let slot = (*power == 1)
            .then(|| {
                pool.iter_mut()
                    .find(|s| matches!(s, Some((c, k)) if c == class && kind.is_none_or(|kk| kk == *k)))
            })
            .flatten();
        match slot {
            Some(s) => *s = None,
            None => unmatched.push(format!("{:?}^{} ({:?})", class.0, power, kind)),
        }
    }
    for (c, k) in pool.into_iter().flatten() {
        unmatched.push(format!("neck {:?} ({k:?}) missing from tau", c.0));
    }
    unmatched
}

pub fn substitute(graph: &ValidatedGraph, relation: &SubstitutionRelation) -> Result<CutPasteReport, SubstituteError> {
    let fiber = build_fiber(graph);
    let graph_page = Page {
        genus: fiber.genus,
        boundary: fiber.boundary_count,
    };
    if graph_page != relation.page {
        return Err(SubstituteError::PageMismatch {
            relation: relation.page,
            graph: graph_page,
        });
    }
    let model = homology_basis(&fiber)?;
    let page_model = relation.page_model()?;
    if model.pairing() != page_model.pairing() {
        return Err(SubstituteError::Basis);
    }
    let multitwist: Vec<(CurveClass, CurveKind)> =
        model.necks().iter().map(|n| (n.class.clone(), n.kind)).collect();
    let tau_classes = page_model.resolve(&relation.tau)?;
    let tau: Vec<_> = tau_classes
        .into_iter()
        .zip(&relation.tau)
        .map(|((c, p), e)| (c, e.kind, p))
        .collect();
    let unmatched = match_tau(&multitwist, &tau);
    if !unmatched.is_empty() {
        return Err(SubstituteError::TauMismatch(unmatched.join("; ")));
    }
    let cmp = page_model.homologically_equal(
        &page_model.resolve(&relation.tau)?,
        &page_model.resolve(&relation.tau_prime)?,
    )?;
    let k = relation.tau.len();
    let k_prime = relation.tau_prime.len();
    Ok(CutPasteReport {
        relation: relation.name.clone(),
        page: graph_page,
        k,
        k_prime,
        chi_z: chi_lefschetz(graph_page, k),
        chi_z_prime: chi_lefschetz(graph_page, k_prime),
        delta_chi: k_prime as i64 - k as i64,
        chi_plumbing: chi_plumbing(graph),
        signature_z: -(graph.vertex_count() as i64),
        homology: HomologyStatus {
            equal: cmp.equal,
            caveat: cmp.caveat,
        },
        hypotheses_verified: graph.hypotheses_verified(),
        citation: relation.citation.clone(),
    })
}

/// Diagonal of the Smith normal form: the nonzero invariant factors in
/// divisibility order, followed by zeros up to the smaller dimension.
pub fn smith_normal_form(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut diag = Vec::new();
    for t in 0..n.min(m) {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..m {
                    if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                diag.resize(n.min(m), BigInt::zero());
                return diag;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in (t + 1)..n {
                let q = a[i][t].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for j in t..m {
                        let v = &q * &a[t][j];
                        a[i][j] -= v;
                    }
                }
                clean &= a[i][t].is_zero();
            }
            for j in (t + 1)..m {
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for i in t..n {
                        let v = &q * &a[i][t];
                        a[i][j] -= v;
                    }
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..n).find(|&i| (t + 1..m).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..m {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryHomology {
    #[serde(with = "crate::lattice::bigint_vec")]
    pub invariant_factors: Vec<BigInt>,
    /// Invariant factors greater than one: `H1` torsion is `⊕ Z/t`.
    #[serde(with = "crate::lattice::bigint_vec")]
    pub torsion: Vec<BigInt>,
    /// `n - rank Q`.
    pub coker_free_rank: usize,
    /// `2 Σ g_v`.
    pub surface_rank: u64,
    /// First Betti number of the graph.
    pub cycle_rank: usize,
    pub free_rank: u64,
}

impl BoundaryHomology {
    pub fn to_text(&self) -> String {
        let mut parts: Vec<String> = self.torsion.iter().map(|t| format!("Z/{t}")).collect();
        if self.free_rank > 0 {
            parts.insert(0, format!("Z^{}", self.free_rank));
        }
        let group = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        let factors: Vec<String> = self.invariant_factors.iter().map(|x| x.to_string()).collect();
        format!(
            "H1(boundary) = {group}\ninvariant factors: [{}]\nfree rank = {} (coker) + {} (surfaces) + {} (graph cycles)\n",
            factors.join(", "),
            self.coker_free_rank,
            self.surface_rank,
            self.cycle_rank
        )
    }

    pub fn order_of_torsion(&self) -> BigInt {
        self.torsion.iter().fold(BigInt::one(), |acc, t| acc * t)
    }
}

/// `H1(∂X_Γ) = coker Q ⊕ Z^{2Σg_v + b1(Γ)}`.
pub fn boundary_homology(graph: &ValidatedGraph) -> BoundaryHomology {
    let q = IntersectionMatrix::from_graph(graph);
    let diag = smith_normal_form(q.rows());
    let nonzero: Vec<BigInt> = diag.iter().filter(|d| !d.is_zero()).cloned().collect();
    let coker_free_rank = q.dim() - nonzero.len();
    let surface_rank = 2 * graph.total_genus();
    let cycle_rank = graph.cycle_rank();
    BoundaryHomology {
        torsion: nonzero.iter().filter(|d| !d.is_one()).cloned().collect(),
        invariant_factors: nonzero,
        coker_free_rank,
        surface_rank,
        cycle_rank,
        free_rank: coker_free_rank as u64 + surface_rank + cycle_rank as u64,
    }
}
