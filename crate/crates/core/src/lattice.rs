//! The intersection lattice of a plumbing: `Q_Γ`, its row sums, exact
//! definiteness, and positive solutions of `-Q a = b`.

use crate::graph::PlumbingGraph;
use crate::rational::ExactRational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("off-diagonal entry ({0}, {1}) is negative")]
    NegativeOffDiagonal(usize, usize),
    #[error("diagonal entry {0} must be at most -1")]
    NonNegativeDiagonal(usize),
}

/// Symmetric integer matrix with diagonal `-m_i` and off-diagonal entries
/// equal to edge multiplicities. Rows follow the graph's vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionMatrix {
    entries: Vec<Vec<i64>>,
}

impl IntersectionMatrix {
    pub fn from_graph(graph: &PlumbingGraph) -> Self {
        let n = graph.vertex_count();
        let mut entries = vec![vec![0i64; n]; n];
        for (i, v) in graph.vertices().iter().enumerate() {
            entries[i][i] = v.self_intersection();
        }
        for e in graph.edges() {
            entries[e.tail][e.head] += 1;
            entries[e.head][e.tail] += 1;
        }
        Self { entries }
    }

    pub fn from_rows(entries: Vec<Vec<i64>>) -> Result<Self, MatrixError> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(MatrixError::NotSquare);
        }
        for i in 0..n {
            if entries[i][i] > -1 {
                return Err(MatrixError::NonNegativeDiagonal(i));
            }
            for j in 0..n {
                if entries[i][j] != entries[j][i] {
                    return Err(MatrixError::NotSymmetric(i, j));
                }
                if i != j && entries[i][j] < 0 {
                    return Err(MatrixError::NegativeOffDiagonal(i, j));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn row_sums(&self) -> RowSums {
        RowSums(self.entries.iter().map(|r| r.iter().sum()).collect())
    }

    pub fn determinant(&self) -> BigInt {
        determinant(&self.entries)
    }

    /// `det(Q_{1..k,1..k})` for `k = 1..n`.
    pub fn leading_minors(&self) -> Vec<BigInt> {
        (1..=self.dim())
            .map(|k| {
                let block: Vec<Vec<i64>> =
                    self.entries[..k].iter().map(|r| r[..k].to_vec()).collect();
                determinant(&block)
            })
            .collect()
    }

    pub fn is_negative_definite(&self) -> DefinitenessCertificate {
        let minors = self.leading_minors();
        let signed: Vec<BigInt> = minors
            .iter()
            .enumerate()
            .map(|(i, d)| if (i + 1) % 2 == 1 { -d } else { d.clone() })
            .collect();
        let negative_definite = signed.iter().all(|s| s.is_positive());
        DefinitenessCertificate {
            negative_definite,
            minors,
            signed_minors: signed,
        }
    }

    /// Solves `-Q a = b` exactly and requires every entry of `a` to be
    /// strictly positive.
    pub fn solve_positive(&self, b: &[ExactRational]) -> Result<Vec<ExactRational>, SolveError> {
        let n = self.dim();
        if b.len() != n {
            return Err(SolveError::Dimension {
                expected: n,
                got: b.len(),
            });
        }
        if b.iter().any(|x| !x.is_positive()) {
            return Err(SolveError::RightHandSideNotPositive);
        }
        let neg: Vec<Vec<ExactRational>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer((-x).into())).collect())
            .collect();
        let a = solve_rational(neg, b.to_vec()).ok_or(SolveError::NotSolvable)?;
        if a.iter().all(|x| x.is_positive()) {
            Ok(a)
        } else {
            Err(SolveError::NotPositive { solution: a })
        }
    }

    /// `Q v` over the rationals.
    pub fn apply(&self, v: &[ExactRational]) -> Vec<ExactRational> {
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .zip(v)
                    .map(|(&q, x)| x * BigRational::from_integer(q.into()))
                    .fold(BigRational::zero(), |acc, t| acc + t)
            })
            .collect()
    }

    /// Splits `w^T Q w` into the row-sum part and the edge part.
    pub fn quadratic_form_decomposition(&self, w: &[i64]) -> QuadraticFormSplit {
        assert_eq!(w.len(), self.dim(), "vector length must match matrix size");
        let s = self.row_sums();
        let w: Vec<i128> = w.iter().map(|&x| i128::from(x)).collect();
        let row_part: i128 = s.0.iter().zip(&w).map(|(&si, &wi)| i128::from(si) * wi * wi).sum();
        let mut edge_part = 0i128;
        let mut total = 0i128;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let q = i128::from(self.entries[i][j]);
                total += q * w[i] * w[j];
                if i < j {
                    let diff = w[i] - w[j];
                    edge_part -= q * diff * diff;
                }
            }
        }
        QuadraticFormSplit {
            row_sum_part: row_part,
            edge_part,
            total,
        }
    }
}

/// `s_i = Σ_j q_ij = d_i - m_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSums(pub Vec<i64>);

impl RowSums {
    pub fn all_nonpositive(&self) -> bool {
        self.0.iter().all(|&s| s <= 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinitenessCertificate {
    pub negative_definite: bool,
    #[serde(with = "bigint_vec")]
    pub minors: Vec<BigInt>,
    /// `(-1)^k det(Q_k)`; all strictly positive iff negative definite.
    #[serde(with = "bigint_vec")]
    pub signed_minors: Vec<BigInt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticFormSplit {
    pub row_sum_part: i128,
    pub edge_part: i128,
    pub total: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("expected a vector of length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("right-hand side must be strictly positive")]
    RightHandSideNotPositive,
    #[error("the matrix is singular over the rationals")]
    NotSolvable,
    #[error("solution has a nonpositive entry: {}", fmt_vec(solution))]
    NotPositive { solution: Vec<ExactRational> },
}

fn fmt_vec(v: &[ExactRational]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Fraction-free (Bareiss) determinant with row pivoting.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Gaussian elimination over the rationals; `None` when singular.
pub fn solve_rational(
    mut a: Vec<Vec<ExactRational>>,
    mut b: Vec<ExactRational>,
) -> Option<Vec<ExactRational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some(b)
}

/// Rank over the rationals.
pub fn rank(m: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<ExactRational>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    rank_rational(rows)
}

pub fn rank_rational(mut a: Vec<Vec<ExactRational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[rank][col];
            for j in col..cols {
                let t = &f * &a[rank][j];
                a[r][j] -= t;
            }
        }
        rank += 1;
    }
    rank
}

pub(crate) mod bigint_vec {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| BigInt::from_str(t).map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexLabel;
    use crate::rational::{int, ratio};

    fn q(rows: &[&[i64]]) -> IntersectionMatrix {
        IntersectionMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn builds_matrix_for_examples() {
        let g = PlumbingGraph::new(
            vec![VertexLabel::new("T", 1, 1), VertexLabel::new("S", 0, 2)],
            &[("T", "S")],
        )
        .unwrap();
        assert_eq!(IntersectionMatrix::from_graph(&g).rows(), &[vec![-1, 1], vec![1, -2]]);

        let g = PlumbingGraph::new(vec![VertexLabel::new("C", 3, 5)], &[] as &[(&str, &str)]).unwrap();
        assert_eq!(IntersectionMatrix::from_graph(&g).rows(), &[vec![-5]]);

        let g = PlumbingGraph::new(
            vec![VertexLabel::new("a", 0, 1), VertexLabel::new("b", 0, 1)],
            &[("a", "b")],
        )
        .unwrap();
        assert_eq!(IntersectionMatrix::from_graph(&g).rows(), &[vec![-1, 1], vec![1, -1]]);
    }

    #[test]
    fn rejects_malformed_rows() {
        assert_eq!(
            IntersectionMatrix::from_rows(vec![vec![-1, 1], vec![2, -1]]),
            Err(MatrixError::NotSymmetric(0, 1))
        );
        assert_eq!(
            IntersectionMatrix::from_rows(vec![vec![0]]),
            Err(MatrixError::NonNegativeDiagonal(0))
        );
    }

    #[test]
    fn row_sums_examples() {
        assert_eq!(q(&[&[-1, 1], &[1, -2]]).row_sums(), RowSums(vec![0, -1]));
        assert_eq!(q(&[&[-7]]).row_sums(), RowSums(vec![-7]));
        assert_eq!(q(&[&[-2, 1], &[1, -2]]).row_sums(), RowSums(vec![-1, -1]));
    }

    #[test]
    fn definiteness_examples() {
        let c = q(&[&[-1, 1], &[1, -2]]).is_negative_definite();
        assert!(c.negative_definite);
        assert_eq!(c.minors, vec![BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(c.signed_minors, vec![BigInt::from(1), BigInt::from(1)]);

        let c = q(&[&[-1, 1], &[1, -1]]).is_negative_definite();
        assert!(!c.negative_definite);
        assert_eq!(c.minors[1], BigInt::from(0));

        for m in 1..6 {
            assert!(q(&[&[-m]]).is_negative_definite().negative_definite);
        }
    }

    #[test]
    fn determinant_needs_pivoting() {
        // Leading 2x2 minor vanishes, full determinant does not.
        let m = vec![vec![-1, 1, 0], vec![1, -1, 1], vec![0, 1, -2]];
        assert_eq!(determinant(&m), BigInt::from(1));
    }

    #[test]
    fn solve_positive_examples() {
        let a = q(&[&[-1, 1], &[1, -2]]).solve_positive(&[int(1), int(1)]).unwrap();
        assert_eq!(a, vec![int(3), int(2)]);

        let a = q(&[&[-4]]).solve_positive(&[ratio(3, 2)]).unwrap();
        assert_eq!(a, vec![ratio(3, 8)]);

        assert_eq!(
            q(&[&[-1, 1], &[1, -1]]).solve_positive(&[int(1), int(2)]),
            Err(SolveError::NotSolvable)
        );
    }

    #[test]
    fn solve_positive_reports_witness() {
        // Positive definite lattice: the solution of -Q a = b is negative.
        let m = IntersectionMatrix {
            entries: vec![vec![-1, 2], vec![2, -1]],
        };
        match m.solve_positive(&[int(1), int(1)]) {
            Err(SolveError::NotPositive { solution }) => {
                assert_eq!(solution, vec![int(-1), int(-1)])
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quadratic_form_examples() {
        let s = q(&[&[-1, 1], &[1, -2]]).quadratic_form_decomposition(&[1, 1]);
        assert_eq!((s.row_sum_part, s.edge_part, s.total), (-1, 0, -1));
        let s = q(&[&[-1, 1], &[1, -2]]).quadratic_form_decomposition(&[0, 0]);
        assert_eq!((s.row_sum_part, s.edge_part, s.total), (0, 0, 0));
        let s = q(&[&[-2, 1], &[1, -2]]).quadratic_form_decomposition(&[1, -1]);
        assert_eq!((s.row_sum_part, s.edge_part, s.total), (-2, -4, -6));
    }
}
