//! Constants of one symplectic disk bundle of degree `-m` over a genus `g`
//! surface: the area parameter `A`, the per-marked-point data `(A_i, n_i)`,
//! and the chart size `δ`.

use crate::rational::{self, ExactRational};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("A must be positive")]
    NonPositiveArea,
    #[error("delta must be positive")]
    NonPositiveDelta,
    #[error("m must be at least 1")]
    ZeroDegree,
    #[error("expected {expected} marked-point constants, got {got}")]
    MarkedPoints { expected: usize, got: usize },
    #[error("A_{0} must be nonnegative")]
    NegativeAi(usize),
    #[error("n_{0} must be a positive integer")]
    BadNi(usize),
    #[error("need A > sum A_i/n_i, got A = {a} and sum = {sum}")]
    AreaBudget { a: String, sum: String },
    #[error("need m*delta < (A - sum A_i/n_i)/2, got m*delta = {lhs} and bound {rhs}")]
    DeltaTooLarge { lhs: String, rhs: String },
    #[error("constants file: {0}")]
    File(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskBundleModel {
    pub genus: u32,
    pub m: u32,
    #[serde(with = "crate::rational::as_string")]
    pub a: ExactRational,
    #[serde(with = "crate::rational::vec_as_string")]
    pub ai: Vec<ExactRational>,
    pub ni: Vec<u32>,
    #[serde(with = "crate::rational::as_string")]
    pub delta: ExactRational,
}

impl DiskBundleModel {
    pub fn new(
        genus: u32,
        m: u32,
        a: ExactRational,
        ai: Vec<ExactRational>,
        ni: Vec<u32>,
        delta: ExactRational,
    ) -> Result<Self, ModelError> {
        let model = Self {
            genus,
            m,
            a,
            ai,
            ni,
            delta,
        };
        model.check()?;
        Ok(model)
    }

    /// The default model for the verification battery: genus 0, degree −2,
    /// `A = 4`, `(A_1, A_2) = (1, 0)`, `n_i = 1`, `δ = 7/10`.
    pub fn reference() -> Self {
        Self::new(
            0,
            2,
            rational::int(4),
            vec![rational::int(1), rational::zero()],
            vec![1, 1],
            rational::ratio(7, 10),
        )
        .expect("reference constants are admissible")
    }

    /// A model with all `A_i = 0`, `n_i = 1`.
    pub fn unmarked(genus: u32, m: u32, a: ExactRational, delta: ExactRational) -> Result<Self, ModelError> {
        let ai = vec![rational::zero(); m as usize];
        let ni = vec![1; m as usize];
        Self::new(genus, m, a, ai, ni, delta)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if self.m == 0 {
            return Err(ModelError::ZeroDegree);
        }
        if !self.a.is_positive() {
            return Err(ModelError::NonPositiveArea);
        }
        if !self.delta.is_positive() {
            return Err(ModelError::NonPositiveDelta);
        }
        let m = self.m as usize;
        for len in [self.ai.len(), self.ni.len()] {
            if len != m {
                return Err(ModelError::MarkedPoints {
                    expected: m,
                    got: len,
                });
            }
        }
        for (i, (a, &n)) in self.ai.iter().zip(&self.ni).enumerate() {
            if a.is_negative() {
                return Err(ModelError::NegativeAi(i + 1));
            }
            if n == 0 {
                return Err(ModelError::BadNi(i + 1));
            }
        }
        let sum = self.marked_sum();
        if self.a <= sum {
            return Err(ModelError::AreaBudget {
                a: self.a.to_string(),
                sum: sum.to_string(),
            });
        }
        let lhs = BigRational::from_integer(self.m.into()) * &self.delta;
        let rhs = self.zero_section_area_over_pi() / rational::int(2);
        if lhs >= rhs {
            return Err(ModelError::DeltaTooLarge {
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
        Ok(())
    }

    /// `Σ A_i / n_i`.
    pub fn marked_sum(&self) -> ExactRational {
        self.ai
            .iter()
            .zip(&self.ni)
            .map(|(a, &n)| a / BigRational::from_integer(n.into()))
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    /// Area of the zero section divided by `π`: `A - Σ A_i/n_i`.
    pub fn zero_section_area_over_pi(&self) -> ExactRational {
        &self.a - self.marked_sum()
    }

    /// `A_i / n_i` for the 1-based marked point `i`.
    pub fn marked_constant(&self, i: usize) -> ExactRational {
        &self.ai[i - 1] / BigRational::from_integer(self.ni[i - 1].into())
    }

    pub fn a_f64(&self) -> f64 {
        rational::to_f64(&self.a)
    }

    pub fn delta_f64(&self) -> f64 {
        rational::to_f64(&self.delta)
    }

    /// `A / m`, the constant in the fiber-direction Liouville term.
    pub fn fiber_constant(&self) -> ExactRational {
        &self.a / BigRational::from_integer(self.m.into())
    }

    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        let v: Value = serde_json::from_str(text).map_err(|e| ModelError::File(e.to_string()))?;
        Self::from_json_value(&v)
    }

    /// Reads `{A, Ai, ni, delta, m, genus}`; numbers may be JSON numbers or
    /// strings such as `"3/2"`.
    pub fn from_json_value(v: &Value) -> Result<Self, ModelError> {
        let bad = |what: &str| ModelError::File(format!("field {what:?} is missing or malformed"));
        let num = |x: &Value, what: &str| -> Result<ExactRational, ModelError> {
            match x {
                Value::Number(n) => rational::from_json_number(n).map_err(|_| bad(what)),
                Value::String(s) => rational::parse_rational(s).map_err(|_| bad(what)),
                _ => Err(bad(what)),
            }
        };
        let uint = |x: Option<&Value>, what: &str| -> Result<u32, ModelError> {
            x.and_then(Value::as_u64)
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| bad(what))
        };
        let m = uint(v.get("m"), "m")?;
        let genus = match v.get("genus") {
            None => 0,
            g => uint(g, "genus")?,
        };
        let a = num(v.get("A").ok_or_else(|| bad("A"))?, "A")?;
        let delta = num(v.get("delta").ok_or_else(|| bad("delta"))?, "delta")?;
        let ai = match v.get("Ai") {
            None => vec![rational::zero(); m as usize],
            Some(Value::Array(xs)) => xs.iter().map(|x| num(x, "Ai")).collect::<Result<_, _>>()?,
            Some(_) => return Err(bad("Ai")),
        };
        let ni = match v.get("ni") {
            None => vec![1; m as usize],
            Some(Value::Array(xs)) => xs.iter().map(|x| uint(Some(x), "ni")).collect::<Result<_, _>>()?,
            Some(_) => return Err(bad("ni")),
        };
        Self::new(genus, m, a, ai, ni, delta)
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::json!({
            "A": self.a.to_string(),
            "Ai": self.ai.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "ni": self.ni,
            "delta": self.delta.to_string(),
            "m": self.m,
            "genus": self.genus,
        })
    }
}
