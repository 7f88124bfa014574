//! The three kinds of chart on a disk bundle model and the formulas written
//! in them. Coordinates are polar pairs `(r1, θ1)` on the base and
//! `(r2, θ2)` on the fiber; the symplectic form is
//! `r1 dr1∧dθ1 + r2 dr2∧dθ2` in every chart.
//!
//! * `ZeroWi(i)`: over the disk `W_i` of radius `√δ` around marked point `x_i`.
//! * `ZeroW0`: over the annulus `√(A - mδ) < r1 < √A` around `x_0`.
//! * `One`: the cap `Z1 = D²(√(mδ)) × D²(√δ)`.

use super::model::DiskBundleModel;
use super::mu::mu_unchecked;
use crate::rational::ExactRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chart {
    ZeroWi(usize),
    ZeroW0,
    One,
}

impl Chart {
    pub fn name(&self) -> String {
        match self {
            Chart::ZeroWi(i) => format!("W{i}"),
            Chart::ZeroW0 => "W0".into(),
            Chart::One => "Z1".into(),
        }
    }

    /// `(lower, upper)` bounds on `r1`; the lower bound is open for `ZeroW0`.
    pub fn r1_bounds(&self, model: &DiskBundleModel) -> (f64, f64) {
        let a = model.a_f64();
        let d = model.delta_f64();
        let m = model.m as f64;
        match self {
            Chart::ZeroWi(_) => (0.0, d.sqrt()),
            Chart::ZeroW0 => ((a - m * d).sqrt(), a.sqrt()),
            Chart::One => (0.0, (m * d).sqrt()),
        }
    }

    pub fn r2_bound(&self, model: &DiskBundleModel) -> f64 {
        model.delta_f64().sqrt()
    }

    /// The constant `c` in the base component `½(r1 + c/r1)` of the Liouville field.
    pub fn base_constant(&self, model: &DiskBundleModel) -> f64 {
        match self {
            Chart::ZeroWi(i) => crate::rational::to_f64(&model.marked_constant(*i)),
            _ => 0.0,
        }
    }

    /// Whether `r1 = 0` is singular for the Liouville field.
    pub fn base_singular(&self, model: &DiskBundleModel) -> bool {
        matches!(self, Chart::ZeroWi(i) if !model.ai[*i - 1].is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChartError {
    #[error("chart {0} does not exist on this model")]
    UnknownChart(String),
    #[error("{coordinate} = {value} lies outside chart {chart} (allowed {range})")]
    OutsideDomain {
        chart: String,
        coordinate: &'static str,
        value: f64,
        range: String,
    },
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("the field is singular on {locus}")]
    SingularLocus { locus: &'static str },
    #[error("point is not in the gluing region T")]
    NotInT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: Chart,
    pub r1: f64,
    pub theta1: f64,
    pub r2: f64,
    pub theta2: f64,
}

/// Components along `(∂r1, ∂θ1, ∂r2, ∂θ2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarVector(pub [f64; 4]);

/// A point of `D²` in polar form, angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub radius: f64,
    pub angle: f64,
}

pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl ChartPoint {
    /// Validates the domain bounds and reduces the angles mod 2π.
    pub fn new(
        model: &DiskBundleModel,
        chart: Chart,
        r1: f64,
        theta1: f64,
        r2: f64,
        theta2: f64,
    ) -> Result<Self, ChartError> {
        if ![r1, theta1, r2, theta2].iter().all(|x| x.is_finite()) {
            return Err(ChartError::NonFinite);
        }
        if let Chart::ZeroWi(i) = chart {
            if i == 0 || i > model.m as usize {
                return Err(ChartError::UnknownChart(chart.name()));
            }
        }
        let (lo, hi) = chart.r1_bounds(model);
        let r1_ok = match chart {
            Chart::ZeroW0 => r1 > lo && r1 < hi,
            _ => r1 >= lo && r1 < hi,
        };
        if !r1_ok {
            return Err(ChartError::OutsideDomain {
                chart: chart.name(),
                coordinate: "r1",
                value: r1,
                range: format!("[{lo}, {hi})"),
            });
        }
        let r2_hi = chart.r2_bound(model);
        if !(0.0..r2_hi).contains(&r2) {
            return Err(ChartError::OutsideDomain {
                chart: chart.name(),
                coordinate: "r2",
                value: r2,
                range: format!("[0, {r2_hi})"),
            });
        }
        Ok(Self {
            chart,
            r1,
            theta1: wrap_angle(theta1),
            r2,
            theta2: wrap_angle(theta2),
        })
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.r1, self.theta1, self.r2, self.theta2]
    }

    /// `(x1, y1, x2, y2)`.
    pub fn cartesian(&self) -> [f64; 4] {
        [
            self.r1 * self.theta1.cos(),
            self.r1 * self.theta1.sin(),
            self.r2 * self.theta2.cos(),
            self.r2 * self.theta2.sin(),
        ]
    }

    pub fn from_cartesian(model: &DiskBundleModel, chart: Chart, x: [f64; 4]) -> Result<Self, ChartError> {
        Self::new(
            model,
            chart,
            x[0].hypot(x[1]),
            x[1].atan2(x[0]),
            x[2].hypot(x[3]),
            x[3].atan2(x[2]),
        )
    }

    /// `T = {0 < r1² < mδ, 0 ≤ r2² < r1²/m}` inside `Z1`.
    pub fn in_t(&self, model: &DiskBundleModel) -> bool {
        let m = model.m as f64;
        self.chart == Chart::One
            && self.r1 > 0.0
            && self.r1 * self.r1 < m * model.delta_f64()
            && self.r2 * self.r2 < self.r1 * self.r1 / m
    }
}

/// `½(r + c/r)`.
pub fn radial_coefficient(r: f64, c: f64) -> f64 {
    0.5 * (r + c / r)
}

/// The Liouville field of the chart, evaluated as written.
pub fn liouville_field(model: &DiskBundleModel, p: &ChartPoint) -> Result<PolarVector, ChartError> {
    if p.r2 == 0.0 {
        return Err(ChartError::SingularLocus { locus: "C" });
    }
    if p.chart.base_singular(model) && p.r1 == 0.0 {
        return Err(ChartError::SingularLocus { locus: "F" });
    }
    let fiber = radial_coefficient(p.r2, crate::rational::to_f64(&model.fiber_constant()));
    let base = match p.chart {
        Chart::ZeroWi(_) if p.chart.base_singular(model) => radial_coefficient(p.r1, p.chart.base_constant(model)),
        _ => 0.5 * p.r1,
    };
    Ok(PolarVector([base, 0.0, fiber, 0.0]))
}

/// `d(r2²)(V) = 2 r2 · ½(r2 + (A/m)/r2)` computed in exact arithmetic.
pub fn fiber_radius_derivative_exact(model: &DiskBundleModel, r2: &ExactRational) -> Option<ExactRational> {
    if r2.is_zero() {
        return None;
    }
    let half = crate::rational::ratio(1, 2);
    let coefficient = &half * (r2 + model.fiber_constant() / r2);
    Some(crate::rational::int(2) * r2 * coefficient)
}

/// The closed form `r2² + A/m` of the same derivative.
pub fn fiber_radius_margin(model: &DiskBundleModel, r2: &ExactRational) -> ExactRational {
    r2 * r2 + model.fiber_constant()
}

/// The chart's map to `D²`.
pub fn lefschetz_map(model: &DiskBundleModel, p: &ChartPoint) -> Result<DiskPoint, ChartError> {
    let s = model.delta_f64().sqrt();
    let m = model.m as f64;
    let (radius, angle) = match p.chart {
        Chart::ZeroWi(_) => (mu_unchecked(p.r1 / s) * mu_unchecked(p.r2 / s), p.theta1 + p.theta2),
        Chart::ZeroW0 => (mu_unchecked(p.r2 / s), m * p.theta1 + p.theta2),
        Chart::One => (mu_unchecked(p.r2 / s), p.theta2),
    };
    Ok(DiskPoint {
        radius,
        angle: wrap_angle(angle),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use std::f64::consts::PI;

    fn model() -> DiskBundleModel {
        DiskBundleModel::new(0, 2, int(4), vec![int(1), int(0)], vec![1, 1], ratio(7, 10)).unwrap()
    }

    #[test]
    fn z1_field_at_reference_point() {
        // The point (1, 0, 1, 0) is outside Z1 for admissible δ, so evaluate the
        // formula there without the domain check.
        let m = model();
        let p = ChartPoint {
            chart: Chart::One,
            r1: 1.0,
            theta1: 0.0,
            r2: 1.0,
            theta2: 0.0,
        };
        assert_eq!(liouville_field(&m, &p).unwrap(), PolarVector([0.5, 0.0, 1.5, 0.0]));
    }

    #[test]
    fn wi_with_zero_constant_has_linear_base() {
        let m = model();
        let p = ChartPoint::new(&m, Chart::ZeroWi(2), 0.3, 0.0, 0.4, 0.0).unwrap();
        let v = liouville_field(&m, &p).unwrap();
        assert_eq!(v.0[0], 0.15);
        assert!((v.0[2] - 0.5 * (0.4 + 2.0 / 0.4)).abs() < 1e-15);
        let p = ChartPoint::new(&m, Chart::ZeroWi(2), 0.0, 0.0, 0.4, 0.0).unwrap();
        assert!(liouville_field(&m, &p).is_ok());
    }

    #[test]
    fn singular_loci() {
        let m = model();
        for chart in [Chart::ZeroWi(1), Chart::ZeroW0, Chart::One] {
            let (lo, hi) = chart.r1_bounds(&m);
            let p = ChartPoint::new(&m, chart, 0.5 * (lo + hi), 0.0, 0.0, 0.0).unwrap();
            assert_eq!(liouville_field(&m, &p), Err(ChartError::SingularLocus { locus: "C" }));
        }
        let p = ChartPoint::new(&m, Chart::ZeroWi(1), 0.0, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(liouville_field(&m, &p), Err(ChartError::SingularLocus { locus: "F" }));
    }

    #[test]
    fn domain_checks() {
        let m = model();
        assert!(ChartPoint::new(&m, Chart::One, 1.18, 0.0, 0.1, 0.0).is_ok());
        assert!(ChartPoint::new(&m, Chart::One, 1.19, 0.0, 0.9, 0.0).is_err());
        assert!(ChartPoint::new(&m, Chart::ZeroW0, 1.0, 0.0, 0.1, 0.0).is_err());
        assert!(ChartPoint::new(&m, Chart::ZeroWi(3), 0.1, 0.0, 0.1, 0.0).is_err());
        assert!(ChartPoint::new(&m, Chart::One, f64::NAN, 0.0, 0.1, 0.0).is_err());
        let p = ChartPoint::new(&m, Chart::One, 0.5, -PI, 0.1, 7.0).unwrap();
        assert!((p.theta1 - PI).abs() < 1e-15);
        assert!((p.theta2 - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn lefschetz_map_examples() {
        let m = model();
        let s = m.delta_f64().sqrt();
        let p = ChartPoint::new(&m, Chart::ZeroWi(1), s / 4.0, 0.3, s / 4.0, 0.5).unwrap();
        let q = lefschetz_map(&m, &p).unwrap();
        assert!((q.radius - 1.0 / 16.0).abs() < 1e-15);
        assert!((q.angle - 0.8).abs() < 1e-15);
        let p = ChartPoint::new(&m, Chart::One, 0.5, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(lefschetz_map(&m, &p).unwrap().radius, 0.0);
        let r1 = (4.0 - 0.7f64).sqrt() + 0.1;
        let p = ChartPoint::new(&m, Chart::ZeroW0, r1, PI / 2.0, s / 3.0, 0.0).unwrap();
        let q = lefschetz_map(&m, &p).unwrap();
        assert!((q.radius - 1.0 / 3.0).abs() < 1e-15);
        assert!((q.angle - PI).abs() < 1e-15);
    }

    #[test]
    fn exact_vertical_margin() {
        let m = model();
        for r2 in [ratio(1, 3), ratio(5, 7), int(2)] {
            assert_eq!(
                fiber_radius_derivative_exact(&m, &r2).unwrap(),
                fiber_radius_margin(&m, &r2)
            );
        }
        assert!(fiber_radius_derivative_exact(&m, &int(0)).is_none());
    }

    #[test]
    fn membership_in_t() {
        let m = model();
        let p = ChartPoint::new(&m, Chart::One, 1.0, 0.0, 0.5, 0.0).unwrap();
        assert!(p.in_t(&m));
        let p = ChartPoint::new(&m, Chart::One, 1.0, 0.0, 0.75, 0.0).unwrap();
        assert!(!p.in_t(&m));
        let p = ChartPoint::new(&m, Chart::One, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(!p.in_t(&m));
    }
}
