//! The gluing map `φ: T -> W0 × D²(√δ)`,
//! `φ(r1, θ1, r2, θ2) = (√(A - r1² + m r2²), -θ1, r2, mθ1 + θ2)`.
//!
//! In action-angle coordinates `u = r²/2` it is affine:
//! `u1' = A/2 - u1 + m u2`, `θ1' = -θ1`, `u2' = u2`, `θ2' = mθ1 + θ2`.

use super::charts::{liouville_field, Chart, ChartError, ChartPoint, PolarVector};
use super::model::DiskBundleModel;
use super::sampling::HaltonSampler;
use super::tolerances;
use super::NumericReport;
use crate::rational::{self, ExactRational};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// A point in coordinates `(u1, θ1, u2, θ2)`, angles not reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionAnglePoint(pub [ExactRational; 4]);

pub type ExactMap<'a> = &'a dyn Fn(&DiskBundleModel, &ActionAnglePoint) -> ActionAnglePoint;

pub fn gluing_map(model: &DiskBundleModel, p: &ChartPoint) -> Result<ChartPoint, ChartError> {
    if !p.in_t(model) {
        return Err(ChartError::NotInT);
    }
    let m = model.m as f64;
    let r1 = (model.a_f64() - p.r1 * p.r1 + m * p.r2 * p.r2).sqrt();
    ChartPoint::new(model, Chart::ZeroW0, r1, -p.theta1, p.r2, m * p.theta1 + p.theta2)
}

pub fn gluing_map_exact(model: &DiskBundleModel, p: &ActionAnglePoint) -> ActionAnglePoint {
    let m = rational::int(model.m as i64);
    let [u1, t1, u2, t2] = &p.0;
    ActionAnglePoint([
        &model.a / rational::int(2) - u1 + &m * u2,
        -t1.clone(),
        u2.clone(),
        &m * t1 + t2,
    ])
}

/// `0 < 2u1 < mδ` and `0 ≤ 2u2 < 2u1/m`.
pub fn in_t_exact(model: &DiskBundleModel, p: &ActionAnglePoint) -> bool {
    let m = rational::int(model.m as i64);
    let two = rational::int(2);
    let [u1, _, u2, _] = &p.0;
    u1.is_positive() && &two * u1 < &m * &model.delta && !u2.is_negative() && &m * u2 < *u1
}

/// `(A - mδ)/2 < u1 < A/2`, the W0 annulus.
pub fn in_w0_exact(model: &DiskBundleModel, p: &ActionAnglePoint) -> bool {
    let two = rational::int(2);
    let m = rational::int(model.m as i64);
    let u1 = &p.0[0];
    (&model.a - m * &model.delta) / &two < *u1 && *u1 < &model.a / &two
}

fn exact(x: f64) -> ExactRational {
    BigRational::from_float(x).expect("finite sample coordinate")
}

/// Rational points of `T`; the Halton coordinates are taken at their exact
/// binary values.
pub fn sample_t_exact(model: &DiskBundleModel, n: usize, seed: u64) -> Vec<ActionAnglePoint> {
    let m = rational::int(model.m as i64);
    let half_m_delta = &m * &model.delta / rational::int(2);
    let angle_scale = rational::ratio(314_159, 50_000);
    let mut sampler = HaltonSampler::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let [a, b, c, d] = sampler.next_point();
        if a == 0.0 {
            continue;
        }
        let u1 = &half_m_delta * exact(a);
        let u2 = &u1 / &m * exact(c);
        let p = ActionAnglePoint([u1, &angle_scale * exact(b), u2, &angle_scale * exact(d)]);
        debug_assert!(in_t_exact(model, &p));
        out.push(p);
    }
    out
}

fn omega() -> [[i64; 4]; 4] {
    [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
}

/// Jacobian by exact difference quotients; these equal the derivative for
/// maps affine in `(u, θ)`.
fn jacobian(model: &DiskBundleModel, map: ExactMap, p: &ActionAnglePoint) -> [[ExactRational; 4]; 4] {
    let base = map(model, p);
    let step = rational::ratio(1, 1024);
    let mut j: [[ExactRational; 4]; 4] = Default::default();
    for col in 0..4 {
        let mut q = p.clone();
        q.0[col] += &step;
        let moved = map(model, &q);
        for row in 0..4 {
            j[row][col] = (&moved.0[row] - &base.0[row]) / &step;
        }
    }
    j
}

/// `max |JᵀΩJ - Ω|` entrywise, exactly.
pub fn pullback_defect(model: &DiskBundleModel, map: ExactMap, p: &ActionAnglePoint) -> ExactRational {
    let j = jacobian(model, map, p);
    let w = omega();
    let mut worst = ExactRational::zero();
    for a in 0..4 {
        for b in 0..4 {
            let mut s = ExactRational::zero();
            for (k, wk) in w.iter().enumerate() {
                for (l, &wkl) in wk.iter().enumerate() {
                    if wkl != 0 {
                        s += &j[k][a] * &j[l][b] * rational::int(wkl);
                    }
                }
            }
            let d = (s - rational::int(w[a][b])).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn check_symplectomorphism(model: &DiskBundleModel, samples: &[ActionAnglePoint]) -> NumericReport {
    let mut report = check_symplectomorphism_with(model, samples, &gluing_map_exact, "symplectomorphism");
    for p in samples.iter().filter(|p| in_t_exact(model, p)) {
        if !in_w0_exact(model, &gluing_map_exact(model, p)) {
            report.record(f64::INFINITY);
            report.exclude("image outside W0");
        }
    }
    report
}

/// Exact pullback check for an arbitrary map affine in `(u, θ)`; the
/// residual is `0.0` exactly when every pullback identity holds.
pub fn check_symplectomorphism_with(
    model: &DiskBundleModel,
    samples: &[ActionAnglePoint],
    map: ExactMap,
    name: &str,
) -> NumericReport {
    let mut report = NumericReport::new(name, 0.0).with_chart(Chart::One);
    for p in samples {
        if !in_t_exact(model, p) {
            report.exclude("outside T");
            continue;
        }
        report.record(rational::to_f64(&pullback_defect(model, map, p)));
    }
    report
}

/// `Dφ(v)` at `p`, from the closed-form derivative of `φ`.
pub fn push_forward(model: &DiskBundleModel, p: &ChartPoint, v: &PolarVector) -> PolarVector {
    let m = model.m as f64;
    let r = (model.a_f64() - p.r1 * p.r1 + m * p.r2 * p.r2).sqrt();
    let [a, b, c, d] = v.0;
    PolarVector([(-p.r1 * a + m * p.r2 * c) / r, -b, c, m * b + d])
}

pub fn check_intertwine(model: &DiskBundleModel, samples: &[ChartPoint]) -> NumericReport {
    check_intertwine_scaled(model, samples, 1.0)
}

/// `‖Dφ(s·V1) - V0∘φ‖∞`; `s = 1` is the identity being certified.
pub fn check_intertwine_scaled(model: &DiskBundleModel, samples: &[ChartPoint], scale: f64) -> NumericReport {
    let mut report = NumericReport::new("intertwine", tolerances::FLOAT).with_chart(Chart::One);
    for p in samples {
        if !p.in_t(model) {
            report.exclude("outside T");
            continue;
        }
        let (v1, image) = match (liouville_field(model, p), gluing_map(model, p)) {
            (Ok(v), Ok(q)) => (v, q),
            (Err(e), _) | (_, Err(e)) => {
                report.exclude(e.to_string());
                continue;
            }
        };
        let v0 = match liouville_field(model, &image) {
            Ok(v) => v,
            Err(e) => {
                report.exclude(e.to_string());
                continue;
            }
        };
        let scaled = PolarVector(v1.0.map(|x| scale * x));
        let lhs = push_forward(model, p, &scaled);
        let res = lhs.0.iter().zip(&v0.0).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        report.record(res);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::symplectic::sampling::sample_t;
    use std::f64::consts::PI;

    fn model() -> DiskBundleModel {
        DiskBundleModel::unmarked(0, 2, int(4), ratio(7, 10)).unwrap()
    }

    #[test]
    fn reference_images() {
        let m = model();
        let d = m.delta_f64();
        let p = ChartPoint::new(&m, Chart::One, (m.m as f64 * d / 2.0).sqrt(), 0.0, 0.0, 0.0).unwrap();
        let q = gluing_map(&m, &p).unwrap();
        assert!((q.r1 * q.r1 - (4.0 - 0.7)).abs() < 1e-12);
        assert_eq!((q.theta1, q.r2), (0.0, 0.0));
        let p = ChartPoint::new(&m, Chart::One, 1.0, PI, 0.3, 0.4).unwrap();
        let q = gluing_map(&m, &p).unwrap();
        assert!((q.theta2 - 0.4).abs() < 1e-12);
        assert!((q.theta1 - PI).abs() < 1e-12);
        let r1: f64 = 1.0;
        let p = ChartPoint::new(&m, Chart::One, r1, 0.0, r1 / 2f64.sqrt() - 1e-9, 0.0).unwrap();
        let q = gluing_map(&m, &p).unwrap();
        assert!((q.r1 - 2.0).abs() < 1e-8);
        let outside = ChartPoint::new(&m, Chart::One, 0.5, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(gluing_map(&m, &outside), Err(ChartError::NotInT));
    }

    #[test]
    fn exact_pullback_is_zero() {
        let m = model();
        let samples = sample_t_exact(&m, 200, 11);
        let r = check_symplectomorphism(&m, &samples);
        assert_eq!(r.max_residual, 0.0);
        assert!(r.certified());
        let identity = |_: &DiskBundleModel, p: &ActionAnglePoint| p.clone();
        let r = check_symplectomorphism_with(&m, &samples, &identity, "identity");
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn perturbed_map_fails() {
        let m = model();
        let samples = sample_t_exact(&m, 50, 11);
        let bumped = |model: &DiskBundleModel, p: &ActionAnglePoint| {
            let mut q = gluing_map_exact(model, p);
            q.0[3] = rational::int(model.m as i64 + 1) * &p.0[1] + &p.0[3];
            q
        };
        let r = check_symplectomorphism_with(&m, &samples, &bumped, "perturbed");
        assert_eq!(r.max_residual, 1.0);
        assert!(!r.passed);
    }

    #[test]
    fn intertwines_liouville_fields() {
        let m = model();
        let samples = sample_t(&m, 500, 5, 1e-3);
        let r = check_intertwine(&m, &samples);
        assert!(r.certified(), "{}", r.to_text());
        let r = check_intertwine_scaled(&m, &samples, 2.0);
        assert!(!r.passed);
        assert!(r.max_residual > 0.1);
    }
}
