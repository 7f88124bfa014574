//! Chart-local checks of the Lefschetz maps: regular values over
//! `D²(1/9) ∖ 0`, positivity of `ω` on fibers, and outward transversality of
//! the Liouville field to the vertical and horizontal boundary pieces.
//!
//! Derivatives are taken in the polar coordinates `(r1, θ1, r2, θ2)`, where
//! `ω(v, w) = r1 (v0 w1 - v1 w0) + r2 (v2 w3 - v3 w2)` and the coordinate
//! order is positively oriented. A fiber basis `(v1, v2)` is oriented so that
//! `det[v1, v2, w1, w2] > 0` for horizontal lifts `w1, w2` of the base frame.

use super::charts::{
    fiber_radius_derivative_exact, fiber_radius_margin, lefschetz_map, liouville_field, Chart, ChartPoint,
};
use super::model::DiskBundleModel;
use super::mu::{mu_prime, mu_unchecked};
use super::tolerances;
use super::NumericReport;
use crate::rational::{self, ExactRational};
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

pub const BASE_RADIUS: f64 = 1.0 / 9.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibrationReports {
    pub regular_value: NumericReport,
    pub fiber_positivity: NumericReport,
    pub transversality: NumericReport,
}

impl FibrationReports {
    pub fn all(&self) -> Vec<NumericReport> {
        vec![
            self.regular_value.clone(),
            self.fiber_positivity.clone(),
            self.transversality.clone(),
        ]
    }

    pub fn certified(&self) -> bool {
        self.regular_value.certified() && self.fiber_positivity.certified() && self.transversality.certified()
    }
}

/// Rows `dρ` and `dψ` of the chart map in polar form.
fn differential(model: &DiskBundleModel, p: &ChartPoint) -> ([f64; 4], [f64; 4]) {
    let s = model.delta_f64().sqrt();
    let m = model.m as f64;
    let (a, b) = (p.r1 / s, p.r2 / s);
    match p.chart {
        Chart::ZeroWi(_) => (
            [mu_prime(a) * mu_unchecked(b) / s, 0.0, mu_unchecked(a) * mu_prime(b) / s, 0.0],
            [0.0, 1.0, 0.0, 1.0],
        ),
        Chart::ZeroW0 => ([0.0, 0.0, mu_prime(b) / s, 0.0], [0.0, m, 0.0, 1.0]),
        Chart::One => ([0.0, 0.0, mu_prime(b) / s, 0.0], [0.0, 0.0, 0.0, 1.0]),
    }
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det4(m: [[f64; 4]; 4]) -> f64 {
    let mut a = m;
    let mut det = 1.0;
    for c in 0..4 {
        let piv = (c..4).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= a[c][c];
        for r in (c + 1)..4 {
            let f = a[r][c] / a[c][c];
            for k in c..4 {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

fn omega(p: &ChartPoint, v: &[f64; 4], w: &[f64; 4]) -> f64 {
    p.r1 * (v[0] * w[1] - v[1] * w[0]) + p.r2 * (v[2] * w[3] - v[3] * w[2])
}

/// Orthonormal basis of the kernel of the 2×4 matrix with rows `j0`, `j1`
/// (the rows must be independent).
fn kernel(j0: &[f64; 4], j1: &[f64; 4]) -> [[f64; 4]; 2] {
    let mut basis: Vec<[f64; 4]> = Vec::new();
    let normalize = |v: [f64; 4]| {
        let n = dot(&v, &v).sqrt();
        v.map(|x| x / n)
    };
    let q0 = normalize(*j0);
    let mut q1 = *j1;
    let c = dot(&q1, &q0);
    for k in 0..4 {
        q1[k] -= c * q0[k];
    }
    let q1 = normalize(q1);
    let mut candidates: Vec<[f64; 4]> = (0..4)
        .map(|k| {
            let mut e = [0.0; 4];
            e[k] = 1.0;
            let (a, b) = (dot(&e, &q0), dot(&e, &q1));
            for i in 0..4 {
                e[i] -= a * q0[i] + b * q1[i];
            }
            e
        })
        .collect();
    candidates.sort_by(|x, y| dot(y, y).total_cmp(&dot(x, x)));
    for mut v in candidates {
        for b in &basis {
            let c = dot(&v, b);
            for i in 0..4 {
                v[i] -= c * b[i];
            }
        }
        if dot(&v, &v) > 1e-6 {
            basis.push(normalize(v));
        }
        if basis.len() == 2 {
            break;
        }
    }
    [basis[0], basis[1]]
}

/// All three checks over `samples`. Samples at the Lefschetz singularity, on
/// the singular fiber, on a polar-degenerate locus, or mapping outside
/// `D²(1/9)` are excluded with a reason.
pub fn check_fibration(model: &DiskBundleModel, samples: &[ChartPoint]) -> FibrationReports {
    let chart = samples.first().map(|p| p.chart);
    let mk = |name: &str| {
        let r = NumericReport::new(name, 0.0);
        match chart {
            Some(c) => r.with_chart(c),
            None => r,
        }
    };
    let mut reports = FibrationReports {
        regular_value: mk("regular-value"),
        fiber_positivity: mk("fiber-positivity"),
        transversality: mk("transversality"),
    };
    let floor = tolerances::POSITIVITY;
    for p in samples {
        let reason = if matches!(p.chart, Chart::ZeroWi(_)) && p.r1 == 0.0 && p.r2 == 0.0 {
            Some("Lefschetz singularity")
        } else if p.r2 == 0.0 {
            Some("singular fiber")
        } else if p.r1 == 0.0 {
            Some("polar chart degenerate")
        } else {
            None
        };
        let image = lefschetz_map(model, p).expect("chart point");
        let reason = reason.or(if image.radius == 0.0 {
            Some("singular fiber")
        } else if image.radius >= BASE_RADIUS {
            Some("outside D²(1/9)")
        } else {
            None
        });
        if let Some(reason) = reason {
            for r in [
                &mut reports.regular_value,
                &mut reports.fiber_positivity,
                &mut reports.transversality,
            ] {
                r.exclude(reason);
            }
            continue;
        }
        let (drho, dpsi) = differential(model, p);
        let (sn, cs) = image.angle.sin_cos();
        let rho = image.radius;
        let jx: [f64; 4] = std::array::from_fn(|k| cs * drho[k] - rho * sn * dpsi[k]);
        let jy: [f64; 4] = std::array::from_fn(|k| sn * drho[k] + rho * cs * dpsi[k]);

        // (a) rank two: normalized Gram determinant, i.e. sin² of the angle
        // between the rows.
        let (gxx, gxy, gyy) = (dot(&jx, &jx), dot(&jx, &jy), dot(&jy, &jy));
        let gram = gxx * gyy - gxy * gxy;
        let regular = if gxx > 0.0 && gyy > 0.0 { gram / (gxx * gyy) } else { 0.0 };
        reports.regular_value.record((floor - regular).max(0.0));
        reports.regular_value.record_margin(regular);
        if regular <= floor {
            reports.fiber_positivity.exclude("critical point");
            reports.transversality.exclude("critical point");
            continue;
        }

        // (b) horizontal lifts w = Jᵀ (J Jᵀ)⁻¹ e and an oriented kernel basis.
        let inv = [[gyy / gram, -gxy / gram], [-gxy / gram, gxx / gram]];
        let lift = |c0: f64, c1: f64| -> [f64; 4] { std::array::from_fn(|k| c0 * jx[k] + c1 * jy[k]) };
        let w1 = lift(inv[0][0], inv[1][0]);
        let w2 = lift(inv[0][1], inv[1][1]);
        let [mut v1, mut v2] = kernel(&jx, &jy);
        if det4([v1, v2, w1, w2]) < 0.0 {
            std::mem::swap(&mut v1, &mut v2);
        }
        let area = omega(p, &v1, &v2);
        reports.fiber_positivity.record((floor - area).max(0.0));
        reports.fiber_positivity.record_margin(area);

        // (c) outward transversality along V.
        let v = liouville_field(model, p).expect("off the singular loci").0;
        let vertical = 2.0 * rho * dot(&drho, &v);
        let horizontal = 2.0 * p.r2 * v[2];
        let margin = vertical.min(horizontal);
        reports.transversality.record((floor - margin).max(0.0));
        reports.transversality.record_margin(margin);
    }
    reports
}

/// `d(r2²)(V) = r2² + A/m` at the rational values of each sample's `r2`,
/// checked with exact arithmetic; residual is `0.0` exactly when the identity
/// holds and the margin is positive at every sample.
pub fn check_vertical_margin_exact(model: &DiskBundleModel, samples: &[ChartPoint]) -> NumericReport {
    let mut report = NumericReport::new("vertical-margin-exact", 0.0).with_chart(Chart::One);
    let floor = model.fiber_constant();
    for p in samples {
        let r2: ExactRational = match BigRational::from_float(p.r2) {
            Some(r) if r.is_positive() => r,
            _ => {
                report.exclude("r2 = 0");
                continue;
            }
        };
        let derivative = fiber_radius_derivative_exact(model, &r2).expect("r2 > 0");
        let closed = fiber_radius_margin(model, &r2);
        let mut residual = rational::to_f64(&(&derivative - &closed).abs());
        if derivative < floor {
            residual = residual.max(rational::to_f64(&(&floor - &derivative)));
        }
        report.record(residual);
        report.record_margin(rational::to_f64(&derivative));
    }
    report
}
