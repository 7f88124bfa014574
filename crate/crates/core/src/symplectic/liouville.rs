//! Finite-difference certificate for `d(ι_V ω) = ω`.
//!
//! The check runs in Cartesian coordinates `(x1, y1, x2, y2)`, where
//! `ω = dx1∧dy1 + dx2∧dy2` and `ι_V ω = -V_y1 dx1 + V_x1 dy1 - V_y2 dx2 + V_x2 dy2`.
//! Each partial derivative is a central difference of step `h`, so the
//! residual is `O(h²)` and halving `h` should divide it by about four.

use super::charts::{liouville_field, ChartError, ChartPoint, PolarVector};
use super::model::DiskBundleModel;
use super::tolerances;
use super::NumericReport;

pub type Field<'a> = &'a dyn Fn(&DiskBundleModel, &ChartPoint) -> Result<PolarVector, ChartError>;

fn alpha(model: &DiskBundleModel, field: Field, like: &ChartPoint, x: [f64; 4]) -> Result<[f64; 4], ChartError> {
    let p = ChartPoint::from_cartesian(model, like.chart, x)?;
    let [vr1, vt1, vr2, vt2] = field(model, &p)?.0;
    let (s1, c1) = p.theta1.sin_cos();
    let (s2, c2) = p.theta2.sin_cos();
    let vx1 = vr1 * c1 - p.r1 * vt1 * s1;
    let vy1 = vr1 * s1 + p.r1 * vt1 * c1;
    let vx2 = vr2 * c2 - p.r2 * vt2 * s2;
    let vy2 = vr2 * s2 + p.r2 * vt2 * c2;
    Ok([-vy1, vx1, -vy2, vx2])
}

/// `max_{i<j} |dα_ij - ω_ij|` at `p` with step `h`.
pub fn residual_at(model: &DiskBundleModel, field: Field, p: &ChartPoint, h: f64) -> Result<f64, ChartError> {
    let x = p.cartesian();
    // grad[i][j] = ∂_i α_j
    let mut grad = [[0.0; 4]; 4];
    for (i, row) in grad.iter_mut().enumerate() {
        let mut plus = x;
        let mut minus = x;
        plus[i] += h;
        minus[i] -= h;
        let ap = alpha(model, field, p, plus)?;
        let am = alpha(model, field, p, minus)?;
        for j in 0..4 {
            row[j] = (ap[j] - am[j]) / (2.0 * h);
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let target = if (i, j) == (0, 1) || (i, j) == (2, 3) { 1.0 } else { 0.0 };
            worst = worst.max((grad[i][j] - grad[j][i] - target).abs());
        }
    }
    Ok(worst)
}

pub fn check_liouville(model: &DiskBundleModel, samples: &[ChartPoint], h: f64) -> NumericReport {
    check_liouville_with(model, samples, h, &liouville_field, "liouville")
}

pub fn check_liouville_with(
    model: &DiskBundleModel,
    samples: &[ChartPoint],
    h: f64,
    field: Field,
    name: &str,
) -> NumericReport {
    let mut report = NumericReport::new(name, tolerances::LIOUVILLE).with_step(h);
    if let Some(p) = samples.first() {
        report = report.with_chart(p.chart);
    }
    let margin = tolerances::MARGIN_STEPS * h;
    let mut coarse: f64 = 0.0;
    let mut fine: f64 = 0.0;
    for p in samples {
        if p.r2 < margin {
            report.exclude("within 10h of C");
            continue;
        }
        if p.chart.base_singular(model) && p.r1 < margin {
            report.exclude("within 10h of F");
            continue;
        }
        match (residual_at(model, field, p, h), residual_at(model, field, p, h / 2.0)) {
            (Ok(a), Ok(b)) => {
                coarse = coarse.max(a);
                fine = fine.max(b);
                report.record(a);
            }
            _ => report.exclude("stencil leaves chart"),
        }
    }
    if report.samples > 0 && fine > 0.0 {
        report.order = Some((coarse / fine).log2());
    }
    report
}
