//! Deterministic sample plans.
//!
//! Points come from a Halton sequence (bases 2, 3, 5, 7) shifted by a random
//! Cranley–Patterson rotation drawn from a seeded ChaCha8 stream, so a seed
//! fixes the plan and different seeds give independent-looking grids of the
//! same low discrepancy.
//!
//! Radii are drawn uniformly in `r²` over a band, angles uniformly in `[0, 2π)`.

use super::charts::{Chart, ChartPoint};
use super::model::DiskBundleModel;
use super::tolerances::MARGIN_STEPS;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

const BASES: [u32; 4] = [2, 3, 5, 7];

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % b) as f64;
        index /= b;
    }
    r
}

#[derive(Debug, Clone)]
pub struct HaltonSampler {
    shift: [f64; 4],
    index: u64,
}

impl HaltonSampler {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut shift = [0.0; 4];
        for s in &mut shift {
            *s = rng.gen::<f64>();
        }
        Self { shift, index: 0 }
    }

    /// The next point of `[0, 1)^4`.
    pub fn next_point(&mut self) -> [f64; 4] {
        self.index += 1;
        let mut p = [0.0; 4];
        for (k, x) in p.iter_mut().enumerate() {
            *x = (halton(self.index, BASES[k]) + self.shift[k]).fract();
        }
        p
    }
}

/// Closed radius intervals for `r1` and `r2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBand {
    pub r1: (f64, f64),
    pub r2: (f64, f64),
}

impl RadialBand {
    fn draw(&self, u: f64, v: f64) -> (f64, f64) {
        let lerp = |(lo, hi): (f64, f64), t: f64| (lo * lo + t * (hi * hi - lo * lo)).sqrt();
        (lerp(self.r1, u), lerp(self.r2, v))
    }
}

/// Fraction of each singular radius kept clear for finite differences.
pub const LIOUVILLE_INNER: f64 = 0.5;

/// Smallest radius at which the leading truncation term `h² c / r⁴` of the
/// central difference of `½ c dθ` stays below a quarter of `tolerance`.
pub fn truncation_radius(c: f64, h: f64, tolerance: f64) -> f64 {
    (4.0 * h * h * c / tolerance).powf(0.25)
}

/// The band used by the Liouville check. A radius carrying a `c/r` term is
/// kept in `[max(R/2, truncation_radius), R - 10h]`; when that is empty the
/// band falls back to `[R/2, R - 10h]` and the check reports the truncation
/// it sees. Regular radii use `[0, R - 10h]`, and stencils never leave the
/// chart.
pub fn liouville_band(model: &DiskBundleModel, chart: Chart, h: f64, tolerance: f64) -> RadialBand {
    let margin = MARGIN_STEPS * h;
    let singular = |c: f64, hi: f64| {
        let upper = hi - margin;
        let inner = (LIOUVILLE_INNER * hi).max(truncation_radius(c, h, tolerance));
        if inner < upper {
            (inner, upper)
        } else {
            (LIOUVILLE_INNER * hi, upper)
        }
    };
    let (lo, hi) = chart.r1_bounds(model);
    let r1 = match chart {
        Chart::ZeroW0 => (lo + margin, hi - margin),
        _ if chart.base_singular(model) => singular(chart.base_constant(model), hi),
        _ => (0.0, hi - margin),
    };
    let fiber = crate::rational::to_f64(&model.fiber_constant());
    RadialBand {
        r1,
        r2: singular(fiber, chart.r2_bound(model)),
    }
}

pub fn sample_band(
    model: &DiskBundleModel,
    chart: Chart,
    band: RadialBand,
    n: usize,
    seed: u64,
) -> Vec<ChartPoint> {
    let mut sampler = HaltonSampler::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let [a, b, c, d] = sampler.next_point();
        let (r1, r2) = band.draw(a, c);
        if let Ok(p) = ChartPoint::new(model, chart, r1, TAU * b, r2, TAU * d) {
            out.push(p);
        }
    }
    out
}

pub fn sample_liouville(
    model: &DiskBundleModel,
    chart: Chart,
    h: f64,
    tolerance: f64,
    n: usize,
    seed: u64,
) -> Vec<ChartPoint> {
    sample_band(model, chart, liouville_band(model, chart, h, tolerance), n, seed)
}

/// Points of `T` keeping `margin` away from `r1 = 0`, `r2 = 0` and the two
/// outer walls of `T`.
pub fn sample_t(model: &DiskBundleModel, n: usize, seed: u64, margin: f64) -> Vec<ChartPoint> {
    let m = model.m as f64;
    let r1_hi = (m * model.delta_f64()).sqrt() - margin;
    let mut sampler = HaltonSampler::new(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n && attempts < 100 * n.max(1) {
        attempts += 1;
        let [a, b, c, d] = sampler.next_point();
        let r1 = (margin * margin + a * (r1_hi * r1_hi - margin * margin)).sqrt();
        let r2_hi = r1 / m.sqrt() - margin;
        if r2_hi <= margin {
            continue;
        }
        let r2 = (margin * margin + c * (r2_hi * r2_hi - margin * margin)).sqrt();
        if let Ok(p) = ChartPoint::new(model, Chart::One, r1, TAU * b, r2, TAU * d) {
            if p.in_t(model) {
                out.push(p);
            }
        }
    }
    out
}

/// Samples for the fibration checks: each chart's radii are drawn from the
/// region mapped into `D²(1/9)`, with points off it left for the check to
/// exclude.
pub fn sample_fibration(model: &DiskBundleModel, chart: Chart, n: usize, seed: u64) -> Vec<ChartPoint> {
    let s = model.delta_f64().sqrt();
    let (lo, hi) = chart.r1_bounds(model);
    let band = match chart {
        Chart::ZeroWi(_) => RadialBand {
            r1: (0.0, hi * 0.999),
            r2: (0.0, s / 3.0),
        },
        Chart::ZeroW0 => RadialBand {
            r1: (lo + (hi - lo) * 1e-3, hi - (hi - lo) * 1e-3),
            r2: (0.0, s / 9.0),
        },
        Chart::One => RadialBand {
            r1: (0.0, hi * 0.999),
            r2: (0.0, s / 9.0),
        },
    };
    sample_band(model, chart, band, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn radical_inverse() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert_eq!(halton(3, 2), 0.75);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-16);
        assert!((halton(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-16);
    }

    #[test]
    fn seeded_and_reproducible() {
        let mut a = HaltonSampler::new(7);
        let mut b = HaltonSampler::new(7);
        let mut c = HaltonSampler::new(8);
        for _ in 0..10 {
            let p = a.next_point();
            assert_eq!(p, b.next_point());
            assert_ne!(p, c.next_point());
            assert!(p.iter().all(|x| (0.0..1.0).contains(x)));
        }
    }

    #[test]
    fn plans_stay_in_domain() {
        let model = DiskBundleModel::new(1, 2, int(4), vec![int(1), int(0)], vec![1, 1], ratio(7, 10)).unwrap();
        let h = 1e-4;
        for chart in [Chart::ZeroWi(1), Chart::ZeroWi(2), Chart::ZeroW0, Chart::One] {
            let pts = sample_liouville(&model, chart, h, 1e-6, 200, 3);
            assert_eq!(pts.len(), 200);
            assert!(pts.iter().all(|p| p.r2 >= 0.5 * model.delta_f64().sqrt() - 1e-12));
        }
        let pts = sample_t(&model, 500, 1, 1e-3);
        assert_eq!(pts.len(), 500);
        assert!(pts.iter().all(|p| p.in_t(&model) && p.r2 >= 1e-3));
    }
}
