//! The plateau function `μ: [0, 1] -> [0, 1]` used by the Lefschetz maps.
//!
//! `μ(r) = r` on `[0, 1/3]`, `μ(r) = 1` on `[2/3, 1]`, and on the middle third,
//! with `t = 3r - 1`,
//!
//! ```text
//! μ(r) = 1/3 + t/3 + (14/3) t^3 - (22/3) t^4 + 3 t^5
//! ```
//!
//! the quintic matching value, slope and curvature at both ends, so `μ` is
//! C². Its derivative in `t` is `(t - 1)^2 (15 t^2 + 2t/3 + 1/3)`
//! which is nonnegative, so `μ` is nondecreasing.

use num_traits::{FromPrimitive, Num};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("μ is defined on [0, 1], got {0}")]
pub struct MuDomainError(pub f64);

const LOW: f64 = 1.0 / 3.0;
const HIGH: f64 = 2.0 / 3.0;

fn blend<T: Num + Clone + FromPrimitive>(t: T) -> T {
    let c = |n: i64, d: i64| T::from_i64(n).unwrap() / T::from_i64(d).unwrap();
    let t2 = t.clone() * t.clone();
    let t3 = t2 * t.clone();
    let t4 = t3.clone() * t.clone();
    let t5 = t4.clone() * t.clone();
    c(1, 3) + c(1, 3) * t + c(14, 3) * t3 + c(-22, 3) * t4 + c(3, 1) * t5
}

fn blend_slope(t: f64) -> f64 {
    // d/dr of the blend, the factor 3 from dt/dr included.
    3.0 * (t - 1.0).powi(2) * (15.0 * t * t + 2.0 * t / 3.0 + 1.0 / 3.0)
}

fn blend_curvature(t: f64) -> f64 {
    // d²/dr²: 9 * p''(t), p''(t) = 28 t - 88 t^2 + 60 t^3.
    9.0 * (28.0 * t - 88.0 * t * t + 60.0 * t * t * t)
}

pub fn mu(r: f64) -> Result<f64, MuDomainError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(MuDomainError(r));
    }
    Ok(mu_unchecked(r))
}

/// `μ` extended by `μ(r) = r` below 0 and `1` above 1; used where a chart's
/// own domain already bounds `r`.
pub fn mu_unchecked(r: f64) -> f64 {
    if r <= LOW {
        r
    } else if r >= HIGH {
        1.0
    } else {
        blend(3.0 * r - 1.0)
    }
}

pub fn mu_prime(r: f64) -> f64 {
    if r <= LOW {
        1.0
    } else if r >= HIGH {
        0.0
    } else {
        blend_slope(3.0 * r - 1.0)
    }
}

pub fn mu_second(r: f64) -> f64 {
    if r <= LOW || r >= HIGH {
        0.0
    } else {
        blend_curvature(3.0 * r - 1.0)
    }
}

/// `μ` over any exact field, for rational spot values.
pub fn mu_exact<T: Num + Clone + PartialOrd + FromPrimitive>(r: T) -> T {
    let three = T::one() + T::one() + T::one();
    let low = T::one() / three.clone();
    let high = (T::one() + T::one()) / three.clone();
    if r <= low {
        r
    } else if r >= high {
        T::one()
    } else {
        blend(three * r - T::one())
    }
}
