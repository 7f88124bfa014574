//! Chart-local models of the symplectic disk bundles and numerical
//! certificates for their explicit formulas.

pub mod areas;
pub mod charts;
pub mod fibration;
pub mod gluing;
pub mod liouville;
pub mod model;
pub mod mu;
pub mod sampling;

pub use areas::{solve_area_system, AreaAssignment, AreaError};
pub use charts::{lefschetz_map, liouville_field, Chart, ChartError, ChartPoint, PolarVector};
pub use fibration::check_fibration;
pub use gluing::{check_intertwine, check_symplectomorphism, gluing_map, ActionAnglePoint};
pub use liouville::check_liouville;
pub use model::{DiskBundleModel, ModelError};
pub use mu::{mu, mu_prime};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub mod tolerances {
    /// Default finite-difference step.
    pub const STEP: f64 = 1e-4;
    /// Floating-point checks evaluated from closed-form derivatives.
    pub const FLOAT: f64 = 1e-9;
    /// Finite-difference Liouville residual at the default step.
    pub const LIOUVILLE: f64 = 1e-6;
    /// Samples keep at least this many steps away from singular loci.
    pub const MARGIN_STEPS: f64 = 10.0;
    /// Strict positivity is certified with margin at least this.
    pub const POSITIVITY: f64 = 1e-12;
    /// Expected finite-difference convergence order.
    pub const ORDER: f64 = 1.9;
    pub const SAMPLES: usize = 1000;
    pub const SEED: u64 = 0x5eed;
}

/// Outcome of one sampled check. `passed` is exactly `max_residual <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericReport {
    pub check: String,
    pub chart: Option<String>,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_margin: Option<f64>,
    pub excluded: usize,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub exclusions: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub passed: bool,
}

impl NumericReport {
    pub fn new(check: impl Into<String>, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            chart: None,
            samples: 0,
            max_residual: 0.0,
            tolerance,
            order: None,
            min_margin: None,
            excluded: 0,
            exclusions: BTreeMap::new(),
            step: None,
            seed: None,
            passed: true,
        }
    }

    pub fn with_chart(mut self, chart: Chart) -> Self {
        self.chart = Some(chart.name());
        self
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.step = Some(h);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Folds one residual into the maximum. A NaN residual counts as a failure.
    pub fn record(&mut self, residual: f64) {
        self.samples += 1;
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        if r > self.max_residual {
            self.max_residual = r;
        }
        self.finish();
    }

    pub fn record_margin(&mut self, margin: f64) {
        self.min_margin = Some(match self.min_margin {
            Some(m) => m.min(margin),
            None => margin,
        });
    }

    pub fn exclude(&mut self, reason: impl Into<String>) {
        self.excluded += 1;
        *self.exclusions.entry(reason.into()).or_insert(0) += 1;
    }

    /// Replaces the tolerance and re-derives `passed`.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.finish();
        self
    }

    fn finish(&mut self) {
        self.passed = self.max_residual <= self.tolerance;
    }

    /// Reports with no evaluated sample certify nothing.
    pub fn certified(&self) -> bool {
        self.passed && self.samples > 0
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<28} {} samples={} max_residual={:.3e} tolerance={:.1e}",
            match &self.chart {
                Some(c) => format!("{} [{}]", self.check, c),
                None => self.check.clone(),
            },
            if self.passed { "PASS" } else { "FAIL" },
            self.samples,
            self.max_residual,
            self.tolerance
        );
        if let Some(o) = self.order {
            s.push_str(&format!(" order={o:.3}"));
        }
        if let Some(m) = self.min_margin {
            s.push_str(&format!(" min_margin={m:.3e}"));
        }
        if self.excluded > 0 {
            let parts: Vec<String> = self.exclusions.iter().map(|(k, v)| format!("{k}: {v}")).collect();
            s.push_str(&format!(" excluded={} ({})", self.excluded, parts.join(", ")));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyParams {
    pub step: f64,
    pub samples: usize,
    pub seed: u64,
    /// Overrides the floating-point tolerances (Liouville and intertwining).
    pub tolerance: Option<f64>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            step: tolerances::STEP,
            samples: tolerances::SAMPLES,
            seed: tolerances::SEED,
            tolerance: None,
        }
    }
}

/// Every chart of the model: `W1..Wm`, `W0`, `Z1`.
pub fn charts_of(model: &DiskBundleModel) -> Vec<Chart> {
    let mut out: Vec<Chart> = (1..=model.m as usize).map(Chart::ZeroWi).collect();
    out.push(Chart::ZeroW0);
    out.push(Chart::One);
    out
}

/// The full battery on one model, in a fixed order: Liouville per chart,
/// the exact gluing pullback, intertwining, the fibration checks per chart,
/// and the exact vertical margin on `Z1`.
pub fn verify_model(model: &DiskBundleModel, params: &VerifyParams) -> Vec<NumericReport> {
    let h = params.step;
    let seed = params.seed;
    let n = params.samples;
    let liouville_tol = params.tolerance.unwrap_or(tolerances::LIOUVILLE);
    let float_tol = params.tolerance.unwrap_or(tolerances::FLOAT);
    let mut out = Vec::new();
    for chart in charts_of(model) {
        let pts = sampling::sample_liouville(model, chart, h, liouville_tol, n, seed);
        out.push(check_liouville(model, &pts, h).with_tolerance(liouville_tol).with_seed(seed));
    }
    let exact = gluing::sample_t_exact(model, n, seed);
    out.push(check_symplectomorphism(model, &exact).with_seed(seed));
    let t = sampling::sample_t(model, n, seed, tolerances::MARGIN_STEPS * h);
    out.push(check_intertwine(model, &t).with_tolerance(float_tol).with_seed(seed));
    for chart in charts_of(model) {
        let pts = sampling::sample_fibration(model, chart, n, seed);
        out.extend(check_fibration(model, &pts).all().into_iter().map(|r| r.with_seed(seed)));
        if chart == Chart::One {
            out.push(fibration::check_vertical_margin_exact(model, &pts).with_seed(seed));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_tracks_residual() {
        let mut r = NumericReport::new("x", 1e-3);
        r.record(1e-4);
        assert!(r.passed);
        r.record(2e-3);
        assert!(!r.passed);
        r.record(0.0);
        assert!(!r.passed);
        assert_eq!(r.samples, 3);
        let mut r = NumericReport::new("x", 1.0);
        r.record(f64::NAN);
        assert!(!r.passed);
        assert!(!NumericReport::new("empty", 0.0).certified());
        let mut r = NumericReport::new("x", 1e-9);
        r.record(1e-7);
        assert!(!r.passed);
        assert!(r.with_tolerance(1e-6).passed);
    }

    #[test]
    fn reference_model_battery_passes() {
        let params = VerifyParams {
            samples: 200,
            ..VerifyParams::default()
        };
        let reports = verify_model(&DiskBundleModel::reference(), &params);
        assert_eq!(reports.len(), 4 + 2 + 4 * 3 + 1);
        for r in &reports {
            assert!(r.certified(), "{}", r.to_text());
        }
    }
}
