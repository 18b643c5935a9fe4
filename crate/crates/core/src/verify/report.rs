//! Per-sample records and their CSV and JSON forms.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Which inequality a report checks and with which constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremSpec {
    pub n: usize,
    pub k: usize,
    /// Fixed functional, `−1` for volume.
    pub j: i64,
    pub c_thm: f64,
    pub eta: f64,
}

/// One evaluated sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample: usize,
    pub seed: u64,
    pub epsilon: f64,
    /// Measured `‖u‖_{W^{2,∞}}`.
    pub w2_norm: f64,
    pub delta: f64,
    pub alpha: f64,
    pub u_l2_sq: f64,
    pub grad_l2_sq: f64,
    pub u_sup: f64,
    /// `I_k(Ω) − I_k(B)`.
    pub quermass_excess: f64,
    /// `δ − (C − η) α²`.
    pub margin: f64,
    /// Excess minus the quadratic lower bound with `10ε` slack.
    pub bound_margin: f64,
}

/// Reproduces a sample: run seed plus index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleId {
    pub sample: usize,
    pub seed: u64,
}

/// Aggregates of a theorem check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub theorem: String,
    pub n: usize,
    pub k: usize,
    pub j: i64,
    pub epsilon: f64,
    pub count: usize,
    pub c_thm: f64,
    pub eta: f64,
    pub min_margin: f64,
    /// `min δ/‖u‖²` over the samples and the lower-bound coefficient it is
    /// compared with.
    pub delta_ratio_min: f64,
    pub delta_ratio_bound: f64,
    /// Largest `c` with excess `≥ a‖u‖² + c‖∇u‖²` on every sample, and the
    /// stated gradient coefficient.
    pub gradient_coefficient_fit: f64,
    pub gradient_coefficient_bound: f64,
    pub min_bound_margin: f64,
    /// Samples with a negative margin.
    pub failures: Vec<SampleId>,
    pub passed: bool,
}

/// Samples of one theorem check at one `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub theorem: TheoremSpec,
    pub summary: ReportSummary,
    pub records: Vec<SampleRecord>,
}

pub const DEFICIT_CSV_HEADER: &str = "sample,seed,n,k,j,epsilon,w2_norm,delta,alpha,alpha_sq,u_l2_sq,grad_l2_sq,u_sup,quermass_excess,c_thm,eta,margin,bound_margin";

/// Round-trip exact float formatting.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl DeficitReport {
    /// Rows without header.
    pub fn csv_rows(&self) -> String {
        let t = &self.theorem;
        let mut out = String::new();
        for r in &self.records {
            let floats = [
                r.epsilon,
                r.w2_norm,
                r.delta,
                r.alpha,
                r.alpha * r.alpha,
                r.u_l2_sq,
                r.grad_l2_sq,
                r.u_sup,
                r.quermass_excess,
                t.c_thm,
                t.eta,
                r.margin,
                r.bound_margin,
            ];
            let floats: Vec<String> = floats.iter().map(|&x| fmt_float(x)).collect();
            let _ = writeln!(out, "{},{},{},{},{},{}", r.sample, r.seed, t.n, t.k, t.j, floats.join(","));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{DEFICIT_CSV_HEADER}\n{}", self.csv_rows())
    }

    /// Recomputes `δ − (C − η)α²` from the stored inputs.
    pub fn recomputed_margin(&self, r: &SampleRecord) -> f64 {
        r.delta - (self.theorem.c_thm - self.theorem.eta) * r.alpha * r.alpha
    }
}

/// One sample of a growth check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub epsilon: f64,
    pub sample: usize,
    pub seed: u64,
    pub delta: f64,
    pub u_sup: f64,
    /// `None` when `δ` is too small to evaluate the branch.
    pub branch: Option<f64>,
    pub ratio: Option<f64>,
}

/// `‖u‖_∞^n / branch(δ)` across an `ε` sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub n: usize,
    pub k: usize,
    /// The constant inside the logarithm of the `n = 2` branch.
    pub a_constant: f64,
    pub epsilons: Vec<f64>,
    pub max_ratio: Vec<f64>,
    /// `max_ratio[i+1] / max_ratio[i]`.
    pub growth: Vec<f64>,
    pub growth_limit: f64,
    pub excluded: usize,
    pub passed: bool,
    pub records: Vec<GrowthRecord>,
}

pub const GROWTH_CSV_HEADER: &str = "epsilon,sample,seed,delta,u_sup,branch,ratio";

impl GrowthReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{GROWTH_CSV_HEADER}\n");
        let opt = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_float(r.epsilon),
                r.sample,
                r.seed,
                fmt_float(r.delta),
                fmt_float(r.u_sup),
                opt(r.branch),
                opt(r.ratio)
            );
        }
        out
    }
}
