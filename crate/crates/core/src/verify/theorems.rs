//! Sample-based checks of the quantitative stability inequalities.

use super::report::{DeficitReport, SampleId, GrowthRecord, GrowthReport, ReportSummary, SampleRecord, TheoremSpec};
use super::sampling::{sample_set, Sample, SampleSpec};
use crate::asymmetry::{fraenkel_asymmetry, AsymmetryOptions};
use crate::error::{arg, Error, Result};
use crate::functionals::{ball_quermass, curvature_integrals, deficit_from_integrals, DeficitSpec, Normalization};
use crate::geometry::NearlySphericalSet;
use crate::symfunc::binomial;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `η = ETA_FRACTION · C`.
pub const ETA_FRACTION: f64 = 0.2;
/// Allowed growth of the largest sup-norm ratio per halving of `ε`.
pub const GROWTH_LIMIT: f64 = 1.5;
/// Quadratic lower bounds are asserted only at or below this `ε`.
pub const BOUND_EPSILON: f64 = 0.02;

/// `(n−k)(k+1) / (2n(n+1)²)`, the constant under a volume constraint.
pub fn volume_constant(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    (n - k) * (k + 1.0) / (2.0 * n * (n + 1.0).powi(2))
}

/// `n(n−k)(k−j) / (4(n+1)²)`, the constant under an `I_j` constraint.
pub fn quermass_constant(n: usize, k: usize, j: usize) -> f64 {
    let (n, k, j) = (n as f64, k as f64, j as f64);
    n * (n - k) * (k - j) / (4.0 * (n + 1.0).powi(2))
}

/// `a = C(n,k)(n−k)(k−j)/(2n)` with `j = −1` for volume. For constrained
/// domains `I_k(Ω) − I_k(B) = a(‖∇u‖² − n‖u‖²) + O(ε)‖u‖²_{W^{1,2}}`, and
/// `a(‖u‖² + ½‖∇u‖²)` is the resulting lower bound.
pub fn expansion_coefficient(n: usize, k: usize, j: i64) -> f64 {
    binomial(n as i64, k as i64) * (n - k) as f64 * (k as i64 - j) as f64 / (2.0 * n as f64)
}

fn asymmetry_options(seed: u64, index: usize) -> AsymmetryOptions {
    AsymmetryOptions {
        seed: seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
        ..AsymmetryOptions::default()
    }
}

/// Evaluates one constrained domain against `theorem`.
pub fn evaluate_sample(sample: &Sample, epsilon: f64, theorem: &TheoremSpec) -> Result<SampleRecord> {
    let set = &sample.set;
    let TheoremSpec { n, k, j, c_thm, eta } = *theorem;
    let grid = set.default_grid();
    let integrals = curvature_integrals(set, &grid)?;
    let delta = deficit_from_integrals(set, DeficitSpec::new(n, k, j)?, &integrals)?;
    let excess = integrals[k] - ball_quermass(set.dim(), k as i64, 1.0);
    let alpha = fraenkel_asymmetry(set, &grid, &asymmetry_options(sample.seed, sample.index))?.alpha;
    let (u2, g2) = (set.u().l2_norm_sq(), set.u().grad_l2_norm_sq());
    let w2 = sample.norms.w2();
    let a = expansion_coefficient(n, k, j);
    let bound = a * ((1.0 - 10.0 * w2) * u2 + (0.5 - 10.0 * w2) * g2);
    Ok(SampleRecord {
        sample: sample.index,
        seed: sample.seed,
        epsilon,
        w2_norm: w2,
        delta,
        alpha,
        u_l2_sq: u2,
        grad_l2_sq: g2,
        u_sup: sample.norms.value,
        quermass_excess: excess,
        margin: delta - (c_thm - eta) * alpha * alpha,
        bound_margin: excess - bound,
    })
}

fn summarize(name: &str, theorem: &TheoremSpec, epsilon: f64, records: &[SampleRecord]) -> ReportSummary {
    let TheoremSpec { n, k, j, c_thm, eta } = *theorem;
    let area = crate::sphere::SphereDim::from_n(n).map(|d| d.area()).unwrap_or(f64::NAN);
    let a = expansion_coefficient(n, k, j);
    let fold_min = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::INFINITY, f64::min);

    let min_margin = fold_min(&mut records.iter().map(|r| r.margin));
    let min_bound_margin = fold_min(&mut records.iter().map(|r| r.bound_margin));
    let delta_ratio_min = fold_min(&mut records.iter().filter(|r| r.u_l2_sq > 0.0).map(|r| r.delta / r.u_l2_sq));
    let gradient_fit = fold_min(
        &mut records
            .iter()
            .filter(|r| r.grad_l2_sq > 0.0)
            .map(|r| (r.quermass_excess - a * r.u_l2_sq) / r.grad_l2_sq),
    );
    let delta_ratio_bound = (n - k) as f64 * (k as i64 - j) as f64 / (2.0 * n as f64 * area) * (1.0 - 10.0 * epsilon);
    let gradient_bound = a * (0.5 - 10.0 * epsilon) - 10.0 * epsilon * a / (2.0 * (n + 1) as f64);

    let failures: Vec<SampleId> = records
        .iter()
        .filter(|r| !(r.margin >= 0.0))
        .map(|r| SampleId { sample: r.sample, seed: r.seed })
        .collect();
    let bounds_ok = epsilon > BOUND_EPSILON
        || (min_bound_margin >= 0.0 && delta_ratio_min >= delta_ratio_bound && gradient_fit >= gradient_bound);
    ReportSummary {
        theorem: name.to_string(),
        n,
        k,
        j,
        epsilon,
        count: records.len(),
        c_thm,
        eta,
        min_margin,
        delta_ratio_min,
        delta_ratio_bound,
        gradient_coefficient_fit: gradient_fit,
        gradient_coefficient_bound: gradient_bound,
        min_bound_margin,
        passed: failures.is_empty() && bounds_ok,
        failures,
    }
}

/// Evaluates every sample of `spec` against `theorem`.
pub fn check_stability(spec: &SampleSpec, name: &str, theorem: TheoremSpec) -> Result<DeficitReport> {
    let samples = sample_set(spec)?;
    let records = samples
        .par_iter()
        .map(|s| evaluate_sample(s, spec.epsilon, &theorem))
        .collect::<Result<Vec<_>>>()?;
    Ok(DeficitReport {
        theorem,
        summary: summarize(name, &theorem, spec.epsilon, &records),
        records,
    })
}

/// `δ_{k,−1} ≥ (C − η) α²` for volume-normalized centered domains with
/// `C = (n−k)(k+1)/(2n(n+1)²)`.
pub fn check_volume_stability(spec: &SampleSpec, k: usize) -> Result<DeficitReport> {
    if k >= spec.n {
        return arg(format!("need k < n, got k = {k}, n = {}", spec.n));
    }
    if spec.normalization != Normalization::Volume {
        return arg("volume stability needs volume-normalized samples");
    }
    let c = volume_constant(spec.n, k);
    let theorem = TheoremSpec {
        n: spec.n,
        k,
        j: -1,
        c_thm: c,
        eta: ETA_FRACTION * c,
    };
    check_stability(spec, "volume", theorem)
}

/// `δ_{k,j} ≥ (C − η) α²` for `I_j`-normalized centered domains with
/// `C = n(n−k)(k−j)/(4(n+1)²)`.
pub fn check_quermass_stability(spec: &SampleSpec, j: usize, k: usize) -> Result<DeficitReport> {
    if !(j < k && k < spec.n) {
        return arg(format!("need j < k < n, got j = {j}, k = {k}, n = {}", spec.n));
    }
    if spec.normalization != Normalization::Quermass(j) {
        return arg(format!("quermass stability needs I_{j}-normalized samples"));
    }
    let c = quermass_constant(spec.n, k, j);
    let theorem = TheoremSpec {
        n: spec.n,
        k,
        j: j as i64,
        c_thm: c,
        eta: ETA_FRACTION * c,
    };
    check_stability(spec, "quermass", theorem)
}

impl DeficitReport {
    /// `Err(Verification)` naming the failing samples.
    pub fn ensure_passed(&self) -> Result<()> {
        if self.summary.passed {
            return Ok(());
        }
        let list: Vec<String> = self.summary.failures.iter().map(|f| format!("sample {} (seed {})", f.sample, f.seed)).collect();
        Err(Error::Verification(format!(
            "{} check failed at ε = {}: min margin {:e}, min bound margin {:e}; negative margins: [{}]",
            self.summary.theorem,
            self.summary.epsilon,
            self.summary.min_margin,
            self.summary.min_bound_margin,
            list.join(", ")
        )))
    }
}

/// `δ^{1/2}` for `n = 1`, `δ log(A/δ)` for `n = 2`; `None` unless
/// `0 < δ < A`.
pub fn growth_branch(n: usize, delta: f64, a: f64) -> Option<f64> {
    if !(delta > 0.0) {
        return None;
    }
    match n {
        1 => Some(delta.sqrt()),
        2 if delta < a => Some(delta * (a / delta).ln()),
        _ => None,
    }
}

/// Tracks `‖u‖_∞^n / branch(δ_{k,−1})` over decreasing `ε`. `A` is `e`
/// times the largest deficit at the first (coarsest) `ε`, so the logarithm
/// is at least one there.
pub fn check_sup_norm_growth(spec: &SampleSpec, k: usize, epsilons: &[f64]) -> Result<GrowthReport> {
    let n = spec.n;
    if !(1..=2).contains(&n) || k >= n {
        return arg(format!("need n ∈ {{1, 2}} and k < n, got n = {n}, k = {k}"));
    }
    if spec.normalization != Normalization::Volume {
        return arg("growth check needs volume-normalized samples");
    }
    if epsilons.len() < 2 || epsilons.windows(2).any(|w| !(w[1] < w[0])) {
        return arg("need at least two strictly decreasing epsilons");
    }
    let dspec = DeficitSpec::new(n, k, -1)?;
    let mut raw: Vec<(f64, Sample, f64)> = Vec::new();
    for &eps in epsilons {
        let s = SampleSpec { epsilon: eps, ..spec.clone() };
        let samples = sample_set(&s)?;
        let deltas = samples
            .par_iter()
            .map(|x| {
                let grid = x.set.default_grid();
                deficit_from_integrals(&x.set, dspec, &curvature_integrals(&x.set, &grid)?)
            })
            .collect::<Result<Vec<_>>>()?;
        raw.extend(samples.into_iter().zip(deltas).map(|(x, d)| (eps, x, d)));
    }
    let coarsest = epsilons[0];
    let a = std::f64::consts::E * raw.iter().filter(|r| r.0 == coarsest).map(|r| r.2).fold(0.0, f64::max);

    let records: Vec<GrowthRecord> = raw
        .iter()
        .map(|(eps, x, delta)| {
            let u_sup = x.norms.value;
            let branch = growth_branch(n, *delta, a);
            GrowthRecord {
                epsilon: *eps,
                sample: x.index,
                seed: x.seed,
                delta: *delta,
                u_sup,
                branch,
                ratio: branch.map(|b| u_sup.powi(n as i32) / b),
            }
        })
        .collect();
    let max_ratio: Vec<f64> = epsilons
        .iter()
        .map(|&e| {
            records
                .iter()
                .filter(|r| r.epsilon == e)
                .filter_map(|r| r.ratio)
                .fold(0.0, f64::max)
        })
        .collect();
    let growth: Vec<f64> = max_ratio.windows(2).map(|w| w[1] / w[0]).collect();
    let excluded = records.iter().filter(|r| r.ratio.is_none()).count();
    Ok(GrowthReport {
        n,
        k,
        a_constant: a,
        epsilons: epsilons.to_vec(),
        passed: max_ratio.iter().all(|m| *m > 0.0) && growth.iter().all(|g| *g <= GROWTH_LIMIT),
        max_ratio,
        growth,
        growth_limit: GROWTH_LIMIT,
        excluded,
        records,
    })
}

/// Least-squares fit of `I_k(Ω) − I_k(B) ≈ c_g‖∇u‖² + c_u‖u‖²` in relative
/// error, against the expansion coefficients `(a, −n a)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub gradient: f64,
    pub value: f64,
    pub expected_gradient: f64,
    pub expected_value: f64,
    pub samples: usize,
}

impl QuadraticFit {
    pub fn gradient_error(&self) -> f64 {
        (self.gradient / self.expected_gradient - 1.0).abs()
    }

    pub fn value_error(&self) -> f64 {
        (self.value / self.expected_value - 1.0).abs()
    }
}

/// `I_k(Ω) − I_k(B)` on the default grid.
pub fn quermass_excess(set: &NearlySphericalSet, k: usize) -> Result<f64> {
    let integrals = curvature_integrals(set, &set.default_grid())?;
    match integrals.get(k) {
        Some(v) => Ok(v - ball_quermass(set.dim(), k as i64, 1.0)),
        None => arg(format!("k = {k} exceeds n = {}", set.n())),
    }
}

pub fn fit_quadratic_form(sets: &[NearlySphericalSet], k: usize, j: i64) -> Result<QuadraticFit> {
    let Some(first) = sets.first() else {
        return arg("no samples to fit");
    };
    let n = first.n();
    let excess = sets.par_iter().map(|s| quermass_excess(s, k)).collect::<Result<Vec<_>>>()?;
    // rows (‖∇u‖²/y, ‖u‖²/y) ≈ 1
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (set, y) in sets.iter().zip(&excess) {
        if *y == 0.0 {
            continue;
        }
        let x1 = set.u().grad_l2_norm_sq() / y;
        let x2 = set.u().l2_norm_sq() / y;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1;
        b2 += x2;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > 1e-12 * s11 * s22) {
        return Err(Error::Accuracy("quadratic fit is degenerate; mix several degrees".into()));
    }
    let a = expansion_coefficient(n, k, j);
    Ok(QuadraticFit {
        gradient: (b1 * s22 - b2 * s12) / det,
        value: (s11 * b2 - s12 * b1) / det,
        expected_gradient: a,
        expected_value: -(n as f64) * a,
        samples: sets.len(),
    })
}

/// `(I_k(Ω) − I_k(B)) / (a(‖u‖² + ½‖∇u‖²))`: at least one up to `O(ε)`, and
/// tending to one for pure degree-two perturbations.
pub fn bound_tightness(set: &NearlySphericalSet, k: usize, j: i64) -> Result<f64> {
    let a = expansion_coefficient(set.n(), k, j);
    let u = set.u();
    Ok(quermass_excess(set, k)? / (a * (u.l2_norm_sq() + 0.5 * u.grad_l2_norm_sq())))
}
