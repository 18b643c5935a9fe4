//! Seeded random nearly spherical domains in standard position.

use crate::error::{arg, Error, Result};
use crate::functionals::{barycenter, ball_quermass, curvature_integral, normalize, recenter, Normalization};
use crate::geometry::{NearlySphericalSet, SupNorms};
use crate::sphere::{SphereDim, SphericalFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `ε` accepted by the sampler.
pub const MAX_EPSILON: f64 = 0.3;
/// Redraws allowed per sample before giving up.
pub const MAX_REDRAWS: usize = 20;
/// Accepted window for `‖u‖_{W^{2,∞}}` is `[SCALE_WINDOW·ε, ε]`.
pub const SCALE_WINDOW: f64 = 0.9;
const SCALE_AIM: f64 = 0.95;
const MAX_SCALE_STEPS: usize = 12;
const RECENTER_TOL: f64 = 1e-10;
/// Post-checks on a constrained sample.
pub const CONSTRAINT_TOL: f64 = 1e-9;
pub const CENTER_TOL: f64 = 1e-8;

/// What a random sample looks like and how it is constrained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub n: usize,
    /// Highest degree drawn.
    pub max_degree: usize,
    /// Lowest degree drawn; degrees 0 and 1 are fixed by the constraints.
    pub min_degree: usize,
    /// Target `‖u‖_{W^{2,∞}}`.
    pub epsilon: f64,
    pub count: usize,
    pub seed: u64,
    /// Fixed functional; the barycenter is always put at the origin.
    pub normalization: Normalization,
}

impl SampleSpec {
    pub fn new(n: usize, max_degree: usize, epsilon: f64, count: usize, seed: u64) -> Self {
        SampleSpec {
            n,
            max_degree,
            min_degree: 2,
            epsilon,
            count,
            seed,
            normalization: Normalization::Volume,
        }
    }

    pub fn with_normalization(mut self, mode: Normalization) -> Self {
        self.normalization = mode;
        self
    }

    /// Restricts draws to degrees `lo..=hi`.
    pub fn with_degrees(mut self, lo: usize, hi: usize) -> Self {
        self.min_degree = lo;
        self.max_degree = hi;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn dim(&self) -> Result<SphereDim> {
        SphereDim::from_n(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        self.dim()?;
        if !(self.epsilon > 0.0 && self.epsilon <= MAX_EPSILON) {
            return arg(format!("epsilon must lie in (0, {MAX_EPSILON}], got {}", self.epsilon));
        }
        if self.min_degree < 2 || self.min_degree > self.max_degree {
            return arg(format!(
                "degree range {}..={} must satisfy 2 ≤ lo ≤ hi",
                self.min_degree, self.max_degree
            ));
        }
        if self.max_degree > 40 {
            return arg(format!("max degree {} is above 40", self.max_degree));
        }
        if self.count == 0 {
            return arg("sample count must be positive");
        }
        if self.normalization.index() >= self.n as i64 {
            return arg(format!("cannot fix I_{} when n = {}", self.normalization.index(), self.n));
        }
        Ok(())
    }
}

/// One constrained random domain.
#[derive(Clone, Debug)]
pub struct Sample {
    pub index: usize,
    /// Seed of the run; with `index` this reproduces the draw.
    pub seed: u64,
    pub set: NearlySphericalSet,
    pub norms: SupNorms,
    pub redraws: usize,
}

impl Sample {
    pub fn u(&self) -> &SphericalFunction {
        self.set.u()
    }
}

/// Random generator of sample `index`: the run seed picks the key, the
/// index picks the stream.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Gaussian coefficients on degrees `lo..=hi`, zero elsewhere.
pub fn random_function(dim: SphereDim, lo: usize, hi: usize, rng: &mut ChaCha8Rng) -> SphericalFunction {
    let len = dim.basis_len(hi);
    let first = if lo == 0 { 0 } else { dim.basis_len(lo - 1) };
    let coeffs = (0..len)
        .map(|i| if i < first { 0.0 } else { StandardNormal.sample(rng) })
        .collect();
    SphericalFunction::new(dim, hi, coeffs).expect("length matches basis")
}

/// `s·v` rescaled so its `W^{2,∞}` norm is exactly `target`, for raw
/// (unconstrained) samples.
pub fn scale_to(v: &SphericalFunction, target: f64) -> Result<(SphericalFunction, SupNorms)> {
    let norms = SupNorms::scan(v, scan_resolution(v))?;
    let w = norms.w2();
    if !(w > 0.0) {
        return arg("cannot rescale the zero function");
    }
    let s = target / w;
    let scaled = v.scaled(s);
    Ok((
        scaled,
        SupNorms {
            value: norms.value * s,
            gradient: norms.gradient * s,
            hessian: norms.hessian * s,
        },
    ))
}

fn scan_resolution(v: &SphericalFunction) -> usize {
    crate::geometry::default_resolution(v.dim(), v.max_degree()) * crate::geometry::SCAN_FACTOR
}

/// Normalize, recenter, normalize again, and check both constraints.
pub fn constrain(u: &SphericalFunction, mode: Normalization) -> Result<NearlySphericalSet> {
    let omega = NearlySphericalSet::new(u.clone())?;
    let first = normalize(&omega, mode, &omega.default_grid())?;
    let centered = recenter(&first, RECENTER_TOL)?.set;
    let grid = centered.default_grid();
    let out = normalize(&centered, mode, &grid)?;
    check_constraints(&out, mode)?;
    Ok(out)
}

/// Relative error of the fixed functional and barycenter norm.
pub fn constraint_errors(omega: &NearlySphericalSet, mode: Normalization) -> Result<(f64, f64)> {
    let j = mode.index();
    let value = curvature_integral(omega, j, &omega.default_grid())?;
    let target = ball_quermass(omega.dim(), j, 1.0);
    let bar = barycenter(omega).iter().map(|b| b * b).sum::<f64>().sqrt();
    Ok(((value - target).abs() / target, bar))
}

fn check_constraints(omega: &NearlySphericalSet, mode: Normalization) -> Result<()> {
    let (rel, bar) = constraint_errors(omega, mode)?;
    if rel > CONSTRAINT_TOL || bar > CENTER_TOL {
        return Err(Error::Accuracy(format!(
            "constraint projection left functional error {rel:e}, barycenter {bar:e}"
        )));
    }
    Ok(())
}

/// Scales the raw draw so the constrained domain has `W^{2,∞}` norm in
/// the window `[0.9ε, ε]`. The norm is close to linear in the scale, so a
/// ratio update followed by bisection on a bracket converges in a few steps.
fn fit_scale(v: &SphericalFunction, eps: f64, mode: Normalization) -> Result<(NearlySphericalSet, SupNorms)> {
    let raw = SupNorms::scan(v, scan_resolution(v))?.w2();
    if !(raw > 0.0) {
        return arg("raw draw vanished");
    }
    let aim = SCALE_AIM * eps;
    let (mut lo, mut hi): ((f64, f64), (f64, f64)) = ((0.0, 0.0), (f64::INFINITY, f64::INFINITY));
    let mut s = aim / raw;
    let mut last_err = None;
    for _ in 0..MAX_SCALE_STEPS {
        match constrain(&v.scaled(s), mode) {
            Ok(set) => {
                let norms = set.sup_norms();
                let w = norms.w2();
                if (SCALE_WINDOW * eps..=eps).contains(&w) {
                    return Ok((set, norms));
                }
                if w < aim {
                    lo = (s, w);
                } else {
                    hi = (s, w);
                }
                let ratio = s * aim / w;
                s = if hi.0.is_finite() && !(ratio > lo.0 && ratio < hi.0) {
                    0.5 * (lo.0 + hi.0)
                } else {
                    ratio
                };
            }
            Err(e) => {
                // too large to constrain: shrink
                hi = (s, f64::INFINITY);
                s = 0.5 * (lo.0 + s);
                last_err = Some(e);
            }
        }
    }
    Err(last_err.unwrap_or(Error::NoConvergence {
        what: "sample scale targeting",
        iterations: MAX_SCALE_STEPS,
        best_value: lo.1,
        best_point: vec![lo.0, hi.0],
    }))
}

/// Draws sample `index` of `spec`, redrawing up to [`MAX_REDRAWS`] times
/// when the constraint projection fails.
pub fn draw_sample(spec: &SampleSpec, index: usize) -> Result<Sample> {
    spec.validate()?;
    let dim = spec.dim()?;
    let mut rng = sample_rng(spec.seed, index);
    let mut last = None;
    for redraws in 0..=MAX_REDRAWS {
        let v = random_function(dim, spec.min_degree, spec.max_degree, &mut rng);
        match fit_scale(&v, spec.epsilon, spec.normalization) {
            Ok((set, norms)) => {
                return Ok(Sample {
                    index,
                    seed: spec.seed,
                    set,
                    norms,
                    redraws,
                })
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// All samples of `spec`, in index order.
pub fn sample_set(spec: &SampleSpec) -> Result<Vec<Sample>> {
    spec.validate()?;
    (0..spec.count).into_par_iter().map(|i| draw_sample(spec, i)).collect()
}
