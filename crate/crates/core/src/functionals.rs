//! Global quantities of a nearly spherical domain: curvature integrals,
//! volume, barycenter, matching balls, deficits and the normalizations that
//! put a domain into standard position.

use crate::error::{arg, geometry, Error, Result};
use crate::geometry::{curvature_samples, default_resolution, NearlySphericalSet, SupNorms};
use crate::sphere::{project, QuadratureGrid, SphereDim, SpherePoint, SphericalFunction};
use crate::symfunc::binomial;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative change under grid doubling above which a curvature integral is
/// reported as under-resolved.
pub const RESOLUTION_WARNING: f64 = 1e-9;

/// Which deficit `δ_{k,m}` to compute; `m = −1` matches volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficitSpec {
    pub k: usize,
    pub m: i64,
}

impl DeficitSpec {
    pub fn new(n: usize, k: usize, m: i64) -> Result<Self> {
        if k > n {
            return arg(format!("k = {k} exceeds n = {n}"));
        }
        if m < -1 || m >= k as i64 {
            return arg(format!("need −1 ≤ m < k, got k = {k}, m = {m}"));
        }
        Ok(DeficitSpec { k, m })
    }
}

/// How to fix the scale of a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// `Vol(Ω) = |B|`.
    Volume,
    /// `I_j(Ω) = I_j(B)`.
    Quermass(usize),
}

impl Normalization {
    /// The functional index, with volume as `−1`.
    pub fn index(self) -> i64 {
        match self {
            Normalization::Volume => -1,
            Normalization::Quermass(j) => j as i64,
        }
    }

    pub fn from_index(j: i64) -> Result<Self> {
        match j {
            -1 => Ok(Normalization::Volume),
            j if j >= 0 => Ok(Normalization::Quermass(j as usize)),
            _ => arg(format!("normalization index must be ≥ −1, got {j}")),
        }
    }
}

/// `I_k(B_r) = C(n,k) Area(∂B) r^{n−k}`; `k = −1` gives `|B| r^{n+1}`.
pub fn ball_quermass(dim: SphereDim, k: i64, r: f64) -> f64 {
    let n = dim.n() as i64;
    if k < 0 {
        return dim.ball_volume() * r.powi(n as i32 + 1);
    }
    binomial(n, k) * dim.area() * r.powi((n - k) as i32)
}

/// `∫_{∂B} σ_k(h) √det g dA` for `0 ≤ k ≤ n`; `k = −1` is the volume.
pub fn curvature_integral(omega: &NearlySphericalSet, k: i64, grid: &QuadratureGrid) -> Result<f64> {
    let n = omega.n() as i64;
    if k < -1 || k > n {
        return arg(format!("need −1 ≤ k ≤ {n}, got {k}"));
    }
    if k == -1 {
        return Ok(volume(omega));
    }
    Ok(curvature_integrals(omega, grid)?[k as usize])
}

/// `[I_0, ..., I_n]` from one pass over the grid.
pub fn curvature_integrals(omega: &NearlySphericalSet, grid: &QuadratureGrid) -> Result<Vec<f64>> {
    if grid.dim() != omega.dim() {
        return arg("grid and domain live on different spheres");
    }
    let samples = curvature_samples(omega.u(), grid)?;
    let n = omega.n();
    let mut out = vec![0.0; n + 1];
    for (s, w) in samples.iter().zip(grid.weights()) {
        for (o, sig) in out.iter_mut().zip(&s.sigma) {
            *o += w * sig * s.area_density;
        }
    }
    Ok(out)
}

/// A curvature integral together with its value on the doubled grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckedIntegral {
    pub value: f64,
    pub refined: f64,
}

impl CheckedIntegral {
    pub fn relative_change(&self) -> f64 {
        (self.refined - self.value).abs() / self.refined.abs().max(1.0)
    }

    pub fn under_resolved(&self) -> bool {
        self.relative_change() > RESOLUTION_WARNING
    }
}

/// All `I_k` on `grid` and on its refinement, for resolution diagnostics.
pub fn curvature_integrals_checked(omega: &NearlySphericalSet, grid: &QuadratureGrid) -> Result<Vec<CheckedIntegral>> {
    let coarse = curvature_integrals(omega, grid)?;
    let fine = curvature_integrals(omega, &grid.refined())?;
    Ok(coarse
        .into_iter()
        .zip(fine)
        .map(|(value, refined)| CheckedIntegral { value, refined })
        .collect())
}

fn exact_grid(dim: SphereDim, degree: usize) -> QuadratureGrid {
    QuadratureGrid::new(dim, QuadratureGrid::resolution_for_degree(dim, degree)).expect("valid resolution")
}

/// `|Ω| = (1/(n+1)) ∫ (1+u)^{n+1} dA`, exact for band-limited `u`.
pub fn volume(omega: &NearlySphericalSet) -> f64 {
    let n = omega.n();
    let grid = exact_grid(omega.dim(), (n + 1) * omega.u().max_degree());
    let p = (n + 1) as i32;
    let vals: Vec<f64> = grid.evaluate(omega.u()).iter().map(|v| (1.0 + v).powi(p)).collect();
    grid.integrate(&vals) / (n + 1) as f64
}

/// Volumetric barycenter `(1/|Ω|) (1/(n+2)) ∫ (1+u)^{n+2} x dA`.
pub fn barycenter(omega: &NearlySphericalSet) -> Vec<f64> {
    let n = omega.n();
    let grid = exact_grid(omega.dim(), (n + 2) * omega.u().max_degree() + 1);
    let p = (n + 2) as i32;
    let vals = grid.evaluate(omega.u());
    let mut moment = vec![0.0; n + 1];
    for ((v, w), node) in vals.iter().zip(grid.weights()).zip(grid.nodes()) {
        let f = w * (1.0 + v).powi(p);
        for (m, x) in moment.iter_mut().zip(node.ambient()) {
            *m += f * x;
        }
    }
    let scale = 1.0 / ((n + 2) as f64 * volume(omega));
    moment.iter().map(|m| m * scale).collect()
}

/// Radius of the ball sharing `I_m` with `Ω` (`m = −1`: volume).
pub fn matching_ball_radius(omega: &NearlySphericalSet, m: i64, grid: &QuadratureGrid) -> Result<f64> {
    let n = omega.n() as i64;
    if m < -1 || m >= n {
        return arg(format!("need −1 ≤ m < {n}, got {m}"));
    }
    let value = curvature_integral(omega, m, grid)?;
    ball_radius_for(omega.dim(), m, value)
}

fn ball_radius_for(dim: SphereDim, m: i64, value: f64) -> Result<f64> {
    if !(value > 0.0) {
        return geometry(format!("I_{m} = {value:e} is not positive"));
    }
    let n = dim.n() as i64;
    Ok((value / ball_quermass(dim, m, 1.0)).powf(1.0 / (n - m) as f64))
}

/// `δ_{k,m}(Ω) = I_k(Ω)/I_k(B_{Ω,m}) − 1`.
pub fn deficit(omega: &NearlySphericalSet, spec: DeficitSpec, grid: &QuadratureGrid) -> Result<f64> {
    let spec = DeficitSpec::new(omega.n(), spec.k, spec.m)?;
    let integrals = curvature_integrals(omega, grid)?;
    deficit_from_integrals(omega, spec, &integrals)
}

/// `δ_{k,m}` from precomputed `[I_0..I_n]`; volume is recomputed if needed.
pub fn deficit_from_integrals(omega: &NearlySphericalSet, spec: DeficitSpec, integrals: &[f64]) -> Result<f64> {
    let matched = if spec.m < 0 { volume(omega) } else { integrals[spec.m as usize] };
    let r = ball_radius_for(omega.dim(), spec.m, matched)?;
    Ok(integrals[spec.k] / ball_quermass(omega.dim(), spec.k as i64, r) - 1.0)
}

/// Scale factor `s` with `sΩ` normalized.
pub fn normalization_scale(omega: &NearlySphericalSet, mode: Normalization, grid: &QuadratureGrid) -> Result<f64> {
    let j = mode.index();
    if j >= omega.n() as i64 {
        return arg(format!("cannot normalize by I_{j} in dimension n = {}", omega.n()));
    }
    Ok(1.0 / matching_ball_radius(omega, j, grid)?)
}

/// Rescales `Ω` about the origin so the chosen functional equals the ball's.
pub fn normalize(omega: &NearlySphericalSet, mode: Normalization, grid: &QuadratureGrid) -> Result<NearlySphericalSet> {
    let s = normalization_scale(omega, mode, grid)?;
    let out = NearlySphericalSet::new(omega.u().radially_scaled(s))?;
    let j = mode.index();
    let achieved = curvature_integral(&out, j, grid)?;
    let target = ball_quermass(omega.dim(), j, 1.0);
    if (achieved - target).abs() > 1e-10 * target {
        return Err(Error::Accuracy(format!(
            "normalized functional I_{j} = {achieved} misses {target}"
        )));
    }
    Ok(out)
}

/// Sup norms on the scan grid.
pub fn sup_norms(omega: &NearlySphericalSet) -> SupNorms {
    omega.sup_norms()
}

/// `|Ω Δ B| = (1/(n+1)) ∫ |(1+u)^{n+1} − 1| dA` for the unit ball `B`.
pub fn symmetric_difference_with_ball(omega: &NearlySphericalSet, grid: &QuadratureGrid) -> f64 {
    let p = omega.ambient_dim() as i32;
    let vals: Vec<f64> = grid.evaluate(omega.u()).iter().map(|v| ((1.0 + v).powi(p) - 1.0).abs()).collect();
    grid.integrate(&vals) / p as f64
}

/// The term-wise bound `Σ_{k=1}^{n+1} (1/(n+1)) C(n+1,k) ∫ |u|^k dA`, which
/// equals the exact symmetric difference when `u` has one sign.
pub fn symmetric_difference_bound(omega: &NearlySphericalSet, grid: &QuadratureGrid) -> f64 {
    let n1 = omega.ambient_dim() as i64;
    let vals: Vec<f64> = grid
        .evaluate(omega.u())
        .iter()
        .map(|v| (1..=n1).map(|k| binomial(n1, k) * v.abs().powi(k as i32)).sum())
        .collect();
    grid.integrate(&vals) / n1 as f64
}

/// Radial function of `Ω − c`: the `t > 0` with `|tθ + c| = ρ(dir(tθ + c))`,
/// by safeguarded Newton on the bracket `[0.1, 3]`.
pub fn translated_radius(u: &SphericalFunction, c: &[f64], theta: &[f64]) -> Result<f64> {
    let m = u.dim().ambient_dim();
    let point = |t: f64| -> Vec<f64> { (0..m).map(|i| t * theta[i] + c[i]).collect() };
    let f = |t: f64| -> f64 {
        let q = point(t);
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        norm - (1.0 + u.value_at_direction(&q))
    };
    let (mut lo, mut hi) = (0.1, 3.0);
    let dot: f64 = (0..m).map(|i| theta[i] * c[i]).sum();
    let mut t = (1.0 + u.value_at_direction(theta) - dot).clamp(lo, hi);
    let h = 1e-7;
    for _ in 0..100 {
        let ft = f(t);
        if ft < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let slope = (f(t + h) - f(t - h)) / (2.0 * h);
        let mut next = t - ft / slope;
        if !(next > lo && next < hi) || !slope.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() < 1e-12 {
            return Ok(next);
        }
        t = next;
        if hi - lo < 1e-12 {
            return Ok(t);
        }
    }
    if hi >= 3.0 || lo <= 0.1 {
        return geometry("translated domain is not star-shaped about the new origin");
    }
    Err(Error::NoConvergence {
        what: "radial root find",
        iterations: 100,
        best_value: f(t),
        best_point: vec![t],
    })
}

/// `Ω − c` re-expressed as a radial graph and projected to degree
/// `max_degree`, with the L² residual of the projection.
pub fn translate(u: &SphericalFunction, c: &[f64], max_degree: usize) -> Result<(SphericalFunction, f64)> {
    let dim = u.dim();
    let grid = QuadratureGrid::new(dim, default_resolution(dim, max_degree))?;
    let radii: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|p| translated_radius(u, c, p.ambient()))
        .collect::<Result<_>>()?;
    let samples: Vec<f64> = radii.iter().map(|r| r - 1.0).collect();
    let projected = project(&samples, &grid, max_degree)?.function;
    let back = grid.evaluate(&projected);
    let resid: Vec<f64> = samples.iter().zip(&back).map(|(a, b)| (a - b) * (a - b)).collect();
    Ok((projected, grid.integrate(&resid).sqrt()))
}

/// Degree added when a translation is re-projected.
pub const TRANSLATION_DEGREE_INFLATION: usize = 4;

#[derive(Clone, Debug)]
pub struct Recentered {
    pub set: NearlySphericalSet,
    /// Total translation `c`; the result is `Ω − c`.
    pub shift: Vec<f64>,
    pub iterations: usize,
    /// L² residual of the last re-projection.
    pub residual: f64,
}

/// Translates `Ω` so its barycenter sits at the origin, by the fixed point
/// `c ← c + bar(Ω − c)`. Each step re-expresses the original domain, so
/// projection errors do not compound.
pub fn recenter(omega: &NearlySphericalSet, tol: f64) -> Result<Recentered> {
    const MAX_ITER: usize = 50;
    let u0 = omega.u();
    let target_degree = u0.max_degree() + TRANSLATION_DEGREE_INFLATION;
    let mut shift = vec![0.0; omega.ambient_dim()];
    let mut current = NearlySphericalSet::new(u0.with_max_degree(target_degree))?;
    let mut residual = 0.0;
    let mut bar_norm = f64::INFINITY;
    for iteration in 0..=MAX_ITER {
        let bar = barycenter(&current);
        bar_norm = bar.iter().map(|b| b * b).sum::<f64>().sqrt();
        if bar_norm < tol {
            return Ok(Recentered {
                set: current,
                shift,
                iterations: iteration,
                residual,
            });
        }
        if iteration == MAX_ITER {
            break;
        }
        for (s, b) in shift.iter_mut().zip(&bar) {
            *s += b;
        }
        let (u, r) = translate(u0, &shift, target_degree)?;
        current = NearlySphericalSet::new(u)?;
        residual = r;
    }
    Err(Error::NoConvergence {
        what: "recentering",
        iterations: MAX_ITER,
        best_value: bar_norm,
        best_point: shift,
    })
}

/// Radial function `u` of the ball of radius `r` centred at `c`, projected
/// to degree `max_degree`.
pub fn translated_ball(dim: SphereDim, c: &[f64], r: f64, max_degree: usize) -> Result<SphericalFunction> {
    let ball = SphericalFunction::constant(dim, 0, r - 1.0);
    let neg: Vec<f64> = c.iter().map(|x| -x).collect();
    Ok(translate(&ball, &neg, max_degree)?.0)
}

/// Chart point helper for callers working in ambient coordinates.
pub fn direction(dim: SphereDim, v: &[f64]) -> SpherePoint {
    SpherePoint::from_ambient(dim, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_set(rng: &mut ChaCha8Rng, dim: SphereDim, l: usize, size: f64) -> NearlySphericalSet {
        let coeffs: Vec<f64> = (0..dim.basis_len(l))
            .map(|i| if i == 0 { 0.0 } else { rng.random_range(-size..size) })
            .collect();
        NearlySphericalSet::new(SphericalFunction::new(dim, l, coeffs).unwrap()).unwrap()
    }

    fn dims() -> [SphereDim; 2] {
        [SphereDim::Circle, SphereDim::Sphere]
    }

    #[test]
    fn ball_values() {
        for dim in dims() {
            let b = NearlySphericalSet::ball(dim);
            let g = b.default_grid();
            let n = dim.n() as i64;
            let i = curvature_integrals(&b, &g).unwrap();
            for k in 0..=n {
                let expect = binomial(n, k) * dim.area();
                assert!((i[k as usize] - expect).abs() < 1e-12 * expect);
            }
            assert!((volume(&b) - dim.ball_volume()).abs() < 1e-13);
            assert!(barycenter(&b).iter().all(|x| x.abs() < 1e-15));
            for m in -1..n {
                assert!((matching_ball_radius(&b, m, &g).unwrap() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn round_spheres_have_zero_deficit() {
        for dim in dims() {
            let n = dim.n();
            for c in [-0.3, 0.2, 0.7] {
                let s = NearlySphericalSet::new(SphericalFunction::constant(dim, 2, c)).unwrap();
                let g = s.default_grid();
                assert!((volume(&s) - (1.0 + c).powi(n as i32 + 1) * dim.ball_volume()).abs() < 1e-12);
                for k in 0..=n {
                    for m in -1..k as i64 {
                        if m >= n as i64 {
                            continue;
                        }
                        assert!((matching_ball_radius(&s, m, &g).unwrap() - (1.0 + c)).abs() < 1e-12);
                        let d = deficit(&s, DeficitSpec::new(n, k, m).unwrap(), &g).unwrap();
                        assert!(d.abs() < 1e-12, "k={k} m={m} d={d}");
                    }
                }
                let v = normalize(&s, Normalization::Volume, &g).unwrap();
                assert!(v.u().coeffs().iter().all(|a| a.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn deficit_spec_validation() {
        assert!(DeficitSpec::new(2, 1, -1).is_ok());
        assert!(DeficitSpec::new(2, 1, 1).is_err());
        assert!(DeficitSpec::new(2, 3, 0).is_err());
        assert!(DeficitSpec::new(2, 1, -2).is_err());
    }

    // Uniform points in the ball of radius R; counts points inside Ω.
    fn monte_carlo_fraction(omega: &NearlySphericalSet, inside: impl Fn(&[f64], f64) -> bool + Sync, radius: f64, count: usize, seed: u64) -> f64 {
        let m = omega.ambient_dim();
        let chunks = 64;
        let per = count / chunks;
        let hits: usize = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed * 1000 + c as u64);
                let mut hits = 0;
                let mut drawn = 0;
                while drawn < per {
                    let x: Vec<f64> = (0..m).map(|_| rng.random_range(-radius..radius)).collect();
                    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if r >= radius || r == 0.0 {
                        continue;
                    }
                    drawn += 1;
                    if inside(&x, r) {
                        hits += 1;
                    }
                }
                hits
            })
            .sum();
        hits as f64 / (per * chunks) as f64
    }

    #[test]
    fn volume_matches_rejection_sampling() {
        let dim = SphereDim::Sphere;
        let u = SphericalFunction::from_terms(dim, 2, &[(2, 0, 0.1)]).unwrap();
        let omega = NearlySphericalSet::new(u.clone()).unwrap();
        let rmax = 1.0 + omega.sup_norms().value + 1e-3;
        let frac = monte_carlo_fraction(&omega, |x, r| r < 1.0 + u.value_at_direction(x), rmax, 10_000_000, 1);
        let mc = frac * 4.0 / 3.0 * PI * rmax.powi(3);
        assert!((mc - volume(&omega)).abs() < 1e-3 * mc, "{mc} {}", volume(&omega));
    }

    #[test]
    fn symmetric_difference_matches_rejection_sampling() {
        let dim = SphereDim::Sphere;
        let u = SphericalFunction::from_terms(dim, 2, &[(2, 1, 0.05)]).unwrap();
        let omega = NearlySphericalSet::new(u.clone()).unwrap();
        let rmax = 1.0 + omega.sup_norms().value + 1e-3;
        let frac = monte_carlo_fraction(&omega, |x, r| (r < 1.0 + u.value_at_direction(x)) != (r < 1.0), rmax, 10_000_000, 2);
        let mc = frac * 4.0 / 3.0 * PI * rmax.powi(3);
        let grid = QuadratureGrid::new(dim, 400).unwrap();
        let exact = symmetric_difference_with_ball(&omega, &grid);
        assert!((mc - exact).abs() < 1e-3 * exact, "{mc} {exact}");
        // the term-wise bound only dominates
        assert!(symmetric_difference_bound(&omega, &grid) >= exact);
    }

    #[test]
    fn gauss_bonnet() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for dim in dims() {
            let n = dim.n();
            for _ in 0..5 {
                let omega = random_set(&mut rng, dim, 6, 0.02);
                let g = QuadratureGrid::new(dim, 2 * default_resolution(dim, 6)).unwrap();
                let top = curvature_integral(&omega, n as i64, &g).unwrap();
                assert!((top - dim.area()).abs() < 1e-8, "n={n} {top}");
            }
        }
    }

    #[test]
    fn scaling_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for dim in dims() {
            let n = dim.n() as i64;
            let omega = random_set(&mut rng, dim, 5, 0.03);
            let g = omega.default_grid();
            let base = curvature_integrals(&omega, &g).unwrap();
            for r in [0.5, 2.0] {
                let scaled = NearlySphericalSet::new(omega.u().radially_scaled(r)).unwrap();
                let i = curvature_integrals(&scaled, &g).unwrap();
                for k in 0..=n {
                    let expect = r.powi((n - k) as i32) * base[k as usize];
                    assert!((i[k as usize] - expect).abs() < 1e-10 * expect.abs().max(1.0));
                }
                for k in 0..n as usize {
                    for m in -1..k as i64 {
                        let spec = DeficitSpec::new(n as usize, k, m).unwrap();
                        let d0 = deficit(&omega, spec, &g).unwrap();
                        let d1 = deficit(&scaled, spec, &g).unwrap();
                        assert!((d0 - d1).abs() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn matching_radius_by_root_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let dim = SphereDim::Sphere;
        let omega = random_set(&mut rng, dim, 4, 0.05);
        let g = omega.default_grid();
        let area = curvature_integral(&omega, 0, &g).unwrap();
        // bisection on r ↦ r²·4π − area
        let (mut lo, mut hi) = (0.5, 1.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid * 4.0 * PI < area {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((matching_ball_radius(&omega, 0, &g).unwrap() - lo).abs() < 1e-12);
    }

    #[test]
    fn normalization_hits_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for dim in dims() {
            let omega = random_set(&mut rng, dim, 5, 0.05);
            let g = omega.default_grid();
            let v = normalize(&omega, Normalization::Volume, &g).unwrap();
            assert!((volume(&v) - dim.ball_volume()).abs() < 1e-12);
            let a = normalize(&omega, Normalization::Quermass(0), &g).unwrap();
            assert!((curvature_integral(&a, 0, &g).unwrap() - dim.area()).abs() < 1e-9);
            assert!((normalization_scale(&a, Normalization::Quermass(0), &g).unwrap() - 1.0).abs() < 1e-12);
        }
        let b = NearlySphericalSet::ball(SphereDim::Sphere);
        assert!(normalize(&b, Normalization::Quermass(2), &b.default_grid()).is_err());
    }

    #[test]
    fn even_functions_are_centered() {
        let dim = SphereDim::Sphere;
        let u = SphericalFunction::from_terms(dim, 4, &[(2, 1, 0.1), (4, -3, 0.05), (2, 0, -0.07)]).unwrap();
        let b = barycenter(&NearlySphericalSet::new(u).unwrap());
        assert!(b.iter().all(|x| x.abs() < 1e-12), "{b:?}");
    }

    #[test]
    fn translated_ball_barycenter_and_recentering() {
        for dim in dims() {
            let mut c = vec![0.0; dim.ambient_dim()];
            c[0] = 0.05;
            let u = translated_ball(dim, &c, 1.0, 16).unwrap();
            let omega = NearlySphericalSet::new(u).unwrap();
            let bar = barycenter(&omega);
            assert!((bar[0] - 0.05).abs() < 1e-6 && bar[1..].iter().all(|x| x.abs() < 1e-6), "{bar:?}");
            let rec = recenter(&omega, 1e-9).unwrap();
            assert!(rec.set.sup_norms().value < 1e-6);
            assert!((rec.shift[0] - 0.05).abs() < 1e-6);
        }
    }

    #[test]
    fn recentering_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for dim in dims() {
            let omega = random_set(&mut rng, dim, 5, 0.03);
            let rec = recenter(&omega, 1e-9).unwrap();
            let bar = barycenter(&rec.set);
            assert!(bar.iter().map(|b| b * b).sum::<f64>().sqrt() < 1e-9);
            assert_eq!(rec.set.u().max_degree(), 5 + TRANSLATION_DEGREE_INFLATION);
            // translation leaves deficits unchanged up to projection error
            let g = QuadratureGrid::new(dim, default_resolution(dim, 9)).unwrap();
            let spec = DeficitSpec::new(dim.n(), 0, -1).unwrap();
            let d0 = deficit(&omega, spec, &g).unwrap();
            let d1 = deficit(&rec.set, spec, &g).unwrap();
            assert!((d0 - d1).abs() < 1e-6, "{d0} {d1}");
            // already centered: identity
            let again = recenter(&rec.set, 1e-9).unwrap();
            assert_eq!(again.iterations, 0);
        }
    }

    #[test]
    fn curvature_integral_resolution_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let omega = random_set(&mut rng, SphereDim::Sphere, 6, 0.003);
        let fine = QuadratureGrid::new(SphereDim::Sphere, 20).unwrap();
        assert!(curvature_integrals_checked(&omega, &fine).unwrap().iter().all(|c| !c.under_resolved()));
        let coarse = QuadratureGrid::new(SphereDim::Sphere, 5).unwrap();
        assert!(curvature_integrals_checked(&omega, &coarse).unwrap().iter().any(|c| c.under_resolved()));
    }
}
