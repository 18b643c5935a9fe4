//! Fraenkel asymmetry of star-shaped domains.

use crate::error::{arg, geometry, Error, Result};
use crate::functionals::{barycenter, volume};
use crate::geometry::NearlySphericalSet;
use crate::optimize::{nelder_mead, Minimum, NelderMeadOptions};
use crate::sphere::QuadratureGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Competitor ball `x + B_r` containing the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslatedBall {
    center: Vec<f64>,
    radius: f64,
}

impl TranslatedBall {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return arg(format!("ball radius must be positive, got {radius}"));
        }
        let norm = center.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm < radius) {
            return arg(format!("|x| = {norm} must be below the radius {radius}"));
        }
        Ok(TranslatedBall { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Distance from the origin to `∂(x + B_r)` along the unit vector `direction`:
/// `x·θ + √(r² − |x|² + (x·θ)²)`.
pub fn ball_radial(ball: &TranslatedBall, direction: &[f64]) -> f64 {
    radial(&ball.center, ball.radius, direction)
}

#[inline]
fn radial(x: &[f64], r: f64, theta: &[f64]) -> f64 {
    let mut xt = 0.0;
    let mut xx = 0.0;
    for (a, b) in x.iter().zip(theta) {
        xt += a * b;
        xx += a * a;
    }
    xt + (r * r - xx + xt * xt).sqrt()
}

/// `(1/(n+1)) ∫ |ρ₁^{n+1} − ρ₂^{n+1}| dA`: the volume of the symmetric
/// difference of two domains star-shaped about the origin, given their
/// radial functions at the grid nodes.
pub fn symdiff_radial(rho1: &[f64], rho2: &[f64], grid: &QuadratureGrid) -> Result<f64> {
    if rho1.len() != grid.len() || rho2.len() != grid.len() {
        return arg("radial samples must match the grid");
    }
    if rho1.iter().chain(rho2).any(|r| !(*r > 0.0)) {
        return geometry("radial functions must be positive");
    }
    let p = grid.dim().ambient_dim() as i32;
    let vals: Vec<f64> = rho1.iter().zip(rho2).map(|(a, b)| (a.powi(p) - b.powi(p)).abs()).collect();
    Ok(grid.integrate(&vals) / p as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryOptions {
    pub simplex: NelderMeadOptions,
    /// Centers are searched in `|x| < search_fraction · r`.
    pub search_fraction: f64,
    /// Seed of the random restart.
    pub seed: u64,
}

impl Default for AsymmetryOptions {
    fn default() -> Self {
        AsymmetryOptions {
            simplex: NelderMeadOptions {
                initial_step: 0.02,
                tolerance: 1e-10,
                max_evaluations: 10_000,
            },
            search_fraction: 0.9,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Asymmetry {
    pub alpha: f64,
    /// Optimal translation of the competitor ball.
    pub center: Vec<f64>,
    /// Radius of the equal-volume ball.
    pub radius: f64,
    pub evaluations: usize,
}

/// `|Ω Δ B_Ω| / |B_Ω|` for the equal-volume ball centred at the origin.
pub fn centered_asymmetry(omega: &NearlySphericalSet, grid: &QuadratureGrid) -> Result<f64> {
    let objective = Objective::new(omega, grid)?;
    Ok(objective.eval(&vec![0.0; omega.ambient_dim()]))
}

struct Objective {
    rho_pow: Vec<f64>,
    directions: Vec<[f64; 3]>,
    weights: Vec<f64>,
    dim: usize,
    radius: f64,
    limit: f64,
    scale: f64,
}

impl Objective {
    fn new(omega: &NearlySphericalSet, grid: &QuadratureGrid) -> Result<Self> {
        if grid.dim() != omega.dim() {
            return arg("grid and domain live on different spheres");
        }
        let dim = omega.ambient_dim();
        let p = dim as i32;
        let vol = volume(omega);
        let radius = (vol / omega.dim().ball_volume()).powf(1.0 / dim as f64);
        let rho_pow = grid.evaluate(omega.u()).iter().map(|v| (1.0 + v).powi(p)).collect();
        Ok(Objective {
            rho_pow,
            directions: grid.nodes().iter().map(|p| p.x).collect(),
            weights: grid.weights().to_vec(),
            dim,
            radius,
            limit: f64::INFINITY,
            // 1/((n+1)|B_Ω|) with |B_Ω| = |Ω|
            scale: 1.0 / (dim as f64 * vol),
        })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let p = self.dim as i32;
        let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        // outside the search region: value at the boundary plus a slope
        let (x, penalty) = if norm > self.limit {
            let s = self.limit / norm;
            (x.iter().map(|c| c * s).collect::<Vec<_>>(), 10.0 * (norm - self.limit))
        } else {
            (x.to_vec(), 0.0)
        };
        let mut total = 0.0;
        for ((rp, d), w) in self.rho_pow.iter().zip(&self.directions).zip(&self.weights) {
            let t = radial(&x, self.radius, &d[..self.dim]);
            total += w * (rp - t.powi(p)).abs();
        }
        total * self.scale + penalty
    }
}

/// `α(Ω) = inf_x |Ω Δ (x + B_Ω)| / |B_Ω|` by multi-start Nelder–Mead from
/// the origin, the barycenter and one seeded random point.
pub fn fraenkel_asymmetry(omega: &NearlySphericalSet, grid: &QuadratureGrid, opts: &AsymmetryOptions) -> Result<Asymmetry> {
    let mut objective = Objective::new(omega, grid)?;
    objective.limit = opts.search_fraction * objective.radius;
    let dim = objective.dim;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.05..0.05) * objective.radius).collect();
    let bar = barycenter(omega);
    let starts = [vec![0.0; dim], bar, random];

    let mut best: Option<Minimum> = None;
    let mut evaluations = 0;
    for start in &starts {
        let m = nelder_mead(|x| objective.eval(x), start, &opts.simplex);
        evaluations += m.evaluations;
        if !m.converged {
            return Err(Error::NoConvergence {
                what: "Fraenkel asymmetry search",
                iterations: m.evaluations,
                best_value: m.value,
                best_point: m.point,
            });
        }
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let best = best.expect("at least one start");
    Ok(Asymmetry {
        alpha: best.value,
        center: best.point,
        radius: objective.radius,
        evaluations,
    })
}
