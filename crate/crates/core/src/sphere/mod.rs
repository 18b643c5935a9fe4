//! Band-limited functions on S¹ and S² with analytic covariant derivatives,
//! quadrature grids and L² projection.

mod basis;
mod legendre;
mod quadrature;

pub use basis::{
    basis_index, degree_order, evaluate_jet, harmonic_eigenvalue, BasisJet, JetSample,
    SphericalFunction,
};
pub use legendre::NormalizedLegendre;
pub use quadrature::{gauss_legendre, make_grid, project, Projection, QuadratureGrid};

use crate::error::{arg, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which sphere `S^n` a function lives on. Only `n ∈ {1, 2}` carry a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SphereDim {
    /// `S¹ ⊂ R²`, Fourier basis.
    Circle,
    /// `S² ⊂ R³`, real spherical harmonics.
    Sphere,
}

impl SphereDim {
    pub fn from_n(n: usize) -> Result<Self> {
        match n {
            1 => Ok(SphereDim::Circle),
            2 => Ok(SphereDim::Sphere),
            _ => arg(format!("only n = 1 and n = 2 have a basis (got n = {n})")),
        }
    }

    pub fn n(self) -> usize {
        match self {
            SphereDim::Circle => 1,
            SphereDim::Sphere => 2,
        }
    }

    pub fn ambient_dim(self) -> usize {
        self.n() + 1
    }

    /// `Area(∂B)`.
    pub fn area(self) -> f64 {
        match self {
            SphereDim::Circle => 2.0 * PI,
            SphereDim::Sphere => 4.0 * PI,
        }
    }

    /// `|B| = Area(∂B)/(n+1)`.
    pub fn ball_volume(self) -> f64 {
        self.area() / self.ambient_dim() as f64
    }

    /// Number of basis functions of degree at most `max_degree`.
    pub fn basis_len(self, max_degree: usize) -> usize {
        match self {
            SphereDim::Circle => 2 * max_degree + 1,
            SphereDim::Sphere => (max_degree + 1) * (max_degree + 1),
        }
    }
}

/// A point of `S^n` with chart coordinates, its ambient position and an
/// orthonormal tangent frame.
///
/// Circle: `x = (cos θ, sin θ)`, frame `e_θ`.
/// Sphere: `x = (sin θ cos φ, sin θ sin φ, cos θ)` with θ the polar angle,
/// frame `(e_θ, e_φ / sin θ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    pub dim: SphereDim,
    pub theta: f64,
    pub phi: f64,
    pub sin_theta: f64,
    pub cos_theta: f64,
    /// Ambient unit vector; the third component is 0 on the circle.
    pub x: [f64; 3],
    /// Orthonormal tangent frame in ambient coordinates; only `frame[0]`
    /// is meaningful on the circle.
    pub frame: [[f64; 3]; 2],
}

impl SpherePoint {
    pub fn circle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        SpherePoint {
            dim: SphereDim::Circle,
            theta,
            phi: 0.0,
            sin_theta: s,
            cos_theta: c,
            x: [c, s, 0.0],
            frame: [[-s, c, 0.0], [0.0; 3]],
        }
    }

    pub fn sphere(theta: f64, phi: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        SpherePoint {
            dim: SphereDim::Sphere,
            theta,
            phi,
            sin_theta: s,
            cos_theta: c,
            x: [s * cp, s * sp, c],
            frame: [[c * cp, c * sp, -s], [-sp, cp, 0.0]],
        }
    }

    pub fn new(dim: SphereDim, chart: &[f64]) -> Self {
        match dim {
            SphereDim::Circle => Self::circle(chart[0]),
            SphereDim::Sphere => Self::sphere(chart[0], chart[1]),
        }
    }

    /// Direction of a nonzero ambient vector (extra components ignored).
    pub fn from_ambient(dim: SphereDim, v: &[f64]) -> Self {
        match dim {
            SphereDim::Circle => Self::circle(v[1].atan2(v[0])),
            SphereDim::Sphere => {
                let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
                Self::sphere(theta, v[1].atan2(v[0]))
            }
        }
    }

    /// The first `n + 1` ambient components.
    pub fn ambient(&self) -> &[f64] {
        &self.x[..self.dim.ambient_dim()]
    }

    /// Maps frame components of a tangent vector to ambient coordinates.
    pub fn tangent_to_ambient(&self, v: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, vi) in v.iter().enumerate().take(self.dim.n()) {
            for (o, f) in out.iter_mut().zip(self.frame[i]) {
                *o += vi * f;
            }
        }
        out
    }
}
