use super::basis::{basis_values, evaluate_jet, JetSample, SphericalFunction};
use super::legendre::NormalizedLegendre;
use super::{SphereDim, SpherePoint};
use crate::error::{arg, Result};
use crate::symfunc::SymMatrix;
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2};

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes descending.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_count(x) and its derivative by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=count {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[count - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    (nodes, weights)
}

/// Quadrature nodes on `S^n` with positive weights summing to `Area(∂B)`.
///
/// Circle: `resolution` equispaced nodes (trapezoid rule, exact for
/// trigonometric polynomials of degree `< resolution`).
/// Sphere: `resolution` Gauss–Legendre nodes in `cos θ` times
/// `2·resolution` equispaced azimuths; exact for spherical polynomials of
/// degree `≤ 2·resolution − 1`. No node sits on a pole.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    dim: SphereDim,
    resolution: usize,
    nodes: Vec<SpherePoint>,
    weights: Vec<f64>,
}

pub fn make_grid(n: usize, resolution: usize) -> Result<QuadratureGrid> {
    QuadratureGrid::new(SphereDim::from_n(n)?, resolution)
}

impl QuadratureGrid {
    pub fn new(dim: SphereDim, resolution: usize) -> Result<Self> {
        if resolution < 4 {
            return arg(format!("grid resolution must be at least 4 (got {resolution})"));
        }
        let (nodes, weights) = match dim {
            SphereDim::Circle => {
                let w = 2.0 * PI / resolution as f64;
                let nodes = (0..resolution)
                    .map(|i| SpherePoint::circle(w * i as f64))
                    .collect();
                (nodes, vec![w; resolution])
            }
            SphereDim::Sphere => {
                let (xs, ws) = gauss_legendre(resolution);
                let n_phi = 2 * resolution;
                let dphi = 2.0 * PI / n_phi as f64;
                let mut nodes = Vec::with_capacity(resolution * n_phi);
                let mut weights = Vec::with_capacity(resolution * n_phi);
                for (x, w) in xs.iter().zip(&ws) {
                    let theta = x.clamp(-1.0, 1.0).acos();
                    for j in 0..n_phi {
                        nodes.push(SpherePoint::sphere(theta, dphi * (j as f64 + 0.5)));
                        weights.push(w * dphi);
                    }
                }
                (nodes, weights)
            }
        };
        Ok(QuadratureGrid {
            dim,
            resolution,
            nodes,
            weights,
        })
    }

    pub fn dim(&self) -> SphereDim {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn nodes(&self) -> &[SpherePoint] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn max_exact_degree(&self) -> usize {
        match self.dim {
            SphereDim::Circle => self.resolution - 1,
            SphereDim::Sphere => 2 * self.resolution - 1,
        }
    }

    /// Smallest resolution that integrates degree `degree` exactly.
    pub fn resolution_for_degree(dim: SphereDim, degree: usize) -> usize {
        let r = match dim {
            SphereDim::Circle => degree + 1,
            SphereDim::Sphere => degree / 2 + 1,
        };
        r.max(4)
    }

    /// The same family at twice the resolution.
    pub fn refined(&self) -> Self {
        Self::new(self.dim, 2 * self.resolution).expect("doubling keeps resolution valid")
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `Σ w_i f(node_i)`.
    pub fn integrate_fn(&self, f: impl Fn(&SpherePoint) -> f64 + Sync) -> f64 {
        self.nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(p, w)| w * f(p))
            .collect::<Vec<_>>()
            .iter()
            .sum()
    }

    pub fn evaluate(&self, f: &SphericalFunction) -> Vec<f64> {
        match self.dim {
            SphereDim::Circle => self.nodes.par_iter().map(|p| f.value_at(p)).collect(),
            SphereDim::Sphere => self.sphere_rows(f, |row, trig, out: &mut Vec<f64>| {
                for t in trig {
                    out.push(row.value(t));
                }
            }),
        }
    }

    pub fn jets(&self, f: &SphericalFunction) -> Result<Vec<JetSample>> {
        match self.dim {
            SphereDim::Circle => self.nodes.par_iter().map(|p| evaluate_jet(f, p)).collect(),
            SphereDim::Sphere => Ok(self.sphere_rows(f, |row, trig, out: &mut Vec<JetSample>| {
                for t in trig {
                    out.push(row.jet(t));
                }
            })),
        }
    }

    fn n_phi(&self) -> usize {
        2 * self.resolution
    }

    /// `(cos mφ_j, sin mφ_j)` for every azimuth column, `m ≤ max_degree`.
    fn azimuth_table(&self, max_degree: usize) -> Vec<Vec<(f64, f64)>> {
        self.nodes[..self.n_phi()]
            .iter()
            .map(|p| (0..=max_degree).map(|m| (m as f64 * p.phi).cos_sin()).collect())
            .collect()
    }

    // Sphere grids are a tensor product, so each θ row reduces to one
    // Fourier series in φ: O(L) work per node instead of O(L²).
    fn sphere_rows<T: Send>(
        &self,
        f: &SphericalFunction,
        emit: impl Fn(&RowSeries, &[Vec<(f64, f64)>], &mut Vec<T>) + Sync,
    ) -> Vec<T> {
        let l = f.max_degree();
        let trig = self.azimuth_table(l);
        let n_phi = self.n_phi();
        let rows: Vec<Vec<T>> = (0..self.resolution)
            .into_par_iter()
            .map(|i| {
                let row = RowSeries::new(f, &self.nodes[i * n_phi]);
                let mut out = Vec::with_capacity(n_phi);
                emit(&row, &trig, &mut out);
                out
            })
            .collect();
        rows.into_iter().flatten().collect()
    }
}

trait CosSin {
    fn cos_sin(self) -> (f64, f64);
}

impl CosSin for f64 {
    fn cos_sin(self) -> (f64, f64) {
        let (s, c) = self.sin_cos();
        (c, s)
    }
}

/// Fourier coefficients in φ (and their θ-derivatives) of `u` on one θ row.
struct RowSeries {
    sin_theta: f64,
    cot: f64,
    // per order m: [cos part, sin part] for value, ∂_θ, ∂²_θ
    c: Vec<[f64; 6]>,
}

impl RowSeries {
    fn new(f: &SphericalFunction, p: &SpherePoint) -> Self {
        let l_max = f.max_degree();
        let leg = NormalizedLegendre::with_derivatives(l_max, p.cos_theta, p.sin_theta);
        let a = f.coeffs();
        let mut c = vec![[0.0; 6]; l_max + 1];
        for l in 0..=l_max {
            let base = l * l + l;
            let (v, d, dd) = (leg.p(l, 0), leg.dp(l, 0), leg.d2p(l, 0));
            c[0][0] += a[base] * v;
            c[0][2] += a[base] * d;
            c[0][4] += a[base] * dd;
            for m in 1..=l {
                let (v, d, dd) = (SQRT_2 * leg.p(l, m), SQRT_2 * leg.dp(l, m), SQRT_2 * leg.d2p(l, m));
                let (ac, as_) = (a[base + m], a[base - m]);
                let e = &mut c[m];
                e[0] += ac * v;
                e[1] += as_ * v;
                e[2] += ac * d;
                e[3] += as_ * d;
                e[4] += ac * dd;
                e[5] += as_ * dd;
            }
        }
        RowSeries {
            sin_theta: p.sin_theta,
            cot: p.cos_theta / p.sin_theta,
            c,
        }
    }

    fn value(&self, trig: &[(f64, f64)]) -> f64 {
        self.c.iter().zip(trig).map(|(e, (cs, sn))| e[0] * cs + e[1] * sn).sum()
    }

    fn jet(&self, trig: &[(f64, f64)]) -> JetSample {
        let mut v = 0.0;
        let (mut ut, mut up, mut utt, mut utp, mut upp) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (m, (e, (cs, sn))) in self.c.iter().zip(trig).enumerate() {
            let mf = m as f64;
            v += e[0] * cs + e[1] * sn;
            ut += e[2] * cs + e[3] * sn;
            utt += e[4] * cs + e[5] * sn;
            up += mf * (e[1] * cs - e[0] * sn);
            utp += mf * (e[3] * cs - e[2] * sn);
            upp -= mf * mf * (e[0] * cs + e[1] * sn);
        }
        let s = self.sin_theta;
        let h12 = (utp - self.cot * up) / s;
        JetSample {
            value: v,
            grad: vec![ut, up / s],
            hess: SymMatrix::from_row_major(2, vec![utt, h12, h12, upp / (s * s) + self.cot * ut])
                .expect("2x2 entries"),
        }
    }
}

/// Result of an L² projection; `under_resolved` is set when the grid cannot
/// integrate degree-`2L` products exactly.
#[derive(Clone, Debug)]
pub struct Projection {
    pub function: SphericalFunction,
    pub under_resolved: bool,
}

/// `a_k = ∫ u Y_k dA` by quadrature of nodal samples.
pub fn project(samples: &[f64], grid: &QuadratureGrid, max_degree: usize) -> Result<Projection> {
    if samples.len() != grid.len() {
        return arg(format!("{} samples for a grid of {} nodes", samples.len(), grid.len()));
    }
    let dim = grid.dim();
    let coeffs = match dim {
        SphereDim::Circle => project_nodewise(samples, grid, max_degree),
        SphereDim::Sphere => project_rows(samples, grid, max_degree),
    };
    Ok(Projection {
        function: SphericalFunction::new(dim, max_degree, coeffs)?,
        under_resolved: 2 * max_degree > grid.max_exact_degree(),
    })
}

// Partial sums are produced in a fixed order and added sequentially so the
// result does not depend on thread scheduling.
fn project_nodewise(samples: &[f64], grid: &QuadratureGrid, max_degree: usize) -> Vec<f64> {
    let dim = grid.dim();
    let len = dim.basis_len(max_degree);
    let idx: Vec<usize> = (0..grid.len()).collect();
    let partials: Vec<Vec<f64>> = idx
        .par_chunks(256)
        .map(|chunk| {
            let mut acc = vec![0.0; len];
            for &i in chunk {
                let ws = grid.weights()[i] * samples[i];
                for (a, y) in acc.iter_mut().zip(basis_values(dim, max_degree, &grid.nodes()[i])) {
                    *a += ws * y;
                }
            }
            acc
        })
        .collect();
    sum_in_order(partials, len)
}

fn project_rows(samples: &[f64], grid: &QuadratureGrid, max_degree: usize) -> Vec<f64> {
    let len = grid.dim().basis_len(max_degree);
    let n_phi = grid.n_phi();
    let trig = grid.azimuth_table(max_degree);
    let partials: Vec<Vec<f64>> = (0..grid.resolution())
        .into_par_iter()
        .map(|i| {
            let row = &samples[i * n_phi..(i + 1) * n_phi];
            let p = &grid.nodes()[i * n_phi];
            let w = grid.weights()[i * n_phi];
            let mut fc = vec![0.0; max_degree + 1];
            let mut fs = vec![0.0; max_degree + 1];
            for (v, t) in row.iter().zip(&trig) {
                for m in 0..=max_degree {
                    fc[m] += v * t[m].0;
                    fs[m] += v * t[m].1;
                }
            }
            let leg = NormalizedLegendre::values(max_degree, p.cos_theta, p.sin_theta);
            let mut acc = vec![0.0; len];
            for l in 0..=max_degree {
                let base = l * l + l;
                acc[base] = w * leg.p(l, 0) * fc[0];
                for m in 1..=l {
                    let pl = w * SQRT_2 * leg.p(l, m);
                    acc[base + m] = pl * fc[m];
                    acc[base - m] = pl * fs[m];
                }
            }
            acc
        })
        .collect();
    sum_in_order(partials, len)
}

fn sum_in_order(partials: Vec<Vec<f64>>, len: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; len];
    for part in partials {
        for (a, b) in coeffs.iter_mut().zip(part) {
            *a += b;
        }
    }
    coeffs
}

impl SphericalFunction {
    /// `u ∘ R⁻¹` for a rotation matrix `R` of the ambient space, i.e. the
    /// function whose graph is the rotated surface. Exact: rotations
    /// preserve each degree.
    pub fn rotated(&self, rotation: &[[f64; 3]; 3]) -> Self {
        let dim = self.dim();
        let l = self.max_degree();
        let grid = QuadratureGrid::new(dim, QuadratureGrid::resolution_for_degree(dim, 2 * l) + 2)
            .expect("valid resolution");
        let m = dim.ambient_dim();
        let samples: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|p| {
                // R⁻¹ x = Rᵀ x
                let mut q = [0.0; 3];
                for (i, qi) in q.iter_mut().enumerate().take(m) {
                    *qi = (0..m).map(|j| rotation[j][i] * p.x[j]).sum();
                }
                self.value_at_direction(&q)
            })
            .collect();
        project(&samples, &grid, l).expect("grid matches samples").function
    }
}
