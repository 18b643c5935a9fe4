//! Pointwise extrinsic geometry of a radial graph `M = {(1+u(x))x : x ∈ S^n}`.
//!
//! Every tensor is written in the orthonormal frame of the base sphere, so
//! the round metric is the identity and indices move freely.

use crate::error::{arg, geometry, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::sphere::{evaluate_jet, JetSample, QuadratureGrid, SphereDim, SpherePoint, SphericalFunction};
use crate::symfunc::{all_sigmas, binomial, cholesky, lower_triangular_inverse, newton_tensors, symmetric_eigenvalues, SymMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Radial graphs with `1 + u` below this anywhere are rejected.
pub const MIN_RADIUS: f64 = 0.05;

/// Default quadrature resolution for a function of degree `max_degree`.
pub fn default_resolution(dim: SphereDim, max_degree: usize) -> usize {
    match dim {
        SphereDim::Circle => 8 * max_degree + 32,
        SphereDim::Sphere => 2 * max_degree + 8,
    }
}

/// Scan grids for sup norms use this multiple of the default resolution.
pub const SCAN_FACTOR: usize = 4;

/// `(‖u‖_∞, ‖∇u‖_∞, ‖D²u‖_∞)` with the Hessian measured in spectral norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SupNorms {
    pub value: f64,
    pub gradient: f64,
    pub hessian: f64,
}

impl SupNorms {
    pub fn w1(&self) -> f64 {
        self.value.max(self.gradient)
    }

    pub fn w2(&self) -> f64 {
        self.w1().max(self.hessian)
    }

    /// Maxima over a scan grid of the given resolution, each polished by a
    /// local simplex search started from the best few scan nodes.
    ///
    /// The result is a lower bound on the true supremum; polishing only
    /// moves it up.
    pub fn scan(u: &SphericalFunction, resolution: usize) -> Result<Self> {
        let dim = u.dim();
        let grid = QuadratureGrid::new(dim, resolution)?;
        let jets = grid.jets(u)?;
        let quantities: [fn(&JetSample) -> f64; 3] = [|j| j.value.abs(), |j| j.grad_norm_sq().sqrt(), hessian_norm];
        let step = PI / resolution as f64;
        let mut out = [0.0; 3];
        for (q, best) in quantities.iter().zip(out.iter_mut()) {
            let mut ranked: Vec<(f64, usize)> = jets.iter().enumerate().map(|(i, j)| (q(j), i)).collect();
            ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            *best = ranked[0].0;
            for &(_, i) in ranked.iter().take(3) {
                let p = grid.nodes()[i];
                let polished = polish_max(u, &p, *q, step);
                *best = best.max(polished);
            }
        }
        Ok(SupNorms {
            value: out[0],
            gradient: out[1],
            hessian: out[2],
        })
    }
}

fn hessian_norm(j: &JetSample) -> f64 {
    let h = &j.hess;
    match h.dim() {
        1 => h[(0, 0)].abs(),
        _ => {
            let mean = 0.5 * (h[(0, 0)] + h[(1, 1)]);
            let half = 0.5 * (h[(0, 0)] - h[(1, 1)]);
            mean.abs() + (half * half + h[(0, 1)] * h[(1, 0)]).max(0.0).sqrt()
        }
    }
}

fn polish_max(u: &SphericalFunction, start: &SpherePoint, q: fn(&JetSample) -> f64, step: f64) -> f64 {
    let dim = u.dim();
    let chart: Vec<f64> = match dim {
        SphereDim::Circle => vec![start.theta],
        SphereDim::Sphere => vec![start.theta, start.phi],
    };
    let objective = |x: &[f64]| {
        if dim == SphereDim::Sphere && !(1e-6..PI - 1e-6).contains(&x[0]) {
            return f64::INFINITY;
        }
        match evaluate_jet(u, &SpherePoint::new(dim, x)) {
            Ok(j) => -q(&j),
            Err(_) => f64::INFINITY,
        }
    };
    let opts = NelderMeadOptions {
        initial_step: 0.5 * step,
        tolerance: 1e-9,
        max_evaluations: 400,
    };
    -nelder_mead(objective, &chart, &opts).value
}

/// A nearly spherical domain: the region bounded by the radial graph of `u`.
#[derive(Clone, Debug)]
pub struct NearlySphericalSet {
    u: SphericalFunction,
    min_radius: f64,
    norms: OnceLock<SupNorms>,
}

impl NearlySphericalSet {
    /// Validates `1 + u ≥ MIN_RADIUS` on the scan grid.
    pub fn new(u: SphericalFunction) -> Result<Self> {
        let grid = QuadratureGrid::new(u.dim(), Self::scan_resolution(&u))?;
        let min_radius = grid.evaluate(&u).iter().fold(f64::INFINITY, |m, v| m.min(1.0 + v));
        if min_radius < MIN_RADIUS {
            return geometry(format!("radial function 1 + u reaches {min_radius:.3e}; not a valid nearly spherical set"));
        }
        Ok(NearlySphericalSet {
            u,
            min_radius,
            norms: OnceLock::new(),
        })
    }

    /// The unit ball.
    pub fn ball(dim: SphereDim) -> Self {
        Self::new(SphericalFunction::zero(dim, 0)).expect("unit sphere is valid")
    }

    fn scan_resolution(u: &SphericalFunction) -> usize {
        SCAN_FACTOR * default_resolution(u.dim(), u.max_degree())
    }

    pub fn u(&self) -> &SphericalFunction {
        &self.u
    }

    pub fn into_u(self) -> SphericalFunction {
        self.u
    }

    pub fn dim(&self) -> SphereDim {
        self.u.dim()
    }

    /// Dimension `n` of the boundary hypersurface.
    pub fn n(&self) -> usize {
        self.u.dim().n()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n() + 1
    }

    /// Smallest `1 + u` seen on the scan grid.
    pub fn min_radius(&self) -> f64 {
        self.min_radius
    }

    /// Quadrature grid suited to `u`'s degree.
    pub fn default_grid(&self) -> QuadratureGrid {
        QuadratureGrid::new(self.dim(), default_resolution(self.dim(), self.u.max_degree())).expect("valid resolution")
    }

    /// Cached sup norms on the scan grid.
    pub fn sup_norms(&self) -> SupNorms {
        *self
            .norms
            .get_or_init(|| SupNorms::scan(&self.u, Self::scan_resolution(&self.u)).expect("scan grid avoids the poles"))
    }
}

/// Per-node geometric data of `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSample {
    pub jet: JetSample,
    /// `D = √(|∇u|² + (1+u)²)`.
    pub d: f64,
    /// Shape operator `h^i_j`.
    pub shape: SymMatrix,
    /// `σ_0..σ_n` of the shape operator.
    pub sigma: Vec<f64>,
    pub area_density: f64,
}

impl CurvatureSample {
    pub fn new(jet: JetSample) -> Result<Self> {
        let shape = shape_operator(&jet)?;
        let sigma = sigmas_closed(&jet)?;
        let area_density = area_element(&jet)?;
        Ok(CurvatureSample {
            d: d_factor(&jet),
            jet,
            shape,
            sigma,
            area_density,
        })
    }
}

fn radius(jet: &JetSample) -> Result<f64> {
    let r = 1.0 + jet.value;
    if !(r >= MIN_RADIUS) {
        return geometry(format!("1 + u = {r:.3e} is below {MIN_RADIUS}"));
    }
    Ok(r)
}

fn d_factor(jet: &JetSample) -> f64 {
    let r = 1.0 + jet.value;
    (jet.grad_norm_sq() + r * r).sqrt()
}

/// Shape operator
/// `h^i_j = δ^i_j/D − u^i_j/((1+u)D) + u^i u_l u^l_j/((1+u)D³) + u^i u_j/D³`.
pub fn shape_operator(jet: &JetSample) -> Result<SymMatrix> {
    let r = radius(jet)?;
    let n = jet.n();
    let d = d_factor(jet);
    let d3 = d * d * d;
    let g = &jet.grad;
    let hg = jet.hess.apply(g);
    let mut out = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            out[(i, j)] = delta / d - jet.hess[(i, j)] / (r * d) + g[i] * hg[j] / (r * d3) + g[i] * g[j] / d3;
        }
    }
    Ok(out)
}

/// `σ_k` of the shape operator from the closed form in `u`, `∇u`, `D²u`:
///
/// `D^{−(k+2)} Σ_{m≤k} (−1)^m C(n−m,k−m) (1+u)^{−m}
///   [(1+u)² σ_m(D²u) + (n+k−2m)/(n−m) · u^i u_j [T_m]^j_i(D²u)]`,
///
/// where the second bracket term is absent for `m = n`.
pub fn sigma_k_closed(jet: &JetSample, k: usize) -> Result<f64> {
    if k > jet.n() {
        return arg(format!("k = {k} exceeds n = {}", jet.n()));
    }
    Ok(sigmas_closed(jet)?[k])
}

/// All of `σ_0..σ_n` by the closed form.
pub fn sigmas_closed(jet: &JetSample) -> Result<Vec<f64>> {
    let r = radius(jet)?;
    let n = jet.n();
    let d = d_factor(jet);
    let sig = all_sigmas(&jet.hess);
    let tg: Vec<f64> = newton_tensors(&jet.hess)
        .iter()
        .map(|t| t.bilinear(&jet.grad, &jet.grad))
        .collect();
    let ni = n as i64;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let ki = k as i64;
        let mut s = 0.0;
        for m in 0..=k {
            let mi = m as i64;
            let mut bracket = r * r * sig[m];
            if m < n {
                bracket += (ni + ki - 2 * mi) as f64 / (ni - mi) as f64 * tg[m];
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binomial(ni - mi, ki - mi) * r.powi(-(m as i32)) * bracket;
        }
        out.push(s * d.powi(-(k as i32 + 2)));
    }
    Ok(out)
}

/// Principal curvatures from the symmetric pair `(h_ij, g_ij)`:
/// `g_ij = (1+u)² δ_ij + u_i u_j`,
/// `h_ij = (2u_i u_j + (1+u)² δ_ij − (1+u) u_ij)/D`,
/// solved as a whitened symmetric eigenproblem. Ascending.
pub fn principal_curvatures(jet: &JetSample) -> Result<Vec<f64>> {
    let r = radius(jet)?;
    let n = jet.n();
    let d = d_factor(jet);
    let u = &jet.grad;
    let mut g = SymMatrix::zeros(n);
    let mut h = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            g[(i, j)] = r * r * delta + u[i] * u[j];
            h[(i, j)] = (2.0 * u[i] * u[j] + r * r * delta - r * jet.hess[(i, j)]) / d;
        }
    }
    let linv = lower_triangular_inverse(&cholesky(&g)?);
    let whitened = &(&linv * &h) * &linv.transpose();
    // symmetrize away rounding before Jacobi
    let sym = (&whitened + &whitened.transpose()).scale(0.5);
    symmetric_eigenvalues(&sym)
}

/// `√det g = (1+u)^n √(1 + |∇u|²/(1+u)²)`.
pub fn area_element(jet: &JetSample) -> Result<f64> {
    let r = radius(jet)?;
    Ok(r.powi(jet.n() as i32) * (1.0 + jet.grad_norm_sq() / (r * r)).sqrt())
}

/// Outward unit normal `(−u_i e_i + (1+u) x)/D` in ambient coordinates.
pub fn outward_normal(jet: &JetSample, node: &SpherePoint) -> Result<[f64; 3]> {
    let r = radius(jet)?;
    let d = d_factor(jet);
    let t = node.tangent_to_ambient(&jet.grad);
    let mut out = [0.0; 3];
    for (o, (ti, xi)) in out.iter_mut().zip(t.iter().zip(&node.x)) {
        *o = (r * xi - ti) / d;
    }
    Ok(out)
}

/// Curvature samples at every node of a grid.
pub fn curvature_samples(u: &SphericalFunction, grid: &QuadratureGrid) -> Result<Vec<CurvatureSample>> {
    grid.jets(u)?.into_par_iter().map(CurvatureSample::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::all_sigmas_of_eigenvalues;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_jet(rng: &mut ChaCha8Rng, n: usize, size: f64) -> JetSample {
        let mut hess = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-size..size);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        JetSample {
            value: rng.random_range(-size..size),
            grad: (0..n).map(|_| rng.random_range(-size..size)).collect(),
            hess,
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn unit_sphere() {
        for n in [1usize, 2] {
            let jet = JetSample::constant(n, 0.0);
            assert_eq!(shape_operator(&jet).unwrap(), SymMatrix::identity(n));
            for k in 0..=n {
                assert_eq!(sigma_k_closed(&jet, k).unwrap(), binomial(n as i64, k as i64));
            }
            assert_eq!(area_element(&jet).unwrap(), 1.0);
            let p = SpherePoint::new(SphereDim::from_n(n).unwrap(), &[0.8, 1.9]);
            assert_eq!(outward_normal(&jet, &p).unwrap(), p.x);
            assert!(sigma_k_closed(&jet, n + 1).is_err());
        }
    }

    #[test]
    fn round_spheres_scale() {
        for n in [1usize, 2] {
            for c in [-0.4, -0.1, 0.25, 1.5] {
                let jet = JetSample::constant(n, c);
                let s = shape_operator(&jet).unwrap();
                assert!((&s - &SymMatrix::scaled_identity(n, 1.0 / (1.0 + c))).max_abs() < 1e-15);
                for k in 0..=n {
                    let v = sigma_k_closed(&jet, k).unwrap() * (1.0 + c).powi(k as i32);
                    assert!(close(v, binomial(n as i64, k as i64), 1e-14));
                }
                assert!(close(area_element(&jet).unwrap(), (1.0 + c).powi(n as i32), 1e-15));
            }
        }
    }

    #[test]
    fn collapsed_radius_is_rejected() {
        let jet = JetSample::constant(2, -0.97);
        assert!(shape_operator(&jet).is_err());
        assert!(sigmas_closed(&jet).is_err());
        let u = SphericalFunction::constant(SphereDim::Sphere, 2, -0.99);
        assert!(NearlySphericalSet::new(u).is_err());
    }

    #[test]
    fn closed_form_matches_both_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..2000 {
            let n = 1 + trial % 2;
            let jet = random_jet(&mut rng, n, 0.3);
            let closed = sigmas_closed(&jet).unwrap();
            let via_shape = all_sigmas(&shape_operator(&jet).unwrap());
            let kappa = principal_curvatures(&jet).unwrap();
            let via_pair = all_sigmas_of_eigenvalues(&kappa);
            for k in 0..=n {
                assert!(close(closed[k], via_shape[k], 1e-12), "{jet:?} k={k}");
                assert!(close(closed[k], via_pair[k], 1e-10), "{jet:?} k={k}");
            }
        }
    }

    #[test]
    fn shape_operator_spectrum_is_principal_curvatures() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let jet = random_jet(&mut rng, 2, 0.3);
            let s = shape_operator(&jet).unwrap();
            let tr = s.trace();
            let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
            let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
            let eig = [0.5 * tr - disc, 0.5 * tr + disc];
            let kappa = principal_curvatures(&jet).unwrap();
            for (a, b) in eig.iter().zip(&kappa) {
                // a double root loses half the digits in the discriminant
                assert!((a - b).abs() < 1e-10_f64.max(1e-6 * disc.min(1e-2)), "{eig:?} {kappa:?}");
            }
        }
    }

    #[test]
    fn mean_curvature_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..500 {
            let n = 1 + trial % 2;
            let jet = random_jet(&mut rng, n, 0.3);
            let r = 1.0 + jet.value;
            let d = d_factor(&jet);
            let g2 = jet.grad_norm_sq();
            let ghg = jet.hess.bilinear(&jet.grad, &jet.grad);
            let expect = -jet.laplacian() / (d * r) + n as f64 / d + ghg / (d * d * d * r) + g2 / (d * d * d);
            assert!(close(sigma_k_closed(&jet, 1).unwrap(), expect, 1e-13));
        }
    }

    #[test]
    fn normal_is_unit_and_orthogonal_to_tangents() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..300 {
            let n = 1 + trial % 2;
            let dim = SphereDim::from_n(n).unwrap();
            let jet = random_jet(&mut rng, n, 0.3);
            let p = SpherePoint::new(dim, &[rng.random_range(0.1..3.0), rng.random_range(0.0..6.2)]);
            let nu = outward_normal(&jet, &p).unwrap();
            let dot = |a: &[f64; 3], b: &[f64; 3]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            assert!((dot(&nu, &nu) - 1.0).abs() < 1e-12);
            assert!(dot(&nu, &p.x) > 0.0);
            let r = 1.0 + jet.value;
            for i in 0..n {
                let e: Vec<f64> = (0..3).map(|c| r * p.frame[i][c] + jet.grad[i] * p.x[c]).collect();
                let e = [e[0], e[1], e[2]];
                assert!(dot(&nu, &e).abs() < 1e-12);
            }
        }
    }

    fn random_function(rng: &mut ChaCha8Rng, dim: SphereDim, l: usize, size: f64) -> SphericalFunction {
        let coeffs: Vec<f64> = (0..dim.basis_len(l)).map(|_| rng.random_range(-size..size)).collect();
        SphericalFunction::new(dim, l, coeffs).unwrap()
    }

    // 4th-order central differences of the embedding X = (1+u)x in chart
    // coordinates; surface measure |X_θ × X_φ| dθ dφ.
    fn embedded_area(u: &SphericalFunction, resolution: usize) -> f64 {
        let h = 1e-3;
        let embed = |c: &[f64]| -> [f64; 3] {
            let p = SpherePoint::new(u.dim(), c);
            let r = 1.0 + u.value_at(&p);
            [r * p.x[0], r * p.x[1], r * p.x[2]]
        };
        let partial = |c: &[f64], axis: usize| -> [f64; 3] {
            let at = |t: f64| {
                let mut q = c.to_vec();
                q[axis] += t;
                embed(&q)
            };
            let (a, b, cc, d) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
            let mut out = [0.0; 3];
            for i in 0..3 {
                out[i] = (-a[i] + 8.0 * b[i] - 8.0 * cc[i] + d[i]) / (12.0 * h);
            }
            out
        };
        match u.dim() {
            SphereDim::Circle => {
                let w = 2.0 * PI / resolution as f64;
                (0..resolution)
                    .map(|i| {
                        let t = partial(&[w * i as f64], 0);
                        w * (t[0] * t[0] + t[1] * t[1]).sqrt()
                    })
                    .sum()
            }
            SphereDim::Sphere => {
                let (xs, ws) = crate::sphere::gauss_legendre(resolution);
                let n_phi = 2 * resolution;
                let dphi = 2.0 * PI / n_phi as f64;
                let mut total = 0.0;
                for (x, w) in xs.iter().zip(&ws) {
                    let theta = x.acos();
                    for j in 0..n_phi {
                        let c = [theta, dphi * j as f64];
                        let a = partial(&c, 0);
                        let b = partial(&c, 1);
                        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
                        let norm = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
                        // dθ = dx / sin θ
                        total += w * dphi * norm / theta.sin();
                    }
                }
                total
            }
        }
    }

    #[test]
    fn area_element_matches_embedding_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (n, l) in [(1usize, 6usize), (2, 4)] {
            let dim = SphereDim::from_n(n).unwrap();
            for _ in 0..3 {
                let u = random_function(&mut rng, dim, l, 0.03);
                let grid = QuadratureGrid::new(dim, 4 * default_resolution(dim, l)).unwrap();
                let jets = grid.jets(&u).unwrap();
                let area = grid.integrate(&jets.iter().map(|j| area_element(j).unwrap()).collect::<Vec<_>>());
                let oracle = embedded_area(&u, 4 * default_resolution(dim, l));
                assert!(close(area, oracle, 1e-8), "n={n} {area} {oracle}");
            }
        }
    }

    #[test]
    fn sup_norms_of_simple_functions() {
        let dim = SphereDim::Sphere;
        let c = NearlySphericalSet::new(SphericalFunction::constant(dim, 3, -0.2)).unwrap();
        let s = c.sup_norms();
        assert!((s.value - 0.2).abs() < 1e-14 && s.gradient < 1e-14 && s.hessian < 1e-14);

        // degree-1 harmonics have D²u = −u·I, so both sups coincide
        let y1 = SphericalFunction::from_terms(dim, 1, &[(1, 1, 0.1), (1, 0, -0.05)]).unwrap();
        let s = NearlySphericalSet::new(y1).unwrap().sup_norms();
        assert!((s.hessian - s.value).abs() < 1e-9);
        let exact = 0.1f64.hypot(0.05) * (3.0 / (4.0 * PI)).sqrt();
        assert!((s.value - exact).abs() < 1e-9);
    }

    #[test]
    fn sup_norms_converge_under_scan_refinement() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (n, l) in [(1usize, 8usize), (2, 6), (2, 8)] {
            let dim = SphereDim::from_n(n).unwrap();
            let u = random_function(&mut rng, dim, l, 0.05);
            let res = SCAN_FACTOR * default_resolution(dim, l);
            let a = SupNorms::scan(&u, res).unwrap();
            let b = SupNorms::scan(&u, 2 * res).unwrap();
            assert!((a.value - b.value).abs() < 1e-4);
            assert!((a.gradient - b.gradient).abs() < 1e-4);
            assert!((a.hessian - b.hessian).abs() < 1e-4);
        }
    }
}
