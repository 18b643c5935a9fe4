use super::legendre::NormalizedLegendre;
use super::{SphereDim, SpherePoint};
use crate::error::{arg, Error, Result};
use crate::symfunc::SymMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Laplace–Beltrami eigenvalue of degree-ℓ harmonics on `S^n`: `−ℓ(ℓ+n−1)`.
pub fn harmonic_eigenvalue(ell: usize, n: usize) -> f64 {
    let l = ell as f64;
    -l * (l + n as f64 - 1.0)
}

/// Position of basis function `(degree, order)` in a coefficient vector.
///
/// Orders run over `−ℓ..=ℓ` on the sphere; positive orders are `cos(mφ)`
/// harmonics and negative orders `sin(|m|φ)`. On the circle the only orders
/// are `0` (degree 0), `+ℓ` for `cos(ℓθ)` and `−ℓ` for `sin(ℓθ)`.
pub fn basis_index(dim: SphereDim, degree: usize, order: i64) -> Result<usize> {
    let l = degree as i64;
    match dim {
        SphereDim::Circle => match (degree, order) {
            (0, 0) => Ok(0),
            (0, _) => arg("degree 0 on the circle only has order 0"),
            (_, o) if o == l => Ok(2 * degree - 1),
            (_, o) if o == -l => Ok(2 * degree),
            _ => arg(format!("circle order must be ±degree, got degree {degree} order {order}")),
        },
        SphereDim::Sphere => {
            if order.abs() > l {
                return arg(format!("|order| must not exceed degree ({degree}, {order})"));
            }
            Ok((l * l + l + order) as usize)
        }
    }
}

/// Inverse of [`basis_index`].
pub fn degree_order(dim: SphereDim, index: usize) -> (usize, i64) {
    match dim {
        SphereDim::Circle => {
            if index == 0 {
                (0, 0)
            } else {
                let l = index.div_ceil(2);
                (l, if index % 2 == 1 { l as i64 } else { -(l as i64) })
            }
        }
        SphereDim::Sphere => {
            let l = (index as f64).sqrt().floor() as usize;
            let l = if (l + 1) * (l + 1) <= index { l + 1 } else { l };
            (l, index as i64 - (l * l + l) as i64)
        }
    }
}

/// Value, frame gradient and frame Hessian `(H₁₁, H₁₂, H₂₂)` of one basis function.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BasisJet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
}

pub(crate) fn basis_values(dim: SphereDim, max_degree: usize, p: &SpherePoint) -> Vec<f64> {
    let mut out = vec![0.0; dim.basis_len(max_degree)];
    match dim {
        SphereDim::Circle => {
            out[0] = 1.0 / (2.0 * PI).sqrt();
            let norm = 1.0 / PI.sqrt();
            for l in 1..=max_degree {
                let (s, c) = (l as f64 * p.theta).sin_cos();
                out[2 * l - 1] = norm * c;
                out[2 * l] = norm * s;
            }
        }
        SphereDim::Sphere => {
            let leg = NormalizedLegendre::values(max_degree, p.cos_theta, p.sin_theta);
            for l in 0..=max_degree {
                let base = l * l + l;
                out[base] = leg.p(l, 0);
                for m in 1..=l {
                    let (s, c) = (m as f64 * p.phi).sin_cos();
                    let pl = SQRT_2 * leg.p(l, m);
                    out[base + m] = pl * c;
                    out[base - m] = pl * s;
                }
            }
        }
    }
    out
}

/// Pointwise jets of every basis function of degree ≤ `max_degree`.
pub(crate) fn basis_jets(dim: SphereDim, max_degree: usize, p: &SpherePoint) -> Result<Vec<BasisJet>> {
    let mut out = vec![BasisJet::default(); dim.basis_len(max_degree)];
    match dim {
        SphereDim::Circle => {
            out[0].value = 1.0 / (2.0 * PI).sqrt();
            let norm = 1.0 / PI.sqrt();
            for l in 1..=max_degree {
                let lf = l as f64;
                let (s, c) = (lf * p.theta).sin_cos();
                out[2 * l - 1] = BasisJet {
                    value: norm * c,
                    grad: [-norm * lf * s, 0.0],
                    hess: [-norm * lf * lf * c, 0.0, 0.0],
                };
                out[2 * l] = BasisJet {
                    value: norm * s,
                    grad: [norm * lf * c, 0.0],
                    hess: [-norm * lf * lf * s, 0.0, 0.0],
                };
            }
        }
        SphereDim::Sphere => {
            let s = p.sin_theta;
            if s.abs() < 1e-10 {
                return Err(Error::Domain(format!(
                    "derivatives are not available at the pole (θ = {})",
                    p.theta
                )));
            }
            let cot = p.cos_theta / s;
            let leg = NormalizedLegendre::with_derivatives(max_degree, p.cos_theta, s);
            // chart derivatives (u_θ, u_φ, u_θθ, u_θφ, u_φφ) to frame jet
            let to_frame = |v: f64, ut: f64, up: f64, utt: f64, utp: f64, upp: f64| BasisJet {
                value: v,
                grad: [ut, up / s],
                hess: [utt, (utp - cot * up) / s, upp / (s * s) + cot * ut],
            };
            for l in 0..=max_degree {
                let base = l * l + l;
                out[base] = to_frame(leg.p(l, 0), leg.dp(l, 0), 0.0, leg.d2p(l, 0), 0.0, 0.0);
                for m in 1..=l {
                    let mf = m as f64;
                    let (sn, cs) = (mf * p.phi).sin_cos();
                    let (pv, pd, pdd) = (SQRT_2 * leg.p(l, m), SQRT_2 * leg.dp(l, m), SQRT_2 * leg.d2p(l, m));
                    out[base + m] = to_frame(pv * cs, pd * cs, -mf * pv * sn, pdd * cs, -mf * pd * sn, -mf * mf * pv * cs);
                    out[base - m] = to_frame(pv * sn, pd * sn, mf * pv * cs, pdd * sn, mf * pd * cs, -mf * mf * pv * sn);
                }
            }
        }
    }
    Ok(out)
}

/// Value, gradient and covariant Hessian of `u` at a node, in the node's
/// orthonormal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct JetSample {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: SymMatrix,
}

impl JetSample {
    pub fn constant(n: usize, value: f64) -> Self {
        JetSample {
            value,
            grad: vec![0.0; n],
            hess: SymMatrix::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.grad.len()
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad.iter().map(|g| g * g).sum()
    }

    pub fn laplacian(&self) -> f64 {
        self.hess.trace()
    }
}

/// Real function on `S^n` stored as orthonormal-basis coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalFunction {
    dim: SphereDim,
    max_degree: usize,
    coeffs: Vec<f64>,
}

impl SphericalFunction {
    pub fn new(dim: SphereDim, max_degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != dim.basis_len(max_degree) {
            return arg(format!(
                "degree {max_degree} on S^{} needs {} coefficients, got {}",
                dim.n(),
                dim.basis_len(max_degree),
                coeffs.len()
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return arg("coefficients must be finite");
        }
        Ok(SphericalFunction { dim, max_degree, coeffs })
    }

    pub fn zero(dim: SphereDim, max_degree: usize) -> Self {
        SphericalFunction {
            dim,
            max_degree,
            coeffs: vec![0.0; dim.basis_len(max_degree)],
        }
    }

    /// The constant function `c`.
    pub fn constant(dim: SphereDim, max_degree: usize, c: f64) -> Self {
        let mut f = Self::zero(dim, max_degree);
        f.coeffs[0] = c * dim.area().sqrt();
        f
    }

    /// Builds a function from `(degree, order, value)` terms; repeated terms add.
    pub fn from_terms(dim: SphereDim, max_degree: usize, terms: &[(usize, i64, f64)]) -> Result<Self> {
        let mut f = Self::zero(dim, max_degree);
        for &(d, o, v) in terms {
            if d > max_degree {
                return arg(format!("term degree {d} exceeds max degree {max_degree}"));
            }
            f.coeffs[basis_index(dim, d, o)?] += v;
        }
        if f.coeffs.iter().any(|c| !c.is_finite()) {
            return arg("coefficients must be finite");
        }
        Ok(f)
    }

    pub fn dim(&self) -> SphereDim {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize, order: i64) -> f64 {
        if degree > self.max_degree {
            return 0.0;
        }
        basis_index(self.dim, degree, order).map(|i| self.coeffs[i]).unwrap_or(0.0)
    }

    /// Degree of each coefficient, in storage order.
    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.coeffs.len()).map(|i| degree_order(self.dim, i).0)
    }

    /// Zero-padded or truncated copy at another maximum degree.
    pub fn with_max_degree(&self, max_degree: usize) -> Self {
        let mut coeffs = vec![0.0; self.dim.basis_len(max_degree)];
        let keep = coeffs.len().min(self.coeffs.len());
        coeffs[..keep].copy_from_slice(&self.coeffs[..keep]);
        SphericalFunction {
            dim: self.dim,
            max_degree,
            coeffs,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        SphericalFunction {
            dim: self.dim,
            max_degree: self.max_degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn plus_constant(&self, c: f64) -> Self {
        let mut f = self.clone();
        f.coeffs[0] += c * self.dim.area().sqrt();
        f
    }

    /// Radial rescaling of the graph: `s(1+u) − 1`.
    pub fn radially_scaled(&self, s: f64) -> Self {
        self.scaled(s).plus_constant(s - 1.0)
    }

    /// Mean value over the sphere.
    pub fn mean(&self) -> f64 {
        self.coeffs[0] / self.dim.area().sqrt()
    }

    /// `‖u‖²_{L²} = Σ a²` by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `‖∇u‖²_{L²} = Σ |λ_ℓ| a²`.
    pub fn grad_l2_norm_sq(&self) -> f64 {
        let n = self.dim.n();
        self.coeffs
            .iter()
            .zip(self.degrees())
            .map(|(c, l)| -harmonic_eigenvalue(l, n) * c * c)
            .sum()
    }

    /// Sum of squared coefficients of one degree.
    pub fn degree_energy(&self, degree: usize) -> f64 {
        self.coeffs
            .iter()
            .zip(self.degrees())
            .filter(|(_, l)| *l == degree)
            .map(|(c, _)| c * c)
            .sum()
    }

    pub fn value_at(&self, p: &SpherePoint) -> f64 {
        debug_assert_eq!(p.dim, self.dim);
        basis_values(self.dim, self.max_degree, p)
            .iter()
            .zip(&self.coeffs)
            .map(|(y, a)| y * a)
            .sum()
    }

    /// Value at the direction of an ambient vector.
    pub fn value_at_direction(&self, v: &[f64]) -> f64 {
        self.value_at(&SpherePoint::from_ambient(self.dim, v))
    }

    pub fn jet_at(&self, p: &SpherePoint) -> Result<JetSample> {
        evaluate_jet(self, p)
    }
}

/// Analytic value, frame gradient and covariant Hessian at `node`.
///
/// On S² the chart Hessian is corrected with the Christoffel terms
/// `u_{;θφ} = u_θφ − cot θ u_φ`, `u_{;φφ} = u_φφ + sin θ cos θ u_θ` and then
/// divided by `sin θ` once per φ index. Fails at the poles.
pub fn evaluate_jet(f: &SphericalFunction, node: &SpherePoint) -> Result<JetSample> {
    if node.dim != f.dim {
        return arg("node and function live on different spheres");
    }
    let jets = basis_jets(f.dim, f.max_degree, node)?;
    let n = f.dim.n();
    let mut value = 0.0;
    let mut g = [0.0; 2];
    let mut h = [0.0; 3];
    for (b, a) in jets.iter().zip(&f.coeffs) {
        if *a == 0.0 {
            continue;
        }
        value += a * b.value;
        for i in 0..2 {
            g[i] += a * b.grad[i];
        }
        for i in 0..3 {
            h[i] += a * b.hess[i];
        }
    }
    let hess = if n == 1 {
        SymMatrix::diag(&[h[0]])
    } else {
        SymMatrix::from_row_major(2, vec![h[0], h[1], h[1], h[2]])?
    };
    Ok(JetSample {
        value,
        grad: g[..n].to_vec(),
        hess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues() {
        assert_eq!(harmonic_eigenvalue(0, 2), 0.0);
        assert_eq!(harmonic_eigenvalue(1, 2), -2.0);
        assert_eq!(harmonic_eigenvalue(2, 2), -6.0);
        assert_eq!(harmonic_eigenvalue(3, 1), -9.0);
    }

    #[test]
    fn index_round_trip() {
        for dim in [SphereDim::Circle, SphereDim::Sphere] {
            for i in 0..dim.basis_len(9) {
                let (d, o) = degree_order(dim, i);
                assert_eq!(basis_index(dim, d, o).unwrap(), i);
            }
        }
        assert!(basis_index(SphereDim::Circle, 2, 1).is_err());
        assert!(basis_index(SphereDim::Sphere, 2, 3).is_err());
    }

    #[test]
    fn coefficient_count_is_validated() {
        assert!(SphericalFunction::new(SphereDim::Sphere, 2, vec![0.0; 9]).is_ok());
        assert!(SphericalFunction::new(SphereDim::Sphere, 2, vec![0.0; 8]).is_err());
        assert!(SphericalFunction::new(SphereDim::Circle, 3, vec![0.0; 7]).is_ok());
        assert!(SphericalFunction::new(SphereDim::Circle, 1, vec![0.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn constant_jet() {
        let f = SphericalFunction::constant(SphereDim::Sphere, 4, 0.3);
        let j = evaluate_jet(&f, &SpherePoint::sphere(1.0, 2.0)).unwrap();
        assert!((j.value - 0.3).abs() < 1e-15);
        assert!(j.grad.iter().all(|g| g.abs() < 1e-15));
        assert!(j.hess.max_abs() < 1e-14);
    }

    #[test]
    fn pole_is_rejected() {
        let f = SphericalFunction::constant(SphereDim::Sphere, 2, 0.1);
        let err = evaluate_jet(&f, &SpherePoint::sphere(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        // values are fine at the pole
        assert!((f.value_at(&SpherePoint::sphere(0.0, 0.0)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn eigenfunction_trace_and_degree_one_hessian() {
        for l in 0..=8usize {
            for m in -(l as i64)..=(l as i64) {
                let f = SphericalFunction::from_terms(SphereDim::Sphere, 8, &[(l, m, 1.0)]).unwrap();
                for &(t, p) in &[(0.4, 0.2), (1.3, 2.9), (2.6, -1.7)] {
                    let node = SpherePoint::sphere(t, p);
                    let j = evaluate_jet(&f, &node).unwrap();
                    assert!(j.hess.is_symmetric(1e-12));
                    let lam = harmonic_eigenvalue(l, 2);
                    assert!((j.laplacian() - lam * j.value).abs() < 1e-10, "l={l} m={m}");
                    if l == 1 {
                        let expect = SymMatrix::scaled_identity(2, -j.value);
                        assert!((&j.hess - &expect).max_abs() < 1e-10);
                    }
                }
            }
        }
        for l in 0..=6usize {
            let f = SphericalFunction::from_terms(SphereDim::Circle, 6, &[(l, -(l as i64), 1.0)]).unwrap();
            let j = evaluate_jet(&f, &SpherePoint::circle(0.77)).unwrap();
            assert!((j.laplacian() - harmonic_eigenvalue(l, 1) * j.value).abs() < 1e-12);
        }
    }

    /// Finite differences of the chart evaluation along geodesics through the
    /// node: `d/dt u(exp(t v))` and `d²/dt²` give `∇u·v` and `vᵀ Hess u v`.
    fn geodesic_fd(f: &SphericalFunction, node: &SpherePoint, v: [f64; 2], h: f64) -> (f64, f64) {
        let tv = node.tangent_to_ambient(&v);
        let at = |t: f64| {
            let (s, c) = t.sin_cos();
            let q: Vec<f64> = (0..3).map(|i| c * node.x[i] + s * tv[i]).collect();
            f.value_at_direction(&q)
        };
        let (p2, p1, z, m1, m2) = (at(2.0 * h), at(h), at(0.0), at(-h), at(-2.0 * h));
        (
            (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h),
            (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h),
        )
    }

    #[test]
    fn jets_match_finite_differences_at_random_nodes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let coeffs: Vec<f64> = (0..SphereDim::Sphere.basis_len(8)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = SphericalFunction::new(SphereDim::Sphere, 8, coeffs).unwrap();
        for _ in 0..100 {
            let z: f64 = rng.random_range(-0.98..0.98);
            let node = SpherePoint::sphere(z.acos(), rng.random_range(0.0..std::f64::consts::TAU));
            let j = evaluate_jet(&f, &node).unwrap();
            for v in [[1.0, 0.0], [0.0, 1.0], [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2]] {
                let (d1, d2) = geodesic_fd(&f, &node, v, 1e-3);
                let g = j.grad[0] * v[0] + j.grad[1] * v[1];
                let hvv = j.hess.bilinear(&v, &v);
                assert!((d1 - g).abs() < 1e-6, "gradient {d1} vs {g}");
                assert!((d2 - hvv).abs() < 1e-6, "hessian {d2} vs {hvv}");
            }
        }
    }
}
