//! Pointwise and integrated identities behind the stability estimates.

use crate::error::{arg, Result};
use crate::asymmetry::centered_asymmetry;
use crate::geometry::{principal_curvatures, sigmas_closed, NearlySphericalSet};
use crate::sphere::{JetSample, QuadratureGrid, SphereDim, SphericalFunction};
use crate::symfunc::{all_sigmas, all_sigmas_of_eigenvalues, newton_tensors, SymMatrix};

/// Largest `|σ_k(closed) − σ_k(oracle)| / max(1, |σ_k(oracle)|)` over `k`,
/// comparing the closed form against eigenvalues of the shape operator.
pub fn closed_form_discrepancy(jet: &JetSample) -> Result<f64> {
    let closed = sigmas_closed(jet)?;
    let oracle = all_sigmas_of_eigenvalues(&principal_curvatures(jet)?);
    Ok(closed
        .iter()
        .zip(&oracle)
        .map(|(c, o)| (c - o).abs() / o.abs().max(1.0))
        .fold(0.0, f64::max))
}

/// A co-vector field built from one basis function `Y`: its gradient, or on
/// `S²` the gradient turned by a right angle (divergence free).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TestField {
    pub degree: usize,
    pub order: i64,
    pub rotated: bool,
}

/// Gradient fields of every basis function of degree `1..=max_degree`, plus
/// their rotations on `S²`.
pub fn test_fields(dim: SphereDim, max_degree: usize) -> Vec<TestField> {
    let mut out = Vec::new();
    for degree in 1..=max_degree {
        let orders: Vec<i64> = match dim {
            SphereDim::Circle => vec![degree as i64, -(degree as i64)],
            SphereDim::Sphere => (-(degree as i64)..=degree as i64).collect(),
        };
        for order in orders {
            out.push(TestField { degree, order, rotated: false });
            if dim == SphereDim::Sphere {
                out.push(TestField { degree, order, rotated: true });
            }
        }
    }
    out
}

fn field_jets(dim: SphereDim, field: TestField, grid: &QuadratureGrid) -> Result<Vec<(Vec<f64>, SymMatrix)>> {
    let y = SphericalFunction::from_terms(dim, field.degree, &[(field.degree, field.order, 1.0)])?;
    let jets = grid.jets(&y)?;
    Ok(jets
        .into_iter()
        .map(|j| {
            if field.rotated {
                // φ = J∇Y with J the frame rotation, which is parallel
                let phi = vec![-j.grad[1], j.grad[0]];
                let rot = SymMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).expect("2x2");
                (phi, &rot * &j.hess)
            } else {
                (j.grad, j.hess)
            }
        })
        .collect())
}

/// Both sides of `∫ (∇_j φ^i) [T_m]^j_i(D²u) = (n−m) ∫ φ^i u_j [T_{m−1}]^j_i(D²u)`
/// for `1 ≤ m ≤ n`.
pub fn divergence_identity(u: &SphericalFunction, field: TestField, m: usize, grid: &QuadratureGrid) -> Result<(f64, f64)> {
    let n = u.dim().n();
    if m == 0 || m > n {
        return arg(format!("need 1 ≤ m ≤ {n}, got {m}"));
    }
    if field.rotated && u.dim() != SphereDim::Sphere {
        return arg("rotated test fields exist only on S²");
    }
    let u_jets = grid.jets(u)?;
    let phi = field_jets(u.dim(), field, grid)?;
    let mut lhs = Vec::with_capacity(grid.len());
    let mut rhs = Vec::with_capacity(grid.len());
    for (uj, (p, dp)) in u_jets.iter().zip(&phi) {
        let t = newton_tensors(&uj.hess);
        lhs.push(dp.contract(&t[m]));
        // φ^i u_j [T_{m−1}]^j_i with j as row index
        rhs.push((n - m) as f64 * t[m - 1].bilinear(&uj.grad, p));
    }
    Ok((grid.integrate(&lhs), grid.integrate(&rhs)))
}

/// `D = √((1+u)² + |∇u|²)`.
pub fn radial_d(jet: &JetSample) -> f64 {
    ((1.0 + jet.value).powi(2) + jet.grad_norm_sq()).sqrt()
}

/// Remainder of the second-order expansion
/// `D^{−m} ≈ 1 − m u + m(m+1)/2 u² − (m/2)|∇u|²`.
pub fn taylor_remainder(jet: &JetSample, m: u32) -> f64 {
    let (u, g2) = (jet.value, jet.grad_norm_sq());
    let m = m as f64;
    let approx = 1.0 - m * u + 0.5 * m * (m + 1.0) * u * u - 0.5 * m * g2;
    radial_d(jet).powf(-m) - approx
}

/// Smallest `C` with `|remainder| ≤ C ε (u² + |∇u|²)` at every node of
/// `grid`, where `ε` is the caller's bound on `‖u‖_{W^{1,∞}}`.
pub fn taylor_constant(u: &SphericalFunction, m: u32, eps: f64, grid: &QuadratureGrid) -> Result<f64> {
    if !(eps > 0.0) {
        return arg("epsilon must be positive");
    }
    let mut c: f64 = 0.0;
    for jet in grid.jets(u)? {
        let scale = jet.value * jet.value + jet.grad_norm_sq();
        if scale > 0.0 {
            c = c.max(taylor_remainder(&jet, m).abs() / (eps * scale));
        }
    }
    Ok(c)
}

/// Both sides of `∫ u^i u_j [T_m]^j_i(D²u) ≈ ((m+2)/2) ∫ |∇u|² σ_m(D²u)`.
/// The difference is exact zero for `m ≤ 1` and of higher order otherwise.
pub fn integrated_identity(u: &SphericalFunction, m: usize, grid: &QuadratureGrid) -> Result<(f64, f64)> {
    let n = u.dim().n();
    if m > n {
        return arg(format!("need m ≤ {n}, got {m}"));
    }
    let mut lhs = Vec::with_capacity(grid.len());
    let mut rhs = Vec::with_capacity(grid.len());
    for jet in grid.jets(u)? {
        let t = newton_tensors(&jet.hess);
        lhs.push(t[m].bilinear(&jet.grad, &jet.grad));
        rhs.push(0.5 * (m + 2) as f64 * jet.grad_norm_sq() * all_sigmas(&jet.hess)[m]);
    }
    Ok((grid.integrate(&lhs), grid.integrate(&rhs)))
}

/// `‖∇u‖² − 2(n+1)(1 − 10ε)‖u‖²` in L². Nonnegative for constrained
/// domains with `‖u‖_{W^{2,∞}} ≤ ε` small.
pub fn check_spectral_gap(omega: &NearlySphericalSet, eps: f64) -> f64 {
    let u = omega.u();
    let n = omega.n() as f64;
    u.grad_l2_norm_sq() - 2.0 * (n + 1.0) * (1.0 - 10.0 * eps) * u.l2_norm_sq()
}

/// The two links of the chain `α² ≤ |ΩΔB|²/|B|² ≤ ((n+1)²/Area) ‖u‖²`:
/// returns `(|ΩΔB|²/|B|², ((n+1)²/Area) ‖u‖²)` for the unit ball `B`.
pub fn holder_chain(omega: &NearlySphericalSet, grid: &QuadratureGrid) -> Result<(f64, f64)> {
    let dim = omega.dim();
    let sym = crate::functionals::symmetric_difference_with_ball(omega, grid) / dim.ball_volume();
    let n1 = dim.ambient_dim() as f64;
    Ok((sym * sym, n1 * n1 / dim.area() * omega.u().l2_norm_sq()))
}

/// `|ΩΔB_Ω|²/|B_Ω|²` for the equal-volume ball at the origin.
pub fn centered_asymmetry_sq(omega: &NearlySphericalSet, grid: &QuadratureGrid) -> Result<f64> {
    Ok(centered_asymmetry(omega, grid)?.powi(2))
}
