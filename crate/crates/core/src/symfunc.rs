//! Elementary symmetric functions of small square matrices.
//!
//! Index layout: `entries[i * dim + j]` is the mixed tensor component
//! `A^i_j` (row = upper index, column = lower index). Newton tensors use the
//! same layout, so `[T_k]^j_i` lives at row `j`, column `i`.
//!
//! `σ_k` is computed from power traces through Newton's identities and the
//! Newton tensors through the recurrence `T_{k+1} = σ_{k+1} I − T_k A`,
//! which is the matrix form of the transfer identity
//! `A^j_s [T_k]^i_j = δ^i_s σ_{k+1} − [T_{k+1}]^i_s`.

use crate::error::{arg, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

/// Dense `dim × dim` real matrix used for shape operators, Hessians and
/// Newton tensors. Not necessarily symmetric; see [`SymMatrix::is_symmetric`].
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        SymMatrix {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = s;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Builds a matrix from row-major entries. Rejects non-square input and
    /// non-finite values.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return arg(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            ));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return arg("matrix entries must be finite");
        }
        Ok(SymMatrix { dim, entries })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return arg("rows must all have length equal to the row count");
            }
            entries.extend_from_slice(r);
        }
        Self::from_row_major(dim, entries)
    }

    /// Rank-one matrix `w vᵀ`, i.e. entries `w^i v_j`.
    pub fn outer(w: &[f64], v: &[f64]) -> Self {
        assert_eq!(w.len(), v.len(), "outer product of vectors of different length");
        let mut m = Self::zeros(w.len());
        for i in 0..w.len() {
            for j in 0..v.len() {
                m[(i, j)] = w[i] * v[j];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Self {
        SymMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// `vᵀ M w = Σ v_i M[i][j] w_j`.
    pub fn bilinear(&self, v: &[f64], w: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += v[i] * self[(i, j)] * w[j];
            }
        }
        s
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Full contraction `Σ_{i,j} A[i][j] B[j][i] = tr(AB)`.
    pub fn contract(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self[(i, j)] * other[(j, i)];
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SymMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, rhs.dim);
        SymMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, rhs.dim);
        SymMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(l, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = self.entries.chunks(self.dim).collect();
        f.debug_struct("SymMatrix").field("dim", &self.dim).field("rows", &rows).finish()
    }
}

pub fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b.round()
}

/// `σ_k(λ)`: sum over all `k`-subsets of products. `σ_0 = 1`.
pub fn sigma_of_eigenvalues(lambda: &[f64], k: usize) -> Result<f64> {
    if k > lambda.len() {
        return arg(format!("k = {k} exceeds vector length {}", lambda.len()));
    }
    Ok(all_sigmas_of_eigenvalues(lambda)[k])
}

/// `[σ_0, ..., σ_n]` of a vector via the product expansion of `Π (1 + λ_i t)`.
pub fn all_sigmas_of_eigenvalues(lambda: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; lambda.len() + 1];
    e[0] = 1.0;
    for (count, &l) in lambda.iter().enumerate() {
        for j in (1..=count + 1).rev() {
            e[j] += l * e[j - 1];
        }
    }
    e
}

/// `[σ_0(A), ..., σ_n(A)]` from Newton's identities on `p_i = tr(A^i)`.
pub fn all_sigmas(a: &SymMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut p = Vec::with_capacity(n + 1);
    p.push(n as f64);
    let mut power = a.clone();
    for i in 1..=n {
        if i > 1 {
            power = &power * a;
        }
        p.push(power.trace());
    }
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for k in 1..=n {
        let mut s = 0.0;
        for i in 1..=k {
            let term = e[k - i] * p[i];
            if i % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        e[k] = s / k as f64;
    }
    e
}

pub fn sigma_of_matrix(a: &SymMatrix, k: usize) -> Result<f64> {
    if k > a.dim() {
        return arg(format!("k = {k} exceeds matrix dimension {}", a.dim()));
    }
    if k == 0 {
        return Ok(1.0);
    }
    Ok(all_sigmas(a)[k])
}

/// `[T_0(A), ..., T_n(A)]`. `T_n` is the zero matrix by convention.
pub fn newton_tensors(a: &SymMatrix) -> Vec<SymMatrix> {
    let n = a.dim();
    let sigmas = all_sigmas(a);
    let mut out = Vec::with_capacity(n + 1);
    out.push(SymMatrix::identity(n));
    for k in 1..n {
        let prev_a = &out[k - 1] * a;
        out.push(&SymMatrix::scaled_identity(n, sigmas[k]) - &prev_a);
    }
    out.push(SymMatrix::zeros(n));
    out
}

/// Newton transformation tensor `[T_k]^j_i(A)`, stored with `j` as row.
pub fn newton_tensor(a: &SymMatrix, k: usize) -> Result<SymMatrix> {
    if k > a.dim() {
        return arg(format!("k = {k} exceeds matrix dimension {}", a.dim()));
    }
    let mut tensors = newton_tensors(a);
    Ok(tensors.swap_remove(k))
}

/// Polarization `Σ_k(A_1, ..., A_k)`, normalized so `Σ_k(A, ..., A) = k σ_k(A)`.
///
/// Evaluated through the inclusion–exclusion polarization formula
/// `δ^{j_1..j_k}_{i_1..i_k} Π (A_l)^{i_l}_{j_l} = Σ_{S ⊆ [k]} (−1)^{k−|S|} σ_k(Σ_{l∈S} A_l)`.
pub fn sigma_polarization(mats: &[SymMatrix]) -> Result<f64> {
    let k = mats.len();
    if k == 0 {
        return arg("polarization needs at least one matrix");
    }
    let n = mats[0].dim();
    if mats.iter().any(|m| m.dim() != n) {
        return arg("polarization arguments must share one dimension");
    }
    if k > n {
        return arg(format!("k = {k} exceeds matrix dimension {n}"));
    }
    let mut total = 0.0;
    for subset in 1u32..(1u32 << k) {
        let mut sum = SymMatrix::zeros(n);
        for (l, m) in mats.iter().enumerate() {
            if subset & (1 << l) != 0 {
                sum = &sum + m;
            }
        }
        let sign = if (k as u32 - subset.count_ones()).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * all_sigmas(&sum)[k];
    }
    let fact: f64 = (1..k).map(|i| i as f64).product();
    Ok(total / fact)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &SymMatrix) -> Result<Vec<f64>> {
    const OFF_TOL: f64 = 1e-13;
    const MAX_SWEEPS: usize = 100;
    let n = a.dim();
    let scale = a.max_abs().max(1e-300);
    if !a.is_symmetric(1e-12 * scale.max(1.0)) {
        return arg("Jacobi iteration needs a symmetric matrix");
    }
    let mut m = a.clone();
    let off = |m: &SymMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&m) > OFF_TOL * scale {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                what: "Jacobi eigenvalue iteration",
                iterations: sweeps,
                best_value: off(&m),
                best_point: Vec::new(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let mrp = m[(r, p)];
                    let mrq = m[(r, q)];
                    m[(r, p)] = c * mrp - s * mrq;
                    m[(r, q)] = s * mrp + c * mrq;
                }
                for r in 0..n {
                    let mpr = m[(p, r)];
                    let mqr = m[(q, r)];
                    m[(p, r)] = c * mpr - s * mqr;
                    m[(q, r)] = s * mpr + c * mqr;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    Ok(eig)
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
pub fn cholesky(a: &SymMatrix) -> Result<SymMatrix> {
    let n = a.dim();
    let mut l = SymMatrix::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 {
            return arg("matrix is not positive definite");
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn lower_triangular_inverse(l: &SymMatrix) -> SymMatrix {
    let n = l.dim();
    let mut inv = SymMatrix::zeros(n);
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for k in col..i {
                s -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    inv
}
