use std::f64::consts::PI;

/// Orthonormalized associated Legendre functions
/// `P̄_ℓ^m(cos θ) = sqrt((2ℓ+1)/(4π) (ℓ−m)!/(ℓ+m)!) P_ℓ^m(cos θ)` (no
/// Condon–Shortley phase) with their first two θ-derivatives.
///
/// Values come from the standard three-term recurrence in ℓ, seeded on the
/// diagonal `P̄_m^m`; it is stable well past ℓ = 32.
#[derive(Clone, Debug)]
pub struct NormalizedLegendre {
    max_degree: usize,
    value: Vec<f64>,
    d_theta: Vec<f64>,
    d2_theta: Vec<f64>,
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl NormalizedLegendre {
    /// Values only; derivative tables stay empty.
    pub fn values(max_degree: usize, cos_theta: f64, sin_theta: f64) -> Self {
        let len = tri(max_degree, max_degree) + 1;
        let mut value = vec![0.0; len];
        let x = cos_theta;
        let s = sin_theta;
        value[0] = 0.5 / PI.sqrt();
        for m in 1..=max_degree {
            let f = ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
            value[tri(m, m)] = f * s * value[tri(m - 1, m - 1)];
        }
        for m in 0..max_degree {
            value[tri(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * value[tri(m, m)];
        }
        for m in 0..=max_degree {
            for l in (m + 2)..=max_degree {
                let lf = l as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                value[tri(l, m)] = a * (x * value[tri(l - 1, m)] - b * value[tri(l - 2, m)]);
            }
        }
        NormalizedLegendre {
            max_degree,
            value,
            d_theta: Vec::new(),
            d2_theta: Vec::new(),
        }
    }

    /// Values plus `∂_θ` and `∂²_θ`. Requires `sin θ ≠ 0`.
    pub fn with_derivatives(max_degree: usize, cos_theta: f64, sin_theta: f64) -> Self {
        let mut out = Self::values(max_degree, cos_theta, sin_theta);
        let len = out.value.len();
        let x = cos_theta;
        let s = sin_theta;
        let cot = x / s;
        let mut d1 = vec![0.0; len];
        let mut d2 = vec![0.0; len];
        for l in 0..=max_degree {
            for m in 0..=l {
                let lf = l as f64;
                let mf = m as f64;
                let p = out.value[tri(l, m)];
                // (1−x²) dP/dx = (ℓ+m) P_{ℓ−1} − ℓ x P_ℓ, rewritten for the
                // normalized family and for d/dθ = −sin θ d/dx
                let lower = if l > m {
                    let c = ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf * lf - mf * mf)).sqrt();
                    c * out.value[tri(l - 1, m)]
                } else {
                    0.0
                };
                let dp = (lf * x * p - lower) / s;
                d1[tri(l, m)] = dp;
                d2[tri(l, m)] = -cot * dp - (lf * (lf + 1.0) - mf * mf / (s * s)) * p;
            }
        }
        out.d_theta = d1;
        out.d2_theta = d2;
        out
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn p(&self, l: usize, m: usize) -> f64 {
        self.value[tri(l, m)]
    }

    pub fn dp(&self, l: usize, m: usize) -> f64 {
        self.d_theta[tri(l, m)]
    }

    pub fn d2p(&self, l: usize, m: usize) -> f64 {
        self.d2_theta[tri(l, m)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_closed_forms() {
        let theta: f64 = 0.7;
        let (s, x) = theta.sin_cos();
        let p = NormalizedLegendre::values(3, x, s);
        let n00 = (1.0 / (4.0 * PI)).sqrt();
        assert!((p.p(0, 0) - n00).abs() < 1e-15);
        assert!((p.p(1, 0) - (3.0 / (4.0 * PI)).sqrt() * x).abs() < 1e-15);
        // P_1^1 = sin θ, norm sqrt(3/(8π))
        assert!((p.p(1, 1) - (3.0 / (8.0 * PI)).sqrt() * s).abs() < 1e-15);
        // P_2^0 = (3x² − 1)/2
        assert!((p.p(2, 0) - (5.0 / (4.0 * PI)).sqrt() * 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        // P_3^2 = 15 x (1 − x²), norm sqrt(7/(4π) · 1/120)
        let n32 = (7.0 / (4.0 * PI) / 120.0).sqrt();
        assert!((p.p(3, 2) - n32 * 15.0 * x * s * s).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let l_max = 12;
        for &theta in &[0.3, 1.1, 2.0, 2.9] {
            let h = 1e-5;
            let at = |t: f64| NormalizedLegendre::values(l_max, t.cos(), t.sin());
            let (pp, pm, p0) = (at(theta + h), at(theta - h), at(theta));
            let d = NormalizedLegendre::with_derivatives(l_max, theta.cos(), theta.sin());
            for l in 0..=l_max {
                for m in 0..=l {
                    let fd1 = (pp.p(l, m) - pm.p(l, m)) / (2.0 * h);
                    let fd2 = (pp.p(l, m) - 2.0 * p0.p(l, m) + pm.p(l, m)) / (h * h);
                    assert!((fd1 - d.dp(l, m)).abs() < 1e-7, "l={l} m={m}");
                    assert!((fd2 - d.d2p(l, m)).abs() < 1e-3, "l={l} m={m}");
                }
            }
        }
    }
}
