//! Fixtures shared by the benchmarks.

use quermass::sphere::{SphereDim, SphericalFunction};
use quermass::verify::{random_function, sample_rng, scale_to};
use quermass::NearlySphericalSet;

/// A seeded domain with `‖u‖_{W^{2,∞}} = eps` and coefficients on degrees `2..=l`.
pub fn fixture(dim: SphereDim, l: usize, eps: f64) -> NearlySphericalSet {
    let v = random_function(dim, 2, l, &mut sample_rng(2024, 0));
    NearlySphericalSet::new(scale_to(&v, eps).expect("nonzero draw").0).expect("small perturbation")
}

/// The raw function of [`fixture`].
pub fn fixture_function(dim: SphereDim, l: usize, eps: f64) -> SphericalFunction {
    fixture(dim, l, eps).into_u()
}
