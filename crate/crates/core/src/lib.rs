//! Curvature integrals, quermassintegral deficits and Fraenkel asymmetry of
//! nearly spherical domains `{r θ : r < 1 + u(θ)}`, with `u` a band-limited
//! function on the unit circle or the unit 2-sphere.
//!
//! ```
//! use quermass::{curvature_integrals, NearlySphericalSet, SphereDim, SphericalFunction};
//!
//! let u = SphericalFunction::from_terms(SphereDim::Sphere, 2, &[(2, 0, 0.01)]).unwrap();
//! let omega = NearlySphericalSet::new(u).unwrap();
//! let integrals = curvature_integrals(&omega, &omega.default_grid()).unwrap();
//! assert!((integrals[2] - 4.0 * std::f64::consts::PI).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN takes the error branch; index
// loops mirror the tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymmetry;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod optimize;
pub mod sphere;
pub mod symfunc;
pub mod verify;

pub use asymmetry::{centered_asymmetry, fraenkel_asymmetry, Asymmetry, AsymmetryOptions};
pub use error::{Error, Result};
pub use functionals::{
    barycenter, ball_quermass, curvature_integral, curvature_integrals, curvature_integrals_checked, deficit,
    normalize, recenter, volume, CheckedIntegral, DeficitSpec, Normalization,
};
pub use geometry::{NearlySphericalSet, SupNorms};
pub use sphere::{QuadratureGrid, SphereDim, SpherePoint, SphericalFunction};
pub use verify::{DeficitReport, GrowthReport, SampleSpec};
