use proptest::prelude::*;
use quermass::asymmetry::{centered_asymmetry, fraenkel_asymmetry, AsymmetryOptions};
use quermass::functionals::{
    curvature_integrals, deficit, recenter, translate, volume, DeficitSpec, Normalization,
};
use quermass::geometry::NearlySphericalSet;
use quermass::sphere::{QuadratureGrid, SphereDim, SphericalFunction};
use quermass::verify::{check_spectral_gap, check_volume_stability, constrain, SampleSpec, DEFICIT_CSV_HEADER};

fn dim_strategy() -> impl Strategy<Value = SphereDim> {
    prop_oneof![Just(SphereDim::Circle), Just(SphereDim::Sphere)]
}

/// Coefficients on degrees 1..=4 with the given amplitude.
fn small_function(amp: f64) -> impl Strategy<Value = SphericalFunction> {
    (dim_strategy(), prop::collection::vec(-1.0..1.0f64, 25)).prop_map(move |(dim, raw)| {
        let len = dim.basis_len(4);
        let coeffs = (0..len).map(|i| if i == 0 { 0.0 } else { amp * raw[i] }).collect();
        SphericalFunction::new(dim, 4, coeffs).unwrap()
    })
}

fn grid_for(dim: SphereDim) -> QuadratureGrid {
    QuadratureGrid::new(dim, match dim {
        SphereDim::Circle => 96,
        SphereDim::Sphere => 24,
    })
    .unwrap()
}

fn rotation(a: f64, b: f64, c: f64) -> [[f64; 3]; 3] {
    let rz = |t: f64| [[t.cos(), -t.sin(), 0.0], [t.sin(), t.cos(), 0.0], [0.0, 0.0, 1.0]];
    let ry = |t: f64| [[t.cos(), 0.0, t.sin()], [0.0, 1.0, 0.0], [-t.sin(), 0.0, t.cos()]];
    let mul = |x: [[f64; 3]; 3], y: [[f64; 3]; 3]| {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| x[i][k] * y[k][j]).sum();
            }
        }
        out
    };
    mul(mul(rz(a), ry(b)), rz(c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_integrals_scale_homogeneously(u in small_function(0.02), r in 0.5..2.0f64) {
        let dim = u.dim();
        let n = dim.n();
        let grid = grid_for(dim);
        let base = curvature_integrals(&NearlySphericalSet::new(u.clone()).unwrap(), &grid).unwrap();
        let scaled = curvature_integrals(&NearlySphericalSet::new(u.radially_scaled(r)).unwrap(), &grid).unwrap();
        for k in 0..=n {
            let expect = r.powi((n - k) as i32) * base[k];
            prop_assert!((scaled[k] - expect).abs() <= 1e-11 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn top_curvature_integral_is_topological(u in small_function(0.03)) {
        let dim = u.dim();
        let top = curvature_integrals(&NearlySphericalSet::new(u).unwrap(), &grid_for(dim)).unwrap()[dim.n()];
        prop_assert!((top - dim.area()).abs() < 1e-10);
    }

    #[test]
    fn deficits_of_nearly_round_domains_are_nonnegative(u in small_function(0.02)) {
        let dim = u.dim();
        let n = dim.n();
        let omega = NearlySphericalSet::new(u).unwrap();
        let grid = grid_for(dim);
        for k in 1..=n {
            for m in -1..k as i64 {
                let d = deficit(&omega, DeficitSpec::new(n, k, m).unwrap(), &grid).unwrap();
                prop_assert!(d >= -1e-12, "δ_{{{k},{m}}} = {d}");
            }
        }
    }

    #[test]
    fn integrals_are_rotation_invariant(u in small_function(0.02), a in 0.0..6.3f64, b in 0.0..3.1f64, c in 0.0..6.3f64) {
        prop_assume!(u.dim() == SphereDim::Sphere);
        let grid = grid_for(SphereDim::Sphere);
        let i0 = curvature_integrals(&NearlySphericalSet::new(u.clone()).unwrap(), &grid).unwrap();
        let rotated = NearlySphericalSet::new(u.rotated(&rotation(a, b, c))).unwrap();
        let i1 = curvature_integrals(&rotated, &grid).unwrap();
        for (x, y) in i0.iter().zip(&i1) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!((volume(&rotated) - volume(&NearlySphericalSet::new(u).unwrap())).abs() < 1e-12);
    }

    #[test]
    fn deficits_survive_translation(u in small_function(0.02), c in prop::collection::vec(-0.02..0.02f64, 3)) {
        let dim = u.dim();
        let c = &c[..dim.ambient_dim()];
        let omega = NearlySphericalSet::new(u.clone()).unwrap();
        let moved = NearlySphericalSet::new(translate(&u, c, 10).unwrap().0).unwrap();
        let grid = QuadratureGrid::new(dim, if dim == SphereDim::Circle { 160 } else { 36 }).unwrap();
        let spec = DeficitSpec::new(dim.n(), dim.n().min(1), -1).unwrap();
        let d0 = deficit(&omega, spec, &grid).unwrap();
        let d1 = deficit(&moved, spec, &grid).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-6, "{d0} {d1}");
    }

    #[test]
    fn asymmetry_is_bounded_by_centered_value(u in small_function(0.03)) {
        let dim = u.dim();
        let omega = NearlySphericalSet::new(u).unwrap();
        let grid = grid_for(dim);
        let alpha = fraenkel_asymmetry(&omega, &grid, &AsymmetryOptions::default()).unwrap().alpha;
        let centered = centered_asymmetry(&omega, &grid).unwrap();
        prop_assert!((0.0..=2.0).contains(&alpha));
        prop_assert!(alpha <= centered + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn constrained_domains_satisfy_spectral_gap(u in small_function(0.01)) {
        let omega = constrain(&u, Normalization::Volume).unwrap();
        let eps = omega.sup_norms().w2();
        prop_assert!(check_spectral_gap(&omega, eps) >= 0.0);
        let again = recenter(&omega, 1e-8).unwrap();
        prop_assert_eq!(again.iterations, 0);
    }
}

#[test]
fn margins_are_reproducible_from_records() {
    let report = check_volume_stability(&SampleSpec::new(2, 5, 0.01, 4, 3), 1).unwrap();
    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(DEFICIT_CSV_HEADER));
    let header: Vec<&str> = DEFICIT_CSV_HEADER.split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    for (line, record) in lines.zip(&report.records) {
        let fields: Vec<&str> = line.split(',').collect();
        let get = |name: &str| fields[col(name)].parse::<f64>().unwrap();
        // printed values round-trip exactly
        assert_eq!(get("delta"), record.delta);
        assert_eq!(get("alpha"), record.alpha);
        let margin = get("delta") - (get("c_thm") - get("eta")) * get("alpha") * get("alpha");
        assert_eq!(margin, get("margin"));
    }
}
