//! Numerical checks of the stability inequalities and the identities they
//! rest on.

mod identities;
mod report;
mod sampling;
mod theorems;

pub use identities::{
    centered_asymmetry_sq, check_spectral_gap, closed_form_discrepancy, divergence_identity, holder_chain,
    integrated_identity, radial_d, taylor_constant, taylor_remainder, test_fields, TestField,
};
pub use sampling::{
    constrain, constraint_errors, draw_sample, random_function, sample_rng, sample_set, scale_to, Sample, SampleSpec,
    CENTER_TOL, CONSTRAINT_TOL, MAX_EPSILON, MAX_REDRAWS, SCALE_WINDOW,
};
pub use report::{
    fmt_float, DeficitReport, GrowthRecord, GrowthReport, ReportSummary, SampleId, SampleRecord, TheoremSpec, DEFICIT_CSV_HEADER,
    GROWTH_CSV_HEADER,
};
pub use theorems::{
    bound_tightness, check_quermass_stability, check_stability, check_sup_norm_growth, check_volume_stability,
    evaluate_sample, expansion_coefficient, fit_quadratic_form, growth_branch, quermass_constant, quermass_excess,
    volume_constant, QuadraticFit, BOUND_EPSILON, ETA_FRACTION, GROWTH_LIMIT,
};
