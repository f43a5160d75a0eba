//! Frequency `U = D/I` of eigenfunctions on `R^n` (`n ≤ 3`) by log-domain
//! sphere and ball quadrature, and the checks built on it.

mod curve;
mod field;
mod moments;
mod sphere;
mod verify;

pub use curve::{
    compute_curve, fmt_f64, frequency_at, frequency_pair, grid_derivative, radius_grid,
    uprime_local, FrequencyCurve, CURVE_HEADER,
};
pub use field::{EvaluableField, Jet, Potential, PotentialField, ProductEigenfunction, MAX_DIM};
pub use moments::{
    bulk_moments, cauchy_schwarz_gap, combine_check, compute_D, compute_I, rellich_check,
    shell_sums, BulkMoments, DMode, FreqSettings, IdentitySides, ShellSums, CANCELLED_SIDES,
};
pub use sphere::{sphere_integral, sphere_rule, unit_sphere_area, QuadConfig, SphereRule};
pub use verify::{
    frequency_trajectory, growth_report, growth_start_radius, monotonicity_check,
    subsolution_check, uprime_main_term, verify_bounded_branch, verify_growth, verify_sharpness,
    verify_uprime, MIN_TAIL,
};
