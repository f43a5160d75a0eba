//! `S^1 × R` with `f = x^2/4`: frequency, the modified frequency `U_E = E/I`
//! and the bound for approximate eigenfunctions with `L v ≈ v/2`.

mod checks;
mod function;
mod quantities;

pub use checks::{
    check_diffineq, condition_one, diffineq_rhs, fit_goal_constant, log_ue_derivative, verify_goal,
    ConditionOne, GoalParams, DEFECT_REL_TOL, DIFFINEQ_TOL, LATTICE_ANGLES,
};
pub use function::{AngularSums, CylinderFunction, Mode, PointJet, Profile};
pub use quantities::{
    compute_E_UE, core_mass, cylinder_curve, cylinder_quantities, direct_quantities, CylinderCurve,
    CylinderQuantities, CYLINDER_DIM, CYLINDER_HEADER_EXTRA,
};
