//! The first-order operator `P_{f,λ}` on positive functions of `r`, barrier
//! functions and maximum-principle checks for frequency curves.

mod operator;
mod principle;
mod trajectory;

pub use operator::{
    chooseg, chooseg_r1, escape_condition, eval_P, Barrier, BarrierChoice, FPrime, FreqOpParams,
};
pub use principle::{
    overtaking_bound, subsolution_report, verify_max_principle, verify_positive_lambda, CERT_TOL,
};
pub use trajectory::{
    integrate_extremal, integrate_extremal_with, ExtremalOptions, Trajectory, TRAJECTORY_HEADER,
};
