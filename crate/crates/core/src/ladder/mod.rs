//! Exact one-dimensional solutions of `u'' - (x/2) u' = -(k/2) u`.
//!
//! Every rung `u_k` (with `u_k' = u_{k-1}`) lives in the span of
//! `x^i u0`, `x^i e^{x^2/4}` and `x^i` with rational coefficients, so the
//! ladder is built and checked in exact arithmetic and only evaluation
//! touches floating point.

mod closed_form;
mod function;
mod hermite;
mod poly;
mod taylor;

pub use closed_form::{integrate_basis, BasisTag, ClosedForm, ClosedFormEval, MAX_BASIS_POWER};
pub use function::{
    derivatives_at_zero, eigen_residual, growth_certificate, ladder_build, ladder_constant,
    ladder_differentiate, ladder_eval, taylor_polynomial, LadderEval, LadderFunction, LadderJson,
    MAX_LADDER_LEVEL,
};
pub use hermite::{hermite_polynomial, HermitePoly, MAX_HERMITE_DEGREE};
pub use poly::{
    format_rational, horner, parse_rational, rat, rat_int, rational_to_f64, Rational, RationalPoly,
};
pub use taylor::{taylor_approx_check, taylor_approx_check_for, TaylorCheck};
