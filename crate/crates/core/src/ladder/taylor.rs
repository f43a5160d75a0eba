use super::closed_form::ClosedForm;
use super::function::{ladder_build, taylor_polynomial, LadderFunction};
use crate::error::{Error, Result};
use crate::numerics::{gauss_rule, LogAccumulator, LogReal};

/// Grid points per unit radius used for the sup over `B_{R0}`.
const SUP_GRID: usize = 256;
const SHELL_NODES: usize = 32;

/// Both sides of the local polynomial approximation bound, without its constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorCheck {
    /// `sup_{B_{R0}} |u - v|^2`
    pub lhs: LogReal,
    /// `R^{3 + max(0, 2k+2)} e^{-R^2/2} ∫_{R-1/R < |x| < R+1/R} u^2`
    pub rhs_core: LogReal,
}

impl TaylorCheck {
    /// `lhs / rhs_core`; zero when `lhs` vanishes.
    pub fn ratio(&self) -> Result<f64> {
        self.lhs.ratio(self.rhs_core)
    }
}

/// Runs the check for the ladder solution `u_k` (`n = 1`).
pub fn taylor_approx_check(k: i64, r0: f64, r: f64) -> Result<TaylorCheck> {
    if k < 0 {
        return Err(Error::InvalidInput(format!(
            "k must be nonnegative, got {k}"
        )));
    }
    taylor_approx_check_for(&ladder_build(k)?, r0, r)
}

/// Same check for any closed-form eigenfunction at level `f.k ≥ 0`.
pub fn taylor_approx_check_for(f: &LadderFunction, r0: f64, r: f64) -> Result<TaylorCheck> {
    if f.k < 0 {
        return Err(Error::InvalidInput(format!(
            "level must be nonnegative, got {}",
            f.k
        )));
    }
    if !(r0 > 0.0) || !(r >= (2.0 * r0).max(4.0)) {
        return Err(Error::InvalidInput(format!(
            "need R0 > 0 and R >= max(2 R0, 4), got R0={r0}, R={r}"
        )));
    }
    let v = taylor_polynomial(&f.form, f.k as usize);
    let diff = &f.form - &ClosedForm::polynomial(v);
    let lhs = if diff.is_zero() {
        LogReal::ZERO
    } else {
        let ev = diff.evaluator();
        let steps = 2 * SUP_GRID;
        (0..=steps)
            .map(|i| ev.eval(-r0 + r0 * i as f64 / SUP_GRID as f64).square())
            .fold(LogReal::ZERO, |a, b| if b > a { b } else { a })
    };

    let ev = f.evaluator();
    let mut acc = LogAccumulator::new();
    for (a, b) in [(r - 1.0 / r, r + 1.0 / r), (-r - 1.0 / r, -r + 1.0 / r)] {
        let rule = gauss_rule(SHELL_NODES, a, b)?;
        for (x, wt) in rule.iter() {
            acc.push_weighted(ev.value(x).square(), wt);
        }
    }
    let shell = acc.total();
    if shell.is_zero() {
        return Err(Error::Underflow(format!(
            "annulus integral vanished at R = {r}"
        )));
    }
    let power = 3.0 + (2.0 * f.k as f64 + 2.0).max(0.0);
    let rhs_core = shell.scale_exp(power * r.ln() - 0.5 * r * r);
    Ok(TaylorCheck { lhs, rhs_core })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::hermite_polynomial;

    #[test]
    fn polynomial_input_is_exact() {
        for k in 0..4 {
            let h = hermite_polynomial(k).unwrap().as_ladder();
            let c = taylor_approx_check_for(&h, 1.0, 6.0).unwrap();
            assert!(c.lhs.is_zero());
            assert!(c.rhs_core.is_positive());
        }
    }

    #[test]
    fn rejects_small_radius() {
        assert!(taylor_approx_check(0, 1.0, 3.0).is_err());
        assert!(taylor_approx_check(0, 3.0, 5.0).is_err());
    }
}
