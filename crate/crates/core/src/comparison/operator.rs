use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Slack allowed when checking `f'(r) ≥ r/2`.
const FPRIME_TOL: f64 = 1e-12;

/// Radial derivative `f'(r)` of the weight.
#[derive(Clone)]
pub enum FPrime {
    /// `r/2`, the Gaussian weight `f = r^2/4`.
    Gaussian,
    /// `r/2 + c`
    Shifted(f64),
    /// `a r`
    Linear(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl FPrime {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            FPrime::Gaussian => 0.5 * r,
            FPrime::Shifted(c) => 0.5 * r + c,
            FPrime::Linear(a) => a * r,
            FPrime::Custom(f) => f(r),
        }
    }
}

impl fmt::Debug for FPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FPrime::Gaussian => write!(f, "Gaussian"),
            FPrime::Shifted(c) => write!(f, "Shifted({c})"),
            FPrime::Linear(a) => write!(f, "Linear({a})"),
            FPrime::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Data of `P_{f,λ} g = g'/g + (n-2)/r - f' + g/r + rλ/g`.
#[derive(Clone, Debug)]
pub struct FreqOpParams {
    pub n: usize,
    pub fprime: FPrime,
    pub lambda: f64,
}

impl FreqOpParams {
    pub fn new(n: usize, fprime: FPrime, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if !lambda.is_finite() {
            return Err(Error::Parameter(format!("λ must be finite, got {lambda}")));
        }
        Ok(FreqOpParams { n, fprime, lambda })
    }

    pub fn gaussian(n: usize, lambda: f64) -> Result<Self> {
        Self::new(n, FPrime::Gaussian, lambda)
    }

    /// `f'(r)`, rejecting weights below the standing hypothesis `f' ≥ r/2`.
    pub fn fprime_at(&self, r: f64) -> Result<f64> {
        let fp = self.fprime.eval(r);
        if !(fp >= 0.5 * r - FPRIME_TOL * r.max(1.0)) {
            return Err(Error::Parameter(format!("f'({r}) = {fp} < r/2")));
        }
        Ok(fp)
    }
}

/// `P_{f,λ} g` at one radius.
#[allow(non_snake_case)]
pub fn eval_P(g: f64, gprime: f64, r: f64, params: &FreqOpParams) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::Domain(format!(
            "P is defined for g > 0, got g({r}) = {g}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("P is defined for r > 0, got {r}")));
    }
    let fp = params.fprime_at(r)?;
    let n = params.n as f64;
    Ok(gprime / g + (n - 2.0) / r - fp + g / r + r * params.lambda / g)
}

/// `g(r) = r^2/2 - n - ε - 2λ` with `g' = r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Barrier {
    pub n: usize,
    pub eps: f64,
    pub lambda: f64,
}

impl Barrier {
    pub fn new(n: usize, eps: f64, lambda: f64) -> Self {
        Barrier { n, eps, lambda }
    }

    fn offset(&self) -> f64 {
        self.n as f64 + self.eps + 2.0 * self.lambda
    }

    pub fn value(&self, r: f64) -> f64 {
        0.5 * r * r - self.offset()
    }

    pub fn slope(&self, r: f64) -> f64 {
        r
    }

    /// Radius beyond which `g > 0`.
    pub fn positivity_radius(&self) -> f64 {
        (2.0 * self.offset().max(0.0)).sqrt()
    }
}

/// Outcome of [`chooseg`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierChoice {
    pub r1: f64,
    pub positivity_radius: f64,
    /// `min over r ∈ [r1, 4 r1]` of `-ε/(2r) - P g` (nonnegative when certified).
    pub min_slack: f64,
}

/// Smallest `r1` such that, for every `r ≥ r1`,
/// `2(λ+1) / (1 - 2(n+ε+2λ)/r^2) ≤ 2 + 2λ + ε/2`, which makes
/// `P_{f,λ} g ≤ -ε/(2r)` for the barrier `g` with `f = r^2/4`.
///
/// The left side is monotone in `r` on `g > 0`, so the admissible set is a
/// half-line and bisection (to `1e-9`) finds its end point.
pub fn chooseg(n: usize, eps: f64, lambda: f64) -> Result<BarrierChoice> {
    if !(eps > 0.0) || !lambda.is_finite() || n == 0 {
        return Err(Error::Parameter(format!(
            "need ε > 0, finite λ, n ≥ 1; got ε={eps}, λ={lambda}, n={n}"
        )));
    }
    let barrier = Barrier::new(n, eps, lambda);
    let c = barrier.offset();
    let rhs = 2.0 + 2.0 * lambda + 0.5 * eps;
    let admissible = |r: f64| {
        let den = 1.0 - 2.0 * c / (r * r);
        den > 0.0 && 2.0 * (lambda + 1.0) / den <= rhs
    };
    let lo0 = barrier.positivity_radius().max(1e-9);
    let mut hi = lo0.max(1.0);
    while !admissible(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Parameter(format!(
                "no r1 for n={n}, ε={eps}, λ={lambda}: condition never satisfied"
            )));
        }
    }
    let mut lo = lo0;
    if admissible(lo) {
        hi = lo;
    }
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if admissible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r1 = hi;
    let params = FreqOpParams::gaussian(n, lambda)?;
    let mut min_slack = f64::INFINITY;
    for j in 0..=400 {
        let r = r1 * (1.0 + 3.0 * j as f64 / 400.0);
        let p = eval_P(barrier.value(r), barrier.slope(r), r, &params)?;
        min_slack = min_slack.min(-eps / (2.0 * r) - p);
    }
    if min_slack < -1e-9 {
        return Err(Error::Internal(format!(
            "barrier post-check failed for n={n}, ε={eps}, λ={lambda}: slack {min_slack}"
        )));
    }
    Ok(BarrierChoice {
        r1,
        positivity_radius: barrier.positivity_radius(),
        min_slack,
    })
}

/// `r1` of [`chooseg`].
pub fn chooseg_r1(n: usize, eps: f64, lambda: f64) -> Result<f64> {
    Ok(chooseg(n, eps, lambda)?.r1)
}

/// `(2-n)/r + r/2 - rλ/(δ+2λ) - √λ`, positive where the escape condition for `λ > 0` holds.
pub fn escape_condition(n: usize, lambda: f64, delta: f64, r: f64) -> f64 {
    (2.0 - n as f64) / r + 0.5 * r - r * lambda / (delta + 2.0 * lambda) - lambda.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_g() {
        let p = FreqOpParams::gaussian(1, 0.0).unwrap();
        assert!((eval_P(1.0, 0.0, 2.0, &p).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(eval_P(0.0, 0.0, 2.0, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_small_fprime() {
        let p = FreqOpParams::new(2, FPrime::Linear(0.4), 0.0).unwrap();
        assert!(matches!(
            eval_P(1.0, 0.0, 2.0, &p),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn r1_closed_form() {
        assert!((chooseg_r1(1, 0.5, 0.0).unwrap() - 27f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn escape_for_half() {
        for j in 1..100 {
            let r = 0.1 * j as f64;
            let lhs = 1.0 / r + r / 4.0 - 0.5f64.sqrt();
            assert!((escape_condition(1, 0.5, 1.0, r) - lhs).abs() < 1e-12);
            assert!(lhs > 0.0);
        }
    }
}
