use std::ops::{Add, Sub};

use num_traits::{One, Zero};

use super::poly::{horner, rat, rat_int, Rational, RationalPoly};
use crate::error::{Error, Result};
use crate::numerics::{u0_scaled, LogReal};

/// Largest monomial power accepted by [`integrate_basis`].
pub const MAX_BASIS_POWER: usize = 128;

/// `p(x) u0(x) + q(x) e^{x^2/4} + s(x)`.
///
/// The span of `{x^i u0, x^i e^{x^2/4}, x^i}` is closed under
/// differentiation (`u0' = e^{x^2/4}`) and under antidifferentiation
/// (integration by parts), which keeps the whole ladder exact.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ClosedForm {
    pub p: RationalPoly,
    pub q: RationalPoly,
    pub s: RationalPoly,
}

/// Which basis family a monomial multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisTag {
    /// `x^m u0(x)`
    U0,
    /// `x^m e^{x^2/4}`
    Gauss,
    /// `x^m`
    Monomial,
}

impl ClosedForm {
    pub fn new(p: RationalPoly, q: RationalPoly, s: RationalPoly) -> Self {
        ClosedForm { p, q, s }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn u0() -> Self {
        ClosedForm::new(
            RationalPoly::one(),
            RationalPoly::zero(),
            RationalPoly::zero(),
        )
    }

    pub fn gauss() -> Self {
        ClosedForm::new(
            RationalPoly::zero(),
            RationalPoly::one(),
            RationalPoly::zero(),
        )
    }

    pub fn polynomial(s: RationalPoly) -> Self {
        ClosedForm::new(RationalPoly::zero(), RationalPoly::zero(), s)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero() && self.s.is_zero()
    }

    /// Applies `u0' = e^{x^2/4}` and `(e^{x^2/4})' = (x/2) e^{x^2/4}`:
    /// `(p, q, s) -> (p', p + q' + (x/2) q, s')`.
    pub fn derivative(&self) -> Self {
        let half_x_q = self.q.scale_shift(&rat(1, 2), 1);
        let q_new = &(&self.p + &self.q.derivative()) + &half_x_q;
        ClosedForm::new(self.p.derivative(), q_new, self.s.derivative())
    }

    /// Antiderivative vanishing at `x = 0`.
    pub fn antiderivative(&self) -> Result<Self> {
        let need = self
            .p
            .degree()
            .map(|d| d + 1)
            .into_iter()
            .chain(self.q.degree())
            .max()
            .unwrap_or(0);
        if need > MAX_BASIS_POWER + 1 {
            return Err(Error::Capacity(format!(
                "antiderivative needs basis power {need} > {MAX_BASIS_POWER}"
            )));
        }
        let gauss = gauss_moments(need);
        let mut out = ClosedForm::zero();
        for (m, c) in self.p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out = &out + &u0_moment(m, &gauss).scale(c);
            }
        }
        for (m, c) in self.q.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out = &out + &gauss[m].scale(c);
            }
        }
        for (m, c) in self.s.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let k = rat_int(m as i64 + 1);
                out.s = &out.s + &RationalPoly::monomial(c / k, m + 1);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ClosedForm::new(
            self.p.scale_shift(c, 0),
            self.q.scale_shift(c, 0),
            self.s.scale_shift(c, 0),
        )
    }

    /// Multiplies every part by `c x^shift`.
    pub fn scale_shift(&self, c: &Rational, shift: usize) -> Self {
        ClosedForm::new(
            self.p.scale_shift(c, shift),
            self.q.scale_shift(c, shift),
            self.s.scale_shift(c, shift),
        )
    }

    /// Exact value at the origin (`u0(0) = 0`, `e^0 = 1`).
    pub fn value_at_zero(&self) -> Rational {
        self.q.eval_at_zero() + self.s.eval_at_zero()
    }

    /// `L F = F'' - (x/2) F'` in the closed basis.
    pub fn drift_laplacian(&self) -> Self {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        &d2 - &d1.scale_shift(&rat(1, 2), 1)
    }

    /// `Some(+1)` for even, `Some(-1)` for odd, `None` for mixed parity.
    ///
    /// `u0` is odd, so `p u0` has the opposite parity of `p`. The zero form
    /// reports even.
    pub fn parity(&self) -> Option<i8> {
        let parts = [
            self.p.parity().map(|s| -s),
            self.q.parity(),
            self.s.parity(),
        ];
        let mut out: Option<i8> = None;
        for s in parts.into_iter().flatten() {
            if s == 0 || out.is_some_and(|o| o != s) {
                return None;
            }
            out = Some(s);
        }
        Some(out.unwrap_or(1))
    }

    pub fn evaluator(&self) -> ClosedFormEval {
        ClosedFormEval {
            p: self.p.to_f64_coeffs(),
            q: self.q.to_f64_coeffs(),
            s: self.s.to_f64_coeffs(),
        }
    }

    /// Value at `x` in log domain.
    pub fn eval(&self, x: f64) -> LogReal {
        self.evaluator().eval(x)
    }

    pub fn max_bits(&self) -> u64 {
        self.p
            .max_bits()
            .max(self.q.max_bits())
            .max(self.s.max_bits())
    }
}

impl Add for &ClosedForm {
    type Output = ClosedForm;
    fn add(self, rhs: &ClosedForm) -> ClosedForm {
        ClosedForm::new(&self.p + &rhs.p, &self.q + &rhs.q, &self.s + &rhs.s)
    }
}

impl Sub for &ClosedForm {
    type Output = ClosedForm;
    fn sub(self, rhs: &ClosedForm) -> ClosedForm {
        ClosedForm::new(&self.p - &rhs.p, &self.q - &rhs.q, &self.s - &rhs.s)
    }
}

/// `∫_0^x s^j e^{s^2/4} ds` for `j = 0..=max`.
///
/// `j = 0` is `u0`, `j = 1` is `2 e^{x^2/4} - 2`, and by parts
/// `∫ x^j e = 2 x^{j-1} e - 2 (j-1) ∫ x^{j-2} e`.
fn gauss_moments(max: usize) -> Vec<ClosedForm> {
    let mut out: Vec<ClosedForm> = Vec::with_capacity(max + 1);
    for j in 0..=max {
        let form = match j {
            0 => ClosedForm::u0(),
            1 => ClosedForm::new(
                RationalPoly::zero(),
                RationalPoly::from_i64(&[2]),
                RationalPoly::from_i64(&[-2]),
            ),
            _ => {
                let lead = ClosedForm::new(
                    RationalPoly::zero(),
                    RationalPoly::monomial(rat_int(2), j - 1),
                    RationalPoly::zero(),
                );
                &lead - &out[j - 2].scale(&rat_int(2 * (j as i64 - 1)))
            }
        };
        out.push(form);
    }
    out
}

/// `∫_0^x s^m u0(s) ds = x^{m+1} u0 / (m+1) - ∫_0^x s^{m+1} e^{s^2/4} ds / (m+1)`.
fn u0_moment(m: usize, gauss: &[ClosedForm]) -> ClosedForm {
    let inv = Rational::one() / rat_int(m as i64 + 1);
    let lead = ClosedForm::new(
        RationalPoly::monomial(inv.clone(), m + 1),
        RationalPoly::zero(),
        RationalPoly::zero(),
    );
    &lead - &gauss[m + 1].scale(&inv)
}

/// Antiderivative, vanishing at 0, of `x^m` times the tagged basis function.
pub fn integrate_basis(m: usize, which: BasisTag) -> Result<ClosedForm> {
    if m > MAX_BASIS_POWER {
        return Err(Error::Capacity(format!(
            "basis power {m} exceeds {MAX_BASIS_POWER}"
        )));
    }
    let mono = RationalPoly::monomial(Rational::one(), m);
    let form = match which {
        BasisTag::U0 => ClosedForm::new(mono, RationalPoly::zero(), RationalPoly::zero()),
        BasisTag::Gauss => ClosedForm::new(RationalPoly::zero(), mono, RationalPoly::zero()),
        BasisTag::Monomial => ClosedForm::polynomial(mono),
    };
    form.antiderivative()
}

/// `f64` snapshot of a [`ClosedForm`] for fast repeated evaluation.
#[derive(Clone, Debug, Default)]
pub struct ClosedFormEval {
    p: Vec<f64>,
    q: Vec<f64>,
    s: Vec<f64>,
}

impl ClosedFormEval {
    /// Evaluates with a precomputed `w = u0_scaled(x)`.
    ///
    /// `F(x) = e^{x^2/4} (p(x) w(x) + q(x)) + s(x)`; the exponential factor
    /// only ever enters as a log-magnitude shift.
    #[inline]
    pub fn eval_with_w(&self, x: f64, w: f64) -> LogReal {
        let mut core = 0.0;
        if !self.p.is_empty() {
            core += horner(&self.p, x) * w;
        }
        if !self.q.is_empty() {
            core += horner(&self.q, x);
        }
        let head = LogReal::from_f64(core).scale_exp(0.25 * x * x);
        if self.s.is_empty() {
            head
        } else {
            head + LogReal::from_f64(horner(&self.s, x))
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> LogReal {
        let w = if self.p.is_empty() { 0.0 } else { u0_scaled(x) };
        self.eval_with_w(x, w)
    }
}
