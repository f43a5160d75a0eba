use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::closed_form::{ClosedForm, ClosedFormEval};
use super::poly::{format_rational, parse_rational, rat, rat_int, Rational, RationalPoly};
use crate::error::{Error, Result};
use crate::numerics::{u0_scaled, LogReal};

/// Largest `|k|` accepted by [`ladder_build`].
pub const MAX_LADDER_LEVEL: i64 = 64;

/// Coefficient bit length beyond which exact arithmetic is declared out of capacity.
const MAX_COEFF_BITS: u64 = 1 << 14;

/// A closed form tagged with the level `k` of `L u = -(k/2) u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderFunction {
    pub k: i64,
    pub form: ClosedForm,
}

impl LadderFunction {
    pub fn new(k: i64, form: ClosedForm) -> Self {
        LadderFunction { k, form }
    }

    pub fn p(&self) -> &RationalPoly {
        &self.form.p
    }

    pub fn q(&self) -> &RationalPoly {
        &self.form.q
    }

    pub fn s(&self) -> &RationalPoly {
        &self.form.s
    }

    /// Eigenvalue `λ = k/2` in `L u + λ u = 0`.
    pub fn lambda(&self) -> f64 {
        self.k as f64 / 2.0
    }

    pub fn value_at_zero(&self) -> Rational {
        self.form.value_at_zero()
    }

    /// `u(-x) = (-1)^{k+1} u(x)` read off the coefficients: `p` carries
    /// parity `(-1)^k` (since `u0` is odd), `q` and `s` carry `(-1)^{k+1}`.
    pub fn parity_consistent(&self) -> bool {
        let sigma: i8 = if self.k.rem_euclid(2) == 0 { -1 } else { 1 };
        let ok = |poly: &RationalPoly, want: i8| poly.parity().is_none_or(|p| p == want);
        ok(&self.form.p, -sigma) && ok(&self.form.q, sigma) && ok(&self.form.s, sigma)
    }

    pub fn evaluator(&self) -> LadderEval {
        LadderEval::new(self)
    }

    pub fn to_json(&self) -> LadderJson {
        let enc = |p: &RationalPoly| p.coeffs().iter().map(format_rational).collect();
        LadderJson {
            k: self.k,
            p: enc(&self.form.p),
            q: enc(&self.form.q),
            s: enc(&self.form.s),
        }
    }

    pub fn from_json(json: &LadderJson) -> Result<Self> {
        let dec = |v: &[String]| -> Result<RationalPoly> {
            Ok(RationalPoly::from_coeffs(
                v.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?,
            ))
        };
        Ok(LadderFunction::new(
            json.k,
            ClosedForm::new(dec(&json.p)?, dec(&json.q)?, dec(&json.s)?),
        ))
    }
}

/// Wire format: coefficients as `"num/den"` strings, lowest power first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderJson {
    pub k: i64,
    pub p: Vec<String>,
    pub q: Vec<String>,
    pub s: Vec<String>,
}

fn check_capacity(f: &ClosedForm, k: i64) -> Result<()> {
    if f.max_bits() > MAX_COEFF_BITS {
        return Err(Error::Capacity(format!(
            "coefficients of u_{k} exceed {MAX_COEFF_BITS} bits"
        )));
    }
    Ok(())
}

/// Builds `u_k`.
///
/// Upward: `u_{j+1} = ∫_0^x u_j + d_{j+1}` with `d_{j+1} = -2 u_{j-1}(0) / (j+1)`,
/// the value that kills the eigen-residual at the origin. Downward:
/// `u_{j-1} = u_j'`.
pub fn ladder_build(k: i64) -> Result<LadderFunction> {
    if k.abs() > MAX_LADDER_LEVEL {
        return Err(Error::Capacity(format!(
            "ladder level {k} outside [-{MAX_LADDER_LEVEL}, {MAX_LADDER_LEVEL}]"
        )));
    }
    let mut cur = LadderFunction::new(0, ClosedForm::u0());
    if k < 0 {
        while cur.k > k {
            cur = ladder_differentiate(&cur);
        }
        return Ok(cur);
    }
    let mut prev_at_zero = Rational::one(); // u_{-1}(0) = e^0
    while cur.k < k {
        let j = cur.k;
        let d = -rat_int(2) * &prev_at_zero / rat_int(j + 1);
        let mut next = cur.form.antiderivative()?;
        next.s = &next.s + &RationalPoly::constant(d);
        check_capacity(&next, j + 1)?;
        prev_at_zero = cur.value_at_zero();
        cur = LadderFunction::new(j + 1, next);
    }
    Ok(cur)
}

/// The constant `d_k` added at step `k` of the upward construction (`k ≥ 1`).
pub fn ladder_constant(k: i64) -> Result<Rational> {
    if k < 1 {
        return Err(Error::InvalidInput(format!(
            "d_k is defined for k >= 1, got {k}"
        )));
    }
    Ok(ladder_build(k)?.value_at_zero())
}

/// `u_k' = u_{k-1}`.
pub fn ladder_differentiate(f: &LadderFunction) -> LadderFunction {
    LadderFunction::new(f.k - 1, f.form.derivative())
}

/// `L F + (k/2) F` in the closed basis; identically zero iff `F` is an
/// eigenfunction at its declared level.
pub fn eigen_residual(f: &LadderFunction) -> ClosedForm {
    &f.form.drift_laplacian() + &f.form.scale(&rat(f.k, 2))
}

/// Value of `F^{(d)}(x)` in log domain, `d ≤ 2`.
pub fn ladder_eval(f: &LadderFunction, x: f64, d: u32) -> Result<LogReal> {
    if d > 2 {
        return Err(Error::InvalidInput(format!("derivative order {d} > 2")));
    }
    let mut form = f.form.clone();
    for _ in 0..d {
        form = form.derivative();
    }
    Ok(form.eval(x))
}

/// Cached `f64` evaluators for `F`, `F'` and `F''`.
#[derive(Clone, Debug)]
pub struct LadderEval {
    k: i64,
    needs_w: bool,
    forms: [ClosedFormEval; 3],
}

impl LadderEval {
    pub fn new(f: &LadderFunction) -> Self {
        let d1 = f.form.derivative();
        let d2 = d1.derivative();
        LadderEval {
            k: f.k,
            needs_w: !(f.form.p.is_zero() && d1.p.is_zero() && d2.p.is_zero()),
            forms: [f.form.evaluator(), d1.evaluator(), d2.evaluator()],
        }
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    /// `(F(x), F'(x))` sharing one kernel evaluation.
    #[inline]
    pub fn value_and_slope(&self, x: f64) -> (LogReal, LogReal) {
        let w = if self.needs_w { u0_scaled(x) } else { 0.0 };
        (
            self.forms[0].eval_with_w(x, w),
            self.forms[1].eval_with_w(x, w),
        )
    }

    /// `(F, F', F'')` at `x`.
    pub fn jet(&self, x: f64) -> [LogReal; 3] {
        let w = if self.needs_w { u0_scaled(x) } else { 0.0 };
        [
            self.forms[0].eval_with_w(x, w),
            self.forms[1].eval_with_w(x, w),
            self.forms[2].eval_with_w(x, w),
        ]
    }

    pub fn value(&self, x: f64) -> LogReal {
        self.jet(x)[0]
    }
}

/// Smallest `c` with `|F(x)| ≤ c |x|^{-k-1} e^{x^2/4}` on the sample points.
pub fn growth_certificate(f: &LadderFunction, samples: &[f64]) -> f64 {
    let ev = f.evaluator();
    samples
        .iter()
        .filter(|x| x.abs() >= 1.0)
        .map(|&x| {
            let v = ev.value(x).abs();
            let scale = -((f.k + 1) as f64) * x.abs().ln() + 0.25 * x * x;
            if v.is_zero() {
                0.0
            } else {
                (v.logmag() - scale).exp()
            }
        })
        .fold(0.0, f64::max)
}

/// Exact `F^{(j)}(0)` for `j = 0..=order`.
pub fn derivatives_at_zero(f: &ClosedForm, order: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(order + 1);
    let mut cur = f.clone();
    for _ in 0..=order {
        out.push(cur.value_at_zero());
        cur = cur.derivative();
    }
    out
}

/// Degree-`deg` Taylor polynomial at the origin.
pub fn taylor_polynomial(f: &ClosedForm, deg: usize) -> RationalPoly {
    let mut fact = Rational::one();
    let coeffs = derivatives_at_zero(f, deg)
        .into_iter()
        .enumerate()
        .map(|(j, d)| {
            if j > 0 {
                fact *= rat_int(j as i64);
            }
            if d.is_zero() {
                d
            } else {
                d / &fact
            }
        })
        .collect();
    RationalPoly::from_coeffs(coeffs)
}
