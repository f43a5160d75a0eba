//! Signed log-magnitude scalars.
//!
//! Quantities such as `e^{r^2/4}` overflow `f64` near `r = 53`; the frequency
//! integrals carry them squared. A [`LogReal`] stores `sign * exp(logmag)`
//! so every product stays finite and sums are carried out by factoring out
//! the larger magnitude.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real number stored as `sign * exp(logmag)`.
///
/// The log-magnitude is kept as an unevaluated sum `logmag + tail` so that
/// values near `1e±300` (where `ln` has only ~42 fractional bits) still
/// round-trip through `f64` to a few ulps. Zero is a tagged state
/// (`sign == 0`); its magnitude fields are ignored.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LogReal {
    sign: i8,
    logmag: f64,
    #[serde(default)]
    tail: f64,
}

/// Error-free `a + b = s + e`.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: 0,
        logmag: 0.0,
        tail: 0.0,
    };
    pub const ONE: LogReal = LogReal {
        sign: 1,
        logmag: 0.0,
        tail: 0.0,
    };

    #[inline]
    fn with_parts(sign: i8, hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        LogReal {
            sign,
            logmag: hi,
            tail: lo,
        }
    }

    /// Builds a value from its parts. A zero `sign` yields the zero state.
    ///
    /// Panics if `sign` is outside `{-1, 0, 1}` or `logmag` is not finite for
    /// a nonzero sign.
    pub fn new(sign: i8, logmag: f64) -> Self {
        assert!((-1..=1).contains(&sign), "sign must be -1, 0 or 1");
        if sign == 0 {
            return Self::ZERO;
        }
        assert!(
            logmag.is_finite(),
            "log-magnitude must be finite, got {logmag}"
        );
        LogReal {
            sign,
            logmag,
            tail: 0.0,
        }
    }

    /// `exp(logmag)`, always positive.
    pub fn from_ln(logmag: f64) -> Self {
        Self::new(1, logmag)
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "cannot represent {x} as LogReal");
        if x == 0.0 {
            Self::ZERO
        } else {
            let a = x.abs();
            let hi = a.ln();
            let e = hi.exp();
            LogReal {
                sign: if x > 0.0 { 1 } else { -1 },
                logmag: hi,
                tail: ((a - e) / e).ln_1p(),
            }
        }
    }

    #[inline]
    pub fn sign(self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    #[inline]
    pub fn logmag(self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.logmag + self.tail
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.sign > 0
    }

    /// Converts back to `f64`; saturates to `±inf` / `0` outside range.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => {
                let e = self.logmag.exp();
                f64::from(s) * (e + e * self.tail.exp_m1())
            }
        }
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogReal { sign: 1, ..self }
        }
    }

    /// Natural log of a positive value.
    pub fn ln(self) -> Result<f64> {
        if self.sign > 0 {
            Ok(self.logmag + self.tail)
        } else {
            Err(Error::Domain(format!("log of non-positive value {self}")))
        }
    }

    pub fn recip(self) -> Result<Self> {
        if self.sign == 0 {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(LogReal {
            sign: self.sign,
            logmag: -self.logmag,
            tail: -self.tail,
        })
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        Ok(self * rhs.recip()?)
    }

    /// Ratio as a plain `f64`, computed without forming either operand.
    pub fn ratio(self, rhs: Self) -> Result<f64> {
        Ok(self.checked_div(rhs)?.to_f64())
    }

    /// Multiplies by `exp(t)`.
    #[inline]
    pub fn scale_exp(self, t: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            let (hi, lo) = two_sum(self.logmag, t);
            LogReal::with_parts(self.sign, hi, lo + self.tail)
        }
    }

    #[inline]
    pub fn scale(self, c: f64) -> Self {
        self * LogReal::from_f64(c)
    }

    pub fn powi(self, k: i32) -> Self {
        match self.sign {
            0 if k > 0 => self,
            0 => panic!("0^{k} is undefined"),
            s => {
                let kf = f64::from(k);
                let hi = self.logmag * kf;
                let err = self.logmag.mul_add(kf, -hi);
                LogReal::with_parts(if k % 2 == 0 { 1 } else { s }, hi, err + self.tail * kf)
            }
        }
    }

    pub fn square(self) -> Self {
        self.powi(2)
    }

    /// Relative difference `|a - b| / max(|a|, |b|)`; zero when both vanish.
    pub fn rel_diff(self, other: Self) -> f64 {
        let diff = (self - other).abs();
        let scale = if self.abs() >= other.abs() {
            self.abs()
        } else {
            other.abs()
        };
        if scale.is_zero() {
            0.0
        } else {
            diff.ratio(scale).expect("nonzero scale")
        }
    }
}

impl Default for LogReal {
    fn default() -> Self {
        Self::ZERO
    }
}

impl PartialEq for LogReal {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign
            && (self.sign == 0 || (self.logmag == other.logmag && self.tail == other.tail))
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => (self.logmag, self.tail).partial_cmp(&(other.logmag, other.tail)),
                _ => (other.logmag, other.tail).partial_cmp(&(self.logmag, self.tail)),
            },
            ord => Some(ord),
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "exp({})", self.logmag()),
            _ => write!(f, "-exp({})", self.logmag()),
        }
    }
}

impl From<f64> for LogReal {
    fn from(x: f64) -> Self {
        LogReal::from_f64(x)
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal {
            sign: -self.sign,
            ..self
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;

    fn add(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if (self.logmag, self.tail) >= (rhs.logmag, rhs.tail) {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = (small.logmag - big.logmag) + (small.tail - big.tail);
        if big.sign == small.sign {
            LogReal::with_parts(big.sign, big.logmag, big.tail + d.exp().ln_1p())
        } else if d == 0.0 {
            LogReal::ZERO
        } else {
            LogReal::with_parts(big.sign, big.logmag, big.tail + (-d.exp_m1()).ln())
        }
    }
}

impl AddAssign for LogReal {
    fn add_assign(&mut self, rhs: LogReal) {
        *self = *self + rhs;
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    #[inline]
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 || rhs.sign == 0 {
            LogReal::ZERO
        } else {
            let (hi, lo) = two_sum(self.logmag, rhs.logmag);
            LogReal::with_parts(self.sign * rhs.sign, hi, lo + self.tail + rhs.tail)
        }
    }
}

impl MulAssign for LogReal {
    fn mul_assign(&mut self, rhs: LogReal) {
        *self = *self * rhs;
    }
}

/// Panics on a zero divisor; use [`LogReal::checked_div`] to get an error instead.
impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        self.checked_div(rhs).expect("division by zero LogReal")
    }
}

impl Sum for LogReal {
    fn sum<I: Iterator<Item = LogReal>>(iter: I) -> LogReal {
        let mut acc = LogAccumulator::new();
        for x in iter {
            acc.push(x);
        }
        acc.total()
    }
}

/// Streaming signed log-sum-exp.
///
/// Keeps `shift` at the largest log-magnitude seen so far and the running sum
/// scaled by `exp(-shift)`. The result depends on the push order only through
/// floating-point rounding, so callers that need reproducibility push in a
/// fixed order.
#[derive(Clone, Copy, Debug)]
pub struct LogAccumulator {
    shift: f64,
    scaled: f64,
    any: bool,
}

impl Default for LogAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl LogAccumulator {
    pub fn new() -> Self {
        LogAccumulator {
            shift: f64::NEG_INFINITY,
            scaled: 0.0,
            any: false,
        }
    }

    /// Adds `weight * x` with a plain (finite) `f64` weight.
    #[inline]
    pub fn push_weighted(&mut self, x: LogReal, weight: f64) {
        if x.sign == 0 || weight == 0.0 {
            return;
        }
        let term = f64::from(x.sign) * weight;
        let l = x.logmag();
        if !self.any {
            self.shift = l;
            self.scaled = term;
            self.any = true;
        } else if l > self.shift {
            self.scaled = self.scaled * (self.shift - l).exp() + term;
            self.shift = l;
        } else {
            self.scaled += term * (l - self.shift).exp();
        }
    }

    #[inline]
    pub fn push(&mut self, x: LogReal) {
        self.push_weighted(x, 1.0);
    }

    pub fn merge(&mut self, other: &LogAccumulator) {
        if other.any {
            self.push_weighted(LogReal::from_ln(other.shift), other.scaled);
        }
    }

    pub fn total(&self) -> LogReal {
        if !self.any || self.scaled == 0.0 {
            return LogReal::ZERO;
        }
        LogReal::from_f64(self.scaled).scale_exp(self.shift)
    }
}
