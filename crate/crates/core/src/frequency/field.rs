use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ladder::{hermite_polynomial, ladder_build, LadderEval, LadderFunction};
use crate::numerics::LogReal;

/// Largest supported dimension for deterministic quadrature.
pub const MAX_DIM: usize = 3;

/// Value and gradient at one point; gradient entries beyond `dim` are zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: LogReal,
    pub grad: [LogReal; MAX_DIM],
}

/// A non-constant potential `V` with its gradient.
pub trait PotentialField: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> [f64; MAX_DIM];
    /// `sup V`, used by the comparison operator.
    fn sup(&self) -> f64;
}

#[derive(Clone)]
pub enum Potential {
    Constant(f64),
    Variable(Arc<dyn PotentialField>),
}

impl Potential {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Potential::Constant(c) => *c,
            Potential::Variable(v) => v.value(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> [f64; MAX_DIM] {
        match self {
            Potential::Constant(_) => [0.0; MAX_DIM],
            Potential::Variable(v) => v.gradient(x),
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            Potential::Constant(c) => *c,
            Potential::Variable(v) => v.sup(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Potential::Constant(_))
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Constant(c) => write!(f, "Constant({c})"),
            Potential::Variable(_) => write!(f, "Variable(..)"),
        }
    }
}

/// A function on `R^n` (`n ≤ 3`) that can be sampled in log domain.
pub trait EvaluableField: Send + Sync {
    fn dim(&self) -> usize;

    fn jet(&self, x: &[f64]) -> Jet;

    fn value(&self, x: &[f64]) -> LogReal {
        self.jet(x).value
    }

    /// `V` in `L u + V u = 0`, when the field declares one.
    fn potential(&self) -> Option<Potential> {
        None
    }

    /// True when every quadratic quantity (`u^2`, `u u_r`, `|∇u|^2`, ...) is
    /// even under each coordinate reflection; quadrature may then fold onto
    /// the positive orthant.
    fn reflection_even(&self) -> bool {
        false
    }
}

/// `u(x) = F_1(x_1) ... F_n(x_n)` with closed-form eigenfactors.
///
/// With `L F_i = -(k_i/2) F_i` the separated operator gives
/// `L u = -(Σ k_i / 2) u`.
#[derive(Clone, Debug)]
pub struct ProductEigenfunction {
    factors: Vec<LadderFunction>,
    evals: Vec<LadderEval>,
    even: bool,
}

impl ProductEigenfunction {
    /// Ladder factors `u_{k_1}, ..., u_{k_n}`.
    pub fn new(levels: &[i64]) -> Result<Self> {
        let factors = levels
            .iter()
            .map(|&k| ladder_build(k))
            .collect::<Result<Vec<_>>>()?;
        Self::from_factors(factors)
    }

    /// `u_k(x_1) u_0(x_2) ... u_0(x_n)`.
    pub fn v_k(k: i64, n: usize) -> Result<Self> {
        let mut levels = vec![0; n];
        if let Some(first) = levels.first_mut() {
            *first = k;
        }
        Self::new(&levels)
    }

    /// `h_k(x_1)` extended trivially to `R^n`.
    pub fn hermite(k: u32, n: usize) -> Result<Self> {
        let mut factors = vec![hermite_polynomial(k)?.as_ladder()];
        for _ in 1..n {
            factors.push(hermite_polynomial(0)?.as_ladder());
        }
        Self::from_factors(factors)
    }

    pub fn from_factors(factors: Vec<LadderFunction>) -> Result<Self> {
        let n = factors.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::Unsupported(format!(
                "dimension {n} outside 1..={MAX_DIM}"
            )));
        }
        let even = factors.iter().all(|f| f.form.parity().is_some());
        let evals = factors.iter().map(LadderFunction::evaluator).collect();
        Ok(ProductEigenfunction {
            factors,
            evals,
            even,
        })
    }

    pub fn factors(&self) -> &[LadderFunction] {
        &self.factors
    }

    pub fn levels(&self) -> Vec<i64> {
        self.factors.iter().map(|f| f.k).collect()
    }

    /// `λ = Σ k_i / 2`.
    pub fn lambda(&self) -> f64 {
        self.factors.iter().map(|f| f.k as f64).sum::<f64>() / 2.0
    }

    /// True when no factor involves `u0` or the Gaussian, so `u` is a polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.factors
            .iter()
            .all(|f| f.form.p.is_zero() && f.form.q.is_zero())
    }
}

impl EvaluableField for ProductEigenfunction {
    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn jet(&self, x: &[f64]) -> Jet {
        let n = self.factors.len();
        let mut vals = [LogReal::ONE; MAX_DIM];
        let mut slopes = [LogReal::ZERO; MAX_DIM];
        for i in 0..n {
            (vals[i], slopes[i]) = self.evals[i].value_and_slope(x[i]);
        }
        let mut grad = [LogReal::ZERO; MAX_DIM];
        for (i, g) in grad[..n].iter_mut().enumerate() {
            let others = (0..n)
                .filter(|&j| j != i)
                .fold(LogReal::ONE, |a, j| a * vals[j]);
            *g = slopes[i] * others;
        }
        Jet {
            value: vals[..n].iter().fold(LogReal::ONE, |a, &b| a * b),
            grad,
        }
    }

    fn potential(&self) -> Option<Potential> {
        Some(Potential::Constant(self.lambda()))
    }

    fn reflection_even(&self) -> bool {
        self.even
    }
}
