//! Stable evaluation of `w(x) = e^{-x^2/4} ∫_0^x e^{s^2/4} ds`.
//!
//! `u0(x) = e^{x^2/4} w(x)` is the odd solution of `u'' - (x/2) u' = 0` with
//! `u0'(0) = 1`; `w` is bounded (`w ~ 2/x`) and satisfies `w' = 1 - (x/2) w`.
//!
//! * `|x| <= 30`: Taylor expansion around the nearest node of a table with
//!   spacing 1/16. Table values come from Gauss-Legendre quadrature of the
//!   bounded integrand `e^{-t(2x-t)/4}`; higher derivatives follow from the
//!   recurrence `w^{(j+1)} = -(x/2) w^{(j)} - (j/2) w^{(j-1)}`.
//! * `|x| > 30`: the asymptotic series `Σ a_j x^{-2j-1}` with `a_0 = 2`,
//!   `a_{j+1} = 2(2j+1) a_j`. After `N` terms the remainder is positive and
//!   at most twice the first omitted term once `x^2 >= 4(2N+1)` (the scaled
//!   bound `2 a_N x^{-2N-1}` is a supersolution of the remainder equation).

use std::sync::OnceLock;

use super::logreal::LogReal;
use super::quadrature::gauss_rule;

const TABLE_STEP_INV: f64 = 16.0;
const TABLE_MAX: f64 = 30.0;
const ASYMPTOTIC_FROM: f64 = 30.0;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = (TABLE_MAX * TABLE_STEP_INV) as usize;
        (0..=n)
            .map(|i| u0_scaled_quadrature(i as f64 / TABLE_STEP_INV))
            .collect()
    })
}

/// Direct quadrature of `w(x)` for `x >= 0`, used to seed the table.
///
/// Substituting `s = x - t` gives `w(x) = ∫_0^x e^{-t(2x-t)/4} dt`, whose
/// integrand decreases from 1 on the length scale `2/x`.
pub(crate) fn u0_scaled_quadrature(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    // integrand below e^{-50} beyond `upper`
    let upper = if x * x <= 200.0 {
        x
    } else {
        x - (x * x - 200.0).sqrt()
    };
    let width = (2.0 / x).min(0.5);
    let panels = (upper / width).ceil().max(1.0) as usize;
    let h = upper / panels as f64;
    let rule = gauss_rule(20, -1.0, 1.0).expect("20-node rule");
    let mut total = 0.0;
    for p in 0..panels {
        let a = p as f64 * h;
        let mid = a + 0.5 * h;
        total += 0.5
            * h
            * rule.integrate(|s| {
                let t = mid + 0.5 * h * s;
                (-t * (2.0 * x - t) * 0.25).exp()
            });
    }
    total
}

/// `w(x) = e^{-x^2/4} u0(x)`; odd in `x`.
pub fn u0_scaled(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let val = if ax > ASYMPTOTIC_FROM {
        asymptotic(ax)
    } else {
        taylor(ax)
    };
    if x < 0.0 {
        -val
    } else {
        val
    }
}

/// `w'(x) = 1 - (x/2) w(x)`.
pub fn u0_scaled_derivative(x: f64) -> f64 {
    1.0 - 0.5 * x * u0_scaled(x)
}

/// `u0(x)` in log domain.
pub fn u0_log(x: f64) -> LogReal {
    LogReal::from_f64(u0_scaled(x)).scale_exp(0.25 * x * x)
}

fn taylor(x: f64) -> f64 {
    let tab = table();
    let i = (x * TABLE_STEP_INV).round() as usize;
    let x0 = i as f64 / TABLE_STEP_INV;
    let d = x - x0;
    let w0 = tab[i];
    if d == 0.0 {
        return w0;
    }
    let half = 0.5 * x0;
    let mut prev = w0;
    let mut cur = 1.0 - half * w0;
    let mut sum = w0 + cur * d;
    let mut pow = d; // d^j / j!
    for j in 1..60 {
        let next = -half * cur - 0.5 * j as f64 * prev;
        pow *= d / (j + 1) as f64;
        let term = next * pow;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() && j > 4 {
            break;
        }
        prev = cur;
        cur = next;
    }
    sum
}

fn asymptotic(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut term = 2.0 / x;
    let mut sum = term;
    for j in 0..200 {
        term *= 2.0 * (2 * j + 1) as f64 * inv2;
        if term <= 0.5e-18 * sum {
            break;
        }
        sum += term;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn origin_and_oddness() {
        assert_eq!(u0_scaled(0.0), 0.0);
        for &x in &[0.3, 1.7, 5.0, 12.34, 29.99, 31.0, 150.0] {
            assert_eq!(u0_scaled(-x), -u0_scaled(x));
        }
    }

    #[test]
    fn matches_direct_quadrature_off_table_nodes() {
        for i in 0..300 {
            let x = 0.013 + i as f64 * 0.0997;
            let direct = u0_scaled_quadrature(x);
            assert_relative_eq!(u0_scaled(x), direct, max_relative = 2e-14);
        }
    }

    #[test]
    fn branches_agree_at_switch() {
        let below = taylor(ASYMPTOTIC_FROM);
        let above = asymptotic(ASYMPTOTIC_FROM);
        assert_relative_eq!(below, above, max_relative = 1e-14);
    }

    #[test]
    fn derivative_satisfies_ode_against_finite_difference() {
        for &x in &[0.5, 2.0, 7.3, 18.0, 45.0] {
            let h = 1e-5;
            let fd = (u0_scaled(x + h) - u0_scaled(x - h)) / (2.0 * h);
            assert_relative_eq!(
                u0_scaled_derivative(x),
                fd,
                max_relative = 1e-6,
                epsilon = 1e-10
            );
        }
    }
}
