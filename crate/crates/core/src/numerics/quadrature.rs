use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest node count for which node finding is guaranteed to converge.
pub const MAX_GAUSS_NODES: usize = 512;

/// Nodes and positive weights of an interpolatory rule on `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss-Legendre rule with `m` nodes mapped onto `[a, b]`.
pub fn gauss_rule(m: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidInput(
            "Gauss-Legendre rule needs at least one node".into(),
        ));
    }
    if !(a < b) {
        return Err(Error::InvalidInput(format!("empty interval [{a}, {b}]")));
    }
    let (x, w) = legendre_nodes(m)?;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    Ok(QuadratureRule {
        nodes: x.iter().map(|&t| mid + half * t).collect(),
        weights: w.iter().map(|&v| half * v).collect(),
        interval: (a, b),
    })
}

/// Nodes (ascending) and weights of the `m`-point rule on `[-1, 1]`.
fn legendre_nodes(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        // Tricomi's initial guess for the i-th largest root.
        let theta = PI * (i as f64 + 0.75) / (m as f64 + 0.5);
        let mut t = theta.cos();
        let mut converged = false;
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() <= 1e-16 * t.abs().max(1.0) {
                converged = true;
                let (_, d) = legendre_with_derivative(m, t);
                dp = d;
                break;
            }
        }
        if !converged {
            return Err(Error::Internal(format!(
                "Gauss-Legendre node {i} of {m} did not converge"
            )));
        }
        let weight = 2.0 / ((1.0 - t * t) * dp * dp);
        x[m - 1 - i] = t;
        x[i] = -t;
        w[m - 1 - i] = weight;
        w[i] = weight;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    Ok((x, w))
}

fn legendre_with_derivative(m: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if m == 0 { 1.0 } else { p1 };
    let d = m as f64 * (t * p - p0) / (t * t - 1.0);
    (p, d)
}

/// Composite Gauss-Legendre rule on the panels delimited by `breaks`.
pub fn composite_rule(breaks: &[f64], per_panel: usize) -> Result<QuadratureRule> {
    let base = gauss_rule(per_panel, -1.0, 1.0)?;
    let mut nodes = Vec::with_capacity(per_panel * breaks.len());
    let mut weights = Vec::with_capacity(per_panel * breaks.len());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(a < b) {
            return Err(Error::InvalidInput(format!(
                "non-increasing panel [{a}, {b}]"
            )));
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (t, w) in base.iter() {
            nodes.push(mid + half * t);
            weights.push(half * w);
        }
    }
    let interval = (breaks[0], *breaks.last().unwrap_or(&breaks[0]));
    Ok(QuadratureRule {
        nodes,
        weights,
        interval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn midpoint_rule() {
        let r = gauss_rule(1, -1.0, 1.0).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], 2.0, max_relative = 1e-15);
    }

    #[test]
    fn two_point_rule() {
        let r = gauss_rule(2, -1.0, 1.0).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_relative_eq!(r.nodes[0], -s, max_relative = 1e-15);
        assert_relative_eq!(r.nodes[1], s, max_relative = 1e-15);
        assert_relative_eq!(r.weights[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(r.weights[1], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn cubic_exactness() {
        let r = gauss_rule(2, 0.0, 1.0).unwrap();
        assert_relative_eq!(r.integrate(|x| x * x * x), 0.25, max_relative = 1e-15);
    }

    #[test]
    fn weights_sum_to_length_and_degree_exactness() {
        for &m in &[3usize, 7, 16, 40, 101, 256, MAX_GAUSS_NODES] {
            let r = gauss_rule(m, -0.5, 2.0).unwrap();
            let total: f64 = r.weights.iter().sum();
            assert_relative_eq!(total, 2.5, max_relative = 1e-12);
            assert!(r.weights.iter().all(|&w| w > 0.0));
            // degree 2m-1 monomial, capped to keep the exact value representable
            let d = (2 * m - 1).min(61) as i32;
            let exact = (2f64.powi(d + 1) - (-0.5f64).powi(d + 1)) / f64::from(d + 1);
            assert_relative_eq!(r.integrate(|x| x.powi(d)), exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gauss_rule(0, 0.0, 1.0).is_err());
        assert!(gauss_rule(4, 1.0, 1.0).is_err());
    }

    #[test]
    fn composite_integrates_exponential() {
        let breaks: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let r = composite_rule(&breaks, 8).unwrap();
        assert_relative_eq!(
            r.integrate(f64::exp),
            3f64.exp() - 1.0,
            max_relative = 1e-14
        );
    }
}
