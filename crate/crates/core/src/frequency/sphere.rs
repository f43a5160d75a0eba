use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::field::MAX_DIM;
use crate::error::{Error, Result};
use crate::numerics::{gauss_rule, LogAccumulator, LogReal, QuadratureRule};

/// Resolution knobs for sphere and ball quadrature.
///
/// Node counts grow with the radius so that the arc length between nodes
/// stays near `arc_spacing`: product eigenfunctions vary on unit length
/// scales along the sphere, independent of `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub arc_spacing: f64,
    pub min_nodes: usize,
    /// Gauss nodes per radial panel.
    pub radial_nodes: usize,
    /// Panel width is `min(radial_width, radial_scale / ρ)`.
    pub radial_width: f64,
    pub radial_scale: f64,
    /// Fold onto the positive orthant for reflection-even integrands.
    pub use_symmetry: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            arc_spacing: 0.4,
            min_nodes: 16,
            radial_nodes: 8,
            radial_width: 1.0,
            radial_scale: 4.0,
            use_symmetry: true,
        }
    }
}

impl QuadConfig {
    /// Every node count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        let f = factor.max(1);
        QuadConfig {
            arc_spacing: self.arc_spacing / f as f64,
            min_nodes: self.min_nodes * f,
            radial_nodes: self.radial_nodes * f,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.arc_spacing > 0.0)
            || self.min_nodes < 8
            || self.radial_nodes == 0
            || !(self.radial_width > 0.0)
            || !(self.radial_scale > 0.0)
        {
            return Err(Error::InvalidInput(format!(
                "bad quadrature config {self:?}"
            )));
        }
        Ok(())
    }

    /// Node count on the sphere of radius `r`; a multiple of 4 so that the
    /// rule is invariant under coordinate reflections.
    pub fn sphere_nodes(&self, n: usize, r: f64) -> usize {
        if n == 1 {
            return 2;
        }
        let m = ((2.0 * PI * r / self.arc_spacing).ceil() as usize).max(self.min_nodes);
        m.div_ceil(4) * 4
    }

    /// Gauss-Legendre rule on `[0, r]` with panels narrowing like `1/ρ`.
    pub fn radial_rule(&self, r: f64) -> Result<QuadratureRule> {
        let mut breaks = vec![0.0];
        let mut rho = 0.0;
        while rho < r {
            let width = self.radial_width.min(self.radial_scale / rho.max(1e-300));
            rho = (rho + width).min(r);
            if r - rho < 1e-12 * r {
                rho = r;
            }
            breaks.push(rho);
        }
        crate::numerics::composite_rule(&breaks, self.radial_nodes)
    }
}

/// Unit directions and weights summing to `|S^{n-1}|`.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub n: usize,
    pub directions: Vec<[f64; MAX_DIM]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn unit_gauss(m: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("gauss cache poisoned").get(&m) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(gauss_rule(m, -1.0, 1.0)?);
    cache
        .lock()
        .expect("gauss cache poisoned")
        .insert(m, rule.clone());
    Ok(rule)
}

/// Builds the sphere rule with `m` azimuthal nodes (`m/2` polar nodes for
/// `n = 3`). With `fold` the rule keeps only positive-orthant nodes with
/// weights multiplied by `2^n`; for reflection-even integrands this is the
/// same sum as the full rule, which requires `m` to be a multiple of 4.
pub fn sphere_rule(n: usize, m: usize, fold: bool) -> Result<SphereRule> {
    if !(1..=MAX_DIM).contains(&n) {
        return Err(Error::Unsupported(format!(
            "sphere quadrature in dimension {n}"
        )));
    }
    if n >= 2 && m < 8 {
        return Err(Error::InvalidInput(format!(
            "need at least 8 sphere nodes, got {m}"
        )));
    }
    if fold && n >= 2 && !m.is_multiple_of(4) {
        return Err(Error::InvalidInput(format!(
            "folded rule needs m % 4 == 0, got {m}"
        )));
    }
    let mut directions = Vec::new();
    let mut weights = Vec::new();
    let scale = if fold { (1usize << n) as f64 } else { 1.0 };
    match n {
        1 => {
            directions.push([1.0, 0.0, 0.0]);
            weights.push(scale);
            if !fold {
                directions.push([-1.0, 0.0, 0.0]);
                weights.push(1.0);
            }
        }
        2 => {
            let count = if fold { m / 4 } else { m };
            for j in 0..count {
                let t = (j as f64 + 0.5) * 2.0 * PI / m as f64;
                directions.push([t.cos(), t.sin(), 0.0]);
                weights.push(scale * 2.0 * PI / m as f64);
            }
        }
        _ => {
            let mt = m.div_ceil(2);
            let polar = unit_gauss(mt)?;
            let count = if fold { m / 4 } else { m };
            for (ct, wt) in polar.iter() {
                if fold && ct < 0.0 {
                    continue;
                }
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for j in 0..count {
                    let phi = (j as f64 + 0.5) * 2.0 * PI / m as f64;
                    directions.push([st * phi.cos(), st * phi.sin(), ct]);
                    weights.push(scale * wt * 2.0 * PI / m as f64);
                }
            }
        }
    }
    Ok(SphereRule {
        n,
        directions,
        weights,
    })
}

/// `∫_{∂B_r} g` in log domain using the full `m`-node rule.
pub fn sphere_integral<G>(g: G, r: f64, n: usize, m: usize) -> Result<LogReal>
where
    G: Fn(&[f64]) -> LogReal,
{
    if !(r > 0.0) {
        return Err(Error::Domain(format!(
            "sphere radius must be positive, got {r}"
        )));
    }
    let rule = sphere_rule(n, m, false)?;
    let mut acc = LogAccumulator::new();
    let mut x = [0.0; MAX_DIM];
    for (dir, &w) in rule.directions.iter().zip(&rule.weights) {
        for i in 0..n {
            x[i] = r * dir[i];
        }
        acc.push_weighted(g(&x[..n]), w);
    }
    Ok(acc.total().scale_exp((n as f64 - 1.0) * r.ln()))
}

/// Area of the unit sphere `S^{n-1}`.
pub fn unit_sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_area() {
        for n in 1..=3 {
            for fold in [false, true] {
                let rule = sphere_rule(n, 24, fold).unwrap();
                let s: f64 = rule.weights.iter().sum();
                assert!((s - unit_sphere_area(n)).abs() < 1e-13, "n={n} fold={fold}");
            }
        }
    }

    #[test]
    fn circumference_and_second_moment() {
        let c = sphere_integral(|_| LogReal::ONE, 3.5, 2, 16).unwrap();
        assert!((c.to_f64() - 7.0 * PI).abs() < 1e-12);
        let m2 = sphere_integral(|x| LogReal::from_f64(x[0] * x[0]), 1.0, 3, 16).unwrap();
        assert!((m2.to_f64() - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn fold_matches_full_rule_for_even_integrand() {
        let g = |x: &[f64]| (x[0] * x[0] * 3.0 + x[1].powi(4) + (x[2] * x[0]).powi(2)).exp();
        let full = sphere_rule(3, 20, false).unwrap();
        let half = sphere_rule(3, 20, true).unwrap();
        let sum = |rule: &SphereRule| {
            rule.directions
                .iter()
                .zip(&rule.weights)
                .map(|(d, w)| w * g(d))
                .sum::<f64>()
        };
        assert!((sum(&full) - sum(&half)).abs() < 1e-12 * sum(&full));
    }

    #[test]
    fn dimension_limits() {
        assert!(matches!(
            sphere_rule(4, 16, false),
            Err(Error::Unsupported(_))
        ));
        assert!(sphere_rule(2, 4, false).is_err());
    }

    #[test]
    fn radial_rule_covers_interval() {
        let cfg = QuadConfig::default();
        for r in [0.5, 2.0, 7.3, 20.0] {
            let rule = cfg.radial_rule(r).unwrap();
            let s: f64 = rule.weights.iter().sum();
            assert!((s - r).abs() < 1e-12 * r);
        }
        assert_eq!(cfg.sphere_nodes(1, 10.0), 2);
        assert_eq!(cfg.sphere_nodes(2, 1.0) % 4, 0);
    }
}
