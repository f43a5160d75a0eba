use serde::{Deserialize, Serialize};

use super::field::{EvaluableField, Potential, MAX_DIM};
use super::sphere::{sphere_rule, QuadConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numerics::{LogAccumulator, LogReal};

/// Quadrature resolution plus execution strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FreqSettings {
    pub quad: QuadConfig,
    pub exec: Exec,
}

impl FreqSettings {
    pub fn with_exec(exec: Exec) -> Self {
        FreqSettings {
            exec,
            ..Self::default()
        }
    }

    pub fn refined(&self, factor: usize) -> Self {
        FreqSettings {
            quad: self.quad.refined(factor),
            exec: self.exec,
        }
    }
}

/// Integrals over the unit sphere of quadratic quantities of `u(ρω)`.
///
/// `dv` is `∫ u^2 <∇V, ∇f>` with `∇f = x/2`; `vu2` and `dv` are only
/// filled when a potential is supplied.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ShellSums {
    pub u2: LogReal,
    pub u_ur: LogReal,
    pub ur2: LogReal,
    pub grad2: LogReal,
    pub vu2: LogReal,
    pub dv: LogReal,
}

/// Angular integrals at radius `rho`.
pub fn shell_sums<F: EvaluableField + ?Sized>(
    v: &F,
    rho: f64,
    quad: &QuadConfig,
    potential: Option<&Potential>,
) -> Result<ShellSums> {
    let n = v.dim();
    let m = quad.sphere_nodes(n, rho);
    let rule = sphere_rule(n, m, quad.use_symmetry && v.reflection_even())?;
    let mut acc = [LogAccumulator::new(); 6];
    let mut x = [0.0; MAX_DIM];
    for (dir, &w) in rule.directions.iter().zip(&rule.weights) {
        for i in 0..n {
            x[i] = rho * dir[i];
        }
        let jet = v.jet(&x[..n]);
        let u2 = jet.value.square();
        let mut ur = LogReal::ZERO;
        let mut grad2 = LogReal::ZERO;
        for (g, &d) in jet.grad[..n].iter().zip(&dir[..n]) {
            ur += g.scale(d);
            grad2 += g.square();
        }
        acc[0].push_weighted(u2, w);
        acc[1].push_weighted(jet.value * ur, w);
        acc[2].push_weighted(ur.square(), w);
        acc[3].push_weighted(grad2, w);
        match potential {
            Some(Potential::Constant(_)) | None => {}
            Some(p) => {
                let vx = p.value(&x[..n]);
                let g = p.gradient(&x[..n]);
                let radial: f64 = (0..n).map(|i| 0.5 * g[i] * x[i]).sum();
                acc[4].push_weighted(u2, w * vx);
                acc[5].push_weighted(u2, w * radial);
            }
        }
    }
    let mut out = ShellSums {
        u2: acc[0].total(),
        u_ur: acc[1].total(),
        ur2: acc[2].total(),
        grad2: acc[3].total(),
        vu2: acc[4].total(),
        dv: acc[5].total(),
    };
    if let Some(Potential::Constant(c)) = potential {
        out.vu2 = out.u2.scale(*c);
    }
    Ok(out)
}

fn checked_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "radius must be positive and finite, got {r}"
        )))
    }
}

/// `I(r) = r^{1-n} ∫_{∂B_r} u^2`, i.e. the unit-sphere integral of `u(rω)^2`.
#[allow(non_snake_case)]
pub fn compute_I<F: EvaluableField + ?Sized>(v: &F, r: f64, s: &FreqSettings) -> Result<LogReal> {
    checked_radius(r)?;
    Ok(shell_sums(v, r, &s.quad, None)?.u2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DMode {
    Boundary,
    Bulk,
}

/// Ball integrals weighted by `e^{(r^2 - |x|^2)/4}`; the `_f` variants carry
/// an extra factor `f = |x|^2/4`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BulkMoments {
    pub grad2: LogReal,
    pub grad2_f: LogReal,
    pub u2: LogReal,
    pub u2_f: LogReal,
    pub vu2: LogReal,
    pub vu2_f: LogReal,
    pub dv: LogReal,
}

/// Nested radial Gauss x sphere quadrature over `B_r`; the exponential weight
/// is applied in log domain so nothing overflows.
pub fn bulk_moments<F: EvaluableField + ?Sized>(
    v: &F,
    r: f64,
    potential: &Potential,
    s: &FreqSettings,
) -> Result<BulkMoments> {
    checked_radius(r)?;
    let n = v.dim() as f64;
    let radial = s.quad.radial_rule(r)?;
    let shells = s.exec.map_range(radial.len(), |j| {
        shell_sums(v, radial.nodes[j], &s.quad, Some(potential))
    });
    let mut acc = [LogAccumulator::new(); 7];
    for (j, sh) in shells.into_iter().enumerate() {
        let sh = sh?;
        let rho = radial.nodes[j];
        let f = 0.25 * rho * rho;
        let lw = radial.weights[j].ln() + (n - 1.0) * rho.ln() + 0.25 * (r * r - rho * rho);
        let wt = |x: LogReal| x.scale_exp(lw);
        acc[0].push(wt(sh.grad2));
        acc[1].push_weighted(wt(sh.grad2), f);
        acc[2].push(wt(sh.u2));
        acc[3].push_weighted(wt(sh.u2), f);
        acc[4].push(wt(sh.vu2));
        acc[5].push_weighted(wt(sh.vu2), f);
        acc[6].push(wt(sh.dv));
    }
    Ok(BulkMoments {
        grad2: acc[0].total(),
        grad2_f: acc[1].total(),
        u2: acc[2].total(),
        u2_f: acc[3].total(),
        vu2: acc[4].total(),
        vu2_f: acc[5].total(),
        dv: acc[6].total(),
    })
}

/// `D(r)` from the boundary flux or from the weighted Dirichlet energy.
#[allow(non_snake_case)]
pub fn compute_D<F: EvaluableField + ?Sized>(
    v: &F,
    r: f64,
    mode: DMode,
    s: &FreqSettings,
) -> Result<LogReal> {
    checked_radius(r)?;
    let n = v.dim() as f64;
    match mode {
        DMode::Boundary => Ok(shell_sums(v, r, &s.quad, None)?.u_ur.scale(r)),
        DMode::Bulk => {
            let pot = v.potential().ok_or_else(|| {
                Error::Contract("bulk D requires the field to declare its potential".into())
            })?;
            let b = bulk_moments(v, r, &pot, s)?;
            Ok((b.grad2 - b.vu2).scale_exp((2.0 - n) * r.ln()))
        }
    }
}

/// Two sides of an integral identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentitySides {
    pub lhs: LogReal,
    pub rhs: LogReal,
    /// Largest sum of term magnitudes on either side.
    pub scale: LogReal,
}

/// Below this fraction of the term scale both sides count as cancelled.
pub const CANCELLED_SIDES: f64 = 1e-6;

impl IdentitySides {
    fn new(lhs: LogReal, rhs: LogReal, lhs_terms: &[LogReal], rhs_terms: &[LogReal]) -> Self {
        let sum = |t: &[LogReal]| t.iter().fold(LogReal::ZERO, |a, &b| a + b.abs());
        let (a, b) = (sum(lhs_terms), sum(rhs_terms));
        IdentitySides {
            lhs,
            rhs,
            scale: if a > b { a } else { b },
        }
    }

    /// `|lhs - rhs| / max(|lhs|, |rhs|)`, or relative to the term scale when
    /// both sides cancel to below `CANCELLED_SIDES` of it.
    pub fn rel_diff(&self) -> f64 {
        let big = if self.lhs.abs() > self.rhs.abs() {
            self.lhs.abs()
        } else {
            self.rhs.abs()
        };
        if big < self.scale.scale(CANCELLED_SIDES) {
            (self.lhs - self.rhs).abs().ratio(self.scale).unwrap_or(0.0)
        } else {
            self.lhs.rel_diff(self.rhs)
        }
    }
}

/// Rellich-type identity for `L u + V u = 0`:
///
/// `2r ∫_{∂B} u_r^2 - r ∫_{∂B} (|∇u|^2 - V u^2)` against
/// `(2-n) A[|∇u|^2] + 2 A[|∇u|^2 f] + 2 A[V u^2 (n/2 - f)] + 2 A[u^2 <∇V,∇f>]`,
/// with `A[g] = e^{r^2/4} ∫_{B_r} g e^{-f}`.
pub fn rellich_check<F: EvaluableField + ?Sized>(
    v: &F,
    potential: &Potential,
    r: f64,
    s: &FreqSettings,
) -> Result<IdentitySides> {
    checked_radius(r)?;
    let n = v.dim() as f64;
    let sh = shell_sums(v, r, &s.quad, Some(potential))?;
    let area = (n - 1.0) * r.ln();
    let lt = [
        sh.ur2.scale(2.0 * r).scale_exp(area),
        sh.grad2.scale(-r).scale_exp(area),
        sh.vu2.scale(r).scale_exp(area),
    ];
    let lhs = lt[0] + lt[1] + lt[2];
    let b = bulk_moments(v, r, potential, s)?;
    let rt = [
        b.grad2.scale(2.0 - n),
        b.grad2_f.scale(2.0),
        b.vu2.scale(n),
        b.vu2_f.scale(-2.0),
        b.dv.scale(2.0),
    ];
    let rhs = rt[0] + rt[1] + rt[2] + rt[3] + rt[4];
    Ok(IdentitySides::new(lhs, rhs, &lt, &rt))
}

/// `e^{r^2/4} r^{1-n} ∫_{B_r} (|∇u|^2 - V u^2) f e^{-f}` against
/// `(r/4)(D - I) + (1/2) e^{r^2/4} r^{1-n} ∫_{B_r} u^2 (n/2 - f) e^{-f}`.
pub fn combine_check<F: EvaluableField + ?Sized>(
    v: &F,
    potential: &Potential,
    r: f64,
    s: &FreqSettings,
) -> Result<IdentitySides> {
    checked_radius(r)?;
    let n = v.dim() as f64;
    let sh = shell_sums(v, r, &s.quad, None)?;
    let (i, d) = (sh.u2, sh.u_ur.scale(r));
    let b = bulk_moments(v, r, potential, s)?;
    let norm = (1.0 - n) * r.ln();
    let lt = [b.grad2_f.scale_exp(norm), (-b.vu2_f).scale_exp(norm)];
    let rt = [
        d.scale(0.25 * r),
        i.scale(-0.25 * r),
        b.u2.scale(0.25 * n).scale_exp(norm),
        b.u2_f.scale(-0.5).scale_exp(norm),
    ];
    let lhs = lt[0] + lt[1];
    let rhs = rt[0] + rt[1] + rt[2] + rt[3];
    Ok(IdentitySides::new(lhs, rhs, &lt, &rt))
}

/// Cauchy-Schwarz gap `r^{2-n} ∫_{∂B_r} u_r^2 - U D / r` and the scale `|U D / r|`.
pub fn cauchy_schwarz_gap<F: EvaluableField + ?Sized>(
    v: &F,
    r: f64,
    s: &FreqSettings,
) -> Result<(f64, f64)> {
    checked_radius(r)?;
    let sh = shell_sums(v, r, &s.quad, None)?;
    if sh.u2.is_zero() {
        return Err(Error::NodalSphere { radius: r });
    }
    let d = sh.u_ur.scale(r);
    let ud_over_r = (d * d / sh.u2).scale(1.0 / r);
    let lhs = sh.ur2.scale(r);
    let scale = ud_over_r.abs();
    let gap = (lhs - ud_over_r)
        .checked_div(scale)
        .map(LogReal::to_f64)
        .unwrap_or(0.0);
    Ok((gap, scale.to_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::field::{Jet, ProductEigenfunction};

    struct Constant(usize);
    impl EvaluableField for Constant {
        fn dim(&self) -> usize {
            self.0
        }
        fn jet(&self, _x: &[f64]) -> Jet {
            Jet {
                value: LogReal::ONE,
                ..Jet::default()
            }
        }
        fn potential(&self) -> Option<Potential> {
            Some(Potential::Constant(0.0))
        }
    }

    #[test]
    fn constant_field() {
        let s = FreqSettings::default();
        for n in 1..=3 {
            let i = compute_I(&Constant(n), 2.5, &s).unwrap().to_f64();
            assert!((i - crate::frequency::unit_sphere_area(n)).abs() < 1e-12);
            assert!(compute_D(&Constant(n), 2.5, DMode::Boundary, &s)
                .unwrap()
                .is_zero());
            let sides = rellich_check(&Constant(n), &Potential::Constant(0.0), 2.0, &s).unwrap();
            assert!(sides.lhs.is_zero() && sides.rhs.is_zero());
        }
    }

    #[test]
    fn i_of_u0_at_two() {
        let v = ProductEigenfunction::new(&[0]).unwrap();
        let i = compute_I(&v, 2.0, &FreqSettings::default())
            .unwrap()
            .to_f64();
        assert!((i - 2.0 * 2.925_303_491_814_363_f64.powi(2)).abs() < 1e-9);
    }

    #[test]
    fn bulk_needs_potential() {
        struct NoV;
        impl EvaluableField for NoV {
            fn dim(&self) -> usize {
                1
            }
            fn jet(&self, _x: &[f64]) -> Jet {
                Jet::default()
            }
        }
        let err = compute_D(&NoV, 1.0, DMode::Bulk, &FreqSettings::default()).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }
}
