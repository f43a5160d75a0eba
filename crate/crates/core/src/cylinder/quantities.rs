use std::f64::consts::PI;

use super::function::{AngularSums, CylinderFunction};
use crate::error::{Error, Result};
use crate::frequency::{fmt_f64, FreqSettings, FrequencyCurve, CURVE_HEADER};
use crate::numerics::{LogAccumulator, LogReal};

/// Euclidean dimension of the cylinder `S^1 × R^n`.
pub const CYLINDER_DIM: usize = 1;

/// `I, D, E`, the frequencies `U = D/I`, `U_E = E/I`, and the bulk form of `D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderQuantities {
    pub r: f64,
    pub i: LogReal,
    pub d: LogReal,
    /// `r e^{r^2/4} ∫_{|x|<r} (|∇v|^2 + v L v) e^{-f}`, equal to `d` by the divergence theorem.
    pub d_bulk: LogReal,
    pub e: LogReal,
    /// `r e^{r^2/4} ∫_{|x|<r} v^2 e^{-f}`
    pub mass: LogReal,
    pub u: f64,
    pub ue: f64,
}

/// Sums over the two boundary points `x = ±r` and the weighted ball integrals.
struct Raw {
    i: LogReal,
    d: LogReal,
    grad2: LogReal,
    v2: LogReal,
    v_lv: LogReal,
}

fn raw<S: Fn(f64) -> AngularSums + Sync>(sums: S, r: f64, s: &FreqSettings) -> Result<Raw> {
    let rule = s.quad.radial_rule(r)?;
    let (plus, minus) = (sums(r), sums(-r));
    let i = plus.v2 + minus.v2;
    let d = (plus.v_vx - minus.v_vx).scale(r);
    let shells = s.exec.map_range(rule.len(), |j| {
        let rho = rule.nodes[j];
        let (a, b) = (sums(rho), sums(-rho));
        (a.grad2 + b.grad2, a.v2 + b.v2, a.v_lv + b.v_lv)
    });
    let mut acc = [LogAccumulator::new(); 3];
    for (j, (g, v2, vl)) in shells.into_iter().enumerate() {
        let rho = rule.nodes[j];
        let lw = rule.weights[j].ln() + 0.25 * (r * r - rho * rho);
        acc[0].push(g.scale_exp(lw));
        acc[1].push(v2.scale_exp(lw));
        acc[2].push(vl.scale_exp(lw));
    }
    Ok(Raw {
        i,
        d,
        grad2: acc[0].total(),
        v2: acc[1].total(),
        v_lv: acc[2].total(),
    })
}

fn assemble(raw: Raw, r: f64) -> Result<CylinderQuantities> {
    if raw.i.is_zero() {
        return Err(Error::NodalSphere { radius: r });
    }
    let norm = (2.0 - CYLINDER_DIM as f64) * r.ln();
    let e = (raw.grad2 + raw.v2.scale(0.5)).scale_exp(norm);
    let d_bulk = (raw.grad2 + raw.v_lv).scale_exp(norm);
    let mass = raw.v2.scale_exp(norm);
    if e < mass.scale(0.5).scale(1.0 - 1e-12) {
        return Err(Error::Internal(format!(
            "E below its lower bound at r = {r}"
        )));
    }
    Ok(CylinderQuantities {
        r,
        i: raw.i,
        d: raw.d,
        d_bulk,
        e,
        mass,
        u: raw.d.ratio(raw.i)?,
        ue: e.ratio(raw.i)?,
    })
}

/// `E`, `U_E`, `U`, `D` and `I` at radius `r` from mode-summed quadrature.
#[allow(non_snake_case)]
pub fn compute_E_UE(v: &CylinderFunction, r: f64, s: &FreqSettings) -> Result<CylinderQuantities> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if v.is_zero() {
        return Err(Error::NodalSphere { radius: r });
    }
    assemble(raw(|x| v.angular(x), r, s)?, r)
}

/// Same quantities from pointwise evaluation on an `n_theta`-point trapezoid
/// in `θ`, without using mode orthogonality.
pub fn direct_quantities(
    v: &CylinderFunction,
    r: f64,
    n_theta: usize,
    s: &FreqSettings,
) -> Result<CylinderQuantities> {
    if n_theta <= 2 * v.max_frequency() as usize {
        return Err(Error::InvalidInput(format!(
            "{n_theta} angle nodes cannot resolve frequency {}",
            2 * v.max_frequency()
        )));
    }
    let h = 2.0 * PI / n_theta as f64;
    let sums = |x: f64| {
        let mut out = AngularSums::default();
        for t in 0..n_theta {
            let p = v.point(h * t as f64, x);
            out.v2 += p.value.square().scale(h);
            out.v_vx += (p.value * p.v_x).scale(h);
            out.grad2 += p.grad2().scale(h);
            out.v_lv += (p.value * p.lv).scale(h);
        }
        out
    };
    assemble(raw(sums, r, s)?, r)
}

/// `∫_{|x|<a} v^2 e^{-f}` over the cylinder (no `e^{a^2/4}` normalization).
pub fn core_mass(v: &CylinderFunction, a: f64, s: &FreqSettings) -> Result<LogReal> {
    let rule = s.quad.radial_rule(a)?;
    let mut acc = LogAccumulator::new();
    for (rho, w) in rule.iter() {
        let v2 = v.angular(rho).v2 + v.angular(-rho).v2;
        acc.push(v2.scale_exp(w.ln() - 0.25 * rho * rho));
    }
    Ok(acc.total())
}

/// A frequency curve on the cylinder plus `E` and `U_E` columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderCurve {
    pub curve: FrequencyCurve,
    pub e: Vec<LogReal>,
    pub ue: Vec<f64>,
}

pub const CYLINDER_HEADER_EXTRA: &str = "E_log,UE";

impl CylinderCurve {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CURVE_HEADER},{CYLINDER_HEADER_EXTRA}\n");
        for j in 0..self.curve.len() {
            self.curve.write_row(&mut out, j);
            out.push(',');
            out.push_str(&fmt_f64(self.e[j].logmag()));
            out.push(',');
            out.push_str(&fmt_f64(self.ue[j]));
            out.push('\n');
        }
        out
    }
}

/// Quantities on a radius grid, in grid order.
pub fn cylinder_quantities(
    v: &CylinderFunction,
    grid: &[f64],
    s: &FreqSettings,
) -> Result<Vec<CylinderQuantities>> {
    let inner = FreqSettings {
        exec: crate::Exec::Sequential,
        ..*s
    };
    s.exec
        .map(grid, |&r| compute_E_UE(v, r, &inner))
        .into_iter()
        .collect()
}

pub fn cylinder_curve(
    v: &CylinderFunction,
    grid: &[f64],
    s: &FreqSettings,
) -> Result<CylinderCurve> {
    let q = cylinder_quantities(v, grid, s)?;
    let u: Vec<f64> = q.iter().map(|q| q.u).collect();
    let n = CYLINDER_DIM as f64;
    let curve = FrequencyCurve {
        n: CYLINDER_DIM,
        r: grid.to_vec(),
        i: q.iter().map(|q| q.i).collect(),
        d: q.iter().map(|q| q.d).collect(),
        uprime: crate::frequency::grid_derivative(grid, &u),
        w: grid
            .iter()
            .zip(&u)
            .map(|(&r, &uu)| uu - r * r / 4.0 + n / 2.0)
            .collect(),
        u,
        margin: vec![f64::NAN; grid.len()],
    };
    Ok(CylinderCurve {
        curve,
        e: q.iter().map(|q| q.e).collect(),
        ue: q.iter().map(|q| q.ue).collect(),
    })
}
