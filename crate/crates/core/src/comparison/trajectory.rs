use std::fmt::Write as _;

use super::operator::{eval_P, FreqOpParams};
use crate::error::{Error, Result};
use crate::frequency::fmt_f64;

pub const TRAJECTORY_HEADER: &str = "r,h,hprime,Pvalue";

/// A positive function of `r` sampled on a grid, with its derivative and
/// `P_{f,λ} h` at each node.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub hprime: Vec<f64>,
    pub pvalue: Vec<f64>,
}

impl Trajectory {
    /// Samples an explicit function and its derivative.
    pub fn from_fn<H, D>(grid: &[f64], h: H, hprime: D, params: &FreqOpParams) -> Result<Self>
    where
        H: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let mut t = Trajectory {
            r: grid.to_vec(),
            h: Vec::with_capacity(grid.len()),
            hprime: Vec::with_capacity(grid.len()),
            pvalue: Vec::with_capacity(grid.len()),
        };
        for &r in grid {
            let (v, d) = (h(r), hprime(r));
            t.pvalue.push(eval_P(v, d, r, params)?);
            t.h.push(v);
            t.hprime.push(d);
        }
        Ok(t)
    }

    /// Builds from sampled values and derivatives (e.g. a measured frequency curve).
    pub fn from_samples(
        r: &[f64],
        h: &[f64],
        hprime: &[f64],
        params: &FreqOpParams,
    ) -> Result<Self> {
        if r.len() != h.len() || r.len() != hprime.len() {
            return Err(Error::InvalidInput(
                "trajectory columns differ in length".into(),
            ));
        }
        let pvalue = (0..r.len())
            .map(|j| eval_P(h[j], hprime[j], r[j], params))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            r: r.to_vec(),
            h: h.to_vec(),
            hprime: hprime.to_vec(),
            pvalue,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRAJECTORY_HEADER);
        out.push('\n');
        for j in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(self.r[j]),
                fmt_f64(self.h[j]),
                fmt_f64(self.hprime[j]),
                fmt_f64(self.pvalue[j])
            );
        }
        out
    }
}

/// Step control for [`integrate_extremal`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtremalOptions {
    /// Spacing of the output grid.
    pub out_step: f64,
    /// Internal steps are at most `step_scale * min(1, 1/r)`.
    pub step_scale: f64,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        ExtremalOptions {
            out_step: 0.01,
            step_scale: 1e-3,
        }
    }
}

/// `h' = h f' - (n-2) h / r - h^2 / r - r λ`, i.e. `P_{f,λ} h = 0`.
fn extremal_rhs(params: &FreqOpParams, r: f64, h: f64) -> Result<f64> {
    let fp = params.fprime_at(r)?;
    let n = params.n as f64;
    Ok(h * fp - (n - 2.0) * h / r - h * h / r - r * params.lambda)
}

/// Integrates the equality case of the comparison operator with classical RK4.
pub fn integrate_extremal(
    params: &FreqOpParams,
    r0: f64,
    h0: f64,
    r_max: f64,
) -> Result<Trajectory> {
    integrate_extremal_with(params, r0, h0, r_max, &ExtremalOptions::default())
}

pub fn integrate_extremal_with(
    params: &FreqOpParams,
    r0: f64,
    h0: f64,
    r_max: f64,
    opts: &ExtremalOptions,
) -> Result<Trajectory> {
    if !(h0 > 0.0) {
        return Err(Error::Domain(format!(
            "initial value must be positive, got {h0}"
        )));
    }
    if !(r0 > 0.0) || !(r_max > r0) || !(opts.out_step > 0.0) || !(opts.step_scale > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bad extremal range r0={r0}, r_max={r_max}"
        )));
    }
    let outputs = ((r_max - r0) / opts.out_step - 1e-9).ceil().max(1.0) as usize;
    let mut grid = Vec::with_capacity(outputs + 1);
    let mut hs = Vec::with_capacity(outputs + 1);
    let mut r = r0;
    let mut h = h0;
    grid.push(r);
    hs.push(h);
    for j in 1..=outputs {
        let target = (r0 + j as f64 * opts.out_step).min(r_max);
        let max_step = opts.step_scale * (1.0f64).min(1.0 / r);
        let substeps = ((target - r) / max_step).ceil().max(1.0) as usize;
        let dt = (target - r) / substeps as f64;
        for _ in 0..substeps {
            let k1 = extremal_rhs(params, r, h)?;
            let k2 = extremal_rhs(params, r + 0.5 * dt, h + 0.5 * dt * k1)?;
            let k3 = extremal_rhs(params, r + 0.5 * dt, h + 0.5 * dt * k2)?;
            let k4 = extremal_rhs(params, r + dt, h + dt * k3)?;
            h += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            r += dt;
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::TrajectoryCollapse { radius: r });
            }
        }
        r = target;
        grid.push(r);
        hs.push(h);
    }
    let hprime = grid
        .iter()
        .zip(&hs)
        .map(|(&r, &h)| extremal_rhs(params, r, h))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::from_samples(&grid, &hs, &hprime, params)
}
