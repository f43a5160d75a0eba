use std::fmt::Write as _;

use super::field::EvaluableField;
use super::moments::{shell_sums, FreqSettings};
use crate::error::{Error, Result};
use crate::numerics::LogReal;

/// `I`, `D`, `U = D/I` and `W = U - r^2/4 + n/2` sampled on a radius grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyCurve {
    pub n: usize,
    pub r: Vec<f64>,
    pub i: Vec<LogReal>,
    pub d: Vec<LogReal>,
    pub u: Vec<f64>,
    /// Finite differences of `u` along the grid.
    pub uprime: Vec<f64>,
    pub w: Vec<f64>,
    /// Margin against a selected bound; `NaN` when none is selected.
    pub margin: Vec<f64>,
}

pub const CURVE_HEADER: &str = "r,logI,logD,U,Uprime,W,margin";

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl FrequencyCurve {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Sets `margin[j] = bound(r_j, U_j)`.
    pub fn set_margin<B: Fn(f64, f64) -> f64>(&mut self, bound: B) {
        self.margin = self
            .r
            .iter()
            .zip(&self.u)
            .map(|(&r, &u)| bound(r, u))
            .collect();
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.len() + 1));
        out.push_str(CURVE_HEADER);
        out.push('\n');
        for j in 0..self.len() {
            self.write_row(&mut out, j);
            out.push('\n');
        }
        out
    }

    /// One CSV row without the trailing newline.
    pub fn write_row(&self, out: &mut String, j: usize) {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(self.r[j]),
            fmt_f64(self.i[j].logmag()),
            fmt_f64(self.d[j].logmag()),
            fmt_f64(self.u[j]),
            fmt_f64(self.uprime[j]),
            fmt_f64(self.w[j]),
            fmt_f64(self.margin[j]),
        );
    }

    /// Index of the grid point closest to `r`.
    pub fn nearest(&self, r: f64) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| {
            (self.r[a] - r)
                .abs()
                .partial_cmp(&(self.r[b] - r).abs())
                .expect("finite grid")
        })
    }
}

/// Uniform grid `r_min, r_min + step, ...` up to `r_max` inclusive (within `step/1000`).
pub fn radius_grid(r_min: f64, r_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(r_min > 0.0) || !(step > 0.0) || !(r_max >= r_min) || !r_max.is_finite() {
        return Err(Error::InvalidInput(format!(
            "bad radius grid r_min={r_min}, r_max={r_max}, step={step}"
        )));
    }
    let count = ((r_max - r_min) / step + 1e-3).floor() as usize;
    Ok((0..=count).map(|j| r_min + j as f64 * step).collect())
}

/// `(I, D)` at one radius from a single sphere pass.
pub fn frequency_pair<F: EvaluableField + ?Sized>(
    v: &F,
    r: f64,
    s: &FreqSettings,
) -> Result<(LogReal, LogReal)> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let sh = shell_sums(v, r, &s.quad, None)?;
    Ok((sh.u2, sh.u_ur.scale(r)))
}

/// `U(r) = D/I`; a vanishing `I` is a nodal sphere.
pub fn frequency_at<F: EvaluableField + ?Sized>(v: &F, r: f64, s: &FreqSettings) -> Result<f64> {
    let (i, d) = frequency_pair(v, r, s)?;
    if i.is_zero() {
        return Err(Error::NodalSphere { radius: r });
    }
    d.ratio(i)
}

/// Five-point centered difference of `U` at `r` with step `h`.
pub fn uprime_local<F: EvaluableField + ?Sized>(
    v: &F,
    r: f64,
    h: f64,
    s: &FreqSettings,
) -> Result<f64> {
    let u = |x: f64| frequency_at(v, x, s);
    Ok((-u(r + 2.0 * h)? + 8.0 * u(r + h)? - 8.0 * u(r - h)? + u(r - 2.0 * h)?) / (12.0 * h))
}

/// Second-order finite differences on a possibly non-uniform grid.
pub fn grid_derivative(r: &[f64], y: &[f64]) -> Vec<f64> {
    let m = r.len();
    match m {
        0 => Vec::new(),
        1 => vec![f64::NAN],
        2 => {
            let s = (y[1] - y[0]) / (r[1] - r[0]);
            vec![s, s]
        }
        _ => {
            let mut out = vec![0.0; m];
            for j in 1..m - 1 {
                let (h1, h2) = (r[j] - r[j - 1], r[j + 1] - r[j]);
                out[j] = -h2 / (h1 * (h1 + h2)) * y[j - 1]
                    + (h2 - h1) / (h1 * h2) * y[j]
                    + h1 / (h2 * (h1 + h2)) * y[j + 1];
            }
            let (h1, h2) = (r[1] - r[0], r[2] - r[1]);
            out[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1]
                - h1 / (h2 * (h1 + h2)) * y[2];
            let (h1, h2) = (r[m - 2] - r[m - 3], r[m - 1] - r[m - 2]);
            out[m - 1] = h2 / (h1 * (h1 + h2)) * y[m - 3] - (h1 + h2) / (h1 * h2) * y[m - 2]
                + (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * y[m - 1];
            out
        }
    }
}

/// Samples the frequency on `grid`; radii are processed in parallel and
/// collected in grid order.
pub fn compute_curve<F: EvaluableField + ?Sized>(
    v: &F,
    grid: &[f64],
    s: &FreqSettings,
) -> Result<FrequencyCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty radius grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "radius grid must be strictly increasing".into(),
        ));
    }
    let n = v.dim();
    let pairs = s.exec.map(grid, |&r| frequency_pair(v, r, s));
    let mut i = Vec::with_capacity(grid.len());
    let mut d = Vec::with_capacity(grid.len());
    let mut u = Vec::with_capacity(grid.len());
    for (&r, pair) in grid.iter().zip(pairs) {
        let (ii, dd) = pair?;
        if ii.is_zero() {
            return Err(Error::NodalSphere { radius: r });
        }
        u.push(dd.ratio(ii)?);
        i.push(ii);
        d.push(dd);
    }
    let uprime = grid_derivative(grid, &u);
    let w = grid
        .iter()
        .zip(&u)
        .map(|(&r, &uu)| uu - r * r / 4.0 + n as f64 / 2.0)
        .collect();
    Ok(FrequencyCurve {
        n,
        r: grid.to_vec(),
        i,
        d,
        u,
        uprime,
        w,
        margin: vec![f64::NAN; grid.len()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = radius_grid(1.0, 40.0, 0.5).unwrap();
        assert_eq!(g.len(), 79);
        assert_eq!(*g.last().unwrap(), 40.0);
        assert!(g.contains(&10.0));
        assert!(radius_grid(0.0, 1.0, 0.1).is_err());
        assert!(radius_grid(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn derivative_exact_on_quadratics() {
        let r = [1.0, 1.5, 2.5, 2.75, 4.0];
        let y: Vec<f64> = r.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        for (x, d) in r.iter().zip(grid_derivative(&r, &y)) {
            assert!((d - (6.0 * x - 1.0)).abs() < 1e-12, "{x}: {d}");
        }
    }
}
