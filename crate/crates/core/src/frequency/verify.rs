use super::curve::{compute_curve, frequency_at, grid_derivative, uprime_local, FrequencyCurve};
use super::field::{EvaluableField, Potential, ProductEigenfunction};
use super::moments::FreqSettings;
use crate::comparison::{
    chooseg_r1, escape_condition, subsolution_report, FreqOpParams, Trajectory,
};
use crate::error::{Error, Result};
use crate::report::{CheckReport, Status};

/// Grid points needed past the measured radius before a tail claim counts.
pub const MIN_TAIL: usize = 5;

/// First index from which `ok` holds on the whole remaining grid.
fn tail_start(len: usize, ok: impl Fn(usize) -> bool) -> Option<usize> {
    let mut start = None;
    for j in (0..len).rev() {
        if ok(j) {
            start = Some(j);
        } else {
            break;
        }
    }
    start
}

fn min_over(range: std::ops::Range<usize>, f: impl Fn(usize) -> f64) -> f64 {
    range.map(f).fold(f64::INFINITY, f64::min)
}

/// Radius from which a threshold crossing counts: `r1` of the barrier and,
/// for `λ > 0`, also the first radius where the escape condition holds.
pub fn growth_start_radius(n: usize, lambda: f64, eps: f64, delta: f64) -> f64 {
    let r1 = chooseg_r1(n, eps, lambda).unwrap_or(0.0);
    if lambda > 0.0 {
        let mut r2 = 1e-3;
        while escape_condition(n, lambda, delta, r2) <= 0.0 && r2 < 1e6 {
            r2 += 1e-3 * r2.max(1.0);
        }
        r1.max(r2)
    } else {
        r1
    }
}

/// Growth dichotomy on an already computed curve.
///
/// Threshold `δ + 2 max(0, λ)`, searched from [`growth_start_radius`]; bound
/// `U > r^2/2 - n - 2λ - ε`. Sets the curve margin to the bound's slack.
/// The bounded branch is reported when `U` stays below the threshold on at
/// least [`MIN_TAIL`] radii past the start radius.
pub fn growth_report(
    curve: &mut FrequencyCurve,
    lambda: f64,
    eps: f64,
    delta: f64,
) -> Result<CheckReport> {
    if !(eps > 0.0) || !(delta > 0.0) {
        return Err(Error::Parameter(format!(
            "need ε, δ > 0; got ε={eps}, δ={delta}"
        )));
    }
    let n = curve.n as f64;
    curve.set_margin(|r, u| u - (0.5 * r * r - n - 2.0 * lambda - eps));
    let threshold = delta + 2.0 * lambda.max(0.0);
    let r_start = growth_start_radius(curve.n, lambda, eps, delta);
    let m = curve.len();
    let js = curve.r.iter().position(|&r| r >= r_start).unwrap_or(m);
    let crossing = (js..m).find(|&j| curve.u[j] >= threshold);
    let tail = tail_start(m, |j| curve.margin[j] > 0.0).filter(|&j0| m - j0 >= MIN_TAIL);

    let mut report = match (crossing, tail) {
        (_, Some(j0)) => {
            CheckReport::new("growth", Status::Pass, min_over(j0..m, |j| curve.margin[j]))
                .metric("measured_R", curve.r[j0])
        }
        (None, None) if m - js >= MIN_TAIL => {
            let top = min_over(js..m, |j| -curve.u[j]);
            CheckReport::new("growth", Status::Exempt, threshold + top)
                .with_detail("bounded branch: U stays below the threshold")
                .metric("max_U", -top)
        }
        (None, None) => CheckReport::new("growth", Status::Inconclusive, f64::NAN).with_detail(
            format!("grid ends before r = {r_start} plus {MIN_TAIL} radii"),
        ),
        (Some(_), None) => CheckReport::new("growth", Status::Inconclusive, curve.margin[m - 1])
            .with_detail("threshold crossed but the bound does not yet hold on a tail"),
    };
    report = report
        .metric("start_radius", r_start)
        .metric(
            "crossing_radius",
            crossing.map(|j| curve.r[j]).unwrap_or(f64::NAN),
        )
        .metric("threshold", threshold);
    Ok(report)
}

/// Growth dichotomy for a product eigenfunction on `grid`.
pub fn verify_growth(
    v: &ProductEigenfunction,
    eps: f64,
    delta: f64,
    grid: &[f64],
    s: &FreqSettings,
) -> Result<(CheckReport, FrequencyCurve)> {
    let mut curve = compute_curve(v, grid, s)?;
    let report = growth_report(&mut curve, v.lambda(), eps, delta)?;
    Ok((report, curve))
}

/// Bounded branch: `U ≤ 2|λ| + slack` at every grid radius `≥ r_from`.
pub fn verify_bounded_branch(
    v: &ProductEigenfunction,
    slack: f64,
    r_from: f64,
    grid: &[f64],
    s: &FreqSettings,
) -> Result<CheckReport> {
    let tail: Vec<f64> = grid.iter().copied().filter(|&r| r >= r_from).collect();
    if tail.len() < MIN_TAIL {
        return Ok(
            CheckReport::new("bounded_branch", Status::Inconclusive, f64::NAN)
                .with_detail(format!("grid has {} radii beyond {r_from}", tail.len())),
        );
    }
    let curve = compute_curve(v, &tail, s)?;
    let cap = 2.0 * v.lambda().abs() + slack;
    let top = curve.u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let status = if top <= cap {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(CheckReport::new("bounded_branch", status, cap - top)
        .metric("max_U", top)
        .metric("cap", cap))
}

/// `U(r_i) ≤ r_i^2/2 - n - k + ε` at every supplied radius for `v_k` in dimension `n`.
pub fn verify_sharpness(
    k: i64,
    n: usize,
    eps: f64,
    r_list: &[f64],
    s: &FreqSettings,
) -> Result<CheckReport> {
    if k < 0 || !(eps > 0.0) {
        return Err(Error::Parameter(format!(
            "need k ≥ 0 and ε > 0; got k={k}, ε={eps}"
        )));
    }
    if r_list.is_empty() {
        return Err(Error::InvalidInput("no radii supplied".into()));
    }
    let v = ProductEigenfunction::v_k(k, n)?;
    let us = s.exec.map(r_list, |&r| frequency_at(&v, r, s));
    let mut report = CheckReport::new("sharpness", Status::Pass, f64::INFINITY);
    for (&r, u) in r_list.iter().zip(us) {
        let u = u?;
        let margin = 0.5 * r * r - n as f64 - k as f64 + eps - u;
        report.margin = report.margin.min(margin);
        report = report.metric(&format!("U({r})"), u);
        if margin < 0.0 && report.status == Status::Pass {
            report.status = Status::Fail;
            report.detail = format!("U({r}) = {u} exceeds the bound by {}", -margin);
        }
    }
    Ok(report)
}

/// Right side of the `U'` lower bound without the `O(r^{1-n})` term, and
/// the denominator `2n + 4U - r^2` that divides that term.
pub fn uprime_main_term(n: usize, lambda: f64, r: f64, u: f64) -> (f64, f64) {
    let n = n as f64;
    let den = 2.0 * n + 4.0 * u - r * r;
    let main = 0.5 * r * (1.0 + r * r / (den + 4.0) - (2.0 * n + 8.0 * lambda) / den);
    (main, den)
}

/// Step of the five-point stencil used for `U'`.
const UPRIME_STEP: f64 = 0.02;

/// Checks `U' ≥ r/2` past a measured radius and the refined lower bound
/// with `O(r^{1-n})` replaced by `Ĉ r^{1-n}`.
///
/// `U'` comes from a five-point stencil at two step sizes; their difference
/// is the noise estimate. A negative slack within noise is retried once on a
/// refined quadrature, then reported inconclusive. With `c_hat = None`, `Ĉ`
/// is the smallest nonnegative constant that works on the lower half of the
/// tail, and the upper half is then checked with it frozen.
pub fn verify_uprime(
    v: &ProductEigenfunction,
    grid: &[f64],
    c_hat: Option<f64>,
    s: &FreqSettings,
) -> Result<CheckReport> {
    if grid.len() < 2 * MIN_TAIL {
        return Err(Error::InvalidInput(format!(
            "need at least {} radii",
            2 * MIN_TAIL
        )));
    }
    let lambda = v.lambda();
    let n = v.dim();
    let r_last = *grid.last().expect("non-empty");
    let u_last = frequency_at(v, r_last, s)?;
    if u_last < 2.0 * lambda.abs() + 1.0 {
        return Ok(CheckReport::new("uprime", Status::Exempt, f64::NAN)
            .with_detail("bounded branch: limsup U ≤ 2|λ|")
            .metric("U_last", u_last));
    }

    let sample = |s: &FreqSettings| -> Result<Vec<(f64, f64, f64)>> {
        s.exec
            .map(grid, |&r| {
                let h = UPRIME_STEP.min(0.25 * r);
                let u = frequency_at(v, r, s)?;
                let d1 = uprime_local(v, r, h, s)?;
                let d2 = uprime_local(v, r, 0.5 * h, s)?;
                Ok((u, d2, (d1 - d2).abs()))
            })
            .into_iter()
            .collect()
    };
    let mut data = sample(s)?;
    let noisy = |d: &[(f64, f64, f64)]| {
        grid.iter().zip(d).any(|(&r, &(_, up, noise))| {
            let slack = up - 0.5 * r;
            slack < 0.0 && -slack <= noise
        })
    };
    if noisy(&data) {
        data = sample(&s.refined(2))?;
    }

    let m = grid.len();
    let Some(j0) = tail_start(m, |j| data[j].1 >= 0.5 * grid[j]) else {
        return Ok(
            CheckReport::new("uprime", Status::Inconclusive, data[m - 1].1 - 0.5 * r_last)
                .with_detail("U' < r/2 at the end of the grid"),
        );
    };
    let half_r = min_over(j0..m, |j| data[j].1 - 0.5 * grid[j]);
    if m - j0 < 2 * MIN_TAIL {
        return Ok(CheckReport::new("uprime", Status::Inconclusive, half_r)
            .with_detail(format!("tail past R has only {} radii", m - j0))
            .metric("measured_R", grid[j0]));
    }

    // Needed constant at each radius, from U' ≥ main - Ĉ r^{1-n} / den.
    let mut needed = Vec::with_capacity(m - j0);
    for j in j0..m {
        let r = grid[j];
        let (main, den) = uprime_main_term(n, lambda, r, data[j].0);
        if !(den > 0.0) {
            return Ok(CheckReport::new("uprime", Status::Inconclusive, f64::NAN)
                .with_detail(format!("2n + 4U - r^2 ≤ 0 at r = {r}")));
        }
        needed.push((main - data[j].1) * den * r.powi(n as i32 - 1));
    }
    let split = needed.len() / 2;
    let fitted = needed[..split].iter().copied().fold(0.0, f64::max);
    let c = c_hat.unwrap_or(fitted);
    let slack = min_over(j0..m, |j| {
        let r = grid[j];
        let (main, den) = uprime_main_term(n, lambda, r, data[j].0);
        data[j].1 - main + c * r.powi(1 - n as i32) / den
    });
    let noise = data[j0..].iter().map(|d| d.2).fold(0.0, f64::max);
    let status = if half_r < 0.0 || slack < 0.0 {
        if slack > -noise && half_r > -noise {
            Status::Inconclusive
        } else {
            Status::Fail
        }
    } else {
        Status::Pass
    };
    Ok(CheckReport::new("uprime", status, slack.min(half_r))
        .metric("measured_R", grid[j0])
        .metric("half_r_slack", half_r)
        .metric("bound_slack", slack)
        .metric("c_hat", c)
        .metric("c_needed", needed.iter().copied().fold(0.0, f64::max))
        .metric("fd_noise", noise))
}

/// `(log U)' ≥ -1e-6` at interior grid points for a drift-harmonic field.
pub fn monotonicity_check<F: EvaluableField + ?Sized>(
    v: &F,
    grid: &[f64],
    s: &FreqSettings,
) -> Result<CheckReport> {
    match v.potential() {
        Some(Potential::Constant(0.0)) => {}
        Some(_) => return Err(Error::Contract("monotonicity needs V ≡ 0".into())),
        None => {
            return Err(Error::Contract(
                "monotonicity needs a declared potential V ≡ 0".into(),
            ))
        }
    }
    if grid.len() < 3 {
        return Err(Error::InvalidInput("need at least three radii".into()));
    }
    let curve = compute_curve(v, grid, s)?;
    if let Some(j) = (0..curve.len()).find(|&j| !(curve.u[j] > 0.0)) {
        return Err(Error::Contract(format!(
            "U > 0 required; U({}) = {}",
            curve.r[j], curve.u[j]
        )));
    }
    let logu: Vec<f64> = curve.u.iter().map(|u| u.ln()).collect();
    let d = grid_derivative(grid, &logu);
    let (j, worst) = (1..d.len() - 1)
        .map(|j| (j, d[j]))
        .fold((1, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let status = if worst >= -1e-6 {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(CheckReport::new("monotonicity", status, worst).metric("worst_radius", grid[j]))
}

/// Measured `U` with a five-point `U'` as a trajectory for `P_{f, sup V}`,
/// restricted to radii where `U > 0`. Also returns the number of skipped radii.
pub fn frequency_trajectory(
    v: &ProductEigenfunction,
    grid: &[f64],
    s: &FreqSettings,
) -> Result<(Trajectory, usize)> {
    let params = FreqOpParams::gaussian(v.dim(), v.lambda())?;
    let data = s
        .exec
        .map(grid, |&r| -> Result<(f64, f64)> {
            let h = UPRIME_STEP.min(0.25 * r);
            Ok((frequency_at(v, r, s)?, uprime_local(v, r, h, s)?))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (mut r, mut u, mut up) = (Vec::new(), Vec::new(), Vec::new());
    for (&rr, (uu, dd)) in grid.iter().zip(data) {
        if uu > 0.0 {
            r.push(rr);
            u.push(uu);
            up.push(dd);
        }
    }
    let skipped = grid.len() - r.len();
    Ok((Trajectory::from_samples(&r, &u, &up, &params)?, skipped))
}

/// Sub-solution property `P_{f, sup V} U ≥ -tol` wherever `U > 0`.
pub fn subsolution_check(
    v: &ProductEigenfunction,
    grid: &[f64],
    tol: f64,
    s: &FreqSettings,
) -> Result<CheckReport> {
    let (traj, skipped) = frequency_trajectory(v, grid, s)?;
    if traj.is_empty() {
        return Ok(
            CheckReport::new("subsolution", Status::Inconclusive, f64::NAN)
                .with_detail("U ≤ 0 on the whole grid"),
        );
    }
    Ok(subsolution_report(&traj, tol).metric("skipped_nonpositive", skipped as f64))
}
