use super::operator::{escape_condition, Barrier, FreqOpParams};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::report::{CheckReport, Status};

/// Pointwise tolerance for differential-inequality certification.
pub const CERT_TOL: f64 = 1e-9;

/// `r1 (g(r1)/h(r1))^{1/ε}`: by this radius a sub-solution `h` must have
/// overtaken a barrier `g` with `P g ≤ -ε/r` (for `λ ≤ 0`).
pub fn overtaking_bound(r1: f64, h1: f64, g1: f64, eps: f64) -> f64 {
    r1 * (g1 / h1).powf(1.0 / eps)
}

fn same_grid(h: &Trajectory, g: &Trajectory) -> Result<()> {
    if h.r.len() != g.r.len()
        || h.r
            .iter()
            .zip(&g.r)
            .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(Error::InvalidInput(
            "trajectories must share one grid".into(),
        ));
    }
    if h.is_empty() {
        return Err(Error::InvalidInput("empty trajectory".into()));
    }
    Ok(())
}

/// `P h ≥ 0` and `P g ≤ -ε/r` at every node, up to [`CERT_TOL`].
fn certify(h: &Trajectory, g: &Trajectory, eps: f64) -> Result<()> {
    for j in 0..h.len() {
        let r = h.r[j];
        if h.pvalue[j] < -CERT_TOL * (1.0 + h.pvalue[j].abs()) {
            return Err(Error::Contract(format!(
                "P h = {} < 0 at r = {r}",
                h.pvalue[j]
            )));
        }
        if g.pvalue[j] > -eps / r + CERT_TOL {
            return Err(Error::Contract(format!(
                "P g = {} > -ε/r = {} at r = {r}",
                g.pvalue[j],
                -eps / r
            )));
        }
    }
    Ok(())
}

/// Checks the ordering claim of the maximum principle on a shared grid.
///
/// After the first node at or beyond `r_ref` where `h > g` (strictly), `h`
/// must stay above `g`. For `λ ≤ 0` the first crossing must also happen no
/// later than one grid step past [`overtaking_bound`] taken at the first node.
pub fn verify_max_principle(
    h: &Trajectory,
    g: &Trajectory,
    r_ref: f64,
    eps: f64,
    params: &FreqOpParams,
) -> Result<CheckReport> {
    same_grid(h, g)?;
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("ε must be positive, got {eps}")));
    }
    certify(h, g, eps)?;
    let m = h.len();
    let start = h.r.iter().position(|&r| r >= r_ref).unwrap_or(m);
    let cross = (start..m).find(|&j| h.h[j] > g.h[j]);
    let mut report;
    match cross {
        Some(jc) => {
            let worst = (jc..m)
                .map(|j| h.h[j] - g.h[j])
                .fold(f64::INFINITY, f64::min);
            let recross = (jc..m).find(|&j| h.h[j] <= g.h[j]);
            report = match recross {
                None => CheckReport::new("max_principle", Status::Pass, worst),
                Some(j) => CheckReport::new("max_principle", Status::Fail, worst)
                    .with_detail(format!("h <= g again at r = {}", h.r[j])),
            };
            report = report.metric("crossing_radius", h.r[jc]);
        }
        None => {
            report = CheckReport::new("max_principle", Status::Inconclusive, f64::NAN)
                .with_detail("h never rises above g on the grid")
                .metric("crossing_radius", f64::NAN);
        }
    }

    if params.lambda <= 0.0 {
        let step = if m > 1 { h.r[1] - h.r[0] } else { 0.0 };
        let bound = if h.h[0] >= g.h[0] {
            h.r[0]
        } else {
            overtaking_bound(h.r[0], h.h[0], g.h[0], eps)
        };
        let first = (0..m).find(|&j| h.h[j] > g.h[j]).map(|j| h.r[j]);
        report = report.metric("overtaking_bound", bound);
        report = report.metric("overtaking_measured", first.unwrap_or(f64::NAN));
        match first {
            Some(rc) if rc > bound + step + 1e-12 => {
                report.status = Status::Fail;
                report.detail = format!("overtook at r = {rc}, bound {bound}");
            }
            None if bound <= *h.r.last().expect("non-empty") => {
                report.status = Status::Fail;
                report.detail = format!("no overtaking by predicted radius {bound}");
            }
            _ => {}
        }
    }
    Ok(report)
}

/// Barrier-escape check for `λ > 0`.
///
/// Finds the first grid radius `r2` satisfying the escape condition, a node
/// `s ≥ r2` with `h(s) > 2λ + δ`, and then tracks `h` through the two
/// regimes: below `√λ r` it must increase; between `√λ r` and
/// `g0 = r^2/2 - n - 2λ - ε` it must satisfy `(h - √λ r)' ≥ (ε/2) √λ` (the
/// barrier only certifies `P g0 ≤ -ε/(2r)`). Passes when `h ≥ g0` on the whole
/// tail from a measured radius on.
pub fn verify_positive_lambda(
    h: &Trajectory,
    params: &FreqOpParams,
    delta: f64,
    eps: f64,
) -> Result<CheckReport> {
    let lambda = params.lambda;
    if !(lambda > 0.0) || !(delta > 0.0) || !(eps > 0.0) {
        return Err(Error::Parameter(format!(
            "need λ > 0, δ > 0, ε > 0; got λ={lambda}, δ={delta}, ε={eps}"
        )));
    }
    if h.is_empty() {
        return Err(Error::InvalidInput("empty trajectory".into()));
    }
    let n = params.n;
    let m = h.len();
    for j in 0..m {
        if h.pvalue[j] < -CERT_TOL * (1.0 + h.pvalue[j].abs()) {
            return Err(Error::Contract(format!(
                "P h = {} < 0 at r = {}",
                h.pvalue[j], h.r[j]
            )));
        }
    }
    let inconclusive = |why: &str| {
        CheckReport::new("positive_lambda", Status::Inconclusive, f64::NAN).with_detail(why)
    };
    let Some(j2) = (0..m).find(|&j| escape_condition(n, lambda, delta, h.r[j]) > 0.0) else {
        return Ok(inconclusive("escape condition never holds on the grid"));
    };
    let Some(js) = (j2..m).find(|&j| h.h[j] > 2.0 * lambda + delta) else {
        return Ok(inconclusive("h never exceeds 2λ + δ after r2"));
    };
    let g0 = Barrier::new(n, eps, lambda);
    let sl = lambda.sqrt();
    let mut regime_slack = f64::INFINITY;
    let mut violation = None;
    for j in js..m {
        let (r, hv, hp) = (h.r[j], h.h[j], h.hprime[j]);
        let g = g0.value(r);
        let slack = if hv < sl * r {
            hp
        } else if hv < g {
            hp - sl - 0.5 * eps * sl
        } else {
            continue;
        };
        regime_slack = regime_slack.min(slack);
        if slack < -CERT_TOL * (1.0 + hp.abs()) && violation.is_none() {
            violation = Some(r);
        }
    }
    let above = |j: usize| h.h[j] >= g0.value(h.r[j]);
    let r_meas = (js..m).rev().take_while(|&j| above(j)).last();
    let tail_margin = r_meas
        .map(|j0| {
            (j0..m)
                .map(|j| h.h[j] - g0.value(h.r[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .unwrap_or(f64::NAN);
    let mut report = match (violation, r_meas) {
        (Some(r), _) => CheckReport::new("positive_lambda", Status::Fail, regime_slack)
            .with_detail(format!("regime inequality fails at r = {r}")),
        (None, None) => inconclusive("h not yet above the barrier at the end of the grid"),
        (None, Some(_)) => CheckReport::new("positive_lambda", Status::Pass, tail_margin),
    };
    report = report
        .metric("r2", h.r[j2])
        .metric("escape_radius", h.r[js])
        .metric("regime_slack", regime_slack)
        .metric("measured_R", r_meas.map(|j| h.r[j]).unwrap_or(f64::NAN));
    Ok(report)
}

/// `P_{f,λ} U ≥ -tol` along a sampled frequency curve.
pub fn subsolution_report(traj: &Trajectory, tol: f64) -> CheckReport {
    let (j, worst) = traj
        .pvalue
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (j, &p)| if p < acc.1 { (j, p) } else { acc },
        );
    let status = if worst >= -tol {
        Status::Pass
    } else {
        Status::Fail
    };
    let mut report = CheckReport::new("subsolution", status, worst);
    if !traj.is_empty() {
        report = report.metric("worst_radius", traj.r[j]);
    }
    report
}
