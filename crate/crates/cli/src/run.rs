use std::io::Write as _;
use std::path::Path;

use oufreq::comparison::{
    chooseg, integrate_extremal, verify_max_principle, verify_positive_lambda, Barrier,
    FreqOpParams, Trajectory,
};
use oufreq::cylinder::{
    check_diffineq, condition_one, cylinder_curve, fit_goal_constant, verify_goal,
    CylinderFunction, GoalParams, Mode, Profile,
};
use oufreq::frequency::{
    compute_curve, growth_report, monotonicity_check, radius_grid, subsolution_check,
    verify_growth, verify_sharpness, verify_uprime, FreqSettings, ProductEigenfunction,
};
use oufreq::ladder::ladder_build;
use oufreq::{CheckReport, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{CommandKind, Format, RunConfig};
use crate::error::{CliError, EXIT_CHECK_FAILED, EXIT_PASS};

/// Seed for the randomized extremal starts of the comparison suite.
pub const COMPARE_SEED: u64 = 0x5eed;
/// Number of randomized extremal starts.
pub const COMPARE_STARTS: usize = 50;
/// Radii for the sharpness and cylinder bound checks.
pub const CHECK_RADII: [f64; 3] = [8.0, 10.0, 12.0];

/// Checks in declaration order plus the overall verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub command: CommandKind,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

/// Result of one invocation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: Option<Summary>,
}

fn settings(cfg: &RunConfig) -> FreqSettings {
    let mut s = FreqSettings::default();
    if let Some(nodes) = cfg.nodes {
        s.quad.radial_nodes = nodes;
    }
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &cfg.out {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Suites selected by `--suite`, in declaration order.
fn selected<'a>(cfg: &RunConfig, all: &[&'a str]) -> Result<Vec<&'a str>, CliError> {
    match cfg.suite.as_deref() {
        None | Some("all") => Ok(all.to_vec()),
        Some(name) => all
            .iter()
            .find(|s| **s == name)
            .map(|s| vec![*s])
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown suite {name}; choose from {}",
                    all.join(", ")
                ))
            }),
    }
}

fn grid(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    Ok(radius_grid(cfg.r_min, cfg.r_max, cfg.r_step)?)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        CommandKind::Ladder => {
            let f = ladder_build(cfg.k)?;
            emit(cfg, &to_json(&f.to_json())?)?;
            Ok(Outcome {
                exit_code: EXIT_PASS,
                summary: None,
            })
        }
        CommandKind::Freq => {
            let v = ProductEigenfunction::new(&cfg.levels)?;
            let mut curve = compute_curve(&v, &grid(cfg)?, &settings(cfg))?;
            let n = cfg.n as f64;
            let lambda = v.lambda();
            let eps = cfg.eps;
            curve.set_margin(|r, u| u - (0.5 * r * r - n - 2.0 * lambda - eps));
            let bytes = match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => curve.to_csv().into_bytes(),
                Format::Json => to_json(&CurveJson::from(&curve))?,
            };
            emit(cfg, &bytes)?;
            Ok(Outcome {
                exit_code: EXIT_PASS,
                summary: None,
            })
        }
        CommandKind::Verify => checks(cfg, verify_suites(cfg)?),
        CommandKind::Compare => checks(cfg, compare_suites(cfg)?),
        CommandKind::Cylinder => checks(cfg, cylinder_suites(cfg)?),
    }
}

/// Column-major JSON form of a frequency curve.
#[derive(Serialize)]
struct CurveJson {
    n: usize,
    r: Vec<f64>,
    #[serde(rename = "logI")]
    log_i: Vec<f64>,
    #[serde(rename = "logD")]
    log_d: Vec<f64>,
    #[serde(rename = "U")]
    u: Vec<f64>,
    #[serde(rename = "Uprime")]
    uprime: Vec<f64>,
    #[serde(rename = "W")]
    w: Vec<f64>,
    margin: Vec<f64>,
}

impl From<&oufreq::frequency::FrequencyCurve> for CurveJson {
    fn from(c: &oufreq::frequency::FrequencyCurve) -> Self {
        CurveJson {
            n: c.n,
            r: c.r.clone(),
            log_i: c.i.iter().map(|x| x.logmag()).collect(),
            log_d: c.d.iter().map(|x| x.logmag()).collect(),
            u: c.u.clone(),
            uprime: c.uprime.clone(),
            w: c.w.clone(),
            margin: c.margin.clone(),
        }
    }
}

/// Reports plus an optional CSV artifact.
struct SuiteOutput {
    reports: Vec<CheckReport>,
    csv: Option<String>,
}

fn checks(cfg: &RunConfig, out: SuiteOutput) -> Result<Outcome, CliError> {
    let passed = out.reports.iter().all(CheckReport::passed);
    for r in &out.reports {
        eprintln!("{r}");
    }
    let summary = Summary {
        command: cfg.command,
        passed,
        checks: out.reports,
    };
    let json = to_json(&summary)?;
    match (cfg.format.unwrap_or(Format::Json), out.csv) {
        (Format::Csv, Some(csv)) => {
            emit(cfg, csv.as_bytes())?;
            std::io::stdout().write_all(&json)?;
        }
        (Format::Csv, None) => {
            return Err(CliError::Usage("this suite has no CSV artifact".into()))
        }
        (Format::Json, _) => emit(cfg, &json)?,
    }
    let exit_code = if passed { EXIT_PASS } else { EXIT_CHECK_FAILED };
    Ok(Outcome {
        exit_code,
        summary: Some(summary),
    })
}

/// Marks a report that could not be produced as a failure instead of aborting
/// the remaining suites.
fn or_failed(name: &str, r: oufreq::Result<CheckReport>) -> CheckReport {
    r.unwrap_or_else(|e| CheckReport::new(name, Status::Fail, f64::NAN).with_detail(e.to_string()))
}

fn verify_suites(cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    let suites = selected(
        cfg,
        &[
            "growth",
            "sharpness",
            "uprime",
            "monotonicity",
            "subsolution",
        ],
    )?;
    let v = ProductEigenfunction::new(&cfg.levels)?;
    let s = settings(cfg);
    let g = grid(cfg)?;
    let mut reports = Vec::new();
    let mut csv = None;
    for suite in suites {
        let report = match suite {
            "growth" => {
                let (r, curve) = verify_growth(&v, cfg.eps, cfg.delta, &g, &s)?;
                csv = Some(curve.to_csv());
                r
            }
            "sharpness" => {
                let k = cfg.levels[0];
                if cfg.levels[1..].iter().any(|&l| l != 0) || k < 0 {
                    CheckReport::new("sharpness", Status::Exempt, f64::NAN)
                        .with_detail("levels are not of the form (k, 0, ..., 0) with k ≥ 0")
                } else {
                    let radii: Vec<f64> = CHECK_RADII
                        .iter()
                        .copied()
                        .filter(|&r| r <= cfg.r_max)
                        .collect();
                    if radii.is_empty() {
                        CheckReport::new("sharpness", Status::Inconclusive, f64::NAN)
                            .with_detail("r_max below the sampled radii")
                    } else {
                        or_failed("sharpness", verify_sharpness(k, cfg.n, cfg.eps, &radii, &s))
                    }
                }
            }
            "uprime" => {
                let tail: Vec<f64> = g.iter().copied().filter(|&r| r >= 4.0).collect();
                if tail.len() < 10 {
                    CheckReport::new("uprime", Status::Inconclusive, f64::NAN)
                        .with_detail("fewer than 10 radii at r ≥ 4")
                } else {
                    or_failed("uprime", verify_uprime(&v, &tail, None, &s))
                }
            }
            "monotonicity" => {
                if v.lambda() != 0.0 {
                    CheckReport::new("monotonicity", Status::Exempt, f64::NAN)
                        .with_detail("not drift harmonic")
                } else {
                    or_failed("monotonicity", monotonicity_check(&v, &g, &s))
                }
            }
            "subsolution" => or_failed("subsolution", subsolution_check(&v, &g, 1e-5, &s)),
            _ => unreachable!("suite list is fixed"),
        };
        reports.push(report);
    }
    if csv.is_none() && cfg.format == Some(Format::Csv) {
        let mut curve = compute_curve(&v, &g, &s)?;
        growth_report(&mut curve, v.lambda(), cfg.eps, cfg.delta)?;
        csv = Some(curve.to_csv());
    }
    Ok(SuiteOutput { reports, csv })
}

fn compare_suites(cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    let suites = selected(cfg, &["operator", "barrier"])?;
    let lambda = cfg.lambda.unwrap_or(0.0);
    let n = cfg.n;
    let params = FreqOpParams::gaussian(n, lambda)?;
    let mut reports = Vec::new();
    let mut csv = None;
    for suite in suites {
        match suite {
            "operator" => {
                let choice = chooseg(n, cfg.eps, lambda)?;
                reports.push(
                    CheckReport::new("chooseg", Status::Pass, choice.min_slack)
                        .metric("r1", choice.r1)
                        .metric("positivity_radius", choice.positivity_radius),
                );
            }
            "barrier" if lambda > 0.0 => {
                let r0 = cfg.r_min.max(1.0);
                let h0 = 2.0 * lambda + cfg.delta + 0.1;
                let r_max = cfg.r_max.max(r0 + 1.0);
                let h = integrate_extremal(&params, r0, h0, r_max)?;
                reports.push(or_failed(
                    "positive_lambda",
                    verify_positive_lambda(&h, &params, cfg.delta, cfg.eps),
                ));
                csv = Some(h.to_csv());
            }
            "barrier" => {
                let choice = chooseg(n, cfg.eps, lambda)?;
                let barrier = Barrier::new(n, cfg.eps, lambda);
                let r1 = choice.r1;
                let r_max = cfg.r_max.max(4.0 * r1);
                let g1 = barrier.value(r1);
                let mut rng = ChaCha8Rng::seed_from_u64(COMPARE_SEED);
                let mut parts = Vec::with_capacity(COMPARE_STARTS);
                for j in 0..COMPARE_STARTS {
                    let h0 = g1 * rng.random_range(0.05..2.0);
                    let h = integrate_extremal(&params, r1, h0, r_max)?;
                    let g = Trajectory::from_fn(
                        &h.r,
                        |r| barrier.value(r),
                        |r| barrier.slope(r),
                        &params,
                    )?;
                    // The barrier certifies P g ≤ -(ε/2)/r.
                    let rep = or_failed(
                        "max_principle",
                        verify_max_principle(&h, &g, r1, 0.5 * cfg.eps, &params),
                    );
                    if j == 0 {
                        csv = Some(h.to_csv());
                    }
                    parts.push(rep);
                }
                let mut all = CheckReport::combine("max_principle", &parts)
                    .metric("starts", COMPARE_STARTS as f64);
                all = all.metric("r1", r1);
                reports.push(all);
            }
            _ => unreachable!("suite list is fixed"),
        }
    }
    Ok(SuiteOutput { reports, csv })
}

/// `e^{x^2/4} + x cos θ / 20`, a perturbed eigenfunction.
pub fn perturbed_gauss() -> CylinderFunction {
    CylinderFunction::new(vec![
        Mode::cos(0, Profile::gauss()),
        Mode::cos(1, Profile::polynomial(&[0, 1]).scaled(1, 20)),
    ])
    .expect("distinct modes")
}

/// `x cos θ + e^{x^2/4} / 10`.
pub fn mixed_profile() -> CylinderFunction {
    CylinderFunction::new(vec![
        Mode::cos(0, Profile::gauss().scaled(1, 10)),
        Mode::cos(1, Profile::polynomial(&[0, 1])),
    ])
    .expect("distinct modes")
}

/// Exact solutions of `L v = v/2` used to fit the bound's constant.
pub fn exact_family() -> oufreq::Result<Vec<CylinderFunction>> {
    Ok(vec![
        CylinderFunction::gauss(),
        CylinderFunction::exact(1, false)?,
        CylinderFunction::exact(2, true)?,
    ])
}

fn cylinder_suites(cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    let suites = selected(cfg, &["diffineq", "goal"])?;
    let s = settings(cfg);
    let g = grid(cfg)?;
    let big_lambda = cfg.lambda.unwrap_or(0.2);
    let eps = cfg.eps;
    let mut reports = Vec::new();
    for suite in suites {
        match suite {
            "diffineq" => {
                for (name, v) in [
                    ("diffineq_gauss", CylinderFunction::gauss()),
                    ("diffineq_mixed", mixed_profile()),
                    ("diffineq_perturbed", perturbed_gauss()),
                ] {
                    let mut r = or_failed(name, check_diffineq(&v, &g, &s));
                    r.name = name.into();
                    reports.push(r);
                }
            }
            "goal" => {
                let family = exact_family()?;
                let c_hat = fit_goal_constant(&family, &CHECK_RADII, eps, big_lambda, &s)?;
                for &radius in &CHECK_RADII {
                    let p = GoalParams {
                        psi_norm_sq: 0.0,
                        eps,
                        lambda: big_lambda,
                        radius,
                    };
                    let parts: Vec<CheckReport> = family
                        .iter()
                        .map(|v| or_failed("goal", verify_goal(v, &p, c_hat, &s)))
                        .collect();
                    reports.push(
                        CheckReport::combine(format!("goal_exact_R{radius}"), &parts)
                            .metric("c_hat", c_hat),
                    );
                }
                let v = perturbed_gauss();
                let radius = CHECK_RADII[1];
                let need = condition_one(&v, eps, radius, &s)?.needed_norm_sq;
                let p = GoalParams {
                    psi_norm_sq: need * 1.01,
                    eps,
                    lambda: big_lambda,
                    radius,
                };
                let mut r = or_failed("goal", verify_goal(&v, &p, c_hat, &s));
                r.name = format!("goal_perturbed_R{radius}");
                reports.push(r);
            }
            _ => unreachable!("suite list is fixed"),
        }
    }
    let csv = Some(cylinder_curve(&CylinderFunction::gauss(), &g, &s)?.to_csv());
    Ok(SuiteOutput { reports, csv })
}
