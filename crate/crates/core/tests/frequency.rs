use std::f64::consts::PI;

use approx::assert_relative_eq;
use oufreq::frequency::{
    compute_D, compute_I, compute_curve, frequency_at, monotonicity_check, radius_grid,
    rellich_check, sphere_integral, unit_sphere_area, verify_growth, verify_sharpness,
    verify_uprime, DMode, EvaluableField, FreqSettings, Jet, Potential, ProductEigenfunction,
    MAX_DIM,
};
use oufreq::numerics::{u0_log, u0_scaled, u0_scaled_derivative, LogReal};
use oufreq::{Error, Status};

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `w` from its bounded integrand, independent of the crate's table.
fn w_oracle(x: f64) -> f64 {
    simpson(|t| (-t * (2.0 * x - t) / 4.0).exp(), 0.0, x, 20_000)
}

fn settings() -> FreqSettings {
    FreqSettings::default()
}

/// `|x|^d`, homogeneous of degree `d`.
struct Homogeneous {
    n: usize,
    d: f64,
}

impl EvaluableField for Homogeneous {
    fn dim(&self) -> usize {
        self.n
    }

    fn jet(&self, x: &[f64]) -> Jet {
        let rho2: f64 = x[..self.n].iter().map(|t| t * t).sum();
        let mut grad = [LogReal::ZERO; MAX_DIM];
        for (g, &xi) in grad.iter_mut().zip(&x[..self.n]) {
            *g = LogReal::from_f64(self.d * rho2.powf(0.5 * self.d - 1.0) * xi);
        }
        Jet {
            value: LogReal::from_f64(rho2.powf(0.5 * self.d)),
            grad,
        }
    }
}

/// `c + u0(x_1)` in one dimension: drift harmonic.
struct ShiftedU0(f64);

impl EvaluableField for ShiftedU0 {
    fn dim(&self) -> usize {
        1
    }

    fn jet(&self, x: &[f64]) -> Jet {
        let mut grad = [LogReal::ZERO; MAX_DIM];
        grad[0] = LogReal::ONE.scale_exp(0.25 * x[0] * x[0]);
        Jet {
            value: u0_log(x[0]) + LogReal::from_f64(self.0),
            grad,
        }
    }

    fn potential(&self) -> Option<Potential> {
        Some(Potential::Constant(0.0))
    }
}

#[test]
fn sphere_integral_examples() {
    let one = |_: &[f64]| LogReal::ONE;
    assert_relative_eq!(
        sphere_integral(one, 3.0, 2, 64).unwrap().to_f64(),
        2.0 * PI * 3.0,
        max_relative = 1e-13
    );
    let x1sq = |x: &[f64]| LogReal::from_f64(x[0] * x[0]);
    assert_relative_eq!(
        sphere_integral(x1sq, 1.0, 3, 32).unwrap().to_f64(),
        4.0 * PI / 3.0,
        max_relative = 1e-12
    );
    let u0sq = |x: &[f64]| u0_log(x[0]).square();
    let u0_2 = simpson(|s| (s * s / 4.0).exp(), 0.0, 2.0, 10_000);
    assert_relative_eq!(
        sphere_integral(u0sq, 2.0, 1, 2).unwrap().to_f64(),
        2.0 * u0_2 * u0_2,
        max_relative = 1e-11
    );
    assert_relative_eq!(u0_2, 2.92530, epsilon = 5e-6);
}

#[test]
fn i_examples() {
    let s = settings();
    for n in 1..=3 {
        let one = ProductEigenfunction::hermite(0, n).unwrap();
        for r in [0.5, 3.0, 11.0] {
            assert_relative_eq!(
                compute_I(&one, r, &s).unwrap().to_f64(),
                unit_sphere_area(n),
                max_relative = 1e-12
            );
        }
    }
    let x1 = ProductEigenfunction::hermite(1, 2).unwrap();
    for r in [1.0, 4.0] {
        assert_relative_eq!(
            compute_I(&x1, r, &s).unwrap().to_f64(),
            PI * r * r,
            max_relative = 1e-12
        );
    }
    let v0 = ProductEigenfunction::v_k(0, 1).unwrap();
    let u0_2 = simpson(|s| (s * s / 4.0).exp(), 0.0, 2.0, 10_000);
    assert_relative_eq!(
        compute_I(&v0, 2.0, &s).unwrap().to_f64(),
        2.0 * u0_2 * u0_2,
        max_relative = 1e-11
    );
}

#[test]
fn d_examples() {
    let s = settings();
    for (n, d) in [(1, 1.0), (2, 3.0), (3, 2.5)] {
        let u = Homogeneous { n, d };
        for r in [0.7, 2.0, 5.0] {
            let dd = compute_D(&u, r, DMode::Boundary, &s).unwrap().to_f64();
            assert_relative_eq!(
                dd,
                d * r.powf(2.0 * d) * unit_sphere_area(n),
                max_relative = 1e-12
            );
            assert_relative_eq!(frequency_at(&u, r, &s).unwrap(), d, max_relative = 1e-12);
        }
    }
    let one = ProductEigenfunction::hermite(0, 2).unwrap();
    assert!(compute_D(&one, 3.0, DMode::Boundary, &s).unwrap().is_zero());
    let v1 = ProductEigenfunction::v_k(1, 2).unwrap();
    let a = compute_D(&v1, 3.0, DMode::Boundary, &s).unwrap();
    let b = compute_D(&v1, 3.0, DMode::Bulk, &s).unwrap();
    assert!(a.rel_diff(b) < 1e-6, "{a} vs {b}");
    assert!(matches!(
        compute_D(&Homogeneous { n: 1, d: 2.0 }, 1.0, DMode::Bulk, &s),
        Err(Error::Contract(_))
    ));
}

#[test]
fn u_examples() {
    let s = settings();
    for n in 1..=3 {
        let x1 = ProductEigenfunction::hermite(1, n).unwrap();
        let grid = radius_grid(1.0, 6.0, 1.0).unwrap();
        let c = compute_curve(&x1, &grid, &s).unwrap();
        for (j, &r) in grid.iter().enumerate() {
            assert_relative_eq!(c.u[j], 1.0, max_relative = 1e-12);
            assert_relative_eq!(
                c.w[j],
                1.0 - r * r / 4.0 + n as f64 / 2.0,
                max_relative = 1e-12
            );
        }
    }
    let h2 = ProductEigenfunction::hermite(2, 1).unwrap();
    assert!((frequency_at(&h2, 40.0, &s).unwrap() - 2.0).abs() < 5e-3);
    // v0 in one dimension: I = 2u0^2, D = 2 r u0 u0', so U = r e^{r^2/4}/u0 = r/w
    let v0 = ProductEigenfunction::v_k(0, 1).unwrap();
    let u10 = frequency_at(&v0, 10.0, &s).unwrap();
    assert_relative_eq!(u10, 10.0 / w_oracle(10.0), max_relative = 1e-10);
    assert!((u10 - 48.96).abs() < 0.02);
}

#[test]
fn log_i_derivative_is_two_u_over_r() {
    let s = settings();
    for levels in [vec![0], vec![1, 0], vec![2, 0, -1]] {
        let v = ProductEigenfunction::new(&levels).unwrap();
        let h = 1e-3;
        for r in [2.0, 4.5, 7.0] {
            let li = |t: f64| compute_I(&v, t, &s).unwrap().logmag();
            let fd = (li(r + h) - li(r - h)) / (2.0 * h);
            let u = frequency_at(&v, r, &s).unwrap();
            assert_relative_eq!(fd, 2.0 * u / r, max_relative = 1e-5);
        }
    }
}

#[test]
fn rellich_examples() {
    let s = settings();
    let one = ProductEigenfunction::hermite(0, 2).unwrap();
    let z = rellich_check(&one, &Potential::Constant(0.0), 2.0, &s).unwrap();
    assert!(z.lhs.is_zero() && z.rhs.abs().to_f64() < 1e-12);
    let h1 = ProductEigenfunction::hermite(1, 1).unwrap();
    assert!(
        rellich_check(&h1, &Potential::Constant(0.5), 2.0, &s)
            .unwrap()
            .rel_diff()
            < 1e-8
    );
    let u0 = ProductEigenfunction::new(&[0, 0]).unwrap();
    assert!(
        rellich_check(&u0, &Potential::Constant(0.0), 4.0, &s)
            .unwrap()
            .rel_diff()
            < 1e-6
    );
}

#[test]
fn growth_examples() {
    let s = settings();
    let grid = radius_grid(1.0, 20.0, 0.5).unwrap();
    let v0 = ProductEigenfunction::v_k(0, 1).unwrap();
    let (rep, curve) = verify_growth(&v0, 0.1, 0.1, &grid, &s).unwrap();
    assert_eq!(rep.status, Status::Pass);
    for (j, &r) in curve.r.iter().enumerate() {
        let oracle = r / w_oracle(r) - (r * r / 2.0 - 1.1);
        assert!((curve.margin[j] - oracle).abs() < 1e-9 * r * r, "r={r}");
        // U = r^2/2 - 1 - 4/r^2 - 40/r^4 + O(r^-6)
        if r >= 10.0 {
            assert!(
                (oracle - (0.1 - 4.0 / (r * r) - 40.0 / r.powi(4))).abs() < 1e3 / r.powi(6),
                "r={r}"
            );
        }
        if r >= 7.5 {
            assert!(curve.margin[j] > 0.0, "r={r}");
        }
    }
    let h3 = ProductEigenfunction::hermite(3, 1).unwrap();
    let (rep, _) = verify_growth(&h3, 0.1, 0.1, &radius_grid(1.0, 40.0, 0.5).unwrap(), &s).unwrap();
    assert_eq!(rep.status, Status::Exempt);
    let v1 = ProductEigenfunction::v_k(1, 2).unwrap();
    let (rep, curve) = verify_growth(&v1, 0.1, 0.1, &grid, &s).unwrap();
    assert_eq!(rep.status, Status::Pass);
    let last = curve.len() - 1;
    assert!(curve.u[last] > 0.5 * 400.0 - 3.1);
}

#[test]
fn sharpness_examples() {
    let s = settings();
    let r = verify_sharpness(0, 1, 0.1, &[8.0, 10.0, 12.0, 20.0], &s).unwrap();
    assert_eq!(r.status, Status::Pass);
    let v0 = ProductEigenfunction::v_k(0, 1).unwrap();
    for rr in [3.0, 6.0, 9.0] {
        let u = frequency_at(&v0, rr, &s).unwrap();
        assert!(u <= rr * rr / 2.0 - 1.0 + 0.1);
    }
}

#[test]
fn uprime_examples() {
    let s = settings();
    let v0 = ProductEigenfunction::v_k(0, 1).unwrap();
    // U = r/w, so U' = (w - r w')/w^2
    for r in [2.0, 5.0, 10.0] {
        let w = u0_scaled(r);
        let exact = (w - r * u0_scaled_derivative(r)) / (w * w);
        assert!(exact >= r / 2.0);
        let fd = oufreq::frequency::uprime_local(&v0, r, 1e-2, &s).unwrap();
        assert_relative_eq!(fd, exact, max_relative = 1e-6);
    }
    let tail = radius_grid(4.0, 20.0, 0.5).unwrap();
    assert_eq!(
        verify_uprime(
            &ProductEigenfunction::hermite(2, 1).unwrap(),
            &tail,
            None,
            &s
        )
        .unwrap()
        .status,
        Status::Exempt
    );
    let rep = verify_uprime(&ProductEigenfunction::v_k(1, 2).unwrap(), &tail, None, &s).unwrap();
    assert_eq!(rep.status, Status::Pass, "{rep}");
}

#[test]
fn monotonicity_examples() {
    let s = settings();
    let grid = radius_grid(1.0, 12.0, 0.25).unwrap();
    let u0x1 = ProductEigenfunction::new(&[0, 0]).unwrap();
    assert!(u0x1.lambda() == 0.0);
    assert_eq!(
        monotonicity_check(&u0x1, &grid, &s).unwrap().status,
        Status::Pass
    );
    assert_eq!(
        monotonicity_check(&ShiftedU0(3.0), &grid, &s)
            .unwrap()
            .status,
        Status::Pass
    );
    let one = ProductEigenfunction::hermite(0, 1).unwrap();
    assert!(monotonicity_check(&one, &grid, &s).is_err());
}

#[test]
fn rellich_sides_vanish_where_the_oracle_does() {
    // u = (x1 x3 / 4) e^{|x|^2/4}, V = -5/2: both sides are proportional to
    // r^2/4 - 2/r^2 - 1/2, which vanishes at r = 2
    let s = settings();
    let v = ProductEigenfunction::new(&[-2, -1, -2]).unwrap();
    let pot = v.potential().unwrap();
    let at2 = rellich_check(&v, &pot, 2.0, &s).unwrap();
    assert!(at2.lhs.abs() < at2.scale.scale(1e-9) && at2.rhs.abs() < at2.scale.scale(1e-9));
    assert!(at2.rel_diff() < 1e-9);
    for r in [1.5, 3.0, 5.0] {
        let sides = rellich_check(&v, &pot, r, &s).unwrap();
        assert!(sides.rel_diff() < 1e-8, "r={r}");
        let factor = r * r / 4.0 - 2.0 / (r * r) - 0.5;
        assert_eq!(sides.lhs.sign(), if factor > 0.0 { 1 } else { -1 }, "r={r}");
    }
}
