use approx::assert_relative_eq;
use oufreq::ladder::{
    eigen_residual, growth_certificate, hermite_polynomial, integrate_basis, ladder_build,
    ladder_differentiate, ladder_eval, rat, rat_int, taylor_approx_check, taylor_approx_check_for,
    BasisTag, ClosedForm, LadderFunction, RationalPoly,
};

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn poly(c: &[i64]) -> RationalPoly {
    RationalPoly::from_i64(c)
}

/// `u0` from direct quadrature of `e^{s^2/4}`.
fn u0_oracle(x: f64) -> f64 {
    simpson(|s| (s * s / 4.0).exp(), 0.0, x, 20_000)
}

#[test]
fn base_rungs() {
    assert_eq!(
        ladder_build(0).unwrap().form,
        ClosedForm::new(poly(&[1]), poly(&[]), poly(&[]))
    );
    assert_eq!(
        ladder_build(-1).unwrap().form,
        ClosedForm::new(poly(&[]), poly(&[1]), poly(&[]))
    );
    assert_eq!(
        ladder_build(1).unwrap().form,
        ClosedForm::new(poly(&[0, 1]), poly(&[-2]), poly(&[]))
    );
}

#[test]
fn residuals_vanish_across_levels() {
    for k in -8..=8 {
        let f = ladder_build(k).unwrap();
        assert!(eigen_residual(&f).is_zero(), "k = {k}");
        assert!(f.parity_consistent(), "k = {k}");
    }
    let wrong = LadderFunction::new(2, ClosedForm::u0());
    assert!(!eigen_residual(&wrong).is_zero());
    let gauss = LadderFunction::new(-1, ClosedForm::gauss());
    assert!(eigen_residual(&gauss).is_zero());
}

#[test]
fn differentiation_steps_down() {
    for k in -6..=7 {
        assert_eq!(
            ladder_differentiate(&ladder_build(k).unwrap()),
            ladder_build(k - 1).unwrap(),
            "k = {k}"
        );
    }
    let g = ClosedForm::gauss().derivative();
    let half_x = RationalPoly::from_coeffs(vec![rat_int(0), rat(1, 2)]);
    assert_eq!(g, ClosedForm::new(poly(&[]), half_x, poly(&[])));
}

#[test]
fn basis_integrals() {
    assert_eq!(
        integrate_basis(0, BasisTag::Gauss).unwrap(),
        ClosedForm::u0()
    );
    let xg = integrate_basis(1, BasisTag::Gauss).unwrap();
    assert_eq!(xg, ClosedForm::new(poly(&[]), poly(&[2]), poly(&[-2])));
    let x2g = integrate_basis(2, BasisTag::Gauss).unwrap();
    assert_eq!(x2g, ClosedForm::new(poly(&[-2]), poly(&[0, 2]), poly(&[])));
}

#[test]
fn values_against_quadrature() {
    let u1 = ladder_build(1).unwrap();
    assert_eq!(u1.value_at_zero(), rat_int(-2));
    let u0 = ladder_build(0).unwrap();
    assert_relative_eq!(
        ladder_eval(&u0, 2.0, 0).unwrap().to_f64(),
        2.92530,
        epsilon = 5e-6
    );
    for x in [0.5, 2.0, 3.5, 6.0] {
        let u0x = u0_oracle(x);
        assert_relative_eq!(
            ladder_eval(&u0, x, 0).unwrap().to_f64(),
            u0x,
            max_relative = 1e-12
        );
        // u1 = ∫_0^x u0 - 2
        let u1x = simpson(u0_oracle, 0.0, x, 400) - 2.0;
        assert_relative_eq!(
            ladder_eval(&u1, x, 0).unwrap().to_f64(),
            u1x,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            ladder_eval(&u1, x, 1).unwrap().to_f64(),
            u0x,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            ladder_eval(&u1, x, 2).unwrap().to_f64(),
            (x * x / 4.0).exp(),
            max_relative = 1e-12
        );
    }
}

#[test]
fn growth_is_certified() {
    let samples: Vec<f64> = (0..100).map(|i| 1.0 + i as f64).collect();
    let u3 = ladder_build(3).unwrap();
    let c3 = growth_certificate(&u3, &samples);
    assert!(c3.is_finite() && c3 > 0.0);
    let scaled = ladder_eval(&u3, 10.0, 0)
        .unwrap()
        .abs()
        .scale_exp(4.0 * 10f64.ln() - 25.0)
        .to_f64();
    assert!(scaled <= c3 * (1.0 + 1e-12));
}

#[test]
fn hermite_low_degrees() {
    assert_eq!(hermite_polynomial(0).unwrap().poly, poly(&[1]));
    assert_eq!(hermite_polynomial(1).unwrap().poly, poly(&[0, 1]));
    assert_eq!(hermite_polynomial(2).unwrap().poly, poly(&[-2, 0, 1]));
    for k in 0..8 {
        assert!(eigen_residual(&hermite_polynomial(k).unwrap().as_ladder()).is_zero());
    }
}

/// `w(x) = e^{-x^2/4} u0(x)` from its bounded integrand.
fn w_oracle(x: f64) -> f64 {
    simpson(|t| (-t * (2.0 * x - t) / 4.0).exp(), 0.0, x, 20_000)
}

/// `R^e e^{-R^2/2} ∫_{R-1/R<|x|<R+1/R} u^2` for `u = E(x)·a(x)` with `E = e^{x^2/4}`
/// and `a` even in `|x|`.
fn rhs_core_oracle(a: impl Fn(f64) -> f64, r: f64, e: i32) -> f64 {
    let shell = simpson(
        |x| (0.5 * (x * x - r * r)).exp() * a(x).powi(2),
        r - 1.0 / r,
        r + 1.0 / r,
        400,
    );
    r.powi(e) * 2.0 * shell
}

#[test]
fn taylor_check_examples() {
    let h3 = hermite_polynomial(3).unwrap().as_ladder();
    assert!(taylor_approx_check_for(&h3, 1.0, 8.0)
        .unwrap()
        .lhs
        .is_zero());
    let r = 8.0;
    // k = 0: Taylor polynomial is 0, sup on [-1, 1] is u0(1)^2
    let c0 = taylor_approx_check(0, 1.0, r).unwrap();
    assert_relative_eq!(
        c0.lhs.to_f64(),
        u0_oracle(1.0).powi(2),
        max_relative = 1e-10
    );
    assert_relative_eq!(
        c0.rhs_core.to_f64(),
        rhs_core_oracle(w_oracle, r, 5),
        max_relative = 1e-8
    );
    // k = 1: u1 + 2 = ∫_0^x u0, monotone in |x|
    let c1 = taylor_approx_check(1, 1.0, r).unwrap();
    assert_relative_eq!(
        c1.lhs.to_f64(),
        simpson(u0_oracle, 0.0, 1.0, 200).powi(2),
        max_relative = 1e-9
    );
    let a1 = |x: f64| x * w_oracle(x) - 2.0;
    assert_relative_eq!(
        c1.rhs_core.to_f64(),
        rhs_core_oracle(a1, r, 7),
        max_relative = 1e-6
    );
}

/// Power-series oracle for `u_k`, built from the defining integrals.
struct Series(Vec<f64>);

impl Series {
    const LEN: usize = 90;

    fn u0() -> Self {
        // ∫_0^x e^{s^2/4} ds term by term
        let mut c = vec![0.0; Self::LEN];
        let mut t = 1.0;
        for j in 0..(Self::LEN - 1) / 2 {
            c[2 * j + 1] = t / (2 * j + 1) as f64;
            t /= 4.0 * (j + 1) as f64;
        }
        Series(c)
    }

    fn derivative(&self) -> Self {
        let mut c = vec![0.0; Self::LEN];
        for i in 1..Self::LEN {
            c[i - 1] = i as f64 * self.0[i];
        }
        Series(c)
    }

    fn integral(&self, constant: f64) -> Self {
        let mut c = vec![0.0; Self::LEN];
        c[0] = constant;
        for i in 0..Self::LEN - 1 {
            c[i + 1] = self.0[i] / (i + 1) as f64;
        }
        Series(c)
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

#[test]
fn ladder_eval_matches_series_oracle() {
    let mut series = vec![(0, Series::u0())];
    for k in 1..=3 {
        // u_k = ∫ u_{k-1} + d_k, with d_k cancelling the residual at 0:
        // u_k''(0) + (k/2) u_k(0) = 0 and u_k'' = u_{k-1}'
        let prev = &series.last().unwrap().1;
        let second = prev.derivative().eval(0.0);
        series.push((k, prev.integral(-2.0 * second / k as f64)));
    }
    let mut neg = vec![];
    let mut cur = Series::u0();
    for k in (-3..0).rev() {
        cur = cur.derivative();
        neg.push((k, Series(cur.0.clone())));
    }
    for (k, s) in series.iter().chain(neg.iter()) {
        let f = ladder_build(*k).unwrap();
        for x in [0.5, 1.0, 2.0, 4.0] {
            let got = ladder_eval(&f, x, 0).unwrap().to_f64();
            assert_relative_eq!(got, s.eval(x), max_relative = 1e-9);
        }
    }
}

#[test]
fn constants_vanish_at_even_levels() {
    assert_eq!(oufreq::ladder::ladder_constant(1).unwrap(), rat_int(-2));
    for j in [2, 4, 6, 8] {
        assert_eq!(
            oufreq::ladder::ladder_constant(j).unwrap(),
            rat_int(0),
            "d_{j}"
        );
    }
    for j in [3, 5, 7] {
        assert_ne!(
            oufreq::ladder::ladder_constant(j).unwrap(),
            rat_int(0),
            "d_{j}"
        );
    }
}
