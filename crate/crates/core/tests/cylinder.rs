use approx::assert_relative_eq;
use oufreq::cylinder::{
    check_diffineq, compute_E_UE, condition_one, diffineq_rhs, direct_quantities,
    fit_goal_constant, verify_goal, CylinderFunction, GoalParams, Mode, Profile,
};
use oufreq::frequency::{radius_grid, FreqSettings};
use oufreq::Status;
use proptest::prelude::*;

fn s() -> FreqSettings {
    FreqSettings::default()
}

fn mixed() -> CylinderFunction {
    CylinderFunction::new(vec![
        Mode::cos(0, Profile::gauss().scaled(1, 10)),
        Mode::cos(1, Profile::polynomial(&[0, 1])),
    ])
    .unwrap()
}

fn perturbed() -> CylinderFunction {
    CylinderFunction::new(vec![
        Mode::cos(0, Profile::gauss()),
        Mode::cos(1, Profile::polynomial(&[0, 1]).scaled(1, 20)),
    ])
    .unwrap()
}

#[test]
fn gauss_has_equal_d_and_e() {
    for r in [2.0, 6.0, 11.0] {
        let q = compute_E_UE(&CylinderFunction::gauss(), r, &s()).unwrap();
        assert!(q.d.rel_diff(q.e) < 1e-10);
        assert!(q.d.rel_diff(q.d_bulk) < 1e-10);
        // v = e^{x^2/4}: I = 4π e^{r^2/2}, D = 2π r^2 e^{r^2/2}
        assert_relative_eq!(q.u, r * r / 2.0, max_relative = 1e-12);
    }
}

#[test]
fn non_eigenfunction_has_larger_e() {
    let xc = CylinderFunction::new(vec![Mode::cos(1, Profile::polynomial(&[0, 1]))]).unwrap();
    for r in [2.0, 6.0] {
        let q = compute_E_UE(&xc, r, &s()).unwrap();
        assert!(q.e > q.d);
        // x cos θ: U = 1
        assert_relative_eq!(q.u, 1.0, max_relative = 1e-12);
    }
}

#[test]
fn zero_is_rejected() {
    let z = CylinderFunction::new(vec![Mode::cos(0, Profile::zero())]).unwrap();
    assert!(compute_E_UE(&z, 3.0, &s()).is_err());
}

#[test]
fn diffineq_examples() {
    let grid = radius_grid(4.0, 12.0, 0.25).unwrap();
    for v in [CylinderFunction::gauss(), mixed(), perturbed()] {
        let rep = check_diffineq(&v, &grid, &s()).unwrap();
        assert_eq!(rep.status, Status::Pass, "{rep}");
    }
}

#[test]
fn diffineq_rhs_spot_check() {
    let q = compute_E_UE(&mixed(), 6.0, &s()).unwrap();
    let (r, n) = (6.0f64, 1.0);
    let (d, e) = (q.d.to_f64(), q.e.to_f64());
    let i = q.i.to_f64();
    let oracle = (2.0 - n) / r + r / 2.0 + r * i / (2.0 * e) + d / (i * r) * (d / e - 2.0);
    assert_relative_eq!(diffineq_rhs(&q).unwrap(), oracle, max_relative = 1e-10);
}

#[test]
fn goal_examples() {
    let st = s();
    let g = CylinderFunction::gauss();
    assert_eq!(
        condition_one(&g, 0.0, 12.0, &st).unwrap().needed_norm_sq,
        0.0
    );
    let family = [
        g.clone(),
        CylinderFunction::exact(1, false).unwrap(),
        CylinderFunction::exact(2, true).unwrap(),
    ];
    let c_hat = fit_goal_constant(&family, &[8.0, 10.0, 12.0], 0.0, 0.1, &st).unwrap();
    for radius in [8.0, 10.0, 12.0] {
        let p = GoalParams {
            psi_norm_sq: 0.0,
            eps: 0.0,
            lambda: 0.1,
            radius,
        };
        let rep = verify_goal(&g, &p, c_hat, &st).unwrap();
        assert_eq!(rep.status, Status::Pass, "{rep}");
    }
    // small Λ with a positive budget: the budget term alone covers the core mass
    let p = GoalParams {
        psi_norm_sq: 1.0,
        eps: 0.0,
        lambda: 1e-12,
        radius: 8.0,
    };
    let rep = verify_goal(&g, &p, c_hat, &st).unwrap();
    assert_eq!(rep.status, Status::Pass);
    // perturbed function with ψ covering its defect
    let v = perturbed();
    let need = condition_one(&v, 0.0, 10.0, &st).unwrap().needed_norm_sq;
    assert!(need > 0.0);
    let p = GoalParams {
        psi_norm_sq: need * 1.01,
        eps: 0.0,
        lambda: 0.1,
        radius: 10.0,
    };
    assert_eq!(
        verify_goal(&v, &p, c_hat, &st).unwrap().status,
        Status::Pass
    );
    let short = GoalParams {
        psi_norm_sq: need * 0.5,
        ..p
    };
    assert!(verify_goal(&v, &short, c_hat, &st).is_err());
}

fn profile() -> impl Strategy<Value = Profile> {
    (-3i64..=3, 1i64..=5, 1i64..=4)
        .prop_map(|(k, num, den)| Profile::ladder(k).unwrap().scaled(num, den))
}

fn random_function() -> impl Strategy<Value = CylinderFunction> {
    prop::collection::btree_map(0u32..4, (profile(), profile(), any::<bool>()), 1..=3).prop_map(
        |modes| {
            let modes = modes
                .into_iter()
                .map(|(m, (a, b, both))| {
                    if m == 0 {
                        Mode::cos(0, a)
                    } else if both {
                        Mode::new(m, a, b)
                    } else {
                        Mode::sin(m, b)
                    }
                })
                .collect();
            CylinderFunction::new(modes).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mode_sums_match_direct_quadrature(v in random_function(), r in 2.0..12.0f64) {
        let st = s();
        let a = compute_E_UE(&v, r, &st).unwrap();
        let b = direct_quantities(&v, r, 32, &st).unwrap();
        prop_assert!(a.i.rel_diff(b.i) < 1e-8);
        prop_assert!(a.e.rel_diff(b.e) < 1e-8);
        prop_assert!(a.mass.rel_diff(b.mass) < 1e-8);
        prop_assert!((a.d - b.d).abs().to_f64() <= 1e-8 * (a.d.abs() + a.e).to_f64());
    }
}
