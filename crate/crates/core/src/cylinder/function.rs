use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ladder::{ladder_build, rat, ClosedForm, ClosedFormEval, RationalPoly};
use crate::numerics::{u0_scaled, LogReal};

/// A closed-form function of `x ∈ R` with cached evaluators for two derivatives.
#[derive(Clone, Debug)]
pub struct Profile {
    form: ClosedForm,
    needs_w: bool,
    evals: [ClosedFormEval; 3],
}

impl Profile {
    pub fn new(form: ClosedForm) -> Self {
        let d1 = form.derivative();
        let d2 = d1.derivative();
        Profile {
            needs_w: !(form.p.is_zero() && d1.p.is_zero() && d2.p.is_zero()),
            evals: [form.evaluator(), d1.evaluator(), d2.evaluator()],
            form,
        }
    }

    pub fn zero() -> Self {
        Self::new(ClosedForm::zero())
    }

    /// `e^{x^2/4}`
    pub fn gauss() -> Self {
        Self::new(ClosedForm::gauss())
    }

    /// `u_k` of the ladder.
    pub fn ladder(k: i64) -> Result<Self> {
        Ok(Self::new(ladder_build(k)?.form))
    }

    pub fn polynomial(coeffs: &[i64]) -> Self {
        Self::new(ClosedForm::polynomial(RationalPoly::from_i64(coeffs)))
    }

    /// `num/den` times this profile.
    pub fn scaled(&self, num: i64, den: i64) -> Self {
        Self::new(self.form.scale(&rat(num, den)))
    }

    pub fn plus(&self, other: &Profile) -> Self {
        Self::new(&self.form + &other.form)
    }

    pub fn form(&self) -> &ClosedForm {
        &self.form
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }

    /// `(F, F', F'')` at `x`.
    pub fn jet(&self, x: f64) -> [LogReal; 3] {
        let w = if self.needs_w { u0_scaled(x) } else { 0.0 };
        [
            self.evals[0].eval_with_w(x, w),
            self.evals[1].eval_with_w(x, w),
            self.evals[2].eval_with_w(x, w),
        ]
    }
}

/// `c(x) cos(mθ) + s(x) sin(mθ)`.
#[derive(Clone, Debug)]
pub struct Mode {
    pub m: u32,
    pub cos: Profile,
    pub sin: Profile,
}

impl Mode {
    pub fn new(m: u32, cos: Profile, sin: Profile) -> Self {
        Mode { m, cos, sin }
    }

    pub fn cos(m: u32, c: Profile) -> Self {
        Mode {
            m,
            cos: c,
            sin: Profile::zero(),
        }
    }

    pub fn sin(m: u32, s: Profile) -> Self {
        Mode {
            m,
            cos: Profile::zero(),
            sin: s,
        }
    }

    /// `∫_0^{2π} cos^2(mθ) dθ`
    fn weight(&self) -> f64 {
        if self.m == 0 {
            2.0 * PI
        } else {
            PI
        }
    }
}

/// Angular integrals over the circle at one `x`.
///
/// `v_lv` is `∫ v L v dθ` with `L = ∂_θ^2 + ∂_x^2 - (x/2) ∂_x`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AngularSums {
    pub v2: LogReal,
    pub v_vx: LogReal,
    pub grad2: LogReal,
    pub v_lv: LogReal,
}

/// Pointwise data of `v` at `(θ, x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointJet {
    pub value: LogReal,
    pub v_theta: LogReal,
    pub v_x: LogReal,
    pub lv: LogReal,
}

impl PointJet {
    pub fn grad2(&self) -> LogReal {
        self.v_theta.square() + self.v_x.square()
    }
}

/// `v(θ, x) = Σ_m c_m(x) cos(mθ) + s_m(x) sin(mθ)` on the unit circle times `R`.
#[derive(Clone, Debug)]
pub struct CylinderFunction {
    modes: Vec<Mode>,
}

/// `L_m g = g'' - (x/2) g' - m^2 g` from a jet.
fn mode_operator(j: &[LogReal; 3], x: f64, m: u32) -> LogReal {
    j[2] - j[1].scale(0.5 * x) - j[0].scale(f64::from(m * m))
}

impl CylinderFunction {
    /// Rejects repeated frequencies and a sine profile at `m = 0`.
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        for (i, a) in modes.iter().enumerate() {
            if modes[..i].iter().any(|b| b.m == a.m) {
                return Err(Error::InvalidInput(format!("mode {} listed twice", a.m)));
            }
            if a.m == 0 && !a.sin.is_zero() {
                return Err(Error::InvalidInput(
                    "sin(0θ) vanishes; m = 0 takes a cosine profile only".into(),
                ));
            }
        }
        Ok(CylinderFunction { modes })
    }

    /// `e^{x^2/4}`, which satisfies `L v = v/2`.
    pub fn gauss() -> Self {
        CylinderFunction {
            modes: vec![Mode::cos(0, Profile::gauss())],
        }
    }

    /// `cos(mθ) u_{-1-2m^2}(x)` (or `sin`), an exact solution of `L v = v/2`.
    pub fn exact(m: u32, sine: bool) -> Result<Self> {
        let k = -1 - 2 * i64::from(m) * i64::from(m);
        let p = Profile::ladder(k)?;
        let mode = if sine {
            Mode::sin(m, p)
        } else {
            Mode::cos(m, p)
        };
        Self::new(vec![mode])
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Largest frequency present.
    pub fn max_frequency(&self) -> u32 {
        self.modes.iter().map(|m| m.m).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.modes
            .iter()
            .all(|m| m.cos.is_zero() && m.sin.is_zero())
    }

    /// Mode-summed circle integrals at `x`.
    pub fn angular(&self, x: f64) -> AngularSums {
        let mut out = AngularSums::default();
        for mode in &self.modes {
            let w = mode.weight();
            let m2 = f64::from(mode.m * mode.m);
            for p in [&mode.cos, &mode.sin] {
                if p.is_zero() {
                    continue;
                }
                let j = p.jet(x);
                let v2 = j[0].square();
                out.v2 += v2.scale(w);
                out.v_vx += (j[0] * j[1]).scale(w);
                out.grad2 += (j[1].square() + v2.scale(m2)).scale(w);
                out.v_lv += (j[0] * mode_operator(&j, x, mode.m)).scale(w);
            }
        }
        out
    }

    /// Value, derivatives and `L v` at one point.
    pub fn point(&self, theta: f64, x: f64) -> PointJet {
        let mut value = LogReal::ZERO;
        let mut v_theta = LogReal::ZERO;
        let mut v_x = LogReal::ZERO;
        let mut lv = LogReal::ZERO;
        for mode in &self.modes {
            let mf = f64::from(mode.m);
            let (sn, cs) = (mf * theta).sin_cos();
            for (p, trig, dtrig) in [(&mode.cos, cs, -mf * sn), (&mode.sin, sn, mf * cs)] {
                if p.is_zero() {
                    continue;
                }
                let j = p.jet(x);
                value += j[0].scale(trig);
                v_theta += j[0].scale(dtrig);
                v_x += j[1].scale(trig);
                lv += mode_operator(&j, x, mode.m).scale(trig);
            }
        }
        PointJet {
            value,
            v_theta,
            v_x,
            lv,
        }
    }

    pub fn value(&self, theta: f64, x: f64) -> LogReal {
        self.point(theta, x).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_is_eigen() {
        let v = CylinderFunction::gauss();
        for x in [0.0, 1.5, -3.0, 7.0] {
            let p = v.point(0.3, x);
            assert!(p.lv.rel_diff(p.value.scale(0.5)) < 1e-13);
        }
    }

    #[test]
    fn exact_modes_are_eigen() {
        for m in 1..=2 {
            let v = CylinderFunction::exact(m, m == 2).unwrap();
            for x in [0.5, 2.0, 5.0] {
                let p = v.point(0.7, x);
                assert!(p.lv.rel_diff(p.value.scale(0.5)) < 1e-9, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn rejects_bad_modes() {
        assert!(CylinderFunction::new(vec![Mode::sin(0, Profile::gauss())]).is_err());
        let twice = vec![
            Mode::cos(1, Profile::gauss()),
            Mode::sin(1, Profile::gauss()),
        ];
        assert!(CylinderFunction::new(twice).is_err());
    }
}
