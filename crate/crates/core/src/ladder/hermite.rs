use super::closed_form::ClosedForm;
use super::function::LadderFunction;
use super::poly::{rat_int, RationalPoly};
use crate::error::{Error, Result};

/// Largest degree accepted by [`hermite_polynomial`].
pub const MAX_HERMITE_DEGREE: u32 = 64;

/// Monic polynomial eigenfunction with `L h = -(k/2) h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitePoly {
    pub k: u32,
    pub poly: RationalPoly,
}

impl HermitePoly {
    pub fn as_ladder(&self) -> LadderFunction {
        LadderFunction::new(i64::from(self.k), ClosedForm::polynomial(self.poly.clone()))
    }
}

/// `h_0 = 1`, `h_1 = x`, `h_{k+1} = x h_k - 2k h_{k-1}`.
pub fn hermite_polynomial(k: u32) -> Result<HermitePoly> {
    if k > MAX_HERMITE_DEGREE {
        return Err(Error::Capacity(format!(
            "Hermite degree {k} > {MAX_HERMITE_DEGREE}"
        )));
    }
    let mut prev = RationalPoly::one();
    let mut cur = RationalPoly::x();
    if k == 0 {
        return Ok(HermitePoly { k, poly: prev });
    }
    for j in 1..k {
        let next =
            &cur.scale_shift(&rat_int(1), 1) - &prev.scale_shift(&rat_int(2 * i64::from(j)), 0);
        prev = cur;
        cur = next;
    }
    Ok(HermitePoly { k, poly: cur })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::eigen_residual;

    #[test]
    fn low_degrees() {
        assert_eq!(
            hermite_polynomial(0).unwrap().poly,
            RationalPoly::from_i64(&[1])
        );
        assert_eq!(
            hermite_polynomial(1).unwrap().poly,
            RationalPoly::from_i64(&[0, 1])
        );
        assert_eq!(
            hermite_polynomial(2).unwrap().poly,
            RationalPoly::from_i64(&[-2, 0, 1])
        );
        assert_eq!(
            hermite_polynomial(3).unwrap().poly,
            RationalPoly::from_i64(&[0, -6, 0, 1])
        );
    }

    #[test]
    fn eigenfunctions_up_to_64() {
        for k in 0..=MAX_HERMITE_DEGREE {
            let h = hermite_polynomial(k).unwrap();
            assert_eq!(h.poly.degree(), Some(k as usize));
            assert_eq!(h.poly.coeff(k as usize), rat_int(1));
            assert!(eigen_residual(&h.as_ladder()).is_zero(), "k={k}");
        }
        assert!(hermite_polynomial(65).is_err());
    }
}
