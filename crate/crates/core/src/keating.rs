//! The geometric side: Keating lengths on quasi-canonical lifts, the
//! quasi-canonical sum for ℓ-Int, and its closed forms in t = 1/q.

use crate::error::{Error, Result};
use crate::orbit_space::{cayley_inv, BPoint, Side, U1Elt, U1Group, Xi};
use crate::padic_core::arith::{q_pow, rint, Val};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

type Q = BigRational;

/// Distance data of a pair (ψ₋, ψ₊): `ℓ(ψ₋)` and `v_D(Im ψ₊)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistParams {
    pub ell_minus: i64,
    pub im_plus_val: Val,
}

/// The triple `(m, ℓ₋, ℓ₊)` attached to a side-1 point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MlParams {
    pub m: i64,
    pub ell_minus: i64,
    pub ell_plus: Val,
}

impl MlParams {
    pub fn new(m: i64, ell_minus: i64, ell_plus: Val) -> Self {
        MlParams { m, ell_minus, ell_plus }
    }

    pub fn dist(&self) -> DistParams {
        DistParams { ell_minus: self.ell_minus, im_plus_val: self.ell_plus }
    }

    /// Rejects negative entries and even finite ℓ₊.
    pub fn validate(&self) -> Result<()> {
        if self.m < 0 || self.ell_minus < 0 {
            return Err(Error::Unrealizable(format!("{self:?}")));
        }
        if let Val::Fin(k) = self.ell_plus {
            if k < 1 || k % 2 == 0 {
                return Err(Error::Unrealizable(format!("ℓ₊ = {k} must be odd and positive")));
            }
        }
        Ok(())
    }
}

/// `dist_j = min(ℓ(ψ₋), ℓ_j(ψ₊))`, where `ℓ_j(ψ₊)` is finite only below `2j`.
pub fn dist_j(d: DistParams, j: i64) -> i64 {
    match d.im_plus_val {
        Val::Fin(k) if k < 2 * j => d.ell_minus.min(k),
        _ => d.ell_minus,
    }
}

fn geom_sum(p: u32, upto: i64) -> Q {
    (0..=upto).map(|i| q_pow(p, i)).fold(Q::zero(), |a, b| a + b)
}

/// Keating's length `n_j(ψ)` for `ℓ(ψ) = ell`.
pub fn keating_n(ell: Val, j: i64, p: u32) -> Result<Q> {
    let Val::Fin(l) = ell else {
        return Err(Error::NotRegularSemisimple);
    };
    if l > 2 * j {
        return Ok(rint(2) * geom_sum(p, j - 1) + rint(l - 2 * j + 1) * q_pow(p, j));
    }
    if l % 2 == 0 {
        Ok(rint(2) * geom_sum(p, l / 2) - q_pow(p, l / 2))
    } else {
        Ok(rint(2) * (q_pow(p, (l + 1) / 2) - Q::one()) / (rint(p as i64) - Q::one()))
    }
}

/// `ℓ-Int = 2 Σ_{j=0}^{m} n_j(dist_j)`.
pub fn l_int_keating(t: MlParams, p: u32) -> Result<Q> {
    t.validate()?;
    let mut s = Q::zero();
    for j in 0..=t.m {
        s += keating_n(Val::Fin(dist_j(t.dist(), j)), j, p)?;
    }
    Ok(rint(2) * s)
}

/// Which closed form applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LintCase {
    I1,
    I2,
    I3,
    II1,
    II2,
}

pub fn lint_case(t: MlParams) -> LintCase {
    let (m, lm) = (t.m, t.ell_minus);
    if Val::Fin(lm) <= t.ell_plus {
        if lm > 2 * m {
            LintCase::I1
        } else if lm % 2 == 1 {
            LintCase::I2
        } else {
            LintCase::I3
        }
    } else {
        let lp = t.ell_plus.fin().unwrap();
        if lp >= 2 * m {
            LintCase::II1
        } else {
            LintCase::II2
        }
    }
}

/// The closed forms, evaluated at `t = 1/p`.
pub fn l_int_closed(t: MlParams, p: u32) -> Result<Q> {
    t.validate()?;
    let tt = q_pow(p, -1);
    let one = Q::one();
    let u = &one - &tt;
    let u2 = &u * &u;
    let (m, lm) = (t.m, t.ell_minus);
    let tail = -rint(2) * rint(lm + 2 * m + 1) * &tt / &u - rint(8) * &tt / &u2;
    let tp = |k: i64| q_pow(p, -k);
    let head = match lint_case(t) {
        LintCase::I1 | LintCase::II1 => {
            rint(2) * tp(-m) * (rint(2) * (&one + &tt) + rint(lm - 2 * m - 1) * &u) / &u2
        }
        LintCase::I2 => {
            rint(2) * tp(-(lm - 1) / 2) * (rint(2 * m - lm + 3) - rint(2 * m - lm - 1) * &tt) / &u2
        }
        LintCase::I3 => {
            rint(2) * tp(-lm / 2) * (rint(m - lm / 2 + 1) * (&one - &tt * &tt) + &tt * (&tt + rint(3))) / &u2
        }
        LintCase::II2 => {
            let lp = t.ell_plus.fin().unwrap();
            rint(2) * tp(-(lp - 1) / 2) * (rint(lm - 2 * lp + 2 * m + 3) * &u + rint(4) * &tt) / &u2
        }
    };
    Ok(head + tail)
}

/// ℓ-Int extended by zero to side 0 and to non-integral points.
pub fn l_int(x: &BPoint) -> Result<Q> {
    if x.classify_side()? == Side::Zero || !x.is_integral()? {
        return Ok(Q::zero());
    }
    let t = x.ml_params()?;
    let v = l_int_closed(t, x.p())?;
    debug_assert_eq!(Ok(&v), l_int_keating(t, x.p()).as_ref());
    Ok(v)
}

/// `Int(g)` for a regular semisimple `g ∈ U₁`, through a Cayley chart and reduction.
pub fn int_group(g: &U1Group) -> Result<Q> {
    if !g.is_integral()? {
        return Ok(Q::zero());
    }
    for xi in Xi::ALL {
        let Ok(m) = cayley_inv(g, xi) else { continue };
        let x = U1Elt::from_matrix(&m)?;
        if !x.is_integral()? {
            continue;
        }
        let (red, _, _) = x.reduce();
        return l_int(&red.invariants()?);
    }
    unreachable!("the four Cayley charts cover K₁")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit_space::{cayley, make_bpoint_rs1, U1RedElt};
    use crate::padic_core::{QuadElt, QuatElt};

    fn mp(m: i64, lm: i64, lp: Val) -> MlParams {
        MlParams::new(m, lm, lp)
    }

    #[test]
    fn distances() {
        let d = |a, b| DistParams { ell_minus: a, im_plus_val: Val::Fin(b) };
        assert_eq!(dist_j(d(7, 1), 0), 7);
        assert_eq!(dist_j(d(3, 1), 1), 1);
        assert_eq!(dist_j(d(1, 3), 1), 1);
    }

    #[test]
    fn keating_lengths() {
        for p in [3, 5, 7] {
            assert_eq!(keating_n(Val::Fin(1), 0, p).unwrap(), rint(2));
            assert_eq!(keating_n(Val::Fin(1), 1, p).unwrap(), rint(2));
        }
        assert_eq!(keating_n(Val::Fin(2), 2, 3).unwrap(), rint(5));
        assert!(keating_n(Val::Inf, 1, 3).is_err());
    }

    #[test]
    fn small_sums() {
        for p in [3, 5, 7] {
            assert_eq!(l_int_keating(mp(0, 1, Val::Inf), p).unwrap(), rint(4));
            assert_eq!(l_int_keating(mp(1, 1, Val::Fin(3)), p).unwrap(), rint(8));
            assert_eq!(l_int_keating(mp(1, 3, Val::Fin(1)), p).unwrap(), rint(12));
            assert_eq!(l_int_closed(mp(0, 1, Val::Inf), p).unwrap(), rint(4));
            assert_eq!(l_int_closed(mp(1, 1, Val::Fin(3)), p).unwrap(), rint(8));
            assert_eq!(l_int_closed(mp(1, 3, Val::Fin(1)), p).unwrap(), rint(12));
        }
        assert_eq!(lint_case(mp(1, 1, Val::Fin(3))), LintCase::I2);
        assert_eq!(lint_case(mp(1, 3, Val::Fin(1))), LintCase::II2);
    }

    #[test]
    fn extended_l_int() {
        let x = make_bpoint_rs1(mp(0, 1, Val::Inf), 3).unwrap();
        assert_eq!(l_int(&x).unwrap(), rint(4));
        assert_eq!(l_int(&BPoint::from_ints(5, 1, 1, 0)).unwrap(), Q::zero());
        let y = BPoint::new(x.lambda.shift(-2), x.u.shift(-1), x.wtilde.clone());
        assert_eq!(l_int(&y).unwrap(), Q::zero());
        assert!(l_int(&BPoint::zero(3)).is_err());
    }

    #[test]
    fn group_side_matches_lie_side() {
        let p = 3;
        let q = |a, b, c, d| QuatElt::new(QuadElt::from_ints(p, a, b), QuadElt::from_ints(p, c, d));
        let x = U1RedElt::new(q(0, 1, 1, 0), q(1, 0, 0, 1)).unwrap();
        assert!(x.is_rs().unwrap());
        let want = l_int(&x.invariants().unwrap()).unwrap();
        for xi in Xi::ALL {
            let g = cayley(&x.matrix(), xi).unwrap();
            assert_eq!(int_group(&g).unwrap(), want);
        }
    }
}
