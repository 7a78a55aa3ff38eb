//! Closed-form orbital integrals: the fundamental functions φ₀…φ₃ and their
//! extended Fourier transforms, nilpotent values on both sides, semisimple
//! values on 𝔲₀, and the values forced on 𝔰_red for a function φ′ that
//! transfers to `(1_{𝔨₀,red}, 0)`.
//!
//! φ′ itself is never built. Only its orbital integrals enter the derivative
//! computations, and those are pinned down by the matching identities.

use crate::error::{Error, Result};
use crate::orbit_space::{classify_degenerate, BPoint, DegenerateCase, OrbitRep, RepTag, Space};
use crate::padic_core::arith::q_pow;
use crate::padic_core::{eta_minus_one, PadicScalar, Val};
use crate::svalue::LogQVal;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

type Q = BigRational;

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `η(−1)` as a rational. Every sign depending on `p mod 4` goes through here.
pub fn eta_m1(p: u32) -> Q {
    qi(eta_minus_one(p) as i64)
}

/// `ζ(1) = (1 − q⁻¹)⁻¹`.
pub fn zeta1(p: u32) -> Q {
    Q::one() / (Q::one() - q_pow(p, -1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiTag {
    Phi0,
    Phi1,
    Phi2,
    Phi3,
}

impl PhiTag {
    pub const ALL: [PhiTag; 4] = [PhiTag::Phi0, PhiTag::Phi1, PhiTag::Phi2, PhiTag::Phi3];

    fn index(self) -> usize {
        self as usize
    }
}

/// `Σ c_i φ_i` with coefficients graded by powers of `log q`.
#[derive(Clone, Debug, PartialEq)]
pub struct CClassFn {
    pub p: u32,
    pub coeffs: [LogQVal; 4],
}

impl CClassFn {
    pub fn zero(p: u32) -> Self {
        CClassFn { p, coeffs: std::array::from_fn(|_| LogQVal::zero()) }
    }

    pub fn basis(tag: PhiTag, p: u32) -> Self {
        let mut f = Self::zero(p);
        f.coeffs[tag.index()] = LogQVal::rational(Q::one());
        f
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for i in 0..4 {
            r.coeffs[i] = r.coeffs[i].add(&o.coeffs[i]);
        }
        r
    }

    pub fn scale(&self, c: &LogQVal) -> Self {
        let mut r = self.clone();
        for x in r.coeffs.iter_mut() {
            *x = x.mul(c);
        }
        r
    }
}

/// The value of one basis function at `x`; `log|x|` becomes `−v(x)·log q`.
pub fn phi_basis_eval(tag: PhiTag, x: &PadicScalar) -> Result<LogQVal> {
    let p = x.p();
    let v = match x.val()? {
        Val::Inf => {
            return Ok(if tag == PhiTag::Phi0 { LogQVal::rational(Q::one()) } else { LogQVal::zero() });
        }
        Val::Fin(v) => v,
    };
    if v >= 0 {
        return Ok(if tag == PhiTag::Phi0 { LogQVal::rational(Q::one()) } else { LogQVal::zero() });
    }
    // |x|⁻¹ = q^v
    let inv_abs = q_pow(p, v);
    Ok(match tag {
        PhiTag::Phi0 => LogQVal::zero(),
        PhiTag::Phi1 => LogQVal::rational(qi(x.eta()? as i64) * inv_abs),
        PhiTag::Phi2 => LogQVal::rational(inv_abs),
        PhiTag::Phi3 => LogQVal::logq(qi(x.eta()? as i64) * qi(-v) * inv_abs),
    })
}

pub fn phi_eval(f: &CClassFn, x: &PadicScalar) -> Result<LogQVal> {
    if x.p() != f.p {
        return Err(Error::PrimeMismatch(x.p(), f.p));
    }
    let mut r = LogQVal::zero();
    for tag in PhiTag::ALL {
        let c = &f.coeffs[tag.index()];
        if !c.is_zero() {
            r = r.add(&c.mul(&phi_basis_eval(tag, x)?));
        }
    }
    Ok(r)
}

/// The transform of one basis function, written back in the basis.
pub fn ext_fourier_basis(tag: PhiTag, p: u32) -> CClassFn {
    let e = eta_m1(p);
    let z = zeta1(p);
    let b = |t: PhiTag| CClassFn::basis(t, p);
    let r = |c: Q| LogQVal::rational(c);
    match tag {
        PhiTag::Phi0 => b(PhiTag::Phi1).scale(&r(e)),
        PhiTag::Phi1 => b(PhiTag::Phi0).scale(&r(q_pow(p, -1))),
        PhiTag::Phi2 => b(PhiTag::Phi3)
            .scale(&LogQVal::monomial(&e / &z, -1))
            .add(&b(PhiTag::Phi1).scale(&r(-e))),
        // −ζ'(1)/ζ(1) = ζ(1)q⁻¹ log q
        PhiTag::Phi3 => b(PhiTag::Phi0).add(&b(PhiTag::Phi2)).scale(&LogQVal::logq(z * q_pow(p, -1))),
    }
}

pub fn ext_fourier(f: &CClassFn) -> CClassFn {
    let mut r = CClassFn::zero(f.p);
    for tag in PhiTag::ALL {
        let c = &f.coeffs[tag.index()];
        if !c.is_zero() {
            r = r.add(&ext_fourier_basis(tag, f.p).scale(c));
        }
    }
    r
}

/// `γ(1,η)² = η(−1)q⁻¹` for the ramified character.
pub fn gamma_sq(p: u32) -> Q {
    eta_m1(p) * q_pow(p, -1)
}

/// `Orb_φ = qζ(1)(φ₀ + φ₂)` for the unit-ball indicator on 𝔲₀.
pub fn orb_nil_u0_fn(p: u32) -> CClassFn {
    CClassFn::basis(PhiTag::Phi0, p)
        .add(&CClassFn::basis(PhiTag::Phi2, p))
        .scale(&LogQVal::rational(qi(p as i64) * zeta1(p)))
}

/// `Orb_{φ′} = qη(−1)/log q · φ₃`.
pub fn orb_nil_s_fn(p: u32) -> CClassFn {
    CClassFn::basis(PhiTag::Phi3, p).scale(&LogQVal::monomial(qi(p as i64) * eta_m1(p), -1))
}

/// `Orb(n(β), 1_{𝔨₀}) = qζ(1)(φ₀+φ₂)(β)`.
pub fn orb_nil_u0(beta: &PadicScalar) -> Result<Q> {
    Ok(phi_eval(&orb_nil_u0_fn(beta.p()), beta)?.coeff(0))
}

/// `Orb(n(μ), φ′) = η(−1)η(μ)(−v(μ))q^{1+v(μ)}` for `|μ| > 1`, else 0.
pub fn orb_nil_family_s(mu: &PadicScalar) -> Result<Q> {
    let p = mu.p();
    let v = match mu.val()? {
        Val::Fin(v) if v < 0 => v,
        _ => return Ok(Q::zero()),
    };
    Ok(eta_m1(p) * qi(mu.eta()? as i64) * qi(-v) * q_pow(p, 1 + v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NilSign {
    Plus,
    Minus,
}

/// `Orb(n₀,₋, φ′) = −q⁻¹ζ(1)`, `Orb(n₀,₊, φ′) = −η(−1)q⁻¹ζ(1)`.
pub fn orb_nil_reg_s(which: NilSign, p: u32) -> Q {
    let base = -(q_pow(p, -1) * zeta1(p));
    match which {
        NilSign::Minus => base,
        NilSign::Plus => eta_m1(p) * base,
    }
}

/// `Orb(0, 1_{𝔨₀}) = e·q⁻¹ζ(1)` with ramification index 2.
pub fn orb_u0_zero(p: u32) -> Q {
    qi(2) * q_pow(p, -1) * zeta1(p)
}

/// The bracket in the case-0 semisimple value, without `ζ(1)`.
fn case0_bracket(v: i64, p: u32) -> Q {
    let t = q_pow(p, -1);
    if v % 2 == 0 {
        -qi(2) * &t + q_pow(p, v / 2) * (Q::one() + &t)
    } else {
        qi(2) * &t * (q_pow(p, (v + 1) / 2) - Q::one())
    }
}

fn case1_bracket(lambda0: &PadicScalar, u0: &PadicScalar) -> Result<Q> {
    let p = u0.p();
    let t = q_pow(p, -1);
    let vu = u0.val_fin()?;
    let small = match lambda0.val()? {
        Val::Inf => true,
        Val::Fin(vl) => vl > 2 * vu,
    };
    if small {
        Ok(qi(2) * t * (q_pow(p, vu + 1) - Q::one()))
    } else {
        let vl = lambda0.val_fin()?;
        if vl == 2 * vu {
            return Err(Error::WrongCase("|λ₀| = |u₀|² does not occur over a degenerate point".into()));
        }
        Ok(qi(2) * t * (q_pow(p, (vl + 1).div_euclid(2)) - Q::one()))
    }
}

/// `Orb(y₀, 1_{𝔨₀})` over `(λ₀, 0, 0)` with `−λ₀` not a square.
pub fn orb_u0_ss_case0(lambda0: &PadicScalar) -> Result<Q> {
    let p = lambda0.p();
    if lambda0.is_zero()? {
        return Err(Error::WrongCase("λ₀ must be nonzero".into()));
    }
    if (-lambda0).is_square()? {
        return Err(Error::Excluded("−λ₀ is a square".into()));
    }
    let v = lambda0.val_fin()?;
    if v < 0 {
        return Ok(Q::zero());
    }
    Ok(zeta1(p) * case0_bracket(v, p))
}

/// `Orb(y₀, 1_{𝔨₀})` over `(λ₀, u₀, w₀)` with `u₀ ≠ 0`.
pub fn orb_u0_ss_case1(lambda0: &PadicScalar, u0: &PadicScalar, wtilde0: &PadicScalar) -> Result<Q> {
    let p = u0.p();
    if u0.is_zero()? {
        return Err(Error::WrongCase("u₀ must be nonzero".into()));
    }
    let integral = |x: &PadicScalar| -> Result<bool> { Ok(x.val()? >= Val::Fin(0)) };
    if !integral(lambda0)? || !integral(u0)? || !integral(wtilde0)? {
        return Ok(Q::zero());
    }
    Ok(zeta1(p) * case1_bracket(lambda0, u0)?)
}

/// The semisimple value on 𝔲₀ over any non-zero degenerate point.
pub fn orb_u0_ss(x0: &BPoint) -> Result<Q> {
    match classify_degenerate(x0)? {
        DegenerateCase::Zero => Err(Error::WrongCase("x₀ = 0 has no semisimple orbit".into())),
        DegenerateCase::SplitExcluded => Err(Error::Excluded("−λ₀ is a square".into())),
        DegenerateCase::Case0i | DegenerateCase::Case0ii { .. } => orb_u0_ss_case0(&x0.lambda),
        DegenerateCase::Case1 { .. } => orb_u0_ss_case1(&x0.lambda, &x0.u, &x0.wtilde),
    }
}

/// `Orb(rep, φ′)` as forced by the transfer of `(1_{𝔨₀,red}, 0)`, for the
/// representatives on 𝔰_red listed by [`crate::orbit_space::orbit_reps`].
pub fn forced_s_values(x0: &BPoint, rep: &OrbitRep) -> Result<Q> {
    if rep.space != Space::SRed {
        return Err(Error::Invalid("forced values live on 𝔰_red".into()));
    }
    let p = x0.p();
    let half = Q::new(BigInt::one(), BigInt::from(2));
    let case = classify_degenerate(x0)?;
    let not_needed = || Err(Error::Invalid(format!("{} is not part of the germ expansion", rep.tag)));
    match (case, rep.tag) {
        (DegenerateCase::Zero, RepTag::N0Plus) => Ok(orb_nil_reg_s(NilSign::Plus, p)),
        (DegenerateCase::Zero, RepTag::N0Minus) => Ok(orb_nil_reg_s(NilSign::Minus, p)),
        (DegenerateCase::Zero, RepTag::NMu) => {
            Err(Error::Invalid("the n(μ) family needs μ; use orb_nil_family_s".into()))
        }
        (DegenerateCase::SplitExcluded, _) => Err(Error::Excluded("−λ₀ is a square".into())),
        (DegenerateCase::Case0i, RepTag::YPlus) => Ok(half * orb_u0_ss_case0(&x0.lambda)?),
        (DegenerateCase::Case0i, RepTag::YMinus) => {
            let e = qi((-&x0.lambda).eta()? as i64);
            Ok(e * half * orb_u0_ss_case0(&x0.lambda)?)
        }
        (DegenerateCase::Case0ii { alpha }, tag) => {
            let ea = qi((-&alpha).eta()? as i64);
            let ypp = ea * half * orb_u0_ss_case0(&x0.lambda)?;
            match tag {
                RepTag::YPp => Ok(ypp),
                RepTag::YMm => Ok(eta_m1(p) * ypp),
                RepTag::YMp | RepTag::YPm => Ok(Q::zero()),
                _ => not_needed(),
            }
        }
        (DegenerateCase::Case1 { .. }, RepTag::YPlus | RepTag::YMinus) => {
            Ok(half * orb_u0_ss_case1(&x0.lambda, &x0.u, &x0.wtilde)?)
        }
        _ => not_needed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit_space::orbit_reps;
    use crate::padic_core::arith::rat;

    fn f(p: u32, n: i64, d: i64) -> PadicScalar {
        PadicScalar::from_frac(p, n, d)
    }

    #[test]
    fn basis_values() {
        let p = 5;
        assert_eq!(phi_basis_eval(PhiTag::Phi0, &f(p, 5, 1)).unwrap(), LogQVal::rational(Q::one()));
        assert_eq!(phi_basis_eval(PhiTag::Phi2, &f(p, 2, 1)).unwrap(), LogQVal::zero());
        // φ₃(1/p) = η(1/p)·log q·q⁻¹
        let x = f(p, 1, 5);
        let want = LogQVal::logq(qi(x.eta().unwrap() as i64) * rat(1, 5));
        assert_eq!(phi_basis_eval(PhiTag::Phi3, &x).unwrap(), want);
    }

    #[test]
    fn fourier_table_and_involution() {
        for p in [3, 5, 7] {
            let t1 = ext_fourier_basis(PhiTag::Phi1, p);
            assert_eq!(t1, CClassFn::basis(PhiTag::Phi0, p).scale(&LogQVal::rational(q_pow(p, -1))));
            for tag in PhiTag::ALL {
                let b = CClassFn::basis(tag, p);
                assert_eq!(ext_fourier(&ext_fourier(&b)), b.scale(&LogQVal::rational(gamma_sq(p))));
            }
        }
    }

    #[test]
    fn nilpotent_matching() {
        for p in [3, 5, 7] {
            // 2η(−1)|ϖ|⁻¹κ⁻¹ with κ = 2
            let c = LogQVal::rational(eta_m1(p) * qi(p as i64));
            assert_eq!(orb_nil_u0_fn(p), ext_fourier(&orb_nil_s_fn(p)).scale(&c));
            let e = eta_m1(p);
            let plus = orb_nil_reg_s(NilSign::Plus, p);
            let minus = orb_nil_reg_s(NilSign::Minus, p);
            assert_eq!(-orb_u0_zero(p), &e * &plus + &minus);
            assert_eq!(Q::zero(), &e * &plus - &minus);
        }
    }

    #[test]
    fn listed_values() {
        assert_eq!(orb_nil_reg_s(NilSign::Minus, 3), rat(-1, 2));
        assert_eq!(orb_nil_reg_s(NilSign::Plus, 5), rat(-1, 4));
        assert_eq!(orb_nil_reg_s(NilSign::Plus, 3), rat(1, 2));
        assert_eq!(orb_u0_zero(3), qi(1));
        assert_eq!(orb_u0_zero(5), rat(1, 2));
        assert_eq!(orb_nil_family_s(&f(5, 3, 1)).unwrap(), Q::zero());
        let mu = f(5, 2, 5);
        assert_eq!(orb_nil_family_s(&mu).unwrap(), qi((-&mu).eta().unwrap() as i64));
        let mu = f(5, 2, 25);
        assert_eq!(orb_nil_family_s(&mu).unwrap(), qi((-&mu).eta().unwrap() as i64) * rat(2, 5));
        assert_eq!(orb_u0_ss_case0(&f(3, 1, 1)).unwrap(), qi(1));
        assert_eq!(orb_u0_ss_case0(&f(3, 3, 1)).unwrap(), qi(2));
        assert_eq!(orb_u0_ss_case1(&f(3, 0, 1), &f(3, 1, 1), &f(3, 0, 1)).unwrap(), qi(2));
        assert!(matches!(orb_u0_ss_case0(&f(5, -1, 1)), Err(Error::Excluded(_))));
    }

    #[test]
    fn forced_values() {
        let p = 3;
        // −λ₀ = −1 is a non-square unit at p = 3
        let x0 = BPoint::from_ints(p, 1, 0, 0);
        let reps = orbit_reps(&x0, Space::SRed).unwrap();
        let yp = reps.iter().find(|r| r.tag == RepTag::YPlus).unwrap();
        assert_eq!(forced_s_values(&x0, yp).unwrap(), rat(1, 2));
        let x0 = BPoint::from_ints(p, -3, 0, 0);
        for r in orbit_reps(&x0, Space::SRed).unwrap() {
            if r.tag == RepTag::YMp {
                assert_eq!(forced_s_values(&x0, &r).unwrap(), Q::zero());
            }
        }
        let x0 = BPoint::from_ints(p, 0, 1, 0);
        let reps = orbit_reps(&x0, Space::SRed).unwrap();
        let ym = reps.iter().find(|r| r.tag == RepTag::YMinus).unwrap();
        assert_eq!(forced_s_values(&x0, ym).unwrap(), qi(1));
    }

    #[test]
    fn matching_identities_away_from_zero() {
        for p in [3u32, 5] {
            for l in [1i64, 2, 3, p as i64, (p * p) as i64 * 2] {
                let x0 = BPoint::from_ints(p, l, 0, 0);
                let reps = match orbit_reps(&x0, Space::SRed) {
                    Ok(r) => r,
                    Err(_) => continue,
                };
                let val = |t: RepTag| {
                    reps.iter().find(|r| r.tag == t).map(|r| forced_s_values(&x0, r).unwrap()).unwrap()
                };
                let y0 = orb_u0_ss(&x0).unwrap();
                match classify_degenerate(&x0).unwrap() {
                    DegenerateCase::Case0i => {
                        let e = qi((-&x0.lambda).eta().unwrap() as i64);
                        assert_eq!(y0, val(RepTag::YPlus) + &e * val(RepTag::YMinus));
                        assert_eq!(Q::zero(), val(RepTag::YPlus) - &e * val(RepTag::YMinus));
                    }
                    DegenerateCase::Case0ii { alpha } => {
                        let ea = qi((-&alpha).eta().unwrap() as i64);
                        let e = eta_m1(p);
                        let (pp, mp, pm, mm) =
                            (val(RepTag::YPp), val(RepTag::YMp), val(RepTag::YPm), val(RepTag::YMm));
                        assert_eq!(&ea * &y0, &pp + &mp + &e * &pm + &e * &mm);
                        assert_eq!(Q::zero(), &pp + &mp - &e * &pm - &e * &mm);
                    }
                    _ => {}
                }
            }
        }
    }
}
