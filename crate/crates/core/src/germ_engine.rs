//! Germ coefficients around degenerate base points, their s-derivatives, the
//! closed form of Φ near zero, and the assembly of `∂Orb₁(σ(x), φ′)`.
//!
//! Coefficients are written with the convention `η(c)|c|^{-s}`, whose
//! derivative at `s = 0` is `−η(c)·log|c|`. With that convention every
//! derivative agrees with the tabulated values on the nonsplit side.

use crate::error::{Error, Result};
use crate::integrator::{phi_oracle, IntegratorConfig};
use crate::orbit_space::{classify_degenerate, orbit_reps, BPoint, DegenerateCase, OrbitRep, RepTag, Side, Space};
use crate::orbital_values::{eta_m1, forced_s_values, orb_nil_reg_s, zeta1, NilSign};
use crate::padic_core::arith::q_pow;
use crate::padic_core::{PadicScalar, Val, DEFAULT_PRECISION};
use crate::svalue::{LogQVal, RatX};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

type Q = BigRational;

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `c·log q`.
fn logq(c: Q) -> LogQVal {
    LogQVal::logq(c)
}

/// `log|x| = −v(x)·log q`.
fn log_abs(x: &PadicScalar) -> Result<LogQVal> {
    Ok(logq(qi(-x.val_fin()?)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GermCoeff {
    pub tag: RepTag,
    pub value_at_0: Q,
    pub dvalue: LogQVal,
    /// The coefficient as a function of `X = q^{-s}`, when it is one.
    pub s_form: Option<RatX>,
}

impl GermCoeff {
    fn zero(tag: RepTag) -> Self {
        GermCoeff { tag, value_at_0: Q::zero(), dvalue: LogQVal::zero(), s_form: None }
    }

    fn from_form(tag: RepTag, f: RatX) -> Result<Self> {
        Ok(GermCoeff { tag, value_at_0: f.value_s0()?, dvalue: f.dds_s0()?, s_form: Some(f) })
    }
}

/// `η(c)|c|^{-s}` as a function of X.
fn char_power(c: &PadicScalar) -> Result<RatX> {
    Ok(RatX::monomial(qi(c.eta()? as i64), -c.val_fin()?, c.p()))
}

/// `ϖ` as a scalar.
fn varpi(p: u32) -> PadicScalar {
    PadicScalar::from_int(p, p as i64)
}

/// The root `ν` of `u²μ = ν + (Δ/ϖ)/ν + 2w̃` and the discriminant, when the
/// discriminant is a nonzero square.
fn nu_root(x: &BPoint, mu: &PadicScalar, other: bool) -> Result<Option<(PadicScalar, PadicScalar)>> {
    let p = x.p();
    let d = x.delta().div(&varpi(p))?;
    let b = x.u.square() * mu - &x.wtilde * PadicScalar::from_int(p, 2);
    let disc = b.square() - &d * PadicScalar::from_int(p, 4);
    if disc.is_zero()? {
        return Err(Error::NotRegularSemisimple);
    }
    if !disc.is_square()? {
        return Ok(None);
    }
    let mut r = disc.sqrt(DEFAULT_PRECISION)?;
    if other {
        r = -r;
    }
    let nu = (b + r) * PadicScalar::from_frac(p, 1, 2);
    Ok(Some((nu, disc)))
}

fn gamma_from_root(x: &BPoint, nu: &PadicScalar, disc: &PadicScalar) -> Result<GermCoeff> {
    let p = x.p();
    let d = x.delta().div(&varpi(p))?;
    let vn = nu.val_fin()?;
    let vd = d.val_fin()?;
    let scale = qi((-nu).eta()? as i64) * q_pow(p, disc.val_fin()? / 2);
    let f = RatX::monomial(Q::one(), -vn, p).add(&RatX::monomial(qi(d.eta()? as i64), vn - vd, p));
    GermCoeff::from_form(RepTag::NMu, f.scale(&scale))
}

/// `Γ_{n(μ)}(x, s)`, zero unless the discriminant `(u²μ − 2w̃)² − 4Δ/ϖ` is a square.
pub fn gamma_n_mu(x: &BPoint, mu: &PadicScalar) -> Result<GermCoeff> {
    match nu_root(x, mu, false)? {
        None => Ok(GermCoeff::zero(RepTag::NMu)),
        Some((nu, disc)) => gamma_from_root(x, &nu, &disc),
    }
}

/// The same coefficient built from the other root `(Δ/ϖ)/ν`.
pub fn gamma_n_mu_other_root(x: &BPoint, mu: &PadicScalar) -> Result<GermCoeff> {
    match nu_root(x, mu, true)? {
        None => Ok(GermCoeff::zero(RepTag::NMu)),
        Some((nu, disc)) => gamma_from_root(x, &nu, &disc),
    }
}

/// Whether `x` lies in the neighborhood of `x0` where the germ formulas are used:
/// integral for `x0 = 0`; otherwise every coordinate within `p^{D}` of `x0`'s and
/// `v(Δ(x)) ≥ D`, where `D` exceeds the valuation of every nonzero coordinate of
/// `x0` by `depth`.
pub fn in_neighborhood(x0: &BPoint, x: &BPoint, depth: i64) -> Result<bool> {
    if x0.p() != x.p() {
        return Err(Error::PrimeMismatch(x0.p(), x.p()));
    }
    if !x.is_integral()? {
        return Ok(false);
    }
    let zero = BPoint::zero(x0.p());
    if x0.approx_eq(&zero) {
        return Ok(true);
    }
    let coords = [(&x0.lambda, &x.lambda), (&x0.u, &x.u), (&x0.wtilde, &x.wtilde)];
    let mut bound = depth;
    for (a, _) in coords {
        if let Val::Fin(v) = a.val()? {
            bound = bound.max(v + depth);
        }
    }
    for (a, b) in coords {
        if (b - a).val()? < Val::Fin(bound) {
            return Ok(false);
        }
    }
    Ok(x.delta().val()? >= Val::Fin(bound))
}

/// Default neighborhood depth.
pub const NEIGHBORHOOD_DEPTH: i64 = 4;

/// The coefficient `Γ_n(x, s)` for a representative over `x0`, with its
/// s-form where one is available. `None` marks entries that never enter the
/// derivative because the matching orbital integral vanishes.
pub fn germ_coeff(x0: &BPoint, rep: &OrbitRep, x: &BPoint) -> Result<Option<GermCoeff>> {
    let p = x.p();
    let case = classify_degenerate(x0)?;
    let one = |t: RepTag| GermCoeff::from_form(t, RatX::one(p)).map(Some);
    let delta = x.delta();
    match (case, rep.tag) {
        (DegenerateCase::SplitExcluded, _) => Err(Error::Excluded("−λ₀ is a square".into())),
        (_, RepTag::NMu) => Err(Error::Invalid("the n(μ) family needs μ; use gamma_n_mu".into())),
        (DegenerateCase::Zero, RepTag::N0Plus) => {
            GermCoeff::from_form(RepTag::N0Plus, RatX::constant(eta_m1(p), p)).map(Some)
        }
        (DegenerateCase::Zero, RepTag::N0Minus) => {
            GermCoeff::from_form(RepTag::N0Minus, char_power(&delta.div(&varpi(p))?)?).map(Some)
        }
        (DegenerateCase::Case0i, RepTag::YPlus) => one(RepTag::YPlus),
        (DegenerateCase::Case0i, RepTag::YMinus) => {
            GermCoeff::from_form(RepTag::YMinus, char_power(&delta.div(&x.lambda)?)?).map(Some)
        }
        (DegenerateCase::Case0ii { .. }, RepTag::YPp) => one(RepTag::YPp),
        (DegenerateCase::Case0ii { .. }, RepTag::YMm) => {
            // z₁z₂ = Δ/(4λ) for the section through α
            let z1z2 = delta.div(&(&x.lambda * PadicScalar::from_int(p, 4)))?;
            GermCoeff::from_form(RepTag::YMm, char_power(&z1z2)?).map(Some)
        }
        (DegenerateCase::Case0ii { .. }, RepTag::YPm | RepTag::YMp) => Ok(None),
        (DegenerateCase::Case1 { .. }, RepTag::YPlus) => one(RepTag::YPlus),
        (DegenerateCase::Case1 { .. }, RepTag::YMinus) => {
            let c = delta.div(&(x.u.square() * varpi(p)))?;
            let f = char_power(&c)?.scale(&qi(delta.div(&varpi(p))?.eta()? as i64 * c.eta()? as i64));
            GermCoeff::from_form(RepTag::YMinus, f).map(Some)
        }
        (_, t) => Err(Error::Invalid(format!("{t} is not in the germ expansion over this point"))),
    }
}

/// The tabulated value of `∂Γ_n(x)`; `None` where the table leaves the entry
/// unneeded.
pub fn dgamma_table(x0: &BPoint, rep: &OrbitRep, x: &BPoint) -> Result<Option<LogQVal>> {
    let p = x.p();
    let case = classify_degenerate(x0)?;
    let delta = x.delta();
    let e = |c: &PadicScalar| -> Result<Q> { Ok(qi(c.eta()? as i64)) };
    Ok(Some(match (case, rep.tag) {
        (DegenerateCase::SplitExcluded, _) => return Err(Error::Excluded("−λ₀ is a square".into())),
        (_, RepTag::NMu) => return Err(Error::Invalid("the n(μ) family needs μ; use gamma_n_mu".into())),
        (DegenerateCase::Zero, RepTag::N0Plus) => LogQVal::zero(),
        (DegenerateCase::Zero, RepTag::N0Minus) => log_abs(&delta.div(&varpi(p))?)?,
        (DegenerateCase::Case0i, RepTag::YPlus) => LogQVal::zero(),
        (DegenerateCase::Case0i, RepTag::YMinus) => {
            log_abs(&delta.div(&x0.lambda)?)?.scale(&e(&-&x0.lambda)?)
        }
        (DegenerateCase::Case0ii { .. }, RepTag::YPp) => LogQVal::zero(),
        // The table prints this row under y₋₊; the coefficient belongs to y₋₋.
        (DegenerateCase::Case0ii { .. }, RepTag::YMm) => log_abs(&delta.div(&x0.lambda)?)?.scale(&eta_m1(p)),
        (DegenerateCase::Case0ii { .. }, RepTag::YPm | RepTag::YMp) => return Ok(None),
        (DegenerateCase::Case1 { .. }, RepTag::YPlus) => LogQVal::zero(),
        (DegenerateCase::Case1 { .. }, RepTag::YMinus) => log_abs(&delta.div(&(x0.u.square() * varpi(p)))?)?,
        (_, t) => return Err(Error::Invalid(format!("{t} is not in the germ expansion over this point"))),
    }))
}

/// `log|λ⁻¹Δ|/(2 log q)`, the pole coefficient in the split case. Not used by
/// any verification: that case is excluded throughout.
pub fn split_pole_coefficient(x: &BPoint) -> Result<Q> {
    let c = x.delta().div(&x.lambda)?;
    Ok(Q::new(BigInt::from(-c.val_fin()?), BigInt::from(2)))
}

/// Valuations `(v(u), v(Δ), v(w/π))` of an integral side-1 point.
fn vals(x: &BPoint) -> Result<(i64, i64, Val)> {
    Ok((x.u.val_fin()?, x.delta().val_fin()?, x.wtilde.val()?))
}

/// Which of the five closed forms of Φ applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PhiCase {
    I1,
    I2,
    I3,
    II1,
    II2,
}

pub fn phi_case(x: &BPoint) -> Result<PhiCase> {
    let (vu, vd, vw) = vals(x)?;
    // |Δ| ≥ |w|² with v(w) = v(w̃) + 1/2, i.e. v(Δ) ≤ 2v(w̃) + 1
    let case_one = match vw {
        Val::Inf => true,
        Val::Fin(k) => vd <= 2 * k + 1,
    };
    Ok(if case_one {
        if vd > 4 * vu {
            PhiCase::I1
        } else if vd.rem_euclid(2) == 1 {
            PhiCase::I2
        } else {
            PhiCase::I3
        }
    } else if vw.fin().expect("finite in case II") >= 2 * vu {
        PhiCase::II1
    } else {
        PhiCase::II2
    })
}

/// The closed form of Φ(x) for an integral side-1 point near zero.
pub fn phi_closed(x: &BPoint) -> Result<LogQVal> {
    if x.classify_side()? != Side::One {
        return Err(Error::WrongSide);
    }
    if !x.is_integral()? {
        return Err(Error::NonIntegral);
    }
    let p = x.p();
    let (vu, vd, vw) = vals(x)?;
    let t = q_pow(p, -1);
    let one = Q::one();
    let den = (&one - &t) * (&one - &t);
    let tp = |k: i64| q_pow(p, -k);
    let v = match phi_case(x)? {
        PhiCase::I1 | PhiCase::II1 => {
            tp(-vu) * (qi(2) * (&one + &t) + qi(vd - 4 * vu - 1) * (&one - &t))
        }
        PhiCase::I2 => {
            let e = 4 * vu - vd;
            tp((2 * vu - vd + 1) / 2) * (qi(e + 3) - qi(e - 1) * &t)
        }
        PhiCase::I3 => {
            tp((2 * vu - vd) / 2) * (qi(2 * vu - vd / 2 + 1) * (&one - &t * &t) + &t * (qi(3) + &t))
        }
        PhiCase::II2 => {
            let w = vw.fin().expect("finite");
            tp(vu - w) * (qi(4) * &t + qi(vd + 4 * vu - 4 * w + 1) * (&one - &t))
        }
    };
    Ok(logq(-v / den))
}

/// `∂Orb₁(σ(x), φ′)` around `x0`: the full value at `x0 = 0`, otherwise the
/// part that varies with `x`, the rest being a constant attached to `x0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dorb1 {
    pub varying: LogQVal,
    /// `None` when `varying` is the whole value.
    pub constant_tag: Option<String>,
}

/// One term `∂Γ_n(x)·Orb(n, φ′, 0)` of the germ assembly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GermTerm {
    pub rep: String,
    pub dgamma: Option<LogQVal>,
    pub orb: Option<LogQVal>,
    pub product: LogQVal,
}

/// The transfer factor of the section through `α` in case (0ii), `η(−α)`.
pub fn omega_sigma1(alpha: &PadicScalar) -> Result<i32> {
    (-alpha).eta()
}

/// The discrete germ terms over `x0`, each with its derivative and orbital value.
pub fn germ_terms(x0: &BPoint, x: &BPoint) -> Result<Vec<GermTerm>> {
    let p = x.p();
    let mut out = vec![];
    for rep in orbit_reps(x0, Space::SRed)? {
        if matches!(rep.tag, RepTag::NMu | RepTag::Y0) {
            continue;
        }
        let dg = dgamma_table(x0, &rep, x)?;
        let orb = match rep.tag {
            RepTag::N0Plus => Some(orb_nil_reg_s(NilSign::Plus, p)),
            RepTag::N0Minus => Some(orb_nil_reg_s(NilSign::Minus, p)),
            _ => Some(forced_s_values(x0, &rep)?),
        };
        let product = match (&dg, &orb) {
            (Some(d), Some(o)) => d.scale(o),
            _ => LogQVal::zero(),
        };
        let orb = orb.map(LogQVal::rational);
        out.push(GermTerm { rep: rep.tag.to_string(), dgamma: dg, orb, product });
    }
    Ok(out)
}

/// `∂Orb₁(σ(x), φ′)` from the closed form of Φ at zero, or from the germ
/// terms elsewhere.
pub fn dorb1(x0: &BPoint, x: &BPoint) -> Result<Dorb1> {
    if !in_neighborhood(x0, x, NEIGHBORHOOD_DEPTH)? {
        return Err(Error::Invalid(format!("{x} is outside the neighborhood of {x0}")));
    }
    let case = classify_degenerate(x0)?;
    if case == DegenerateCase::Zero {
        let p = x.p();
        // Φ(x) − q⁻¹ζ(1)·log|Δ/ϖ|
        let l = log_abs(&x.delta().div(&varpi(p))?)?;
        let v = phi_closed(x)?.sub(&l.scale(&(q_pow(p, -1) * zeta1(p))));
        return Ok(Dorb1 { varying: v, constant_tag: None });
    }
    let mut v = LogQVal::zero();
    for t in germ_terms(x0, x)? {
        v = v.add(&t.product);
    }
    Ok(Dorb1 { varying: v, constant_tag: Some(format!("C[{}]", case.name())) })
}

/// `∂Orb₁(σ(x), φ′)` at zero assembled from the shell-sum value of Φ and the
/// regular nilpotent terms, independently of [`phi_closed`].
pub fn dorb1_via_integral(x: &BPoint, cfg: &IntegratorConfig) -> Result<LogQVal> {
    let p = x.p();
    let mut v = phi_oracle(x, cfg)?;
    for t in germ_terms(&BPoint::zero(p), x)? {
        v = v.add(&t.product);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keating::{lint_case, LintCase, MlParams};
    use crate::orbit_space::make_bpoint_rs1;

    #[test]
    fn phi_closed_example() {
        let x = make_bpoint_rs1(MlParams::new(0, 1, Val::Inf), 3).unwrap();
        assert_eq!(phi_closed(&x).unwrap(), logq(qi(-6)));
        let d = dorb1(&BPoint::zero(3), &x).unwrap();
        assert_eq!(d.varying, logq(qi(-6)));
    }

    #[test]
    fn dispatch_matches_lint_case() {
        for p in [3u32, 5] {
            for m in 0..4 {
                for lm in 1..9 {
                    for lp in [Val::Inf, Val::Fin(1), Val::Fin(3), Val::Fin(5), Val::Fin(7)] {
                        let t = MlParams::new(m, lm, lp);
                        let Ok(x) = make_bpoint_rs1(t, p) else { continue };
                        let want = match lint_case(t) {
                            LintCase::I1 => PhiCase::I1,
                            LintCase::I2 => PhiCase::I2,
                            LintCase::I3 => PhiCase::I3,
                            LintCase::II1 => PhiCase::II1,
                            LintCase::II2 => PhiCase::II2,
                        };
                        assert_eq!(phi_case(&x).unwrap(), want, "{t:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_vanishes_on_side_one_and_is_root_independent() {
        let p = 5;
        let x = make_bpoint_rs1(MlParams::new(1, 2, Val::Fin(1)), p).unwrap();
        for k in -3..6 {
            for c in 1..5 {
                let mu = PadicScalar::from_int(p, c).shift(k);
                let g = gamma_n_mu(&x, &mu).unwrap();
                assert!(g.value_at_0.is_zero());
                assert_eq!(g.s_form, gamma_n_mu_other_root(&x, &mu).unwrap().s_form);
            }
        }
        // side 0: 2η(−ν)/|disc|^{1/2}
        let y = BPoint::from_ints(p, 1, 1, 0);
        let mu = PadicScalar::from_int(p, 3);
        let g = gamma_n_mu(&y, &mu).unwrap();
        if let Some((nu, disc)) = nu_root(&y, &mu, false).unwrap() {
            let want = qi(2 * (-&nu).eta().unwrap() as i64) * q_pow(p, disc.val_fin().unwrap() / 2);
            assert_eq!(g.value_at_0, want);
        }
    }

    #[test]
    fn table_matches_s_forms_on_side_one() {
        let p = 5;
        let x0s = [BPoint::from_ints(p, 2, 0, 0), BPoint::from_ints(p, -5, 0, 0), BPoint::from_ints(p, 0, 1, 0)];
        for x0 in &x0s {
            for k in 6..9 {
                for c in 1..5 {
                    let x = match classify_degenerate(x0).unwrap() {
                        DegenerateCase::Case1 { .. } => {
                            BPoint::new(PadicScalar::from_int(p, c).shift(k), x0.u.clone(), x0.wtilde.clone())
                        }
                        _ => BPoint::new(x0.lambda.clone(), PadicScalar::from_int(p, c).shift(k), PadicScalar::zero(p)),
                    };
                    if x.classify_side().unwrap() != Side::One {
                        continue;
                    }
                    for rep in orbit_reps(x0, Space::SRed).unwrap() {
                        if rep.tag == RepTag::Y0 {
                            continue;
                        }
                        let (Some(g), Some(d)) = (germ_coeff(x0, &rep, &x).unwrap(), dgamma_table(x0, &rep, &x).unwrap())
                        else {
                            continue;
                        };
                        assert_eq!(g.dvalue, d, "{} over {x0}", rep.tag);
                    }
                }
            }
        }
    }
}
