//! Orbit representatives in the fibers over degenerate base points.

use super::bpoint::BPoint;
use super::mat::Mat3;
use super::sred::SRedElt;
use super::u0::U0RedElt;
use crate::error::{Error, Result};
use crate::padic_core::{PadicScalar, QuadElt, DEFAULT_PRECISION};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    SRed,
    U0Red,
    U1Red,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepTag {
    /// The continuous family `n(μ)`; the payload is absent for the family marker.
    NMu,
    N0Plus,
    N0Minus,
    YPlus,
    YMinus,
    YPp,
    YPm,
    YMp,
    YMm,
    Y0,
    /// The continuous family `n(β)` on 𝔲₀.
    NBeta,
    Zero,
}

impl fmt::Display for RepTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RepTag::NMu => "n(μ)",
            RepTag::N0Plus => "n0+",
            RepTag::N0Minus => "n0-",
            RepTag::YPlus => "y+",
            RepTag::YMinus => "y-",
            RepTag::YPp => "y++",
            RepTag::YPm => "y+-",
            RepTag::YMp => "y-+",
            RepTag::YMm => "y--",
            RepTag::Y0 => "y0",
            RepTag::NBeta => "n(β)",
            RepTag::Zero => "0",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    SRed(SRedElt),
    U0Red(U0RedElt),
    /// A one-parameter family, instantiated through [`n_mu`] or [`n_beta`].
    Family,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRep {
    pub space: Space,
    pub tag: RepTag,
    pub payload: Payload,
    pub base_point: BPoint,
}

/// Which fiber a degenerate base point has.
#[derive(Clone, Debug, PartialEq)]
pub enum DegenerateCase {
    Zero,
    /// `u₀ = 0`, `λ₀ ≠ 0`, `−λ₀/ϖ` not a square and `−λ₀` not a square.
    Case0i,
    /// `u₀ = 0` and `−λ₀/ϖ = α²`.
    Case0ii { alpha: PadicScalar },
    /// `u₀ = 0` and `−λ₀` a square: the split case, excluded.
    SplitExcluded,
    /// `u₀ ≠ 0`; `α = w̃₀/u₀`.
    Case1 { alpha: PadicScalar },
}

impl DegenerateCase {
    pub fn name(&self) -> &'static str {
        match self {
            DegenerateCase::Zero => "zero",
            DegenerateCase::Case0i => "0i",
            DegenerateCase::Case0ii { .. } => "0ii",
            DegenerateCase::SplitExcluded => "split",
            DegenerateCase::Case1 { .. } => "1",
        }
    }
}

pub fn classify_degenerate(x0: &BPoint) -> Result<DegenerateCase> {
    if x0.is_rs()? {
        return Err(Error::NotDegenerate);
    }
    if x0.lambda.is_zero()? && x0.u.is_zero()? && x0.wtilde.is_zero()? {
        return Ok(DegenerateCase::Zero);
    }
    if x0.u.is_zero()? {
        let m = -(&x0.lambda).shift(-1);
        if m.is_square()? {
            return Ok(DegenerateCase::Case0ii { alpha: m.sqrt(DEFAULT_PRECISION)? });
        }
        if (-&x0.lambda).is_square()? {
            return Ok(DegenerateCase::SplitExcluded);
        }
        return Ok(DegenerateCase::Case0i);
    }
    Ok(DegenerateCase::Case1 { alpha: x0.wtilde.div(&x0.u)? })
}

fn s(p: u32, rows: [[i64; 3]; 3]) -> Mat3<PadicScalar> {
    Mat3::from_fn(|i, j| PadicScalar::from_int(p, rows[i][j]))
}

fn srep(tag: RepTag, z: Mat3<PadicScalar>, x0: &BPoint) -> OrbitRep {
    OrbitRep { space: Space::SRed, tag, payload: Payload::SRed(SRedElt { z }), base_point: x0.clone() }
}

/// `n(μ) = π[[0, μ, 1], [0, 0, 0], [0, 1, 0]]`.
pub fn n_mu(mu: &PadicScalar) -> SRedElt {
    let p = mu.p();
    let mut z = s(p, [[0, 0, 1], [0, 0, 0], [0, 1, 0]]);
    z.e[0][1] = mu.clone();
    SRedElt { z }
}

/// `n(β)` on 𝔲₀: `a₂ = βϖ`, `b₁ = π`.
pub fn n_beta(beta: &PadicScalar) -> U0RedElt {
    let p = beta.p();
    U0RedElt { a2: beta.shift(1), b1: QuadElt::pi(p), ..U0RedElt::zero(p) }
}

/// The semisimple representative on 𝔲₀ over a degenerate `x0 ≠ 0`, if one exists.
pub fn u0_semisimple(x0: &BPoint) -> Result<U0RedElt> {
    let p = x0.p();
    let mut y = U0RedElt::zero(p);
    if x0.u.is_zero()? {
        if x0.lambda.is_zero()? {
            return Err(Error::WrongCase("x0 = 0 has no semisimple representative".into()));
        }
        y.a2 = -&x0.lambda;
        y.a3 = PadicScalar::one(p);
        return Ok(y);
    }
    y.b2 = QuadElt::one(p);
    y.b1 = QuadElt::pure(&x0.u * PadicScalar::from_frac(p, 1, 2));
    if !x0.lambda.is_zero()? {
        let alpha = x0.wtilde.div(&x0.u)?;
        let e = (&alpha * PadicScalar::from_int(p, 2)).div(&x0.u)?;
        y.a2 = -x0.lambda.div(&e)?;
        y.a3 = e;
    }
    Ok(y)
}

/// The representative list over a non-rs base point.
pub fn orbit_reps(x0: &BPoint, space: Space) -> Result<Vec<OrbitRep>> {
    let case = classify_degenerate(x0)?;
    let p = x0.p();
    let lam = -(&x0.lambda).shift(-1);
    match space {
        Space::SRed => Ok(match case {
            DegenerateCase::Zero => vec![
                OrbitRep { space, tag: RepTag::NMu, payload: Payload::Family, base_point: x0.clone() },
                srep(RepTag::N0Plus, s(p, [[0, 1, 0], [0, 0, 1], [0, 0, 0]]), x0),
                srep(RepTag::N0Minus, s(p, [[0, 0, 0], [1, 0, 0], [0, 1, 0]]), x0),
            ],
            DegenerateCase::Case0i | DegenerateCase::SplitExcluded => {
                if case == DegenerateCase::SplitExcluded {
                    return Err(Error::Excluded("case 0i with −λ₀ a square".into()));
                }
                let mk = |b: i64, c: i64| {
                    let mut z = s(p, [[0, 0, b], [1, 0, 0], [c, 0, 0]]);
                    z.e[0][1] = lam.clone();
                    z
                };
                vec![
                    srep(RepTag::Y0, mk(0, 0), x0),
                    srep(RepTag::YPlus, mk(1, 0), x0),
                    srep(RepTag::YMinus, mk(0, 1), x0),
                ]
            }
            DegenerateCase::Case0ii { alpha } => {
                let mk = |rows: [[i64; 3]; 3]| {
                    let mut z = s(p, rows);
                    z.e[0][0] = alpha.clone();
                    z.e[1][1] = -&alpha;
                    z
                };
                let ypp = mk([[0, 0, 1], [0, 0, 1], [0, 0, 0]]);
                let ypm = mk([[0, 0, 1], [0, 0, 0], [0, 1, 0]]);
                vec![
                    srep(RepTag::Y0, mk([[0; 3]; 3]), x0),
                    srep(RepTag::YMm, ypp.transpose(), x0),
                    srep(RepTag::YMp, ypm.transpose(), x0),
                    srep(RepTag::YPp, ypp, x0),
                    srep(RepTag::YPm, ypm, x0),
                ]
            }
            DegenerateCase::Case1 { alpha } => {
                let mk = |rows: [[i64; 3]; 3]| {
                    let mut z = s(p, rows);
                    z.e[0][0] = alpha.clone();
                    z.e[1][1] = -&alpha;
                    z.e[2][0] = x0.u.clone();
                    z
                };
                vec![
                    srep(RepTag::YPlus, mk([[0, 0, 1], [1, 0, 0], [0, 0, 0]]), x0),
                    srep(RepTag::YMinus, mk([[0, 1, 1], [0, 0, 0], [0, 0, 0]]), x0),
                ]
            }
        }),
        Space::U0Red => Ok(match case {
            DegenerateCase::Zero => vec![
                OrbitRep {
                    space,
                    tag: RepTag::Zero,
                    payload: Payload::U0Red(U0RedElt::zero(p)),
                    base_point: x0.clone(),
                },
                OrbitRep { space, tag: RepTag::NBeta, payload: Payload::Family, base_point: x0.clone() },
            ],
            DegenerateCase::SplitExcluded => return Err(Error::Excluded("case 0i with −λ₀ a square".into())),
            _ => vec![OrbitRep {
                space,
                tag: RepTag::Y0,
                payload: Payload::U0Red(u0_semisimple(x0)?),
                base_point: x0.clone(),
            }],
        }),
        Space::U1Red => Ok(match case {
            // Only the zero element lies over 0 in the reduced anisotropic space.
            DegenerateCase::Zero => vec![OrbitRep {
                space,
                tag: RepTag::Zero,
                payload: Payload::Family,
                base_point: x0.clone(),
            }],
            _ => vec![],
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_payloads(x0: &BPoint, space: Space) {
        for r in orbit_reps(x0, space).unwrap() {
            match &r.payload {
                Payload::SRed(y) => assert_eq!(y.invariants(), *x0, "{}", r.tag),
                Payload::U0Red(y) => assert!(y.invariants().unwrap().approx_eq(x0), "{}", r.tag),
                Payload::Family => {}
            }
        }
    }

    #[test]
    fn zero_fiber() {
        let x0 = BPoint::zero(5);
        let r = orbit_reps(&x0, Space::SRed).unwrap();
        let tags: Vec<_> = r.iter().map(|r| r.tag).collect();
        assert_eq!(tags, vec![RepTag::NMu, RepTag::N0Plus, RepTag::N0Minus]);
        check_payloads(&x0, Space::SRed);
        assert_eq!(n_mu(&PadicScalar::from_frac(5, 1, 25)).invariants(), x0);
        assert_eq!(n_beta(&PadicScalar::from_int(5, 7)).invariants().unwrap(), x0);
    }

    #[test]
    fn case_0ii_has_four_non_semisimple_reps() {
        // −λ₀/ϖ = 4
        let x0 = BPoint::from_ints(5, -20, 0, 0);
        assert!(matches!(classify_degenerate(&x0).unwrap(), DegenerateCase::Case0ii { .. }));
        let r = orbit_reps(&x0, Space::SRed).unwrap();
        assert_eq!(r.iter().filter(|r| r.tag != RepTag::Y0).count(), 4);
        check_payloads(&x0, Space::SRed);
    }

    #[test]
    fn case_1_and_0i() {
        // λ₀ = −ϖw̃₀²/u₀²
        let x0 = BPoint::from_ints(5, -5 * 9, 1, 3);
        let r = orbit_reps(&x0, Space::SRed).unwrap();
        assert_eq!(r.iter().map(|r| r.tag).collect::<Vec<_>>(), vec![RepTag::YPlus, RepTag::YMinus]);
        check_payloads(&x0, Space::SRed);
        check_payloads(&x0, Space::U0Red);
        let x0 = BPoint::from_ints(5, 2, 0, 0);
        assert_eq!(classify_degenerate(&x0).unwrap(), DegenerateCase::Case0i);
        check_payloads(&x0, Space::SRed);
        check_payloads(&x0, Space::U0Red);
        assert!(matches!(orbit_reps(&BPoint::from_ints(5, -1, 0, 0), Space::SRed), Err(Error::Excluded(_))));
        assert_eq!(orbit_reps(&BPoint::from_ints(5, 1, 1, 0), Space::SRed), Err(Error::NotDegenerate));
    }
}
