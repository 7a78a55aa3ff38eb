//! Elements of F₀ = Q_p: exact rationals or capped-precision expansions.

use super::arith::{big, legendre, p_pow, rat_mod, rat_sqrt, split_int, split_rat, Val};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Default relative precision for capped values.
pub const DEFAULT_PRECISION: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Repr {
    Exact(BigRational),
    /// `p^v · unit` with the unit known modulo `p^n`.
    Capped { v: i64, unit: BigInt, n: u32 },
    /// Known only to vanish modulo `p^abs`.
    Small { abs: i64 },
}

/// A number in Q_p. Arithmetic between exact values stays exact; anything
/// touching a capped value is capped, with precision tracked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicScalar {
    p: u32,
    repr: Repr,
}

/// Contribution of a scalar to a sum computed modulo `p^abs`.
enum Part {
    Zero,
    Val(i64, BigInt),
}

impl PadicScalar {
    pub fn exact(p: u32, x: BigRational) -> Self {
        PadicScalar { p, repr: Repr::Exact(x) }
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        Self::exact(p, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(p: u32, n: i64, d: i64) -> Self {
        Self::exact(p, BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero(p: u32) -> Self {
        Self::from_int(p, 0)
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    /// `p^k`, exact.
    pub fn p_power(p: u32, k: i64) -> Self {
        Self::exact(p, super::arith::q_pow(p, k))
    }

    /// A capped value `p^v · unit + O(p^{v+n})`; `unit` may carry extra powers of `p`.
    pub fn capped(p: u32, v: i64, unit: BigInt, n: u32) -> Self {
        let abs = v + n as i64;
        let m = p_pow(p, n);
        let u = unit.mod_floor(&m);
        if u.is_zero() {
            return PadicScalar { p, repr: Repr::Small { abs } };
        }
        let (e, u) = split_int(&u, p);
        let v = v + e;
        let n = (abs - v) as u32;
        let u = u.mod_floor(&p_pow(p, n));
        PadicScalar { p, repr: Repr::Capped { v, unit: u, n } }
    }

    pub fn small(p: u32, abs: i64) -> Self {
        PadicScalar { p, repr: Repr::Small { abs } }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Exact(x) => Some(x),
            _ => None,
        }
    }

    /// The exact value, or an error for capped values.
    pub fn rational(&self) -> Result<BigRational> {
        self.as_rational()
            .cloned()
            .ok_or_else(|| Error::PrecisionExhausted("exact value required".into()))
    }

    /// Absolute precision; `None` for exact values.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Exact(_) => None,
            Repr::Capped { v, n, .. } => Some(v + *n as i64),
            Repr::Small { abs } => Some(*abs),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(&self.repr, Repr::Exact(x) if x.is_zero())
    }

    pub fn is_zero(&self) -> Result<bool> {
        match &self.repr {
            Repr::Exact(x) => Ok(x.is_zero()),
            Repr::Capped { .. } => Ok(false),
            Repr::Small { .. } => Err(Error::PrecisionExhausted("zero at stored precision".into())),
        }
    }

    pub fn val(&self) -> Result<Val> {
        match &self.repr {
            Repr::Exact(x) => Ok(super::arith::vp_rat(x, self.p)),
            Repr::Capped { v, .. } => Ok(Val::Fin(*v)),
            Repr::Small { .. } => Err(Error::PrecisionExhausted("valuation".into())),
        }
    }

    /// Valuation of a value that must be nonzero.
    pub fn val_fin(&self) -> Result<i64> {
        match self.val()? {
            Val::Fin(v) => Ok(v),
            Val::Inf => Err(Error::DivisionByZero),
        }
    }

    /// A lower bound for the valuation together with whether it is attained.
    pub fn val_bound(&self) -> (Val, bool) {
        match &self.repr {
            Repr::Small { abs } => (Val::Fin(*abs), false),
            _ => (self.val().expect("determined"), true),
        }
    }

    /// The unit part modulo `p`.
    pub fn unit_residue(&self) -> Result<u32> {
        let pb = big(self.p);
        let r = match &self.repr {
            Repr::Exact(x) => {
                let (_, u) = split_rat(x, self.p).ok_or(Error::DivisionByZero)?;
                rat_mod(&u, &pb)
            }
            Repr::Capped { unit, .. } => unit.mod_floor(&pb),
            Repr::Small { .. } => return Err(Error::PrecisionExhausted("unit residue".into())),
        };
        Ok(r.to_u32().expect("residue fits"))
    }

    /// The quadratic character η of the ramified extension F = F₀(√p).
    pub fn eta(&self) -> Result<i32> {
        let v = self.val_fin()?;
        let r = self.unit_residue()?;
        let l = legendre(&BigInt::from(r), self.p);
        let m1 = super::arith::eta_minus_one(self.p);
        Ok(if v.rem_euclid(2) == 1 { l * m1 } else { l })
    }

    /// Whether the value is a square in F₀^×.
    pub fn is_square(&self) -> Result<bool> {
        let v = self.val_fin()?;
        if v.rem_euclid(2) == 1 {
            return Ok(false);
        }
        Ok(legendre(&BigInt::from(self.unit_residue()?), self.p) == 1)
    }

    /// `(v, unit mod p^n)` view for capped arithmetic.
    fn part(&self, abs: i64) -> Part {
        match &self.repr {
            Repr::Exact(x) => match split_rat(x, self.p) {
                None => Part::Zero,
                Some((v, _)) if v >= abs => Part::Zero,
                Some((v, u)) => Part::Val(v, rat_mod(&u, &p_pow(self.p, (abs - v) as u32))),
            },
            Repr::Capped { v, unit, .. } => {
                if *v >= abs {
                    Part::Zero
                } else {
                    Part::Val(*v, unit.clone())
                }
            }
            Repr::Small { .. } => Part::Zero,
        }
    }

    fn check_prime(&self, o: &Self) {
        assert_eq!(self.p, o.p, "mixed primes in p-adic arithmetic");
    }

    fn add_impl(&self, o: &Self) -> Self {
        self.check_prime(o);
        if let (Repr::Exact(a), Repr::Exact(b)) = (&self.repr, &o.repr) {
            return Self::exact(self.p, a + b);
        }
        let abs = match (self.abs_precision(), o.abs_precision()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!(),
        };
        let parts = [self.part(abs), o.part(abs)];
        let base = parts
            .iter()
            .filter_map(|q| match q {
                Part::Val(v, _) => Some(*v),
                Part::Zero => None,
            })
            .min();
        let Some(base) = base else {
            return Self::small(self.p, abs);
        };
        let mut s = BigInt::zero();
        for q in parts {
            if let Part::Val(v, u) = q {
                s += u * p_pow(self.p, (v - base) as u32);
            }
        }
        Self::capped(self.p, base, s, (abs - base) as u32)
    }

    fn mul_impl(&self, o: &Self) -> Self {
        self.check_prime(o);
        let p = self.p;
        if self.is_exact_zero() || o.is_exact_zero() {
            return Self::zero(p);
        }
        match (&self.repr, &o.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => Self::exact(p, a * b),
            (Repr::Small { abs }, _) => Self::small(p, abs + o.val_bound().0.fin().unwrap()),
            (_, Repr::Small { abs }) => Self::small(p, abs + self.val_bound().0.fin().unwrap()),
            (Repr::Capped { v: va, unit: ua, n: na }, Repr::Capped { v: vb, unit: ub, n: nb }) => {
                Self::capped(p, va + vb, ua * ub, *na.min(nb))
            }
            (Repr::Capped { v, unit, n }, Repr::Exact(x)) | (Repr::Exact(x), Repr::Capped { v, unit, n }) => {
                let (vx, ux) = split_rat(x, p).unwrap();
                let ux = rat_mod(&ux, &p_pow(p, *n));
                Self::capped(p, v + vx, unit * ux, *n)
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let p = self.p;
        match &self.repr {
            Repr::Exact(x) => {
                if x.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Self::exact(p, x.recip()))
                }
            }
            Repr::Capped { v, unit, n } => {
                let m = p_pow(p, *n);
                let inv = unit.modinv(&m).expect("units are invertible");
                Ok(Self::capped(p, -v, inv, *n))
            }
            Repr::Small { .. } => Err(Error::PrecisionExhausted("inverse of a value zero at stored precision".into())),
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    /// `self · p^k`.
    pub fn shift(&self, k: i64) -> Self {
        self * &Self::p_power(self.p, k)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.p);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Equality at the available precision.
    pub fn approx_eq(&self, o: &Self) -> bool {
        let d = self - o;
        matches!(d.repr, Repr::Small { .. }) || d.is_exact_zero()
    }

    /// Lowers the relative precision of a capped value to `n` digits; exact values are converted.
    pub fn to_capped(&self, n: u32) -> Self {
        match &self.repr {
            Repr::Exact(x) => match split_rat(x, self.p) {
                None => Self::zero(self.p),
                Some((v, u)) => Self::capped(self.p, v, rat_mod(&u, &p_pow(self.p, n)), n),
            },
            Repr::Capped { v, unit, n: m } => Self::capped(self.p, *v, unit.clone(), n.min(*m)),
            Repr::Small { .. } => self.clone(),
        }
    }

    /// Square root with the deterministic branch: exact when the input is a
    /// rational square, else a Hensel lift to `n` digits.
    pub fn sqrt(&self, n: u32) -> Result<Self> {
        if let Repr::Exact(x) = &self.repr {
            if x.is_zero() {
                return Ok(self.clone());
            }
            let r = rat_sqrt(x);
            if let Some(r) = r {
                let c = Self::exact(self.p, r);
                let res = c.unit_residue()?;
                return Ok(if res <= (self.p - 1) / 2 { c } else { -c });
            }
        }
        hensel_sqrt(self, n)
    }

    pub fn to_wire(&self) -> ScalarWire {
        match &self.repr {
            Repr::Exact(x) => ScalarWire::Exact { num: x.numer().to_string(), den: x.denom().to_string() },
            Repr::Capped { v, unit, n } => {
                let pb = big(self.p);
                let mut digits = Vec::with_capacity(*n as usize);
                let mut u = unit.clone();
                for _ in 0..*n {
                    let (q, r) = u.div_mod_floor(&pb);
                    digits.push(r.to_u32().unwrap());
                    u = q;
                }
                ScalarWire::Capped { v: *v, digits, p: self.p, n: *n }
            }
            Repr::Small { abs } => ScalarWire::Capped { v: *abs, digits: vec![], p: self.p, n: 0 },
        }
    }

    pub fn from_wire(w: &ScalarWire, p: u32) -> Result<Self> {
        match w {
            ScalarWire::Exact { num, den } => {
                let n: BigInt = num.parse().map_err(|_| Error::Invalid(format!("bad numerator {num}")))?;
                let d: BigInt = den.parse().map_err(|_| Error::Invalid(format!("bad denominator {den}")))?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Self::exact(p, BigRational::new(n, d)))
            }
            ScalarWire::Int(k) => Ok(Self::from_int(p, *k)),
            ScalarWire::Capped { v, digits, p: q, n } => {
                if *q != p {
                    return Err(Error::PrimeMismatch(*q, p));
                }
                if *n == 0 {
                    return Ok(Self::small(p, *v));
                }
                let pb = big(p);
                let mut u = BigInt::zero();
                for d in digits.iter().rev() {
                    u = u * &pb + BigInt::from(*d);
                }
                Ok(Self::capped(p, *v, u, *n))
            }
        }
    }
}

/// JSON encoding of a scalar. Exact rationals carry no prime; integers are accepted as shorthand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarWire {
    Exact { num: String, den: String },
    Capped {
        v: i64,
        digits: Vec<u32>,
        p: u32,
        #[serde(rename = "N")]
        n: u32,
    },
    Int(i64),
}

impl Serialize for PadicScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

/// Hensel square root of `u` to `n` digits of relative precision.
pub fn hensel_sqrt(u: &PadicScalar, n: u32) -> Result<PadicScalar> {
    let p = u.p;
    let v = u.val_fin()?;
    if v.rem_euclid(2) == 1 {
        return Err(Error::NoSquareRoot(format!("odd valuation {v}")));
    }
    let (a, n) = match &u.repr {
        Repr::Exact(x) => {
            let (_, unit) = split_rat(x, p).unwrap();
            (rat_mod(&unit, &p_pow(p, n)), n)
        }
        Repr::Capped { unit, n: m, .. } => (unit.clone(), n.min(*m)),
        Repr::Small { .. } => unreachable!(),
    };
    let pb = big(p);
    let a0 = a.mod_floor(&pb);
    let r0 = (1..=(p - 1) / 2)
        .map(BigInt::from)
        .find(|r| (r * r - &a0).mod_floor(&pb).is_zero())
        .ok_or_else(|| Error::NoSquareRoot(format!("{a0} is a non-residue mod {p}")))?;
    let m = p_pow(p, n);
    let mut r = r0;
    let mut prec = 1u32;
    while prec < n {
        prec = (2 * prec).min(n);
        let f = (&r * &r - &a).mod_floor(&m);
        let d = (BigInt::from(2) * &r).modinv(&m).unwrap();
        r = (&r - f * d).mod_floor(&m);
    }
    Ok(PadicScalar::capped(p, v / 2, r, n))
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&PadicScalar> for &PadicScalar {
            type Output = PadicScalar;
            fn $f(self, o: &PadicScalar) -> PadicScalar {
                $body(self, o)
            }
        }
        impl $tr<PadicScalar> for PadicScalar {
            type Output = PadicScalar;
            fn $f(self, o: PadicScalar) -> PadicScalar {
                $body(&self, &o)
            }
        }
        impl $tr<&PadicScalar> for PadicScalar {
            type Output = PadicScalar;
            fn $f(self, o: &PadicScalar) -> PadicScalar {
                $body(&self, o)
            }
        }
        impl $tr<PadicScalar> for &PadicScalar {
            type Output = PadicScalar;
            fn $f(self, o: PadicScalar) -> PadicScalar {
                $body(self, &o)
            }
        }
    };
}

binop!(Add, add, |a: &PadicScalar, b: &PadicScalar| a.add_impl(b));
binop!(Sub, sub, |a: &PadicScalar, b: &PadicScalar| a.add_impl(&-b));
binop!(Mul, mul, |a: &PadicScalar, b: &PadicScalar| a.mul_impl(b));

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        let p = self.p;
        match &self.repr {
            Repr::Exact(x) => PadicScalar::exact(p, -x),
            Repr::Capped { v, unit, n } => PadicScalar::capped(p, *v, -unit, *n),
            Repr::Small { .. } => self.clone(),
        }
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        -&self
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Exact(x) => write!(f, "{x}"),
            Repr::Capped { v, unit, n } => write!(f, "{}^{}·{} + O({}^{})", self.p, v, unit, self.p, v + *n as i64),
            Repr::Small { abs } => write!(f, "O({}^{})", self.p, abs),
        }
    }
}

impl PadicScalar {
    /// Sign-aware comparison helper for exact values only.
    pub fn is_negative_exact(&self) -> bool {
        matches!(&self.repr, Repr::Exact(x) if x.is_negative())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.repr, Repr::Exact(x) if x.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: u32, n: i64) -> PadicScalar {
        PadicScalar::from_int(p, n)
    }

    #[test]
    fn val_examples() {
        assert_eq!(s(5, 5).val().unwrap(), Val::Fin(1));
        assert_eq!(PadicScalar::from_frac(5, 1, 25).val().unwrap(), Val::Fin(-2));
        assert_eq!(s(5, 0).val().unwrap(), Val::Inf);
    }

    #[test]
    fn eta_examples() {
        assert_eq!(s(5, 4).eta().unwrap(), 1);
        assert_eq!(s(5, 5).eta().unwrap(), 1);
        assert_eq!(s(3, 3).eta().unwrap(), -1);
    }

    #[test]
    fn hensel_examples() {
        let r = hensel_sqrt(&s(5, 4), 3).unwrap();
        assert_eq!(r, PadicScalar::capped(5, 0, BigInt::from(2), 3));
        let r = hensel_sqrt(&s(5, -1), 3).unwrap();
        assert_eq!(r, PadicScalar::capped(5, 0, BigInt::from(57), 3));
        assert!(matches!(hensel_sqrt(&s(5, 2), 3), Err(Error::NoSquareRoot(_))));
    }

    #[test]
    fn exact_sqrt_uses_lower_half_branch() {
        // 9 at p = 5: roots ±3, residues 3 and 2; the branch with residue 2 is -3.
        assert_eq!(s(5, 9).sqrt(10).unwrap(), s(5, -3));
        assert_eq!(s(5, 4).sqrt(10).unwrap(), s(5, 2));
    }

    #[test]
    fn capped_arithmetic_tracks_precision() {
        let a = PadicScalar::capped(5, 0, BigInt::from(57), 3);
        let sq = &a * &a;
        assert!(sq.approx_eq(&s(5, -1)));
        let d = &sq + &s(5, 1);
        assert_eq!(d, PadicScalar::small(5, 3));
        assert!(d.val().is_err());
    }

    #[test]
    fn capped_division() {
        let a = PadicScalar::capped(5, 1, BigInt::from(3), 6);
        let b = PadicScalar::capped(5, 0, BigInt::from(2), 4);
        let q = a.div(&b).unwrap();
        assert_eq!(q.val().unwrap(), Val::Fin(1));
        assert!((&q * &b).approx_eq(&a.to_capped(4)));
    }

    #[test]
    fn wire_round_trip() {
        let a = PadicScalar::capped(7, -2, BigInt::from(1234), 5);
        assert_eq!(PadicScalar::from_wire(&a.to_wire(), 7).unwrap(), a);
        let b = PadicScalar::from_frac(7, -3, 49);
        assert_eq!(PadicScalar::from_wire(&b.to_wire(), 7).unwrap(), b);
    }
}
