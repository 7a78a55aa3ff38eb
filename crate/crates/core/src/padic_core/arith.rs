//! Integer and rational helpers shared by the p-adic types.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A valuation: an integer or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Fin(i64),
    Inf,
}

impl Val {
    pub fn is_inf(self) -> bool {
        matches!(self, Val::Inf)
    }

    /// The finite value, if any.
    pub fn fin(self) -> Option<i64> {
        match self {
            Val::Fin(k) => Some(k),
            Val::Inf => None,
        }
    }

    pub fn add(self, k: i64) -> Val {
        match self {
            Val::Fin(v) => Val::Fin(v + k),
            Val::Inf => Val::Inf,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(k) => write!(f, "{k}"),
            Val::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Val::Fin(k) => s.serialize_i64(*k),
            Val::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Val {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum W {
            I(i64),
            S(String),
        }
        match W::deserialize(d)? {
            W::I(k) => Ok(Val::Fin(k)),
            W::S(s) if s == "inf" || s == "∞" => Ok(Val::Inf),
            W::S(s) => s
                .parse::<i64>()
                .map(Val::Fin)
                .map_err(|_| serde::de::Error::custom(format!("bad valuation {s}"))),
        }
    }
}

impl std::str::FromStr for Val {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "∞" | "infinity" => Ok(Val::Inf),
            _ => s.parse::<i64>().map(Val::Fin).map_err(|e| e.to_string()),
        }
    }
}

pub fn big(p: u32) -> BigInt {
    BigInt::from(p)
}

/// `p^k` for `k ≥ 0`.
pub fn p_pow(p: u32, k: u32) -> BigInt {
    num_traits::pow(big(p), k as usize)
}

/// `p^k` as a rational, any sign of `k`.
pub fn q_pow(p: u32, k: i64) -> BigRational {
    let m = p_pow(p, k.unsigned_abs() as u32);
    if k >= 0 {
        BigRational::from_integer(m)
    } else {
        BigRational::new(BigInt::one(), m)
    }
}

/// Splits a nonzero integer as `p^v · n'` with `p ∤ n'`.
pub fn split_int(n: &BigInt, p: u32) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let pb = big(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (v, m);
        }
        m = q;
        v += 1;
    }
}

/// `v_p` of a nonzero rational together with its unit part.
pub fn split_rat(x: &BigRational, p: u32) -> Option<(i64, BigRational)> {
    if x.is_zero() {
        return None;
    }
    let (vn, n) = split_int(x.numer(), p);
    let (vd, d) = split_int(x.denom(), p);
    Some((vn - vd, BigRational::new(n, d)))
}

pub fn vp_rat(x: &BigRational, p: u32) -> Val {
    match split_rat(x, p) {
        Some((v, _)) => Val::Fin(v),
        None => Val::Inf,
    }
}

/// Reduces a `p`-integral rational modulo `m`.
pub fn rat_mod(x: &BigRational, m: &BigInt) -> BigInt {
    let inv = x
        .denom()
        .modinv(m)
        .expect("denominator must be prime to the modulus");
    (x.numer() * inv).mod_floor(m)
}

/// Legendre symbol `(a | p)` in `{-1, 0, 1}`.
pub fn legendre(a: &BigInt, p: u32) -> i32 {
    let pb = big(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    let e = (&pb - 1u32) / 2u32;
    if r.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}

/// The smallest positive quadratic non-residue mod `p`; this is ε.
pub fn smallest_nonresidue(p: u32) -> i64 {
    (2..p as i64)
        .find(|&a| legendre(&BigInt::from(a), p) == -1)
        .expect("odd primes have non-residues")
}

/// `η(-1) = (-1 | p)`.
pub fn eta_minus_one(p: u32) -> i32 {
    if p % 4 == 1 {
        1
    } else {
        -1
    }
}

pub fn is_odd_prime(p: u32) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Exact square root of a nonnegative rational, when it is a rational square.
pub fn rat_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_i64(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_of_rationals() {
        assert_eq!(vp_rat(&rint(5), 5), Val::Fin(1));
        assert_eq!(vp_rat(&rat(1, 25), 5), Val::Fin(-2));
        assert_eq!(vp_rat(&rint(0), 5), Val::Inf);
    }

    #[test]
    fn nonresidues() {
        assert_eq!(smallest_nonresidue(3), 2);
        assert_eq!(smallest_nonresidue(5), 2);
        assert_eq!(smallest_nonresidue(7), 3);
        assert_eq!(smallest_nonresidue(17), 3);
    }

    #[test]
    fn val_order_puts_infinity_last() {
        assert!(Val::Fin(100) < Val::Inf);
        assert!(Val::Fin(-1) < Val::Fin(0));
    }
}
