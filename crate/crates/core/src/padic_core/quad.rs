//! The ramified quadratic extension F = F₀(π), π² = p.

use super::arith::Val;
use super::scalar::{PadicScalar, ScalarWire};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// `a + bπ ∈ F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadElt {
    pub a: PadicScalar,
    pub b: PadicScalar,
}

impl QuadElt {
    pub fn new(a: PadicScalar, b: PadicScalar) -> Self {
        assert_eq!(a.p(), b.p(), "mixed primes");
        QuadElt { a, b }
    }

    pub fn from_base(a: PadicScalar) -> Self {
        let p = a.p();
        QuadElt { a, b: PadicScalar::zero(p) }
    }

    pub fn from_ints(p: u32, a: i64, b: i64) -> Self {
        QuadElt::new(PadicScalar::from_int(p, a), PadicScalar::from_int(p, b))
    }

    pub fn zero(p: u32) -> Self {
        Self::from_ints(p, 0, 0)
    }

    pub fn one(p: u32) -> Self {
        Self::from_ints(p, 1, 0)
    }

    /// The uniformizer π.
    pub fn pi(p: u32) -> Self {
        Self::from_ints(p, 0, 1)
    }

    /// `b·π` for `b ∈ F₀`.
    pub fn pure(b: PadicScalar) -> Self {
        let p = b.p();
        QuadElt { a: PadicScalar::zero(p), b }
    }

    pub fn p(&self) -> u32 {
        self.a.p()
    }

    fn varpi(&self) -> PadicScalar {
        PadicScalar::from_int(self.p(), self.p() as i64)
    }

    pub fn conj(&self) -> Self {
        QuadElt { a: self.a.clone(), b: -&self.b }
    }

    pub fn norm(&self) -> PadicScalar {
        &self.a * &self.a - &self.b * &self.b * self.varpi()
    }

    pub fn trace(&self) -> PadicScalar {
        &self.a + &self.a
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        QuadElt { a: &self.a * c, b: &self.b * c }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.a.is_exact_zero() && self.b.is_exact_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.a.is_exact() && self.b.is_exact()
    }

    pub fn is_zero(&self) -> Result<bool> {
        match self.val_f()? {
            Val::Inf => Ok(true),
            Val::Fin(_) => Ok(false),
        }
    }

    /// `v_F`, normalized by `v_F(π) = 1`.
    pub fn val_f(&self) -> Result<Val> {
        let (va, ea) = self.a.val_bound();
        let (vb, eb) = self.b.val_bound();
        let ca = match va {
            Val::Fin(k) => Val::Fin(2 * k),
            Val::Inf => Val::Inf,
        };
        let cb = match vb {
            Val::Fin(k) => Val::Fin(2 * k + 1),
            Val::Inf => Val::Inf,
        };
        let m = ca.min(cb);
        // the minimum must be attained by a determined component, strictly below any bound
        let ok_a = ea || ca > m;
        let ok_b = eb || cb > m;
        let attained = (ea && ca == m) || (eb && cb == m);
        if ok_a && ok_b && (attained || m == Val::Inf) {
            Ok(m)
        } else {
            Err(Error::PrecisionExhausted("v_F".into()))
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        let ni = n.inv()?;
        Ok(self.conj().scale(&ni))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    /// Whether `v_F ≥ 0`.
    pub fn is_integral(&self) -> Result<bool> {
        Ok(self.val_f()? >= Val::Fin(0))
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        self.a.approx_eq(&o.a) && self.b.approx_eq(&o.b)
    }

    pub fn to_wire(&self) -> QuadWire {
        QuadWire { a: self.a.to_wire(), b: self.b.to_wire() }
    }

    pub fn from_wire(w: &QuadWire, p: u32) -> Result<Self> {
        Ok(QuadElt::new(PadicScalar::from_wire(&w.a, p)?, PadicScalar::from_wire(&w.b, p)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadWire {
    pub a: ScalarWire,
    pub b: ScalarWire,
}

impl Serialize for QuadElt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

fn mul_impl(x: &QuadElt, y: &QuadElt) -> QuadElt {
    let w = x.varpi();
    QuadElt {
        a: &x.a * &y.a + &x.b * &y.b * w,
        b: &x.a * &y.b + &x.b * &y.a,
    }
}

macro_rules! qbinop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&QuadElt> for &QuadElt {
            type Output = QuadElt;
            fn $f(self, o: &QuadElt) -> QuadElt {
                $body(self, o)
            }
        }
        impl $tr<QuadElt> for QuadElt {
            type Output = QuadElt;
            fn $f(self, o: QuadElt) -> QuadElt {
                $body(&self, &o)
            }
        }
        impl $tr<&QuadElt> for QuadElt {
            type Output = QuadElt;
            fn $f(self, o: &QuadElt) -> QuadElt {
                $body(&self, o)
            }
        }
        impl $tr<QuadElt> for &QuadElt {
            type Output = QuadElt;
            fn $f(self, o: QuadElt) -> QuadElt {
                $body(self, &o)
            }
        }
    };
}

qbinop!(Add, add, |x: &QuadElt, y: &QuadElt| QuadElt { a: &x.a + &y.a, b: &x.b + &y.b });
qbinop!(Sub, sub, |x: &QuadElt, y: &QuadElt| QuadElt { a: &x.a - &y.a, b: &x.b - &y.b });
qbinop!(Mul, mul, mul_impl);

impl Neg for &QuadElt {
    type Output = QuadElt;
    fn neg(self) -> QuadElt {
        QuadElt { a: -&self.a, b: -&self.b }
    }
}

impl Neg for QuadElt {
    type Output = QuadElt;
    fn neg(self) -> QuadElt {
        -&self
    }
}

impl fmt::Display for QuadElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})π", self.a, self.b)
    }
}

/// Solves `N(a + bπ) = target` (deterministic branch).
pub fn solve_norm_f(target: &PadicScalar, n: u32) -> Result<QuadElt> {
    let p = target.p();
    let v = target.val_fin()?;
    if target.eta()? != 1 {
        return Err(Error::NotANorm(format!("{target}")));
    }
    if v.rem_euclid(2) == 0 {
        Ok(QuadElt::from_base(target.sqrt(n)?))
    } else {
        // N(bπ) = -b²p
        let c = (-target).div(&PadicScalar::from_int(p, p as i64))?;
        Ok(QuadElt::pure(c.sqrt(n)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_of_pi() {
        assert_eq!(QuadElt::pi(5).norm(), PadicScalar::from_int(5, -5));
    }

    #[test]
    fn valuation_f() {
        assert_eq!(QuadElt::pi(5).val_f().unwrap(), Val::Fin(1));
        assert_eq!(QuadElt::from_ints(5, 5, 1).val_f().unwrap(), Val::Fin(1));
        assert_eq!(QuadElt::from_ints(5, 5, 5).val_f().unwrap(), Val::Fin(2));
        assert_eq!(QuadElt::zero(5).val_f().unwrap(), Val::Inf);
    }

    #[test]
    fn norm_solutions() {
        let p = 5;
        assert_eq!(solve_norm_f(&PadicScalar::from_int(p, 4), 10).unwrap(), QuadElt::from_ints(p, 2, 0));
        assert_eq!(solve_norm_f(&PadicScalar::from_int(p, -5), 10).unwrap(), QuadElt::from_ints(p, 0, 1));
        assert!(matches!(solve_norm_f(&PadicScalar::from_int(3, 3), 10), Err(Error::NotANorm(_))));
        let t = PadicScalar::from_int(p, 6);
        let r = solve_norm_f(&t, 12).unwrap();
        assert!(r.norm().approx_eq(&t));
    }

    #[test]
    fn inverse() {
        let x = QuadElt::from_ints(7, 3, 2);
        assert_eq!(&x * &x.inv().unwrap(), QuadElt::one(7));
    }
}
