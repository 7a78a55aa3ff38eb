//! The quaternion division algebra D = F ⊕ Fj, j² = ε, ja = āj.

use super::arith::{smallest_nonresidue, Val};
use super::quad::{QuadElt, QuadWire};
use super::scalar::PadicScalar;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// `x + y·j ∈ D`. `eps` is the fixed non-residue with `j² = ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatElt {
    pub x: QuadElt,
    pub y: QuadElt,
    pub eps: i64,
}

impl QuatElt {
    pub fn new(x: QuadElt, y: QuadElt) -> Self {
        assert_eq!(x.p(), y.p(), "mixed primes");
        let eps = smallest_nonresidue(x.p());
        QuatElt { x, y, eps }
    }

    pub fn from_quad(x: QuadElt) -> Self {
        let p = x.p();
        Self::new(x, QuadElt::zero(p))
    }

    pub fn from_scalar(a: PadicScalar) -> Self {
        Self::from_quad(QuadElt::from_base(a))
    }

    pub fn zero(p: u32) -> Self {
        Self::new(QuadElt::zero(p), QuadElt::zero(p))
    }

    pub fn one(p: u32) -> Self {
        Self::new(QuadElt::one(p), QuadElt::zero(p))
    }

    pub fn pi(p: u32) -> Self {
        Self::from_quad(QuadElt::pi(p))
    }

    pub fn j(p: u32) -> Self {
        Self::new(QuadElt::zero(p), QuadElt::one(p))
    }

    pub fn p(&self) -> u32 {
        self.x.p()
    }

    fn eps_scalar(&self) -> PadicScalar {
        PadicScalar::from_int(self.p(), self.eps)
    }

    /// Main involution `x̄ − yj`.
    pub fn conj(&self) -> Self {
        Self::new(self.x.conj(), -&self.y)
    }

    pub fn nrd(&self) -> PadicScalar {
        self.x.norm() - self.eps_scalar() * self.y.norm()
    }

    pub fn trd(&self) -> PadicScalar {
        self.x.trace()
    }

    /// `v_D = v(Nrd)`.
    pub fn v_d(&self) -> Result<Val> {
        self.nrd().val()
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.nrd();
        if n.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        let ni = QuadElt::from_base(n.inv()?);
        Ok(Self::new(&ni * &self.conj().x, &ni * &self.conj().y))
    }

    pub fn div_right(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    /// The component commuting with π (the F-part).
    pub fn plus(&self) -> Self {
        Self::from_quad(self.x.clone())
    }

    /// The component anticommuting with π (the Fj-part).
    pub fn minus(&self) -> Self {
        Self::new(QuadElt::zero(self.p()), self.y.clone())
    }

    /// `π z π⁻¹`.
    pub fn pi_conj(&self) -> Self {
        Self::new(self.x.clone(), -&self.y)
    }

    /// Left multiplication by an element of F.
    pub fn scale_f(&self, a: &QuadElt) -> Self {
        Self::new(a * &self.x, a * &self.y)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.x.is_exact_zero() && self.y.is_exact_zero()
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.x.is_zero()? && self.y.is_zero()?)
    }

    /// Integral iff `v_D ≥ 0`, equivalently both coordinates lie in O_F.
    pub fn is_integral(&self) -> Result<bool> {
        Ok(self.x.is_integral()? && self.y.is_integral()?)
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        self.x.approx_eq(&o.x) && self.y.approx_eq(&o.y)
    }

    pub fn to_wire(&self) -> QuatWire {
        QuatWire { x: self.x.to_wire(), y: self.y.to_wire(), eps: self.eps.to_string() }
    }

    pub fn from_wire(w: &QuatWire, p: u32) -> Result<Self> {
        let q = Self::new(QuadElt::from_wire(&w.x, p)?, QuadElt::from_wire(&w.y, p)?);
        if w.eps != q.eps.to_string() {
            return Err(Error::Invalid(format!("eps {} differs from the fixed non-residue {}", w.eps, q.eps)));
        }
        Ok(q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuatWire {
    pub x: QuadWire,
    pub y: QuadWire,
    pub eps: String,
}

impl Serialize for QuatElt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

fn mul_impl(a: &QuatElt, b: &QuatElt) -> QuatElt {
    let e = QuadElt::from_base(a.eps_scalar());
    QuatElt::new(
        &a.x * &b.x + &e * &a.y * b.y.conj(),
        &a.x * &b.y + &a.y * b.x.conj(),
    )
}

macro_rules! dbinop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&QuatElt> for &QuatElt {
            type Output = QuatElt;
            fn $f(self, o: &QuatElt) -> QuatElt {
                $body(self, o)
            }
        }
        impl $tr<QuatElt> for QuatElt {
            type Output = QuatElt;
            fn $f(self, o: QuatElt) -> QuatElt {
                $body(&self, &o)
            }
        }
        impl $tr<&QuatElt> for QuatElt {
            type Output = QuatElt;
            fn $f(self, o: &QuatElt) -> QuatElt {
                $body(&self, o)
            }
        }
        impl $tr<QuatElt> for &QuatElt {
            type Output = QuatElt;
            fn $f(self, o: QuatElt) -> QuatElt {
                $body(self, &o)
            }
        }
    };
}

dbinop!(Add, add, |a: &QuatElt, b: &QuatElt| QuatElt::new(&a.x + &b.x, &a.y + &b.y));
dbinop!(Sub, sub, |a: &QuatElt, b: &QuatElt| QuatElt::new(&a.x - &b.x, &a.y - &b.y));
dbinop!(Mul, mul, mul_impl);

impl Neg for &QuatElt {
    type Output = QuatElt;
    fn neg(self) -> QuatElt {
        QuatElt::new(-&self.x, -&self.y)
    }
}

impl Neg for QuatElt {
    type Output = QuatElt;
    fn neg(self) -> QuatElt {
        -&self
    }
}

impl fmt::Display for QuatElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] + [{}]j", self.x, self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nrd_of_j() {
        for p in [3, 5, 7] {
            let j = QuatElt::j(p);
            assert_eq!(j.nrd(), PadicScalar::from_int(p, -j.eps));
            assert_eq!(&j * &j, QuatElt::from_scalar(PadicScalar::from_int(p, j.eps)));
        }
    }

    #[test]
    fn pi_anticommutes_with_j() {
        let p = 5;
        assert_eq!(QuatElt::pi(p) * QuatElt::j(p), -(QuatElt::j(p) * QuatElt::pi(p)));
    }

    #[test]
    fn v_d_normalization() {
        assert_eq!(QuatElt::pi(7).v_d().unwrap(), Val::Fin(1));
        assert_eq!(QuatElt::j(7).v_d().unwrap(), Val::Fin(0));
    }

    #[test]
    fn inverse_and_conj() {
        let p = 7;
        let z = QuatElt::new(QuadElt::from_ints(p, 2, 1), QuadElt::from_ints(p, -1, 3));
        assert_eq!(&z * &z.inv().unwrap(), QuatElt::one(p));
        assert_eq!(&z * &z.conj(), QuatElt::from_scalar(z.nrd()));
    }
}
