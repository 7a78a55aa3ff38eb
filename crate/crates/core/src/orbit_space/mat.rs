//! 3×3 matrices over F₀, F or D.

use crate::error::{Error, Result};
use crate::padic_core::{PadicScalar, QuadElt, QuatElt, Val};

/// The operations matrix code needs from an entry type.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn r_add(&self, o: &Self) -> Self;
    fn r_sub(&self, o: &Self) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
    fn r_neg(&self) -> Self;
    fn r_inv(&self) -> Result<Self>;
    fn exact_zero(&self) -> bool;
    /// Valuation used for pivoting, smaller is better.
    fn pivot_val(&self) -> Option<i64>;
}

macro_rules! ring_impl {
    ($t:ty, $zero:expr, $one:expr, $pv:expr) => {
        impl Ring for $t {
            fn zero_like(&self) -> Self {
                $zero(self.p())
            }
            fn one_like(&self) -> Self {
                $one(self.p())
            }
            fn r_add(&self, o: &Self) -> Self {
                self + o
            }
            fn r_sub(&self, o: &Self) -> Self {
                self - o
            }
            fn r_mul(&self, o: &Self) -> Self {
                self * o
            }
            fn r_neg(&self) -> Self {
                -self
            }
            fn r_inv(&self) -> Result<Self> {
                self.inv()
            }
            fn exact_zero(&self) -> bool {
                self.is_exact_zero()
            }
            fn pivot_val(&self) -> Option<i64> {
                $pv(self)
            }
        }
    };
}

ring_impl!(PadicScalar, PadicScalar::zero, PadicScalar::one, |x: &PadicScalar| x.val().ok().and_then(Val::fin));
ring_impl!(QuadElt, QuadElt::zero, QuadElt::one, |x: &QuadElt| x.val_f().ok().and_then(Val::fin));
ring_impl!(QuatElt, QuatElt::zero, QuatElt::one, |x: &QuatElt| x.v_d().ok().and_then(Val::fin));

#[derive(Clone, Debug, PartialEq)]
pub struct Mat3<T: Ring> {
    pub e: [[T; 3]; 3],
}

impl<T: Ring> Mat3<T> {
    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        Mat3 { e: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))) }
    }

    pub fn identity(like: &T) -> Self {
        Self::from_fn(|i, j| if i == j { like.one_like() } else { like.zero_like() })
    }

    pub fn scalar(c: &T) -> Self {
        Self::from_fn(|i, j| if i == j { c.clone() } else { c.zero_like() })
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| {
            let mut s = self.e[i][0].r_mul(&o.e[0][j]);
            for k in 1..3 {
                s = s.r_add(&self.e[i][k].r_mul(&o.e[k][j]));
            }
            s
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.e[i][j].r_add(&o.e[i][j]))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.e[i][j].r_sub(&o.e[i][j]))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(|i, j| self.e[i][j].r_neg())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.e[j][i].clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::identity(&self.e[0][0]);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Gauss-Jordan inverse; valid over a division ring since left and right inverses agree.
    pub fn inverse(&self) -> Result<Self> {
        let mut a = self.e.clone();
        let mut b = Self::identity(&self.e[0][0]).e;
        for col in 0..3 {
            let piv = (col..3)
                .filter(|&r| !a[r][col].exact_zero())
                .min_by_key(|&r| a[r][col].pivot_val().unwrap_or(i64::MAX))
                .ok_or(Error::DivisionByZero)?;
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = a[col][col].r_inv()?;
            for j in 0..3 {
                a[col][j] = inv.r_mul(&a[col][j]);
                b[col][j] = inv.r_mul(&b[col][j]);
            }
            for r in 0..3 {
                if r == col || a[r][col].exact_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..3 {
                    a[r][j] = a[r][j].r_sub(&f.r_mul(&a[col][j]));
                    b[r][j] = b[r][j].r_sub(&f.r_mul(&b[col][j]));
                }
            }
        }
        Ok(Mat3 { e: b })
    }
}

/// Determinant, for commutative entries.
pub fn det3<T: Ring>(m: &Mat3<T>) -> T {
    let e = &m.e;
    let t = |a: &T, b: &T, c: &T| a.r_mul(b).r_mul(c);
    let pos = t(&e[0][0], &e[1][1], &e[2][2])
        .r_add(&t(&e[0][1], &e[1][2], &e[2][0]))
        .r_add(&t(&e[0][2], &e[1][0], &e[2][1]));
    let neg = t(&e[0][2], &e[1][1], &e[2][0])
        .r_add(&t(&e[0][0], &e[1][2], &e[2][1]))
        .r_add(&t(&e[0][1], &e[1][0], &e[2][2]));
    pos.r_sub(&neg)
}

/// 2×2 matrices over F₀, used for the action of GL₂ on 𝔰_red.
#[derive(Clone, Debug, PartialEq)]
pub struct Gl2(pub [[PadicScalar; 2]; 2]);

impl Gl2 {
    pub fn det(&self) -> PadicScalar {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    /// `diag(h, 1)` as a 3×3 matrix.
    pub fn embed(&self) -> Mat3<PadicScalar> {
        let p = self.0[0][0].p();
        Mat3::from_fn(|i, j| match (i, j) {
            (2, 2) => PadicScalar::one(p),
            (2, _) | (_, 2) => PadicScalar::zero(p),
            _ => self.0[i][j].clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_matrix_inverse() {
        let p = 5;
        let q = |a, b, c, d| QuatElt::new(QuadElt::from_ints(p, a, b), QuadElt::from_ints(p, c, d));
        let m = Mat3 {
            e: [
                [q(1, 2, 0, 1), q(0, 0, 3, 0), q(1, 0, 0, 0)],
                [q(0, 1, 1, 1), q(2, 0, 0, 0), q(0, 0, 0, 1)],
                [q(1, 0, 0, 0), q(0, 1, 0, 0), q(4, 1, 1, 0)],
            ],
        };
        let inv = m.inverse().unwrap();
        let id = Mat3::identity(&QuatElt::one(p));
        assert_eq!(m.mul(&inv), id);
        assert_eq!(inv.mul(&m), id);
    }
}
