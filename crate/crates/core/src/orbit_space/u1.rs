//! The non-split side: elements of 𝔲₁ and U₁ as 3×3 matrices over D.

use super::bpoint::BPoint;
use super::mat::{det3, Mat3};
use crate::error::{Error, Result};
use crate::padic_core::{PadicScalar, QuadElt, QuatElt, QuatWire};
use serde::{Deserialize, Serialize};

pub type DMat3 = Mat3<QuatElt>;

fn varpi_d(p: u32) -> QuatElt {
    QuatElt::from_scalar(PadicScalar::from_int(p, p as i64))
}

/// A reduced element `[[α, 0, bπ], [0, α, b], [πb̄, b̄ϖ, 0]]` with `Trd α = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct U1RedElt {
    pub alpha: QuatElt,
    pub b: QuatElt,
}

impl U1RedElt {
    pub fn new(alpha: QuatElt, b: QuatElt) -> Result<Self> {
        if !alpha.trd().approx_eq(&PadicScalar::zero(alpha.p())) {
            return Err(Error::Invalid("α must be traceless".into()));
        }
        Ok(U1RedElt { alpha, b })
    }

    pub fn p(&self) -> u32 {
        self.alpha.p()
    }

    /// `α′ = b⁻¹αb`.
    pub fn alpha_prime(&self) -> Result<QuatElt> {
        Ok(&self.b.inv()? * &self.alpha * &self.b)
    }

    /// `λ = Nrd α`, `u = 2Nrd b`, `w = 2Nrd(b)·α′₊`.
    pub fn invariants(&self) -> Result<BPoint> {
        let p = self.p();
        let two = PadicScalar::from_int(p, 2);
        let lambda = self.alpha.nrd();
        if self.b.is_exact_zero() {
            return Ok(BPoint::new(lambda, PadicScalar::zero(p), PadicScalar::zero(p)));
        }
        let nb = self.b.nrd();
        let u = &two * &nb;
        let ap = self.alpha_prime()?;
        let wtilde = &u * &ap.x.b;
        Ok(BPoint::new(lambda, u, wtilde))
    }

    /// `b ≠ 0` and `α′₋ ≠ 0`.
    pub fn is_rs(&self) -> Result<bool> {
        if self.b.is_zero()? {
            return Ok(false);
        }
        Ok(!self.alpha_prime()?.minus().is_zero()?)
    }

    pub fn is_integral(&self) -> Result<bool> {
        Ok(self.alpha.is_integral()? && self.b.is_integral()?)
    }

    pub fn to_full(&self) -> U1Elt {
        let p = self.p();
        U1Elt { alpha: self.alpha.clone(), beta: PadicScalar::zero(p), b: self.b.clone(), d: QuadElt::zero(p) }
    }

    pub fn matrix(&self) -> DMat3 {
        self.to_full().matrix()
    }

    pub fn to_wire(&self) -> U1RedWire {
        U1RedWire { space: "u1_red".into(), p: Some(self.p()), alpha: self.alpha.to_wire(), b: self.b.to_wire() }
    }

    pub fn from_wire(w: &U1RedWire, p: u32) -> Result<Self> {
        let p = w.p.unwrap_or(p);
        Self::new(QuatElt::from_wire(&w.alpha, p)?, QuatElt::from_wire(&w.b, p)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct U1RedWire {
    pub space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    pub alpha: QuatWire,
    pub b: QuatWire,
}

/// A full Lie algebra element `[[α, βϖ, bπ], [β, α, b], [πb̄, b̄ϖ, d]]`,
/// `α ∈ D^{tr=0}`, `β ∈ F₀`, `d ∈ F^{tr=0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct U1Elt {
    pub alpha: QuatElt,
    pub beta: PadicScalar,
    pub b: QuatElt,
    pub d: QuadElt,
}

impl U1Elt {
    pub fn p(&self) -> u32 {
        self.alpha.p()
    }

    pub fn matrix(&self) -> DMat3 {
        let p = self.p();
        let pi = QuatElt::pi(p);
        let w = varpi_d(p);
        let beta = QuatElt::from_scalar(self.beta.clone());
        let bbar = self.b.conj();
        Mat3 {
            e: [
                [self.alpha.clone(), &beta * &w, &self.b * &pi],
                [beta, self.alpha.clone(), self.b.clone()],
                [&pi * &bbar, &bbar * &w, QuatElt::from_quad(self.d.clone())],
            ],
        }
    }

    /// Reads coordinates back, checking the shape of a Lie algebra element.
    pub fn from_matrix(m: &DMat3) -> Result<Self> {
        let p = m.e[0][0].p();
        let alpha = m.e[0][0].clone();
        let beta_d = m.e[1][0].clone();
        let b = m.e[1][2].clone();
        let d = m.e[2][2].clone();
        let shape_ok = beta_d.y.is_exact_zero()
            && beta_d.x.b.is_exact_zero()
            && d.y.is_exact_zero()
            && d.x.a.is_exact_zero();
        if !shape_ok {
            return Err(Error::Invalid("not an element of 𝔲₁".into()));
        }
        let x = U1Elt { alpha, beta: beta_d.x.a.clone(), b, d: d.x };
        if x.matrix() != *m {
            return Err(Error::Invalid("not an element of 𝔲₁".into()));
        }
        let _ = p;
        Ok(x)
    }

    /// Integral iff `α, b ∈ O_D`, `β ∈ O_{F₀}`, `d ∈ O_F`.
    pub fn is_integral(&self) -> Result<bool> {
        Ok(self.alpha.is_integral()?
            && self.b.is_integral()?
            && QuadElt::from_base(self.beta.clone()).is_integral()?
            && self.d.is_integral()?)
    }

    /// Projection to the reduced part, with the discarded `(2βπ, d)`.
    pub fn reduce(&self) -> (U1RedElt, QuadElt, QuadElt) {
        let two_beta_pi = QuadElt::pure(&self.beta * PadicScalar::from_int(self.p(), 2));
        (U1RedElt { alpha: self.alpha.clone(), b: self.b.clone() }, two_beta_pi, self.d.clone())
    }

    pub fn from_parts(red: &U1RedElt, two_beta_pi: &QuadElt, d: &QuadElt) -> Self {
        let p = red.p();
        U1Elt {
            alpha: red.alpha.clone(),
            beta: &two_beta_pi.b * PadicScalar::from_frac(p, 1, 2),
            b: red.b.clone(),
            d: d.clone(),
        }
    }

    /// `Δ = −ϖ⁻² det((x^{i+j})₃₃)`, computed from matrix powers.
    pub fn delta_from_powers(&self) -> Result<QuadElt> {
        delta_from_powers(&self.matrix())
    }

    pub fn is_rs(&self) -> Result<bool> {
        Ok(!self.delta_from_powers()?.is_zero()?)
    }
}

/// `−ϖ⁻² det((x^{i+j})₃₃)_{0≤i,j≤2}` for any element of `End_{O_F}`.
pub fn delta_from_powers(m: &DMat3) -> Result<QuadElt> {
    let p = m.e[0][0].p();
    let mut corner = vec![];
    let mut pw = Mat3::identity(&QuatElt::one(p));
    for _ in 0..=4 {
        let c = pw.e[2][2].clone();
        if !c.y.is_exact_zero() {
            return Err(Error::Invalid("corner entry outside F".into()));
        }
        corner.push(c.x);
        pw = pw.mul(m);
    }
    let g = Mat3::from_fn(|i, j| corner[i + j].clone());
    let w = PadicScalar::from_int(p, p as i64);
    Ok(-det3(&g).scale(&w.square().inv()?))
}

/// `ξ = diag(s₁·1₂, s₂)` with signs `s₁, s₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Xi {
    pub s1: i8,
    pub s2: i8,
}

impl Xi {
    pub const ALL: [Xi; 4] = [Xi { s1: 1, s2: 1 }, Xi { s1: 1, s2: -1 }, Xi { s1: -1, s2: 1 }, Xi { s1: -1, s2: -1 }];

    pub fn matrix(self, p: u32) -> DMat3 {
        let s = |k: i8| QuatElt::from_scalar(PadicScalar::from_int(p, k as i64));
        Mat3::from_fn(|i, j| match (i, j) {
            (0, 0) | (1, 1) => s(self.s1),
            (2, 2) => s(self.s2),
            _ => QuatElt::zero(p),
        })
    }
}

/// A group element `[[α, βϖ, bπ], [β, α, b], [c, πc, d]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct U1Group {
    pub m: DMat3,
}

impl U1Group {
    pub fn p(&self) -> u32 {
        self.m.e[0][0].p()
    }

    /// Coordinates `(α, β, b, c, d)`.
    pub fn coords(&self) -> (QuatElt, QuatElt, QuatElt, QuatElt, QuadElt) {
        let e = &self.m.e;
        (e[0][0].clone(), e[1][0].clone(), e[1][2].clone(), e[2][0].clone(), e[2][2].x.clone())
    }

    /// Membership in `K₁`: all coordinates integral.
    pub fn is_integral(&self) -> Result<bool> {
        let (a, be, b, c, d) = self.coords();
        Ok(a.is_integral()? && be.is_integral()? && b.is_integral()? && c.is_integral()? && d.is_integral()?)
    }

    /// `g g^† = 1`.
    pub fn is_unitary(&self) -> bool {
        let p = self.p();
        self.m.mul(&dagger(&self.m)) == Mat3::identity(&QuatElt::one(p))
    }

    pub fn mul(&self, o: &Self) -> Self {
        U1Group { m: self.m.mul(&o.m) }
    }
}

/// The Rosati involution on `End_{O_F}`.
pub fn dagger(m: &DMat3) -> DMat3 {
    let p = m.e[0][0].p();
    let e = &m.e;
    let alpha = &e[0][0];
    let beta = &e[1][0];
    let b = &e[1][2];
    let c = &e[2][0];
    let d = &e[2][2];
    let pi = QuatElt::pi(p);
    let pi_inv = pi.inv().unwrap();
    let w = varpi_d(p);
    Mat3 {
        e: [
            [alpha.conj(), -(&beta.conj() * &w), c.conj()],
            [-beta.conj(), alpha.conj(), &c.conj() * &pi_inv],
            [-(&pi * &b.conj()), -(&b.conj() * &w), d.conj()],
        ],
    }
}

/// `c_ξ(x) = ξ(1 + x)(1 − x)⁻¹`.
pub fn cayley(x: &DMat3, xi: Xi) -> Result<U1Group> {
    let p = x.e[0][0].p();
    let one = Mat3::identity(&QuatElt::one(p));
    let inv = one.sub(x).inverse().map_err(|_| Error::CayleyUndefined)?;
    Ok(U1Group { m: xi.matrix(p).mul(&one.add(x)).mul(&inv) })
}

/// `c_ξ⁻¹(g) = −(1 − ξ⁻¹g)(1 + ξ⁻¹g)⁻¹`.
pub fn cayley_inv(g: &U1Group, xi: Xi) -> Result<DMat3> {
    let p = g.p();
    let one = Mat3::identity(&QuatElt::one(p));
    let h = xi.matrix(p).mul(&g.m);
    let inv = one.add(&h).inverse().map_err(|_| Error::CayleyUndefined)?;
    Ok(one.sub(&h).mul(&inv).neg())
}
