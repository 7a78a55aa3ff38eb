//! The split side: reduced elements of 𝔲₀ in the coordinates
//! `[[a₁, a₂, b₁], [a₃, −a₁, b₂], [b̄₂π, −b̄₁π, 0]]`.

use super::bpoint::BPoint;
use super::mat::Mat3;
use crate::error::{Error, Result};
use crate::padic_core::{PadicScalar, QuadElt, QuadWire, ScalarWire};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct U0RedElt {
    pub a1: PadicScalar,
    pub a2: PadicScalar,
    pub a3: PadicScalar,
    pub b1: QuadElt,
    pub b2: QuadElt,
}

impl U0RedElt {
    pub fn p(&self) -> u32 {
        self.a1.p()
    }

    pub fn zero(p: u32) -> Self {
        let z = PadicScalar::zero(p);
        U0RedElt { a1: z.clone(), a2: z.clone(), a3: z, b1: QuadElt::zero(p), b2: QuadElt::zero(p) }
    }

    /// The 3×3 matrix over F.
    pub fn matrix(&self) -> Mat3<QuadElt> {
        let p = self.p();
        let f = |x: &PadicScalar| QuadElt::from_base(x.clone());
        let pi = QuadElt::pi(p);
        Mat3 {
            e: [
                [f(&self.a1), f(&self.a2), self.b1.clone()],
                [f(&self.a3), f(&-&self.a1), self.b2.clone()],
                [&self.b2.conj() * &pi, -(&self.b1.conj() * &pi), QuadElt::zero(p)],
            ],
        }
    }

    pub fn invariants(&self) -> Result<BPoint> {
        invariants_of_matrix(&self.matrix())
    }

    pub fn is_integral(&self) -> Result<bool> {
        let m = self.matrix();
        for r in &m.e {
            for x in r {
                if !x.is_integral()? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_wire(&self) -> U0RedWire {
        U0RedWire {
            space: "u0_red".into(),
            p: Some(self.p()),
            a1: self.a1.to_wire(),
            a2: self.a2.to_wire(),
            a3: self.a3.to_wire(),
            b1: self.b1.to_wire(),
            b2: self.b2.to_wire(),
        }
    }

    pub fn from_wire(w: &U0RedWire, p: u32) -> Result<Self> {
        let p = w.p.unwrap_or(p);
        Ok(U0RedElt {
            a1: PadicScalar::from_wire(&w.a1, p)?,
            a2: PadicScalar::from_wire(&w.a2, p)?,
            a3: PadicScalar::from_wire(&w.a3, p)?,
            b1: QuadElt::from_wire(&w.b1, p)?,
            b2: QuadElt::from_wire(&w.b2, p)?,
        })
    }
}

/// `λ = det A`, `u = ϖ⁻¹cb`, `w = ϖ⁻¹cAb` for a block matrix `[[A, b], [c, 0]]` over F.
pub fn invariants_of_matrix(m: &Mat3<QuadElt>) -> Result<BPoint> {
    let e = &m.e;
    let p = e[0][0].p();
    let winv = PadicScalar::from_frac(p, 1, p as i64);
    let det_a = &e[0][0] * &e[1][1] - &e[0][1] * &e[1][0];
    let cb = &e[2][0] * &e[0][2] + &e[2][1] * &e[1][2];
    let ab0 = &e[0][0] * &e[0][2] + &e[0][1] * &e[1][2];
    let ab1 = &e[1][0] * &e[0][2] + &e[1][1] * &e[1][2];
    let cab = &e[2][0] * &ab0 + &e[2][1] * &ab1;
    let u = cb.scale(&winv);
    let w = cab.scale(&winv);
    let zero = PadicScalar::zero(p);
    if !det_a.b.approx_eq(&zero) || !u.b.approx_eq(&zero) || !w.a.approx_eq(&zero) {
        return Err(Error::Invalid("not an element of 𝔲₀".into()));
    }
    Ok(BPoint::new(det_a.a, u.a, w.b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct U0RedWire {
    pub space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    pub a1: ScalarWire,
    pub a2: ScalarWire,
    pub a3: ScalarWire,
    pub b1: QuadWire,
    pub b2: QuadWire,
}
