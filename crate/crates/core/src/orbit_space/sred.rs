//! Reduced elements `y = πz` of 𝔰, with `z` a 3×3 matrix over F₀.

use super::bpoint::BPoint;
use super::mat::{det3, Gl2, Mat3};
use crate::error::{Error, Result};
use crate::padic_core::{PadicScalar, ScalarWire};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct SRedElt {
    pub z: Mat3<PadicScalar>,
}

impl SRedElt {
    /// Checks `tr A = 0` and `d = 0`.
    pub fn new(z: Mat3<PadicScalar>) -> Result<Self> {
        let tr = &z.e[0][0] + &z.e[1][1];
        if !tr.approx_eq(&PadicScalar::zero(tr.p())) || !z.e[2][2].approx_eq(&PadicScalar::zero(tr.p())) {
            return Err(Error::Invalid("not reduced: tr A and d must vanish".into()));
        }
        Ok(SRedElt { z })
    }

    pub fn from_rows(rows: [[PadicScalar; 3]; 3]) -> Result<Self> {
        Self::new(Mat3 { e: rows })
    }

    pub fn p(&self) -> u32 {
        self.z.e[0][0].p()
    }

    /// Kills `tr A` and `d` of an arbitrary `z`.
    pub fn reduce(z: &Mat3<PadicScalar>) -> Self {
        let p = z.e[0][0].p();
        let half = (&z.e[0][0] + &z.e[1][1]) * PadicScalar::from_frac(p, 1, 2);
        let mut e = z.e.clone();
        e[0][0] = &e[0][0] - &half;
        e[1][1] = &e[1][1] - &half;
        e[2][2] = PadicScalar::zero(p);
        SRedElt { z: Mat3 { e } }
    }

    /// `λ = ϖ·det A`, `u = c·b`, `w̃ = c·A·b`.
    pub fn invariants(&self) -> BPoint {
        let e = &self.z.e;
        let p = self.p();
        let det_a = &e[0][0] * &e[1][1] - &e[0][1] * &e[1][0];
        let lambda = det_a * PadicScalar::from_int(p, p as i64);
        let u = &e[2][0] * &e[0][2] + &e[2][1] * &e[1][2];
        let ab0 = &e[0][0] * &e[0][2] + &e[0][1] * &e[1][2];
        let ab1 = &e[1][0] * &e[0][2] + &e[1][1] * &e[1][2];
        let wtilde = &e[2][0] * ab0 + &e[2][1] * ab1;
        BPoint::new(lambda, u, wtilde)
    }

    pub fn is_rs(&self) -> Result<bool> {
        self.invariants().is_rs()
    }

    /// `det[e, ze, z²e]` with `e` the last basis vector.
    pub fn krylov_det(&self) -> PadicScalar {
        let z1 = &self.z;
        let z2 = z1.mul(z1);
        let p = self.p();
        let cols = [
            [PadicScalar::zero(p), PadicScalar::zero(p), PadicScalar::one(p)],
            [z1.e[0][2].clone(), z1.e[1][2].clone(), z1.e[2][2].clone()],
            [z2.e[0][2].clone(), z2.e[1][2].clone(), z2.e[2][2].clone()],
        ];
        det3(&Mat3::from_fn(|i, j| cols[j][i].clone()))
    }

    /// The transfer factor `ω(y) = η(det[e, ỹe, ỹ²e])`.
    pub fn omega(&self) -> Result<i32> {
        let d = self.krylov_det();
        if d.is_zero()? {
            return Err(Error::NotRegularSemisimple);
        }
        d.eta()
    }

    /// `h̃⁻¹ z h̃` for `h̃ = diag(h, 1)`.
    pub fn conj_by(&self, h: &Gl2) -> Result<Self> {
        let hh = h.embed();
        Ok(SRedElt { z: hh.inverse()?.mul(&self.z).mul(&hh) })
    }

    pub fn transpose(&self) -> Self {
        SRedElt { z: self.z.transpose() }
    }

    pub fn to_wire(&self) -> SRedWire {
        SRedWire {
            space: "s_red".into(),
            p: Some(self.p()),
            z: self.z.e.iter().map(|r| r.iter().map(|x| x.to_wire()).collect()).collect(),
        }
    }

    pub fn from_wire(w: &SRedWire, p: u32) -> Result<Self> {
        let p = w.p.unwrap_or(p);
        if w.z.len() != 3 || w.z.iter().any(|r| r.len() != 3) {
            return Err(Error::Invalid("z must be 3×3".into()));
        }
        let mut e: Vec<PadicScalar> = vec![];
        for r in &w.z {
            for x in r {
                e.push(PadicScalar::from_wire(x, p)?);
            }
        }
        Self::new(Mat3::from_fn(|i, j| e[3 * i + j].clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SRedWire {
    pub space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    pub z: Vec<Vec<ScalarWire>>,
}

fn rows(r: [[PadicScalar; 3]; 3]) -> SRedElt {
    SRedElt { z: Mat3 { e: r } }
}

/// `σ(x) = π[[0, −λ/ϖ, 1], [1, 0, 0], [u, w̃, 0]]`.
pub fn section_sigma(x: &BPoint) -> SRedElt {
    let p = x.p();
    let z = PadicScalar::zero(p);
    let o = PadicScalar::one(p);
    let m = -(&x.lambda * PadicScalar::from_frac(p, 1, p as i64));
    rows([[z.clone(), m, o.clone()], [o, z.clone(), z.clone()], [x.u.clone(), x.wtilde.clone(), z]])
}

/// The case (0ii) section `π[[α, 0, 1], [0, −α, 1], [z₁, z₂, 0]]`, requiring `−λ/ϖ = α²`.
pub fn section_sigma1(x: &BPoint, alpha: &PadicScalar) -> Result<SRedElt> {
    let p = x.p();
    let lhs = -(&x.lambda * PadicScalar::from_frac(p, 1, p as i64));
    if alpha.is_zero()? || !lhs.approx_eq(&alpha.square()) {
        return Err(Error::WrongCase("−λ/ϖ must equal α²".into()));
    }
    let half = PadicScalar::from_frac(p, 1, 2);
    let r = x.wtilde.div(alpha)?;
    let z1 = (&x.u + &r) * &half;
    let z2 = (&x.u - &r) * &half;
    let z = PadicScalar::zero(p);
    let o = PadicScalar::one(p);
    Ok(rows(
        [[alpha.clone(), z.clone(), o.clone()], [z.clone(), -alpha, o], [z1, z2, z]],
    ))
}
