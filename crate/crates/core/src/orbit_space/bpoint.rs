//! Points `(λ, u, w̃)` of the reduced categorical quotient, with `w = w̃π`.

use crate::error::{Error, Result};
use crate::keating::MlParams;
use crate::padic_core::{PadicScalar, ScalarWire, Val};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BPoint {
    pub lambda: PadicScalar,
    pub u: PadicScalar,
    pub wtilde: PadicScalar,
}

/// Which of the two Hermitian spaces an rs point comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Split side: η(−Δ) = +1.
    Zero,
    /// Non-split side: η(−Δ) = −1.
    One,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Zero => 0,
            Side::One => 1,
        }
    }
}

impl BPoint {
    pub fn new(lambda: PadicScalar, u: PadicScalar, wtilde: PadicScalar) -> Self {
        assert!(lambda.p() == u.p() && u.p() == wtilde.p(), "mixed primes");
        BPoint { lambda, u, wtilde }
    }

    pub fn from_ints(p: u32, lambda: i64, u: i64, wtilde: i64) -> Self {
        Self::new(PadicScalar::from_int(p, lambda), PadicScalar::from_int(p, u), PadicScalar::from_int(p, wtilde))
    }

    pub fn zero(p: u32) -> Self {
        Self::from_ints(p, 0, 0, 0)
    }

    pub fn p(&self) -> u32 {
        self.lambda.p()
    }

    fn varpi(&self) -> PadicScalar {
        PadicScalar::from_int(self.p(), self.p() as i64)
    }

    /// `Δ = λu² + w̃²ϖ`.
    pub fn delta(&self) -> PadicScalar {
        &self.lambda * self.u.square() + self.wtilde.square() * self.varpi()
    }

    pub fn is_rs(&self) -> Result<bool> {
        Ok(!self.delta().is_zero()?)
    }

    /// `i` with `η(−Δ) = (−1)^i`.
    pub fn classify_side(&self) -> Result<Side> {
        let d = self.delta();
        if d.is_zero()? {
            return Err(Error::NotRegularSemisimple);
        }
        Ok(if (-d).eta()? == 1 { Side::Zero } else { Side::One })
    }

    pub fn is_integral(&self) -> Result<bool> {
        Ok(self.lambda.val()? >= Val::Fin(0) && self.u.val()? >= Val::Fin(0) && self.wtilde.val()? >= Val::Fin(0))
    }

    /// `(m, ℓ₋, ℓ₊)` of an integral side-1 point.
    pub fn ml_params(&self) -> Result<MlParams> {
        if self.u.is_zero()? {
            return Err(Error::MUndefined);
        }
        if self.classify_side()? != Side::One {
            return Err(Error::WrongSide);
        }
        if !self.is_integral()? {
            return Err(Error::NonIntegral);
        }
        let m = self.u.val_fin()?;
        let ell_plus = match self.wtilde.val()? {
            Val::Inf => Val::Inf,
            Val::Fin(k) => Val::Fin(2 * k + 1 - 2 * m),
        };
        let ell_minus = self.delta().val_fin()? - 2 * m;
        let t = MlParams::new(m, ell_minus, ell_plus);
        if let (Val::Fin(lp), Val::Fin(vl)) = (ell_plus, self.lambda.val()?) {
            if lp != ell_minus && vl != lp.min(ell_minus) {
                return Err(Error::Unrealizable(format!("v(λ) = {vl} for {t:?}")));
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        self.lambda.approx_eq(&o.lambda) && self.u.approx_eq(&o.u) && self.wtilde.approx_eq(&o.wtilde)
    }

    pub fn to_wire(&self) -> BPointWire {
        BPointWire {
            p: Some(self.p()),
            lambda: self.lambda.to_wire(),
            u: self.u.to_wire(),
            wtilde: self.wtilde.to_wire(),
        }
    }

    pub fn from_wire(w: &BPointWire, p: u32) -> Result<Self> {
        let p = w.p.unwrap_or(p);
        Ok(Self::new(
            PadicScalar::from_wire(&w.lambda, p)?,
            PadicScalar::from_wire(&w.u, p)?,
            PadicScalar::from_wire(&w.wtilde, p)?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BPointWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    pub lambda: ScalarWire,
    pub u: ScalarWire,
    pub wtilde: ScalarWire,
}

impl Serialize for BPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

impl fmt::Display for BPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(λ={}, u={}, w̃={})", self.lambda, self.u, self.wtilde)
    }
}

/// An integral side-1 point with prescribed `(m, ℓ₋, ℓ₊)`.
pub fn make_bpoint_rs1(t: MlParams, p: u32) -> Result<BPoint> {
    t.validate()?;
    let u = PadicScalar::p_power(p, t.m);
    let wt = match t.ell_plus {
        Val::Inf => PadicScalar::zero(p),
        Val::Fin(lp) => PadicScalar::p_power(p, (2 * t.m + lp - 1) / 2),
    };
    let pw = PadicScalar::p_power(p, 2 * t.m + t.ell_minus);
    for d0 in 1..p as i64 {
        let delta = PadicScalar::from_int(p, d0) * &pw;
        if (-&delta).eta()? != -1 {
            continue;
        }
        let lambda = (&delta - wt.square() * PadicScalar::from_int(p, p as i64)).div(&u.square())?;
        let x = BPoint::new(lambda, u.clone(), wt.clone());
        if x.ml_params().ok() == Some(t) {
            return Ok(x);
        }
    }
    Err(Error::Unrealizable(format!("{t:?}")))
}
