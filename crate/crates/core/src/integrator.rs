//! Shell-by-shell evaluation of p-adic integrals over F₀.
//!
//! An integrand in one variable `t` is cut into shells `v(t) = k`. Inside a
//! shell the domain is refined into balls until every polynomial in sight has
//! constant valuation and unit residue, so each ball contributes a monomial in
//! `X = q^{-s}` and `log q`. Outside a finite window the shell values are a
//! polynomial in `k` times a fixed geometric ratio; both tails are summed in
//! closed form after checking that fourth differences vanish.

use crate::error::{Error, Result};
use crate::orbit_space::{BPoint, U0RedElt};
use crate::padic_core::arith::{q_pow, split_rat};
use crate::padic_core::{eta_minus_one, PadicScalar, QuadElt};
use crate::svalue::{LogQVal, LogRatX, Poly, RatX, XSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::cell::Cell;

type Q = BigRational;

/// `poly(t)·t^tpow`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub poly: Poly,
    pub tpow: i64,
}

impl Expr {
    pub fn new(poly: Poly, tpow: i64) -> Self {
        Expr { poly, tpow }
    }

    /// The variable itself.
    pub fn t() -> Self {
        Expr::new(Poly::monomial(Q::one(), 1), 0)
    }
}

/// Valuation conditions on an expression, by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cond {
    Ge(usize, i64),
    Lt(usize, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `η(expr)`.
    Eta(usize),
    /// `|expr|^{a·s + b}`.
    AbsPow { expr: usize, a: i64, b: i64 },
    /// `log|expr|`.
    Log(usize),
}

/// `coeff · ∫_{F₀} 1[conds] · Π factors dt`.
#[derive(Clone, Debug)]
pub struct Integrand {
    pub p: u32,
    pub exprs: Vec<Expr>,
    pub conds: Vec<Cond>,
    pub factors: Vec<Factor>,
    pub coeff: Q,
    /// Initial ball radius relative to the shell, at least 1.
    pub conductor_hint: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegratorConfig {
    /// Largest number of explicit shells on either side of zero.
    pub window: i64,
    /// Largest refinement depth inside a shell.
    pub depth_cap: i64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { window: 30, depth_cap: 40 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShellResult {
    pub value: LogRatX,
    pub shells_used: usize,
}

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn vq(x: &Q, p: u32) -> Option<i64> {
    split_rat(x, p).map(|(v, _)| v)
}

fn eta_q(x: &Q, p: u32) -> Result<i32> {
    PadicScalar::exact(p, x.clone()).eta()
}

fn binom(n: usize, k: usize) -> Q {
    let mut r = Q::one();
    for i in 0..k {
        r = r * qi((n - i) as i64) / qi((i + 1) as i64);
    }
    r
}

/// Coefficients of `P(c + y)` in `y`.
fn taylor(p: &Poly, c: &Q) -> Vec<Q> {
    let n = p.0.len();
    let mut pw = vec![Q::one(); n.max(1)];
    for i in 1..n {
        pw[i] = &pw[i - 1] * c;
    }
    (0..n)
        .map(|j| (j..n).fold(Q::zero(), |acc, i| acc + &p.0[i] * binom(i, j) * &pw[i - j]))
        .collect()
}

/// Valuation data of one polynomial on one ball.
struct BallVal {
    /// Exact valuation when constant on the ball.
    stable: Option<i64>,
    /// Lower bound for the valuation on the ball; `None` means +∞.
    low: Option<i64>,
    value: Q,
}

fn ball_val(poly: &Poly, c: &Q, r: i64, p: u32) -> BallVal {
    let tc = taylor(poly, c);
    let value = tc.first().cloned().unwrap_or_else(Q::zero);
    let v0 = vq(&value, p);
    let vt = tc
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(j, a)| vq(a, p).map(|v| v + j as i64 * r))
        .min();
    let stable = match (v0, vt) {
        (Some(a), None) => Some(a),
        (Some(a), Some(b)) if a < b => Some(a),
        _ => None,
    };
    let low = match (v0, vt) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    BallVal { stable, low, value }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Truth {
    True,
    False,
    Unknown,
}

impl Integrand {
    fn check(&self) -> Result<()> {
        if self.conductor_hint == 0 {
            return Err(Error::Invalid("conductor hint must be at least 1".into()));
        }
        let n = self.exprs.len();
        let bad = self.conds.iter().any(|c| match c {
            Cond::Ge(i, _) | Cond::Lt(i, _) => *i >= n,
        }) || self.factors.iter().any(|f| match f {
            Factor::Eta(i) | Factor::Log(i) | Factor::AbsPow { expr: i, .. } => *i >= n || self.exprs[*i].poly.is_zero(),
        });
        if bad {
            return Err(Error::Invalid("factor on a zero or missing expression".into()));
        }
        Ok(())
    }

    /// The integral over the shell `v(t) = k`, as graded Laurent data in X.
    pub fn shell(&self, k: i64, cfg: &IntegratorConfig) -> Result<XSeries> {
        let p = self.p;
        let h = self.conductor_hint as i64;
        let modulus = num_traits::pow(BigInt::from(p), h as usize);
        let pk = q_pow(p, k);
        let mut acc = XSeries::zero();
        let mut u = BigInt::one();
        while u < modulus {
            if (&u % BigInt::from(p)).is_zero() {
                u += 1;
                continue;
            }
            let c = Q::from_integer(u.clone()) * &pk;
            acc.add_assign(&self.ball(&c, k, k + h, cfg)?);
            u += 1;
        }
        Ok(acc)
    }

    fn ball(&self, c: &Q, k: i64, r: i64, cfg: &IntegratorConfig) -> Result<XSeries> {
        let p = self.p;
        let vals: Vec<BallVal> = self.exprs.iter().map(|e| ball_val(&e.poly, c, r, p)).collect();
        let shifted = |i: usize, v: i64| v + self.exprs[i].tpow * k;
        let mut unknown = false;
        for cond in &self.conds {
            let (i, bound, ge) = match *cond {
                Cond::Ge(i, b) => (i, b, true),
                Cond::Lt(i, b) => (i, b, false),
            };
            let bv = &vals[i];
            let t = match (bv.stable, bv.low) {
                (Some(v), _) => {
                    if (shifted(i, v) >= bound) == ge {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
                (None, None) => {
                    if ge {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
                (None, Some(lo)) => {
                    if shifted(i, lo) >= bound {
                        if ge {
                            Truth::True
                        } else {
                            Truth::False
                        }
                    } else {
                        Truth::Unknown
                    }
                }
            };
            match t {
                Truth::False => return Ok(XSeries::zero()),
                Truth::Unknown => unknown = true,
                Truth::True => {}
            }
        }
        let factors_stable = self.factors.iter().all(|f| match f {
            Factor::Eta(i) | Factor::Log(i) | Factor::AbsPow { expr: i, .. } => vals[*i].stable.is_some(),
        });
        if unknown || !factors_stable {
            if r - k >= cfg.depth_cap {
                return Err(Error::ConductorTooSmall(format!("depth {} reached near t = {c}", cfg.depth_cap)));
            }
            let step = q_pow(p, r);
            let mut acc = XSeries::zero();
            for i in 0..p as i64 {
                acc.add_assign(&self.ball(&(c + qi(i) * &step), k, r + 1, cfg)?);
            }
            return Ok(acc);
        }
        let mut val = XSeries::rational(&self.coeff * q_pow(p, -r));
        let eta_t = eta_q(c, p)?;
        for f in &self.factors {
            match *f {
                Factor::Eta(i) => {
                    let mut e = eta_q(&vals[i].value, p)?;
                    if self.exprs[i].tpow.rem_euclid(2) == 1 {
                        e *= eta_t;
                    }
                    val = val.scale(&qi(e as i64));
                }
                Factor::AbsPow { expr, a, b } => {
                    let v = shifted(expr, vals[expr].stable.expect("stable"));
                    val = val.shift(&q_pow(p, -b * v), a * v);
                }
                Factor::Log(i) => {
                    let v = shifted(i, vals[i].stable.expect("stable"));
                    val = val.mul(&XSeries::term(qi(-v), 1, 0));
                }
            }
        }
        Ok(val)
    }

    /// Shells `k ≥ hi` and `k ≤ lo` lie in the asymptotic regime.
    fn thresholds(&self) -> (i64, i64) {
        let p = self.p;
        let mut hi = i64::MIN;
        let mut lo = i64::MAX;
        let ceil_div = |a: i64, b: i64| -((-a).div_euclid(b));
        for (idx, e) in self.exprs.iter().enumerate() {
            let sup: Vec<(i64, i64)> = e
                .poly
                .0
                .iter()
                .enumerate()
                .filter_map(|(i, a)| vq(a, p).map(|v| (i as i64, v)))
                .collect();
            let (Some(&(imin, vmin)), Some(&(imax, vmax))) = (sup.first(), sup.last()) else { continue };
            for &(i, v) in &sup {
                if i > imin {
                    hi = hi.max(ceil_div(vmin - v + 1, i - imin));
                }
                if i < imax {
                    lo = lo.min(-ceil_div(vmax - v + 1, imax - i));
                }
            }
            for cond in &self.conds {
                let (Cond::Ge(i, b) | Cond::Lt(i, b)) = *cond;
                if i != idx {
                    continue;
                }
                let s_hi = imin + e.tpow;
                if s_hi != 0 {
                    let x = (b - vmin) as f64 / s_hi as f64;
                    hi = hi.max(x.ceil() as i64 + 1);
                }
                let s_lo = imax + e.tpow;
                if s_lo != 0 {
                    let x = (b - vmax) as f64 / s_lo as f64;
                    lo = lo.min(x.floor() as i64 - 1);
                }
            }
        }
        if hi == i64::MIN && lo == i64::MAX {
            return (0, -1);
        }
        if hi == i64::MIN {
            hi = lo + 1;
        }
        if lo == i64::MAX {
            lo = hi - 1;
        }
        if lo >= hi {
            lo = hi - 1;
        }
        (hi, lo)
    }

    /// The per-shell ratio `c·X^d` in the direction `dir = ±1`.
    fn ratio(&self, dir: i64) -> (Q, i64) {
        let p = self.p;
        let slope = |i: usize| {
            let e = &self.exprs[i];
            let sup: Vec<i64> = e.poly.0.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, _)| i as i64).collect();
            let d = if dir > 0 { sup[0] } else { *sup.last().expect("nonzero") };
            d + e.tpow
        };
        let mut c = q_pow(p, -dir);
        let mut d = 0;
        for f in &self.factors {
            match *f {
                Factor::Eta(i) => {
                    if slope(i).rem_euclid(2) == 1 {
                        c *= qi(eta_minus_one(p) as i64);
                    }
                }
                Factor::AbsPow { expr, a, b } => {
                    let s = dir * slope(expr);
                    c *= q_pow(p, -b * s);
                    d += a * s;
                }
                Factor::Log(_) => {}
            }
        }
        (c, d)
    }
}

/// Sums `Σ_{j≥0} S_j` given `S_0..S_7` of the form `T(j)·(c·X^d)^j` with
/// `deg T ≤ 3`. `None` if the samples do not have that shape.
pub fn close_geometric(seq: &[XSeries], c: &Q, d: i64, p: u32) -> Result<Option<LogRatX>> {
    if seq.iter().all(|s| s.is_zero()) {
        return Ok(Some(LogRatX::zero(p)));
    }
    if c.is_zero() {
        return Ok(None);
    }
    let mut rows: Vec<XSeries> = Vec::with_capacity(seq.len());
    let mut f = Q::one();
    for (j, s) in seq.iter().enumerate() {
        rows.push(s.shift(&f, -d * j as i64));
        f = f / c;
    }
    let mut diffs = vec![rows[0].clone()];
    let mut cur = rows;
    while cur.len() > 1 {
        cur = cur.windows(2).map(|w| w[1].sub(&w[0])).collect();
        diffs.push(cur[0].clone());
        if diffs.len() == 5 {
            if cur.iter().any(|x| !x.is_zero()) {
                return Ok(None);
            }
            break;
        }
    }
    if d == 0 && c.abs() >= Q::one() {
        return Err(Error::Invalid("divergent tail".into()));
    }
    let r = RatX::monomial(c.clone(), d, p);
    let one_minus = RatX::one(p).sub(&r);
    let mut total = LogRatX::zero(p);
    for (n, dn) in diffs.iter().take(4).enumerate() {
        if dn.is_zero() {
            continue;
        }
        let w = r.pow(n as u32).div(&one_minus.pow(n as u32 + 1))?;
        total = total.add(&dn.to_logratx(p).mul_ratx(&w));
    }
    Ok(Some(total))
}

use num_traits::Signed;

const TAIL: i64 = 8;

/// `∫_{F₀} f dt` for an integrand in the supported class.
pub fn shell_integrate(ig: &Integrand, cfg: &IntegratorConfig) -> Result<ShellResult> {
    ig.check()?;
    let p = ig.p;
    let (hi, lo) = ig.thresholds();
    if hi > cfg.window || lo < -cfg.window {
        return Err(Error::NoStabilization(cfg.window));
    }
    let mut total = XSeries::zero();
    let mut used = 0usize;
    for k in lo + 1..hi {
        total.add_assign(&ig.shell(k, cfg)?);
        used += 1;
    }
    let mut value = total.to_logratx(p);
    for dir in [1i64, -1] {
        let start = if dir > 0 { hi } else { lo };
        let seq = (0..TAIL).map(|j| ig.shell(start + dir * j, cfg)).collect::<Result<Vec<_>>>()?;
        used += TAIL as usize;
        let (c, d) = ig.ratio(dir);
        let tail = close_geometric(&seq, &c, d, p)?.ok_or(Error::NoStabilization(cfg.window))?;
        value = value.add(&tail);
    }
    Ok(ShellResult { value, shells_used: used })
}

/// Sums a sequence over all `k ∈ ℤ` whose terms vanish or turn geometric with
/// ratio `±q^e` outside `[-window, window]`.
fn sum_over_z<F>(f: F, window: i64, p: u32) -> Result<LogRatX>
where
    F: Fn(i64) -> Result<XSeries>,
{
    let vals: Vec<XSeries> = (-window - TAIL + 1..=window + TAIL - 1).map(&f).collect::<Result<_>>()?;
    let at = |k: i64| &vals[(k + window + TAIL - 1) as usize];
    let mut total = XSeries::zero();
    for k in -window + 1..window {
        total.add_assign(at(k));
    }
    let mut value = total.to_logratx(p);
    for dir in [1i64, -1] {
        let seq: Vec<XSeries> = (0..TAIL).map(|j| at(dir * (window + j)).clone()).collect();
        let mut found = None;
        'search: for e in -6..=6i64 {
            for sign in [1, -1] {
                let c = q_pow(p, e) * qi(sign);
                if let Ok(Some(t)) = close_geometric(&seq, &c, 0, p) {
                    found = Some(t);
                    break 'search;
                }
            }
        }
        value = value.add(&found.ok_or(Error::NoStabilization(window))?);
    }
    Ok(value)
}

fn lq(x: &PadicScalar) -> Result<Q> {
    x.rational()
}

fn ceil_half(c: i64) -> i64 {
    -((-c).div_euclid(2))
}

/// One matrix entry `(A(t) + B(t)π)·z^e` with `e` counted in `v_F`.
struct Entry {
    a: Poly,
    b: Poly,
    zexp: i64,
}

fn entries(y: &U0RedElt) -> Result<Vec<Entry>> {
    let (a1, a2, a3) = (lq(&y.a1)?, lq(&y.a2)?, lq(&y.a3)?);
    let split = |x: &QuadElt| -> Result<(Q, Q)> { Ok((lq(&x.a)?, lq(&x.b)?)) };
    let (b1a, b1b) = split(&y.b1)?;
    let (b2a, b2b) = split(&y.b2)?;
    let m = y.matrix();
    let (c1a, c1b) = split(&m.e[2][0])?;
    let (c2a, c2b) = split(&m.e[2][1])?;
    let pl = |v: Vec<Q>| Poly::new(v);
    let z = || Poly::zero();
    Ok(vec![
        Entry { a: pl(vec![a1.clone(), a3.clone()]), b: z(), zexp: 0 },
        Entry { a: pl(vec![a2, -qi(2) * &a1, -a3.clone()]), b: z(), zexp: 2 },
        Entry { a: pl(vec![a3]), b: z(), zexp: -2 },
        Entry { a: pl(vec![b1a, b2a.clone()]), b: pl(vec![b1b, b2b.clone()]), zexp: 1 },
        Entry { a: pl(vec![b2a]), b: pl(vec![b2b]), zexp: -1 },
        Entry { a: pl(vec![c1a.clone()]), b: pl(vec![c1b.clone()]), zexp: -1 },
        Entry { a: pl(vec![c2a, -c1a]), b: pl(vec![c2b, -c1b]), zexp: 1 },
    ])
}

/// The t-integrand of integrality conditions on the z-shell `v_F(z) = k`.
fn z_shell_integrand(ents: &[Entry], k: i64, p: u32) -> Integrand {
    let mut exprs = vec![];
    let mut conds = vec![];
    for e in ents {
        let c = -e.zexp * k;
        for (poly, bound) in [(&e.a, ceil_half(c)), (&e.b, ceil_half(c - 1))] {
            if poly.is_zero() {
                continue;
            }
            exprs.push(Expr::new(poly.clone(), 0));
            conds.push(Cond::Ge(exprs.len() - 1, bound));
        }
    }
    Integrand { p, exprs, conds, factors: vec![], coeff: Q::one(), conductor_hint: 1 }
}

/// Whether all entries are integral at `t = 0` on the z-shell `k`.
fn nilpotent_shell_ok(ents: &[Entry], k: i64, p: u32) -> bool {
    ents.iter().all(|e| {
        let c = -e.zexp * k;
        let ok = |poly: &Poly, bound: i64| vq(&poly.coeff(0), p).map_or(true, |v| v >= bound);
        ok(&e.a, ceil_half(c)) && ok(&e.b, ceil_half(c - 1))
    })
}

/// `ζ(1) = (1 − q⁻¹)⁻¹`.
pub fn zeta1(p: u32) -> Q {
    Q::one() / (Q::one() - q_pow(p, -1))
}

/// The orbital integral of the unit-ball indicator on 𝔲₀, computed directly
/// as `ζ(1)·∫∫ 1[g y g⁻¹ integral] dz dt` over the Iwasawa coordinates. For a
/// nilpotent `y` the `t`-integral is dropped. Non-integral invariants give 0.
/// The twist flag is accepted for interface symmetry; the unit-ball indicator
/// is insensitive to it.
pub fn iwasawa_orbit_u0(y: &U0RedElt, s_twist: bool, cfg: &IntegratorConfig) -> Result<LogQVal> {
    Ok(iwasawa_orbit_u0_counted(y, s_twist, cfg)?.value)
}

/// An oracle value with the number of shells evaluated to get it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counted {
    pub value: LogQVal,
    pub shells_used: usize,
}

/// [`iwasawa_orbit_u0`] with the shell count.
pub fn iwasawa_orbit_u0_counted(y: &U0RedElt, _s_twist: bool, cfg: &IntegratorConfig) -> Result<Counted> {
    let p = y.p();
    let x = y.invariants()?;
    if !x.is_integral()? {
        return Ok(Counted { value: LogQVal::zero(), shells_used: 0 });
    }
    let used = Cell::new(0usize);
    let nilpotent = x.lambda.is_zero()? && x.u.is_zero()? && x.wtilde.is_zero()?;
    let ents = entries(y)?;
    let shell_w = |k: i64| q_pow(p, -k) * (Q::one() - q_pow(p, -1));
    let sum = sum_over_z(
        |k| {
            if nilpotent {
                used.set(used.get() + 1);
                return Ok(if nilpotent_shell_ok(&ents, k, p) { XSeries::rational(shell_w(k)) } else { XSeries::zero() });
            }
            let ig = z_shell_integrand(&ents, k, p);
            let r = shell_integrate(&ig, cfg)?;
            used.set(used.get() + r.shells_used);
            let v = r.value.to_logq()?;
            Ok(XSeries::rational(v.coeff(0) * shell_w(k)))
        },
        cfg.window,
        p,
    )?;
    Ok(Counted { value: sum.to_logq()?.scale(&zeta1(p)), shells_used: used.get() })
}

/// `Ξ(x) = ∫ log|E|·η(tE)·|tE|⁻¹·log|t| dt` over `|E| > 1`, where
/// `E = (t² + 2w̃'t + D)/t`, `w̃' = w̃/u²`, `D = Δ/(u⁴ϖ)`.
pub fn xi_integral(x: &BPoint, cfg: &IntegratorConfig) -> Result<LogQVal> {
    Ok(xi_integral_counted(x, cfg)?.value)
}

/// [`xi_integral`] with the shell count.
pub fn xi_integral_counted(x: &BPoint, cfg: &IntegratorConfig) -> Result<Counted> {
    let p = x.p();
    if x.u.is_zero()? {
        return Err(Error::MUndefined);
    }
    let u = lq(&x.u)?;
    let u2 = &u * &u;
    let wp = lq(&x.wtilde)? / &u2;
    let d = lq(&x.delta())? / (&u2 * &u2 * qi(p as i64));
    let te = Poly::new(vec![d, qi(2) * wp, Q::one()]);
    let ig = Integrand {
        p,
        exprs: vec![Expr::t(), Expr::new(te.clone(), 0), Expr::new(te, -1)],
        conds: vec![Cond::Lt(2, 0)],
        factors: vec![Factor::Log(2), Factor::Eta(1), Factor::AbsPow { expr: 1, a: 0, b: -1 }, Factor::Log(0)],
        coeff: Q::one(),
        conductor_hint: 1,
    };
    let r = shell_integrate(&ig, cfg)?;
    Ok(Counted { value: r.value.to_logq()?, shells_used: r.shells_used })
}

/// `−q·|u|⁻¹·Ξ(x)/log q`, the independent evaluation of Φ.
pub fn phi_oracle(x: &BPoint, cfg: &IntegratorConfig) -> Result<LogQVal> {
    Ok(phi_oracle_counted(x, cfg)?.value)
}

/// [`phi_oracle`] with the shell count.
pub fn phi_oracle_counted(x: &BPoint, cfg: &IntegratorConfig) -> Result<Counted> {
    let p = x.p();
    let m = x.u.val_fin()?;
    let Counted { value: xi, shells_used } = xi_integral_counted(x, cfg)?;
    let mut r = LogQVal::zero();
    for (k, c) in xi.coeffs() {
        r = r.add(&LogQVal::monomial(c.clone(), k - 1));
    }
    Ok(Counted { value: r.scale(&-(qi(p as i64) * q_pow(p, m))), shells_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keating::MlParams;
    use crate::orbit_space::make_bpoint_rs1;
    use crate::padic_core::arith::rat;
    use crate::padic_core::Val;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    fn simple(p: u32, exprs: Vec<Expr>, conds: Vec<Cond>, factors: Vec<Factor>) -> Integrand {
        Integrand { p, exprs, conds, factors, coeff: Q::one(), conductor_hint: 1 }
    }

    #[test]
    fn unit_ball_volume() {
        let ig = simple(5, vec![Expr::t()], vec![Cond::Ge(0, 0)], vec![]);
        let r = shell_integrate(&ig, &cfg()).unwrap();
        assert_eq!(r.value.to_logq().unwrap(), LogQVal::rational(Q::one()));
    }

    #[test]
    fn power_of_abs_value() {
        // ∫_{|b|≤1} |b|^{-2s} db/|b| = (1 − q⁻¹)/(1 − q^{2s})
        let p = 3;
        let ig = simple(p, vec![Expr::t()], vec![Cond::Ge(0, 0)], vec![Factor::AbsPow { expr: 0, a: -2, b: -1 }]);
        let r = shell_integrate(&ig, &cfg()).unwrap().value;
        let want = RatX::constant(Q::one() - rat(1, 3), p).mul(&RatX::geometric(Q::one(), -2, p).unwrap());
        assert_eq!(r.grades[&0], want);
    }

    #[test]
    fn two_sided_geometric_sum_vanishes() {
        let ig = simple(5, vec![Expr::t()], vec![], vec![Factor::AbsPow { expr: 0, a: 1, b: -1 }]);
        let r = shell_integrate(&ig, &cfg()).unwrap().value;
        assert!(r.grades.is_empty());
    }

    #[test]
    fn refinement_does_not_change_value() {
        let p = 3;
        let x = make_bpoint_rs1(MlParams::new(0, 1, Val::Inf), p).unwrap();
        let mut ig = simple(
            p,
            vec![Expr::new(Poly::new(vec![qi(-2), Q::zero(), Q::one()]), 0)],
            vec![Cond::Ge(0, 1)],
            vec![Factor::Log(0)],
        );
        let a = shell_integrate(&ig, &cfg()).unwrap().value;
        ig.conductor_hint = 2;
        let b = shell_integrate(&ig, &cfg()).unwrap().value;
        assert_eq!(a, b);
        assert!(xi_integral(&x, &cfg()).is_ok());
    }

    #[test]
    fn xi_at_simplest_point() {
        let x = make_bpoint_rs1(MlParams::new(0, 1, Val::Inf), 3).unwrap();
        assert_eq!(xi_integral(&x, &cfg()).unwrap(), LogQVal::monomial(qi(2), 2));
        assert_eq!(phi_oracle(&x, &cfg()).unwrap(), LogQVal::logq(qi(-6)));
    }

    #[test]
    fn xi_is_even_in_wtilde() {
        let p = 5;
        let x = make_bpoint_rs1(MlParams::new(1, 2, Val::Fin(1)), p).unwrap();
        let y = BPoint::new(x.lambda.clone(), x.u.clone(), -&x.wtilde);
        assert_eq!(xi_integral(&x, &cfg()).unwrap(), xi_integral(&y, &cfg()).unwrap());
    }

    #[test]
    fn nilpotent_orbit_is_q_zeta() {
        let p = 3;
        let y = crate::orbit_space::n_beta(&PadicScalar::one(p));
        let v = iwasawa_orbit_u0(&y, false, &cfg()).unwrap();
        assert_eq!(v, LogQVal::rational(qi(3) * zeta1(p)));
    }

    #[test]
    fn case0_unit_lambda_orbit_is_one() {
        let p = 5;
        let x0 = BPoint::from_ints(p, 2, 0, 0);
        let y = crate::orbit_space::u0_semisimple(&x0).unwrap();
        let v = iwasawa_orbit_u0(&y, false, &cfg()).unwrap();
        assert_eq!(v, LogQVal::rational(Q::one()));
    }
}
