//! The complex parameter s, carried through X = q^{-s}: exact rational
//! functions of X, Laurent data at s = 0, and values graded by powers of log q.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

type Q = BigRational;

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Dense univariate polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(pub Vec<Q>);

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.0.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        Poly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut r = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        Poly::new(r)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::constant(Q::one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.deg().expect("division by the zero polynomial");
        let lc = d.lead();
        let mut r = self.0.clone();
        let mut q = vec![Q::zero(); self.0.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lc;
            for (i, di) in d.0.iter().enumerate() {
                r[k + i] -= &c * di;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut r = Q::zero();
        for c in self.0.iter().rev() {
            r = r * x + c;
        }
        r
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * qi(k as i64)).collect())
    }

    /// `f(1 − Y)` as a polynomial in Y.
    pub fn at_one_minus(&self) -> Poly {
        let base = Poly::new(vec![Q::one(), -Q::one()]);
        let mut r = Poly::zero();
        let mut pw = Poly::constant(Q::one());
        for c in &self.0 {
            r = r.add(&pw.scale(c));
            pw = pw.mul(&base);
        }
        r
    }

    /// Order of vanishing at 0.
    pub fn ord0(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }
}

/// A rational function of X = q^{-s}, kept reduced with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatX {
    num: Poly,
    den: Poly,
    p: u32,
}

impl RatX {
    pub fn new(num: Poly, den: Poly, p: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(p));
        }
        let g = num.gcd(&den);
        let num = num.divrem(&g).0;
        let den = den.divrem(&g).0;
        let lc = den.lead();
        Ok(RatX { num: num.scale(&lc.recip()), den: den.monic(), p })
    }

    pub fn zero(p: u32) -> Self {
        RatX { num: Poly::zero(), den: Poly::constant(Q::one()), p }
    }

    pub fn constant(c: Q, p: u32) -> Self {
        RatX { num: Poly::constant(c), den: Poly::constant(Q::one()), p }
    }

    pub fn one(p: u32) -> Self {
        Self::constant(Q::one(), p)
    }

    /// `c·X^k` for any integer `k`.
    pub fn monomial(c: Q, k: i64, p: u32) -> Self {
        if c.is_zero() {
            return Self::zero(p);
        }
        if k >= 0 {
            RatX { num: Poly::monomial(c, k as usize), den: Poly::constant(Q::one()), p }
        } else {
            RatX { num: Poly::constant(c), den: Poly::monomial(Q::one(), (-k) as usize), p }
        }
    }

    /// From a Laurent polynomial `Σ c_e X^e`.
    pub fn from_laurent(terms: &BTreeMap<i64, Q>, p: u32) -> Self {
        let lo = terms.keys().next().copied().unwrap_or(0).min(0);
        let mut num = vec![];
        for (e, c) in terms {
            let k = (e - lo) as usize;
            if num.len() <= k {
                num.resize(k + 1, Q::zero());
            }
            num[k] += c;
        }
        Self::new(Poly::new(num), Poly::monomial(Q::one(), (-lo) as usize), p).expect("nonzero denominator")
    }

    /// `1/(1 − c·X^d)`.
    pub fn geometric(c: Q, d: i64, p: u32) -> Result<Self> {
        Self::one(p).sub(&Self::monomial(c, d, p)).inv()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The constant value, if the function is constant.
    pub fn as_constant(&self) -> Option<Q> {
        if self.den.deg() == Some(0) && self.num.deg().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den), self.p).unwrap()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RatX { num: self.num.scale(&-Q::one()), den: self.den.clone(), p: self.p }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den), self.p).unwrap()
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.num.scale(c), self.den.clone(), self.p).unwrap()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone(), self.p)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.p);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Multiplication by `X^k`.
    pub fn shift(&self, k: i64) -> Self {
        self.mul(&Self::monomial(Q::one(), k, self.p))
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }

    /// The value at s = 0, i.e. at X = 1.
    pub fn value_s0(&self) -> Result<Q> {
        self.eval(&Q::one()).map_err(|_| Error::PoleAtZero)
    }

    /// `d/ds` at s = 0, which is `−log q · f′(1)`.
    pub fn dds_s0(&self) -> Result<LogQVal> {
        let one = Q::one();
        let d = self.den.eval(&one);
        if d.is_zero() {
            return Err(Error::PoleAtZero);
        }
        let n = self.num.eval(&one);
        let fp = (self.num.derivative().eval(&one) * &d - n * self.den.derivative().eval(&one)) / (&d * &d);
        Ok(LogQVal::monomial(-fp, 1))
    }

    /// Laurent expansion in `Y = 1 − X`.
    pub fn laurent_at_1(&self, order: i64) -> Laurent {
        let n = self.num.at_one_minus();
        let d = self.den.at_one_minus();
        if n.is_zero() {
            return Laurent { lead: 0, coeffs: vec![] };
        }
        let (kn, kd) = (n.ord0(), d.ord0());
        let lead = kn as i64 - kd as i64;
        let n = Poly::new(n.0[kn..].to_vec());
        let d = Poly::new(d.0[kd..].to_vec());
        let count = (order - lead + 1).max(0) as usize;
        Laurent { lead, coeffs: series_div(&n, &d, count) }
    }

    /// Expansion in powers of s around 0, coefficient of `s^m` for `m ≤ max_m`.
    pub fn laurent_s(&self, max_m: i64) -> Vec<(i64, LogQVal)> {
        let l = self.laurent_at_1(max_m);
        if l.coeffs.is_empty() {
            return vec![];
        }
        let mut out = vec![];
        for m in l.lead..=max_m {
            // c_m = Σ_k a_k [w^{m−k}] g(w)^k,  g(w) = (1 − e^{−w})/w
            let mut c = Q::zero();
            for (i, a) in l.coeffs.iter().enumerate() {
                let k = l.lead + i as i64;
                if k > m || a.is_zero() {
                    continue;
                }
                let gk = g_power(k, (m - k) as usize + 1);
                c += a * &gk[(m - k) as usize];
            }
            if !c.is_zero() {
                out.push((m, LogQVal::monomial(c, m as i32)));
            }
        }
        out
    }
}

/// Laurent data `Σ_{i} coeffs[i]·Y^{lead+i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub lead: i64,
    pub coeffs: Vec<Q>,
}

impl Laurent {
    /// Coefficient of `Y^k`.
    pub fn coeff(&self, k: i64) -> Q {
        if k < self.lead {
            return Q::zero();
        }
        self.coeffs.get((k - self.lead) as usize).cloned().unwrap_or_else(Q::zero)
    }

    pub fn pole_order(&self) -> i64 {
        (-self.lead).max(0)
    }
}

/// First `count` coefficients of the power series `n/d`, `d(0) ≠ 0`.
fn series_div(n: &Poly, d: &Poly, count: usize) -> Vec<Q> {
    let d0 = d.coeff(0);
    let mut c: Vec<Q> = Vec::with_capacity(count);
    for k in 0..count {
        let mut s = n.coeff(k);
        for i in 1..=k {
            s -= d.coeff(i) * &c[k - i];
        }
        c.push(s / &d0);
    }
    c
}

/// First `count` coefficients of `g(w)^k`, `g(w) = Σ (−1)^n w^n/(n+1)!`.
fn g_power(k: i64, count: usize) -> Vec<Q> {
    let mut g = Vec::with_capacity(count);
    let mut fact = Q::one();
    for n in 0..count {
        fact *= qi(n as i64 + 1);
        let s = if n % 2 == 0 { Q::one() } else { -Q::one() };
        g.push(s / &fact);
    }
    let g = Poly::new(g);
    let base = if k >= 0 { g } else { Poly::new(series_div(&Poly::constant(Q::one()), &g, count)) };
    let mut r = vec![Q::one()];
    for _ in 0..k.unsigned_abs() {
        let prod = Poly::new(r.clone()).mul(&base);
        r = (0..count).map(|i| prod.coeff(i)).collect();
    }
    r.resize(count, Q::zero());
    r
}

impl fmt::Display for RatX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", fmt_poly(&self.num), fmt_poly(&self.den))
    }
}

fn fmt_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let terms: Vec<String> = p
        .0
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| match k {
            0 => format!("{c}"),
            1 => format!("{c}·X"),
            _ => format!("{c}·X^{k}"),
        })
        .collect();
    terms.join(" + ")
}

/// A finite sum `Σ_k c_k·(log q)^k` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct LogQVal(BTreeMap<i32, Q>);

impl LogQVal {
    pub fn zero() -> Self {
        LogQVal(BTreeMap::new())
    }

    pub fn monomial(c: Q, k: i32) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(k, c);
        }
        LogQVal(m)
    }

    pub fn rational(c: Q) -> Self {
        Self::monomial(c, 0)
    }

    /// `c·log q`.
    pub fn logq(c: Q) -> Self {
        Self::monomial(c, 1)
    }

    pub fn coeff(&self, k: i32) -> Q {
        self.0.get(&k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, Q> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.0.clone();
        for (k, c) in &o.0 {
            let e = m.entry(*k).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                m.remove(k);
            }
        }
        LogQVal(m)
    }

    pub fn neg(&self) -> Self {
        LogQVal(self.0.iter().map(|(k, c)| (*k, -c)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LogQVal(self.0.iter().map(|(k, x)| (*k, x * c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (k, a) in &self.0 {
            for (l, b) in &o.0 {
                r = r.add(&Self::monomial(a * b, k + l));
            }
        }
        r
    }
}

impl fmt::Display for LogQVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}·logq"),
                _ => format!("{c}·logq^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for LogQVal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, c) in &self.0 {
            m.serialize_entry(&k.to_string(), &c.to_string())?;
        }
        m.end()
    }
}

/// A log q-graded rational function: `Σ_k f_k(X)·(log q)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogRatX {
    pub grades: BTreeMap<i32, RatX>,
    pub p: u32,
}

impl LogRatX {
    pub fn zero(p: u32) -> Self {
        LogRatX { grades: BTreeMap::new(), p }
    }

    pub fn from_ratx(f: RatX, k: i32) -> Self {
        let p = f.p();
        let mut g = BTreeMap::new();
        if !f.is_zero() {
            g.insert(k, f);
        }
        LogRatX { grades: g, p }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut g = self.grades.clone();
        for (k, f) in &o.grades {
            let s = match g.get(k) {
                Some(h) => h.add(f),
                None => f.clone(),
            };
            if s.is_zero() {
                g.remove(k);
            } else {
                g.insert(*k, s);
            }
        }
        LogRatX { grades: g, p: self.p }
    }

    pub fn mul_ratx(&self, f: &RatX) -> Self {
        let g = self
            .grades
            .iter()
            .map(|(k, h)| (*k, h.mul(f)))
            .filter(|(_, h)| !h.is_zero())
            .collect();
        LogRatX { grades: g, p: self.p }
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.mul_ratx(&RatX::constant(c.clone(), self.p))
    }

    /// Requires every grade to be constant in X.
    pub fn to_logq(&self) -> Result<LogQVal> {
        let mut r = LogQVal::zero();
        for (k, f) in &self.grades {
            let c = f
                .as_constant()
                .ok_or_else(|| Error::Invalid(format!("value depends on s: {f}")))?;
            r = r.add(&LogQVal::monomial(c, *k));
        }
        Ok(r)
    }

    pub fn value_s0(&self) -> Result<LogQVal> {
        let mut r = LogQVal::zero();
        for (k, f) in &self.grades {
            r = r.add(&LogQVal::monomial(f.value_s0()?, *k));
        }
        Ok(r)
    }
}

/// Graded Laurent polynomials in X: `(log-degree, X-exponent) ↦ coefficient`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct XSeries(pub BTreeMap<(i32, i64), Q>);

impl XSeries {
    pub fn zero() -> Self {
        XSeries(BTreeMap::new())
    }

    pub fn term(c: Q, logdeg: i32, xexp: i64) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((logdeg, xexp), c);
        }
        XSeries(m)
    }

    pub fn rational(c: Q) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (k, c) in &o.0 {
            let e = self.0.entry(*k).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                self.0.remove(k);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        XSeries(self.0.iter().map(|(k, x)| (*k, x * c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for ((l1, e1), a) in &self.0 {
            for ((l2, e2), b) in &o.0 {
                r.add_assign(&Self::term(a * b, l1 + l2, e1 + e2));
            }
        }
        r
    }

    /// Multiplication by `c·X^d`.
    pub fn shift(&self, c: &Q, d: i64) -> Self {
        XSeries(self.0.iter().map(|((l, e), x)| ((*l, e + d), x * c)).collect())
    }

    pub fn min_xexp(&self) -> Option<i64> {
        self.0.keys().map(|(_, e)| *e).min()
    }

    pub fn to_logratx(&self, p: u32) -> LogRatX {
        let mut by: BTreeMap<i32, BTreeMap<i64, Q>> = BTreeMap::new();
        for ((l, e), c) in &self.0 {
            by.entry(*l).or_default().insert(*e, c.clone());
        }
        let mut r = LogRatX::zero(p);
        for (l, terms) in by {
            r = r.add(&LogRatX::from_ratx(RatX::from_laurent(&terms, p), l));
        }
        r
    }

    /// Whether no term depends on X.
    pub fn is_s_free(&self) -> bool {
        self.0.keys().all(|(_, e)| *e == 0)
    }
}
