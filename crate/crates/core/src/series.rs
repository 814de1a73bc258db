//! Truncated sparse formal series in a fractional power of q.
//!
//! A [`QSeries`] with scale `D` stores coefficients of `q^(k/D)` for integer `k`.
//! The optional bound `hi` is exclusive and measured in the same scaled units;
//! every stored coefficient below `hi` is exact. `hi = None` marks an exact
//! Laurent polynomial.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, Int};
use crate::rational::{self, ceil_i64, denom_i64, fmt_rational, is_unit_sign, Rational};

/// `coeff · q^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    #[serde(with = "rational::serde_rational")]
    pub coeff: Rational,
    #[serde(with = "rational::serde_rational")]
    pub exp: Rational,
}

impl Monomial {
    pub fn new(coeff: Rational, exp: Rational) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        Monomial { coeff, exp }
    }

    pub fn zero() -> Self {
        Monomial { coeff: Rational::zero(), exp: Rational::zero() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(c, Rational::zero())
    }

    /// `q^e`
    pub fn q(e: Rational) -> Self {
        Monomial { coeff: Rational::one(), exp: e }
    }

    /// `c · q^(n/d)` with small integers, handy for bindings.
    pub fn of(c: i64, n: i64, d: i64) -> Self {
        Self::new(rational::int(c), rational::rat(n, d))
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn neg(&self) -> Self {
        Monomial { coeff: -&self.coeff, exp: self.exp.clone() }
    }

    pub fn mul(&self, other: &Monomial) -> Self {
        Self::new(&self.coeff * &other.coeff, &self.exp + &other.exp)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of the zero monomial");
        Monomial { coeff: self.coeff.recip(), exp: -&self.exp }
    }

    pub fn div(&self, other: &Monomial) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, n: i64) -> Self {
        if n == 0 {
            return Self::one();
        }
        let c = if n > 0 {
            num_traits::pow(self.coeff.clone(), n as usize)
        } else {
            num_traits::pow(self.coeff.recip(), (-n) as usize)
        };
        Self::new(c, &self.exp * rational::int(n))
    }

    pub fn times_q(&self, e: &Rational) -> Self {
        Monomial { coeff: self.coeff.clone(), exp: &self.exp + e }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*q^({})", fmt_rational(&self.coeff), fmt_rational(&self.exp))
    }
}

/// Accepts `c`, `q`, `-q^2`, `3/2*q^(1/2)`, `2q^-1` and the `Display` form.
impl std::str::FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(pos) = s.find('q') else {
            return Ok(Monomial::constant(rational::parse_rational(&s)?));
        };
        let coeff = match s[..pos].trim_end_matches('*') {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            c => rational::parse_rational(c)?,
        };
        let rest = &s[pos + 1..];
        let exp = if rest.is_empty() {
            Rational::one()
        } else {
            let e = rest.strip_prefix('^').ok_or_else(|| Error::Parse(format!("bad monomial '{s}'")))?;
            let e = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(e);
            rational::parse_rational(e)?
        };
        Ok(Monomial::new(coeff, exp))
    }
}

/// First exponent at which two series differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub exp: Rational,
    pub left: Rational,
    pub right: Rational,
}

#[derive(Clone, Debug)]
pub struct QSeries {
    scale: i64,
    terms: Vec<(i64, Rational)>,
    hi: Option<i64>,
}

fn min_bound(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn common_denominator(terms: &[(i64, Rational)]) -> (BigInt, Vec<(i64, BigInt)>) {
    let mut l = BigInt::one();
    for (_, c) in terms {
        if !c.denom().is_one() {
            l = l.lcm(c.denom());
        }
    }
    let nums = terms
        .iter()
        .map(|(k, c)| (*k, c.numer() * (&l / c.denom())))
        .collect();
    (l, nums)
}

fn to_small<T: Int>(v: &[(i64, BigInt)]) -> Option<Vec<(i64, T)>> {
    v.iter().map(|(k, b)| T::from_big(b).map(|x| (*k, x))).collect()
}

impl QSeries {
    /// Builds a series from scaled terms, merging duplicates and dropping zeros
    /// and anything at or above `hi`.
    pub fn new(scale: i64, terms: impl IntoIterator<Item = (i64, Rational)>, hi: Option<i64>) -> Self {
        assert!(scale > 0, "scale must be positive");
        let mut v: Vec<(i64, Rational)> = terms
            .into_iter()
            .filter(|(k, c)| !c.is_zero() && hi.is_none_or(|h| *k < h))
            .collect();
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(i64, Rational)> = Vec::with_capacity(v.len());
        for (k, c) in v {
            match out.last_mut() {
                Some((lk, lc)) if *lk == k => *lc += c,
                _ => out.push((k, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        QSeries { scale, terms: out, hi }
    }

    pub fn exact(scale: i64, terms: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        Self::new(scale, terms, None)
    }

    /// Integer coefficients of `q^0, q^1, …` with an optional bound in q-units.
    pub fn from_ints(coeffs: &[i64], order: Option<i64>) -> Self {
        Self::new(
            1,
            coeffs.iter().enumerate().map(|(k, c)| (k as i64, rational::int(*c))),
            order,
        )
    }

    pub fn zero() -> Self {
        QSeries { scale: 1, terms: Vec::new(), hi: None }
    }

    /// Zero known exactly below `order`.
    pub fn zero_to(order: &Rational) -> Self {
        Self::zero().truncate(order)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::exact(1, [(0, c)])
    }

    pub fn monomial(m: &Monomial) -> Self {
        let d = denom_i64(&m.exp);
        let k = (&m.exp * rational::int(d)).to_integer().to_i64().expect("exponent fits");
        Self::exact(d, [(k, m.coeff.clone())])
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Exclusive bound in scaled units.
    pub fn hi_scaled(&self) -> Option<i64> {
        self.hi
    }

    /// Exclusive bound in q-units.
    pub fn order(&self) -> Option<Rational> {
        self.hi.map(|h| rational::rat(h, self.scale))
    }

    pub fn is_exact(&self) -> bool {
        self.hi.is_none()
    }

    pub fn terms_scaled(&self) -> &[(i64, Rational)] {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (Rational, &Rational)> + '_ {
        self.terms.iter().map(move |(k, c)| (rational::rat(*k, self.scale), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lo_scaled(&self) -> Option<i64> {
        self.terms.first().map(|t| t.0)
    }

    /// Exponent of the lowest stored term.
    pub fn valuation(&self) -> Option<Rational> {
        self.lo_scaled().map(|k| rational::rat(k, self.scale))
    }

    /// Lower bound for the valuation of the true series, in scaled units.
    fn true_valuation(&self) -> Option<i64> {
        self.lo_scaled().or(self.hi)
    }

    pub fn coeff(&self, exp: &Rational) -> Rational {
        let k = exp * rational::int(self.scale);
        if !k.is_integer() {
            return Rational::zero();
        }
        let k = k.to_integer().to_i64().expect("exponent fits");
        self.coeff_scaled(k)
    }

    pub fn coeff_scaled(&self, k: i64) -> Rational {
        match self.terms.binary_search_by_key(&k, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// The same series over a multiple `d` of the current scale.
    pub fn with_scale(&self, d: i64) -> Self {
        assert!(d % self.scale == 0, "scale {d} is not a multiple of {}", self.scale);
        let t = d / self.scale;
        if t == 1 {
            return self.clone();
        }
        QSeries {
            scale: d,
            terms: self.terms.iter().map(|(k, c)| (k * t, c.clone())).collect(),
            hi: self.hi.map(|h| h * t),
        }
    }

    /// Smallest scale representing the same series.
    pub fn reduced(&self) -> Self {
        let mut g = self.scale;
        for (k, _) in &self.terms {
            g = g.gcd(k);
        }
        if let Some(h) = self.hi {
            g = g.gcd(&h);
        }
        if g <= 1 {
            return self.clone();
        }
        QSeries {
            scale: self.scale / g,
            terms: self.terms.iter().map(|(k, c)| (k / g, c.clone())).collect(),
            hi: self.hi.map(|h| h / g),
        }
    }

    /// Drops everything at exponent `order` and beyond.
    pub fn truncate(&self, order: &Rational) -> Self {
        let d = self.scale.lcm(&denom_i64(order));
        let s = self.with_scale(d);
        let h = ceil_i64(&(order * rational::int(d)));
        s.truncate_scaled(h)
    }

    pub fn truncate_scaled(&self, h: i64) -> Self {
        let hi = min_bound(self.hi, Some(h));
        QSeries {
            scale: self.scale,
            terms: self.terms.iter().filter(|(k, _)| *k < hi.unwrap()).cloned().collect(),
            hi,
        }
    }

    fn unify(&self, other: &QSeries) -> (QSeries, QSeries) {
        let d = self.scale.lcm(&other.scale);
        (self.with_scale(d), other.with_scale(d))
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let (f, g) = self.unify(other);
        let hi = min_bound(f.hi, g.hi);
        QSeries::new(f.scale, f.terms.into_iter().chain(g.terms), hi)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            scale: self.scale,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            hi: self.hi,
        }
    }

    pub fn scale_coeffs(&self, c: &Rational) -> QSeries {
        if c.is_zero() {
            return QSeries { scale: self.scale, terms: Vec::new(), hi: self.hi };
        }
        QSeries {
            scale: self.scale,
            terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(),
            hi: self.hi,
        }
    }

    /// Multiplication by `q^e`; the bound moves with the series.
    pub fn shift(&self, e: &Rational) -> QSeries {
        let d = self.scale.lcm(&denom_i64(e));
        let s = self.with_scale(d);
        let t = (e * rational::int(d)).to_integer().to_i64().expect("shift fits");
        QSeries {
            scale: d,
            terms: s.terms.into_iter().map(|(k, c)| (k + t, c)).collect(),
            hi: s.hi.map(|h| h + t),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> QSeries {
        self.shift(&m.exp).scale_coeffs(&m.coeff)
    }

    /// Exact product truncated to the common bound, lowered further when a
    /// factor has negative valuation.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let (f, g) = self.unify(other);
        let mut hi = None;
        if let Some(h) = f.hi {
            hi = min_bound(hi, Some(h + g.true_valuation().unwrap_or(0).min(0)));
        }
        if let Some(h) = g.hi {
            hi = min_bound(hi, Some(h + f.true_valuation().unwrap_or(0).min(0)));
        }
        let scale = f.scale;
        if f.terms.is_empty() || g.terms.is_empty() {
            return QSeries { scale, terms: Vec::new(), hi };
        }
        let lo = f.terms[0].0 + g.terms[0].0;
        let top = f.terms.last().unwrap().0 + g.terms.last().unwrap().0 + 1;
        let end = hi.map_or(top, |h| h.min(top));
        if end <= lo {
            return QSeries { scale, terms: Vec::new(), hi };
        }
        let (fd, fnum) = common_denominator(&f.terms);
        let (gd, gnum) = common_denominator(&g.terms);
        let den = Rational::from_integer(fd * gd);
        let fb = fnum.iter().map(|t| kernel::bits(&t.1)).max().unwrap_or(0);
        let gb = gnum.iter().map(|t| kernel::bits(&t.1)).max().unwrap_or(0);
        let nb = 64 - (fnum.len().min(gnum.len()) as u64).leading_zeros() as u64;
        let acc: Vec<BigInt> = if fb + gb + nb <= 125 {
            let a = to_small::<i128>(&fnum).unwrap();
            let b = to_small::<i128>(&gnum).unwrap();
            kernel::convolve(&a, &b, lo, end)
                .expect("i128 bound checked")
                .into_iter()
                .map(BigInt::from)
                .collect()
        } else {
            kernel::convolve(&fnum, &gnum, lo, end).unwrap()
        };
        let terms = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (lo + i as i64, Rational::from_integer(c) / &den))
            .collect();
        QSeries { scale, terms, hi }
    }

    pub fn pow(&self, n: u32) -> QSeries {
        let mut acc = QSeries::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse. The result has valuation `-v` and bound `hi - 2v`
    /// where `v` is the valuation of `self`.
    pub fn inverse(&self) -> Result<QSeries> {
        let Some((v, c)) = self.terms.first().cloned() else {
            return Err(Error::ZeroLeadingTerm);
        };
        if self.terms.len() == 1 && self.hi.is_none() {
            return Ok(QSeries::exact(self.scale, [(-v, c.recip())]));
        }
        let Some(hi) = self.hi else {
            return Err(Error::NonTruncating(
                "inverse of an exact polynomial needs a truncation bound".into(),
            ));
        };
        let len = (hi - v) as usize;
        let unit: Vec<(usize, Rational)> =
            self.terms.iter().map(|(k, x)| ((k - v) as usize, x / &c)).collect();
        let h: Vec<Rational> = if unit.iter().all(|(_, x)| x.is_integer()) {
            let big: Vec<(usize, BigInt)> = unit.iter().map(|(k, x)| (*k, x.to_integer())).collect();
            let small: Option<Vec<(usize, i128)>> =
                big.iter().map(|(k, x)| x.to_i128().map(|y| (*k, y))).collect();
            let ints: Vec<BigInt> = small
                .and_then(|s| kernel::inverse_unit::<i128>(&s, &1, len))
                .map(|g| g.into_iter().map(BigInt::from).collect())
                .unwrap_or_else(|| kernel::inverse_unit::<BigInt>(&big, &BigInt::one(), len).unwrap());
            ints.into_iter().map(Rational::from_integer).collect()
        } else {
            let mut g = vec![Rational::zero(); len];
            if len > 0 {
                g[0] = Rational::one();
            }
            for n in 1..len {
                let mut s = Rational::zero();
                for (k, x) in &unit {
                    if *k == 0 {
                        continue;
                    }
                    if *k > n {
                        break;
                    }
                    if !g[n - k].is_zero() {
                        s += x * &g[n - k];
                    }
                }
                g[n] = -s;
            }
            g
        };
        let cinv = c.recip();
        Ok(QSeries::new(
            self.scale,
            h.into_iter().enumerate().map(|(i, x)| (i as i64 - v, x * &cinv)),
            Some(hi - 2 * v),
        ))
    }

    /// `f(q^k)` for positive rational `k`.
    pub fn substitute_power(&self, k: &Rational) -> QSeries {
        assert!(k.is_positive(), "substitution power must be positive");
        let p = k.numer().to_i64().expect("power fits");
        let s = k.denom().to_i64().expect("power fits");
        QSeries {
            scale: self.scale * s,
            terms: self.terms.iter().map(|(e, c)| (e * p, c.clone())).collect(),
            hi: self.hi.map(|h| h * p),
        }
        .reduced()
    }

    /// Keeps the terms whose exponent is congruent to `residue` modulo `modulus`.
    pub fn dissect(&self, modulus: i64, residue: i64) -> QSeries {
        assert!(modulus > 0, "modulus must be positive");
        let m = modulus * self.scale;
        let r = residue * self.scale;
        QSeries {
            scale: self.scale,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| (k - r).rem_euclid(m) == 0)
                .cloned()
                .collect(),
            hi: self.hi,
        }
    }

    /// Compares two series on the exponents below both bounds.
    pub fn first_mismatch(&self, other: &QSeries) -> Option<Mismatch> {
        let (f, g) = self.unify(other);
        let hi = min_bound(f.hi, g.hi);
        let (mut i, mut j) = (0, 0);
        loop {
            let a = f.terms.get(i);
            let b = g.terms.get(j);
            let (k, l, r) = match (a, b) {
                (None, None) => return None,
                (Some((k, c)), None) => (*k, c.clone(), Rational::zero()),
                (None, Some((k, c))) => (*k, Rational::zero(), c.clone()),
                (Some((k1, c1)), Some((k2, c2))) => {
                    if k1 == k2 {
                        i += 1;
                        j += 1;
                        if c1 == c2 {
                            continue;
                        }
                        (*k1, c1.clone(), c2.clone())
                    } else if k1 < k2 {
                        (*k1, c1.clone(), Rational::zero())
                    } else {
                        (*k2, Rational::zero(), c2.clone())
                    }
                }
            };
            if hi.is_some_and(|h| k >= h) {
                return None;
            }
            return Some(Mismatch { exp: rational::rat(k, f.scale), left: l, right: r });
        }
    }

    pub fn agrees_with(&self, other: &QSeries) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// Sum of many series with a single merge.
    pub fn sum_all<'a>(items: impl IntoIterator<Item = &'a QSeries>) -> QSeries {
        let items: Vec<&QSeries> = items.into_iter().collect();
        let d = items.iter().fold(1i64, |d, s| d.lcm(&s.scale));
        let mut hi = None;
        let mut all = Vec::new();
        for s in items {
            let s = s.with_scale(d);
            hi = min_bound(hi, s.hi);
            all.extend(s.terms);
        }
        QSeries::new(d, all, hi)
    }
}

impl PartialEq for QSeries {
    fn eq(&self, other: &Self) -> bool {
        let (f, g) = self.unify(other);
        f.hi == g.hi && f.terms == g.terms
    }
}

impl Eq for QSeries {}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if self.scale == 1 {
                write!(f, "{}:{}", k, fmt_rational(c))?;
            } else {
                write!(f, "{}/{}:{}", k, self.scale, fmt_rational(c))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&QSeries> for &QSeries {
            type Output = QSeries;
            fn $m(self, rhs: &QSeries) -> QSeries {
                QSeries::$m(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::neg(self)
    }
}


fn scaled(e: &Rational, d: i64) -> i64 {
    let k = e * rational::int(d);
    assert!(k.is_integer(), "exponent {e} not on scale {d}");
    k.to_integer().to_i64().expect("exponent fits")
}

/// `∏_{k=0}^{n-1} (1 - a q^(base·k))`, exact.
pub fn pochhammer_finite(a: &Monomial, base: &Rational, n: u64) -> QSeries {
    let d = denom_i64(&a.exp).lcm(&denom_i64(base));
    let e0 = scaled(&a.exp, d);
    let b = scaled(base, d);
    let mut terms: Vec<(i64, Rational)> = vec![(0, Rational::one())];
    for k in 0..n as i64 {
        let e = e0 + b * k;
        let mut next: Vec<(i64, Rational)> = terms.clone();
        next.extend(terms.iter().map(|(x, c)| (x + e, -(c * &a.coeff))));
        terms = QSeries::exact(d, next).terms;
        if terms.is_empty() {
            break;
        }
    }
    QSeries::exact(d, terms)
}

fn times_binomial_dense<T: Int>(a: &mut [T], negc: &T, s: usize) -> Option<()> {
    for i in (s..a.len()).rev() {
        let (lo, hi) = a.split_at_mut(i);
        if !lo[i - s].is_nil() {
            hi[0].add_mul(&lo[i - s], negc)?;
        }
    }
    Some(())
}

/// Dense product `∏ (1 - c_j x^(s_j))` over positive strides, `len` coefficients.
fn positive_product(factors: &[(Rational, usize)], len: usize) -> Vec<Rational> {
    if factors.iter().all(|(c, _)| c.is_integer()) {
        let run = |with_small: bool| -> Option<Vec<BigInt>> {
            if with_small {
                let mut a = vec![0i128; len];
                if len > 0 {
                    a[0] = 1;
                }
                for (c, s) in factors {
                    let negc = (-c.to_integer()).to_i128()?;
                    times_binomial_dense(&mut a, &negc, *s)?;
                }
                Some(a.into_iter().map(BigInt::from).collect())
            } else {
                let mut a = vec![BigInt::zero(); len];
                if len > 0 {
                    a[0] = BigInt::one();
                }
                for (c, s) in factors {
                    times_binomial_dense(&mut a, &(-c.to_integer()), *s)?;
                }
                Some(a)
            }
        };
        let ints = run(true).or_else(|| run(false)).unwrap();
        return ints.into_iter().map(Rational::from_integer).collect();
    }
    let mut a = vec![Rational::zero(); len];
    if len > 0 {
        a[0] = Rational::one();
    }
    for (c, s) in factors {
        for i in (*s..len).rev() {
            if !a[i - s].is_zero() {
                let t = &a[i - s] * c;
                a[i] -= t;
            }
        }
    }
    a
}

/// `1/f` known below `order`. Exact polynomials are cut far enough past their
/// valuation that the inverse is exact below `order`.
pub fn recip_to(f: &QSeries, order: &Rational) -> Result<QSeries> {
    let Some(v) = f.valuation() else {
        return Err(Error::DivisionByZeroSeries("reciprocal of the zero series".into()));
    };
    let g = if f.is_exact() && f.len() > 1 {
        let t = (order + &v + &v).max(&v + rational::int(1));
        f.truncate(&t).inverse()?
    } else {
        f.inverse()?
    };
    Ok(g.truncate(order))
}

/// `(a; q^base)_∞` exact below `order`.
///
/// Factors with nonpositive exponent are multiplied exactly, so `a` may carry a
/// negative exponent as long as its coefficient is `±1`.
pub fn pochhammer_infinite(a: &Monomial, base: &Rational, order: &Rational) -> Result<QSeries> {
    assert!(base.is_positive(), "base must be positive");
    if !a.exp.is_positive() && !is_unit_sign(&a.coeff) {
        return Err(Error::NonTruncating(format!("({a}; q^{})_inf", fmt_rational(base))));
    }
    let d = denom_i64(&a.exp).lcm(&denom_i64(base)).lcm(&denom_i64(order));
    let e0 = scaled(&a.exp, d);
    let b = scaled(base, d);
    let hi = ceil_i64(&(order * rational::int(d)));
    let mut head = QSeries::one();
    let mut k = 0i64;
    while e0 + b * k <= 0 {
        let e = e0 + b * k;
        let factor = QSeries::exact(d, [(0, Rational::one()), (e, -a.coeff.clone())]);
        head = head.mul(&factor);
        k += 1;
    }
    if head.is_zero() {
        return Ok(QSeries::zero().with_scale(d).truncate_scaled(hi));
    }
    let v = head.lo_scaled().unwrap();
    let tail_hi = hi - v.min(0);
    let mut factors = Vec::new();
    loop {
        let e = e0 + b * k;
        if e >= tail_hi {
            break;
        }
        factors.push((a.coeff.clone(), e as usize));
        k += 1;
    }
    let len = tail_hi.max(0) as usize;
    let dense = positive_product(&factors, len);
    let tail = QSeries::new(d, dense.into_iter().enumerate().map(|(i, c)| (i as i64, c)), Some(tail_hi));
    Ok(head.mul(&tail).truncate_scaled(hi))
}

/// Product of several `(a_i; q^base)_∞`.
pub fn pochhammer_infinite_many(a: &[Monomial], base: &Rational, order: &Rational) -> Result<QSeries> {
    let mut acc = QSeries::one().truncate(order);
    for m in a {
        acc = acc.mul(&pochhammer_infinite(m, base, order)?);
    }
    Ok(acc)
}

/// `Σ_{n∈ℤ} (-1)^n q^(base·n(n-1)/2) z^n` below `order`.
pub fn theta_jtp(z: &Monomial, base: &Rational, order: &Rational) -> Result<QSeries> {
    assert!(!z.is_zero(), "theta_jtp needs a nonzero z");
    if !base.is_positive() {
        return Err(Error::Divergent(format!("base {} is not positive", fmt_rational(base))));
    }
    let half = base / rational::int(2);
    let lin = &z.exp - &half;
    let d = denom_i64(&half).lcm(&denom_i64(&lin)).lcm(&denom_i64(order));
    let hi = ceil_i64(&(order * rational::int(d)));
    let exp_of = |n: i64| -> i64 {
        let nn = rational::int(n);
        scaled(&(&half * &nn * &nn + &lin * &nn), d)
    };
    let vertex = rational::floor_i64(&(-&lin / base));
    let neg_z = z.neg();
    let mut terms = Vec::new();
    let push = |n: i64, terms: &mut Vec<(i64, Rational)>| -> bool {
        let e = exp_of(n);
        if e < hi {
            terms.push((e, neg_z.pow(n).coeff));
        }
        e < hi
    };
    let mut n = vertex;
    while push(n, &mut terms) || n <= vertex + 1 {
        n += 1;
    }
    let mut n = vertex - 1;
    while push(n, &mut terms) || n >= vertex - 1 {
        n -= 1;
    }
    Ok(QSeries::new(d, terms, Some(hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ints(c: &[i64], order: i64) -> QSeries {
        QSeries::from_ints(c, Some(order))
    }

    #[test]
    fn telescoping_product() {
        let geo = ints(&[1; 20], 20);
        let p = QSeries::from_ints(&[1, -1], None).mul(&geo);
        assert_eq!(p, QSeries::one().truncate(&int(20)));
    }

    #[test]
    fn product_of_three_binomials() {
        let p = pochhammer_finite(&Monomial::q(int(1)), &int(1), 3);
        assert_eq!(p, QSeries::from_ints(&[1, -1, -1, 0, 1, 1, -1], None));
    }

    #[test]
    fn multiply_by_zero() {
        let f = ints(&[1, 2, 3], 3);
        let z = f.mul(&QSeries::zero());
        assert!(z.is_zero());
        assert_eq!(z.hi_scaled(), Some(3));
    }

    #[test]
    fn geometric_inverse() {
        let f = QSeries::from_ints(&[1, -1], Some(12));
        assert_eq!(f.inverse().unwrap(), ints(&[1; 12], 12));
    }

    #[test]
    fn partition_inverse() {
        let e = pochhammer_infinite(&Monomial::q(int(1)), &int(1), &int(15)).unwrap();
        let p = e.inverse().unwrap();
        assert_eq!(p, ints(&[1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135], 15));
    }

    #[test]
    fn zero_leading_term() {
        let f = QSeries::zero_to(&int(5));
        assert_eq!(f.inverse(), Err(Error::ZeroLeadingTerm));
    }

    #[test]
    fn inverse_of_laurent_series() {
        let f = QSeries::new(1, [(-1, int(2)), (0, int(1)), (3, int(1))], Some(10));
        let g = f.inverse().unwrap();
        assert_eq!(g.valuation(), Some(int(1)));
        assert_eq!(g.hi_scaled(), Some(12));
        assert!(f.mul(&g).agrees_with(&QSeries::one()));
        assert_eq!(f.mul(&g).hi_scaled(), Some(10));
    }

    #[test]
    fn substitute_fractional_power() {
        let f = QSeries::from_ints(&[1, 1], None);
        let g = f.substitute_power(&rat(4, 3));
        assert_eq!(g.scale(), 3);
        assert_eq!(g.terms_scaled(), &[(0, int(1)), (4, int(1))]);
        assert_eq!(f.substitute_power(&int(1)), f);
    }

    #[test]
    fn substitute_square_of_euler_product() {
        let e = pochhammer_infinite(&Monomial::q(int(1)), &int(1), &int(20)).unwrap();
        let direct = pochhammer_infinite(&Monomial::q(int(2)), &int(2), &int(40)).unwrap();
        assert_eq!(e.substitute_power(&int(2)), direct);
    }

    #[test]
    fn finite_pochhammer_examples() {
        assert_eq!(pochhammer_finite(&Monomial::q(int(1)), &int(1), 0), QSeries::one());
        let p = pochhammer_finite(&Monomial::of(-1, 1, 1), &int(2), 2);
        assert_eq!(p, QSeries::from_ints(&[1, 1, 0, 1, 1], None));
        let l = pochhammer_finite(&Monomial::of(-1, -2, 1), &int(4), 2);
        assert_eq!(l.valuation(), Some(int(-2)));
        assert_eq!(l.terms_scaled(), &[(-2, int(1)), (0, int(2)), (2, int(1))]);
    }

    #[test]
    fn infinite_pochhammer_examples() {
        let e = pochhammer_infinite(&Monomial::q(int(1)), &int(1), &int(8)).unwrap();
        assert_eq!(e, ints(&[1, -1, -1, 0, 0, 1, 0, 1], 8));
        let d = pochhammer_infinite(&Monomial::of(-1, 1, 1), &int(1), &int(5)).unwrap();
        assert_eq!(d, ints(&[1, 1, 1, 2, 2], 5));
        let z = pochhammer_infinite(&Monomial::one(), &int(1), &int(5)).unwrap();
        assert!(z.is_zero());
        assert!(matches!(
            pochhammer_infinite(&Monomial::of(2, 0, 1), &int(1), &int(5)),
            Err(Error::NonTruncating(_))
        ));
    }

    #[test]
    fn infinite_pochhammer_negative_exponent() {
        // (-q^-1; q^2)_inf = (1 + q^-1)(-q; q^2)_inf
        let f = pochhammer_infinite(&Monomial::of(-1, -1, 1), &int(2), &int(12)).unwrap();
        let tail = pochhammer_infinite(&Monomial::of(-1, 1, 1), &int(2), &int(13)).unwrap();
        let g = QSeries::exact(1, [(-1, int(1)), (0, int(1))]).mul(&tail);
        assert!(f.agrees_with(&g));
        assert_eq!(f.hi_scaled(), Some(12));
    }

    #[test]
    fn theta_examples() {
        let t = theta_jtp(&Monomial::of(-1, 1, 1), &int(2), &int(17)).unwrap();
        let mut c = vec![0i64; 17];
        c[0] = 1;
        for n in 1..5usize {
            c[n * n] = 2;
        }
        assert_eq!(t, ints(&c, 17));
        let z = theta_jtp(&Monomial::q(int(1)), &int(1), &int(20)).unwrap();
        assert!(z.is_zero());
        let t = theta_jtp(&Monomial::of(-1, 0, 1), &int(1), &int(20)).unwrap();
        let minus = pochhammer_infinite(&Monomial::of(-1, 1, 1), &int(1), &int(20)).unwrap();
        let p = minus
            .mul(&minus)
            .mul(&pochhammer_infinite(&Monomial::q(int(1)), &int(1), &int(20)).unwrap())
            .scale_coeffs(&int(2));
        assert_eq!(t, p);
        assert!(matches!(theta_jtp(&Monomial::q(int(1)), &int(0), &int(5)), Err(Error::Divergent(_))));
    }

    #[test]
    fn dissect_examples() {
        let f = ints(&[1; 10], 10);
        assert_eq!(f.dissect(2, 1), ints(&[0, 1, 0, 1, 0, 1, 0, 1, 0, 1], 10));
        let g = QSeries::from_ints(&[1, 2, 0, 0, 2, 0, 0, 0, 0, 2], None);
        assert_eq!(g.dissect(2, 0), QSeries::from_ints(&[1, 0, 0, 0, 2], None));
        let h = f.substitute_power(&rat(1, 2));
        assert_eq!(h.dissect(1, 0).len(), 5);
    }

    #[test]
    fn display_uses_scaled_exponents() {
        assert_eq!(ints(&[1, 1, 1, 1, 2], 5).to_string(), "0:1 1:1 2:1 3:1 4:2");
        let g = QSeries::exact(3, [(0, int(1)), (4, rat(-1, 2))]);
        assert_eq!(g.to_string(), "0/3:1 4/3:-1/2");
    }

    #[test]
    fn mul_bound_with_negative_valuation() {
        let f = QSeries::exact(1, [(-2, int(1))]);
        let g = ints(&[1, 1, 1], 3);
        let p = f.mul(&g);
        assert_eq!(p.hi_scaled(), Some(1));
        assert_eq!(p.valuation(), Some(int(-2)));
    }

    #[test]
    fn big_coefficients_fall_back_to_bigint() {
        let big = Rational::from_integer(BigInt::from(10).pow(30));
        let f = QSeries::new(1, [(0, big.clone()), (1, big.clone())], Some(4));
        let p = f.mul(&f);
        assert_eq!(p.coeff(&int(1)), &big * &big * int(2));
    }
}
