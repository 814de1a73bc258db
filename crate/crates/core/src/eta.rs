//! Eta quotients: expansion, modular prefactor, product recognition.
//!
//! `J_m = (q^m;q^m)_∞`, `J_{a,m} = (q^a,q^{m-a},q^m;q^m)_∞` and
//! `J̄_{a,m} = (-q^a,-q^{m-a},q^m;q^m)_∞`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, Int};
use crate::rational::{self, ceil_i64, denom_i64, fmt_rational, int, rat, Rational};
use crate::series::{Monomial, QSeries};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureFactor {
    #[serde(with = "rational::serde_rational")]
    pub m: Rational,
    pub exp: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralFactor {
    #[serde(with = "rational::serde_rational")]
    pub a: Rational,
    #[serde(with = "rational::serde_rational")]
    pub m: Rational,
    pub exp: i64,
    pub barred: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaQuotientSpec {
    pub prefactor: Monomial,
    pub pure: Vec<PureFactor>,
    pub general: Vec<GeneralFactor>,
}

impl Default for EtaQuotientSpec {
    fn default() -> Self {
        EtaQuotientSpec { prefactor: Monomial::one(), pure: Vec::new(), general: Vec::new() }
    }
}

fn r(x: i64) -> Rational {
    int(x)
}

impl EtaQuotientSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiplies in `J_m^exp`.
    pub fn j(mut self, m: i64, exp: i64) -> Self {
        self.pure.push(PureFactor { m: r(m), exp });
        self
    }

    /// Multiplies in `J_{a,m}^exp`.
    pub fn jam(mut self, a: i64, m: i64, exp: i64) -> Self {
        self.general.push(GeneralFactor { a: r(a), m: r(m), exp, barred: false });
        self
    }

    /// Multiplies in `J̄_{a,m}^exp`.
    pub fn jbar(mut self, a: i64, m: i64, exp: i64) -> Self {
        self.general.push(GeneralFactor { a: r(a), m: r(m), exp, barred: true });
        self
    }

    pub fn times(mut self, m: &Monomial) -> Self {
        self.prefactor = self.prefactor.mul(m);
        self
    }

    pub fn with_coeff(self, c: i64) -> Self {
        self.times(&Monomial::constant(r(c)))
    }

    pub fn with_q(self, e: Rational) -> Self {
        self.times(&Monomial::q(e))
    }

    /// Concatenation (product of the two quotients).
    pub fn concat(&self, other: &EtaQuotientSpec) -> EtaQuotientSpec {
        let mut out = self.clone();
        out.prefactor = out.prefactor.mul(&other.prefactor);
        out.pure.extend(other.pure.iter().cloned());
        out.general.extend(other.general.iter().cloned());
        out
    }

    /// Reciprocal quotient.
    pub fn inverse(&self) -> EtaQuotientSpec {
        EtaQuotientSpec {
            prefactor: self.prefactor.inv(),
            pure: self.pure.iter().map(|f| PureFactor { m: f.m.clone(), exp: -f.exp }).collect(),
            general: self
                .general
                .iter()
                .map(|f| GeneralFactor { exp: -f.exp, ..f.clone() })
                .collect(),
        }
    }

    /// Brings every general factor into `0 < a < m`, moving the monomials picked
    /// up by `J_{a+m,m} = -q^{-a} J_{a,m}` and `J̄_{a+m,m} = q^{-a} J̄_{a,m}` into
    /// the prefactor. `J̄_{0,m}` becomes `2 J_{2m}^2 / J_m`; `J_{0,m}` makes the
    /// whole quotient zero (an error when it sits in a denominator).
    pub fn normalize(&self) -> Result<EtaQuotientSpec> {
        let mut out = EtaQuotientSpec { prefactor: self.prefactor.clone(), ..Default::default() };
        for f in &self.pure {
            assert!(f.m.is_positive(), "J_m needs m > 0");
            if f.exp != 0 {
                out.pure.push(f.clone());
            }
        }
        for f in &self.general {
            assert!(f.m.is_positive(), "J_(a,m) needs m > 0");
            if f.exp == 0 {
                continue;
            }
            let k = (&f.a / &f.m).floor();
            let a0 = &f.a - &k * &f.m;
            let ki = k.to_integer().to_i64().expect("shift fits");
            // J_{a0+km} = (-1)^k q^{-(k a0 + m k(k-1)/2)} J_{a0}
            let shift = -(&r(ki) * &a0 + &f.m * r(ki * (ki - 1) / 2));
            let sign = if !f.barred && ki.rem_euclid(2) == 1 { -1 } else { 1 };
            let mono = Monomial::new(r(sign), shift).pow(f.exp);
            out.prefactor = out.prefactor.mul(&mono);
            if a0.is_zero() {
                if f.barred {
                    out.prefactor = out.prefactor.mul(&Monomial::constant(r(2)).pow(f.exp));
                    out.pure.push(PureFactor { m: &f.m * r(2), exp: 2 * f.exp });
                    out.pure.push(PureFactor { m: f.m.clone(), exp: -f.exp });
                } else if f.exp > 0 {
                    out.prefactor = Monomial::zero();
                } else {
                    return Err(Error::DivisionByZeroSeries(format!(
                        "J_(0,{}) in a denominator",
                        fmt_rational(&f.m)
                    )));
                }
                continue;
            }
            out.general.push(GeneralFactor { a: a0, m: f.m.clone(), exp: f.exp, barred: f.barred });
        }
        Ok(out)
    }

    /// Rewrites barred factors as `J̄_{a,m} = J_m^2 J_{2a,2m} / (J_{a,m} J_{2m})`.
    pub fn unbarred(&self) -> Result<EtaQuotientSpec> {
        let n = self.normalize()?;
        let mut out = EtaQuotientSpec { prefactor: n.prefactor.clone(), pure: n.pure.clone(), general: Vec::new() };
        for f in &n.general {
            if !f.barred {
                out.general.push(f.clone());
                continue;
            }
            out.pure.push(PureFactor { m: f.m.clone(), exp: 2 * f.exp });
            out.pure.push(PureFactor { m: &f.m * r(2), exp: -f.exp });
            out.general.push(GeneralFactor { a: &f.a * r(2), m: &f.m * r(2), exp: f.exp, barred: false });
            out.general.push(GeneralFactor { a: f.a.clone(), m: f.m.clone(), exp: -f.exp, barred: false });
        }
        Ok(out)
    }

    fn scale(&self) -> i64 {
        let mut d = denom_i64(&self.prefactor.exp);
        for f in &self.pure {
            d = d.lcm(&denom_i64(&f.m));
        }
        for f in &self.general {
            d = d.lcm(&denom_i64(&f.m)).lcm(&denom_i64(&f.a));
        }
        d
    }

    /// Product exponents `e_n` (in `q^(1/D)`) of the bare quotient, `n < len`.
    fn exponents(&self, d: i64, len: usize) -> Vec<i64> {
        let mut e = vec![0i64; len];
        let scaled = |x: &Rational| -> i64 { (x * r(d)).to_integer().to_i64().expect("fits") };
        let arith = |start: i64, step: i64, w: i64, e: &mut Vec<i64>| {
            let mut n = start;
            while (n as usize) < len {
                e[n as usize] += w;
                n += step;
            }
        };
        for f in &self.pure {
            let m = scaled(&f.m);
            arith(m, m, -f.exp, &mut e);
        }
        for f in &self.general {
            let (a, m) = (scaled(&f.a), scaled(&f.m));
            arith(m, m, -f.exp, &mut e);
            if f.barred {
                for s in [a, m - a] {
                    arith(s, m, f.exp, &mut e);
                    arith(2 * s, 2 * m, -f.exp, &mut e);
                }
            } else {
                arith(a, m, -f.exp, &mut e);
                arith(m - a, m, -f.exp, &mut e);
            }
        }
        e
    }
}

impl fmt::Display for EtaQuotientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefactor)?;
        for p in &self.pure {
            write!(f, " J_{}^{}", fmt_rational(&p.m), p.exp)?;
        }
        for g in &self.general {
            let bar = if g.barred { "Jbar" } else { "J" };
            write!(f, " {}_({},{})^{}", bar, fmt_rational(&g.a), fmt_rational(&g.m), g.exp)?;
        }
        Ok(())
    }
}

/// Exact expansion below `order` via product exponents and the Euler transform.
pub fn expand_eta_quotient(spec: &EtaQuotientSpec, order: &Rational) -> Result<QSeries> {
    let n = spec.normalize()?;
    let d = n.scale().lcm(&denom_i64(order));
    let hi = ceil_i64(&(order * r(d)));
    if n.prefactor.is_zero() {
        return Ok(QSeries::zero().with_scale(d).truncate_scaled(hi));
    }
    let shift = (&n.prefactor.exp * r(d)).to_integer().to_i64().expect("fits");
    let len = (hi - shift).max(0) as usize;
    let e = n.exponents(d, len);
    let coeffs = kernel::euler_transform(&e, len);
    let bare = QSeries::new(
        d,
        coeffs.into_iter().enumerate().map(|(i, c)| (i as i64, Rational::from_integer(c))),
        Some(len as i64),
    );
    Ok(bare.mul_monomial(&n.prefactor))
}

fn bernoulli2(x: &Rational) -> Rational {
    x * x - x + rat(1, 6)
}

/// Modular prefactor `C` and weight of the quotient; `q^C · spec` is modular.
///
/// The prefactor monomial's exponent is subtracted from `C`, so a fitted
/// `c q^v · (bare quotient)` reports the exponent for the whole series.
pub fn prefactor_c(spec: &EtaQuotientSpec) -> Result<(Rational, Rational)> {
    let u = spec.unbarred()?;
    let mut c = Rational::zero();
    let mut w = Rational::zero();
    for f in &u.pure {
        c += r(f.exp) * &f.m / r(24);
        w += rat(f.exp, 2);
    }
    for f in &u.general {
        let b = bernoulli2(&(&f.a / &f.m));
        c += r(f.exp) * (&f.m * b / r(2) + &f.m / r(24));
        w += rat(f.exp, 2);
    }
    c -= &u.prefactor.exp;
    Ok((c, w))
}

/// `f = c q^v ∏_{n≥1} (1 - q^(n/D))^(-e_n)` on the computed window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductExponents {
    pub entries: Vec<Rational>,
    pub scale: i64,
    pub normalization: Monomial,
}

fn mobius(n: usize) -> i64 {
    let mut n = n;
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Logarithmic derivative coefficients `c_n` with `n a_n = Σ_{k=1}^{n} c_k a_{n-k}`, `a_0 = 1`.
fn log_derivative_int<T: Int>(a: &[T]) -> Option<Vec<T>> {
    let n_max = a.len();
    let mut c = vec![T::nil(); n_max];
    for n in 1..n_max {
        let mut s = T::nil();
        s.add_mul(&a[n], &T::from_i64(n as i64))?;
        for k in 1..n {
            if !a[n - k].is_nil() && !c[k].is_nil() {
                let neg = c[k].negated()?;
                s.add_mul(&neg, &a[n - k])?;
            }
        }
        c[n] = s;
    }
    Some(c)
}

/// Peels `f` into product exponents `e_1..e_window`.
pub fn recognize_product(f: &QSeries, window: usize) -> Result<ProductExponents> {
    let Some((v, lead)) = f.terms_scaled().first().cloned() else {
        return Err(Error::ZeroSeries);
    };
    let d = f.scale();
    if let Some(h) = f.hi_scaled() {
        let available = (h - v - 1).max(0) as usize;
        if available < window {
            return Err(Error::WindowTooSmall { available, needed: window });
        }
    }
    let len = window + 1;
    let mut a = vec![Rational::zero(); len];
    for (k, c) in f.terms_scaled() {
        let i = (k - v) as usize;
        if i < len {
            a[i] = c / &lead;
        }
    }
    let c: Vec<Rational> = if a.iter().all(|x| x.is_integer()) {
        let big: Vec<BigInt> = a.iter().map(|x| x.to_integer()).collect();
        let small: Option<Vec<i128>> = big.iter().map(|x| x.to_i128()).collect();
        let ints: Vec<BigInt> = small
            .and_then(|s| log_derivative_int(&s))
            .map(|v| v.into_iter().map(BigInt::from).collect())
            .unwrap_or_else(|| log_derivative_int(&big).unwrap());
        ints.into_iter().map(Rational::from_integer).collect()
    } else {
        let mut c = vec![Rational::zero(); len];
        for n in 1..len {
            let mut s = &a[n] * r(n as i64);
            for k in 1..n {
                if !a[n - k].is_zero() {
                    s -= &c[k] * &a[n - k];
                }
            }
            c[n] = s;
        }
        c
    };
    let mut entries = Vec::with_capacity(window);
    for n in 1..len {
        let mut s = Rational::zero();
        for k in 1..=n {
            if n % k == 0 {
                let mu = mobius(n / k);
                if mu != 0 {
                    s += r(mu) * &c[k];
                }
            }
        }
        entries.push(s / r(n as i64));
    }
    Ok(ProductExponents { entries, scale: d, normalization: Monomial::new(lead, rat(v, d)) })
}

/// Smallest `p ≤ max_period` with `e_{n+p} = e_n` for all `n ≥ max(1, tail_skip)`.
pub fn find_period(e: &ProductExponents, max_period: usize, tail_skip: usize) -> Result<Option<usize>> {
    let n = e.entries.len();
    let needed = tail_skip + 2 * max_period;
    if n < needed {
        return Err(Error::WindowTooSmall { available: n, needed });
    }
    let start = tail_skip.max(1);
    let at = |i: usize| &e.entries[i - 1];
    for p in 1..=max_period {
        if (start..=n - p).all(|i| at(i + p) == at(i)) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// One period of exponents indexed by residue `1, …, p` (the last entry is residue 0),
/// read from the periodic part of the window.
pub fn period_pattern(e: &ProductExponents, p: usize, tail_skip: usize) -> Vec<Rational> {
    let start = tail_skip.max(1);
    (1..=p)
        .map(|res| {
            let i = start + (res as i64 - start as i64).rem_euclid(p as i64) as usize;
            e.entries[i - 1].clone()
        })
        .collect()
}

/// Expresses a symmetric integer exponent pattern (period `p` in `q^(1/scale)`)
/// as an eta quotient and returns it with its `C`.
///
/// Residues `±r` with `r < p/2` give `(J_{r,p}/J_p)^(-e_r)`, the middle residue
/// gives `(J_{p/2}/J_p)^(-e)` and residue 0 gives `J_p^(-e_0)`.
pub fn fit_c(pattern: &[Rational], scale: i64) -> Option<(EtaQuotientSpec, Rational)> {
    let p = pattern.len();
    if p == 0 {
        return Some((EtaQuotientSpec::new(), Rational::zero()));
    }
    let e = |res: usize| -> &Rational { &pattern[(res + p - 1) % p] };
    if pattern.iter().any(|x| !x.is_integer()) {
        return None;
    }
    if (1..p).any(|res| e(res) != e(p - res)) {
        return None;
    }
    let ei = |res: usize| e(res).to_integer().to_i64().expect("fits");
    let d = r(scale);
    let mut spec = EtaQuotientSpec::new();
    let mut jp = -ei(0);
    for res in 1..p {
        if 2 * res > p {
            break;
        }
        let x = ei(res);
        if x == 0 {
            continue;
        }
        if 2 * res == p {
            spec.pure.push(PureFactor { m: r(res as i64) / &d, exp: -x });
        } else {
            spec.general.push(GeneralFactor {
                a: r(res as i64) / &d,
                m: r(p as i64) / &d,
                exp: -x,
                barred: false,
            });
        }
        jp += x;
    }
    if jp != 0 {
        spec.pure.push(PureFactor { m: r(p as i64) / &d, exp: jp });
    }
    let (c, _) = prefactor_c(&spec).ok()?;
    Some((spec, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::pochhammer_infinite;

    fn rr1() -> EtaQuotientSpec {
        EtaQuotientSpec::new().j(5, 1).jam(1, 5, -1)
    }

    #[test]
    fn rogers_ramanujan_product_expansion() {
        let f = expand_eta_quotient(&EtaQuotientSpec::new().jam(1, 5, -1), &int(5)).unwrap();
        assert_eq!(f, QSeries::from_ints(&[1, 1, 1, 1, 2], Some(5)));
        let g = expand_eta_quotient(&rr1(), &int(12)).unwrap();
        assert_eq!(g, QSeries::from_ints(&[1, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6, 7], Some(12)));
    }

    #[test]
    fn j13_is_euler_product() {
        let f = expand_eta_quotient(&EtaQuotientSpec::new().jam(1, 3, 1), &int(40)).unwrap();
        let g = pochhammer_infinite(&Monomial::q(int(1)), &int(1), &int(40)).unwrap();
        assert_eq!(f, g);
        assert_eq!(expand_eta_quotient(&EtaQuotientSpec::new(), &int(9)).unwrap(), QSeries::one().truncate(&int(9)));
    }

    #[test]
    fn rr_prefactors() {
        assert_eq!(prefactor_c(&rr1()).unwrap().0, rat(-1, 60));
        let rr2 = EtaQuotientSpec::new().j(5, 1).jam(2, 5, -1);
        assert_eq!(prefactor_c(&rr2).unwrap().0, rat(11, 60));
        assert_eq!(prefactor_c(&EtaQuotientSpec::new().j(1, 1)).unwrap(), (rat(1, 24), rat(1, 2)));
    }

    #[test]
    fn normalization_moves_monomials() {
        // J_{6,5} = -q^{-1} J_{1,5}, Jbar_{-1,4} = q^{-1}... checked against products
        for (a, m, barred) in [(6, 5, false), (-1, 4, true), (7, 3, true), (-4, 3, false), (0, 2, true)] {
            let spec = EtaQuotientSpec {
                general: vec![GeneralFactor { a: int(a), m: int(m), exp: 1, barred }],
                ..Default::default()
            };
            let got = expand_eta_quotient(&spec, &int(30)).unwrap();
            let sign = if barred { -1 } else { 1 };
            let want = pochhammer_infinite(&Monomial::of(sign, a, 1), &int(m), &int(40))
                .unwrap()
                .mul(&pochhammer_infinite(&Monomial::of(sign, m - a, 1), &int(m), &int(40)).unwrap())
                .mul(&pochhammer_infinite(&Monomial::q(int(m)), &int(m), &int(40)).unwrap());
            assert!(got.agrees_with(&want), "J({a},{m}) barred={barred}");
        }
    }

    #[test]
    fn j0m_vanishes() {
        let zero = EtaQuotientSpec::new().jam(0, 3, 1);
        assert!(expand_eta_quotient(&zero, &int(10)).unwrap().is_zero());
        assert!(expand_eta_quotient(&zero.inverse(), &int(10)).is_err());
    }

    #[test]
    fn recognize_rr_and_euler() {
        let f = expand_eta_quotient(&rr1(), &int(60)).unwrap();
        let e = recognize_product(&f, 50).unwrap();
        for (i, x) in e.entries.iter().enumerate() {
            let n = i + 1;
            let want = if n % 5 == 1 || n % 5 == 4 { 1 } else { 0 };
            assert_eq!(*x, int(want), "e_{n}");
        }
        assert_eq!(find_period(&e, 20, 0).unwrap(), Some(5));
        let pat = period_pattern(&e, 5, 10);
        assert_eq!(pat, vec![int(1), int(0), int(0), int(1), int(0)]);
        let (spec, c) = fit_c(&pat, 1).unwrap();
        assert_eq!(c, rat(-1, 60));
        assert!(expand_eta_quotient(&spec, &int(60)).unwrap().agrees_with(&f));

        let one = recognize_product(&QSeries::one().truncate(&int(30)), 20).unwrap();
        assert!(one.entries.iter().all(|x| x.is_zero()));
        assert_eq!(find_period(&one, 5, 0).unwrap(), Some(1));
        let euler = pochhammer_infinite(&Monomial::q(int(1)), &int(1), &int(30)).unwrap();
        let e = recognize_product(&euler, 25).unwrap();
        assert!(e.entries.iter().all(|x| *x == int(-1)));
        assert!(matches!(recognize_product(&QSeries::zero_to(&int(3)), 2), Err(Error::ZeroSeries)));
    }

    #[test]
    fn window_checks() {
        let f = expand_eta_quotient(&rr1(), &int(20)).unwrap();
        assert!(matches!(recognize_product(&f, 40), Err(Error::WindowTooSmall { .. })));
        let e = recognize_product(&f, 19).unwrap();
        assert!(matches!(find_period(&e, 10, 0), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn fit_handles_trivial_and_asymmetric() {
        assert_eq!(fit_c(&[int(0)], 1).unwrap().1, int(0));
        assert!(fit_c(&[int(1), int(0), int(0), int(0), int(0)], 1).is_none());
        assert!(fit_c(&[rat(1, 2), int(0), rat(1, 2), int(0)], 1).is_none());
    }

    #[test]
    fn barred_identity_to_150() {
        for (a, m) in [(1, 4), (2, 5), (1, 6), (3, 7)] {
            let lhs = EtaQuotientSpec::new().jbar(a, m, 1).jam(a, m, 1).j(2 * m, 1);
            let rhs = EtaQuotientSpec::new().j(m, 2).jam(2 * a, 2 * m, 1);
            let o = int(150);
            assert_eq!(expand_eta_quotient(&lhs, &o).unwrap(), expand_eta_quotient(&rhs, &o).unwrap());
        }
    }

    #[test]
    fn fractional_parameters() {
        // J_{1/2} = (q^(1/2); q^(1/2))_inf
        let f = expand_eta_quotient(&EtaQuotientSpec { pure: vec![PureFactor { m: rat(1, 2), exp: 1 }], ..Default::default() }, &int(5)).unwrap();
        let g = pochhammer_infinite(&Monomial::q(int(1)), &int(1), &int(10)).unwrap().substitute_power(&rat(1, 2));
        assert_eq!(f, g);
    }
}
