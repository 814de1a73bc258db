//! Declarative q-series expressions and two-sided identities.
//!
//! An [`Expr`] describes a series (Nahm sum, eta quotient, theta sum, single
//! q-hypergeometric sum, infinite Pochhammer product) and combinations of
//! those. Expressions serialize to JSON, so an identity can be stored in a
//! file and checked with [`Identity::verify`].

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eta::{expand_eta_quotient, EtaQuotientSpec};
use crate::nahm::{eval_nahm, NahmTriple, TripleFile};
use crate::rational::{self, fmt_rational, int, Rational};
use crate::series::{pochhammer_infinite, recip_to, theta_jtp, Mismatch, Monomial, QSeries};

/// `(a; q^base)_{mult·n + shift}^exp` inside a single sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PochFactor {
    pub a: Monomial,
    #[serde(with = "rational::serde_rational")]
    pub base: Rational,
    pub mult: u32,
    pub shift: u32,
    pub exp: i32,
}

/// `(a; q^base)_∞^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteFactor {
    pub a: Monomial,
    #[serde(with = "rational::serde_rational")]
    pub base: Rational,
    pub exp: i32,
}

/// `Σ_{n≥0} q^(quad·n² + lin·n) · arg^n · ∏ factors`.
///
/// The `rφs` shape is available through [`HypergeomSumSpec::phi`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergeomSumSpec {
    #[serde(with = "rational::serde_rational")]
    pub quad: Rational,
    #[serde(with = "rational::serde_rational")]
    pub lin: Rational,
    pub arg: Monomial,
    pub factors: Vec<PochFactor>,
}

const MAX_TERMS: usize = 100_000;

impl HypergeomSumSpec {
    pub fn new(quad: Rational, lin: Rational) -> Self {
        HypergeomSumSpec { quad, lin, arg: Monomial::one(), factors: Vec::new() }
    }

    pub fn arg(mut self, z: Monomial) -> Self {
        self.arg = z;
        self
    }

    /// Multiplies in `(a; q^base)_{mult·n+shift}^exp`.
    pub fn poch(mut self, a: Monomial, base: Rational, mult: u32, shift: u32, exp: i32) -> Self {
        self.factors.push(PochFactor { a, base, mult, shift, exp });
        self
    }

    /// `rφs(num; den; q, z)` with weight `((-1)^n q^(n(n-1)/2))^(1+s-r)`.
    pub fn phi(num: &[Monomial], den: &[Monomial], z: Monomial) -> Self {
        let t = 1 + den.len() as i64 - num.len() as i64;
        let half = rational::rat(t, 2);
        let sign = if t % 2 == 0 { Monomial::one() } else { Monomial::constant(-Rational::one()) };
        let mut s = HypergeomSumSpec::new(half.clone(), -half).arg(z.mul(&sign));
        for a in num {
            s = s.poch(a.clone(), int(1), 1, 0, 1);
        }
        for b in den {
            s = s.poch(b.clone(), int(1), 1, 0, -1);
        }
        s.poch(Monomial::q(int(1)), int(1), 1, 0, -1)
    }

    fn eval(&self, order: &Rational) -> Result<QSeries> {
        let mut state: Vec<FactorState> = self.factors.iter().map(FactorState::new).collect();
        let mut acc = QSeries::zero_to(order);
        let mut above = 0;
        let mut last: Option<Rational> = None;
        for n in 0..MAX_TERMS as u64 {
            let mut val = &self.quad * int(n as i64) * int(n as i64) + &self.lin * int(n as i64);
            val += &self.arg.exp * int(n as i64);
            let mut vanished = false;
            for (s, f) in state.iter_mut().zip(&self.factors) {
                s.extend_to((f.mult as u64) * n + f.shift as u64, f, order)?;
                match &s.val {
                    Some(v) => val += v * int(f.exp as i64),
                    None => vanished = true,
                }
            }
            if vanished {
                return Ok(acc);
            }
            if &val < order {
                above = 0;
                let mut term = QSeries::monomial(&Monomial::new(
                    self.arg.coeff.pow(n as i32),
                    &self.quad * int(n as i64) * int(n as i64) + &self.lin * int(n as i64) + &self.arg.exp * int(n as i64),
                ));
                for (s, f) in state.iter().zip(&self.factors) {
                    term = term.mul(&s.power(f.exp)?).truncate(order);
                }
                acc = acc.add(&term);
            } else {
                let rising = last.as_ref().is_none_or(|l| &val > l);
                above = if rising { above + 1 } else { 0 };
                if above >= 2 {
                    return Ok(acc);
                }
            }
            last = Some(val);
        }
        Err(Error::Divergent(format!("single sum still below q^{} after {MAX_TERMS} terms", fmt_rational(order))))
    }
}

/// Running `(a; q^base)_len` or its reciprocal, with its exact valuation.
struct FactorState {
    len: u64,
    series: QSeries,
    val: Option<Rational>,
}

impl FactorState {
    fn new(_: &PochFactor) -> Self {
        FactorState { len: 0, series: QSeries::one(), val: Some(Rational::zero()) }
    }

    fn extend_to(&mut self, len: u64, f: &PochFactor, order: &Rational) -> Result<()> {
        while self.len < len {
            let m = f.a.times_q(&(&f.base * int(self.len as i64)));
            self.len += 1;
            let binom = QSeries::one().sub(&QSeries::monomial(&m));
            let Some(v) = binom.valuation() else {
                if f.exp < 0 {
                    return Err(Error::DivisionByZeroSeries(format!("1 - {m} in a denominator")));
                }
                self.val = None;
                self.series = QSeries::zero();
                continue;
            };
            let Some(total) = self.val.as_mut() else { continue };
            *total += &v;
            self.series = if f.exp > 0 {
                self.series.mul(&binom).truncate(order)
            } else {
                self.series.mul(&recip_to(&binom, order)?).truncate(order)
            };
        }
        Ok(())
    }

    fn power(&self, exp: i32) -> Result<QSeries> {
        Ok(self.series.pow(exp.unsigned_abs()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expr {
    /// A single monomial.
    Mono { m: Monomial },
    /// `f_{A,B,C}(q^substitute)`.
    Nahm {
        triple: TripleFile,
        #[serde(with = "rational::serde_rational")]
        substitute: Rational,
    },
    Eta { spec: EtaQuotientSpec },
    /// `Σ_{n∈ℤ} (-1)^n q^(base·n(n-1)/2) z^n`.
    Theta {
        z: Monomial,
        #[serde(with = "rational::serde_rational")]
        base: Rational,
    },
    /// `Σ_{n∈ℤ} (c0 + c1·n) q^(quad·n² + lin·n)`.
    Bilateral {
        #[serde(with = "rational::serde_rational")]
        quad: Rational,
        #[serde(with = "rational::serde_rational")]
        lin: Rational,
        #[serde(with = "rational::serde_rational_vec")]
        poly: Vec<Rational>,
    },
    Product { factors: Vec<InfiniteFactor> },
    Sum { spec: HypergeomSumSpec },
    /// Terms of `inner` with exponent `≡ residue (mod modulus)`.
    Dissect { inner: Box<Expr>, modulus: i64, residue: i64 },
    /// `inner(q^power)`.
    Substitute {
        #[serde(with = "rational::serde_rational")]
        power: Rational,
        inner: Box<Expr>,
    },
    Scale { by: Monomial, inner: Box<Expr> },
    Add { terms: Vec<Expr> },
    Mul { factors: Vec<Expr> },
}

impl Expr {
    pub fn mono(m: Monomial) -> Expr {
        Expr::Mono { m }
    }

    pub fn nahm(t: &NahmTriple, substitute: Rational) -> Expr {
        Expr::Nahm { triple: t.to_file(), substitute }
    }

    pub fn eta(spec: EtaQuotientSpec) -> Expr {
        Expr::Eta { spec }
    }

    /// `Σ_{n∈ℤ} q^(quad·n² + lin·n)` through the triple product.
    pub fn theta_sum(quad: Rational, lin: Rational) -> Expr {
        let z = Monomial::new(-Rational::one(), &quad + &lin);
        Expr::Theta { z, base: quad * int(2) }
    }

    pub fn product(factors: &[(Monomial, Rational, i32)]) -> Expr {
        Expr::Product {
            factors: factors.iter().map(|(a, b, e)| InfiniteFactor { a: a.clone(), base: b.clone(), exp: *e }).collect(),
        }
    }

    pub fn sum(spec: HypergeomSumSpec) -> Expr {
        Expr::Sum { spec }
    }

    pub fn dissect(self, modulus: i64, residue: i64) -> Expr {
        Expr::Dissect { inner: Box::new(self), modulus, residue }
    }

    pub fn substitute(self, power: Rational) -> Expr {
        Expr::Substitute { power, inner: Box::new(self) }
    }

    pub fn scale(self, by: Monomial) -> Expr {
        Expr::Scale { by, inner: Box::new(self) }
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        Expr::Add { terms }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        Expr::Mul { factors }
    }

    /// Series exact below `order`, re-evaluating with a larger working order
    /// when negative valuations eat into the bound.
    pub fn build(&self, order: &Rational) -> Result<QSeries> {
        let mut work = order.clone();
        for _ in 0..8 {
            let s = self.eval(&work)?;
            match s.order() {
                None => return Ok(s.truncate(order)),
                Some(h) if &h >= order => return Ok(s.truncate(order)),
                Some(h) => work = &work + (order - h) + int(1),
            }
        }
        Err(Error::NonTruncating("expression loses its bound on every retry".into()))
    }

    fn eval(&self, order: &Rational) -> Result<QSeries> {
        match self {
            Expr::Mono { m } => Ok(QSeries::monomial(m).truncate(order)),
            Expr::Nahm { triple, substitute } => {
                if !substitute.is_positive() {
                    return Err(Error::Parse("substitution power must be positive".into()));
                }
                let t = NahmTriple::new(triple.a.clone(), triple.b.clone(), triple.c.clone())?;
                Ok(eval_nahm(&t, &(order / substitute))?.substitute_power(substitute))
            }
            Expr::Eta { spec } => expand_eta_quotient(spec, order),
            Expr::Theta { z, base } => {
                if z.is_zero() {
                    return Err(Error::Parse("theta needs a nonzero z".into()));
                }
                theta_jtp(z, base, order)
            }
            Expr::Bilateral { quad, lin, poly } => bilateral(quad, lin, poly, order),
            Expr::Product { factors } => {
                let mut acc = QSeries::one().truncate(order);
                for f in factors {
                    if !f.base.is_positive() {
                        return Err(Error::Divergent("product base must be positive".into()));
                    }
                    let p = pochhammer_infinite(&f.a, &f.base, order)?;
                    let p = if f.exp < 0 { recip_to(&p, order)? } else { p };
                    acc = acc.mul(&p.pow(f.exp.unsigned_abs())).truncate(order);
                }
                Ok(acc)
            }
            Expr::Sum { spec } => spec.eval(order),
            Expr::Dissect { inner, modulus, residue } => {
                if *modulus <= 0 {
                    return Err(Error::Parse("dissection modulus must be positive".into()));
                }
                Ok(inner.eval(order)?.dissect(*modulus, *residue))
            }
            Expr::Substitute { power, inner } => {
                if !power.is_positive() {
                    return Err(Error::Parse("substitution power must be positive".into()));
                }
                Ok(inner.eval(&(order / power))?.substitute_power(power))
            }
            Expr::Scale { by, inner } => {
                if by.is_zero() {
                    return Ok(QSeries::zero_to(order));
                }
                Ok(inner.eval(&(order - &by.exp))?.mul_monomial(by))
            }
            Expr::Add { terms } => {
                let mut acc = QSeries::zero_to(order);
                for t in terms {
                    acc = acc.add(&t.eval(order)?);
                }
                Ok(acc)
            }
            Expr::Mul { factors } => {
                let mut acc = QSeries::one().truncate(order);
                for f in factors {
                    acc = acc.mul(&f.eval(order)?).truncate(order);
                }
                Ok(acc)
            }
        }
    }
}

fn bilateral(quad: &Rational, lin: &Rational, poly: &[Rational], order: &Rational) -> Result<QSeries> {
    if !quad.is_positive() {
        return Err(Error::Divergent("bilateral sum needs a positive quadratic coefficient".into()));
    }
    let exp = |n: i64| quad * int(n) * int(n) + lin * int(n);
    let coeff = |n: i64| poly.iter().rev().fold(Rational::zero(), |acc, c| acc * int(n) + c);
    let vertex = rational::floor_i64(&(-lin / (quad * int(2))));
    let mut terms = Vec::new();
    for dir in [1i64, -1] {
        let mut n = if dir > 0 { vertex } else { vertex - 1 };
        loop {
            let e = exp(n);
            if &e >= order && (n - vertex).abs() > 1 {
                break;
            }
            if &e < order {
                terms.push(QSeries::monomial(&Monomial::new(coeff(n), e)));
            }
            n += dir;
        }
    }
    Ok(QSeries::sum_all(&terms).truncate(order))
}

/// `lhs = rhs` as formal series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identity {
    pub lhs: Expr,
    pub rhs: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Mismatch(Mismatch),
    Failed(String),
}

/// Result of comparing both sides below `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub key: String,
    pub order: Rational,
    pub outcome: Outcome,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = fmt_rational(&self.order);
        match &self.outcome {
            Outcome::Pass => write!(f, "{} PASS order={order}", self.key),
            Outcome::Mismatch(m) => write!(
                f,
                "{} FAIL order={order} exponent={} lhs={} rhs={}",
                self.key,
                fmt_rational(&m.exp),
                fmt_rational(&m.left),
                fmt_rational(&m.right)
            ),
            Outcome::Failed(e) => write!(f, "{} ERROR order={order} {e}", self.key),
        }
    }
}

#[derive(Deserialize)]
struct IdentityFile {
    name: Option<String>,
    lhs: Expr,
    rhs: Expr,
}

impl Identity {
    pub fn new(lhs: Expr, rhs: Expr) -> Self {
        Identity { lhs, rhs }
    }

    pub fn build_side(&self, side: Side, order: &Rational) -> Result<QSeries> {
        match side {
            Side::Lhs => self.lhs.build(order),
            Side::Rhs => self.rhs.build(order),
        }
    }

    /// Compares both sides below `order`; errors become `Outcome::Failed`.
    pub fn verify(&self, key: &str, order: &Rational) -> VerifyReport {
        let outcome = match (self.lhs.build(order), self.rhs.build(order)) {
            (Ok(l), Ok(r)) => match l.first_mismatch(&r) {
                None => Outcome::Pass,
                Some(m) => Outcome::Mismatch(m),
            },
            (Err(e), _) | (_, Err(e)) => Outcome::Failed(e.to_string()),
        };
        VerifyReport { key: key.to_string(), order: order.clone(), outcome }
    }

    /// The same identity with `m` added to the right side.
    pub fn perturbed(&self, m: Monomial) -> Identity {
        Identity { lhs: self.lhs.clone(), rhs: Expr::add(vec![self.rhs.clone(), Expr::mono(m)]) }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("identity serializes")
    }

    /// Parses `{"name"?: …, "lhs": …, "rhs": …}`.
    pub fn from_json(s: &str) -> Result<(Option<String>, Identity)> {
        let f: IdentityFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Ok((f.name, Identity { lhs: f.lhs, rhs: f.rhs }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lhs" => Ok(Side::Lhs),
            "rhs" => Ok(Side::Rhs),
            _ => Err(Error::Parse(format!("side must be lhs or rhs, got '{s}'"))),
        }
    }
}

/// Integer value of a rational parameter, for eta indices.
pub fn index(r: &Rational) -> Result<i64> {
    if !r.is_integer() {
        return Err(Error::InvalidBinding(format!("{} is not an integer index", fmt_rational(r))));
    }
    r.to_integer().to_i64().ok_or_else(|| Error::InvalidBinding("index overflows".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn q(e: i64) -> Monomial {
        Monomial::q(int(e))
    }

    #[test]
    fn single_sum_matches_euler() {
        let lhs = Expr::sum(HypergeomSumSpec::new(int(0), int(0)).arg(q(1)).poch(q(1), int(1), 1, 0, -1));
        let rhs = Expr::product(&[(q(1), int(1), -1)]);
        let id = Identity::new(lhs, rhs);
        assert!(id.verify("euler", &int(40)).passed());
    }

    #[test]
    fn phi_shape_weights() {
        let s = HypergeomSumSpec::phi(&[], &[], Monomial::new(-Rational::one(), int(1)));
        assert_eq!(s.quad, rat(1, 2));
        assert_eq!(s.lin, rat(-1, 2));
        assert_eq!(s.arg, q(1));
    }

    #[test]
    fn bilateral_matches_theta() {
        let a = Expr::Bilateral { quad: rat(3, 2), lin: rat(1, 2), poly: vec![int(1)] }.build(&int(60)).unwrap();
        let b = Expr::theta_sum(rat(3, 2), rat(1, 2)).build(&int(60)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coeff(&int(0)), int(1));
        assert_eq!(a.coeff(&int(1)), int(1));
        assert_eq!(a.coeff(&int(2)), int(1));
    }

    #[test]
    fn negative_valuation_rebuilds() {
        let e = Expr::mul(vec![Expr::mono(Monomial::q(int(-3))), Expr::product(&[(q(1), int(1), -1)])]);
        let s = e.build(&int(10)).unwrap();
        assert_eq!(s.order(), Some(int(10)));
        assert_eq!(s.coeff(&int(9)), int(77));
    }

    #[test]
    fn vanishing_numerator_stops() {
        let s = HypergeomSumSpec::new(int(0), int(0))
            .arg(q(1))
            .poch(Monomial::q(int(-1)), int(1), 1, 0, 1)
            .poch(q(1), int(1), 1, 0, -1);
        let f = Expr::sum(s).build(&int(20)).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let id = Identity::new(
            Expr::sum(HypergeomSumSpec::phi(&[q(2)], &[q(3)], q(1))),
            Expr::eta(EtaQuotientSpec::new().j(5, 1).jam(1, 5, -1)).scale(Monomial::of(2, 1, 3)),
        );
        let (_, back) = Identity::from_json(&id.to_json()).unwrap();
        assert_eq!(back, id);
    }
}
