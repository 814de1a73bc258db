//! Bailey pairs as finite sequences of truncated series.
//!
//! A pair relative to `a` in base `Q = q^base` satisfies
//! `β_n = Σ_{k≤n} α_k / ((Q;Q)_{n-k} (aQ;Q)_{n+k})`. Every transform here takes
//! a pair to another pair exactly, so the defining relation can be rechecked on
//! the output at any point.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, Rational};
use crate::series::{pochhammer_infinite, recip_to, Mismatch, Monomial, QSeries};

/// A Bailey lemma parameter: a monomial or the limit `ρ → ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rho {
    Finite(Monomial),
    Infinity,
}

#[derive(Clone, Debug)]
pub struct BaileySeqPair {
    pub a: Monomial,
    pub base: Rational,
    pub alpha: Vec<QSeries>,
    pub beta: Vec<QSeries>,
    /// Working truncation shared by every entry.
    pub order: Rational,
}

/// Both sides of a limiting identity and where they first disagree.
#[derive(Clone, Debug)]
pub struct LimitReport {
    pub lhs: QSeries,
    pub rhs: QSeries,
    pub order: Rational,
    pub mismatch: Option<Mismatch>,
}

impl LimitReport {
    fn new(lhs: QSeries, rhs: QSeries, order: &Rational) -> Self {
        let lhs = lhs.truncate(order);
        let rhs = rhs.truncate(order);
        let mismatch = lhs.first_mismatch(&rhs);
        LimitReport { lhs, rhs, order: order.clone(), mismatch }
    }

    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// `1/f` known below `order`; an exact polynomial is truncated far enough first.
fn recip(f: &QSeries, order: &Rational, what: &str) -> Result<QSeries> {
    recip_to(f, order).map_err(|e| match e {
        Error::DivisionByZeroSeries(_) => Error::DivisionByZeroSeries(what.to_string()),
        e => e,
    })
}

fn mul_to(f: &QSeries, g: &QSeries, order: &Rational) -> QSeries {
    f.mul(g).truncate(order)
}

/// `(x;Q)_j` for `j = 0..=n`, exact.
fn poch_table(x: &Monomial, base: &Rational, n: usize) -> Vec<QSeries> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = QSeries::one();
    out.push(acc.clone());
    for j in 0..n {
        let f = QSeries::one().sub(&QSeries::monomial(&x.times_q(&(base * int(j as i64)))));
        acc = acc.mul(&f);
        out.push(acc.clone());
    }
    out
}

/// `1/(x;Q)_j` for `j = 0..=n` below `order`.
fn recip_poch_table(x: &Monomial, base: &Rational, n: usize, order: &Rational) -> Result<Vec<QSeries>> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = QSeries::one().truncate(order);
    out.push(acc.clone());
    for j in 0..n {
        let xj = x.times_q(&(base * int(j as i64)));
        let f = QSeries::one().sub(&QSeries::monomial(&xj));
        let r = recip(&f, order, &format!("1 - {xj}"))?;
        acc = mul_to(&acc, &r, order);
        out.push(acc.clone());
    }
    Ok(out)
}

fn q_of(base: &Rational, k: i64) -> Monomial {
    Monomial::q(base * int(k))
}

/// Builds β from α by the defining relation for `n ≤ n_max`; missing α entries are zero.
pub fn beta_from_alpha(
    alpha: &[QSeries],
    a: &Monomial,
    base: &Rational,
    n_max: usize,
    order: &Rational,
) -> Result<BaileySeqPair> {
    assert!(base.is_positive(), "base must be positive");
    let alpha: Vec<QSeries> = (0..=n_max)
        .map(|n| alpha.get(n).cloned().unwrap_or_else(QSeries::zero))
        .collect();
    let qq = recip_poch_table(&q_of(base, 1), base, n_max, order)?;
    let aq = recip_poch_table(&a.times_q(base), base, 2 * n_max, order)?;
    let mut beta = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut parts = Vec::with_capacity(n + 1);
        for (k, ak) in alpha.iter().enumerate().take(n + 1) {
            if ak.is_zero() && ak.is_exact() {
                continue;
            }
            let w = mul_to(&qq[n - k], &aq[n + k], order);
            parts.push(mul_to(ak, &w, order));
        }
        beta.push(QSeries::sum_all(&parts).truncate(order));
    }
    Ok(BaileySeqPair { a: a.clone(), base: base.clone(), alpha, beta, order: order.clone() })
}

impl BaileySeqPair {
    pub fn n_max(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `Q = q^base` as a monomial power.
    pub fn q_pow(&self, k: i64) -> Monomial {
        q_of(&self.base, k)
    }

    /// Recomputes β from α and reports the first index where the stored β differs.
    pub fn defining_relation_mismatch(&self) -> Result<Option<(usize, Mismatch)>> {
        let fresh = beta_from_alpha(&self.alpha, &self.a, &self.base, self.n_max(), &self.order)?;
        Ok(fresh
            .beta
            .iter()
            .zip(&self.beta)
            .enumerate()
            .find_map(|(n, (x, y))| y.first_mismatch(x).map(|m| (n, m))))
    }

    pub fn satisfies_defining_relation(&self) -> Result<bool> {
        Ok(self.defining_relation_mismatch()?.is_none())
    }

    /// Weight `(aQ/ρ₁ρ₂)^n`, with an infinite `ρ` contributing `(-1)^n Q^{n(n-1)/2}`.
    fn lemma_weight(&self, rho: [&Rho; 2], n: i64) -> Monomial {
        let mut w = self.a.times_q(&self.base).pow(n);
        for r in rho {
            w = match r {
                Rho::Finite(m) => w.div(&m.pow(n)),
                Rho::Infinity => {
                    let s = if n % 2 == 0 { Monomial::one() } else { Monomial::one().neg() };
                    w.mul(&s).mul(&self.q_pow(n * (n - 1) / 2))
                }
            };
        }
        w
    }

    fn lemma_tables(&self, rho: [&Rho; 2], len: usize) -> Result<LemmaTables> {
        let order = &self.order;
        let n = self.n_max();
        let mut num = vec![QSeries::one(); n + 1];
        let mut den = vec![QSeries::one().truncate(order); n + 1];
        let mut inv_den_inf = Vec::new();
        for r in rho {
            if let Rho::Finite(m) = r {
                let p = poch_table(m, &self.base, n);
                let x = self.a.times_q(&self.base).div(m);
                let d = recip_poch_table(&x, &self.base, n, order)?;
                for j in 0..=n {
                    num[j] = num[j].mul(&p[j]);
                    den[j] = mul_to(&den[j], &d[j], order);
                }
                inv_den_inf.push(x);
            }
        }
        let both = match rho {
            [Rho::Finite(r1), Rho::Finite(r2)] => Some(self.a.times_q(&self.base).div(&r1.mul(r2))),
            _ => None,
        };
        let tail = match &both {
            Some(x) => poch_table(x, &self.base, len),
            None => vec![QSeries::one(); len + 1],
        };
        Ok(LemmaTables { num, den, tail, finite_x: inv_den_inf, both })
    }

    /// The pair `(α', β')` of Bailey's lemma with parameters `ρ₁, ρ₂`.
    pub fn apply_bailey_lemma(&self, rho1: &Rho, rho2: &Rho) -> Result<BaileySeqPair> {
        let order = &self.order;
        let n = self.n_max();
        let rho = [rho1, rho2];
        let t = self.lemma_tables(rho, n)?;
        let qq = recip_poch_table(&self.q_pow(1), &self.base, n, order)?;
        let w: Vec<Monomial> = (0..=n as i64).map(|k| self.lemma_weight(rho, k)).collect();
        let scaled: Vec<QSeries> = (0..=n).map(|k| t.num[k].mul_monomial(&w[k])).collect();
        let alpha = (0..=n)
            .map(|k| mul_to(&mul_to(&scaled[k], &t.den[k], order), &self.alpha[k], order))
            .collect();
        let mut beta = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut parts = Vec::with_capacity(m + 1);
            for k in 0..=m {
                let c = mul_to(&t.tail[m - k], &qq[m - k], order);
                parts.push(mul_to(&mul_to(&scaled[k], &c, order), &self.beta[k], order));
            }
            beta.push(mul_to(&QSeries::sum_all(&parts), &t.den[m], order));
        }
        Ok(BaileySeqPair { a: self.a.clone(), base: self.base.clone(), alpha, beta, order: order.clone() })
    }

    /// The S1 transform, Bailey's lemma with both parameters at infinity.
    pub fn s1(&self) -> Result<BaileySeqPair> {
        self.apply_bailey_lemma(&Rho::Infinity, &Rho::Infinity)
    }

    /// The `n → ∞` form of Bailey's lemma, multiplied through by `(Q;Q)_∞`:
    /// `(aQ/ρ₁ρ₂;Q)_∞ Σ (ρ₁,ρ₂;Q)_k w_k β_k` against
    /// `(aQ/ρ₁,aQ/ρ₂;Q)_∞/(aQ;Q)_∞ Σ (ρ₁,ρ₂;Q)_r w_r α_r/(aQ/ρ₁,aQ/ρ₂;Q)_r`.
    pub fn lemma_limit(&self, rho1: &Rho, rho2: &Rho, order: &Rational) -> Result<LimitReport> {
        let rho = [rho1, rho2];
        self.check_length(&self.lemma_weight(rho, self.n_max() as i64 + 1), order)?;
        let pair = self.at_order(order);
        let n = pair.n_max();
        let t = pair.lemma_tables(rho, 0)?;
        let mut lhs_parts = Vec::new();
        let mut rhs_parts = Vec::new();
        for k in 0..=n {
            let s = t.num[k].mul_monomial(&pair.lemma_weight(rho, k as i64));
            lhs_parts.push(mul_to(&s, &pair.beta[k], order));
            rhs_parts.push(mul_to(&mul_to(&s, &t.den[k], order), &pair.alpha[k], order));
        }
        let mut lhs = QSeries::sum_all(&lhs_parts);
        if let Some(x) = &t.both {
            lhs = mul_to(&lhs, &infinite_product(x, &pair.base, order)?, order);
        }
        let mut rhs = QSeries::sum_all(&rhs_parts);
        for x in &t.finite_x {
            rhs = mul_to(&rhs, &infinite_product(x, &pair.base, order)?, order);
        }
        let aq = infinite_product(&pair.a.times_q(&pair.base), &pair.base, order)?;
        rhs = mul_to(&rhs, &recip(&aq, order, "(aQ;Q)_inf")?, order);
        Ok(LimitReport::new(lhs, rhs, order))
    }

    /// Change of parameter `a → aQ` (the `b → 0` case); β is unchanged.
    pub fn shift_a_up(&self) -> Result<BaileySeqPair> {
        let order = &self.order;
        let n = self.n_max();
        let aq = self.a.times_q(&self.base);
        let one_minus = |m: &Monomial| QSeries::one().sub(&QSeries::monomial(m));
        let d = recip(&one_minus(&aq), order, "1 - aQ").map_err(|e| match e {
            Error::DivisionByZeroSeries(_) => Error::PoleAtUnit(0),
            other => other,
        })?;
        let mut alpha = Vec::with_capacity(n + 1);
        for m in 0..=n as i64 {
            let parts: Vec<QSeries> = (0..=m)
                .map(|r| {
                    let w = self.a.pow(m - r).mul(&self.q_pow(m * m - r * r));
                    self.alpha[r as usize].mul_monomial(&w)
                })
                .collect();
            let s = QSeries::sum_all(&parts);
            let f = one_minus(&self.a.times_q(&(&self.base * int(2 * m + 1))));
            alpha.push(mul_to(&mul_to(&f, &d, order), &s, order));
        }
        Ok(BaileySeqPair { a: aq, base: self.base.clone(), alpha, beta: self.beta.clone(), order: order.clone() })
    }

    /// Change of parameter `a → a/Q`; β is unchanged.
    pub fn shift_a_down(&self) -> Result<BaileySeqPair> {
        let order = &self.order;
        let n = self.n_max();
        let one_minus = |k: i64| QSeries::one().sub(&QSeries::monomial(&self.a.times_q(&(&self.base * int(k)))));
        let inv = |k: i64, n: usize| recip(&one_minus(k), order, "").map_err(|e| match e {
            Error::DivisionByZeroSeries(_) => Error::PoleAtUnit(n),
            other => other,
        });
        let c = one_minus(0);
        let mut alpha = Vec::with_capacity(n + 1);
        alpha.push(self.alpha[0].clone());
        for m in 1..=n {
            let k = 2 * m as i64;
            let first = mul_to(&self.alpha[m], &inv(k, m)?, order);
            let second = if m == 1 {
                self.alpha[0].mul_monomial(&self.a).truncate(order)
            } else {
                let prev = mul_to(&self.alpha[m - 1], &inv(k - 2, m - 1)?, order);
                mul_to(&c, &prev, order).mul_monomial(&self.a.times_q(&(&self.base * int(k - 2))))
            };
            alpha.push(mul_to(&c, &first, order).sub(&second).truncate(order));
        }
        let a = self.a.div(&self.q_pow(1));
        Ok(BaileySeqPair { a, base: self.base.clone(), alpha, beta: self.beta.clone(), order: order.clone() })
    }

    /// `Σ aⁿQ^{n²} β_n` against `(1/(aQ;Q)_∞) Σ aⁿQ^{n²} α_n` below `order`.
    pub fn limit_identity(&self, order: &Rational) -> Result<LimitReport> {
        let n = self.n_max() as i64 + 1;
        self.check_length(&self.a.pow(n).mul(&self.q_pow(n * n)), order)?;
        let pair = self.at_order(order);
        let w: Vec<Monomial> = (0..=pair.n_max() as i64)
            .map(|k| pair.a.pow(k).mul(&pair.q_pow(k * k)))
            .collect();
        let lhs = weighted_sum(&pair.beta, &w, order);
        let rhs = weighted_sum(&pair.alpha, &w, order);
        let aq = infinite_product(&pair.a.times_q(&pair.base), &pair.base, order)?;
        let rhs = mul_to(&rhs, &recip(&aq, order, "(aQ;Q)_inf")?, order);
        Ok(LimitReport::new(lhs, rhs, order))
    }

    /// The weight of the first omitted index must lie at or past `order`.
    fn check_length(&self, first_omitted: &Monomial, order: &Rational) -> Result<()> {
        if first_omitted.is_zero() || &first_omitted.exp >= order {
            Ok(())
        } else {
            Err(Error::InsufficientLength { len: self.alpha.len(), order: fmt_rational(order) })
        }
    }

    fn at_order(&self, order: &Rational) -> BaileySeqPair {
        if order <= &self.order {
            return self.clone();
        }
        let mut p = self.clone();
        p.order = order.clone();
        p
    }
}

struct LemmaTables {
    /// `(ρ₁;Q)_j (ρ₂;Q)_j` over the finite parameters.
    num: Vec<QSeries>,
    /// `1/((aQ/ρ₁;Q)_j (aQ/ρ₂;Q)_j)` over the finite parameters.
    den: Vec<QSeries>,
    /// `(aQ/ρ₁ρ₂;Q)_j` when both are finite, else 1.
    tail: Vec<QSeries>,
    finite_x: Vec<Monomial>,
    both: Option<Monomial>,
}

fn weighted_sum(v: &[QSeries], w: &[Monomial], order: &Rational) -> QSeries {
    let parts: Vec<QSeries> = v.iter().zip(w).map(|(s, m)| s.mul_monomial(m).truncate(order)).collect();
    QSeries::sum_all(&parts).truncate(order)
}

fn infinite_product(x: &Monomial, base: &Rational, order: &Rational) -> Result<QSeries> {
    if x.is_zero() {
        return Ok(QSeries::one().truncate(order));
    }
    pochhammer_infinite(x, base, order)
}

/// Sequence `n ↦ f(n)` as exact monomial series.
pub fn monomial_sequence(n_max: usize, f: impl Fn(i64) -> Monomial) -> Vec<QSeries> {
    (0..=n_max as i64).map(|n| QSeries::monomial(&f(n))).collect()
}

/// The unit pair `α = (1, 0, 0, …)`.
pub fn unit_alpha(n_max: usize) -> Vec<QSeries> {
    let mut v = vec![QSeries::zero(); n_max + 1];
    v[0] = QSeries::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::series::pochhammer_finite;

    fn q(e: i64) -> Monomial {
        Monomial::q(int(e))
    }

    fn inv_poch(x: &Monomial, base: i64, n: u64, order: i64) -> QSeries {
        pochhammer_finite(x, &int(base), n).truncate(&int(order + 1)).inverse().unwrap().truncate(&int(order))
    }

    fn partitions(n: usize) -> Vec<i64> {
        let mut p = vec![0i64; n];
        p[0] = 1;
        for part in 1..n {
            for k in part..n {
                p[k] += p[k - part];
            }
        }
        p
    }

    #[test]
    fn unit_pair_beta() {
        let p = beta_from_alpha(&unit_alpha(4), &Monomial::one(), &int(1), 4, &int(30)).unwrap();
        for n in 0..=4u64 {
            let r = inv_poch(&q(1), 1, n, 30);
            assert_eq!(p.beta[n as usize], r.mul(&r).truncate(&int(30)));
        }
    }

    #[test]
    fn length_zero_copies_alpha() {
        let a0 = QSeries::monomial(&Monomial::of(3, 2, 1));
        let p = beta_from_alpha(std::slice::from_ref(&a0), &q(1), &int(2), 0, &int(10)).unwrap();
        assert_eq!(p.beta[0], a0.truncate(&int(10)));
    }

    #[test]
    fn hand_computed_beta_base_four() {
        let alpha = vec![QSeries::one(), QSeries::monomial(&Monomial::of(2, 4, 1))];
        let p = beta_from_alpha(&alpha, &Monomial::one(), &int(4), 1, &int(40)).unwrap();
        let r1 = inv_poch(&q(4), 4, 1, 40);
        let r2 = inv_poch(&q(4), 4, 2, 40);
        let expect = r1.mul(&r1).add(&r2.mul_monomial(&Monomial::of(2, 4, 1))).truncate(&int(40));
        assert_eq!(p.beta[0], QSeries::one().truncate(&int(40)));
        assert_eq!(p.beta[1], expect);
    }

    #[test]
    fn unit_pair_limit_is_partition_generating_function() {
        let p = beta_from_alpha(&unit_alpha(8), &Monomial::one(), &int(1), 8, &int(60)).unwrap();
        let r = p.limit_identity(&int(60)).unwrap();
        assert!(r.passed(), "{:?}", r.mismatch);
        assert_eq!(r.lhs, QSeries::from_ints(&partitions(60), Some(60)));
    }

    #[test]
    fn s1_on_unit_pair_keeps_relation_and_limit() {
        let p = beta_from_alpha(&unit_alpha(8), &Monomial::one(), &int(1), 8, &int(60)).unwrap();
        let s = p.s1().unwrap();
        assert!(s.satisfies_defining_relation().unwrap());
        assert!(s.limit_identity(&int(60)).unwrap().passed());
    }

    #[test]
    fn zero_alpha_gives_zero_sides() {
        let p = beta_from_alpha(&[], &Monomial::one(), &int(1), 5, &int(20)).unwrap();
        let r = p.limit_identity(&int(20)).unwrap();
        assert!(r.passed());
        assert!(r.lhs.is_zero() && r.rhs.is_zero());
    }

    #[test]
    fn short_pair_is_rejected() {
        let p = beta_from_alpha(&unit_alpha(3), &Monomial::one(), &int(1), 3, &int(40)).unwrap();
        assert!(matches!(p.limit_identity(&int(40)), Err(Error::InsufficientLength { .. })));
        assert!(p.limit_identity(&int(16)).is_ok());
    }

    #[test]
    fn shifts_preserve_relation_and_beta() {
        let alpha = monomial_sequence(5, |n| Monomial::of(if n == 0 { 1 } else { 2 }, n * n, 1));
        let p = beta_from_alpha(&alpha, &Monomial::one(), &int(1), 5, &int(50)).unwrap();
        let up = p.shift_a_up().unwrap();
        assert_eq!(up.a, q(1));
        assert!(up.satisfies_defining_relation().unwrap());
        let down = up.shift_a_down().unwrap();
        assert_eq!(down.a, Monomial::one());
        assert!(down.satisfies_defining_relation().unwrap());
        for (x, y) in down.beta.iter().zip(&p.beta) {
            assert_eq!(x, y);
        }
        assert!(down.alpha[0].agrees_with(&p.alpha[0]));
    }

    #[test]
    fn shift_down_pole() {
        let p = BaileySeqPair {
            a: q(-2),
            base: int(1),
            alpha: unit_alpha(2),
            beta: unit_alpha(2),
            order: int(10),
        };
        assert_eq!(p.shift_a_down().unwrap_err(), Error::PoleAtUnit(1));
    }

    #[test]
    fn general_lemma_keeps_relation() {
        let alpha = monomial_sequence(4, |n| Monomial::of(1, n * n + n, 1));
        let p = beta_from_alpha(&alpha, &q(1), &int(1), 4, &int(30)).unwrap();
        let rho1 = Rho::Finite(Monomial::of(-1, 1, 1));
        let rho2 = Rho::Finite(Monomial::of(2, 2, 1));
        for (r1, r2) in [(&rho1, &rho2), (&rho1, &Rho::Infinity), (&Rho::Infinity, &rho2)] {
            let t = p.apply_bailey_lemma(r1, r2).unwrap();
            assert!(t.satisfies_defining_relation().unwrap());
        }
        let half = beta_from_alpha(&alpha, &q(1), &rat(1, 2), 4, &int(12)).unwrap();
        let t = half.apply_bailey_lemma(&Rho::Finite(Monomial::of(1, 1, 3)), &Rho::Infinity).unwrap();
        assert!(t.satisfies_defining_relation().unwrap());
    }

    #[test]
    fn vanishing_denominator() {
        // aQ/ρ = 1 makes (aQ/ρ;Q)_1 vanish
        let p = beta_from_alpha(&unit_alpha(2), &Monomial::one(), &int(1), 2, &int(10)).unwrap();
        let e = p.apply_bailey_lemma(&Rho::Finite(q(1)), &Rho::Infinity).unwrap_err();
        assert!(matches!(e, Error::DivisionByZeroSeries(_)));
    }
}
