//! Scans of linear terms `B` for a fixed matrix `A`, flagging Nahm sums whose
//! product exponents are periodic.
//!
//! A hit is a candidate, not a proof: periodicity is only checked on the
//! computed window. When one period is an integer combination of residue
//! classes the eta quotient and its `C` are reported as well.

use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eta::{find_period, fit_c, period_pattern, prefactor_c, recognize_product, EtaQuotientSpec};
use crate::nahm::{eval_nahm, is_positive_definite, is_symmetric, Matrix, NahmTriple};
use crate::rational::{ceil_i64, floor_i64, int, rat, Rational};
use crate::series::{Monomial, QSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub denominator_bound: i64,
    pub lo: Rational,
    pub hi: Rational,
    pub order: i64,
    pub window: usize,
    pub max_period: usize,
    pub tail_skip: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            denominator_bound: 4,
            lo: int(-1),
            hi: int(1),
            order: 160,
            window: 120,
            max_period: 48,
            tail_skip: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.denominator_bound < 1 {
            return Err(Error::Parse("denominator bound must be at least 1".into()));
        }
        if (self.order as i128) < self.window as i128 + 10 {
            return Err(Error::WindowTooSmall { available: self.order.max(0) as usize, needed: self.window + 10 });
        }
        Ok(())
    }
}

/// Outcome of peeling one series into product exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recognition {
    pub period: Option<usize>,
    pub pattern: Vec<Rational>,
    /// `f = spec` exactly on the window, including the leading monomial.
    pub spec: Option<EtaQuotientSpec>,
    pub c: Option<Rational>,
    pub scale: i64,
}

/// Normalizes `f` to constant term 1 on the coarsest scale, peels it and
/// looks for a period of at most `max_period` (in units of that scale).
pub fn recognize_series(f: &QSeries, window: usize, max_period: usize, tail_skip: usize) -> Result<Recognition> {
    let Some(v) = f.valuation() else {
        return Err(Error::ZeroSeries);
    };
    let lead = f.coeff(&v);
    let g = f.shift(&-&v).scale_coeffs(&lead.recip());
    let mut step = g.scale();
    for (k, _) in g.terms_scaled() {
        step = step.gcd(k);
    }
    let g = match g.hi_scaled() {
        Some(h) => g.truncate_scaled(h - h.rem_euclid(step)),
        None => g,
    }
    .reduced();
    let e = recognize_product(&g, window)?;
    let period = find_period(&e, max_period, tail_skip)?;
    let Some(p) = period else {
        return Ok(Recognition { period: None, pattern: Vec::new(), spec: None, c: None, scale: g.scale() });
    };
    let pattern = period_pattern(&e, p, tail_skip);
    let fitted = if tail_skip == 0 { fit_c(&pattern, g.scale()) } else { None };
    let (spec, c) = match fitted {
        Some((spec, _)) => {
            let spec = spec.times(&Monomial::new(lead, v));
            let (c, _) = prefactor_c(&spec)?;
            (Some(spec), Some(c))
        }
        None => (None, None),
    };
    Ok(Recognition { period: Some(p), pattern, spec, c, scale: g.scale() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub b: Vec<Rational>,
    pub recognition: Recognition,
}

impl Candidate {
    pub fn period(&self) -> usize {
        self.recognition.period.expect("candidates are periodic")
    }
}

/// Rationals `p/d` in `[lo, hi]` with `1 ≤ d ≤ k`, increasing.
pub fn grid_values(k: i64, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    if lo > hi {
        return out;
    }
    for d in 1..=k {
        for p in ceil_i64(&(lo * int(d)))..=floor_i64(&(hi * int(d))) {
            out.push(rat(p, d));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Lexicographic product of `values` over `rank` coordinates.
pub fn grid(rank: usize, values: &[Rational]) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    if values.is_empty() && rank > 0 {
        return Vec::new();
    }
    out
}

/// Evaluates `f_{A,B,0}` for every grid `B` and keeps the periodic ones,
/// ordered by period and then lexicographically by `B`.
pub fn scan_vectors(a: &Matrix, cfg: &SearchConfig) -> Result<Vec<Candidate>> {
    cfg.validate()?;
    if !is_symmetric(a) {
        return Err(Error::NotSymmetric);
    }
    if !is_positive_definite(a)? {
        return Err(Error::NotPositiveDefinite);
    }
    let values = grid_values(cfg.denominator_bound, &cfg.lo, &cfg.hi);
    let points = grid(a.len(), &values);
    let order = int(cfg.order);
    let found: Vec<Option<Candidate>> = points
        .par_iter()
        .map(|b| {
            let t = NahmTriple::new(a.clone(), b.clone(), Rational::zero()).ok()?;
            let f = eval_nahm(&t, &order).ok()?;
            let rec = recognize_series(&f, cfg.window, cfg.max_period, cfg.tail_skip).ok()?;
            rec.period.map(|_| Candidate { b: b.clone(), recognition: rec })
        })
        .collect();
    let mut out: Vec<Candidate> = found.into_iter().flatten().collect();
    out.sort_by_key(|c| c.period());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta::expand_eta_quotient;

    #[test]
    fn grid_is_farey_like() {
        let v = grid_values(2, &int(-1), &int(1));
        assert_eq!(v, vec![int(-1), rat(-1, 2), int(0), rat(1, 2), int(1)]);
        assert!(grid_values(3, &int(1), &int(0)).is_empty());
        assert_eq!(grid(2, &v).len(), 25);
        assert_eq!(grid(2, &v)[1], vec![int(-1), rat(-1, 2)]);
    }

    #[test]
    fn rogers_ramanujan_is_recognized() {
        let f = eval_nahm(&NahmTriple::new(vec![vec![int(2)]], vec![int(0)], int(0)).unwrap(), &int(80)).unwrap();
        let r = recognize_series(&f, 60, 20, 0).unwrap();
        assert_eq!(r.period, Some(5));
        assert_eq!(r.pattern, [1, 0, 0, 1, 0].map(int).to_vec());
        assert_eq!(r.c, Some(rat(-1, 60)));
    }

    #[test]
    fn shifted_series_keeps_its_prefactor() {
        let spec = EtaQuotientSpec::new().j(5, 1).jam(2, 5, -1).with_q(int(1));
        let f = expand_eta_quotient(&spec, &int(80)).unwrap();
        let r = recognize_series(&f, 60, 20, 0).unwrap();
        assert_eq!(r.c, Some(rat(11, 60) - int(1)));
    }

    #[test]
    fn rank_one_scan() {
        let cfg = SearchConfig { denominator_bound: 2, order: 80, window: 60, max_period: 20, ..Default::default() };
        let found = scan_vectors(&vec![vec![int(2)]], &cfg).unwrap();
        let bs: Vec<Rational> = found.iter().map(|c| c.b[0].clone()).collect();
        assert_eq!(bs, vec![int(0), int(1)]);
        assert_eq!(found[1].recognition.c, Some(rat(11, 60)));
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = vec![vec![int(1), int(2)], vec![int(2), int(1)]];
        assert!(matches!(scan_vectors(&a, &SearchConfig::default()), Err(Error::NotPositiveDefinite)));
    }
}
