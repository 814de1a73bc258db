//! Nahm sums over rational positive-definite forms, the lift and dual operators.
//!
//! `f_{A,B,C}(q) = Σ_{n ∈ ℕ^r} q^(½nᵀAn + nᵀB + C) / ((q;q)_{n_1} ⋯ (q;q)_{n_r})`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, Int};
use crate::rational::{self, ceil_i64, denom_i64, floor_i64, int, rat, Rational};
use crate::series::QSeries;

pub type Matrix = Vec<Vec<Rational>>;

/// Largest scale `D` a Nahm evaluation may use.
pub const MAX_SCALE: i64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NahmTriple {
    pub a: Matrix,
    pub b: Vec<Rational>,
    pub c: Rational,
}

/// JSON wire form: `{"rank": r, "A": [["p/q", …], …], "B": [...], "C": "p/q"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleFile {
    pub rank: usize,
    #[serde(rename = "A", with = "rational::serde_rational_mat")]
    pub a: Matrix,
    #[serde(rename = "B", with = "rational::serde_rational_vec")]
    pub b: Vec<Rational>,
    #[serde(rename = "C", with = "rational::serde_rational")]
    pub c: Rational,
}

impl NahmTriple {
    pub fn new(a: Matrix, b: Vec<Rational>, c: Rational) -> Result<Self> {
        let r = a.len();
        if a.iter().any(|row| row.len() != r) {
            return Err(Error::RankMismatch { expected: r, got: a.iter().map(|x| x.len()).find(|&l| l != r).unwrap() });
        }
        if b.len() != r {
            return Err(Error::RankMismatch { expected: r, got: b.len() });
        }
        if !is_symmetric(&a) {
            return Err(Error::NotSymmetric);
        }
        Ok(NahmTriple { a, b, c })
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: TripleFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if f.a.len() != f.rank {
            return Err(Error::RankMismatch { expected: f.rank, got: f.a.len() });
        }
        NahmTriple::new(f.a, f.b, f.c)
    }

    pub fn to_file(&self) -> TripleFile {
        TripleFile { rank: self.rank(), a: self.a.clone(), b: self.b.clone(), c: self.c.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("triple serializes")
    }
}

/// Builds a matrix from `(numerator, denominator)` pairs.
pub fn mat(rows: &[&[(i64, i64)]]) -> Matrix {
    rows.iter().map(|row| row.iter().map(|&(n, d)| rat(n, d)).collect()).collect()
}

pub fn vec_of(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(n, d)| rat(n, d)).collect()
}

pub fn is_symmetric(a: &Matrix) -> bool {
    let n = a.len();
    (0..n).all(|i| a[i].len() == n && (0..i).all(|j| a[i][j] == a[j][i]))
}

/// Scales a rational matrix to integers; returns the common denominator.
fn integer_scaled(a: &Matrix) -> (BigInt, Vec<Vec<BigInt>>) {
    let mut l = BigInt::one();
    for row in a {
        for x in row {
            l = l.lcm(x.denom());
        }
    }
    let m = a
        .iter()
        .map(|row| row.iter().map(|x| x.numer() * (&l / x.denom())).collect())
        .collect();
    (l, m)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &Matrix) -> Rational {
    let n = a.len();
    if n == 0 {
        return Rational::one();
    }
    let (l, mut m) = integer_scaled(a);
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Rational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = &m[n - 1][n - 1] * BigInt::from(sign);
    Rational::new(d, num_traits::pow(l, n))
}

/// Exact inverse by fraction-free Gauss–Jordan elimination on `[A | I]`.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let (l, m) = integer_scaled(a);
    let mut aug: Vec<Vec<BigInt>> = m
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        if aug[k][k].is_zero() {
            match (k + 1..n).find(|&i| !aug[i][k].is_zero()) {
                Some(i) => aug.swap(i, k),
                None => return Err(Error::Singular),
            }
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let v = (&aug[k][k] * &aug[i][j] - &aug[i][k] * &aug[k][j]) / &prev;
                aug[i][j] = v;
            }
            aug[i][k] = BigInt::zero();
        }
        prev = aug[k][k].clone();
    }
    // every diagonal entry now equals the scaled determinant
    let d = prev;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| Rational::new(&aug[i][n + j] * &l, d.clone()))
                .collect()
        })
        .collect())
}

pub fn mat_vec(a: &Matrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).map(|(x, y)| x * y).sum()
}

fn leading_block(a: &Matrix, k: usize) -> Matrix {
    a[..k].iter().map(|row| row[..k].to_vec()).collect()
}

fn trailing_block(a: &Matrix, k: usize) -> Matrix {
    a[k..].iter().map(|row| row[k..].to_vec()).collect()
}

/// Leading-principal-minor test.
pub fn is_positive_definite(a: &Matrix) -> Result<bool> {
    if !is_symmetric(a) {
        return Err(Error::NotSymmetric);
    }
    Ok((1..=a.len()).all(|k| det(&leading_block(a, k)).is_positive()))
}

/// The rank two to rank three lifting operator.
pub fn lift2to3(a: &Matrix, b: &[Rational]) -> Result<(Matrix, Vec<Rational>)> {
    if a.len() != 2 || a.iter().any(|r| r.len() != 2) {
        return Err(Error::RankMismatch { expected: 2, got: a.len() });
    }
    if b.len() != 2 {
        return Err(Error::RankMismatch { expected: 2, got: b.len() });
    }
    if !is_symmetric(a) {
        return Err(Error::NotSymmetric);
    }
    let (a1, a2, a3) = (&a[0][0], &a[0][1], &a[1][1]);
    let one = Rational::one();
    let lifted = vec![
        vec![a1.clone(), a2 + &one, a1 + a2],
        vec![a2 + &one, a3.clone(), a2 + a3],
        vec![a1 + a2, a2 + a3, a1 + a2 * int(2) + a3],
    ];
    let lb = vec![b[0].clone(), b[1].clone(), &b[0] + &b[1]];
    Ok((lifted, lb))
}

/// `(A, B, C) ↦ (A⁻¹, A⁻¹B, ½BᵀA⁻¹B − r/24 − C)`.
pub fn dual(t: &NahmTriple) -> Result<NahmTriple> {
    let ai = inverse(&t.a)?;
    let bs = mat_vec(&ai, &t.b);
    let r = t.rank() as i64;
    let cs = dot(&t.b, &bs) / int(2) - rat(r, 24) - &t.c;
    Ok(NahmTriple { a: ai, b: bs, c: cs })
}

/// Precomputed data for lattice enumeration in scaled units.
struct Plan {
    r: usize,
    d: i64,
    /// `D·A_ii/2`
    half_diag: Vec<i64>,
    /// `D·A_ij`
    cross: Vec<Vec<i64>>,
    /// inverses of trailing blocks `A[k..][k..]`, unscaled
    trailing_inv: Vec<Matrix>,
}

impl Plan {
    /// Real lower bound, in scaled units, of `D·½yᵀA_ky + lin·y` over `y ∈ ℝ^(r-k)`.
    fn lower_bound(&self, k: usize, lin: &[i64]) -> Rational {
        if k >= self.r {
            return Rational::zero();
        }
        let l: Vec<Rational> = lin.iter().map(|x| int(*x)).collect();
        let w = &self.trailing_inv[k];
        -dot(&l, &mat_vec(w, &l)) / int(2 * self.d)
    }
}

struct Enumerator<'p, T: Int> {
    plan: &'p Plan,
    /// `1/(q;q)_n` in `q^(1/D)`, dense from exponent 0
    inv_poch: Vec<Vec<T>>,
    width: usize,
}

impl<'p, T: Int> Enumerator<'p, T> {
    fn inv_poch(&mut self, n: usize) -> Option<&Vec<T>> {
        while self.inv_poch.len() <= n {
            let m = self.inv_poch.len();
            let mut next = match self.inv_poch.last() {
                Some(prev) => prev.clone(),
                None => {
                    let mut v = vec![T::nil(); self.width];
                    if self.width > 0 {
                        v[0] = T::from_i64(1);
                    }
                    v
                }
            };
            if m > 0 {
                kernel::divide_one_minus(&mut next, m * self.plan.d as usize)?;
            }
            self.inv_poch.push(next);
        }
        Some(&self.inv_poch[n])
    }

    /// `S_k(lin)` on exponents `[lo, budget)`; returns `lo` and the dense coefficients.
    fn level(&mut self, k: usize, lin: &[i64], budget: i64) -> Option<(i64, Vec<T>)> {
        let plan = self.plan;
        let lo = floor_i64(&plan.lower_bound(k, lin));
        let len = (budget - lo).max(0) as usize;
        let mut out = vec![T::nil(); len];
        if len == 0 {
            return Some((lo, out));
        }
        let last = k + 1 == plan.r;
        let h = plan.half_diag[k];
        let mut prev_g: Option<Rational> = None;
        for n in 0i64.. {
            let e = h * n * n + lin[0] * n;
            let next_lin: Vec<i64> = (k + 1..plan.r)
                .enumerate()
                .map(|(idx, j)| lin[idx + 1] + plan.cross[j][k] * n)
                .collect();
            let g = int(e) + plan.lower_bound(k + 1, &next_lin);
            // g is convex in n, so once it is rising above the budget it stays there
            let rising = prev_g.as_ref().is_some_and(|p| g >= *p);
            let above = g >= int(budget);
            prev_g = Some(g);
            if above {
                if rising {
                    break;
                }
                continue;
            }
            if last {
                let start = e - lo;
                let avail = (budget - e) as usize;
                let p = self.inv_poch(n as usize)?;
                for i in 0..avail.min(p.len()) {
                    if !p[i].is_nil() {
                        out[start as usize + i].add_to(&p[i])?;
                    }
                }
            } else {
                let (ilo, mut inner) = self.level(k + 1, &next_lin, budget - e)?;
                for j in 1..=n as usize {
                    kernel::divide_one_minus(&mut inner, j * plan.d as usize)?;
                }
                let start = e + ilo - lo;
                for (i, x) in inner.iter().enumerate() {
                    if !x.is_nil() {
                        out[(start + i as i64) as usize].add_to(x)?;
                    }
                }
            }
        }
        Some((lo, out))
    }
}

/// Exact evaluation of `f_{A,B,C}` on all exponents below `order`.
pub fn eval_nahm(t: &NahmTriple, order: &Rational) -> Result<QSeries> {
    let r = t.rank();
    if !is_symmetric(&t.a) {
        return Err(Error::NotSymmetric);
    }
    if !is_positive_definite(&t.a)? {
        return Err(Error::NotPositiveDefinite);
    }
    let mut d: i64 = denom_i64(&t.c).lcm(&denom_i64(order));
    for i in 0..r {
        d = d.lcm(&denom_i64(&(&t.a[i][i] / int(2)))).lcm(&denom_i64(&t.b[i]));
        for j in 0..i {
            d = d.lcm(&denom_i64(&t.a[i][j]));
        }
        if d > MAX_SCALE {
            return Err(Error::ScaleOverflow(d.to_string()));
        }
    }
    let sc = |x: &Rational| -> i64 { (x * int(d)).to_integer().to_i64().expect("scaled entry fits") };
    let plan = Plan {
        r,
        d,
        half_diag: (0..r).map(|i| sc(&(&t.a[i][i] / int(2)))).collect(),
        cross: (0..r).map(|i| (0..r).map(|j| sc(&t.a[i][j])).collect()).collect(),
        trailing_inv: (0..r).map(|k| inverse(&trailing_block(&t.a, k))).collect::<Result<_>>()?,
    };
    let hi = ceil_i64(&(order * int(d)));
    let shift = sc(&t.c);
    let budget = hi - shift;
    let lin: Vec<i64> = t.b.iter().map(sc).collect();
    let width = (budget - floor_i64(&plan.lower_bound(0, &lin))).max(0) as usize;
    let run_small = || {
        let mut en = Enumerator::<i128> { plan: &plan, inv_poch: Vec::new(), width };
        en.level(0, &lin, budget)
            .map(|(lo, v)| (lo, v.into_iter().map(BigInt::from).collect::<Vec<_>>()))
    };
    let (lo, coeffs) = run_small().unwrap_or_else(|| {
        let mut en = Enumerator::<BigInt> { plan: &plan, inv_poch: Vec::new(), width };
        en.level(0, &lin, budget).expect("BigInt enumeration cannot overflow")
    });
    Ok(QSeries::new(
        d,
        coeffs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (lo + i as i64 + shift, Rational::from_integer(c))),
        Some(hi),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta::{expand_eta_quotient, EtaQuotientSpec};

    fn triple(a: Matrix, b: Vec<Rational>) -> NahmTriple {
        NahmTriple::new(a, b, Rational::zero()).unwrap()
    }

    #[test]
    fn rank_one_rogers_ramanujan() {
        let t = triple(mat(&[&[(2, 1)]]), vec_of(&[(0, 1)]));
        let f = eval_nahm(&t, &int(5)).unwrap();
        assert_eq!(f, QSeries::from_ints(&[1, 1, 1, 1, 2], Some(5)));
        let g = eval_nahm(&t, &int(80)).unwrap();
        let rr = EtaQuotientSpec::new().j(5, 1).jam(1, 5, -1);
        assert_eq!(g, expand_eta_quotient(&rr, &int(80)).unwrap());
    }

    #[test]
    fn rank_three_small_order() {
        // 3i^2 + 3j^2 + 3k^2 - 2ij - 2ik - 2jk in the q^4 base
        let a = mat(&[&[(3, 2), (-1, 2), (-1, 2)], &[(-1, 2), (3, 2), (-1, 2)], &[(-1, 2), (-1, 2), (3, 2)]]);
        let t = triple(a, vec_of(&[(0, 1), (0, 1), (0, 1)]));
        let f = eval_nahm(&t, &rat(5, 4)).unwrap().substitute_power(&int(4));
        assert_eq!(f, QSeries::from_ints(&[1, 0, 0, 4, 3], Some(5)));
    }

    #[test]
    fn only_origin_below_min_diagonal() {
        let a = mat(&[&[(3, 1), (1, 1)], &[(1, 1), (3, 1)]]);
        let t = triple(a, vec_of(&[(1, 2), (0, 1)]));
        assert_eq!(eval_nahm(&t, &rat(3, 2)).unwrap(), QSeries::one().truncate(&rat(3, 2)));
    }

    #[test]
    fn negative_linear_term_and_prefactor() {
        let t = NahmTriple::new(mat(&[&[(1, 1)]]), vec_of(&[(-1, 2)]), rat(1, 20)).unwrap();
        let f = eval_nahm(&t, &int(10)).unwrap();
        // Σ q^{n²/2 - n/2}/(q;q)_n = (-1;q)_∞ = 2(-q;q)_∞
        let g = crate::series::pochhammer_infinite(&crate::series::Monomial::of(-1, 1, 1), &int(1), &int(11))
            .unwrap()
            .scale_coeffs(&int(2))
            .shift(&rat(1, 20))
            .truncate(&int(10));
        assert_eq!(f, g);
    }

    #[test]
    fn table_one_rows() {
        let (l, _) = lift2to3(&mat(&[&[(1, 1), (-1, 1)], &[(-1, 1), (2, 1)]]), &vec_of(&[(0, 1), (0, 1)])).unwrap();
        assert_eq!(l, mat(&[&[(1, 1), (0, 1), (0, 1)], &[(0, 1), (2, 1), (1, 1)], &[(0, 1), (1, 1), (1, 1)]]));
        assert_eq!(det(&l), int(1));
        let (l, _) = lift2to3(&mat(&[&[(2, 1), (1, 1)], &[(1, 1), (1, 1)]]), &vec_of(&[(0, 1), (0, 1)])).unwrap();
        assert_eq!(det(&l), int(-3));
        assert!(!is_positive_definite(&l).unwrap());
        assert!(is_positive_definite(&mat(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]])).unwrap());
        assert_eq!(is_positive_definite(&mat(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]])), Err(Error::NotSymmetric));
    }

    #[test]
    fn lifted_dual_prefactor() {
        let a = mat(&[&[(1, 1), (-1, 2)], &[(-1, 2), (1, 1)]]);
        let (la, lb) = lift2to3(&a, &vec_of(&[(-1, 2), (0, 1)])).unwrap();
        let t = NahmTriple::new(la, lb, rat(1, 20)).unwrap();
        let d = dual(&t).unwrap();
        assert_eq!(
            d.a,
            mat(&[&[(3, 2), (-1, 2), (-1, 2)], &[(-1, 2), (3, 2), (-1, 2)], &[(-1, 2), (-1, 2), (3, 2)]])
        );
        assert_eq!(d.b, vec_of(&[(-1, 2), (1, 2), (-1, 2)]));
        assert_eq!(dual(&d).unwrap(), t);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = mat(&[&[(0, 1), (2, 3), (1, 1)], &[(2, 3), (5, 4), (0, 1)], &[(1, 1), (0, 1), (7, 2)]]);
        let ai = inverse(&a).unwrap();
        for i in 0..3 {
            let col: Vec<Rational> = (0..3).map(|j| ai[j][i].clone()).collect();
            let e = mat_vec(&a, &col);
            for (j, x) in e.iter().enumerate() {
                assert_eq!(*x, if i == j { int(1) } else { int(0) });
            }
        }
        assert_eq!(inverse(&mat(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]])), Err(Error::Singular));
    }

    #[test]
    fn not_positive_definite_is_rejected() {
        let t = triple(mat(&[&[(1, 1), (2, 1)], &[(2, 1), (1, 1)]]), vec_of(&[(0, 1), (0, 1)]));
        assert_eq!(eval_nahm(&t, &int(5)), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn json_round_trip() {
        let t = NahmTriple::new(mat(&[&[(2, 1)]]), vec_of(&[(1, 1)]), rat(11, 60)).unwrap();
        let s = t.to_json();
        assert!(s.contains("\"11/60\""));
        assert_eq!(NahmTriple::from_json(&s).unwrap(), t);
        assert!(NahmTriple::from_json(r#"{"rank":2,"A":[["1","2"],["3","1"]],"B":["0","0"],"C":"0"}"#).is_err());
    }
}
