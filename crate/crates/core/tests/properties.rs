//! Algebraic invariants under random inputs.

use proptest::prelude::*;

use nahm_core::eta::{expand_eta_quotient, prefactor_c, EtaQuotientSpec};
use nahm_core::nahm::{det, dual, eval_nahm, is_positive_definite, lift2to3, Matrix, NahmTriple};
use nahm_core::rational::{int, rat};
use nahm_core::search::recognize_series;
use nahm_core::series::{pochhammer_infinite_many, theta_jtp};
use nahm_core::{Monomial, QSeries, Rational};

fn small_rational(lo: i64, hi: i64, den: i64) -> impl Strategy<Value = Rational> {
    (1..=den).prop_flat_map(move |d| (lo * d..=hi * d).prop_map(move |n| rat(n, d)))
}

fn series(scale: i64) -> impl Strategy<Value = QSeries> {
    (proptest::collection::vec((0i64..40, -5i64..=5), 0..12), 20i64..40).prop_map(move |(terms, hi)| {
        QSeries::new(scale, terms.into_iter().filter(|(k, _)| *k < hi).map(|(k, c)| (k, int(c))), Some(hi))
    })
}

fn any_series() -> impl Strategy<Value = QSeries> {
    (1i64..=3).prop_flat_map(series)
}

fn same(f: &QSeries, g: &QSeries) -> bool {
    f.order() == g.order() && f.first_mismatch(g).is_none()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(f in any_series(), g in any_series(), h in any_series()) {
        prop_assert!(same(&f.add(&g), &g.add(&f)));
        prop_assert!(same(&f.mul(&g), &g.mul(&f)));
        prop_assert!(same(&f.add(&g).add(&h), &f.add(&g.add(&h))));
        prop_assert!(same(&f.mul(&g).mul(&h), &f.mul(&g.mul(&h))));
        prop_assert!(same(&f.mul(&g.add(&h)), &f.mul(&g).add(&f.mul(&h))));
        prop_assert!(f.sub(&f).is_zero());
    }

    #[test]
    fn inverse_is_two_sided(f in any_series(), c in 1i64..4) {
        let f = f.add(&QSeries::constant(int(c)).truncate(&f.order().unwrap()));
        prop_assume!(f.valuation() == Some(int(0)));
        let g = f.inverse().unwrap();
        let one = QSeries::one().truncate(&f.order().unwrap());
        prop_assert!(same(&f.mul(&g), &one));
    }

    #[test]
    fn dissection_partitions_the_series(f in series(1), m in 1i64..6) {
        let parts: Vec<QSeries> = (0..m).map(|r| f.dissect(m, r)).collect();
        prop_assert!(same(&QSeries::sum_all(&parts), &f));
        for (r, p) in parts.iter().enumerate() {
            prop_assert!(p.iter().all(|(e, _)| ((e - int(r as i64)) / int(m)).is_integer()));
        }
    }

    #[test]
    fn substitution_composes(f in any_series(), a in small_rational(1, 3, 3), b in small_rational(1, 3, 3)) {
        prop_assume!(a > int(0) && b > int(0));
        let twice = f.substitute_power(&a).substitute_power(&b);
        prop_assert!(same(&twice, &f.substitute_power(&(&a * &b))));
    }

    #[test]
    fn triple_product(base in small_rational(1, 3, 4), t in 1i64..4, sign in prop::bool::ANY) {
        prop_assume!(base > int(0));
        let e = &base * rat(t, 4);
        let s = if sign { int(1) } else { int(-1) };
        let z = Monomial::new(s, e.clone());
        let order = int(30);
        let sum = theta_jtp(&z, &base, &order).unwrap();
        let w = Monomial::new(z.coeff.recip(), &base - &e);
        let prod = pochhammer_infinite_many(&[z, w, Monomial::q(base.clone())], &base, &order).unwrap();
        prop_assert!(same(&sum, &prod));
    }

    #[test]
    fn dual_is_an_involution(entries in proptest::collection::vec(small_rational(-3, 3, 4), 6), b in proptest::collection::vec(small_rational(-2, 2, 3), 3), c in small_rational(-1, 1, 24)) {
        let a = vec![
            vec![entries[0].clone(), entries[1].clone(), entries[2].clone()],
            vec![entries[1].clone(), entries[3].clone(), entries[4].clone()],
            vec![entries[2].clone(), entries[4].clone(), entries[5].clone()],
        ];
        prop_assume!(det(&a) != int(0));
        let t = NahmTriple::new(a, b, c).unwrap();
        prop_assert_eq!(dual(&dual(&t).unwrap()).unwrap(), t);
    }

    #[test]
    fn eta_quotient_round_trip(js in proptest::collection::vec((prop::sample::select(vec![1i64, 2, 3, 4, 6]), -2i64..=2), 0..3),
                               jams in proptest::collection::vec((prop::sample::select(vec![2i64, 3, 4, 6]), 1i64..6, -1i64..=1), 0..3)) {
        let mut spec = EtaQuotientSpec::new();
        for (m, e) in js {
            spec = spec.j(m, e);
        }
        for (m, a, e) in jams {
            if a < m {
                spec = spec.jam(a, m, e);
            }
        }
        let f = expand_eta_quotient(&spec, &int(80)).unwrap();
        let rec = recognize_series(&f, 60, 24, 0).unwrap();
        prop_assert!(rec.period.is_some());
        prop_assert_eq!(rec.c, Some(prefactor_c(&spec).unwrap().0));
        let back = expand_eta_quotient(rec.spec.as_ref().unwrap(), &int(60)).unwrap();
        prop_assert!(back.first_mismatch(&f).is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lift_preserves_the_sum(a1 in small_rational(1, 3, 2), a2 in small_rational(-1, 1, 2), a3 in small_rational(1, 3, 2),
                              b1 in small_rational(-1, 1, 2), b2 in small_rational(-1, 1, 2)) {
        let a: Matrix = vec![vec![a1, a2.clone()], vec![a2, a3]];
        prop_assume!(is_positive_definite(&a).unwrap());
        let (la, lb) = lift2to3(&a, &[b1.clone(), b2.clone()]).unwrap();
        prop_assume!(is_positive_definite(&la).unwrap() && det(&la) >= rat(1, 4));
        let o = int(16);
        let f = eval_nahm(&NahmTriple::new(a, vec![b1, b2], int(0)).unwrap(), &o).unwrap();
        let g = eval_nahm(&NahmTriple::new(la, lb, int(0)).unwrap(), &o).unwrap();
        prop_assert!(same(&f, &g));
    }

    #[test]
    fn enumeration_matches_a_box_sum(r in 1usize..=3, entries in proptest::collection::vec(small_rational(-1, 3, 2), 6),
                                     b in proptest::collection::vec(small_rational(0, 1, 2), 3), order in 4i64..=12) {
        let idx = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
        let a: Matrix = (0..r).map(|i| (0..r).map(|j| entries[idx[i][j]].clone()).collect()).collect();
        prop_assume!(is_positive_definite(&a).unwrap());
        let b: Vec<Rational> = b[..r].to_vec();
        let f = eval_nahm(&NahmTriple::new(a.clone(), b.clone(), int(0)).unwrap(), &int(order)).unwrap();
        let oracle = box_sum(&a, &b, order);
        prop_assert!(same(&f, &oracle), "{:?} vs {:?}", f, oracle);
        prop_assert_eq!(f.coeff(&int(0)), int(1));
    }
}

fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

/// Direct evaluation over a box `0 ≤ n_i ≤ N`, with `N` from a crude eigenvalue bound.
fn box_sum(a: &Matrix, b: &[Rational], order: i64) -> QSeries {
    let r = a.len();
    let row_max = a.iter().map(|row| row.iter().map(|x| to_f64(x).abs()).sum::<f64>()).fold(0.0, f64::max);
    let lambda = to_f64(&det(a)) / row_max.powi(r as i32 - 1);
    let bn = b.iter().map(|x| to_f64(x).powi(2)).sum::<f64>().sqrt();
    let n_max = ((bn + (bn * bn + 2.0 * lambda * order as f64).sqrt()) / lambda).ceil() as i64 + 1;
    let d = 4;
    let mut coeffs = vec![0i128; (order * d) as usize];
    let mut n = vec![0i64; r];
    loop {
        let mut q = Rational::from_integer(0.into());
        for i in 0..r {
            q += &b[i] * int(n[i]);
            for j in 0..r {
                q += &a[i][j] * int(n[i] * n[j]) / int(2);
            }
        }
        let e = q * int(d);
        assert!(e.is_integer());
        let e = e.to_integer().try_into().unwrap_or(i64::MAX);
        if (0..order * d).contains(&e) {
            let mut t = vec![0i128; (order * d - e) as usize];
            t[0] = 1;
            for &ni in &n {
                for k in 1..=ni {
                    let step = (k * d) as usize;
                    for m in step..t.len() {
                        t[m] += t[m - step];
                    }
                }
            }
            for (m, c) in t.iter().enumerate() {
                coeffs[e as usize + m] += c;
            }
        }
        let mut i = 0;
        loop {
            if i == r {
                return QSeries::new(d, coeffs.iter().enumerate().map(|(k, c)| (k as i64, int(*c as i64))), Some(order * d));
            }
            n[i] += 1;
            if n[i] <= n_max {
                break;
            }
            n[i] = 0;
            i += 1;
        }
    }
}
