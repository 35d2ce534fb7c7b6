use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use qindex_core::qseries::*;
use qindex_core::specialfn::QContext;

// Dense oracle: series in half-units as maps with i128 coefficients, all
// products cut at a fixed half-unit order `t`.
type Dense = BTreeMap<i64, i128>;

fn dmul(a: &Dense, b: &Dense, t: i64) -> Dense {
    let mut r = Dense::new();
    for (i, x) in a {
        for (j, y) in b {
            if i + j < t {
                *r.entry(i + j).or_default() += x * y;
            }
        }
    }
    r.retain(|_, v| *v != 0);
    r
}

fn dinv_qn(n: i64, t: i64) -> Dense {
    // 1/(q)_n = Π 1/(1 − q^i), expanded as geometric series
    let mut r: Dense = [(0, 1)].into();
    for i in 1..=n {
        let g: Dense = (0..).map(|k| 2 * i * k).take_while(|e| *e < t).map(|e| (e, 1)).collect();
        r = dmul(&r, &g, t);
    }
    r
}

fn oracle_tet(m: i64, e: i64, t: i64) -> Dense {
    let mut r = Dense::new();
    let mut n = (-e).max(0);
    loop {
        let ex = n * (n + 1) - (2 * n + e) * m;
        if ex >= t && n > m.abs() + 2 {
            break;
        }
        if ex < t {
            let s = dmul(&dinv_qn(n, t - ex), &dinv_qn(n + e, t - ex), t - ex);
            for (k, v) in s {
                *r.entry(k + ex).or_default() += if n % 2 == 0 { v } else { -v };
            }
        }
        n += 1;
    }
    r.retain(|_, v| *v != 0);
    r
}

fn to_dense(s: &HalfExpSeries) -> Dense {
    s.terms().map(|(k, c)| (k, i128::try_from(c.clone()).unwrap())).collect()
}

fn below(d: &Dense, t: i64) -> Dense {
    d.iter().filter(|(k, _)| **k < t).map(|(k, v)| (*k, *v)).collect()
}

#[test]
fn q_pochhammer_first_terms() {
    // (q;q)_∞ cut below q^1 is just the constant term
    let s = pochhammer_series(2, 1, 2, 2).unwrap();
    assert_eq!(s, HalfExpSeries::from_terms([(0, 1)], Some(2)));
    let s = pochhammer_series(2, 1, 2, 3).unwrap();
    assert_eq!(s, HalfExpSeries::from_terms([(0, 1), (2, -1)], Some(3)));
    for (a, sign, step) in [(2, 1, 2), (1, -1, 4), (0, -1, 2), (3, 1, 1)] {
        let s = pochhammer_series(a, sign, step, 1).unwrap();
        let c = if a == 0 { 2 } else { 1 };
        assert_eq!(s, HalfExpSeries::from_terms([(0, c)], Some(1)));
    }
}

#[test]
fn pochhammer_rejects_vanishing_factor() {
    assert!(pochhammer_series(0, 1, 2, 10).is_err());
    assert!(pochhammer_series(-2, -1, 2, 10).is_err());
    assert!(pochhammer_series(2, 1, 0, 10).is_err());
}

#[test]
fn c_series_is_the_alternating_theta_series() {
    // oracle: (q;q)² / (q²;q²) by dense product and dense long division
    let t = 20;
    let mut qq: Dense = [(0, 1)].into();
    for i in 1..10 {
        qq = dmul(&qq, &[(0, 1), (2 * i, -1)].into(), t);
    }
    let mut q2: Dense = [(0, 1)].into();
    for i in 1..5 {
        q2 = dmul(&q2, &[(0, 1), (4 * i, -1)].into(), t);
    }
    let num = dmul(&qq, &qq, t);
    let mut quo = vec![0i128; t as usize];
    let den: Vec<i128> = (0..t).map(|k| *q2.get(&k).unwrap_or(&0)).collect();
    for k in 0..t as usize {
        let mut acc = *num.get(&(k as i64)).unwrap_or(&0);
        for j in 1..=k {
            acc -= den[j] * quo[k - j];
        }
        quo[k] = acc;
    }
    let oracle: Dense = quo.iter().enumerate().filter(|(_, v)| **v != 0).map(|(k, v)| (k as i64, *v)).collect();
    let c = c_series(t).unwrap();
    assert_eq!(to_dense(&c), oracle);
    // frozen: 1 − 2q + 2q⁴ − 2q⁹
    let frozen: Dense = [(0, 1), (2, -2), (8, 2), (18, -2)].into();
    assert_eq!(oracle, frozen);
    assert_eq!(c_series(1).unwrap(), HalfExpSeries::from_terms([(0, 1)], Some(1)));
}

#[test]
fn c_series_defining_relation() {
    let t = 30;
    let c = c_series(t).unwrap();
    let q2 = pochhammer_series(4, 1, 4, t).unwrap();
    let qq = pochhammer_series(2, 1, 2, t).unwrap();
    assert!((&c * &q2).agrees_below(&(&qq * &qq), t));
}

#[test]
fn j_series_matches_dense_oracle() {
    let t = 24;
    for n in -4..=4i64 {
        let mut oracle = Dense::new();
        let mut k = (-n).max(0);
        while k * (k + 1) < t {
            let ex = k * (k + 1);
            let s = dmul(&dinv_qn(k, t - ex), &dinv_qn(n + k, t - ex), t - ex);
            for (e, v) in s {
                *oracle.entry(e + ex).or_default() += v;
            }
            k += 1;
        }
        oracle.retain(|_, v| *v != 0);
        let j = j_series(n, t).unwrap();
        assert_eq!(to_dense(&j), oracle, "J({n})");
        assert!(j.min_exp().unwrap() >= j_valuation(n));
    }
    // J(−1) starts at q¹
    assert_eq!(j_series(-1, 10).unwrap().min_exp(), Some(2));
    // k = 0 term of J(n), n ≥ 0, is 1/(q)_n: constant term 1
    assert_eq!(j_series(3, 10).unwrap().coeff(0), BigInt::from(1));
}

#[test]
fn j_series_reproduces_gq_laurent_coefficients() {
    let ctx = QContext::real(0.1).unwrap();
    for n in -5..=5 {
        let num = QContext::fourier_coefficient(|z| ctx.gq_raw(z), 0.5, n, 256);
        let ser = j_series(n, 120).unwrap().eval(ctx.q);
        assert!((num - ser).norm() < 1e-10, "n={n}: {num} vs {ser}");
    }
}

#[test]
fn tet_index_frozen_values() {
    // I_Δ(0,0) = 1 − q − 2q² − 2q³ − 2q⁴ + q⁶ + 5q⁷ + 7q⁸ + 11q⁹ + O(q¹⁰)
    let frozen: Dense = [(0, 1), (2, -1), (4, -2), (6, -2), (8, -2), (12, 1), (14, 5), (16, 7), (18, 11)].into();
    let t = 20;
    assert_eq!(below(&oracle_tet(0, 0, t), t), frozen);
    assert_eq!(to_dense(&tet_index_series(0, 0, t)), frozen);
    // I_Δ(1,0) starts −q − q² + q⁴
    let s = tet_index_series(1, 0, 10);
    assert_eq!(to_dense(&s), [(2, -1), (4, -1), (8, 1)].into());
}

#[test]
fn tet_index_matches_dense_oracle() {
    let t = 24;
    for m in -3..=3 {
        for e in -3..=3 {
            let s = tet_index_series(m, e, t);
            assert_eq!(to_dense(&s), below(&oracle_tet(m, e, t), t), "(m,e)=({m},{e})");
        }
    }
}

#[test]
fn tet_index_half_integer_exponents() {
    // I_Δ(1,1): exponents n(n+1)/2 − (n + 1/2) are half-integers
    let s = tet_index_series(1, 1, 16);
    assert!(s.terms().all(|(k, _)| k.rem_euclid(2) == 1));
    // the naive q^{-1/2} and q^{1/2} terms cancel; frozen from the dense oracle
    assert_eq!(to_dense(&s), [(3, -1), (5, -1), (7, -1), (11, 1), (13, 3), (15, 5)].into());
    assert_eq!(to_dense(&s), below(&oracle_tet(1, 1, 16), 16));
}

#[test]
fn reduced_evaluation_agrees_with_definition() {
    let t = 30;
    for m in -4..=4 {
        for e in -4..=4 {
            assert_eq!(tet_index_reduced(m, e, t), tet_index_series(m, e, t), "(m,e)=({m},{e})");
        }
    }
}

#[test]
fn valuation_and_naive_bound() {
    for m in -6..=6 {
        for e in -6..=6 {
            let s = tet_index_series(m, e, 80);
            let v = s.min_exp().expect("nonzero");
            assert_eq!(v, tet_valuation(m, e), "(m,e)=({m},{e})");
            let naive = min_degree_tet(m, e);
            assert!(naive <= num_rational::Ratio::new(v, 2), "(m,e)=({m},{e})");
            // brute-force scan of the minimisation
            let n0 = (-e).max(0);
            let scan = (n0..=n0 + 4 * m.abs() + 10)
                .map(|n| num_rational::Ratio::new(n * (n + 1) - (2 * n + e) * m, 2))
                .min()
                .unwrap();
            assert_eq!(naive, scan);
        }
    }
    assert_eq!(min_degree_tet(0, 0), num_rational::Ratio::from_integer(0));
}

#[test]
fn naive_bound_is_unbounded_below_for_positive_m() {
    assert!(min_degree_tet(2, 40) < num_rational::Ratio::from_integer(-30));
    assert!(tet_valuation(2, 40) >= 0);
}

#[test]
fn z3_rotation_carries_a_half_power() {
    let t = 40;
    for m in -3..=3 {
        for e in -3..=3 {
            let lhs = tet_index_series(m, e, t);
            let rhs = tet_index_series(-e - m, m, t - m).shift(m).sign(m);
            assert!(lhs.agrees_below(&rhs, t), "(m,e)=({m},{e})");
        }
    }
    // without the (−q^{1/2})^m factor the rotation fails whenever m ≠ 0
    assert_ne!(tet_index_series(1, 0, 10), tet_index_series(-1, 1, 10));
}

#[test]
fn i_delta_hat_basics() {
    let t = 30;
    assert_eq!(i_delta_hat(0, 0, t), tet_index_series(0, 0, 15).q_to_q2());
    let s = i_delta_hat(2, -3, t);
    assert!(s.has_integer_exponents());
    assert_eq!(s.trunc(), Some(t));
}

#[test]
fn i_delta_hat_is_fourier_coefficient_of_psi() {
    let ctx = QContext::real(0.1).unwrap();
    for m in -3..=3 {
        for e in -4..=4 {
            let num = QContext::fourier_coefficient(|z| ctx.psi(z, m).unwrap(), 1.0, e, 128);
            let ser = i_delta_hat(m, e, 80).eval(ctx.q);
            assert!((num - ser).norm() < 1e-9, "(m,e)=({m},{e}): {num} vs {ser}");
        }
    }
}

#[test]
fn pentagon_small_cases() {
    let r = verify_pentagon_series(6, 0);
    assert!(r.passed, "{r:?}");
    let r = verify_pentagon_series(10, 1);
    assert!(r.passed, "{r:?}");
    assert_eq!(r.cases, 81);
}

#[test]
fn symmetry_families() {
    for r in verify_symmetries(12, 3) {
        assert!(r.passed, "{r:?}");
    }
    for r in verify_symmetries(8, 0) {
        assert!(r.passed && r.cases == 1);
    }
}

#[test]
fn triple_j_expansion_of_tetrahedral_weight() {
    let r = verify_psi0_j(15, 2);
    assert!(r.passed, "{r:?}");
}

#[test]
fn tet_cache_is_transparent() {
    let cache = TetCache::new();
    let a = cache.get(2, -1, 20);
    let b = cache.get(2, -1, 10);
    let c = cache.get(2, -1, 30);
    assert_eq!(a, tet_index_series(2, -1, 20));
    assert_eq!(b, tet_index_series(2, -1, 10));
    assert_eq!(c, tet_index_series(2, -1, 30));
    assert_eq!(cache.hat(1, 2, 24), i_delta_hat(1, 2, 24));
}

#[test]
fn series_json_round_trip() {
    let s = tet_index_series(1, 1, 12);
    let j = serde_json::to_string(&s).unwrap();
    assert!(j.starts_with("{\"terms\":[[3,\"-1\"],[5,\"-1\"]"), "{j}");
    assert!(j.ends_with("\"trunc\":12}"), "{j}");
    let back: HalfExpSeries = serde_json::from_str(&j).unwrap();
    assert_eq!(back, s);
}

#[test]
fn series_eval_uses_principal_root() {
    let s = HalfExpSeries::from_terms([(1, 1)], None);
    let q = Complex64::new(0.04, 0.0);
    assert!((s.eval(q) - Complex64::new(0.2, 0.0)).norm() < 1e-15);
}

fn arb_series() -> impl Strategy<Value = HalfExpSeries> {
    (prop::collection::vec((-6i64..20, -50i64..50), 0..8), 4i64..30)
        .prop_map(|(terms, t)| HalfExpSeries::from_terms(terms, Some(t)))
}

proptest! {
    #[test]
    fn addition_is_associative(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn multiplication_distributes(a in arb_series(), b in arb_series(), c in arb_series()) {
        let l = &a * &(&b + &c);
        let r = &(&a * &b) + &(&a * &c);
        let t = l.trunc().unwrap().min(r.trunc().unwrap());
        prop_assert!(l.agrees_below(&r, t));
    }

    #[test]
    fn product_never_claims_unknown_terms(a in arb_series(), b in arb_series()) {
        // extending the unknown tails by arbitrary terms must not change known coefficients
        let ta = a.trunc().unwrap();
        let tb = b.trunc().unwrap();
        let extend = |s: &HalfExpSeries, extra: [(i64, i64); 2], t: i64| {
            let terms: Vec<(i64, BigInt)> = s
                .terms()
                .map(|(k, c)| (k, c.clone()))
                .chain(extra.iter().map(|(k, c)| (*k, BigInt::from(*c))))
                .collect();
            HalfExpSeries::from_terms(terms, Some(t))
        };
        let a2 = extend(&a, [(ta, 7), (ta + 3, -2)], ta + 10);
        let b2 = extend(&b, [(tb, -5), (tb + 1, 3)], tb + 10);
        let p = &a * &b;
        let p2 = &a2 * &b2;
        prop_assert!(p.agrees_below(&p2, p.trunc().unwrap()));
    }

    #[test]
    fn q_to_q2_is_a_ring_homomorphism(a in arb_series(), b in arb_series()) {
        let l = (&a * &b).q_to_q2();
        let r = &a.clone().q_to_q2() * &b.clone().q_to_q2();
        prop_assert_eq!(l.trunc(), r.trunc());
        prop_assert!(l.agrees_below(&r, l.trunc().unwrap()));
        let s = (&a + &b).q_to_q2();
        prop_assert_eq!(s, &a.clone().q_to_q2() + &b.clone().q_to_q2());
    }

    #[test]
    fn no_zero_coefficients_are_stored(a in arb_series(), b in arb_series()) {
        for s in [&a + &b, &a * &b, &a - &a] {
            prop_assert!(s.terms().all(|(k, c)| *c != BigInt::from(0) && s.trunc().map_or(true, |t| k < t)));
        }
    }

    #[test]
    fn valuation_bound_holds(m in -8i64..8, e in -8i64..8) {
        let s = tet_index_reduced(m, e, tet_valuation(m, e) + 6);
        prop_assert_eq!(s.min_exp(), Some(tet_valuation(m, e)));
    }
}
