use proptest::prelude::*;
use qindex_core::fixtures;
use qindex_core::linalg::{qi, qr, Q};
use qindex_core::nzdata::*;
use qindex_core::Error;
use std::f64::consts::PI;

fn fixture(name: &str) -> GluingData {
    fixtures::gluing(name).unwrap()
}

/// Fraction-free (Bareiss) determinant, independent of the rational elimination.
fn bareiss(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Twice the solving matrix of a quad choice, built straight from the rows.
fn solving_matrix_x2(g: &GluingData, choice: &[u8], j: usize, elim: usize) -> Vec<Vec<i128>> {
    let n = g.n;
    let rows = g.rows();
    (0..n)
        .filter(|&k| k != j)
        .chain([n, n + 1])
        .map(|k| {
            let w = if k == n + 1 { 1 } else { 2 };
            let c = |i: usize, t: usize| (w * rows[k][3 * i + t]) as i128;
            let mut r: Vec<i128> = (0..n)
                .map(|i| {
                    let f = choice[i] as usize;
                    c(i, (f + 2) % 3) - c(i, (f + 1) % 3)
                })
                .collect();
            let f = choice[elim] as usize;
            r.push(c(elim, f) - c(elim, (f + 1) % 3));
            r
        })
        .collect()
}

#[test]
fn parse_published_matrices() {
    let g = parse_gluing(r#"{"n":2,"rows":[[1,1,2,1,2,1],[1,1,0,1,0,1],[0,-1,0,1,0,0],[0,0,2,0,0,0]]}"#).unwrap();
    assert_eq!(g.a_bar, vec![vec![1, 1], vec![1, 1]]);
    assert_eq!(g.b_bar, vec![vec![1, 2], vec![1, 0]]);
    assert_eq!(g.c_bar, vec![vec![2, 1], vec![0, 1]]);
    // μ = −β₀ + α₁
    assert_eq!(g.meridian, vec![0, -1, 0, 1, 0, 0]);
    let f = fixture("fig8");
    assert_eq!(f.a_bar, vec![vec![2, 2], vec![0, 0]]);
    assert_eq!(f.b_bar, vec![vec![1, 1], vec![1, 1]]);
    assert_eq!(f.c_bar, vec![vec![0, 0], vec![2, 2]]);
}

#[test]
fn parse_rejects_bad_input() {
    let short = r#"{"n":2,"rows":[[1,1,2,1,2],[1,1,0,1,0,1],[0,-1,0,1,0,0],[0,0,2,0,0,0]]}"#;
    assert!(matches!(parse_gluing(short), Err(Error::MalformedInput(_))));
    assert!(matches!(parse_gluing("{\"n\":2"), Err(Error::MalformedInput(_))));
    let missing_row = r#"{"n":2,"rows":[[1,1,2,1,2,1],[1,1,0,1,0,1],[0,-1,0,1,0,0]]}"#;
    assert!(matches!(parse_gluing(missing_row), Err(Error::MalformedInput(_))));
    let bad_count = r#"{"n":2,"rows":[[1,1,2,1,2,1],[1,1,0,1,0,0],[0,-1,0,1,0,0],[0,0,2,0,0,0]]}"#;
    assert!(matches!(parse_gluing(bad_count), Err(Error::InconsistentData(_))));
    assert!(matches!(parse_gluing(r#"{"n":0,"rows":[[],[]]}"#), Err(Error::MalformedInput(_))));
}

#[test]
fn json_round_trip_and_edge_incidence() {
    for name in fixtures::NAMES {
        let g = fixture(name);
        assert_eq!(parse_gluing(&g.to_json()).unwrap(), g);
        for i in 0..g.n {
            for m in [&g.a_bar, &g.b_bar, &g.c_bar] {
                assert_eq!((0..g.n).map(|k| m[k][i]).sum::<i64>(), 2, "{name}");
            }
        }
    }
}

#[test]
fn reduced_ab_examples() {
    let r = reduced_ab(&fixture("fig8")).unwrap();
    assert_eq!(r.a, vec![vec![1, 1], vec![-1, -1]]);
    assert_eq!(r.b, vec![vec![-1, -1], vec![1, 1]]);
    assert_eq!(r.nu, vec![-2, -2]);
    let r = reduced_ab(&fixture("cPcbbbdei")).unwrap();
    assert_eq!(r.a, vec![vec![0, -1], vec![0, 1]]);
    assert_eq!(r.b, vec![vec![1, -1], vec![-1, 1]]);
    let mut empty = fixture("fig8");
    empty.n = 0;
    assert!(reduced_ab(&empty).is_err());
}

/// `A′B′ᵀ` is symmetric on the edge/meridian block and the only antisymmetric
/// entries of the full product are the meridian/half-longitude pairing `±1`.
#[test]
fn symplectic_upper_half_for_every_quad() {
    for name in fixtures::NAMES {
        let g = fixture(name);
        let quads = admissible_quads(&g).unwrap();
        assert!(!quads.is_empty());
        for qs in &quads {
            let n = g.n;
            let ab = qindex_core::linalg::mat_mul(&qs.a_prime, &qindex_core::linalg::transpose(&qs.b_prime));
            for r in 0..=n {
                for c in 0..=n {
                    let w = &ab[r][c] - &ab[c][r];
                    let expect = match (r, c) {
                        (r, c) if r == n - 1 && c == n => w.clone(),
                        (r, c) if r == n && c == n - 1 => w.clone(),
                        _ => qi(0),
                    };
                    assert_eq!(w, expect, "{name} {:?} row {} ({r},{c})", qs.choice, qs.dropped_row);
                }
            }
            let pairing = &ab[n - 1][n] - &ab[n][n - 1];
            assert!(pairing == qi(1) || pairing == qi(-1), "{name}: pairing {pairing}");
        }
    }
}

#[test]
fn standard_quad_selected_on_builtin_examples() {
    for name in ["cPcbbbdei", "fig8", "m003", "trefoil", "k5_2", "k6_1"] {
        let q = select_quad(&fixture(name)).unwrap();
        assert!(q.is_standard(), "{name}");
        assert_eq!((q.dropped_row, q.elim_tet), (0, 0));
    }
    let q = select_quad(&fixture("unknot")).unwrap();
    assert_eq!(q.choice, vec![1, 0]);
}

#[test]
fn search_order_is_lexicographic_and_checked_by_rank_oracle() {
    for name in fixtures::NAMES {
        let g = fixture(name);
        let quads = admissible_quads(&g).unwrap();
        let keys: Vec<_> = quads.iter().map(|q| (q.choice.clone(), q.dropped_row, q.elim_tet)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        // exactly the nonsingular choices are admissible
        let n = g.n;
        let mut count = 0;
        for code in 0..3usize.pow(n as u32) {
            let choice: Vec<u8> = (0..n).map(|i| ((code / 3usize.pow((n - 1 - i) as u32)) % 3) as u8).collect();
            for j in 0..n {
                for e in 0..n {
                    let d = bareiss(solving_matrix_x2(&g, &choice, j, e));
                    let listed = keys.contains(&(choice.clone(), j, e));
                    assert_eq!(d != 0, listed, "{name} {choice:?} {j} {e}");
                    count += (d != 0) as usize;
                    if let Some(qs) = quad_system(&g, &choice, j, e).unwrap() {
                        // the rational determinant is the oracle's divided by 2^(n+1)
                        assert_eq!(qs.det.clone() * qi(1 << (n + 1)), qi(d as i64));
                    }
                }
            }
        }
        assert_eq!(count, quads.len());
    }
}

/// Cyclically relabelling one tetrahedron's shapes of a fixture so that the
/// standard quads land on a singular choice; the search must move past them.
#[test]
fn adversarial_fixture_skips_standard_quad() {
    let g = fixture("cPcbbbdei");
    let n = g.n;
    let admissible: Vec<Vec<u8>> = admissible_quads(&g).unwrap().into_iter().map(|q| q.choice).collect();
    let singular: Vec<u8> = (0..9u8)
        .map(|c| vec![c / 3, c % 3])
        .find(|ch| !admissible.contains(ch))
        .expect("some quad choice of this fixture is singular");
    // relabel tetrahedron i so its new shape 0 is the old shape singular[i]
    let rows: Vec<Vec<i64>> = g
        .rows()
        .iter()
        .map(|r| (0..n).flat_map(|i| (0..3).map(move |t| (i, t))).map(|(i, t)| r[3 * i + (t + singular[i] as usize) % 3]).collect())
        .collect();
    let adv = GluingData::from_rows(n, &rows).unwrap();
    for j in 0..n {
        for e in 0..n {
            assert_eq!(bareiss(solving_matrix_x2(&adv, &[0, 0], j, e)), 0);
        }
    }
    let q = select_quad(&adv).unwrap();
    assert!(!q.is_standard());
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

#[test]
fn solve_angles_matches_worked_examples() {
    let params = [(0.7, 0.2, 0.3, -0.4), (1.1, -0.3, 0.05, 0.9), (PI / 3.0, 0.0, 0.0, 0.0)];
    let g = fixture("cPcbbbdei");
    let q = quad_system(&g, &[0, 0], 1, 1).unwrap().unwrap();
    for &(a0, e0, mu, la) in &params {
        let s = solve_angles(&g, &q, &[a0, 0.0], &[e0, -e0], mu, la).unwrap();
        assert!(close(s.alpha[0], a0));
        assert!(close(s.alpha[1], PI - a0 - la / 2.0 + mu));
        assert!(close(s.beta[0], PI - a0 - la / 2.0));
        assert!(close(s.beta[1], e0 - la / 2.0));
        assert!(close(s.gamma[0], la / 2.0));
        assert!(close(s.gamma[1], a0 - e0 + la - mu));
        assert!(close(s.eps[0], e0) && close(s.eps[1], -e0));
        assert!(close(s.mu, mu) && close(s.lambda, la));
    }
    let g = fixture("fig8");
    let q = quad_system(&g, &[0, 0], 1, 1).unwrap().unwrap();
    for &(a0, e0, mu, la) in &params {
        let s = solve_angles(&g, &q, &[a0, 0.0], &[e0, -e0], mu, la).unwrap();
        assert!(close(s.alpha[1], a0 + la / 2.0 - mu));
        assert!(close(s.beta[0], PI - 2.0 * a0 + e0 - la / 2.0));
        assert!(close(s.beta[1], PI - 2.0 * a0 - la / 2.0 + 2.0 * mu));
        assert!(close(s.gamma[0], a0 - e0 + la / 2.0));
        assert!(close(s.gamma[1], a0 - mu));
    }
    // the regular structure of the figure-eight knot complement
    let s = solve_angles(&g, &q, &[PI / 3.0, 0.0], &[0.0, 0.0], 0.0, 0.0).unwrap();
    for i in 0..2 {
        for t in 0..3 {
            assert!(close(s.angle(i, t), PI / 3.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn solve_then_parametrize_round_trip(idx in 0usize..7, qa in proptest::collection::vec(-3.0f64..3.0, 4),
                                          eps in proptest::collection::vec(-1.0f64..1.0, 4),
                                          mu in -2.0f64..2.0, la in -2.0f64..2.0, pick in 0usize..1000) {
        let g = fixture(fixtures::NAMES[idx]);
        let quads = admissible_quads(&g).unwrap();
        let q = &quads[pick % quads.len()];
        let n = g.n;
        let mut e: Vec<f64> = eps[..n].to_vec();
        let others: f64 = (0..n).filter(|&k| k != q.dropped_row).map(|k| e[k]).sum();
        e[q.dropped_row] = -others;
        let s = solve_angles(&g, q, &qa[..n], &e, mu, la).unwrap();
        for i in 0..n {
            prop_assert!((s.alpha[i] + s.beta[i] + s.gamma[i] - PI).abs() < 1e-12);
        }
        prop_assert!(s.eps.iter().sum::<f64>().abs() < 1e-11);
        let (qa2, e2, mu2, la2) = parametrize(q, &s);
        for i in 0..n {
            if i != q.elim_tet { prop_assert!((qa2[i] - qa[i]).abs() < 1e-12); }
            prop_assert!((e2[i] - e[i]).abs() < 1e-11);
        }
        prop_assert!((mu2 - mu).abs() < 1e-12 && (la2 - la).abs() < 1e-12);
    }
}

#[test]
fn strict_angle_structures() {
    match find_strict_angles(&fixture("fig8"), 0.0, 0.0) {
        StrictOutcome::Strict(s) => {
            assert!((s.min_angle() - PI / 3.0).abs() < 1e-12);
            // substitution check of every equality constraint
            for i in 0..2 {
                assert!((s.alpha[i] + s.beta[i] + s.gamma[i] - PI).abs() < 1e-12);
            }
            assert!(s.eps.iter().all(|e| e.abs() < 1e-10));
            assert!(s.mu.abs() < 1e-10 && s.lambda.abs() < 1e-10);
        }
        other => panic!("{other:?}"),
    }
    for name in ["m003", "k5_2", "k6_1"] {
        let StrictOutcome::Strict(s) = find_strict_angles(&fixture(name), 0.0, 0.0) else { panic!("{name}") };
        assert!(s.strict && s.min_angle() > 0.0);
        assert!(s.eps.iter().all(|e| e.abs() < 1e-10));
    }
    // the unknot triangulation forces an edge angle of 2π
    assert!(matches!(find_strict_angles(&fixture("unknot"), 0.0, 0.0), StrictOutcome::Infeasible { .. }));
    // an n = 1 triangulation with a degenerate edge: same answer every time
    let one = GluingData::from_rows(1, &[vec![2, 2, 2], vec![1, -1, 0], vec![0, 2, -2]]).unwrap();
    let a = format!("{:?}", find_strict_angles(&one, 0.0, 0.0));
    let b = format!("{:?}", find_strict_angles(&one, 0.0, 0.0));
    assert_eq!(a, b);
}

#[test]
fn strict_angles_with_peripheral_holonomy() {
    let g = fixture("fig8");
    let StrictOutcome::Strict(s) = find_strict_angles(&g, 0.3, -0.2) else { panic!() };
    assert!((s.mu - 0.3).abs() < 1e-10 && (s.lambda + 0.2).abs() < 1e-10);
    assert!(s.min_angle() > 0.0);
}

#[test]
fn compiled_integrand_shape() {
    for name in fixtures::NAMES {
        let g = fixture(name);
        for q in admissible_quads(&g).unwrap().iter().take(8) {
            let bi = compile_integrand(&g, q).unwrap();
            assert_eq!(bi.factor_count(), 3 * g.n);
            assert_eq!(bi.dim, g.n - 1);
            assert_eq!(bi.c_power as usize, g.n);
            assert!(bi.tet_sums_balanced(), "{name}");
            for f in bi.all_factors() {
                for c in [&f.c0, &f.c_mu, &f.c_lambda] {
                    assert!((c * qi(4)).is_integer(), "{name}: {c}");
                }
            }
        }
    }
}

#[test]
fn cpcbbbdei_singularity_rays() {
    let g = fixture("cPcbbbdei");
    let bi = compile_integrand(&g, &select_quad(&g).unwrap()).unwrap();
    let rays = singularity_rays(&bi);
    let expect = [(0, 1, 1, 0), (0, -1, 1, 0), (0, 1, -1, 1), (0, -1, -1, 1), (-1, 1, -1, 1), (1, -1, -1, 1)];
    for (r, s, e, t) in expect {
        assert!(rays.contains(&QRay::int(r, s, e, t)), "missing {r} {s} {e} {t}");
    }
    assert_eq!(rays.len(), 6);
    // scaled notation: −qΣ_{0,1}, −q^{−1}Σ_{1,−1}
    let scaled: Vec<_> = rays.iter().filter_map(|r| Some((r.eps_t()?.0, r.eps_t()?.1, r.scaled_form()?))).collect();
    assert!(scaled.contains(&(0, 1, qi(1))));
    assert!(scaled.contains(&(1, -1, qi(-1))));
}

#[test]
fn rays_of_integrand_without_opposing_factors() {
    let bi = BalancedIntegrand::new(1, vec![Factor::new(qi(0), qi(1), qi(0), vec![1]), Factor::new(qr(1, 2), qi(0), qi(1), vec![2])], 1);
    assert!(singularity_rays(&bi).is_empty());
}

#[test]
fn ray_membership() {
    let ctx = qindex_core::QContext::real(0.1).unwrap();
    let ray = QRay::int(0, 1, -1, 1);
    // e_λ = −q·q² lies on −qΣ_{0,1}; e_λ = −q^{−1} does not
    let on = num_complex::Complex64::new(3.0, 0.0);
    assert!(ray.contains(num_complex::Complex64::new(0.7, 0.0), on, ctx.h, 1e-9));
    assert!(!ray.contains(num_complex::Complex64::new(0.7, 0.0), num_complex::Complex64::new(-1.0, 0.0), ctx.h, 1e-9));
    let _: Q = qi(0);
}
