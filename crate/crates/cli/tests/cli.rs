use std::process::{Command, Output};

use qindex_core::fixtures;

fn qindex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qindex")).args(args).env_remove("QINDEX_THREADS").output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// `Σ_{n≥0} (−1)^n q^{n(n+1)/2} / (q;q)_n²` in whole powers of `q`, below `q^len`.
fn tet00_oracle(len: usize) -> Vec<i64> {
    let mul = |a: &[i64], b: &[i64]| {
        let mut c = vec![0i64; len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate().take(len - i) {
                c[i + j] += x * y;
            }
        }
        c
    };
    // 1/(1 − q^k) as a truncated geometric series
    let geo = |k: usize| (0..len).map(|i| i64::from(i % k == 0)).collect::<Vec<_>>();
    let mut total = vec![0i64; len];
    let mut inv = vec![0i64; len];
    inv[0] = 1;
    let mut n = 0usize;
    while n * (n + 1) / 2 < len {
        if n > 0 {
            inv = mul(&inv, &geo(n));
        }
        let sq = mul(&inv, &inv);
        let shift = n * (n + 1) / 2;
        let sign = if n % 2 == 0 { 1 } else { -1 };
        for i in shift..len {
            total[i] += sign * sq[i - shift];
        }
        n += 1;
    }
    total
}

#[test]
fn tetindex_matches_the_defining_sum() {
    let out = qindex(&["tetindex", "0", "0", "--order", "12"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["series"]["trunc"], 12);
    let want = tet00_oracle(6);
    let mut got = vec![0i64; 6];
    for t in v["series"]["terms"].as_array().unwrap() {
        let k = t[0].as_i64().unwrap();
        assert_eq!(k % 2, 0);
        got[(k / 2) as usize] = t[1].as_str().unwrap().parse().unwrap();
    }
    assert_eq!(got, want);
    assert_eq!(&want[..3], &[1, -1, -2]);
}

#[test]
fn tetindex_at_order_one_is_the_constant() {
    let out = qindex(&["tetindex", "0", "0", "--order", "1"]);
    assert_eq!(json(&out)["series"]["terms"], serde_json::json!([[0, "1"]]));
    let table = qindex(&["tetindex", "0", "0", "--order", "12", "--output", "table"]);
    assert!(String::from_utf8_lossy(&table.stdout).starts_with("1 - q - 2q^2"));
}

#[test]
fn usage_errors_exit_2() {
    let out = qindex(&["tetindex", "0", "0", "--bogus"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("Usage"));
    assert_eq!(code(&qindex(&["examples", "run", "nosuch"])), 2);
    assert_eq!(code(&qindex(&["verify", "nosuch"])), 2);
}

#[test]
fn guards_on_q_and_order() {
    assert_eq!(code(&qindex(&["tetindex", "0", "0", "--order", "65"])), 2);
    assert_eq!(code(&qindex(&["tetindex", "0", "0", "--order", "65", "--unsafe-order"])), 0);
    assert_eq!(code(&qindex(&["integral", "unknot", "--q", "0.35"])), 2);
    assert_eq!(code(&qindex(&["integral", "unknot", "--q", "0.2+0.25i"])), 2);
    let out = qindex(&["integral", "unknot", "--q", "0.35", "--unsafe-q", "--s", "0.6+0.8i"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn bad_input_exits_3() {
    let out = qindex(&["index3d", "no-such-manifold", "0", "0"]);
    assert_eq!(code(&out), 3);
    let path = std::env::temp_dir().join(format!("qindex-bad-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"n": 1, "rows": [[1, 2]]}"#).unwrap();
    let out = qindex(&["index3d", path.to_str().unwrap(), "0", "0"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn gluing_file_gives_the_fixture_result() {
    let path = std::env::temp_dir().join(format!("qindex-fig8-{}.json", std::process::id()));
    std::fs::write(&path, fixtures::gluing("fig8").unwrap().to_json()).unwrap();
    let a = json(&qindex(&["index3d", path.to_str().unwrap(), "1", "0"]));
    std::fs::remove_file(&path).ok();
    let b = json(&qindex(&["index3d", "fig8", "1", "0"]));
    assert_eq!(a["series"], b["series"]);
}

#[test]
fn non_one_efficient_index_exits_4() {
    let out = qindex(&["index3d", "cPcbbbdei", "0", "0"]);
    assert_eq!(code(&out), 4);
    assert!(out.stdout.is_empty());
    assert!(stderr(&out).contains("no strict angle structure"), "{}", stderr(&out));
    assert_eq!(code(&qindex(&["fourier", "cPcbbbdei", "--mmax", "0", "--emax", "0"])), 4);
}

#[test]
fn index3d_output_carries_its_metadata() {
    let v = json(&qindex(&["index3d", "fig8", "0", "0", "--order", "12"]));
    assert_eq!(v["convention"], "derived");
    assert_eq!(v["order"], 12);
    assert_eq!(v["label"], serde_json::json!(["0", "0"]));
    let terms = &v["series"]["terms"];
    assert_eq!(terms, &serde_json::json!([[0, "1"], [4, "-2"], [8, "-3"]]));
}

#[test]
fn integral_output_carries_error_and_contour() {
    let v = json(&qindex(&["integral", "fig8", "--q", "0.1", "--s", "0.6+0.8i", "--t", "-1"]));
    assert!(v["estErr"].as_f64().unwrap() < 1e-9);
    assert!(v["contour"]["radii"].is_array());
    let re = v["value"]["re"].as_f64().unwrap();
    let hand = json(&qindex(&["integral", "fig8", "--q", "0.1", "--s", "0.6+0.8i", "--t", "-1", "--hand"]));
    assert!((re - hand["value"]["re"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn output_is_identical_across_thread_counts() {
    for args in [&["index3d", "m003", "1", "-1"][..], &["fourier", "fig8", "--mmax", "1", "--emax", "1"], &["integral", "k5_2", "--s", "0.6+0.8i"]] {
        let base = qindex(&[args, &["--threads", "1"]].concat()).stdout;
        for n in ["3", "8"] {
            assert_eq!(qindex(&[args, &["--threads", n]].concat()).stdout, base, "{args:?} with {n} threads");
        }
        let env = Command::new(env!("CARGO_BIN_EXE_qindex")).args(args).env("QINDEX_THREADS", "2").output().unwrap();
        assert_eq!(env.stdout, base);
    }
    let bad = Command::new(env!("CARGO_BIN_EXE_qindex")).args(["tetindex", "0", "0"]).env("QINDEX_THREADS", "0").output().unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn unknot_example_passes() {
    let out = qindex(&["examples", "run", "unknot", "--output", "table"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().last().unwrap() == "PASS unknot", "{text}");
}

#[test]
fn examples_are_listed_and_run() {
    let v = json(&qindex(&["examples", "list"]));
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["unknot", "fig8", "m003", "cPcbbbdei"]);
    let out = qindex(&["examples", "run", "cPcbbbdei"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["status"], "PASS");
}

#[test]
fn pentagon_series_suite_passes() {
    let out = qindex(&["verify", "pentagon-series", "--order", "10", "--bound", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["reports"][0]["cases"], 81);
}

#[test]
fn numerical_suites_pass() {
    for suite in ["symmetries", "dopsum", "psi0", "inversion", "pentagon-integral"] {
        let out = qindex(&["verify", suite, "--samples", "10"]);
        assert_eq!(code(&out), 0, "{suite}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn failed_verification_exits_5() {
    // a 2 x 2 torus grid aliases every key onto four points
    let out = qindex(&["verify", "thm2", "--fixtures", "fig8", "--grid", "2", "--bound", "1"]);
    assert_eq!(code(&out), 5);
    assert_eq!(json(&out)["status"], "FAIL");
}

#[test]
fn rays_of_the_non_one_efficient_fixture() {
    let v = json(&qindex(&["rays", "cPcbbbdei"]));
    let got: Vec<serde_json::Value> = v["rays"].as_array().unwrap().iter().map(|r| r["rset"].clone()).collect();
    for (r, s, e, t) in fixtures::CPCBBBDEI_RAYS {
        assert!(got.contains(&serde_json::json!([r, s, e, t])), "missing {r} {s} {e} {t}");
    }
}
