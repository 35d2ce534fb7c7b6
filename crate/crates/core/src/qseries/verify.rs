use serde::Serialize;

use super::{c_series, j_series, j_valuation, tet_index_series, tet_valuation, HalfExpSeries, TetCache};

/// Outcome of an exact series identity check.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub suite: String,
    /// Order in whole powers of `q` below which coefficients were compared.
    pub order: i64,
    pub cases: usize,
    pub passed: bool,
    pub first_failure: Option<String>,
}

impl SeriesReport {
    fn new(suite: &str, order: i64) -> Self {
        Self { suite: suite.into(), order, cases: 0, passed: true, first_failure: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.passed {
            self.passed = false;
            self.first_failure = Some(what());
        }
    }
}

/// Indices `k` with `val(k) < order`, for a convex integer valuation.
///
/// Scans outward from `start` and stops in each direction once the valuation
/// is at least `order` and no longer decreasing.
pub(crate) fn convex_support(start: i64, order: i64, val: impl Fn(i64) -> i64) -> Vec<i64> {
    const CAP: i64 = 100_000;
    let mut out = Vec::new();
    for dir in [1i64, -1] {
        let mut k = if dir == 1 { start } else { start - 1 };
        let mut prev = val(k - dir);
        loop {
            let v = val(k);
            if v < order {
                out.push(k);
            } else if v >= prev {
                break;
            }
            prev = v;
            k += dir;
            assert!((k - start).abs() < CAP, "runaway summation range");
        }
    }
    out.sort_unstable();
    out
}

/// Checks
/// `I_Δ(m₁−e₂,e₁) I_Δ(m₂−e₁,e₂) = Σ_{e₃} q^{e₃} I_Δ(m₁,e₁+e₃) I_Δ(m₂,e₂+e₃) I_Δ(m₁+m₂,e₃)`
/// below `q^order` for all `|m₁|,|m₂|,|e₁|,|e₂| ≤ bound`.
pub fn verify_pentagon_series(order: i64, bound: i64) -> SeriesReport {
    let cache = TetCache::new();
    let mut rep = SeriesReport::new("pentagon-series", order);
    let t = 2 * order;
    let r = -bound..=bound;
    for m1 in r.clone() {
        for m2 in r.clone() {
            for e1 in r.clone() {
                for e2 in r.clone() {
                    let lhs = pentagon_lhs(&cache, m1, m2, e1, e2, t);
                    let rhs = pentagon_rhs(&cache, m1, m2, e1, e2, t);
                    let diff = lhs.first_difference_below(&rhs, t);
                    rep.record(diff.is_none(), || {
                        format!(
                            "(m1,m2,e1,e2)=({m1},{m2},{e1},{e2}) first differs at q^{}",
                            diff.unwrap_or(0) as f64 / 2.0
                        )
                    });
                }
            }
        }
    }
    rep
}

fn pentagon_lhs(cache: &TetCache, m1: i64, m2: i64, e1: i64, e2: i64, t: i64) -> HalfExpSeries {
    let (a, b) = ((m1 - e2, e1), (m2 - e1, e2));
    let (va, vb) = (tet_valuation(a.0, a.1), tet_valuation(b.0, b.1));
    let sa = cache.get(a.0, a.1, t - vb);
    let sb = cache.get(b.0, b.1, t - va);
    sa.mul_trunc(&sb, Some(t))
}

fn pentagon_rhs(cache: &TetCache, m1: i64, m2: i64, e1: i64, e2: i64, t: i64) -> HalfExpSeries {
    let val = |e3: i64| {
        tet_valuation(m1, e1 + e3) + tet_valuation(m2, e2 + e3) + tet_valuation(m1 + m2, e3) + 2 * e3
    };
    let mut acc = HalfExpSeries::big_o(t);
    for e3 in convex_support(0, t, val) {
        let args = [(m1, e1 + e3), (m2, e2 + e3), (m1 + m2, e3)];
        let vals: Vec<i64> = args.iter().map(|(m, e)| tet_valuation(*m, *e)).collect();
        let total: i64 = vals.iter().sum();
        let rest = t - 2 * e3;
        let mut term = HalfExpSeries::one();
        for (i, (m, e)) in args.iter().enumerate() {
            let own = rest - (total - vals[i]);
            term = term.mul_trunc(&cache.get(*m, *e, own), Some(rest));
        }
        acc = &acc + &term.shift(2 * e3);
    }
    acc
}

fn hat_literal(m: i64, e: i64, t: i64) -> HalfExpSeries {
    let inner = (t - 2 * e + 1).div_euclid(2);
    tet_index_series(m, e, inner).q_to_q2().shift(2 * e).sign(e).truncate(t)
}

/// `(−q)^k · I^Δ(m,e)`, known below half-unit `t`.
fn neg_q_pow_hat(k: i64, m: i64, e: i64, t: i64) -> HalfExpSeries {
    hat_literal(m, e, t - 2 * k).shift(2 * k).sign(k)
}

/// Checks the `Z/2` and `Z/3` symmetries of `I^Δ` below `q^order` for
/// `|m|,|e| ≤ bound`, summing every series straight from its definition:
///
/// * `I^Δ(m,e) = (−q)^{e+m} I^Δ(−e,−m)`
/// * `I^Δ(m,e) = (−q)^e I^Δ(−e−m,m) = (−q)^{e+m} I^Δ(e,−e−m)`
/// * `I^Δ(m,e) = I^Δ(−m,m+e)`
pub fn verify_symmetries(order: i64, bound: i64) -> Vec<SeriesReport> {
    let t = 2 * order;
    let mut z2 = SeriesReport::new("symmetry-z2", order);
    let mut z3 = SeriesReport::new("symmetry-z3", order);
    let mut z2b = SeriesReport::new("symmetry-z2-second", order);
    for m in -bound..=bound {
        for e in -bound..=bound {
            let base = hat_literal(m, e, t);
            let fail = |name: &'static str| move || format!("{name} fails at (m,e)=({m},{e})");
            let a = neg_q_pow_hat(e + m, -e, -m, t);
            z2.record(base.agrees_below(&a, t), fail("Z/2"));
            let b = neg_q_pow_hat(e, -e - m, m, t);
            let c = neg_q_pow_hat(e + m, e, -e - m, t);
            z3.record(base.agrees_below(&b, t) && base.agrees_below(&c, t), fail("Z/3"));
            let d = hat_literal(-m, m + e, t);
            z2b.record(base.agrees_below(&d, t), fail("second Z/2"));
        }
    }
    vec![z2, z3, z2b]
}

/// `c(q) Σ_{k₁−k₃=e, k₃−k₂=m} (−q)^{k₁} J(k₁) J(k₂) J(k₃)` below half-unit `t`.
pub fn psi0_j_sum(m: i64, e: i64, t: i64) -> HalfExpSeries {
    let ks = |k: i64| [e + k, k - m, k];
    let val = |k: i64| {
        let [k1, k2, k3] = ks(k);
        2 * k1 + j_valuation(k1) + j_valuation(k2) + j_valuation(k3)
    };
    let mut acc = HalfExpSeries::big_o(t);
    for k in convex_support(0, t, val) {
        let idx = ks(k);
        let vals = idx.map(j_valuation);
        let total: i64 = vals.iter().sum();
        let rest = t - 2 * idx[0];
        let mut term = HalfExpSeries::one();
        for i in 0..3 {
            let own = rest - (total - vals[i]);
            let j = j_series(idx[i], own).expect("positive order");
            term = term.mul_trunc(&j, Some(rest));
        }
        acc = &acc + &term.shift(2 * idx[0]).sign(idx[0]);
    }
    let c = c_series(t.max(1)).expect("positive order");
    acc.mul_trunc(&c, Some(t))
}

/// Checks the triple-`J` expansion of the tetrahedral weight against `I^Δ`
/// below `q^order` for `|m|,|e| ≤ bound`.
pub fn verify_psi0_j(order: i64, bound: i64) -> SeriesReport {
    let t = 2 * order;
    let mut rep = SeriesReport::new("psi0-j-sum", order);
    for m in -bound..=bound {
        for e in -bound..=bound {
            let lhs = psi0_j_sum(m, e, t);
            let rhs = hat_literal(m, e, t);
            rep.record(lhs.agrees_below(&rhs, t), || format!("mismatch at (m,e)=({m},{e})"));
        }
    }
    rep
}
