use std::collections::HashMap;
use std::sync::RwLock;

use num_rational::Ratio;

use super::{inv_q_pochhammer_finite, HalfExpSeries};

fn term_exp(m: i64, e: i64, n: i64) -> i64 {
    // n(n+1)/2 − (n + e/2)m, in half-units
    n * (n + 1) - (2 * n + e) * m
}

/// `min_{n ≥ (−e)₊} n(n+1)/2 − (n + e/2)m`, the smallest summand exponent in
/// the defining sum of `I_Δ(m,e)`.
///
/// This is a valid lower bound for the valuation, but cancellations make it
/// weak (unbounded below in `e`) when `m > 0`; see [`tet_valuation`].
pub fn min_degree_tet(m: i64, e: i64) -> Ratio<i64> {
    Ratio::new(min_degree_tet_half(m, e), 2)
}

pub(crate) fn min_degree_tet_half(m: i64, e: i64) -> i64 {
    let n0 = (-e).max(0);
    // the exponent is convex in n with its minimum at n = m − 1/2
    let n = n0.max(m - 1);
    term_exp(m, e, n)
}

/// Exact valuation of `I_Δ(m,e)` in half-units.
///
/// The three-element orbit `(m,e) → (−e−m, m) → (e, −e−m)` always contains a
/// representative with `m ≤ 0`, where the defining sum has a single summand of
/// minimal exponent.
pub fn tet_valuation(m: i64, e: i64) -> i64 {
    if m <= 0 {
        min_degree_tet_half(m, e)
    } else if -e - m <= 0 {
        m + tet_valuation(-e - m, m)
    } else {
        -e + tet_valuation(e, -e - m)
    }
}

/// `I_Δ(m,e)(q)` summed straight from its definition, truncated below
/// half-unit order `order`.
pub fn tet_index_series(m: i64, e: i64, order: i64) -> HalfExpSeries {
    let n0 = (-e).max(0);
    let mut acc = HalfExpSeries::big_o(order);
    let mut n = n0;
    loop {
        let ex = term_exp(m, e, n);
        if ex >= order && n >= m {
            break;
        }
        if ex < order {
            let rest = order - ex;
            let t = inv_q_pochhammer_finite(n, rest)
                .mul_trunc(&inv_q_pochhammer_finite(n + e, rest), Some(rest))
                .shift(ex)
                .sign(n);
            acc = &acc + &t;
        }
        n += 1;
    }
    acc
}

/// Same series as [`tet_index_series`], evaluated on the orbit representative
/// with `m ≤ 0` so that no cancelling terms are summed.
pub fn tet_index_reduced(m: i64, e: i64, order: i64) -> HalfExpSeries {
    if m <= 0 {
        tet_index_series(m, e, order)
    } else if -e - m <= 0 {
        // I(m,e) = (−q^{1/2})^m I(−e−m, m)
        tet_index_reduced(-e - m, m, order - m).shift(m).sign(m)
    } else {
        // I(m,e) = (−q^{1/2})^{−e} I(e, −e−m)
        tet_index_reduced(e, -e - m, order + e).shift(-e).sign(e)
    }
}

/// `I^Δ(m,e)(q) = (−q)^e I_Δ(m,e)(q²)`, truncated below half-unit `order`.
pub fn i_delta_hat(m: i64, e: i64, order: i64) -> HalfExpSeries {
    let inner = (order - 2 * e + 1).div_euclid(2);
    tet_index_reduced(m, e, inner).q_to_q2().shift(2 * e).sign(e).truncate(order)
}

/// Thread-safe memo of `I_Δ(m,e)` series keyed by `(m, e)`.
///
/// A cached entry is reused whenever it was computed to at least the requested
/// order; otherwise it is recomputed and replaced.
#[derive(Default)]
pub struct TetCache {
    map: RwLock<HashMap<(i64, i64), HalfExpSeries>>,
}

impl TetCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `I_Δ(m,e)` truncated below half-unit `order`.
    pub fn get(&self, m: i64, e: i64, order: i64) -> HalfExpSeries {
        if let Some(s) = self.map.read().expect("cache lock").get(&(m, e)) {
            if s.trunc().is_some_and(|t| t >= order) {
                return s.clone().truncate(order);
            }
        }
        let s = tet_index_reduced(m, e, order);
        let mut w = self.map.write().expect("cache lock");
        let keep = w.get(&(m, e)).is_some_and(|old| old.trunc() >= s.trunc());
        if !keep {
            w.insert((m, e), s.clone());
        }
        s
    }

    /// `I^Δ(m,e)` truncated below half-unit `order`.
    pub fn hat(&self, m: i64, e: i64, order: i64) -> HalfExpSeries {
        let inner = (order - 2 * e + 1).div_euclid(2);
        self.get(m, e, inner).q_to_q2().shift(2 * e).sign(e).truncate(order)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
