//! Exact truncated q-series: Pochhammer products, `c(q)`, `J(n)`, the
//! tetrahedron index and the identities relating them.
//!
//! Series constructors take their truncation order in half-units of `q`
//! (the exponent of `ζ = q^{1/2}`). The verifiers take orders in whole powers
//! of `q`, matching how the identities are usually quoted.

mod series;
mod tet;
mod verify;

pub use series::HalfExpSeries;
pub use tet::{
    i_delta_hat, min_degree_tet, tet_index_reduced, tet_index_series, tet_valuation, TetCache,
};
pub use verify::{
    psi0_j_sum, verify_pentagon_series, verify_psi0_j, verify_symmetries, SeriesReport,
};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};

/// `(±q^{a/2}; q^{step/2})_∞` truncated below `q^{order/2}`.
///
/// `sign = +1` gives factors `1 − q^{…}`, `sign = −1` gives `1 + q^{…}`.
pub fn pochhammer_series(a: i64, sign: i8, step: i64, order: i64) -> Result<HalfExpSeries> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!("sign must be ±1, got {sign}")));
    }
    if a < 0 || step <= 0 || order <= 0 {
        return Err(Error::InvalidArgument(format!(
            "need a >= 0, step > 0, order > 0 (a={a}, step={step}, order={order})"
        )));
    }
    if a == 0 && sign == 1 {
        return Err(Error::InvalidArgument("factor (1 - q^0) vanishes identically".into()));
    }
    let mut acc = HalfExpSeries::one().truncate(order);
    let mut e = a;
    while e < order {
        let factor = if e == 0 {
            // sign is −1 here: the constant factor is 2
            HalfExpSeries::monomial(0, 2)
        } else {
            HalfExpSeries::from_terms([(0, BigInt::one()), (e, BigInt::from(-sign))], None)
        };
        acc = acc.mul_trunc(&factor, Some(order));
        e += step;
    }
    Ok(acc)
}

/// `1/(q;q)_n` truncated below half-unit order `order`.
pub fn inv_q_pochhammer_finite(n: i64, order: i64) -> HalfExpSeries {
    let mut acc = HalfExpSeries::one().truncate(order);
    for i in 1..=n {
        let step = 2 * i;
        if step >= order {
            break;
        }
        let geo = HalfExpSeries::from_terms((0..).map(|k| k * step).take_while(|e| *e < order).map(|e| (e, 1)), Some(order));
        acc = acc.mul_trunc(&geo, Some(order));
    }
    acc
}

/// `c(q) = (q;q)_∞² / (q²;q²)_∞` truncated below half-unit order `order`.
pub fn c_series(order: i64) -> Result<HalfExpSeries> {
    if order <= 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    let qq = pochhammer_series(2, 1, 2, order)?;
    let q2q2 = pochhammer_series(4, 1, 4, order)?;
    let inv = q2q2.inverse().expect("unit constant term");
    Ok((&qq * &qq).mul_trunc(&inv, Some(order)))
}

/// Valuation of `J(n)` in half-units: `0` for `n >= 0`, `n(n−1)` otherwise.
pub fn j_valuation(n: i64) -> i64 {
    if n >= 0 {
        0
    } else {
        n * (n - 1)
    }
}

/// `J(n)(q) = Σ_{k ≥ (−n)₊} q^{k(k+1)/2} / ((q)_k (q)_{n+k})`, the Laurent
/// coefficients of `G_q(z)` on `0 < |z| < 1`.
pub fn j_series(n: i64, order: i64) -> Result<HalfExpSeries> {
    if order <= 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    let mut acc = HalfExpSeries::big_o(order);
    let mut k = (-n).max(0);
    loop {
        let ex = k * (k + 1);
        if ex >= order {
            break;
        }
        let rest = order - ex;
        let term = inv_q_pochhammer_finite(k, rest).mul_trunc(&inv_q_pochhammer_finite(n + k, rest), Some(rest));
        acc = &acc + &term.shift(ex);
        k += 1;
    }
    Ok(acc)
}
