use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

use super::{qser, BalancedIntegrand};
use crate::linalg::{qi, Q};

/// The shifted q-ray `{(e_μ, e_λ) : e_μ^r e_λ^s ∈ (−q)^c q^ℕ}`.
///
/// With `c` an integer this is `e_μ^r e_λ^s ∈ ε q^t q^ℕ` with `ε = (−1)^c`,
/// `t = c`, see [`QRay::eps_t`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct QRay {
    #[serde(serialize_with = "qser::one")]
    pub r: Q,
    #[serde(serialize_with = "qser::one")]
    pub s: Q,
    #[serde(serialize_with = "qser::one")]
    pub c: Q,
}

impl QRay {
    pub fn new(r: Q, s: Q, c: Q) -> Self {
        Self { r, s, c }
    }

    pub fn int(r: i64, s: i64, eps: i8, t: i64) -> Self {
        assert!(eps == 1 || eps == -1);
        assert!((eps == 1) == (t.rem_euclid(2) == 0), "sign must be (-1)^t to be a (-q)-power");
        Self::new(qi(r), qi(s), qi(t))
    }

    /// `(r, s, ε, t)` when all entries are integers.
    pub fn eps_t(&self) -> Option<(i64, i64, i8, i64)> {
        if !(self.r.is_integer() && self.s.is_integer() && self.c.is_integer()) {
            return None;
        }
        let t = self.c.to_integer().to_i64()?;
        let eps = if t.is_even() { 1 } else { -1 };
        Some((self.r.to_integer().to_i64()?, self.s.to_integer().to_i64()?, eps, t))
    }

    /// The same ray in the scaled form `(−q)^d Σ_{r,s}`, where the shift
    /// multiplies the `e_λ` coordinate (or `e_μ` when `s = 0`): `d = c/s`.
    pub fn scaled_form(&self) -> Option<Q> {
        if !self.s.is_zero() {
            Some(&self.c / &self.s)
        } else if !self.r.is_zero() {
            Some(&self.c / &self.r)
        } else {
            None
        }
    }

    /// True if `(e_μ, e_λ) = ((−q)^{μ̂}, (−q)^{λ̂})` lies on the ray, up to `tol`
    /// in the exponent of `q`.
    pub fn contains(&self, mu_hat: num_complex::Complex64, lam_hat: num_complex::Complex64, h: num_complex::Complex64, tol: f64) -> bool {
        use crate::linalg::to_f64;
        // e_μ^r e_λ^s (−q)^{−c} = q^n  ⇔  (r μ̂ + s λ̂ − c) h = n log q
        let z = (mu_hat * to_f64(&self.r) + lam_hat * to_f64(&self.s) - to_f64(&self.c)) * h;
        let logq = (-h.exp()).ln();
        // log q is only defined up to 2πi; compare moduli and phases separately
        let n = z.re / logq.re;
        let k = n.round();
        if k < -0.5 || (n - k).abs() > tol {
            return false;
        }
        let phase = z.im - k * logq.im;
        let turns = phase / (2.0 * std::f64::consts::PI);
        (turns - turns.round()).abs() < tol
    }
}

impl fmt::Display for QRay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.eps_t() {
            Some((r, s, e, t)) => write!(f, "e_mu^{r} e_lambda^{s} in {}q^{t} q^N", if e < 0 { "-" } else { "" }),
            None => write!(f, "e_mu^({}) e_lambda^({}) in (-q)^({}) q^N", self.r, self.s, self.c),
        }
    }
}

/// Shifted q-rays on which the contour can be pinched.
///
/// * A constant factor `G((−q)^{c₀} e_μ^{c_μ} e_λ^{c_λ})` has poles on
///   `e_μ^{−c_μ} e_λ^{−c_λ} ∈ (−q)^{c₀} q^ℕ`.
/// * A factor `G(P_i y^{a w})` with poles escaping outward and a factor
///   `G(P_j y^{−b w})` (`a, b > 0`, `w` primitive) with poles escaping inward
///   collide when `P_i^b P_j^a ∈ q^{−ℕ}`; writing `P_i^b P_j^a = (−q)^C e_μ^R e_λ^S`
///   this is the ray `(−R, −S, C)`. The set `q^{−(aℕ+bℕ)}` is replaced by
///   `q^{−ℕ}` when `a` or `b` exceeds one, so such rays are a superset.
///
/// Only pairs of factors with opposite parallel monomials are considered; in one
/// variable this is every pair, in several it misses pinches that need more than
/// two factors.
pub fn singularity_rays(bi: &BalancedIntegrand) -> Vec<QRay> {
    let mut out = std::collections::BTreeSet::new();
    for f in &bi.const_factors {
        out.insert(QRay::new(-f.c_mu.clone(), -f.c_lambda.clone(), f.c0.clone()));
    }
    for fi in &bi.factors {
        for fj in &bi.factors {
            if let Some((a, b)) = opposite_multiples(&fi.monomial, &fj.monomial) {
                let (a, b) = (qi(a), qi(b));
                let comb = |x: &Q, y: &Q| &b * x + &a * y;
                let cc = comb(&fi.c0, &fj.c0);
                let rr = comb(&fi.c_mu, &fj.c_mu);
                let ss = comb(&fi.c_lambda, &fj.c_lambda);
                if rr.is_zero() && ss.is_zero() {
                    // identically pinched when (−q)^C ∈ q^{−ℕ}
                    if cc.is_integer() && cc.to_integer().is_even() && !cc.is_positive() {
                        out.insert(QRay::new(Q::zero(), Q::zero(), cc));
                    }
                    continue;
                }
                out.insert(QRay::new(-rr, -ss, cc));
            }
        }
    }
    out.into_iter().collect()
}

/// `(a, b)` with `v_i = a w`, `v_j = −b w` for a primitive `w` and `a, b > 0`.
fn opposite_multiples(vi: &[i64], vj: &[i64]) -> Option<(i64, i64)> {
    let gi = vi.iter().fold(0i64, |g, &x| g.gcd(&x));
    let gj = vj.iter().fold(0i64, |g, &x| g.gcd(&x));
    if gi == 0 || gj == 0 {
        return None;
    }
    let wi: Vec<i64> = vi.iter().map(|x| x / gi).collect();
    let wj: Vec<i64> = vj.iter().map(|x| -x / gj).collect();
    // w is only defined up to sign; the outward factor is the one whose first
    // nonzero entry is positive
    let lead = wi.iter().find(|&&x| x != 0).copied().unwrap_or(0);
    (wi == wj && lead > 0).then_some((gi, gj))
}
