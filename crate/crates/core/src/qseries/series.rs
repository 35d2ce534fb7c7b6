use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Truncated Laurent series in `ζ = q^{1/2}` with exact integer coefficients.
///
/// Exponents are stored as counts of half-units, so the key `k` stands for
/// `q^{k/2}`. `trunc = Some(t)` means every coefficient at exponent `>= t` is
/// unknown; `None` marks an exact (finite) series.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HalfExpSeries {
    coeffs: BTreeMap<i64, BigInt>,
    trunc: Option<i64>,
}

fn min_trunc(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl HalfExpSeries {
    /// The exact zero series.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The exact series `1`.
    pub fn one() -> Self {
        Self::monomial(0, BigInt::one())
    }

    /// The exact series `c·q^{k/2}`.
    pub fn monomial(half_exp: i64, c: impl Into<BigInt>) -> Self {
        let mut s = Self::zero();
        s.add_term(half_exp, c.into());
        s
    }

    /// Zero known up to (excluding) `trunc`, i.e. `O(q^{trunc/2})`.
    pub fn big_o(trunc: i64) -> Self {
        Self { coeffs: BTreeMap::new(), trunc: Some(trunc) }
    }

    /// Builds a series from terms, dropping zeros and terms at or past `trunc`.
    pub fn from_terms<I, C>(terms: I, trunc: Option<i64>) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut s = Self { coeffs: BTreeMap::new(), trunc };
        for (k, c) in terms {
            s.add_term(k, c.into());
        }
        s
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// True when no coefficient is known to be nonzero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, half_exp: i64) -> BigInt {
        self.coeffs.get(&half_exp).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Lowest exponent with a known nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Lower bound for the valuation of the underlying (untruncated) series;
    /// `None` means the series is exactly zero.
    pub fn valuation_bound(&self) -> Option<i64> {
        match (self.min_exp(), self.trunc) {
            (Some(v), Some(t)) => Some(v.min(t)),
            (Some(v), None) => Some(v),
            (None, t) => t,
        }
    }

    /// Adds `c·q^{k/2}`, ignoring it when `k` is at or past the truncation.
    pub fn add_term(&mut self, half_exp: i64, c: BigInt) {
        if c.is_zero() || self.trunc.is_some_and(|t| half_exp >= t) {
            return;
        }
        let slot = self.coeffs.entry(half_exp).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&half_exp);
        }
    }

    /// Lowers the truncation order to `t` (never raises it).
    pub fn truncate(mut self, t: i64) -> Self {
        let t = self.trunc.map_or(t, |x| x.min(t));
        self.trunc = Some(t);
        self.coeffs.retain(|k, _| *k < t);
        self
    }

    /// Multiplies by `(±1)·q^{k/2}`; the truncation order moves along.
    pub fn shift(mut self, half_exp: i64) -> Self {
        self.coeffs = self.coeffs.into_iter().map(|(k, c)| (k + half_exp, c)).collect();
        self.trunc = self.trunc.map(|t| t + half_exp);
        self
    }

    pub fn scale(mut self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self { coeffs: BTreeMap::new(), trunc: self.trunc };
        }
        for v in self.coeffs.values_mut() {
            *v *= c;
        }
        self
    }

    /// Multiplies by `(−1)^e`.
    pub fn sign(self, e: i64) -> Self {
        if e.rem_euclid(2) == 0 {
            self
        } else {
            -self
        }
    }

    /// The substitution `q → q²`: every exponent (and the truncation) doubles.
    pub fn q_to_q2(mut self) -> Self {
        self.coeffs = self.coeffs.into_iter().map(|(k, c)| (2 * k, c)).collect();
        self.trunc = self.trunc.map(|t| 2 * t);
        self
    }

    /// True if every stored exponent is an integer power of `q`.
    pub fn has_integer_exponents(&self) -> bool {
        self.coeffs.keys().all(|k| k % 2 == 0)
    }

    /// Product truncated at `max_half_exp` in addition to the natural order.
    pub fn mul_trunc(&self, other: &Self, max_half_exp: Option<i64>) -> Self {
        let natural = match (self.trunc, other.trunc) {
            (None, None) => None,
            _ => {
                let from_self = self.trunc.and_then(|t| other.valuation_bound().map(|v| t + v));
                let from_other = other.trunc.and_then(|t| self.valuation_bound().map(|v| t + v));
                match (from_self, from_other) {
                    (None, None) => {
                        // one side is exactly zero
                        return Self { coeffs: BTreeMap::new(), trunc: None };
                    }
                    (a, b) => min_trunc(a, b),
                }
            }
        };
        let trunc = min_trunc(natural, max_half_exp);
        let mut out = Self { coeffs: BTreeMap::new(), trunc };
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let k = i + j;
                if trunc.is_some_and(|t| k >= t) {
                    // coefficients of `other` are sorted, later ones only grow
                    break;
                }
                out.add_term(k, a * b);
            }
        }
        out
    }

    /// Inverse of a series whose lowest term is `±q^{v/2}` with `v` known.
    pub fn inverse(&self) -> Option<Self> {
        let v = self.min_exp()?;
        let lead = self.coeffs.get(&v)?;
        if !(lead.is_one() || (-lead).is_one()) {
            return None;
        }
        let t = self.trunc?;
        let width = t - v;
        // invert u = self / (lead q^{v/2}), unit constant term, to order `width`
        let u: Vec<(i64, BigInt)> =
            self.coeffs.iter().map(|(k, c)| (k - v, c * lead)).collect();
        let w = width as usize;
        let mut dense = vec![BigInt::zero(); w.max(1)];
        dense[0] = BigInt::one();
        for n in 1..w {
            let mut acc = BigInt::zero();
            for (k, c) in u.iter().skip(1) {
                let k = *k as usize;
                if k > n {
                    break;
                }
                acc -= c * &dense[n - k];
            }
            dense[n] = acc;
        }
        let out = Self::from_terms(
            dense.into_iter().enumerate().map(|(n, c)| (n as i64 - v, c * lead)),
            Some(width - v),
        );
        Some(out)
    }

    /// Numeric value at `ζ` where `ζ² = q`.
    pub fn eval_zeta(&self, zeta: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(k, c)| zeta.powi(*k as i32) * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }

    /// Numeric value at `q`; half-integer exponents use the principal `√q`.
    pub fn eval(&self, q: Complex64) -> Complex64 {
        if self.has_integer_exponents() {
            self.coeffs
                .iter()
                .map(|(k, c)| q.powi((*k / 2) as i32) * c.to_f64().unwrap_or(f64::NAN))
                .sum()
        } else {
            self.eval_zeta(q.sqrt())
        }
    }

    /// Whether two series agree on every exponent below `t` (half-units).
    pub fn agrees_below(&self, other: &Self, t: i64) -> bool {
        let lo = self.coeffs.range(..t).filter(|(_, c)| !c.is_zero());
        let hi = other.coeffs.range(..t).filter(|(_, c)| !c.is_zero());
        lo.eq(hi)
    }

    /// First exponent below `t` where the series differ.
    pub fn first_difference_below(&self, other: &Self, t: i64) -> Option<i64> {
        let keys: std::collections::BTreeSet<i64> =
            self.coeffs.range(..t).chain(other.coeffs.range(..t)).map(|(k, _)| *k).collect();
        keys.into_iter().find(|k| self.coeff(*k) != other.coeff(*k))
    }

    /// Largest absolute coefficient as f64 (diagnostics only).
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
}

impl Add for &HalfExpSeries {
    type Output = HalfExpSeries;
    fn add(self, rhs: &HalfExpSeries) -> HalfExpSeries {
        let trunc = min_trunc(self.trunc, rhs.trunc);
        let mut out = HalfExpSeries { coeffs: BTreeMap::new(), trunc };
        for (k, c) in self.coeffs.iter().chain(rhs.coeffs.iter()) {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Add for HalfExpSeries {
    type Output = HalfExpSeries;
    fn add(self, rhs: HalfExpSeries) -> HalfExpSeries {
        &self + &rhs
    }
}

impl Sub for &HalfExpSeries {
    type Output = HalfExpSeries;
    fn sub(self, rhs: &HalfExpSeries) -> HalfExpSeries {
        self + &(-rhs.clone())
    }
}

impl Sub for HalfExpSeries {
    type Output = HalfExpSeries;
    fn sub(self, rhs: HalfExpSeries) -> HalfExpSeries {
        &self - &rhs
    }
}

impl Neg for HalfExpSeries {
    type Output = HalfExpSeries;
    fn neg(mut self) -> HalfExpSeries {
        for v in self.coeffs.values_mut() {
            *v = -std::mem::take(v);
        }
        self
    }
}

impl Mul for &HalfExpSeries {
    type Output = HalfExpSeries;
    fn mul(self, rhs: &HalfExpSeries) -> HalfExpSeries {
        self.mul_trunc(rhs, None)
    }
}

impl Mul for HalfExpSeries {
    type Output = HalfExpSeries;
    fn mul(self, rhs: HalfExpSeries) -> HalfExpSeries {
        self.mul_trunc(&rhs, None)
    }
}

impl fmt::Display for HalfExpSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in &self.coeffs {
            let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let power = match *k {
                2 => "q".to_string(),
                k if k % 2 == 0 => format!("q^{}", k / 2),
                k => format!("q^{k}/2"),
            };
            match (*k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "{power}")?,
                (_, false) => write!(f, "{mag}{power}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(t) = self.trunc {
            let expo = if t % 2 == 0 { format!("{}", t / 2) } else { format!("{t}/2") };
            write!(f, " + O(q^{expo})")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    terms: Vec<(i64, String)>,
    trunc: Option<i64>,
}

impl Serialize for HalfExpSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeriesRepr {
            terms: self.coeffs.iter().map(|(k, c)| (*k, c.to_string())).collect(),
            trunc: self.trunc,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HalfExpSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(d)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for (k, c) in repr.terms {
            let c: BigInt = c.parse().map_err(D::Error::custom)?;
            terms.push((k, c));
        }
        Ok(Self::from_terms(terms, repr.trunc))
    }
}
