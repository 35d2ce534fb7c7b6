//! The index as lattice sums of tetrahedron indices, and as Fourier
//! coefficients of the state integral on a torus of peripheral holonomies.
//!
//! Both sides are keyed by coordinates `K ∈ ℤ²` in the lattice `W ℤ²`
//! generated by the peripheral coefficients `(c_μ, c_λ)` of the integrand
//! factors: the key `K` stands for the holonomy label `(m, e) = W K`, and the
//! integrand is a Laurent series in `σ = (−q)^{Wᵀ(μ̂, λ̂)}`.

mod fourier;
mod lattice;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

pub use fourier::{fourier_coefficients, fourier_coefficients_of, fourier_index, FourierGrid};
pub use lattice::{lattice_index, lattice_index_with, DEFAULT_SHELL_CAP};

use crate::error::{Error, Result};
use crate::linalg::{inverse, lattice_basis, to_f64, QMat, Q};
use crate::nzdata::{BalancedIntegrand, GluingData};
use crate::qseries::{HalfExpSeries, TetCache};
use crate::report::NumReport;
use crate::specialfn::QContext;

type C = Complex64;

/// Placement of the `(−q)` prefactor in the lattice sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `(−q)^{v·k′}` once per lattice point, `k′ = (m, e, k)`, `v = (1,…,1,m,e)`.
    OncePerPoint,
    /// `(−q)^{v·k′}` once per tetrahedron.
    PerTetrahedron,
    /// The sum over `(r, s)` with edge constraints and the angle-structure
    /// exponent, before any change to `k′` coordinates.
    Derived,
}

impl Convention {
    pub fn tag(self) -> &'static str {
        match self {
            Convention::OncePerPoint => "once-per-point",
            Convention::PerTetrahedron => "per-tetrahedron",
            Convention::Derived => "derived",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    LatticeSum,
    Fourier,
}

/// The lattice `W ℤ²` of peripheral exponents of an integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentLattice {
    /// Basis as columns, lower triangular.
    pub w: QMat,
    w_inv: QMat,
}

impl ExponentLattice {
    pub fn of(bi: &BalancedIntegrand) -> Self {
        let gens: Vec<Vec<Q>> = bi.all_factors().map(|f| vec![f.c_mu.clone(), f.c_lambda.clone()]).collect();
        let w = lattice_basis(&gens, 2);
        let w_inv = inverse(&w).expect("lattice basis is invertible");
        Self { w, w_inv }
    }

    /// The label `(m, e) = W K` of a key.
    pub fn label(&self, key: (i64, i64)) -> (Q, Q) {
        let k = [Q::from_integer(key.0.into()), Q::from_integer(key.1.into())];
        let row = |i: usize| &self.w[i][0] * &k[0] + &self.w[i][1] * &k[1];
        (row(0), row(1))
    }

    /// The key of a label, if it lies in the lattice.
    pub fn key(&self, m: &Q, e: &Q) -> Option<(i64, i64)> {
        let row = |i: usize| &self.w_inv[i][0] * m + &self.w_inv[i][1] * e;
        let (a, b) = (row(0), row(1));
        if !(a.is_integer() && b.is_integer()) {
            return None;
        }
        Some((i64::try_from(a.to_integer()).ok()?, i64::try_from(b.to_integer()).ok()?))
    }

    /// `(μ̂, λ̂) = W^{−T} u`.
    pub fn peripheral_exponents(&self, u: [C; 2]) -> [C; 2] {
        let wi = |i: usize, j: usize| to_f64(&self.w_inv[i][j]);
        [wi(0, 0) * u[0] + wi(1, 0) * u[1], wi(0, 1) * u[0] + wi(1, 1) * u[1]]
    }
}

/// One lattice-sum entry.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeEntry {
    pub key: (i64, i64),
    pub series: HalfExpSeries,
    /// Shells scanned, the last two of which lie entirely at or above the order.
    pub shells: u32,
    /// Lattice points that contributed below the order.
    pub points: usize,
    pub convention: Convention,
}

impl LatticeEntry {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.key.0,
            "e": self.key.1,
            "series": self.series,
            "convention": self.convention.tag(),
            "shells": self.shells,
        })
    }
}

/// Index entries over a window of keys, all to one truncation order (in
/// half-units of `q`).
#[derive(Clone, Debug, PartialEq)]
pub struct IndexSeries {
    pub entries: BTreeMap<(i64, i64), HalfExpSeries>,
    pub order: i64,
    pub provenance: Provenance,
    pub convention: Convention,
}

impl IndexSeries {
    /// Lattice sums for every key with `|K₁|, |K₂| ≤ bound`.
    pub fn lattice(g: &GluingData, bound: i64, order: i64, convention: Convention) -> Result<Self> {
        let data = lattice::LatticeData::new(g)?;
        lattice::check_strict(g)?;
        let cache = TetCache::new();
        let mut entries = BTreeMap::new();
        for m in -bound..=bound {
            for e in -bound..=bound {
                let r = lattice::lattice_index_prepared(&data, &cache, (m, e), order, convention, DEFAULT_SHELL_CAP)?;
                entries.insert((m, e), r.series);
            }
        }
        Ok(Self { entries, order, provenance: Provenance::LatticeSum, convention })
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.entries.values().all(HalfExpSeries::has_integer_exponents)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(k, s)| serde_json::json!({"m": k.0, "e": k.1, "series": s}))
            .collect();
        serde_json::json!({
            "order": self.order,
            "provenance": self.provenance,
            "convention": self.convention.tag(),
            "entries": entries,
        })
    }
}

/// Probe keys for the convention check.
pub const PROBE_KEYS: [(i64, i64); 3] = [(0, 0), (1, 0), (0, 1)];
const PROBE_TOL: f64 = 1e-5;
const PROBE_ORDER: i64 = 24;

/// Outcome of the convention probe.
#[derive(Clone, Debug, Serialize)]
pub struct ConventionReport {
    pub convention: Convention,
    /// Worst probe mismatch per candidate, `None` when it could not be evaluated.
    pub mismatches: Vec<(Convention, Option<f64>)>,
}

/// Picks the prefactor placement whose lattice sums match the Fourier
/// coefficients of the state integral at `q` on the probe keys.
///
/// Candidates are tried literal ones first, so when both literal readings
/// agree (a vanishing prefactor) the tag is [`Convention::OncePerPoint`].
pub fn resolve_prefactor_convention(g: &GluingData, q: f64) -> Result<ConventionReport> {
    resolve_prefactor_convention_on(g, q, &PROBE_KEYS)
}

/// [`resolve_prefactor_convention`] on a chosen probe set.
pub fn resolve_prefactor_convention_on(g: &GluingData, q: f64, probes: &[(i64, i64)]) -> Result<ConventionReport> {
    let ctx = QContext::real(q)?;
    let grid = FourierGrid::default();
    let coeffs = fourier_coefficients(g, &ctx, probes, &grid)?;
    lattice::check_strict(g)?;
    let data = lattice::LatticeData::new(g)?;
    let cache = TetCache::new();
    let mut mismatches = Vec::new();
    let mut chosen = None;
    for conv in [Convention::OncePerPoint, Convention::PerTetrahedron, Convention::Derived] {
        let mut worst: Option<f64> = Some(0.0);
        for (key, want) in probes.iter().zip(&coeffs) {
            match lattice::lattice_index_prepared(&data, &cache, *key, PROBE_ORDER, conv, DEFAULT_SHELL_CAP) {
                Ok(r) => {
                    let got = r.series.eval(C::new(q, 0.0));
                    let d = (got - want).norm() / (1.0 + want.norm());
                    worst = worst.map(|w| w.max(d));
                }
                Err(Error::InconsistentData(_) | Error::NonConvergent(_)) => worst = None,
                Err(e) => return Err(e),
            }
        }
        if chosen.is_none() && worst.is_some_and(|w| w <= PROBE_TOL) {
            chosen = Some(conv);
        }
        mismatches.push((conv, worst));
    }
    match chosen {
        Some(convention) => Ok(ConventionReport { convention, mismatches }),
        None => Err(Error::AmbiguousConvention(format!("no candidate matches the Fourier probe within {PROBE_TOL}: {mismatches:?}"))),
    }
}

/// Magnitude below which index entries are compared absolutely.
pub const NOISE_FLOOR: f64 = 1e-9;

/// Lattice sums against Fourier coefficients of the state integral at real
/// `q`, for every key with `|K₁|, |K₂| ≤ bound`, by relative error.
///
/// The lattice side is summed to half-unit order `order` with the derived
/// convention. The error is relative to the larger of the two values, floored
/// at `|q|^{order/2}` (the truncation size) and at [`NOISE_FLOOR`]: a grid
/// average of O(1) values carries roundoff near `10⁻¹⁶`, so entries below
/// `10⁻⁹` cannot be resolved to a relative `10⁻⁶`.
pub fn verify_lattice_vs_fourier(g: &GluingData, q: f64, bound: i64, order: i64, grid: &FourierGrid, tol: f64) -> Result<NumReport> {
    let ctx = QContext::real(q)?;
    let keys: Vec<(i64, i64)> = (-bound..=bound).flat_map(|a| (-bound..=bound).map(move |b| (a, b))).collect();
    let coeffs = fourier_coefficients(g, &ctx, &keys, grid)?;
    let index = IndexSeries::lattice(g, bound, order, Convention::Derived)?;
    let floor = q.abs().powf(order as f64 / 2.0).max(NOISE_FLOOR);
    let mut rep = NumReport::new("thm2", tol);
    for (key, want) in keys.iter().zip(coeffs) {
        let got = index.entries[key].eval(C::new(q, 0.0));
        let scale = got.norm().max(want.norm()).max(floor);
        rep.record((got - want).norm() / scale, || format!("key {key:?}: lattice {got}, Fourier {want}"));
    }
    Ok(rep)
}
