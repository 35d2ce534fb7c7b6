//! Gluing-equation matrices, quad systems, angle structures and the compiled
//! balanced state integrand.
//!
//! Angles are measured internally in units of `π`, so a tetrahedron's angles
//! sum to `1` and a balanced edge to `2`. Peripheral data enter through
//! `μ̂ = μ/π` and `λ̂ = λ/(2π)`, the exponents with `e_μ = (−q)^{μ̂}`,
//! `e_λ = (−q)^{λ̂}`.

mod integrand;
mod quad;
mod rays;
mod strict;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use integrand::{compile_integrand, BalancedIntegrand, Factor, Peripheral};
pub use quad::{admissible_quads, parametrize, quad_system, select_quad, solve_angles, AngleStructure, QuadSystem};
pub use rays::{singularity_rays, QRay};
pub use strict::{find_strict_angles, StrictOutcome};

/// Gluing equations of an ideal triangulation with `n` tetrahedra.
///
/// Rows are the `n` edge equations, then the meridian and the longitude, each of
/// length `3n` with the columns of tetrahedron `i` at `3i, 3i+1, 3i+2` for the
/// shapes `(z, z′, z″)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingData {
    pub n: usize,
    pub a_bar: Vec<Vec<i64>>,
    pub b_bar: Vec<Vec<i64>>,
    pub c_bar: Vec<Vec<i64>>,
    pub meridian: Vec<i64>,
    pub longitude: Vec<i64>,
}

#[derive(Deserialize)]
struct RawGluing {
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl GluingData {
    /// Builds and validates gluing data from `n + 2` rows of `3n` integers.
    pub fn from_rows(n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedInput("a triangulation needs at least one tetrahedron".into()));
        }
        if rows.len() != n + 2 {
            return Err(Error::MalformedInput(format!("expected {} rows, got {}", n + 2, rows.len())));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != 3 * n) {
            return Err(Error::MalformedInput(format!("row {i} has length {}, expected {}", r.len(), 3 * n)));
        }
        let block = |t: usize| -> Vec<Vec<i64>> { (0..n).map(|k| (0..n).map(|i| rows[k][3 * i + t]).collect()).collect() };
        let g = Self {
            n,
            a_bar: block(0),
            b_bar: block(1),
            c_bar: block(2),
            meridian: rows[n].clone(),
            longitude: rows[n + 1].clone(),
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            let total: i64 = (0..self.n).map(|k| self.a_bar[k][i] + self.b_bar[k][i] + self.c_bar[k][i]).sum();
            if total != 6 {
                return Err(Error::InconsistentData(format!(
                    "tetrahedron {i} meets the edges {total} times, expected 6"
                )));
            }
        }
        Ok(())
    }

    /// The rows in the file layout.
    pub fn rows(&self) -> Vec<Vec<i64>> {
        let mut rows: Vec<Vec<i64>> = (0..self.n)
            .map(|k| (0..self.n).flat_map(|i| [self.a_bar[k][i], self.b_bar[k][i], self.c_bar[k][i]]).collect())
            .collect();
        rows.push(self.meridian.clone());
        rows.push(self.longitude.clone());
        rows
    }

    /// Coefficient of shape `t ∈ {0,1,2}` of tetrahedron `i` in row `k`
    /// (`k = n` meridian, `k = n+1` longitude).
    pub fn coef(&self, k: usize, i: usize, t: usize) -> i64 {
        let n = self.n;
        match k {
            k if k < n => [&self.a_bar, &self.b_bar, &self.c_bar][t][k][i],
            k if k == n => self.meridian[3 * i + t],
            _ => self.longitude[3 * i + t],
        }
    }

    /// JSON in the gluing file format `{"n": …, "rows": […]}`.
    pub fn to_json(&self) -> String {
        serde_json::json!({"n": self.n, "rows": self.rows()}).to_string()
    }
}

/// Parses the gluing file format `{"n": int, "rows": [[int; 3n]; n+2]}`.
pub fn parse_gluing(text: &str) -> Result<GluingData> {
    let raw: RawGluing = serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
    GluingData::from_rows(raw.n, &raw.rows)
}

/// `A = Ā − B̄`, `B = C̄ − B̄` and `ν = −B̄·𝟙`, the data of the gluing
/// equations after eliminating `z′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedAB {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
    pub nu: Vec<i64>,
}

pub fn reduced_ab(g: &GluingData) -> Result<ReducedAB> {
    if g.n == 0 {
        return Err(Error::InvalidArgument("empty triangulation".into()));
    }
    let n = g.n;
    let a = (0..n).map(|k| (0..n).map(|i| g.a_bar[k][i] - g.b_bar[k][i]).collect()).collect();
    let b = (0..n).map(|k| (0..n).map(|i| g.c_bar[k][i] - g.b_bar[k][i]).collect()).collect();
    let nu = (0..n).map(|k| -g.b_bar[k].iter().sum::<i64>()).collect();
    Ok(ReducedAB { a, b, nu })
}

/// Serializes rationals as strings such as `"-3/4"`.
pub(crate) mod qser {
    use crate::linalg::Q;
    use serde::Serializer;

    pub fn one<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn vec<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn mat<S: Serializer>(m: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
    }
}
