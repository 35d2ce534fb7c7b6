use num_complex::Complex64;
use serde::Serialize;

use super::{default_contour, eval_integral};
use crate::error::{Error, Result};
use crate::nzdata::{BalancedIntegrand, Peripheral};
use crate::specialfn::QContext;

type C = Complex64;

/// Values of an integrand with edge imbalances `ε̂ = t · direction` along a
/// path of `t`, with a power-law fit `|I| ~ t^{growth}`.
#[derive(Clone, Debug, Serialize)]
pub struct EpsilonFamily {
    pub path: Vec<f64>,
    pub values: Vec<[f64; 2]>,
    pub grids: Vec<usize>,
    /// Least-squares slope of `log|I|` against `log t`; `None` for fewer than
    /// two distinct positive `t`.
    pub growth_exponent: Option<f64>,
    /// True when the fitted slope is below `−1/2`.
    pub diverging: bool,
}

impl EpsilonFamily {
    pub fn value(&self, i: usize) -> C {
        C::new(self.values[i][0], self.values[i][1])
    }
}

/// Evaluates along `path` with the contour recomputed at each point.
///
/// The contour margin shrinks with `t` when a pair of pole families pinches,
/// so `max_grid` should allow a few thousand points per circle for small `t`.
pub fn eval_epsilon_family(
    bi: &BalancedIntegrand,
    ctx: &QContext,
    p: &Peripheral,
    direction: &[f64],
    path: &[f64],
    max_grid: usize,
    tol: f64,
) -> Result<EpsilonFamily> {
    let width = bi.all_factors().map(|f| f.eps.len()).max().unwrap_or(0);
    if direction.len() != width {
        return Err(Error::InvalidArgument(format!("direction has length {}, the integrand has {width} imbalances", direction.len())));
    }
    let mut values = Vec::with_capacity(path.len());
    let mut grids = Vec::with_capacity(path.len());
    for &t in path {
        let pt = p.clone().with_eps(direction.iter().map(|d| d * t).collect());
        let mut c = default_contour(bi, ctx, &pt)?;
        c.max_grid = max_grid;
        let r = eval_integral(bi, ctx, &pt, &c, tol)?;
        values.push([r.value.re, r.value.im]);
        grids.push(r.grid_used);
    }
    let pts: Vec<(f64, f64)> = path
        .iter()
        .zip(&values)
        .filter(|(&t, _)| t > 0.0)
        .map(|(&t, v)| (t.ln(), C::new(v[0], v[1]).norm().ln()))
        .collect();
    let growth_exponent = slope(&pts);
    Ok(EpsilonFamily {
        path: path.to_vec(),
        values,
        grids,
        diverging: growth_exponent.is_some_and(|s| s < -0.5),
        growth_exponent,
    })
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx < 1e-300 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
