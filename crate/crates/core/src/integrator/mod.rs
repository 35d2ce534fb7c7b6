//! Numerical evaluation of balanced state integrals on product-torus contours.
//!
//! The integral is the normalized Haar average over `|y_k| = r_k` of the
//! integrand, computed by the trapezoid rule with doubling. Grid points are
//! evaluated in parallel and reduced by a fixed pairwise tree, so values do
//! not depend on the number of threads.

mod contour;
mod epsilon;
mod pentagon;
pub(crate) mod quadrature;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nzdata::{BalancedIntegrand, Peripheral};
use crate::report::{complex_json, NumReport};
use crate::specialfn::QContext;

pub use contour::{default_contour, default_max_grid, validate_contour, ContourSpec, PoleCrossing};
pub use epsilon::{eval_epsilon_family, EpsilonFamily};
pub use pentagon::{psi0_angles, random_compatible_angles, symmetric_compatible_angles, verify_pentagon_integral, verify_pentagon_suite, PentagonReport};

type C = Complex64;

/// Points per circle of the first trapezoid pass.
pub const START_GRID: usize = 16;
pub const DEFAULT_TOL: f64 = 1e-9;

/// A state-integral value with its diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralResult {
    #[serde(serialize_with = "ser_c")]
    pub value: C,
    /// Absolute change between the last two grid sizes.
    #[serde(rename = "estErr")]
    pub est_err: f64,
    #[serde(rename = "gridUsed")]
    pub grid_used: usize,
    /// `|constant| · mean |integrand|` on the contour, a magnitude against
    /// which vanishing values can be judged.
    pub scale: f64,
    pub contour: ContourSpec,
    pub warnings: Vec<String>,
}

fn ser_c<S: serde::Serializer>(c: &C, s: S) -> std::result::Result<S::Ok, S::Error> {
    complex_json(*c).serialize(s)
}

impl IntegralResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("integral result serializes")
    }
}

/// Evaluates the integral of `bi` at the peripheral point `p` over `contour`.
///
/// Residues of the poles listed in `contour.crossings` are computed on small
/// circles with the same doubling rule and added with their signs.
pub fn eval_integral(bi: &BalancedIntegrand, ctx: &QContext, p: &Peripheral, contour: &ContourSpec, tol: f64) -> Result<IntegralResult> {
    validate_contour(bi, ctx, p, contour)?;
    let constant = bi.constant_part(ctx, p).map_err(|e| match e {
        Error::PoleProximity(m) => Error::PinchDetected(m),
        other => other,
    })?;
    let pref = bi.prefactors(ctx, p);
    let f = |y: &[C]| bi.eval_factors(ctx, &pref, y);
    let main = quadrature::integrate_doubling(&contour.radii, START_GRID, contour.max_grid, tol, &f);
    if !main.converged {
        return Err(Error::NoConvergence { grid: main.grid, change: main.change });
    }
    let mut warnings = Vec::new();
    let mut sum = main.value;
    let mut err = main.change * main.value.norm().max(1e-300);
    if !contour.crossings.is_empty() {
        warnings.push(format!("{} pole(s) crossed by the circle; residues applied", contour.crossings.len()));
    }
    for pc in &contour.crossings {
        // Res_{y=p} F(y)/y as the average of F(y)(y−p)/y over |y − p| = radius
        let g = |t: &[C]| {
            let y = pc.y + t[0];
            f(&[y]) * t[0] / y
        };
        let r = quadrature::integrate_doubling(&[pc.radius], START_GRID, 4096, tol, &g);
        if !r.converged {
            return Err(Error::NoConvergence { grid: r.grid, change: r.change });
        }
        sum += r.value * pc.sign as f64;
        err += r.change * r.value.norm();
    }
    let value = constant * sum;
    if !value.is_finite() {
        return Err(Error::PinchDetected("integral is not finite".into()));
    }
    Ok(IntegralResult { value, est_err: err * constant.norm(), grid_used: main.grid, scale: constant.norm() * main.mean_abs, contour: contour.clone(), warnings })
}

/// [`default_contour`] followed by [`eval_integral`].
pub fn integrate(bi: &BalancedIntegrand, ctx: &QContext, p: &Peripheral, tol: f64) -> Result<IntegralResult> {
    let c = default_contour(bi, ctx, p)?;
    eval_integral(bi, ctx, p, &c, tol)
}

/// Random points `(s, t)` on the unit torus.
pub fn unit_torus_points(count: usize, seed: u64) -> Vec<(C, C)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = rng.gen_range(-PI..PI);
            let b = rng.gen_range(-PI..PI);
            (C::from_polar(1.0, a), C::from_polar(1.0, b))
        })
        .collect()
}

/// `|I(s,t)| < tol` at random unit `(s, t)`; the recorded error is `|I|`.
pub fn verify_vanishing(bi: &BalancedIntegrand, ctx: &QContext, samples: usize, seed: u64, tol: f64) -> Result<NumReport> {
    let mut rep = NumReport::new("vanishing", tol);
    for (s, t) in unit_torus_points(samples, seed) {
        let r = integrate(bi, ctx, &Peripheral::from_st(ctx, s, t), tol * 1e-2)?;
        rep.record(r.value.norm(), || format!("s={s}, t={t}: I={}", r.value));
    }
    Ok(rep)
}
