use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::lattice::check_strict;
use super::ExponentLattice;
use crate::error::{Error, Result};
use crate::integrator::{default_contour, eval_integral};
use crate::integrator::quadrature::pairwise_sum;
use crate::nzdata::{compile_integrand, select_quad, BalancedIntegrand, GluingData, Peripheral};
use crate::specialfn::QContext;

type C = Complex64;

/// Torus grid and per-point quadrature tolerance for Fourier coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierGrid {
    /// Points per circle of the `σ` torus.
    pub size: usize,
    pub tol: f64,
}

impl Default for FourierGrid {
    fn default() -> Self {
        Self { size: 32, tol: 1e-11 }
    }
}

/// `(1/G²) Σ I(σ) σ^{−K}` over the `G × G` roots of unity, for each key `K`.
///
/// The contour found at `σ = (1, 1)` is reused at every grid point when it
/// needs no residue corrections, since the pole levels do not move on the
/// unit torus.
pub fn fourier_coefficients_of(bi: &BalancedIntegrand, ctx: &QContext, keys: &[(i64, i64)], grid: &FourierGrid) -> Result<Vec<C>> {
    let g = grid.size;
    if g == 0 {
        return Err(Error::InvalidArgument("Fourier grid size must be positive".into()));
    }
    let lat = ExponentLattice::of(bi);
    let point = |a: usize, b: usize| {
        let u = [a, b].map(|j| C::new(0.0, 2.0 * PI * j as f64 / g as f64) / ctx.h);
        let [mu, la] = lat.peripheral_exponents(u);
        Peripheral::new(mu, la)
    };
    let base = default_contour(bi, ctx, &point(0, 0))?;
    let reuse = base.crossings.is_empty();
    let values: Vec<C> = (0..g * g)
        .into_par_iter()
        .map(|idx| {
            let p = point(idx / g, idx % g);
            let contour = if reuse { base.clone() } else { default_contour(bi, ctx, &p)? };
            Ok(eval_integral(bi, ctx, &p, &contour, grid.tol)?.value)
        })
        .collect::<Result<_>>()?;
    let w = 2.0 * PI / g as f64;
    Ok(keys
        .iter()
        .map(|&(k1, k2)| {
            let terms: Vec<C> = values
                .iter()
                .enumerate()
                .map(|(idx, v)| {
                    let (a, b) = ((idx / g) as i64, (idx % g) as i64);
                    let phase = -w * ((a * k1).rem_euclid(g as i64) + (b * k2).rem_euclid(g as i64)) as f64;
                    v * C::from_polar(1.0, phase)
                })
                .collect();
            pairwise_sum(&terms) / (g * g) as f64
        })
        .collect())
}

/// [`fourier_coefficients_of`] for the integrand compiled from gluing data,
/// which must admit a strict angle structure.
pub fn fourier_coefficients(g: &GluingData, ctx: &QContext, keys: &[(i64, i64)], grid: &FourierGrid) -> Result<Vec<C>> {
    check_strict(g)?;
    let quad = select_quad(g)?;
    let bi = compile_integrand(g, &quad)?;
    fourier_coefficients_of(&bi, ctx, keys, grid)
}

/// The coefficient of one key.
pub fn fourier_index(g: &GluingData, ctx: &QContext, key: (i64, i64), grid: &FourierGrid) -> Result<C> {
    Ok(fourier_coefficients(g, ctx, &[key], grid)?[0])
}
