use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use super::quadrature::integrate_doubling;
use super::START_GRID;
use crate::error::{Error, Result};
use crate::report::{rel_err, NumReport};
use crate::specialfn::QContext;

type C = Complex64;

/// `ψ⁰_{α,γ}(z,w) = c(q) G_q(z(−q)^{β/π}) G_q(w⁻¹(−q)^{α/π}) G_q(z⁻¹w(−q)^{γ/π})`
/// with `β = π − α − γ`, angles in radians.
pub fn psi0_angles(ctx: &QContext, alpha: f64, gamma: f64, z: C, w: C) -> C {
    let beta = PI - alpha - gamma;
    let e = |a: f64| ctx.pow_neg_q_re(a / PI);
    ctx.c_value() * ctx.gq_raw(z * e(beta)) * ctx.gq_raw(e(alpha) / w) * ctx.gq_raw(w / z * e(gamma))
}

/// Both sides of the non-constant pentagon identity at one point.
#[derive(Clone, Debug, Serialize)]
pub struct PentagonReport {
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub rel_err: f64,
    pub grid: usize,
    pub passed: bool,
}

const COMPAT_TOL: f64 = 1e-12;

/// Checks `α₁ = α₀+α₂`, `α₃ = α₂+α₄`, `γ₁ = γ₀+α₄`, `γ₃ = α₀+γ₄`, `γ₂ = γ₁+γ₃`
/// and positivity of every angle.
fn check_compatible(angles: &[(f64, f64, f64); 5]) -> Result<()> {
    let a = |i: usize| angles[i].0;
    let g = |i: usize| angles[i].2;
    let rels = [
        a(1) - a(0) - a(2),
        a(3) - a(2) - a(4),
        g(1) - g(0) - a(4),
        g(3) - a(0) - g(4),
        g(2) - g(1) - g(3),
    ];
    if rels.iter().any(|r| r.abs() > COMPAT_TOL) {
        return Err(Error::InvalidArgument(format!("angles are not compatible: residuals {rels:?}")));
    }
    for (i, &(al, be, ga)) in angles.iter().enumerate() {
        if !(al > 0.0 && be > 0.0 && ga > 0.0) || (al + be + ga - PI).abs() > COMPAT_TOL {
            return Err(Error::InvalidArgument(format!("tetrahedron {i} has angles ({al}, {be}, {ga}), need positive angles summing to pi")));
        }
    }
    Ok(())
}

/// Completes free angles `(α₀, α₂, α₄, γ₀, γ₄)` to a compatible 5-tuple.
fn complete(a0: f64, a2: f64, a4: f64, g0: f64, g4: f64) -> [(f64, f64, f64); 5] {
    let g1 = g0 + a4;
    let g3 = a0 + g4;
    let ag = [(a0, g0), (a0 + a2, g1), (a2, g1 + g3), (a2 + a4, g3), (a4, g4)];
    ag.map(|(a, g)| (a, PI - a - g, g))
}

/// The compatible tuple with all free angles equal to `π/7`: the middle
/// tetrahedron is the most skewed, with `β₂ = 2π/7`.
pub fn symmetric_compatible_angles() -> [(f64, f64, f64); 5] {
    let t = PI / 7.0;
    complete(t, t, t, t, t)
}

/// Random compatible tuples with free angles in `[0.15, 0.55]`, which keeps
/// every `β` positive.
pub fn random_compatible_angles(count: usize, seed: u64) -> Vec<[(f64, f64, f64); 5]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut r = || rng.gen_range(0.15..0.55);
            complete(r(), r(), r(), r(), r())
        })
        .collect()
}

/// Evaluates
/// `ψ⁰₃(x,y) ψ⁰₁(u,v) = ∮ ψ⁰₀(u/y, v/z) ψ⁰₂(xuz/(yv), z) ψ⁰₄(x/v, y/z) dz/(2πiz)`
/// with `ψ⁰_i = ψ⁰_{α_i,γ_i}`, the integral over `|z| = 1`.
pub fn verify_pentagon_integral(ctx: &QContext, angles: &[(f64, f64, f64); 5], x: C, y: C, u: C, v: C, tol: f64) -> Result<PentagonReport> {
    check_compatible(angles)?;
    for w in [x, y, u, v] {
        if (w.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("{w} is not on the unit circle")));
        }
    }
    let psi = |i: usize, a: C, b: C| psi0_angles(ctx, angles[i].0, angles[i].2, a, b);
    let lhs = psi(3, x, y) * psi(1, u, v);
    let f = |z: &[C]| {
        let z = z[0];
        psi(0, u / y, v / z) * psi(2, x * u * z / (y * v), z) * psi(4, x / v, y / z)
    };
    let r = integrate_doubling(&[1.0], START_GRID, 1 << 14, 1e-14, &f);
    if !r.converged && r.change > tol {
        return Err(Error::NoConvergence { grid: r.grid, change: r.change });
    }
    let e = rel_err(lhs, r.value);
    Ok(PentagonReport { lhs: [lhs.re, lhs.im], rhs: [r.value.re, r.value.im], rel_err: e, grid: r.grid, passed: e < tol })
}

/// The pentagon integral at the symmetric angles with `x = y = u = v = 1`,
/// then at `count` random compatible angle tuples and random unit points.
pub fn verify_pentagon_suite(ctx: &QContext, count: usize, seed: u64, tol: f64) -> Result<NumReport> {
    let mut rep = NumReport::new("pentagon-integral", tol);
    let one = C::new(1.0, 0.0);
    let sym = symmetric_compatible_angles();
    let r = verify_pentagon_integral(ctx, &sym, one, one, one, one, tol)?;
    rep.record(r.rel_err, || "symmetric angles at x = y = u = v = 1".into());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for angles in random_compatible_angles(count, seed.wrapping_add(1)) {
        let pt: Vec<C> = (0..4).map(|_| C::from_polar(1.0, rng.gen_range(-PI..PI))).collect();
        let r = verify_pentagon_integral(ctx, &angles, pt[0], pt[1], pt[2], pt[3], tol)?;
        rep.record(r.rel_err, || format!("angles {angles:?} at {pt:?}"));
    }
    Ok(rep)
}
