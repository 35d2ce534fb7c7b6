use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{qf, qi, simplex_max, to_f64, LpOutcome, Q, QMat};
use crate::nzdata::{BalancedIntegrand, Factor, Peripheral};
use crate::specialfn::QContext;

type C = Complex64;

/// A pole of the integrand that lies on the wrong side of a circle contour.
/// Its residue is added (`sign = 1`) or subtracted (`sign = -1`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleCrossing {
    #[serde(serialize_with = "ser_c")]
    pub y: C,
    pub sign: i8,
    /// Radius of the small circle used for the residue.
    pub radius: f64,
}

fn ser_c<S: serde::Serializer>(c: &C, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    crate::report::complex_json(*c).serialize(s)
}

/// Product-torus contour `|y_k| = |q|^{rho_k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContourSpec {
    pub radii: Vec<f64>,
    pub rho: Vec<f64>,
    /// Smallest normalized margin `level / ‖monomial‖_∞` over the factors; zero
    /// for residue-corrected contours.
    pub delta: f64,
    pub guardband: f64,
    /// Cap on points per circle.
    pub max_grid: usize,
    pub crossings: Vec<PoleCrossing>,
}

impl ContourSpec {
    pub const DEFAULT_GUARDBAND: f64 = 1e-3;
    /// Upper bound on the margin maximized by the contour program.
    pub const DELTA_CAP: f64 = 1.0;

    /// Contour through the given exponents `rho`.
    pub fn from_rho(ctx: &QContext, rho: Vec<f64>) -> Self {
        let lq = ctx.q.norm().ln();
        let dim = rho.len();
        Self {
            radii: rho.iter().map(|r| (r * lq).exp()).collect(),
            rho,
            delta: 0.0,
            guardband: Self::DEFAULT_GUARDBAND,
            max_grid: default_max_grid(dim),
            crossings: Vec::new(),
        }
    }
}

/// `1024 / dim` rounded down to a power of two.
pub fn default_max_grid(dim: usize) -> usize {
    let cap = 1024 / dim.max(1);
    1 << (usize::BITS - 1 - cap.leading_zeros())
}

/// `log|z| / log|q|` of the argument `(−q)^{exponent}` without its monomial.
pub(crate) fn level(ctx: &QContext, f: &Factor, p: &Peripheral) -> f64 {
    (f.exponent(p) * ctx.h).re / ctx.q.norm().ln()
}

fn sup_norm(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).max().unwrap_or(0)
}

/// Maximizes `δ` subject to `level_f + v_f·ρ ≥ δ ‖v_f‖_∞` for every factor,
/// `δ ≤ cap`. Returns `(ρ, δ)`, or `None` when even `δ = 0` is infeasible.
pub(crate) fn margin_program(monomials: &[Vec<i64>], levels: &[f64], dim: usize, cap: f64) -> Option<(Vec<f64>, f64)> {
    let nf = monomials.len();
    // variables: ρ⁺ (dim), ρ⁻ (dim), δ, slack per factor, cap slack
    let nv = 2 * dim + 1 + nf + 1;
    let di = 2 * dim;
    let mut a: QMat = Vec::with_capacity(nf + 1);
    let mut b: Vec<Q> = Vec::with_capacity(nf + 1);
    for (f, (v, &lv)) in monomials.iter().zip(levels).enumerate() {
        let mut row = vec![Q::zero(); nv];
        for k in 0..dim {
            row[k] = qi(v[k]);
            row[dim + k] = qi(-v[k]);
        }
        row[di] = qi(-sup_norm(v));
        row[di + 1 + f] = -Q::one();
        a.push(row);
        b.push(-qf(lv));
    }
    let mut row = vec![Q::zero(); nv];
    row[di] = Q::one();
    row[nv - 1] = Q::one();
    a.push(row);
    b.push(qf(cap));
    let mut c = vec![Q::zero(); nv];
    c[di] = Q::one();
    match simplex_max(&c, &a, &b) {
        LpOutcome::Optimal { x, value } => {
            let rho = (0..dim).map(|k| to_f64(&(&x[k] - &x[dim + k]))).collect();
            Some((rho, to_f64(&value)))
        }
        _ => None,
    }
}

/// The contour of a balanced integrand at a peripheral point.
///
/// When every factor can be given a positive margin the contour is the torus
/// maximizing the smallest margin `level_f / ‖v_f‖_∞`, where `level_f` is
/// `log|argument| / log|q|` on the contour; all poles of `G_q` then lie off the
/// contour on their proper side. The margin bounds the width of the annulus of
/// analyticity in each variable, which sets the trapezoid convergence rate.
/// In one variable, when no such torus exists, a circle is chosen in the
/// widest gap between pole moduli and the poles on the wrong side are recorded
/// for residue correction. Colliding pole families, or an infeasible program in
/// two or more variables, give `PinchDetected`.
pub fn default_contour(bi: &BalancedIntegrand, ctx: &QContext, p: &Peripheral) -> Result<ContourSpec> {
    let guard = ContourSpec::DEFAULT_GUARDBAND;
    check_constant_factors(bi, ctx, p, guard)?;
    let dim = bi.dim;
    if dim == 0 || bi.factors.is_empty() {
        let mut c = ContourSpec::from_rho(ctx, vec![0.0; dim]);
        c.delta = ContourSpec::DELTA_CAP;
        return Ok(c);
    }
    let monomials: Vec<Vec<i64>> = bi.factors.iter().map(|f| f.monomial.clone()).collect();
    let levels: Vec<f64> = bi.factors.iter().map(|f| level(ctx, f, p)).collect();
    if let Some((rho, delta)) = margin_program(&monomials, &levels, dim, ContourSpec::DELTA_CAP) {
        let lq = ctx.q.norm().ln();
        let clearance = 1.0 - (delta * lq).exp();
        if delta > 1e-9 && clearance >= guard {
            let mut c = ContourSpec::from_rho(ctx, rho);
            c.delta = delta;
            c.guardband = guard;
            validate_contour(bi, ctx, p, &c)?;
            return Ok(c);
        }
    }
    if dim == 1 {
        return residue_contour(bi, ctx, p, guard);
    }
    Err(Error::PinchDetected(format!(
        "no torus separates the pole families of the {dim}-dimensional integrand; residue corrections are only automated in one variable"
    )))
}

fn check_constant_factors(bi: &BalancedIntegrand, ctx: &QContext, p: &Peripheral, guard: f64) -> Result<()> {
    for f in &bi.const_factors {
        let z = ctx.pow_neg_q(f.exponent(p));
        let lv = level(ctx, f, p);
        let k = (-lv).round();
        if k >= 0.0 && (z * ctx.q.powi(k as i32) - 1.0).norm() < guard {
            return Err(Error::PinchDetected(format!(
                "constant factor G_q((-q)^({}) e_mu^({}) e_lambda^({})) sits on its pole q^-{k}",
                f.c0, f.c_mu, f.c_lambda
            )));
        }
    }
    Ok(())
}

/// Checks radii, guardband and that no factor's modulus on the torus is within
/// the guardband of a pole modulus `|q|^{−k}`.
pub fn validate_contour(bi: &BalancedIntegrand, ctx: &QContext, p: &Peripheral, c: &ContourSpec) -> Result<()> {
    if c.radii.len() != bi.dim {
        return Err(Error::InvalidArgument(format!("contour has {} radii for a {}-dimensional integrand", c.radii.len(), bi.dim)));
    }
    if c.radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidArgument("contour radii must be positive".into()));
    }
    if !(c.guardband > 0.0 && c.guardband < 0.5) {
        return Err(Error::InvalidArgument(format!("guardband {} outside (0, 0.5)", c.guardband)));
    }
    let aq = ctx.q.norm();
    for (f, pref) in bi.factors.iter().zip(bi.prefactors(ctx, p)) {
        let mut m = pref.norm();
        for (r, &e) in c.radii.iter().zip(&f.monomial) {
            m *= r.powi(e as i32);
        }
        // pole moduli |q|^{-k}, k ≥ 0
        let k = (-(m.ln() / aq.ln())).round().max(0.0);
        let pole = aq.powf(-k);
        if (m / pole - 1.0).abs() < c.guardband {
            return Err(Error::PoleProximity(format!(
                "factor with monomial {:?} has modulus {m:.6e} within the guardband of the pole modulus |q|^-{k}",
                f.monomial
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
struct Pole {
    y: C,
    log_mod: f64,
    outward: bool,
}

/// Poles in `y` of `G_q(P y^v)`: `y^v = q^{−k}/P`, `k ≥ 0`, with log-moduli in
/// `[lo, hi]`.
fn factor_poles(ctx: &QContext, pref: C, v: i64, lo: f64, hi: f64, out: &mut Vec<Pole>) {
    let lq = ctx.q.ln();
    let lp = pref.ln();
    let vf = v as f64;
    for k in 0..100_000i64 {
        let log = -(k as f64) * lq - lp;
        let lm = log.re / vf;
        if (v > 0 && lm > hi) || (v < 0 && lm < lo) {
            break;
        }
        if lm >= lo && lm <= hi {
            for j in 0..v.abs() {
                let y = ((log + C::new(0.0, 2.0 * std::f64::consts::PI * j as f64)) / vf).exp();
                out.push(Pole { y, log_mod: lm, outward: v > 0 });
            }
        }
    }
}

fn residue_contour(bi: &BalancedIntegrand, ctx: &QContext, p: &Peripheral, guard: f64) -> Result<ContourSpec> {
    let prefs = bi.prefactors(ctx, p);
    let step = ctx.q.norm().ln().abs();
    // first pole of each family: outward families start at their minimum modulus
    let first = |f: usize| -> f64 { -prefs[f].ln().re / bi.factors[f].monomial[0] as f64 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (f, fac) in bi.factors.iter().enumerate() {
        match fac.monomial[0] {
            v if v > 0 => lo = lo.min(first(f)),
            v if v < 0 => hi = hi.max(first(f)),
            _ => {}
        }
    }
    let (wlo, whi) = (lo.min(hi) - step, hi.max(lo) + step);
    let mut poles = Vec::new();
    for (f, fac) in bi.factors.iter().enumerate() {
        factor_poles(ctx, prefs[f], fac.monomial[0], wlo - 1.0, whi + 1.0, &mut poles);
    }
    // collisions between the two families
    for a in poles.iter().filter(|p| p.outward) {
        for b in poles.iter().filter(|p| !p.outward) {
            if (a.y - b.y).norm() < guard * a.y.norm() {
                return Err(Error::PinchDetected(format!(
                    "an outward and an inward pole collide near y = {:.6}{:+.6}i",
                    a.y.re, a.y.im
                )));
            }
        }
    }
    // widest gap between distinct pole moduli in the window
    let mut marks: Vec<f64> = poles.iter().map(|p| p.log_mod).filter(|&l| l >= wlo && l <= whi).collect();
    marks.push(wlo);
    marks.push(whi);
    marks.sort_by(|a, b| a.total_cmp(b));
    marks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let (mut best, mut mid) = (-1.0, 0.0);
    for w in marks.windows(2) {
        if w[1] - w[0] > best + 1e-12 {
            best = w[1] - w[0];
            mid = 0.5 * (w[0] + w[1]);
        }
    }
    // poles on the wrong side, merged when several factors share a location
    let mut wrong: Vec<Pole> = Vec::new();
    for p in poles.iter().filter(|p| (p.outward && p.log_mod < mid) || (!p.outward && p.log_mod > mid)) {
        if !wrong.iter().any(|w| (w.y - p.y).norm() < 1e-9 * p.y.norm()) {
            wrong.push(*p);
        }
    }
    let crossings = wrong
        .iter()
        .map(|w| {
            let nearest = poles
                .iter()
                .map(|p| (p.y - w.y).norm())
                .filter(|&d| d > 1e-9 * w.y.norm())
                .fold(f64::INFINITY, f64::min);
            let radius = (0.3 * nearest).min(0.5 * w.y.norm());
            PoleCrossing { y: w.y, sign: if w.outward { -1 } else { 1 }, radius }
        })
        .collect();
    let rho = mid / ctx.q.norm().ln();
    let mut c = ContourSpec::from_rho(ctx, vec![rho]);
    c.guardband = guard;
    c.crossings = crossings;
    validate_contour(bi, ctx, p, &c)?;
    Ok(c)
}
