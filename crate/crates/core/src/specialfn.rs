//! Double-precision evaluation of the q-special functions on `|q| < 1`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qseries::{tet_valuation, TetCache};
use crate::report::{rel_err, NumReport};

type C = Complex64;

/// Evaluation context: the nome `q`, the logarithm `h` with `e^h = −q`, the
/// product tail cutoff and the pole guardband.
#[derive(Clone, Copy, Debug)]
pub struct QContext {
    pub q: C,
    pub h: C,
    pub eps_product: f64,
    pub guardband: f64,
}

impl QContext {
    pub const DEFAULT_EPS: f64 = 1e-16;
    pub const DEFAULT_GUARDBAND: f64 = 1e-8;

    /// Context with the principal logarithm `h = log(−q)`.
    pub fn new(q: C) -> Result<Self> {
        Self::with_h(q, (-q).ln())
    }

    /// Context with an explicit branch of `log(−q)`.
    pub fn with_h(q: C, h: C) -> Result<Self> {
        let r = q.norm();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!("need 0 < |q| < 1, got |q| = {r}")));
        }
        if h.re >= 0.0 || (h.exp() + q).norm() > 1e-12 * r.max(1e-300) * 16.0 {
            return Err(Error::InvalidArgument("h must satisfy exp(h) = -q and Re(h) < 0".into()));
        }
        Ok(Self { q, h, eps_product: Self::DEFAULT_EPS, guardband: Self::DEFAULT_GUARDBAND })
    }

    pub fn real(q: f64) -> Result<Self> {
        Self::new(C::new(q, 0.0))
    }

    pub fn with_guardband(mut self, g: f64) -> Self {
        self.guardband = g;
        self
    }

    /// `(−q)^z = e^{z h}`.
    pub fn pow_neg_q(&self, z: C) -> C {
        (z * self.h).exp()
    }

    /// `(−q)^x` for real `x`.
    pub fn pow_neg_q_re(&self, x: f64) -> C {
        (self.h * x).exp()
    }

    /// `(x;q)_∞`.
    pub fn pochhammer_inf(&self, x: C) -> C {
        poch_inf(x, self.q, self.eps_product)
    }

    /// `G_q(z) = (−q/z;q)_∞ / (z;q)_∞`, rejecting points near the poles `q^{−ℕ}`.
    pub fn gq(&self, z: C) -> Result<C> {
        if z.norm() == 0.0 {
            return Err(Error::InvalidArgument("G_q(0) is an essential singularity".into()));
        }
        if let Some(n) = near_geometric(z, C::new(1.0, 0.0), self.q.inv(), self.guardband) {
            return Err(Error::PoleProximity(format!("G_q at z = {z} near q^-{n}")));
        }
        Ok(self.gq_raw(z))
    }

    /// `G_q` without the pole check.
    pub fn gq_raw(&self, z: C) -> C {
        poch_inf(-self.q / z, self.q, self.eps_product) / poch_inf(z, self.q, self.eps_product)
    }

    /// `θ_q(x) = Σ_k q^{k²} x^k`.
    pub fn theta_q(&self, x: C) -> Result<C> {
        if x.norm() == 0.0 {
            return Err(Error::InvalidArgument("theta_q needs x != 0".into()));
        }
        Ok(theta_sum(x, self.q, self.eps_product))
    }

    /// Product side of the Jacobi triple product,
    /// `(q²;q²)_∞ (−qx;q²)_∞ (−q/x;q²)_∞`.
    pub fn theta_q_product(&self, x: C) -> C {
        let q2 = self.q * self.q;
        let e = self.eps_product;
        poch_inf(q2, q2, e) * poch_inf(-self.q * x, q2, e) * poch_inf(-self.q / x, q2, e)
    }

    /// `ψ(z,m) = (−q^{1−m}/z; q²)_∞ / (−q^{1−m}z; q²)_∞`.
    ///
    /// For `m ≥ 1` the finitely many cancelling zero/pole pairs are removed
    /// analytically through `ψ(z,m) = z^{−m} ψ(z,−m)`.
    pub fn psi(&self, z: C, m: i64) -> Result<C> {
        if z.norm() == 0.0 {
            return Err(Error::InvalidArgument("psi needs z != 0".into()));
        }
        let first = -self.q.powi(-1 - m.abs() as i32);
        let q2inv = (self.q * self.q).inv();
        if let Some(n) = near_geometric(z, first, q2inv, self.guardband) {
            return Err(Error::PoleProximity(format!("psi(z={z}, m={m}) near pole index {n}")));
        }
        Ok(self.psi_raw(z, m))
    }

    fn psi_raw(&self, z: C, m: i64) -> C {
        if m >= 1 {
            return z.powi(-(m as i32)) * self.psi_raw(z, -m);
        }
        let q2 = self.q * self.q;
        let a = -self.q.powi((1 - m) as i32);
        poch_inf(a / z, q2, self.eps_product) / poch_inf(a * z, q2, self.eps_product)
    }

    /// `c(q) = (q;q)_∞² / (q²;q²)_∞`.
    pub fn c_value(&self) -> C {
        let qq = self.pochhammer_inf(self.q);
        let q2 = self.q * self.q;
        qq * qq / poch_inf(q2, q2, self.eps_product)
    }

    /// The tetrahedral weight `ψ⁰(z,w) = c(q) G_q(−qz) G_q(w⁻¹) G_q(w z⁻¹)`.
    pub fn psi0(&self, z: C, w: C) -> Result<C> {
        if z.norm() == 0.0 || w.norm() == 0.0 {
            return Err(Error::InvalidArgument("psi0 needs z, w != 0".into()));
        }
        Ok(self.c_value() * self.gq(-self.q * z)? * self.gq(w.inv())? * self.gq(w / z)?)
    }

    /// `φ_q(z,m) = μ(z,m) / μ(1/z,m)` with `μ(z,m) = (−q^{1−m}z; q²)_∞`.
    pub fn phi_q(&self, z: C, m: i64) -> Result<C> {
        if z.norm() == 0.0 {
            return Err(Error::InvalidArgument("phi_q needs z != 0".into()));
        }
        let a = -self.q.powi((1 - m) as i32);
        let q2 = self.q * self.q;
        // zeros of μ(1/z, m): z = −q^{1−m+2k}
        if let Some(n) = near_geometric(z, a, q2, self.guardband) {
            return Err(Error::PoleProximity(format!("phi_q(z={z}, m={m}) near pole index {n}")));
        }
        let e = self.eps_product;
        Ok(poch_inf(a * z, q2, e) / poch_inf(a / z, q2, e))
    }

    /// Numeric Laurent coefficients `Σ_j f(r ω^j) (r ω^j)^{−n} / N` on the
    /// circle of radius `r` sampled at `N` roots of unity.
    pub fn fourier_coefficient(f: impl Fn(C) -> C, r: f64, n: i64, points: usize) -> C {
        let mut acc = C::new(0.0, 0.0);
        for j in 0..points {
            let ang = 2.0 * std::f64::consts::PI * j as f64 / points as f64;
            let z = C::from_polar(r, ang);
            acc += f(z) * z.powi(-(n as i32));
        }
        acc / points as f64
    }
}

/// `(x; base)_∞` by truncated product with a geometric tail cutoff.
pub fn poch_inf(x: C, base: C, eps: f64) -> C {
    let r = base.norm();
    let mut acc = C::new(1.0, 0.0);
    let mut t = x;
    let cutoff = eps * (1.0 - r);
    let cutoff2 = cutoff * cutoff;
    let mut k = 0usize;
    while t.norm_sqr() >= cutoff2 || k == 0 {
        acc *= C::new(1.0, 0.0) - t;
        t *= base;
        k += 1;
        if k > 100_000 {
            break;
        }
    }
    acc
}

/// `Σ_k b^{k²} x^k`, summed symmetrically until both tails are negligible.
pub fn theta_sum(x: C, base: C, eps: f64) -> C {
    let mut acc = C::new(1.0, 0.0);
    let mut k = 1i32;
    let lb = base.norm().ln();
    let lx = x.norm().ln().abs();
    loop {
        let kf = k as f64;
        // log of the larger of |b^{k²} x^{±k}|
        let log_mag = kf * kf * lb + kf * lx;
        let bk = base.powi(k * k);
        acc += bk * (x.powi(k) + x.powi(-k));
        if log_mag < eps.ln() + acc.norm().ln() && 2.0 * kf * lb + lx < 0.0 {
            break;
        }
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    acc
}

/// Index `n ≥ 0` with `z` within relative distance `guard` of `first·ratio^n`,
/// scanning only the points whose modulus is comparable with `|z|`.
pub(crate) fn near_geometric(z: C, first: C, ratio: C, guard: f64) -> Option<usize> {
    let mut p = first;
    let zn = z.norm();
    for n in 0..10_000usize {
        let pn = p.norm();
        if (z - p).norm() < guard * pn {
            return Some(n);
        }
        if ratio.norm() > 1.0 && pn > 4.0 * zn {
            return None;
        }
        if ratio.norm() < 1.0 && pn < zn / 4.0 {
            return None;
        }
        p *= ratio;
    }
    None
}

fn sample_circle_point(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> C {
    let r = rmin * (rmax / rmin).powf(rng.gen::<f64>());
    C::from_polar(r, 2.0 * std::f64::consts::PI * rng.gen::<f64>())
}

/// Checks the two-term theta identity
/// `θ_q(z w⁻²)/θ_q(z) + w θ_q(q w²/z)/θ_q(q/z) = (q;q)/(q²;q²)² · θ_p(pw/z) θ_p(w/p) / θ_p(z/p)`
/// for `p = √q` (or `−√q` when `alternate_root`) at random points.
pub fn verify_dopsum(ctx: &QContext, samples: usize, seed: u64, alternate_root: bool) -> NumReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suite = if alternate_root { "dopsum-alt-root" } else { "dopsum" };
    let mut rep = NumReport::new(suite, 1e-10);
    let q = ctx.q;
    let e = ctx.eps_product;
    let p = if alternate_root { -q.sqrt() } else { q.sqrt() };
    let q2 = q * q;
    let pref = poch_inf(q, q, e) / (poch_inf(q2, q2, e) * poch_inf(q2, q2, e));
    for _ in 0..samples {
        let z = sample_circle_point(&mut rng, 0.5, 2.0);
        let w = sample_circle_point(&mut rng, 0.5, 2.0);
        let th = |x: C| theta_sum(x, q, e);
        let tp = |x: C| theta_sum(x, p, e);
        let lhs = th(z / (w * w)) / th(z) + w * th(q * w * w / z) / th(q / z);
        let rhs = pref * tp(p * w / z) * tp(w / p) / tp(z / p);
        rep.record(rel_err(lhs, rhs), || format!("z={z}, w={w}"));
    }
    rep
}

/// Sum form against product form of `θ_q` at random points.
pub fn verify_triple_product(ctx: &QContext, samples: usize, seed: u64) -> NumReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = NumReport::new("triple-product", 1e-10);
    for _ in 0..samples {
        let x = sample_circle_point(&mut rng, 0.3, 3.0);
        let a = theta_sum(x, ctx.q, ctx.eps_product);
        let b = ctx.theta_q_product(x);
        rep.record(rel_err(a, b), || format!("x={x}"));
    }
    rep
}

/// The `Z/2` and `Z/3` symmetries of `ψ⁰` at random points:
/// `ψ⁰(z,w) = ψ⁰(−q⁻¹w⁻¹, −q⁻¹z⁻¹) = ψ⁰(−q⁻¹z⁻¹w, −q⁻¹z⁻¹) = ψ⁰(−q⁻¹w⁻¹, z w⁻¹)`.
pub fn verify_psi0_symmetries(ctx: &QContext, samples: usize, seed: u64) -> NumReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = NumReport::new("psi0-symmetries", 1e-8);
    let q = ctx.q;
    let mut taken = 0;
    while taken < samples {
        let z = sample_circle_point(&mut rng, 0.5, 2.0);
        let w = sample_circle_point(&mut rng, 0.5, 2.0);
        let images = [
            (z, w),
            (-(q * w).inv(), -(q * z).inv()),
            (-w / (q * z), -(q * z).inv()),
            (-(q * w).inv(), z / w),
        ];
        let vals: Result<Vec<C>> = images.iter().map(|(a, b)| ctx.psi0(*a, *b)).collect();
        let Ok(vals) = vals else { continue };
        taken += 1;
        let err = vals[1..].iter().map(|v| rel_err(vals[0], *v)).fold(0.0, f64::max);
        rep.record(err, || format!("z={z}, w={w}"));
    }
    rep
}

/// The three forms of the tetrahedral weight at random points of
/// `1 < |w| < |z| < |q|⁻¹`: the product `ψ⁰(z,w)`, the sum `Σ_m ψ(z,m) w^m`
/// and the double series `Σ_{m,e} I^Δ(m,e)(q) z^e w^m`.
///
/// Moduli are drawn log-uniformly from the inner 80% of each range; the
/// sums are cut where the valuation bound of the remaining terms is below
/// `10⁻¹⁷` relative to the product.
pub fn verify_psi0_triality(ctx: &QContext, samples: usize, seed: u64) -> NumReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = NumReport::new("psi0-triality", 1e-8);
    let cache = TetCache::new();
    let lq = ctx.q.norm().ln();
    let mut taken = 0;
    while taken < samples {
        let lz = -lq * rng.gen_range(0.1..0.9);
        let lw = lz * rng.gen_range(0.1..0.9);
        let z = C::from_polar(lz.exp(), 2.0 * std::f64::consts::PI * rng.gen::<f64>());
        let w = C::from_polar(lw.exp(), 2.0 * std::f64::consts::PI * rng.gen::<f64>());
        let (Ok(prod), Ok(_)) = (ctx.psi0(z, w), ctx.psi(z, 0)) else { continue };
        taken += 1;
        let cut = prod.norm().ln() + (1e-17f64).ln();
        let mut psum = C::new(0.0, 0.0);
        for dir in [1i64, -1] {
            let mut m: i64 = if dir == 1 { 0 } else { -1 };
            let mut quiet = 0;
            while quiet < 5 && m.abs() < 20_000 {
                let t = ctx.psi_raw(z, m) * w.powi(m as i32);
                psum += t;
                quiet = if t.norm().ln() < cut { quiet + 1 } else { 0 };
                m += dir;
            }
        }
        // Rows of the double series decay like |w|^{-|m|} for m < 0, so both
        // sums run until several consecutive terms (rows) fall below the cut.
        let mut dsum = C::new(0.0, 0.0);
        let term = |m: i64, e: i64| -> Option<C> {
            // I^Δ(m,e) starts at q^{e+v} with v the half-unit valuation of I_Δ(m,e)
            let val = e + tet_valuation(m, e);
            if val as f64 * lq + e as f64 * lz + m as f64 * lw < cut {
                return None;
            }
            let k = ((cut - e as f64 * lz - m as f64 * lw) / lq).ceil() as i64 + 1;
            Some(cache.hat(m, e, 2 * k).eval(ctx.q) * z.powi(e as i32) * w.powi(m as i32))
        };
        for dir in [1i64, -1] {
            let mut m: i64 = if dir == 1 { 0 } else { -1 };
            let mut quiet = 0;
            while quiet < 5 && m.abs() < 20_000 {
                let mut hit = false;
                let e0 = (-m).min(0);
                for edir in [1i64, -1] {
                    let mut e = if edir == 1 { e0 } else { e0 - 1 };
                    let mut skipped = 0;
                    while skipped < 8 {
                        match term(m, e) {
                            Some(t) => {
                                dsum += t;
                                hit = true;
                                skipped = 0;
                            }
                            None => skipped += 1,
                        }
                        e += edir;
                    }
                }
                quiet = if hit { 0 } else { quiet + 1 };
                m += dir;
            }
        }
        let err = rel_err(prod, psum).max(rel_err(prod, dsum));
        rep.record(err, || format!("z={z}, w={w}"));
    }
    rep
}

/// `φ_q(z,m) φ_q(1/z,−m) = z^m` at random unit `z` and `|m| ≤ 5`.
pub fn verify_inversion(ctx: &QContext, samples: usize, seed: u64) -> NumReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = NumReport::new("inversion", 1e-11);
    let mut taken = 0;
    while taken < samples {
        let z = C::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.gen::<f64>());
        let m: i64 = rng.gen_range(-5..=5);
        let (Ok(a), Ok(b)) = (ctx.phi_q(z, m), ctx.phi_q(z.inv(), -m)) else { continue };
        taken += 1;
        rep.record(rel_err(a * b, z.powi(m as i32)), || format!("z={z}, m={m}"));
    }
    rep
}
