use num_traits::Zero;
use rayon::prelude::*;

use super::{Convention, ExponentLattice, LatticeEntry};
use crate::error::{Error, Result};
use crate::linalg::{integer_solve, Q};
use crate::nzdata::{compile_integrand, find_strict_angles, select_quad, GluingData, QuadSystem, StrictOutcome};
use crate::qseries::{tet_valuation, HalfExpSeries, TetCache};

pub const DEFAULT_SHELL_CAP: i64 = 40;

/// An affine form `c0 + cμ μ̂ + cλ λ̂` per coordinate of `(r, s) ∈ ℤ^{2N}`.
struct LinearLabel {
    c0: Vec<Q>,
    mu: Vec<Q>,
    lambda: Vec<Q>,
}

/// The lattice `{(r,s) : (Ā−C̄)s + (B̄−C̄)r = 0}` with the exponent
/// `E = −Σ (α_i+γ_i) s_i + α_i r_i` of the summands, angles in units of `π`
/// read off a quad system at zero quad angles and balanced edges.
pub(crate) struct LatticeData {
    n: usize,
    edges: Vec<Vec<i64>>,
    exponent: LinearLabel,
    pub(crate) lattice: ExponentLattice,
    quad: QuadSystem,
}

impl LatticeData {
    pub(crate) fn new(g: &GluingData) -> Result<Self> {
        let quad = select_quad(g)?;
        let bi = compile_integrand(g, &quad)?;
        let n = g.n;
        let edges = (0..n)
            .map(|k| {
                let mut row: Vec<i64> = (0..n).map(|i| g.b_bar[k][i] - g.c_bar[k][i]).collect();
                row.extend((0..n).map(|i| g.a_bar[k][i] - g.c_bar[k][i]));
                row
            })
            .collect();
        let mut ex = LinearLabel { c0: vec![Q::zero(); 2 * n], mu: vec![Q::zero(); 2 * n], lambda: vec![Q::zero(); 2 * n] };
        for i in 0..n {
            let alpha = quad.angle_form(i, 0);
            let gamma = quad.angle_form(i, 2);
            // parameter slots 0, 1, 2 hold the constant, μ̂ and λ̂ coefficients
            for (dst, slot) in [(&mut ex.c0, 0), (&mut ex.mu, 1), (&mut ex.lambda, 2)] {
                dst[i] = -alpha[slot].clone();
                dst[n + i] = -(&alpha[slot] + &gamma[slot]);
            }
        }
        Ok(Self { n, edges, exponent: ex, lattice: ExponentLattice::of(&bi), quad })
    }

    /// Lattice points with the given label, as a particular point and a basis
    /// of the fiber directions.
    fn fiber(&self, key: (i64, i64)) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
        let (m, e) = self.lattice.label(key);
        let mut den = num_bigint::BigInt::from(1);
        for x in self.exponent.mu.iter().chain(&self.exponent.lambda).chain([&m, &e]) {
            den = num_integer::Integer::lcm(&den, x.denom());
        }
        let d = Q::from_integer(den);
        let int = |x: &Q| -> i64 {
            let v = x * &d;
            i64::try_from(v.to_integer()).expect("label entry fits i64")
        };
        let mut rows = self.edges.clone();
        rows.push(self.exponent.mu.iter().map(int).collect());
        rows.push(self.exponent.lambda.iter().map(int).collect());
        let mut rhs = vec![0; self.n];
        rhs.push(int(&m));
        rhs.push(int(&e));
        let (x0, kernel) = integer_solve(&rows, &rhs)?;
        Some((x0, reduce_basis(kernel)))
    }

    /// Twice the constant exponent `E0` at a lattice point.
    fn twice_e0(&self, x: &[i64]) -> Result<i64> {
        let e0: Q = self.exponent.c0.iter().zip(x).map(|(c, &xi)| c * Q::from_integer(xi.into())).sum();
        let t = &e0 * Q::from_integer(2.into());
        if !t.is_integer() {
            return Err(Error::InconsistentData(format!("summand exponent {e0} is not a half-integer")));
        }
        Ok(i64::try_from(t.to_integer()).expect("exponent fits i64"))
    }
}

/// Greedy pairwise size reduction, enough to keep ℓ∞ shells compact in the
/// low dimensions that occur here.
fn reduce_basis(mut b: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let dot = |x: &[i64], y: &[i64]| -> i128 { x.iter().zip(y).map(|(a, b)| *a as i128 * *b as i128).sum() };
    loop {
        let mut changed = false;
        for i in 0..b.len() {
            for j in 0..b.len() {
                if i == j {
                    continue;
                }
                let bj2 = dot(&b[j], &b[j]);
                if bj2 == 0 {
                    continue;
                }
                let k = (dot(&b[i], &b[j]) as f64 / bj2 as f64).round() as i64;
                if k != 0 {
                    let cand: Vec<i64> = b[i].iter().zip(&b[j]).map(|(x, y)| x - k * y).collect();
                    if dot(&cand, &cand) < dot(&b[i], &b[i]) {
                        b[i] = cand;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    b.sort_by_key(|v| std::cmp::Reverse(v.iter().map(|x| x.abs()).max()));
    b
}

/// Integer points of `[−R, R]^d` with `ℓ∞` norm exactly `R`.
fn shell(d: usize, r: i64) -> Vec<Vec<i64>> {
    if d == 0 {
        return if r == 0 { vec![vec![]] } else { vec![] };
    }
    let side = (2 * r + 1) as usize;
    let total = side.pow(d as u32);
    (0..total)
        .filter_map(|mut idx| {
            let mut t = Vec::with_capacity(d);
            for _ in 0..d {
                t.push((idx % side) as i64 - r);
                idx /= side;
            }
            (t.iter().any(|x| x.abs() == r)).then_some(t)
        })
        .collect()
}

/// Sums `summand` over `x0 + span(basis)` in growing ℓ∞ shells.
///
/// `valuation` is an exact lower bound for each summand. The scan stops after
/// two consecutive shells whose minimal valuations are at least `order` and
/// non-decreasing.
fn shell_sum<V, S>(x0: &[i64], basis: &[Vec<i64>], order: i64, cap: i64, valuation: V, summand: S) -> Result<(HalfExpSeries, u32, usize)>
where
    V: Fn(&[i64]) -> Result<i64> + Sync,
    S: Fn(&[i64], i64) -> Result<HalfExpSeries> + Sync,
{
    let d = basis.len();
    let mut acc = HalfExpSeries::big_o(order);
    let mut prev_min: Option<i64> = None;
    let mut quiet = 0;
    let mut points = 0;
    for r in 0..=cap {
        let pts: Vec<Vec<i64>> = shell(d, r)
            .into_iter()
            .map(|t| {
                let mut x = x0.to_vec();
                for (tk, bk) in t.iter().zip(basis) {
                    for (xi, bi) in x.iter_mut().zip(bk) {
                        *xi += tk * bi;
                    }
                }
                x
            })
            .collect();
        let vals: Vec<i64> = pts.par_iter().map(|x| valuation(x)).collect::<Result<_>>()?;
        let shell_min = vals.iter().copied().min().unwrap_or(i64::MAX);
        let live: Vec<&Vec<i64>> = pts.iter().zip(&vals).filter(|(_, &v)| v < order).map(|(x, _)| x).collect();
        points += live.len();
        let parts: Vec<HalfExpSeries> = live
            .par_iter()
            .map(|x| summand(x, order))
            .collect::<Result<_>>()?;
        for p in &parts {
            acc = &acc + p;
        }
        if d == 0 {
            return Ok((acc, 1, points));
        }
        let rising = prev_min.is_none_or(|p| shell_min >= p);
        quiet = if shell_min >= order && rising { quiet + 1 } else { 0 };
        prev_min = Some(shell_min);
        if quiet >= 2 {
            return Ok((acc, r as u32 + 1, points));
        }
    }
    Err(Error::NonConvergent(format!(
        "summand valuations still below order {order} (or decreasing) after {cap} shells"
    )))
}

pub(crate) fn check_strict(g: &GluingData) -> Result<()> {
    match find_strict_angles(g, 0.0, 0.0) {
        StrictOutcome::Strict(_) => Ok(()),
        StrictOutcome::Infeasible { best_min_angle } => Err(Error::NoStrictAngles { best_min_angle: best_min_angle.unwrap_or(f64::NAN) }),
    }
}

/// The index entry with lattice key `key`, truncated below half-unit `order`.
pub fn lattice_index(g: &GluingData, key: (i64, i64), order: i64) -> Result<LatticeEntry> {
    lattice_index_with(g, key, order, Convention::Derived, DEFAULT_SHELL_CAP)
}

/// [`lattice_index`] under a chosen prefactor convention and shell cap.
pub fn lattice_index_with(g: &GluingData, key: (i64, i64), order: i64, convention: Convention, cap: i64) -> Result<LatticeEntry> {
    check_strict(g)?;
    let data = LatticeData::new(g)?;
    let cache = TetCache::new();
    lattice_index_prepared(&data, &cache, key, order, convention, cap)
}

pub(crate) fn lattice_index_prepared(
    data: &LatticeData,
    cache: &TetCache,
    key: (i64, i64),
    order: i64,
    convention: Convention,
    cap: i64,
) -> Result<LatticeEntry> {
    let (series, shells, points) = match convention {
        Convention::Derived => derived_sum(data, cache, key, order, cap)?,
        Convention::OncePerPoint | Convention::PerTetrahedron => literal_sum(data, cache, key, order, cap, convention)?,
    };
    Ok(LatticeEntry { key, series, shells, points, convention })
}

fn derived_sum(data: &LatticeData, cache: &TetCache, key: (i64, i64), order: i64, cap: i64) -> Result<(HalfExpSeries, u32, usize)> {
    let n = data.n;
    let Some((x0, basis)) = data.fiber(key) else {
        // no lattice point carries this label
        return Ok((HalfExpSeries::big_o(order), 0, 0));
    };
    // valuation of I^Δ(r,s) = (−q)^s I_Δ(r,s)(q²) in half-units
    let hat_val = |r: i64, s: i64| 2 * (s + tet_valuation(r, s));
    let valuation = |x: &[i64]| -> Result<i64> { Ok(data.twice_e0(x)? + (0..n).map(|i| hat_val(x[i], x[n + i])).sum::<i64>()) };
    let summand = |x: &[i64], order: i64| -> Result<HalfExpSeries> {
        let e2 = data.twice_e0(x)?;
        if e2 % 2 != 0 {
            return Err(Error::InconsistentData(format!("summand exponent {e2}/2 of (-q) is not an integer")));
        }
        let vals: Vec<i64> = (0..n).map(|i| hat_val(x[i], x[n + i])).collect();
        let total = e2 + vals.iter().sum::<i64>();
        let mut acc = HalfExpSeries::one().shift(e2).sign(e2 / 2).truncate(order);
        for i in 0..n {
            let need = order - (total - vals[i]);
            let f = cache.hat(x[i], x[n + i], need);
            acc = acc.mul_trunc(&f, Some(order));
        }
        Ok(acc)
    };
    shell_sum(&x0, &basis, order, cap, valuation, summand)
}

/// Literal readings of the final sum: `k′ = (m, e, k)`, `(r_i, s_i) =
/// (−b_i·k′, a_i·k′)` with the columns of `(A′|B′)` whose first two rows are
/// the meridian and half-longitude, and the prefactor `(−q)^{v·k′}` with
/// `v = (1,…,1,m,e)`, applied once or once per tetrahedron.
fn literal_sum(
    data: &LatticeData,
    cache: &TetCache,
    key: (i64, i64),
    order: i64,
    cap: i64,
    convention: Convention,
) -> Result<(HalfExpSeries, u32, usize)> {
    let n = data.n;
    let q = &data.quad;
    // rows: meridian, half-longitude, then the edges
    let order_rows: Vec<usize> = [n - 1, n].into_iter().chain(0..n - 1).collect();
    let to_int = |x: &Q| -> Result<i64> {
        if !x.is_integer() {
            return Err(Error::InconsistentData(format!("non-integer entry {x} in (A'|B')")));
        }
        Ok(i64::try_from(x.to_integer()).expect("entry fits i64"))
    };
    let mut a = vec![vec![0i64; n]; n + 1];
    let mut b = vec![vec![0i64; n]; n + 1];
    for (dst, &src) in order_rows.iter().enumerate() {
        for i in 0..n {
            a[dst][i] = to_int(&q.a_prime[src][i])?;
            b[dst][i] = to_int(&q.b_prime[src][i])?;
        }
    }
    let (m, e) = key;
    let mult = if convention == Convention::PerTetrahedron { n as i64 } else { 1 };
    let kprime = |k: &[i64]| -> Vec<i64> { [m, e].into_iter().chain(k.iter().copied()).collect() };
    let v: Vec<i64> = std::iter::repeat_n(1, n - 1).chain([m, e]).collect();
    let rs = |kp: &[i64]| -> Vec<(i64, i64)> {
        (0..n)
            .map(|i| {
                let bk: i64 = (0..=n).map(|row| b[row][i] * kp[row]).sum();
                let ak: i64 = (0..=n).map(|row| a[row][i] * kp[row]).sum();
                (-bk, ak)
            })
            .collect()
    };
    let pref = |kp: &[i64]| -> i64 { mult * v.iter().zip(kp).map(|(x, y)| x * y).sum::<i64>() };
    let valuation = |k: &[i64]| -> Result<i64> {
        let kp = kprime(k);
        Ok(2 * pref(&kp) + rs(&kp).iter().map(|&(r, s)| 2 * tet_valuation(r, s)).sum::<i64>())
    };
    let summand = |k: &[i64], order: i64| -> Result<HalfExpSeries> {
        let kp = kprime(k);
        let p = pref(&kp);
        let pairs = rs(&kp);
        let vals: Vec<i64> = pairs.iter().map(|&(r, s)| 2 * tet_valuation(r, s)).collect();
        let total = 2 * p + vals.iter().sum::<i64>();
        let mut acc = HalfExpSeries::one().shift(2 * p).sign(p).truncate(order);
        for (i, &(r, s)) in pairs.iter().enumerate() {
            let need = order - (total - vals[i]);
            // I_Δ(q²) to half-unit `need` needs I_Δ(q) to half of it
            let f = cache.get(r, s, (need + 1).div_euclid(2)).q_to_q2();
            acc = acc.mul_trunc(&f, Some(order));
        }
        Ok(acc)
    };
    let origin = vec![0i64; n - 1];
    let basis: Vec<Vec<i64>> = (0..n - 1).map(|i| (0..n - 1).map(|j| (i == j) as i64).collect()).collect();
    shell_sum(&origin, &basis, order, cap, valuation, summand)
}
