use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

type C = Complex64;

/// Pairwise (tree) sum; the tree depends only on the length, so the result is
/// the same for every thread count.
pub(crate) fn pairwise_sum(v: &[C]) -> C {
    if v.len() <= 8 {
        return v.iter().fold(C::new(0.0, 0.0), |a, b| a + b);
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn pairwise_real(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_real(l) + pairwise_real(r)
}

/// Trapezoid average of `f` over the torus `|y_k| = radii[k]` with `n` points
/// per circle. Returns the average and the mean of `|f|`.
pub(crate) fn torus_average<F>(radii: &[f64], n: usize, f: &F) -> (C, f64)
where
    F: Fn(&[C]) -> C + Sync,
{
    let d = radii.len();
    if d == 0 {
        let v = f(&[]);
        return (v, v.norm());
    }
    let circles: Vec<Vec<C>> = radii
        .iter()
        .map(|&r| (0..n).map(|j| C::from_polar(r, 2.0 * PI * j as f64 / n as f64)).collect())
        .collect();
    let inner = n.pow(d as u32 - 1);
    let rows: Vec<(C, f64)> = (0..n)
        .into_par_iter()
        .map(|j0| {
            let mut y = vec![C::new(0.0, 0.0); d];
            y[0] = circles[0][j0];
            let mut vals = Vec::with_capacity(inner);
            let mut abs = Vec::with_capacity(inner);
            for mut idx in 0..inner {
                for k in (1..d).rev() {
                    y[k] = circles[k][idx % n];
                    idx /= n;
                }
                let v = f(&y);
                vals.push(v);
                abs.push(v.norm());
            }
            (pairwise_sum(&vals), pairwise_real(&abs))
        })
        .collect();
    let sums: Vec<C> = rows.iter().map(|r| r.0).collect();
    let abss: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let total = (n * inner) as f64;
    (pairwise_sum(&sums) / total, pairwise_real(&abss) / total)
}

/// Outcome of a doubling trapezoid run.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Doubling {
    pub value: C,
    /// Last change relative to `max(|value|, mean |f|)`.
    pub change: f64,
    pub grid: usize,
    pub converged: bool,
    /// Mean of `|f|` on the last grid.
    pub mean_abs: f64,
}

/// Doubles the points per circle from `start` until the relative change drops
/// below `tol` or `max_grid` is reached.
pub(crate) fn integrate_doubling<F>(radii: &[f64], start: usize, max_grid: usize, tol: f64, f: &F) -> Doubling
where
    F: Fn(&[C]) -> C + Sync,
{
    if radii.is_empty() {
        let v = f(&[]);
        return Doubling { value: v, change: 0.0, grid: 1, converged: true, mean_abs: v.norm() };
    }
    let mut n = start.max(2);
    let (mut prev, mut prev_abs) = torus_average(radii, n, f);
    loop {
        let next = n * 2;
        if next > max_grid {
            return Doubling { value: prev, change: f64::INFINITY, grid: n, converged: false, mean_abs: prev_abs };
        }
        let (v, mean_abs) = torus_average(radii, next, f);
        let scale = v.norm().max(mean_abs);
        let change = if scale > 0.0 { (v - prev).norm() / scale } else { 0.0 };
        if !change.is_finite() {
            return Doubling { value: v, change, grid: next, converged: false, mean_abs };
        }
        n = next;
        prev = v;
        prev_abs = mean_abs;
        if change < tol {
            return Doubling { value: v, change, grid: n, converged: true, mean_abs };
        }
        if n * 2 > max_grid {
            return Doubling { value: v, change, grid: n, converged: false, mean_abs };
        }
    }
}
