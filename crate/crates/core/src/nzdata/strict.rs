use num_traits::{One, Zero};
use serde::Serialize;
use std::f64::consts::PI;

use super::{AngleStructure, GluingData};
use crate::linalg::{qf, qi, simplex_max, to_f64, LpOutcome, Q};

/// Result of the strict angle structure search.
#[derive(Clone, Debug, Serialize)]
pub enum StrictOutcome {
    Strict(AngleStructure),
    /// No balanced structure with all angles positive; `best_min_angle` (radians)
    /// is the optimum of the max-min program, `None` if even the equalities
    /// are infeasible.
    Infeasible { best_min_angle: Option<f64> },
}

/// Balanced angle structure with the given peripheral holonomies (radians)
/// maximizing the smallest angle.
///
/// Solves `max t` subject to the angle sums, the balanced edge equations, the
/// two cusp equations and `θ ≥ t` exactly over the rationals (inputs are
/// converted exactly from their float values).
pub fn find_strict_angles(g: &GluingData, mu: f64, lambda: f64) -> StrictOutcome {
    let n = g.n;
    // variables: φ (3n, θ = φ + t·𝟙), t⁺, t⁻
    let nv = 3 * n + 2;
    let (tp, tm) = (3 * n, 3 * n + 1);
    let mut a: Vec<Vec<Q>> = Vec::new();
    let mut b: Vec<Q> = Vec::new();
    let mut push_row = |coef: Vec<Q>, rhs: Q| {
        let s: Q = coef.iter().sum();
        let mut row = coef;
        row.push(s.clone());
        row.push(-s);
        a.push(row);
        b.push(rhs);
    };
    for i in 0..n {
        let mut c = vec![Q::zero(); 3 * n];
        for t in 0..3 {
            c[3 * i + t] = Q::one();
        }
        push_row(c, Q::one());
    }
    let mu_hat = qf(mu) / qf(PI);
    let lam2 = qf(lambda) / qf(PI);
    for k in 0..n + 2 {
        let c: Vec<Q> = (0..n).flat_map(|i| (0..3).map(move |t| (i, t))).map(|(i, t)| qi(g.coef(k, i, t))).collect();
        let rhs = match k {
            k if k < n => qi(2),
            k if k == n => mu_hat.clone(),
            _ => lam2.clone(),
        };
        push_row(c, rhs);
    }
    let mut obj = vec![Q::zero(); nv];
    obj[tp] = Q::one();
    obj[tm] = -Q::one();
    match simplex_max(&obj, &a, &b) {
        LpOutcome::Optimal { x, value } => {
            let theta = |i: usize, t: usize| PI * to_f64(&(&x[3 * i + t] + &value));
            let ang = |t: usize| (0..n).map(|i| theta(i, t)).collect::<Vec<_>>();
            let s = AngleStructure::from_angles(g, ang(0), ang(1), ang(2));
            if value > Q::zero() {
                StrictOutcome::Strict(s)
            } else {
                StrictOutcome::Infeasible { best_min_angle: Some(PI * to_f64(&value)) }
            }
        }
        LpOutcome::Infeasible => StrictOutcome::Infeasible { best_min_angle: None },
        LpOutcome::Unbounded => unreachable!("the smallest angle is at most pi/3"),
    }
}
