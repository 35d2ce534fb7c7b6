//! Builtin triangulations and hand-derived state integrands.
//!
//! Gluing matrices are stored in the file layout: `n` edge rows, meridian,
//! longitude, with per-tetrahedron column triples `(z, z′, z″)`.

use crate::linalg::{qi, qr, Q};
use crate::nzdata::{BalancedIntegrand, Factor, GluingData};

/// Names accepted by [`gluing`], in listing order.
pub const NAMES: [&str; 7] = ["cPcbbbdei", "fig8", "m003", "unknot-cMcabbgds", "trefoil", "k5_2", "k6_1"];

fn rows(name: &str) -> Option<(usize, Vec<Vec<i64>>)> {
    let r: Vec<Vec<i64>> = match name {
        "cPcbbbdei" => vec![vec![1, 1, 2, 1, 2, 1], vec![1, 1, 0, 1, 0, 1], vec![0, -1, 0, 1, 0, 0], vec![0, 0, 2, 0, 0, 0]],
        "fig8" | "4_1" => vec![vec![2, 1, 0, 2, 1, 0], vec![0, 1, 2, 0, 1, 2], vec![1, 0, 0, 0, 0, -1], vec![1, 1, 1, 1, -1, -3]],
        "m003" => vec![vec![2, 0, 1, 2, 0, 1], vec![0, 2, 1, 0, 2, 1], vec![0, -2, 0, 2, 0, 0], vec![0, -1, 0, 2, -1, 0]],
        "unknot-cMcabbgds" | "unknot" => {
            vec![vec![1, 2, 2, 2, 2, 2], vec![1, 0, 0, 0, 0, 0], vec![0, 0, 0, 0, 0, -2], vec![1, 0, 0, 0, -1, 0]]
        }
        "trefoil" | "3_1" => vec![vec![1, 0, 0, 0, 1, 0], vec![1, 2, 2, 2, 1, 2], vec![0, 0, -1, 1, 0, 0], vec![1, 0, -4, 4, -1, 0]],
        "k5_2" | "5_2" => vec![
            vec![1, 1, 0, 1, 0, 0, 1, 1, 0],
            vec![0, 1, 1, 0, 0, 2, 0, 1, 1],
            vec![1, 0, 1, 1, 2, 0, 1, 0, 1],
            vec![-1, 0, 0, 0, 0, 1, 0, 0, 0],
            vec![2, 0, -3, 1, 0, -2, 0, 0, 1],
        ],
        "k6_1" | "6_1" => vec![
            vec![1, 0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 0],
            vec![0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1],
            vec![0, 1, 1, 0, 0, 2, 0, 1, 1, 1, 0, 0],
            vec![1, 0, 1, 1, 2, 0, 0, 0, 1, 0, 1, 1],
            vec![-1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
            vec![-1, 1, 0, 0, 1, 1, 0, -1, 0, 0, 0, -2],
        ],
        _ => return None,
    };
    Some((r.len() - 2, r))
}

/// Builtin gluing data by name (aliases `4_1`, `unknot`, `3_1`, `5_2`, `6_1`).
pub fn gluing(name: &str) -> Option<GluingData> {
    let (n, r) = rows(name)?;
    Some(GluingData::from_rows(n, &r).expect("builtin fixtures are valid"))
}

fn f(c0: Q, c_mu: Q, c_lambda: Q, mon: &[i64]) -> Factor {
    Factor::new(c0, c_mu, c_lambda, mon.to_vec())
}

fn i(x: i64) -> Q {
    qi(x)
}

fn half(x: i64) -> Q {
    qr(x, 2)
}

/// Hand-derived integrands from the worked examples, as printed (`corrected =
/// false`) or with the transcription slips repaired (`corrected = true`).
///
/// The slips, each detected by a per-integrand conservation law (monomials sum
/// to zero, constants sum to the tetrahedron count, `c_μ` and `c_λ` sum to zero):
///
/// * `fig8`: the factor `G(−q s² t⁻¹ y₀)` should carry `y₀²`;
/// * `k5_2`: the factor with monomial `y₀ y₁⁻²` should carry a single `t⁻¹`;
/// * `k6_1`: the factor `G(−q t y₂²)` should be `G(t y₂²)`.
///
/// A factor `(c₀, c_μ, c_λ, v)` is `G_q((−q)^{c₀} e_μ^{c_μ} e_λ^{c_λ} y^v)`.
pub fn hand_integrand(name: &str, corrected: bool) -> Option<BalancedIntegrand> {
    let (n, fs): (usize, Vec<Factor>) = match name {
        "fig8" | "4_1" => (
            2,
            vec![
                f(i(0), i(0), i(0), &[-1]),
                f(i(0), i(-1), i(0), &[-1]),
                f(i(0), i(0), i(1), &[-1]),
                f(i(0), i(-1), i(1), &[-1]),
                f(i(1), i(0), i(-1), &[2]),
                f(i(1), i(2), i(-1), if corrected { &[2] } else { &[1] }),
            ],
        ),
        "m003" => (
            2,
            vec![
                f(i(1), half(-1), i(-2), &[-2]),
                f(i(1), half(1), i(-2), &[-2]),
                f(i(0), i(0), i(0), &[1]),
                f(i(0), half(1), i(0), &[1]),
                f(i(0), i(0), i(2), &[1]),
                f(i(0), half(-1), i(2), &[1]),
            ],
        ),
        "cPcbbbdei" => (
            2,
            vec![
                f(i(0), i(0), i(1), &[0]),
                f(i(0), i(0), i(-1), &[0]),
                f(i(0), i(0), i(0), &[1]),
                f(i(1), i(0), i(-1), &[-1]),
                f(i(1), i(1), i(-1), &[-1]),
                f(i(0), i(-1), i(2), &[1]),
            ],
        ),
        "trefoil" | "3_1" => (
            2,
            vec![
                f(i(1), i(2), i(-1), &[0]),
                f(i(1), i(-2), i(1), &[0]),
                f(i(0), i(0), i(0), &[-1]),
                f(i(0), i(-1), i(0), &[-1]),
                f(i(0), i(3), i(-1), &[1]),
                f(i(0), i(-2), i(1), &[1]),
            ],
        ),
        "k5_2" | "5_2" => (
            3,
            vec![
                f(i(0), i(0), i(0), &[-1, 0]),
                f(i(0), i(1), i(0), &[-1, 0]),
                f(i(0), i(2), i(0), &[-1, 0]),
                f(i(1), i(-2), i(if corrected { -1 } else { -2 }), &[1, -2]),
                f(i(1), i(0), i(0), &[1, -1]),
                f(i(1), i(-3), i(-1), &[1, -1]),
                f(i(0), i(0), i(0), &[0, 1]),
                f(i(0), i(1), i(1), &[0, 1]),
                f(i(0), i(1), i(1), &[0, 2]),
            ],
        ),
        "k6_1" | "6_1" => (
            4,
            vec![
                f(i(0), i(0), i(0), &[-1, 0, 0]),
                f(i(0), i(0), i(0), &[0, -1, 0]),
                f(i(0), i(1), i(0), &[0, -1, 0]),
                f(i(0), i(-2), i(0), &[-1, 1, 0]),
                f(i(1), i(-1), i(-1), &[0, 1, -2]),
                f(half(1), i(0), i(-1), &[0, 0, -1]),
                f(half(3), i(0), i(0), &[1, 0, -1]),
                f(half(3), i(0), i(-1), &[1, 1, -1]),
                f(half(-1), i(0), i(1), &[0, -1, 1]),
                f(half(1), i(2), i(1), &[1, -1, 1]),
                f(half(-1), i(0), i(0), &[-1, 1, 1]),
                f(i(if corrected { 0 } else { 1 }), i(0), i(1), &[0, 0, 2]),
            ],
        ),
        _ => return None,
    };
    Some(BalancedIntegrand::new(n - 1, fs, n as u32))
}

/// The one-variable integrand `G_q(y) G_q((−q)^{ε̂} y⁻¹)` whose contour is
/// pinched as `ε̂ → 0`.
pub fn pinched_pair() -> BalancedIntegrand {
    let mut a = f(i(0), i(0), i(0), &[1]);
    let mut b = f(i(0), i(0), i(0), &[-1]);
    a.eps = vec![i(0)];
    b.eps = vec![i(1)];
    BalancedIntegrand::new(1, vec![a, b], 0)
}

/// Singularity rays of the `cPcbbbdei` integrand as `(r, s, ε, t)`, the set
/// `e_μ^r e_λ^s ∈ ε q^t q^ℕ` read off the worked example.
pub const CPCBBBDEI_RAYS: [(i64, i64, i8, i64); 6] = [(0, 1, 1, 0), (0, -1, 1, 0), (0, 1, -1, 1), (0, -1, -1, 1), (-1, 1, -1, 1), (1, -1, -1, 1)];
