use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use super::quad::ParamLayout;
use super::{qser, GluingData, QuadSystem};
use crate::error::Result;
use crate::linalg::{to_f64, Q};
use crate::specialfn::QContext;

type C = Complex64;

/// One factor `G_q((−q)^{c₀ + c_μ μ̂ + c_λ λ̂ + Σ ε_k ε̂_k} y^monomial)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factor {
    #[serde(serialize_with = "qser::one")]
    pub c0: Q,
    #[serde(serialize_with = "qser::one")]
    pub c_mu: Q,
    #[serde(serialize_with = "qser::one")]
    pub c_lambda: Q,
    /// Coefficients of the edge imbalances `ε̂_k = ε_k/π`; empty when absent.
    #[serde(serialize_with = "qser::vec")]
    pub eps: Vec<Q>,
    pub monomial: Vec<i64>,
    /// Tetrahedron the factor came from, if known.
    pub tet: Option<usize>,
}

impl Factor {
    pub fn new(c0: Q, c_mu: Q, c_lambda: Q, monomial: Vec<i64>) -> Self {
        Self { c0, c_mu, c_lambda, eps: Vec::new(), monomial, tet: None }
    }

    pub fn is_constant(&self) -> bool {
        self.monomial.iter().all(|&v| v == 0)
    }

    /// The exponent of `(−q)` in the argument at a peripheral point.
    pub fn exponent(&self, p: &Peripheral) -> C {
        let mut z = C::new(to_f64(&self.c0), 0.0) + p.mu_hat * to_f64(&self.c_mu) + p.lam_hat * to_f64(&self.c_lambda);
        for (c, e) in self.eps.iter().zip(&p.eps) {
            z += to_f64(c) * e;
        }
        z
    }
}

/// A point `(e_μ, e_λ) = ((−q)^{μ̂}, (−q)^{λ̂})` given by its exponents, plus
/// optional edge imbalances `ε̂_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Peripheral {
    pub mu_hat: C,
    pub lam_hat: C,
    pub eps: Vec<f64>,
}

impl Peripheral {
    pub fn new(mu_hat: C, lam_hat: C) -> Self {
        Self { mu_hat, lam_hat, eps: Vec::new() }
    }

    /// The point `(s, t)` through principal logarithms, `μ̂ = log s / h`.
    pub fn from_st(ctx: &QContext, s: C, t: C) -> Self {
        Self::new(s.ln() / ctx.h, t.ln() / ctx.h)
    }

    pub fn with_eps(mut self, eps: Vec<f64>) -> Self {
        self.eps = eps;
        self
    }

    pub fn s(&self, ctx: &QContext) -> C {
        ctx.pow_neg_q(self.mu_hat)
    }

    pub fn t(&self, ctx: &QContext) -> C {
        ctx.pow_neg_q(self.lam_hat)
    }
}

/// The balanced state integrand
/// `c(q)^{c_power} ∏ G_q((−q)^{prefactor} y^{monomial})` on `(ℂ^*)^dim`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalancedIntegrand {
    pub dim: usize,
    pub factors: Vec<Factor>,
    pub const_factors: Vec<Factor>,
    pub c_power: u32,
}

impl BalancedIntegrand {
    /// Splits `all` into `y`-dependent and constant factors.
    pub fn new(dim: usize, all: Vec<Factor>, c_power: u32) -> Self {
        let (const_factors, factors) = all.into_iter().partition(|f: &Factor| f.is_constant());
        Self { dim, factors, const_factors, c_power }
    }

    pub fn all_factors(&self) -> impl Iterator<Item = &Factor> {
        self.factors.iter().chain(&self.const_factors)
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len() + self.const_factors.len()
    }

    /// Per tetrahedron: prefactors sum to `(1, 0, 0)`, imbalance coefficients to
    /// zero and monomials to the zero vector.
    pub fn tet_sums_balanced(&self) -> bool {
        let tets: std::collections::BTreeSet<usize> = self.all_factors().filter_map(|f| f.tet).collect();
        tets.into_iter().all(|t| {
            let fs: Vec<&Factor> = self.all_factors().filter(|f| f.tet == Some(t)).collect();
            let sum = |g: &dyn Fn(&Factor) -> Q| fs.iter().map(|f| g(f)).sum::<Q>();
            let eps_len = fs.iter().map(|f| f.eps.len()).max().unwrap_or(0);
            fs.len() == 3
                && sum(&|f| f.c0.clone()).is_one()
                && sum(&|f| f.c_mu.clone()).is_zero()
                && sum(&|f| f.c_lambda.clone()).is_zero()
                && (0..eps_len).all(|k| sum(&|f| f.eps.get(k).cloned().unwrap_or_default()).is_zero())
                && (0..self.dim).all(|k| fs.iter().map(|f| f.monomial[k]).sum::<i64>() == 0)
        })
    }

    /// Arguments `(−q)^{prefactor}` of the `y`-dependent factors.
    pub fn prefactors(&self, ctx: &QContext, p: &Peripheral) -> Vec<C> {
        self.factors.iter().map(|f| ctx.pow_neg_q(f.exponent(p))).collect()
    }

    /// `c(q)^{c_power}` times the constant factors, with the pole check.
    pub fn constant_part(&self, ctx: &QContext, p: &Peripheral) -> Result<C> {
        let mut v = ctx.c_value().powu(self.c_power);
        for f in &self.const_factors {
            v *= ctx.gq(ctx.pow_neg_q(f.exponent(p)))?;
        }
        Ok(v)
    }

    /// Product of the `y`-dependent factors at `y`, given their prefactors.
    pub fn eval_factors(&self, ctx: &QContext, pref: &[C], y: &[C]) -> C {
        let mut v = C::one();
        for (f, p) in self.factors.iter().zip(pref) {
            let mut z = *p;
            for (yk, &e) in y.iter().zip(&f.monomial) {
                if e != 0 {
                    z *= yk.powi(e as i32);
                }
            }
            v *= ctx.gq_raw(z);
        }
        v
    }

    /// Full integrand value at `y`.
    pub fn eval(&self, ctx: &QContext, p: &Peripheral, y: &[C]) -> Result<C> {
        Ok(self.constant_part(ctx, p)? * self.eval_factors(ctx, &self.prefactors(ctx, p), y))
    }

    /// Copy with all imbalance coefficients removed.
    pub fn balanced(&self) -> Self {
        let strip = |fs: &[Factor]| fs.iter().map(|f| Factor { eps: Vec::new(), ..f.clone() }).collect();
        Self { dim: self.dim, factors: strip(&self.factors), const_factors: strip(&self.const_factors), c_power: self.c_power }
    }
}

/// The balanced integrand of a quad system: `3n` factors with prefactors read
/// off the angle forms at zero quad angles, and monomials from the columns of
/// `C̄−B̄`, `Ā−C̄`, `B̄−Ā` with the last edge variable set to `1`.
///
/// Imbalance coefficients `ε̂_k` are kept in each factor; evaluate with an
/// empty `eps` for the balanced integrand.
pub fn compile_integrand(g: &GluingData, quad: &QuadSystem) -> Result<BalancedIntegrand> {
    let n = g.n;
    let dim = n - 1;
    let mut all = Vec::with_capacity(3 * n);
    for i in 0..n {
        let col = |m: &Vec<Vec<i64>>, k: usize| m[k][i];
        let mons: [Vec<i64>; 3] = [
            (0..dim).map(|k| col(&g.c_bar, k) - col(&g.b_bar, k)).collect(),
            (0..dim).map(|k| col(&g.a_bar, k) - col(&g.c_bar, k)).collect(),
            (0..dim).map(|k| col(&g.b_bar, k) - col(&g.a_bar, k)).collect(),
        ];
        for (t, mon) in mons.into_iter().enumerate() {
            let form = quad.angle_form(i, t);
            all.push(Factor {
                c0: form[ParamLayout::ONE].clone(),
                c_mu: form[ParamLayout::MU].clone(),
                c_lambda: form[ParamLayout::LAMBDA].clone(),
                eps: (0..n).map(|k| form[ParamLayout::eps(k)].clone()).collect(),
                monomial: mon,
                tet: Some(i),
            });
        }
    }
    Ok(BalancedIntegrand::new(dim, all, n as u32))
}
