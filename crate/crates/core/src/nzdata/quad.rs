use num_traits::{One, Zero};
use serde::Serialize;
use std::f64::consts::PI;

use super::{qser, GluingData};
use crate::error::{Error, Result};
use crate::linalg::{det, inverse, mat_mul, qi, qr, to_f64, transpose, Q, QMat};

/// A quad system and the row/tetrahedron choices that make the angle
/// parametrization invertible.
///
/// `choice[i]` is the shape (`0 = z`, `1 = z′`, `2 = z″`) whose angle is the
/// free quad angle of tetrahedron `i`; shape `(choice+1) mod 3` is eliminated by
/// the angle sum and shape `(choice+2) mod 3` is solved for. The rows of
/// `a_prime`/`b_prime` are the edge equations without `dropped_row`, then the
/// meridian and the half-longitude, written in the reduced `(A|B)` form.
#[derive(Clone, Debug, Serialize)]
pub struct QuadSystem {
    pub choice: Vec<u8>,
    pub dropped_row: usize,
    /// Tetrahedron whose quad angle is solved for instead of given.
    pub elim_tet: usize,
    #[serde(serialize_with = "qser::mat")]
    pub a_prime: QMat,
    #[serde(serialize_with = "qser::mat")]
    pub b_prime: QMat,
    /// Determinant of the square solving matrix `[B′ | a′_elim]`.
    #[serde(serialize_with = "qser::one")]
    pub det: Q,
    /// Every angle as an affine form in the parameters, see [`ParamLayout`].
    #[serde(skip)]
    pub(crate) forms: Vec<[Vec<Q>; 3]>,
}

/// Index layout of the parameter vector of the affine angle forms:
/// `(1, μ̂, λ̂, ε_0 … ε_{n−1}, φ_0 … φ_{n−1})`, all in units of `π`
/// (`λ̂ = λ/2π`). The entries `ε_dropped` and `φ_elim` never occur.
pub(crate) struct ParamLayout;

impl ParamLayout {
    pub const ONE: usize = 0;
    pub const MU: usize = 1;
    pub const LAMBDA: usize = 2;
    pub fn eps(k: usize) -> usize {
        3 + k
    }
    pub fn phi(n: usize, i: usize) -> usize {
        3 + n + i
    }
    pub fn len(n: usize) -> usize {
        3 + 2 * n
    }
}

impl QuadSystem {
    /// True for the standard quads `(z, z″)` solved with `z′` eliminated.
    pub fn is_standard(&self) -> bool {
        self.choice.iter().all(|&c| c == 0)
    }

    /// Angle form of shape `t` in tetrahedron `i`.
    pub fn angle_form(&self, i: usize, t: usize) -> &[Q] {
        &self.forms[i][t]
    }
}

/// All admissible quad systems in search order: quad choices lexicographically
/// (the standard quads first), then the dropped edge row, then the eliminated
/// tetrahedron, each ascending.
pub fn admissible_quads(g: &GluingData) -> Result<Vec<QuadSystem>> {
    let mut out = Vec::new();
    search(g, |q| {
        out.push(q);
        false
    })?;
    Ok(out)
}

/// The first admissible quad system in search order.
pub fn select_quad(g: &GluingData) -> Result<QuadSystem> {
    let mut found = None;
    search(g, |q| {
        found = Some(q);
        true
    })?;
    found.ok_or(Error::NoQuadFound)
}

fn search(g: &GluingData, mut visit: impl FnMut(QuadSystem) -> bool) -> Result<()> {
    let n = g.n;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        // most significant digit is tetrahedron 0, so codes run lexicographically
        let choice: Vec<u8> = (0..n).map(|i| ((code / 3usize.pow((n - 1 - i) as u32)) % 3) as u8).collect();
        for j in 0..n {
            for elim in 0..n {
                if let Some(q) = quad_system(g, &choice, j, elim)? {
                    if visit(q) {
                        return Ok(());
                    }
                }
            }
        }
    }
    Ok(())
}

/// Builds the quad system for the given choices, or `None` if its solving
/// matrix is singular.
pub fn quad_system(g: &GluingData, choice: &[u8], dropped_row: usize, elim_tet: usize) -> Result<Option<QuadSystem>> {
    let n = g.n;
    let plen = ParamLayout::len(n);
    let row_ids: Vec<usize> = (0..n).filter(|&k| k != dropped_row).chain([n, n + 1]).collect();
    let mut a_prime = QMat::new();
    let mut b_prime = QMat::new();
    let mut rhs = QMat::new();
    for &k in &row_ids {
        let scale = if k == n + 1 { qr(1, 2) } else { Q::one() };
        let c = |i: usize, t: usize| qi(g.coef(k, i, t)) * &scale;
        let mut ar = Vec::with_capacity(n);
        let mut br = Vec::with_capacity(n);
        let mut form = vec![Q::zero(); plen];
        match k {
            k if k < n => {
                form[ParamLayout::ONE] = qi(2);
                form[ParamLayout::eps(k)] = Q::one();
            }
            k if k == n => form[ParamLayout::MU] = Q::one(),
            _ => form[ParamLayout::LAMBDA] = Q::one(),
        }
        for i in 0..n {
            let f = choice[i] as usize;
            let (e, s) = ((f + 1) % 3, (f + 2) % 3);
            let a = c(i, f) - c(i, e);
            let b = c(i, s) - c(i, e);
            form[ParamLayout::ONE] -= c(i, e);
            if i != elim_tet {
                form[ParamLayout::phi(n, i)] -= &a;
            }
            ar.push(a);
            br.push(b);
        }
        a_prime.push(ar);
        b_prime.push(br);
        rhs.push(form);
    }
    let solving: QMat = (0..=n)
        .map(|r| {
            let mut row = b_prime[r].clone();
            row.push(a_prime[r][elim_tet].clone());
            row
        })
        .collect();
    let d = det(&solving);
    if d.is_zero() {
        return Ok(None);
    }
    let inv = inverse(&solving).ok_or_else(|| Error::SingularSystem("solving matrix".into()))?;
    let u = mat_mul(&inv, &rhs);

    let upper_a: QMat = a_prime[..n].to_vec();
    let upper_b: QMat = b_prime[..n].to_vec();
    let sym = mat_mul(&upper_a, &transpose(&upper_b));
    if sym != transpose(&sym) {
        return Err(Error::InconsistentData(format!(
            "A'B'^T is not symmetric for quads {choice:?}, dropped row {dropped_row}"
        )));
    }

    let forms = (0..n)
        .map(|i| {
            let f = choice[i] as usize;
            let (e, s) = ((f + 1) % 3, (f + 2) % 3);
            let free = if i == elim_tet {
                u[n].clone()
            } else {
                let mut v = vec![Q::zero(); plen];
                v[ParamLayout::phi(n, i)] = Q::one();
                v
            };
            let solved = u[i].clone();
            let mut elim = vec![Q::zero(); plen];
            elim[ParamLayout::ONE] = Q::one();
            for p in 0..plen {
                elim[p] -= &free[p] + &solved[p];
            }
            let mut out: [Vec<Q>; 3] = Default::default();
            out[f] = free;
            out[s] = solved;
            out[e] = elim;
            out
        })
        .collect();
    Ok(Some(QuadSystem { choice: choice.to_vec(), dropped_row, elim_tet, a_prime, b_prime, det: d, forms }))
}

/// Dihedral angles in radians together with their edge imbalances and
/// peripheral holonomies.
#[derive(Clone, Debug, Serialize)]
pub struct AngleStructure {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    /// `Āα + B̄β + C̄γ − 2π`.
    pub eps: Vec<f64>,
    pub mu: f64,
    pub lambda: f64,
    pub strict: bool,
}

impl AngleStructure {
    /// Fills in `eps`, `mu`, `lambda` and `strict` from the angles.
    pub fn from_angles(g: &GluingData, alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Self {
        let n = g.n;
        let row = |k: usize| -> f64 {
            (0..n).map(|i| g.coef(k, i, 0) as f64 * alpha[i] + g.coef(k, i, 1) as f64 * beta[i] + g.coef(k, i, 2) as f64 * gamma[i]).sum()
        };
        let eps = (0..n).map(|k| row(k) - 2.0 * PI).collect();
        let strict = alpha.iter().chain(&beta).chain(&gamma).all(|&x| x > 0.0);
        Self { eps, mu: row(n), lambda: row(n + 1), strict, alpha, beta, gamma }
    }

    pub fn angle(&self, i: usize, t: usize) -> f64 {
        [&self.alpha, &self.beta, &self.gamma][t][i]
    }

    pub fn min_angle(&self) -> f64 {
        self.alpha.iter().chain(&self.beta).chain(&self.gamma).copied().fold(f64::INFINITY, f64::min)
    }
}

/// Inverts the parametrization `θ ↦ (quad angles without elim_tet, ε without
/// dropped_row, μ, λ)`. All inputs in radians; entries `quad_angles[elim_tet]`
/// and `eps[dropped_row]` are ignored.
pub fn solve_angles(g: &GluingData, quad: &QuadSystem, quad_angles: &[f64], eps: &[f64], mu: f64, lambda: f64) -> Result<AngleStructure> {
    let n = g.n;
    if quad_angles.len() != n || eps.len() != n || quad.forms.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} quad angles and {n} edge imbalances")));
    }
    if quad.det.is_zero() {
        return Err(Error::SingularSystem("quad system with zero determinant".into()));
    }
    let mut p = vec![0.0; ParamLayout::len(n)];
    p[ParamLayout::ONE] = 1.0;
    p[ParamLayout::MU] = mu / PI;
    p[ParamLayout::LAMBDA] = lambda / (2.0 * PI);
    for k in 0..n {
        if k != quad.dropped_row {
            p[ParamLayout::eps(k)] = eps[k] / PI;
        }
        if k != quad.elim_tet {
            p[ParamLayout::phi(n, k)] = quad_angles[k] / PI;
        }
    }
    let eval = |form: &[Q]| PI * form.iter().zip(&p).map(|(c, x)| to_f64(c) * x).sum::<f64>();
    let ang = |t: usize| (0..n).map(|i| eval(&quad.forms[i][t])).collect::<Vec<_>>();
    Ok(AngleStructure::from_angles(g, ang(0), ang(1), ang(2)))
}

/// The parameters `(quad angles, ε, μ, λ)` of an angle structure.
pub fn parametrize(quad: &QuadSystem, a: &AngleStructure) -> (Vec<f64>, Vec<f64>, f64, f64) {
    let qa = quad.choice.iter().enumerate().map(|(i, &c)| a.angle(i, c as usize)).collect();
    (qa, a.eps.clone(), a.mu, a.lambda)
}
