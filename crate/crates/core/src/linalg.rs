//! Exact rational linear algebra, integer lattice kernels and an exact simplex.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;
pub type QMat = Vec<Vec<Q>>;

pub fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational with the same value as a finite float.
pub fn qf(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn from_int_rows(rows: &[Vec<i64>]) -> QMat {
    rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
}

pub fn transpose(m: &QMat) -> QMat {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &QMat, x: &[Q]) -> Vec<Q> {
    a.iter().map(|row| row.iter().zip(x).fold(Q::zero(), |acc, (r, v)| acc + r * v)).collect()
}

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &QMat) -> (QMat, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &a[r][j];
                    a[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &QMat) -> usize {
    rref(m).1.len()
}

pub fn det(m: &QMat) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let sub = &f * &a[c][j];
                    a[i][j] -= sub;
                }
            }
        }
    }
    d
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let (red, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solution of the square system `m x = b`, if `m` is invertible.
pub fn solve(m: &QMat, b: &[Q]) -> Option<Vec<Q>> {
    inverse(m).map(|inv| mat_vec(&inv, b))
}

/// A basis of the integer kernel `{x ∈ ℤⁿ : M x = 0}`.
///
/// Unimodular column operations bring `M` to a column echelon form `M U = [H | 0]`;
/// the columns of `U` under the zero block are the basis.
pub fn integer_kernel(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = m.len();
    let n = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let h = column_echelon(&mut a, &mut u, rows, n);
    (h..n).map(|j| (0..n).map(|i| i64::try_from(u[i][j]).expect("kernel entry fits i64")).collect()).collect()
}

/// All integer solutions of `M x = b`: a particular solution and a kernel
/// basis, or `None` when there is no integer solution.
pub fn integer_solve(m: &[Vec<i64>], b: &[i64]) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
    let rows = m.len();
    let n = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let h = column_echelon(&mut a, &mut u, rows, n);
    // forward substitution through the pivots of [H | 0]
    let mut y = vec![0i128; h];
    let mut col = 0;
    for row in 0..rows {
        let acc: i128 = (0..col).map(|j| a[row][j] * y[j]).sum();
        let rest = b[row] as i128 - acc;
        if col < h && a[row][col] != 0 {
            if rest % a[row][col] != 0 {
                return None;
            }
            y[col] = rest / a[row][col];
            col += 1;
        } else if rest != 0 {
            return None;
        }
    }
    let x = (0..n)
        .map(|i| i64::try_from((0..h).map(|j| u[i][j] * y[j]).sum::<i128>()).expect("solution fits i64"))
        .collect();
    let kernel = (h..n).map(|j| (0..n).map(|i| i64::try_from(u[i][j]).expect("kernel entry fits i64")).collect()).collect();
    Some((x, kernel))
}

/// In-place column echelon form; returns the number of pivot columns.
fn column_echelon(a: &mut [Vec<i128>], u: &mut [Vec<i128>], rows: usize, n: usize) -> usize {
    let swap = |a: &mut [Vec<i128>], u: &mut [Vec<i128>], i: usize, j: usize| {
        for r in a.iter_mut().chain(u.iter_mut()) {
            r.swap(i, j);
        }
    };
    let mut piv = 0;
    for row in 0..rows {
        if piv >= n {
            break;
        }
        loop {
            let nz: Vec<usize> = (piv..n).filter(|&j| a[row][j] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let j = *nz.iter().min_by_key(|&&j| a[row][j].abs()).unwrap();
            swap(a, u, piv, j);
            let mut clean = true;
            for j in piv + 1..n {
                if a[row][j] != 0 {
                    let k = a[row][j].div_euclid(a[row][piv]);
                    for r in a.iter_mut().chain(u.iter_mut()) {
                        r[j] -= k * r[piv];
                    }
                    clean &= a[row][j] == 0;
                }
            }
            if clean {
                break;
            }
        }
        if a[row][piv] != 0 {
            if a[row][piv] < 0 {
                for r in a.iter_mut().chain(u.iter_mut()) {
                    r[piv] = -r[piv];
                }
            }
            piv += 1;
        }
    }
    piv
}

/// Basis (as columns) of the lattice in `ℚ^d` generated by `gens`, in lower
/// triangular echelon form with positive diagonal. Directions missing from the
/// span are filled with standard unit vectors so the basis always has `d` columns.
pub fn lattice_basis(gens: &[Vec<Q>], d: usize) -> QMat {
    use num_integer::Integer;
    let mut den = BigInt::one();
    for g in gens {
        for x in g {
            den = den.lcm(x.denom());
        }
    }
    let den_i = i128::try_from(den.clone()).expect("denominator fits");
    let mut a: Vec<Vec<i128>> = (0..d)
        .map(|i| {
            gens.iter()
                .map(|g| {
                    let v = &g[i] * Q::from_integer(den.clone());
                    i128::try_from(v.to_integer()).expect("entry fits")
                })
                .collect()
        })
        .collect();
    let n = gens.len();
    let mut u: Vec<Vec<i128>> = Vec::new();
    let piv = column_echelon(&mut a, &mut u, d, n);
    let mut cols: Vec<Vec<Q>> = (0..piv)
        .map(|j| (0..d).map(|i| Q::new(BigInt::from(a[i][j]), BigInt::from(den_i))).collect())
        .collect();
    // fill missing directions
    for e in 0..d {
        if cols.len() == d {
            break;
        }
        let mut unit = vec![Q::zero(); d];
        unit[e] = Q::one();
        let mut trial = cols.clone();
        trial.push(unit);
        if rank(&transpose(&trial)) == trial.len() {
            cols = trial;
        }
    }
    transpose(&cols)
}

/// Outcome of a linear program.
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

/// Maximizes `c·x` subject to `A x = b`, `x ≥ 0`, with exact arithmetic.
///
/// Two-phase tableau simplex with Bland's rule (smallest entering and leaving
/// indices), so the pivot sequence and the optimum returned are deterministic.
pub fn simplex_max(c: &[Q], a: &QMat, b: &[Q]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    // rows with b ≥ 0
    let mut rows: QMat = Vec::with_capacity(m);
    let mut rhs: Vec<Q> = Vec::with_capacity(m);
    for i in 0..m {
        if b[i].is_negative() {
            rows.push(a[i].iter().map(|x| -x).collect());
            rhs.push(-&b[i]);
        } else {
            rows.push(a[i].clone());
            rhs.push(b[i].clone());
        }
    }
    // tableau columns: n originals, m artificials
    let total = n + m;
    let mut t: QMat = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..total).collect();

    // phase one: maximize −Σ artificials
    let phase1: Vec<Q> = (0..total).map(|j| if j >= n { -Q::one() } else { Q::zero() }).collect();
    run_simplex(&mut t, &mut basis, &phase1, total, |_| true);
    let infeas: Q = basis.iter().enumerate().filter(|(_, &bj)| bj >= n).map(|(i, _)| t[i][total].clone()).sum();
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }
    // drive remaining artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
            } else {
                t.remove(i);
                basis.remove(i);
                continue;
            }
        }
        i += 1;
    }
    let mut obj = c.to_vec();
    obj.extend((0..m).map(|_| Q::zero()));
    if !run_simplex(&mut t, &mut basis, &obj, total, |j| j < n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i][total].clone();
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}

fn pivot(t: &mut QMat, basis: &mut [usize], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for x in t[r].iter_mut() {
        *x = &*x * &inv;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                *x -= &f * p;
            }
        }
    }
    basis[r] = c;
}

/// Returns false if the objective is unbounded.
fn run_simplex(t: &mut QMat, basis: &mut [usize], obj: &[Q], total: usize, allowed: impl Fn(usize) -> bool) -> bool {
    loop {
        // reduced costs
        let entering = (0..total).filter(|&j| allowed(j) && !basis.contains(&j)).find(|&j| {
            let z: Q = basis.iter().enumerate().map(|(i, &bj)| &obj[bj] * &t[i][j]).sum();
            (&obj[j] - z).is_positive()
        });
        let Some(j) = entering else { return true };
        let mut best: Option<(Q, usize, usize)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[j].is_positive() {
                let ratio = &row[total] / &row[j];
                let better = match &best {
                    None => true,
                    Some((r, _, b)) => ratio < *r || (ratio == *r && basis[i] < *b),
                };
                if better {
                    best = Some((ratio, i, basis[i]));
                }
            }
        }
        let Some((_, r, _)) = best else { return false };
        pivot(t, basis, r, j);
    }
}
