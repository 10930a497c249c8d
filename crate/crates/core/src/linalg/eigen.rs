use super::matrix::Matrix;
use super::Tolerances;
use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix. Values ascend; eigenvector `k`
/// is column `k` of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymEig {
    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// V f(Λ) V^T
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.vectors[(i, k)] * fv[k] * self.vectors[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

/// Which dense symmetric eigensolver to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EigenSolver {
    Jacobi,
    Tridiagonal,
    /// Jacobi for small matrices, Householder + implicit QL above
    /// [`AUTO_JACOBI_LIMIT`].
    #[default]
    Auto,
}

pub const AUTO_JACOBI_LIMIT: usize = 96;
const JACOBI_MAX_SWEEPS: usize = 100;

pub fn eig_sym(a: &Matrix) -> Result<SymEig> {
    eig_sym_with(a, EigenSolver::Auto, &Tolerances::default())
}

pub fn eig_sym_with(a: &Matrix, solver: EigenSolver, tol: &Tolerances) -> Result<SymEig> {
    a.check_symmetric(tol.symmetry)?;
    let a = a.symmetrized();
    match solver {
        EigenSolver::Jacobi => jacobi(&a, tol.convergence),
        EigenSolver::Tridiagonal => tridiagonal_ql(&a),
        EigenSolver::Auto if a.rows() <= AUTO_JACOBI_LIMIT => jacobi(&a, tol.convergence),
        EigenSolver::Auto => tridiagonal_ql(&a),
    }
}

pub fn eigenvalues_sym(a: &Matrix) -> Result<Vec<f64>> {
    let tol = Tolerances::default();
    a.check_symmetric(tol.symmetry)?;
    if a.rows() <= AUTO_JACOBI_LIMIT {
        return Ok(jacobi(&a.symmetrized(), tol.convergence)?.values);
    }
    tridiagonal_ql_values(&a.symmetrized())
}

pub fn lambda_max(a: &Matrix) -> Result<f64> {
    Ok(eig_sym(a)?.max())
}

pub fn lambda_min(a: &Matrix) -> Result<f64> {
    Ok(eig_sym(a)?.min())
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius mass drops below
/// `tol` times the Frobenius norm of the input.
fn jacobi(a: &Matrix, tol: f64) -> Result<SymEig> {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius();
    if n <= 1 || scale == 0.0 {
        return Ok(sorted(m.diag(), v));
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += 2.0 * m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= tol * scale {
            return Ok(sorted(m.diag(), v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::NoConvergence("Jacobi eigensolver"))
}

/// Householder reduction to tridiagonal form followed by implicit QL.
fn tridiagonal_ql(a: &Matrix) -> Result<SymEig> {
    let n = a.rows();
    if n == 0 {
        return Ok(SymEig { values: vec![], vectors: Matrix::zeros(0, 0) });
    }
    let (mut d, mut e, mut zt) = tridiagonalize(a, true);
    implicit_ql(&mut d, &mut e, &mut zt)?;
    let vectors = Matrix::from_fn(n, n, |i, j| zt[j][i]);
    Ok(sorted(d, vectors))
}

/// Eigenvalues only, ascending; skips every eigenvector update.
fn tridiagonal_ql_values(a: &Matrix) -> Result<Vec<f64>> {
    let (mut d, mut e, mut zt) = tridiagonalize(a, false);
    implicit_ql(&mut d, &mut e, &mut zt)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// A = Q T Q^T with T tridiagonal: returns diag(T), the superdiagonal (last
/// entry 0) and, if requested, Q^T as rows. Works on row-major storage so
/// every inner loop is contiguous.
fn tridiagonalize(a: &Matrix, want_q: bool) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::new();
    for k in 0..n.saturating_sub(1) {
        d[k] = m[k][k];
        // Column k below the diagonal equals row k right of it.
        let mut v: Vec<f64> = m[k][k + 1..].to_vec();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            if want_q {
                reflectors.push((v, 0.0));
            }
            continue;
        }
        let alpha = if v[0] > 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let beta = 2.0 / vv;
        e[k] = alpha;
        // p = β A22 v, w = p − (β/2)(p·v) v, A22 −= v w^T + w v^T.
        let off = k + 1;
        let p: Vec<f64> = (off..n).map(|i| beta * dot_slices(&m[i][off..], &v)).collect();
        let pv = dot_slices(&p, &v);
        let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - 0.5 * beta * pv * vi).collect();
        for (r, row) in m[off..].iter_mut().enumerate() {
            let (vr, wr) = (v[r], w[r]);
            for ((x, vc), wc) in row[off..].iter_mut().zip(&v).zip(&w) {
                *x -= vr * wc + wr * vc;
            }
        }
        if want_q {
            reflectors.push((v, beta));
        }
    }
    d[n - 1] = m[n - 1][n - 1];
    let mut qt: Vec<Vec<f64>> = Vec::new();
    if want_q {
        // Q = H_0 H_1 ⋯ H_{n−2}; build Q^T = H_{n−2} ⋯ H_0 by applying each
        // reflector to the rows of the running product from the left.
        qt = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        for (k, (v, beta)) in reflectors.iter().enumerate() {
            if *beta == 0.0 {
                continue;
            }
            let off = k + 1;
            let mut r = vec![0.0; n];
            for (vi, row) in v.iter().zip(&qt[off..]) {
                for (rj, x) in r.iter_mut().zip(row) {
                    *rj += vi * x;
                }
            }
            for (vi, row) in v.iter().zip(qt[off..].iter_mut()) {
                let c = beta * vi;
                for (x, rj) in row.iter_mut().zip(&r) {
                    *x -= c * rj;
                }
            }
        }
    }
    (d, e, qt)
}

fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Implicit QL with Wilkinson shifts on the tridiagonal (d, e), where e[i]
/// couples i and i+1. Rotations are applied to the rows of `zt` (skipped when
/// it is empty), so on exit row k of `zt` is the eigenvector of d[k].
fn implicit_ql(d: &mut [f64], e: &mut [f64], zt: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence("tridiagonal QL eigensolver"));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if !zt.is_empty() {
                        let (lo, hi) = zt.split_at_mut(i + 1);
                        for (a, b) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn sorted(values: Vec<f64>, vectors: Matrix) -> SymEig {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    SymEig {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: Matrix::from_fn(n, n, |i, j| vectors[(i, order[j])]),
    }
}
