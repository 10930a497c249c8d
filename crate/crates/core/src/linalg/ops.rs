use super::eigen::eigenvalues_sym;
use super::matrix::{dot, Matrix};
use super::Tolerances;
use crate::error::{Error, Result};

/// Gauss-Jordan inversion with partial pivoting. A pivot smaller than
/// `tol.pivot` times the largest entry is treated as singular.
pub fn invert(a: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Dimension("cannot invert a non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = Matrix::identity(n);
    let threshold = tol.pivot * a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .expect("non-empty range");
        if m[(pivot, col)].abs() <= threshold {
            return Err(Error::Singular);
        }
        if pivot != col {
            swap_rows(&mut m, pivot, col);
            swap_rows(&mut inv, pivot, col);
        }
        let p = m[(col, col)];
        for j in 0..n {
            m[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = m[(i, col)];
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                m[(i, j)] -= factor * m[(col, j)];
                inv[(i, j)] -= factor * inv[(col, j)];
            }
        }
    }
    Ok(inv)
}

fn swap_rows(m: &mut Matrix, a: usize, b: usize) {
    for j in 0..m.cols() {
        let t = m[(a, j)];
        m[(a, j)] = m[(b, j)];
        m[(b, j)] = t;
    }
}

/// Determinant via LU with partial pivoting.
pub fn determinant(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Dimension("determinant of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .expect("non-empty range");
        if m[(pivot, col)] == 0.0 {
            return Ok(0.0);
        }
        if pivot != col {
            swap_rows(&mut m, pivot, col);
            det = -det;
        }
        let p = m[(col, col)];
        det *= p;
        for i in col + 1..n {
            let factor = m[(i, col)] / p;
            for j in col..n {
                m[(i, j)] -= factor * m[(col, j)];
            }
        }
    }
    Ok(det)
}

/// (Λ + x y^T)^{-1} from Λ^{-1}.
pub fn sherman_morrison(lambda_inv: &Matrix, x: &[f64], y: &[f64]) -> Result<Matrix> {
    let n = lambda_inv.rows();
    let li_x = lambda_inv.mul_vec(x);
    let yt_li: Vec<f64> = (0..n).map(|j| (0..n).map(|i| y[i] * lambda_inv[(i, j)]).sum()).collect();
    let denom = 1.0 + dot(y, &li_x);
    if denom.abs() <= f64::EPSILON {
        return Err(Error::DenominatorZero);
    }
    Ok(Matrix::from_fn(n, n, |i, j| lambda_inv[(i, j)] - li_x[i] * yt_li[j] / denom))
}

/// det(Λ + x y^T) = det(Λ) (1 + y^T Λ^{-1} x).
pub fn det_rank_one_update(lambda: &Matrix, x: &[f64], y: &[f64], tol: &Tolerances) -> Result<f64> {
    let det = determinant(lambda)?;
    let inv = invert(lambda, tol)?;
    Ok(det * (1.0 + dot(y, &inv.mul_vec(x))))
}

/// Lower-triangular L with A = L L^T.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    a.check_symmetric(Tolerances::default().symmetry)?;
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
            if i == j {
                let d = a[(i, i)] - s;
                if d <= 0.0 {
                    return Err(Error::NotPositiveDefinite);
                }
                l[(i, i)] = d.sqrt();
            } else {
                l[(i, j)] = (a[(i, j)] - s) / l[(j, j)];
            }
        }
    }
    Ok(l)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCheck {
    pub holds: bool,
    /// Largest amount by which an inequality is violated (<= 0 when all hold).
    pub worst: f64,
}

/// Cauchy interlacing between A and A with index `drop` removed:
/// λ_k(A) <= λ_k(B) <= λ_{k+1}(A) in ascending order.
pub fn interlacing_check(a: &Matrix, drop: usize, tol: f64) -> Result<SpectralCheck> {
    let n = a.rows();
    let keep: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
    let la = eigenvalues_sym(a)?;
    let lb = eigenvalues_sym(&a.principal_minor(&keep))?;
    let mut worst = f64::NEG_INFINITY;
    for (k, &b) in lb.iter().enumerate() {
        worst = worst.max(la[k] - b).max(b - la[k + 1]);
    }
    Ok(SpectralCheck { holds: worst <= tol, worst })
}

/// Weyl's inequalities for A + B in both directions (ascending order):
/// λ_{i+j-n}(A+B) <= λ_i(A) + λ_j(B) <= λ_{i+j-1}(A+B) where defined.
pub fn weyl_check(a: &Matrix, b: &Matrix, tol: f64) -> Result<SpectralCheck> {
    let n = a.rows();
    let la = eigenvalues_sym(a)?;
    let lb = eigenvalues_sym(b)?;
    let ls = eigenvalues_sym(&a.add(b))?;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i + j < n {
                worst = worst.max(la[i] + lb[j] - ls[i + j]);
            }
            if i + j >= n - 1 {
                worst = worst.max(ls[i + j + 1 - n] - (la[i] + lb[j]));
            }
        }
    }
    Ok(SpectralCheck { holds: worst <= tol, worst })
}

/// Largest eigenvalue of a matrix with real spectrum (e.g. one similar to a
/// symmetric matrix) by power iteration on A + ‖A‖_∞ I.
pub fn power_iteration_max(a: &Matrix, tol: f64, max_iter: usize) -> Result<f64> {
    let n = a.rows();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let shift = (0..n).map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    let mut estimate = f64::NAN;
    for _ in 0..max_iter {
        let mut y = a.mul_vec(&x);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += shift * xi;
        }
        let ny = super::matrix::norm(&y);
        if ny == 0.0 {
            return Ok(-shift);
        }
        let next = dot(&x, &y) / dot(&x, &x);
        x = y.iter().map(|v| v / ny).collect();
        if (next - estimate).abs() <= tol * next.abs().max(1.0) {
            return Ok(next - shift);
        }
        estimate = next;
    }
    Err(Error::NoConvergence("power iteration"))
}
