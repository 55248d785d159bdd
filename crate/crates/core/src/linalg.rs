//! Small dense linear algebra used by the estimators: Householder least
//! squares with rank detection, Cholesky factorization, and eigenvalues of
//! general real matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot tolerance for rank detection in the QR factorization.
pub const RANK_TOL: f64 = 1e-10;

/// Least-squares solution of `X b = y` via Householder QR.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: DVector<f64>,
    /// `(X'X)^{-1}`, computed as `R^{-1} R^{-T}`.
    pub xtx_inv: DMatrix<f64>,
}

/// Solves the least-squares problem by Householder QR.
///
/// A column is declared collinear when its pivot `|R_jj|` is at most
/// [`RANK_TOL`] times the column's Euclidean norm; the error reports the
/// offending column index.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> std::result::Result<LeastSquares, usize> {
    let (n, k) = x.shape();
    assert_eq!(n, y.len(), "design and response lengths differ");
    assert!(n >= k, "least_squares needs at least as many rows as columns");

    let norms: Vec<f64> = (0..k).map(|j| x.column(j).norm()).collect();
    let mut a = x.clone();
    let mut qty = y.clone();

    for j in 0..k {
        let alpha = a.view((j, j), (n - j, 1)).norm();
        if alpha <= RANK_TOL * norms[j] || alpha == 0.0 {
            return Err(j);
        }
        let sign = if a[(j, j)] >= 0.0 { 1.0 } else { -1.0 };
        let r_jj = -sign * alpha;
        let mut v: Vec<f64> = (j..n).map(|i| a[(i, j)]).collect();
        v[0] -= r_jj;
        let v_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= v_norm);

        // apply H = I - 2 v v' to the trailing block and to Q'y
        for c in (j + 1)..k {
            let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * a[(j + i, c)]).sum();
            for (i, vi) in v.iter().enumerate() {
                a[(j + i, c)] -= 2.0 * dot * vi;
            }
        }
        let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * qty[j + i]).sum();
        for (i, vi) in v.iter().enumerate() {
            qty[j + i] -= 2.0 * dot * vi;
        }
        a[(j, j)] = r_jj;
        for i in (j + 1)..n {
            a[(i, j)] = 0.0;
        }
    }

    let r = a.view((0, 0), (k, k)).upper_triangle();
    let rhs = qty.rows(0, k).clone_owned();
    let coefficients = back_substitute(&r, &rhs);
    let r_inv = upper_inverse(&r);
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok(LeastSquares { coefficients, xtx_inv })
}

fn back_substitute(r: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let k = r.nrows();
    let mut x = DVector::zeros(k);
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in (i + 1)..k {
            s -= r[(i, j)] * x[j];
        }
        x[i] = s / r[(i, i)];
    }
    x
}

fn upper_inverse(r: &DMatrix<f64>) -> DMatrix<f64> {
    let k = r.nrows();
    let mut inv = DMatrix::zeros(k, k);
    for c in 0..k {
        let mut e = DVector::zeros(k);
        e[c] = 1.0;
        inv.set_column(c, &back_substitute(r, &e));
    }
    inv
}

/// Lower Cholesky factor `L` with `A = L L'`.
pub fn cholesky_lower(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "cholesky needs a square matrix");
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Natural log of the determinant of a symmetric positive definite matrix.
pub fn ln_det_spd(a: &DMatrix<f64>) -> Result<f64> {
    let l = cholesky_lower(a)?;
    Ok(2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// Eigenvalue moduli of a general real square matrix, sorted descending.
///
/// The matrix is balanced (Parlett-Reinsch) before the real Schur
/// decomposition.
pub fn eigen_moduli(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if m.iter().all(|v| *v == 0.0) {
        return vec![0.0; n];
    }
    let mut balanced = m.clone();
    nalgebra::linalg::balancing::balance_parlett_reinsch(&mut balanced);
    let schur = nalgebra::linalg::Schur::try_new(balanced, 1e-12, 100_000)
        .unwrap_or_else(|| nalgebra::linalg::Schur::new(m.clone()));
    let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_solves_exact_system() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 2.0]);
        let ls = least_squares(&x, &y).unwrap();
        assert!((ls.coefficients[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((ls.coefficients[1] - 0.5).abs() < 1e-14);
        // (X'X)^{-1} for this design: X'X = [[3,6],[6,14]], det 6
        assert!((ls.xtx_inv[(0, 0)] - 14.0 / 6.0).abs() < 1e-12);
        assert!((ls.xtx_inv[(0, 1)] + 1.0).abs() < 1e-12);
        assert!((ls.xtx_inv[(1, 1)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn qr_flags_collinear_column() {
        let x = DMatrix::from_row_slice(
            4,
            3,
            &[
                1.0, 1.0, 2.0, //
                1.0, 2.0, 4.0, //
                1.0, 3.0, 6.0, //
                1.0, 4.0, 8.0,
            ],
        );
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 5.0]);
        assert_eq!(least_squares(&x, &y).unwrap_err(), 2);
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0]);
        let l = cholesky_lower(&a).unwrap();
        assert!((&l * l.transpose() - &a).abs().max() < 1e-14);
        let det = a.determinant();
        assert!((ln_det_spd(&a).unwrap() - det.ln()).abs() < 1e-13);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(cholesky_lower(&a), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn eigen_moduli_of_rotation_and_diagonal() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -0.8, 0.8, 0.0]);
        let m = eigen_moduli(&rot);
        assert!((m[0] - 0.8).abs() < 1e-12 && (m[1] - 0.8).abs() < 1e-12);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![0.2, -0.9, 0.5]));
        let m = eigen_moduli(&d);
        assert!((m[0] - 0.9).abs() < 1e-12 && (m[2] - 0.2).abs() < 1e-12);
    }
}
