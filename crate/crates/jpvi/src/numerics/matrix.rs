//! Dense extended-precision matrices, Cholesky factorization and the
//! trace formulas for derivatives of `ln det`.

use super::{real, Real};
use crate::error::{Error, Result};
use rug::ops::CompleteRound;

/// Row-major dense matrix of extended-precision reals.
#[derive(Clone, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    e: Vec<Real>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        assert!(rows > 0 && cols > 0);
        Matrix {
            rows,
            cols,
            e: (0..rows * cols).map(|_| real(prec, 0)).collect(),
        }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Matrix::zeros(n, n, prec);
        for i in 0..n {
            *m.at_mut(i, i) = real(prec, 1);
        }
        m
    }

    /// Build a symmetric matrix from `f(i, j)` evaluated only for
    /// `i <= j`; the transposed entry is the exact same value.
    pub fn symmetric_from_fn(n: usize, prec: u32, mut f: impl FnMut(usize, usize) -> Real) -> Self {
        let mut m = Matrix::zeros(n, n, prec);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                *m.at_mut(i, j) = v.clone();
                if i != j {
                    *m.at_mut(j, i) = v;
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Real {
        &self.e[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Real {
        &mut self.e[i * self.cols + j]
    }

    pub fn prec(&self) -> u32 {
        self.e.iter().map(|x| x.prec()).max().unwrap()
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.at(i, j) != self.at(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let prec = self.prec().max(other.prec());
        let mut out = Matrix::zeros(self.rows, other.cols, prec);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = real(prec, 0);
                for k in 0..self.cols {
                    acc += (self.at(i, k) * other.at(k, j)).complete(prec);
                }
                *out.at_mut(i, j) = acc;
            }
        }
        out
    }

    pub fn trace(&self) -> Real {
        assert_eq!(self.rows, self.cols);
        let prec = self.prec();
        let mut acc = real(prec, 0);
        for i in 0..self.rows {
            acc += self.at(i, i);
        }
        acc
    }

    /// tr(AB) without forming the product.
    pub fn trace_prod(&self, other: &Matrix) -> Real {
        assert_eq!(self.cols, other.rows);
        assert_eq!(other.cols, self.rows);
        let prec = self.prec().max(other.prec());
        let mut acc = real(prec, 0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += (self.at(i, k) * other.at(k, i)).complete(prec);
            }
        }
        acc
    }
}

/// Cholesky factorization `M = L L^T` of a symmetric positive definite
/// matrix, exposing the log-determinant and solves.
pub struct Factorization {
    l: Matrix,
    prec: u32,
}

/// Cholesky-factor a symmetric, intended positive definite matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] carrying the index of the
/// first nonpositive pivot, or [`Error::NonFinitePivot`] when precision
/// is exhausted and a pivot is no longer a finite number.
pub fn factor_spd(m: &Matrix) -> Result<Factorization> {
    assert!(m.is_symmetric(), "factor_spd requires a symmetric matrix");
    let n = m.rows();
    let prec = m.prec();
    let mut l = Matrix::zeros(n, n, prec);
    for j in 0..n {
        for i in j..n {
            let mut acc = m.at(i, j).clone();
            for k in 0..j {
                acc -= (l.at(i, k) * l.at(j, k)).complete(prec);
            }
            if i == j {
                if !acc.is_finite() {
                    return Err(Error::NonFinitePivot);
                }
                if acc <= 0 {
                    return Err(Error::NotPositiveDefinite(j));
                }
                *l.at_mut(j, j) = acc.sqrt();
            } else {
                let pivot = l.at(j, j).clone();
                *l.at_mut(i, j) = acc / pivot;
            }
        }
    }
    Ok(Factorization { l, prec })
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn lower(&self) -> &Matrix {
        &self.l
    }

    /// ln det M = 2 sum ln L_jj.
    pub fn log_det(&self) -> Real {
        let mut acc = real(self.prec, 0);
        for j in 0..self.l.rows() {
            acc += self.l.at(j, j).clone().ln();
        }
        acc * 2u32
    }

    /// Determinant sign; always +1 for a completed SPD factorization.
    pub fn det_sign(&self) -> i32 {
        1
    }

    /// Solve M x = b.
    pub fn solve_vec(&self, b: &[Real]) -> Vec<Real> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let prec = self.prec.max(b.iter().map(|x| x.prec()).max().unwrap());
        // forward: L y = b
        let mut y: Vec<Real> = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = real(prec, &b[i]);
            for k in 0..i {
                acc -= (self.l.at(i, k) * &y[k]).complete(prec);
            }
            acc /= self.l.at(i, i);
            y.push(acc);
        }
        // backward: L^T x = y
        let mut x = y;
        for i in (0..n).rev() {
            let mut acc = x[i].clone();
            for k in (i + 1)..n {
                acc -= (self.l.at(k, i) * &x[k]).complete(prec);
            }
            acc /= self.l.at(i, i);
            x[i] = acc;
        }
        x
    }

    /// Solve M X = B column by column.
    pub fn solve_mat(&self, b: &Matrix) -> Matrix {
        let n = self.dim();
        assert_eq!(b.rows(), n);
        let prec = self.prec.max(b.prec());
        let mut out = Matrix::zeros(n, b.cols(), prec);
        for j in 0..b.cols() {
            let col: Vec<Real> = (0..n).map(|i| b.at(i, j).clone()).collect();
            let x = self.solve_vec(&col);
            for i in 0..n {
                *out.at_mut(i, j) = x[i].clone();
            }
        }
        out
    }
}

/// First three t-derivatives of `ln det M` by the trace identities
///
/// (ln det)'   = tr(M^-1 M1)
/// (ln det)''  = tr(M^-1 M2) - tr((M^-1 M1)^2)
/// (ln det)''' = tr(M^-1 M3) - 3 tr(M^-1 M2 M^-1 M1) + 2 tr((M^-1 M1)^3)
///
/// where `M1, M2, M3` are the elementwise derivative matrices.
pub fn logdet_derivatives(
    m: &Matrix,
    m1: &Matrix,
    m2: &Matrix,
    m3: &Matrix,
) -> Result<(Real, Real, Real)> {
    let fac = factor_spd(m)?;
    let x1 = fac.solve_mat(m1);
    let x2 = fac.solve_mat(m2);
    let x3 = fac.solve_mat(m3);
    let prec = x1.prec().max(x2.prec()).max(x3.prec());

    let d1 = x1.trace();

    let x1x1 = x1.matmul(&x1);
    let d2 = x2.trace() - x1x1.trace();

    let d3 = x3.trace() - real(prec, 3) * x2.trace_prod(&x1)
        + real(prec, 2) * x1x1.trace_prod(&x1);
    Ok((d1, d2, d3))
}
