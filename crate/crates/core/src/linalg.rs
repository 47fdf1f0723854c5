//! Small dense linear algebra: a row-major matrix and Householder QR.

use std::ops::{Index, IndexMut};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Panics if rows have different lengths.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        let n = cols.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "ragged columns");
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Prepends a column of ones.
    pub fn with_intercept(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            m[(i, 0)] = 1.0;
            for j in 0..self.cols {
                m[(i, j + 1)] = self[(i, j)];
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Householder QR of an `n x p` matrix with `n >= p`.
#[derive(Clone, Debug)]
pub struct Qr {
    /// Reflector vectors below the diagonal, R on and above it.
    qr: Matrix,
    rdiag: Vec<f64>,
    col_norms: Vec<f64>,
}

impl Qr {
    pub fn new(a: &Matrix) -> Self {
        let (n, p) = (a.rows(), a.cols());
        assert!(n >= p, "QR needs at least as many rows as columns");
        let col_norms = (0..p).map(|j| norm(&a.column(j))).collect();
        let mut qr = a.clone();
        let mut rdiag = vec![0.0; p];
        for k in 0..p {
            let mut nrm = 0.0f64;
            for i in k..n {
                nrm = nrm.hypot(qr[(i, k)]);
            }
            if nrm != 0.0 {
                if qr[(k, k)] < 0.0 {
                    nrm = -nrm;
                }
                for i in k..n {
                    qr[(i, k)] /= nrm;
                }
                qr[(k, k)] += 1.0;
                for j in k + 1..p {
                    let mut s = 0.0;
                    for i in k..n {
                        s += qr[(i, k)] * qr[(i, j)];
                    }
                    s = -s / qr[(k, k)];
                    for i in k..n {
                        let v = qr[(i, k)];
                        qr[(i, j)] += s * v;
                    }
                }
            }
            rdiag[k] = -nrm;
        }
        Qr {
            qr,
            rdiag,
            col_norms,
        }
    }

    /// First column whose diagonal entry of R is negligible relative to the
    /// column's own norm, i.e. which lies (numerically) in the span of the
    /// preceding columns.
    pub fn deficient_column(&self, rel_tol: f64) -> Option<usize> {
        self.rdiag
            .iter()
            .zip(&self.col_norms)
            .position(|(&r, &c)| c == 0.0 || r.abs() <= rel_tol * c)
    }

    /// `Q^T b`.
    pub fn qt_mul(&self, b: &[f64]) -> Vec<f64> {
        let (n, p) = (self.qr.rows(), self.qr.cols());
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for k in 0..p {
            if self.qr[(k, k)] == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for (i, yi) in y.iter().enumerate().skip(k) {
                s += self.qr[(i, k)] * yi;
            }
            s = -s / self.qr[(k, k)];
            for (i, yi) in y.iter_mut().enumerate().skip(k) {
                *yi += s * self.qr[(i, k)];
            }
        }
        y
    }

    pub fn r(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.rdiag[i],
            std::cmp::Ordering::Less => self.qr[(i, j)],
            std::cmp::Ordering::Greater => 0.0,
        }
    }

    /// Least-squares solution of `A x = b`; assumes full column rank.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let p = self.qr.cols();
        let y = self.qt_mul(b);
        let mut x = vec![0.0; p];
        for k in (0..p).rev() {
            let mut s = y[k];
            for (j, xj) in x.iter().enumerate().skip(k + 1) {
                s -= self.r(k, j) * xj;
            }
            x[k] = s / self.rdiag[k];
        }
        x
    }

    /// `R^{-1}` (upper triangular).
    pub fn r_inverse(&self) -> Matrix {
        let p = self.qr.cols();
        let mut inv = Matrix::zeros(p, p);
        for col in 0..p {
            for i in (0..=col).rev() {
                let mut s = if i == col { 1.0 } else { 0.0 };
                for k in i + 1..=col {
                    s -= self.r(i, k) * inv[(k, col)];
                }
                inv[(i, col)] = s / self.rdiag[i];
            }
        }
        inv
    }
}

/// Ridge-stabilized least squares, solved as an augmented QR so it never
/// breaks down on rank-deficient designs.
pub fn ridge_least_squares(a: &Matrix, b: &[f64], lambda: f64) -> Vec<f64> {
    let (n, p) = (a.rows(), a.cols());
    let mut aug = Matrix::zeros(n + p, p);
    for i in 0..n {
        for j in 0..p {
            aug[(i, j)] = a[(i, j)];
        }
    }
    let s = lambda.sqrt();
    for j in 0..p {
        aug[(n + j, j)] = s;
    }
    let mut rhs = b.to_vec();
    rhs.resize(n + p, 0.0);
    Qr::new(&aug).solve(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_solves_square_system() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = Qr::new(&a).solve(&[3.0, 5.0]);
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn r_inverse_times_r_is_identity() {
        let a = Matrix::from_rows(&[
            vec![1.0, 2.0, 0.5],
            vec![0.0, 1.0, 4.0],
            vec![3.0, -1.0, 1.0],
            vec![1.0, 1.0, 1.0],
        ]);
        let qr = Qr::new(&a);
        let inv = qr.r_inverse();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| qr.r(i, k) * inv[(k, j)]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn detects_duplicate_column() {
        let a = Matrix::from_columns(&[
            vec![1.0; 4],
            vec![1.0, 2.0, 3.0, 4.0],
            vec![1.0, 2.0, 3.0, 4.0],
        ]);
        assert_eq!(Qr::new(&a).deficient_column(1e-10), Some(2));
        let zero = Matrix::from_columns(&[vec![1.0; 3], vec![0.0; 3]]);
        assert_eq!(Qr::new(&zero).deficient_column(1e-10), Some(1));
    }

    #[test]
    fn ridge_handles_singular_design() {
        let a = Matrix::from_columns(&[vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]]);
        let x = ridge_least_squares(&a, &[2.0, 2.0, 2.0], 1e-10);
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] - 1.0).abs() < 1e-6);
    }
}
