use std::fmt;
use std::ops::{Index, IndexMut};

use crate::scalar::{compensated_sum, two_norm, Scalar};

/// Small dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Mat<T> {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                out[(i, j)] = compensated_sum((0..self.cols).map(|k| self[(i, k)] * other[(k, j)]));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length does not match columns");
        (0..self.rows)
            .map(|i| compensated_sum(self.row(i).iter().zip(v).map(|(a, b)| *a * *b)))
            .collect()
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.shape(), other.shape());
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn scale(&self, c: T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| *a * c).collect(),
        }
    }

    /// Multiplies row `i` by `factors[i]`.
    pub fn scale_rows(&self, factors: &[T]) -> Mat<T> {
        assert_eq!(factors.len(), self.rows);
        let mut out = self.clone();
        for (i, &f) in factors.iter().enumerate() {
            for v in &mut out.data[i * self.cols..(i + 1) * self.cols] {
                *v = *v * f;
            }
        }
        out
    }

    /// Drops column `j`.
    pub fn without_column(&self, j: usize) -> Mat<T> {
        let mut data = Vec::with_capacity(self.rows * (self.cols - 1));
        for i in 0..self.rows {
            for (c, &v) in self.row(i).iter().enumerate() {
                if c != j {
                    data.push(v);
                }
            }
        }
        Mat {
            rows: self.rows,
            cols: self.cols - 1,
            data,
        }
    }

    pub fn frobenius(&self) -> T {
        two_norm(&self.data)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, v| a.max(v.abs()))
    }

    /// `‖A‖_{2,∞}`: the largest row 2-norm.
    pub fn norm_two_inf(&self) -> T {
        (0..self.rows).map(|i| two_norm(self.row(i))).fold(T::zero(), T::max)
    }

    /// `‖A‖_{∞,∞}`: the largest row 1-norm.
    pub fn norm_inf_inf(&self) -> T {
        (0..self.rows)
            .map(|i| compensated_sum(self.row(i).iter().map(|v| v.abs())))
            .fold(T::zero(), T::max)
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_norms() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, -4.0]]);
        let b = a.matmul(&Mat::identity(2));
        assert_eq!(a, b);
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![3.0, -1.0]);
        assert_eq!(a.transpose()[(0, 1)], 3.0);
        assert_eq!(a.norm_inf_inf(), 7.0);
        assert_eq!(a.norm_two_inf(), 5.0);
        assert_eq!(a.without_column(0).column(0), vec![2.0, -4.0]);
    }
}
