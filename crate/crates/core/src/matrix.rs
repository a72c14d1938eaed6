use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pattern::StarMask;
use crate::scalar::Scalar;

/// Relative tolerance for skew-symmetry checks in floating mode.
pub const SKEW_RTOL: f64 = 1e-12;

/// Dense row-major matrix. Empty shapes (zero rows or columns) are valid.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
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

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = out.entries[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, op: &str, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a.clone() + b.clone())
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "subtract", |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn to_complex(&self) -> DenseMatrix<Complex64> {
        self.map(Scalar::to_complex)
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block does not fit"
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Frobenius norm, evaluated in double precision.
    pub fn frobenius(&self) -> f64 {
        self.entries
            .iter()
            .map(Scalar::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius norm over the entries that are *not* stars of `mask`.
    pub fn frobenius_off_pattern(&self, mask: &StarMask) -> Result<f64> {
        if mask.shape() != self.shape() {
            return Err(Error::DimensionMismatch(format!(
                "mask {}x{} vs matrix {}x{}",
                mask.rows(),
                mask.cols(),
                self.rows,
                self.cols
            )));
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !mask.is_star(i, j) {
                    acc += self[(i, j)].norm_sqr();
                }
            }
        }
        Ok(acc.sqrt())
    }

    /// Skew-symmetry test: exact for exact scalars, `‖M + Mᵀ‖ ≤ 1e-12·‖M‖` otherwise.
    pub fn is_skew(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        if T::EXACT {
            (0..self.rows).all(|i| {
                (i..self.cols).all(|j| (self[(i, j)].clone() + self[(j, i)].clone()).is_zero())
            })
        } else {
            let mut defect = 0.0;
            for i in 0..self.rows {
                for j in 0..self.cols {
                    defect += (self[(i, j)].clone() + self[(j, i)].clone()).norm_sqr();
                }
            }
            defect.sqrt() <= SKEW_RTOL * self.frobenius()
        }
    }

    /// `(M - Mᵀ) / 2`; the nearest skew matrix in Frobenius norm.
    pub fn skew_part(&self) -> Self {
        let half = T::one() / T::from_i64(2);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)].clone() - self[(j, i)].clone()) * half.clone()
        })
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::Mul for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;

    fn mul(self, rhs: Self) -> DenseMatrix<T> {
        self.checked_mul(rhs).expect("matrix product dimensions")
    }
}

impl<T: Scalar> std::ops::Add for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;

    fn add(self, rhs: Self) -> DenseMatrix<T> {
        self.checked_add(rhs).expect("matrix sum dimensions")
    }
}

impl<T: Scalar> std::ops::Sub for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;

    fn sub(self, rhs: Self) -> DenseMatrix<T> {
        self.checked_sub(rhs).expect("matrix difference dimensions")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_wrong_entry_count() {
        assert!(DenseMatrix::<Complex64>::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn frobenius_three_four_five() {
        let m = DenseMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(3.0, 0.0), c(-4.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(m.frobenius(), 5.0);
        assert_eq!(DenseMatrix::<Complex64>::zeros(3, 3).frobenius(), 0.0);
    }

    #[test]
    fn off_pattern_norm_ignores_stars() {
        let m = DenseMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(3.0, 0.0), c(-4.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let mut mask = StarMask::zeros(2, 2);
        mask.set_star(0, 1);
        mask.set_star(1, 0);
        assert_eq!(m.frobenius_off_pattern(&mask).unwrap(), 0.0);
        mask = StarMask::zeros(2, 2);
        mask.set_star(0, 1);
        assert_eq!(m.frobenius_off_pattern(&mask).unwrap(), 4.0);
        assert!(m.frobenius_off_pattern(&StarMask::zeros(3, 2)).is_err());
    }

    #[test]
    fn empty_shapes_multiply() {
        let a = DenseMatrix::<GaussRational>::zeros(0, 1);
        let b = DenseMatrix::<GaussRational>::zeros(1, 0);
        let p = &a * &b;
        assert_eq!(p.shape(), (0, 0));
        let q = &b * &a;
        assert_eq!(q.shape(), (1, 1));
        assert!(q.entries()[0].is_zero());
    }

    #[test]
    fn product_dimension_mismatch_is_an_error() {
        let a = DenseMatrix::<Complex64>::zeros(2, 3);
        assert!(a.checked_mul(&a).is_err());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = DenseMatrix<Complex64>> {
        proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n * n).prop_map(move |v| {
            DenseMatrix::new(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn frobenius_is_submultiplicative_and_subadditive(
            p in small_matrix(4),
            q in small_matrix(4),
            a in -2.0..2.0f64,
            b in -2.0..2.0f64,
        ) {
            let prod = &p * &q;
            prop_assert!(prod.frobenius() <= p.frobenius() * q.frobenius() * (1.0 + 1e-12));
            let comb = &p.scale(&c(a, 0.0)) + &q.scale(&c(b, 0.0));
            prop_assert!(
                comb.frobenius() <= (a.abs() * p.frobenius() + b.abs() * q.frobenius()) * (1.0 + 1e-12) + 1e-12
            );
        }

        #[test]
        fn skew_part_is_skew(p in small_matrix(5)) {
            prop_assert!(p.skew_part().is_skew());
        }
    }
}
