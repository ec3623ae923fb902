//! Dense complex matrices in row-major order, plus small vector helpers.
//!
//! The JSON encoding (shared with the CLI) is
//! `{"rows": n, "cols": n, "entries": [[re, im], ...]}` with entries row-major
//! and every complex scalar written as a two-element `[re, im]` array.

use num_complex::Complex;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::LinalgError;
use crate::scalar::{Real, C};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<C<T>>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch {
                rows,
                cols,
                got: entries.len(),
            });
        }
        let m = Self {
            rows,
            cols,
            entries,
        };
        if let Some((r, c)) = m.first_non_finite() {
            return Err(LinalgError::NonFinite { row: r, col: c });
        }
        Ok(m)
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self, LinalgError> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != nc) {
            return Err(LinalgError::ShapeMismatch {
                rows: nr,
                cols: nc,
                got: rows.iter().map(Vec::len).sum(),
            });
        }
        Self::new(nr, nc, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![C::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_diagonal(diag: &[C<T>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn order(&self) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
            .map(|k| (k / self.cols, k % self.cols))
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C<T>]) {
        debug_assert_eq!(col.len(), self.rows);
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Matrix product; panics on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul: inner dimensions must agree");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product; panics on dimension mismatch.
    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "apply: dimension mismatch");
        let mut out = vec![C::new(T::zero(), T::zero()); self.rows];
        for i in 0..self.rows {
            let mut acc = C::new(T::zero(), T::zero());
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e *= s;
        }
        out
    }

    /// `A - lambda*I` for square `A`.
    pub fn sub_scaled_identity(&self, lambda: C<T>) -> Self {
        debug_assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] -= lambda;
        }
        out
    }

    /// Repeated-multiplication power for small exponents.
    pub fn pow(&self, k: usize) -> Self {
        debug_assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self);
        }
        out
    }

    /// Largest entry magnitude (the max-norm used for residual reports).
    pub fn max_norm(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        vec_norm(&self.entries)
    }

    /// Maximum row sum of entry magnitudes (operator 1-norm on columns of the
    /// transpose; used to pick the scaling exponent in the series exponential).
    pub fn inf_norm(&self) -> T {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)].norm())
                    .fold(T::zero(), |a, b| a + b)
            })
            .fold(T::zero(), T::max)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.entries[r * self.cols + c]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.entries[r * self.cols + c]
    }
}

/// Euclidean norm with scaling that avoids premature overflow for huge entries.
pub fn vec_norm<T: Real>(v: &[C<T>]) -> T {
    let mut peak = T::zero();
    for z in v {
        peak = peak.max(z.re.abs()).max(z.im.abs());
    }
    if peak == T::zero() || !peak.is_finite() {
        return peak;
    }
    let mut acc = T::zero();
    for z in v {
        let re = z.re / peak;
        let im = z.im / peak;
        acc += re * re + im * im;
    }
    peak * acc.sqrt()
}

pub fn vec_sub<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn vec_add<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn vec_scale<T: Real>(a: &[C<T>], s: C<T>) -> Vec<C<T>> {
    a.iter().map(|&x| x * s).collect()
}

/// Sesquilinear pairing `⟨a, b⟩ = Σ a_i conj(b_i)`.
pub fn vec_dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(C::new(T::zero(), T::zero()), |acc, (&x, &y)| {
            acc + x * y.conj()
        })
}

pub fn vec_is_finite<T: Real>(v: &[C<T>]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr<T> {
    rows: usize,
    cols: usize,
    entries: Vec<[T; 2]>,
}

impl<T: Real + Serialize> Serialize for ComplexMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for ComplexMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::<T>::deserialize(deserializer)?;
        let entries = repr
            .entries
            .into_iter()
            .map(|[re, im]| Complex::new(re, im))
            .collect();
        ComplexMatrix::new(repr.rows, repr.cols, entries).map_err(D::Error::custom)
    }
}
