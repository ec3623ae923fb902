//! Dense complex factorizations: partially pivoted LU, column-pivoted
//! Householder QR, Hessenberg reduction and the shifted QR eigenvalue
//! iteration. Everything here targets desk-scale matrices (dimensions in the
//! single digits); no blocking, no balancing heroics.

use num_complex::Complex;

use crate::error::LinalgError;
use crate::matrix::{vec_norm, ComplexMatrix};
use crate::scalar::{Real, C};

fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// LU factorization with partial pivoting.
pub struct LuFactors<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    smallest_pivot: T,
}

impl<T: Real> LuFactors<T> {
    /// Factors a square matrix. `pivot_floor` is the magnitude below which a
    /// pivot is declared singular; pass zero to reject only exact breakdown.
    pub fn new(a: &ComplexMatrix<T>, pivot_floor: T) -> Result<Self, LinalgError> {
        let n = a.order()?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut smallest = T::infinity();
        for k in 0..n {
            let (mut best, mut best_mag) = (k, lu[(k, k)].norm());
            for i in k + 1..n {
                let mag = lu[(i, k)].norm();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag <= pivot_floor {
                return Err(LinalgError::Singular { step: k });
            }
            smallest = smallest.min(best_mag);
            if best != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(best, j)];
                    lu[(best, j)] = tmp;
                }
                perm.swap(k, best);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    lu[(i, j)] = lu[(i, j)] - factor * lu[(k, j)];
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            smallest_pivot: smallest,
        })
    }

    pub fn smallest_pivot(&self) -> T {
        self.smallest_pivot
    }

    pub fn solve_vec(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.perm.len();
        debug_assert_eq!(b.len(), n);
        let mut x: Vec<C<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn solve_mat(&self, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = self.perm.len();
        debug_assert_eq!(b.rows(), n);
        let mut out = ComplexMatrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col = self.solve_vec(&b.column(j));
            out.set_column(j, &col);
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix<T> {
        self.solve_mat(&ComplexMatrix::identity(self.perm.len()))
    }
}

/// Column-pivoted Householder QR: `A·Π = Q·R` with `Q` unitary and `R` upper
/// triangular with diagonal magnitudes in (roughly) decreasing order.
pub struct PivotedQr<T> {
    q: ComplexMatrix<T>,
    r: ComplexMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> PivotedQr<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Self {
        let m = a.rows();
        let n = a.cols();
        let mut r = a.clone();
        let mut q = ComplexMatrix::identity(m);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..m.min(n) {
            let (mut best, mut best_norm) = (k, T::zero());
            for j in k..n {
                let norm = vec_norm(&(k..m).map(|i| r[(i, j)]).collect::<Vec<_>>());
                if norm > best_norm {
                    best = j;
                    best_norm = norm;
                }
            }
            if best_norm == T::zero() {
                break;
            }
            if best != k {
                for i in 0..m {
                    let tmp = r[(i, k)];
                    r[(i, k)] = r[(i, best)];
                    r[(i, best)] = tmp;
                }
                perm.swap(k, best);
            }
            let x: Vec<C<T>> = (k..m).map(|i| r[(i, k)]).collect();
            if let Some((v, new_diag)) = householder(&x) {
                // R[k.., k..] <- (I - 2 v v^H) R[k.., k..]
                for j in k..n {
                    let mut dot = czero();
                    for (i, vi) in v.iter().enumerate() {
                        dot += vi.conj() * r[(k + i, j)];
                    }
                    let two = C::new(T::one() + T::one(), T::zero());
                    for (i, vi) in v.iter().enumerate() {
                        r[(k + i, j)] -= two * *vi * dot;
                    }
                }
                // Q <- Q (I - 2 v v^H)
                for row in 0..m {
                    let mut dot = czero();
                    for (i, vi) in v.iter().enumerate() {
                        dot += q[(row, k + i)] * *vi;
                    }
                    let two = C::new(T::one() + T::one(), T::zero());
                    for (i, vi) in v.iter().enumerate() {
                        q[(row, k + i)] -= two * dot * vi.conj();
                    }
                }
                r[(k, k)] = new_diag;
                for i in k + 1..m {
                    r[(i, k)] = czero();
                }
            }
        }
        Self { q, r, perm }
    }

    pub fn q(&self) -> &ComplexMatrix<T> {
        &self.q
    }

    pub fn r(&self) -> &ComplexMatrix<T> {
        &self.r
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Number of diagonal entries of `R` above the cutoff.
    pub fn rank(&self, cutoff: T) -> usize {
        let k = self.r.rows().min(self.r.cols());
        (0..k).filter(|&i| self.r[(i, i)].norm() > cutoff).count()
    }
}

/// Householder reflector mapping `x` to a multiple of `e_1`.
///
/// Returns the unit vector `v` of `P = I - 2 v v^H` and the resulting first
/// component `P x = new_diag * e_1`, or `None` when `x` is already zero.
fn householder<T: Real>(x: &[C<T>]) -> Option<(Vec<C<T>>, C<T>)> {
    let sigma = vec_norm(x);
    if sigma == T::zero() {
        return None;
    }
    let alpha = x[0];
    let phase = if alpha.norm() == T::zero() {
        Complex::new(T::one(), T::zero())
    } else {
        alpha / Complex::new(alpha.norm(), T::zero())
    };
    let mut v = x.to_vec();
    v[0] += phase * Complex::new(sigma, T::zero());
    let vnorm = vec_norm(&v);
    if vnorm == T::zero() {
        return None;
    }
    for e in &mut v {
        *e /= Complex::new(vnorm, T::zero());
    }
    Some((v, -phase * Complex::new(sigma, T::zero())))
}

/// Rank under the given singular-value cutoff, via column-pivoted QR.
pub fn rank_with_cutoff<T: Real>(a: &ComplexMatrix<T>, cutoff: T) -> usize {
    PivotedQr::new(a).rank(cutoff)
}

/// Orthonormal basis of `ker A` under the cutoff, from the trailing columns of
/// the `Q` factor of a pivoted QR of `A^H`.
pub fn kernel_basis<T: Real>(a: &ComplexMatrix<T>, cutoff: T) -> Vec<Vec<C<T>>> {
    let qr = PivotedQr::new(&a.adjoint());
    let rank = qr.rank(cutoff);
    let n = a.cols();
    (rank..n).map(|j| qr.q().column(j)).collect()
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` (with real `c`)
/// such that `G [f; g] = [r; 0]`.
fn givens<T: Real>(f: C<T>, g: C<T>) -> (T, C<T>) {
    if g.norm() == T::zero() {
        return (T::one(), czero());
    }
    if f.norm() == T::zero() {
        return (T::zero(), g.conj() / Complex::new(g.norm(), T::zero()));
    }
    let fa = f.norm();
    let ga = g.norm();
    let scale = fa.max(ga);
    let rho = scale * ((fa / scale).powi(2) + (ga / scale).powi(2)).sqrt();
    let c = fa / rho;
    let s = (f / Complex::new(fa, T::zero())) * g.conj() / Complex::new(rho, T::zero());
    (c, s)
}

/// Reduces a square complex matrix to upper Hessenberg form by unitary
/// similarity (eigenvalues preserved).
pub fn hessenberg<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>, LinalgError> {
    let n = a.order()?;
    let mut h = a.clone();
    if n <= 2 {
        return Ok(h);
    }
    for k in 0..n - 2 {
        let x: Vec<C<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let Some((v, new_sub)) = householder(&x) else {
            continue;
        };
        let two = C::new(T::one() + T::one(), T::zero());
        // rows k+1..n: H <- P H
        for j in k..n {
            let mut dot = czero();
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + i, j)];
            }
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= two * *vi * dot;
            }
        }
        // cols k+1..n: H <- H P
        for row in 0..n {
            let mut dot = czero();
            for (i, vi) in v.iter().enumerate() {
                dot += h[(row, k + 1 + i)] * *vi;
            }
            for (i, vi) in v.iter().enumerate() {
                h[(row, k + 1 + i)] -= two * dot * vi.conj();
            }
        }
        h[(k + 1, k)] = new_sub;
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
    Ok(h)
}

/// Eigenvalues of a 2x2 complex matrix, cancellation-safe.
fn eig_2x2<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> (C<T>, C<T>) {
    let two = Complex::new(T::one() + T::one(), T::zero());
    let four = two * two;
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - four * det).sqrt();
    let r_plus = (tr + disc) / two;
    let r_minus = (tr - disc) / two;
    if r_plus.norm() >= r_minus.norm() {
        if r_plus.norm() == T::zero() {
            (r_plus, r_minus)
        } else {
            (r_plus, det / r_plus)
        }
    } else if r_minus.norm() == T::zero() {
        (r_minus, r_plus)
    } else {
        (det / r_minus, r_minus)
    }
}

/// All eigenvalues of a square complex matrix, via Hessenberg reduction and a
/// Wilkinson-shifted QR iteration with explicit shifts.
pub fn eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<C<T>>, LinalgError> {
    let n = a.order()?;
    if let Some((row, col)) = a.first_non_finite() {
        return Err(LinalgError::NonFinite { row, col });
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = hessenberg(a)?;
    let hnorm = h.max_norm();
    let eps = T::epsilon();
    let mut eigs: Vec<C<T>> = Vec::with_capacity(n);
    let mut m = n;
    let mut stuck = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n;

    while m > 0 {
        // Knock out negligible subdiagonals.
        for i in 1..m {
            let scale = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
            let thresh = if scale > T::zero() {
                eps * scale
            } else {
                eps * hnorm
            };
            if h[(i, i - 1)].norm() <= thresh {
                h[(i, i - 1)] = czero();
            }
        }
        // Bottom-most irreducible block is rows l..m.
        let mut l = m - 1;
        while l > 0 && h[(l, l - 1)].norm() > T::zero() {
            l -= 1;
        }
        if l == m - 1 {
            eigs.push(h[(m - 1, m - 1)]);
            m -= 1;
            stuck = 0;
            continue;
        }
        if l == m - 2 {
            let (r1, r2) = eig_2x2(
                h[(m - 2, m - 2)],
                h[(m - 2, m - 1)],
                h[(m - 1, m - 2)],
                h[(m - 1, m - 1)],
            );
            eigs.push(r1);
            eigs.push(r2);
            m -= 2;
            stuck = 0;
            continue;
        }
        total += 1;
        stuck += 1;
        if total > max_total {
            return Err(LinalgError::EigenNonConvergence {
                dim: n,
                iterations: total,
            });
        }
        let mu = if stuck.is_multiple_of(12) {
            // Exceptional shift to break rare limit cycles. The active block
            // spans at least 3 rows here, so m >= 3.
            let bump = h[(m - 1, m - 2)].norm() + h[(m - 2, m - 3)].norm();
            h[(m - 1, m - 1)] + Complex::new(bump + bump / (T::one() + T::one()), T::zero())
        } else {
            let (r1, r2) = eig_2x2(
                h[(m - 2, m - 2)],
                h[(m - 2, m - 1)],
                h[(m - 1, m - 2)],
                h[(m - 1, m - 1)],
            );
            let target = h[(m - 1, m - 1)];
            if (r1 - target).norm() <= (r2 - target).norm() {
                r1
            } else {
                r2
            }
        };
        qr_step(&mut h, l, m, mu);
    }
    Ok(eigs)
}

/// One explicit-shift QR sweep on the active Hessenberg window `[l, m)`.
fn qr_step<T: Real>(h: &mut ComplexMatrix<T>, l: usize, m: usize, mu: C<T>) {
    for i in l..m {
        h[(i, i)] -= mu;
    }
    let mut rotations = Vec::with_capacity(m - l - 1);
    for i in l..m - 1 {
        let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
        let cr = Complex::new(c, T::zero());
        for j in i..m {
            let top = h[(i, j)];
            let bot = h[(i + 1, j)];
            h[(i, j)] = cr * top + s * bot;
            h[(i + 1, j)] = -s.conj() * top + cr * bot;
        }
        h[(i + 1, i)] = czero();
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let i = l + idx;
        let cr = Complex::new(c, T::zero());
        let last_row = (i + 2).min(m);
        for r in l..last_row {
            let left = h[(r, i)];
            let right = h[(r, i + 1)];
            h[(r, i)] = left * cr + right * s.conj();
            h[(r, i + 1)] = -(left * s) + right * cr;
        }
    }
    for i in l..m {
        h[(i, i)] += mu;
    }
}

/// Operator 2-norm (largest singular value), from the Hermitian eigenvalues of
/// `A^H A`.
pub fn operator_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T, LinalgError> {
    Ok(singular_value_range(a)?.1)
}

/// Smallest and largest singular values of `A`.
pub fn singular_value_range<T: Real>(a: &ComplexMatrix<T>) -> Result<(T, T), LinalgError> {
    let gram = a.adjoint().matmul(a);
    let eigs = eigenvalues(&gram)?;
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for e in eigs {
        let v = e.re.max(T::zero());
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo.sqrt(), hi.sqrt()))
}

/// 2-norm condition number; infinite for numerically singular input.
pub fn condition_number<T: Real>(a: &ComplexMatrix<T>) -> Result<T, LinalgError> {
    let (lo, hi) = singular_value_range(a)?;
    if lo == T::zero() {
        Ok(T::infinity())
    } else {
        Ok(hi / lo)
    }
}
