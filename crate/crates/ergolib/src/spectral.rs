//! Spectral decomposition `A = Σ_j (λ_j P_j + Q_j)` of a square complex
//! matrix: distinct eigenvalues with algebraic/geometric multiplicities,
//! eigenvalue indices, spectral (Riesz) projections and nilpotent parts.
//!
//! Projections are assembled from orthonormal bases of the generalized
//! eigenspaces; the contour-integral construction is kept as an independent
//! cross-check.

use num_complex::Complex;

use crate::error::{LinalgError, SpectralError};
use crate::linalg::{condition_number, eigenvalues, kernel_basis, operator_norm, LuFactors};
use crate::matrix::ComplexMatrix;
use crate::scalar::{real, Real, C};

/// Absolute tolerances steering eigenvalue clustering, rank decisions, the
/// pure-imaginary regime band and residual verification.
///
/// Defaults are scaled to the matrix at hand and to the scalar's machine
/// epsilon (see [`ToleranceConfig::for_matrix`]):
/// `eig_cluster_tol = √ε·‖A‖₂` (≈ 1e-8·‖A‖₂ in double precision, covering
/// the ε^{1/k} eigenvalue scatter of defective pairs),
/// `rank_tol = max(rows, cols)·ε·σ_max(A)`,
/// `imag_axis_tol = (√ε/10)·‖A‖₂` (≈ 1e-9·‖A‖₂ in double precision),
/// `residual_tol = √ε·(1 + ‖A‖₂)`.
///
/// Rank queries additionally guard with a per-matrix machine floor and with a
/// multiple of `eig_cluster_tol`: once nearby eigenvalues are merged into one
/// cluster, singular values up to the cluster diameter are noise by
/// construction and must not count towards the rank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig<T> {
    pub eig_cluster_tol: T,
    pub rank_tol: T,
    pub imag_axis_tol: T,
    pub residual_tol: T,
}

impl<T: Real> ToleranceConfig<T> {
    /// Default tolerances scaled to the norm of `a`.
    pub fn for_matrix(a: &ComplexMatrix<T>) -> Result<Self, SpectralError> {
        let n = a.rows().max(a.cols());
        let norm = operator_norm(a)?;
        let sqrt_eps = T::epsilon().sqrt();
        Ok(Self {
            eig_cluster_tol: sqrt_eps * norm,
            rank_tol: T::from_usize(n).unwrap() * T::epsilon() * norm,
            imag_axis_tol: sqrt_eps / real::<T>(10.0) * norm,
            residual_tol: sqrt_eps * (T::one() + norm),
        })
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        let ok = self.eig_cluster_tol >= T::zero()
            && self.rank_tol >= T::zero()
            && self.imag_axis_tol >= T::zero()
            && self.residual_tol >= T::zero();
        if ok {
            Ok(())
        } else {
            Err(SpectralError::InvalidTolerance)
        }
    }

    /// Effective rank cutoff for factoring the specific matrix `m`.
    pub fn rank_cutoff_for(&self, m: &ComplexMatrix<T>) -> T {
        let n = T::from_usize(m.rows().max(m.cols())).unwrap();
        let floor = n * T::epsilon() * m.frobenius_norm();
        let cluster_guard = real::<T>(8.0) * self.eig_cluster_tol;
        self.rank_tol.max(floor).max(cluster_guard)
    }

    /// Whether a computed eigenvalue is to be treated as the eigenvalue 0.
    pub fn is_zero_eigenvalue(&self, lambda: C<T>) -> bool {
        lambda.norm() <= self.imag_axis_tol.max(self.eig_cluster_tol)
    }
}

/// One distinct eigenvalue with its spectral data.
#[derive(Debug, Clone)]
pub struct EigenItem<T> {
    /// Eigenvalue (cluster mean of the computed spectrum).
    pub lambda: C<T>,
    /// Algebraic multiplicity: dimension of the generalized eigenspace.
    pub alg_mult: usize,
    /// Geometric multiplicity: dimension of the eigenspace.
    pub geo_mult: usize,
    /// Index: size of the largest Jordan block, the nilpotency order of `Q`.
    pub index: usize,
    /// Riesz projection onto the generalized eigenspace along the others.
    pub projector: ComplexMatrix<T>,
    /// Nilpotent part `(A - λI) P`.
    pub nilpotent: ComplexMatrix<T>,
}

/// Full spectral resolution of a square complex matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T> {
    pub dim: usize,
    pub items: Vec<EigenItem<T>>,
    /// 2-norm condition number of the generalized-eigenvector basis.
    pub similarity_condition: T,
    /// Set when `similarity_condition > 1e12`; results are returned,
    /// downstream claims may be untrustworthy.
    pub ill_conditioned: bool,
}

impl<T: Real> SpectralDecomposition<T> {
    /// `Σ_j (λ_j P_j + Q_j)`, which should reproduce the original matrix.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for item in &self.items {
            acc = acc
                .add(&item.projector.scale(item.lambda))
                .add(&item.nilpotent);
        }
        acc
    }

    /// Item for the eigenvalue 0, if present under the tolerance.
    pub fn zero_item(&self, tol: &ToleranceConfig<T>) -> Option<&EigenItem<T>> {
        self.items
            .iter()
            .find(|it| tol.is_zero_eigenvalue(it.lambda))
    }

    /// Spectral projection at 0: `P(0, A)`, the zero matrix when `0 ∈ ρ(A)`.
    pub fn projector_at_zero(&self, tol: &ToleranceConfig<T>) -> ComplexMatrix<T> {
        match self.zero_item(tol) {
            Some(item) => item.projector.clone(),
            None => ComplexMatrix::zeros(self.dim, self.dim),
        }
    }
}

/// Distinct eigenvalues with algebraic multiplicities.
///
/// Computed eigenvalues within `eig_cluster_tol` of one another (by
/// single-linkage) are merged and their multiplicities summed; each cluster is
/// reported at its mean. Multiplicities sum to the dimension.
pub fn eigen_cluster<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Vec<(C<T>, usize)>, SpectralError> {
    tol.validate()?;
    if let Some((row, col)) = a.first_non_finite() {
        return Err(SpectralError::NonFiniteInput { row, col });
    }
    let eigs = eigenvalues(a)?;
    Ok(cluster_values(&eigs, tol.eig_cluster_tol))
}

/// Single-linkage clustering of complex values at the given merge distance.
/// Also returns, for each input position, the cluster it was assigned to.
fn cluster_with_assignment<T: Real>(
    values: &[C<T>],
    merge_tol: T,
) -> (Vec<(C<T>, usize)>, Vec<usize>) {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= merge_tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<(C<T>, usize)> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    let mut slot_of = vec![0usize; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let slot = roots.iter().position(|&x| x == r).unwrap_or_else(|| {
            roots.push(r);
            groups.push((Complex::new(T::zero(), T::zero()), 0));
            members.push(Vec::new());
            roots.len() - 1
        });
        groups[slot].0 += values[i];
        groups[slot].1 += 1;
        members[slot].push(i);
        slot_of[i] = slot;
    }
    for (g, m) in groups.iter_mut().zip(&members) {
        // A cluster of identical values reports that value exactly; the mean
        // could drift by an ulp through the summation.
        if m.iter().all(|&i| values[i] == values[m[0]]) {
            g.0 = values[m[0]];
        } else {
            let count = T::from_usize(g.1).unwrap();
            g.0 /= Complex::new(count, T::zero());
        }
    }
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| {
        (groups[a].0.re, groups[a].0.im)
            .partial_cmp(&(groups[b].0.re, groups[b].0.im))
            .expect("finite eigenvalues are ordered")
    });
    let rank_of: Vec<usize> = {
        let mut rank = vec![0usize; groups.len()];
        for (new_slot, &old_slot) in order.iter().enumerate() {
            rank[old_slot] = new_slot;
        }
        rank
    };
    let sorted: Vec<(C<T>, usize)> = order.iter().map(|&s| groups[s]).collect();
    let assignment: Vec<usize> = slot_of.into_iter().map(|s| rank_of[s]).collect();
    (sorted, assignment)
}

fn cluster_values<T: Real>(values: &[C<T>], merge_tol: T) -> Vec<(C<T>, usize)> {
    cluster_with_assignment(values, merge_tol).0
}

/// Full spectral decomposition `A = Σ_j (λ_j P_j + Q_j)`.
///
/// For each clustered eigenvalue the generalized eigenspace is grown by a
/// kernel staircase: `ker(M)`, `ker(M²) = ker((I - Π_1)M)`, ... with
/// `M = A - λI` and `Π_i` the orthogonal projection onto the previous stage.
/// Each stage factors a single application of `M`, so rank decisions never
/// face powers of the matrix. The staircase also yields the geometric
/// multiplicity (first stage) and the index (stage count).
pub fn spectral_decompose<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<SpectralDecomposition<T>, SpectralError> {
    let n = a.order().map_err(SpectralError::from)?;
    if let Some(d) = decompose_exact_diagonal(a, tol)? {
        return Ok(d);
    }
    let clusters = eigen_cluster(a, tol)?;

    let mut basis = ComplexMatrix::zeros(n, n);
    let mut offsets: Vec<(usize, usize)> = Vec::with_capacity(clusters.len());
    let mut staircases: Vec<(usize, usize)> = Vec::with_capacity(clusters.len());
    let mut col = 0usize;
    for &(lambda, alg_mult) in &clusters {
        let m = a.sub_scaled_identity(lambda);
        let (vectors, geo_mult, index) =
            generalized_eigenspace(&m, alg_mult, tol).map_err(|found| {
                SpectralError::EigenspaceDefect {
                    re: lambda.re.to_f64().unwrap_or(f64::NAN),
                    im: lambda.im.to_f64().unwrap_or(f64::NAN),
                    found,
                    expected: alg_mult,
                }
            })?;
        offsets.push((col, col + alg_mult));
        staircases.push((geo_mult, index));
        for v in &vectors {
            basis.set_column(col, v);
            col += 1;
        }
    }
    debug_assert_eq!(col, n);

    let lu = LuFactors::new(&basis, T::zero()).map_err(|_| SpectralError::IllConditioned {
        residual: f64::INFINITY,
        tolerance: 0.0,
        detail: "generalized eigenvector basis is numerically singular".into(),
    })?;
    let basis_inv = lu.inverse();
    let similarity_condition = condition_number(&basis)?;

    let mut items = Vec::with_capacity(clusters.len());
    for (j, &(lambda, alg_mult)) in clusters.iter().enumerate() {
        let (c0, c1) = offsets[j];
        let mut projector = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in c0..c1 {
                    acc += basis[(r, k)] * basis_inv[(k, c)];
                }
                projector[(r, c)] = acc;
            }
        }
        let nilpotent = a.sub_scaled_identity(lambda).matmul(&projector);
        let (geo_mult, index) = staircases[j];
        items.push(EigenItem {
            lambda,
            alg_mult,
            geo_mult,
            index,
            projector,
            nilpotent,
        });
    }

    let decomposition = SpectralDecomposition {
        dim: n,
        items,
        similarity_condition,
        ill_conditioned: similarity_condition > real::<T>(1e12),
    };

    let residuals = verify_resolution(&decomposition);
    let worst = residuals.max_residual();
    if worst > tol.residual_tol {
        return Err(SpectralError::IllConditioned {
            residual: worst.to_f64().unwrap_or(f64::NAN),
            tolerance: tol.residual_tol.to_f64().unwrap_or(f64::NAN),
            detail: format!(
                "resolution residuals: sum-identity {:.3e}, projector products {:.3e}, nilpotent products {:.3e}, commutation {:.3e}",
                residuals.sum_identity.to_f64().unwrap_or(f64::NAN),
                residuals.projector_products.to_f64().unwrap_or(f64::NAN),
                residuals.nilpotent_products.to_f64().unwrap_or(f64::NAN),
                residuals.commutation.to_f64().unwrap_or(f64::NAN),
            ),
        });
    }
    Ok(decomposition)
}

/// Exact decomposition of an exactly diagonal matrix: the standard basis is
/// an eigenbasis, so the projections are 0/1 coordinate selectors and no
/// floating-point factorization touches them. A diagonal matrix is never
/// defective: every index is 1. The dense sequence-space models truncate to
/// exactly diagonal matrices, and their consistency contract requires
/// bit-exact limits from this path.
fn decompose_exact_diagonal<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Option<SpectralDecomposition<T>>, SpectralError> {
    tol.validate()?;
    let n = a.order().map_err(SpectralError::from)?;
    let zero = Complex::new(T::zero(), T::zero());
    for r in 0..n {
        for c in 0..n {
            if r != c && a[(r, c)] != zero {
                return Ok(None);
            }
        }
    }
    let diag: Vec<C<T>> = (0..n).map(|i| a[(i, i)]).collect();
    let (clusters, assignment) = cluster_with_assignment(&diag, tol.eig_cluster_tol);
    let mut items = Vec::with_capacity(clusters.len());
    for (j, &(lambda, alg_mult)) in clusters.iter().enumerate() {
        let mut projector = ComplexMatrix::zeros(n, n);
        for (i, &slot) in assignment.iter().enumerate() {
            if slot == j {
                projector[(i, i)] = Complex::new(T::one(), T::zero());
            }
        }
        let nilpotent = a.sub_scaled_identity(lambda).matmul(&projector);
        items.push(EigenItem {
            lambda,
            alg_mult,
            geo_mult: alg_mult,
            index: 1,
            projector,
            nilpotent,
        });
    }
    Ok(Some(SpectralDecomposition {
        dim: n,
        items,
        similarity_condition: T::one(),
        ill_conditioned: false,
    }))
}

/// Kernel staircase for one eigenvalue. Returns the basis vectors, the
/// geometric multiplicity and the index, or `Err(found_dim)` when the final
/// eigenspace dimension disagrees with the algebraic multiplicity.
#[allow(clippy::type_complexity)]
fn generalized_eigenspace<T: Real>(
    m: &ComplexMatrix<T>,
    alg_mult: usize,
    tol: &ToleranceConfig<T>,
) -> Result<(Vec<Vec<C<T>>>, usize, usize), usize> {
    let mut kernel: Vec<Vec<C<T>>> = Vec::new();
    let mut geo_mult = 0usize;
    for stage in 1..=alg_mult {
        let b = if kernel.is_empty() {
            m.clone()
        } else {
            deflate_against(m, &kernel)
        };
        let cutoff = tol.rank_cutoff_for(&b);
        let next = kernel_basis(&b, cutoff);
        if stage == 1 {
            geo_mult = next.len();
        }
        if next.len() <= kernel.len() && stage > 1 {
            // Stalled before reaching the algebraic multiplicity.
            return Err(kernel.len());
        }
        kernel = next;
        if kernel.len() == alg_mult {
            return Ok((kernel, geo_mult, stage));
        }
        if kernel.len() > alg_mult {
            return Err(kernel.len());
        }
    }
    Err(kernel.len())
}

/// `(I - K K^H) M` for an orthonormal set `K`.
fn deflate_against<T: Real>(m: &ComplexMatrix<T>, kernel: &[Vec<C<T>>]) -> ComplexMatrix<T> {
    let n = m.rows();
    let mut out = m.clone();
    // For each column of M, subtract its component along each kernel vector.
    for j in 0..n {
        let col = out.column(j);
        let mut adjusted = col.clone();
        for k in kernel {
            let coeff = crate::matrix::vec_dot(&col, k);
            for (i, ki) in k.iter().enumerate() {
                adjusted[i] -= coeff * *ki;
            }
        }
        out.set_column(j, &adjusted);
    }
    out
}

/// Residuals (max-norm) of the resolution-of-identity relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionResiduals<T> {
    /// `‖Σ_j P_j - I‖`.
    pub sum_identity: T,
    /// `max_{i,j} ‖P_i P_j - δ_ij P_i‖`.
    pub projector_products: T,
    /// `max_{i≠j} ‖Q_i Q_j‖`.
    pub nilpotent_products: T,
    /// `max_{i,j} ‖P_i Q_j - δ_ij Q_j‖` and the mirrored product.
    pub commutation: T,
}

impl<T: Real> ResolutionResiduals<T> {
    pub fn max_residual(&self) -> T {
        self.sum_identity
            .max(self.projector_products)
            .max(self.nilpotent_products)
            .max(self.commutation)
    }
}

/// Evaluates the relations binding the projections and nilpotents.
pub fn verify_resolution<T: Real>(d: &SpectralDecomposition<T>) -> ResolutionResiduals<T> {
    let n = d.dim;
    let mut sum = ComplexMatrix::zeros(n, n);
    for item in &d.items {
        sum = sum.add(&item.projector);
    }
    let sum_identity = sum.sub(&ComplexMatrix::identity(n)).max_norm();

    let mut projector_products = T::zero();
    let mut nilpotent_products = T::zero();
    let mut commutation = T::zero();
    for (i, a) in d.items.iter().enumerate() {
        for (j, b) in d.items.iter().enumerate() {
            let pp = a.projector.matmul(&b.projector);
            let expected = if i == j {
                a.projector.clone()
            } else {
                ComplexMatrix::zeros(n, n)
            };
            projector_products = projector_products.max(pp.sub(&expected).max_norm());

            if i != j {
                nilpotent_products =
                    nilpotent_products.max(a.nilpotent.matmul(&b.nilpotent).max_norm());
            }

            let pq = a.projector.matmul(&b.nilpotent);
            let qp = b.nilpotent.matmul(&a.projector);
            let expected_q = if i == j {
                b.nilpotent.clone()
            } else {
                ComplexMatrix::zeros(n, n)
            };
            commutation = commutation.max(pq.sub(&expected_q).max_norm());
            commutation = commutation.max(qp.sub(&expected_q).max_norm());
        }
    }
    ResolutionResiduals {
        sum_identity,
        projector_products,
        nilpotent_products,
        commutation,
    }
}

/// Riesz projection by trapezoidal discretization of the resolvent contour
/// integral `P(λ, A) = -(1/2πi) ∮ (A - zI)^{-1} dz` over a circle.
///
/// The circle must enclose no eigenvalue other than (possibly) `lambda` and
/// must not pass through the spectrum. Returns (approximately) the zero matrix
/// when `lambda` is a regular point.
pub fn riesz_projection_contour<T: Real>(
    a: &ComplexMatrix<T>,
    lambda: C<T>,
    radius: T,
    n_nodes: usize,
) -> Result<ComplexMatrix<T>, SpectralError> {
    let n = a.order().map_err(SpectralError::from)?;
    if radius <= T::zero() || n_nodes < 2 {
        return Err(SpectralError::ContourParams);
    }
    let mut acc = ComplexMatrix::zeros(n, n);
    let two_pi = T::PI() + T::PI();
    let count = T::from_usize(n_nodes).unwrap();
    for k in 0..n_nodes {
        let theta = two_pi * T::from_usize(k).unwrap() / count;
        let direction = Complex::new(theta.cos(), theta.sin());
        let z = lambda + direction * Complex::new(radius, T::zero());
        let shifted = a.sub_scaled_identity(z);
        let floor = T::from_usize(n).unwrap() * T::epsilon() * shifted.frobenius_norm();
        let lu = LuFactors::new(&shifted, floor).map_err(|err| match err {
            LinalgError::Singular { .. } => SpectralError::ContourPlacement {
                re: z.re.to_f64().unwrap_or(f64::NAN),
                im: z.im.to_f64().unwrap_or(f64::NAN),
            },
            other => SpectralError::from(other),
        })?;
        let resolvent = lu.inverse();
        acc = acc.add(&resolvent.scale(direction));
    }
    Ok(acc.scale(Complex::new(-(radius / count), T::zero())))
}

/// Outcome of the reducible-invertibility check: `X = ker A ⊕ R(A)`.
#[derive(Debug, Clone)]
pub struct ReducibleInvertibility<T> {
    /// True iff `0 ∈ ρ(A)` or 0 is an eigenvalue of index 1.
    pub holds: bool,
    /// The projection onto `ker A` along `R(A)` when the decomposition holds
    /// (zero matrix when `A` is invertible); absent otherwise.
    pub projector: Option<ComplexMatrix<T>>,
    /// Index of the eigenvalue 0 (0 when `0 ∈ ρ(A)`).
    pub zero_index: usize,
}

/// Decides whether `X = ker A ⊕ R(A)` holds, i.e. whether 0 is a regular
/// point or an eigenvalue of index 1, and returns the mean ergodic projection.
pub fn reducible_invertibility<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<ReducibleInvertibility<T>, SpectralError> {
    let d = spectral_decompose(a, tol)?;
    match d.zero_item(tol) {
        None => Ok(ReducibleInvertibility {
            holds: true,
            projector: Some(ComplexMatrix::zeros(d.dim, d.dim)),
            zero_index: 0,
        }),
        Some(item) if item.index == 1 => Ok(ReducibleInvertibility {
            holds: true,
            projector: Some(item.projector.clone()),
            zero_index: 1,
        }),
        Some(item) => Ok(ReducibleInvertibility {
            holds: false,
            projector: None,
            zero_index: item.index,
        }),
    }
}
