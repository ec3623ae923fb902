//! Deterministic test fixtures: random dense matrices, well-conditioned
//! similarity transforms, and matrices with planted Jordan structure whose
//! exact projections, nilpotents and indices are known by construction.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{LuFactors, PivotedQr};
use crate::matrix::ComplexMatrix;
use crate::scalar::{real, Real, C};

fn sample<T: Real>(rng: &mut impl Rng) -> T {
    let x: f64 = rng.sample(StandardNormal);
    real(x)
}

/// Entries with independent standard-normal real and imaginary parts scaled
/// to unit complex variance.
pub fn random_complex_matrix<T: Real>(n: usize, rng: &mut impl Rng) -> ComplexMatrix<T> {
    let inv_sqrt2 = real::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let entries = (0..n * n)
        .map(|_| Complex::new(sample::<T>(rng) * inv_sqrt2, sample::<T>(rng) * inv_sqrt2))
        .collect();
    ComplexMatrix::new(n, n, entries).expect("random entries are finite")
}

pub fn random_vector<T: Real>(n: usize, rng: &mut impl Rng) -> Vec<C<T>> {
    let inv_sqrt2 = real::<T>(std::f64::consts::FRAC_1_SQRT_2);
    (0..n)
        .map(|_| Complex::new(sample::<T>(rng) * inv_sqrt2, sample::<T>(rng) * inv_sqrt2))
        .collect()
}

/// Random unitary factor from the QR decomposition of a Gaussian matrix.
fn random_unitary<T: Real>(n: usize, rng: &mut impl Rng) -> ComplexMatrix<T> {
    let g = random_complex_matrix(n, rng);
    PivotedQr::new(&g).q().clone()
}

/// `Q₁ D Q₂^H` with log-uniform singular values in `[0.8, 1.25]`: a random
/// similarity with condition number at most ~1.6.
pub fn well_conditioned_similarity<T: Real>(n: usize, rng: &mut impl Rng) -> ComplexMatrix<T> {
    let q1 = random_unitary(n, rng);
    let q2 = random_unitary(n, rng);
    let mut d = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let u: f64 = rng.random();
        let sigma = real::<T>(0.8) * real::<T>(1.5625_f64.powf(u));
        d[(i, i)] = Complex::new(sigma, T::zero());
    }
    q1.matmul(&d).matmul(&q2.adjoint())
}

/// One Jordan block to plant.
#[derive(Debug, Clone, Copy)]
pub struct JordanBlockSpec<T> {
    pub lambda: C<T>,
    pub size: usize,
}

/// A matrix `A = S J S⁻¹` with known Jordan structure.
#[derive(Debug, Clone)]
pub struct PlantedJordan<T> {
    pub matrix: ComplexMatrix<T>,
    pub jordan: ComplexMatrix<T>,
    pub basis: ComplexMatrix<T>,
    pub basis_inv: ComplexMatrix<T>,
    pub blocks: Vec<JordanBlockSpec<T>>,
}

impl<T: Real> PlantedJordan<T> {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Distinct eigenvalues with algebraic multiplicities, sorted by
    /// (re, im) like the decomposition output.
    pub fn distinct_eigenvalues(&self) -> Vec<(C<T>, usize)> {
        let mut out: Vec<(C<T>, usize)> = Vec::new();
        for b in &self.blocks {
            match out.iter_mut().find(|(l, _)| *l == b.lambda) {
                Some((_, mult)) => *mult += b.size,
                None => out.push((b.lambda, b.size)),
            }
        }
        out.sort_by(|a, b| {
            (a.0.re, a.0.im)
                .partial_cmp(&(b.0.re, b.0.im))
                .expect("finite eigenvalues")
        });
        out
    }

    /// Index of an eigenvalue: its largest planted block.
    pub fn expected_index(&self, lambda: C<T>) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.lambda == lambda)
            .map(|b| b.size)
            .max()
            .unwrap_or(0)
    }

    fn block_selector(&self, lambda: C<T>) -> ComplexMatrix<T> {
        let n = self.dim();
        let mut e = ComplexMatrix::zeros(n, n);
        let mut offset = 0;
        for b in &self.blocks {
            if b.lambda == lambda {
                for i in offset..offset + b.size {
                    e[(i, i)] = Complex::new(T::one(), T::zero());
                }
            }
            offset += b.size;
        }
        e
    }

    /// `P_λ = S E_λ S⁻¹` from the planted structure.
    pub fn expected_projector(&self, lambda: C<T>) -> ComplexMatrix<T> {
        self.basis
            .matmul(&self.block_selector(lambda))
            .matmul(&self.basis_inv)
    }

    /// `Q_λ = S (J - λI) E_λ S⁻¹` from the planted structure.
    pub fn expected_nilpotent(&self, lambda: C<T>) -> ComplexMatrix<T> {
        let shifted = self.jordan.sub_scaled_identity(lambda);
        self.basis
            .matmul(&shifted.matmul(&self.block_selector(lambda)))
            .matmul(&self.basis_inv)
    }

    /// An initial state whose trajectory is bounded: mass only on blocks with
    /// negative real part and on the eigenvector coordinate of blocks on the
    /// imaginary axis.
    pub fn bounded_initial_state(&self, rng: &mut impl Rng) -> Vec<C<T>> {
        let n = self.dim();
        let mut coords = vec![Complex::new(T::zero(), T::zero()); n];
        let mut offset = 0;
        for b in &self.blocks {
            if b.lambda.re < T::zero() {
                for slot in coords.iter_mut().skip(offset).take(b.size) {
                    *slot = unit_mass(rng);
                }
            } else if b.lambda.re == T::zero() {
                coords[offset] = unit_mass(rng);
            }
            offset += b.size;
        }
        self.basis.apply(&coords)
    }

    /// An initial state whose trajectory grows, when the planted structure
    /// admits one: mass on a positive-real-part block or on the top of a
    /// Jordan chain on the imaginary axis.
    pub fn unbounded_initial_state(&self, rng: &mut impl Rng) -> Option<Vec<C<T>>> {
        let n = self.dim();
        let mut coords = vec![Complex::new(T::zero(), T::zero()); n];
        let mut offset = 0;
        let mut planted = false;
        for b in &self.blocks {
            if !planted && b.lambda.re > T::zero() {
                coords[offset] = unit_mass(rng);
                planted = true;
            } else if !planted && b.lambda.re == T::zero() && b.size >= 2 {
                coords[offset + b.size - 1] = unit_mass(rng);
                planted = true;
            }
            offset += b.size;
        }
        if planted {
            Some(self.basis.apply(&coords))
        } else {
            None
        }
    }
}

/// Coefficient with magnitude in `[0.5, 1.5]` and a random phase, so that
/// planted mass is never numerically negligible.
fn unit_mass<T: Real>(rng: &mut impl Rng) -> C<T> {
    let mag = real::<T>(0.5) + real::<T>(rng.random::<f64>());
    let phase = real::<T>(rng.random::<f64>() * std::f64::consts::TAU);
    Complex::from_polar(mag, phase)
}

/// Builds `A = S J S⁻¹` for the given blocks with a well-conditioned random
/// similarity.
pub fn plant_jordan<T: Real>(
    blocks: Vec<JordanBlockSpec<T>>,
    rng: &mut impl Rng,
) -> PlantedJordan<T> {
    let n: usize = blocks.iter().map(|b| b.size).sum();
    assert!(n > 0, "at least one block");
    let mut jordan = ComplexMatrix::zeros(n, n);
    let mut offset = 0;
    for b in &blocks {
        for i in 0..b.size {
            jordan[(offset + i, offset + i)] = b.lambda;
            if i + 1 < b.size {
                jordan[(offset + i, offset + i + 1)] = Complex::new(T::one(), T::zero());
            }
        }
        offset += b.size;
    }
    let basis = well_conditioned_similarity(n, rng);
    let basis_inv = LuFactors::new(&basis, T::zero())
        .expect("similarity is well conditioned")
        .inverse();
    let matrix = basis.matmul(&jordan).matmul(&basis_inv);
    PlantedJordan {
        matrix,
        jordan,
        basis,
        basis_inv,
        blocks,
    }
}

/// Eigenvalue menu with exact regimes: real parts are exactly zero or at
/// least 0.2 in magnitude, pairwise separations at least 0.3, and all
/// magnitudes at most 1.
pub fn eigenvalue_menu<T: Real>() -> Vec<C<T>> {
    vec![
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::zero(), T::one()),
        Complex::new(T::zero(), -T::one()),
        Complex::new(-T::one(), T::zero()),
        Complex::new(real(-0.5), real(0.8)),
        Complex::new(real(0.4), T::zero()),
        Complex::new(real(0.3), real(-0.6)),
        Complex::new(real(-0.3), T::zero()),
    ]
}

/// Menu for long-horizon growth probes: positive real parts are +0.02, large
/// enough that genuine growth reaches e^{20} over a horizon of 1e3 yet small
/// enough that eps-level similarity crumbs on those modes stay invisible
/// (e^{20}·1e-15 ≈ 5e-7). A matrix built from an exact-construction bounded
/// state would otherwise be detected as (honestly) growing through the
/// amplified crumbs alone. The soft values sit off the imaginary axis so that
/// pairwise separations stay at least 0.35: a size-k Jordan block at distance
/// d from another cluster floors the staircase's singular values at ~d^k,
/// which must clear the rank guard.
pub fn soft_growth_menu<T: Real>() -> Vec<C<T>> {
    vec![
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::zero(), T::one()),
        Complex::new(T::zero(), -T::one()),
        Complex::new(-T::one(), T::zero()),
        Complex::new(real(-0.5), real(0.8)),
        Complex::new(real(-0.3), T::zero()),
        Complex::new(real(0.02), real(0.35)),
        Complex::new(real(0.02), real(-0.6)),
    ]
}

/// Menu restricted to `Re λ ≤ 0`: every initial state yields a bounded
/// trajectory, and no crumb of a positive mode can amplify over long
/// horizons. Used by the Cesàro-mean fixtures.
pub fn stable_menu<T: Real>() -> Vec<C<T>> {
    vec![
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::zero(), T::one()),
        Complex::new(T::zero(), -T::one()),
        Complex::new(-T::one(), T::zero()),
        Complex::new(real(-0.5), real(0.8)),
        Complex::new(real(-0.3), T::zero()),
    ]
}

/// Random block layout drawn from the default eigenvalue menu.
pub fn random_jordan_spec<T: Real>(max_dim: usize, rng: &mut impl Rng) -> Vec<JordanBlockSpec<T>> {
    random_jordan_spec_from(&eigenvalue_menu::<T>(), max_dim, rng)
}

/// Random block layout drawn from the given menu: 2-4 blocks of size 1-3
/// with total dimension at most `max_dim`.
pub fn random_jordan_spec_from<T: Real>(
    menu: &[C<T>],
    max_dim: usize,
    rng: &mut impl Rng,
) -> Vec<JordanBlockSpec<T>> {
    let mut blocks = Vec::new();
    let mut dim = 0usize;
    let n_blocks = 2 + rng.random_range(0..3usize);
    for _ in 0..n_blocks {
        let size = 1 + rng.random_range(0..3usize);
        if dim + size > max_dim {
            break;
        }
        let lambda = menu[rng.random_range(0..menu.len())];
        blocks.push(JordanBlockSpec { lambda, size });
        dim += size;
    }
    if blocks.is_empty() {
        blocks.push(JordanBlockSpec {
            lambda: menu[0],
            size: 1,
        });
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planted_jordan_reproduces_its_own_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let blocks = vec![
            JordanBlockSpec {
                lambda: Complex::new(0.0, 0.0),
                size: 2,
            },
            JordanBlockSpec {
                lambda: Complex::new(0.0, 1.0),
                size: 1,
            },
            JordanBlockSpec {
                lambda: Complex::new(-1.0, 0.0),
                size: 2,
            },
        ];
        let planted = plant_jordan(blocks, &mut rng);
        assert_eq!(planted.dim(), 5);
        // Projectors sum to the identity.
        let mut sum = ComplexMatrix::zeros(5, 5);
        for (lambda, _) in planted.distinct_eigenvalues() {
            sum = sum.add(&planted.expected_projector(lambda));
        }
        assert!(sum.sub(&ComplexMatrix::identity(5)).max_norm() < 1e-12);
        // A reconstructs from the planted parts.
        let mut recon = ComplexMatrix::zeros(5, 5);
        for (lambda, _) in planted.distinct_eigenvalues() {
            recon = recon
                .add(&planted.expected_projector(lambda).scale(lambda))
                .add(&planted.expected_nilpotent(lambda));
        }
        assert!(recon.sub(&planted.matrix).max_norm() < 1e-12);
    }

    #[test]
    fn similarity_is_well_conditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=8 {
            let s = well_conditioned_similarity::<f64>(n, &mut rng);
            let cond = crate::linalg::condition_number(&s).unwrap();
            assert!(cond < 2.0, "condition {cond} at dim {n}");
        }
    }
}
