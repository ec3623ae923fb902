//! Exact desk-scale models of infinite-dimensional operators on the space of
//! square-summable sequences: finite-support vectors, the right shift, the
//! parity projection, and diagonal operators carrying an atomic spectral
//! measure.
//!
//! Coordinates are 0-indexed: index `n` holds the sequence entry `x_{n+1}`,
//! so the first coordinate `x_1` is index 0 and the odd positions `x_1, x_3,
//! ...` are the even indices. All arithmetic is exact on the stored entries:
//! there is no truncation of the ambient space, so e.g. the right shift stays
//! injective and its range misses `x_1` exactly.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;
use crate::matrix::ComplexMatrix;
use crate::scalar::{real, Real, C};

/// Element of the sequence space with finitely many nonzero coordinates.
///
/// Canonical form: no stored value is zero. JSON encoding:
/// `{"entries": [[index, re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteSupportVector<T> {
    entries: BTreeMap<u64, C<T>>,
}

impl<T: Real> FiniteSupportVector<T> {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (u64, C<T>)>) -> Self {
        let mut v = Self::new();
        for (n, value) in entries {
            v.insert(n, value);
        }
        v
    }

    /// Basis vector `e_n`.
    pub fn basis(n: u64) -> Self {
        Self::from_entries([(n, Complex::new(T::one(), T::zero()))])
    }

    /// Sets a coordinate, dropping exact zeros to keep the form canonical.
    pub fn insert(&mut self, n: u64, value: C<T>) {
        if value.re == T::zero() && value.im == T::zero() {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, value);
        }
    }

    pub fn get(&self, n: u64) -> C<T> {
        self.entries
            .get(&n)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, C<T>)> + '_ {
        self.entries.iter().map(|(&n, &v)| (n, v))
    }

    pub fn support(&self) -> Vec<u64> {
        self.entries.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> T {
        self.entries
            .values()
            .fold(T::zero(), |acc, v| acc + v.norm_sqr())
            .sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, v) in other.iter() {
            out.insert(n, out.get(n) + v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, v) in other.iter() {
            out.insert(n, out.get(n) - v);
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self::from_entries(self.iter().map(|(n, v)| (n, v * s)))
    }
}

/// Diagonal (scalar-type spectral) operator: a finite list of per-index
/// eigenvalue atoms plus a default eigenvalue for every unlisted index.
///
/// JSON encoding: `{"atoms": [[index, re, im], ...], "default": [re, im]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator<T> {
    atoms: BTreeMap<u64, C<T>>,
    default: C<T>,
}

impl<T: Real> DiagonalOperator<T> {
    pub fn new(atoms: impl IntoIterator<Item = (u64, C<T>)>, default: C<T>) -> Self {
        Self {
            atoms: atoms.into_iter().collect(),
            default,
        }
    }

    /// Eigenvalue at coordinate `n`.
    pub fn lambda_of(&self, n: u64) -> C<T> {
        self.atoms.get(&n).copied().unwrap_or(self.default)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (u64, C<T>)> + '_ {
        self.atoms.iter().map(|(&n, &v)| (n, v))
    }

    pub fn default_lambda(&self) -> C<T> {
        self.default
    }

    /// Distinct eigenvalues: the atom values together with the default.
    pub fn distinct_values(&self) -> Vec<C<T>> {
        let mut values: Vec<C<T>> = vec![self.default];
        for &v in self.atoms.values() {
            if !values.contains(&v) {
                values.push(v);
            }
        }
        values
    }

    /// The atomic spectral measure view of this operator.
    pub fn spectral_measure(&self) -> AtomicSpectralMeasure<'_, T> {
        AtomicSpectralMeasure { operator: self }
    }
}

/// Atomic spectral measure of a diagonal operator: for a decidable predicate
/// `δ` on eigenvalues, `E(δ)` is the coordinate projection onto
/// `{n : λ_n ∈ δ}`.
///
/// Coordinate projections only zero coordinates, so `‖E(δ)f‖ ≤ ‖f‖` for every
/// finite-support `f`; the measure bound is `M = 1`.
pub struct AtomicSpectralMeasure<'a, T> {
    operator: &'a DiagonalOperator<T>,
}

/// Uniform bound on the spectral measure: `‖E(δ)‖ ≤ M` with `M = 1` for
/// coordinate projections.
pub const SPECTRAL_MEASURE_BOUND: f64 = 1.0;

impl<'a, T: Real> AtomicSpectralMeasure<'a, T> {
    /// `E(δ)` as an index set over the stored atoms plus a default verdict.
    pub fn projection(&self, delta: impl Fn(C<T>) -> bool) -> SpectralProjection {
        SpectralProjection {
            atom_indices: self
                .operator
                .atoms()
                .filter(|&(_, lambda)| delta(lambda))
                .map(|(n, _)| n)
                .collect(),
            includes_default: delta(self.operator.default_lambda()),
        }
    }

    /// Applies `E(δ)` to a finite-support vector.
    pub fn apply(
        &self,
        projection: &SpectralProjection,
        f: &FiniteSupportVector<T>,
    ) -> FiniteSupportVector<T> {
        FiniteSupportVector::from_entries(f.iter().filter(|&(n, _)| {
            if self.operator.atoms.contains_key(&n) {
                projection.atom_indices.contains(&n)
            } else {
                projection.includes_default
            }
        }))
    }
}

/// Representation of a spectral projection `E(δ)`: the listed atom indices
/// with `λ_n ∈ δ`, plus whether the default eigenvalue lies in `δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralProjection {
    pub atom_indices: BTreeSet<u64>,
    pub includes_default: bool,
}

/// The sequence-space operators under study.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceOperator<T> {
    /// `A{x_1, x_2, …} = {0, x_1, x_2, …}`.
    RightShift,
    /// `A{x_1, x_2, x_3, …} = {x_1, 0, x_3, 0, …}`: keeps the odd positions,
    /// which are the even indices.
    ParityProjection,
    /// `(A f)_n = λ_n f_n`.
    Diagonal(DiagonalOperator<T>),
}

impl<T: Real> SequenceOperator<T> {
    /// Exact action on a finite-support vector; the result is canonical.
    pub fn apply(&self, f: &FiniteSupportVector<T>) -> FiniteSupportVector<T> {
        match self {
            Self::RightShift => {
                FiniteSupportVector::from_entries(f.iter().map(|(n, v)| (n + 1, v)))
            }
            Self::ParityProjection => {
                FiniteSupportVector::from_entries(f.iter().filter(|(n, _)| n % 2 == 0))
            }
            Self::Diagonal(op) => {
                FiniteSupportVector::from_entries(f.iter().map(|(n, v)| (n, v * op.lambda_of(n))))
            }
        }
    }

    /// Structural verdicts on invertibility and the decomposition
    /// `X = ker A ⊕ R(A)`.
    pub fn decomposition_status(&self) -> DecompositionStatus {
        match self {
            Self::RightShift => DecompositionStatus {
                invertible_on_range: true,
                reducibly_invertible: false,
                kernel: KernelDescription::Trivial,
                range_description:
                    "sequences whose first coordinate vanishes (a proper closed subspace)".into(),
            },
            Self::ParityProjection => DecompositionStatus {
                invertible_on_range: false,
                reducibly_invertible: true,
                kernel: KernelDescription::EvenPositions,
                range_description: "sequences supported on the odd positions x1, x3, ...".into(),
            },
            Self::Diagonal(op) => {
                let zero = Complex::new(T::zero(), T::zero());
                let values = op.distinct_values();
                let has_zero = values.contains(&zero);
                // The value set is finite, so 0 is absent from the spectrum or
                // an isolated point of it; the decomposition always holds here.
                let kernel_atoms: Vec<u64> = op
                    .atoms()
                    .filter(|&(_, lambda)| lambda == zero)
                    .map(|(n, _)| n)
                    .collect();
                DecompositionStatus {
                    invertible_on_range: !has_zero,
                    reducibly_invertible: true,
                    kernel: KernelDescription::DiagonalAtoms {
                        atom_indices: kernel_atoms,
                        default_in_kernel: op.default_lambda() == zero,
                    },
                    range_description: "coordinates with nonzero eigenvalue".into(),
                }
            }
        }
    }
}

/// Left shift: the bounded inverse of the right shift on its range
/// (`{0, y_2, y_3, …} ↦ {y_2, y_3, …}`). The coordinate `x_1` (index 0),
/// which vanishes on every range element, is dropped.
pub fn left_shift<T: Real>(f: &FiniteSupportVector<T>) -> FiniteSupportVector<T> {
    FiniteSupportVector::from_entries(f.iter().filter(|&(n, _)| n >= 1).map(|(n, v)| (n - 1, v)))
}

/// Invertibility verdicts for a sequence operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionStatus {
    /// Whether `A` has a bounded inverse `A⁻¹ : R(A) → X`.
    pub invertible_on_range: bool,
    /// Whether `X = ker A ⊕ R(A)` with `R(A)` closed.
    pub reducibly_invertible: bool,
    pub kernel: KernelDescription,
    pub range_description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelDescription {
    /// `ker A = {0}`.
    Trivial,
    /// The even positions `x_2, x_4, …` (odd indices).
    EvenPositions,
    /// For a diagonal operator: listed atoms with `λ_n = 0`, plus every
    /// unlisted index when the default eigenvalue is 0.
    DiagonalAtoms {
        atom_indices: Vec<u64>,
        default_in_kernel: bool,
    },
}

/// Semigroup generation verdict for a diagonal operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationCheck<T> {
    /// True iff the real parts of the spectrum are bounded above, which holds
    /// for every finite atom list.
    pub generates: bool,
    /// `ω = sup Re λ_n`.
    pub omega: Option<T>,
    /// The semigroup is bounded iff `ω ≤ 0`.
    pub bounded_semigroup: bool,
}

/// Checks the spectral criterion for generating a semigroup:
/// `σ(A) ⊆ {Re λ ≤ ω}` for some real `ω`.
pub fn semigroup_generation_check<T: Real>(op: &DiagonalOperator<T>) -> GenerationCheck<T> {
    let omega = op
        .distinct_values()
        .iter()
        .map(|v| v.re)
        .fold(T::neg_infinity(), T::max);
    GenerationCheck {
        generates: true,
        omega: Some(omega),
        bounded_semigroup: omega <= T::zero(),
    }
}

/// `y(t)_n = e^{t λ_n} f_n`: the operational-calculus exponential applied to
/// a finite-support initial state (which lies in every `D(e^{tA})`).
pub fn weak_solution_general<T: Real>(
    op: &DiagonalOperator<T>,
    f: &FiniteSupportVector<T>,
    t: T,
) -> FiniteSupportVector<T> {
    FiniteSupportVector::from_entries(f.iter().map(|(n, v)| {
        let lambda = op.lambda_of(n);
        let factor = Complex::from_polar((t * lambda.re).exp(), t * lambda.im);
        (n, v * factor)
    }))
}

/// Boundedness verdict for the diagonal model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarBoundedness {
    /// Bounded iff `f_n = 0` for every `n` with `Re λ_n > 0` (exact).
    pub bounded: bool,
    pub violating_indices: Vec<u64>,
}

/// Enforces the vanishing condition: the trajectory is bounded iff the
/// initial state carries no mass on eigenvalue atoms with positive real part.
pub fn classify_scalar_bounded<T: Real>(
    op: &DiagonalOperator<T>,
    f: &FiniteSupportVector<T>,
) -> ScalarBoundedness {
    let violating_indices: Vec<u64> = f
        .iter()
        .filter(|&(n, _)| op.lambda_of(n).re > T::zero())
        .map(|(n, _)| n)
        .collect();
    ScalarBoundedness {
        bounded: violating_indices.is_empty(),
        violating_indices,
    }
}

/// Cesàro limit on the diagonal model.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCesaroLimit<T> {
    /// `E_A({0}) f`: restriction of `f` to the kernel atoms.
    pub limit: FiniteSupportVector<T>,
    /// True when no eigenvalue in the support of `f` is pure-imaginary
    /// nonzero, in which case the trajectory itself converges. All-real
    /// spectra (the self-adjoint case) are always strong.
    pub strong: bool,
}

/// `s-lim (1/t)∫₀ᵗ y(s) ds = E_A({0}) f`, exact on the stored atoms.
pub fn cesaro_limit_scalar<T: Real>(
    op: &DiagonalOperator<T>,
    f: &FiniteSupportVector<T>,
) -> Result<ScalarCesaroLimit<T>, ModelError> {
    let class = classify_scalar_bounded(op, f);
    if !class.bounded {
        return Err(ModelError::UnboundedScalar {
            indices: class.violating_indices,
        });
    }
    let zero = Complex::new(T::zero(), T::zero());
    let limit =
        FiniteSupportVector::from_entries(f.iter().filter(|&(n, _)| op.lambda_of(n) == zero));
    let strong = f.iter().all(|(n, _)| {
        let lambda = op.lambda_of(n);
        !(lambda.re == T::zero() && lambda.im != T::zero())
    });
    Ok(ScalarCesaroLimit { limit, strong })
}

/// Decay record for the strictly-stable spectral part.
#[derive(Debug, Clone)]
pub struct DecayReport<T> {
    /// `(t, ‖e^{tA} E_A({Re λ < 0}) f‖)` samples.
    pub samples: Vec<(T, T)>,
    /// Certified crossing time `t* = n·ln(8 M ‖f‖ / ε)` with `n = ⌈1/ν⌉`,
    /// `ν = min |Re λ_n|` over the decaying atoms in the support.
    pub crossing_time: T,
    /// Whether the norm at `t*` is below `ε` (as the construction guarantees).
    pub crossed_by_t_star: bool,
    /// Whether the sampled norms decrease monotonically.
    pub monotone: bool,
    /// Whether the final sample is below `ε`.
    pub below_tol_at_end: bool,
}

fn decay_norm<T: Real>(op: &DiagonalOperator<T>, f: &FiniteSupportVector<T>, t: T) -> T {
    let two = T::one() + T::one();
    f.iter()
        .filter(|&(n, _)| op.lambda_of(n).re < T::zero())
        .fold(T::zero(), |acc, (n, v)| {
            acc + (two * t * op.lambda_of(n).re).exp() * v.norm_sqr()
        })
        .sqrt()
}

/// Verifies `s-lim e^{tA} E_A({Re λ < 0}) f = 0` with exact coordinatewise
/// norms, and reports the ε-split crossing time.
pub fn negative_part_decay<T: Real>(
    op: &DiagonalOperator<T>,
    f: &FiniteSupportVector<T>,
    t_grid: &[T],
    epsilon: T,
) -> DecayReport<T> {
    let samples: Vec<(T, T)> = t_grid.iter().map(|&t| (t, decay_norm(op, f, t))).collect();
    let monotone = samples.windows(2).all(|w| w[1].1 <= w[0].1);
    let below_tol_at_end = samples.last().is_none_or(|&(_, n)| n < epsilon);

    let slowest = f
        .iter()
        .map(|(n, _)| op.lambda_of(n).re)
        .filter(|re| *re < T::zero())
        .map(|re| re.abs())
        .fold(T::infinity(), T::min);
    let crossing_time = if slowest.is_finite() && !f.is_zero() {
        let n_int = (T::one() / slowest).ceil();
        let m = real::<T>(SPECTRAL_MEASURE_BOUND);
        let arg = real::<T>(8.0) * m * f.norm() / epsilon;
        (n_int * arg.ln()).max(T::zero())
    } else {
        T::zero()
    };
    let crossed_by_t_star = decay_norm(op, f, crossing_time) < epsilon;
    DecayReport {
        samples,
        crossing_time,
        crossed_by_t_star,
        monotone,
        below_tol_at_end,
    }
}

/// Truncates a diagonal operator to the support of `f`: the diagonal matrix
/// of eigenvalues over those coordinates, the index map, and the dense state.
/// Returns `None` for an empty support.
#[allow(clippy::type_complexity)]
pub fn truncate_to_matrix<T: Real>(
    op: &DiagonalOperator<T>,
    f: &FiniteSupportVector<T>,
) -> Option<(ComplexMatrix<T>, Vec<u64>, Vec<C<T>>)> {
    let support = f.support();
    if support.is_empty() {
        return None;
    }
    let diag: Vec<C<T>> = support.iter().map(|&n| op.lambda_of(n)).collect();
    let dense: Vec<C<T>> = support.iter().map(|&n| f.get(n)).collect();
    Some((ComplexMatrix::from_diagonal(&diag), support, dense))
}

#[derive(Serialize, Deserialize)]
struct VectorRepr<T> {
    entries: Vec<(u64, T, T)>,
}

impl<T: Real + Serialize> Serialize for FiniteSupportVector<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        VectorRepr {
            entries: self.iter().map(|(n, v)| (n, v.re, v.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for FiniteSupportVector<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = VectorRepr::<T>::deserialize(deserializer)?;
        Ok(Self::from_entries(
            repr.entries
                .into_iter()
                .map(|(n, re, im)| (n, Complex::new(re, im))),
        ))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum OperatorRepr<T> {
    RightShift,
    ParityProjection,
    Diagonal {
        atoms: Vec<(u64, T, T)>,
        default: [T; 2],
    },
}

impl<T: Real + Serialize> Serialize for SequenceOperator<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Self::RightShift => OperatorRepr::RightShift,
            Self::ParityProjection => OperatorRepr::ParityProjection,
            Self::Diagonal(op) => OperatorRepr::Diagonal {
                atoms: op.atoms().map(|(n, v)| (n, v.re, v.im)).collect(),
                default: [op.default_lambda().re, op.default_lambda().im],
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for SequenceOperator<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(match OperatorRepr::<T>::deserialize(deserializer)? {
            OperatorRepr::RightShift => Self::RightShift,
            OperatorRepr::ParityProjection => Self::ParityProjection,
            OperatorRepr::Diagonal { atoms, default } => Self::Diagonal(DiagonalOperator::new(
                atoms
                    .into_iter()
                    .map(|(n, re, im)| (n, Complex::new(re, im))),
                Complex::new(default[0], default[1]),
            )),
        })
    }
}
