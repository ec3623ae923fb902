//! Trajectories `y(t) = e^{tA} f` evaluated through the spectral
//! decomposition, an independent series exponential used as a test oracle, and
//! the boundedness dichotomy: a summand survives only if its eigenvalue has
//! negative real part, or lies on the imaginary axis with the whole nilpotent
//! chain of the initial state vanishing.

use num_complex::Complex;

use crate::error::EvolutionError;
use crate::matrix::{vec_add, vec_is_finite, vec_norm, vec_scale, ComplexMatrix};
use crate::scalar::{real, Real, C};
use crate::spectral::{SpectralDecomposition, ToleranceConfig};

/// Magnitudes above `e^LN_HUGE = 1e300` are clamped and flagged instead of
/// silently degenerating into infinities or NaNs.
const LN_HUGE: f64 = 690.775_527_898_213_7; // ln(1e300)

/// A spectral decomposition paired with an initial state.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub decomposition: SpectralDecomposition<T>,
    pub initial: Vec<C<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(
        decomposition: SpectralDecomposition<T>,
        initial: Vec<C<T>>,
    ) -> Result<Self, EvolutionError> {
        if initial.len() != decomposition.dim {
            return Err(EvolutionError::DimensionMismatch {
                expected: decomposition.dim,
                got: initial.len(),
            });
        }
        Ok(Self {
            decomposition,
            initial,
        })
    }

    pub fn evaluate(&self, t: T) -> Result<EvolvedState<T>, EvolutionError> {
        exp_action(&self.decomposition, &self.initial, t)
    }
}

/// Trajectory value with an overflow flag.
#[derive(Debug, Clone)]
pub struct EvolvedState<T> {
    pub vector: Vec<C<T>>,
    /// True when some exponential factor exceeded 1e300 in magnitude; the
    /// affected contributions are clamped to that magnitude.
    pub overflow: bool,
}

/// Evaluates `y(t) = Σ_j e^{tλ_j} Σ_{k<k_j} (t^k/k!) Q_j^k P_j f`.
pub fn exp_action<T: Real>(
    d: &SpectralDecomposition<T>,
    f: &[C<T>],
    t: T,
) -> Result<EvolvedState<T>, EvolutionError> {
    if f.len() != d.dim {
        return Err(EvolutionError::DimensionMismatch {
            expected: d.dim,
            got: f.len(),
        });
    }
    if t < T::zero() || !t.is_finite() {
        return Err(EvolutionError::NegativeTime {
            t: num_traits::ToPrimitive::to_f64(&t).unwrap_or(f64::NAN),
        });
    }
    let mut y = vec![Complex::new(T::zero(), T::zero()); d.dim];
    let mut overflow = false;
    for item in &d.items {
        // Polynomial part Σ_{k<k_j} (t^k/k!) Q^k (P f).
        let mut poly = item.projector.apply(f);
        let mut term = poly.clone();
        for k in 1..item.index {
            term = item.nilpotent.apply(&term);
            let scale = t / T::from_usize(k).unwrap();
            term = vec_scale(&term, Complex::new(scale, T::zero()));
            poly = vec_add(&poly, &term);
        }
        let poly_norm = vec_norm(&poly);
        if poly_norm == T::zero() {
            continue;
        }
        let mut exponent = t * item.lambda.re;
        let budget = real::<T>(LN_HUGE) - poly_norm.ln();
        if exponent > budget {
            overflow = true;
            exponent = budget;
        }
        let factor = Complex::from_polar(exponent.exp(), t * item.lambda.im);
        for (yi, pi) in y.iter_mut().zip(poly.iter()) {
            *yi += factor * *pi;
        }
    }
    if !vec_is_finite(&y) {
        overflow = true;
    }
    Ok(EvolvedState {
        vector: y,
        overflow,
    })
}

/// Matrix exponential `e^{tA}` by scaling-and-squaring with a truncated power
/// series. Independent of the spectral decomposition; used as a test oracle.
pub fn exp_series_oracle<T: Real>(
    a: &ComplexMatrix<T>,
    t: T,
) -> Result<ComplexMatrix<T>, EvolutionError> {
    let n = a.order().map_err(EvolutionError::from)?;
    if t < T::zero() || !t.is_finite() {
        return Err(EvolutionError::NegativeTime {
            t: num_traits::ToPrimitive::to_f64(&t).unwrap_or(f64::NAN),
        });
    }
    let b = a.scale(Complex::new(t, T::zero()));
    let norm = b.inf_norm();
    let half = real::<T>(0.5);
    let mut squarings = 0usize;
    let mut scaled = b;
    while scaled.inf_norm() > half && squarings < 64 {
        scaled = scaled.scale(Complex::new(half, T::zero()));
        squarings += 1;
    }
    debug_assert!(norm.is_finite());
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=40 {
        let inv_k = T::one() / T::from_usize(k).unwrap();
        term = term.matmul(&scaled).scale(Complex::new(inv_k, T::zero()));
        result = result.add(&term);
        if term.max_norm() <= T::epsilon() * result.max_norm() * real::<T>(0.25) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Sign regime of `Re λ` relative to the imaginary-axis tolerance band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NegRe,
    ZeroRe,
    PosRe,
}

/// Per-eigenvalue record of the boundedness dichotomy.
#[derive(Debug, Clone)]
pub struct Witness<T> {
    pub lambda: C<T>,
    pub regime: Regime,
    pub violated: bool,
    /// Largest chain position `k` with `‖Q^k P f‖` above the vanishing
    /// threshold, paired with that norm.
    pub violating_term: Option<(usize, T)>,
    /// Distance of `|Re λ|` to the edge of the tolerance band.
    pub margin: T,
}

/// One retained term of the bounded representation: contributes
/// `e^{tλ} Σ_k (t^k/k!) c_k`.
#[derive(Debug, Clone)]
pub struct BoundedTerm<T> {
    pub lambda: C<T>,
    /// Chain vectors `c_k = Q^k P f`; a single entry for a pure-imaginary
    /// eigenvalue.
    pub coefficients: Vec<Vec<C<T>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    Unbounded,
}

/// Boundedness classification with per-eigenvalue witnesses.
#[derive(Debug, Clone)]
pub struct TrajectoryClass<T> {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness<T>>,
    /// Retained terms of the bounded representation, when bounded.
    pub bounded_form: Option<Vec<BoundedTerm<T>>>,
}

impl<T> TrajectoryClass<T> {
    pub fn is_bounded(&self) -> bool {
        matches!(self.verdict, Verdict::Bounded)
    }
}

/// Applies the dichotomy: eigenvalues with negative real part never violate;
/// positive real part requires `P_j f = 0`; zero real part requires
/// `Q_j^k P_j f = 0` for `k = 1, …, k_j - 1`.
pub fn classify_boundedness<T: Real>(
    d: &SpectralDecomposition<T>,
    f: &[C<T>],
    tol: &ToleranceConfig<T>,
) -> Result<TrajectoryClass<T>, EvolutionError> {
    if f.len() != d.dim {
        return Err(EvolutionError::DimensionMismatch {
            expected: d.dim,
            got: f.len(),
        });
    }
    let vanish = tol.residual_tol * (T::one() + vec_norm(f));
    let mut witnesses = Vec::with_capacity(d.items.len());
    let mut bounded_terms: Vec<BoundedTerm<T>> = Vec::new();
    let mut any_violation = false;

    for item in &d.items {
        let re = item.lambda.re;
        let regime = if re > tol.imag_axis_tol {
            Regime::PosRe
        } else if re < -tol.imag_axis_tol {
            Regime::NegRe
        } else {
            Regime::ZeroRe
        };
        let margin = (re.abs() - tol.imag_axis_tol).abs();

        // Chain norms ‖Q^k P f‖ for k = 0, …, index-1.
        let mut chain: Vec<Vec<C<T>>> = Vec::with_capacity(item.index);
        chain.push(item.projector.apply(f));
        for _ in 1..item.index {
            let next = item.nilpotent.apply(chain.last().unwrap());
            chain.push(next);
        }
        let norms: Vec<T> = chain.iter().map(|v| vec_norm(v)).collect();

        let (violated, violating_term) = match regime {
            Regime::NegRe => (false, None),
            Regime::PosRe if norms[0] > vanish => {
                let worst = (0..item.index)
                    .rev()
                    .find(|&k| norms[k] > vanish)
                    .unwrap_or(0);
                (true, Some((worst, norms[worst])))
            }
            Regime::PosRe => (false, None),
            Regime::ZeroRe => {
                let worst = (1..item.index).rev().find(|&k| norms[k] > vanish);
                (worst.is_some(), worst.map(|k| (k, norms[k])))
            }
        };
        any_violation |= violated;

        if !violated {
            match regime {
                Regime::NegRe => bounded_terms.push(BoundedTerm {
                    lambda: item.lambda,
                    coefficients: chain.clone(),
                }),
                Regime::ZeroRe => bounded_terms.push(BoundedTerm {
                    lambda: item.lambda,
                    coefficients: vec![chain[0].clone()],
                }),
                Regime::PosRe => {} // P_j f vanishes; nothing retained
            }
        }

        witnesses.push(Witness {
            lambda: item.lambda,
            regime,
            violated,
            violating_term,
            margin,
        });
    }

    Ok(TrajectoryClass {
        verdict: if any_violation {
            Verdict::Unbounded
        } else {
            Verdict::Bounded
        },
        witnesses,
        bounded_form: if any_violation {
            None
        } else {
            Some(bounded_terms)
        },
    })
}

/// Evaluates a bounded representation at time `t`.
pub fn evaluate_bounded_form<T: Real>(terms: &[BoundedTerm<T>], dim: usize, t: T) -> Vec<C<T>> {
    let mut y = vec![Complex::new(T::zero(), T::zero()); dim];
    for term in terms {
        let factor = Complex::from_polar((t * term.lambda.re).exp(), t * term.lambda.im);
        let mut weight = T::one();
        for (k, coeff) in term.coefficients.iter().enumerate() {
            if k > 0 {
                weight = weight * t / T::from_usize(k).unwrap();
            }
            let scale = factor * Complex::new(weight, T::zero());
            for (yi, ci) in y.iter_mut().zip(coeff.iter()) {
                *yi += scale * *ci;
            }
        }
    }
    y
}

/// Empirical growth probe on a geometric time grid.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalBoundedness<T> {
    /// Largest sampled `‖y(t)‖`, including `t = 0`. A grid estimate, not a
    /// proven supremum.
    pub sup_norm: T,
    pub growing: bool,
}

/// Samples `‖y(t)‖` geometrically up to `t_max`; flags growth when the last
/// decade's maximum exceeds ten times the first decade's, or on overflow.
pub fn empirical_boundedness<T: Real>(
    d: &SpectralDecomposition<T>,
    f: &[C<T>],
    t_max: T,
    n_samples: usize,
) -> Result<EmpiricalBoundedness<T>, EvolutionError> {
    if t_max <= T::zero() || !t_max.is_finite() {
        return Err(EvolutionError::InvalidHorizon {
            t_max: num_traits::ToPrimitive::to_f64(&t_max).unwrap_or(f64::NAN),
        });
    }
    let n_samples = n_samples.max(2);
    let t_min = if t_max > T::one() {
        T::one()
    } else {
        t_max * real::<T>(1e-3)
    };
    let ratio = (t_max / t_min).ln();
    let mut sup = vec_norm(f); // t = 0 sample
    let mut overflow = false;
    let mut first_decade_max = T::zero();
    let mut last_decade_max = T::zero();
    let ten = real::<T>(10.0);
    for i in 0..n_samples {
        let frac = T::from_usize(i).unwrap() / T::from_usize(n_samples - 1).unwrap();
        let t = t_min * (ratio * frac).exp();
        let state = exp_action(d, f, t)?;
        overflow |= state.overflow;
        let norm = vec_norm(&state.vector);
        sup = sup.max(norm);
        if t <= t_min * ten {
            first_decade_max = first_decade_max.max(norm);
        }
        if t >= t_max / ten {
            last_decade_max = last_decade_max.max(norm);
        }
    }
    let growing = overflow || last_decade_max > ten * first_decade_max;
    Ok(EmpiricalBoundedness {
        sup_norm: sup,
        growing,
    })
}
