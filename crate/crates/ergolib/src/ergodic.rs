//! Cesàro means `(1/t)∫₀ᵗ y(s) ds` in closed form and by quadrature, their
//! ergodic limits, the `O(1/t)` rate bounds for (reducibly) invertible
//! operators, and the kernel-limit property of accumulation vectors.

use num_complex::Complex;

use crate::error::ErgodicError;
use crate::evolution::{classify_boundedness, empirical_boundedness, exp_action, TrajectoryClass};
use crate::linalg::{operator_norm, LuFactors};
use crate::matrix::{vec_norm, vec_scale, vec_sub, ComplexMatrix};
use crate::scalar::{real, Real, C};
use crate::spectral::{
    reducible_invertibility, spectral_decompose, SpectralDecomposition, ToleranceConfig,
};

const LN_HUGE: f64 = 690.775_527_898_213_7; // ln(1e300)

/// Mean integrals `m_k(λ, t) = (1/t)∫₀ᵗ e^{sλ} s^k/k! ds` for `k < count`.
///
/// For `|λt| < 1` each `m_k` is evaluated by the power series
/// `(t^k/k!) Σ_m (λt)^m / (m! (k+m+1))` (at least 12 terms, machine-precision
/// terminated), which is exact at `λ = 0`. Otherwise the upward recursion
/// `I_k = (e^{tλ} t^k/k! - I_{k-1})/λ` is used; the series region shields it
/// from the cancellation it suffers for small `|λt|`.
fn mean_integrals<T: Real>(lambda: C<T>, t: T, count: usize) -> Vec<C<T>> {
    let mut out = Vec::with_capacity(count);
    let x = lambda * Complex::new(t, T::zero());
    if x.norm() < T::one() {
        let mut prefactor = T::one(); // t^k / k!
        for k in 0..count {
            if k > 0 {
                prefactor = prefactor * t / T::from_usize(k).unwrap();
            }
            let mut acc = Complex::new(T::zero(), T::zero());
            let mut power = Complex::new(T::one(), T::zero()); // x^m / m!
            for m in 0..40 {
                if m > 0 {
                    power = power * x / Complex::new(T::from_usize(m).unwrap(), T::zero());
                }
                let denom = T::from_usize(k + m + 1).unwrap();
                let term = power / Complex::new(denom, T::zero());
                acc += term;
                if m >= 12 && term.norm() <= T::epsilon() * acc.norm() {
                    break;
                }
            }
            out.push(acc * Complex::new(prefactor, T::zero()));
        }
    } else {
        let mut exponent = t * lambda.re;
        if exponent > real::<T>(LN_HUGE) {
            exponent = real::<T>(LN_HUGE);
        }
        let e = Complex::from_polar(exponent.exp(), t * lambda.im);
        let one = Complex::new(T::one(), T::zero());
        let mut integral = (e - one) / lambda; // I_0
        out.push(integral / Complex::new(t, T::zero()));
        let mut top = e; // e^{tλ} t^k / k!
        let huge = real::<T>(1e300);
        for k in 1..count {
            top *= Complex::new(t / T::from_usize(k).unwrap(), T::zero());
            // Clamp runaway magnitudes (possible only for Re λ > 0, i.e. on
            // unbounded trajectories) so the recursion cannot emit NaN.
            if top.norm() > huge {
                top /= Complex::new(top.norm() / huge, T::zero());
            }
            integral = (top - integral) / lambda;
            out.push(integral / Complex::new(t, T::zero()));
        }
    }
    out
}

/// Closed-form Cesàro mean `(1/t)∫₀ᵗ y(s) ds` via termwise integration of the
/// spectral exponential.
pub fn cesaro_mean_analytic<T: Real>(
    d: &SpectralDecomposition<T>,
    f: &[C<T>],
    t: T,
) -> Result<Vec<C<T>>, ErgodicError> {
    if f.len() != d.dim {
        return Err(crate::error::EvolutionError::DimensionMismatch {
            expected: d.dim,
            got: f.len(),
        }
        .into());
    }
    if t <= T::zero() || !t.is_finite() {
        return Err(ErgodicError::NonPositiveTime {
            t: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut mean = vec![Complex::new(T::zero(), T::zero()); d.dim];
    for item in &d.items {
        let weights = mean_integrals(item.lambda, t, item.index);
        let mut chain = item.projector.apply(f); // Q^k P f
        for (k, &w) in weights.iter().enumerate() {
            if k > 0 {
                chain = item.nilpotent.apply(&chain);
            }
            for (mi, ci) in mean.iter_mut().zip(chain.iter()) {
                *mi += w * *ci;
            }
        }
    }
    Ok(mean)
}

/// Composite-Simpson Cesàro mean: the independent quadrature oracle for the
/// closed-form path.
pub fn cesaro_mean_quadrature<T: Real>(
    d: &SpectralDecomposition<T>,
    f: &[C<T>],
    t: T,
    n_panels: usize,
) -> Result<Vec<C<T>>, ErgodicError> {
    if t <= T::zero() || !t.is_finite() {
        return Err(ErgodicError::NonPositiveTime {
            t: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    if n_panels < 2 {
        return Err(ErgodicError::TooFewPanels { n_panels });
    }
    let h = t / T::from_usize(2 * n_panels).unwrap();
    let mut acc = vec![Complex::new(T::zero(), T::zero()); d.dim];
    let n_nodes = 2 * n_panels + 1;
    for i in 0..n_nodes {
        let s = h * T::from_usize(i).unwrap();
        let weight = if i == 0 || i == n_nodes - 1 {
            T::one()
        } else if i % 2 == 1 {
            real::<T>(4.0)
        } else {
            real::<T>(2.0)
        };
        let y = exp_action(d, f, s)?;
        let w = Complex::new(weight, T::zero());
        for (ai, yi) in acc.iter_mut().zip(y.vector.iter()) {
            *ai += w * *yi;
        }
    }
    let three = real::<T>(3.0);
    Ok(vec_scale(&acc, Complex::new(h / (three * t), T::zero())))
}

/// Ergodic limit of the Cesàro means.
#[derive(Debug, Clone)]
pub struct CesaroLimit<T> {
    /// `P(0, A) y(0)`: the zero vector when `0 ∈ ρ(A)`.
    pub limit: Vec<C<T>>,
    /// True when the trajectory itself converges to the limit (no surviving
    /// pure-imaginary nonzero eigenvalue component).
    pub strong: bool,
}

fn unbounded_detail<T: Real>(class: &TrajectoryClass<T>) -> String {
    let worst = class
        .witnesses
        .iter()
        .filter(|w| w.violated)
        .map(|w| {
            let (k, norm) = w.violating_term.unwrap_or((0, T::zero()));
            format!(
                "λ = ({:.6e}, {:.6e}) with ‖Q^{}Pf‖ = {:.3e}",
                w.lambda.re.to_f64().unwrap_or(f64::NAN),
                w.lambda.im.to_f64().unwrap_or(f64::NAN),
                k,
                norm.to_f64().unwrap_or(f64::NAN)
            )
        })
        .collect::<Vec<_>>();
    worst.join("; ")
}

/// Cesàro limit `P(0,A) y(0)` for a bounded trajectory; re-verifies
/// boundedness and rejects unbounded input with the witnesses.
pub fn cesaro_limit<T: Real>(
    d: &SpectralDecomposition<T>,
    f: &[C<T>],
    tol: &ToleranceConfig<T>,
) -> Result<CesaroLimit<T>, ErgodicError> {
    let class = classify_boundedness(d, f, tol)?;
    if !class.is_bounded() {
        return Err(ErgodicError::UnboundedTrajectory {
            detail: unbounded_detail(&class),
        });
    }
    let limit = d.projector_at_zero(tol).apply(f);
    let vanish = tol.residual_tol * (T::one() + vec_norm(f));
    let strong = d.items.iter().all(|item| {
        let pure_imaginary_nonzero =
            item.lambda.re.abs() <= tol.imag_axis_tol && !tol.is_zero_eigenvalue(item.lambda);
        if pure_imaginary_nonzero {
            vec_norm(&item.projector.apply(f)) <= vanish
        } else {
            true
        }
    });
    Ok(CesaroLimit { limit, strong })
}

/// `A + P` together with its inverse.
#[derive(Debug, Clone)]
pub struct ShiftedOperator<T> {
    pub shifted: ComplexMatrix<T>,
    pub inverse: ComplexMatrix<T>,
}

/// Forms `A + P` for the mean ergodic projection `P` and inverts it; a
/// singular result signals that `P` was not the projection onto `ker A`
/// along `R(A)`.
pub fn shifted_operator<T: Real>(
    a: &ComplexMatrix<T>,
    p: &ComplexMatrix<T>,
) -> Result<ShiftedOperator<T>, ErgodicError> {
    let shifted = a.add(p);
    let n = shifted.rows();
    let floor = T::from_usize(n).unwrap() * T::epsilon() * shifted.frobenius_norm();
    let lu = LuFactors::new(&shifted, floor).map_err(|_| ErgodicError::ShiftNotInvertible)?;
    let inverse = lu.inverse();
    Ok(ShiftedOperator { shifted, inverse })
}

/// Outcome of a rate-bound verification.
#[derive(Debug, Clone, Copy)]
pub struct RateBound<T> {
    /// The constant `C` in `‖mean(t) - limit‖ ≤ C/t`.
    pub constant: T,
    pub satisfied: bool,
    /// Worst signed excess over the slackened bound (negative when satisfied).
    pub max_violation: T,
    pub worst_t: T,
    /// Worst relative defect of the identity `mean(t) - limit = B⁻¹(u(t) - u(0))/t`.
    pub identity_rel_err: T,
    /// Grid estimate of `sup_t ‖u(t)‖` (an estimate, not a proven supremum).
    pub sup_norm_estimate: T,
}

fn validate_grid<T: Real>(t_grid: &[T]) -> Result<(), ErgodicError> {
    let increasing = t_grid.windows(2).all(|w| w[0] < w[1]);
    if t_grid.is_empty() || !increasing || t_grid[0] <= T::zero() {
        return Err(ErgodicError::InvalidTimeGrid);
    }
    Ok(())
}

/// Rate bound `‖mean(t)‖ ≤ 2‖A⁻¹‖ sup_s ‖y(s)‖ / t` for invertible `A`,
/// plus the exact identity `mean(t) = A⁻¹(y(t) - y(0))/t`.
pub fn verify_rate_invertible<T: Real>(
    a: &ComplexMatrix<T>,
    f: &[C<T>],
    t_grid: &[T],
    tol: &ToleranceConfig<T>,
) -> Result<RateBound<T>, ErgodicError> {
    validate_grid(t_grid)?;
    let d = spectral_decompose(a, tol)?;
    if let Some(item) = d.zero_item(tol) {
        return Err(ErgodicError::NotInvertible {
            detail: format!("the eigenvalue 0 (index {})", item.index),
        });
    }
    let n = a.order()?;
    let floor = T::from_usize(n).unwrap() * T::epsilon() * a.frobenius_norm();
    let lu = LuFactors::new(a, floor).map_err(|_| ErgodicError::NotInvertible {
        detail: "a vanishing pivot".into(),
    })?;
    let inverse = lu.inverse();
    let inv_norm = operator_norm(&inverse).map_err(ErgodicError::from)?;
    let zero_limit = vec![Complex::new(T::zero(), T::zero()); d.dim];
    rate_bound_core(&d, a, f, &zero_limit, &inverse, inv_norm, t_grid, tol)
}

/// Rate bound for a reducibly invertible `A`: the deviation
/// `mean(t) - P y(0)` obeys the invertible-case bound for `A + P`.
pub fn verify_rate_reducible<T: Real>(
    a: &ComplexMatrix<T>,
    f: &[C<T>],
    t_grid: &[T],
    tol: &ToleranceConfig<T>,
) -> Result<RateBound<T>, ErgodicError> {
    validate_grid(t_grid)?;
    let ri = reducible_invertibility(a, tol)?;
    if !ri.holds {
        return Err(ErgodicError::NotReduciblyInvertible {
            index: ri.zero_index,
        });
    }
    let p = ri.projector.expect("projection present when holds");
    let shifted = shifted_operator(a, &p)?;
    let inv_norm = operator_norm(&shifted.inverse).map_err(ErgodicError::from)?;
    let d = spectral_decompose(a, tol)?;
    let limit = p.apply(f);
    rate_bound_core(&d, a, f, &limit, &shifted.inverse, inv_norm, t_grid, tol)
}

/// Shared core: checks `‖mean(t) - limit‖ ≤ 2 ‖B⁻¹‖ sup‖u‖ / t` and the
/// exact identity `mean(t) - limit = B⁻¹ (u(t) - u(0)) / t`, where
/// `u(t) = y(t) - limit`.
#[allow(clippy::too_many_arguments)]
fn rate_bound_core<T: Real>(
    d: &SpectralDecomposition<T>,
    _a: &ComplexMatrix<T>,
    f: &[C<T>],
    limit: &[C<T>],
    b_inverse: &ComplexMatrix<T>,
    inv_norm: T,
    t_grid: &[T],
    tol: &ToleranceConfig<T>,
) -> Result<RateBound<T>, ErgodicError> {
    let class = classify_boundedness(d, f, tol)?;
    if !class.is_bounded() {
        return Err(ErgodicError::UnboundedTrajectory {
            detail: unbounded_detail(&class),
        });
    }
    let u0 = vec_sub(f, limit);
    let t_max = *t_grid.last().unwrap();

    // sup ‖u(t)‖ over a dense geometric grid, t = 0 and the check points.
    let decades = t_max.log10().ceil().to_usize().unwrap_or(4).max(1);
    let probe = empirical_boundedness(d, f, t_max, (32 * decades).max(64))?;
    let mut sup_u = vec_norm(&u0);
    let limit_norm = vec_norm(limit);
    // ‖u‖ ≤ ‖y‖ + ‖limit‖ pointwise; refine with the exact check points below.
    sup_u = sup_u.max(probe.sup_norm + limit_norm);
    let mut u_values: Vec<Vec<C<T>>> = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let y = exp_action(d, f, t)?;
        let u = vec_sub(&y.vector, limit);
        sup_u = sup_u.max(vec_norm(&u));
        u_values.push(u);
    }

    let constant = (T::one() + T::one()) * inv_norm * sup_u;
    let slack_rel = T::one() + real::<T>(1e-6);
    let slack_abs = real::<T>(1e-12);
    let mut satisfied = true;
    let mut max_violation = T::neg_infinity();
    let mut worst_t = t_grid[0];
    let mut identity_rel_err = T::zero();
    let f_norm = vec_norm(f);

    for (&t, u_t) in t_grid.iter().zip(&u_values) {
        let mean = cesaro_mean_analytic(d, f, t)?;
        let deviation = vec_sub(&mean, limit);
        let dev_norm = vec_norm(&deviation);
        let bound = constant / t * slack_rel + slack_abs;
        let excess = dev_norm - bound;
        if excess > max_violation {
            max_violation = excess;
            worst_t = t;
        }
        if excess > T::zero() {
            satisfied = false;
        }
        // Identity: deviation == B⁻¹ (u(t) - u(0)) / t.
        let rhs = vec_scale(
            &b_inverse.apply(&vec_sub(u_t, &u0)),
            Complex::new(T::one() / t, T::zero()),
        );
        let defect = vec_norm(&vec_sub(&deviation, &rhs));
        let scale = T::one() + f_norm + dev_norm;
        identity_rel_err = identity_rel_err.max(defect / scale);
    }

    Ok(RateBound {
        constant,
        satisfied,
        max_violation,
        worst_t,
        identity_rel_err,
        sup_norm_estimate: sup_u,
    })
}

/// A candidate accumulation vector of the Cesàro means.
#[derive(Debug, Clone)]
pub struct AccumulationPoint<T> {
    pub vector: Vec<C<T>>,
    pub at_t: T,
    /// `‖A v‖` for the candidate `v`.
    pub kernel_residual: T,
    pub in_kernel: bool,
}

/// Result of the kernel-limit check along an increasing time sequence.
#[derive(Debug, Clone)]
pub struct KernelLimitReport<T> {
    /// `(t_n, ‖A · mean(t_n)‖)` samples.
    pub samples: Vec<(T, T)>,
    /// Whether `‖A · mean(t_n)‖ ≤ 2 sup‖y‖ / t_n` held at every sample.
    pub bound_satisfied: bool,
    pub accumulation: Option<AccumulationPoint<T>>,
}

/// Verifies `‖A · mean(t_n)‖ ≤ 2 sup‖y‖ / t_n` (the identity
/// `A·mean(t) = (y(t) - y(0))/t` in norm) and checks any detected
/// accumulation vector of the means for membership in `ker A`.
pub fn kernel_limit_check<T: Real>(
    a: &ComplexMatrix<T>,
    f: &[C<T>],
    t_seq: &[T],
    tol: &ToleranceConfig<T>,
) -> Result<KernelLimitReport<T>, ErgodicError> {
    validate_grid(t_seq)?;
    let d = spectral_decompose(a, tol)?;
    let class = classify_boundedness(&d, f, tol)?;
    if !class.is_bounded() {
        return Err(ErgodicError::UnboundedTrajectory {
            detail: unbounded_detail(&class),
        });
    }
    let t_max = *t_seq.last().unwrap();
    let decades = t_max.log10().ceil().to_usize().unwrap_or(4).max(1);
    let probe = empirical_boundedness(&d, f, t_max, (32 * decades).max(64))?;
    let mut sup = probe.sup_norm.max(vec_norm(f));
    for &t in t_seq {
        sup = sup.max(vec_norm(&exp_action(&d, f, t)?.vector));
    }

    let slack_rel = T::one() + real::<T>(1e-6);
    let slack_abs = real::<T>(1e-12);
    let two = T::one() + T::one();
    let mut samples = Vec::with_capacity(t_seq.len());
    let mut bound_satisfied = true;
    let mut accumulation: Option<AccumulationPoint<T>> = None;
    let mut previous_mean: Option<Vec<C<T>>> = None;

    for &t in t_seq {
        let mean = cesaro_mean_analytic(&d, f, t)?;
        let residual = vec_norm(&a.apply(&mean));
        if residual > two * sup / t * slack_rel + slack_abs {
            bound_satisfied = false;
        }
        samples.push((t, residual));
        if let Some(prev) = &previous_mean {
            let gap = vec_norm(&vec_sub(&mean, prev));
            if gap <= real::<T>(1e-6) * (T::one() + vec_norm(&mean)) {
                let kernel_residual = vec_norm(&a.apply(&mean));
                // The membership verdict matches the detection granularity;
                // callers needing a tighter bound read `kernel_residual`.
                let in_kernel = kernel_residual
                    <= tol.residual_tol.max(real::<T>(1e-6)) * (T::one() + vec_norm(&mean));
                accumulation = Some(AccumulationPoint {
                    vector: mean.clone(),
                    at_t: t,
                    kernel_residual,
                    in_kernel,
                });
            }
        }
        previous_mean = Some(mean);
    }

    Ok(KernelLimitReport {
        samples,
        bound_satisfied,
        accumulation,
    })
}

/// Desk-scale surrogate for weak convergence: true iff the final mean pairs
/// against every test functional to within `tol` of the limit.
pub fn weak_limit_test<T: Real>(
    means: &[Vec<C<T>>],
    functionals: &[Vec<C<T>>],
    limit: &[C<T>],
    tol: T,
) -> bool {
    let Some(last) = means.last() else {
        return false;
    };
    let difference = vec_sub(last, limit);
    functionals
        .iter()
        .all(|g| crate::matrix::vec_dot(&difference, g).norm() < tol)
}

/// `‖y(t) - y(0) - A · (t · mean(t))‖`: defect of the weak-solution identity.
pub fn weak_solution_residual<T: Real>(
    a: &ComplexMatrix<T>,
    d: &SpectralDecomposition<T>,
    f: &[C<T>],
    t: T,
) -> Result<T, ErgodicError> {
    let y = exp_action(d, f, t)?;
    let mean = cesaro_mean_analytic(d, f, t)?;
    let integral = vec_scale(&mean, Complex::new(t, T::zero()));
    let reconstructed = crate::matrix::vec_add(f, &a.apply(&integral));
    Ok(vec_norm(&vec_sub(&y.vector, &reconstructed)))
}

/// One time sample of the Cesàro-mean grid.
#[derive(Debug, Clone)]
pub struct GridPoint<T> {
    pub t: T,
    pub mean: Vec<C<T>>,
    pub error_norm: T,
}

/// Full Cesàro report: analytic limit, grid of means with distances to the
/// limit, the rate bound when `A` is (reducibly) invertible, and the kernel
/// residuals `‖A · mean(t)‖`.
#[derive(Debug, Clone)]
pub struct CesaroReport<T> {
    pub analytic_limit: Vec<C<T>>,
    pub strong: bool,
    pub grid: Vec<GridPoint<T>>,
    pub rate_bound: Option<RateBound<T>>,
    pub kernel_residuals: Vec<(T, T)>,
}

/// Geometric grid from 1 to `t_max` with the given density per decade.
pub fn default_time_grid<T: Real>(t_max: T, per_decade: usize) -> Vec<T> {
    let per_decade = per_decade.max(2);
    let decades = t_max.log10();
    let steps = (decades * T::from_usize(per_decade).unwrap())
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let ten = real::<T>(10.0);
    let mut grid: Vec<T> = (0..=steps)
        .map(|i| ten.powf(T::from_usize(i).unwrap() / T::from_usize(per_decade).unwrap()))
        .take_while(|&t| t < t_max)
        .collect();
    grid.push(t_max);
    grid
}

/// Builds the full Cesàro report for a bounded trajectory.
pub fn cesaro_report<T: Real>(
    a: &ComplexMatrix<T>,
    f: &[C<T>],
    t_grid: &[T],
    tol: &ToleranceConfig<T>,
) -> Result<CesaroReport<T>, ErgodicError> {
    validate_grid(t_grid)?;
    let d = spectral_decompose(a, tol)?;
    let limit = cesaro_limit(&d, f, tol)?;
    let mut grid = Vec::with_capacity(t_grid.len());
    let mut kernel_residuals = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mean = cesaro_mean_analytic(&d, f, t)?;
        let error_norm = vec_norm(&vec_sub(&mean, &limit.limit));
        kernel_residuals.push((t, vec_norm(&a.apply(&mean))));
        grid.push(GridPoint {
            t,
            mean,
            error_norm,
        });
    }
    let ri = reducible_invertibility(a, tol)?;
    let rate_bound = if ri.holds {
        Some(verify_rate_reducible(a, f, t_grid, tol)?)
    } else {
        None
    };
    Ok(CesaroReport {
        analytic_limit: limit.limit,
        strong: limit.strong,
        grid,
        rate_bound,
        kernel_residuals,
    })
}
