//! Command dispatch: each verb consumes a parsed problem and produces report
//! results plus a verification verdict.

use serde_json::{json, Map, Value};

use ergolib::ergodic::{
    cesaro_limit, cesaro_mean_analytic, cesaro_report, default_time_grid, kernel_limit_check,
    verify_rate_reducible, RateBound,
};
use ergolib::error::{ErgodicError, SpectralError};
use ergolib::evolution::{classify_boundedness, empirical_boundedness, Regime, TrajectoryClass};
use ergolib::models::{
    cesaro_limit_scalar, classify_scalar_bounded, left_shift, negative_part_decay,
    semigroup_generation_check, truncate_to_matrix, weak_solution_general, DiagonalOperator,
    FiniteSupportVector, KernelDescription, SequenceOperator,
};
use ergolib::spectral::{
    reducible_invertibility, spectral_decompose, verify_resolution, SpectralDecomposition,
    ToleranceConfig,
};
use ergolib::{Complex64, Matrix64, Tolerances64};

use crate::input::Problem;
use crate::report::{complex_value, float_value, state_value};

/// Identity-defect threshold for the rate verification.
const IDENTITY_REL_TOL: f64 = 1e-9;
/// Decay threshold for the negative spectral part.
const DECAY_EPSILON: f64 = 1e-6;
/// Grid agreement threshold for the cross-model consistency check.
const CROSS_MODEL_GRID_TOL: f64 = 1e-10;

pub struct RunConfig {
    pub t_max: f64,
    pub grid_density: usize,
    pub tol_eig: Option<f64>,
    pub tol_rank: Option<f64>,
    pub tol_residual: Option<f64>,
}

impl RunConfig {
    pub fn config_value(&self) -> Value {
        json!({
            "t_max": float_value(self.t_max),
            "grid_density": self.grid_density,
            "tol_eig": self.tol_eig.map(float_value).unwrap_or(Value::Null),
            "tol_rank": self.tol_rank.map(float_value).unwrap_or(Value::Null),
            "tol_residual": self.tol_residual.map(float_value).unwrap_or(Value::Null),
        })
    }

    fn tolerances(&self, matrix: &Matrix64) -> Result<Tolerances64, String> {
        let mut tol = ToleranceConfig::for_matrix(matrix).map_err(|e| e.to_string())?;
        if let Some(t) = self.tol_eig {
            tol.eig_cluster_tol = t;
        }
        if let Some(t) = self.tol_rank {
            tol.rank_tol = t;
        }
        if let Some(t) = self.tol_residual {
            tol.residual_tol = t;
        }
        tol.validate().map_err(|e| e.to_string())?;
        Ok(tol)
    }

    fn grid(&self) -> Vec<f64> {
        default_time_grid(self.t_max, self.grid_density)
    }
}

pub enum Outcome {
    Ok {
        results: Value,
        warnings: Vec<String>,
    },
    Failed {
        results: Value,
        warnings: Vec<String>,
        failure: String,
    },
}

fn failed(detail: impl ToString) -> Outcome {
    Outcome::Failed {
        results: Value::Object(Map::new()),
        warnings: Vec::new(),
        failure: detail.to_string(),
    }
}

/// Errors that indicate a bad invocation rather than a failed verification.
pub struct InputError(pub String);

fn require_matrix(problem: &Problem) -> Result<(&Matrix64, Option<&Vec<Complex64>>), InputError> {
    match problem {
        Problem::Matrix { matrix, initial } => Ok((matrix, initial.as_ref())),
        Problem::Model { .. } => Err(InputError(
            "this command expects a matrix problem; use `model` for sequence operators".into(),
        )),
    }
}

fn require_initial(initial: Option<&Vec<Complex64>>) -> Result<&Vec<Complex64>, InputError> {
    initial.ok_or_else(|| InputError("this command requires an \"initial\" state".into()))
}

fn decomposition_value(d: &SpectralDecomposition<f64>, a: &Matrix64) -> Value {
    let residuals = verify_resolution(d);
    let reconstruction = d.reconstruct().sub(a).max_norm();
    json!({
        "dim": d.dim,
        "similarity_condition": float_value(d.similarity_condition),
        "ill_conditioned": d.ill_conditioned,
        "items": d.items.iter().map(|item| json!({
            "lambda": complex_value(item.lambda),
            "alg_mult": item.alg_mult,
            "geo_mult": item.geo_mult,
            "index": item.index,
            "projector": serde_json::to_value(&item.projector).expect("matrix JSON"),
            "nilpotent": serde_json::to_value(&item.nilpotent).expect("matrix JSON"),
        })).collect::<Vec<_>>(),
        "residuals": {
            "sum_identity": float_value(residuals.sum_identity),
            "projector_products": float_value(residuals.projector_products),
            "nilpotent_products": float_value(residuals.nilpotent_products),
            "commutation": float_value(residuals.commutation),
        },
        "reconstruction_error": float_value(reconstruction),
    })
}

fn regime_name(regime: Regime) -> &'static str {
    match regime {
        Regime::NegRe => "neg-re",
        Regime::ZeroRe => "zero-re",
        Regime::PosRe => "pos-re",
    }
}

fn classification_value(class: &TrajectoryClass<f64>) -> Value {
    json!({
        "verdict": if class.is_bounded() { "bounded" } else { "unbounded" },
        "witnesses": class.witnesses.iter().map(|w| json!({
            "lambda": complex_value(w.lambda),
            "regime": regime_name(w.regime),
            "violated": w.violated,
            "violating_term": w.violating_term.map(|(k, norm)| json!({
                "chain_power": k,
                "norm": float_value(norm),
            })).unwrap_or(Value::Null),
            "margin": float_value(w.margin),
        })).collect::<Vec<_>>(),
    })
}

fn rate_value(kind: &str, rb: &RateBound<f64>) -> Value {
    json!({
        "kind": kind,
        "constant": float_value(rb.constant),
        "satisfied": rb.satisfied,
        "max_violation": float_value(rb.max_violation),
        "worst_t": float_value(rb.worst_t),
        "identity_rel_err": float_value(rb.identity_rel_err),
        "identity_ok": rb.identity_rel_err < IDENTITY_REL_TOL,
        "sup_norm_estimate": float_value(rb.sup_norm_estimate),
    })
}

fn spectral_failure(err: &SpectralError) -> Outcome {
    failed(format!("spectral decomposition failed: {err}"))
}

pub fn run_decompose(problem: &Problem, cfg: &RunConfig) -> Result<Outcome, InputError> {
    let (matrix, _) = require_matrix(problem)?;
    let tol = match cfg.tolerances(matrix) {
        Ok(tol) => tol,
        Err(detail) => return Ok(failed(detail)),
    };
    let d = match spectral_decompose(matrix, &tol) {
        Ok(d) => d,
        Err(err) => return Ok(spectral_failure(&err)),
    };
    let mut warnings = Vec::new();
    if d.ill_conditioned {
        warnings.push(format!(
            "similarity condition {:.3e} exceeds 1e12; downstream claims may be unreliable",
            d.similarity_condition
        ));
    }
    let reducible = match reducible_invertibility(matrix, &tol) {
        Ok(r) => r,
        Err(err) => return Ok(spectral_failure(&err)),
    };
    let mut results = decomposition_value(&d, matrix);
    results["reducibly_invertible"] = json!(reducible.holds);
    results["zero_eigenvalue_index"] = json!(reducible.zero_index);
    Ok(Outcome::Ok { results, warnings })
}

pub fn run_classify(problem: &Problem, cfg: &RunConfig) -> Result<Outcome, InputError> {
    let (matrix, initial) = require_matrix(problem)?;
    let initial = require_initial(initial)?;
    let tol = match cfg.tolerances(matrix) {
        Ok(tol) => tol,
        Err(detail) => return Ok(failed(detail)),
    };
    let d = match spectral_decompose(matrix, &tol) {
        Ok(d) => d,
        Err(err) => return Ok(spectral_failure(&err)),
    };
    let class = match classify_boundedness(&d, initial, &tol) {
        Ok(c) => c,
        Err(err) => return Ok(failed(err)),
    };
    // The empirical probe samples twice as densely as the report grid
    // (32 per decade at the default density).
    let decades = cfg.t_max.log10().ceil().max(1.0) as usize;
    let samples = 2 * cfg.grid_density * decades;
    let probe = match empirical_boundedness(&d, initial, cfg.t_max, samples) {
        Ok(p) => p,
        Err(err) => return Ok(failed(err)),
    };
    let mut warnings = Vec::new();
    if d.ill_conditioned {
        warnings.push("ill-conditioned decomposition".into());
    }
    warnings.push("empirical sup-norm is a grid estimate, not a proven supremum".into());
    let mut results = classification_value(&class);
    results["empirical"] = json!({
        "sup_norm": float_value(probe.sup_norm),
        "growing": probe.growing,
    });
    Ok(Outcome::Ok { results, warnings })
}

fn unbounded_failure(class: &TrajectoryClass<f64>, detail: String) -> Outcome {
    Outcome::Failed {
        results: json!({ "classification": classification_value(class) }),
        warnings: Vec::new(),
        failure: detail,
    }
}

pub fn run_cesaro(problem: &Problem, cfg: &RunConfig) -> Result<Outcome, InputError> {
    let (matrix, initial) = require_matrix(problem)?;
    let initial = require_initial(initial)?;
    let tol = match cfg.tolerances(matrix) {
        Ok(tol) => tol,
        Err(detail) => return Ok(failed(detail)),
    };
    let grid = cfg.grid();
    let report = match cesaro_report(matrix, initial, &grid, &tol) {
        Ok(r) => r,
        Err(ErgodicError::UnboundedTrajectory { detail }) => {
            let d = match spectral_decompose(matrix, &tol) {
                Ok(d) => d,
                Err(err) => return Ok(spectral_failure(&err)),
            };
            let class =
                classify_boundedness(&d, initial, &tol).expect("dimensions already validated");
            return Ok(unbounded_failure(
                &class,
                format!("trajectory is unbounded: {detail}"),
            ));
        }
        Err(err) => return Ok(failed(err)),
    };
    let results = json!({
        "analytic_limit": state_value(&report.analytic_limit),
        "strong": report.strong,
        "grid": report.grid.iter().map(|g| json!({
            "t": float_value(g.t),
            "mean": state_value(&g.mean),
            "error_norm": float_value(g.error_norm),
        })).collect::<Vec<_>>(),
        "kernel_residuals": report.kernel_residuals.iter()
            .map(|&(t, r)| json!([float_value(t), float_value(r)]))
            .collect::<Vec<_>>(),
        "rate_bound": report.rate_bound.as_ref()
            .map(|rb| rate_value("reducible", rb))
            .unwrap_or(Value::Null),
    });
    let mut warnings =
        vec!["rate constants use a grid estimate of the trajectory supremum".to_string()];
    if report.rate_bound.is_none() {
        warnings.push("operator is not reducibly invertible; no O(1/t) rate bound applies".into());
    }
    if let Some(rb) = &report.rate_bound {
        if !rb.satisfied {
            return Ok(Outcome::Failed {
                results,
                warnings,
                failure: format!(
                    "rate bound violated by {:.3e} at t = {}",
                    rb.max_violation, rb.worst_t
                ),
            });
        }
    }
    Ok(Outcome::Ok { results, warnings })
}

pub fn run_rate(problem: &Problem, cfg: &RunConfig) -> Result<Outcome, InputError> {
    let (matrix, initial) = require_matrix(problem)?;
    let initial = require_initial(initial)?;
    let tol = match cfg.tolerances(matrix) {
        Ok(tol) => tol,
        Err(detail) => return Ok(failed(detail)),
    };
    let reducible = match reducible_invertibility(matrix, &tol) {
        Ok(r) => r,
        Err(err) => return Ok(spectral_failure(&err)),
    };
    if !reducible.holds {
        return Ok(failed(format!(
            "no O(1/t) rate available: the eigenvalue 0 has index {}",
            reducible.zero_index
        )));
    }
    let kind = if reducible.zero_index == 0 {
        "invertible"
    } else {
        "reducible"
    };
    let grid = cfg.grid();
    let rb = match verify_rate_reducible(matrix, initial, &grid, &tol) {
        Ok(rb) => rb,
        Err(ErgodicError::UnboundedTrajectory { detail }) => {
            let d = match spectral_decompose(matrix, &tol) {
                Ok(d) => d,
                Err(err) => return Ok(spectral_failure(&err)),
            };
            let class =
                classify_boundedness(&d, initial, &tol).expect("dimensions already validated");
            return Ok(unbounded_failure(
                &class,
                format!("trajectory is unbounded: {detail}"),
            ));
        }
        Err(err) => return Ok(failed(err)),
    };
    let results = rate_value(kind, &rb);
    let warnings =
        vec!["rate constant uses a grid estimate of the trajectory supremum".to_string()];
    if !rb.satisfied {
        return Ok(Outcome::Failed {
            results,
            warnings,
            failure: format!(
                "rate bound violated by {:.3e} at t = {}",
                rb.max_violation, rb.worst_t
            ),
        });
    }
    if rb.identity_rel_err >= IDENTITY_REL_TOL {
        return Ok(Outcome::Failed {
            results,
            warnings,
            failure: format!(
                "mean identity defect {:.3e} exceeds {IDENTITY_REL_TOL:.1e}",
                rb.identity_rel_err
            ),
        });
    }
    Ok(Outcome::Ok { results, warnings })
}

fn kernel_value(kernel: &KernelDescription) -> Value {
    match kernel {
        KernelDescription::Trivial => json!({"kind": "trivial"}),
        KernelDescription::EvenPositions => json!({"kind": "even-positions"}),
        KernelDescription::DiagonalAtoms {
            atom_indices,
            default_in_kernel,
        } => json!({
            "kind": "diagonal-atoms",
            "atom_indices": atom_indices,
            "default_in_kernel": default_in_kernel,
        }),
    }
}

fn fsv_value(f: &FiniteSupportVector<f64>) -> Value {
    serde_json::to_value(f).expect("finite-support vector JSON")
}

pub fn run_model(problem: &Problem, cfg: &RunConfig) -> Result<Outcome, InputError> {
    let (operator, initial) = match problem {
        Problem::Model { operator, initial } => (operator, initial),
        Problem::Matrix { .. } => {
            return Err(InputError(
                "`model` expects a sequence-operator problem with an \"operator\" field".into(),
            ))
        }
    };
    let status = operator.decomposition_status();
    let mut results = Map::new();
    results.insert(
        "status".into(),
        json!({
            "invertible_on_range": status.invertible_on_range,
            "reducibly_invertible": status.reducibly_invertible,
            "kernel": kernel_value(&status.kernel),
            "range": status.range_description,
        }),
    );
    let mut warnings = Vec::new();
    let mut failure: Option<String> = None;

    match operator {
        SequenceOperator::RightShift => {
            let shifted = operator.apply(initial);
            let roundtrip_ok = left_shift(&shifted) == *initial;
            let first_coordinate_zero = shifted.get(0) == Complex64::new(0.0, 0.0);
            results.insert(
                "exactness".into(),
                json!({
                    "left_inverse_roundtrip": roundtrip_ok,
                    "range_misses_first_coordinate": first_coordinate_zero,
                    "image": fsv_value(&shifted),
                }),
            );
            if !roundtrip_ok || !first_coordinate_zero {
                failure = Some("right-shift exactness check failed".into());
            }
        }
        SequenceOperator::ParityProjection => {
            let range_part = operator.apply(initial);
            let kernel_part = initial.sub(&range_part);
            let split_exact = range_part.add(&kernel_part) == *initial;
            let kernel_annihilated = operator.apply(&kernel_part).is_zero();
            let range_fixed = operator.apply(&range_part) == range_part;
            results.insert(
                "exactness".into(),
                json!({
                    "split_exact": split_exact,
                    "kernel_annihilated": kernel_annihilated,
                    "range_fixed": range_fixed,
                    "kernel_part": fsv_value(&kernel_part),
                    "range_part": fsv_value(&range_part),
                }),
            );
            if !(split_exact && kernel_annihilated && range_fixed) {
                failure = Some("parity-projection split check failed".into());
            }
        }
        SequenceOperator::Diagonal(op) => {
            diagonal_model_report(op, initial, cfg, &mut results, &mut warnings, &mut failure);
        }
    }

    let results = Value::Object(results);
    Ok(match failure {
        None => Outcome::Ok { results, warnings },
        Some(failure) => Outcome::Failed {
            results,
            warnings,
            failure,
        },
    })
}

fn diagonal_model_report(
    op: &DiagonalOperator<f64>,
    initial: &FiniteSupportVector<f64>,
    cfg: &RunConfig,
    results: &mut Map<String, Value>,
    warnings: &mut Vec<String>,
    failure: &mut Option<String>,
) {
    let generation = semigroup_generation_check(op);
    results.insert(
        "generation".into(),
        json!({
            "generates": generation.generates,
            "omega": generation.omega.map(float_value).unwrap_or(Value::Null),
            "bounded_semigroup": generation.bounded_semigroup,
        }),
    );
    let class = classify_scalar_bounded(op, initial);
    results.insert(
        "boundedness".into(),
        json!({
            "bounded": class.bounded,
            "violating_indices": class.violating_indices,
        }),
    );
    if !class.bounded {
        warnings.push(
            "initial state has mass on atoms with positive real part; Cesàro analysis skipped"
                .into(),
        );
        results.insert("cesaro_limit".into(), Value::Null);
        results.insert("negative_part_decay".into(), Value::Null);
        results.insert("cross_model".into(), Value::Null);
        return;
    }

    let limit = cesaro_limit_scalar(op, initial).expect("bounded input");
    results.insert(
        "cesaro_limit".into(),
        json!({
            "limit": fsv_value(&limit.limit),
            "strong": limit.strong,
        }),
    );

    let grid = cfg.grid();
    let decay = negative_part_decay(op, initial, &grid, DECAY_EPSILON);
    results.insert(
        "negative_part_decay".into(),
        json!({
            "samples": decay.samples.iter()
                .map(|&(t, n)| json!([float_value(t), float_value(n)]))
                .collect::<Vec<_>>(),
            "crossing_time": float_value(decay.crossing_time),
            "crossed_by_t_star": decay.crossed_by_t_star,
            "monotone": decay.monotone,
            "below_tol_at_end": decay.below_tol_at_end,
            "epsilon": float_value(DECAY_EPSILON),
            "measure_bound": float_value(ergolib::models::SPECTRAL_MEASURE_BOUND),
        }),
    );
    if !(decay.crossed_by_t_star && decay.monotone && decay.below_tol_at_end) {
        *failure = Some("negative-part decay verification failed".into());
    }

    match cross_model_consistency(op, initial, cfg) {
        Ok((value, ok)) => {
            results.insert("cross_model".into(), value);
            if !ok && failure.is_none() {
                *failure = Some("cross-model consistency with the matrix pipeline failed".into());
            }
        }
        Err(reason) => {
            warnings.push(reason);
            results.insert("cross_model".into(), Value::Null);
        }
    }
}

/// Runs the truncated diagonal through the dense pipeline and compares:
/// limits must agree exactly, grid means to 1e-10.
fn cross_model_consistency(
    op: &DiagonalOperator<f64>,
    initial: &FiniteSupportVector<f64>,
    cfg: &RunConfig,
) -> Result<(Value, bool), String> {
    let Some((matrix, support, dense)) = truncate_to_matrix(op, initial) else {
        return Err("empty initial support; cross-model check skipped".into());
    };
    let tol = cfg
        .tolerances(&matrix)
        .map_err(|e| format!("cross-model tolerances failed: {e}"))?;
    let d = spectral_decompose(&matrix, &tol)
        .map_err(|e| format!("cross-model decomposition failed: {e}"))?;
    let matrix_limit =
        cesaro_limit(&d, &dense, &tol).map_err(|e| format!("cross-model limit failed: {e}"))?;
    let scalar_limit = cesaro_limit_scalar(op, initial).expect("bounded input");

    let mut limit_dev: f64 = 0.0;
    for (k, &n) in support.iter().enumerate() {
        limit_dev = limit_dev.max((matrix_limit.limit[k] - scalar_limit.limit.get(n)).norm());
    }
    let limits_exact = limit_dev == 0.0;

    let mut grid_dev: f64 = 0.0;
    for &t in &[1.0, 10.0, 100.0, cfg.t_max] {
        let dense_mean = cesaro_mean_analytic(&d, &dense, t)
            .map_err(|e| format!("cross-model mean failed: {e}"))?;
        for (k, &n) in support.iter().enumerate() {
            let lambda = op.lambda_of(n);
            let v = initial.get(n);
            let scalar_mean = if lambda == Complex64::new(0.0, 0.0) {
                v
            } else {
                let tz = lambda * Complex64::new(t, 0.0);
                v * (tz.exp() - Complex64::new(1.0, 0.0)) / tz
            };
            grid_dev = grid_dev.max((dense_mean[k] - scalar_mean).norm());
        }
    }
    let grids_ok = grid_dev < CROSS_MODEL_GRID_TOL;

    // The trajectory itself must match as well.
    let mut trajectory_dev: f64 = 0.0;
    for &t in &[0.5, 2.0, 20.0] {
        let via_matrix = ergolib::evolution::exp_action(&d, &dense, t)
            .map_err(|e| format!("cross-model trajectory failed: {e}"))?;
        let via_model = weak_solution_general(op, initial, t);
        for (k, &n) in support.iter().enumerate() {
            trajectory_dev = trajectory_dev.max((via_matrix.vector[k] - via_model.get(n)).norm());
        }
    }
    let trajectories_ok = trajectory_dev < CROSS_MODEL_GRID_TOL;

    let ok = limits_exact && grids_ok && trajectories_ok;
    Ok((
        json!({
            "limit_deviation": float_value(limit_dev),
            "limits_exact": limits_exact,
            "grid_deviation": float_value(grid_dev),
            "grids_ok": grids_ok,
            "trajectory_deviation": float_value(trajectory_dev),
            "trajectories_ok": trajectories_ok,
            "ok": ok,
        }),
        ok,
    ))
}

pub fn run_report(problem: &Problem, cfg: &RunConfig) -> Result<Outcome, InputError> {
    let (matrix, initial) = require_matrix(problem)?;
    let initial = require_initial(initial)?;
    let tol = match cfg.tolerances(matrix) {
        Ok(tol) => tol,
        Err(detail) => return Ok(failed(detail)),
    };
    let d = match spectral_decompose(matrix, &tol) {
        Ok(d) => d,
        Err(err) => return Ok(spectral_failure(&err)),
    };
    let class = match classify_boundedness(&d, initial, &tol) {
        Ok(c) => c,
        Err(err) => return Ok(failed(err)),
    };

    let mut results = Map::new();
    results.insert("decomposition".into(), decomposition_value(&d, matrix));
    results.insert("classification".into(), classification_value(&class));
    let mut warnings = Vec::new();
    if d.ill_conditioned {
        warnings.push("ill-conditioned decomposition".into());
    }
    let mut failure: Option<String> = None;

    if class.is_bounded() {
        let grid = cfg.grid();
        match cesaro_report(matrix, initial, &grid, &tol) {
            Ok(report) => {
                results.insert(
                    "cesaro".into(),
                    json!({
                        "analytic_limit": state_value(&report.analytic_limit),
                        "strong": report.strong,
                        "grid": report.grid.iter().map(|g| json!({
                            "t": float_value(g.t),
                            "mean": state_value(&g.mean),
                            "error_norm": float_value(g.error_norm),
                        })).collect::<Vec<_>>(),
                        "kernel_residuals": report.kernel_residuals.iter()
                            .map(|&(t, r)| json!([float_value(t), float_value(r)]))
                            .collect::<Vec<_>>(),
                    }),
                );
                match &report.rate_bound {
                    Some(rb) => {
                        results.insert("rate".into(), rate_value("reducible", rb));
                        if !rb.satisfied {
                            failure = Some(format!(
                                "rate bound violated by {:.3e} at t = {}",
                                rb.max_violation, rb.worst_t
                            ));
                        }
                    }
                    None => {
                        results.insert("rate".into(), Value::Null);
                        warnings.push(
                            "operator is not reducibly invertible; no rate bound applies".into(),
                        );
                    }
                }
            }
            Err(err) => return Ok(failed(err)),
        }

        let decades = cfg.t_max.log10().ceil().max(1.0) as usize;
        let t_seq: Vec<f64> = (0..=decades as i32).map(|n| 10f64.powi(n)).collect();
        match kernel_limit_check(matrix, initial, &t_seq, &tol) {
            Ok(report) => {
                results.insert(
                    "kernel_limit".into(),
                    json!({
                        "samples": report.samples.iter()
                            .map(|&(t, r)| json!([float_value(t), float_value(r)]))
                            .collect::<Vec<_>>(),
                        "bound_satisfied": report.bound_satisfied,
                        "accumulation": report.accumulation.as_ref().map(|acc| json!({
                            "at_t": float_value(acc.at_t),
                            "vector": state_value(&acc.vector),
                            "kernel_residual": float_value(acc.kernel_residual),
                            "in_kernel": acc.in_kernel,
                        })).unwrap_or(Value::Null),
                    }),
                );
                if !report.bound_satisfied && failure.is_none() {
                    failure = Some("kernel-limit bound ‖A·mean(t)‖ ≤ 2·sup/t violated".into());
                }
            }
            Err(err) => return Ok(failed(err)),
        }
    } else {
        warnings
            .push("trajectory is unbounded; Cesàro, rate and kernel-limit sections skipped".into());
        results.insert("cesaro".into(), Value::Null);
        results.insert("rate".into(), Value::Null);
        results.insert("kernel_limit".into(), Value::Null);
    }

    let results = Value::Object(results);
    Ok(match failure {
        None => Outcome::Ok { results, warnings },
        Some(failure) => Outcome::Failed {
            results,
            warnings,
            failure,
        },
    })
}
