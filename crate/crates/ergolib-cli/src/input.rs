//! Input documents: a matrix problem (`{"matrix": ..., "initial": ...}`) or a
//! sequence-operator problem (`{"operator": ..., "initial": ...}`).

use serde_json::Value;

use ergolib::models::{FiniteSupportVector, SequenceOperator};
use ergolib::{Complex64, Matrix64};

pub enum Problem {
    Matrix {
        matrix: Matrix64,
        initial: Option<Vec<Complex64>>,
    },
    Model {
        operator: SequenceOperator<f64>,
        initial: FiniteSupportVector<f64>,
    },
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Matrix { .. } => "matrix",
            Problem::Model { .. } => "model",
        }
    }
}

pub fn parse_problem(doc: &Value) -> Result<Problem, String> {
    let object = doc
        .as_object()
        .ok_or_else(|| "input document must be a JSON object".to_string())?;
    if let Some(matrix) = object.get("matrix") {
        let matrix: Matrix64 = serde_json::from_value(matrix.clone())
            .map_err(|e| format!("invalid \"matrix\": {e}"))?;
        if !matrix.is_square() {
            return Err(format!(
                "operator matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            ));
        }
        let initial = match object.get("initial") {
            None | Some(Value::Null) => None,
            Some(v) => Some(parse_state(v)?),
        };
        if let Some(state) = &initial {
            if state.len() != matrix.rows() {
                return Err(format!(
                    "initial state has dimension {}, matrix is {}x{}",
                    state.len(),
                    matrix.rows(),
                    matrix.cols()
                ));
            }
        }
        Ok(Problem::Matrix { matrix, initial })
    } else if let Some(operator) = object.get("operator") {
        let operator: SequenceOperator<f64> = serde_json::from_value(operator.clone())
            .map_err(|e| format!("invalid \"operator\": {e}"))?;
        let initial = match object.get("initial") {
            None | Some(Value::Null) => FiniteSupportVector::new(),
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| format!("invalid \"initial\": {e}"))?,
        };
        Ok(Problem::Model { operator, initial })
    } else {
        Err("input document needs a \"matrix\" or an \"operator\" field".to_string())
    }
}

/// Dense state encoded as `[[re, im], ...]`.
fn parse_state(value: &Value) -> Result<Vec<Complex64>, String> {
    let pairs: Vec<[f64; 2]> =
        serde_json::from_value(value.clone()).map_err(|e| format!("invalid \"initial\": {e}"))?;
    let state: Vec<Complex64> = pairs
        .into_iter()
        .map(|[re, im]| Complex64::new(re, im))
        .collect();
    if state.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err("initial state contains a non-finite entry".to_string());
    }
    Ok(state)
}
