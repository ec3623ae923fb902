//! Named builtin fixtures, each resolvable to a full input document.

use serde_json::{json, Value};

pub const BUILTIN_NAMES: [&str; 6] = [
    "intro-imaginary-unit",
    "right-shift",
    "parity-projection",
    "jordan-zero-index2",
    "diag-mixed-spectrum",
    "selfadjoint-nonpositive",
];

/// Input JSON for a builtin fixture name.
pub fn builtin_input(name: &str) -> Option<Value> {
    let doc = match name {
        // 1x1 multiplication by the imaginary unit: all solutions e^{it} f.
        "intro-imaginary-unit" => json!({
            "matrix": {"rows": 1, "cols": 1, "entries": [[0.0, 1.0]]},
            "initial": [[1.0, 0.0]],
        }),
        // Nilpotent 2x2 Jordan block with an initial state on top of the
        // chain: y(t) = (t, 1) grows.
        "jordan-zero-index2" => json!({
            "matrix": {"rows": 2, "cols": 2, "entries": [[0.0,0.0],[1.0,0.0],[0.0,0.0],[0.0,0.0]]},
            "initial": [[0.0, 0.0], [1.0, 0.0]],
        }),
        // Right shift on square-summable sequences, applied to e_1.
        "right-shift" => json!({
            "operator": {"kind": "right-shift"},
            "initial": {"entries": [[0, 1.0, 0.0]]},
        }),
        // Parity projection keeping odd positions, on (1,1,1,1).
        "parity-projection" => json!({
            "operator": {"kind": "parity-projection"},
            "initial": {"entries": [[0,1.0,0.0],[1,1.0,0.0],[2,1.0,0.0],[3,1.0,0.0]]},
        }),
        // Diagonal model with kernel, rotation and decay atoms.
        "diag-mixed-spectrum" => json!({
            "operator": {
                "kind": "diagonal",
                "atoms": [[0, 0.0, 0.0], [1, 0.0, 1.0], [2, -1.0, 0.0]],
                "default": [-1.0, 0.0],
            },
            "initial": {"entries": [[0,1.0,0.0],[1,1.0,0.0],[2,1.0,0.0]]},
        }),
        // All eigenvalues real and nonpositive: the self-adjoint case, where
        // the trajectory itself converges.
        "selfadjoint-nonpositive" => json!({
            "operator": {
                "kind": "diagonal",
                "atoms": [[0, 0.0, 0.0], [1, -0.5, 0.0], [2, -1.0, 0.0], [3, -2.0, 0.0]],
                "default": [-1.0, 0.0],
            },
            "initial": {"entries": [[0,1.0,0.0],[1,1.0,0.0],[2,1.0,0.0],[3,1.0,0.0]]},
        }),
        _ => return None,
    };
    Some(doc)
}
