//! Scenario configuration schema and the bundled scenario gallery.

use serde::{Deserialize, Serialize};
use serde_json::json;

use simlab_core::model::SystemDoc;

/// A complete experiment description: system, grid, initial data, time
/// stepping, diagnostics and the assertions the run must satisfy.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub system: SystemDoc,
    pub grid: GridDoc,
    pub initial: InitialDoc,
    pub time: TimeDoc,
    #[serde(default)]
    pub diagnostics: Diagnostics,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub checks: Checks,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub n_r: usize,
    pub n_theta: usize,
}

/// Initial data: a direction index on the half-angle lattice plus one
/// profile per component. The second profile may be omitted for scalar
/// systems (the inert component starts at zero).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDoc {
    #[serde(default)]
    pub direction_index: usize,
    pub u1: InitialFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2: Option<InitialFamily>,
}

/// Built-in initial-profile families. Tilts and bumps are oriented along
/// the scenario's direction index.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialFamily {
    /// `base + amplitude * exp(-((r - r_mid) / w)^2)` with `w` a quarter of
    /// the radial extent; purely radial.
    RadialBump { base: f64, amplitude: f64 },
    /// `base + tilt * (x . e)` = `base + tilt * r cos(theta - angle(e))`
    TiltedAffine { base: f64, tilt: f64 },
    /// `base + amplitude * r cos(2 (theta - angle(e)))`
    TwoBump { base: f64, amplitude: f64 },
    /// Field CSV file (header `r,theta,value`) matching the scenario grid.
    Csv { path: String },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeDoc {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Diagnostics {
    pub direction_set: bool,
    pub fs_axes: bool,
    pub quotient: bool,
    pub omega: bool,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Diagnostics { direction_set: true, fs_axes: true, quotient: true, omega: true }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// relative sign tolerance of the direction set
    pub sign_tol_rel: f64,
    /// finite-horizon Cauchy gap bound declaring the tail converged
    pub omega_tol: f64,
    /// axis agreement tolerance, degrees
    pub axis_tol_degrees: f64,
    /// relative angular-noise floor of the robust axis estimator
    pub axis_floor_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sign_tol_rel: 1e-8,
            omega_tol: 1e-4,
            axis_tol_degrees: 5.0,
            // axes of fully converged (radially constant) tails must be read
            // off the last snapshot whose angular signal beats roundoff
            axis_floor_rel: 1e-6,
        }
    }
}

/// Which assertions gate the exit status.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    /// failing hypothesis validation aborts the run (exit 3)
    pub require_hypotheses: bool,
    /// direction that must enter the direction set at the first snapshot and
    /// persist monotonically
    pub persistence_direction: Option<usize>,
    /// required relation between the two component axes
    pub axis_relation: Option<AxisRelation>,
    /// bound on the final fs_score of each component
    pub fs_score_max: Option<f64>,
    /// bound on the Harnack-quotient diagnostic over all sampled tau
    pub quotient_max: Option<f64>,
    /// bound on angle(axis1, mask arc midpoint) in units of dtheta
    pub axis_vs_mask_max_dtheta: Option<f64>,
    /// require cauchy_gap <= omega_tol at the end of the run
    pub require_omega_convergence: bool,
    /// number of tail snapshots in the Cauchy gap
    pub tail_window: usize,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            require_hypotheses: true,
            persistence_direction: None,
            axis_relation: None,
            fs_score_max: None,
            quotient_max: None,
            axis_vs_mask_max_dtheta: None,
            require_omega_convergence: false,
            tail_window: 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisRelation {
    /// axes of the two components point opposite ways (competitive systems)
    Antipodal,
    /// axes of the two components agree (cooperative systems)
    Aligned,
}

pub const BUILTIN_NAMES: [&str; 5] =
    ["LV-A", "SCALAR-SIGN-CHANGING", "COOP-A", "CUBIC-A", "PREDPREY-X"];

/// The bundled scenario gallery, one entry per verified theorem family.
pub fn builtin(name: &str) -> Option<Scenario> {
    let c = |v: f64| json!({"family": "constant", "value": v});
    let logistic = |a: f64, b: f64| {
        json!({"family": "logistic", "a": c(a), "b": c(b)})
    };
    let doc = match name {
        "LV-A" => json!({
            "name": "LV-A",
            "system": {
                "kind": "lotka_volterra",
                "domain": {"a1": 0.5, "a2": 1.0},
                "coefficients": {
                    "mu1": c(1.0), "mu2": c(1.0),
                    "a1": c(1.0), "a2": c(1.0),
                    "b1": c(1.0), "b2": c(1.0),
                    "alpha1": c(0.8), "alpha2": c(0.8)
                }
            },
            "grid": {"n_r": 48, "n_theta": 128},
            "initial": {
                "direction_index": 0,
                "u1": {"family": "tilted_affine", "base": 1.0, "tilt": 0.3},
                "u2": {"family": "tilted_affine", "base": 1.0, "tilt": -0.3}
            },
            "time": {"dt": 0.002, "t_end": 60.0, "snapshot_every": 2.5},
            "checks": {
                "require_hypotheses": true,
                "persistence_direction": 0,
                "axis_relation": "antipodal",
                "fs_score_max": 1e-3,
                "quotient_max": 10.0,
                "axis_vs_mask_max_dtheta": 2.0,
                "require_omega_convergence": true
            }
        }),
        "SCALAR-SIGN-CHANGING" => json!({
            "name": "SCALAR-SIGN-CHANGING",
            "system": {
                "kind": "scalar",
                "domain": {"a1": 0.0, "a2": 1.0},
                "coefficients": {
                    "mu1": c(1.0), "mu2": c(1.0),
                    "f1": {"family": "cubic_polynomial", "linear": 1.0, "cubic": -1.0}
                }
            },
            "grid": {"n_r": 48, "n_theta": 128},
            "initial": {
                "direction_index": 0,
                "u1": {"family": "tilted_affine", "base": 0.1, "tilt": 0.3}
            },
            "time": {"dt": 0.002, "t_end": 40.0, "snapshot_every": 2.5},
            "diagnostics": {
                "direction_set": true, "fs_axes": true,
                "quotient": false, "omega": true
            },
            "checks": {
                "require_hypotheses": true,
                "fs_score_max": 1e-3,
                "require_omega_convergence": true
            }
        }),
        "COOP-A" => json!({
            "name": "COOP-A",
            "system": {
                "kind": "cooperative_general",
                "domain": {"a1": 0.5, "a2": 1.0},
                "coefficients": {
                    "mu1": c(1.0), "mu2": c(1.0),
                    "f1": logistic(1.0, 1.0), "f2": logistic(1.0, 1.0),
                    "alpha1": c(0.3), "alpha2": c(0.3)
                }
            },
            "grid": {"n_r": 48, "n_theta": 128},
            "initial": {
                "direction_index": 0,
                "u1": {"family": "tilted_affine", "base": 1.0, "tilt": 0.3},
                "u2": {"family": "tilted_affine", "base": 1.0, "tilt": 0.3}
            },
            "time": {"dt": 0.002, "t_end": 30.0, "snapshot_every": 2.5},
            "checks": {
                "require_hypotheses": true,
                "axis_relation": "aligned",
                "require_omega_convergence": true
            }
        }),
        "CUBIC-A" => json!({
            "name": "CUBIC-A",
            "system": {
                "kind": "cubic",
                "domain": {"a1": 0.5, "a2": 1.0},
                "coefficients": {
                    "mu1": c(1.0), "mu2": c(1.0),
                    "lambda1": c(1.0), "lambda2": c(1.0),
                    "gamma1": c(-1.0), "gamma2": c(-1.0),
                    "alpha1": c(0.5), "alpha2": c(0.5)
                }
            },
            "grid": {"n_r": 48, "n_theta": 128},
            "initial": {
                "direction_index": 0,
                "u1": {"family": "tilted_affine", "base": 1.0, "tilt": 0.3},
                "u2": {"family": "tilted_affine", "base": 1.0, "tilt": -0.3}
            },
            "time": {"dt": 0.002, "t_end": 40.0, "snapshot_every": 2.5},
            "checks": {
                "require_hypotheses": true,
                "axis_relation": "antipodal",
                "require_omega_convergence": true
            }
        }),
        "PREDPREY-X" => json!({
            "name": "PREDPREY-X",
            "system": {
                "kind": "predator_prey_exploratory",
                "domain": {"a1": 0.5, "a2": 1.0},
                "coefficients": {
                    "mu1": c(1.0), "mu2": c(1.0),
                    "f1": logistic(-0.5, 0.0), "f2": logistic(1.0, 1.0),
                    "alpha1": c(0.5), "alpha2": c(0.5)
                }
            },
            "grid": {"n_r": 48, "n_theta": 128},
            "initial": {
                "direction_index": 0,
                "u1": {"family": "tilted_affine", "base": 0.5, "tilt": 0.2},
                "u2": {"family": "tilted_affine", "base": 1.0, "tilt": -0.2}
            },
            "time": {"dt": 0.002, "t_end": 30.0, "snapshot_every": 2.5},
            "diagnostics": {
                "direction_set": true, "fs_axes": true,
                "quotient": false, "omega": true
            },
            "checks": {"require_hypotheses": false}
        }),
        _ => return None,
    };
    Some(serde_json::from_value(doc).expect("builtin scenarios are schema-valid"))
}
