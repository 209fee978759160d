use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which variable a non-constant coefficient family depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Argument {
    #[default]
    #[serde(rename = "t")]
    Time,
    #[serde(rename = "r")]
    Radius,
}

/// Declarative time- or radius-dependent coefficient.
///
/// The families are restricted so that the hypothesis bounds of the model
/// are computable in closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientFn {
    Constant {
        value: f64,
    },
    Sinusoidal {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        argument: Argument,
    },
    PiecewiseConstantTable {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        #[serde(default)]
        argument: Argument,
    },
}

impl CoefficientFn {
    pub fn constant(value: f64) -> Self {
        CoefficientFn::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientFn::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::Spec("constant coefficient must be finite".into()));
                }
            }
            CoefficientFn::Sinusoidal { offset, amplitude, frequency, phase, .. } => {
                for v in [offset, amplitude, frequency, phase] {
                    if !v.is_finite() {
                        return Err(Error::Spec("sinusoidal parameters must be finite".into()));
                    }
                }
            }
            CoefficientFn::PiecewiseConstantTable { breakpoints, values, .. } => {
                if values.is_empty() || values.len() != breakpoints.len() + 1 {
                    return Err(Error::Spec(
                        "piecewise table needs values.len() == breakpoints.len() + 1".into(),
                    ));
                }
                if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Spec("breakpoints must be strictly increasing".into()));
                }
                if !values.iter().chain(breakpoints).all(|v| v.is_finite()) {
                    return Err(Error::Spec("piecewise table entries must be finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, r: f64, t: f64) -> f64 {
        match self {
            CoefficientFn::Constant { value } => *value,
            CoefficientFn::Sinusoidal { offset, amplitude, frequency, phase, argument } => {
                let x = match argument {
                    Argument::Time => t,
                    Argument::Radius => r,
                };
                offset + amplitude * (frequency * x + phase).sin()
            }
            CoefficientFn::PiecewiseConstantTable { breakpoints, values, argument } => {
                let x = match argument {
                    Argument::Time => t,
                    Argument::Radius => r,
                };
                let idx = breakpoints.partition_point(|&b| b <= x);
                values[idx]
            }
        }
    }

    /// Closed-form bounds over the whole argument range (exact for constants
    /// and tables, the envelope `offset +- |amplitude|` for sinusoids).
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            CoefficientFn::Constant { value } => (*value, *value),
            CoefficientFn::Sinusoidal { offset, amplitude, .. } => {
                (offset - amplitude.abs(), offset + amplitude.abs())
            }
            CoefficientFn::PiecewiseConstantTable { values, .. } => {
                let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        }
    }

    pub fn depends_on_radius(&self) -> bool {
        matches!(
            self,
            CoefficientFn::Sinusoidal { argument: Argument::Radius, .. }
                | CoefficientFn::PiecewiseConstantTable { argument: Argument::Radius, .. }
        )
    }

    pub fn depends_on_time(&self) -> bool {
        matches!(
            self,
            CoefficientFn::Sinusoidal { argument: Argument::Time, .. }
                | CoefficientFn::PiecewiseConstantTable { argument: Argument::Time, .. }
        )
    }
}

/// Single-component reaction term descriptor `f(t, r, u)` with `f(t, r, 0) = 0`
/// for the logistic and cubic families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarReaction {
    Zero,
    /// `a(t) u - b(t) u^2`
    Logistic { a: CoefficientFn, b: CoefficientFn },
    /// `linear * u + cubic * u^3`
    CubicPolynomial { linear: f64, cubic: f64 },
}

impl ScalarReaction {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarReaction::Zero => Ok(()),
            ScalarReaction::Logistic { a, b } => {
                a.validate()?;
                b.validate()
            }
            ScalarReaction::CubicPolynomial { linear, cubic } => {
                if linear.is_finite() && cubic.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Spec("cubic polynomial parameters must be finite".into()))
                }
            }
        }
    }

    pub fn eval(&self, r: f64, t: f64, u: f64) -> f64 {
        match self {
            ScalarReaction::Zero => 0.0,
            ScalarReaction::Logistic { a, b } => a.eval(r, t) * u - b.eval(r, t) * u * u,
            ScalarReaction::CubicPolynomial { linear, cubic } => linear * u + cubic * u * u * u,
        }
    }

    pub fn depends_on_radius(&self) -> bool {
        match self {
            ScalarReaction::Zero | ScalarReaction::CubicPolynomial { .. } => false,
            ScalarReaction::Logistic { a, b } => a.depends_on_radius() || b.depends_on_radius(),
        }
    }
}
