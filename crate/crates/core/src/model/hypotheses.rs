use serde::Serialize;

use super::SystemSpec;
use crate::domain::{node_on_positive_side, Direction, Field};
use crate::Result;

/// Outcome of the numerical hypothesis checks, with witness values.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    /// Sampled Lipschitz bound of the reaction on the value box.
    pub h1_lipschitz_bound: f64,
    /// Diffusion bounds `(mu_*, mu^*)`.
    pub h2_mu_bounds: (f64, f64),
    /// Coupling bounds `(alpha_*, alpha^*)`, absent for the scalar kind.
    pub h3_alpha_bounds: Option<(f64, f64)>,
    /// Direction used for the reflection inequality.
    pub h0_direction_half_index: usize,
    /// The reflection inequalities hold on `B(e)` (sign convention per kind).
    pub h0_inequality_ok: [bool; 2],
    /// The inequality is strict somewhere on `B(e)`.
    pub h0_strict: [bool; 2],
    /// `u_{0,i}` is not identical to its reflection.
    pub h0_nonidentical: [bool; 2],
    pub h0_ok: bool,
    /// Initial data nonnegative (required for the systems, not for scalar).
    pub u0_nonnegative: bool,
    /// Scalar-kind reflection hypothesis, mirrors `h0_ok` for scalar runs.
    pub h4_scalar_ok: Option<bool>,
    pub mu_positive: bool,
    pub alpha_positive: Option<bool>,
    /// All kind-relevant checks passed.
    pub pass: bool,
}

/// Numerically check the standing hypotheses on the grid.
///
/// For competitive-sign systems the reflection condition is
/// `u_{0,1} >= u_{0,1} o sigma_e` and `u_{0,2} <= u_{0,2} o sigma_e` on
/// `B(e)`; cooperative systems require both components tilted the same way;
/// the scalar kind checks only the first component. The second field is
/// ignored for scalar systems.
pub fn validate_hypotheses(
    spec: &SystemSpec,
    u01: &Field,
    u02: &Field,
    e: Direction,
) -> Result<HypothesisReport> {
    let grid = *u01.grid();
    e.check_grid(&grid)?;
    if u02.grid() != &grid {
        return Err(crate::Error::Domain("initial components live on different grids".into()));
    }
    let n = grid.n_theta();

    let sup = u01.sup_norm().max(u02.sup_norm());
    let tol = 1e-14 * (1.0 + sup);

    // Reflection inequality per component, with the kind's sign convention:
    // +1 means u0 >= u0 o sigma_e on B(e), -1 the reverse.
    let signs: [f64; 2] = if spec.kind().is_cooperative() { [1.0, 1.0] } else { [1.0, -1.0] };
    let fields = [u01, u02];
    let mut ineq_ok = [true, true];
    let mut strict = [false, false];
    let mut nonidentical = [false, false];
    let components = if spec.kind().is_scalar() { 1 } else { 2 };
    for i in 0..components {
        let u = fields[i];
        for j in 0..grid.n_r() {
            for m in 0..n {
                let d = u.values()[[j, m]] - u.values()[[j, e.reflect_node(m)]];
                if d.abs() > tol {
                    nonidentical[i] = true;
                }
                if node_on_positive_side(n, e.half_index(), m) {
                    let signed = signs[i] * d;
                    if signed < -tol {
                        ineq_ok[i] = false;
                    }
                    if signed > tol {
                        strict[i] = true;
                    }
                }
            }
        }
    }
    if spec.kind().is_scalar() {
        ineq_ok[1] = true;
        strict[1] = true;
        nonidentical[1] = true;
    }
    let h0_ok = ineq_ok[0] && ineq_ok[1] && nonidentical[0] && nonidentical[1];

    let u0_nonnegative = if spec.kind().is_scalar() {
        true
    } else {
        u01.min_value() >= -tol && u02.min_value() >= -tol
    };

    let u_max = 2.0 * sup;
    let h1_lipschitz_bound = spec.lipschitz_bound(u_max);
    let h2_mu_bounds = spec.mu_bounds();
    let h3_alpha_bounds = spec.alpha_bounds();
    let mu_positive = h2_mu_bounds.0 > 0.0;
    let alpha_positive = h3_alpha_bounds.map(|(lo, _)| lo > 0.0);
    let h4_scalar_ok = spec.kind().is_scalar().then_some(h0_ok);

    let pass = mu_positive
        && alpha_positive.unwrap_or(true)
        && h0_ok
        && u0_nonnegative
        && h1_lipschitz_bound.is_finite();

    Ok(HypothesisReport {
        h1_lipschitz_bound,
        h2_mu_bounds,
        h3_alpha_bounds,
        h0_direction_half_index: e.half_index(),
        h0_inequality_ok: ineq_ok,
        h0_strict: strict,
        h0_nonidentical: nonidentical,
        h0_ok,
        u0_nonnegative,
        h4_scalar_ok,
        mu_positive,
        alpha_positive,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{PolarGrid, RadialDomain};
    use crate::model::lotka_volterra_constant;

    fn setup() -> (SystemSpec, PolarGrid) {
        let d = RadialDomain::annulus(0.5, 1.0).unwrap();
        let spec =
            lotka_volterra_constant(d, [1.0, 1.0], [1.0, 1.0], [1.0, 1.0], [0.8, 0.8]).unwrap();
        let grid = PolarGrid::new(d, 8, 16).unwrap();
        (spec, grid)
    }

    #[test]
    fn tilted_data_passes_strictly() {
        let (spec, grid) = setup();
        let e = Direction::new(&grid, 0);
        let u1 = Field::from_fn(grid, 0.0, |r, th| 1.0 + 0.3 * r * th.cos()).unwrap();
        let u2 = Field::from_fn(grid, 0.0, |r, th| 1.0 - 0.3 * r * th.cos()).unwrap();
        let rep = validate_hypotheses(&spec, &u1, &u2, e).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.h0_strict[0] && rep.h0_strict[1]);
        assert_eq!(rep.h2_mu_bounds, (1.0, 1.0));
        assert_eq!(rep.h3_alpha_bounds, Some((0.8, 0.8)));
    }

    #[test]
    fn radial_data_fails_nonidentity() {
        let (spec, grid) = setup();
        let e = Direction::new(&grid, 0);
        let u = Field::from_fn(grid, 0.0, |r, _| 1.0 + r).unwrap();
        let rep = validate_hypotheses(&spec, &u, &u, e).unwrap();
        assert!(!rep.pass);
        assert!(!rep.h0_nonidentical[0]);
    }

    #[test]
    fn zero_coupling_fails_h3() {
        let d = RadialDomain::annulus(0.5, 1.0).unwrap();
        let spec =
            lotka_volterra_constant(d, [1.0, 1.0], [1.0, 1.0], [1.0, 1.0], [0.0, 0.0]).unwrap();
        let grid = PolarGrid::new(d, 4, 8).unwrap();
        let e = Direction::new(&grid, 0);
        let u1 = Field::from_fn(grid, 0.0, |r, th| 1.0 + 0.3 * r * th.cos()).unwrap();
        let u2 = Field::from_fn(grid, 0.0, |r, th| 1.0 - 0.3 * r * th.cos()).unwrap();
        let rep = validate_hypotheses(&spec, &u1, &u2, e).unwrap();
        assert_eq!(rep.alpha_positive, Some(false));
        assert!(!rep.pass);
    }

    #[test]
    fn wrong_tilt_direction_fails_inequality() {
        let (spec, grid) = setup();
        let e = Direction::new(&grid, 0);
        // Both components tilted the same way violates the competitive
        // convention for component 2.
        let u1 = Field::from_fn(grid, 0.0, |r, th| 1.0 + 0.3 * r * th.cos()).unwrap();
        let rep = validate_hypotheses(&spec, &u1, &u1, e).unwrap();
        assert!(rep.h0_inequality_ok[0]);
        assert!(!rep.h0_inequality_ok[1]);
        assert!(!rep.pass);
    }
}
