use super::{sl_eigen_with_multiplier, SLProblem};
use crate::domain::{Field, PolarGrid, RadialDomain};
use crate::solver::{laplacian_polar, StatePair};
use crate::{Error, Result};

/// First-order bifurcating-branch predictor at angular mode `k` on the thin
/// annulus `(1 - eps, 1)`:
/// `u_1 = lambda* + t_amp psi`, `u_2 = lambda* - t_amp psi` with
/// `psi = phi_1(r) cos(k theta)`, `sup |phi_1| = 1`.
///
/// The radial eigenproblem is solved with the grid-matched angular
/// multiplier, so `psi` is an exact eigenfunction of the discrete polar
/// Laplacian and the elliptic residual of the predictor is `-t_amp^2 psi^2`
/// up to roundoff.
pub fn build_branch_state(
    k: u32,
    eps: f64,
    t_amp: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<(StatePair, f64)> {
    if k == 0 {
        return Err(Error::Spec("branch mode k must be >= 1".into()));
    }
    let problem = SLProblem::new(k, eps, n_r)?;
    let domain = RadialDomain::annulus(1.0 - eps, 1.0)?;
    let grid = PolarGrid::new(domain, n_r, n_theta)?;
    let dth = grid.dtheta();
    // discrete symbol of the periodic second difference at mode k
    let mult = (2.0 - 2.0 * (k as f64 * dth).cos()) / (dth * dth);
    let eig = sl_eigen_with_multiplier(&problem, mult, 1)?;
    let lambda = eig.eigenvalues[0];
    let phi = &eig.eigenfunctions[0];
    if t_amp.abs() > 0.1 * lambda {
        return Err(Error::Amplitude(format!(
            "|t_amp| = {} exceeds 0.1 lambda* = {}",
            t_amp.abs(),
            0.1 * lambda
        )));
    }
    let mut u1 = Field::zeros(grid, 0.0);
    let mut u2 = Field::zeros(grid, 0.0);
    for (j, &phi_j) in phi.iter().enumerate() {
        for m in 0..n_theta {
            let psi = phi_j * (k as f64 * grid.angle(m)).cos();
            u1.values_mut()[[j, m]] = lambda + t_amp * psi;
            u2.values_mut()[[j, m]] = lambda - t_amp * psi;
        }
    }
    let state = StatePair::new(u1, u2)?;
    if state.min_value() <= 0.0 {
        return Err(Error::Amplitude(format!(
            "branch state loses positivity at t_amp = {t_amp}"
        )));
    }
    Ok((state, lambda))
}

/// Residuals of the elliptic system `-Delta u_i = lambda u_i - u_1 u_2`,
/// computed with the discrete polar Laplacian:
/// `residual_i = -Delta u_i - lambda u_i + u_1 u_2`.
pub fn elliptic_residual(state: &StatePair, lambda: f64) -> Result<(Field, Field)> {
    let grid = *state.grid();
    let mut out = Vec::with_capacity(2);
    for i in 0..2 {
        let u = state.component(i);
        let lap = laplacian_polar(u)?;
        let mut res = Field::zeros(grid, u.time());
        for j in 0..grid.n_r() {
            for m in 0..grid.n_theta() {
                res.values_mut()[[j, m]] = -lap.values()[[j, m]] - lambda * u.values()[[j, m]]
                    + state.u1.values()[[j, m]] * state.u2.values()[[j, m]];
            }
        }
        out.push(res);
    }
    let r2 = out.pop().expect("two residuals");
    let r1 = out.pop().expect("two residuals");
    Ok((r1, r2))
}

/// Circular count of sign changes of the centered angular derivative on
/// ring `j`; derivative values of magnitude at most `1e-12 sup |u|` are
/// treated as zero and skipped.
pub fn angular_sign_changes(u: &Field, ring_index: usize) -> usize {
    let grid = u.grid();
    let n = grid.n_theta();
    let tol = 1e-12 * u.sup_norm();
    let signs: Vec<i8> = (0..n)
        .filter_map(|m| {
            let d = u.values()[[ring_index, (m + 1) % n]] - u.values()[[ring_index, (m + n - 1) % n]];
            if d > tol {
                Some(1)
            } else if d < -tol {
                Some(-1)
            } else {
                None
            }
        })
        .collect();
    if signs.len() < 2 {
        return 0;
    }
    let mut count = 0;
    for i in 0..signs.len() {
        if signs[i] != signs[(i + 1) % signs.len()] {
            count += 1;
        }
    }
    count
}
