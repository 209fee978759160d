//! Thin-annulus Sturm-Liouville eigenproblem, bifurcation point location,
//! and the first-order bifurcating-branch predictor with its verification
//! diagnostics.

mod branch;
mod sturm;

pub use branch::{angular_sign_changes, build_branch_state, elliptic_residual};

use sturm::SymTridiag;

use crate::{Error, Result};

/// Radial Neumann eigenproblem
/// `-phi'' - phi'/r + (k^2/r^2) phi = lambda phi` on `(1 - eps, 1)`.
#[derive(Clone, Copy, Debug)]
pub struct SLProblem {
    pub k: u32,
    pub eps: f64,
    pub n: usize,
}

impl SLProblem {
    pub fn new(k: u32, eps: f64, n: usize) -> Result<SLProblem> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Spec(format!("thinness must lie in (0, 1), got {eps}")));
        }
        if n < 16 {
            return Err(Error::Spec(format!("radial resolution must be >= 16, got {n}")));
        }
        Ok(SLProblem { k, eps, n })
    }

    fn dr(&self) -> f64 {
        self.eps / self.n as f64
    }

    /// Cell-center radius `1 - eps + (j + 1/2) dr`.
    fn radius(&self, j: usize) -> f64 {
        1.0 - self.eps + (j as f64 + 0.5) * self.dr()
    }

    fn face_radius(&self, j: usize) -> f64 {
        1.0 - self.eps + j as f64 * self.dr()
    }

    /// Symmetric tridiagonal form of the operator with angular multiplier
    /// `mult` in place of `k^2` (similarity transform by `sqrt(r)` weights).
    fn matrix(&self, mult: f64) -> SymTridiag {
        let n = self.n;
        let dr2 = self.dr() * self.dr();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        for j in 0..n {
            let rj = self.radius(j);
            let mut d = mult / (rj * rj);
            if j > 0 {
                d += self.face_radius(j) / (rj * dr2);
            }
            if j + 1 < n {
                d += self.face_radius(j + 1) / (rj * dr2);
            }
            diag[j] = d;
            if j + 1 < n {
                off[j] =
                    -self.face_radius(j + 1) / ((rj * self.radius(j + 1)).sqrt() * dr2);
            }
        }
        SymTridiag { diag, off }
    }
}

/// The first eigenpairs of an [`SLProblem`].
#[derive(Clone, Debug)]
pub struct EigenResult {
    /// ascending eigenvalues, 1-based `lambda_j` at index `j - 1`
    pub eigenvalues: Vec<f64>,
    /// eigenfunctions on the cell centers, `sup |phi_j| = 1`, sign fixed by
    /// `phi_j(1 - eps) > 0`
    pub eigenfunctions: Vec<Vec<f64>>,
    /// cell-center radii
    pub radii: Vec<f64>,
}

/// Solve for the `j_max` smallest eigenpairs with the exact angular
/// multiplier `k^2`.
pub fn sl_eigen(p: &SLProblem, j_max: usize) -> Result<EigenResult> {
    sl_eigen_with_multiplier(p, (p.k as f64) * (p.k as f64), j_max)
}

/// Same discretization with an arbitrary angular multiplier; the branch
/// predictor passes the grid-matched value `(2 sin(k dtheta / 2) / dtheta)^2`
/// so that `psi = phi cos(k theta)` is an exact discrete eigenfunction of
/// the full polar stencil.
pub(crate) fn sl_eigen_with_multiplier(
    p: &SLProblem,
    mult: f64,
    j_max: usize,
) -> Result<EigenResult> {
    if j_max == 0 || j_max > p.n / 4 {
        return Err(Error::Spec(format!(
            "j_max must lie in 1..={} for n = {}, got {j_max}",
            p.n / 4,
            p.n
        )));
    }
    let a = p.matrix(mult);
    let radii: Vec<f64> = (0..p.n).map(|j| p.radius(j)).collect();
    let mut eigenvalues = Vec::with_capacity(j_max);
    let mut eigenfunctions = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let lam = a.eigenvalue(j);
        let w = a.eigenvector(lam, j)?;
        // undo the sqrt(r) similarity, normalize, fix the sign
        let mut phi: Vec<f64> = w.iter().zip(&radii).map(|(x, r)| x / r.sqrt()).collect();
        let sup = phi.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let sign = if phi[0] < 0.0 { -1.0 } else { 1.0 };
        for x in phi.iter_mut() {
            *x *= sign / sup;
        }
        eigenvalues.push(lam);
        eigenfunctions.push(phi);
    }
    Ok(EigenResult { eigenvalues, eigenfunctions, radii })
}

/// Find a thinness `eps*` at which the mode-`k` bifurcation is isolated:
/// halve `eps` from 0.5 until `lambda_2(0, eps) >= 1.1 lambda_1(k, eps)`,
/// and return `(eps*, lambda* = lambda_1(k, eps*))`.
pub fn find_bifurcation(k: u32) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(Error::Spec("bifurcation mode k must be >= 1".into()));
    }
    let n = 256;
    let mut eps = 0.5;
    while eps >= 1e-5 {
        let lam1k = sl_eigen(&SLProblem::new(k, eps, n)?, 1)?.eigenvalues[0];
        let lam20 = sl_eigen(&SLProblem::new(0, eps, n)?, 2)?.eigenvalues[1];
        if lam20 >= 1.1 * lam1k {
            return Ok((eps, lam1k));
        }
        eps *= 0.5;
    }
    Err(Error::Numeric(format!(
        "no admissible thinness above 1e-5 isolates the mode-{k} bifurcation"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumann_zero_mode() {
        let p = SLProblem::new(0, 0.5, 64).unwrap();
        let r = sl_eigen(&p, 1).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-10, "lambda_1 = {:e}", r.eigenvalues[0]);
        let phi = &r.eigenfunctions[0];
        for x in phi {
            assert!((x - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn thin_annulus_higher_modes_match_the_interval_laplacian() {
        // For eps -> 0 the operator approaches -phi'' on an interval of
        // length eps: lambda_j ~ ((j - 1) pi / eps)^2.
        let eps = 0.01;
        let p = SLProblem::new(0, eps, 512).unwrap();
        let r = sl_eigen(&p, 3).unwrap();
        for j in [2usize, 3] {
            let exact = ((j - 1) as f64 * std::f64::consts::PI / eps).powi(2);
            let rel = (r.eigenvalues[j - 1] - exact).abs() / exact;
            assert!(rel < 0.02, "j = {j}: {} vs {exact}", r.eigenvalues[j - 1]);
        }
    }

    #[test]
    fn lambda_one_approaches_k_squared_on_thin_annuli() {
        let p = SLProblem::new(3, 1e-3, 512).unwrap();
        let lam = sl_eigen(&p, 1).unwrap().eigenvalues[0];
        assert!((lam - 9.0).abs() < 0.1, "lambda_1(3, 1e-3) = {lam}");
    }

    #[test]
    fn eigenvalues_increase_strictly_in_k() {
        let mut prev = -1.0;
        for k in 0..=5 {
            let lam = sl_eigen(&SLProblem::new(k, 0.05, 128).unwrap(), 1).unwrap().eigenvalues[0];
            assert!(lam > prev, "k = {k}: {lam} <= {prev}");
            prev = lam;
        }
    }

    #[test]
    fn eigenvalues_are_simple_and_converge_at_second_order() {
        let coarse = sl_eigen(&SLProblem::new(2, 0.2, 64).unwrap(), 3).unwrap();
        let fine = sl_eigen(&SLProblem::new(2, 0.2, 128).unwrap(), 3).unwrap();
        let finest = sl_eigen(&SLProblem::new(2, 0.2, 256).unwrap(), 3).unwrap();
        for j in 0..3 {
            if j + 1 < 3 {
                assert!(coarse.eigenvalues[j + 1] > coarse.eigenvalues[j]);
            }
            let e1 = (coarse.eigenvalues[j] - finest.eigenvalues[j]).abs();
            let e2 = (fine.eigenvalues[j] - finest.eigenvalues[j]).abs();
            if e1 > 1e-10 {
                // second order: refining halves the error ~4x (allow 3x)
                assert!(e2 < e1 / 3.0, "j = {j}: {e1} -> {e2}");
            }
        }
    }

    #[test]
    fn eigenfunctions_are_r_weighted_orthogonal() {
        let p = SLProblem::new(1, 0.3, 128).unwrap();
        let r = sl_eigen(&p, 4).unwrap();
        for a in 0..4 {
            for b in a + 1..4 {
                let mut dot = 0.0;
                let mut na = 0.0;
                let mut nb = 0.0;
                for j in 0..p.n {
                    let w = r.radii[j];
                    dot += w * r.eigenfunctions[a][j] * r.eigenfunctions[b][j];
                    na += w * r.eigenfunctions[a][j] * r.eigenfunctions[a][j];
                    nb += w * r.eigenfunctions[b][j] * r.eigenfunctions[b][j];
                }
                assert!(dot.abs() / (na * nb).sqrt() < 1e-8, "({a}, {b}): {dot}");
            }
        }
    }

    #[test]
    fn ground_state_is_positive() {
        let r = sl_eigen(&SLProblem::new(3, 0.1, 128).unwrap(), 1).unwrap();
        assert!(r.eigenfunctions[0].iter().all(|&x| x > 0.0));
    }

    #[test]
    fn find_bifurcation_satisfies_its_inequality() {
        for k in [1u32, 3] {
            let (eps, lam) = find_bifurcation(k).unwrap();
            let lam1k = sl_eigen(&SLProblem::new(k, eps, 256).unwrap(), 1).unwrap().eigenvalues[0];
            let lam20 = sl_eigen(&SLProblem::new(0, eps, 256).unwrap(), 2).unwrap().eigenvalues[1];
            assert!(lam20 >= 1.1 * lam1k);
            assert!((lam - lam1k).abs() < 1e-12);
            assert!((1e-5..=0.5).contains(&eps));
        }
        assert!(find_bifurcation(0).is_err());
    }

    #[test]
    fn invalid_problems_are_rejected() {
        assert!(SLProblem::new(1, 0.0, 64).is_err());
        assert!(SLProblem::new(1, 1.0, 64).is_err());
        assert!(SLProblem::new(1, 0.5, 8).is_err());
        let p = SLProblem::new(1, 0.5, 64).unwrap();
        assert!(sl_eigen(&p, 17).is_err()); // j_max > n/4
        assert!(sl_eigen(&p, 0).is_err());
    }
}
