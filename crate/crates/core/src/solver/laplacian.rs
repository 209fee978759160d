use ndarray::Array2;

use crate::domain::{Field, PolarGrid};
use crate::Result;

/// Flux coefficients of the conservative radial part of the Laplacian.
///
/// Row `j` of the operator is
/// `cm[j] u_{j-1} - (cm[j] + cp[j]) u_j + cp[j] u_{j+1}` with
/// `cm[j] = r_{j-1/2} / (r_j dr^2)` and `cp[j] = r_{j+1/2} / (r_j dr^2)`.
/// Zero-flux (Neumann) boundaries drop the outermost face terms; on a disk
/// the innermost face has radius zero, so the same rule covers the pole.
pub(crate) fn radial_flux_coefficients(grid: &PolarGrid) -> (Vec<f64>, Vec<f64>) {
    let n_r = grid.n_r();
    let dr2 = grid.dr() * grid.dr();
    let mut cm = vec![0.0; n_r];
    let mut cp = vec![0.0; n_r];
    for j in 0..n_r {
        let rj = grid.radius(j);
        if j > 0 {
            cm[j] = grid.face_radius(j) / (rj * dr2);
        }
        if j + 1 < n_r {
            cp[j] = grid.face_radius(j + 1) / (rj * dr2);
        }
    }
    (cm, cp)
}

/// Five-point polar Laplacian with zero-flux boundary conditions.
///
/// Conservative in the radial direction and periodic in the angle, so that
/// the area-weighted integral of the result vanishes up to roundoff.
pub fn laplacian_polar(u: &Field) -> Result<Field> {
    let grid = *u.grid();
    let (n_r, n) = (grid.n_r(), grid.n_theta());
    let (cm, cp) = radial_flux_coefficients(&grid);
    let dth2 = grid.dtheta() * grid.dtheta();
    let v = u.values();
    let mut out = Array2::zeros((n_r, n));
    for j in 0..n_r {
        let ct = 1.0 / (grid.radius(j) * grid.radius(j) * dth2);
        for m in 0..n {
            let mut acc = 0.0;
            if j > 0 {
                acc += cm[j] * (v[[j - 1, m]] - v[[j, m]]);
            }
            if j + 1 < n_r {
                acc += cp[j] * (v[[j + 1, m]] - v[[j, m]]);
            }
            let left = v[[j, (m + n - 1) % n]];
            let right = v[[j, (m + 1) % n]];
            // (left + right) first: commutative, so the stencil commutes
            // bitwise with grid reflections
            acc += ct * ((left + right) - 2.0 * v[[j, m]]);
            out[[j, m]] = acc;
        }
    }
    Field::new(grid, out, u.time())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{reflect_field, Direction, RadialDomain};

    #[test]
    fn constant_field_maps_to_zero() {
        let g = PolarGrid::new(RadialDomain::disk(1.0).unwrap(), 12, 16).unwrap();
        let u = Field::from_fn(g, 0.0, |_, _| 4.2).unwrap();
        assert_eq!(laplacian_polar(&u).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn r_squared_has_laplacian_four_in_the_interior() {
        // Delta r^2 = 4, and the conservative stencil reproduces it exactly
        // away from the zero-flux boundary rows.
        let g = PolarGrid::new(RadialDomain::annulus(0.5, 1.5).unwrap(), 20, 8).unwrap();
        let u = Field::from_fn(g, 0.0, |r, _| r * r).unwrap();
        let lap = laplacian_polar(&u).unwrap();
        for j in 1..g.n_r() - 1 {
            for m in 0..g.n_theta() {
                assert!(
                    (lap.values()[[j, m]] - 4.0).abs() < 1e-10,
                    "j = {j}, got {}",
                    lap.values()[[j, m]]
                );
            }
        }
    }

    #[test]
    fn area_weighted_integral_vanishes() {
        let g = PolarGrid::new(RadialDomain::disk(1.0).unwrap(), 24, 32).unwrap();
        let u = Field::from_fn(g, 0.0, |r, th| (3.0 * r).sin() * (2.0 * th).cos() + r).unwrap();
        let lap = laplacian_polar(&u).unwrap();
        assert!(lap.weighted_integral().abs() < 1e-12 * u.sup_norm());
    }

    #[test]
    fn commutes_with_grid_reflections_bitwise() {
        let g = PolarGrid::new(RadialDomain::annulus(0.5, 1.0).unwrap(), 6, 16).unwrap();
        let u = Field::from_fn(g, 0.0, |r, th| r + 0.3 * (th + 0.7 * r).cos()).unwrap();
        for k in [0usize, 3, 9, 17] {
            let e = Direction::new(&g, k);
            let a = laplacian_polar(&reflect_field(&u, e).unwrap()).unwrap();
            let b = reflect_field(&laplacian_polar(&u).unwrap(), e).unwrap();
            assert_eq!(a.values(), b.values());
        }
    }

    #[test]
    fn angular_mode_eigenvalue_per_ring() {
        // For u = cos(k theta) the stencil acts ring by ring as
        // -(2 - 2 cos(k dtheta)) / (r^2 dtheta^2).
        let g = PolarGrid::new(RadialDomain::annulus(0.5, 1.0).unwrap(), 4, 64).unwrap();
        let k = 3.0;
        let u = Field::from_fn(g, 0.0, |_, th| (k * th).cos()).unwrap();
        let lap = laplacian_polar(&u).unwrap();
        // Interior test on a single ring away from radial boundaries is not
        // possible (radial term couples rings), so use a radial profile that
        // is constant: rings decouple only through the radial flux of the
        // angular mode itself. Check the middle rings against the full
        // two-term formula instead.
        let dth = g.dtheta();
        let lam = (2.0 - 2.0 * (k * dth).cos()) / (dth * dth);
        for j in 1..g.n_r() - 1 {
            for m in 0..g.n_theta() {
                let r = g.radius(j);
                // radial part vanishes since u is radius-independent; only
                // boundary rows lose a flux term, hence the interior check.
                let expected = -lam / (r * r) * u.values()[[j, m]];
                assert!(
                    (lap.values()[[j, m]] - expected).abs() < 1e-10,
                    "j = {j}, m = {m}"
                );
            }
        }
    }
}
