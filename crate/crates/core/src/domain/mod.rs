//! Radial domain geometry, cell-centered polar grids, grid-aligned
//! reflections and point inversions.

mod field;

pub use field::Field;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A disk (`inner_radius == 0`) or annulus centered at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialDomain {
    inner_radius: f64,
    outer_radius: f64,
}

impl RadialDomain {
    pub fn new(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius.is_finite() && outer_radius.is_finite()) {
            return Err(Error::Domain("radii must be finite".into()));
        }
        if inner_radius < 0.0 || inner_radius >= outer_radius {
            return Err(Error::Domain(format!(
                "need 0 <= A1 < A2, got A1 = {inner_radius}, A2 = {outer_radius}"
            )));
        }
        Ok(Self { inner_radius, outer_radius })
    }

    pub fn disk(outer_radius: f64) -> Result<Self> {
        Self::new(0.0, outer_radius)
    }

    pub fn annulus(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if inner_radius <= 0.0 {
            return Err(Error::Domain("annulus needs A1 > 0".into()));
        }
        Self::new(inner_radius, outer_radius)
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn is_disk(&self) -> bool {
        self.inner_radius == 0.0
    }

    /// The extension domain used by the boundary-straightening argument:
    /// the annulus `(A1^2/A2, A2^2/A1)`, or the disk of radius `2 A2`.
    pub fn extended(&self) -> RadialDomain {
        if self.is_disk() {
            RadialDomain { inner_radius: 0.0, outer_radius: 2.0 * self.outer_radius }
        } else {
            RadialDomain {
                inner_radius: self.inner_radius * self.inner_radius / self.outer_radius,
                outer_radius: self.outer_radius * self.outer_radius / self.inner_radius,
            }
        }
    }

    /// Inversion of a point of the extension collar back into the closure of
    /// the domain: `A2^2 x / |x|^2` outside, `A1^2 x / |x|^2` inside the hole.
    /// Boundary circles are fixed pointwise.
    pub fn invert_point(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let ext = self.extended();
        if r > ext.outer_radius || r < ext.inner_radius {
            return Err(Error::Domain(format!(
                "|x| = {r} lies outside the extended domain"
            )));
        }
        let scale = if r >= self.outer_radius {
            self.outer_radius * self.outer_radius / (r * r)
        } else if r <= self.inner_radius {
            self.inner_radius * self.inner_radius / (r * r)
        } else {
            return Err(Error::Domain(format!(
                "|x| = {r} lies in the interior of the domain, not in the collar"
            )));
        };
        Ok([scale * x[0], scale * x[1]])
    }
}

/// Cell-centered polar grid over a [`RadialDomain`].
///
/// Radii sit half a cell off the boundary circles, so the pole `r = 0` of a
/// disk is never a node. `n_theta` must be divisible by 4 so that every
/// grid-aligned reflection permutes the angular nodes exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    domain: RadialDomain,
    n_r: usize,
    n_theta: usize,
}

impl PolarGrid {
    pub fn new(domain: RadialDomain, n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r == 0 {
            return Err(Error::Domain("n_r must be positive".into()));
        }
        if n_theta == 0 || !n_theta.is_multiple_of(4) {
            return Err(Error::Domain(format!(
                "n_theta must be a positive multiple of 4, got {n_theta}"
            )));
        }
        Ok(Self { domain, n_r, n_theta })
    }

    pub fn domain(&self) -> RadialDomain {
        self.domain
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn dr(&self) -> f64 {
        (self.domain.outer_radius - self.domain.inner_radius) / self.n_r as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n_theta as f64
    }

    /// Cell-center radius `A1 + (j + 1/2) dr`.
    pub fn radius(&self, j: usize) -> f64 {
        self.domain.inner_radius + (j as f64 + 0.5) * self.dr()
    }

    /// Radius of the cell face between rings `j - 1` and `j` (face index
    /// `j` in `0..=n_r`).
    pub fn face_radius(&self, j: usize) -> f64 {
        self.domain.inner_radius + j as f64 * self.dr()
    }

    pub fn angle(&self, m: usize) -> f64 {
        m as f64 * self.dtheta()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.n_r).map(|j| self.radius(j)).collect()
    }

    /// Area of cell `(j, m)`: `r_j dr dtheta`.
    pub fn cell_area(&self, j: usize) -> f64 {
        self.radius(j) * self.dr() * self.dtheta()
    }
}

/// A grid-aligned unit direction on the half-angle lattice.
///
/// The lattice has `2 n_theta` entries at spacing `dtheta / 2`, covering the
/// full circle; a direction and its antipode are distinct lattice members.
/// For every lattice direction the reflection `theta -> 2(beta + pi/2) -
/// theta` permutes the angular nodes exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Direction {
    half_index: usize,
    n_theta: usize,
}

impl Direction {
    pub fn new(grid: &PolarGrid, half_index: usize) -> Self {
        let size = 2 * grid.n_theta();
        Self { half_index: half_index % size, n_theta: grid.n_theta() }
    }

    /// Number of lattice directions for a grid: `2 n_theta`.
    pub fn lattice_size(grid: &PolarGrid) -> usize {
        2 * grid.n_theta()
    }

    pub fn half_index(&self) -> usize {
        self.half_index
    }

    /// Size of the lattice this direction belongs to: `2 n_theta`.
    pub fn lattice_len(&self) -> usize {
        2 * self.n_theta
    }

    /// The angle beta of the direction, a multiple of `dtheta / 2`.
    pub fn angle(&self) -> f64 {
        self.half_index as f64 * std::f64::consts::PI / self.n_theta as f64
    }

    pub fn unit(&self) -> [f64; 2] {
        let b = self.angle();
        [b.cos(), b.sin()]
    }

    pub fn opposite(&self) -> Direction {
        Direction {
            half_index: (self.half_index + self.n_theta) % (2 * self.n_theta),
            n_theta: self.n_theta,
        }
    }

    pub fn check_grid(&self, grid: &PolarGrid) -> Result<()> {
        if self.n_theta != grid.n_theta() {
            return Err(Error::Alignment(format!(
                "direction lattice built for n_theta = {}, field has n_theta = {}",
                self.n_theta,
                grid.n_theta()
            )));
        }
        Ok(())
    }

    /// Image of angular node `m` under the reflection across `H(e)`.
    pub fn reflect_node(&self, m: usize) -> usize {
        let n = self.n_theta;
        // theta' = 2 beta + pi - theta; in node units: k + n/2 - m.
        (self.half_index + n / 2 + n - m % n) % n
    }
}

/// Reflection `sigma_e(x) = x - 2 (x . e) e` across the hyperplane `H(e)`.
pub fn reflect_point(x: [f64; 2], e: [f64; 2]) -> [f64; 2] {
    let dot = x[0] * e[0] + x[1] * e[1];
    [x[0] - 2.0 * dot * e[0], x[1] - 2.0 * dot * e[1]]
}

/// Reflection of a field across `H(e)` as an exact node permutation.
pub fn reflect_field(u: &Field, e: Direction) -> Result<Field> {
    e.check_grid(u.grid())?;
    let grid = *u.grid();
    let mut out = ndarray::Array2::zeros((grid.n_r(), grid.n_theta()));
    for j in 0..grid.n_r() {
        for m in 0..grid.n_theta() {
            out[[j, m]] = u.values()[[j, e.reflect_node(m)]];
        }
    }
    Field::new(grid, out, u.time())
}

/// Mask of the half domain `B(e) = { x in B : x . e > 0 }`.
///
/// The test is carried out in integer lattice arithmetic, so nodes exactly
/// on `H(e)` are excluded without floating-point ambiguity.
pub fn half_domain_mask(grid: &PolarGrid, e: Direction) -> Result<ndarray::Array2<bool>> {
    e.check_grid(grid)?;
    let n = grid.n_theta();
    let mut row = vec![false; n];
    for (m, entry) in row.iter_mut().enumerate() {
        *entry = node_on_positive_side(n, e.half_index(), m);
    }
    let mut mask = ndarray::Array2::from_elem((grid.n_r(), n), false);
    for j in 0..grid.n_r() {
        for m in 0..n {
            mask[[j, m]] = row[m];
        }
    }
    Ok(mask)
}

/// `x . e > 0` for the node at angle `m * dtheta`, in half-angle units.
pub(crate) fn node_on_positive_side(n_theta: usize, half_index: usize, m: usize) -> bool {
    // Angular offset theta_m - beta in units of dtheta/2, reduced mod 2 pi.
    let full = 2 * n_theta;
    let d = (2 * m + full - half_index % full) % full;
    // cos > 0 iff the offset lies strictly inside (-pi/2, pi/2).
    d < n_theta / 2 || d > full - n_theta / 2
}
