//! Numerical laboratory for competition/cooperation reaction-diffusion
//! systems on 2-D disks and annuli with Neumann boundary conditions.
//!
//! The crate is organized around five subsystems:
//!
//! * [`domain`] — radial domains, cell-centered polar grids, grid-aligned
//!   reflections and scalar fields,
//! * [`model`] — declarative PDE system specifications and hypothesis
//!   validation,
//! * [`solver`] — IMEX time integration with implicit ADI diffusion sweeps,
//! * [`symmetry`] — reflection differences, foliated Schwarz scores,
//!   direction sets and long-time diagnostics,
//! * [`bifurcation`] — the thin-annulus Sturm-Liouville eigenproblem,
//!   bifurcation point location and branch predictors.

pub mod bifurcation;
pub mod domain;
pub mod error;
pub mod model;
pub mod solver;
pub mod symmetry;

pub use error::{Error, Result};
