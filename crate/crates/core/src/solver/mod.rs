//! Time integration: IMEX stepping of the reaction-diffusion systems on
//! polar grids, the discrete Laplacian, and a reference ODE integrator for
//! spatially homogeneous data.

mod imex;
mod laplacian;
mod ode;
mod state;
mod tridiag;

pub use imex::{run, Stepper};
pub use laplacian::laplacian_polar;
pub use ode::ode_reference;
pub use state::{StatePair, Trajectory};
