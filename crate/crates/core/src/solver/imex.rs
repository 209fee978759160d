use ndarray::Array2;
use rayon::prelude::*;

use super::laplacian::radial_flux_coefficients;
use super::state::{StatePair, Trajectory};
use super::tridiag::{apply_circulant_kernel, circulant_kernel, Tridiag};
use crate::domain::PolarGrid;
use crate::model::SystemSpec;
use crate::{Error, Result};

/// Sup-norm beyond which the integration is reported as blown up.
const BLOW_UP_SUP: f64 = 1e8;

/// IMEX integrator: explicit Euler reaction step followed by a Lie-split
/// implicit diffusion step (radial Thomas sweep, then angular circulant
/// sweep).
///
/// Every sweep treats lines or rings independently with no cross-thread
/// reductions, so results are bitwise identical for any thread count, and
/// the angular solve commutes bitwise with grid rotations and reflections.
pub struct Stepper {
    spec: SystemSpec,
    grid: PolarGrid,
    dt: f64,
    cm: Vec<f64>,
    cp: Vec<f64>,
    mu_time_dependent: bool,
    /// per component: factored radial systems (one shared by all angles)
    radial: [Option<Tridiag>; 2],
    /// per component, per ring: angular impulse kernels
    angular: [Vec<Vec<f64>>; 2],
}

impl Stepper {
    pub fn new(spec: &SystemSpec, grid: PolarGrid, dt: f64) -> Result<Stepper> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        if spec.mu_bounds().0 <= 0.0 {
            return Err(Error::Spec("diffusion coefficients must be positive".into()));
        }
        let (cm, cp) = radial_flux_coefficients(&grid);
        let mu_time_dependent =
            spec.mu(0).depends_on_time() || spec.mu(1).depends_on_time();
        let mut s = Stepper {
            spec: spec.clone(),
            grid,
            dt,
            cm,
            cp,
            mu_time_dependent,
            radial: [None, None],
            angular: [Vec::new(), Vec::new()],
        };
        s.build_implicit(0.0);
        Ok(s)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// (Re)build the factored implicit operators for reaction time `t`.
    fn build_implicit(&mut self, t: f64) {
        let n_r = self.grid.n_r();
        let n = self.grid.n_theta();
        let dth2 = self.grid.dtheta() * self.grid.dtheta();
        for i in 0..2 {
            let mu: Vec<f64> =
                (0..n_r).map(|j| self.spec.mu(i).eval(self.grid.radius(j), t)).collect();
            let mut sub = vec![0.0; n_r];
            let mut diag = vec![0.0; n_r];
            let mut sup = vec![0.0; n_r];
            for j in 0..n_r {
                let s = self.dt * mu[j];
                sub[j] = -s * self.cm[j];
                diag[j] = 1.0 + s * (self.cm[j] + self.cp[j]);
                sup[j] = -s * self.cp[j];
            }
            self.radial[i] = Some(Tridiag::factor(&sub, &diag, &sup));
            self.angular[i] = (0..n_r)
                .map(|j| {
                    let r = self.grid.radius(j);
                    circulant_kernel(n, self.dt * mu[j] / (r * r * dth2))
                })
                .collect();
        }
    }

    /// Advance the state by `dt_step` (normally `self.dt`; shorter only to
    /// land exactly on a snapshot time).
    fn advance(&mut self, state: &mut StatePair, dt_step: f64, rebuild: bool) -> Result<()> {
        let grid = self.grid;
        let (n_r, n) = (grid.n_r(), grid.n_theta());
        let t = state.time();
        if rebuild || dt_step != self.dt {
            self.dt = dt_step;
            self.build_implicit(t);
        }

        // explicit reaction
        let radii = grid.radii();
        {
            let (v1, v2) = (state.u1.values().clone(), state.u2.values().clone());
            let w1 = state.u1.values_mut();
            let mut w2 = state.u2.values().clone();
            w1.as_slice_mut()
                .expect("standard layout")
                .par_chunks_mut(n)
                .zip(w2.as_slice_mut().expect("standard layout").par_chunks_mut(n))
                .enumerate()
                .for_each(|(j, (row1, row2))| {
                    let r = radii[j];
                    for m in 0..n {
                        let (a, b) = (v1[[j, m]], v2[[j, m]]);
                        let (g1, g2) = self.spec.eval_reaction(t, r, a, b);
                        row1[m] = a + dt_step * g1;
                        row2[m] = b + dt_step * g2;
                    }
                });
            *state.u2.values_mut() = w2;
        }

        // implicit radial sweep (transpose so each line is contiguous)
        for i in 0..2 {
            let tri = self.radial[i].as_ref().expect("factored");
            let field = if i == 0 { &mut state.u1 } else { &mut state.u2 };
            let mut tr: Array2<f64> = Array2::zeros((n, n_r));
            {
                let v = field.values();
                for j in 0..n_r {
                    for m in 0..n {
                        tr[[m, j]] = v[[j, m]];
                    }
                }
            }
            tr.as_slice_mut()
                .expect("standard layout")
                .par_chunks_mut(n_r)
                .for_each(|line| tri.solve(line));
            let w = field.values_mut();
            for j in 0..n_r {
                for m in 0..n {
                    w[[j, m]] = tr[[m, j]];
                }
            }
        }

        // implicit angular sweep, ring by ring
        for i in 0..2 {
            let kernels = &self.angular[i];
            let field = if i == 0 { &mut state.u1 } else { &mut state.u2 };
            let src = field.values().clone();
            field
                .values_mut()
                .as_slice_mut()
                .expect("standard layout")
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(j, row)| {
                    let rhs = src.row(j);
                    apply_circulant_kernel(
                        &kernels[j],
                        rhs.as_slice().expect("standard layout"),
                        row,
                    );
                });
        }

        state.set_time(t + dt_step);
        let sup = state.sup_norm();
        if !sup.is_finite() || sup > BLOW_UP_SUP {
            return Err(Error::BlowUp {
                time: state.time(),
                detail: format!("sup norm reached {sup:e}"),
            });
        }
        Ok(())
    }

    /// Advance by one nominal step `dt`.
    pub fn step(&mut self, state: &mut StatePair) -> Result<()> {
        let rebuild = self.mu_time_dependent;
        self.advance(state, self.dt, rebuild)
    }
}

/// Integrate from `state0`, recording a snapshot at each requested time.
///
/// Snapshot times must be finite, strictly increasing, and not precede the
/// initial time. The stepper lands on each snapshot exactly: a final
/// shortened step is taken when the remainder is below `dt`, and the
/// snapshot's time stamp is set to the requested value.
pub fn run(
    spec: &SystemSpec,
    state0: &StatePair,
    dt: f64,
    snapshot_times: &[f64],
) -> Result<Trajectory> {
    if snapshot_times.is_empty() {
        return Err(Error::Config("at least one snapshot time is required".into()));
    }
    if !snapshot_times.iter().all(|t| t.is_finite()) {
        return Err(Error::Config("snapshot times must be finite".into()));
    }
    if !snapshot_times.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config("snapshot times must be strictly increasing".into()));
    }
    if snapshot_times[0] < state0.time() {
        return Err(Error::Config(format!(
            "first snapshot time {} precedes initial time {}",
            snapshot_times[0],
            state0.time()
        )));
    }
    let mut stepper = Stepper::new(spec, *state0.grid(), dt)?;
    let nominal = dt;
    let mut state = state0.clone();
    let mut snapshots = Vec::with_capacity(snapshot_times.len() + 1);
    snapshots.push(state.clone());
    for &s in snapshot_times {
        loop {
            let remaining = s - state.time();
            if remaining <= nominal * 1e-9 {
                break;
            }
            if remaining <= nominal * (1.0 + 1e-9) {
                let rebuild = true; // shortened step changes the operators
                stepper.advance(&mut state, remaining, rebuild)?;
                // restore the nominal operators for subsequent steps
                stepper.dt = nominal;
                stepper.build_implicit(state.time());
                break;
            }
            stepper.step(&mut state)?;
        }
        state.set_time(s);
        snapshots.push(state.clone());
    }
    Trajectory::new(snapshots, nominal)
}
