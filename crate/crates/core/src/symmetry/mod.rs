//! Reflection differences, foliated Schwarz symmetrization, the rotating
//! direction set, omega-limit extraction, and the quotient diagnostic.

mod fs;

pub use fs::{estimate_axis, fs_score, fs_symmetrize};

use serde::Serialize;

use crate::domain::{node_on_positive_side, reflect_field, Direction, Field};
use crate::model::SystemKind;
use crate::solver::{StatePair, Trajectory};
use crate::{Error, Result};

/// Sign convention of the reflection differences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `d1 = u1 - u1 o sigma`, `d2 = u2 o sigma - u2`
    Competitive,
    /// `d_i = u_i - u_i o sigma`
    Cooperative,
    /// only the first component carries data
    Scalar,
}

impl Convention {
    pub fn for_kind(kind: SystemKind) -> Convention {
        if kind.is_scalar() {
            Convention::Scalar
        } else if kind.is_cooperative() {
            Convention::Cooperative
        } else {
            Convention::Competitive
        }
    }

    fn signs(&self) -> [f64; 2] {
        match self {
            Convention::Competitive => [1.0, -1.0],
            Convention::Cooperative | Convention::Scalar => [1.0, 1.0],
        }
    }

    fn components(&self) -> usize {
        if matches!(self, Convention::Scalar) { 1 } else { 2 }
    }
}

/// The signed reflection differences of a state about `H(e)`.
#[derive(Clone, Debug)]
pub struct DifferencePair {
    pub d1: Field,
    pub d2: Field,
    pub direction: Direction,
    pub convention: Convention,
}

/// Signed reflection differences; both components are exactly odd under
/// `sigma_e` (the permutation difference negates bitwise). For the scalar
/// convention `d2` duplicates `d1`.
pub fn difference_pair(
    state: &StatePair,
    e: Direction,
    convention: Convention,
) -> Result<DifferencePair> {
    let signs = convention.signs();
    let diff = |u: &Field, s: f64| -> Result<Field> {
        let r = reflect_field(u, e)?;
        let grid = *u.grid();
        let mut out = ndarray::Array2::zeros((grid.n_r(), grid.n_theta()));
        for j in 0..grid.n_r() {
            for m in 0..grid.n_theta() {
                let d = u.values()[[j, m]] - r.values()[[j, m]];
                out[[j, m]] = if s > 0.0 { d } else { -d };
            }
        }
        Field::new(grid, out, u.time())
    };
    let d1 = diff(&state.u1, signs[0])?;
    let d2 = if convention.components() == 2 { diff(&state.u2, signs[1])? } else { d1.clone() };
    Ok(DifferencePair { d1, d2, direction: e, convention })
}

/// Per-direction margin: the minimum over `B(e)` nodes of the smaller signed
/// difference component. A direction belongs to the (strict) direction set
/// when its margin exceeds the sign tolerance.
pub fn direction_margins(state: &StatePair, convention: Convention) -> Vec<f64> {
    let grid = *state.grid();
    let n = grid.n_theta();
    let signs = convention.signs();
    let ncomp = convention.components();
    let lattice = 2 * n;
    let mut margins = vec![f64::INFINITY; lattice];
    for (k, margin) in margins.iter_mut().enumerate() {
        let e = Direction::new(&grid, k);
        let mut lo = f64::INFINITY;
        for m in 0..n {
            if !node_on_positive_side(n, k, m) {
                continue;
            }
            let mr = e.reflect_node(m);
            for j in 0..grid.n_r() {
                for (i, s) in signs.iter().enumerate().take(ncomp) {
                    let u = state.component(i);
                    let d = s * (u.values()[[j, m]] - u.values()[[j, mr]]);
                    lo = lo.min(d);
                }
            }
        }
        *margin = lo;
    }
    margins
}

/// Direction-set membership across a trajectory's snapshots.
#[derive(Clone, Debug, Serialize)]
pub struct DirectionSetSeries {
    pub times: Vec<f64>,
    /// per snapshot: `sign_tol_rel * (1 + sup |u|)`
    pub sign_tols: Vec<f64>,
    /// `[snapshot][direction]` margins over `B(e)`
    pub margins: Vec<Vec<f64>>,
    /// strict membership per snapshot: margin > sign_tol
    pub in_set: Vec<Vec<bool>>,
    /// strict membership at any snapshot (the numerical counterpart of the
    /// set `N`'s existential quantifier)
    pub ever: Vec<bool>,
    /// once strictly in the set, the margin never falls below `-sign_tol`
    pub monotone: Vec<bool>,
}

pub fn direction_set_series(
    traj: &Trajectory,
    convention: Convention,
    sign_tol_rel: f64,
) -> Result<DirectionSetSeries> {
    if sign_tol_rel <= 0.0 {
        return Err(Error::Config("sign tolerance must be positive".into()));
    }
    let lattice = 2 * traj.grid().n_theta();
    let times = traj.times();
    let mut sign_tols = Vec::with_capacity(times.len());
    let mut margins = Vec::with_capacity(times.len());
    let mut in_set = Vec::with_capacity(times.len());
    for snap in traj.snapshots() {
        let tol = sign_tol_rel * (1.0 + snap.sup_norm());
        let m = direction_margins(snap, convention);
        let row: Vec<bool> = m.iter().map(|&v| v > tol).collect();
        sign_tols.push(tol);
        margins.push(m);
        in_set.push(row);
    }
    let mut ever = vec![false; lattice];
    let mut monotone = vec![true; lattice];
    for k in 0..lattice {
        let first = (0..times.len()).find(|&s| in_set[s][k]);
        if let Some(s0) = first {
            ever[k] = true;
            for s in s0..times.len() {
                if margins[s][k] < -sign_tols[s] {
                    monotone[k] = false;
                    break;
                }
            }
        }
    }
    Ok(DirectionSetSeries { times, sign_tols, margins, in_set, ever, monotone })
}

/// A single circular arc of direction-lattice indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ArcSummary {
    /// first index of the arc (inclusive, modulo the lattice size)
    pub start: usize,
    pub len: usize,
    /// arc midpoint; even-length arcs take the lower-index midpoint
    pub midpoint: usize,
}

/// Extract the predicted FS axis from a direction mask: the mask must form
/// one nonempty, non-full circular arc, whose midpoint is returned.
pub fn axis_from_direction_set(mask: &[bool]) -> Result<ArcSummary> {
    let n = mask.len();
    let count = mask.iter().filter(|&&b| b).count();
    if count == 0 {
        return Err(Error::MaskStructure("direction mask is empty".into()));
    }
    if count == n {
        return Err(Error::MaskStructure(
            "direction mask covers the full lattice (radial profile has no unique axis)".into(),
        ));
    }
    // the arc starts right after a false->true transition; exactly one
    // transition means a single arc
    let starts: Vec<usize> =
        (0..n).filter(|&i| mask[i] && !mask[(i + n - 1) % n]).collect();
    if starts.len() != 1 {
        return Err(Error::MaskStructure(format!(
            "direction mask has {} arcs, expected exactly one",
            starts.len()
        )));
    }
    let start = starts[0];
    let midpoint = (start + (count - 1) / 2) % n;
    Ok(ArcSummary { start, len: count, midpoint })
}

/// Final snapshot of the trajectory plus the maximum pairwise sup-distance
/// among the last `tail_window` snapshots (the finite-horizon Cauchy gap).
pub fn omega_profiles(traj: &Trajectory, tail_window: usize) -> Result<(StatePair, f64)> {
    if tail_window < 2 || traj.len() < tail_window {
        return Err(Error::Config(format!(
            "tail window of {tail_window} snapshots not available ({} snapshots)",
            traj.len()
        )));
    }
    let tail = &traj.snapshots()[traj.len() - tail_window..];
    let mut gap = 0.0f64;
    for a in 0..tail.len() {
        for b in a + 1..tail.len() {
            for i in 0..2 {
                let (ua, ub) = (tail[a].component(i), tail[b].component(i));
                let d = ua
                    .values()
                    .iter()
                    .zip(ub.values().iter())
                    .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
                gap = gap.max(d);
            }
        }
    }
    Ok((traj.last().clone(), gap))
}

/// Harnack-quotient diagnostic: the largest two-sided ratio
/// `max(ratio, 1/ratio)` with `ratio = u_i / sup |u_i(., tau)|` over both
/// components, all grid nodes, and all snapshots in `[tau - 3, tau + 3]`.
pub fn quotient_diagnostic(traj: &Trajectory, tau: f64) -> Result<f64> {
    if tau < 5.0 {
        return Err(Error::Config(format!("quotient diagnostic needs tau >= 5, got {tau}")));
    }
    let times = traj.times();
    let t_first = times[0];
    let t_last = *times.last().expect("non-empty");
    if t_first > tau - 3.0 || t_last < tau + 3.0 {
        return Err(Error::Config(format!(
            "snapshots cover [{t_first}, {t_last}], need [{}, {}]",
            tau - 3.0,
            tau + 3.0
        )));
    }
    let at_tau = traj
        .snapshots()
        .iter()
        .find(|s| (s.time() - tau).abs() <= 1e-9 * (1.0 + tau))
        .ok_or_else(|| Error::Config(format!("no snapshot at tau = {tau}")))?;
    let mut eta = 1.0f64;
    for i in 0..2 {
        let denom = at_tau.component(i).sup_norm();
        if denom <= 0.0 {
            return Err(Error::Positivity(format!(
                "component {} vanishes identically at tau = {tau}",
                i + 1
            )));
        }
        for snap in traj.snapshots() {
            let t = snap.time();
            if t < tau - 3.0 - 1e-12 || t > tau + 3.0 + 1e-12 {
                continue;
            }
            for &v in snap.component(i).values() {
                if v <= 0.0 {
                    return Err(Error::Positivity(format!(
                        "component {} is nonpositive at t = {t}",
                        i + 1
                    )));
                }
                let ratio = v / denom;
                eta = eta.max(ratio).max(1.0 / ratio);
            }
        }
    }
    Ok(eta)
}

/// One per-component axis estimate used in the symmetry report.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AxisEstimate {
    pub half_index: usize,
    pub angle: f64,
    /// fs_score at the snapshot the estimate was taken from
    pub score: f64,
    /// snapshot time the estimate was taken from
    pub time: f64,
}

/// Tunable thresholds of [`symmetry_report`].
#[derive(Clone, Copy, Debug)]
pub struct ReportParams {
    /// relative sign tolerance of the direction set
    pub sign_tol_rel: f64,
    /// number of tail snapshots in the Cauchy gap
    pub tail_window: usize,
    /// relative floor below which a snapshot's angular structure is
    /// considered pure noise for axis estimation
    pub axis_floor_rel: f64,
}

impl Default for ReportParams {
    fn default() -> Self {
        ReportParams { sign_tol_rel: 1e-8, tail_window: 5, axis_floor_rel: 1e-12 }
    }
}

/// Aggregate symmetry diagnostics of a finished trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub convention: Convention,
    pub axis1: AxisEstimate,
    pub axis2: Option<AxisEstimate>,
    /// fs_score of the final snapshot's components about their axes
    pub final_fs_score1: f64,
    pub final_fs_score2: Option<f64>,
    /// angle between axis2 and its predicted position (the antipode of
    /// axis1 for the competitive convention, axis1 itself otherwise);
    /// zero for scalar runs
    pub antipodal_mismatch_angle: f64,
    /// arc summary of the `ever` direction mask, when it is a single arc
    pub mask_arc: Option<ArcSummary>,
    pub mask_arc_error: Option<String>,
    /// angle between axis1 and the mask arc midpoint
    pub axis_vs_mask_angle: Option<f64>,
    pub ever_mask: Vec<bool>,
    pub monotone: Vec<bool>,
    pub cauchy_gap: f64,
}

/// Smallest angle between two lattice directions, in radians within
/// `[0, pi]`.
pub fn angle_between(a: Direction, b: Direction) -> f64 {
    let n = a.lattice_len();
    debug_assert_eq!(n, b.lattice_len());
    let d = (a.half_index() + n - b.half_index()) % n;
    let d = d.min(n - d);
    d as f64 * 2.0 * std::f64::consts::PI / n as f64
}

/// Estimate the FS axis of one trajectory component robustly: use the
/// latest snapshot whose angular structure still stands above the noise
/// floor `axis_floor_rel * (1 + sup |u|)`; fully radial histories fall back
/// to the final snapshot (tie-broken to lattice index 0).
pub fn estimate_axis_robust(
    traj: &Trajectory,
    component: usize,
    axis_floor_rel: f64,
) -> Result<AxisEstimate> {
    for snap in traj.snapshots().iter().rev() {
        let u = snap.component(component);
        let floor = axis_floor_rel * (1.0 + u.sup_norm());
        if u.angular_deviation() > floor {
            let (p, score) = estimate_axis(u)?;
            return Ok(AxisEstimate {
                half_index: p.half_index(),
                angle: p.angle(),
                score,
                time: snap.time(),
            });
        }
    }
    // fully radial (or zero) history: every direction ties
    let last = traj.last();
    let u = last.component(component);
    let score =
        if u.sup_norm() == 0.0 { 0.0 } else { fs_score(u, Direction::new(traj.grid(), 0))? };
    Ok(AxisEstimate { half_index: 0, angle: 0.0, score, time: last.time() })
}

pub fn symmetry_report(
    traj: &Trajectory,
    convention: Convention,
    params: &ReportParams,
) -> Result<SymmetryReport> {
    let grid = *traj.grid();
    let axis1 = estimate_axis_robust(traj, 0, params.axis_floor_rel)?;
    let axis2 = if convention.components() == 2 {
        Some(estimate_axis_robust(traj, 1, params.axis_floor_rel)?)
    } else {
        None
    };
    let p1 = Direction::new(&grid, axis1.half_index);
    let last = traj.last();
    let final_fs_score1 = if last.u1.sup_norm() == 0.0 { 0.0 } else { fs_score(&last.u1, p1)? };
    let final_fs_score2 = match &axis2 {
        Some(a) => {
            let p2 = Direction::new(&grid, a.half_index);
            Some(if last.u2.sup_norm() == 0.0 { 0.0 } else { fs_score(&last.u2, p2)? })
        }
        None => None,
    };
    let antipodal_mismatch_angle = match &axis2 {
        Some(a) => {
            let p2 = Direction::new(&grid, a.half_index);
            let predicted = match convention {
                Convention::Competitive => p1.opposite(),
                _ => p1,
            };
            angle_between(p2, predicted)
        }
        None => 0.0,
    };
    let series = direction_set_series(traj, convention, params.sign_tol_rel)?;
    let (mask_arc, mask_arc_error) = match axis_from_direction_set(&series.ever) {
        Ok(arc) => (Some(arc), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let axis_vs_mask_angle =
        mask_arc.map(|arc| angle_between(p1, Direction::new(&grid, arc.midpoint)));
    let (_, cauchy_gap) = omega_profiles(traj, params.tail_window.min(traj.len()).max(2))?;
    Ok(SymmetryReport {
        convention,
        axis1,
        axis2,
        final_fs_score1,
        final_fs_score2,
        antipodal_mismatch_angle,
        mask_arc,
        mask_arc_error,
        axis_vs_mask_angle,
        ever_mask: series.ever,
        monotone: series.monotone,
        cauchy_gap,
    })
}
