//! Scenario execution: hypothesis gate, time integration, diagnostics and
//! the report bundle.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use simlab_core::bifurcation::{build_branch_state, elliptic_residual};
use simlab_core::domain::{Direction, Field, PolarGrid};
use simlab_core::model::{validate_hypotheses, SystemSpec};
use simlab_core::solver::{run, StatePair, Trajectory};
use simlab_core::symmetry::{
    angle_between, difference_pair, quotient_diagnostic, symmetry_report, Convention,
    ReportParams, SymmetryReport,
};
use simlab_core::Error;

use crate::scenario::{AxisRelation, InitialFamily, Scenario};

/// Exit codes of the scenario runner.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_BLOW_UP: i32 = 4;

/// Result of a scenario run: the process exit code plus human-readable
/// check outcomes (one line per check, `PASS`/`FAIL` prefixed).
pub struct RunOutcome {
    pub exit_code: i32,
    pub messages: Vec<String>,
}

fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        Error::Spec(_) | Error::Config(_) | Error::Domain(_) | Error::Alignment(_) => EXIT_SCHEMA,
        _ => EXIT_ASSERTION,
    }
}

fn schema_failure(detail: String) -> RunOutcome {
    RunOutcome { exit_code: EXIT_SCHEMA, messages: vec![format!("FAIL schema: {detail}")] }
}

fn build_initial_field(
    family: &InitialFamily,
    grid: PolarGrid,
    e: Direction,
) -> simlab_core::Result<Field> {
    let beta = e.angle();
    match family {
        InitialFamily::RadialBump { base, amplitude } => {
            let d = grid.domain();
            let mid = 0.5 * (d.inner_radius() + d.outer_radius());
            let w = 0.25 * (d.outer_radius() - d.inner_radius());
            Field::from_fn(grid, 0.0, |r, _| {
                base + amplitude * (-((r - mid) / w).powi(2)).exp()
            })
        }
        InitialFamily::TiltedAffine { base, tilt } => {
            Field::from_fn(grid, 0.0, |r, th| base + tilt * r * (th - beta).cos())
        }
        InitialFamily::TwoBump { base, amplitude } => {
            Field::from_fn(grid, 0.0, |r, th| base + amplitude * r * (2.0 * (th - beta)).cos())
        }
        InitialFamily::Csv { path } => {
            let f = File::open(path)?;
            Field::read_csv(grid, 0.0, BufReader::new(f))
        }
    }
}

fn snapshot_times(dt: f64, t_end: f64, every: f64) -> simlab_core::Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    if !(every >= dt && every.is_finite()) {
        return Err(Error::Config("snapshot_every must be at least dt".into()));
    }
    if !(t_end >= every && t_end.is_finite()) {
        return Err(Error::Config("t_end must be at least snapshot_every".into()));
    }
    let mut times = Vec::new();
    let mut i = 1u64;
    loop {
        let t = i as f64 * every;
        if t > t_end * (1.0 + 1e-9) {
            break;
        }
        times.push(t);
        i += 1;
    }
    if times.last().is_none_or(|&l| l < t_end * (1.0 - 1e-9)) {
        times.push(t_end);
    }
    Ok(times)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn write_snapshot_csv(path: &Path, state: &StatePair) -> std::io::Result<()> {
    let grid = state.grid();
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "r,theta,u1,u2")?;
    for j in 0..grid.n_r() {
        let r = grid.radius(j);
        for m in 0..grid.n_theta() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                r,
                grid.angle(m),
                state.u1.values()[[j, m]],
                state.u2.values()[[j, m]]
            )?;
        }
    }
    Ok(())
}

fn bits(mask: &[bool]) -> String {
    mask.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Symmetry report with the lattice masks encoded as bit-strings.
fn report_json(report: &SymmetryReport) -> serde_json::Value {
    let mut v = serde_json::to_value(report).expect("report serializes");
    v["ever_mask"] = serde_json::Value::String(bits(&report.ever_mask));
    v["monotone"] = serde_json::Value::String(bits(&report.monotone));
    v
}

/// Execute a scenario and write the report bundle under `out_dir`.
///
/// The bundle always contains `hypothesis_report.json`; successful
/// integration adds the snapshot CSVs, `trajectory.json` and the enabled
/// diagnostics. The pipeline is deterministic, so identical configs yield
/// byte-identical bundles.
pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> RunOutcome {
    if let Err(e) = std::fs::create_dir_all(out_dir) {
        return schema_failure(format!("cannot create output directory: {e}"));
    }
    let spec: SystemSpec = match sc.system.build() {
        Ok(s) => s,
        Err(e) => return schema_failure(e.to_string()),
    };
    let grid = match PolarGrid::new(spec.domain(), sc.grid.n_r, sc.grid.n_theta) {
        Ok(g) => g,
        Err(e) => return schema_failure(e.to_string()),
    };
    if !(sc.tolerances.sign_tol_rel > 0.0
        && sc.tolerances.omega_tol > 0.0
        && sc.tolerances.axis_tol_degrees > 0.0
        && sc.tolerances.axis_floor_rel > 0.0)
    {
        return schema_failure("all tolerances must be positive".into());
    }
    if sc.checks.axis_relation.is_some() && spec.kind().is_scalar() {
        return schema_failure("axis_relation is undefined for scalar systems".into());
    }
    let times = match snapshot_times(sc.time.dt, sc.time.t_end, sc.time.snapshot_every) {
        Ok(t) => t,
        Err(e) => return schema_failure(e.to_string()),
    };
    let e0 = Direction::new(&grid, sc.initial.direction_index);
    let u1 = match build_initial_field(&sc.initial.u1, grid, e0) {
        Ok(u) => u,
        Err(e) => return schema_failure(format!("initial u1: {e}")),
    };
    let u2 = match &sc.initial.u2 {
        Some(fam) => match build_initial_field(fam, grid, e0) {
            Ok(u) => u,
            Err(e) => return schema_failure(format!("initial u2: {e}")),
        },
        None if spec.kind().is_scalar() => Field::zeros(grid, 0.0),
        None => return schema_failure("initial.u2 is required for two-component systems".into()),
    };
    let state0 = match StatePair::new(u1, u2) {
        Ok(s) => s,
        Err(e) => return schema_failure(e.to_string()),
    };

    let mut messages = Vec::new();

    // hypothesis gate; the report is part of the bundle even on failure
    let hyp = match validate_hypotheses(&spec, &state0.u1, &state0.u2, e0) {
        Ok(h) => h,
        Err(e) => return schema_failure(e.to_string()),
    };
    if let Err(e) = write_json(&out_dir.join("hypothesis_report.json"), &hyp) {
        return schema_failure(format!("cannot write hypothesis report: {e}"));
    }
    if sc.checks.require_hypotheses && !hyp.pass {
        messages.push(format!(
            "FAIL hypotheses: h0_ok={} u0_nonnegative={} mu_positive={} alpha_positive={:?}",
            hyp.h0_ok, hyp.u0_nonnegative, hyp.mu_positive, hyp.alpha_positive
        ));
        return RunOutcome { exit_code: EXIT_HYPOTHESIS, messages };
    }
    messages.push(format!(
        "PASS hypotheses (Lipschitz bound {:.3e})",
        hyp.h1_lipschitz_bound
    ));

    // integrate
    let traj: Trajectory = match run(&spec, &state0, sc.time.dt, &times) {
        Ok(t) => t,
        Err(e) => {
            messages.push(format!("FAIL integration: {e}"));
            return RunOutcome { exit_code: error_exit_code(&e), messages };
        }
    };

    // snapshot dumps + manifest
    let config_bytes = serde_json::to_vec(sc).expect("scenario serializes");
    let config_sha256 = format!("{:x}", Sha256::digest(&config_bytes));
    for snap in traj.snapshots() {
        let path = out_dir.join(format!("snap_t{}.csv", snap.time()));
        if let Err(e) = write_snapshot_csv(&path, snap) {
            return schema_failure(format!("cannot write snapshot: {e}"));
        }
    }
    let manifest = serde_json::json!({
        "name": sc.name,
        "dt": traj.dt(),
        "times": traj.times(),
        "grid": {
            "a1": spec.domain().inner_radius(),
            "a2": spec.domain().outer_radius(),
            "n_r": grid.n_r(),
            "n_theta": grid.n_theta(),
        },
        "config_sha256": config_sha256,
    });
    if let Err(e) = write_json(&out_dir.join("trajectory.json"), &manifest) {
        return schema_failure(format!("cannot write trajectory manifest: {e}"));
    }

    let convention = Convention::for_kind(spec.kind());
    let mut failures = 0usize;
    let mut check = |name: &str, pass: bool, detail: String, messages: &mut Vec<String>| {
        if pass {
            messages.push(format!("PASS {name}: {detail}"));
        } else {
            failures += 1;
            messages.push(format!("FAIL {name}: {detail}"));
        }
    };

    // symmetry diagnostics
    let want_report =
        sc.diagnostics.direction_set || sc.diagnostics.fs_axes || sc.diagnostics.omega;
    let report = if want_report {
        let params = ReportParams {
            sign_tol_rel: sc.tolerances.sign_tol_rel,
            tail_window: sc.checks.tail_window,
            axis_floor_rel: sc.tolerances.axis_floor_rel,
        };
        match symmetry_report(&traj, convention, &params) {
            Ok(r) => Some(r),
            Err(e) => {
                messages.push(format!("FAIL symmetry diagnostics: {e}"));
                return RunOutcome { exit_code: error_exit_code(&e), messages };
            }
        }
    } else {
        None
    };
    if let Some(r) = &report {
        if let Err(e) = write_json(&out_dir.join("symmetry_report.json"), &report_json(r)) {
            return schema_failure(format!("cannot write symmetry report: {e}"));
        }
    }

    if sc.diagnostics.direction_set {
        let series = match simlab_core::symmetry::direction_set_series(
            &traj,
            convention,
            sc.tolerances.sign_tol_rel,
        ) {
            Ok(s) => s,
            Err(e) => {
                messages.push(format!("FAIL direction set: {e}"));
                return RunOutcome { exit_code: error_exit_code(&e), messages };
            }
        };
        let path = out_dir.join("mask_timeseries.csv");
        let write_mask = || -> std::io::Result<()> {
            let mut w = BufWriter::new(File::create(&path)?);
            writeln!(w, "t,direction_index,in_set")?;
            for (s, &t) in series.times.iter().enumerate() {
                for (k, &inside) in series.in_set[s].iter().enumerate() {
                    writeln!(w, "{},{},{}", t, k, u8::from(inside))?;
                }
            }
            Ok(())
        };
        if let Err(e) = write_mask() {
            return schema_failure(format!("cannot write mask timeseries: {e}"));
        }

        // normalized reflection-difference series (semi-trivial limit probe)
        let path = out_dir.join("dichotomy.csv");
        let write_dichotomy = || -> simlab_core::Result<()> {
            let mut w = BufWriter::new(File::create(&path)?);
            writeln!(w, "t,normalized_difference")?;
            for snap in traj.snapshots() {
                let d = difference_pair(snap, e0, convention)?;
                let denom = snap.u1.sup_norm();
                let ratio = if denom == 0.0 { 0.0 } else { d.d1.sup_norm() / denom };
                writeln!(w, "{},{:.16e}", snap.time(), ratio)?;
            }
            Ok(())
        };
        if let Err(e) = write_dichotomy() {
            return schema_failure(format!("cannot write dichotomy series: {e}"));
        }

        if let Some(k) = sc.checks.persistence_direction {
            let lattice = 2 * grid.n_theta();
            if k >= lattice {
                return schema_failure(format!(
                    "persistence direction {k} outside the lattice of {lattice}"
                ));
            }
            let entered = series.in_set.first().map(|row| row[k]).unwrap_or(false);
            let min_margin = (0..series.times.len())
                .map(|s| series.margins[s][k] + series.sign_tols[s])
                .fold(f64::INFINITY, f64::min);
            check(
                "persistence",
                entered && series.monotone[k] && min_margin >= 0.0,
                format!(
                    "direction {k}: in set at t={} {}, monotone {}, worst margin+tol {:.3e}",
                    series.times[0], entered, series.monotone[k], min_margin
                ),
                &mut messages,
            );
        }
    } else if sc.checks.persistence_direction.is_some() {
        return schema_failure("persistence check needs the direction_set diagnostic".into());
    }

    if sc.diagnostics.quotient {
        let taus: Vec<f64> = traj
            .times()
            .into_iter()
            .filter(|&t| t >= 5.0 - 1e-9 && t <= sc.time.t_end - 3.0 + 1e-9)
            .collect();
        let mut etas = Vec::with_capacity(taus.len());
        for &tau in &taus {
            match quotient_diagnostic(&traj, tau) {
                Ok(eta) => etas.push(eta),
                Err(e) => {
                    messages.push(format!("FAIL quotient diagnostic at tau={tau}: {e}"));
                    return RunOutcome { exit_code: error_exit_code(&e), messages };
                }
            }
        }
        let path = out_dir.join("quotient.csv");
        let write_quotient = || -> std::io::Result<()> {
            let mut w = BufWriter::new(File::create(&path)?);
            writeln!(w, "tau,eta")?;
            for (tau, eta) in taus.iter().zip(&etas) {
                writeln!(w, "{},{:.16e}", tau, eta)?;
            }
            Ok(())
        };
        if let Err(e) = write_quotient() {
            return schema_failure(format!("cannot write quotient series: {e}"));
        }
        if let Some(bound) = sc.checks.quotient_max {
            let worst = etas.iter().cloned().fold(1.0f64, f64::max);
            check(
                "quotient",
                !etas.is_empty() && etas.iter().all(|e| e.is_finite()) && worst <= bound,
                format!("max eta {:.4} over {} samples (bound {})", worst, etas.len(), bound),
                &mut messages,
            );
        }
    } else if sc.checks.quotient_max.is_some() {
        return schema_failure("quotient bound needs the quotient diagnostic".into());
    }

    if let Some(r) = &report {
        if sc.checks.require_omega_convergence {
            check(
                "omega convergence",
                r.cauchy_gap <= sc.tolerances.omega_tol,
                format!("cauchy gap {:.3e} (tol {:.1e})", r.cauchy_gap, sc.tolerances.omega_tol),
                &mut messages,
            );
        }
        if let Some(bound) = sc.checks.fs_score_max {
            let s1 = r.final_fs_score1;
            let s2 = r.final_fs_score2.unwrap_or(0.0);
            check(
                "fs score",
                s1 <= bound && s2 <= bound,
                format!("scores {:.3e}, {:.3e} (bound {:.1e})", s1, s2, bound),
                &mut messages,
            );
        }
        if let Some(relation) = sc.checks.axis_relation {
            let tol = sc.tolerances.axis_tol_degrees.to_radians();
            match &r.axis2 {
                Some(a2) => {
                    let p1 = Direction::new(&grid, r.axis1.half_index);
                    let p2 = Direction::new(&grid, a2.half_index);
                    let predicted = match relation {
                        AxisRelation::Antipodal => p1.opposite(),
                        AxisRelation::Aligned => p1,
                    };
                    let angle = angle_between(p2, predicted);
                    check(
                        "axis relation",
                        angle <= tol,
                        format!(
                            "{:?}: axes at {:.4} and {:.4} rad, off by {:.4} rad (tol {:.4})",
                            relation, r.axis1.angle, a2.angle, angle, tol
                        ),
                        &mut messages,
                    );
                }
                None => check(
                    "axis relation",
                    false,
                    "second axis unavailable".into(),
                    &mut messages,
                ),
            }
        }
        if let Some(mult) = sc.checks.axis_vs_mask_max_dtheta {
            let pass = match r.axis_vs_mask_angle {
                Some(angle) => angle <= mult * grid.dtheta(),
                None => false,
            };
            let detail = match r.axis_vs_mask_angle {
                Some(angle) => format!(
                    "axis vs mask midpoint {:.4} rad (bound {:.4})",
                    angle,
                    mult * grid.dtheta()
                ),
                None => format!(
                    "mask arc unavailable: {}",
                    r.mask_arc_error.clone().unwrap_or_default()
                ),
            };
            check("axis vs mask", pass, detail, &mut messages);
        }
    } else if sc.checks.fs_score_max.is_some()
        || sc.checks.axis_relation.is_some()
        || sc.checks.axis_vs_mask_max_dtheta.is_some()
        || sc.checks.require_omega_convergence
    {
        return schema_failure("symmetry checks need at least one symmetry diagnostic".into());
    }

    let exit_code = if failures == 0 { EXIT_OK } else { EXIT_ASSERTION };
    let summary = serde_json::json!({
        "name": sc.name,
        "exit_code": exit_code,
        "config_sha256": config_sha256,
        "checks": messages,
    });
    if let Err(e) = write_json(&out_dir.join("summary.json"), &summary) {
        return schema_failure(format!("cannot write summary: {e}"));
    }
    RunOutcome { exit_code, messages }
}

/// `eigen` subcommand body: print `k,eps,j,lambda` CSV rows to `w`.
pub fn eigen_csv<W: Write>(
    w: &mut W,
    k: u32,
    eps: f64,
    n: usize,
    j_max: usize,
) -> simlab_core::Result<()> {
    let p = simlab_core::bifurcation::SLProblem::new(k, eps, n)?;
    let res = simlab_core::bifurcation::sl_eigen(&p, j_max)?;
    writeln!(w, "k,eps,j,lambda")?;
    for (j, lam) in res.eigenvalues.iter().enumerate() {
        writeln!(w, "{},{},{},{:.16e}", k, eps, j + 1, lam)?;
    }
    Ok(())
}

/// `branch` subcommand body: write the branch state and its elliptic
/// residual under `out_dir`, return `(eps, lambda_star, sup_residual)`.
pub fn branch_bundle(
    out_dir: &Path,
    k: u32,
    amp: f64,
    eps: Option<f64>,
    n_r: usize,
    n_theta: usize,
) -> simlab_core::Result<(f64, f64, f64)> {
    std::fs::create_dir_all(out_dir)?;
    let eps = match eps {
        Some(e) => e,
        None => simlab_core::bifurcation::find_bifurcation(k)?.0,
    };
    let (state, lambda) = build_branch_state(k, eps, amp, n_r, n_theta)?;
    let (res1, _res2) = elliptic_residual(&state, lambda)?;
    for (name, field) in
        [("branch_u1.csv", &state.u1), ("branch_u2.csv", &state.u2), ("residual.csv", &res1)]
    {
        let mut w = BufWriter::new(File::create(out_dir.join(name))?);
        field.write_csv(&mut w)?;
    }
    Ok((eps, lambda, res1.sup_norm()))
}
