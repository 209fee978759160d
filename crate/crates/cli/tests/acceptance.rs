//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N PASS/FAIL` line. Tests serialize on a mutex so the timed
//! criteria are not skewed by parallel neighbors.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use ndarray::Array2;
use once_cell::sync::Lazy;

use simlab_cli::runner::{run_scenario, EXIT_HYPOTHESIS, EXIT_OK};
use simlab_cli::scenario::{builtin, InitialFamily};
use simlab_core::bifurcation::{
    angular_sign_changes, build_branch_state, elliptic_residual, find_bifurcation, sl_eigen,
    SLProblem,
};
use simlab_core::domain::{reflect_field, Direction, Field, PolarGrid, RadialDomain};
use simlab_core::model::lotka_volterra_constant;
use simlab_core::solver::{ode_reference, run, StatePair, Trajectory};
use simlab_core::symmetry::{
    angle_between, direction_set_series, symmetry_report, Convention, ReportParams,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(n: u32, pass: bool, detail: &str) {
    println!("criterion {n} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn unit_annulus_grid(n_r: usize, n_theta: usize) -> PolarGrid {
    PolarGrid::new(RadialDomain::annulus(0.5, 1.0).unwrap(), n_r, n_theta).unwrap()
}

fn lv_spec(domain: RadialDomain, alpha: f64) -> simlab_core::model::SystemSpec {
    lotka_volterra_constant(domain, [1.0; 2], [1.0; 2], [1.0; 2], [alpha; 2]).unwrap()
}

/// The LV-A trajectory shared by criteria 3, 4 and 7: unit annulus,
/// alpha = 0.8, oppositely tilted affine data, dt = 2e-3, t_end = 60.
static LVA: Lazy<Trajectory> = Lazy::new(|| {
    let domain = RadialDomain::annulus(0.5, 1.0).unwrap();
    let spec = lv_spec(domain, 0.8);
    let grid = PolarGrid::new(domain, 48, 128).unwrap();
    let u1 = Field::from_fn(grid, 0.0, |r, th| 1.0 + 0.3 * r * th.cos()).unwrap();
    let u2 = Field::from_fn(grid, 0.0, |r, th| 1.0 - 0.3 * r * th.cos()).unwrap();
    let state = StatePair::new(u1, u2).unwrap();
    let times: Vec<f64> = (1..=24).map(|i| i as f64 * 2.5).collect();
    run(&spec, &state, 0.002, &times).unwrap()
});

fn rotate(u: &Field, s: usize) -> Field {
    let g = *u.grid();
    let n = g.n_theta();
    let mut v = Array2::zeros((g.n_r(), n));
    for j in 0..g.n_r() {
        for m in 0..n {
            v[[j, (m + s) % n]] = u.values()[[j, m]];
        }
    }
    Field::new(g, v, u.time()).unwrap()
}

fn fresh_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("simlab_acceptance_{name}"));
    std::fs::remove_dir_all(&dir).ok();
    dir
}

#[test]
fn criterion_01_equivariance() {
    let _guard = serial();
    let start = Instant::now();

    // radial data with radial coefficients stays radial on disk and annulus
    let mut worst_dev = 0.0f64;
    for domain in [RadialDomain::disk(1.0).unwrap(), RadialDomain::annulus(0.5, 1.0).unwrap()] {
        let spec = lv_spec(domain, 0.8);
        let grid = PolarGrid::new(domain, 64, 128).unwrap();
        let mid = 0.5 * (domain.inner_radius() + domain.outer_radius());
        let u1 = Field::from_fn(grid, 0.0, |r, _| 1.0 + 0.2 * (-(8.0 * (r - mid)).powi(2)).exp())
            .unwrap();
        let u2 = Field::from_fn(grid, 0.0, |r, _| 1.2 - 0.2 * r).unwrap();
        let state = StatePair::new(u1, u2).unwrap();
        let times: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let traj = run(&spec, &state, 0.01, &times).unwrap();
        for snap in traj.snapshots() {
            for i in 0..2 {
                let u = snap.component(i);
                worst_dev = worst_dev.max(u.angular_deviation() / u.sup_norm());
            }
        }
    }
    let radial_ok = worst_dev <= 1e-10;

    // bitwise rotation/reflection commutation of the full step
    let grid = unit_annulus_grid(16, 32);
    let spec = lv_spec(grid.domain(), 0.8);
    let u1 = Field::from_fn(grid, 0.0, |r, th| 1.0 + 0.3 * r * (th + 0.4).cos()).unwrap();
    let u2 = Field::from_fn(grid, 0.0, |r, th| 1.1 - 0.2 * r * (2.0 * th + 0.9).sin()).unwrap();
    let evolve = |s: &StatePair| -> StatePair {
        let traj = run(&spec, s, 0.005, &[0.1]).unwrap();
        traj.last().clone()
    };
    let base = StatePair::new(u1.clone(), u2.clone()).unwrap();
    let evolved = evolve(&base);
    let mut commute_ok = true;
    for k in [0usize, 5, 17, 40] {
        let e = Direction::new(&grid, k);
        let refl =
            StatePair::new(reflect_field(&u1, e).unwrap(), reflect_field(&u2, e).unwrap())
                .unwrap();
        let a = evolve(&refl);
        for i in 0..2 {
            commute_ok &= reflect_field(evolved.component(i), e).unwrap().values()
                == a.component(i).values();
        }
    }
    for s in [1usize, 7, 19] {
        let rot = StatePair::new(rotate(&u1, s), rotate(&u2, s)).unwrap();
        let a = evolve(&rot);
        for i in 0..2 {
            commute_ok &= rotate(evolved.component(i), s).values() == a.component(i).values();
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    let time_ok = elapsed < 10.0;
    report(
        1,
        radial_ok && commute_ok && time_ok,
        &format!(
            "max relative angular deviation {worst_dev:.2e} (tol 1e-10), bitwise commutation {}, \
             runtime {elapsed:.1}s (limit 10s)",
            if commute_ok { "exact" } else { "broken" }
        ),
    );
}

#[test]
fn criterion_02_ode_oracle() {
    let _guard = serial();
    let grid = unit_annulus_grid(4, 8);

    // symmetric equilibrium is held to 1e-8
    let spec_eq = lv_spec(grid.domain(), 1.0);
    let u = Field::from_fn(grid, 0.0, |_, _| 0.5).unwrap();
    let state = StatePair::new(u.clone(), u).unwrap();
    let times: Vec<f64> = (1..=10).map(|i| 5.0 * i as f64).collect();
    let traj = run(&spec_eq, &state, 1e-3, &times).unwrap();
    let eq_err = traj.snapshots().iter().fold(0.0f64, |acc, s| {
        acc.max(
            s.u1.values().iter().chain(s.u2.values()).fold(0.0f64, |a, v| a.max((v - 0.5).abs())),
        )
    });
    let eq_ok = eq_err <= 1e-8;

    // non-trivial start vs the adaptive ODE reference
    let spec = lv_spec(grid.domain(), 0.5);
    let times: Vec<f64> = (1..=40).map(|i| 5.0 * i as f64).collect();
    let oracle = ode_reference(&spec, [0.2, 0.9], 0.0, &times).unwrap();
    let pde_error = |dt: f64| -> f64 {
        let u1 = Field::from_fn(grid, 0.0, |_, _| 0.2).unwrap();
        let u2 = Field::from_fn(grid, 0.0, |_, _| 0.9).unwrap();
        let state = StatePair::new(u1, u2).unwrap();
        let traj = run(&spec, &state, dt, &times).unwrap();
        let mut err = 0.0f64;
        for (snap, reference) in traj.snapshots().iter().skip(1).zip(&oracle) {
            for (i, r) in reference.iter().enumerate() {
                for v in snap.component(i).values() {
                    err = err.max((v - r).abs());
                }
            }
        }
        err
    };
    let e1 = pde_error(1e-3);
    let e2 = pde_error(5e-4);
    let ratio = e1 / e2;
    report(
        2,
        eq_ok && e1 <= 1e-4 && ratio >= 1.8,
        &format!(
            "equilibrium drift {eq_err:.2e} (tol 1e-8), oracle error {e1:.2e} (tol 1e-4), \
             halving ratio {ratio:.2} (min 1.8)"
        ),
    );
}

#[test]
fn criterion_03_reflection_order_persistence() {
    let _guard = serial();
    let series = direction_set_series(&LVA, Convention::Competitive, 1e-8).unwrap();
    let k = 0usize;
    let min_shifted = (0..series.times.len())
        .map(|s| series.margins[s][k] + series.sign_tols[s])
        .fold(f64::INFINITY, f64::min);
    let entered_at_start = series.in_set[0][k];
    report(
        3,
        min_shifted >= 0.0 && entered_at_start && series.monotone[k],
        &format!(
            "e0 margin stays >= -sign_tol (worst margin+tol {min_shifted:.2e}), \
             in set from t=0: {entered_at_start}, monotone: {}",
            series.monotone[k]
        ),
    );
}

#[test]
fn criterion_04_antipodal_fs_symmetry() {
    let _guard = serial();
    let params = ReportParams { sign_tol_rel: 1e-8, tail_window: 5, axis_floor_rel: 1e-6 };
    let rep = symmetry_report(&LVA, Convention::Competitive, &params).unwrap();
    let grid = *LVA.grid();
    let gap_ok = rep.cauchy_gap <= 1e-4;
    let s1 = rep.final_fs_score1;
    let s2 = rep.final_fs_score2.unwrap();
    let scores_ok = s1 <= 1e-3 && s2 <= 1e-3;
    let antipodal_ok = rep.antipodal_mismatch_angle <= 5.0f64.to_radians();
    let mask_angle = rep.axis_vs_mask_angle.unwrap_or(f64::INFINITY);
    let mask_ok = mask_angle <= 2.0 * grid.dtheta();
    report(
        4,
        gap_ok && scores_ok && antipodal_ok && mask_ok,
        &format!(
            "cauchy gap {:.2e} (tol 1e-4), fs scores {s1:.2e}/{s2:.2e} (tol 1e-3), \
             antipodal mismatch {:.4} rad (tol {:.4}), axis vs mask {mask_angle:.4} rad \
             (tol {:.4})",
            rep.cauchy_gap,
            rep.antipodal_mismatch_angle,
            5.0f64.to_radians(),
            2.0 * grid.dtheta()
        ),
    );
}

#[test]
fn criterion_05_scalar_theorem() {
    let _guard = serial();
    let sc = builtin("SCALAR-SIGN-CHANGING").unwrap();
    let dir = fresh_dir("scalar");
    let outcome = run_scenario(&sc, &dir);
    let run_ok = outcome.exit_code == EXIT_OK;

    // the bundle's report must certify the tail fs score
    let report_json: serde_json::Value = serde_json::from_slice(
        &std::fs::read(dir.join("symmetry_report.json")).expect("symmetry report written"),
    )
    .unwrap();
    let score = report_json["final_fs_score1"].as_f64().unwrap();

    // radial data is excluded by the reflection-hypothesis gate
    let mut radial = sc.clone();
    radial.initial.u1 = InitialFamily::RadialBump { base: 0.1, amplitude: 0.3 };
    let gate = run_scenario(&radial, &fresh_dir("scalar_gate"));
    let gate_ok = gate.exit_code == EXIT_HYPOTHESIS;

    report(
        5,
        run_ok && score <= 1e-3 && gate_ok,
        &format!(
            "scenario exit {} (want 0), tail fs score {score:.2e} (tol 1e-3), \
             radial gate exit {} (want 3)",
            outcome.exit_code, gate.exit_code
        ),
    );
}

#[test]
fn criterion_06_cooperative_theorem() {
    let _guard = serial();
    let sc = builtin("COOP-A").unwrap();
    let dir = fresh_dir("coop");
    let outcome = run_scenario(&sc, &dir);
    let report_json: serde_json::Value = serde_json::from_slice(
        &std::fs::read(dir.join("symmetry_report.json")).expect("symmetry report written"),
    )
    .unwrap();
    let grid = unit_annulus_grid(sc.grid.n_r, sc.grid.n_theta);
    let p1 = Direction::new(&grid, report_json["axis1"]["half_index"].as_u64().unwrap() as usize);
    let p2 = Direction::new(&grid, report_json["axis2"]["half_index"].as_u64().unwrap() as usize);
    let angle = angle_between(p1, p2);
    report(
        6,
        outcome.exit_code == EXIT_OK && angle <= 5.0f64.to_radians(),
        &format!(
            "scenario exit {} (want 0), aligned axes {:.4} rad apart (tol {:.4})",
            outcome.exit_code,
            angle,
            5.0f64.to_radians()
        ),
    );
}

#[test]
fn criterion_07_quotient_diagnostic() {
    let _guard = serial();
    let taus: Vec<f64> =
        LVA.times().into_iter().filter(|&t| (5.0 - 1e-9..=55.0 + 1e-9).contains(&t)).collect();
    let mut worst = 1.0f64;
    let mut all_finite = !taus.is_empty();
    for &tau in &taus {
        match simlab_core::symmetry::quotient_diagnostic(&LVA, tau) {
            Ok(eta) => {
                all_finite &= eta.is_finite();
                worst = worst.max(eta);
            }
            Err(_) => all_finite = false,
        }
    }
    report(
        7,
        all_finite && worst <= 10.0,
        &format!("eta finite at {} taus in [5,55], max eta {worst:.4} (bound 10)", taus.len()),
    );
}

#[test]
fn criterion_08_appendix_eigenvalues() {
    let _guard = serial();
    let start = Instant::now();

    let zero_mode = sl_eigen(&SLProblem::new(0, 0.5, 64).unwrap(), 1).unwrap().eigenvalues[0];
    let zero_ok = zero_mode.abs() <= 1e-10;

    // lambda_1(3, 1e-3) at n = 512 with a Richardson consistency check
    let lam256 = sl_eigen(&SLProblem::new(3, 1e-3, 256).unwrap(), 1).unwrap().eigenvalues[0];
    let lam512 = sl_eigen(&SLProblem::new(3, 1e-3, 512).unwrap(), 1).unwrap().eigenvalues[0];
    let richardson = lam512 + (lam512 - lam256) / 3.0;
    let thin_ok = (lam512 - 9.0).abs() <= 0.1 && (richardson - lam512).abs() <= 0.01;

    // strict monotonicity in k at eps = 0.05
    let lams: Vec<f64> = (0..=6)
        .map(|k| sl_eigen(&SLProblem::new(k, 0.05, 256).unwrap(), 1).unwrap().eigenvalues[0])
        .collect();
    let mono_ok = lams.windows(2).all(|w| w[1] > w[0]);

    // lambda_2(0, eps) dominates lambda_1(3, eps) with >= 10% margin
    let mut margin_ok = true;
    for eps in [0.05, 0.02, 0.01] {
        let lam2 = sl_eigen(&SLProblem::new(0, eps, 256).unwrap(), 2).unwrap().eigenvalues[1];
        let lam1 = sl_eigen(&SLProblem::new(3, eps, 256).unwrap(), 1).unwrap().eigenvalues[0];
        margin_ok &= lam2 >= 1.1 * lam1;
    }

    let elapsed = start.elapsed().as_secs_f64();
    let time_ok = elapsed < 5.0;
    report(
        8,
        zero_ok && thin_ok && mono_ok && margin_ok && time_ok,
        &format!(
            "lambda_1(0,0.5) = {zero_mode:.2e} (tol 1e-10), lambda_1(3,1e-3) = {lam512:.4} \
             (|.-9| <= 0.1, Richardson drift {:.2e}), k-monotone {mono_ok}, \
             lambda_2 margin {margin_ok}, runtime {elapsed:.2}s (limit 5s)",
            (richardson - lam512).abs()
        ),
    );
}

#[test]
fn criterion_09_appendix_branch() {
    let _guard = serial();
    let k = 3u32;
    let (eps, lambda) = find_bifurcation(k).unwrap();
    let (n_r, n_theta) = (64usize, 256usize);

    let amps = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
    let mut logs = Vec::new();
    for &t in &amps {
        let (state, lam) = build_branch_state(k, eps, t, n_r, n_theta).unwrap();
        let (r1, r2) = elliptic_residual(&state, lam).unwrap();
        logs.push((t.ln(), r1.sup_norm().max(r2.sup_norm()).ln()));
    }
    // least-squares slope of ln(residual) vs ln(t)
    let n = logs.len() as f64;
    let (sx, sy): (f64, f64) = logs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (sxx, sxy): (f64, f64) =
        logs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x * x, b + x * y));
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let slope_ok = (slope - 2.0).abs() <= 0.1;

    // 2k angular sign changes on every ring; positivity near the amplitude
    // cap (the cap is checked against the branch grid's own lambda*, which
    // differs from the search grid's by O(dr^2))
    let t_cap = 0.099 * lambda;
    let (state, _) = build_branch_state(k, eps, t_cap, n_r, n_theta).unwrap();
    let signs_ok =
        (0..n_r).all(|j| angular_sign_changes(&state.u1, j) == 2 * k as usize);
    let positive_ok = state.min_value() > 0.0;

    report(
        9,
        slope_ok && signs_ok && positive_ok,
        &format!(
            "eps* = {eps:.4}, lambda* = {lambda:.4}, residual log-log slope {slope:.3} \
             (2.0 +- 0.1), sign changes = 2k on all rings {signs_ok}, \
             positive at t = 0.1 lambda* {positive_ok}"
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let _guard = serial();
    let mut sc = builtin("LV-A").unwrap();
    sc.time.t_end = 5.0;
    sc.checks.require_omega_convergence = false;
    sc.checks.fs_score_max = None;
    sc.checks.axis_relation = None;
    sc.checks.quotient_max = None;
    sc.diagnostics.quotient = false;
    let config = fresh_dir("det_config");
    std::fs::create_dir_all(&config).unwrap();
    let config_path = config.join("scenario.json");
    std::fs::write(&config_path, serde_json::to_vec_pretty(&sc).unwrap()).unwrap();

    let run_once = |tag: &str, threads: &str| -> PathBuf {
        let dir = fresh_dir(tag);
        let status = Command::new(env!("CARGO_BIN_EXE_simlab"))
            .args([
                "run",
                "--config",
                config_path.to_str().unwrap(),
                "--out",
                dir.to_str().unwrap(),
                "--threads",
                threads,
            ])
            .status()
            .expect("binary runs");
        assert_eq!(status.code(), Some(0), "determinism run exited nonzero");
        dir
    };
    let a = run_once("det_a", "1");
    let b = run_once("det_b", "1");
    let c = run_once("det_c", "4");

    let listing = |d: &Path| -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names
    };
    let names = listing(&a);
    let mut identical = names == listing(&b) && names == listing(&c);
    if identical {
        for name in &names {
            let bytes_a = std::fs::read(a.join(name)).unwrap();
            identical &= bytes_a == std::fs::read(b.join(name)).unwrap();
            identical &= bytes_a == std::fs::read(c.join(name)).unwrap();
        }
    }
    report(
        10,
        identical && !names.is_empty(),
        &format!(
            "{} bundle files byte-identical across two runs and thread counts {{1, 4}}: \
             {identical}",
            names.len()
        ),
    );
}
