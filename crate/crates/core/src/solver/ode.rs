use crate::model::SystemSpec;
use crate::{Error, Result};

const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-12;
const MAX_STEPS: usize = 50_000_000;

/// Reference integrator for the spatially homogeneous reduction
/// `u' = g(t, u)` of a system, used as an independent oracle for the PDE
/// stepper on constant-in-space data.
///
/// Adaptive Dormand-Prince 5(4) with `rtol = 1e-10`, `atol = 1e-12`.
/// Returns the solution at each requested time (finite, strictly
/// increasing, starting no earlier than `t0`). Systems whose reaction
/// depends on the radius have no homogeneous reduction and are rejected.
pub fn ode_reference(
    spec: &SystemSpec,
    u0: [f64; 2],
    t0: f64,
    times: &[f64],
) -> Result<Vec<[f64; 2]>> {
    if spec.reaction_depends_on_radius() {
        return Err(Error::Config(
            "reaction depends on the radius; no spatially homogeneous reduction exists".into(),
        ));
    }
    if times.is_empty() {
        return Err(Error::Config("at least one output time is required".into()));
    }
    if !times.iter().all(|t| t.is_finite()) || !times.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config("output times must be finite and strictly increasing".into()));
    }
    if times[0] < t0 {
        return Err(Error::Config("output times must not precede the initial time".into()));
    }
    // the radius argument is immaterial; evaluate at the domain midpoint
    let r = 0.5 * (spec.domain().inner_radius() + spec.domain().outer_radius());
    let f = |t: f64, y: [f64; 2]| -> [f64; 2] {
        let (g1, g2) = spec.eval_reaction(t, r, y[0], y[1]);
        [g1, g2]
    };

    // Dormand-Prince 5(4) tableau
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // 5th-order weights equal the last row of A (FSAL); 4th-order weights:
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut t = t0;
    let mut y = u0;
    let mut k0 = f(t, y);
    let span = times[times.len() - 1] - t0;
    let mut h = (span.max(1e-12)) * 1e-4;
    let mut out = Vec::with_capacity(times.len());
    let mut target = 0usize;

    for _ in 0..MAX_STEPS {
        if target >= times.len() {
            break;
        }
        while target < times.len() && times[target] <= t {
            // exactly at (or within roundoff past) an output time
            out.push(y);
            target += 1;
        }
        if target >= times.len() {
            break;
        }
        let h_step = h.min(times[target] - t);
        let mut k = [[0.0f64; 2]; 7];
        k[0] = k0;
        for s in 1..7 {
            let mut ys = y;
            for (i, ks) in k.iter().enumerate().take(s) {
                for d in 0..2 {
                    ys[d] += h_step * A[s][i] * ks[d];
                }
            }
            k[s] = f(t + C[s] * h_step, ys);
        }
        // k[6] was evaluated at y5 = y + h sum A[6][i] k[i] (FSAL)
        let mut y5 = y;
        for (i, ks) in k.iter().enumerate().take(6) {
            for d in 0..2 {
                y5[d] += h_step * A[6][i] * ks[d];
            }
        }
        let mut err = 0.0f64;
        for d in 0..2 {
            let mut y4 = y[d];
            for (i, ks) in k.iter().enumerate() {
                y4 += h_step * B4[i] * ks[d];
            }
            let sc = ATOL + RTOL * y[d].abs().max(y5[d].abs());
            let e = (y5[d] - y4) / sc;
            err += e * e;
        }
        let err = (err / 2.0).sqrt();
        if !y5.iter().all(|v| v.is_finite()) {
            return Err(Error::BlowUp {
                time: t,
                detail: "reference ODE solution became non-finite".into(),
            });
        }
        if err <= 1.0 {
            t += h_step;
            y = y5;
            k0 = k[6];
            if (times[target] - t).abs() <= 1e-14 * (1.0 + times[target].abs()) {
                t = times[target];
            }
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h = (h_step * factor.clamp(0.2, 5.0)).max(1e-14 * (1.0 + t.abs()));
    }
    while target < times.len() && times[target] <= t {
        out.push(y);
        target += 1;
    }
    if out.len() != times.len() {
        return Err(Error::Numeric("reference ODE integration exceeded the step budget".into()));
    }
    Ok(out)
}
