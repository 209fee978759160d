//! Symmetric tridiagonal eigenpairs via Sturm-sequence bisection and
//! inverse iteration.

use crate::{Error, Result};

/// Symmetric tridiagonal matrix: `diag` of length n, `off` of length n-1.
#[derive(Clone, Debug)]
pub(crate) struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly less than `x` (Sturm count via the
    /// LDL^T recurrence, with a tiny nudge to step over exact pivots).
    fn count_below(&self, x: f64) -> usize {
        let n = self.n();
        let tiny = f64::MIN_POSITIVE;
        let mut count = 0usize;
        let mut d = self.diag[0] - x;
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..n {
            d = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d;
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `j`-th smallest eigenvalue (`j` is 1-based) by bisection.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        // widen slightly so the counts at the endpoints are 0 and n
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Multiply: `y = A x`.
    fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// Eigenvector for an isolated eigenvalue `lambda` by inverse iteration
    /// with a partially pivoted tridiagonal LU of `A - lambda I`.
    ///
    /// `mode_hint` selects a deterministic start vector shaped like the
    /// expected mode (1-based), so one or two sweeps converge.
    pub fn eigenvector(&self, lambda: f64, mode_hint: usize) -> Result<Vec<f64>> {
        let n = self.n();
        // shift slightly off the eigenvalue so the LU is nonsingular
        let scale = self.gershgorin().1.abs().max(1.0);
        let shift = lambda + 1e-13 * scale;
        let lu = TridiagLu::factor(&self.diag, &self.off, shift);
        let mut v: Vec<f64> = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) / n as f64;
                ((mode_hint - 1) as f64 * std::f64::consts::PI * x).cos()
            })
            .collect();
        normalize(&mut v);
        for _ in 0..8 {
            lu.solve(&mut v);
            normalize(&mut v);
            let av = self.matvec(&v);
            let res = av
                .iter()
                .zip(&v)
                .fold(0.0f64, |acc, (a, b)| acc.max((a - lambda * b).abs()));
            if res <= 1e-11 * scale {
                return Ok(v);
            }
        }
        // final residual check with diagnostics
        let av = self.matvec(&v);
        let res = av
            .iter()
            .zip(&v)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - lambda * b).abs()));
        if res <= 1e-8 * scale {
            Ok(v)
        } else {
            Err(Error::Numeric(format!(
                "inverse iteration stalled: residual {res:e} for lambda = {lambda} (n = {n})"
            )))
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().fold(0.0f64, |acc, x| acc + x * x).sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Partially pivoted LU of a tridiagonal matrix `A - shift I`. Pivoting
/// introduces a second superdiagonal.
struct TridiagLu {
    /// multipliers
    l: Vec<f64>,
    /// whether rows i and i+1 were swapped at step i
    swapped: Vec<bool>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl TridiagLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64) -> TridiagLu {
        let n = diag.len();
        let mut u0: Vec<f64> = diag.iter().map(|d| d - shift).collect();
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        u1[..n - 1].copy_from_slice(off);
        let mut sub: Vec<f64> = (0..n).map(|i| if i > 0 { off[i - 1] } else { 0.0 }).collect();
        let mut l = vec![0.0; n];
        let mut swapped = vec![false; n];
        for i in 0..n - 1 {
            if sub[i + 1].abs() > u0[i].abs() {
                swapped[i] = true;
                // swap row i with row i+1
                std::mem::swap(&mut u0[i], &mut sub[i + 1]);
                // row i+1's diagonal moves to u1 of row i
                std::mem::swap(&mut u0[i + 1], &mut u1[i]);
                // row i+1's superdiagonal moves to u2 of row i (was zero)
                if i + 2 < n {
                    u2[i] = u1[i + 1];
                    u1[i + 1] = 0.0;
                }
            }
            let piv = if u0[i] != 0.0 { u0[i] } else { f64::MIN_POSITIVE };
            let m = sub[i + 1] / piv;
            l[i + 1] = m;
            u0[i + 1] -= m * u1[i];
            if i + 2 < n {
                u1[i + 1] -= m * u2[i];
            }
        }
        TridiagLu { l, swapped, u0, u1, u2 }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i + 1] * b[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.u2[i] * b[i + 2];
            }
            let piv = if self.u0[i] != 0.0 { self.u0[i] } else { f64::MIN_POSITIVE };
            b[i] = v / piv;
        }
    }
}
