//! Tridiagonal and circulant solves used by the implicit diffusion sweeps.

/// Prefactored Thomas solver for a tridiagonal system shared by many
/// right-hand sides (one radial line per angle).
#[derive(Clone, Debug)]
pub(crate) struct Tridiag {
    sub: Vec<f64>,
    /// `1 / (b_j - a_j cprime_{j-1})`
    inv_piv: Vec<f64>,
    /// normalized superdiagonal after forward elimination
    cprime: Vec<f64>,
}

impl Tridiag {
    /// Factor the matrix with subdiagonal `sub`, diagonal `diag` and
    /// superdiagonal `sup` (`sub[0]` and `sup[n-1]` are ignored). The matrix
    /// must be diagonally dominant, as the implicit diffusion matrices are.
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Tridiag {
        let n = diag.len();
        assert!(n >= 1 && sub.len() == n && sup.len() == n);
        let mut inv_piv = vec![0.0; n];
        let mut cprime = vec![0.0; n];
        inv_piv[0] = 1.0 / diag[0];
        cprime[0] = sup[0] * inv_piv[0];
        for j in 1..n {
            let piv = diag[j] - sub[j] * cprime[j - 1];
            inv_piv[j] = 1.0 / piv;
            cprime[j] = sup[j] * inv_piv[j];
        }
        Tridiag { sub: sub.to_vec(), inv_piv, cprime }
    }

    /// Solve in place.
    pub fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        debug_assert_eq!(n, self.inv_piv.len());
        x[0] *= self.inv_piv[0];
        for j in 1..n {
            x[j] = (x[j] - self.sub[j] * x[j - 1]) * self.inv_piv[j];
        }
        for j in (0..n - 1).rev() {
            x[j] -= self.cprime[j] * x[j + 1];
        }
    }
}

/// Impulse response of the periodic implicit angular sweep
/// `(I + d (2 I - S - S^{-1})) u = rhs` on a ring of `n` nodes.
///
/// Computed from the circulant eigendecomposition,
/// `g_k = (1/n) sum_j cos(2 pi j k / n) / (1 + 2 d (1 - cos(2 pi j / n)))`,
/// evaluated through a shared cosine table so that `g_k == g_{n-k}` holds
/// bitwise. Applying the kernel with [`apply_circulant_kernel`] then commutes
/// bitwise with every grid rotation and reflection.
pub(crate) fn circulant_kernel(n: usize, d: f64) -> Vec<f64> {
    assert!(n >= 4 && n.is_multiple_of(2));
    let cos_table: Vec<f64> =
        (0..n).map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()).collect();
    let eig: Vec<f64> = (0..n).map(|j| 1.0 / (1.0 + 2.0 * d * (1.0 - cos_table[j]))).collect();
    let mut g = vec![0.0; n];
    let inv_n = 1.0 / n as f64;
    for (k, gk) in g.iter_mut().enumerate().take(n / 2 + 1) {
        let mut acc = 0.0;
        for (j, lam) in eig.iter().enumerate() {
            acc += cos_table[(j * k) % n] * lam;
        }
        *gk = acc * inv_n;
    }
    for k in n / 2 + 1..n {
        g[k] = g[n - k];
    }
    g
}

/// Apply a symmetric circulant kernel to a ring.
///
/// The accumulation pairs antipodal offsets, `g_k (rhs_{m+k} + rhs_{m-k})`,
/// so reflected or rotated input produces the bitwise-reflected or -rotated
/// output (IEEE addition is commutative).
pub(crate) fn apply_circulant_kernel(g: &[f64], rhs: &[f64], out: &mut [f64]) {
    let n = g.len();
    debug_assert!(rhs.len() == n && out.len() == n);
    let mut ext = vec![0.0; 2 * n];
    ext[..n].copy_from_slice(rhs);
    ext[n..].copy_from_slice(rhs);
    let half = n / 2;
    for (m, o) in out.iter_mut().enumerate() {
        let mut acc = g[0] * ext[m] + g[half] * ext[m + half];
        for k in 1..half {
            acc += g[k] * (ext[m + k] + ext[m + n - k]);
        }
        *o = acc;
    }
}
