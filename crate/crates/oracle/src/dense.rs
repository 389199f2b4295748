//! Gains built from explicit banded matrices and dense products.
//!
//! For a tap vector `v` of length `L` the banded matrix is `L × (L−1)` with
//! entry `(i, j) = v_{L+i−j}` for `i ≤ j` (1-based) and zero below.

use num_complex::Complex64;

pub struct DenseGains {
    pub h_sp: Vec<f64>,
    pub h_si: Vec<f64>,
    pub h_mai: Vec<Vec<f64>>,
}

/// `L × (L−1)` banded matrix, row-major.
pub fn banded(v: &[Complex64]) -> Vec<Vec<Complex64>> {
    let l = v.len();
    (1..=l)
        .map(|i| {
            (1..l)
                .map(|j| {
                    if i <= j {
                        v[l + i - j - 1]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

/// `M^H x`.
fn herm_mul(m: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().zip(x).map(|(row, xi)| row[j].conj() * xi).sum())
        .collect()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

/// Gains for MRC weights on the first `fingers` taps.
pub fn dense_gains(
    alpha: &[Vec<Complex64>],
    fingers: usize,
    chips_per_frame: u32,
    processing_gain: f64,
) -> DenseGains {
    let k = alpha.len();
    let l = alpha[0].len();
    let nc = f64::from(chips_per_frame);
    let phi: Vec<f64> = (1..l)
        .map(|i| (((l - i) as f64).min(nc) / nc).sqrt())
        .collect();
    let beta: Vec<Vec<Complex64>> = alpha
        .iter()
        .map(|a| {
            a.iter()
                .enumerate()
                .map(|(i, &x)| {
                    if i < fingers {
                        x
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    let a_mats: Vec<_> = alpha.iter().map(|a| banded(a)).collect();
    let b_mats: Vec<_> = beta.iter().map(|b| banded(b)).collect();

    let h_sp: Vec<f64> = (0..k).map(|u| inner(&beta[u], &alpha[u]).norm()).collect();
    let h_si = (0..k)
        .map(|u| {
            let x = herm_mul(&b_mats[u], &alpha[u]);
            let y = herm_mul(&a_mats[u], &beta[u]);
            let weighted: Vec<Complex64> = x
                .iter()
                .zip(&y)
                .zip(&phi)
                .map(|((a, b), p)| (a + b) * *p)
                .collect();
            norm_sqr(&weighted) / processing_gain / h_sp[u]
        })
        .collect();
    let h_mai = (0..k)
        .map(|u| {
            (0..k)
                .map(|j| {
                    if j == u {
                        return 0.0;
                    }
                    let total = norm_sqr(&herm_mul(&b_mats[u], &alpha[j]))
                        + norm_sqr(&herm_mul(&a_mats[j], &beta[u]))
                        + inner(&beta[u], &alpha[j]).norm_sqr();
                    total / processing_gain / h_sp[u]
                })
                .collect()
        })
        .collect();
    DenseGains { h_sp, h_si, h_mai }
}
