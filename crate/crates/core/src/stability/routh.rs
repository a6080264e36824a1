use nalgebra::DMatrix;

use super::polynomial::{s_to_mu, ComplexPolynomial, MuPolynomial};
use super::{Binding, StabilityStatus, StabilityVerdict};
use crate::error::Result;

/// Relative tolerance below which a normalized minor counts as zero.
pub const DEFAULT_MARGINAL_TOL: f64 = 1e-9;

const PIVOT_GROWTH_WARN: f64 = 1e8;

/// The `2n × 2n` array whose leading even-order minors decide whether every
/// root `μ` has `Im μ > 0`.
///
/// Row pair `i` is shifted right by `i` columns and holds
/// `1, f_{n−1}, …, f₀` and `0, g_{n−1}, …, g₀`.
pub fn hurwitz_array(mu: &MuPolynomial) -> DMatrix<f64> {
    let n = mu.degree();
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    fill_array(mu, |r, c, v| a[(r, c)] = v);
    a
}

fn fill_array(mu: &MuPolynomial, mut set: impl FnMut(usize, usize, f64)) {
    let n = mu.degree();
    for i in 0..n {
        set(2 * i, i, 1.0);
        for m in 0..n {
            set(2 * i, i + 1 + m, mu.f[n - 1 - m]);
            set(2 * i + 1, i + 1 + m, mu.g[n - 1 - m]);
        }
    }
}

/// `Δ_{2k}` for `k = 1..n`, unnormalized.
pub fn hurwitz_minors(mu: &MuPolynomial) -> Vec<f64> {
    let (dets, _) = minors_with_bounds(mu);
    dets
}

/// Leading minors together with their Hadamard bounds `Π ‖row‖₂`.
fn minors_with_bounds(mu: &MuPolynomial) -> (Vec<f64>, Vec<f64>) {
    let n = mu.degree();
    let dim = 2 * n;
    let mut a = vec![0.0; dim * dim];
    fill_array(mu, |r, c, v| a[r * dim + c] = v);
    let mut work = vec![0.0; dim * dim];
    let mut dets = Vec::with_capacity(n);
    let mut bounds = Vec::with_capacity(n);
    for k in 1..=n {
        let m = 2 * k;
        let mut hadamard = 1.0;
        for r in 0..m {
            let row = &a[r * dim..r * dim + m];
            hadamard *= row.iter().map(|v| v * v).sum::<f64>().sqrt();
            work[r * m..(r + 1) * m].copy_from_slice(row);
        }
        dets.push(lu_determinant(&mut work[..m * m], m));
        bounds.push(hadamard);
    }
    (dets, bounds)
}

/// Determinant by Gaussian elimination with partial pivoting, in place.
fn lu_determinant(a: &mut [f64], m: usize) -> f64 {
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut det = 1.0;
    let mut growth: f64 = 0.0;
    for col in 0..m {
        let (pivot_row, pivot) = (col..m)
            .map(|r| (r, a[r * m + col]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .unwrap();
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for c in 0..m {
                a.swap(col * m + c, pivot_row * m + c);
            }
            det = -det;
        }
        det *= pivot;
        growth = growth.max(pivot.abs());
        for r in col + 1..m {
            let factor = a[r * m + col] / pivot;
            if factor != 0.0 {
                for c in col + 1..m {
                    a[r * m + c] -= factor * a[col * m + c];
                }
            }
        }
    }
    if scale > 0.0 && growth / scale > PIVOT_GROWTH_WARN {
        log::debug!("pivot growth {:.3e} in {m}x{m} minor", growth / scale);
    }
    det
}

/// Left-half-plane test for a monic complex polynomial.
///
/// The polynomial is first rescaled so its roots have unit-order magnitude
/// (this does not move roots across the imaginary axis) and mapped to
/// `μ = −js`. Each signed minor `(−1)^k Δ_{2k}` is divided by its Hadamard
/// bound and then by the previous normalized minor, the analogue of a Routh
/// first-column entry. For real coefficients `Δ_{2n}` carries the square of
/// a lower Hurwitz determinant, so the raw minor would vanish quadratically
/// at the boundary; the ratio vanishes linearly.
///
/// The chain is read in order and the first entry that is not above
/// `marginal_tol` decides the verdict: below `−marginal_tol` is unstable,
/// otherwise marginal.
pub fn routh_hurwitz_complex(p: &ComplexPolynomial, marginal_tol: f64) -> Result<StabilityVerdict> {
    p.validate()?;
    if p.coeffs().iter().all(|c| c.norm() == 0.0) {
        // sⁿ: every root at the origin
        return Ok(verdict(StabilityStatus::Marginal, 0, 0.0));
    }
    let scaled = p.rescale(p.balancing_scale());
    let mu = s_to_mu(&scaled);
    let (dets, bounds) = minors_with_bounds(&mu);
    let normalized = dets.iter().zip(&bounds).enumerate().map(|(i, (&d, &h))| {
        let signed = if (i + 1) % 2 == 1 { -d } else { d };
        if h > 0.0 {
            signed / h
        } else {
            0.0
        }
    });
    let mut margins = Vec::with_capacity(dets.len());
    let mut previous = 1.0;
    for (k, value) in normalized.enumerate() {
        let margin = value / previous;
        margins.push(margin);
        if margin <= marginal_tol {
            let status = if margin < -marginal_tol {
                StabilityStatus::Unstable
            } else {
                StabilityStatus::Marginal
            };
            return Ok(verdict(status, k, margin));
        }
        previous = value;
    }
    let k = margins
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    Ok(verdict(StabilityStatus::Stable, k, margins[k]))
}

fn verdict(status: StabilityStatus, k: usize, margin: f64) -> StabilityVerdict {
    StabilityVerdict {
        status,
        binding: Binding::Minor(k + 1),
        witness: None,
        margin,
    }
}

/// Classical Routh array for a real monic polynomial with coefficients
/// `b₀..b_{n−1}`. `None` when a zero lands in the first column.
pub fn routh_array_stable(coeffs: &[f64]) -> Option<bool> {
    let n = coeffs.len();
    // descending: a[0] = 1, a[i] = b_{n−i}
    let desc: Vec<f64> = std::iter::once(1.0).chain(coeffs.iter().rev().copied()).collect();
    let width = n / 2 + 1;
    let mut prev: Vec<f64> = (0..width).map(|i| desc.get(2 * i).copied().unwrap_or(0.0)).collect();
    let mut cur: Vec<f64> = (0..width).map(|i| desc.get(2 * i + 1).copied().unwrap_or(0.0)).collect();
    let mut first_column = vec![prev[0]];
    for _ in 0..n {
        if cur[0] == 0.0 {
            return None;
        }
        first_column.push(cur[0]);
        let next: Vec<f64> = (0..width)
            .map(|i| {
                let a = prev.get(i + 1).copied().unwrap_or(0.0);
                let b = cur.get(i + 1).copied().unwrap_or(0.0);
                (cur[0] * a - prev[0] * b) / cur[0]
            })
            .collect();
        prev = cur;
        cur = next;
    }
    Some(first_column.iter().all(|&v| v > 0.0))
}
