use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::NeighborhoodScaling;

/// `λ₂` of the ring fuzz with uniform weight `w` and even neighborhood `q`:
/// `Σ_{k=−q/2}^{q/2} w(1 − cos(2πk/N))`.
pub fn ring_fuzz_lambda2(q: usize, n: usize, w: f64) -> f64 {
    (1..=q / 2)
        .map(|k| {
            let half = (PI * k as f64 / n as f64).sin();
            2.0 * w * 2.0 * half * half
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateRow {
    pub n: usize,
    pub q: usize,
    pub lambda2: f64,
    pub lower_bound: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub c: f64,
    pub w_min: f64,
    pub tol: f64,
    pub rows: Vec<CertificateRow>,
    /// Sizes with `q ≥ N`, where the ring fuzz does not exist.
    pub skipped: Vec<usize>,
    pub min_lambda2: Option<f64>,
}

impl CertificateReport {
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }

    /// Columns `N,q,lambda2,lower_bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,q,lambda2,lower_bound\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.n, r.q, r.lambda2, r.lower_bound);
        }
        out
    }
}

/// With `q` the smallest even integer `≥ cN^{2/3}`, checks
/// `λ₂ ≥ (2/3)c³w_min(1 − tol)` for every `N` in `sizes`.
pub fn theorem5_certificate(c: f64, w_min: f64, sizes: &[usize], tol: f64) -> Result<CertificateReport> {
    if !(c > 0.0 && c.is_finite()) || !(w_min > 0.0 && w_min.is_finite()) {
        return Err(Error::InvalidArgument("c and w_min must be positive".into()));
    }
    let scaling = NeighborhoodScaling::Power {
        c,
        exponent: 2.0 / 3.0,
    };
    let lower_bound = 2.0 / 3.0 * c * c * c * w_min;
    let (skipped, kept): (Vec<usize>, Vec<usize>) = sizes.iter().partition(|&&n| scaling.q_for(n) >= n);
    for n in &skipped {
        log::info!("N = {n} skipped: q = {} is not below N", scaling.q_for(*n));
    }
    let rows: Vec<CertificateRow> = kept
        .par_iter()
        .map(|&n| {
            let q = scaling.q_for(n);
            let lambda2 = ring_fuzz_lambda2(q, n, w_min);
            CertificateRow {
                n,
                q,
                lambda2,
                lower_bound,
                satisfied: lambda2 >= lower_bound * (1.0 - tol),
            }
        })
        .collect();
    let min_lambda2 = rows.iter().map(|r| r.lambda2).reduce(f64::min);
    Ok(CertificateReport {
        c,
        w_min,
        tol,
        rows,
        skipped,
        min_lambda2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{algebraic_connectivity, circulant_spectrum};

    #[test]
    fn cosine_sum_matches_spectrum() {
        for (q, n) in [(2usize, 10usize), (6, 50), (50, 1000)] {
            let offsets: Vec<(i64, f64)> = (1..=(q / 2) as i64).flat_map(|k| [(-k, 1.0), (k, 1.0)]).collect();
            let spec = circulant_spectrum(&offsets, n).unwrap();
            let l2 = algebraic_connectivity(&spec).unwrap().re;
            assert!((ring_fuzz_lambda2(q, n, 1.0) - l2).abs() < 1e-12);
        }
    }

    #[test]
    fn thousand_nodes() {
        let r = theorem5_certificate(0.5, 1.0, &[1000], 0.05).unwrap();
        assert_eq!(r.rows[0].q, 50);
        let direct: f64 = (-25i32..=25).map(|k| 1.0 - (2.0 * PI * k as f64 / 1000.0).cos()).sum();
        assert!((r.rows[0].lambda2 - direct).abs() < 1e-12);
        assert!((r.rows[0].lambda2 - 0.218).abs() < 1e-3);
        assert!((r.rows[0].lower_bound - 0.0833).abs() < 1e-4);
        assert!(r.all_satisfied());
    }

    #[test]
    fn small_sizes_are_skipped() {
        let r = theorem5_certificate(2.0, 1.0, &[4, 1000], 0.05).unwrap();
        assert_eq!(r.skipped, vec![4]);
        assert_eq!(r.rows.len(), 1);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(theorem5_certificate(0.0, 1.0, &[10], 0.05).is_err());
        assert!(theorem5_certificate(1.0, -1.0, &[10], 0.05).is_err());
    }
}
