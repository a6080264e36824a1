use std::f64::consts::PI;

use num_complex::Complex64;

use super::{laplacian_spectrum, ComplexSpectrum};
use crate::error::{Error, Result};
use crate::graph::{build_laplacian, GraphFamily};

/// Spectrum of the `M`-node circulant Laplacian with location-invariant
/// offset weights `w_k`, `λ_l = Σ_k w_k (1 − e^{−j2πk(l−1)/M})`.
///
/// The angle is reduced exactly in integer arithmetic to `(−π, π]` before
/// evaluation and `1 − cos θ` is formed as `2 sin²(θ/2)`, so the small
/// eigenvalues of large rings keep full relative accuracy and offsets `±k`
/// with equal weights give exactly conjugate terms.
pub fn circulant_spectrum(offsets: &[(i64, f64)], m: usize) -> Result<ComplexSpectrum> {
    if m == 0 {
        return Err(Error::InvalidArgument("lattice side M must be positive".into()));
    }
    if !offsets.iter().any(|&(_, w)| w > 0.0) {
        return Err(Error::InvalidArgument(
            "at least one offset weight must be positive".into(),
        ));
    }
    if let Some(&(k, w)) = offsets.iter().find(|(k, w)| *k == 0 || *w < 0.0 || !w.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "offset {k} with weight {w}: offsets must be nonzero with nonnegative finite weights"
        )));
    }
    let mi = m as i64;
    let values = (0..mi)
        .map(|l| {
            offsets.iter().fold(Complex64::new(0.0, 0.0), |acc, &(k, w)| {
                let mut a = (k * l).rem_euclid(mi);
                if 2 * a > mi {
                    a -= mi;
                }
                let theta = 2.0 * PI * a as f64 / m as f64;
                let half = (0.5 * theta).sin();
                acc + Complex64::new(w * 2.0 * half * half, w * theta.sin())
            })
        })
        .collect();
    let diag: f64 = offsets.iter().map(|o| o.1).sum();
    Ok(ComplexSpectrum::from_values(values, 1e-9 * diag.max(1.0)))
}

/// Spectrum of a Kronecker sum (the Laplacian of a Cartesian product): every
/// sum of one eigenvalue from each factor.
pub fn kron_sum_spectrum(spectra: &[ComplexSpectrum]) -> ComplexSpectrum {
    let mut sums = vec![Complex64::new(0.0, 0.0)];
    let mut tol: f64 = 0.0;
    for s in spectra {
        tol = tol.max(s.zero_tol());
        sums = sums
            .iter()
            .flat_map(|a| s.values().iter().map(move |b| a + b))
            .collect();
    }
    if spectra.is_empty() {
        tol = 1e-9;
    }
    ComplexSpectrum::from_values(sums, tol)
}

/// Spectrum of the size-`N` member of a family: analytic for periodic
/// lattices and rings, dense otherwise.
pub fn family_spectrum(family: &GraphFamily, n: usize) -> Result<ComplexSpectrum> {
    family.check_size(n)?;
    match family.circulant_profile(n) {
        Some((d, m, offsets)) => {
            let ring = circulant_spectrum(&offsets, m)?;
            if d == 1 {
                Ok(ring)
            } else {
                Ok(kron_sum_spectrum(&vec![ring; d]))
            }
        }
        None => laplacian_spectrum(&build_laplacian(&family.generate(n)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NeighborhoodScaling;
    use crate::spectrum::algebraic_connectivity;

    #[test]
    fn symmetric_weights_give_real_spectrum() {
        let s = circulant_spectrum(&[(-1, 0.7), (1, 0.7), (-2, 0.2), (2, 0.2)], 11).unwrap();
        assert!(s.values().iter().all(|v| v.im.abs() < 1e-15));
    }

    #[test]
    fn directed_ring_lambda2_closed_form() {
        for m in [5usize, 14, 100, 100_000] {
            let s = circulant_spectrum(&[(-1, 1.0)], m).unwrap();
            let l2 = algebraic_connectivity(&s).unwrap();
            let theta = 2.0 * PI / m as f64;
            // series for 1 − cos θ keeps full relative accuracy at small θ
            let t2 = theta * theta;
            let series = t2 / 2.0 - t2 * t2 / 24.0 + t2 * t2 * t2 / 720.0 - t2.powi(4) / 40320.0;
            let reference = if m <= 100 { 1.0 - theta.cos() } else { series };
            assert!((l2.re - reference).abs() <= 1e-12 * reference, "{m}: {} vs {reference}", l2.re);
            assert!((l2.im.abs() - theta.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn kron_sum_of_four_cycles() {
        let c4 = circulant_spectrum(&[(-1, 1.0), (1, 1.0)], 4).unwrap();
        let torus = kron_sum_spectrum(&[c4.clone(), c4.clone()]);
        assert_eq!(torus.len(), 16);
        assert_eq!(torus.zero_multiplicity(), 1);
        assert!((algebraic_connectivity(&torus).unwrap().re - 2.0).abs() < 1e-12);

        let unit = ComplexSpectrum::from_values(vec![Complex64::new(0.0, 0.0)], 1e-9);
        let same = kron_sum_spectrum(&[c4.clone(), unit]);
        assert_eq!(same.values(), c4.values());
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(circulant_spectrum(&[], 5).is_err());
        assert!(circulant_spectrum(&[(0, 1.0)], 5).is_err());
        assert!(circulant_spectrum(&[(1, 0.0)], 5).is_err());
        assert!(circulant_spectrum(&[(1, 1.0)], 0).is_err());
    }

    #[test]
    fn family_spectrum_dispatches() {
        let ring = GraphFamily::RingFuzz {
            q: NeighborhoodScaling::Fixed(2),
            weight: 1.0,
        };
        let s = family_spectrum(&ring, 10_000).unwrap();
        assert_eq!(s.len(), 10_000);
        let path = GraphFamily::PathFuzz {
            q: NeighborhoodScaling::Fixed(2),
            weight: 1.0,
        };
        let s = family_spectrum(&path, 8).unwrap();
        let exact = 2.0 * (1.0 - (PI / 8.0).cos());
        assert!((algebraic_connectivity(&s).unwrap().re - exact).abs() < 1e-12);
    }
}
