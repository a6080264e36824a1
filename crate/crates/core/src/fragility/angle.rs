use std::fmt::Write as _;

use num_complex::Complex64;

use crate::spectrum::ComplexSpectrum;

#[derive(Debug, Clone, PartialEq)]
pub struct AngleRow {
    /// 1-based position in the spectrum.
    pub l: usize,
    pub lambda: Complex64,
    /// Argument of the first-quadrant representative `Re λ + j|Im λ|`.
    pub arg: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleReport {
    pub psi: f64,
    pub re_max: f64,
    pub rows: Vec<AngleRow>,
    /// Some eigenvalue with `Re λ ≤ re_max` has argument above `ψ`: with
    /// fixed second-order gains such eigenvalues eventually violate the
    /// angle condition as the family grows.
    pub flagged: bool,
}

impl AngleReport {
    /// Columns `l,re,im,arg,exceeds_psi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,re,im,arg,exceeds_psi\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.l, r.lambda.re, r.lambda.im, r.arg, r.exceeds);
        }
        out
    }
}

/// Argument of every nonzero eigenvalue against the angle `ψ ∈ (0, π/2)`.
pub fn theorem4_angle_check(spec: &ComplexSpectrum, psi: f64, re_max: f64) -> AngleReport {
    let rows: Vec<AngleRow> = spec
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| !spec.is_zero(**v))
        .map(|(i, &lambda)| {
            let im = if lambda.im.abs() <= spec.zero_tol() { 0.0 } else { lambda.im.abs() };
            let arg = im.atan2(lambda.re);
            AngleRow {
                l: i + 1,
                lambda,
                arg,
                exceeds: arg > psi,
            }
        })
        .collect();
    let flagged = rows.iter().any(|r| r.exceeds && r.lambda.re <= re_max);
    AngleReport {
        psi,
        re_max,
        rows,
        flagged,
    }
}
