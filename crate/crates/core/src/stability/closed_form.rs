use num_complex::Complex64;
use serde::Serialize;

use super::GainSet;
use crate::error::{Error, Result};

/// The explicit low-order stability conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// `a_{n−1} Re λ > 0`, the first minor.
    FirstMinor,
    /// `a_{n−1}x²(a_{n−1}a_{n−2}x − a_{n−3}) + a_{n−2}y²(a_{n−1}²x − a_{n−2}) > 0`
    /// with `λ = x + jy`, `n ≥ 3`; equal to the second minor.
    SecondMinor,
    /// `a_{n−1}a_{n−2}λ − a_{n−3} > 0` for real `λ`, `n ≥ 3`.
    RealThreshold,
    /// `a₁²x[(x/y)² + 1] − a₀ > 0` for `n = 2`, `y ≠ 0`.
    SecondOrderAngle,
    /// `(a₁λ + a₁ᵃᵇˢ)(a₂λ + a₂ᵃᵇˢ) − a₀λ − a₀ᵃᵇˢ > 0` for `n = 3`, real `λ`.
    AbsoluteThirdOrder,
}

impl ConditionKind {
    pub const ALL: [ConditionKind; 5] = [
        ConditionKind::FirstMinor,
        ConditionKind::SecondMinor,
        ConditionKind::RealThreshold,
        ConditionKind::SecondOrderAngle,
        ConditionKind::AbsoluteThirdOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::FirstMinor => "first_minor",
            ConditionKind::SecondMinor => "second_minor",
            ConditionKind::RealThreshold => "real_threshold",
            ConditionKind::SecondOrderAngle => "second_order_angle",
            ConditionKind::AbsoluteThirdOrder => "absolute_third_order",
        }
    }
}

impl std::fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormCondition {
    pub kind: ConditionKind,
    pub value: f64,
    pub satisfied: bool,
}

/// Imaginary parts below this (relative to `|λ|`) count as real.
pub const REAL_TOL: f64 = 1e-12;

pub fn is_real_eigenvalue(lambda: Complex64) -> bool {
    lambda.im.abs() <= REAL_TOL * lambda.norm().max(1.0)
}

/// Evaluate one condition, or explain why it does not apply.
pub fn closed_form_condition(
    kind: ConditionKind,
    gains: &GainSet,
    lambda: Complex64,
) -> Result<ClosedFormCondition> {
    let n = gains.order();
    let not_applicable = |reason: &str| Error::NotApplicable {
        name: kind.name().to_string(),
        reason: reason.to_string(),
    };
    if n < 2 {
        return Err(not_applicable("requires order n >= 2"));
    }
    let relative_only = || {
        if gains.has_absolute() {
            Err(not_applicable("stated for pure relative feedback"))
        } else {
            Ok(())
        }
    };
    let (x, y) = (lambda.re, lambda.im);
    let a = |k: usize| gains.a(k);
    let value = match kind {
        ConditionKind::FirstMinor => {
            relative_only()?;
            a(n - 1) * x
        }
        ConditionKind::SecondMinor => {
            relative_only()?;
            if n < 3 {
                return Err(not_applicable("requires order n >= 3"));
            }
            let (a1, a2, a3) = (a(n - 1), a(n - 2), a(n - 3));
            a1 * x * x * (a1 * a2 * x - a3) + a2 * y * y * (a1 * a1 * x - a2)
        }
        ConditionKind::RealThreshold => {
            relative_only()?;
            if n < 3 {
                return Err(not_applicable("requires order n >= 3"));
            }
            if !is_real_eigenvalue(lambda) {
                return Err(not_applicable("requires a real eigenvalue"));
            }
            a(n - 1) * a(n - 2) * x - a(n - 3)
        }
        ConditionKind::SecondOrderAngle => {
            relative_only()?;
            if n != 2 {
                return Err(not_applicable("requires order n = 2"));
            }
            if y == 0.0 {
                return Err(not_applicable("requires a non-real eigenvalue"));
            }
            let r = x / y;
            a(1) * a(1) * x * (r * r + 1.0) - a(0)
        }
        ConditionKind::AbsoluteThirdOrder => {
            if n != 3 {
                return Err(not_applicable("requires order n = 3"));
            }
            if !is_real_eigenvalue(lambda) {
                return Err(not_applicable("requires a real eigenvalue"));
            }
            let b = |k: usize| a(k) * x + gains.a_abs(k);
            b(1) * b(2) - b(0)
        }
    };
    Ok(ClosedFormCondition {
        kind,
        value,
        satisfied: value > 0.0,
    })
}

/// Every closed-form condition that applies to `(n, λ, gains)`.
pub fn closed_form_conditions(gains: &GainSet, lambda: Complex64) -> Result<Vec<ClosedFormCondition>> {
    if gains.order() < 2 {
        return Err(Error::NotApplicable {
            name: "closed_form_conditions".into(),
            reason: "requires order n >= 2".into(),
        });
    }
    Ok(ConditionKind::ALL
        .iter()
        .filter_map(|&k| closed_form_condition(k, gains, lambda).ok())
        .collect())
}
