//! Stability of the nth-order consensus closed loop.
//!
//! The closed loop decomposes into one polynomial
//! `p_l(s) = sⁿ + Σ (a_k λ_l + a_kᵃᵇˢ) s^k` per Laplacian eigenvalue; the
//! network is stable when every relevant `p_l` is Hurwitz. Each polynomial is
//! tested with the complex-coefficient Hurwitz chain ([`routh_hurwitz_complex`])
//! or, for low orders, with the explicit conditions in [`closed_form`].

pub mod closed_form;
mod polynomial;
mod routh;

pub use closed_form::{closed_form_condition, closed_form_conditions, ClosedFormCondition, ConditionKind};
pub use polynomial::{polynomial_roots, s_to_mu, ComplexPolynomial, MuPolynomial};
pub use routh::{hurwitz_array, hurwitz_minors, routh_array_stable, routh_hurwitz_complex, DEFAULT_MARGINAL_TOL};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::ComplexSpectrum;

/// Default upper limit on any single gain.
pub const DEFAULT_GAIN_MAX: f64 = 1e6;

/// Controller gains `a₀..a_{n−1}` and absolute gains `a₀ᵃᵇˢ..a_{n−1}ᵃᵇˢ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainSet {
    relative: Vec<f64>,
    absolute: Vec<f64>,
}

impl GainSet {
    /// Pure relative feedback.
    pub fn new(relative: Vec<f64>) -> Result<Self> {
        let n = relative.len();
        Self::with_limit(relative, vec![0.0; n], DEFAULT_GAIN_MAX)
    }

    /// Relative plus absolute feedback; an empty `absolute` means all zero.
    pub fn with_absolute(relative: Vec<f64>, absolute: Vec<f64>) -> Result<Self> {
        Self::with_limit(relative, absolute, DEFAULT_GAIN_MAX)
    }

    pub fn with_limit(relative: Vec<f64>, mut absolute: Vec<f64>, a_max: f64) -> Result<Self> {
        let n = relative.len();
        if n == 0 {
            return Err(Error::InvalidGains("at least one gain is required".into()));
        }
        if absolute.is_empty() {
            absolute = vec![0.0; n];
        }
        if absolute.len() != n {
            return Err(Error::InvalidGains(format!(
                "{} absolute gains given for order {n}",
                absolute.len()
            )));
        }
        for (k, &a) in relative.iter().enumerate() {
            if !(a.is_finite() && a > 0.0 && a <= a_max) {
                return Err(Error::InvalidGains(format!("a_{k} = {a} must lie in (0, {a_max}]")));
            }
        }
        for (k, &a) in absolute.iter().enumerate() {
            if !(a.is_finite() && a >= 0.0 && a <= a_max) {
                return Err(Error::InvalidGains(format!("absolute a_{k} = {a} must lie in [0, {a_max}]")));
            }
        }
        Ok(GainSet { relative, absolute })
    }

    pub fn order(&self) -> usize {
        self.relative.len()
    }

    pub fn relative(&self) -> &[f64] {
        &self.relative
    }

    pub fn absolute(&self) -> &[f64] {
        &self.absolute
    }

    pub fn a(&self, k: usize) -> f64 {
        self.relative[k]
    }

    pub fn a_abs(&self, k: usize) -> f64 {
        self.absolute[k]
    }

    pub fn has_absolute(&self) -> bool {
        self.absolute.iter().any(|&a| a > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityStatus {
    Stable,
    Marginal,
    Unstable,
}

impl StabilityStatus {
    pub fn name(self) -> &'static str {
        match self {
            StabilityStatus::Stable => "stable",
            StabilityStatus::Marginal => "marginal",
            StabilityStatus::Unstable => "unstable",
        }
    }

    pub fn is_stable(self) -> bool {
        self == StabilityStatus::Stable
    }
}

impl std::fmt::Display for StabilityStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which inequality decided a verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binding {
    /// `(−1)^k Δ_{2k} > 0`, `k` 1-based.
    Minor(usize),
    Condition(ConditionKind),
    /// No eigenvalue needed testing.
    Vacuous,
}

impl Binding {
    pub fn name(&self) -> String {
        match self {
            Binding::Minor(k) => format!("delta_{}", 2 * k),
            Binding::Condition(c) => c.name().to_string(),
            Binding::Vacuous => "none".to_string(),
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            Binding::Minor(k) => Some(*k),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub status: StabilityStatus,
    pub binding: Binding,
    /// The eigenvalue whose polynomial decided the verdict.
    pub witness: Option<Complex64>,
    /// Signed value of the binding inequality; positive means satisfied.
    pub margin: f64,
}

impl StabilityVerdict {
    fn vacuous() -> Self {
        StabilityVerdict {
            status: StabilityStatus::Stable,
            binding: Binding::Vacuous,
            witness: None,
            margin: f64::INFINITY,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let finite = |v: f64| if v.is_finite() { serde_json::json!(v) } else { serde_json::Value::Null };
        serde_json::json!({
            "status": self.status.name(),
            "binding": self.binding.name(),
            "binding_index": self.binding.index(),
            "witness": self.witness.map(|w| serde_json::json!({"re": w.re, "im": w.im})),
            "margin": finite(self.margin),
        })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Ordering key: worse status first, then smaller margin.
    fn worse_than(&self, other: &StabilityVerdict) -> bool {
        self.status > other.status || (self.status == other.status && self.margin < other.margin)
    }
}

/// `sⁿ + Σ (a_k λ + a_kᵃᵇˢ) s^k`.
pub fn characteristic_polynomial(gains: &GainSet, lambda: Complex64) -> ComplexPolynomial {
    ComplexPolynomial::monic(
        (0..gains.order())
            .map(|k| gains.a(k) * lambda + gains.a_abs(k))
            .collect(),
    )
}

/// How per-eigenvalue polynomials are tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictRoute {
    /// The full complex Hurwitz chain.
    #[default]
    Hurwitz,
    /// Only the explicit low-order conditions (necessary; sufficient for
    /// `n = 2` and for `n = 3` with real eigenvalues).
    ClosedForm,
}

/// Verdict for the single polynomial belonging to eigenvalue `λ`.
pub fn eigenvalue_verdict(
    gains: &GainSet,
    lambda: Complex64,
    route: VerdictRoute,
    marginal_tol: f64,
) -> Result<StabilityVerdict> {
    let mut verdict = match route {
        VerdictRoute::Hurwitz => routh_hurwitz_complex(&characteristic_polynomial(gains, lambda), marginal_tol)?,
        VerdictRoute::ClosedForm => {
            let conditions = closed_form_conditions(gains, lambda)?;
            let worst = conditions
                .iter()
                .find(|c| !c.satisfied)
                .or_else(|| conditions.iter().min_by(|a, b| a.value.total_cmp(&b.value)))
                .ok_or(Error::NotApplicable {
                    name: "closed_form".into(),
                    reason: "no closed-form condition applies".into(),
                })?;
            StabilityVerdict {
                status: if worst.satisfied {
                    StabilityStatus::Stable
                } else {
                    StabilityStatus::Unstable
                },
                binding: Binding::Condition(worst.kind),
                witness: None,
                margin: worst.value,
            }
        }
    };
    verdict.witness = Some(lambda);
    Ok(verdict)
}

/// Worst verdict over a set of eigenvalues. Conjugate pairs give conjugate
/// polynomials with mirrored roots, so only `Im λ ≥ −tol` is evaluated.
fn worst_over<'a>(
    gains: &GainSet,
    eigenvalues: impl Iterator<Item = Complex64> + 'a,
    imag_tol: f64,
    route: VerdictRoute,
    marginal_tol: f64,
) -> Result<StabilityVerdict> {
    let mut worst: Option<StabilityVerdict> = None;
    for lambda in eigenvalues.filter(|v| v.im >= -imag_tol) {
        let v = eigenvalue_verdict(gains, lambda, route, marginal_tol)?;
        if worst.as_ref().map_or(true, |w| v.worse_than(w)) {
            worst = Some(v);
        }
    }
    Ok(worst.unwrap_or_else(StabilityVerdict::vacuous))
}

/// Consensus verdict for the leaderless network with Laplacian spectrum
/// `spec`: requires a simple zero eigenvalue and Hurwitz `p_l` for every
/// nonzero `λ_l`. With absolute feedback the `λ = 0` polynomial is tested too.
pub fn network_verdict(gains: &GainSet, spec: &ComplexSpectrum) -> Result<StabilityVerdict> {
    network_verdict_with(gains, spec, VerdictRoute::Hurwitz, DEFAULT_MARGINAL_TOL)
}

pub fn network_verdict_with(
    gains: &GainSet,
    spec: &ComplexSpectrum,
    route: VerdictRoute,
    marginal_tol: f64,
) -> Result<StabilityVerdict> {
    if spec.zero_multiplicity() != 1 {
        return Err(Error::ZeroMultiplicity(spec.zero_multiplicity()));
    }
    let zero_block = gains
        .has_absolute()
        .then_some(Complex64::new(0.0, 0.0));
    worst_over(
        gains,
        zero_block.into_iter().chain(spec.nonzero()),
        spec.zero_tol(),
        route,
        marginal_tol,
    )
}

/// Leader-follower verdict: every eigenvalue of the grounded spectrum must
/// give a Hurwitz polynomial.
pub fn grounded_verdict(gains: &GainSet, spec: &ComplexSpectrum) -> Result<StabilityVerdict> {
    grounded_verdict_with(gains, spec, VerdictRoute::Hurwitz, DEFAULT_MARGINAL_TOL)
}

pub fn grounded_verdict_with(
    gains: &GainSet,
    spec: &ComplexSpectrum,
    route: VerdictRoute,
    marginal_tol: f64,
) -> Result<StabilityVerdict> {
    worst_over(gains, spec.values().iter().copied(), spec.zero_tol(), route, marginal_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_laplacian, grounded_laplacian, Graph};
    use crate::spectrum::laplacian_spectrum;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn characteristic_polynomial_examples() {
        let g = GainSet::new(vec![0.5, 1.0, 1.0]).unwrap();
        let p = characteristic_polynomial(&g, c(2.0, 0.0));
        assert_eq!(p.coeffs(), &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]);

        let g = GainSet::new(vec![1.0, 3.0]).unwrap();
        let p = characteristic_polynomial(&g, c(1.0, 1.0));
        assert_eq!(p.coeffs(), &[c(1.0, 1.0), c(3.0, 3.0)]);

        let g = GainSet::with_absolute(vec![0.5, 1.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let p = characteristic_polynomial(&g, c(0.1, 0.0));
        let expected = [0.05, 1.1, 0.1];
        for (b, e) in p.coeffs().iter().zip(expected) {
            assert!((b - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn gain_validation() {
        assert!(GainSet::new(vec![]).is_err());
        assert!(GainSet::new(vec![1.0, 0.0]).is_err());
        assert!(GainSet::new(vec![1.0, f64::NAN]).is_err());
        assert!(GainSet::with_absolute(vec![1.0], vec![-1.0]).is_err());
        assert!(GainSet::with_absolute(vec![1.0], vec![1.0, 1.0]).is_err());
        assert!(GainSet::with_limit(vec![2.0], vec![], 1.0).is_err());
        assert!(!GainSet::with_absolute(vec![1.0], vec![]).unwrap().has_absolute());
    }

    #[test]
    fn first_order_always_stable() {
        let g = GainSet::new(vec![1.0]).unwrap();
        let graph = Graph::undirected(5, &[(0, 1, 1.0), (1, 2, 0.2), (2, 3, 3.0), (3, 4, 1.0)]).unwrap();
        let v = network_verdict(&g, &laplacian_spectrum(&build_laplacian(&graph)).unwrap()).unwrap();
        assert_eq!(v.status, StabilityStatus::Stable);
    }

    #[test]
    fn single_node_is_vacuously_stable() {
        let g = GainSet::new(vec![0.5, 1.0, 1.0]).unwrap();
        let spec = laplacian_spectrum(&build_laplacian(&Graph::new(1, vec![]).unwrap())).unwrap();
        let v = network_verdict(&g, &spec).unwrap();
        assert_eq!(v.status, StabilityStatus::Stable);
        assert_eq!(v.binding, Binding::Vacuous);
        assert_eq!(
            v.to_json(),
            r#"{"binding":"none","binding_index":null,"margin":null,"status":"stable","witness":null}"#
        );
    }

    #[test]
    fn disconnected_is_an_error() {
        let g = GainSet::new(vec![1.0, 1.0]).unwrap();
        let graph = Graph::undirected(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let spec = laplacian_spectrum(&build_laplacian(&graph)).unwrap();
        assert_eq!(network_verdict(&g, &spec), Err(Error::ZeroMultiplicity(2)));
    }

    #[test]
    fn threshold_on_complete_graph() {
        // K_N has λ₂ = N; scale weights to place λ₂ either side of 0.5
        let g = GainSet::new(vec![0.5, 1.0, 1.0]).unwrap();
        for (w, expected) in [(0.536 / 4.0, StabilityStatus::Stable), (0.493 / 4.0, StabilityStatus::Unstable)] {
            let mut pairs = Vec::new();
            for i in 0..4 {
                for j in i + 1..4 {
                    pairs.push((i, j, w));
                }
            }
            let graph = Graph::undirected(4, &pairs).unwrap();
            let v = network_verdict(&g, &laplacian_spectrum(&build_laplacian(&graph)).unwrap()).unwrap();
            assert_eq!(v.status, expected);
            assert!((v.witness.unwrap().re - 4.0 * w).abs() < 1e-12);
        }
    }

    #[test]
    fn absolute_feedback_tests_zero_block() {
        // only a₀ᵃᵇˢ > 0 and λ = 0 gives s³ + a₀ᵃᵇˢ, whose minor chain is
        // degenerate (all zero) rather than negative
        let g = GainSet::with_absolute(vec![0.5, 1.0, 1.0], vec![1.0, 0.0, 0.0]).unwrap();
        let graph = Graph::undirected(2, &[(0, 1, 5.0)]).unwrap();
        let v = network_verdict(&g, &laplacian_spectrum(&build_laplacian(&graph)).unwrap()).unwrap();
        assert_eq!(v.status, StabilityStatus::Marginal);
        assert_eq!(v.witness, Some(c(0.0, 0.0)));
    }

    #[test]
    fn grounded_uses_every_eigenvalue() {
        let g = GainSet::new(vec![0.5, 1.0, 1.0]).unwrap();
        let path = Graph::undirected(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let spec = laplacian_spectrum(&grounded_laplacian(&path, 0).unwrap()).unwrap();
        // λ̄₁ ≈ 0.382 < 0.5
        let v = grounded_verdict(&g, &spec).unwrap();
        assert_eq!(v.status, StabilityStatus::Unstable);
        assert!((v.witness.unwrap().re - 0.381966).abs() < 1e-6);
    }

    #[test]
    fn closed_form_route_agrees_on_second_order() {
        let g = GainSet::new(vec![1.0, 3.0]).unwrap();
        for n in 3..40 {
            let theta = 2.0 * std::f64::consts::PI / n as f64;
            let lambda = c(1.0 - theta.cos(), theta.sin());
            let a = eigenvalue_verdict(&g, lambda, VerdictRoute::Hurwitz, 1e-9).unwrap();
            let b = eigenvalue_verdict(&g, lambda, VerdictRoute::ClosedForm, 1e-9).unwrap();
            assert_eq!(a.status, b.status, "N = {n}");
        }
    }

    #[test]
    fn verdict_json() {
        let g = GainSet::new(vec![0.5, 1.0, 1.0]).unwrap();
        let v = eigenvalue_verdict(&g, c(0.25, 0.0), VerdictRoute::Hurwitz, 1e-9).unwrap();
        let json: serde_json::Value = serde_json::from_str(&v.to_json()).unwrap();
        assert_eq!(json["status"], "unstable");
        assert_eq!(json["binding"], "delta_4");
        assert_eq!(json["binding_index"], 2);
        assert_eq!(json["witness"]["re"], 0.25);
        assert!(json["margin"].as_f64().unwrap() < 0.0);
    }
}
