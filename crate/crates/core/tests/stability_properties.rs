use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfl_core::stability::{
    characteristic_polynomial, closed_form_condition, eigenvalue_verdict, hurwitz_minors, polynomial_roots,
    routh_array_stable, routh_hurwitz_complex, s_to_mu, ConditionKind, VerdictRoute, DEFAULT_MARGINAL_TOL,
};
use sfl_core::{Complex64, ComplexPolynomial, GainSet, StabilityStatus};

fn random_gains(rng: &mut ChaCha8Rng, n: usize) -> GainSet {
    GainSet::new((0..n).map(|_| rng.gen_range(0.05..3.0)).collect()).unwrap()
}

#[test]
fn second_minor_condition_has_the_sign_of_delta4() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut compared = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=6);
        let gains = random_gains(&mut rng, n);
        let lambda = Complex64::from_polar(rng.gen_range(0.01..5.0), rng.gen_range(-1.5..1.5));
        let closed = closed_form_condition(ConditionKind::SecondMinor, &gains, lambda).unwrap().value;
        let delta4 = hurwitz_minors(&s_to_mu(&characteristic_polynomial(&gains, lambda)))[1];
        if closed.abs() > 1e-10 && delta4.abs() > 1e-10 {
            compared += 1;
            assert_eq!(closed > 0.0, delta4 > 0.0, "n = {n}, λ = {lambda}: {closed} vs {delta4}");
        }
    }
    assert!(compared > 900);
}

#[test]
fn real_coefficients_agree_with_classical_routh() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut compared, mut stable) = (0, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=6);
        let gains = random_gains(&mut rng, n);
        let lambda = rng.gen_range(0.01..5.0);
        let p = characteristic_polynomial(&gains, Complex64::new(lambda, 0.0));
        let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.re).collect();
        let verdict = routh_hurwitz_complex(&p, DEFAULT_MARGINAL_TOL).unwrap();
        let Some(classical) = routh_array_stable(&coeffs) else { continue };
        if verdict.status == StabilityStatus::Marginal {
            continue;
        }
        compared += 1;
        stable += classical as usize;
        assert_eq!(verdict.status == StabilityStatus::Stable, classical, "{coeffs:?}");
    }
    assert!(compared > 950 && stable > 100 && stable < compared);
}

/// Second order, `λ = ρe^{jφ}`: `s² + a₁λs + a₀λ` is Hurwitz iff
/// `ρ > a₀ sin²φ / (a₁² cos φ)`.
fn second_order_flip(a0: f64, a1: f64, phi: f64) -> f64 {
    a0 * phi.sin().powi(2) / (a1 * a1 * phi.cos())
}

#[test]
fn second_order_angle_mechanism() {
    let gains = GainSet::new(vec![1.0, 3.0]).unwrap();
    let stable_at = |rho: f64, phi: f64| {
        eigenvalue_verdict(&gains, Complex64::from_polar(rho, phi), VerdictRoute::Hurwitz, 0.0)
            .unwrap()
            .status
            == StabilityStatus::Stable
    };
    for phi in [0.2, 0.6, 1.0, 1.4, 1.55] {
        let expected = second_order_flip(1.0, 3.0, phi);
        let (mut lo, mut hi) = (expected * 1e-3, expected * 1e3);
        assert!(!stable_at(lo, phi) && stable_at(hi, phi));
        while hi / lo > 1.0 + 1e-13 {
            let mid = (lo * hi).sqrt();
            if stable_at(mid, phi) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((hi / expected - 1.0).abs() < 1e-9, "φ = {phi}: {hi} vs {expected}");
    }
    for k in 0..=90 {
        let rho = 10f64.powf(-6.0 + k as f64 / 10.0);
        assert!(stable_at(rho, 0.0));
    }
}

#[test]
fn closed_form_route_agrees_where_it_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..600 {
        let (n, lambda) = if case % 2 == 0 {
            (2, Complex64::from_polar(rng.gen_range(0.01..5.0), rng.gen_range(-1.5..1.5)))
        } else {
            (3, Complex64::new(rng.gen_range(0.01..5.0), 0.0))
        };
        let gains = random_gains(&mut rng, n);
        let full = eigenvalue_verdict(&gains, lambda, VerdictRoute::Hurwitz, DEFAULT_MARGINAL_TOL).unwrap();
        let closed = eigenvalue_verdict(&gains, lambda, VerdictRoute::ClosedForm, DEFAULT_MARGINAL_TOL).unwrap();
        if full.status == StabilityStatus::Marginal || closed.margin.abs() < 1e-10 {
            continue;
        }
        assert_eq!(full.status, closed.status, "n = {n}, λ = {lambda}, {gains:?}");
    }
}

#[test]
fn imaginary_axis_root_is_marginal() {
    let p = ComplexPolynomial::from_roots(&[
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.5),
        Complex64::new(-0.3, -2.0),
    ]);
    let v = routh_hurwitz_complex(&p, DEFAULT_MARGINAL_TOL).unwrap();
    assert_eq!(v.status, StabilityStatus::Marginal);
}

fn poly_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-3.0f64..1.0, -3.0f64..3.0), 1..=6)
}

proptest! {
    #[test]
    fn verdict_matches_root_location(roots in poly_strategy()) {
        let roots: Vec<Complex64> = roots.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let max_re = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
        prop_assume!(max_re.abs() > 1e-3);
        let p = ComplexPolynomial::from_roots(&roots);
        let v = routh_hurwitz_complex(&p, DEFAULT_MARGINAL_TOL).unwrap();
        prop_assume!(v.status != StabilityStatus::Marginal);
        prop_assert_eq!(v.status == StabilityStatus::Stable, max_re < 0.0);
    }

    #[test]
    fn rescaling_preserves_the_verdict(roots in poly_strategy(), sigma in 0.01f64..100.0) {
        let roots: Vec<Complex64> = roots.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let p = ComplexPolynomial::from_roots(&roots);
        let a = routh_hurwitz_complex(&p, DEFAULT_MARGINAL_TOL).unwrap();
        let b = routh_hurwitz_complex(&p.rescale(sigma), DEFAULT_MARGINAL_TOL).unwrap();
        prop_assume!(a.status != StabilityStatus::Marginal && b.status != StabilityStatus::Marginal);
        prop_assert_eq!(a.status, b.status);
    }

    #[test]
    fn conjugate_eigenvalues_share_a_verdict(
        gains in proptest::collection::vec(0.05f64..3.0, 1..=5),
        re in 0.01f64..4.0,
        im in -4.0f64..4.0,
    ) {
        let gains = GainSet::new(gains).unwrap();
        let l = Complex64::new(re, im);
        let a = eigenvalue_verdict(&gains, l, VerdictRoute::Hurwitz, DEFAULT_MARGINAL_TOL).unwrap();
        let b = eigenvalue_verdict(&gains, l.conj(), VerdictRoute::Hurwitz, DEFAULT_MARGINAL_TOL).unwrap();
        prop_assert_eq!(a.status, b.status);
        let roots = polynomial_roots(&characteristic_polynomial(&gains, l)).unwrap();
        let conj_roots = polynomial_roots(&characteristic_polynomial(&gains, l.conj())).unwrap();
        for r in &roots {
            prop_assert!(conj_roots.iter().any(|c| (c - r.conj()).norm() < 1e-6 * (1.0 + r.norm())));
        }
    }
}
