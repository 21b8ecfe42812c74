use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use proptest::prelude::*;

use super::*;
use crate::quadrature::adaptive_gk;
use crate::scattering_function::Sign;

fn quick() -> NystromOptions {
    NystromOptions::single(12.0, 400)
}

/// K₀(z) = ∫₀^∞ e^{−z cosh t} dt
fn bessel_k0(z: f64) -> f64 {
    adaptive_gk(0.0, 12.0, 1e-15, 1e-13, 2000, |t| C64::new((-z * t.cosh()).exp(), 0.0))
        .value
        .re
}

fn resonance(eps: Sign, mass: f64) -> ScatteringFunction {
    ScatteringFunction::build(eps, 0.0, &[C64::new(0.0, FRAC_PI_4)], mass, false).unwrap()
}

#[test]
fn gram_kernel_matches_direct_y_quadrature() {
    let kernels = [
        KernelOperator::general(0.7, 0.4).unwrap(),
        KernelOperator::modular(1.3, FRAC_PI_4, 1.0).unwrap(),
        KernelOperator::bose_phi(0.8, 1.0).unwrap(),
        KernelOperator::bose_pi(0.8, 1.0).unwrap(),
    ];
    for k in &kernels {
        for &(x, xp) in &[(0.3, -0.2), (-1.1, 0.9), (0.0, 0.0)] {
            // the integrand decays like |Σ c_j s_j|²/y², so the tail beyond ±R is ~2/R of that
            let r = 4000.0;
            let direct = adaptive_gk(-r, r, 1e-14, 1e-12, 20000, |y| k.value(x, y) * k.value(xp, y).conj()).value;
            let tail: f64 = 2.0 / r
                * (-k.damping * (x.cosh() + xp.cosh())).exp()
                * k.terms.iter().map(|t| t.c * t.s).sum::<C64>().norm_sqr();
            let g = k.gram(x, xp);
            assert!(
                (direct - g).norm() <= 2.0 * tail + 1e-9 * g.norm(),
                "{:?} at ({x},{xp}): direct {direct}, gram {g}",
                k.kind
            );
        }
    }
}

#[test]
fn hilbert_schmidt_norm_matches_bessel_closed_form() {
    for &(a, b) in &[(0.5, FRAC_PI_8), (1.0, FRAC_PI_4), (2.0, FRAC_PI_2)] {
        let sv = singular_values(&KernelOperator::general(a, b).unwrap(), 12.0, 400).unwrap();
        let hs: f64 = sv.iter().map(|s| s * s).sum();
        let exact = PI / b * 2.0 * bessel_k0(2.0 * a);
        assert!((hs - exact).abs() < 1e-8 * exact, "a={a} b={b}: {hs} vs {exact}");
    }
    // T_modular carries the prefactor 1/π, so |c|² = 1/π²
    let (s, kappa) = (1.0, FRAC_PI_4);
    let sv = singular_values(&KernelOperator::modular(s, kappa, 1.0).unwrap(), 12.0, 400).unwrap();
    let hs: f64 = sv.iter().map(|s| s * s).sum();
    let exact = 1.0 / (PI * PI) * PI / (kappa / 2.0) * 2.0 * bessel_k0(s);
    assert!((hs - exact).abs() < 1e-8 * exact);
}

#[test]
fn trace_norm_vanishes_for_strong_damping() {
    let t = trace_norm_estimate(&KernelOperator::general(50.0, FRAC_PI_4).unwrap(), &quick()).unwrap();
    assert!(t.value < 1e-15, "{}", t.value);
    let mut last = f64::INFINITY;
    for a in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let v = trace_norm_estimate(&KernelOperator::general(a, FRAC_PI_4).unwrap(), &quick())
            .unwrap()
            .value;
        assert!(v < last);
        last = v;
    }
}

#[test]
fn refinement_converges_and_records_steps() {
    let t = trace_norm_estimate(&KernelOperator::general(1.0, FRAC_PI_2).unwrap(), &NystromOptions::default())
        .unwrap();
    assert!(t.converged);
    assert!(t.relative_change.unwrap() < 1e-3);
    assert!(t.steps.len() >= 2);
    assert_eq!(t.steps[0].nodes, 400);
    assert_eq!(t.steps[1].nodes, 800);
    assert_eq!(t.steps[1].half_width, 24.0);
}

#[test]
fn general_kernel_stays_below_closed_form_bound() {
    let t = trace_norm_estimate(&KernelOperator::general(1.0, FRAC_PI_2).unwrap(), &NystromOptions::default())
        .unwrap();
    let bound = analytic_trace_bound(1.0, FRAC_PI_2).unwrap();
    assert!(t.value <= bound, "{} > {bound}", t.value);
    // trace norm dominates the Hilbert–Schmidt and operator norms
    let hs = t.singular_values.iter().map(|s| s * s).sum::<f64>().sqrt();
    assert!(t.value >= hs && hs >= t.largest());
}

#[test]
fn closed_form_bound_by_hand() {
    let (a, b) = (1.0f64, FRAC_PI_2);
    let by_hand = 2f64.powf(0.25)
        * PI.powf(0.75)
        * ((-a).exp() / a.powf(0.25))
        * ((PI / 2.0).sqrt() + 1.0 / (4.0 * a)).sqrt()
        * ((b.powi(4) + 4.0 * b.powi(2) + 24.0) / b.powi(5)).sqrt();
    let v = analytic_trace_bound(a, b).unwrap();
    assert!((v - by_hand).abs() < 1e-14 * by_hand);
    assert_eq!(analytic_trace_bound(a, -b).unwrap(), v);
    assert!(analytic_trace_bound(1.0, 0.1).unwrap() > analytic_trace_bound(1.0, 1.0).unwrap());
    assert!(analytic_trace_bound(60.0, 1.0).unwrap() < 1e-25);
    assert!(analytic_trace_bound(0.0, 1.0).is_err());
    assert!(analytic_trace_bound(1.0, 0.0).is_err());
}

#[test]
fn mirrored_kernel_has_the_same_trace_norm() {
    for k in [
        KernelOperator::general(0.5, FRAC_PI_8).unwrap(),
        KernelOperator::modular(0.7, 0.3, 1.0).unwrap(),
    ] {
        let a = trace_norm_estimate(&k, &quick()).unwrap().value;
        let b = trace_norm_estimate(&k.mirrored(), &quick()).unwrap().value;
        assert!((a - b).abs() <= 1e-10 * a, "{a} vs {b}");
    }
}

#[test]
fn modular_trace_norm_decreases_in_s() {
    let vals: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&s| {
            trace_norm_estimate(&KernelOperator::modular(s, FRAC_PI_4, 1.0).unwrap(), &quick())
                .unwrap()
                .value
        })
        .collect();
    assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
}

#[test]
fn sigma_ising_matches_the_unsubstituted_form() {
    // σ(2s′, κ) = 2√2 e^{−2ms′ cos κ}‖S₂‖_κ / √(ms′ cos κ (κ(S₂) − κ)) at s′ = 1/2
    let sp = 0.5;
    let c = FRAC_PI_4.cos();
    let expected = 2.0 * 2f64.sqrt() * (-2.0 * sp * c).exp() / (sp * c * (FRAC_PI_2 - FRAC_PI_4)).sqrt();
    let got = sigma(&ScatteringFunction::ising(1.0), 1.0, FRAC_PI_4).unwrap();
    assert!((got - expected).abs() < 1e-14 * expected, "{got} vs {expected}");
}

#[test]
fn sigma_limits_and_monotonicity() {
    let s = resonance(Sign::Minus, 1.0);
    let k = FRAC_PI_8;
    let mut last = f64::INFINITY;
    for x in [1e-6, 0.1, 0.5, 1.0, 2.0, 5.0, 40.0] {
        let v = sigma(&s, x, k).unwrap();
        assert!(v < last);
        last = v;
    }
    assert!(sigma(&s, 1e-12, k).unwrap() > 1e5);
    assert!(sigma(&s, 60.0, k).unwrap() < 1e-15);
    assert!(sigma(&s, 1.0, FRAC_PI_4).is_err());
    assert!(sigma(&s, 0.0, k).is_err());
    let unbounded = ScatteringFunction::build(Sign::Plus, 0.5, &[], 1.0, false).unwrap();
    assert!(sigma(&unbounded, 1.0, 0.3).is_err());
}

fn direct_sqrt_factorial_sum(x: f64) -> f64 {
    let mut acc = 0.0;
    let mut fact = 1.0f64;
    for n in 0..200 {
        if n > 0 {
            fact *= n as f64;
        }
        acc += x.powi(n) / fact.sqrt();
    }
    acc
}

#[test]
fn sqrt_factorial_series_oracles() {
    assert_eq!(sqrt_factorial_series(0.0).unwrap().value, 1.0);
    let one = sqrt_factorial_series(1.0).unwrap().value;
    assert!((one - direct_sqrt_factorial_sum(1.0)).abs() < 1e-11 * one);
    assert!((one - 3.4695).abs() < 1e-3);
    for x in [0.3, 2.0, 5.0] {
        let v = sqrt_factorial_series(x).unwrap().value;
        let d = direct_sqrt_factorial_sum(x);
        assert!((v - d).abs() < 1e-11 * d, "x={x}: {v} vs {d}");
    }
    // log-space summation survives values far beyond f64 range
    let big = sqrt_factorial_series(60.0).unwrap();
    assert!(big.log_value.is_finite() && big.log_value > 1000.0);
    assert!(sqrt_factorial_series(-1.0).is_err());
}

#[test]
fn geometric_series_cases() {
    assert_eq!(geometric_series(0.5).value, 2.0);
    assert!(!geometric_series(1.0).finite);
    assert!(geometric_series(3.0).value.is_infinite());
}

#[test]
fn distal_bound_tends_to_one_at_large_s() {
    let s = resonance(Sign::Plus, 1.0);
    let near = xi_bound_distal(&s, 0.01, FRAC_PI_8, &quick()).unwrap();
    assert!(!near.finite);
    let a = xi_bound_distal(&s, 8.0, FRAC_PI_8, &quick()).unwrap();
    let b = xi_bound_distal(&s, 16.0, FRAC_PI_8, &quick()).unwrap();
    assert!(a.finite && b.finite);
    assert!(b.value < a.value && b.value - 1.0 < 1e-6);
}

#[test]
fn minus_bound_requires_minus_class_and_decreases() {
    assert!(xi_bound_minus(&ScatteringFunction::free(1.0), 1.0, FRAC_PI_4, &quick()).is_err());
    let ising = ScatteringFunction::ising(1.0);
    let mut last = f64::INFINITY;
    for s in [0.5, 1.0, 2.0] {
        let v = xi_bound_minus(&ising, s, FRAC_PI_4, &quick()).unwrap();
        assert!(v.finite && v.log_value < last);
        last = v.log_value;
    }
}

#[test]
fn s_min_is_order_one_and_scales_with_mass() {
    let opts = quick();
    let a = find_s_min(&resonance(Sign::Plus, 1.0), FRAC_PI_8, default_bracket(1.0), 1e-4, &opts).unwrap();
    assert!(a.s_min > 0.0 && a.s_min < 10.0, "{}", a.s_min);
    let b = find_s_min(&resonance(Sign::Plus, 2.0), FRAC_PI_8, default_bracket(2.0), 0.5e-4, &opts).unwrap();
    assert!((2.0 * b.s_min / a.s_min - 1.0).abs() < 0.05);
    // the objective is decreasing across the bracket
    let s = resonance(Sign::Plus, 1.0);
    let mut last = f64::INFINITY;
    for x in [0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 40.0] {
        let v = smin_objective(&s, x, FRAC_PI_8, &opts).unwrap();
        assert!(v < last);
        last = v;
    }
    assert!(find_s_min(&s, FRAC_PI_8, (20.0, 50.0), 1e-4, &opts).is_err());
}

#[test]
fn free_bose_bound_properties() {
    let b1 = free_bose_bound(1.0, 1.0, &quick()).unwrap();
    assert!(b1.largest_phi < 1.0 && b1.largest_pi < 1.0);
    // each kernel is a sum of two pieces of norm at most e^{−sm}
    assert!(b1.largest_phi <= 2.0 * (-1.0f64).exp());
    assert!(b1.value.is_finite() && b1.conservative_surrogate);
    let b10 = free_bose_bound(10.0, 1.0, &quick()).unwrap();
    assert!((b10.value - 1.0).abs() < 1e-3);
    let mut last = f64::INFINITY;
    for s in [0.5, 1.0, 2.0, 4.0] {
        let v = free_bose_bound(s, 1.0, &quick()).unwrap().value;
        assert!(v < last);
        last = v;
    }
}

#[test]
fn fermi_bound_is_below_determinant_surrogate() {
    for s in [0.5, 1.0] {
        let f = ising_fermi_bound(s, 1.0, &quick()).unwrap();
        assert!(f.value.is_finite());
        assert!(f.log_value < f.log_determinant);
    }
    assert!((ising_fermi_bound(12.0, 1.0, &quick()).unwrap().value - 1.0).abs() < 1e-4);
}

#[test]
fn partition_bound_properties() {
    let ising = ScatteringFunction::ising(1.0);
    let full = partition_bound(&ising, 0.5, 1.0, FRAC_PI_4, false, &quick()).unwrap();
    let half = partition_bound(&ising, 0.5, 1.0, FRAC_PI_4, true, &quick()).unwrap();
    assert_eq!(full.value, 2.0 * half.value);
    assert!(full.heuristic);
    let far = partition_bound(&ising, 1e6, 1.0, FRAC_PI_4, true, &quick()).unwrap();
    assert!((far.mu - 0.25).abs() < 1e-6 && (far.s_eff - 1.0).abs() < 1e-6);
    assert!(partition_bound(&ScatteringFunction::free(1.0), 1.0, 1.0, FRAC_PI_4, true, &quick()).is_err());
}

#[test]
fn curve_is_deterministic() {
    let s = ScatteringFunction::ising(1.0);
    let a = nuclearity_curve(&s, FRAC_PI_4, &[0.5, 2.0], &quick()).unwrap();
    let b = nuclearity_curve(&s, FRAC_PI_4, &[0.5, 2.0], &quick()).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.points.iter().all(|p| p.minus.is_some()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gram_is_hermitian(x in -3.0f64..3.0, xp in -3.0f64..3.0, a in 0.1f64..3.0, b in 0.05f64..2.0) {
        for k in [KernelOperator::general(a, b).unwrap(), KernelOperator::bose_pi(a, 1.0).unwrap()] {
            let g = k.gram(x, xp);
            let h = k.gram(xp, x).conj();
            prop_assert!((g - h).norm() <= 1e-14 * g.norm().max(1e-300));
        }
    }

    #[test]
    fn norms_are_ordered(a in 0.3f64..3.0, b in 0.2f64..2.0) {
        let t = trace_norm_estimate(&KernelOperator::general(a, b).unwrap(), &NystromOptions::single(12.0, 160)).unwrap();
        let hs = t.singular_values.iter().map(|s| s * s).sum::<f64>().sqrt();
        prop_assert!(t.value >= hs && hs >= t.largest());
        prop_assert!(t.largest() <= 2.0 * PI * (-a).exp() * (1.0 + 1e-9));
    }

    #[test]
    fn sqrt_series_is_increasing(x in 0.0f64..20.0, dx in 0.01f64..1.0) {
        let lo = sqrt_factorial_series(x).unwrap().log_value;
        let hi = sqrt_factorial_series(x + dx).unwrap().log_value;
        prop_assert!(hi > lo);
    }
}
