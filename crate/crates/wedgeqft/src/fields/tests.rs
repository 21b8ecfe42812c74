use super::*;
use crate::fock_space::{minkowski, momentum};
use crate::quadrature::composite_gl;
use crate::scattering_function::ScatteringFunction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Brute-force (1/2π)∫ f(±x) e^{i p(ζ)·x} d²x over a box, straight from the definition.
fn brute_mass_shell(f: &TestFunction2D, sign: Sign, zeta: C64, mass: f64, bx: [f64; 4], panels: usize) -> C64 {
    let s = sign.value();
    let p0 = zeta.cosh() * mass;
    let p1 = zeta.sinh() * mass;
    composite_gl(bx[0], bx[1], panels, 16, |x0| {
        composite_gl(bx[2], bx[3], panels, 16, |x1| {
            f.value([s * x0, s * x1]) * (C64::i() * (p0 * x0 - p1 * x1)).exp()
        })
    }) / (2.0 * PI)
}

fn shg_space(count: usize) -> FockSpace {
    FockSpace::new(
        ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap(),
        RapidityGrid::shared(5.0, count).unwrap(),
    )
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn gaussian_mass_shell_matches_direct_integral() {
    let f = TestFunction2D::gaussian([0.3, -0.2], 0.8, [0.4, -0.7], C64::new(1.0, 0.5)).unwrap();
    let bx = [-7.0, 7.0, -7.0, 7.0];
    for sign in [Sign::Plus, Sign::Minus] {
        for zeta in [C64::new(0.0, 0.0), C64::new(0.7, 0.0), C64::new(-0.4, 0.6), C64::new(0.3, 2.9)] {
            let got = f.mass_shell(sign, zeta, 1.3).unwrap();
            let want = brute_mass_shell(&f, sign, zeta, 1.3, bx, 40);
            assert!(rel(got, want) < 1e-10, "{sign:?} {zeta}: {got} vs {want}");
        }
    }
}

#[test]
fn bump_mass_shell_matches_direct_integral() {
    let f = TestFunction2D::bump([-0.4, 0.6, 1.0, 2.5], 64).unwrap();
    let bx = f.support_box().unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        for zeta in [C64::new(0.0, 0.0), C64::new(1.5, 0.0), C64::new(-0.8, 1.2), C64::new(0.2, 3.0)] {
            let got = f.mass_shell(sign, zeta, 1.0).unwrap();
            let b = match sign {
                Sign::Plus => bx,
                Sign::Minus => [-bx[1], -bx[0], -bx[3], -bx[2]],
            };
            let want = brute_mass_shell(&f, sign, zeta, 1.0, b, 60);
            assert!(rel(got, want) < 1e-9, "{sign:?} {zeta}: {got} vs {want}");
        }
    }
}

#[test]
fn bump_quadrature_resolves_fast_oscillation() {
    // at rapidity 5 the momentum is about 74, so κh is far beyond the base order
    let f = TestFunction2D::bump([-0.5, 0.5, 2.0, 3.0], 32).unwrap();
    let zeta = C64::new(5.0, 0.0);
    let got = f.mass_shell(Sign::Plus, zeta, 1.0).unwrap();
    let bx = f.support_box().unwrap();
    let want = brute_mass_shell(&f, Sign::Plus, zeta, 1.0, bx, 200);
    assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()), "{got} vs {want}");
}

#[test]
fn bump_rejects_exponent_overflow() {
    let f = TestFunction2D::bump([-1.0, 1.0, 10.0, 20.0], 64).unwrap();
    let err = f.mass_shell(Sign::Plus, C64::new(6.0, 1.0), 1.0).unwrap_err();
    assert_eq!(err.kind(), "overflow");
    assert!(f.mass_shell(Sign::Plus, C64::new(6.0, 0.0), 1.0).is_ok());
}

#[test]
fn involutions_act_pointwise() {
    let g = TestFunction2D::gaussian([0.3, -1.1], 0.9, [0.5, 0.2], C64::new(0.3, -1.2))
        .unwrap()
        .transformed(&PoincareElement::boost(0.4))
        .unwrap();
    let b = TestFunction2D::bump([-0.3, 0.8, 1.0, 2.0], 32)
        .unwrap()
        .with_amplitude(C64::new(0.5, 2.0));
    for f in [g, b] {
        for x in [[0.1, 1.4], [-0.2, 1.7], [0.5, 1.2], [0.0, -1.5]] {
            let mx = [-x[0], -x[1]];
            assert!((f.star().value(x) - f.value(mx).conj()).norm() < 1e-14);
            assert!((f.conj().value(x) - f.value(x).conj()).norm() < 1e-14);
            assert!((f.time_reflected().value(x) - f.value([-x[0], x[1]]).conj()).norm() < 1e-14);
        }
    }
}

#[test]
fn transformed_gaussian_is_pullback() {
    let f = TestFunction2D::gaussian([0.2, 0.5], 0.7, [1.0, -0.3], C64::new(0.8, 0.1)).unwrap();
    let g = PoincareElement { x: [0.4, -0.9], lambda: 0.6 };
    let fg = f.transformed(&g).unwrap();
    for y in [[0.0, 0.0], [1.0, 0.3], [-0.5, 1.2]] {
        let pre = lorentz(-g.lambda, [y[0] - g.x[0], y[1] - g.x[1]]);
        assert!((fg.value(y) - f.value(pre)).norm() < 1e-13);
    }
}

#[test]
fn mass_shell_covariance() {
    // f_{(x,λ)}^±(θ) = e^{±i p(θ)·x} f^±(θ − λ)
    let m = 1.2;
    let g = PoincareElement { x: [0.3, -0.5], lambda: 0.45 };
    let f = TestFunction2D::gaussian([0.1, 0.4], 1.1, [0.2, 0.3], C64::new(1.0, 0.0)).unwrap();
    let t = PoincareElement { x: g.x, lambda: 0.0 };
    let b = TestFunction2D::bump([-0.2, 0.3, 0.8, 1.4], 64).unwrap();
    for (func, el) in [(&f, &g), (&b, &t)] {
        let ft = func.transformed(el).unwrap();
        for theta in [-1.0, 0.0, 0.8] {
            let px = minkowski(momentum(m, theta), el.x);
            for sign in [Sign::Plus, Sign::Minus] {
                let lhs = ft.mass_shell(sign, C64::new(theta, 0.0), m).unwrap();
                let rhs = C64::from_polar(1.0, sign.value() * px)
                    * func.mass_shell(sign, C64::new(theta - el.lambda, 0.0), m).unwrap();
                assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()), "{lhs} vs {rhs}");
            }
        }
    }
    assert_eq!(b.transformed(&g).unwrap_err().kind(), "domain");
}

#[test]
fn wedge_predicates() {
    let r = TestFunction2D::bump([-0.5, 0.5, 1.0, 2.0], 16).unwrap();
    let l = TestFunction2D::bump([-0.5, 0.5, -2.0, -1.0], 16).unwrap();
    let straddle = TestFunction2D::bump([-1.5, 0.5, 1.0, 2.0], 16).unwrap();
    assert!(r.in_right_wedge() && !r.in_left_wedge());
    assert!(l.in_left_wedge() && !l.in_right_wedge());
    assert!(!straddle.in_right_wedge());
    let gauss = TestFunction2D::gaussian([0.0, 5.0], 0.1, [0.0, 0.0], C64::new(1.0, 0.0)).unwrap();
    assert!(!gauss.in_right_wedge() && gauss.support_box().is_none());
    assert!(TestFunction2D::bump([1.0, 0.0, 0.0, 1.0], 16).is_err());
}

#[test]
fn phi_is_hermitian_for_real_functions() {
    let fs = shg_space(13);
    let f = TestFunction2D::gaussian([0.0, 0.0], 1.0, [0.0, 0.0], C64::new(0.7, 0.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = fs.random_symmetric(&mut rng, 2, 0, 2).unwrap();
    let b = fs.random_symmetric(&mut rng, 2, 0, 2).unwrap();
    let lhs = field_phi(&fs, &f, &a).unwrap().inner(&b).unwrap();
    let rhs = a.inner(&field_phi(&fs, &f, &b).unwrap()).unwrap();
    assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    let lhs = field_phi_prime(&fs, &f, &a).unwrap().inner(&b).unwrap();
    let rhs = a.inner(&field_phi_prime(&fs, &f, &b).unwrap()).unwrap();
    assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
}

#[test]
fn fields_agree_on_vacuum_one_particle_part() {
    // φ(f)Ω and φ′(f)Ω both equal f⁺ in the one-particle space
    let fs = shg_space(15);
    let f = TestFunction2D::gaussian([0.2, 0.1], 0.9, [0.1, 0.0], C64::new(1.0, 0.3)).unwrap();
    let a = field_phi(&fs, &f, &fs.vacuum()).unwrap();
    let b = field_phi_prime(&fs, &f, &fs.vacuum()).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
    let fp = f.sample(Sign::Plus, fs.grid(), 1.0).unwrap();
    for (i, v) in fp.values.iter().enumerate() {
        assert!((a.components()[1].data()[i] - v).norm() < 1e-14);
    }
}

#[test]
fn two_point_function_closed_form() {
    let fs = shg_space(21);
    let f = TestFunction2D::gaussian([0.0, 0.3], 0.8, [0.2, 0.0], C64::new(1.0, 0.0)).unwrap();
    let g = TestFunction2D::gaussian([0.1, -0.4], 1.2, [0.0, 0.1], C64::new(0.0, 1.0)).unwrap();
    let got = two_point(&fs, &f, &g).unwrap();
    let fm = f.sample(Sign::Minus, fs.grid(), 1.0).unwrap();
    let gp = g.sample(Sign::Plus, fs.grid(), 1.0).unwrap();
    let want = fm.pairing(&gp);
    assert!((got - want).norm() < 1e-14 * (1.0 + want.norm()));
}

#[test]
fn witness_matches_closed_form_and_vanishes_when_free() {
    let f = TestFunction2D::gaussian([0.0, 0.5], 0.8, [0.3, 0.0], C64::new(1.0, 0.0)).unwrap();
    let g = TestFunction2D::gaussian([0.2, -0.5], 1.0, [0.0, -0.2], C64::new(0.5, 0.5)).unwrap();
    let fs = shg_space(17);
    let w = nonlocality_witness(&fs, &f, &g).unwrap();
    assert!(w.max_difference < 1e-13, "{}", w.max_difference);
    assert!(w.operator.max_abs() > 1e-3);
    let free = FockSpace::new(ScatteringFunction::free(1.0), fs.grid().clone());
    let w = nonlocality_witness(&free, &f, &g).unwrap();
    assert!(w.operator.max_abs() < 1e-14);
}

#[test]
fn timezero_plancherel() {
    // ∫ m cosh θ |f̃(m sinh θ)|² dθ = ∫ |f|² dx, with the right side √π σ |A|²
    let cases = [
        TestFunction1D::Gaussian { center: 0.3, sigma: 0.7, k: 0.5, amplitude: C64::new(1.0, 0.4) },
        TestFunction1D::Bump { center: -0.2, half_width: 0.8, amplitude: C64::new(1.0, 0.0), order: 64 },
    ];
    for f in cases {
        let m = 1.4;
        let lhs = composite_gl(-8.0, 8.0, 200, 16, |t| C64::new(m * t.cosh() * f.hat(t, m).norm_sqr(), 0.0)).re;
        let rhs = composite_gl(-8.0, 8.0, 400, 16, |x| C64::new(f.value(x).norm_sqr(), 0.0)).re;
        assert!((lhs - rhs).abs() < 1e-9 * rhs, "{lhs} vs {rhs}");
        if let TestFunction1D::Gaussian { sigma, amplitude, .. } = f {
            assert!((rhs - PI.sqrt() * sigma * amplitude.norm_sqr()).abs() < 1e-12);
        }
    }
}

#[test]
fn timezero_fields_hermitian_for_real_functions() {
    let fs = shg_space(15);
    let f = TestFunction1D::Gaussian { center: 0.2, sigma: 0.9, k: 0.0, amplitude: C64::new(1.0, 0.0) };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = fs.random_symmetric(&mut rng, 2, 0, 2).unwrap();
    let b = fs.random_symmetric(&mut rng, 2, 0, 2).unwrap();
    for which in [TimeZeroField::Varphi, TimeZeroField::Pi] {
        let lhs = timezero_field(&fs, &f, which, &a).unwrap().inner(&b).unwrap();
        let rhs = a.inner(&timezero_field(&fs, &f, which, &b).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()), "{which:?}");
    }
}

#[test]
fn conjugate_function_swaps_components() {
    // (f̄)^± = conj(f^∓) at real θ
    let f = TestFunction2D::gaussian([0.3, -0.4], 0.9, [0.5, 0.2], C64::new(0.2, 1.1)).unwrap();
    let b = TestFunction2D::bump([-0.2, 0.4, 0.9, 1.6], 64).unwrap().with_amplitude(C64::new(0.3, -0.8));
    for func in [f, b] {
        for t in [-1.3, 0.0, 0.6, 2.2] {
            let z = C64::new(t, 0.0);
            for (s, o) in [(Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus)] {
                let a = func.conj().mass_shell(s, z, 1.1).unwrap();
                let b = func.mass_shell(o, z, 1.1).unwrap().conj();
                assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()));
            }
        }
    }
}

#[test]
fn shift_by_minus_i_pi_exchanges_components() {
    // p(θ − iπ) = −p(θ), so f^+(θ − iπ) = f^−(θ)
    let f = TestFunction2D::bump([-0.5, 0.5, -2.0, -1.0], 64).unwrap();
    assert!(f.in_left_wedge());
    for t in [-2.0, -0.3, 0.0, 1.7] {
        let a = f.mass_shell(Sign::Plus, C64::new(t, -PI), 1.0).unwrap();
        let b = f.mass_shell(Sign::Minus, C64::new(t, 0.0), 1.0).unwrap();
        assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()), "{a} vs {b}");
    }
}

#[test]
fn klein_gordon_image_has_vanishing_restriction() {
    // g = exp(−|x|²/(2σ²)), (□+m²)g = ((x₀² − x₁²)/σ⁴ + m²) g; integrate the definition directly
    let (sigma, m) = (0.8f64, 1.3f64);
    let g = TestFunction2D::gaussian([0.0, 0.0], sigma, [0.0, 0.0], C64::new(1.0, 0.0)).unwrap();
    let s4 = sigma.powi(4);
    for t in [0.0, 0.5, -1.1] {
        let p0 = m * f64::cosh(t);
        let p1 = m * f64::sinh(t);
        let kg = composite_gl(-7.0, 7.0, 40, 16, |x0| {
            composite_gl(-7.0, 7.0, 40, 16, |x1| {
                let w = (x0 * x0 - x1 * x1) / s4 + m * m;
                g.value([x0, x1]) * w * C64::from_polar(1.0, p0 * x0 - p1 * x1)
            })
        }) / (2.0 * PI);
        let scale = g.mass_shell(Sign::Plus, C64::new(t, 0.0), m).unwrap().norm() * m * m;
        assert!(kg.norm() < 1e-10 * scale.max(1e-3), "{kg}");
    }
}

#[test]
fn phi_bound_and_adjoint() {
    let fs = shg_space(13);
    let f = TestFunction2D::gaussian([0.2, -0.1], 0.9, [0.4, 0.3], C64::new(0.6, -0.5)).unwrap();
    let fp = f.sample(Sign::Plus, fs.grid(), 1.0).unwrap();
    let fm = f.sample(Sign::Minus, fs.grid(), 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..4 {
        let a = fs.random_symmetric(&mut rng, 3, 0, 12).unwrap();
        let b = fs.random_symmetric(&mut rng, 3, 0, 12).unwrap();
        let lhs = field_phi(&fs, &f, &a).unwrap().norm();
        assert!(lhs <= (fp.norm() + fm.norm()) * a.number_norm(1.0) * (1.0 + 1e-12));
        let l = field_phi(&fs, &f, &a).unwrap().inner(&b).unwrap();
        let r = a.inner(&field_phi(&fs, &f.conj(), &b).unwrap()).unwrap();
        assert!((l - r).norm() < 1e-12 * (1.0 + l.norm()));
    }
}

#[test]
fn phi_prime_coincides_with_phi_only_when_free() {
    let f = TestFunction2D::gaussian([0.1, 0.2], 0.9, [0.3, -0.1], C64::new(1.0, 0.2)).unwrap();
    let grid = RapidityGrid::shared(5.0, 11).unwrap();
    let free = FockSpace::new(ScatteringFunction::free(1.0), grid.clone());
    let shg = FockSpace::new(ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap(), grid);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let v = free.random_symmetric(&mut rng, 2, 0, 10).unwrap();
    let d = field_phi(&free, &f, &v).unwrap().max_abs_diff(&field_phi_prime(&free, &f, &v).unwrap()).unwrap();
    assert!(d < 1e-14);
    let v = shg.random_symmetric(&mut rng, 2, 0, 10).unwrap();
    let a = field_phi(&shg, &f, &v).unwrap();
    let b = field_phi_prime(&shg, &f, &v).unwrap();
    let diff = a.sub(&b).unwrap();
    assert!(diff.components()[2].max_abs() > 1e-3);
}

#[test]
fn covariance_under_grid_boosts() {
    let fs = shg_space(21);
    let h = fs.grid().spacing();
    let f = TestFunction2D::gaussian([0.1, -0.2], 0.9, [0.2, 0.1], C64::new(1.0, -0.4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let v = fs.random_symmetric(&mut rng, 2, 3, 17).unwrap();
    for g in [
        PoincareElement { x: [0.3, -0.7], lambda: h },
        PoincareElement { x: [-0.2, 0.1], lambda: -2.0 * h },
        PoincareElement::translation([0.5, 0.4]),
    ] {
        let back = lorentz(-g.lambda, g.x);
        let inv = PoincareElement { x: [-back[0], -back[1]], lambda: -g.lambda };
        let lhs = fs
            .poincare_apply(&g, &field_phi(&fs, &f, &fs.poincare_apply(&inv, &v).unwrap()).unwrap())
            .unwrap();
        let rhs = field_phi(&fs, &f.transformed(&g).unwrap(), &v).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
    }
}

#[test]
fn gamma_covariance() {
    let fs = shg_space(15);
    let f = TestFunction2D::gaussian([0.4, -0.3], 0.8, [0.2, 0.5], C64::new(0.7, 0.4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let v = fs.random_symmetric(&mut rng, 2, 0, 14).unwrap();
    let lhs = fs
        .reflect_gamma(&field_phi(&fs, &f, &fs.reflect_gamma(&v).unwrap()).unwrap())
        .unwrap();
    let rhs = field_phi(&fs, &f.time_reflected(), &v).unwrap();
    assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
}

#[test]
fn two_point_function_independent_of_model() {
    let grid = RapidityGrid::shared(5.0, 21).unwrap();
    let f = TestFunction2D::gaussian([0.0, 0.3], 0.8, [0.2, 0.0], C64::new(1.0, 0.0)).unwrap();
    let g = TestFunction2D::gaussian([0.1, -0.4], 1.2, [0.0, 0.1], C64::new(0.0, 1.0)).unwrap();
    let values: Vec<C64> = [
        ScatteringFunction::free(1.0),
        ScatteringFunction::ising(1.0),
        ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap(),
    ]
    .into_iter()
    .map(|m| two_point(&FockSpace::new(m, grid.clone()), &f, &g).unwrap())
    .collect();
    for v in &values {
        assert!((v - values[0]).norm() < 1e-10);
    }
}

#[test]
fn pi_of_vacuum_has_no_vacuum_part_and_witness_vanishes_on_diagonal() {
    let fs = shg_space(11);
    let f = TestFunction1D::Gaussian { center: 0.0, sigma: 1.0, k: 0.3, amplitude: C64::new(1.0, 0.0) };
    let v = timezero_field(&fs, &f, TimeZeroField::Pi, &fs.vacuum()).unwrap();
    assert_eq!(fs.vacuum().inner(&v).unwrap(), C64::new(0.0, 0.0));
    let g = TestFunction2D::gaussian([0.3, 0.2], 0.7, [0.1, 0.0], C64::new(1.0, 0.5)).unwrap();
    let w = nonlocality_witness(&fs, &g, &g).unwrap();
    assert!(w.operator.max_abs() < 1e-15 && w.closed_form.max_abs() == 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn star_is_involution(c0 in -2.0..2.0f64, c1 in -2.0..2.0f64, q0 in -1.0..1.0f64, re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let f = TestFunction2D::gaussian([c0, c1], 0.8, [q0, 0.1], C64::new(re, im)).unwrap();
        prop_assert_eq!(f.star().star(), f.clone());
        prop_assert_eq!(f.time_reflected().time_reflected(), f);
    }

    #[test]
    fn star_conjugates_mass_shell_components(c0 in -1.0..1.0f64, c1 in -1.0..1.0f64, theta in -2.0..2.0f64) {
        // (f*)^± = conj(f^±) on the real line
        let f = TestFunction2D::gaussian([c0, c1], 0.9, [0.3, -0.2], C64::new(0.4, 0.9)).unwrap();
        let z = C64::new(theta, 0.0);
        let a = f.star().mass_shell(Sign::Plus, z, 1.0).unwrap();
        let b = f.mass_shell(Sign::Plus, z, 1.0).unwrap().conj();
        prop_assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()));
    }
}
