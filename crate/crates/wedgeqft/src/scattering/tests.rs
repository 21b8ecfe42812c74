use super::*;
use crate::fock_space::{permutations, RapidityGrid};
use crate::scattering_function::Sign;
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::FRAC_PI_4;

fn models() -> Vec<ScatteringFunction> {
    vec![
        ScatteringFunction::free(1.0),
        ScatteringFunction::ising(1.0),
        ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap(),
        ScatteringFunction::build(Sign::Plus, 0.0, &[C64::new(0.0, FRAC_PI_4)], 1.0, true).unwrap(),
    ]
}

fn space(model: ScatteringFunction, count: usize) -> FockSpace {
    FockSpace::new(model, RapidityGrid::shared(4.0, count).unwrap())
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(17)
}

// Brute-force S^π straight from the transposition rule: bubble-sort the
// rapidities, multiplying S₂(θ_right − θ_left) for every adjacent swap.
fn bubble_factor(s: &ScatteringFunction, thetas: &[f64], descending: bool) -> C64 {
    let mut v: Vec<(f64, usize)> = thetas.iter().copied().zip(0..).collect();
    let mut f = C64::new(1.0, 0.0);
    let out_of_order = |a: (f64, usize), b: (f64, usize)| {
        if descending {
            a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
        } else {
            a.0 > b.0 || (a.0 == b.0 && a.1 > b.1)
        }
    };
    loop {
        let mut swapped = false;
        for k in 0..v.len().saturating_sub(1) {
            if out_of_order(v[k], v[k + 1]) {
                f *= s.at(v[k + 1].0 - v[k].0);
                v.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            return f;
        }
    }
}

#[test]
fn packet_ordering_is_enforced() {
    let fs = space(ScatteringFunction::ising(1.0), 11);
    let mut r = rng();
    let a = fs.random_wave(&mut r, 0, 3);
    let b = fs.random_wave(&mut r, 5, 7);
    let touching = fs.random_wave(&mut r, 4, 6);
    assert!(OrderedWavePacket::new(vec![a.clone(), b.clone()]).is_ok());
    assert!(OrderedWavePacket::new(vec![b.clone(), a.clone()]).is_err());
    assert!(OrderedWavePacket::new(vec![a.clone(), touching]).is_err());
    let sorted = OrderedWavePacket::from_unordered(vec![b.clone(), a.clone()]).unwrap();
    assert_eq!(sorted.waves()[0], a);
    let zero = WaveFunction1::zeros(fs.grid().clone());
    assert!(OrderedWavePacket::new(vec![zero]).is_err());
}

#[test]
fn one_particle_states_coincide() {
    let fs = space(ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap(), 11);
    let p = OrderedWavePacket::random(&fs, &mut rng(), 1).unwrap();
    let out = out_state(&fs, &p).unwrap();
    assert_eq!(out, in_state(&fs, &p).unwrap());
    assert_eq!(out.components()[1].data(), p.waves()[0].values.as_slice());
}

#[test]
fn creation_chain_matches_projection() {
    for m in models() {
        let fs = space(m, 13);
        let mut r = rng();
        for n in 2..=3 {
            let p = OrderedWavePacket::random(&fs, &mut r, n).unwrap();
            let a = out_state(&fs, &p).unwrap();
            assert!(a.max_abs_diff(&out_state_projected(&fs, &p).unwrap()).unwrap() < 1e-12);
            let b = in_state(&fs, &p).unwrap();
            assert!(b.max_abs_diff(&in_state_projected(&fs, &p).unwrap()).unwrap() < 1e-12);
        }
    }
}

#[test]
fn out_norm_is_product_of_norms() {
    let fs = space(ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap(), 13);
    let p = OrderedWavePacket::random(&fs, &mut rng(), 3).unwrap();
    let want: f64 = p.waves().iter().map(|w| w.norm()).product();
    for v in [out_state(&fs, &p).unwrap(), in_state(&fs, &p).unwrap()] {
        assert!((v.norm() - want).abs() < 1e-12 * want);
    }
}

#[test]
fn free_in_equals_out() {
    let fs = space(ScatteringFunction::free(1.0), 13);
    let p = OrderedWavePacket::random(&fs, &mut rng(), 3).unwrap();
    let d = out_state(&fs, &p).unwrap().max_abs_diff(&in_state(&fs, &p).unwrap()).unwrap();
    assert!(d < 1e-14);
}

#[test]
fn ising_two_particle_overlap_is_minus_one() {
    let fs = space(ScatteringFunction::ising(1.0), 13);
    let rep = recover_smatrix(&fs, 2, 3, 1e-12, 1).unwrap();
    assert!(rep.pass, "{rep:?}");
    for t in &rep.per_trial {
        assert!((t.overlap_ratio + 1.0).norm() < 1e-13);
    }
}

#[test]
fn smatrix_factor_values() {
    let s = ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap();
    assert_eq!(smatrix_factor(&s, &[0.3]), C64::new(1.0, 0.0));
    assert!((smatrix_factor(&s, &[0.3, 0.3]) + 1.0).norm() < 1e-15);
    let th = [0.4, -1.2, 2.0, 0.1];
    let f = smatrix_factor(&s, &th);
    assert!((f.norm() - 1.0).abs() < 1e-14);
    for p in permutations(4) {
        let q: Vec<f64> = p.iter().map(|&i| th[i]).collect();
        assert!((smatrix_factor(&s, &q) - f).norm() < 1e-14);
    }
}

#[test]
fn moller_multipliers_against_bubble_sort() {
    let s = ScatteringFunction::build(Sign::Minus, 0.0, &[C64::new(0.3, 0.9)], 1.0, true).unwrap();
    let mut r = rng();
    for _ in 0..20 {
        let th: Vec<f64> = (0..4).map(|_| r.gen_range(-3.0..3.0)).collect();
        // bubble sorting θ into ascending order: Ψ(θ_sorted) = (factor)·Ψ(θ)
        let out = moller_multiplier(&s, Direction::Out, &th);
        assert!((out * bubble_factor(&s, &th, false) - 1.0).norm() < 1e-13);
        let inn = moller_multiplier(&s, Direction::In, &th);
        assert!((inn - bubble_factor(&s, &th, true)).norm() < 1e-13, "{inn}");
        assert!((out.norm() - 1.0).abs() < 1e-14);
    }
    let asc = [-1.0, 0.2, 0.9];
    assert_eq!(moller_multiplier(&s, Direction::Out, &asc), C64::new(1.0, 0.0));
    let desc = [0.9, 0.2, -1.0];
    assert_eq!(moller_multiplier(&s, Direction::In, &desc), C64::new(1.0, 0.0));
}

#[test]
fn multiplier_identity_holds_at_ties() {
    let s = ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap();
    for th in [vec![0.5, 0.5], vec![0.5, -0.2, 0.5], vec![1.0, 1.0, 1.0, -0.3]] {
        let r = moller_multiplier(&s, Direction::Out, &th) * moller_multiplier(&s, Direction::In, &th);
        assert!((r - smatrix_factor(&s, &th)).norm() < 1e-14, "{th:?}");
    }
}

#[test]
fn two_particle_smatrix_nodewise() {
    for m in models() {
        let fs = space(m.clone(), 9);
        let mut r = rng();
        let a = fs.random_wave(&mut r, 0, 3);
        let b = fs.random_wave(&mut r, 5, 8);
        let t = two_particle_smatrix(&fs, &a, &b).unwrap();
        let nodes = fs.grid().nodes();
        for i in 0..9 {
            for j in 0..9 {
                let want = smatrix_factor(&m, &[nodes[i], nodes[j]]);
                assert!((t.get(&[i, j]) - want).norm() < 1e-14);
            }
        }
        assert!(two_particle_smatrix(&fs, &b, &a).is_err());
    }
}

#[test]
fn smatrix_is_unitary_on_grid() {
    let fs = space(ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap(), 9);
    let t = Tensor::random(&mut rng(), 3, 9, 0, 8).unwrap();
    let w = fs.grid().weights();
    let st = apply_smatrix(&fs, &t).unwrap();
    assert!((st.norm_sqr(w) - t.norm_sqr(w)).abs() < 1e-12 * t.norm_sqr(w));
}

#[test]
fn recovery_passes_for_all_models() {
    for m in models() {
        let fs = space(m, 21);
        for n in 2..=3 {
            let rep = recover_smatrix(&fs, n, 4, 1e-10, 99).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }
}

#[test]
fn recovery_is_deterministic() {
    let fs = space(ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap(), 13);
    assert_eq!(recover_smatrix(&fs, 2, 3, 1e-10, 5).unwrap(), recover_smatrix(&fs, 2, 3, 1e-10, 5).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_identity(seed in any::<u64>(), n in 1usize..6) {
        let s = ScatteringFunction::sinh_gordon(0.37, 1.0).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let th: Vec<f64> = (0..n).map(|_| r.gen_range(-4.0..4.0)).collect();
        let lhs = moller_multiplier(&s, Direction::Out, &th) * moller_multiplier(&s, Direction::In, &th);
        prop_assert!((lhs - smatrix_factor(&s, &th)).norm() < 1e-12);
    }

    #[test]
    fn out_states_are_label_independent(seed in any::<u64>()) {
        // building from a shuffled list reproduces the same vector
        let fs = space(ScatteringFunction::sinh_gordon(0.5, 1.0).unwrap(), 13);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let p = OrderedWavePacket::random(&fs, &mut r, 3).unwrap();
        let mut shuffled = p.waves().to_vec();
        shuffled.swap(0, 2);
        let q = OrderedWavePacket::from_unordered(shuffled).unwrap();
        let d = out_state(&fs, &p).unwrap().max_abs_diff(&out_state(&fs, &q).unwrap()).unwrap();
        prop_assert!(d < 1e-12);
    }
}
