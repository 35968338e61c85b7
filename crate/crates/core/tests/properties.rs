mod common;

use common::*;
use proptest::prelude::*;
use qmeter_core::calibration::{estimate_channel, exact_channel, interference_gap};
use qmeter_core::info::{
    entropy_of, equivocation, joint_distribution, mutual_information, noise, reliability_index,
    SourceDistribution,
};
use qmeter_core::interpretation::{
    kochen_dieks_context, pointer_basis_context, pointer_misalignment, vermaas_dieks_context,
};
use qmeter_core::{BipartiteState, ChannelMatrix, Complex64, MeasurementDevice, PureState, Side};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|x| x.abs() > 1e-12);
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_compose_conserves_norm(seed: u64, n in 1usize..=8, m in 1usize..=8, idx in 0usize..8) {
        let mut r = rng(seed);
        let s = random_state(&mut r, n);
        let idx = idx % m;
        let b = BipartiteState::tensor_compose(&s, idx, m).unwrap();
        prop_assert!((b.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reductions_share_nonzero_spectrum(seed: u64, n in 1usize..=6, m in 1usize..=6) {
        let st = random_bipartite(&mut rng(seed), n, m);
        let a = nonzero_sorted(st.partial_trace(Side::Pointer).eigenvalues());
        let b = nonzero_sorted(st.partial_trace(Side::System).eigenvalues());
        prop_assert_eq!(a.len(), b.len());
        prop_assert!(max_abs_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn schmidt_coefficients_are_root_eigenvalues(seed: u64, n in 1usize..=6, m in 1usize..=6) {
        let st = random_bipartite(&mut rng(seed), n, m);
        let sd = st.schmidt_decompose();
        for side in [Side::Pointer, Side::System] {
            let ev = st.partial_trace(side).eigenvalues();
            for (c, e) in sd.coefficients.iter().zip(&ev) {
                prop_assert!((c - e.max(0.0).sqrt()).abs() < 1e-10, "c={} e={}", c, e);
            }
        }
        let err = (sd.reconstruct() - st.beta()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn spectral_projectors_are_orthogonal_idempotents(seed: u64, n in 1usize..=5, m in 1usize..=5) {
        let st = random_bipartite(&mut rng(seed), n, m);
        let rho = st.partial_trace(Side::Pointer);
        let sd = rho.spectral_decompose().unwrap();
        for (a, pa) in sd.projectors.iter().enumerate() {
            for (b, pb) in sd.projectors.iter().enumerate() {
                let prod = pa * pb;
                let dev = if a == b { &prod - pa } else { prod };
                prop_assert!(dev.iter().map(|x| x.norm()).fold(0.0, f64::max) < 1e-10);
            }
        }
        let total: f64 = sd.weights().iter().sum();
        prop_assert!((total - rho.trace()).abs() < 1e-9);
    }

    #[test]
    fn devices_preserve_norm(seed: u64, n in 1usize..=5, extra in 0usize..=3) {
        let mut r = rng(seed);
        let m = n + extra;
        let (dev, _) = random_device(&mut r, n, m);
        let out = dev.apply(&random_state(&mut r, n)).unwrap();
        prop_assert!((out.norm_sq() - 1.0).abs() < 1e-10);
        for k in 0..n {
            let e = dev.apply(&PureState::basis(n, k).unwrap()).unwrap();
            prop_assert_eq!(e.beta(), dev.response(k));
            prop_assert_eq!(interference_gap(&dev, &PureState::basis(n, k).unwrap()).unwrap(), 0.0);
        }
        for row in &exact_channel(&dev).unwrap().probs {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disturbing_devices_are_deterministic(seed: u64, n in 1usize..=5) {
        let mut r = rng(seed);
        let disturbed: Vec<Vec<Complex64>> = (0..n).map(|_| {
            let mut v = random_vector(&mut r, n);
            normalize(&mut v);
            v
        }).collect();
        let dev = MeasurementDevice::make_disturbing(n, &disturbed).unwrap();
        for k in 0..n {
            let p = dev.apply(&PureState::basis(n, k).unwrap()).unwrap().pointer_distribution();
            for (j, pj) in p.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                prop_assert!((pj - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn calibration_is_reproducible(seed: u64, n in 1usize..=3) {
        let (dev, _) = random_device(&mut rng(seed), n, n + 1);
        let a = estimate_channel(&dev, 3000, seed).unwrap();
        let b = estimate_channel(&dev, 3000, seed).unwrap();
        prop_assert_eq!(&a, &b);
        // longer runs extend, never reshuffle, the earlier shots
        let c = estimate_channel(&dev, 6000, seed).unwrap();
        for (short, long) in a.estimated.counts.unwrap().iter().zip(c.estimated.counts.unwrap()) {
            for (s, l) in short.iter().zip(long) {
                prop_assert!(*s <= l);
            }
        }
    }

    #[test]
    fn shannon_identity_and_bounds(seed: u64, n in 1usize..=16, m in 1usize..=16) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, n, m);
        let src = SourceDistribution::from_probs(random_simplex(&mut r, n)).unwrap();
        let j = joint_distribution(&src, &ch).unwrap();
        let (hs, hd) = (entropy_of(&j.source), entropy_of(&j.destination));
        let (e, nz) = (equivocation(&j), noise(&j));
        for v in [hs, hd, e, nz] {
            prop_assert!(v.is_finite());
        }
        prop_assert!(((hs - e) - (hd - nz)).abs() < 1e-10);
        prop_assert!(e >= -1e-10 && e <= hs + 1e-10);
        prop_assert!(nz >= -1e-10 && nz <= hd + 1e-10);
        let mi = mutual_information(&j).unwrap();
        prop_assert!(mi >= 0.0 && mi <= hs.min(hd) + 1e-10);
    }

    #[test]
    fn reliability_is_permutation_invariant(seed: u64, n in 2usize..=8) {
        let mut r = rng(seed);
        let ch = random_channel(&mut r, n, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let permuted = ChannelMatrix::from_rows(
            (0..n).map(|k| (0..n).map(|j| ch.probs[perm[k]][perm[j]]).collect()).collect(),
        ).unwrap();
        let a = reliability_index(&ch).unwrap();
        let b = reliability_index(&permuted).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&a));
    }

    #[test]
    fn modal_contexts_agree_off_degeneracy(seed: u64, n in 1usize..=5, m in 1usize..=5) {
        let st = random_bipartite(&mut rng(seed), n, m);
        let kd = kochen_dieks_context(&st);
        prop_assume!(!kd.degenerate);
        let vd = vermaas_dieks_context(&st).unwrap();
        let a = nonzero_sorted(kd.probabilities.clone());
        let b = nonzero_sorted(vd.probabilities.clone());
        prop_assert_eq!(a.len(), b.len());
        prop_assert!(max_abs_diff(&a, &b) < 1e-10);
        prop_assert_eq!(pointer_basis_context(&st).probabilities, st.pointer_distribution());
    }

    #[test]
    fn ideal_states_have_zero_misalignment(seed: u64, n in 1usize..=6) {
        let mut r = rng(seed);
        let s = random_state(&mut r, n);
        let mut mags: Vec<f64> = s.probabilities();
        mags.sort_by(|a, b| a.total_cmp(b));
        prop_assume!(mags.windows(2).all(|w| w[1] - w[0] > 1e-6) && mags[0] > 1e-6);
        let st = MeasurementDevice::make_ideal(n).unwrap().apply(&s).unwrap();
        let mis = pointer_misalignment(&st);
        prop_assert!(!mis.degenerate);
        prop_assert!(mis.value < 1e-10);
    }
}

#[test]
fn zero_and_one_entries_are_safe() {
    let ch = ChannelMatrix::from_rows(vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.5, 0.5],
    ])
    .unwrap();
    for src in [vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.2, 0.3, 0.5]] {
        let j = joint_distribution(&SourceDistribution::from_probs(src).unwrap(), &ch).unwrap();
        for v in [equivocation(&j), noise(&j), mutual_information(&j).unwrap()] {
            assert!(v.is_finite());
        }
    }
    assert!(reliability_index(&ch).unwrap().is_finite());
}

#[test]
fn bsc_reliability_strictly_decreasing() {
    let grid: Vec<f64> = (0..50).map(|i| 0.5 * i as f64 / 49.0).collect();
    let r: Vec<f64> = grid
        .iter()
        .map(|q| reliability_index(&exact_channel(&bsc_device(*q)).unwrap()).unwrap())
        .collect();
    assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
}
