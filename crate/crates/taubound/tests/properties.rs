//! Randomized and property-based invariants of the tensor utilities and
//! the bound.

mod common;

use proptest::prelude::*;
use taubound::analysis::{threshold_scan, Detector, TAU_DETECT_TOL};
use taubound::bounds::tau_n_with_kappa;
use taubound::states::{
    haar_pure_with_rng, isotropic_mix, make_ghz, make_w, random_mixed, seeded_rng, Family,
    StateFamily,
};
use taubound::tensor::{
    self, frobenius_norm, hermitian_eigenvalues, permute_subsystems, singular_values, CMatrix,
    DimList, C64,
};
use taubound::{pure_concurrence, tau_n, Error, KAPPA};

#[test]
fn schmidt_symmetry_of_reduced_spectra() {
    // The two sides of any bipartition of a pure state share their
    // nonzero reduced eigenvalues.
    let mut rng = seeded_rng(501);
    for dims in [
        vec![2, 2],
        vec![2, 3],
        vec![2, 2, 2],
        vec![2, 3, 4],
        vec![3, 3, 3],
    ] {
        let dims = DimList::new(dims).unwrap();
        let n = dims.n_parties();
        for _ in 0..10 {
            let rho = haar_pure_with_rng(&dims, &mut rng).to_density();
            for bip in taubound::enumerate_bipartitions(n).unwrap() {
                let left = hermitian_eigenvalues(rho.reduce(bip.left()).unwrap().matrix());
                let right = hermitian_eigenvalues(rho.reduce(bip.right()).unwrap().matrix());
                let nonzero = |v: Vec<f64>| -> Vec<f64> {
                    v.into_iter().filter(|&e| e.abs() > 1e-12).collect()
                };
                let dist = common::spectrum_distance(nonzero(left), nonzero(right));
                assert!(dist <= 1e-10, "Schmidt asymmetry {dist:.3e} at {bip}");
            }
        }
    }
}

#[test]
fn permutation_preserves_spectra() {
    let dims = DimList::new(vec![2, 3, 2]).unwrap();
    let mut rng = seeded_rng(502);
    for _ in 0..10 {
        let rho = random_mixed(&dims, 6, &mut rng);
        for perm in [[1usize, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let permuted = permute_subsystems(rho.matrix(), &dims, &perm).unwrap();
            let dist = common::spectrum_distance(
                hermitian_eigenvalues(rho.matrix()),
                hermitian_eigenvalues(&permuted),
            );
            assert!(dist <= 1e-10);
        }
    }
}

#[test]
fn bound_never_exceeds_squared_concurrence_on_pure_states() {
    let dims = DimList::new(vec![2, 2, 2]).unwrap();
    let mut rng = seeded_rng(503);
    let mut max_gap: f64 = 0.0;
    for _ in 0..500 {
        let psi = haar_pure_with_rng(&dims, &mut rng);
        let tau = tau_n(&psi.to_density()).unwrap().tau;
        let c2 = pure_concurrence(&psi).unwrap().c_squared;
        assert!(tau <= c2 + 1e-9, "tau {tau} above C^2 {c2}");
        max_gap = max_gap.max((tau - c2).abs());
    }
    // tight on pure states
    assert!(
        max_gap <= 1e-9,
        "pure-state identity violated by {max_gap:.3e}"
    );
}

#[test]
fn mixture_bounds_grow_with_the_pure_weight() {
    for psi in [make_ghz(2, 3).unwrap(), make_w(3).unwrap()] {
        let mut prev = -1.0;
        for k in 0..=100 {
            let p = k as f64 / 100.0;
            let tau = tau_n(&isotropic_mix(&psi, p).unwrap()).unwrap().tau;
            assert!(
                tau >= prev - 1e-12,
                "bound decreased at p = {p}: {tau} < {prev}"
            );
            prev = tau;
        }
    }
}

#[test]
fn detection_is_invariant_under_calibration_rescaling() {
    let w = make_w(3).unwrap();
    for k in 0..=100 {
        let p = k as f64 / 100.0;
        let rho = isotropic_mix(&w, p).unwrap();
        let fired = tau_n_with_kappa(&rho, KAPPA).unwrap().tau > TAU_DETECT_TOL;
        let fired_scaled = tau_n_with_kappa(&rho, 2.0 * KAPPA).unwrap().tau > TAU_DETECT_TOL;
        assert_eq!(fired, fired_scaled, "detection set changed at p = {p}");
    }
}

#[test]
fn detector_strength_ordering_on_w_mixtures() {
    // The bound fires on a strict superset of the correlation-matrix
    // criterion's interval; the reference witness never fires at all.
    let fam = StateFamily::new(Family::WMix, Some(0.5), DimList::uniform(2, 3).unwrap()).unwrap();
    let tau_scan = threshold_scan(&fam, &Detector::Tau3, 1e-4).unwrap();
    let kf_scan = threshold_scan(&fam, &Detector::Kf, 1e-4).unwrap();
    assert!(
        tau_scan.p_star + 1e-3 < kf_scan.p_star,
        "tau threshold {} not strictly below kf threshold {}",
        tau_scan.p_star,
        kf_scan.p_star
    );
    let witness = CMatrix::identity(8, 8).scale(0.5) - make_ghz(2, 3).unwrap().projector();
    assert!(matches!(
        threshold_scan(&fam, &Detector::Witness(witness), 1e-4),
        Err(Error::NoSignChange(_))
    ));
}

#[test]
fn random_entangled_bipartite_states_are_npt() {
    let dims = DimList::new(vec![2, 2]).unwrap();
    let mut rng = seeded_rng(505);
    for _ in 0..50 {
        let rho = haar_pure_with_rng(&dims, &mut rng).to_density();
        let report = taubound::ppt_check(&rho).unwrap();
        assert!(!report.all_positive);
        let worst = report
            .subsets
            .iter()
            .map(|s| s.min_eigenvalue)
            .fold(f64::INFINITY, f64::min);
        assert!(worst < -1e-6, "barely NPT: {worst:.3e}");
    }
}

#[test]
fn four_party_bound_is_tight_on_pure_states() {
    // GHZ on four qubits: every one-sided reduction has purity 1/2, so
    // C^2 = (1/7) * 7 * (1/2) = 1/2; the bound must match it, and stay
    // tight on Haar states.
    let g = taubound::make_ghz(2, 4).unwrap();
    let report = tau_n(&g.to_density()).unwrap();
    assert!((report.tau - 0.5).abs() <= 1e-9, "tau = {}", report.tau);
    assert_eq!(report.pairs.len(), 220);

    let dims = DimList::uniform(2, 4).unwrap();
    let mut rng = seeded_rng(506);
    for _ in 0..5 {
        let psi = haar_pure_with_rng(&dims, &mut rng);
        let tau = tau_n(&psi.to_density()).unwrap().tau;
        let c2 = pure_concurrence(&psi).unwrap().c_squared;
        assert!((tau - c2).abs() <= 1e-9, "tau {tau} vs C^2 {c2}");
    }
}

#[test]
fn spin_flip_products_have_small_imaginary_residue() {
    let dims = DimList::new(vec![2, 2, 2]).unwrap();
    let mut rng = seeded_rng(504);
    for _ in 0..20 {
        let rho = random_mixed(&dims, 8, &mut rng);
        for op in taubound::partitions::all_pair_operators(&dims).unwrap() {
            let op = op.unwrap();
            let product = rho.matrix() * taubound::bounds::spin_flipped(rho.matrix(), &op);
            // would error out if any |Im| exceeded 1e-8
            tensor::eig_real_spectrum(&product, 1e-8).unwrap();
        }
    }
}

fn small_complex_matrix() -> impl Strategy<Value = CMatrix> {
    (
        (1usize..6, 1usize..6),
        prop::collection::vec(-1.0f64..1.0, 72),
    )
        .prop_map(|((r, c), data)| {
            CMatrix::from_fn(r, c, |i, j| {
                let k = 2 * (i * c + j);
                C64::new(data[k], data[k + 1])
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_account_for_the_frobenius_norm(m in small_complex_matrix()) {
        let sum_sq: f64 = singular_values(&m).iter().map(|s| s * s).sum();
        let fro = frobenius_norm(&m);
        prop_assert!((sum_sq - fro * fro).abs() <= 1e-10);
    }

    #[test]
    fn singular_values_are_descending_and_nonnegative(m in small_complex_matrix()) {
        let sv = singular_values(&m);
        for w in sv.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        if let Some(last) = sv.last() {
            prop_assert!(*last >= 0.0);
        }
    }

    #[test]
    fn haar_states_normalize_for_any_dims(seed in 0u64..1000, pick in 0usize..4) {
        let dims = [vec![2, 2], vec![2, 3], vec![2, 2, 2], vec![3, 2]][pick].clone();
        let dims = DimList::new(dims).unwrap();
        let psi = taubound::haar_random_pure(&dims, seed);
        let norm_sq: f64 = psi.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm_sq - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn pair_concurrence_never_negative(l1 in 0.0f64..1.0, l2 in 0.0f64..1.0,
                                       l3 in 0.0f64..1.0, l4 in 0.0f64..1.0) {
        let mut l = [l1, l2, l3, l4];
        l.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let spec = taubound::LambdaSpectrum {
            bipartition: taubound::Bipartition::new(vec![0], 2).unwrap(),
            left_gen: taubound::GeneratorIndex { p: 0, q: 1 },
            right_gen: taubound::GeneratorIndex { p: 0, q: 1 },
            lambdas: l,
        };
        let c = taubound::pair_concurrence(&spec);
        prop_assert!(c >= 0.0);
        prop_assert!(c <= l[0]);
    }
}
