use proptest::prelude::*;

use symdesign::ensemble::{delta_ts, projected_ensemble, violation, BasisSpec};
use symdesign::linalg::{sample_haar_state, StateVector, SystemGeometry};
use symdesign::moments::MomentBudget;
use symdesign::rng::{stream_id, stream_rng};
use symdesign::symmetry::{
    sample_symmetric_state, translate, Chain, ReflectionAxis, SectorKind, SectorProjector, Sign, SiteMap,
};
use symdesign::C64;

fn sector(n: usize) -> impl Strategy<Value = SectorKind> {
    prop_oneof![
        (0..n).prop_map(|k| SectorKind::Translation { k }),
        (0..2u8).prop_map(|parity| SectorKind::Z2 { parity }),
        any::<bool>().prop_map(|plus| SectorKind::Reflection {
            axis: ReflectionAxis::Mirror,
            sign: if plus { Sign::Plus } else { Sign::Minus },
        }),
        Just(SectorKind::translation_plus_reflections(n)),
    ]
}

fn basis(seed: u64) -> impl Strategy<Value = BasisSpec> {
    prop_oneof![
        Just(BasisSpec::Computational),
        Just(BasisSpec::SigmaX),
        any::<bool>().prop_map(move |shared| BasisSpec::LocalProduct { seed, shared }),
        Just(BasisSpec::GlobalHaar { seed }),
        (0.0..=1.0f64).prop_map(|alpha| BasisSpec::MixedLastSite { alpha }),
        (1..3usize).prop_map(|power| BasisSpec::EigTB { power, insertion: None }),
        Just(BasisSpec::EigTB { power: 1, insertion: Some(seed) }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projector_squares_to_scaled_self((n, kind) in (3..=7usize).prop_flat_map(|n| (Just(n), sector(n))), seed in any::<u64>()) {
        let p = SectorProjector::new(kind, Chain::qubits(n)).unwrap();
        let psi = sample_haar_state(1 << n, &mut stream_rng(seed, 0));
        let once = p.apply(&psi).unwrap();
        let mut twice = p.apply(&once).unwrap();
        twice.scale(C64::new(1.0 / p.scale(), 0.0));
        prop_assert!(twice.max_abs_diff(&once) < 1e-10);
    }

    #[test]
    fn sampled_states_lie_in_their_sector((n, kind) in (3..=7usize).prop_flat_map(|n| (Just(n), sector(n))), seed in any::<u64>()) {
        let p = SectorProjector::new(kind, Chain::qubits(n)).unwrap();
        let s = sample_symmetric_state(&p, &mut stream_rng(seed, 1)).unwrap();
        prop_assert!(s.state.is_normalized());
        prop_assert!(p.eigen_residual(&s.state).unwrap() < 1e-10);
    }

    #[test]
    fn bases_are_orthonormal(n_b in 1..=6usize, spec in any::<u64>().prop_flat_map(basis)) {
        let b = spec.build(n_b, 2).unwrap();
        prop_assert_eq!(b.len(), 1 << n_b);
        prop_assert!(b.gram_defect() < 1e-10);
    }

    #[test]
    fn projected_ensemble_is_a_probability_distribution(
        n_a in 1..=3usize,
        n_b in 1..=5usize,
        spec in any::<u64>().prop_flat_map(basis),
        seed in any::<u64>(),
    ) {
        let geom = SystemGeometry::new(n_a, n_b).unwrap();
        let psi = sample_haar_state(geom.dim(), &mut stream_rng(seed, 2));
        let e = projected_ensemble(&psi, &spec.build(n_b, 2).unwrap(), &geom).unwrap();
        let total: f64 = e.probabilities.iter().sum::<f64>() + e.dropped_mass;
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(e.states.iter().all(StateVector::is_normalized));
    }

    #[test]
    fn design_distance_is_bounded(n_a in 1..=2usize, n_b in 1..=4usize, seed in any::<u64>()) {
        let geom = SystemGeometry::new(n_a, n_b).unwrap();
        let psi = sample_haar_state(geom.dim(), &mut stream_rng(seed, 3));
        let basis = BasisSpec::Computational.build(n_b, 2).unwrap();
        let d = delta_ts(&psi, &basis, &[1, 2, 3], &geom, &MomentBudget::default()).unwrap();
        prop_assert!(d.iter().all(|x| (0.0..=2.0 + 1e-12).contains(x)));
    }

    #[test]
    fn computational_basis_satisfies_parity_condition(n_a in 1..=3usize, n_b in 1..=4usize, parity in 0..2u8) {
        let geom = SystemGeometry::new(n_a, n_b).unwrap();
        let p = SectorProjector::new(SectorKind::Z2 { parity }, geom.into()).unwrap();
        let report = violation(&p, &BasisSpec::Computational.build(n_b, 2).unwrap(), &geom).unwrap();
        prop_assert!(report.total < 1e-12);
    }

    #[test]
    fn translations_compose(n in 2..=8usize, i in -10i64..10, j in -10i64..10, seed in any::<u64>()) {
        let chain = Chain::qubits(n);
        let psi = sample_haar_state(1 << n, &mut stream_rng(seed, 4));
        let a = translate(&translate(&psi, i, chain).unwrap(), j, chain).unwrap();
        let b = translate(&psi, i + j, chain).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-15);
        let c = SiteMap::translation(n, i).compose(&SiteMap::translation(n, -i));
        prop_assert!(c.is_identity());
    }

    #[test]
    fn streams_are_reproducible(seed in any::<u64>(), parts in prop::collection::vec(any::<u64>(), 0..4)) {
        let id = stream_id(&parts);
        let a = sample_haar_state(8, &mut stream_rng(seed, id));
        let b = sample_haar_state(8, &mut stream_rng(seed, id));
        prop_assert_eq!(a, b);
    }
}
