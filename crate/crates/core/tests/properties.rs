use proptest::prelude::*;
use rand::Rng;

use qlocc::discrimination::identifiability_report;
use qlocc::product_finder::{determinant_quadratic, quadratic_roots_with, QuadraticRoots};
use qlocc::qstate::{average_entanglement, bell, entanglement_profile_with, CoefficientMatrix};
use qlocc::random::{
    random_basis, random_orthogonal_triple, random_qubit, random_state, random_subspace_2d, rng_for,
};
use qlocc::ueb::{self, generate_eq1, generate_eq2, ueb_check, GeneratorParams};
use qlocc::verify::witness_overlaps;
use qlocc::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn amps() -> impl Strategy<Value = [C64; 4]> {
    prop::array::uniform4((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b)))
}

fn unitary2(rng: &mut rand_chacha::ChaCha8Rng) -> [[C64; 2]; 2] {
    let q = random_qubit(rng);
    let [a, b] = q.amplitudes();
    let [p, r] = q.orthogonal().amplitudes();
    let phase = C64::from_polar(1.0, rng.random_range(0.0..6.28));
    [[a, p * phase], [b, r * phase]]
}

fn assert_witnesses_valid(set: &OrthogonalSet) -> std::result::Result<(), TestCaseError> {
    let report = identifiability_report(set).unwrap();
    for v in &report.per_state {
        if let Some(w) = &v.witness {
            let (orth, target) = witness_overlaps(set, v.index, &w.state);
            prop_assert!(orth < set.tolerances().eps_orth, "orth {orth}");
            prop_assert!(target > set.tolerances().tau_overlap, "target {target}");
            prop_assert!(w.state.concurrence() < 1e-9);
        }
        if v.identifiable && set.len() == 3 {
            prop_assert!(v.witness.is_some());
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn states_are_normalized_and_canonical(a in amps()) {
        let norm: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let s = make_state(a).unwrap();
        let n: f64 = s.amplitudes().iter().map(|x| x.norm_sqr()).sum();
        prop_assert!((n - 1.0).abs() < 1e-12);
        let lead = s.amplitudes().iter().find(|x| x.norm() > 1e-9).unwrap();
        prop_assert!(lead.im == 0.0 && lead.re > 0.0);
        // global phases do not matter
        let rotated = make_state(a.map(|x| x * C64::from_polar(1.0, 0.7))).unwrap();
        prop_assert!(rotated.same_ray(&s, 1e-12));
        for (x, y) in rotated.amplitudes().iter().zip(s.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn reshaping_is_bijective(a in amps()) {
        prop_assert_eq!(CoefficientMatrix::from_amplitudes(&a).flatten(), a);
    }

    #[test]
    fn profile_is_consistent(a in amps()) {
        prop_assume!(a.iter().map(|x| x.norm_sqr()).sum::<f64>() > 1e-6);
        let s = make_state(a).unwrap();
        let p = entanglement_profile(&s);
        let (hi, lo) = p.schmidt_coefficients;
        prop_assert!((hi + lo - 1.0).abs() < 1e-12 && hi >= lo && lo >= 0.0);
        prop_assert!((p.concurrence - 2.0 * (hi * lo).sqrt()).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&p.entropy));
        prop_assert!((0.0..=1.0).contains(&p.concurrence));
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let s = random_state(&mut rng);
        let (u, v) = (unitary2(&mut rng), unitary2(&mut rng));
        let t = PureState::new(s.coefficient_matrix().local_transform(&u, &v).flatten()).unwrap();
        prop_assert!((s.concurrence() - t.concurrence()).abs() < 1e-12);
    }

    #[test]
    fn quadratic_roots_are_roots(c2 in amps(), scale in 0.0f64..1.0) {
        let (c2, c1, c0) = (c2[0] * scale, c2[1], c2[2]);
        if let QuadraticRoots::Roots(roots) = quadratic_roots_with(c2, c1, c0, 1e-9, 1e-8) {
            prop_assert!(!roots.is_empty() && roots.len() <= 2);
            let size = [c2, c1, c0].iter().map(|x| x.norm()).fold(0.0, f64::max);
            for r in roots {
                prop_assert!((r.a.norm().max(r.b.norm()) - 1.0).abs() < 1e-12);
                let value = c2 * r.a * r.a + c1 * r.a * r.b + c0 * r.b * r.b;
                prop_assert!(value.norm() < 1e-9 * size.max(1.0), "residual {}", value.norm());
            }
        }
    }

    #[test]
    fn product_states_lie_in_the_subspace(seed in any::<u64>()) {
        let sub = random_subspace_2d(&mut rng_for(seed, 0));
        let found = product_states_in_2d(&sub).unwrap();
        let states = found.states();
        prop_assert!(!states.is_empty());
        for s in states {
            prop_assert!(s.concurrence() < 1e-9);
            prop_assert!(sub.projection_norm(&s) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn determinant_quadratic_matches_direct_evaluation(seed in any::<u64>(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let mut rng = rng_for(seed, 0);
        let (u, v) = (random_state(&mut rng), random_state(&mut rng));
        let (mu, mv) = (u.coefficient_matrix(), v.coefficient_matrix());
        let [c2, c1, c0] = determinant_quadratic(&mu, &mv);
        let (a, b) = (c(x, y), c(y, -x));
        let direct = (a * mu + b * mv).det();
        prop_assert!((direct - (c2 * a * a + c1 * a * b + c0 * b * b)).norm() < 1e-12);
    }

    #[test]
    fn triples_have_valid_witnesses_and_never_three_unidentifiable(seed in any::<u64>()) {
        let (_, set) = random_orthogonal_triple(&mut rng_for(seed, 0));
        assert_witnesses_valid(&set)?;
        let (class, report) = classify(&set).unwrap();
        prop_assert!(report.unidentifiable().len() < 3);
        if class.label == NonlocalityLabel::PerfectLOCC {
            prop_assert!(report.per_state.iter().all(|v| v.identifiable));
        }
        // perfect exactly when at most one member is entangled
        prop_assert_eq!(set.entangled_count() <= 1, class.label == NonlocalityLabel::PerfectLOCC);
    }

    #[test]
    fn classification_is_permutation_invariant(seed in any::<u64>(), order in Just([0usize, 1, 2]).prop_shuffle()) {
        let (_, set) = random_orthogonal_triple(&mut rng_for(seed, 0));
        let perm = set.permuted(&order).unwrap();
        let (c1, r1) = classify(&set).unwrap();
        let (c2, r2) = classify(&perm).unwrap();
        prop_assert_eq!(c1, c2);
        for (k, &o) in order.iter().enumerate() {
            prop_assert_eq!(r2.per_state[k].identifiable, r1.per_state[o].identifiable);
        }
        prop_assert_eq!(ueb_check(&set).unwrap().is_ueb, ueb_check(&perm).unwrap().is_ueb);
    }

    #[test]
    fn bases_follow_the_complete_basis_law(seed in any::<u64>()) {
        let (_, set) = random_basis(&mut rng_for(seed, 0));
        assert_witnesses_valid(&set)?;
        let (class, report) = classify(&set).unwrap();
        let n = set.entangled_count();
        prop_assert!(n != 1);
        prop_assert_eq!(class.label, NonlocalityLabel::CompleteBasis(n));
        prop_assert_eq!(report.conclusively_distinguishable, n == 0);
    }

    #[test]
    fn pairs_are_always_perfect(seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let (_, triple) = random_orthogonal_triple(&mut rng);
        let pair = OrthogonalSet::new(triple.states()[..2].to_vec()).unwrap();
        let (class, report) = classify(&pair).unwrap();
        prop_assert_eq!(class.label, NonlocalityLabel::PerfectLOCC);
        prop_assert!(report.per_state.iter().all(|v| v.identifiable));
        assert_witnesses_valid(&pair)?;
    }

    #[test]
    fn max_entangled_triples(seed in any::<u64>()) {
        let set = ueb::random_max_entangled_triple(seed);
        for s in set.states() {
            prop_assert!((s.concurrence() - 1.0).abs() < 1e-9);
        }
        let v = ueb_check(&set).unwrap();
        prop_assert!((v.complement_concurrence - 1.0).abs() < 1e-9);
        prop_assert!(!v.is_ueb);
        let (class, _) = classify(&set).unwrap();
        prop_assert_eq!(class.label, NonlocalityLabel::ConclusiveOnly);
        assert_witnesses_valid(&set)?;
    }

    #[test]
    fn eq1_family(l1 in 0.001f64..0.999, l3 in 0.001f64..0.999) {
        let set = generate_eq1(GeneratorParams::new(l1, l3).unwrap());
        let v = ueb_check(&set).unwrap();
        prop_assert!(v.is_ueb);
        prop_assert!(v.complement_state.same_ray(&PureState::basis(3), 1e-9));
        let (class, report) = classify(&set).unwrap();
        prop_assert_eq!(class.label, NonlocalityLabel::OneUnidentifiable);
        prop_assert_eq!(report.unidentifiable(), vec![0]);
        assert_witnesses_valid(&set)?;
    }

    #[test]
    fn eq2_family(l1 in 0.001f64..0.999) {
        let set = generate_eq2(l1).unwrap();
        let (class, report) = classify(&set).unwrap();
        prop_assert_eq!(class.label, NonlocalityLabel::TwoUnidentifiable);
        prop_assert_eq!(report.unidentifiable(), vec![1, 2]);
        prop_assert_eq!(class.ueb_span, Some(true));
        let spanning = ueb::ueb_spanning_check(&set).unwrap().witness.unwrap();
        prop_assert!(ueb_check(&spanning).unwrap().is_ueb);
        let (p, q) = (Subspace::of_set(&set).projector(), Subspace::of_set(&spanning).projector());
        for (x, y) in p.iter().flatten().zip(q.iter().flatten()) {
            prop_assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn entropy_average_of_the_second_family_is_not_smaller(l1 in 0.01f64..0.99, l3 in 0.01f64..0.99) {
        // the first family spreads the same concurrence mass over three members;
        // binary entropy of concurrence is convex with E(0) = 0, so the second
        // family's entropy average is at least as large
        let a1 = generate_eq1(GeneratorParams::new(l1, l3).unwrap()).average_entanglement();
        let a2 = generate_eq2(l1).unwrap().average_entanglement();
        prop_assert!(a2 >= a1 - 1e-12);
    }
}

#[test]
fn average_entanglement_examples() {
    let bells = [bell::phi_plus(), bell::phi_minus(), bell::psi_plus()];
    assert!((average_entanglement(&bells, 1e-9).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(
        average_entanglement(&[], 1e-9),
        Err(Error::EmptySet)
    ));
    let p = entanglement_profile_with(&PureState::basis(0), 1e-9);
    assert_eq!(p.entropy, 0.0);
}
