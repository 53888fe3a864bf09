use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sqswap_core::detect::{fidelity_lower_bound, homogeneous_value, rotated_expectation, stabilizer_expectations};
use sqswap_core::hubbard::{build_hamiltonian, FockBasis, HubbardParams, SpectralPropagator};
use sqswap_core::linalg::{eigvalsh, CMatrix};
use sqswap_core::noise::{noisy_state, NoiseParams};
use sqswap_core::pauli::{conjugate_by_sqrtswapdag, conjugated_stabilizers, group_into_lms, Pauli, PauliString, PauliSum};
use sqswap_core::protocol::{prepare_target, reverse_sequence, target_state, SqrtSwapRealization};
use sqswap_core::qstate::random::{random_mixed, random_product_mixed, random_pure};
use sqswap_core::qstate::{Bipartition, MixedState, QuantumState, TwoQubitGate};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn letters(n: usize) -> impl Strategy<Value = Vec<Pauli>> {
    proptest::collection::vec(prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)], n)
}

fn placement(n: usize) -> impl Strategy<Value = (usize, usize)> {
    (0..n, 0..n).prop_filter("distinct sites", |(i, j)| i != j)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gates_preserve_norm_and_trace(seed in any::<u64>(), (i, j) in placement(4)) {
        let mut r = rng(seed);
        let g = TwoQubitGate::<f64>::sqrt_swap_dag();
        let psi = random_pure::<f64, _>(4, &mut r).apply_gate(&g, i, j).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        let rho = random_mixed::<f64, _>(4, 3, &mut r).apply_gate(&g, i, j).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!(rho.matrix().is_hermitian(1e-12));
    }

    #[test]
    fn schmidt_weights_and_purities_agree(seed in any::<u64>(), mask in 1usize..31) {
        let n = 5;
        let psi = random_pure::<f64, _>(n, &mut rng(seed));
        let part: Vec<usize> = (0..n).filter(|s| mask >> s & 1 == 1).collect();
        let cut = Bipartition::new(n, &part).unwrap();
        let lambda = psi.schmidt_spectrum(&cut).unwrap();
        prop_assert!((lambda.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let p2: f64 = lambda.iter().map(|l| l * l).sum();
        let pa = psi.reduced_density_matrix(&part).unwrap().purity();
        let pb = psi.reduced_density_matrix(&cut.complement()).unwrap().purity();
        prop_assert!((pa - p2).abs() < 1e-12 && (pb - p2).abs() < 1e-12);
    }

    #[test]
    fn fidelity_two_ways(seed in any::<u64>()) {
        let mut r = rng(seed);
        let psi = random_pure::<f64, _>(3, &mut r);
        let phi = random_pure::<f64, _>(3, &mut r);
        let via_matrix = phi.to_mixed().unwrap().fidelity(&psi).unwrap();
        prop_assert!((via_matrix - phi.overlap(&psi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_has_zero_expectations(l in letters(4)) {
        prop_assume!(l.iter().any(|&p| p != Pauli::I));
        let s = PauliString::<f64>::new(&l, 1.0).unwrap();
        let e = MixedState::<f64>::maximally_mixed(4).unwrap().expectation(&s).unwrap();
        prop_assert!(e.abs() < 1e-12);
    }

    #[test]
    fn conjugation_matches_dense_oracle(l in letters(4), (i, j) in placement(4)) {
        let s = PauliString::<f64>::new(&l, 1.0).unwrap();
        let sum = conjugate_by_sqrtswapdag(&s, &[(i, j)]).unwrap();
        let g = TwoQubitGate::<f64>::sqrt_swap_dag().embed(4, i, j);
        let dense = g.matmul(&s.to_dense()).matmul(&g.adjoint());
        prop_assert!(sum.to_dense().max_abs_diff(&dense) < 1e-12);
        prop_assert!((sum.weight_norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grouping_covers_every_term(sums in proptest::collection::vec(proptest::collection::vec(letters(5), 1..6), 1..4)) {
        let sums: Vec<PauliSum<f64>> = sums
            .iter()
            .filter_map(|terms| {
                let strings: Vec<_> = terms
                    .iter()
                    .filter(|l| l.iter().any(|&p| p != Pauli::I))
                    .map(|l| PauliString::new(l, 1.0).unwrap())
                    .collect();
                (!strings.is_empty()).then(|| PauliSum::new(5, strings).unwrap())
            })
            .collect();
        prop_assume!(!sums.is_empty());
        let settings = group_into_lms(&sums, 5).unwrap();
        for sum in &sums {
            for t in sum.terms() {
                prop_assert!(settings.iter().any(|s| s.resolves(t)), "{}", t);
            }
        }
    }

    #[test]
    fn target_is_invariant_under_collective_z(theta in -3.2f64..3.2) {
        let psi = target_state::<f64>(6).unwrap();
        let base = rotated_expectation(&psi, 0.0).unwrap();
        prop_assert!((rotated_expectation(&psi, theta).unwrap() - base).abs() < 1e-10);
    }

    #[test]
    fn reverse_undoes_prepare(seed in any::<u64>(), cube in any::<bool>()) {
        let n = 6;
        let psi = random_pure::<f64, _>(n, &mut rng(seed));
        let prepared = prepare_target_from(&psi);
        let realization = if cube { SqrtSwapRealization::CubeOfDagger } else { SqrtSwapRealization::Direct };
        let back = reverse_sequence(&prepared, realization).unwrap().neel;
        prop_assert!(back.overlap(&psi).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn bound_never_exceeds_fidelity(seed in any::<u64>(), rank in 1usize..17) {
        let rho = random_mixed::<f64, _>(4, rank, &mut rng(seed));
        let e = stabilizer_expectations(&rho).unwrap();
        let bound = fidelity_lower_bound(&e, 4).unwrap();
        let fid = rho.fidelity(&target_state(4).unwrap()).unwrap();
        prop_assert!(bound <= fid + 1e-12, "{bound} > {fid}");
    }

    #[test]
    fn odd_odd_products_stay_below_one(seed in any::<u64>(), k in prop_oneof![Just(4usize), Just(6)], a in prop_oneof![Just(1usize), Just(3)]) {
        prop_assume!(a < k);
        let rho = random_product_mixed::<f64, _>(a, k - a, &mut rng(seed));
        let all: Vec<usize> = (0..k).collect();
        prop_assert!(homogeneous_value(&rho, &all).unwrap().gamma <= 1.0 + 1e-9);
    }

    #[test]
    fn noisy_states_are_valid(p_sf in 0.5f64..1.0, p_es in 0.0f64..1.0, p_white in 0.0f64..1.0) {
        let params = NoiseParams { p_sf, p_es, p_white, ..NoiseParams::default() };
        let rho = noisy_state(4, &params).unwrap();
        prop_assert!(rho.validate().is_ok());
    }

    #[test]
    fn equal_size_subsets_coincide(p_sf in 0.5f64..1.0, p_es in 0.5f64..1.0) {
        let params = NoiseParams { p_sf, p_es, ..NoiseParams::default() };
        let rho = noisy_state(6, &params).unwrap();
        let g = |s: &[usize]| homogeneous_value(&rho, s).unwrap().gamma;
        prop_assert!((g(&[0, 1]) - g(&[0, 2])).abs() < 1e-10);
        prop_assert!((g(&[0, 1, 2, 3]) - g(&[0, 1, 2, 4])).abs() < 1e-10);
    }

    #[test]
    fn hubbard_propagators_are_unitary(j in 0.1f64..2.0, j_inter in 0.0f64..0.5, v in 0.5f64..50.0, delta in -1.0f64..1.0, t in 0.0f64..20.0) {
        let basis = FockBasis::new(2, 2).unwrap();
        let p = HubbardParams { j_inter, ..HubbardParams::double_well(j, v).with_delta(delta) };
        let h = build_hamiltonian(&p, &basis).unwrap();
        prop_assert!(h.is_hermitian(1e-14));
        prop_assert!(SpectralPropagator::new(&h, &basis).unwrap().unitary(t).unwrap().is_unitary(1e-12));
    }
}

fn prepare_target_from(psi: &sqswap_core::qstate::PureState<f64>) -> sqswap_core::qstate::PureState<f64> {
    use sqswap_core::protocol::{apply_layer, layer1_pairs, layer2_pairs, phase_gate};
    let n = psi.n_qubits();
    let s = apply_layer(psi, &TwoQubitGate::sqrt_swap_dag(), &layer1_pairs(n)).unwrap();
    let s = apply_layer(&s, &phase_gate(), &layer1_pairs(n)).unwrap();
    apply_layer(&s, &TwoQubitGate::sqrt_swap_dag(), &layer2_pairs(n)).unwrap()
}

#[test]
fn conjugated_stabilizers_commute() {
    for n in [4, 6] {
        let dense: Vec<CMatrix<f64>> = conjugated_stabilizers::<f64>(n).unwrap().iter().map(|s| s.to_dense()).collect();
        for a in &dense {
            for b in &dense {
                assert_commute(a, b);
            }
        }
    }
}

fn assert_commute(a: &CMatrix<f64>, b: &CMatrix<f64>) {
    let comm = &a.matmul(b) - &b.matmul(a);
    assert!(comm.frobenius_norm() < 1e-10);
}

#[test]
fn operator_inequality_holds() {
    for n in [4, 6] {
        let psi = prepare_target::<f64>(n).unwrap().target;
        let stabs = conjugated_stabilizers::<f64>(n).unwrap();
        let dim = 1 << n;
        let mut m = CMatrix::outer(psi.amplitudes());
        for s in &stabs {
            m = &m - &s.to_dense().scale_real(0.5);
        }
        m = &m + &CMatrix::identity(dim).scale_real(n as f64 / 2.0 - 1.0);
        let min = eigvalsh(&m)[0];
        assert!(min >= -1e-10, "n={n}: {min}");
    }
}
