//! Property-based invariants over randomized chains, states and cycle
//! parameters.

use proptest::prelude::*;
use spinmachine::closedform::n2_f4;
use spinmachine::cycle::{ChannelHandle, ChannelTarget, CycleConfig};
use spinmachine::quantumstate::{
    block_decompose, partial_trace, tensor, von_neumann_entropy, DensityMatrix,
};
use spinmachine::spinchain::{build_hamiltonian, excitation_blocks, local_gibbs, ChainSpec};
use spinmachine::thermo::steady_thermo;
use spinmachine::CMatrix;

fn chain_strategy(n: usize) -> impl Strategy<Value = ChainSpec> {
    (
        prop::collection::vec(-2.0..2.0f64, n),
        prop::collection::vec(0.15..2.0f64, n - 1),
        prop::collection::vec(-2.0..2.0f64, n - 1),
        prop::collection::vec(-2.0..2.0f64, n - 1),
        prop::collection::vec(prop::bool::ANY, n - 1),
    )
        .prop_map(|(e, j_mag, k, f, j_sign)| {
            let j: Vec<f64> = j_mag
                .into_iter()
                .zip(j_sign)
                .map(|(m, s)| if s { m } else { -m })
                .collect();
            ChainSpec::new(e, j, k, f).unwrap()
        })
}

fn gibbs_product(spec: &ChainSpec, betas: &[f64]) -> DensityMatrix {
    let mut state = local_gibbs(1, spec.e[0], betas[0]);
    for i in 1..spec.n {
        state = tensor(&state, &local_gibbs(i + 1, spec.e[i], betas[i])).unwrap();
    }
    state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamiltonian_is_hermitian_and_conserves_magnetization(spec in chain_strategy(4)) {
        let h = build_hamiltonian(&spec).unwrap();
        prop_assert_eq!(h.magnetization_commutator_norm(), 0.0);
        let dev = (&h.matrix - h.matrix.adjoint()).norm();
        prop_assert!(dev <= 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_hermiticity(
        spec in chain_strategy(3),
        betas in prop::collection::vec(0.1..3.0f64, 3),
    ) {
        let rho = gibbs_product(&spec, &betas);
        let reduced = partial_trace(&rho, &[1, 3]).unwrap();
        prop_assert!((reduced.trace() - 1.0).abs() < 1e-12);
        let dev = (reduced.matrix() - reduced.matrix().adjoint()).norm();
        prop_assert!(dev < 1e-13);
    }

    #[test]
    fn product_states_round_trip_through_tensor_and_trace(
        spec in chain_strategy(3),
        betas in prop::collection::vec(0.1..3.0f64, 3),
    ) {
        let a = local_gibbs(1, spec.e[0], betas[0]);
        let b = local_gibbs(2, spec.e[1], betas[1]);
        let ab = tensor(&a, &b).unwrap();
        let back_a = partial_trace(&ab, &[1]).unwrap();
        let back_b = partial_trace(&ab, &[2]).unwrap();
        prop_assert!((back_a.matrix() - a.matrix()).norm() < 1e-14);
        prop_assert!((back_b.matrix() - b.matrix()).norm() < 1e-14);
    }

    #[test]
    fn blocks_partition_and_reassemble(
        spec in chain_strategy(3),
        betas in prop::collection::vec(0.1..3.0f64, 3),
        tau in 0.0..5.0f64,
    ) {
        // an evolved product state carries coherences inside the blocks
        let h = build_hamiltonian(&spec).unwrap();
        let rho = spinmachine::cycle::unitary_stroke(&gibbs_product(&spec, &betas), &h, tau).unwrap();
        let blocks = excitation_blocks(&[1, 2, 3], 3).unwrap();
        let total: usize = blocks.blocks.iter().map(Vec::len).sum();
        prop_assert_eq!(total, 8);
        let parts = block_decompose(&rho, &blocks).unwrap();
        let recombined = parts.bd.matrix() + &parts.off;
        prop_assert!((recombined - rho.matrix()).norm() < 1e-13);
        let off_trace: f64 = parts.off.diagonal().iter().map(|z| z.re).sum();
        prop_assert!(off_trace.abs() < 1e-13);
    }

    #[test]
    fn entropy_never_decreases_under_mixing_with_identity(
        spec in chain_strategy(2),
        beta in 0.1..3.0f64,
        lambda in 0.0..1.0f64,
    ) {
        // mixing toward the maximally mixed state cannot lower entropy
        let rho = gibbs_product(&spec, &[beta, beta]);
        let mixed = DensityMatrix::maximally_mixed(vec![1, 2]);
        let blend = DensityMatrix::new(
            rho.matrix() * spinmachine::C64::new(1.0 - lambda, 0.0)
                + mixed.matrix() * spinmachine::C64::new(lambda, 0.0),
            vec![1, 2],
        )
        .unwrap();
        prop_assert!(von_neumann_entropy(&blend) >= von_neumann_entropy(&rho) - 1e-10);
    }

    #[test]
    fn channel_preserves_trace_for_random_cycles(
        spec in chain_strategy(3),
        beta1 in 0.1..3.0f64,
        beta2 in 0.1..3.0f64,
        tau1 in 0.0..5.0f64,
        tau2 in 0.0..5.0f64,
    ) {
        let config = CycleConfig::four_stroke(beta1, beta2, tau1, tau2).unwrap();
        let handle = ChannelHandle::new(&spec, &config, ChannelTarget::CB).unwrap();
        let rho = gibbs_product(&spec, &[beta2, beta1, beta1]);
        let reduced = partial_trace(&rho, &[2, 3]).unwrap();
        let out = handle.apply(&reduced).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_and_second_law_hold_at_the_limit_cycle(
        spec in chain_strategy(3),
        beta1 in 0.2..2.5f64,
        beta2 in 0.2..2.5f64,
        tau1 in 0.2..4.0f64,
        tau2 in 0.2..4.0f64,
    ) {
        let config = CycleConfig::four_stroke(beta1, beta2, tau1, tau2).unwrap();
        let (thermo, _) = steady_thermo(&spec, &config, 1e-12, 600_000, None).unwrap();
        prop_assert!((thermo.q_h + thermo.q_c + thermo.w).abs() < 1e-10);
        prop_assert!(thermo.clausius >= -1e-10);
    }

    #[test]
    fn pair_profile_factor_stays_in_range(
        e1 in -2.0..2.0f64,
        e2 in -2.0..2.0f64,
        j in -2.0..2.0f64,
        k in -2.0..2.0f64,
        tau1 in 0.0..10.0f64,
        tau2 in 0.0..10.0f64,
    ) {
        let spec = ChainSpec::new(vec![e1, e2], vec![j], vec![k], vec![0.0]).unwrap();
        let f4 = n2_f4(&spec, tau1, tau2).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f4), "f4 = {}", f4);
    }

    #[test]
    fn kraus_completeness_for_random_pairs(
        spec in chain_strategy(2),
        beta1 in 0.1..3.0f64,
        beta2 in 0.1..3.0f64,
        tau1 in 0.0..5.0f64,
        tau2 in 0.0..5.0f64,
    ) {
        let config = CycleConfig::four_stroke(beta1, beta2, tau1, tau2).unwrap();
        let handle = ChannelHandle::new(&spec, &config, ChannelTarget::CB).unwrap();
        let ops = handle.kraus_set().unwrap();
        let mut acc = CMatrix::zeros(2, 2);
        for op in &ops {
            acc += op.adjoint() * op;
        }
        prop_assert!((&acc - CMatrix::identity(2, 2)).norm() < 1e-10);
    }
}
