mod common;

use common::*;
use otreduce::linalg::{trace_distance, CVector, Layout, StateVector, UnitaryMatrix};
use otreduce::protocol::{
    alice_reduced_state, build_coherent_functionality, build_ideal_functionality, build_p_abstract,
    check_definition_d, one_out_of_two_table, ot_input, p_abstract_decode, JointInputProtocolSpec,
    ProtocolSpec, TwoPartyUnitary,
};
use otreduce::Error;
use rand::Rng;

fn ot() -> ProtocolSpec {
    build_ideal_functionality(one_out_of_two_table(), 2).unwrap()
}

#[test]
fn ot_table_gives_second_message_for_choice_one() {
    let spec = ot();
    assert_eq!(spec.f(ot_input(false, true), 1), 1);
}

#[test]
fn constant_function_hides_alice_input_from_output_register() {
    let spec = build_ideal_functionality(vec![vec![1, 1]; 3], 2).unwrap();
    for j in 0..2 {
        let reference = spec
            .honest_final_state(0, j)
            .unwrap()
            .reduced(&["B_out"])
            .unwrap();
        for i in 1..3 {
            let rho = spec
                .honest_final_state(i, j)
                .unwrap()
                .reduced(&["B_out"])
                .unwrap();
            assert_eq!(rho.max_entry_distance(&reference).unwrap(), 0.0);
        }
    }
}

#[test]
fn random_ideal_unitaries_are_permutations() {
    let mut rng = rng(10);
    for _ in 0..50 {
        let spec = build_ideal_functionality(random_table(&mut rng, 4, 2, 2), 2).unwrap();
        let u = spec.circuit().unitary().entries();
        for col in u.column_iter() {
            let ones = col.iter().filter(|z| **z == c(1.0, 0.0)).count();
            let zeros = col.iter().filter(|z| **z == c(0.0, 0.0)).count();
            assert_eq!((ones, zeros), (1, u.nrows() - 1));
        }
        for row in u.row_iter() {
            assert_eq!(row.iter().filter(|z| **z == c(1.0, 0.0)).count(), 1);
        }
    }
}

#[test]
fn honest_ot_output_is_the_chosen_message() {
    let spec = ot();
    let probs = spec.output_distribution(ot_input(false, true), 0).unwrap();
    assert_eq!(probs, vec![1.0, 0.0]);
}

#[test]
fn identity_protocol_leaves_inputs_untouched() {
    let spec = identity_protocol(3, 2, 2);
    let layout = spec.circuit().layout().clone();
    for i in 0..3 {
        for j in 0..2 {
            let want = StateVector::basis(layout.clone(), &[i, j, 0]).unwrap();
            assert_eq!(spec.honest_final_state(i, j).unwrap(), want);
            let bob = spec.bob_reduced_state(i, j).unwrap();
            let expect =
                StateVector::basis(Layout::new([("B_in", 2), ("B_out", 2)]).unwrap(), &[j, 0]).unwrap();
            assert_eq!(bob.max_entry_distance(&expect.density()).unwrap(), 0.0);
        }
    }
}

#[test]
fn honest_state_is_a_matrix_vector_product() {
    let mut rng = rng(11);
    for _ in 0..20 {
        let (n, m, p) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let u = random_unitary(&mut rng, n * m * p);
        let circuit = TwoPartyUnitary::new(standard_registers(n, m, p), u.clone()).unwrap();
        for i in 0..n {
            for j in 0..m {
                let mut input = CVector::zeros(n * m * p);
                input[(i * m + j) * p] = c(1.0, 0.0);
                let want = u.entries() * input;
                let got = circuit.honest_final_state(i, j).unwrap();
                assert!((got.amplitudes() - want).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn out_of_range_inputs() {
    let spec = ot();
    assert!(matches!(
        spec.honest_final_state(4, 0),
        Err(Error::OutOfRange { .. })
    ));
    assert!(matches!(
        spec.honest_final_state(0, 2),
        Err(Error::OutOfRange { .. })
    ));
    assert!(matches!(
        spec.bob_reduced_state(9, 0),
        Err(Error::OutOfRange { .. })
    ));
    assert!(matches!(
        spec.purified_final_state(2),
        Err(Error::OutOfRange { .. })
    ));
}

#[test]
fn single_input_purification_is_a_product() {
    let spec = build_ideal_functionality(vec![vec![0, 1, 1]], 2).unwrap();
    for j in 0..3 {
        let v = spec.purified_final_state(j).unwrap();
        let honest = spec.honest_final_state(0, j).unwrap();
        assert_eq!(v.state().amplitudes(), honest.amplitudes());
        assert_eq!(v.state().layout().names().next(), Some("D"));
        assert!((alice_reduced_state(&v).unwrap().purity() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn projection_identity_holds_for_random_specs() {
    let mut rng = rng(12);
    for _ in 0..30 {
        let (n, m, p) = (rng.gen_range(1..=4), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let circuit =
            TwoPartyUnitary::new(standard_registers(n, m, p), random_unitary(&mut rng, n * m * p)).unwrap();
        for j in 0..m {
            let v = circuit.purified_final_state(j).unwrap();
            assert!(v.dice_marginal_defect().unwrap() < 1e-12);
            for i in 0..n {
                let branch = v.branch(i).unwrap().scale((n as f64).sqrt());
                let honest = circuit.honest_final_state(i, j).unwrap();
                let err = (branch - honest.amplitudes())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-12);
            }
        }
    }
}

#[test]
fn ideal_ot_bob_state_encodes_choice_and_output() {
    let spec = ot();
    for i in 0..4 {
        for j in 0..2 {
            let rho = spec.bob_reduced_state(i, j).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-12);
            // Bob's registers: B_in, B_out, B_rec (row class = i for distinct rows)
            let layout = Layout::new([("B_in", 2), ("B_out", 2), ("B_rec", 4)]).unwrap();
            let want = StateVector::basis(layout, &[j, spec.f(i, j), i]).unwrap();
            assert_eq!(rho.max_entry_distance(&want.density()).unwrap(), 0.0);
        }
    }
}

#[test]
fn alice_views_of_ideal_protocols_agree() {
    let mut rng = rng(13);
    for _ in 0..20 {
        let (n, m, p) = (rng.gen_range(1..=4), rng.gen_range(2..=4), rng.gen_range(1..=4));
        let spec = build_ideal_functionality(random_table(&mut rng, n, m, p), p).unwrap();
        let a0 = alice_reduced_state(&spec.purified_final_state(0).unwrap()).unwrap();
        let a1 = alice_reduced_state(&spec.purified_final_state(1).unwrap()).unwrap();
        assert!(trace_distance(&a0, &a1).unwrap() <= 1e-12);
    }
}

#[test]
fn j_copy_makes_alice_views_orthogonal() {
    let spec = j_copying_protocol(2, 2);
    let a0 = alice_reduced_state(&spec.purified_final_state(0).unwrap()).unwrap();
    let a1 = alice_reduced_state(&spec.purified_final_state(1).unwrap()).unwrap();
    assert!((trace_distance(&a0, &a1).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn definition_d_holds_a_and_b_for_random_ideal_specs() {
    let mut rng = rng(14);
    for n in 1..=4 {
        for m in 1..=4 {
            for p in 1..=4 {
                let spec = build_ideal_functionality(random_table(&mut rng, n, m, p), p).unwrap();
                let report = check_definition_d(&spec).unwrap();
                assert!(report.a.deviation <= 1e-12 && report.a.pass);
                assert!(report.b.deviation <= 1e-12 && report.b.pass);
            }
        }
    }
}

#[test]
fn definition_d_verdicts_for_reference_protocols() {
    let ot_report = check_definition_d(&ot()).unwrap();
    assert!(ot_report.a.pass && ot_report.b.pass);
    // once (a) and (b) hold Bob can recover the other message, so (c) cannot
    assert!(!ot_report.c.pass);
    assert!((ot_report.c.deviation - 1.0).abs() < 1e-12);

    let copy = check_definition_d(&j_copying_protocol(3, 2)).unwrap();
    assert!(!copy.b.pass);
    assert!((copy.b.deviation - 1.0).abs() < 1e-12);

    let leak = check_definition_d(&i_leaking_protocol(3, 2)).unwrap();
    assert!(leak.a.pass && !leak.c.pass);

    let constant = check_definition_d(&build_ideal_functionality(vec![vec![0, 1]; 3], 2).unwrap()).unwrap();
    assert!(constant.a.pass && constant.b.pass && constant.c.pass);
}

#[test]
fn literal_ideal_unitary_leaks_choice() {
    let report =
        check_definition_d(&build_coherent_functionality(one_out_of_two_table(), 2).unwrap()).unwrap();
    assert!(report.a.pass);
    assert!((report.b.deviation - 0.5).abs() < 1e-12);
}

#[test]
fn spec_json_round_trips_bit_exactly() {
    let mut rng = rng(15);
    for _ in 0..10 {
        let (n, m, p) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let circuit =
            TwoPartyUnitary::new(standard_registers(n, m, p), random_unitary(&mut rng, n * m * p)).unwrap();
        let spec = ProtocolSpec::new(p, random_table(&mut rng, n, m, p), circuit).unwrap();
        let text = spec.to_json().unwrap();
        let back = ProtocolSpec::from_json(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.to_json().unwrap(), text);
    }
}

#[test]
fn spec_json_is_validated() {
    let text = ot().to_json().unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["p"] = serde_json::json!(3);
    assert!(ProtocolSpec::from_json(&doc.to_string()).is_err());
    assert!(ProtocolSpec::from_json("{}").is_err());
}

#[test]
fn register_validation() {
    let regs = standard_registers(2, 2, 2);
    assert!(TwoPartyUnitary::new(regs.clone(), UnitaryMatrix::identity(7)).is_err());
    let mut no_alice = regs.clone();
    no_alice[0].owner = otreduce::protocol::Party::Bob;
    assert!(matches!(
        TwoPartyUnitary::new(no_alice, UnitaryMatrix::identity(8)),
        Err(Error::InvalidProtocol(_))
    ));
    let circuit = TwoPartyUnitary::new(regs, UnitaryMatrix::identity(8)).unwrap();
    assert!(ProtocolSpec::new(3, vec![vec![0, 0]; 2], circuit).is_err());
}

#[test]
fn p_abstract_decodes_against_truth_table() {
    for b in 0..4u8 {
        let (b0, b1) = (b >> 1, b & 1);
        let model = build_p_abstract(b0 == 1, b1 == 1).unwrap();
        for r in 0..8usize {
            let (ra, rb, w) = ((r >> 2) as u8 & 1, (r >> 1) as u8 & 1, r as u8 & 1);
            for j in 0..2u8 {
                let (c0, c1, key, e0, e1) = p_abstract_view(ra, rb, w, j, b0, b1);
                assert_eq!(model.effective_input(r, j as usize), usize::from(2 * c0 + c1));
                let decoded = if j == 0 { e0 ^ key } else { e1 ^ key };
                assert_eq!(decoded, if j == 0 { b0 } else { b1 });
                assert_eq!(p_abstract_decode(&model, r, j as usize).unwrap(), decoded == 1);
            }
        }
    }
}

#[test]
fn p_abstract_effective_input_depends_on_choice() {
    let model = build_p_abstract(false, true).unwrap();
    assert!(!model.is_degenerate());
    assert!((0..8).any(|r| model.effective_input(r, 0) != model.effective_input(r, 1)));
    assert_eq!(model.message_bits(), Some([false, true]));
    assert_eq!(model.dice_dim(), 4);
}

#[test]
fn p_abstract_alice_view_is_choice_independent() {
    for b in 0..4 {
        let model = build_p_abstract(b & 2 != 0, b & 1 != 0).unwrap();
        let a0 = alice_reduced_state(&model.purified_final_state(0).unwrap()).unwrap();
        let a1 = alice_reduced_state(&model.purified_final_state(1).unwrap()).unwrap();
        assert!(a0.max_entry_distance(&a1).unwrap() <= 1e-12);
        assert!(model.alice_view_leakage(0, 1).unwrap() <= 1e-12);
    }
}

#[test]
fn joint_input_validation() {
    let spec = ot();
    let model = JointInputProtocolSpec::from_protocol(&spec);
    assert!(model.is_degenerate());
    let base = spec.circuit().clone();
    assert!(JointInputProtocolSpec::new(None, vec!["x".into()], vec![vec![0, 4]], base.clone()).is_err());
    assert!(JointInputProtocolSpec::new(None, vec!["x".into()], vec![vec![0]], base.clone()).is_err());
    assert!(JointInputProtocolSpec::new(None, vec![], vec![], base).is_err());
}
