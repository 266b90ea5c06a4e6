use num_complex::Complex;
use proptest::prelude::*;
use relstate_core::oracle::{self, branch_weight, fixed_projector};
use relstate_core::*;

fn gate_for(n: usize, (kind, a, b, c, theta): (u8, usize, usize, usize, f64)) -> Gate64 {
    let a = a % n + 1;
    let b = (a + b % (n - 1).max(1)) % n + 1;
    let c = (1..=n).find(|&q| q != a && q != b && q > c % n).or((1..=n).find(|&q| q != a && q != b));
    match kind % 6 {
        0 => Gate64::not(a),
        1 => Gate64::h(a),
        2 if n >= 2 => Gate64::cnot(a, b),
        3 => Gate64::rz(a, theta),
        4 if n >= 3 => Gate64::ccnot(a, b, c.unwrap()),
        5 => Gate64::rotation(a, [theta.cos(), theta.sin() * 0.6, theta.sin() * 0.8], theta * 1.7),
        _ => Gate64::h(a),
    }
}

fn circuit(max_n: usize, max_depth: usize) -> impl Strategy<Value = (usize, Vec<Gate64>)> {
    (1..=max_n).prop_flat_map(move |n| {
        let gate = (any::<u8>(), 0..16usize, 0..16usize, 0..16usize, 0.0..std::f64::consts::TAU);
        proptest::collection::vec(gate, 0..=max_depth)
            .prop_map(move |gs| (n, gs.into_iter().map(|g| gate_for(n, g)).collect()))
    })
}

fn small_matrix() -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4)
        .prop_map(|v| CMatrix::from_rows(v.into_iter().map(|(re, im)| C64::new(re, im)).collect()))
}

fn hermitian(dim: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |v| {
        let a = CMatrix::from_fn(dim, |r, c| {
            let (re, im) = v[r * dim + c];
            Complex::new(re, im)
        });
        (&a + &a.adjoint()).scale_real(0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kronecker_is_associative(a in small_matrix(), b in small_matrix(), c in small_matrix()) {
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        prop_assert!(left.dist(&right) < 1e-14);
    }

    #[test]
    fn conjugation_keeps_hermiticity((_n, gates) in circuit(3, 8), h in hermitian(8)) {
        let mut v = CMatrix::identity(8);
        let mut cur = Network::new(3).unwrap();
        for g in &gates {
            v = &v * &build_gate_unitary(g, &cur).unwrap();
            cur = cur.apply_gate(g).unwrap();
        }
        let out = conjugate(&v, &h, 1e-9).unwrap();
        prop_assert!(out.hermitian_residual() < 1e-12);
    }

    #[test]
    fn spectral_projectors_form_a_pvm(h in hermitian(8)) {
        let d = spectral(&h, &Tol::default()).unwrap();
        prop_assert!(d.completeness_residual() < 1e-9);
        prop_assert!(d.orthogonality_residual() < 1e-9);
        prop_assert!(d.idempotence_residual() < 1e-9);
        prop_assert!(d.reconstruct().dist(&h) < 1e-9);
    }

    #[test]
    fn algebra_is_conserved((n, gates) in circuit(4, 40)) {
        for s in Network::new(n).unwrap().evolve(&gates).unwrap() {
            prop_assert!(s.algebra_residual() < 1e-10);
            for d in s.descriptors() {
                for c in d.components() {
                    prop_assert!(c.hermitian_residual() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pictures_agree((n, gates) in circuit(3, 20), q in 1..=3usize, axis in 0..3usize) {
        let timeline = Network::new(n).unwrap().evolve(&gates).unwrap();
        let run = oracle::evolve(n, &oracle::initial_state(n), &gates, &Tol::default()).unwrap();
        let cv = cross_validate(&run, &timeline, &Observable::all_components(n)).unwrap();
        prop_assert!(cv.within(1e-9), "max residual {}", cv.max_residual);

        let q = (q - 1) % n + 1;
        let axis = Axis::from_index(axis);
        let last = timeline.last().unwrap();
        for sign in [1i8, -1] {
            let h = last.expectation_real(&pauli_projector(last.component(q, axis), sign, 1e-9).unwrap()).unwrap();
            let s = branch_weight(run.last(), &fixed_projector(n, q, axis, sign));
            prop_assert!((h - s).abs() < 1e-9);
        }
    }

    #[test]
    fn relative_states_agree_with_oracle(theta in 0.0..std::f64::consts::TAU) {
        // Bell pair with a hidden phase on the measurer.
        let gates = vec![Gate64::h(1), Gate64::cnot(1, 2), Gate64::rz(2, theta)];
        let s = Network::new(2).unwrap().run(&gates).unwrap();
        let run = oracle::evolve(2, &oracle::initial_state(2), &gates, &Tol::default()).unwrap();
        let frames = pvm_from_involution(&s, s.component(1, Axis::Z), "q1z").unwrap();
        for (f, sign) in frames.iter().zip([1i8, -1]) {
            let fixed = fixed_projector(2, 1, Axis::Z, sign);
            let psi = schrodinger_relative_state(run.last(), &fixed, &Tol::default()).unwrap();
            for axis in Axis::ALL {
                let h = relative_expectation(&s, s.component(2, axis), f).unwrap();
                let o = oracle::site_pauli::<f64>(2, 2, axis).expectation(&psi);
                prop_assert!((h - o).norm() < 1e-10);
            }
        }
    }

    /// Per-branch register values follow a plain classical simulation.
    #[test]
    fn ensemble_matches_classical(tables in proptest::collection::vec(Just([0usize, 1, 2, 3]).prop_shuffle(), 1..=4)) {
        let s0 = Network::new(4).unwrap()
            .run(&[Gate64::h(3), Gate64::h(4), Gate64::cnot(3, 1), Gate64::cnot(4, 2)]).unwrap();
        let bm = register_descriptor(&s0, &[1, 2]).unwrap();
        let bs = register_descriptor(&s0, &[3, 4]).unwrap();
        let branches = classical_branches(&s0, &bm, &bs).unwrap();
        let frames: Vec<_> = branches.iter().map(|b| b.frame.clone()).collect();
        let mut values: Vec<usize> = (0..4).collect();
        let mut s = s0;
        for t in &tables {
            let f = ClassicalFunction::new(2, t.to_vec()).unwrap();
            let next = s.run(&compile_classical(&f, &[1, 2], &[]).unwrap()).unwrap();
            let rep = verify_classical_step(&s, &next, &[1, 2], &[], &f, &frames).unwrap();
            prop_assert!(rep.ok());
            for (b, v) in rep.branches.iter().zip(values.iter_mut()) {
                *v = t[*v];
                prop_assert_eq!(b.after.round() as usize, *v);
            }
            s = next;
        }
    }

    #[test]
    fn coupling_across_the_boundary_is_caught(m in 1..=2usize, sq in 3..=4usize, forward in any::<bool>()) {
        let s0 = Network::new(4).unwrap()
            .run(&[Gate64::h(3), Gate64::h(4), Gate64::cnot(3, 1), Gate64::cnot(4, 2)]).unwrap();
        let bs = register_descriptor(&s0, &[3, 4]).unwrap();
        let frames = make_pvm(&s0, &bs.matrix, "b_S").unwrap();
        let g = if forward { Gate64::cnot(m, sq) } else { Gate64::cnot(sq, m) };
        let after = s0.apply_gate(&g).unwrap();
        let id = ClassicalFunction::identity(2).unwrap();
        match verify_classical_step(&s0, &after, &[1, 2], &[], &id, &frames) {
            Ok(rep) => prop_assert!(!rep.ok()),
            Err(e) => {
                let not_sharp = matches!(e, Error::BranchNotSharp { .. });
                prop_assert!(not_sharp);
            }
        }
    }
}

#[test]
fn single_precision_smoke() {
    let s = NetworkState::<f32>::new(2).unwrap().run(&[Gate::h(1), Gate::cnot(1, 2)]).unwrap();
    assert!(s.algebra_residual() < 1e-5);
    let frames = pvm_from_involution(&s, s.component(1, Axis::Z), "q1z").unwrap();
    let plus = relative_expectation(&s, s.component(2, Axis::Z), &frames[0]).unwrap();
    let minus = relative_expectation(&s, s.component(2, Axis::Z), &frames[1]).unwrap();
    assert!((plus.re - 1.0).abs() < 1e-5 && (minus.re + 1.0).abs() < 1e-5);
    assert!(s.are_entangled(1, 2).unwrap().entangled);
    let tol = Tolerances::<f32>::default();
    assert!(tol.general >= 1000.0 * f32::EPSILON);
}
