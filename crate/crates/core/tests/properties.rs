//! Property checks over randomly generated inputs.

use proptest::prelude::*;
use qpexas::iceberg::{logical_rotation, IcebergLayout, LogicalOp};
use qpexas::operator::{Pauli, PauliString, PauliSum};
use qpexas::qpe::{
    alpha_epe, alpha_epe_closed, alpha_slater, alpha_slater_closed, alpha_uniform,
    alpha_uniform_closed, analytic_pk, build_dynamic_qpe_circuit, simulate_ancilla_distribution,
    EigenSpectrum, QpeConfig, Variant,
};
use qpexas::sim::{
    amplitude_encode, exact_distribution, marginalize_bits, run_shots, Circuit, NoiseModel, State,
};
use qpexas::spectra::{broaden_raw, l2_distance, lorentzian_spectrum, uniform_grid, PeakSet};
use qpexas::Complex64;

fn arb_state(n: usize) -> impl Strategy<Value = State<f64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n).prop_filter_map(
        "zero vector",
        move |v| {
            let amps: Vec<Complex64> = v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
            let s = State::from_amplitudes_unchecked(n, amps);
            (s.norm() > 1e-3).then(|| s.normalized())
        },
    )
}

#[derive(Clone, Debug)]
enum Op {
    H(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Phase(usize, f64),
    Cx(usize, usize),
    Cz(usize, usize),
    Ms(usize, usize, f64),
}

fn arb_ops(n: usize, len: usize) -> impl Strategy<Value = Vec<Op>> {
    let angle = -6.3..6.3f64;
    let pair = (0..n, 1..n).prop_map(move |(a, d)| (a, (a + d) % n));
    let op = prop_oneof![
        (0..n).prop_map(Op::H),
        (0..n, angle.clone()).prop_map(|(q, a)| Op::Rx(q, a)),
        (0..n, angle.clone()).prop_map(|(q, a)| Op::Ry(q, a)),
        (0..n, angle.clone()).prop_map(|(q, a)| Op::Rz(q, a)),
        (0..n, angle.clone()).prop_map(|(q, a)| Op::Phase(q, a)),
        pair.clone().prop_map(|(a, b)| Op::Cx(a, b)),
        pair.clone().prop_map(|(a, b)| Op::Cz(a, b)),
        (pair, angle).prop_map(|((a, b), t)| Op::Ms(a, b, t)),
    ];
    prop::collection::vec(op, 1..len)
}

fn build(n: usize, ops: &[Op]) -> Circuit<f64> {
    let mut c = Circuit::new(n, n);
    for op in ops {
        match *op {
            Op::H(q) => c.h(q),
            Op::Rx(q, a) => c.rx(q, a),
            Op::Ry(q, a) => c.ry(q, a),
            Op::Rz(q, a) => c.rz(q, a),
            Op::Phase(q, a) => c.phase(q, a),
            Op::Cx(a, b) => c.cx(a, b),
            Op::Cz(a, b) => c.cz(a, b),
            Op::Ms(a, b, t) => c.ms(a, b, t),
        };
    }
    c
}

fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(0..4u8, n).prop_filter_map("identity", move |v| {
        let f: Vec<(usize, Pauli)> = v
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0)
            .map(|(q, &p)| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][p as usize]))
            .collect();
        (!f.is_empty()).then(|| PauliString::from_sparse(n, &f).unwrap())
    })
}

fn arb_peaks() -> impl Strategy<Value = PeakSet<f64>> {
    prop::collection::vec((-3.0..3.0f64, 0.0..1.0f64), 1..6).prop_map(|p| PeakSet::new(p).unwrap())
}

fn off_integer(x: f64) -> bool {
    (x - x.round()).abs() > 1e-4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitary_circuits_preserve_norm(ops in arb_ops(3, 30), psi in arb_state(3)) {
        let mut s = psi;
        build(3, &ops).apply_unitary(&mut s).unwrap();
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn noisy_shots_are_deterministic(ops in arb_ops(3, 12), seed in any::<u64>()) {
        let mut c = build(3, &ops);
        for q in 0..3 {
            c.measure(q, q);
        }
        let noise = NoiseModel::depolarizing(0.2).unwrap();
        let a = run_shots(&c, &State::zero(3), 16, &noise, seed).unwrap();
        let b = run_shots(&c, &State::zero(3), 16, &noise, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn marginals_match_full_distribution(psi in arb_state(4), mask in 1u8..15) {
        let qubits: Vec<usize> = (0..4).filter(|q| mask >> q & 1 == 1).collect();
        let m = psi.marginal(&qubits).unwrap();
        let full = psi.probabilities();
        for (k, mk) in m.iter().enumerate() {
            let direct: f64 = full
                .iter()
                .enumerate()
                .filter(|(b, _)| qubits.iter().enumerate().all(|(i, q)| (b >> q & 1) == (k >> i & 1)))
                .map(|(_, p)| p)
                .sum();
            prop_assert!((mk - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn alpha_sums_match_closed_forms(x in -40.0..40.0f64, n_q in 2usize..9, a in 0.01..1.0f64) {
        prop_assume!(off_integer(x));
        prop_assert!((alpha_uniform(x, n_q) - alpha_uniform_closed(x, n_q)).norm() <= 1e-10);
        prop_assert!((alpha_epe(x, n_q) - alpha_epe_closed(x, n_q)).norm() <= 1e-10);
        prop_assert!((alpha_slater(x, n_q, a) - alpha_slater_closed(x, n_q, a)).norm() <= 1e-10);
    }

    #[test]
    fn ancilla_inputs_are_normalized(n_q in 1usize..12, v in 0usize..3, a in 0.01..2.0f64) {
        let variant = Variant::ALL[v];
        let a = (variant == Variant::Slater).then_some(a);
        let cfg = QpeConfig::new(n_q, -1.0, 1.0, variant, a, 0.0).unwrap();
        let s: f64 = cfg.ancilla_amplitudes().iter().map(|x| x * x).sum();
        prop_assert!((s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn outcome_law_is_periodic_in_the_window(
        e in prop::collection::vec(-2.0..2.0f64, 1..5),
        n_q in 2usize..7,
        v in 0usize..3,
    ) {
        let mut e = e;
        e.sort_by(f64::total_cmp);
        let w = vec![1.0 / e.len() as f64; e.len()];
        let variant = Variant::ALL[v];
        let cfg = QpeConfig::new(n_q, -1.0, 1.5, variant, (variant == Variant::Slater).then_some(0.2), 0.1).unwrap();
        let spec = EigenSpectrum::single(e, w).unwrap();
        let p = analytic_pk(&spec, &cfg).unwrap();
        let q = analytic_pk(&spec.shifted(2.5), &cfg).unwrap();
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn peak_sets_normalize_and_broaden_linearly(
        a in arb_peaks(),
        b in arb_peaks(),
        s in 0.0..3.0f64,
        t in 0.0..3.0f64,
        eta in 0.01..0.5f64,
    ) {
        let grid = uniform_grid(-4.0, 4.0, 256).unwrap();
        let union = PeakSet::weighted_union(&[(s, &a), (t, &b)]).unwrap();
        let lhs = broaden_raw(&union, &grid, eta).unwrap();
        let ra = broaden_raw(&a, &grid, eta).unwrap();
        let rb = broaden_raw(&b, &grid, eta).unwrap();
        for i in 0..grid.len() {
            let rhs = s * ra[i] + t * rb[i];
            prop_assert!((lhs[i] - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
        prop_assume!(a.total_weight() > 1e-6);
        let spec = lorentzian_spectrum(&[a], &grid, eta).unwrap();
        prop_assert!((spec.intensity().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn l2_is_a_metric(
        v in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), 8..9),
    ) {
        let x: Vec<f64> = v.iter().map(|t| t.0).collect();
        let y: Vec<f64> = v.iter().map(|t| t.1).collect();
        let z: Vec<f64> = v.iter().map(|t| t.2).collect();
        let d = |p: &[f64], q: &[f64]| l2_distance(p, q).unwrap();
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-15);
        prop_assert_eq!(d(&x, &x), 0.0);
    }

    #[test]
    fn encoded_rotations_act_logically(
        p in arb_pauli(4),
        theta in -6.3..6.3f64,
        psi in arb_state(4),
    ) {
        let layout = IcebergLayout::standard(4).unwrap();
        let c = logical_rotation(&layout, &LogicalOp::Rotation(p.clone(), theta), None).unwrap();
        let mut phys = layout.encode_state(&psi).unwrap();
        c.apply_unitary(&mut phys).unwrap();
        for s in [layout.stabilizer_x(), layout.stabilizer_z()] {
            let mut t = phys.clone();
            t.apply_pauli(&s);
            prop_assert!((t.inner(&phys).re - 1.0).abs() <= 1e-10);
        }
        let m = p.to_matrix::<f64>();
        let pv = m.mat_vec(psi.amplitudes());
        let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let want: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .zip(&pv)
            .map(|(a, b)| a * co - Complex64::new(0.0, si) * b)
            .collect();
        let got = layout.decode_state(&phys).unwrap();
        let want = State::from_amplitudes(4, want).unwrap();
        prop_assert!(got.inner(&want).norm() >= 1.0 - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dynamic_and_standard_qpe_agree(
        cx in -1.0..1.0f64,
        cz in -1.0..1.0f64,
        psi in arb_state(1),
        n_q in 2usize..5,
        slater in any::<bool>(),
    ) {
        let c = |x: f64| Complex64::new(x, 0.0);
        let h = PauliSum::from_labels(&[(c(cx), "X"), (c(cz), "Z")]).unwrap();
        let cfg = if slater {
            QpeConfig::new(n_q, -1.5, 1.5, Variant::Slater, Some(0.3), 0.0).unwrap()
        } else {
            QpeConfig::uniform(n_q, -1.5, 1.5).unwrap()
        };
        let standard = simulate_ancilla_distribution(&cfg, &h, &psi).unwrap();
        let dynamic = build_dynamic_qpe_circuit(&cfg, &h, &amplitude_encode(&psi).unwrap()).unwrap();
        let bits: Vec<usize> = (0..n_q).collect();
        let d = marginalize_bits(&exact_distribution(&dynamic, &State::zero(2)).unwrap(), &bits);
        for (a, b) in standard.iter().zip(&d) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }
}
