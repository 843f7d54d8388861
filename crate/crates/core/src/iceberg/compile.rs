//! Physical Iceberg circuits: encoding, syndrome rounds, logical readout and the
//! logical-to-physical compiler.

use crate::error::{Error, Result};
use crate::iceberg::logical::{
    push_logical_op, push_physical_pauli, LogicalCircuit, LogicalInstruction,
};
use crate::iceberg::IcebergLayout;
use crate::operator::{Pauli, PauliString};
use crate::scalar::Real;
use crate::sim::{Circuit, Condition, Detector, DetectorKind, Gate, GateOp, Instruction};

pub use crate::iceberg::logical::lower_unencoded;

/// When syndrome rounds are inserted between logical instructions. A final round is
/// always appended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SyndromeSchedule {
    /// Before every logical measurement.
    #[default]
    BeforeMeasurements,
    /// Once at least this many two-qubit gates ran since the previous round.
    Every(usize),
}

/// Compiled physical circuit with its bookkeeping.
#[derive(Clone, Debug)]
pub struct CompiledCircuit<T> {
    pub circuit: Circuit<T>,
    pub layout: IcebergLayout,
    /// Classical bits carrying logical measurement results, in logical clbit order.
    pub logical_clbits: Vec<usize>,
    /// Instruction indices at which each logical instruction starts, then the index of
    /// the final syndrome round.
    pub boundaries: Vec<usize>,
    /// Number of syndrome rounds (excluding the encoding flag).
    pub rounds: usize,
}

impl<T: Real> CompiledCircuit<T> {
    /// Non-ideal two-qubit gates.
    pub fn n_2q(&self) -> usize {
        self.circuit.two_qubit_count()
    }

    /// All measurements: flag, syndrome and logical readout.
    pub fn n_measurements(&self) -> usize {
        self.circuit.measurement_count()
    }
}

fn detector<T: Real>(c: &mut Circuit<T>, kind: DetectorKind, round: usize) -> usize {
    let clbit = c.add_clbits(1);
    c.add_detector(Detector {
        clbit,
        kind,
        round,
        cumulative_n2q: c.two_qubit_count(),
    })
    .expect("fresh clbit");
    clbit
}

fn push_encode<T: Real>(c: &mut Circuit<T>, l: &IcebergLayout) {
    let (qx, qz, d) = (l.qx(), l.qz(), l.data());
    c.h(qz).cx(qz, qx).cx(qx, d[0]);
    for w in d.windows(2) {
        c.cx(w[0], w[1]);
    }
    c.cx(qz, l.flag()).cx(d[l.k() - 1], l.flag());
    let clbit = detector(c, DetectorKind::Flag, 0);
    c.measure(l.flag(), clbit).reset(l.flag());
}

fn push_syndrome<T: Real>(c: &mut Circuit<T>, l: &IcebergLayout, round: usize) {
    let [az, ax] = l.syndrome();
    let t = l.code_qubits();
    let m = t.len();
    c.reset(az).reset(ax).h(ax);
    c.cx(t[0], az).cx(ax, t[0]);
    for &q in &t[1..m - 1] {
        c.cx(ax, q);
    }
    for &q in &t[1..] {
        c.cx(q, az);
    }
    c.cx(ax, t[m - 1]);
    c.h(ax);
    let z = detector(c, DetectorKind::Z, round);
    let x = detector(c, DetectorKind::X, round);
    c.measure(az, z).measure(ax, x);
}

fn push_logical_measure<T: Real>(
    c: &mut Circuit<T>,
    l: &IcebergLayout,
    qubit: usize,
    clbit: usize,
) {
    let az = l.syndrome()[0];
    c.reset(az)
        .cx(l.qz(), az)
        .cx(l.data()[qubit], az)
        .measure(az, clbit);
}

fn push_conditional_flip<T: Real>(
    c: &mut Circuit<T>,
    l: &IcebergLayout,
    qubit: usize,
    clbit: usize,
) {
    let cond = Some(Condition { clbit, value: true });
    push_physical_pauli(c, &[(l.qx(), Pauli::X), (l.data()[qubit], Pauli::X)], cond);
}

/// Flagged GHZ encoding of `|0…0⟩_L`; the flag outcome is clbit 0 (a round-0 detector).
pub fn encode_circuit<T: Real>(layout: &IcebergLayout) -> Circuit<T> {
    let mut c = Circuit::new(layout.n_physical(), 0);
    push_encode(&mut c, layout);
    c
}

/// One syndrome round measuring `S_Z` into clbit 0 and `S_X` into clbit 1.
pub fn syndrome_circuit<T: Real>(layout: &IcebergLayout, round: usize) -> Circuit<T> {
    let mut c = Circuit::new(layout.n_physical(), 0);
    push_syndrome(&mut c, layout, round);
    c
}

/// Reads logical `Z̄_qubit = Z_{q_Z}Z_{d_qubit}` into `clbit` through the Z-check ancilla.
pub fn reencode_for_measurement<T: Real>(
    layout: &IcebergLayout,
    qubit: usize,
    clbit: usize,
) -> Result<Circuit<T>> {
    if qubit >= layout.k() {
        return Err(Error::IndexOutOfRange {
            what: "logical qubit",
            index: qubit,
            limit: layout.k(),
        });
    }
    let mut c = Circuit::new(layout.n_physical(), clbit + 1);
    push_logical_measure(&mut c, layout, qubit, clbit);
    Ok(c)
}

/// Encodes, lowers every logical instruction and inserts syndrome rounds.
pub fn compile_logical<T: Real>(
    logical: &LogicalCircuit<T>,
    layout: &IcebergLayout,
    schedule: SyndromeSchedule,
) -> Result<CompiledCircuit<T>> {
    if logical.n_qubits() != layout.k() {
        return Err(Error::DimensionMismatch(format!(
            "{} logical qubits on a k = {} block",
            logical.n_qubits(),
            layout.k()
        )));
    }
    if let SyndromeSchedule::Every(0) = schedule {
        return Err(Error::InvalidArgument(
            "syndrome period must be at least 1".into(),
        ));
    }
    let mut c = Circuit::new(layout.n_physical(), logical.n_clbits());
    push_encode(&mut c, layout);
    let mut rounds = 0;
    let mut since = 0usize;
    let mut boundaries = Vec::with_capacity(logical.instructions().len() + 1);
    let mut last_measured: Vec<Option<usize>> = vec![None; layout.k()];
    for ins in logical.instructions() {
        let due = match schedule {
            SyndromeSchedule::BeforeMeasurements => {
                matches!(ins, LogicalInstruction::Measure { .. })
            }
            SyndromeSchedule::Every(n) => since >= n,
        };
        if due {
            rounds += 1;
            push_syndrome(&mut c, layout, rounds);
            since = 0;
        }
        boundaries.push(c.instructions().len());
        let before = c.two_qubit_count();
        match ins {
            LogicalInstruction::Gate { op, condition } => {
                push_logical_op(&mut c, layout, op, *condition)?;
                for q in op.pauli().support() {
                    last_measured[q] = None;
                }
            }
            LogicalInstruction::Measure { qubit, clbit } => {
                push_logical_measure(&mut c, layout, *qubit, *clbit);
                last_measured[*qubit] = Some(*clbit);
            }
            LogicalInstruction::Reset { qubit } => {
                let clbit = match last_measured[*qubit] {
                    Some(b) => b,
                    None => {
                        let b = c.add_clbits(1);
                        push_logical_measure(&mut c, layout, *qubit, b);
                        b
                    }
                };
                push_conditional_flip(&mut c, layout, *qubit, clbit);
                last_measured[*qubit] = None;
            }
        }
        since += c.two_qubit_count() - before;
    }
    boundaries.push(c.instructions().len());
    rounds += 1;
    push_syndrome(&mut c, layout, rounds);
    Ok(CompiledCircuit {
        circuit: c,
        layout: layout.clone(),
        logical_clbits: (0..logical.n_clbits()).collect(),
        boundaries,
        rounds,
    })
}

/// Copy of `circuit` with an ideal Pauli layer inserted before instruction `position`.
pub fn inject_pauli<T: Real>(
    circuit: &Circuit<T>,
    position: usize,
    factors: &[(usize, Pauli)],
) -> Result<Circuit<T>> {
    if position > circuit.instructions().len() {
        return Err(Error::IndexOutOfRange {
            what: "instruction",
            index: position,
            limit: circuit.instructions().len() + 1,
        });
    }
    let mut out = Circuit::new(circuit.n_qubits(), circuit.n_clbits());
    for (i, ins) in circuit.instructions().iter().enumerate() {
        if i == position {
            push_ideal_layer(&mut out, factors)?;
        }
        out.push(ins.clone())?;
    }
    if position == circuit.instructions().len() {
        push_ideal_layer(&mut out, factors)?;
    }
    for d in circuit.detectors() {
        out.add_detector(*d)?;
    }
    Ok(out)
}

fn push_ideal_layer<T: Real>(c: &mut Circuit<T>, factors: &[(usize, Pauli)]) -> Result<()> {
    let p = PauliString::from_sparse(c.n_qubits(), factors)?;
    for q in p.support() {
        let mut g = GateOp::new(Gate::PauliProduct(vec![p.get(q)]), vec![q]);
        g.ideal = true;
        c.push(Instruction::Gate(g))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{exact_distribution, marginalize_bits, State};
    use num_complex::Complex;

    fn strip_measurements(c: &Circuit<f64>) -> Circuit<f64> {
        let mut out = Circuit::new(c.n_qubits(), 0);
        for ins in c.instructions() {
            if let Instruction::Gate(_) = ins {
                out.push(ins.clone()).unwrap();
            }
        }
        out
    }

    #[test]
    fn encoding_prepares_logical_zero_with_clear_flag() {
        for k in [2, 4, 6] {
            let l = IcebergLayout::standard(k).unwrap();
            let c = encode_circuit::<f64>(&l);
            assert_eq!(c.detectors().len(), 1);
            let dist = exact_distribution(&c, &State::zero(l.n_physical())).unwrap();
            assert_eq!(dist.len(), 1);
            assert!((dist[&0] - 1.0).abs() < 1e-12);
            let mut s = State::zero(l.n_physical());
            strip_measurements(&c).apply_unitary(&mut s).unwrap();
            let want = l.encode_state(&State::zero(k)).unwrap();
            assert!((s.fidelity(&want) - 1.0).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn syndrome_round_is_silent_on_codewords() {
        for k in [2, 4] {
            let l = IcebergLayout::standard(k).unwrap();
            let c = syndrome_circuit::<f64>(&l, 1);
            assert_eq!(c.two_qubit_count(), 2 * (k + 2));
            let psi = State::from_amplitudes_unchecked(
                k,
                (0..1 << k)
                    .map(|i| Complex::new(1.0 + i as f64, 0.5 * i as f64))
                    .collect(),
            )
            .normalized();
            let input = l.encode_state(&psi).unwrap();
            let dist = exact_distribution(&c, &input).unwrap();
            assert!((dist[&0] - 1.0).abs() < 1e-12);
            // Every single-qubit Pauli on a code qubit fires at least one check.
            for q in l.code_qubits() {
                for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                    let mut e = input.clone();
                    e.apply_pauli(&PauliString::single(l.n_physical(), q, p).unwrap());
                    let d = exact_distribution(&c, &e).unwrap();
                    let expect = match p {
                        Pauli::X => 0b01,
                        Pauli::Z => 0b10,
                        _ => 0b11,
                    };
                    assert!((d[&expect] - 1.0).abs() < 1e-12, "k={k} q={q} {p:?}");
                }
            }
        }
    }

    #[test]
    fn logical_measurement_reads_z_bar() {
        let l = IcebergLayout::standard(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // |ψ⟩ = (|00⟩ + |10⟩)/√2: qubit 1 is uniform, qubit 0 is 0.
        let psi = State::from_amplitudes(
            2,
            vec![
                Complex::new(r, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(r, 0.0),
                Complex::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let input = l.encode_state(&psi).unwrap();
        let c0 = reencode_for_measurement::<f64>(&l, 0, 0).unwrap();
        assert!((exact_distribution(&c0, &input).unwrap()[&0] - 1.0).abs() < 1e-12);
        let c1 = reencode_for_measurement::<f64>(&l, 1, 0).unwrap();
        let d = exact_distribution(&c1, &input).unwrap();
        assert!((d[&0] - 0.5).abs() < 1e-12 && (d[&1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn compiled_circuit_matches_logical_reference() {
        let mut src = Circuit::<f64>::new(2, 3);
        src.h(0)
            .cx(0, 1)
            .ry(1, 0.7)
            .rz(0, -0.4)
            .measure(0, 0)
            .reset(0);
        src.conditioned(Gate::Phase(0.9), &[1], 0, true);
        src.h(1).measure(1, 1).h(0).s(0).reset(1).h(0).measure(0, 2);
        let logical = LogicalCircuit::from_circuit(&src).unwrap();
        let l = IcebergLayout::standard(2).unwrap();
        let want = marginalize_bits(
            &exact_distribution(&src, &State::zero(2)).unwrap(),
            &[0, 1, 2],
        );
        for schedule in [
            SyndromeSchedule::BeforeMeasurements,
            SyndromeSchedule::Every(3),
        ] {
            let compiled = compile_logical(&logical, &l, schedule).unwrap();
            let dist = exact_distribution(&compiled.circuit, &State::zero(l.n_physical())).unwrap();
            let det: u64 = compiled
                .circuit
                .detectors()
                .iter()
                .map(|d| 1 << d.clbit)
                .sum();
            assert!(dist.iter().all(|(b, p)| b & det == 0 || *p < 1e-12));
            let got = marginalize_bits(&dist, &compiled.logical_clbits);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-10, "{schedule:?}: {got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let l = IcebergLayout::standard(2).unwrap();
        let logical = LogicalCircuit::<f64>::new(4, 0);
        assert!(compile_logical(&logical, &l, SyndromeSchedule::default()).is_err());
        let logical = LogicalCircuit::<f64>::new(2, 0);
        assert!(compile_logical(&logical, &l, SyndromeSchedule::Every(0)).is_err());
        assert!(reencode_for_measurement::<f64>(&l, 2, 0).is_err());
    }
}
