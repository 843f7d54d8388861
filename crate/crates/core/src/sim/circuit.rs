//! Instructions and circuits.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;
use crate::sim::gate::Gate;
use crate::sim::state::State;

/// Classical condition `clbit == value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Condition {
    pub clbit: usize,
    pub value: bool,
}

/// A gate with its targets, quantum controls and optional classical condition.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp<T> {
    pub gate: Gate<T>,
    pub targets: Vec<usize>,
    /// `(qubit, required value)`.
    pub controls: Vec<(usize, bool)>,
    pub condition: Option<Condition>,
    /// Excluded from noise injection and from the two-qubit gate count.
    pub ideal: bool,
}

impl<T: Real> GateOp<T> {
    pub fn new(gate: Gate<T>, targets: Vec<usize>) -> Self {
        Self {
            gate,
            targets,
            controls: Vec::new(),
            condition: None,
            ideal: false,
        }
    }

    /// All qubits touched: controls first, then targets.
    pub fn qubits(&self) -> Vec<usize> {
        self.controls
            .iter()
            .map(|c| c.0)
            .chain(self.targets.iter().copied())
            .collect()
    }

    pub fn n_qubits_touched(&self) -> usize {
        self.controls.len() + self.targets.len()
    }

    /// Adds a quantum control on `|1⟩`.
    pub fn controlled(&self, control: usize) -> Result<Self> {
        if self.qubits().contains(&control) {
            return Err(Error::InvalidArgument(format!(
                "control {control} overlaps the gate's qubits"
            )));
        }
        let mut g = self.clone();
        g.controls.push((control, true));
        Ok(g)
    }

    pub fn inverse(&self) -> Self {
        let mut g = self.clone();
        g.gate = self.gate.inverse();
        g
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction<T> {
    Gate(GateOp<T>),
    Measure { qubit: usize, clbit: usize },
    Reset { qubit: usize },
    Barrier(String),
}

impl<T: Real> Instruction<T> {
    /// Adds a quantum control to a gate instruction.
    pub fn controlled(&self, control: usize) -> Result<Self> {
        match self {
            Instruction::Gate(g) => Ok(Instruction::Gate(g.controlled(control)?)),
            Instruction::Barrier(l) => Ok(Instruction::Barrier(l.clone())),
            _ => Err(Error::Unsupported("only gates can be controlled".into())),
        }
    }
}

/// Kind of a detection bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorKind {
    /// Outcome of an `X`-type stabilizer check.
    X,
    /// Outcome of a `Z`-type stabilizer check.
    Z,
    /// Encoding flag.
    Flag,
}

/// Classical bit whose nonzero value marks a shot for discard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Detector {
    pub clbit: usize,
    pub kind: DetectorKind,
    /// Syndrome round the bit belongs to (the encoding flag is round 0).
    pub round: usize,
    /// Two-qubit gate count of the circuit prefix ending at the bit's measurement.
    pub cumulative_n2q: usize,
}

/// Ordered instruction list over quantum and classical registers.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    n_qubits: usize,
    n_clbits: usize,
    instructions: Vec<Instruction<T>>,
    detectors: Vec<Detector>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize, n_clbits: usize) -> Self {
        Self {
            n_qubits,
            n_clbits,
            instructions: Vec::new(),
            detectors: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn instructions(&self) -> &[Instruction<T>] {
        &self.instructions
    }

    pub fn detectors(&self) -> &[Detector] {
        &self.detectors
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Grows the classical register and returns the index of the first new bit.
    pub fn add_clbits(&mut self, n: usize) -> usize {
        let first = self.n_clbits;
        self.n_clbits += n;
        first
    }

    pub fn add_detector(&mut self, d: Detector) -> Result<()> {
        self.check_clbit(d.clbit)?;
        self.detectors.push(d);
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            Err(Error::IndexOutOfRange {
                what: "qubit",
                index: q,
                limit: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn check_clbit(&self, c: usize) -> Result<()> {
        if c >= self.n_clbits {
            Err(Error::IndexOutOfRange {
                what: "clbit",
                index: c,
                limit: self.n_clbits,
            })
        } else {
            Ok(())
        }
    }

    fn validate(&self, ins: &Instruction<T>) -> Result<()> {
        match ins {
            Instruction::Gate(g) => {
                if g.targets.len() != g.gate.arity() {
                    return Err(Error::InvalidArgument(format!(
                        "{} expects {} targets, got {}",
                        g.gate,
                        g.gate.arity(),
                        g.targets.len()
                    )));
                }
                let qs = g.qubits();
                for (i, &q) in qs.iter().enumerate() {
                    self.check_qubit(q)?;
                    if qs[..i].contains(&q) {
                        return Err(Error::InvalidArgument(format!(
                            "qubit {q} repeated in {}",
                            g.gate
                        )));
                    }
                }
                if let Some(c) = g.condition {
                    self.check_clbit(c.clbit)?;
                }
                if !g.gate.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "non-finite parameter in {}",
                        g.gate
                    )));
                }
                if let Gate::Unitary(m, _) = &g.gate {
                    m.check_unitary(T::lit(1e-10))?;
                }
                Ok(())
            }
            Instruction::Measure { qubit, clbit } => {
                self.check_qubit(*qubit)?;
                self.check_clbit(*clbit)
            }
            Instruction::Reset { qubit } => self.check_qubit(*qubit),
            Instruction::Barrier(_) => Ok(()),
        }
    }

    /// Validated append.
    pub fn push(&mut self, ins: Instruction<T>) -> Result<&mut Self> {
        self.validate(&ins)?;
        self.instructions.push(ins);
        Ok(self)
    }

    /// Validated gate append.
    pub fn push_gate(&mut self, g: GateOp<T>) -> Result<&mut Self> {
        self.push(Instruction::Gate(g))
    }

    /// Appends `gate` on `targets`.
    ///
    /// # Panics
    /// On invalid indices; use [`push`](Self::push) for fallible construction.
    pub fn gate(&mut self, gate: Gate<T>, targets: &[usize]) -> &mut Self {
        self.push(Instruction::Gate(GateOp::new(gate, targets.to_vec())))
            .expect("valid gate instruction")
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::H, &[q])
    }
    pub fn x(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::X, &[q])
    }
    pub fn y(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::Y, &[q])
    }
    pub fn z(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::Z, &[q])
    }
    pub fn s(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::S, &[q])
    }
    pub fn sdg(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::Sdg, &[q])
    }
    pub fn rx(&mut self, q: usize, a: T) -> &mut Self {
        self.gate(Gate::Rx(a), &[q])
    }
    pub fn ry(&mut self, q: usize, a: T) -> &mut Self {
        self.gate(Gate::Ry(a), &[q])
    }
    pub fn rz(&mut self, q: usize, a: T) -> &mut Self {
        self.gate(Gate::Rz(a), &[q])
    }
    pub fn phase(&mut self, q: usize, a: T) -> &mut Self {
        self.gate(Gate::Phase(a), &[q])
    }
    pub fn cx(&mut self, c: usize, t: usize) -> &mut Self {
        self.gate(Gate::Cx, &[c, t])
    }
    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        self.gate(Gate::Cz, &[a, b])
    }
    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.gate(Gate::Swap, &[a, b])
    }
    pub fn ms(&mut self, a: usize, b: usize, theta: T) -> &mut Self {
        self.gate(Gate::Ms(theta), &[a, b])
    }

    /// Controlled phase `diag(1,1,1,e^{iφ})`.
    pub fn cphase(&mut self, c: usize, t: usize, a: T) -> &mut Self {
        let mut g = GateOp::new(Gate::Phase(a), vec![t]);
        g.controls.push((c, true));
        self.push_gate(g).expect("valid controlled phase")
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> &mut Self {
        self.push(Instruction::Measure { qubit, clbit })
            .expect("valid measurement")
    }

    pub fn reset(&mut self, qubit: usize) -> &mut Self {
        self.push(Instruction::Reset { qubit })
            .expect("valid reset")
    }

    pub fn barrier(&mut self, label: &str) -> &mut Self {
        self.instructions
            .push(Instruction::Barrier(label.to_string()));
        self
    }

    /// Gate applied iff `clbit == value` at execution time.
    pub fn conditioned(
        &mut self,
        gate: Gate<T>,
        targets: &[usize],
        clbit: usize,
        value: bool,
    ) -> &mut Self {
        let mut g = GateOp::new(gate, targets.to_vec());
        g.condition = Some(Condition { clbit, value });
        self.push_gate(g).expect("valid conditioned gate")
    }

    /// Appends an explicit unitary.
    pub fn unitary(&mut self, m: CMatrix<T>, label: &str, targets: &[usize]) -> Result<&mut Self> {
        self.push_gate(GateOp::new(
            Gate::Unitary(Arc::new(m), label.to_string()),
            targets.to_vec(),
        ))
    }

    /// Appends `other`, relabelling its qubits through `qubit_map` and clbits through
    /// `clbit_map`.
    pub fn append_mapped(
        &mut self,
        other: &Circuit<T>,
        qubit_map: &[usize],
        clbit_map: &[usize],
    ) -> Result<&mut Self> {
        if qubit_map.len() < other.n_qubits || clbit_map.len() < other.n_clbits {
            return Err(Error::DimensionMismatch(
                "register map shorter than the appended circuit".into(),
            ));
        }
        let n2q_before = self.two_qubit_count();
        for ins in &other.instructions {
            let mapped = match ins {
                Instruction::Gate(g) => {
                    let mut h = g.clone();
                    h.targets = g.targets.iter().map(|&q| qubit_map[q]).collect();
                    h.controls = g.controls.iter().map(|&(q, v)| (qubit_map[q], v)).collect();
                    h.condition = g.condition.map(|c| Condition {
                        clbit: clbit_map[c.clbit],
                        value: c.value,
                    });
                    Instruction::Gate(h)
                }
                Instruction::Measure { qubit, clbit } => Instruction::Measure {
                    qubit: qubit_map[*qubit],
                    clbit: clbit_map[*clbit],
                },
                Instruction::Reset { qubit } => Instruction::Reset {
                    qubit: qubit_map[*qubit],
                },
                Instruction::Barrier(l) => Instruction::Barrier(l.clone()),
            };
            self.push(mapped)?;
        }
        for d in &other.detectors {
            self.add_detector(Detector {
                clbit: clbit_map[d.clbit],
                cumulative_n2q: d.cumulative_n2q + n2q_before,
                ..*d
            })?;
        }
        Ok(self)
    }

    /// Appends a circuit over the same registers.
    pub fn append(&mut self, other: &Circuit<T>) -> Result<&mut Self> {
        let qm: Vec<usize> = (0..other.n_qubits).collect();
        let cm: Vec<usize> = (0..other.n_clbits).collect();
        self.append_mapped(other, &qm, &cm)
    }

    fn require_unitary(&self) -> Result<()> {
        for ins in &self.instructions {
            match ins {
                Instruction::Gate(g) if g.condition.is_some() => {
                    return Err(Error::Unsupported(
                        "classically conditioned gate in a unitary circuit".into(),
                    ))
                }
                Instruction::Measure { .. } | Instruction::Reset { .. } => {
                    return Err(Error::Unsupported(
                        "measurement or reset in a unitary circuit".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Adjoint of a unitary circuit.
    pub fn inverse(&self) -> Result<Circuit<T>> {
        self.require_unitary()?;
        let mut out = Circuit::new(self.n_qubits, self.n_clbits);
        for ins in self.instructions.iter().rev() {
            match ins {
                Instruction::Gate(g) => out.instructions.push(Instruction::Gate(g.inverse())),
                other => out.instructions.push(other.clone()),
            }
        }
        Ok(out)
    }

    /// Every gate gains a control on `control`.
    pub fn controlled(&self, control: usize) -> Result<Circuit<T>> {
        self.require_unitary()?;
        let mut out = Circuit::new(self.n_qubits.max(control + 1), self.n_clbits);
        for ins in &self.instructions {
            out.push(ins.controlled(control)?)?;
        }
        Ok(out)
    }

    /// Applies a unitary circuit in place.
    pub fn apply_unitary(&self, state: &mut State<T>) -> Result<()> {
        self.require_unitary()?;
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit state for a {}-qubit circuit",
                state.n_qubits(),
                self.n_qubits
            )));
        }
        for ins in &self.instructions {
            if let Instruction::Gate(g) = ins {
                crate::sim::exec::apply_gate_op(state, g);
            }
        }
        Ok(())
    }

    /// Dense unitary of a measurement-free circuit.
    pub fn to_matrix(&self) -> Result<CMatrix<T>> {
        if self.n_qubits > crate::operator::DENSE_LIMIT {
            return Err(Error::DenseLimit {
                n: self.n_qubits,
                limit: crate::operator::DENSE_LIMIT,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let mut s = State::basis(self.n_qubits, b)?;
            self.apply_unitary(&mut s)?;
            for (r, a) in s.amplitudes().iter().enumerate() {
                m[(r, b)] = *a;
            }
        }
        Ok(m)
    }

    /// Non-ideal gates acting on exactly two qubits.
    pub fn two_qubit_count(&self) -> usize {
        self.gate_ops()
            .filter(|g| !g.ideal && g.n_qubits_touched() == 2)
            .count()
    }

    /// Non-ideal gates acting on two or more qubits (the noise locations).
    pub fn noisy_location_count(&self) -> usize {
        self.gate_ops()
            .filter(|g| !g.ideal && g.n_qubits_touched() >= 2)
            .count()
    }

    pub fn measurement_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Measure { .. }))
            .count()
    }

    pub fn gate_ops(&self) -> impl Iterator<Item = &GateOp<T>> {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::Gate(g) => Some(g),
            _ => None,
        })
    }

    /// Marks every gate as ideal.
    pub fn into_ideal(mut self) -> Self {
        for ins in &mut self.instructions {
            if let Instruction::Gate(g) = ins {
                g.ideal = true;
            }
        }
        self
    }
}

impl<T: Real> fmt::Display for Circuit<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# qubits {} clbits {}", self.n_qubits, self.n_clbits)?;
        for ins in &self.instructions {
            match ins {
                Instruction::Gate(g) => {
                    write!(f, "{}", g.gate)?;
                    for (q, v) in &g.controls {
                        write!(f, " c{}{q}", if *v { "" } else { "!" })?;
                    }
                    for q in &g.targets {
                        write!(f, " q{q}")?;
                    }
                    if let Some(c) = g.condition {
                        write!(f, " if c{}=={}", c.clbit, c.value as u8)?;
                    }
                    if g.ideal {
                        write!(f, " ideal")?;
                    }
                    writeln!(f)?;
                }
                Instruction::Measure { qubit, clbit } => {
                    writeln!(f, "measure q{qubit} -> c{clbit}")?
                }
                Instruction::Reset { qubit } => writeln!(f, "reset q{qubit}")?,
                Instruction::Barrier(l) => writeln!(f, "barrier {l}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn controlled_x_truth_table() {
        let mut c = Circuit::<f64>::new(2, 0);
        c.push_gate(GateOp::new(Gate::X, vec![1]).controlled(0).unwrap())
            .unwrap();
        let m = c.to_matrix().unwrap();
        let expect = [0usize, 3, 2, 1];
        for (b, &out) in expect.iter().enumerate() {
            assert_eq!(m[(out, b)], Complex::new(1.0, 0.0));
        }
    }

    #[test]
    fn overlapping_control_rejected() {
        let g = GateOp::<f64>::new(Gate::X, vec![1]);
        assert!(g.controlled(1).is_err());
    }

    #[test]
    fn repeated_target_rejected() {
        let mut c = Circuit::<f64>::new(2, 0);
        assert!(c.push_gate(GateOp::new(Gate::Cx, vec![1, 1])).is_err());
        assert!(c.push_gate(GateOp::new(Gate::X, vec![2])).is_err());
        assert!(c
            .push_gate(GateOp::new(Gate::Rx(f64::NAN), vec![0]))
            .is_err());
    }

    #[test]
    fn non_unitary_payload_rejected() {
        let mut c = Circuit::<f64>::new(1, 0);
        let m = CMatrix::from_rows(
            2,
            2,
            vec![
                Complex::new(1., 0.),
                Complex::new(1., 0.),
                Complex::new(0., 0.),
                Complex::new(1., 0.),
            ],
        );
        assert!(matches!(
            c.unitary(m, "bad", &[0]),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn inverse_undoes_circuit() {
        let mut c = Circuit::<f64>::new(3, 0);
        c.h(0)
            .cx(0, 1)
            .rz(2, 0.3)
            .ms(1, 2, 0.8)
            .ry(0, -0.2)
            .cphase(2, 0, 0.5);
        let mut full = c.clone();
        full.append(&c.inverse().unwrap()).unwrap();
        let m = full.to_matrix().unwrap();
        assert!(m.max_abs_diff(&CMatrix::identity(8)) < 1e-14);
    }

    #[test]
    fn text_dump_lists_instructions() {
        let mut c = Circuit::<f64>::new(2, 1);
        c.h(0)
            .cx(0, 1)
            .measure(1, 0)
            .conditioned(Gate::X, &[0], 0, true);
        let s = c.to_string();
        assert_eq!(s.lines().count(), 5);
        assert!(s.contains("measure q1 -> c0"));
        assert!(s.contains("x q0 if c0==1"));
    }
}
