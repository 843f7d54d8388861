//! Logical circuits in the Pauli-rotation gate set and their physical lowering.

use crate::error::{Error, Result};
use crate::iceberg::IcebergLayout;
use crate::operator::{Pauli, PauliString};
use crate::scalar::Real;
use crate::sim::{Circuit, Condition, Gate, GateOp, Instruction};

/// Logical gate: a Pauli product or `exp(−iθ/2 P)`.
#[derive(Clone, Debug, PartialEq)]
pub enum LogicalOp<T> {
    Pauli(PauliString),
    Rotation(PauliString, T),
}

impl<T: Real> LogicalOp<T> {
    pub fn pauli(&self) -> &PauliString {
        match self {
            LogicalOp::Pauli(p) | LogicalOp::Rotation(p, _) => p,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LogicalInstruction<T> {
    Gate {
        op: LogicalOp<T>,
        condition: Option<Condition>,
    },
    Measure {
        qubit: usize,
        clbit: usize,
    },
    Reset {
        qubit: usize,
    },
}

/// Circuit over `n_qubits` logical qubits; global phases are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalCircuit<T> {
    n_qubits: usize,
    n_clbits: usize,
    instructions: Vec<LogicalInstruction<T>>,
}

impl<T: Real> LogicalCircuit<T> {
    pub fn new(n_qubits: usize, n_clbits: usize) -> Self {
        Self {
            n_qubits,
            n_clbits,
            instructions: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn instructions(&self) -> &[LogicalInstruction<T>] {
        &self.instructions
    }

    pub fn push(&mut self, ins: LogicalInstruction<T>) -> Result<()> {
        let q_ok = |q: usize| {
            if q < self.n_qubits {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange {
                    what: "logical qubit",
                    index: q,
                    limit: self.n_qubits,
                })
            }
        };
        let c_ok = |c: usize| {
            if c < self.n_clbits {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange {
                    what: "clbit",
                    index: c,
                    limit: self.n_clbits,
                })
            }
        };
        match &ins {
            LogicalInstruction::Gate { op, condition } => {
                if op.pauli().n_qubits() != self.n_qubits {
                    return Err(Error::DimensionMismatch(
                        "logical Pauli size differs from the circuit".into(),
                    ));
                }
                if let LogicalOp::Rotation(_, t) = op {
                    if !t.is_finite() {
                        return Err(Error::InvalidArgument("non-finite rotation angle".into()));
                    }
                }
                if let Some(c) = condition {
                    c_ok(c.clbit)?;
                }
            }
            LogicalInstruction::Measure { qubit, clbit } => {
                q_ok(*qubit)?;
                c_ok(*clbit)?;
            }
            LogicalInstruction::Reset { qubit } => q_ok(*qubit)?,
        }
        self.instructions.push(ins);
        Ok(())
    }

    fn rot(
        &mut self,
        factors: &[(usize, Pauli)],
        theta: T,
        condition: Option<Condition>,
    ) -> Result<()> {
        let p = PauliString::from_sparse(self.n_qubits, factors)?;
        self.push(LogicalInstruction::Gate {
            op: LogicalOp::Rotation(p, theta),
            condition,
        })
    }

    fn pauli(&mut self, factors: &[(usize, Pauli)], condition: Option<Condition>) -> Result<()> {
        let p = PauliString::from_sparse(self.n_qubits, factors)?;
        self.push(LogicalInstruction::Gate {
            op: LogicalOp::Pauli(p),
            condition,
        })
    }

    /// Rewrites a circuit into Pauli rotations and products.
    ///
    /// Quantum-controlled gates and explicit unitaries are rejected; barriers are dropped.
    pub fn from_circuit(c: &Circuit<T>) -> Result<Self> {
        let mut out = Self::new(c.n_qubits(), c.n_clbits());
        let half_pi = T::FRAC_PI_2();
        for ins in c.instructions() {
            match ins {
                Instruction::Gate(g) => {
                    if !g.controls.is_empty() {
                        return Err(Error::Unsupported(format!(
                            "quantum-controlled {} has no logical lowering",
                            g.gate
                        )));
                    }
                    let cond = g.condition;
                    let t = &g.targets;
                    use Pauli::{X, Y, Z};
                    match &g.gate {
                        Gate::I | Gate::GlobalPhase(_) => {}
                        Gate::H => {
                            out.rot(&[(t[0], Z)], half_pi, cond)?;
                            out.rot(&[(t[0], X)], half_pi, cond)?;
                            out.rot(&[(t[0], Z)], half_pi, cond)?;
                        }
                        Gate::X => out.pauli(&[(t[0], X)], cond)?,
                        Gate::Y => out.pauli(&[(t[0], Y)], cond)?,
                        Gate::Z => out.pauli(&[(t[0], Z)], cond)?,
                        Gate::S => out.rot(&[(t[0], Z)], half_pi, cond)?,
                        Gate::Sdg => out.rot(&[(t[0], Z)], -half_pi, cond)?,
                        Gate::T => out.rot(&[(t[0], Z)], T::FRAC_PI_4(), cond)?,
                        Gate::Tdg => out.rot(&[(t[0], Z)], -T::FRAC_PI_4(), cond)?,
                        Gate::Rx(a) => out.rot(&[(t[0], X)], *a, cond)?,
                        Gate::Ry(a) => out.rot(&[(t[0], Y)], *a, cond)?,
                        Gate::Rz(a) | Gate::Phase(a) => out.rot(&[(t[0], Z)], *a, cond)?,
                        Gate::Cx => out.cx(t[0], t[1], cond)?,
                        Gate::Cz => {
                            out.rot(&[(t[0], Z)], half_pi, cond)?;
                            out.rot(&[(t[1], Z)], half_pi, cond)?;
                            out.rot(&[(t[0], Z), (t[1], Z)], -half_pi, cond)?;
                        }
                        Gate::Swap => {
                            out.cx(t[0], t[1], cond)?;
                            out.cx(t[1], t[0], cond)?;
                            out.cx(t[0], t[1], cond)?;
                        }
                        Gate::Ms(a) => out.rot(&[(t[0], Z), (t[1], Z)], *a, cond)?,
                        Gate::PauliRotation(f, a) => {
                            let factors: Vec<(usize, Pauli)> =
                                t.iter().copied().zip(f.iter().copied()).collect();
                            out.rot(&factors, *a, cond)?;
                        }
                        Gate::PauliProduct(f) => {
                            let factors: Vec<(usize, Pauli)> =
                                t.iter().copied().zip(f.iter().copied()).collect();
                            out.pauli(&factors, cond)?;
                        }
                        Gate::Unitary(_, label) => {
                            return Err(Error::Unsupported(format!(
                                "unitary '{label}' has no logical lowering"
                            )));
                        }
                    }
                }
                Instruction::Measure { qubit, clbit } => out.push(LogicalInstruction::Measure {
                    qubit: *qubit,
                    clbit: *clbit,
                })?,
                Instruction::Reset { qubit } => {
                    out.push(LogicalInstruction::Reset { qubit: *qubit })?
                }
                Instruction::Barrier(_) => {}
            }
        }
        Ok(out)
    }

    /// `CX = e^{iπ/4} R_{Z_c}(π/2) R_{X_t}(π/2) R_{Z_cX_t}(−π/2)`.
    fn cx(&mut self, c: usize, t: usize, cond: Option<Condition>) -> Result<()> {
        let half_pi = T::FRAC_PI_2();
        self.rot(&[(c, Pauli::Z)], half_pi, cond)?;
        self.rot(&[(t, Pauli::X)], half_pi, cond)?;
        self.rot(&[(c, Pauli::Z), (t, Pauli::X)], -half_pi, cond)
    }

    /// Reference circuit with `PauliRotation`/`PauliProduct` gates on the logical qubits.
    pub fn to_circuit(&self) -> Circuit<T> {
        let mut c = Circuit::new(self.n_qubits, self.n_clbits);
        for ins in &self.instructions {
            match ins {
                LogicalInstruction::Gate { op, condition } => {
                    let p = op.pauli();
                    let support = p.support();
                    if support.is_empty() {
                        continue;
                    }
                    let f: Vec<Pauli> = support.iter().map(|&q| p.get(q)).collect();
                    let gate = match op {
                        LogicalOp::Pauli(_) => Gate::PauliProduct(f),
                        LogicalOp::Rotation(_, a) => Gate::PauliRotation(f, *a),
                    };
                    let mut g = GateOp::new(gate, support);
                    g.condition = *condition;
                    c.push_gate(g).expect("validated on push");
                }
                LogicalInstruction::Measure { qubit, clbit } => {
                    c.measure(*qubit, *clbit);
                }
                LogicalInstruction::Reset { qubit } => {
                    c.reset(*qubit);
                }
            }
        }
        c
    }
}

fn push_cond<T: Real>(
    c: &mut Circuit<T>,
    gate: Gate<T>,
    targets: &[usize],
    condition: Option<Condition>,
) {
    let mut g = GateOp::new(gate, targets.to_vec());
    g.condition = condition;
    c.push_gate(g)
        .expect("physical indices validated by the caller");
}

/// `exp(−iθ/2 P)` in native gates: basis change to `Z`, a CNOT parity ladder into the
/// second-to-last support qubit, one `MS` with the last, and the mirror.
pub(crate) fn push_physical_rotation<T: Real>(
    c: &mut Circuit<T>,
    factors: &[(usize, Pauli)],
    theta: T,
    condition: Option<Condition>,
) {
    let factors: Vec<(usize, Pauli)> = factors
        .iter()
        .copied()
        .filter(|f| f.1 != Pauli::I)
        .collect();
    let w = factors.len();
    if w == 0 {
        return;
    }
    for &(q, p) in &factors {
        match p {
            Pauli::X => push_cond(c, Gate::H, &[q], condition),
            Pauli::Y => {
                push_cond(c, Gate::Sdg, &[q], condition);
                push_cond(c, Gate::H, &[q], condition);
            }
            _ => {}
        }
    }
    let qs: Vec<usize> = factors.iter().map(|f| f.0).collect();
    if w == 1 {
        push_cond(c, Gate::Rz(theta), &[qs[0]], condition);
    } else {
        for j in 0..w - 2 {
            push_cond(c, Gate::Cx, &[qs[j], qs[j + 1]], condition);
        }
        push_cond(c, Gate::Ms(theta), &[qs[w - 2], qs[w - 1]], condition);
        for j in (0..w - 2).rev() {
            push_cond(c, Gate::Cx, &[qs[j], qs[j + 1]], condition);
        }
    }
    for &(q, p) in &factors {
        match p {
            Pauli::X => push_cond(c, Gate::H, &[q], condition),
            Pauli::Y => {
                push_cond(c, Gate::H, &[q], condition);
                push_cond(c, Gate::S, &[q], condition);
            }
            _ => {}
        }
    }
}

/// Single-qubit Pauli layer.
pub(crate) fn push_physical_pauli<T: Real>(
    c: &mut Circuit<T>,
    factors: &[(usize, Pauli)],
    condition: Option<Condition>,
) {
    for &(q, p) in factors {
        let g = match p {
            Pauli::I => continue,
            Pauli::X => Gate::X,
            Pauli::Y => Gate::Y,
            Pauli::Z => Gate::Z,
        };
        push_cond(c, g, &[q], condition);
    }
}

fn factors_of(p: &PauliString) -> Vec<(usize, Pauli)> {
    p.support().into_iter().map(|q| (q, p.get(q))).collect()
}

/// Physical fragment (over `layout.n_physical()` qubits) implementing a logical gate.
pub fn logical_rotation<T: Real>(
    layout: &IcebergLayout,
    op: &LogicalOp<T>,
    condition: Option<Condition>,
) -> Result<Circuit<T>> {
    let mut c = Circuit::new(layout.n_physical(), condition.map_or(0, |c| c.clbit + 1));
    push_logical_op(&mut c, layout, op, condition)?;
    Ok(c)
}

pub(crate) fn push_logical_op<T: Real>(
    c: &mut Circuit<T>,
    layout: &IcebergLayout,
    op: &LogicalOp<T>,
    condition: Option<Condition>,
) -> Result<()> {
    let (sign, phys) = layout.logical_pauli(op.pauli())?;
    let f = factors_of(&phys);
    match op {
        // Pauli products agree with their physical images up to a global sign.
        LogicalOp::Pauli(_) => push_physical_pauli(c, &f, condition),
        LogicalOp::Rotation(_, a) => {
            let theta = if sign < 0 { -*a } else { *a };
            push_physical_rotation(c, &f, theta, condition);
        }
    }
    Ok(())
}

/// Unencoded lowering: the same native gate set directly on the logical qubits.
pub fn lower_unencoded<T: Real>(logical: &LogicalCircuit<T>) -> Circuit<T> {
    let mut c = Circuit::new(logical.n_qubits(), logical.n_clbits());
    for ins in logical.instructions() {
        match ins {
            LogicalInstruction::Gate { op, condition } => {
                let f = factors_of(op.pauli());
                match op {
                    LogicalOp::Pauli(_) => push_physical_pauli(&mut c, &f, *condition),
                    LogicalOp::Rotation(_, a) => push_physical_rotation(&mut c, &f, *a, *condition),
                }
            }
            LogicalInstruction::Measure { qubit, clbit } => {
                c.measure(*qubit, *clbit);
            }
            LogicalInstruction::Reset { qubit } => {
                c.reset(*qubit);
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use num_complex::Complex;

    /// `max |a − e^{iφ} b|` with `φ` fixed by the largest entry of `b`.
    fn phase_distance(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
        let n = a.rows();
        let (mut bi, mut bj, mut best) = (0, 0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if b[(i, j)].norm() > best {
                    best = b[(i, j)].norm();
                    bi = i;
                    bj = j;
                }
            }
        }
        let ph = a[(bi, bj)] / b[(bi, bj)];
        let ph = ph / ph.norm();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                d = d.max((a[(i, j)] - ph * b[(i, j)]).norm());
            }
        }
        d
    }

    fn lowered_matrix(c: &Circuit<f64>) -> CMatrix<f64> {
        LogicalCircuit::from_circuit(c)
            .unwrap()
            .to_circuit()
            .to_matrix()
            .unwrap()
    }

    #[test]
    fn gate_rewrites_match_up_to_phase() {
        let gates: Vec<(Gate<f64>, Vec<usize>)> = vec![
            (Gate::H, vec![0]),
            (Gate::S, vec![1]),
            (Gate::Tdg, vec![0]),
            (Gate::Phase(0.37), vec![1]),
            (Gate::Ry(-1.1), vec![0]),
            (Gate::Cx, vec![0, 1]),
            (Gate::Cx, vec![1, 0]),
            (Gate::Cz, vec![0, 1]),
            (Gate::Swap, vec![0, 1]),
            (Gate::Ms(0.8), vec![1, 0]),
            (
                Gate::PauliRotation(vec![Pauli::Y, Pauli::X], 0.3),
                vec![0, 1],
            ),
            (Gate::PauliProduct(vec![Pauli::Y, Pauli::Z]), vec![1, 0]),
        ];
        for (g, t) in gates {
            let mut c = Circuit::<f64>::new(2, 0);
            c.gate(g.clone(), &t);
            let d = phase_distance(&lowered_matrix(&c), &c.to_matrix().unwrap());
            assert!(d < 1e-12, "{g}: {d}");
        }
    }

    #[test]
    fn native_lowering_of_rotations() {
        let mut rng_angle = 0.17;
        for label in ["Z", "X", "Y", "XZ", "YY", "ZXY", "XYZX"] {
            rng_angle += 0.31;
            let p = PauliString::from_label(label).unwrap();
            let n = p.n_qubits();
            let mut l = LogicalCircuit::new(n, 0);
            l.push(LogicalInstruction::Gate {
                op: LogicalOp::Rotation(p.clone(), rng_angle),
                condition: None,
            })
            .unwrap();
            let native = lower_unencoded(&l);
            assert!(native
                .gate_ops()
                .all(|g| g.targets.len() <= 2 && !matches!(g.gate, Gate::PauliRotation(..))));
            let expect_2q = if n == 1 { 0 } else { 2 * (n - 2) + 1 };
            assert_eq!(native.two_qubit_count(), expect_2q);
            let d = phase_distance(
                &native.to_matrix().unwrap(),
                &l.to_circuit().to_matrix().unwrap(),
            );
            assert!(d < 1e-12, "{label}: {d}");
        }
    }

    #[test]
    fn rejects_controls_and_unitaries() {
        let mut c = Circuit::<f64>::new(2, 0);
        c.push_gate(GateOp::new(Gate::H, vec![1]).controlled(0).unwrap())
            .unwrap();
        assert!(matches!(
            LogicalCircuit::from_circuit(&c),
            Err(Error::Unsupported(_))
        ));
        let mut c = Circuit::<f64>::new(1, 0);
        c.unitary(CMatrix::identity(2), "u", &[0]).unwrap();
        assert!(matches!(
            LogicalCircuit::from_circuit(&c),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn encoded_rotation_is_logical() {
        let layout = IcebergLayout::standard(2).unwrap();
        let psi = crate::sim::State::from_amplitudes_unchecked(
            2,
            vec![
                Complex::new(0.5_f64, 0.1),
                Complex::new(-0.3, 0.4),
                Complex::new(0.2, -0.6),
                Complex::new(0.1, 0.2),
            ],
        )
        .normalized();
        for label in ["IX", "ZI", "YI", "XZ", "YY", "ZX"] {
            let op = LogicalOp::Rotation(PauliString::from_label(label).unwrap(), 0.7);
            let frag = logical_rotation(&layout, &op, None).unwrap();
            let mut phys = layout.encode_state(&psi).unwrap();
            frag.apply_unitary(&mut phys).unwrap();
            let mut log = psi.clone();
            let mut lc = LogicalCircuit::new(2, 0);
            lc.push(LogicalInstruction::Gate {
                op,
                condition: None,
            })
            .unwrap();
            lc.to_circuit().apply_unitary(&mut log).unwrap();
            let back = layout.decode_state(&phys).unwrap();
            assert!((back.fidelity(&log) - 1.0).abs() < 1e-12, "{label}");
            if label.chars().filter(|&ch| ch != 'I').count() == 2 {
                assert_eq!(frag.two_qubit_count(), 1, "{label}");
            }
        }
    }
}
