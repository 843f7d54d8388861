//! Hamiltonian evolution gates `exp(+2πi t H)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operator::{Pauli, PauliSum};
use crate::scalar::Real;
use crate::sim::circuit::{Circuit, GateOp};
use crate::sim::gate::Gate;

fn check_hermitian<T: Real>(h: &PauliSum<T>) -> Result<()> {
    let d = h.hermiticity_defect();
    if d > T::lit(1e-10) {
        return Err(Error::NotHermitian(d.to_f64_lossy()));
    }
    Ok(())
}

/// Dense gate `exp(+2πi t H)` on `qubits` (qubit `j` of `h` acts on `qubits[j]`).
pub fn exact_evolution_gate<T: Real>(h: &PauliSum<T>, t: T, qubits: &[usize]) -> Result<GateOp<T>> {
    check_hermitian(h)?;
    if qubits.len() != h.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit operator on {} qubits",
            h.n_qubits(),
            qubits.len()
        )));
    }
    let u = h.to_matrix()?.expi_hermitian(T::TAU() * t)?;
    Ok(GateOp::new(
        Gate::Unitary(Arc::new(u), format!("exp(2pi i {t} H)")),
        qubits.to_vec(),
    ))
}

/// First-order product formula for `exp(+2πi t H)` over `h.n_qubits()` qubits.
pub fn trotter_evolution_circuit<T: Real>(
    h: &PauliSum<T>,
    t: T,
    steps: usize,
) -> Result<Circuit<T>> {
    check_hermitian(h)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let n = h.n_qubits();
    let dt = T::TAU() * t / T::from_count(steps);
    let mut layer = Circuit::new(n, 0);
    for (p, c) in h.terms() {
        // exp(iαP) = R_P(−2α).
        let alpha = c.re * dt;
        if p.is_identity() {
            layer.push_gate(GateOp::new(Gate::GlobalPhase(alpha), vec![]))?;
            continue;
        }
        let support = p.support();
        let factors: Vec<Pauli> = support.iter().map(|&q| p.get(q)).collect();
        let gate = match factors.as_slice() {
            [Pauli::X] => Gate::Rx(-alpha * T::lit(2.0)),
            [Pauli::Y] => Gate::Ry(-alpha * T::lit(2.0)),
            [Pauli::Z] => Gate::Rz(-alpha * T::lit(2.0)),
            _ => Gate::PauliRotation(factors, -alpha * T::lit(2.0)),
        };
        layer.push_gate(GateOp::new(gate, support))?;
    }
    let mut out = Circuit::new(n, 0);
    for _ in 0..steps {
        out.append(&layer)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use num_complex::Complex;

    fn op(terms: &[(f64, &str)]) -> PauliSum<f64> {
        let t: Vec<(Complex<f64>, &str)> = terms
            .iter()
            .map(|&(c, l)| (Complex::new(c, 0.0), l))
            .collect();
        PauliSum::from_labels(&t).unwrap()
    }

    fn gate_matrix(g: &GateOp<f64>) -> CMatrix<f64> {
        g.gate.matrix()
    }

    #[test]
    fn half_turn_of_z_is_minus_identity() {
        let g = exact_evolution_gate(&op(&[(1.0, "Z")]), 0.5, &[0]).unwrap();
        let m = gate_matrix(&g);
        assert!(m.max_abs_diff(&CMatrix::identity(2).scale(Complex::new(-1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn zero_time_is_identity() {
        let g = exact_evolution_gate(&op(&[(0.3, "XZ"), (0.2, "YY")]), 0.0, &[0, 1]).unwrap();
        assert!(gate_matrix(&g).max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn powers_match_scaled_time() {
        let h = op(&[(0.3, "XZ"), (-0.7, "ZI"), (0.25, "YY"), (0.1, "II")]);
        let t = 0.137;
        for m in 0..4u32 {
            let base = gate_matrix(&exact_evolution_gate(&h, t, &[0, 1]).unwrap()).pow(1 << m);
            let direct =
                gate_matrix(&exact_evolution_gate(&h, t * f64::from(1u32 << m), &[0, 1]).unwrap());
            assert!(base.max_abs_diff(&direct) < 1e-10);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = PauliSum::from_labels(&[(Complex::new(0.0, 1.0), "X")]).unwrap();
        assert!(exact_evolution_gate(&h, 0.1, &[0]).is_err());
    }

    #[test]
    fn trotter_single_term_is_exact() {
        let h = op(&[(0.8, "XY")]);
        let exact = gate_matrix(&exact_evolution_gate(&h, 0.3, &[0, 1]).unwrap());
        for steps in [1, 3] {
            let c = trotter_evolution_circuit(&h, 0.3, steps)
                .unwrap()
                .to_matrix()
                .unwrap();
            assert!(c.max_abs_diff(&exact) < 1e-12);
        }
    }

    #[test]
    fn trotter_commuting_terms_exact_in_one_step() {
        let h = op(&[(0.8, "ZZ"), (-0.3, "ZI"), (0.5, "IZ"), (0.2, "II")]);
        let exact = gate_matrix(&exact_evolution_gate(&h, 0.41, &[0, 1]).unwrap());
        let c = trotter_evolution_circuit(&h, 0.41, 1)
            .unwrap()
            .to_matrix()
            .unwrap();
        assert!(c.max_abs_diff(&exact) < 1e-10);
    }

    #[test]
    fn trotter_error_decreases_with_steps() {
        let h = op(&[(1.0, "X"), (1.0, "Z")]);
        let exact = gate_matrix(&exact_evolution_gate(&h, 0.2, &[0]).unwrap());
        let err = |s| {
            let c = trotter_evolution_circuit(&h, 0.2, s)
                .unwrap()
                .to_matrix()
                .unwrap();
            (&c - &exact).frobenius_norm()
        };
        assert!(err(32) < err(8));
    }

    #[test]
    fn controlled_exact_evolution_is_block_diagonal() {
        let h = op(&[(0.3, "XZ"), (-0.7, "ZI"), (0.25, "YY"), (0.4, "II")]);
        let u = gate_matrix(&exact_evolution_gate(&h, 0.21, &[0, 1]).unwrap());
        let mut c = Circuit::new(3, 0);
        c.push_gate(
            exact_evolution_gate(&h, 0.21, &[0, 1])
                .unwrap()
                .controlled(2)
                .unwrap(),
        )
        .unwrap();
        let m = c.to_matrix().unwrap();
        for r in 0..8 {
            for col in 0..8 {
                let expect = match (r >> 2, col >> 2) {
                    (0, 0) => {
                        if r == col {
                            Complex::new(1.0, 0.0)
                        } else {
                            Complex::new(0.0, 0.0)
                        }
                    }
                    (1, 1) => u[(r & 3, col & 3)],
                    _ => Complex::new(0.0, 0.0),
                };
                assert!((m[(r, col)] - expect).norm() < 1e-12);
            }
        }
    }
}
