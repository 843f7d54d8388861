//! Model dynamic-QPE workloads for error-detection experiments, and exhaustive
//! single-fault checks.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::iceberg::compile::{
    compile_logical, inject_pauli, lower_unencoded, CompiledCircuit, SyndromeSchedule,
};
use crate::iceberg::discard::{run_with_discard, DiscardRun};
use crate::iceberg::logical::LogicalCircuit;
use crate::iceberg::IcebergLayout;
use crate::operator::{Pauli, PauliSum};
use crate::qpe::circuits::{build_dynamic_qpe_circuit_with, Evolution};
use crate::qpe::{QpeConfig, Variant};
use crate::scalar::Real;
use crate::sim::{
    amplitude_encode, exact_distribution, marginalize_bits, Circuit, NoiseModel, State,
};

/// A dynamic-QPE workload on `k` logical qubits (one ancilla plus `k − 1` system qubits).
#[derive(Clone, Debug)]
pub struct QpeWorkload<T> {
    pub hamiltonian: PauliSum<T>,
    pub input: State<T>,
    pub config: QpeConfig<T>,
    /// Dynamic-QPE circuit with one Trotter step per controlled power.
    pub circuit: Circuit<T>,
    pub logical: LogicalCircuit<T>,
}

impl<T: Real> QpeWorkload<T> {
    /// Diagonal model Hamiltonian with an amplitude-encoded input; `k ∈ {2, 4}`.
    ///
    /// Every term is diagonal, so one Trotter step per power is exact.
    pub fn model(k: usize, n_q: usize, variant: Variant, a: Option<T>) -> Result<Self> {
        let c = |x: f64| Complex::new(T::lit(x), T::zero());
        let (h, amps, window): (PauliSum<T>, Vec<f64>, (f64, f64)) = match k {
            2 => (
                PauliSum::from_labels(&[(c(0.8), "Z")])?,
                vec![0.8, 0.2],
                (-1.6, 1.6),
            ),
            4 => (
                PauliSum::from_labels(&[
                    (c(1.0), "IIZ"),
                    (c(0.55), "IZI"),
                    (c(0.3), "ZII"),
                    (c(0.25), "IZZ"),
                ])?,
                vec![0.30, 0.05, 0.20, 0.10, 0.05, 0.15, 0.10, 0.05],
                (-2.5, 2.5),
            ),
            _ => return Err(Error::Unsupported(format!("no model workload for k = {k}"))),
        };
        let input = State::from_amplitudes(
            h.n_qubits(),
            amps.iter()
                .map(|&p| Complex::new(T::lit(p.sqrt()), T::zero()))
                .collect(),
        )?;
        let config = QpeConfig::new(
            n_q,
            T::lit(window.0),
            T::lit(window.1),
            variant,
            a,
            T::zero(),
        )?;
        Self::new(h, input, config, 1)
    }

    /// Dynamic QPE of `h` on `input` with `trotter_steps` first-order steps per
    /// controlled power. `1 + n_sys` must be even.
    pub fn new(
        hamiltonian: PauliSum<T>,
        input: State<T>,
        config: QpeConfig<T>,
        trotter_steps: usize,
    ) -> Result<Self> {
        let k = 1 + hamiltonian.n_qubits();
        if k % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "{k} logical qubits (ancilla plus system); the code needs an even count"
            )));
        }
        let prep = amplitude_encode(&input)?;
        let circuit = build_dynamic_qpe_circuit_with(
            &config,
            &hamiltonian,
            &prep,
            Evolution::Trotter {
                steps: trotter_steps,
            },
        )?;
        let logical = LogicalCircuit::from_circuit(&circuit)?;
        Ok(Self {
            hamiltonian,
            input,
            config,
            circuit,
            logical,
        })
    }

    pub fn compile(
        &self,
        layout: &IcebergLayout,
        schedule: SyndromeSchedule,
    ) -> Result<CompiledCircuit<T>> {
        compile_logical(&self.logical, layout, schedule)
    }
}

/// Noisy runs of one workload with and without error detection, on matched seeds.
#[derive(Clone, Debug)]
pub struct QedComparison {
    pub compiled_n2q: usize,
    pub bare_n2q: usize,
    /// Encoded run; shots with a nonzero detector are discarded.
    pub encoded: DiscardRun,
    /// Unencoded run in the same native gate set; every shot is kept.
    pub bare: DiscardRun,
    /// Noiseless outcome law of the QPE readout bits.
    pub exact: Vec<f64>,
}

impl<T: Real> QpeWorkload<T> {
    pub fn compare_qed(
        &self,
        layout: &IcebergLayout,
        schedule: SyndromeSchedule,
        noise: &NoiseModel,
        shots: usize,
        seed: u64,
    ) -> Result<QedComparison> {
        let compiled = self.compile(layout, schedule)?;
        let bare = lower_unencoded(&self.logical);
        let bits: Vec<usize> = (0..self.config.n_q).collect();
        let exact = marginalize_bits(
            &exact_distribution(&self.circuit, &State::zero(self.circuit.n_qubits()))?,
            &bits,
        )
        .into_iter()
        .map(|p| p.to_f64_lossy())
        .collect();
        Ok(QedComparison {
            compiled_n2q: compiled.n_2q(),
            bare_n2q: bare.two_qubit_count(),
            encoded: run_with_discard(
                &compiled.circuit,
                &compiled.logical_clbits,
                noise,
                shots,
                seed,
            )?,
            bare: run_with_discard(&bare, &bits, noise, shots, seed)?,
            exact,
        })
    }
}

/// Outcome of an exhaustive single-fault sweep.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FaultSweep {
    pub locations: usize,
    pub faults: usize,
    /// Faults whose discard probability fell short of one, with that probability.
    pub undetected: Vec<(usize, usize, Pauli, f64)>,
}

/// Inserts every single-qubit Pauli on every code qubit at every logical-instruction
/// boundary and computes the exact discard probability of the noiseless run.
pub fn single_fault_sweep<T: Real>(compiled: &CompiledCircuit<T>) -> Result<FaultSweep> {
    let input = State::zero(compiled.circuit.n_qubits());
    let mask: u64 = compiled
        .circuit
        .detectors()
        .iter()
        .map(|d| 1u64 << d.clbit)
        .sum();
    let mut out = FaultSweep {
        locations: compiled.boundaries.len(),
        ..Default::default()
    };
    for &pos in &compiled.boundaries {
        for q in compiled.layout.code_qubits() {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let c = inject_pauli(&compiled.circuit, pos, &[(q, p)])?;
                let detected: f64 = exact_distribution(&c, &input)?
                    .iter()
                    .filter(|(b, _)| *b & mask != 0)
                    .map(|(_, pr)| pr.to_f64_lossy())
                    .sum();
                out.faults += 1;
                if detected < 1.0 - 1e-9 {
                    out.undetected.push((pos, q, p, detected));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compiled_workload_is_transparent() {
        for k in [2, 4] {
            let w = QpeWorkload::<f64>::model(k, 3, Variant::Uniform, None).unwrap();
            let l = IcebergLayout::standard(k).unwrap();
            let compiled = w.compile(&l, SyndromeSchedule::default()).unwrap();
            let bits: Vec<usize> = (0..3).collect();
            let enc = marginalize_bits(
                &exact_distribution(&compiled.circuit, &State::zero(l.n_physical())).unwrap(),
                &compiled.logical_clbits,
            );
            let bare = lower_unencoded(&w.logical);
            let raw = marginalize_bits(&exact_distribution(&bare, &State::zero(k)).unwrap(), &bits);
            let reference = marginalize_bits(
                &exact_distribution(&w.circuit, &State::zero(k)).unwrap(),
                &bits,
            );
            for i in 0..8 {
                assert!((enc[i] - raw[i]).abs() < 1e-9 && (raw[i] - reference[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn noiseless_comparison_keeps_every_shot() {
        let w = QpeWorkload::<f64>::model(2, 2, Variant::Uniform, None).unwrap();
        let layout = IcebergLayout::standard(2).unwrap();
        let c = w
            .compare_qed(
                &layout,
                SyndromeSchedule::default(),
                &NoiseModel::noiseless(),
                200,
                4,
            )
            .unwrap();
        assert_eq!(c.encoded.stats.discarded, 0);
        assert!(c.compiled_n2q > c.bare_n2q);
        assert!((c.exact.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(c.encoded.accepted.unwrap().total(), 200);
    }

    #[test]
    fn single_faults_are_detected_k2() {
        let w = QpeWorkload::<f64>::model(2, 2, Variant::Uniform, None).unwrap();
        let compiled = w
            .compile(
                &IcebergLayout::standard(2).unwrap(),
                SyndromeSchedule::default(),
            )
            .unwrap();
        let sweep = single_fault_sweep(&compiled).unwrap();
        assert_eq!(sweep.faults, sweep.locations * 12);
        assert!(
            sweep.undetected.is_empty(),
            "{:?}",
            &sweep.undetected[..sweep.undetected.len().min(5)]
        );
    }
}
