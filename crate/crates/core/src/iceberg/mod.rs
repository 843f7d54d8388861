//! The `[[k+2, k, 2]]` Iceberg error-detection code.
//!
//! Code qubits are the data register `D` (one per logical qubit) plus `q_X` and `q_Z`; the
//! code space is stabilized by `S_X = ⊗X` and `S_Z = ⊗Z` over the code qubits. Two syndrome
//! ancillas and one flag qubit complete the physical register.

pub mod compile;
pub mod discard;
pub mod instance;
pub mod logical;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::operator::{Pauli, PauliString};
use crate::scalar::Real;
use crate::sim::State;

pub use compile::{
    compile_logical, encode_circuit, inject_pauli, lower_unencoded, reencode_for_measurement,
    syndrome_circuit, CompiledCircuit, SyndromeSchedule,
};
pub use discard::{
    discard_benchmark_circuit, discard_model, fit_p2, parse_discard_points, run_with_discard,
    DiscardRun, DiscardStats, P2Fit, RoundStats,
};
pub use instance::{single_fault_sweep, FaultSweep, QedComparison, QpeWorkload};
pub use logical::{logical_rotation, LogicalCircuit, LogicalInstruction, LogicalOp};

/// Physical roles of an Iceberg block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IcebergLayout {
    k: usize,
    data: Vec<usize>,
    qx: usize,
    qz: usize,
    /// `[Z-check ancilla, X-check ancilla]`.
    syndrome: [usize; 2],
    flag: usize,
    n_physical: usize,
}

impl IcebergLayout {
    /// Data `0..k`, `q_X = k`, `q_Z = k+1`, syndrome ancillas `k+2, k+3`, flag `k+4`.
    pub fn standard(k: usize) -> Result<Self> {
        Self::new(k, (0..k).collect(), k, k + 1, [k + 2, k + 3], k + 4, k + 5)
    }

    pub fn new(
        k: usize,
        data: Vec<usize>,
        qx: usize,
        qz: usize,
        syndrome: [usize; 2],
        flag: usize,
        n_physical: usize,
    ) -> Result<Self> {
        if k == 0 || k % 2 == 1 {
            return Err(Error::InvalidArgument(format!(
                "k = {k} must be even and positive"
            )));
        }
        if data.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{} data qubits for k = {k}",
                data.len()
            )));
        }
        if k + 2 > 62 {
            return Err(Error::InvalidArgument(
                "code block exceeds the register limit".into(),
            ));
        }
        let mut all: Vec<usize> = data.clone();
        all.extend([qx, qz, syndrome[0], syndrome[1], flag]);
        for (i, &q) in all.iter().enumerate() {
            if q >= n_physical {
                return Err(Error::IndexOutOfRange {
                    what: "physical qubit",
                    index: q,
                    limit: n_physical,
                });
            }
            if all[..i].contains(&q) {
                return Err(Error::InvalidArgument(format!(
                    "physical qubit {q} assigned twice"
                )));
            }
        }
        Ok(Self {
            k,
            data,
            qx,
            qz,
            syndrome,
            flag,
            n_physical,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn data(&self) -> &[usize] {
        &self.data
    }

    pub fn qx(&self) -> usize {
        self.qx
    }

    pub fn qz(&self) -> usize {
        self.qz
    }

    pub fn syndrome(&self) -> [usize; 2] {
        self.syndrome
    }

    pub fn flag(&self) -> usize {
        self.flag
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    /// `[d_0, …, d_{k−1}, q_X, q_Z]`.
    pub fn code_qubits(&self) -> Vec<usize> {
        let mut t = self.data.clone();
        t.push(self.qx);
        t.push(self.qz);
        t
    }

    fn uniform_string(&self, p: Pauli) -> PauliString {
        let factors: Vec<(usize, Pauli)> = self.code_qubits().into_iter().map(|q| (q, p)).collect();
        PauliString::from_sparse(self.n_physical, &factors).expect("layout validated")
    }

    pub fn stabilizer_x(&self) -> PauliString {
        self.uniform_string(Pauli::X)
    }

    pub fn stabilizer_z(&self) -> PauliString {
        self.uniform_string(Pauli::Z)
    }

    /// Physical image `sign · P` of a Hermitian logical Pauli product over `k` qubits.
    ///
    /// The product of the single-qubit representatives `X̄_i = X_{q_X}X_i`,
    /// `Z̄_i = Z_{q_Z}Z_i`, `Ȳ_i = iX̄_iZ̄_i` is reduced to minimum weight by the stabilizer
    /// group; ties keep the earliest of `P, P·S_X, P·S_Z, P·S_X·S_Z`.
    pub fn logical_pauli(&self, p: &PauliString) -> Result<(i8, PauliString)> {
        if p.n_qubits() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit logical Pauli on a k = {} block",
                p.n_qubits(),
                self.k
            )));
        }
        let n = self.n_physical;
        let mut phase = 0u8;
        let mut acc = PauliString::identity(n);
        let xbar = |i: usize| {
            PauliString::from_sparse(n, &[(self.qx, Pauli::X), (self.data[i], Pauli::X)])
                .expect("layout")
        };
        let zbar = |i: usize| {
            PauliString::from_sparse(n, &[(self.qz, Pauli::Z), (self.data[i], Pauli::Z)])
                .expect("layout")
        };
        for i in 0..self.k {
            let (k, rep) = match p.get(i) {
                Pauli::I => continue,
                Pauli::X => (0, xbar(i)),
                Pauli::Z => (0, zbar(i)),
                Pauli::Y => {
                    let (k, r) = xbar(i).mul_phase(&zbar(i));
                    (k + 1, r)
                }
            };
            let (k2, next) = acc.mul_phase(&rep);
            phase = (phase + k + k2) % 4;
            acc = next;
        }
        let sx = self.stabilizer_x();
        let sz = self.stabilizer_z();
        let (kxz, sxz) = sx.mul_phase(&sz);
        let mut best = (phase, acc.clone());
        for (ks, s) in [(0u8, sx), (0, sz), (kxz, sxz)] {
            let (k, cand) = acc.mul_phase(&s);
            if cand.weight() < best.1.weight() {
                best = ((phase + ks + k) % 4, cand);
            }
        }
        match best.0 {
            0 => Ok((1, best.1)),
            2 => Ok((-1, best.1)),
            _ => Err(Error::InvalidArgument(
                "logical Pauli image is not Hermitian".into(),
            )),
        }
    }

    /// Ideal codeword embedding of a `k`-qubit state (ancillas and flag in `|0⟩`).
    pub fn encode_state<T: Real>(&self, logical: &State<T>) -> Result<State<T>> {
        if logical.n_qubits() != self.k {
            return Err(Error::DimensionMismatch(
                "logical state size differs from k".into(),
            ));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1usize << self.n_physical];
        let r = T::one() / T::lit(2.0).sqrt();
        for (x, a) in logical.amplitudes().iter().enumerate() {
            for b in self.codeword_indices(x) {
                amps[b] = amps[b] + *a * r;
            }
        }
        Ok(State::from_amplitudes_unchecked(self.n_physical, amps))
    }

    /// Logical amplitudes `⟨x̄|Φ⟩`; unnormalized when `Φ` leaves the code space.
    pub fn decode_state<T: Real>(&self, physical: &State<T>) -> Result<State<T>> {
        if physical.n_qubits() != self.n_physical {
            return Err(Error::DimensionMismatch(
                "physical state size differs from the layout".into(),
            ));
        }
        let r = T::one() / T::lit(2.0).sqrt();
        let a = physical.amplitudes();
        let amps = (0..1usize << self.k)
            .map(|x| {
                self.codeword_indices(x)
                    .into_iter()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, b| acc + a[b] * r)
            })
            .collect();
        Ok(State::from_amplitudes_unchecked(self.k, amps))
    }

    /// Physical basis indices of the two branches of `|x⟩_L`.
    fn codeword_indices(&self, x: usize) -> [usize; 2] {
        let f = x.count_ones() as usize % 2;
        let mut first = f << self.qx;
        let mut second = (1 << self.qz) | ((1 - f) << self.qx);
        for (i, &d) in self.data.iter().enumerate() {
            let bit = (x >> i) & 1;
            first |= bit << d;
            second |= (1 - bit) << d;
        }
        [first, second]
    }
}
