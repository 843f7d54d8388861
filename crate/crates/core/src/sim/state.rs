//! Dense statevector and its kernels.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operator::{i_pow, PauliString};
use crate::scalar::Real;

/// Amplitudes over `n` qubits; basis index bit `q` is qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct State<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

/// Control condition on basis indices: `(index & mask) == value`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ControlMask {
    pub mask: u64,
    pub value: u64,
}

impl ControlMask {
    pub fn from_controls(controls: &[(usize, bool)]) -> Self {
        let mut m = Self::default();
        for &(q, on) in controls {
            m.mask |= 1 << q;
            if on {
                m.value |= 1 << q;
            }
        }
        m
    }

    #[inline]
    fn admits(&self, i: usize) -> bool {
        (i as u64 & self.mask) == self.value
    }
}

impl<T: Real> State<T> {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0).expect("zero index")
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis state",
                index,
                limit: dim,
            });
        }
        let mut amps = vec![Complex::zero(); dim];
        amps[index] = Complex::one();
        Ok(Self { n, amps })
    }

    /// Validated constructor: length `2^n` and unit norm within `1e−10`.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        let s = Self::from_amplitudes_unchecked(n, amps);
        let nrm = s.norm();
        if (nrm - T::one()).abs() > T::lit(1e-10) {
            return Err(Error::InvalidArgument(format!("state norm {nrm} is not 1")));
        }
        Ok(s)
    }

    /// Constructor that only checks the length.
    pub fn from_amplitudes_unchecked(n: usize, amps: Vec<Complex<T>>) -> Self {
        assert_eq!(amps.len(), 1usize << n, "amplitude count must be 2^n");
        Self { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let nrm = self.norm();
        if nrm > T::zero() {
            for a in &mut self.amps {
                *a = *a / nrm;
            }
        }
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.n, other.n, "register mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    /// `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal distribution of `qubits`; outcome bit `j` is `qubits[j]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<T>> {
        if qubits.is_empty() {
            return Err(Error::InvalidArgument(
                "marginal over an empty subset".into(),
            ));
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let mut out = vec![T::zero(); 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut k = 0;
            for (j, &q) in qubits.iter().enumerate() {
                k |= (i >> q & 1) << j;
            }
            out[k] = out[k] + a.norm_sqr();
        }
        Ok(out)
    }

    /// `self ⊗ low`: `low` occupies the low-order qubits.
    pub fn tensor(&self, low: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * low.dim());
        for a in &self.amps {
            for b in &low.amps {
                amps.push(*a * *b);
            }
        }
        Self {
            n: self.n + low.n,
            amps,
        }
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::IndexOutOfRange {
                what: "qubit",
                index: q,
                limit: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Probability that qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> T {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> q & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects qubit `q` onto `outcome`, which has probability `p`, and renormalizes.
    pub fn collapse(&mut self, q: usize, outcome: bool, p: T) {
        let scale = if p > T::zero() {
            T::one() / p.sqrt()
        } else {
            T::zero()
        };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> q & 1 == 1) == outcome {
                *a = *a * scale;
            } else {
                *a = Complex::zero();
            }
        }
    }

    /// Flips qubit `q`.
    pub fn flip(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    /// Applies a Pauli string.
    pub fn apply_pauli(&mut self, p: &PauliString) {
        assert_eq!(p.n_qubits(), self.n, "register mismatch");
        let mut out = vec![Complex::zero(); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let (k, b2) = p.apply_basis(b as u64);
            out[b2 as usize] = *a * i_pow::<T>(k);
        }
        self.amps = out;
    }

    /// Single-qubit matrix `[m00, m01, m10, m11]` on `q` under `ctrl`.
    pub fn apply_1q(&mut self, q: usize, m: &[Complex<T>; 4], ctrl: ControlMask) {
        let bit = 1usize << q;
        let diag = m[1].is_zero() && m[2].is_zero();
        for i in 0..self.amps.len() {
            if i & bit != 0 || !ctrl.admits(i) {
                continue;
            }
            let j = i | bit;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            if diag {
                self.amps[i] = m[0] * a0;
                self.amps[j] = m[3] * a1;
            } else {
                self.amps[i] = m[0] * a0 + m[1] * a1;
                self.amps[j] = m[2] * a0 + m[3] * a1;
            }
        }
    }

    /// Controlled-X with a single control.
    pub fn apply_cx(&mut self, c: usize, t: usize, ctrl: ControlMask) {
        let (cb, tb) = (1usize << c, 1usize << t);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 && ctrl.admits(i) {
                self.amps.swap(i, i | tb);
            }
        }
    }

    /// Diagonal phases indexed by the target bits.
    pub fn apply_diagonal(&mut self, targets: &[usize], diag: &[Complex<T>], ctrl: ControlMask) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if !ctrl.admits(i) {
                continue;
            }
            let mut k = 0;
            for (j, &q) in targets.iter().enumerate() {
                k |= (i >> q & 1) << j;
            }
            *a = *a * diag[k];
        }
    }

    /// General `2^k × 2^k` row-major matrix; matrix index bit `j` is `targets[j]`.
    pub fn apply_matrix(&mut self, targets: &[usize], m: &[Complex<T>], ctrl: ControlMask) {
        let k = targets.len();
        let d = 1usize << k;
        debug_assert_eq!(m.len(), d * d);
        let tmask: usize = targets.iter().map(|&q| 1usize << q).sum();
        let offsets: Vec<usize> = (0..d)
            .map(|s| {
                targets
                    .iter()
                    .enumerate()
                    .map(|(j, &q)| (s >> j & 1) << q)
                    .sum()
            })
            .collect();
        let mut buf = vec![Complex::zero(); d];
        for i in 0..self.amps.len() {
            if i & tmask != 0 || !ctrl.admits(i) {
                continue;
            }
            for (s, o) in offsets.iter().enumerate() {
                buf[s] = self.amps[i | o];
            }
            for (r, o) in offsets.iter().enumerate() {
                let row = &m[r * d..(r + 1) * d];
                self.amps[i | o] = row
                    .iter()
                    .zip(&buf)
                    .fold(Complex::zero(), |acc, (x, y)| acc + *x * *y);
            }
        }
    }

    /// Multiplies amplitudes admitted by `ctrl` by `phase`.
    pub fn apply_phase(&mut self, phase: Complex<T>, ctrl: ControlMask) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ctrl.admits(i) {
                *a = *a * phase;
            }
        }
    }
}
