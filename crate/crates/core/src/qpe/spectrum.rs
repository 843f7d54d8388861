//! Eigen-decomposed excitation spectra and the analytic outcome law `P_k`.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::operator::{PauliString, PauliSum, DENSE_LIMIT};
use crate::qpe::QpeConfig;
use crate::scalar::Real;
use crate::sim::State;

/// Energies `E_j` (ascending) with overlap weights `|c_j^ν|²` per polarization `ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSpectrum<T> {
    energies: Vec<T>,
    /// `weights[ν][j]`.
    weights: Vec<Vec<T>>,
}

impl<T: Real> EigenSpectrum<T> {
    /// Validates ascending energies, nonnegative weights and unit mass per polarization.
    pub fn new(energies: Vec<T>, weights: Vec<Vec<T>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one polarization is required".into(),
            ));
        }
        if energies.is_empty() {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        }
        if energies.windows(2).any(|w| w[1] < w[0]) || energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument(
                "energies must be finite and ascending".into(),
            ));
        }
        for (nu, w) in weights.iter().enumerate() {
            if w.len() != energies.len() {
                return Err(Error::DimensionMismatch(format!(
                    "polarization {nu} has {} weights",
                    w.len()
                )));
            }
            if w.iter().any(|x| !(*x >= T::zero())) {
                return Err(Error::InvalidArgument(format!(
                    "negative weight in polarization {nu}"
                )));
            }
            let s: T = w.iter().copied().sum();
            if (s - T::one()).abs() > T::lit(1e-10) {
                return Err(Error::InvalidArgument(format!(
                    "polarization {nu} weights sum to {s}"
                )));
            }
        }
        Ok(Self { energies, weights })
    }

    /// Single-polarization spectrum.
    pub fn single(energies: Vec<T>, weights: Vec<T>) -> Result<Self> {
        Self::new(energies, vec![weights])
    }

    /// Exact diagonalization of `h` with overlaps of each normalized input state.
    pub fn from_hamiltonian(h: &PauliSum<T>, inputs: &[State<T>]) -> Result<Self> {
        let d = h.hermiticity_defect();
        if d > T::lit(1e-10) {
            return Err(Error::NotHermitian(d.to_f64_lossy()));
        }
        let (vals, vecs) = h.to_matrix()?.eigh()?;
        let dim = vals.len();
        let mut weights = Vec::with_capacity(inputs.len());
        for psi in inputs {
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch(
                    "input state and Hamiltonian registers differ".into(),
                ));
            }
            let a = psi.amplitudes();
            let mut w: Vec<T> = (0..dim)
                .map(|j| {
                    (0..dim)
                        .fold(Complex::new(T::zero(), T::zero()), |acc, r| {
                            acc + vecs[(r, j)].conj() * a[r]
                        })
                        .norm_sqr()
                })
                .collect();
            let s: T = w.iter().copied().sum();
            for x in &mut w {
                *x = *x / s;
            }
            weights.push(w);
        }
        Self::new(vals, weights)
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn weights(&self) -> &[Vec<T>] {
        &self.weights
    }

    pub fn n_polarizations(&self) -> usize {
        self.weights.len()
    }

    /// Diagonal Hamiltonian carrying `E_j` on basis state `j` (padded entries at zero energy)
    /// and the input `Σ_j √w_j^ν |j⟩`, both on `⌈log₂ J⌉` qubits (at least one).
    pub fn diagonal_instance(&self, nu: usize) -> Result<(PauliSum<T>, State<T>)> {
        let w = self.weights.get(nu).ok_or(Error::IndexOutOfRange {
            what: "polarization",
            index: nu,
            limit: self.weights.len(),
        })?;
        let mut n = 1;
        while (1usize << n) < self.energies.len() {
            n += 1;
        }
        if n > DENSE_LIMIT {
            return Err(Error::DenseLimit {
                n,
                limit: DENSE_LIMIT,
            });
        }
        let dim = 1usize << n;
        let mut e = self.energies.clone();
        e.resize(dim, T::zero());
        let scale = T::one() / T::from_count(dim);
        let mut terms = Vec::new();
        for zmask in 0..dim {
            let c: T = (0..dim)
                .map(|b| {
                    if (b & zmask).count_ones() % 2 == 0 {
                        e[b]
                    } else {
                        -e[b]
                    }
                })
                .sum::<T>()
                * scale;
            if c.abs() > T::lit(1e-15) {
                terms.push((
                    Complex::new(c, T::zero()),
                    PauliString::from_masks(n, 0, zmask as u64)?,
                ));
            }
        }
        let mut amps: Vec<Complex<T>> = w
            .iter()
            .map(|&x| Complex::new(x.sqrt(), T::zero()))
            .collect();
        amps.resize(dim, Complex::new(T::zero(), T::zero()));
        Ok((
            PauliSum::from_terms(n, terms)?,
            State::from_amplitudes(n, amps)?,
        ))
    }

    /// Spectrum with every energy shifted by `delta`.
    pub fn shifted(&self, delta: T) -> Self {
        Self {
            energies: self.energies.iter().map(|e| *e + delta).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Lines `E_j  w_1 … w_m`; `#` comments and blank lines skipped. Each weight column is
    /// normalized to unit mass.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows: Vec<(T, Vec<T>)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if vals.len() < 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "expected an energy and at least one weight".into(),
                });
            }
            if let Some((_, w)) = rows.first() {
                if w.len() != vals.len() - 1 {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "inconsistent column count".into(),
                    });
                }
            }
            rows.push((
                T::lit(vals[0]),
                vals[1..].iter().map(|&v| T::lit(v)).collect(),
            ));
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "no spectrum lines".into(),
            });
        }
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let m = rows[0].1.len();
        let energies = rows.iter().map(|r| r.0).collect();
        let mut weights = Vec::with_capacity(m);
        for nu in 0..m {
            let col: Vec<T> = rows.iter().map(|r| r.1[nu]).collect();
            let s: T = col.iter().copied().sum();
            if !(s > T::zero()) {
                return Err(Error::InvalidArgument(format!(
                    "weight column {} has no mass",
                    nu + 1
                )));
            }
            weights.push(col.into_iter().map(|w| w / s).collect());
        }
        Self::new(energies, weights)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (j, e) in self.energies.iter().enumerate() {
            let _ = write!(s, "{e:e}");
            for w in &self.weights {
                let _ = write!(s, " {:e}", w[j]);
            }
            s.push('\n');
        }
        s
    }
}

/// `P_k = Σ_j |c_j^ν|² |α(t₀(E_j − e_ref − ω_min) − k)|²` for one polarization.
pub fn analytic_pk_polarization<T: Real>(
    spec: &EigenSpectrum<T>,
    cfg: &QpeConfig<T>,
    nu: usize,
) -> Result<Vec<T>> {
    cfg.validate()?;
    let w = spec.weights.get(nu).ok_or(Error::IndexOutOfRange {
        what: "polarization",
        index: nu,
        limit: spec.weights.len(),
    })?;
    let n = cfg.n_bins();
    let mut p = vec![T::zero(); n];
    for (e, &wj) in spec.energies.iter().zip(w) {
        if wj.is_zero() {
            continue;
        }
        let x0 = cfg.phase_coordinate(*e);
        for (k, pk) in p.iter_mut().enumerate() {
            *pk = *pk + wj * cfg.kernel_sq(x0 - T::from_count(k));
        }
    }
    Ok(p)
}

/// Polarization-averaged `P_k`.
pub fn analytic_pk<T: Real>(spec: &EigenSpectrum<T>, cfg: &QpeConfig<T>) -> Result<Vec<T>> {
    let m = spec.n_polarizations();
    let mut acc = vec![T::zero(); cfg.n_bins()];
    for nu in 0..m {
        for (a, p) in acc.iter_mut().zip(analytic_pk_polarization(spec, cfg, nu)?) {
            *a = *a + p;
        }
    }
    let scale = T::one() / T::from_count(m);
    Ok(acc.into_iter().map(|a| a * scale).collect())
}
