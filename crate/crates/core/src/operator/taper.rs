//! Z2 qubit tapering.
//!
//! A Clifford `V` is built gate by gate so that `V S V† = ±X_t` for a Pauli symmetry `S`.
//! With `U = V†` the transformed operator is `U† H U = V H V†`, which acts as `I` or `X` on
//! the target and can be restricted to an `X_t` eigensector.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operator::pauli::{Pauli, PauliString, PauliSum};
use crate::scalar::Real;
use crate::sim::{Circuit, State};

/// Eigensector of a ±1-valued symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Plus,
    Minus,
}

impl Sector {
    pub const BOTH: [Sector; 2] = [Sector::Plus, Sector::Minus];

    pub fn value(self) -> i8 {
        match self {
            Sector::Plus => 1,
            Sector::Minus => -1,
        }
    }

    fn from_value(v: i8) -> Self {
        if v > 0 {
            Sector::Plus
        } else {
            Sector::Minus
        }
    }
}

/// Symmetry string, the qubit it is rotated onto, and the sector kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrySpec {
    pub symmetry: PauliString,
    pub target: usize,
    pub sector: Sector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Cx(usize, usize),
}

impl CliffordGate {
    /// `G P G†` on a signed string.
    fn conjugate(self, neg: &mut bool, p: &mut PauliString) {
        let bit = |m: u64, q: usize| m >> q & 1 == 1;
        let (mut x, mut z) = (p.x_mask(), p.z_mask());
        match self {
            CliffordGate::H(q) => {
                let (xq, zq) = (bit(x, q), bit(z, q));
                *neg ^= xq && zq;
                x = (x & !(1 << q)) | ((zq as u64) << q);
                z = (z & !(1 << q)) | ((xq as u64) << q);
            }
            CliffordGate::S(q) => {
                let (xq, zq) = (bit(x, q), bit(z, q));
                *neg ^= xq && zq;
                z ^= (xq as u64) << q;
            }
            CliffordGate::Cx(c, t) => {
                let (xc, zc, xt, zt) = (bit(x, c), bit(z, c), bit(x, t), bit(z, t));
                *neg ^= xc && zt && !(xt ^ zc);
                x ^= (xc as u64) << t;
                z ^= (zt as u64) << c;
            }
        }
        *p = PauliString::from_masks(p.n_qubits(), x, z).expect("same register");
    }
}

/// Clifford `V` with `V S V† = (−1)^neg X_target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordFrame {
    n: usize,
    target: usize,
    gates: Vec<CliffordGate>,
    negative: bool,
}

impl CliffordFrame {
    pub fn new(symmetry: &PauliString, target: usize) -> Result<Self> {
        let n = symmetry.n_qubits();
        if symmetry.is_identity() {
            return Err(Error::Symmetry("symmetry is the identity".into()));
        }
        if target >= n {
            return Err(Error::IndexOutOfRange {
                what: "target qubit",
                index: target,
                limit: n,
            });
        }
        if symmetry.get(target) == Pauli::I {
            return Err(Error::Symmetry(format!(
                "symmetry acts trivially on target qubit {target}"
            )));
        }
        let mut gates = Vec::new();
        for q in symmetry.support() {
            match symmetry.get(q) {
                Pauli::X => gates.push(CliffordGate::H(q)),
                Pauli::Y => {
                    gates.push(CliffordGate::S(q));
                    gates.push(CliffordGate::H(q));
                }
                _ => {}
            }
        }
        for q in symmetry.support() {
            if q != target {
                gates.push(CliffordGate::Cx(q, target));
            }
        }
        gates.push(CliffordGate::H(target));
        let mut frame = Self {
            n,
            target,
            gates,
            negative: false,
        };
        let (neg, img) = frame.conjugate_string(symmetry);
        debug_assert_eq!(img, PauliString::single(n, target, Pauli::X).unwrap());
        frame.negative = neg;
        Ok(frame)
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    /// Sign of the symmetry image on the target.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    /// `X_t` eigenvalue that represents symmetry sector `s`.
    pub fn x_eigenvalue(&self, s: Sector) -> i8 {
        s.value() * self.sign()
    }

    /// `V P V†` as `(negated, string)`.
    pub fn conjugate_string(&self, p: &PauliString) -> (bool, PauliString) {
        let mut neg = false;
        let mut out = p.clone();
        for g in &self.gates {
            g.conjugate(&mut neg, &mut out);
        }
        (neg, out)
    }

    /// `V A V†` for a Pauli sum.
    pub fn conjugate<T: Real>(&self, op: &PauliSum<T>) -> PauliSum<T> {
        let terms = op.terms().map(|(p, c)| {
            let (neg, q) = self.conjugate_string(p);
            (if neg { -*c } else { *c }, q)
        });
        PauliSum::from_terms(self.n, terms).expect("same register")
    }

    /// Circuit implementing `V`.
    pub fn circuit<T: Real>(&self) -> Circuit<T> {
        let mut c = Circuit::new(self.n, 0);
        for g in &self.gates {
            match *g {
                CliffordGate::H(q) => c.h(q),
                CliffordGate::S(q) => c.s(q),
                CliffordGate::Cx(a, b) => c.cx(a, b),
            };
        }
        c
    }

    /// Maps a state of symmetry sector `s` to the reduced register: `⟨λ|_t V|ψ⟩`.
    pub fn reduce_state<T: Real>(&self, psi: &State<T>, s: Sector) -> Result<State<T>> {
        let mut w = psi.clone();
        self.circuit::<T>().apply_unitary(&mut w)?;
        let lam = self.x_eigenvalue(s);
        let half = T::FRAC_1_SQRT_2();
        let t = self.target;
        let amps: Vec<Complex<T>> = (0..1usize << (self.n - 1))
            .map(|r| {
                let lo = r & ((1 << t) - 1);
                let b0 = lo | ((r >> t) << (t + 1));
                let b1 = b0 | (1 << t);
                let a1 = if lam > 0 {
                    w.amplitudes()[b1]
                } else {
                    -w.amplitudes()[b1]
                };
                (w.amplitudes()[b0] + a1) * half
            })
            .collect();
        let red = State::from_amplitudes_unchecked(self.n - 1, amps);
        let nrm = red.norm();
        if (nrm - T::one()).abs() > T::lit(1e-8) {
            return Err(Error::Symmetry(format!(
                "state is not in sector {s:?} (weight {nrm})"
            )));
        }
        Ok(red)
    }

    /// Inverse of [`reduce_state`](Self::reduce_state): `V† (φ ⊗ |λ⟩_t)`.
    pub fn expand_state<T: Real>(&self, phi: &State<T>, s: Sector) -> Result<State<T>> {
        let lam = self.x_eigenvalue(s);
        let half = T::FRAC_1_SQRT_2();
        let t = self.target;
        let mut amps = vec![Complex::zero(); 1 << self.n];
        for (r, &a) in phi.amplitudes().iter().enumerate() {
            let lo = r & ((1 << t) - 1);
            let b0 = lo | ((r >> t) << (t + 1));
            amps[b0] = a * half;
            amps[b0 | (1 << t)] = if lam > 0 { a * half } else { -a * half };
        }
        let mut w = State::from_amplitudes_unchecked(self.n, amps);
        self.circuit::<T>().inverse()?.apply_unitary(&mut w)?;
        Ok(w)
    }
}

fn check_commutes<T: Real>(op: &PauliSum<T>, s: &PauliString) -> Result<()> {
    if op.n_qubits() != s.n_qubits() {
        return Err(Error::DimensionMismatch(
            "operator and symmetry registers differ".into(),
        ));
    }
    if op.terms().all(|(p, _)| p.commutes_with(s)) {
        Ok(())
    } else {
        Err(Error::NonCommuting)
    }
}

/// Sector operator on `n − 1` qubits.
pub fn z2_taper<T: Real>(op: &PauliSum<T>, spec: &SymmetrySpec) -> Result<PauliSum<T>> {
    let frame = CliffordFrame::new(&spec.symmetry, spec.target)?;
    check_commutes(op, &spec.symmetry)?;
    let lam = frame.x_eigenvalue(spec.sector);
    let t = spec.target;
    let mut terms = Vec::with_capacity(op.len());
    for (p, c) in frame.conjugate(op).terms() {
        let c = match p.get(t) {
            Pauli::I => *c,
            Pauli::X if lam > 0 => *c,
            Pauli::X => -*c,
            _ => unreachable!("commuting term maps to I or X on the target"),
        };
        terms.push((c, p.remove_qubit(t)));
    }
    PauliSum::from_terms(op.n_qubits() - 1, terms)
}

/// `⟨λ_p| P |λ_q⟩` for the `X` eigenbasis.
fn x_basis_element<T: Real>(p: Pauli, lp: i8, lq: i8) -> Complex<T> {
    let one = Complex::<T>::one();
    match p {
        Pauli::I if lp == lq => one,
        Pauli::X if lp == lq => one.scale(T::lit(lq as f64)),
        Pauli::Z if lp != lq => one,
        Pauli::Y if lp != lq => Complex::new(T::zero(), T::lit(lq as f64)),
        _ => Complex::zero(),
    }
}

/// Blocks `μ_pq` with `V μ V† = Σ_pq μ_pq ⊗ |λ_p⟩⟨λ_q|` keyed by symmetry sectors.
pub fn split_dipole_by_sector<T: Real>(
    mu: &PauliSum<T>,
    spec: &SymmetrySpec,
) -> Result<BTreeMap<(Sector, Sector), PauliSum<T>>> {
    let frame = CliffordFrame::new(&spec.symmetry, spec.target)?;
    if mu.n_qubits() != spec.symmetry.n_qubits() {
        return Err(Error::DimensionMismatch(
            "dipole and symmetry registers differ".into(),
        ));
    }
    let t = spec.target;
    let rotated = frame.conjugate(mu);
    let mut out = BTreeMap::new();
    for sp in Sector::BOTH {
        for sq in Sector::BOTH {
            let (lp, lq) = (frame.x_eigenvalue(sp), frame.x_eigenvalue(sq));
            let terms = rotated.terms().map(|(p, c)| {
                (
                    *c * x_basis_element::<T>(p.get(t), lp, lq),
                    p.remove_qubit(t),
                )
            });
            out.insert((sp, sq), PauliSum::from_terms(mu.n_qubits() - 1, terms)?);
        }
    }
    Ok(out)
}

/// Symmetry sector of a string value.
pub fn sector_of(value: i8) -> Sector {
    Sector::from_value(value)
}
