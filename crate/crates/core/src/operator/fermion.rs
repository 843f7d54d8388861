//! Fermionic ladder operators, Hamiltonian assembly and the Jordan-Wigner mapping.

use num_complex::Complex;
use num_traits::One;

use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::operator::pauli::{Pauli, PauliString, PauliSum};
use crate::operator::tensor::Tensor;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Alpha,
    Beta,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Alpha, Spin::Beta];

    fn index(self) -> usize {
        match self {
            Spin::Alpha => 0,
            Spin::Beta => 1,
        }
    }
}

/// Placement of spin-orbitals on qubits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpinOrdering {
    /// All α modes first (`q = p`), then all β modes (`q = p + n`).
    #[default]
    Blocked,
    /// `q = 2p + σ`.
    Interleaved,
}

impl SpinOrdering {
    pub fn qubit(self, mode: usize, spin: Spin, n_modes: usize) -> usize {
        match self {
            SpinOrdering::Blocked => mode + spin.index() * n_modes,
            SpinOrdering::Interleaved => 2 * mode + spin.index(),
        }
    }
}

/// `a†` (dagger) or `a` on spin-orbital `(mode, spin)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ladder {
    pub mode: usize,
    pub spin: Spin,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize, spin: Spin) -> Self {
        Self {
            mode,
            spin,
            dagger: true,
        }
    }

    pub fn annihilate(mode: usize, spin: Spin) -> Self {
        Self {
            mode,
            spin,
            dagger: false,
        }
    }
}

/// Sum of coefficient-weighted products of ladder operators, applied right to left.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOp<T> {
    n_modes: usize,
    terms: Vec<(Complex<T>, Vec<Ladder>)>,
}

impl<T: Real> FermionOp<T> {
    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: Vec::new(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[(Complex<T>, Vec<Ladder>)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Appends `c · ops[0] ops[1] …`.
    pub fn push(&mut self, c: Complex<T>, ops: Vec<Ladder>) -> Result<()> {
        if let Some(l) = ops.iter().find(|l| l.mode >= self.n_modes) {
            return Err(Error::IndexOutOfRange {
                what: "mode",
                index: l.mode,
                limit: self.n_modes,
            });
        }
        if c.norm() >= T::prune_tol() {
            self.terms.push((c, ops));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch("mode counts differ".into()));
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }
}

/// JW image of one ladder operator.
fn ladder_to_pauli<T: Real>(l: Ladder, n_modes: usize, ordering: SpinOrdering) -> PauliSum<T> {
    let n = 2 * n_modes;
    let q = ordering.qubit(l.mode, l.spin, n_modes);
    let mut zs = PauliString::identity(n);
    for j in 0..q {
        zs.set(j, Pauli::Z).expect("in range");
    }
    let mut xs = zs.clone();
    xs.set(q, Pauli::X).expect("in range");
    let mut ys = zs;
    ys.set(q, Pauli::Y).expect("in range");
    let half = T::lit(0.5);
    // a = (X + iY)/2 and a† = (X − iY)/2 with |1⟩ occupied.
    let yc = if l.dagger {
        Complex::new(T::zero(), -half)
    } else {
        Complex::new(T::zero(), half)
    };
    PauliSum::from_terms(n, [(Complex::new(half, T::zero()), xs), (yc, ys)]).expect("register")
}

/// Jordan-Wigner image on `2·n_modes` qubits.
pub fn jordan_wigner<T: Real>(
    op: &FermionOp<T>,
    n_modes: usize,
    ordering: SpinOrdering,
) -> Result<PauliSum<T>> {
    if op.n_modes > n_modes {
        return Err(Error::IndexOutOfRange {
            what: "mode count",
            index: op.n_modes,
            limit: n_modes,
        });
    }
    let n = 2 * n_modes;
    let mut acc = PauliSum::zero(n);
    for (c, ops) in &op.terms {
        let mut prod = PauliSum::constant(n, *c);
        for l in ops {
            if l.mode >= n_modes {
                return Err(Error::IndexOutOfRange {
                    what: "mode",
                    index: l.mode,
                    limit: n_modes,
                });
            }
            prod = &prod * &ladder_to_pauli(*l, n_modes, ordering);
        }
        acc = &acc + &prod;
    }
    Ok(acc)
}

/// Majorana operator `γ_{p,σ,0} = a + a†` (`x = 0`) or `γ_{p,σ,1} = −i(a − a†)` (`x = 1`).
pub fn majorana_pauli<T: Real>(
    mode: usize,
    spin: Spin,
    x: u8,
    n_modes: usize,
    ordering: SpinOrdering,
) -> PauliString {
    let q = ordering.qubit(mode, spin, n_modes);
    let mut s = PauliString::identity(2 * n_modes);
    for j in 0..q {
        s.set(j, Pauli::Z).expect("in range");
    }
    s.set(q, if x == 0 { Pauli::X } else { Pauli::Y })
        .expect("in range");
    s
}

/// `Σ t_ij a†_{iσ} a_{jσ} + ½ Σ (ij|kl) a†_{iσ} a†_{kτ} a_{lτ} a_{jσ}` (chemist notation).
pub fn assemble_spin_free<T: Real>(t: &Tensor<T>, eri: &Tensor<T>) -> Result<FermionOp<T>> {
    if t.rank() != 2 || t.dims()[0] != t.dims()[1] {
        return Err(Error::DimensionMismatch(
            "one-body tensor must be square".into(),
        ));
    }
    let n = t.dims()[0];
    if eri.rank() != 4 || eri.dims().iter().any(|&d| d != n) {
        return Err(Error::DimensionMismatch(format!(
            "two-body tensor must be {n}^4"
        )));
    }
    let tol = T::lit(1e-10);
    for i in 0..n {
        for j in 0..n {
            if (t.get(&[i, j]) - t.get(&[j, i])).abs() > tol {
                return Err(Error::Symmetry(format!("t[{i},{j}] != t[{j},{i}]")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = eri.get(&[i, j, k, l]);
                    for perm in [
                        [j, i, k, l],
                        [i, j, l, k],
                        [j, i, l, k],
                        [k, l, i, j],
                        [l, k, i, j],
                        [k, l, j, i],
                        [l, k, j, i],
                    ] {
                        if (eri.get(&perm) - v).abs() > tol {
                            return Err(Error::Symmetry(format!(
                                "(ij|kl) symmetry broken at ({i}{j}|{k}{l})"
                            )));
                        }
                    }
                }
            }
        }
    }
    let mut op = FermionOp::zero(n);
    for s in Spin::BOTH {
        for i in 0..n {
            for j in 0..n {
                let c = t.get(&[i, j]);
                op.push(
                    Complex::new(c, T::zero()),
                    vec![Ladder::create(i, s), Ladder::annihilate(j, s)],
                )?;
            }
        }
    }
    let half = T::lit(0.5);
    for s in Spin::BOTH {
        for u in Spin::BOTH {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let v = eri.get(&[i, j, k, l]) * half;
                            op.push(
                                Complex::new(v, T::zero()),
                                vec![
                                    Ladder::create(i, s),
                                    Ladder::create(k, u),
                                    Ladder::annihilate(l, u),
                                    Ladder::annihilate(j, s),
                                ],
                            )?;
                        }
                    }
                }
            }
        }
    }
    Ok(op)
}

/// Cartesian component of the triplet operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cartesian {
    X,
    Y,
    Z,
}

/// `Σ_c Σ_pq h^c_pq T^c_pq` with
/// `T^X = ½(a†_α a_β + a†_β a_α)`, `T^Y = (1/2i)(a†_α a_β − a†_β a_α)`,
/// `T^Z = ½(a†_α a_α − a†_β a_β)`.
pub fn assemble_mfso<T: Real>(h: &[CMatrix<T>; 3]) -> Result<FermionOp<T>> {
    let n = h[0].rows();
    if h.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::DimensionMismatch(
            "triplet components must be equal square matrices".into(),
        ));
    }
    let half = T::lit(0.5);
    let mut op = FermionOp::zero(n);
    let (a, b) = (Spin::Alpha, Spin::Beta);
    for p in 0..n {
        for q in 0..n {
            let hx = h[0][(p, q)] * half;
            op.push(hx, vec![Ladder::create(p, a), Ladder::annihilate(q, b)])?;
            op.push(hx, vec![Ladder::create(p, b), Ladder::annihilate(q, a)])?;
            // 1/(2i) = −i/2
            let hy = h[1][(p, q)] * Complex::new(T::zero(), -half);
            op.push(hy, vec![Ladder::create(p, a), Ladder::annihilate(q, b)])?;
            op.push(-hy, vec![Ladder::create(p, b), Ladder::annihilate(q, a)])?;
            let hz = h[2][(p, q)] * half;
            op.push(hz, vec![Ladder::create(p, a), Ladder::annihilate(q, a)])?;
            op.push(-hz, vec![Ladder::create(p, b), Ladder::annihilate(q, b)])?;
        }
    }
    Ok(op)
}

/// JW image of [`assemble_mfso`] checked for Hermiticity.
pub fn mfso_qubit_operator<T: Real>(
    h: &[CMatrix<T>; 3],
    ordering: SpinOrdering,
) -> Result<PauliSum<T>> {
    let op = assemble_mfso(h)?;
    let q = jordan_wigner(&op, h[0].rows(), ordering)?;
    let d = q.hermiticity_defect();
    if d > T::lit(1e-10) {
        return Err(Error::NotHermitian(d.to_f64_lossy()));
    }
    Ok(q)
}

/// Mean-field one-body SOC integrals for one Cartesian component:
/// `h_pq = t_pq + Σ_rs D_rs (v_pqrs − 3/2 (v_pssr + v_rqps))`.
pub fn mean_field_soc<T: Real>(
    t_so: &Tensor<Complex<T>>,
    v_so: &Tensor<Complex<T>>,
    density: &Tensor<T>,
) -> Result<CMatrix<T>> {
    if t_so.rank() != 2 || density.rank() != 2 || v_so.rank() != 4 {
        return Err(invalid("expected rank-2 t, rank-4 v and rank-2 density"));
    }
    let n = t_so.dims()[0];
    if t_so.dims() != [n, n] || density.dims() != [n, n] || v_so.dims() != [n, n, n, n] {
        return Err(Error::DimensionMismatch(
            "SOC tensors must share the orbital dimension".into(),
        ));
    }
    let f = T::lit(1.5);
    let mut h = CMatrix::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            let mut acc = t_so.get(&[p, q]);
            for r in 0..n {
                for s in 0..n {
                    let d = density.get(&[r, s]);
                    if d.is_zero() {
                        continue;
                    }
                    let v = v_so.get(&[p, q, r, s])
                        - (v_so.get(&[p, s, s, r]) + v_so.get(&[r, q, p, s])) * f;
                    acc = acc + v * d;
                }
            }
            h[(p, q)] = acc;
        }
    }
    Ok(h)
}

/// One-body operator `Σ_σ Σ_pq m_pq a†_{pσ} a_{qσ}` for a real matrix.
pub fn one_body<T: Real>(n_modes: usize, m: &[T]) -> Result<FermionOp<T>> {
    if m.len() != n_modes * n_modes {
        return Err(Error::DimensionMismatch("one-body matrix size".into()));
    }
    let mut op = FermionOp::zero(n_modes);
    for s in Spin::BOTH {
        for p in 0..n_modes {
            for q in 0..n_modes {
                let v = m[p * n_modes + q];
                op.push(
                    Complex::new(v, T::zero()),
                    vec![Ladder::create(p, s), Ladder::annihilate(q, s)],
                )?;
            }
        }
    }
    Ok(op)
}

/// `1·I` convenience for callers that need a fermionic identity.
pub fn fermion_identity<T: Real>(n_modes: usize) -> FermionOp<T> {
    let mut op = FermionOp::zero(n_modes);
    op.terms.push((Complex::one(), Vec::new()));
    op
}
