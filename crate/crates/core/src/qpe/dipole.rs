//! Dipole-excited input states: Majorana rotation circuits and the LCU construction.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::operator::{
    majorana_pauli, paired_core, MajoranaDipoleForm, Pauli, PauliString, PauliSum, Spin,
    SpinOrdering,
};
use crate::scalar::Real;
use crate::sim::{amplitude_encode, Circuit, Gate, GateOp, State};

/// Rotation angles `θ_p`, `p = 0..n−1`, of the chain `Π_p exp(θ_p γ_p γ_{p+1})` that maps
/// `γ_0` onto `γ_u = Σ_p u_p γ_p` under conjugation.
pub fn givens_angles<T: Real>(u: &[T]) -> Result<Vec<T>> {
    let norm = u.iter().map(|x| *x * *x).sum::<T>().sqrt();
    if u.is_empty() || norm < T::lit(1e-12) {
        return Err(Error::InvalidArgument(
            "rotation target must be a nonzero vector".into(),
        ));
    }
    if (norm - T::one()).abs() > T::lit(1e-8) {
        return Err(Error::InvalidArgument(format!(
            "rotation target has norm {norm}, expected 1"
        )));
    }
    let n = u.len();
    let mut angles = Vec::with_capacity(n.saturating_sub(1));
    for p in 0..n.saturating_sub(1) {
        let phi = if p + 2 == n {
            u[n - 1].atan2(u[n - 2])
        } else {
            let tail = u[p + 1..].iter().map(|x| *x * *x).sum::<T>().sqrt();
            tail.atan2(u[p])
        };
        angles.push(phi * T::lit(0.5));
    }
    Ok(angles)
}

/// `exp(θ γ_a γ_b)` as a Pauli rotation on the support of `γ_a γ_b = ±i P`.
fn majorana_pair_rotation<T: Real>(a: &PauliString, b: &PauliString, theta: T) -> GateOp<T> {
    let (k, p) = a.mul_phase(b);
    // γ_a γ_b is anti-Hermitian, so k is odd and exp(θ γ_a γ_b) = exp(±iθP) = R_P(∓2θ).
    let sign = if k % 4 == 1 { T::one() } else { -T::one() };
    let support = p.support();
    let factors = support.iter().map(|&q| p.get(q)).collect();
    GateOp::new(
        Gate::PauliRotation(factors, -T::lit(2.0) * sign * theta),
        support,
    )
}

/// Circuit `U` on `2n` qubits with `U† γ_{0,σ,x} U = γ_{u,σ,x}`. With `combined` both
/// flavours `x = 0, 1` are rotated by the same angles.
pub fn majorana_rotation_circuit<T: Real>(
    u: &[T],
    spin: Spin,
    x: u8,
    combined: bool,
    ordering: SpinOrdering,
) -> Result<Circuit<T>> {
    let angles = givens_angles(u)?;
    let n = u.len();
    let mut c = Circuit::new(2 * n, 0);
    let flavours: Vec<u8> = if combined { vec![0, 1] } else { vec![x & 1] };
    if n == 1 {
        if u[0] < T::zero() {
            c.z(ordering.qubit(0, spin, 1));
        }
        return Ok(c);
    }
    for p in (0..n - 1).rev() {
        if angles[p] == T::zero() {
            continue;
        }
        for &f in &flavours {
            let a = majorana_pauli::<T>(p, spin, f, n, ordering);
            let b = majorana_pauli::<T>(p + 1, spin, f, n, ordering);
            c.push_gate(majorana_pair_rotation(&a, &b, angles[p]))?;
        }
    }
    Ok(c)
}

/// Dipole operator handed to [`prepare_dipole_input`].
#[derive(Clone, Debug, PartialEq)]
pub enum DipoleInput<T> {
    Majorana {
        form: MajoranaDipoleForm<T>,
        ordering: SpinOrdering,
    },
    Pauli(PauliSum<T>),
}

impl<T: Real> DipoleInput<T> {
    pub fn n_qubits(&self) -> usize {
        match self {
            DipoleInput::Majorana { form, .. } => 2 * form.n_orbitals(),
            DipoleInput::Pauli(p) => p.n_qubits(),
        }
    }

    pub fn to_pauli(&self) -> PauliSum<T> {
        match self {
            DipoleInput::Majorana { form, ordering } => form.to_pauli(*ordering),
            DipoleInput::Pauli(p) => p.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DipolePath {
    /// Dense application of the operator.
    #[default]
    Direct,
    /// Prepare, select, unprepare and post-selection on the ancillas.
    Lcu,
}

/// Statistics of an LCU application.
#[derive(Clone, Debug)]
pub struct LcuReport<T> {
    pub n_terms: usize,
    pub n_ancillas: usize,
    /// Coefficient 1-norm `λ`.
    pub lambda: T,
    /// Probability of the all-zero ancilla outcome.
    pub success_probability: T,
    /// Ancillas occupy the qubits above the system.
    pub circuit: Circuit<T>,
}

#[derive(Clone, Debug)]
pub enum DipoleOutcome<T> {
    /// Normalized `μ|ψ⟩` with `‖μ|ψ⟩‖²`.
    Prepared {
        state: State<T>,
        norm_sq: T,
        lcu: Option<LcuReport<T>>,
    },
    /// `μ|ψ⟩` vanishes.
    Forbidden { norm_sq: T },
}

impl<T: Real> DipoleOutcome<T> {
    pub fn state(&self) -> Option<&State<T>> {
        match self {
            DipoleOutcome::Prepared { state, .. } => Some(state),
            DipoleOutcome::Forbidden { .. } => None,
        }
    }

    pub fn norm_sq(&self) -> T {
        match self {
            DipoleOutcome::Prepared { norm_sq, .. } | DipoleOutcome::Forbidden { norm_sq } => {
                *norm_sq
            }
        }
    }
}

/// One LCU term `c · V† P V`; an empty rotation means `V = I`.
struct LcuTerm<T> {
    coef: Complex<T>,
    pauli: PauliString,
    rotation: Option<Circuit<T>>,
}

fn lcu_terms<T: Real>(input: &DipoleInput<T>) -> Result<Vec<LcuTerm<T>>> {
    let tol = T::prune_tol();
    let mut terms = Vec::new();
    match input {
        DipoleInput::Pauli(op) => {
            for (p, c) in op.terms() {
                terms.push(LcuTerm {
                    coef: *c,
                    pauli: p.clone(),
                    rotation: None,
                });
            }
        }
        DipoleInput::Majorana { form, ordering } => {
            let n = form.n_orbitals();
            if form.e_const.abs() > tol {
                terms.push(LcuTerm {
                    coef: Complex::new(form.e_const, T::zero()),
                    pauli: PauliString::identity(2 * n),
                    rotation: None,
                });
            }
            for (eps, u) in &form.modes {
                if eps.abs() <= tol {
                    continue;
                }
                for s in Spin::BOTH {
                    // (i/2) ε γ_{u,0} γ_{u,1} = (ε/2) U† (i γ_{0,0} γ_{0,1}) U.
                    let (phase, p) = paired_core::<T>(s, n, *ordering);
                    terms.push(LcuTerm {
                        coef: phase * (*eps * T::lit(0.5)),
                        pauli: p,
                        rotation: Some(majorana_rotation_circuit(u, s, 0, true, *ordering)?),
                    });
                }
            }
        }
    }
    terms.retain(|t| t.coef.norm() > tol);
    Ok(terms)
}

fn ancilla_controls(ancillas: &[usize], j: usize) -> Vec<(usize, bool)> {
    ancillas
        .iter()
        .enumerate()
        .map(|(b, &q)| (q, (j >> b) & 1 == 1))
        .collect()
}

fn with_controls<T: Real>(mut g: GateOp<T>, controls: &[(usize, bool)]) -> GateOp<T> {
    g.controls.extend_from_slice(controls);
    g
}

fn build_lcu<T: Real>(n_sys: usize, terms: &[LcuTerm<T>]) -> Result<(Circuit<T>, usize, T)> {
    let lambda: T = terms.iter().map(|t| t.coef.norm()).sum();
    let m = if terms.len() <= 1 {
        0
    } else {
        (terms.len() - 1).ilog2() as usize + 1
    };
    let ancillas: Vec<usize> = (n_sys..n_sys + m).collect();
    let mut c = Circuit::new(n_sys + m, 0);
    let prep = if m > 0 {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << m];
        for (a, t) in amps.iter_mut().zip(terms) {
            *a = Complex::new((t.coef.norm() / lambda).sqrt(), T::zero());
        }
        Some(amplitude_encode(&State::from_amplitudes(m, amps)?)?)
    } else {
        None
    };
    if let Some(p) = &prep {
        c.append_mapped(p, &ancillas, &[])?;
    }
    let system: Vec<usize> = (0..n_sys).collect();
    for (j, t) in terms.iter().enumerate() {
        let ctrl = ancilla_controls(&ancillas, j);
        let arg = t.coef.arg();
        if arg != T::zero() {
            c.push_gate(with_controls(
                GateOp::new(Gate::GlobalPhase(arg), vec![]),
                &ctrl,
            ))?;
        }
        if t.pauli.is_identity() {
            continue;
        }
        if let Some(r) = &t.rotation {
            c.append_mapped(r, &system, &[])?;
        }
        let support = t.pauli.support();
        let factors: Vec<Pauli> = support.iter().map(|&q| t.pauli.get(q)).collect();
        c.push_gate(with_controls(
            GateOp::new(Gate::PauliProduct(factors), support),
            &ctrl,
        ))?;
        if let Some(r) = &t.rotation {
            c.append_mapped(&r.inverse()?, &system, &[])?;
        }
    }
    if let Some(p) = &prep {
        c.append_mapped(&p.inverse()?, &ancillas, &[])?;
    }
    Ok((c, m, lambda))
}

/// Normalized `μ|ψ⟩` by dense application or by an LCU circuit with post-selection.
pub fn prepare_dipole_input<T: Real>(
    ground: &State<T>,
    input: &DipoleInput<T>,
    path: DipolePath,
) -> Result<DipoleOutcome<T>> {
    let n_sys = input.n_qubits();
    if ground.n_qubits() != n_sys {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit ground state for a {n_sys}-qubit dipole",
            ground.n_qubits()
        )));
    }
    if (ground.norm() - T::one()).abs() > T::lit(1e-8) {
        return Err(Error::InvalidArgument(
            "ground state is not normalized".into(),
        ));
    }
    let forbidden = |norm_sq: T| norm_sq.sqrt() < T::lit(1e-12);
    match path {
        DipolePath::Direct => {
            let v = input.to_pauli().apply(ground.amplitudes())?;
            let state = State::from_amplitudes_unchecked(n_sys, v);
            let norm_sq = state.norm() * state.norm();
            if forbidden(norm_sq) {
                return Ok(DipoleOutcome::Forbidden { norm_sq });
            }
            Ok(DipoleOutcome::Prepared {
                state: state.normalized(),
                norm_sq,
                lcu: None,
            })
        }
        DipolePath::Lcu => {
            let terms = lcu_terms(input)?;
            if terms.is_empty() {
                return Ok(DipoleOutcome::Forbidden { norm_sq: T::zero() });
            }
            let (circuit, m, lambda) = build_lcu(n_sys, &terms)?;
            let mut s = State::zero(m).tensor(ground);
            circuit.apply_unitary(&mut s)?;
            let kept: Vec<Complex<T>> = s.amplitudes()[..1 << n_sys].to_vec();
            let post = State::from_amplitudes_unchecked(n_sys, kept);
            let success = post.norm() * post.norm();
            let norm_sq = success * lambda * lambda;
            if forbidden(norm_sq) {
                return Ok(DipoleOutcome::Forbidden { norm_sq });
            }
            Ok(DipoleOutcome::Prepared {
                state: post.normalized(),
                norm_sq,
                lcu: Some(LcuReport {
                    n_terms: terms.len(),
                    n_ancillas: m,
                    lambda,
                    success_probability: success,
                    circuit,
                }),
            })
        }
    }
}
