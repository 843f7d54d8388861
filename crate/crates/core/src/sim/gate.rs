//! Gate payloads.
//!
//! Conventions: `R_A(θ) = exp(−iθA/2)`, `Phase(φ) = diag(1, e^{iφ})`,
//! `Ms(θ) = exp(−iθ/2 Z⊗Z)`. Matrix index bit `j` refers to the `j`-th target.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::linalg::CMatrix;
use crate::operator::{Pauli, PauliString};
use crate::scalar::{cis, Real};

#[derive(Clone, Debug, PartialEq)]
pub enum Gate<T> {
    I,
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx(T),
    Ry(T),
    Rz(T),
    Phase(T),
    Cx,
    Cz,
    Swap,
    /// `exp(−iθ/2 Z⊗Z)`.
    Ms(T),
    /// `exp(−iθ/2 P)` with `P` the listed factors on the targets.
    PauliRotation(Vec<Pauli>, T),
    /// The Pauli product itself.
    PauliProduct(Vec<Pauli>),
    /// `e^{iφ}` on the whole register; takes no targets.
    GlobalPhase(T),
    /// Explicit unitary over the targets.
    Unitary(Arc<CMatrix<T>>, String),
}

impl<T: Real> Gate<T> {
    /// Number of targets the payload acts on.
    pub fn arity(&self) -> usize {
        match self {
            Gate::GlobalPhase(_) => 0,
            Gate::Cx | Gate::Cz | Gate::Swap | Gate::Ms(_) => 2,
            Gate::PauliRotation(p, _) | Gate::PauliProduct(p) => p.len(),
            Gate::Unitary(m, _) => m.rows().trailing_zeros() as usize,
            _ => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Gate::I => "id".into(),
            Gate::H => "h".into(),
            Gate::X => "x".into(),
            Gate::Y => "y".into(),
            Gate::Z => "z".into(),
            Gate::S => "s".into(),
            Gate::Sdg => "sdg".into(),
            Gate::T => "t".into(),
            Gate::Tdg => "tdg".into(),
            Gate::Rx(a) => format!("rx({a})"),
            Gate::Ry(a) => format!("ry({a})"),
            Gate::Rz(a) => format!("rz({a})"),
            Gate::Phase(a) => format!("p({a})"),
            Gate::Cx => "cx".into(),
            Gate::Cz => "cz".into(),
            Gate::Swap => "swap".into(),
            Gate::Ms(a) => format!("ms({a})"),
            Gate::PauliRotation(p, a) => format!("r{}({a})", label(p)),
            Gate::PauliProduct(p) => format!("pauli({})", label(p)),
            Gate::GlobalPhase(a) => format!("gphase({a})"),
            Gate::Unitary(_, l) => format!("unitary[{l}]"),
        }
    }

    /// Parameters are finite.
    pub fn is_finite(&self) -> bool {
        match self {
            Gate::Rx(a)
            | Gate::Ry(a)
            | Gate::Rz(a)
            | Gate::Phase(a)
            | Gate::Ms(a)
            | Gate::GlobalPhase(a) => a.is_finite(),
            Gate::PauliRotation(_, a) => a.is_finite(),
            Gate::Unitary(m, _) => m
                .data()
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite()),
            _ => true,
        }
    }

    /// Diagonal payloads as their diagonal.
    pub fn diagonal(&self) -> Option<Vec<Complex<T>>> {
        let one = Complex::<T>::one();
        let half = T::lit(0.5);
        Some(match self {
            Gate::I => vec![one, one],
            Gate::Z => vec![one, -one],
            Gate::S => vec![one, Complex::i()],
            Gate::Sdg => vec![one, -Complex::<T>::i()],
            Gate::T => vec![one, cis(T::FRAC_PI_4())],
            Gate::Tdg => vec![one, cis(-T::FRAC_PI_4())],
            Gate::Rz(a) => vec![cis(-*a * half), cis(*a * half)],
            Gate::Phase(a) => vec![one, cis(*a)],
            Gate::Cz => vec![one, one, one, -one],
            Gate::Ms(a) => {
                let (p, m) = (cis(-*a * half), cis(*a * half));
                vec![p, m, m, p]
            }
            Gate::PauliRotation(ps, a) if ps.iter().all(|p| matches!(p, Pauli::I | Pauli::Z)) => {
                let (p, m) = (cis(-*a * half), cis(*a * half));
                (0..1usize << ps.len())
                    .map(|s| {
                        let par = ps
                            .iter()
                            .enumerate()
                            .filter(|(j, p)| **p == Pauli::Z && s >> j & 1 == 1)
                            .count();
                        if par % 2 == 0 {
                            p
                        } else {
                            m
                        }
                    })
                    .collect()
            }
            Gate::GlobalPhase(a) => vec![cis(*a)],
            _ => return None,
        })
    }

    /// Dense matrix over the targets.
    pub fn matrix(&self) -> CMatrix<T> {
        if let Some(d) = self.diagonal() {
            return CMatrix::diagonal(&d);
        }
        let o = Complex::<T>::one();
        let z = Complex::<T>::zero();
        let i = Complex::<T>::i();
        let r = T::FRAC_1_SQRT_2();
        let half = T::lit(0.5);
        let m2 = |v: [Complex<T>; 4]| CMatrix::from_rows(2, 2, v.to_vec());
        match self {
            Gate::H => m2([o * r, o * r, o * r, -o * r]),
            Gate::X => m2([z, o, o, z]),
            Gate::Y => m2([z, -i, i, z]),
            Gate::Rx(a) => {
                let (c, s) = ((*a * half).cos(), (*a * half).sin());
                m2([o * c, -i * s, -i * s, o * c])
            }
            Gate::Ry(a) => {
                let (c, s) = ((*a * half).cos(), (*a * half).sin());
                m2([o * c, -o * s, o * s, o * c])
            }
            Gate::Cx => {
                // Target 0 is the control, target 1 the flipped qubit.
                let mut m = CMatrix::zeros(4, 4);
                for (a, b) in [(0, 0), (2, 2), (1, 3), (3, 1)] {
                    m[(a, b)] = o;
                }
                m
            }
            Gate::Swap => {
                let mut m = CMatrix::zeros(4, 4);
                for (a, b) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                    m[(a, b)] = o;
                }
                m
            }
            Gate::PauliRotation(ps, a) => {
                let p = PauliString::from_sparse(
                    ps.len(),
                    &ps.iter().copied().enumerate().collect::<Vec<_>>(),
                )
                .expect("local register")
                .to_matrix::<T>();
                let id = CMatrix::identity(p.rows());
                let (c, s) = ((*a * half).cos(), (*a * half).sin());
                &id.scale(o * c) + &p.scale(-i * s)
            }
            Gate::PauliProduct(ps) => PauliString::from_sparse(
                ps.len(),
                &ps.iter().copied().enumerate().collect::<Vec<_>>(),
            )
            .expect("local register")
            .to_matrix(),
            Gate::Unitary(m, _) => (**m).clone(),
            _ => unreachable!("diagonal gates handled above"),
        }
    }

    /// Inverse payload.
    pub fn inverse(&self) -> Gate<T> {
        match self {
            Gate::S => Gate::Sdg,
            Gate::Sdg => Gate::S,
            Gate::T => Gate::Tdg,
            Gate::Tdg => Gate::T,
            Gate::Rx(a) => Gate::Rx(-*a),
            Gate::Ry(a) => Gate::Ry(-*a),
            Gate::Rz(a) => Gate::Rz(-*a),
            Gate::Phase(a) => Gate::Phase(-*a),
            Gate::Ms(a) => Gate::Ms(-*a),
            Gate::PauliRotation(p, a) => Gate::PauliRotation(p.clone(), -*a),
            Gate::GlobalPhase(a) => Gate::GlobalPhase(-*a),
            Gate::Unitary(m, l) => Gate::Unitary(Arc::new(m.adjoint()), format!("{l}^dg")),
            g => g.clone(),
        }
    }
}

fn label(ps: &[Pauli]) -> String {
    ps.iter()
        .rev()
        .map(|p| p.as_char().to_ascii_lowercase())
        .collect()
}

impl<T: Real> fmt::Display for Gate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_gates() -> Vec<Gate<f64>> {
        vec![
            Gate::I,
            Gate::H,
            Gate::X,
            Gate::Y,
            Gate::Z,
            Gate::S,
            Gate::Sdg,
            Gate::T,
            Gate::Tdg,
            Gate::Rx(0.3),
            Gate::Ry(-1.1),
            Gate::Rz(2.0),
            Gate::Phase(0.7),
            Gate::Cx,
            Gate::Cz,
            Gate::Swap,
            Gate::Ms(0.4),
            Gate::PauliRotation(vec![Pauli::X, Pauli::Y, Pauli::Z], 0.9),
            Gate::PauliRotation(vec![Pauli::Z, Pauli::I], 0.9),
            Gate::PauliProduct(vec![Pauli::Y, Pauli::X]),
        ]
    }

    #[test]
    fn payloads_are_unitary_and_invert() {
        for g in all_gates() {
            let m = g.matrix();
            assert!(m.unitarity_defect() < 1e-14, "{g}");
            assert_eq!(m.rows(), 1 << g.arity());
            let prod = &m * &g.inverse().matrix();
            assert!(
                prod.max_abs_diff(&CMatrix::identity(m.rows())) < 1e-14,
                "{g}"
            );
        }
    }

    #[test]
    fn rotation_matches_generic_pauli_rotation() {
        for (g, p) in [
            (Gate::Rx(0.37), Pauli::X),
            (Gate::Ry(0.37), Pauli::Y),
            (Gate::Rz(0.37), Pauli::Z),
        ] {
            let a = g.matrix();
            let b = Gate::PauliRotation(vec![p], 0.37).matrix();
            assert!(a.max_abs_diff(&b) < 1e-15);
        }
        let ms = Gate::Ms(0.37).matrix();
        let zz = Gate::PauliRotation(vec![Pauli::Z, Pauli::Z], 0.37).matrix();
        assert!(ms.max_abs_diff(&zz) < 1e-15);
    }

    #[test]
    fn ry_half_pi_on_zero() {
        let m = Gate::Ry(std::f64::consts::FRAC_PI_2).matrix();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m[(0, 0)].re - r).abs() < 1e-15 && (m[(1, 0)].re - r).abs() < 1e-15);
    }
}
