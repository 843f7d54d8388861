//! Majorana normal form of one-body dipole operators.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::real_symmetric_eigen;
use crate::operator::fermion::{jordan_wigner, majorana_pauli, one_body, Spin, SpinOrdering};
use crate::operator::pauli::{i_pow, PauliString, PauliSum};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    X,
    Y,
    Z,
}

/// Real symmetric dipole matrix `μ^ν_pq` over spatial orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleMatrix<T> {
    pub direction: Direction,
    n: usize,
    entries: Vec<T>,
}

impl<T: Real> DipoleMatrix<T> {
    /// Validates symmetry within `1e−12`.
    pub fn new(direction: Direction, n: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{n}x{n} dipole needs {} entries",
                n * n
            )));
        }
        let tol = T::lit(1e-12);
        for p in 0..n {
            for q in 0..p {
                if (entries[p * n + q] - entries[q * n + p]).abs() > tol {
                    return Err(Error::Symmetry(format!(
                        "dipole[{p},{q}] != dipole[{q},{p}]"
                    )));
                }
            }
        }
        Ok(Self {
            direction,
            n,
            entries,
        })
    }

    pub fn n_orbitals(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize) -> T {
        self.entries[p * self.n + q]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// JW image of `Σ_σ Σ_pq μ_pq a†_{pσ} a_{qσ}`.
    pub fn to_pauli(&self, ordering: SpinOrdering) -> Result<PauliSum<T>> {
        jordan_wigner(&one_body(self.n, &self.entries)?, self.n, ordering)
    }
}

/// `μ = Σ_k ε_k u_k u_kᵀ` together with the spin-summed constant `Σ_i μ_ii`.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaDipoleForm<T> {
    pub e_const: T,
    pub modes: Vec<(T, Vec<T>)>,
}

/// Majorana operator of a rotated mode: `γ_{u,σ,x} = Σ_p u_p γ_{p,σ,x}`.
pub fn rotated_majorana<T: Real>(
    u: &[T],
    spin: Spin,
    x: u8,
    ordering: SpinOrdering,
) -> PauliSum<T> {
    let n = u.len();
    let terms = u.iter().enumerate().map(|(p, &c)| {
        (
            Complex::new(c, T::zero()),
            majorana_pauli::<T>(p, spin, x, n, ordering),
        )
    });
    PauliSum::from_terms(2 * n, terms).expect("register")
}

/// `γ_{p,σ,x}` as a single-term operator.
pub fn majorana<T: Real>(
    mode: usize,
    spin: Spin,
    x: u8,
    n_modes: usize,
    ordering: SpinOrdering,
) -> PauliSum<T> {
    PauliSum::term(
        Complex::new(T::one(), T::zero()),
        majorana_pauli::<T>(mode, spin, x, n_modes, ordering),
    )
}

/// Product `γ_a γ_b` of two Majorana strings as `i^k · P`.
pub fn majorana_pair(a: &PauliString, b: &PauliString) -> (u8, PauliString) {
    a.mul_phase(b)
}

impl<T: Real> MajoranaDipoleForm<T> {
    pub fn n_orbitals(&self) -> usize {
        self.modes.first().map_or(0, |m| m.1.len())
    }

    /// `E_const + (i/2) Σ_k ε_k Σ_σ γ_{u_k,σ,0} γ_{u_k,σ,1}`.
    pub fn to_pauli(&self, ordering: SpinOrdering) -> PauliSum<T> {
        let n = self.n_orbitals();
        let mut acc = PauliSum::constant(2 * n, Complex::new(self.e_const, T::zero()));
        let half_i = Complex::new(T::zero(), T::lit(0.5));
        for (eps, u) in &self.modes {
            for s in Spin::BOTH {
                let g0 = rotated_majorana(u, s, 0, ordering);
                let g1 = rotated_majorana(u, s, 1, ordering);
                acc = &acc + &(&g0 * &g1).scale(half_i * *eps);
            }
        }
        acc
    }

    /// Dense reconstruction `Σ_k ε_k u_k u_kᵀ`, row-major.
    pub fn reconstruct(&self) -> Vec<T> {
        let n = self.n_orbitals();
        let mut m = vec![T::zero(); n * n];
        for (eps, u) in &self.modes {
            for p in 0..n {
                for q in 0..n {
                    m[p * n + q] = m[p * n + q] + *eps * u[p] * u[q];
                }
            }
        }
        m
    }
}

/// Diagonalizes the dipole matrix; modes sorted by descending `|ε_k|`.
pub fn dipole_majorana_decompose<T: Real>(mu: &DipoleMatrix<T>) -> MajoranaDipoleForm<T> {
    let n = mu.n;
    let (vals, vecs) = real_symmetric_eigen(n, &mu.entries);
    let mut modes: Vec<(T, Vec<T>)> = vals.into_iter().zip(vecs).collect();
    modes.sort_by(|a, b| {
        b.0.abs()
            .partial_cmp(&a.0.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let e_const = (0..n).map(|i| mu.get(i, i)).sum();
    MajoranaDipoleForm { e_const, modes }
}

/// `i γ_{0,σ,0} γ_{0,σ,1}` as a signed single-qubit `Z` on the spin block's first qubit.
pub fn paired_core<T: Real>(
    spin: Spin,
    n_modes: usize,
    ordering: SpinOrdering,
) -> (Complex<T>, PauliString) {
    let g0 = majorana_pauli::<T>(0, spin, 0, n_modes, ordering);
    let g1 = majorana_pauli::<T>(0, spin, 1, n_modes, ordering);
    let (k, p) = g0.mul_phase(&g1);
    (i_pow::<T>(k + 1), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use num_traits::{One, Zero};

    #[test]
    fn identity_dipole() {
        let mu = DipoleMatrix::new(Direction::X, 2, vec![1.0, 0., 0., 1.]).unwrap();
        let f = dipole_majorana_decompose(&mu);
        assert_eq!(f.e_const, 2.0);
        assert!(f.modes.iter().all(|(e, _)| (e - 1.0_f64).abs() < 1e-12));
    }

    #[test]
    fn off_diagonal_dipole() {
        let mu = DipoleMatrix::new(Direction::Z, 2, vec![0.0, 1., 1., 0.]).unwrap();
        let f = dipole_majorana_decompose(&mu);
        assert_eq!(f.e_const, 0.0);
        let mut eps: Vec<f64> = f.modes.iter().map(|m| m.0).collect();
        eps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eps[0] + 1.).abs() < 1e-12 && (eps[1] - 1.).abs() < 1e-12);
        for (e, u) in &f.modes {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let expect = if *e > 0. { [r, r] } else { [r, -r] };
            let s = u[0].signum() * expect[0].signum();
            assert!((u[0] - s * expect[0]).abs() < 1e-12 && (u[1] - s * expect[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_rejected() {
        assert!(DipoleMatrix::new(Direction::X, 2, vec![0.0, 1., 0.5, 0.]).is_err());
    }

    #[test]
    fn paired_core_is_minus_z() {
        let (c, p) = paired_core::<f64>(Spin::Beta, 3, SpinOrdering::Blocked);
        assert_eq!(p.to_string(), "IIZIII");
        assert!((c + Complex::<f64>::one()).norm() < 1e-15);
    }

    #[test]
    fn majoranas_anticommute() {
        for ordering in [SpinOrdering::Blocked, SpinOrdering::Interleaved] {
            let n = 3;
            let mut all = Vec::new();
            for p in 0..n {
                for s in Spin::BOTH {
                    for x in 0..2u8 {
                        all.push((
                            p,
                            s,
                            x,
                            majorana::<f64>(p, s, x, n, ordering).to_matrix().unwrap(),
                        ));
                    }
                }
            }
            let dim = 1 << (2 * n);
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    let anti = &(&a.3 * &b.3) + &(&b.3 * &a.3);
                    let expect = if i == j {
                        CMatrix::identity(dim).scale(Complex::new(2.0, 0.0))
                    } else {
                        CMatrix::zeros(dim, dim)
                    };
                    assert!(anti.max_abs_diff(&expect) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn zero_dipole_has_empty_pauli_image() {
        let mu = DipoleMatrix::new(Direction::X, 2, vec![0.0; 4]).unwrap();
        let f = dipole_majorana_decompose(&mu);
        assert!(f.to_pauli(SpinOrdering::Blocked).is_empty());
        assert!(f.e_const.is_zero());
    }

    #[test]
    fn majorana_form_reassembles_jw_image() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for n in 1..=3 {
            for ordering in [SpinOrdering::Blocked, SpinOrdering::Interleaved] {
                let mut m = vec![0.0_f64; n * n];
                for p in 0..n {
                    for q in 0..=p {
                        let v = rng.gen_range(-1.0..1.0);
                        m[p * n + q] = v;
                        m[q * n + p] = v;
                    }
                }
                let mu = DipoleMatrix::new(Direction::Y, n, m.clone()).unwrap();
                let form = dipole_majorana_decompose(&mu);
                let rec = form.reconstruct();
                assert!(rec.iter().zip(&m).all(|(a, b)| (a - b).abs() < 1e-10));
                let a = form.to_pauli(ordering).to_matrix().unwrap();
                let b = mu.to_pauli(ordering).unwrap().to_matrix().unwrap();
                assert!(a.max_abs_diff(&b) < 1e-10);
            }
        }
    }
}
