//! Operator algebra: Pauli sums, fermions, tapering and Majorana forms.

pub mod fermion;
pub mod majorana;
pub mod pauli;
pub mod taper;
pub mod tensor;

pub use fermion::{
    assemble_mfso, assemble_spin_free, jordan_wigner, majorana_pauli, mean_field_soc,
    mfso_qubit_operator, one_body, Cartesian, FermionOp, Ladder, Spin, SpinOrdering,
};
pub use majorana::{
    dipole_majorana_decompose, majorana, paired_core, rotated_majorana, DipoleMatrix, Direction,
    MajoranaDipoleForm,
};
pub use pauli::{i_pow, Pauli, PauliString, PauliSum, DENSE_LIMIT};
pub use taper::{
    split_dipole_by_sector, z2_taper, CliffordFrame, CliffordGate, Sector, SymmetrySpec,
};
pub use tensor::Tensor;

/// Dense matrix of a Pauli sum under the default qubit limit.
pub fn pauli_to_matrix<T: crate::Real>(
    op: &PauliSum<T>,
) -> crate::Result<crate::linalg::CMatrix<T>> {
    op.to_matrix()
}
