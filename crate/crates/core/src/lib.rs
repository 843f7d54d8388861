//! Statevector quantum phase estimation (QPE) sampling for absorption spectra.
//!
//! The crate is organised in layers:
//!
//! * [`operator`]: Pauli and fermionic algebra, Jordan-Wigner mapping, Z2 tapering and
//!   Majorana decomposition of one-body dipole operators.
//! * [`sim`]: dense statevector simulation with mid-circuit measurement, classical
//!   control and two-qubit depolarizing noise.
//! * [`qpe`]: ancilla input states, standard and semiclassical QPE circuits, analytic
//!   outcome laws and dipole-excited input states.
//! * [`iceberg`]: the `[[k+2,k,2]]` error-detection code.
//! * [`spectra`]: Lorentzian post-processing and error metrics.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases at the crate
//! root pin the common `f64` instantiation.

pub mod error;
pub mod iceberg;
pub mod linalg;
pub mod operator;
pub mod qpe;
pub mod scalar;
pub mod sim;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

/// Complex amplitude at double precision.
pub type Complex64 = Complex<f64>;
/// Dense complex matrix at double precision.
pub type Matrix64 = linalg::CMatrix<f64>;
/// Weighted Pauli sum at double precision.
pub type PauliOperator = operator::PauliSum<f64>;
/// Weighted Pauli sum at single precision.
pub type PauliOperator32 = operator::PauliSum<f32>;
/// Fermionic operator at double precision.
pub type FermionOperator = operator::FermionOp<f64>;
/// Statevector at double precision.
pub type StateVector = sim::State<f64>;
/// Statevector at single precision.
pub type StateVector32 = sim::State<f32>;
/// Circuit at double precision.
pub type Circuit = sim::Circuit<f64>;
/// QPE configuration at double precision.
pub type QpeConfig = qpe::QpeConfig<f64>;
/// Eigen-decomposed spectrum at double precision.
pub type EigenSpectrum = qpe::EigenSpectrum<f64>;
/// Spectrum series at double precision.
pub type SpectrumSeries = spectra::SpectrumSeries<f64>;
/// Peak set at double precision.
pub type PeakSet = spectra::PeakSet<f64>;
