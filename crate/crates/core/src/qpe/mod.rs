//! QPE sampling: configuration, ancilla inputs, circuits and analytic outcome laws.

pub mod alpha;
pub mod circuits;
pub mod dipole;
pub mod spectrum;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use alpha::{
    alpha_epe, alpha_epe_closed, alpha_slater, alpha_slater_closed, alpha_slater_lorentzian,
    alpha_uniform, alpha_uniform_closed, alpha_uniform_sq_closed,
};
pub use circuits::{
    build_dynamic_qpe_circuit, build_dynamic_qpe_circuit_with, build_qpe_circuit,
    controlled_evolution, iqft_circuit, prepare_ancilla, prepare_epe, prepare_slater,
    prepare_uniform, qft_circuit, simulate_ancilla_distribution, Evolution, QpeLayout,
};
pub use dipole::{
    givens_angles, majorana_rotation_circuit, prepare_dipole_input, DipoleInput, DipoleOutcome,
    DipolePath, LcuReport,
};
pub use spectrum::{analytic_pk, analytic_pk_polarization, EigenSpectrum};

/// Ancilla input state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `H^{⊗n_q}`.
    Uniform,
    /// Sine-profile entangled input.
    Epe,
    /// Exponentially decaying input `∝ e^{−aτ}`.
    Slater,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Uniform, Variant::Epe, Variant::Slater];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Uniform => "uniform",
            Variant::Epe => "epe",
            Variant::Slater => "slater",
        }
    }

    /// Product form across ancillas (compatible with the one-ancilla circuit).
    pub fn is_product(self) -> bool {
        !matches!(self, Variant::Epe)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Variant::Uniform),
            "epe" => Ok(Variant::Epe),
            "slater" => Ok(Variant::Slater),
            _ => Err(Error::InvalidArgument(format!("unknown variant '{s}'"))),
        }
    }
}

/// Energy window, ancilla count and input variant.
///
/// Bin `k` reports the excitation energy `ω_min + k/t₀`, `t₀ = N_q/(ω_max − ω_min)`.
/// The evolution runs under `H − (e_ref + ω_min)`, so `e_ref` (typically the ground-state
/// energy) and the window origin are folded into one shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QpeConfig<T> {
    pub n_q: usize,
    pub omega_min: T,
    pub omega_max: T,
    pub variant: Variant,
    /// Slater decay rate; required iff the variant is Slater.
    pub a: Option<T>,
    pub e_ref: T,
}

impl<T: Real> QpeConfig<T> {
    pub fn new(
        n_q: usize,
        omega_min: T,
        omega_max: T,
        variant: Variant,
        a: Option<T>,
        e_ref: T,
    ) -> Result<Self> {
        let cfg = Self {
            n_q,
            omega_min,
            omega_max,
            variant,
            a,
            e_ref,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn uniform(n_q: usize, omega_min: T, omega_max: T) -> Result<Self> {
        Self::new(n_q, omega_min, omega_max, Variant::Uniform, None, T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_q == 0 || self.n_q > 20 {
            return Err(Error::InvalidArgument(format!(
                "n_q = {} outside 1..=20",
                self.n_q
            )));
        }
        if !(self.omega_max > self.omega_min)
            || !self.omega_min.is_finite()
            || !self.omega_max.is_finite()
        {
            return Err(Error::InvalidArgument(format!(
                "degenerate window [{}, {}]",
                self.omega_min, self.omega_max
            )));
        }
        if !self.e_ref.is_finite() {
            return Err(Error::InvalidArgument("e_ref must be finite".into()));
        }
        match (self.variant, self.a) {
            (Variant::Slater, Some(a)) if a > T::zero() && a.is_finite() => Ok(()),
            (Variant::Slater, Some(a)) => Err(Error::InvalidArgument(format!(
                "decay rate a = {a} must be positive"
            ))),
            (Variant::Slater, None) => Err(Error::InvalidArgument(
                "slater variant requires a decay rate".into(),
            )),
            (_, Some(_)) => Err(Error::InvalidArgument(
                "decay rate given for a non-slater variant".into(),
            )),
            _ => Ok(()),
        }
    }

    /// `N_q = 2^{n_q}`.
    pub fn n_bins(&self) -> usize {
        1 << self.n_q
    }

    /// `t₀ = N_q/(ω_max − ω_min)`.
    pub fn t0(&self) -> T {
        T::from_count(self.n_bins()) / (self.omega_max - self.omega_min)
    }

    /// Bin spacing `1/t₀`.
    pub fn bin_width(&self) -> T {
        T::one() / self.t0()
    }

    /// `ω_min + k/t₀`.
    pub fn bin_energy(&self, k: usize) -> T {
        self.omega_min + T::from_count(k) / self.t0()
    }

    /// Total energy shift applied before evolution.
    pub fn shift(&self) -> T {
        self.e_ref + self.omega_min
    }

    /// Continuous bin coordinate `t₀(E − e_ref − ω_min)`.
    pub fn phase_coordinate(&self, energy: T) -> T {
        self.t0() * (energy - self.shift())
    }

    /// Slater decay rate, or zero for other variants.
    pub fn decay(&self) -> T {
        self.a.unwrap_or_else(T::zero)
    }

    /// Ancilla input amplitudes `ψ_τ`.
    pub fn ancilla_amplitudes(&self) -> Vec<T> {
        match self.variant {
            Variant::Uniform => alpha::uniform_amplitudes(self.n_q),
            Variant::Epe => alpha::epe_amplitudes(self.n_q),
            Variant::Slater => alpha::slater_amplitudes(self.n_q, self.decay()),
        }
    }

    /// `|α(x)|²` for this variant, by the exact finite sum.
    pub fn kernel_sq(&self, x: T) -> T {
        match self.variant {
            Variant::Uniform => alpha_uniform(x, self.n_q).norm_sqr(),
            Variant::Epe => alpha_epe(x, self.n_q).norm_sqr(),
            Variant::Slater => alpha_slater(x, self.n_q, self.decay()).norm_sqr(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(QpeConfig::uniform(3, 0.0, 1.0).is_ok());
        assert!(QpeConfig::uniform(0, 0.0, 1.0).is_err());
        assert!(QpeConfig::uniform(3, 1.0, 1.0).is_err());
        assert!(QpeConfig::new(3, 0.0, 1.0, Variant::Slater, None, 0.0).is_err());
        assert!(QpeConfig::new(3, 0.0, 1.0, Variant::Slater, Some(-0.1), 0.0).is_err());
        assert!(QpeConfig::new(3, 0.0, 1.0, Variant::Uniform, Some(0.1), 0.0).is_err());
        assert!(QpeConfig::new(3, 0.0, 1.0, Variant::Slater, Some(0.1), 0.0).is_ok());
    }

    #[test]
    fn derived_scales() {
        let c = QpeConfig::uniform(3, -2.0, 2.0).unwrap();
        assert_eq!(c.t0(), 2.0);
        assert_eq!(c.bin_energy(5), 0.5);
        assert_eq!(c.phase_coordinate(0.5), 5.0);
    }

    #[test]
    fn variant_parsing() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("qft".parse::<Variant>().is_err());
    }
}
