//! Reading the excitation problem from disk.

use std::fs;
use std::path::Path;

use qpexas::operator::PauliSum;
use qpexas::qpe::{prepare_dipole_input, DipoleInput, DipoleOutcome, DipolePath, EigenSpectrum};
use qpexas::sim::State;
use qpexas::{Complex64, PauliOperator, StateVector};

use crate::config::InputSource;
use crate::error::{CliError, CliResult};

/// Excitation problem: its eigenspectrum plus, per polarization, a Hamiltonian and the
/// normalized dipole-excited input state.
pub struct Problem {
    pub spectrum: EigenSpectrum<f64>,
    pub instances: Vec<(PauliOperator, StateVector)>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::unreadable(path, e))
}

fn read_operator(path: &Path) -> CliResult<PauliOperator> {
    PauliSum::parse_text(&read(path)?).map_err(|e| CliError::unreadable(path, e))
}

/// One `<re> <im>` line per amplitude; `#` comments allowed. The state is normalized.
pub fn parse_state(text: &str) -> Result<StateVector, String> {
    let mut amps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| format!("line {}: {e}", i + 1))?;
        match f[..] {
            [re, im] => amps.push(Complex64::new(re, im)),
            [re] => amps.push(Complex64::new(re, 0.0)),
            _ => return Err(format!("line {}: expected `<re> <im>`", i + 1)),
        }
    }
    if amps.len() < 2 || !amps.len().is_power_of_two() {
        return Err(format!("{} amplitudes is not a qubit register", amps.len()));
    }
    let n = amps.len().trailing_zeros() as usize;
    let s = State::from_amplitudes_unchecked(n, amps);
    if s.norm() < 1e-12 {
        return Err("zero state".into());
    }
    Ok(s.normalized())
}

fn ground_state(h: &PauliOperator) -> CliResult<StateVector> {
    let (_, vecs) = h.to_matrix()?.eigh()?;
    let dim = 1usize << h.n_qubits();
    Ok(State::from_amplitudes(
        h.n_qubits(),
        (0..dim).map(|r| vecs[(r, 0)]).collect(),
    )?)
}

impl Problem {
    pub fn load(input: &InputSource) -> CliResult<Option<Self>> {
        match input {
            InputSource::None => Ok(None),
            InputSource::Spectrum(path) => {
                let spectrum = EigenSpectrum::parse_text(&read(path)?)
                    .map_err(|e| CliError::unreadable(path, e))?;
                let instances = (0..spectrum.n_polarizations())
                    .map(|nu| spectrum.diagonal_instance(nu))
                    .collect::<qpexas::Result<_>>()?;
                Ok(Some(Self {
                    spectrum,
                    instances,
                }))
            }
            InputSource::Hamiltonian {
                hamiltonian,
                dipoles,
                ground,
            } => {
                let h = read_operator(hamiltonian)?;
                let g = match ground {
                    Some(p) => parse_state(&read(p)?).map_err(|e| CliError::unreadable(p, e))?,
                    None => ground_state(&h)?,
                };
                if g.n_qubits() != h.n_qubits() {
                    return Err(CliError::Invalid(format!(
                        "{}-qubit ground state for a {}-qubit hamiltonian",
                        g.n_qubits(),
                        h.n_qubits()
                    )));
                }
                let mut instances = Vec::new();
                for path in dipoles {
                    let mu = read_operator(path)?;
                    match prepare_dipole_input(&g, &DipoleInput::Pauli(mu), DipolePath::Direct)? {
                        DipoleOutcome::Prepared { state, .. } => instances.push((h.clone(), state)),
                        DipoleOutcome::Forbidden { .. } => {
                            return Err(CliError::Invalid(format!(
                                "{}: dipole annihilates the ground state",
                                path.display()
                            )))
                        }
                    }
                }
                let states: Vec<StateVector> = instances.iter().map(|i| i.1.clone()).collect();
                let spectrum = EigenSpectrum::from_hamiltonian(&h, &states)?;
                Ok(Some(Self {
                    spectrum,
                    instances,
                }))
            }
        }
    }
}
