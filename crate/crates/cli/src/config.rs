//! Flag and config-file merging. Flags override file values.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use qpexas::iceberg::SyndromeSchedule;
use qpexas::qpe::Variant;
use qpexas::QpeConfig;

use crate::error::{CliError, CliResult};

/// Options shared by the pipeline commands.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// TOML file with any of the run options.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub shots: Option<usize>,
    /// Number of ancilla bits.
    #[arg(long)]
    pub nq: Option<usize>,
    /// uniform, epe or slater.
    #[arg(long)]
    pub variant: Option<String>,
    /// Slater decay rate.
    #[arg(long)]
    pub a: Option<f64>,
    /// Lorentzian half width.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Energy window.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    /// Reference energy subtracted before phase estimation.
    #[arg(long, allow_negative_numbers = true)]
    pub e_ref: Option<f64>,
    /// One-ancilla circuit with mid-circuit measurement and reset.
    #[arg(long)]
    pub dynamic: bool,
    /// Two-qubit depolarizing probability.
    #[arg(long)]
    pub p2: Option<f64>,
    /// Two-qubit gates between syndrome rounds.
    #[arg(long)]
    pub syndrome_period: Option<usize>,
    /// First-order Trotter steps per controlled power in encoded circuits.
    #[arg(long)]
    pub trotter_steps: Option<usize>,
    /// Constant added to the energy axis of written spectra.
    #[arg(long, allow_negative_numbers = true)]
    pub shift: Option<f64>,
    /// Eigenspectrum file with lines `E_j w_1 … w_m`.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Hamiltonian file with lines `<re> <im> <pauli string>`.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Dipole component in the Hamiltonian format; repeat for more polarizations.
    #[arg(long)]
    pub dipole: Vec<PathBuf>,
    /// Ground-state amplitudes, one `<re> <im>` line per basis state.
    #[arg(long)]
    pub ground: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n_q: Option<usize>,
    omega_min: Option<f64>,
    omega_max: Option<f64>,
    variant: Option<String>,
    a: Option<f64>,
    e_ref: Option<f64>,
    shots: Option<usize>,
    seed: Option<u64>,
    eta: Option<f64>,
    p2: Option<f64>,
    syndrome_period: Option<usize>,
    trotter_steps: Option<usize>,
    dynamic: Option<bool>,
    shift: Option<f64>,
    out: Option<PathBuf>,
    spectrum: Option<PathBuf>,
    hamiltonian: Option<PathBuf>,
    dipole: Option<Vec<PathBuf>>,
    ground: Option<PathBuf>,
}

/// Where the excitation problem comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSource {
    None,
    Spectrum(PathBuf),
    Hamiltonian {
        hamiltonian: PathBuf,
        dipoles: Vec<PathBuf>,
        ground: Option<PathBuf>,
    },
}

/// Fully resolved run options.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: InputSource,
    pub n_q: Option<usize>,
    pub window: Option<(f64, f64)>,
    pub variant: Variant,
    pub a: Option<f64>,
    pub e_ref: f64,
    pub eta: Option<f64>,
    pub shots: usize,
    pub seed: u64,
    pub p2: f64,
    pub syndrome_period: Option<usize>,
    pub trotter_steps: usize,
    pub dynamic: bool,
    pub shift: f64,
    pub out: PathBuf,
}

pub const DEFAULT_SHOTS: usize = 1000;
pub const DEFAULT_NQ: usize = 6;

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> CliResult<Self> {
        let (file, base) = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::unreadable(path, e))?;
                let cfg: FileConfig = toml::from_str(&text)
                    .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
                (
                    cfg,
                    path.parent().map(Path::to_path_buf).unwrap_or_default(),
                )
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        let rel = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

        let window = match (&args.window, file.omega_min, file.omega_max) {
            (Some(w), _, _) => Some((w[0], w[1])),
            (None, Some(lo), Some(hi)) => Some((lo, hi)),
            (None, None, None) => None,
            _ => {
                return Err(CliError::Invalid(
                    "omega_min and omega_max must be given together".into(),
                ))
            }
        };
        let variant: Variant = args
            .variant
            .clone()
            .or(file.variant)
            .map(|v| v.parse::<Variant>())
            .transpose()?
            .unwrap_or(Variant::Uniform);

        let spectrum = args.spectrum.clone().or(file.spectrum.map(&rel));
        let hamiltonian = args.hamiltonian.clone().or(file.hamiltonian.map(&rel));
        let dipoles = if args.dipole.is_empty() {
            file.dipole
                .unwrap_or_default()
                .into_iter()
                .map(&rel)
                .collect()
        } else {
            args.dipole.clone()
        };
        let ground = args.ground.clone().or(file.ground.map(&rel));
        let input = match (spectrum, hamiltonian) {
            (Some(_), Some(_)) => {
                return Err(CliError::Invalid(
                    "give either a spectrum file or a hamiltonian with dipoles, not both".into(),
                ))
            }
            (Some(s), None) if dipoles.is_empty() && ground.is_none() => InputSource::Spectrum(s),
            (Some(_), None) => {
                return Err(CliError::Invalid(
                    "dipole and ground files need a hamiltonian".into(),
                ))
            }
            (None, Some(h)) if !dipoles.is_empty() => InputSource::Hamiltonian {
                hamiltonian: h,
                dipoles,
                ground,
            },
            (None, Some(_)) => {
                return Err(CliError::Invalid(
                    "a hamiltonian needs at least one dipole".into(),
                ))
            }
            (None, None) if dipoles.is_empty() && ground.is_none() => InputSource::None,
            (None, None) => {
                return Err(CliError::Invalid(
                    "dipole and ground files need a hamiltonian".into(),
                ))
            }
        };

        let p2 = args.p2.or(file.p2).unwrap_or(0.0);
        if !(0.0..=1.0).contains(&p2) {
            return Err(CliError::Invalid(format!("p2 = {p2} outside [0, 1]")));
        }
        let shots = args.shots.or(file.shots).unwrap_or(DEFAULT_SHOTS);
        if shots == 0 {
            return Err(CliError::Invalid("shots must be at least 1".into()));
        }
        let trotter_steps = args.trotter_steps.or(file.trotter_steps).unwrap_or(1);
        if trotter_steps == 0 {
            return Err(CliError::Invalid("trotter_steps must be at least 1".into()));
        }
        let syndrome_period = args.syndrome_period.or(file.syndrome_period);
        if syndrome_period == Some(0) {
            return Err(CliError::Invalid(
                "syndrome period must be at least 1".into(),
            ));
        }
        let eta = args.eta.or(file.eta);
        if let Some(e) = eta {
            if !(e > 0.0 && e.is_finite()) {
                return Err(CliError::Invalid(format!("eta = {e} must be positive")));
            }
        }
        Ok(Self {
            input,
            n_q: args.nq.or(file.n_q),
            window,
            variant,
            a: args.a.or(file.a),
            e_ref: args.e_ref.or(file.e_ref).unwrap_or(0.0),
            eta,
            shots,
            seed: args.seed.or(file.seed).unwrap_or(0),
            p2,
            syndrome_period,
            trotter_steps,
            dynamic: args.dynamic || file.dynamic.unwrap_or(false),
            shift: args.shift.or(file.shift).unwrap_or(0.0),
            out: args
                .out
                .clone()
                .or(file.out.map(&rel))
                .unwrap_or_else(|| PathBuf::from(".")),
        })
    }

    /// QPE configuration; `default_window` applies when none was given.
    pub fn qpe_config(
        &self,
        default_nq: usize,
        default_window: Option<(f64, f64)>,
    ) -> CliResult<QpeConfig> {
        let (lo, hi) = self.window.or(default_window).ok_or_else(|| {
            CliError::Invalid("an energy window is required (--window MIN MAX)".into())
        })?;
        Ok(QpeConfig::new(
            self.n_q.unwrap_or(default_nq),
            lo,
            hi,
            self.variant,
            self.a,
            self.e_ref,
        )?)
    }

    /// Broadening width; defaults to one bin.
    pub fn eta_for(&self, cfg: &QpeConfig) -> f64 {
        self.eta.unwrap_or_else(|| cfg.bin_width())
    }

    pub fn schedule(&self) -> SyndromeSchedule {
        match self.syndrome_period {
            Some(n) => SyndromeSchedule::Every(n),
            None => SyndromeSchedule::BeforeMeasurements,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "n_q = 5\nomega_min = -1.0\nomega_max = 2.0\nseed = 9\nshots = 50\nspectrum = \"s.txt\"\n").unwrap();
        let args = CommonArgs {
            config: Some(path),
            seed: Some(3),
            ..Default::default()
        };
        let r = RunConfig::resolve(&args).unwrap();
        assert_eq!(
            (r.seed, r.shots, r.n_q, r.window),
            (3, 50, Some(5), Some((-1.0, 2.0)))
        );
        assert_eq!(r.input, InputSource::Spectrum(dir.path().join("s.txt")));
    }

    #[test]
    fn rejects_conflicting_inputs_and_unknown_keys() {
        let both = CommonArgs {
            spectrum: Some("a".into()),
            hamiltonian: Some("b".into()),
            dipole: vec!["c".into()],
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(&both),
            Err(CliError::Invalid(_))
        ));
        let lonely = CommonArgs {
            hamiltonian: Some("b".into()),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(&lonely),
            Err(CliError::Invalid(_))
        ));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        fs::write(&path, "nq = 5\n").unwrap();
        let args = CommonArgs {
            config: Some(path),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(&args),
            Err(CliError::Invalid(_))
        ));
        let missing = CommonArgs {
            config: Some(dir.path().join("absent.toml")),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(&missing),
            Err(CliError::Unreadable(_))
        ));
    }
}
