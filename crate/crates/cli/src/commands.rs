//! Subcommand implementations. Each returns the files it wrote.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qpexas::iceberg::{
    discard_benchmark_circuit, fit_p2, parse_discard_points, run_with_discard, IcebergLayout,
    P2Fit, QpeWorkload,
};
use qpexas::qpe::{analytic_pk, build_dynamic_qpe_circuit, build_qpe_circuit, Variant};
use qpexas::sim::{amplitude_encode, derive_seed, run_shots, Histogram, NoiseModel, State};
use qpexas::spectra::{common_grid, l2_distance, l2_error, reference_spectrum, PostProcess};
use qpexas::{QpeConfig, SpectrumSeries};

use crate::config::{RunConfig, DEFAULT_NQ};
use crate::error::{CliError, CliResult};
use crate::input::Problem;

/// Layers of transversal CNOTs in the discard benchmark (four CNOTs each).
pub const BENCHMARK_LAYERS: usize = 224;
/// Default two-qubit gates between benchmark checks.
pub const BENCHMARK_PERIOD: usize = 64;
/// Default ancilla count for the encoded pipeline.
pub const QED_NQ: usize = 4;

struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Invalid(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, text: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, text)
            .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }
}

fn require(problem: Option<Problem>) -> CliResult<Problem> {
    problem.ok_or_else(|| {
        CliError::Invalid(
            "an input is required (--spectrum, or --hamiltonian with --dipole)".into(),
        )
    })
}

fn bin_series(p: &[f64], cfg: &QpeConfig) -> CliResult<SpectrumSeries> {
    Ok(SpectrumSeries::new(
        (0..p.len()).map(|k| cfg.bin_energy(k)).collect(),
        p.to_vec(),
    )?)
}

fn fit_csv(fit: &P2Fit) -> String {
    format!("p2,residual\n{:e},{:e}\n", fit.p2, fit.residual)
}

/// Analytic outcome law, its post-processed spectrum and the broadened exact spectrum.
pub fn spectrum(rc: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let problem = require(Problem::load(&rc.input)?)?;
    let cfg = rc.qpe_config(DEFAULT_NQ, None)?;
    let eta = rc.eta_for(&cfg);
    let grid = common_grid(&cfg);
    let pk = analytic_pk(&problem.spectrum, &cfg)?;
    let mut out = Output::new(&rc.out)?;
    out.write("pk.csv", &bin_series(&pk, &cfg)?.to_csv(rc.shift))?;
    let s = PostProcess::for_variant(cfg.variant, eta).apply(&pk, &cfg, &grid)?;
    out.write("spectrum.csv", &s.to_csv(rc.shift))?;
    let r = reference_spectrum(&problem.spectrum, &grid, eta)?;
    out.write("reference.csv", &r.to_csv(rc.shift))?;
    Ok(out.written)
}

/// Finite-shot statevector QPE; polarization `ν` runs under `derive_seed(seed, ν)`.
pub fn simulate(rc: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let problem = require(Problem::load(&rc.input)?)?;
    let cfg = rc.qpe_config(DEFAULT_NQ, None)?;
    if rc.dynamic && cfg.variant == Variant::Epe {
        return Err(CliError::Invalid(
            "--dynamic cannot run the epe variant: its ancilla input is entangled and cannot be \
             prepared one ancilla at a time"
                .into(),
        ));
    }
    let noise = NoiseModel::depolarizing(rc.p2)?;
    let bits: Vec<usize> = (0..cfg.n_q).collect();
    let mut hist = Histogram::new(cfg.n_q);
    for (nu, (h, psi)) in problem.instances.iter().enumerate() {
        let prep = amplitude_encode(psi)?;
        let circuit = if rc.dynamic {
            build_dynamic_qpe_circuit(&cfg, h, &prep)?
        } else {
            build_qpe_circuit(&cfg, h, &prep)?
        };
        let input = State::zero(circuit.n_qubits());
        let (h_nu, _) = run_shots(
            &circuit,
            &input,
            rc.shots,
            &noise,
            derive_seed(rc.seed, nu as u64),
        )?;
        hist.merge(&h_nu.marginal(&bits))?;
    }
    let p = hist.probabilities()?;
    let grid = common_grid(&cfg);
    let s = PostProcess::for_variant(cfg.variant, rc.eta_for(&cfg)).apply(&p, &cfg, &grid)?;
    let mut out = Output::new(&rc.out)?;
    out.write("histogram.csv", &hist.to_csv())?;
    out.write("spectrum.csv", &s.to_csv(rc.shift))?;
    Ok(out.written)
}

/// Dynamic QPE under the Iceberg code against the unencoded circuit on matched seeds.
/// Without an input file the built-in four-logical-qubit workload is used.
pub fn qed(rc: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let (h, psi, default_window) = match Problem::load(&rc.input)? {
        Some(p) => {
            if p.instances.len() != 1 {
                return Err(CliError::Invalid("qed runs a single polarization".into()));
            }
            let (h, psi) = p.instances.into_iter().next().expect("one instance");
            (h, psi, None)
        }
        None => {
            let m = QpeWorkload::<f64>::model(4, 1, Variant::Uniform, None)?;
            let w = (m.config.omega_min, m.config.omega_max);
            (m.hamiltonian, m.input, Some(w))
        }
    };
    let cfg = rc.qpe_config(QED_NQ, default_window)?;
    let workload = QpeWorkload::new(h, psi, cfg, rc.trotter_steps)?;
    let layout = IcebergLayout::standard(1 + workload.hamiltonian.n_qubits())?;
    let noise = NoiseModel::depolarizing(rc.p2)?;
    let cmp = workload.compare_qed(
        &layout,
        rc.schedule(),
        &noise,
        rc.shots,
        derive_seed(rc.seed, 0),
    )?;

    let grid = common_grid(&cfg);
    let post = PostProcess::for_variant(cfg.variant, rc.eta_for(&cfg));
    let noiseless = post.apply(&cmp.exact, &cfg, &grid)?;
    let bare_p = cmp
        .bare
        .accepted
        .as_ref()
        .expect("no detectors")
        .probabilities()?;
    let bare_s = post.apply(&bare_p, &cfg, &grid)?;

    let mut out = Output::new(&rc.out)?;
    out.write("discard.csv", &cmp.encoded.stats.to_csv())?;
    if let Ok(fit) = fit_p2(&cmp.encoded.stats.points()) {
        out.write("p2_fit.csv", &fit_csv(&fit))?;
    }
    out.write("spectrum_noiseless.csv", &noiseless.to_csv(rc.shift))?;
    out.write(
        "histogram_noqed.csv",
        &cmp.bare.accepted.as_ref().expect("no detectors").to_csv(),
    )?;
    out.write("spectrum_noqed.csv", &bare_s.to_csv(rc.shift))?;

    let mut summary = String::from("quantity,value\n");
    let _ = writeln!(summary, "n2q_qed,{}", cmp.compiled_n2q);
    let _ = writeln!(summary, "n2q_noqed,{}", cmp.bare_n2q);
    let _ = writeln!(
        summary,
        "discard_rate,{:e}",
        cmp.encoded.stats.discard_rate()
    );
    let _ = writeln!(
        summary,
        "histogram_l2_noqed,{:e}",
        l2_distance(&bare_p, &cmp.exact)?
    );
    let _ = writeln!(
        summary,
        "spectrum_l2_noqed,{:e}",
        l2_error(&bare_s, &noiseless)?
    );
    let Some(acc) = &cmp.encoded.accepted else {
        out.write("summary.csv", &summary)?;
        return Err(CliError::NoAccepted(format!(
            "all {} shots were discarded",
            cmp.encoded.stats.total
        )));
    };
    let qed_p = acc.probabilities()?;
    let qed_s = post.apply(&qed_p, &cfg, &grid)?;
    out.write("histogram_qed.csv", &acc.to_csv())?;
    out.write("spectrum_qed.csv", &qed_s.to_csv(rc.shift))?;
    let _ = writeln!(
        summary,
        "histogram_l2_qed,{:e}",
        l2_distance(&qed_p, &cmp.exact)?
    );
    let _ = writeln!(
        summary,
        "spectrum_l2_qed,{:e}",
        l2_error(&qed_s, &noiseless)?
    );
    out.write("summary.csv", &summary)?;
    Ok(out.written)
}

/// Fits `p₂` to a discard table, or to a noisy run of the two-block transversal-CNOT
/// benchmark when no table is given.
pub fn fit_discard(rc: &RunConfig, table: Option<&Path>) -> CliResult<Vec<PathBuf>> {
    let mut out = Output::new(&rc.out)?;
    let points = match table {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::unreadable(path, e))?;
            parse_discard_points(&text).map_err(|e| CliError::unreadable(path, e))?
        }
        None => {
            let period = rc.syndrome_period.unwrap_or(BENCHMARK_PERIOD);
            let circuit =
                discard_benchmark_circuit::<f64>(BENCHMARK_LAYERS, Some((period / 4).max(1)))?;
            let noise = NoiseModel::depolarizing(rc.p2)?;
            let run = run_with_discard(&circuit, &[], &noise, rc.shots, derive_seed(rc.seed, 0))?;
            out.write("discard.csv", &run.stats.to_csv())?;
            run.stats.points()
        }
    };
    let fit = fit_p2(&points)?;
    out.write("p2_fit.csv", &fit_csv(&fit))?;
    Ok(out.written)
}

fn read_series(path: &Path) -> CliResult<SpectrumSeries> {
    let text = fs::read_to_string(path).map_err(|e| CliError::unreadable(path, e))?;
    SpectrumSeries::from_csv(&text).map_err(|e| CliError::unreadable(path, e))
}

/// ℓ² error between two spectra on the same grid.
pub fn compare(a: &Path, b: &Path) -> CliResult<f64> {
    let (sa, sb) = (read_series(a)?, read_series(b)?);
    l2_error(&sa, &sb)
        .map_err(|e| CliError::Invalid(format!("{} vs {}: {e}", a.display(), b.display())))
}
