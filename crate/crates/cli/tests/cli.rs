//! End-to-end runs of the `qpexas` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qpexas::sim::Histogram;
use qpexas::spectra::l2_distance;
use qpexas::SpectrumSeries;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn qpexas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpexas"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = qpexas(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn series(path: &Path) -> SpectrumSeries {
    SpectrumSeries::from_csv(&fs::read_to_string(path).unwrap()).unwrap()
}

fn histogram(path: &Path) -> Vec<f64> {
    Histogram::from_csv(&fs::read_to_string(path).unwrap())
        .unwrap()
        .probabilities()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn two_level_spectrum_has_hand_computed_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let (h, mu, g) = (data("h_z.txt"), data("mu_x.txt"), data("ground.txt"));
    ok(&[
        "spectrum",
        "--hamiltonian",
        s(&h),
        "--dipole",
        s(&mu),
        "--ground",
        s(&g),
        "--window",
        "-2",
        "2",
        "--nq",
        "4",
        "--out",
        s(dir.path()),
    ]);
    let pk = series(&dir.path().join("pk.csv"));
    // X(√0.8|0⟩ + √0.2|1⟩) puts 0.2 on E = +1 and 0.8 on E = −1; both sit on the grid.
    for (w, p) in pk.omega().iter().zip(pk.intensity()) {
        let want = match *w {
            w if (w + 1.0).abs() < 1e-12 => 0.8,
            w if (w - 1.0).abs() < 1e-12 => 0.2,
            _ => 0.0,
        };
        assert!((p - want).abs() < 1e-12, "{w}: {p}");
    }
    let sp = series(&dir.path().join("spectrum.csv"));
    assert!((sp.intensity().iter().sum::<f64>() - 1.0).abs() < 1e-9);

    // Without a ground-state file the lowest eigenvector |1⟩ is used: one peak at +1.
    ok(&[
        "spectrum",
        "--hamiltonian",
        s(&h),
        "--dipole",
        s(&mu),
        "--window",
        "-2",
        "2",
        "--nq",
        "4",
        "--out",
        s(dir.path()),
    ]);
    let pk = series(&dir.path().join("pk.csv"));
    assert!((pk.intensity()[12] - 1.0).abs() < 1e-12);
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.txt");
    let out = qpexas(&["spectrum", "--spectrum", s(&missing), "--window", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.txt"));

    let spec = data("three_peaks.txt");
    let epe = qpexas(&[
        "simulate",
        "--spectrum",
        s(&spec),
        "--window",
        "0",
        "1",
        "--variant",
        "epe",
        "--dynamic",
    ]);
    assert_eq!(epe.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&epe.stderr).contains("entangled"));

    assert_eq!(
        qpexas(&["spectrum", "--spectrum", s(&spec)]).status.code(),
        Some(1)
    );
    assert_eq!(qpexas(&["spectrum", "--nq", "many"]).status.code(), Some(1));
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "n_q = 4\nunknown = 1\n").unwrap();
    assert_eq!(
        qpexas(&["spectrum", "--config", s(&cfg)]).status.code(),
        Some(1)
    );

    let out = qpexas(&["qed", "--p2", "1", "--shots", "10", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_drives_a_run_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "n_q = 3\nomega_min = 0.0\nomega_max = 1.0\nvariant = \"slater\"\na = 0.2\ne_ref = 0.0\n\
             shots = 100\nseed = 5\nspectrum = \"{}\"\n",
            data("three_peaks.txt").display()
        ),
    )
    .unwrap();
    ok(&[
        "simulate",
        "--config",
        s(&cfg),
        "--nq",
        "4",
        "--out",
        s(dir.path()),
    ]);
    let h = Histogram::from_csv(&fs::read_to_string(dir.path().join("histogram.csv")).unwrap())
        .unwrap();
    assert_eq!((h.n_bits(), h.total()), (4, 100));
}

#[test]
fn noiseless_on_grid_simulation_is_one_hot() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("one.txt");
    fs::write(&spec, "0.375 1\n").unwrap();
    ok(&[
        "simulate",
        "--spectrum",
        s(&spec),
        "--window",
        "0",
        "1",
        "--nq",
        "3",
        "--shots",
        "200",
        "--out",
        s(dir.path()),
    ]);
    let p = histogram(&dir.path().join("histogram.csv"));
    assert_eq!(p[3], 1.0);
}

#[test]
fn dynamic_and_standard_histograms_agree_statistically() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("three_peaks.txt");
    let base = [
        "simulate",
        "--spectrum",
        s(&spec),
        "--window",
        "0",
        "1",
        "--nq",
        "4",
        "--shots",
        "100000",
    ];
    let (a, b) = (dir.path().join("std"), dir.path().join("dyn"));
    ok(&[&base[..], &["--out", s(&a)]].concat());
    ok(&[&base[..], &["--out", s(&b), "--dynamic", "--seed", "1"]].concat());
    let d = l2_distance(
        &histogram(&a.join("histogram.csv")),
        &histogram(&b.join("histogram.csv")),
    )
    .unwrap();
    assert!(d < 0.02, "{d}");
}

#[test]
fn depolarizing_noise_moves_the_histogram_away_from_the_law() {
    let dir = tempfile::tempdir().unwrap();
    let (h, mu, g) = (data("h_z.txt"), data("mu_x.txt"), data("ground.txt"));
    let base = [
        "--hamiltonian",
        s(&h),
        "--dipole",
        s(&mu),
        "--ground",
        s(&g),
        "--window",
        "-2",
        "2",
        "--nq",
        "4",
    ];
    let law = dir.path().join("law");
    ok(&[&["spectrum"][..], &base, &["--out", s(&law)]].concat());
    let pk = series(&law.join("pk.csv")).intensity().to_vec();
    let mut err = Vec::new();
    for p2 in ["0", "0.01"] {
        let o = dir.path().join(p2);
        ok(&[
            &["simulate"][..],
            &base,
            &["--shots", "20000", "--p2", p2, "--out", s(&o)],
        ]
        .concat());
        err.push(l2_distance(&histogram(&o.join("histogram.csv")), &pk).unwrap());
    }
    assert!(err[1] > err[0], "{err:?}");
}

#[test]
fn qed_without_noise_discards_nothing() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["qed", "--p2", "0", "--shots", "300", "--out", s(dir.path())]);
    let discard = fs::read_to_string(dir.path().join("discard.csv")).unwrap();
    for (_, d) in qpexas::iceberg::parse_discard_points(&discard).unwrap() {
        assert_eq!(d, 0.0);
    }
    let h = Histogram::from_csv(&fs::read_to_string(dir.path().join("histogram_qed.csv")).unwrap())
        .unwrap();
    assert_eq!(h.total(), 300);
    for name in [
        "spectrum_noiseless.csv",
        "spectrum_qed.csv",
        "spectrum_noqed.csv",
    ] {
        let sp = series(&dir.path().join(name));
        assert!((sp.intensity().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn fitted_rate_matches_the_planted_rate() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "fit-discard",
        "--p2",
        "2.2e-3",
        "--shots",
        "5000",
        "--seed",
        "11",
        "--out",
        s(dir.path()),
    ]);
    let fit = fs::read_to_string(dir.path().join("p2_fit.csv")).unwrap();
    let p2: f64 = fit
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((p2 / 2.2e-3 - 1.0).abs() < 0.1, "{p2}");

    let table = dir.path().join("discard.csv");
    let again = dir.path().join("again");
    ok(&["fit-discard", s(&table), "--out", s(&again)]);
    assert_eq!(fit, fs::read_to_string(again.join("p2_fit.csv")).unwrap());
}

#[test]
fn compare_reports_l2_error() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (data("regression_uniform.csv"), data("regression_epe.csv"));
    let text = |o: Output| String::from_utf8(o.stdout).unwrap().trim().to_string();
    assert_eq!(text(ok(&["compare", s(&a), s(&a)])), "0.000000000000e0");
    // Golden value produced by `spectrum` for the three-peak instance (uniform vs epe).
    assert_eq!(text(ok(&["compare", s(&a), s(&b)])), "7.314295800117e-3");

    let one_hot = |k: usize, name: &str| {
        let p = dir.path().join(name);
        let v: Vec<f64> = (0..4).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        fs::write(
            &p,
            SpectrumSeries::new(vec![0.0, 0.25, 0.5, 0.75], v)
                .unwrap()
                .to_csv(0.0),
        )
        .unwrap();
        p
    };
    let (x, y) = (one_hot(1, "x.csv"), one_hot(2, "y.csv"));
    let d: f64 = text(ok(&["compare", s(&x), s(&y)])).parse().unwrap();
    assert!((d - 2f64.sqrt()).abs() < 1e-12);

    let short = dir.path().join("short.csv");
    fs::write(&short, "omega,intensity\n0e0,1e0\n5e-1,0e0\n").unwrap();
    assert_eq!(
        qpexas(&["compare", s(&x), s(&short)]).status.code(),
        Some(1)
    );
    let junk = dir.path().join("junk.csv");
    fs::write(&junk, "omega,intensity\nzero,1\n").unwrap();
    assert_eq!(qpexas(&["compare", s(&x), s(&junk)]).status.code(), Some(2));
}
