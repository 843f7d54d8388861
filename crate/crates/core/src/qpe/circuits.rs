//! Ancilla preparations, the QFT and the standard and one-ancilla QPE circuits.
//!
//! Ancilla `m` controls `U^{2^m}` and the readout integer is `k = Σ_m b_m 2^m`. In the
//! standard layout the ancillas are qubits `0..n_q` and the system occupies the qubits
//! above them; in the one-ancilla layout qubit 0 is the ancilla.

use crate::error::{Error, Result};
use crate::operator::{Pauli, PauliSum};
use crate::qpe::{QpeConfig, Variant};
use crate::scalar::Real;
use crate::sim::{exact_evolution_gate, Circuit, Gate, GateOp, State};

/// Qubit roles of a QPE circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QpeLayout {
    /// Ancilla qubit per bit (repeated for the one-ancilla circuit).
    pub ancillas: Vec<usize>,
    pub system: Vec<usize>,
    /// Classical bit `m` receives bit `m` of `k`.
    pub clbits: Vec<usize>,
}

impl QpeLayout {
    pub fn standard(n_q: usize, n_sys: usize) -> Self {
        Self {
            ancillas: (0..n_q).collect(),
            system: (n_q..n_q + n_sys).collect(),
            clbits: (0..n_q).collect(),
        }
    }

    pub fn dynamic(n_q: usize, n_sys: usize) -> Self {
        Self {
            ancillas: vec![0; n_q],
            system: (1..1 + n_sys).collect(),
            clbits: (0..n_q).collect(),
        }
    }
}

/// How the controlled powers of `U` are realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Evolution {
    /// Dense `exp(+2πi t H)` with a quantum control.
    #[default]
    Exact,
    /// First-order product formula with the given number of steps per controlled power,
    /// emitted as uncontrolled Pauli rotations on the ancilla and system.
    Trotter { steps: usize },
}

/// `H` on every ancilla.
pub fn prepare_uniform<T: Real>(n_q: usize) -> Circuit<T> {
    let mut c = Circuit::new(n_q, 0);
    for q in 0..n_q {
        c.h(q);
    }
    c
}

/// `R_Y(2θ_m)` on ancilla `m`, `θ_m = arctan e^{−2^m a}`.
pub fn prepare_slater<T: Real>(n_q: usize, a: T) -> Result<Circuit<T>> {
    if !(a > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "decay rate a = {a} must be positive"
        )));
    }
    let mut c = Circuit::new(n_q, 0);
    for m in 0..n_q {
        c.ry(m, T::lit(2.0) * slater_theta(m, a));
    }
    Ok(c)
}

/// `θ_m = arctan e^{−2^m a}`.
pub fn slater_theta<T: Real>(m: usize, a: T) -> T {
    (-(T::from_count(1usize << m)) * a).exp().atan()
}

/// QFT `|j⟩ → N^{−1/2} Σ_k e^{2πijk/N} |k⟩` with integers read least-significant qubit first.
pub fn qft_circuit<T: Real>(n_q: usize) -> Circuit<T> {
    let mut c = Circuit::new(n_q, 0);
    for a in (0..n_q).rev() {
        c.h(a);
        for b in (0..a).rev() {
            c.cphase(b, a, T::PI() / T::from_count(1usize << (a - b)));
        }
    }
    for a in 0..n_q / 2 {
        c.swap(a, n_q - 1 - a);
    }
    c
}

pub fn iqft_circuit<T: Real>(n_q: usize) -> Circuit<T> {
    qft_circuit(n_q).inverse().expect("unitary")
}

/// `H` and `R_Z(π/N_q − π)` on ancilla 0, QFT, then `Phase(−π 2^m/N_q)` on ancilla `m`.
pub fn prepare_epe<T: Real>(n_q: usize) -> Circuit<T> {
    let n = T::from_count(1usize << n_q);
    let mut c = Circuit::new(n_q, 0);
    c.h(0).rz(0, T::PI() / n - T::PI());
    c.append(&qft_circuit(n_q)).expect("same register");
    for m in 0..n_q {
        c.phase(m, -T::PI() * T::from_count(1usize << m) / n);
    }
    c
}

/// Ancilla input circuit for `cfg`.
pub fn prepare_ancilla<T: Real>(cfg: &QpeConfig<T>) -> Result<Circuit<T>> {
    cfg.validate()?;
    match cfg.variant {
        Variant::Uniform => Ok(prepare_uniform(cfg.n_q)),
        Variant::Epe => Ok(prepare_epe(cfg.n_q)),
        Variant::Slater => prepare_slater(cfg.n_q, cfg.decay()),
    }
}

fn shifted_hamiltonian<T: Real>(cfg: &QpeConfig<T>, h: &PauliSum<T>) -> PauliSum<T> {
    let shift = PauliSum::constant(
        h.n_qubits(),
        num_complex::Complex::new(-cfg.shift(), T::zero()),
    );
    h + &shift
}

fn check_inputs<T: Real>(
    cfg: &QpeConfig<T>,
    h: &PauliSum<T>,
    system_prep: &Circuit<T>,
) -> Result<()> {
    cfg.validate()?;
    let d = h.hermiticity_defect();
    if d > T::lit(1e-10) {
        return Err(Error::NotHermitian(d.to_f64_lossy()));
    }
    if system_prep.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "system preparation spans {} qubits, Hamiltonian {}",
            system_prep.n_qubits(),
            h.n_qubits()
        )));
    }
    if system_prep.n_clbits() != 0 || system_prep.measurement_count() != 0 {
        return Err(Error::InvalidArgument(
            "system preparation must be measurement-free".into(),
        ));
    }
    Ok(())
}

/// Controlled `exp(+2πi t H)` with `control` and `system` qubits of `c`.
pub fn controlled_evolution<T: Real>(
    c: &mut Circuit<T>,
    h: &PauliSum<T>,
    t: T,
    control: usize,
    system: &[usize],
    evolution: Evolution,
) -> Result<()> {
    match evolution {
        Evolution::Exact => {
            c.push_gate(exact_evolution_gate(h, t, system)?.controlled(control)?)?;
        }
        Evolution::Trotter { steps } => {
            if steps == 0 {
                return Err(Error::InvalidArgument("steps must be at least 1".into()));
            }
            let dt = T::TAU() * t / T::from_count(steps);
            for _ in 0..steps {
                for (p, coef) in h.terms() {
                    // Controlled exp(iβP) = exp(iβ/2 P) exp(−iβ/2 Z_c P); exp(iγQ) = R_Q(−2γ).
                    let beta = coef.re * dt;
                    if p.is_identity() {
                        c.phase(control, beta);
                        continue;
                    }
                    let support = p.support();
                    let factors: Vec<Pauli> = support.iter().map(|&q| p.get(q)).collect();
                    let targets: Vec<usize> = support.iter().map(|&q| system[q]).collect();
                    c.push_gate(GateOp::new(
                        Gate::PauliRotation(factors.clone(), -beta),
                        targets.clone(),
                    ))?;
                    let mut zf = vec![Pauli::Z];
                    zf.extend(factors);
                    let mut zt = vec![control];
                    zt.extend(targets);
                    c.push_gate(GateOp::new(Gate::PauliRotation(zf, beta), zt))?;
                }
            }
        }
    }
    Ok(())
}

fn qpe_unitary<T: Real>(
    cfg: &QpeConfig<T>,
    h: &PauliSum<T>,
    system_prep: &Circuit<T>,
) -> Result<Circuit<T>> {
    check_inputs(cfg, h, system_prep)?;
    let n_q = cfg.n_q;
    let layout = QpeLayout::standard(n_q, h.n_qubits());
    let mut c = Circuit::new(n_q + h.n_qubits(), n_q);
    c.append_mapped(system_prep, &layout.system, &[])?;
    c.append_mapped(&prepare_ancilla(cfg)?, &layout.ancillas, &[])?;
    let hs = shifted_hamiltonian(cfg, h);
    let step = cfg.t0() / T::from_count(cfg.n_bins());
    for m in 0..n_q {
        let t = step * T::from_count(1usize << m);
        controlled_evolution(&mut c, &hs, t, m, &layout.system, Evolution::Exact)?;
    }
    c.append_mapped(&iqft_circuit(n_q), &layout.ancillas, &[])?;
    Ok(c)
}

/// Standard QPE: system preparation, ancilla input, controlled powers, inverse QFT and
/// ancilla readout into clbits `0..n_q`.
pub fn build_qpe_circuit<T: Real>(
    cfg: &QpeConfig<T>,
    h: &PauliSum<T>,
    system_prep: &Circuit<T>,
) -> Result<Circuit<T>> {
    let mut c = qpe_unitary(cfg, h, system_prep)?;
    for m in 0..cfg.n_q {
        c.measure(m, m);
    }
    Ok(c)
}

/// One-ancilla QPE with exact controlled powers.
pub fn build_dynamic_qpe_circuit<T: Real>(
    cfg: &QpeConfig<T>,
    h: &PauliSum<T>,
    system_prep: &Circuit<T>,
) -> Result<Circuit<T>> {
    build_dynamic_qpe_circuit_with(cfg, h, system_prep, Evolution::Exact)
}

/// One-ancilla QPE. Round `r` prepares the ancilla for bit `m = n_q − 1 − r`, applies the
/// controlled `U^{2^m}`, undoes the phase of already measured bits with conditioned
/// `Phase(−π/2^{r−j})`, then applies `H`, measures bit `r` of `k` and resets.
pub fn build_dynamic_qpe_circuit_with<T: Real>(
    cfg: &QpeConfig<T>,
    h: &PauliSum<T>,
    system_prep: &Circuit<T>,
    evolution: Evolution,
) -> Result<Circuit<T>> {
    check_inputs(cfg, h, system_prep)?;
    if !cfg.variant.is_product() {
        return Err(Error::Unsupported(
            "the epe input is entangled across ancillas and cannot be prepared one ancilla at a time".into(),
        ));
    }
    let n_q = cfg.n_q;
    let layout = QpeLayout::dynamic(n_q, h.n_qubits());
    let mut c = Circuit::new(1 + h.n_qubits(), n_q);
    c.append_mapped(system_prep, &layout.system, &[])?;
    let hs = shifted_hamiltonian(cfg, h);
    let step = cfg.t0() / T::from_count(cfg.n_bins());
    for r in 0..n_q {
        let m = n_q - 1 - r;
        match cfg.variant {
            Variant::Slater => c.ry(0, T::lit(2.0) * slater_theta(m, cfg.decay())),
            _ => c.h(0),
        };
        controlled_evolution(
            &mut c,
            &hs,
            step * T::from_count(1usize << m),
            0,
            &layout.system,
            evolution,
        )?;
        for j in 0..r {
            c.conditioned(
                Gate::Phase(-T::PI() / T::from_count(1usize << (r - j))),
                &[0],
                j,
                true,
            );
        }
        c.h(0).measure(0, r).reset(0);
    }
    Ok(c)
}

/// Exact ancilla outcome distribution of standard QPE on `input`.
pub fn simulate_ancilla_distribution<T: Real>(
    cfg: &QpeConfig<T>,
    h: &PauliSum<T>,
    input: &State<T>,
) -> Result<Vec<T>> {
    if input.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch(
            "input state and Hamiltonian registers differ".into(),
        ));
    }
    let empty = Circuit::new(h.n_qubits(), 0);
    let c = qpe_unitary(cfg, h, &empty)?;
    let mut s = input.tensor(&State::zero(cfg.n_q));
    c.apply_unitary(&mut s)?;
    s.marginal(&(0..cfg.n_q).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::qpe::alpha::{epe_amplitudes, slater_amplitudes};
    use crate::qpe::spectrum::{analytic_pk, EigenSpectrum};
    use crate::sim::{amplitude_encode, exact_distribution, marginalize_bits};
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn run(c: &Circuit<f64>) -> State<f64> {
        let mut s = State::zero(c.n_qubits());
        c.apply_unitary(&mut s).unwrap();
        s
    }

    fn real_parts_match(s: &State<f64>, expect: &[f64], tol: f64) {
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < tol && a.im.abs() < tol, "{a} vs {e}");
        }
    }

    #[test]
    fn uniform_amplitudes() {
        let r = 1.0 / 8f64.sqrt();
        real_parts_match(&run(&prepare_uniform(3)), &[r; 8], 1e-14);
    }

    #[test]
    fn epe_matches_sine_profile() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        real_parts_match(&run(&prepare_epe(1)), &[r, r], 1e-12);
        for n_q in 1..=6 {
            let s = run(&prepare_epe::<f64>(n_q));
            real_parts_match(&s, &epe_amplitudes(n_q), 1e-10);
        }
    }

    #[test]
    fn slater_matches_profile() {
        assert!((slater_theta(0, 0.1f64) - 0.735481289).abs() < 1e-9);
        let s = run(&prepare_slater(3, 0.2).unwrap());
        real_parts_match(&s, &slater_amplitudes(3, 0.2), 1e-12);
        let amps = s.amplitudes();
        assert!((amps[1].re / amps[0].re - (-0.2f64).exp()).abs() < 1e-10);
        let tiny = run(&prepare_slater(3, 1e-12).unwrap());
        real_parts_match(&tiny, &[1.0 / 8f64.sqrt(); 8], 1e-6);
    }

    #[test]
    fn qft_is_dft() {
        for n_q in 1..=4 {
            let n = 1usize << n_q;
            let m = qft_circuit::<f64>(n_q).to_matrix().unwrap();
            let dft = CMatrix::from_fn(n, n, |k, j| {
                crate::scalar::cis(std::f64::consts::TAU * (j * k) as f64 / n as f64)
                    / (n as f64).sqrt()
            });
            assert!(m.max_abs_diff(&dft) < 1e-10);
            let id = &m * &iqft_circuit::<f64>(n_q).to_matrix().unwrap();
            assert!(id.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
        }
        assert!(
            qft_circuit::<f64>(1)
                .to_matrix()
                .unwrap()
                .max_abs_diff(&Gate::H.matrix())
                < 1e-15
        );
    }

    fn random_hamiltonian(rng: &mut ChaCha8Rng, n: usize) -> PauliSum<f64> {
        let mut terms = Vec::new();
        for _ in 0..6 {
            let label: String = (0..n)
                .map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)])
                .collect();
            terms.push((Complex::new(rng.gen_range(-1.0..1.0), 0.0), label));
        }
        let refs: Vec<(Complex<f64>, &str)> = terms.iter().map(|(c, l)| (*c, l.as_str())).collect();
        PauliSum::from_labels(&refs).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> State<f64> {
        let v = (0..1 << n)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        State::from_amplitudes_unchecked(n, v).normalized()
    }

    #[test]
    fn on_grid_peak_is_certain() {
        // H = 0.75 Z on |1⟩: E = −0.75, window [−1, 1], n_q = 3 → t₀ = 4, k = 1.
        let h = PauliSum::<f64>::from_labels(&[(Complex::new(0.75, 0.0), "Z")]).unwrap();
        let cfg = QpeConfig::<f64>::uniform(3, -1.0, 1.0).unwrap();
        let p = simulate_ancilla_distribution(&cfg, &h, &State::basis(1, 1).unwrap()).unwrap();
        assert!((p[1] - 1.0).abs() < 1e-10);
        let mut prep = Circuit::new(1, 0);
        prep.x(0);
        let d = exact_distribution(
            &build_dynamic_qpe_circuit(&cfg, &h, &prep).unwrap(),
            &State::zero(2),
        )
        .unwrap();
        assert!((d[&1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn half_bin_offset_matches_closed_form() {
        // E = 0.125 with t₀ = 4 sits between bins 0 and 1.
        let h = PauliSum::from_labels(&[(Complex::new(0.125, 0.0), "I")]).unwrap();
        let cfg = QpeConfig::uniform(3, 0.0, 2.0).unwrap();
        let p = simulate_ancilla_distribution(&cfg, &h, &State::zero(1)).unwrap();
        for (k, pk) in p.iter().enumerate() {
            let x = 0.5 - k as f64;
            assert!((pk - crate::qpe::alpha::alpha_uniform_sq_closed(x, 3)).abs() < 1e-10);
        }
    }

    #[test]
    fn simulation_matches_analytic_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for v in Variant::ALL {
            let h = random_hamiltonian(&mut rng, 2);
            let psi = random_state(&mut rng, 2);
            let a = (v == Variant::Slater).then_some(0.15);
            let cfg = QpeConfig::new(3, -2.0, 3.0, v, a, -0.4).unwrap();
            let p = simulate_ancilla_distribution(&cfg, &h, &psi).unwrap();
            let spec = EigenSpectrum::from_hamiltonian(&h, &[psi]).unwrap();
            let q = analytic_pk(&spec, &cfg).unwrap();
            assert!(p.iter().zip(&q).all(|(x, y)| (x - y).abs() < 1e-9), "{v}");
        }
    }

    #[test]
    fn dynamic_matches_standard() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for v in [Variant::Uniform, Variant::Slater] {
            let h = random_hamiltonian(&mut rng, 2);
            let psi = random_state(&mut rng, 2);
            let prep = amplitude_encode(&psi).unwrap();
            let a = (v == Variant::Slater).then_some(0.3);
            let cfg = QpeConfig::new(4, -3.0, 3.0, v, a, 0.0).unwrap();
            let c = build_dynamic_qpe_circuit(&cfg, &h, &prep).unwrap();
            assert_eq!(c.measurement_count(), 4);
            assert_eq!(c.n_qubits(), 3);
            let d = exact_distribution(&c, &State::zero(3)).unwrap();
            let dyn_p = marginalize_bits(&d, &[0, 1, 2, 3]);
            let std_p = simulate_ancilla_distribution(&cfg, &h, &psi).unwrap();
            assert!(
                dyn_p.iter().zip(&std_p).all(|(x, y)| (x - y).abs() < 1e-9),
                "{v}"
            );
            let sd = exact_distribution(
                &build_qpe_circuit(&cfg, &h, &prep).unwrap(),
                &State::zero(6),
            )
            .unwrap();
            let sp = marginalize_bits(&sd, &[0, 1, 2, 3]);
            assert!(sp.iter().zip(&std_p).all(|(x, y)| (x - y).abs() < 1e-9));
        }
    }

    #[test]
    fn trotter_dynamic_matches_exact_for_commuting_terms() {
        let h = PauliSum::<f64>::from_labels(&[
            (Complex::new(0.4, 0.0), "ZZ"),
            (Complex::new(-0.3, 0.0), "ZI"),
            (Complex::new(0.2, 0.0), "II"),
        ])
        .unwrap();
        let mut prep = Circuit::new(2, 0);
        prep.h(0).h(1);
        let cfg = QpeConfig::<f64>::uniform(3, -1.0, 1.0).unwrap();
        let a = exact_distribution(
            &build_dynamic_qpe_circuit(&cfg, &h, &prep).unwrap(),
            &State::zero(3),
        )
        .unwrap();
        let b = exact_distribution(
            &build_dynamic_qpe_circuit_with(&cfg, &h, &prep, Evolution::Trotter { steps: 1 })
                .unwrap(),
            &State::zero(3),
        )
        .unwrap();
        let pa = marginalize_bits(&a, &[0, 1, 2]);
        let pb = marginalize_bits(&b, &[0, 1, 2]);
        assert!(pa.iter().zip(&pb).all(|(x, y)| (x - y).abs() < 1e-10));
    }

    #[test]
    fn epe_rejected_for_dynamic() {
        let h = PauliSum::<f64>::from_labels(&[(Complex::new(1.0, 0.0), "Z")]).unwrap();
        let cfg = QpeConfig::new(3, 0.0, 1.0, Variant::Epe, None, 0.0).unwrap();
        assert!(matches!(
            build_dynamic_qpe_circuit(&cfg, &h, &Circuit::new(1, 0)),
            Err(Error::Unsupported(_))
        ));
    }
}
