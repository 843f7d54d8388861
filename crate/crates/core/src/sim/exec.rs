//! Circuit execution: pure runs, noisy shots and exact branch enumeration.
//!
//! Randomness per shot comes from `ChaCha8Rng::seed_from_u64(seed ^ shot_index)`.
//! Stream 0 of that generator drives noise events and stream 1 drives measurements, so
//! noise draws never depend on the quantum state. A measurement draws one uniform `u`
//! and reports 0 iff `u < P(0)`; a reset performs an unrecorded measurement and flips a
//! 1 back to 0. A noisy gate draws one uniform for the event and, if it fires, one index
//! among the `4^m − 1` non-identity Paulis on its `m` qubits (controls first, then
//! targets; factor `j` of the index in base 4 acts on qubit `j` with `0..4 = I,X,Y,Z`).

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::{Pauli, PauliString};
use crate::scalar::{cis, Real};
use crate::sim::circuit::{Circuit, GateOp, Instruction};
use crate::sim::gate::Gate;
use crate::sim::histogram::Histogram;
use crate::sim::state::{ControlMask, State};

/// Two-qubit depolarizing noise and optional readout flips.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiseModel {
    pub p2: f64,
    pub p_spam: f64,
}

impl NoiseModel {
    pub fn new(p2: f64, p_spam: f64) -> Result<Self> {
        for (name, p) in [("p2", p2), ("p_spam", p_spam)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {p} outside [0, 1]"
                )));
            }
        }
        Ok(Self { p2, p_spam })
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn depolarizing(p2: f64) -> Result<Self> {
        Self::new(p2, 0.0)
    }

    pub fn is_noiseless(&self) -> bool {
        self.p2 == 0.0 && self.p_spam == 0.0
    }
}

/// Pauli injected after instruction `instruction`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoiseEvent {
    pub instruction: usize,
    pub factors: Vec<(usize, Pauli)>,
}

/// Outcome of one shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    /// Classical register, bit `c` is clbit `c`.
    pub bits: u64,
    /// Set by detection layers; `false` after plain execution.
    pub discarded: bool,
    pub seed: u64,
    pub events: Vec<NoiseEvent>,
    /// Noise locations visited (executed non-ideal multi-qubit gates).
    pub noisy_gates_executed: usize,
}

/// Seed for shot `index` under top-level `seed`.
pub fn shot_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// Independent top-level seed for component `stream`: SplitMix64 of `seed` advanced
/// `stream + 1` times. Derived seeds sit far apart, so `shot_seed` ranges do not overlap.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

enum Kernel<T> {
    One {
        q: usize,
        m: [Complex<T>; 4],
    },
    Cx {
        c: usize,
        t: usize,
    },
    Diag {
        targets: Vec<usize>,
        d: Vec<Complex<T>>,
    },
    Phase(Complex<T>),
    Dense {
        targets: Vec<usize>,
        m: Vec<Complex<T>>,
    },
}

struct Prepared<T> {
    kernel: Kernel<T>,
    ctrl: ControlMask,
}

fn prepare<T: Real>(g: &GateOp<T>) -> Prepared<T> {
    let ctrl = ControlMask::from_controls(&g.controls);
    let kernel = match &g.gate {
        Gate::GlobalPhase(a) => Kernel::Phase(cis(*a)),
        Gate::Cx => Kernel::Cx {
            c: g.targets[0],
            t: g.targets[1],
        },
        gate => {
            if let Some(d) = gate.diagonal() {
                Kernel::Diag {
                    targets: g.targets.clone(),
                    d,
                }
            } else if g.targets.len() == 1 {
                let m = gate.matrix();
                Kernel::One {
                    q: g.targets[0],
                    m: [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]],
                }
            } else {
                Kernel::Dense {
                    targets: g.targets.clone(),
                    m: gate.matrix().data().to_vec(),
                }
            }
        }
    };
    Prepared { kernel, ctrl }
}

fn run_kernel<T: Real>(state: &mut State<T>, p: &Prepared<T>) {
    match &p.kernel {
        Kernel::One { q, m } => state.apply_1q(*q, m, p.ctrl),
        Kernel::Cx { c, t } => state.apply_cx(*c, *t, p.ctrl),
        Kernel::Diag { targets, d } => state.apply_diagonal(targets, d, p.ctrl),
        Kernel::Phase(ph) => state.apply_phase(*ph, p.ctrl),
        Kernel::Dense { targets, m } => state.apply_matrix(targets, m, p.ctrl),
    }
}

/// Applies one gate instruction, ignoring any classical condition.
pub fn apply_gate_op<T: Real>(state: &mut State<T>, g: &GateOp<T>) {
    run_kernel(state, &prepare(g));
}

/// Validated single-gate application.
pub fn apply_gate<T: Real>(state: &mut State<T>, g: &GateOp<T>) -> Result<()> {
    for q in g.qubits() {
        state.check_qubit(q)?;
    }
    if g.targets.len() != g.gate.arity() {
        return Err(Error::InvalidArgument(format!(
            "{} expects {} targets",
            g.gate,
            g.gate.arity()
        )));
    }
    if let Gate::Unitary(m, _) = &g.gate {
        m.check_unitary(T::lit(1e-10))?;
    }
    apply_gate_op(state, g);
    Ok(())
}

enum Step<T> {
    Gate {
        prepared: Prepared<T>,
        condition: Option<(usize, bool)>,
        noise_qubits: Option<Vec<usize>>,
        index: usize,
    },
    Measure {
        qubit: usize,
        clbit: usize,
    },
    Reset {
        qubit: usize,
    },
}

/// Circuit lowered to prepared kernels, with adjacent uncontrolled single-qubit gates fused.
pub struct Program<T> {
    n_qubits: usize,
    n_clbits: usize,
    steps: Vec<Step<T>>,
}

impl<T: Real> Program<T> {
    pub fn new(circuit: &Circuit<T>) -> Result<Self> {
        if circuit.n_clbits() > 64 {
            return Err(Error::Unsupported("more than 64 classical bits".into()));
        }
        let mut steps: Vec<Step<T>> = Vec::new();
        for (index, ins) in circuit.instructions().iter().enumerate() {
            match ins {
                Instruction::Gate(g) => {
                    let prepared = prepare(g);
                    let condition = g.condition.map(|c| (c.clbit, c.value));
                    let noise_qubits = (!g.ideal && g.n_qubits_touched() >= 2).then(|| g.qubits());
                    if let (Kernel::One { q, m }, None, None, true) = (
                        &prepared.kernel,
                        condition,
                        &noise_qubits,
                        prepared.ctrl.mask == 0,
                    ) {
                        if let Some(Step::Gate {
                            prepared: prev,
                            condition: None,
                            noise_qubits: None,
                            ..
                        }) = steps.last_mut()
                        {
                            if let (Kernel::One { q: pq, m: pm }, 0) =
                                (&mut prev.kernel, prev.ctrl.mask)
                            {
                                if *pq == *q {
                                    *pm = mul2(m, pm);
                                    continue;
                                }
                            }
                        }
                    }
                    steps.push(Step::Gate {
                        prepared,
                        condition,
                        noise_qubits,
                        index,
                    });
                }
                Instruction::Measure { qubit, clbit } => steps.push(Step::Measure {
                    qubit: *qubit,
                    clbit: *clbit,
                }),
                Instruction::Reset { qubit } => steps.push(Step::Reset { qubit: *qubit }),
                Instruction::Barrier(_) => {}
            }
        }
        Ok(Self {
            n_qubits: circuit.n_qubits(),
            n_clbits: circuit.n_clbits(),
            steps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    fn check_input(&self, input: &State<T>) -> Result<()> {
        if input.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit input for a {}-qubit circuit",
                input.n_qubits(),
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Runs one shot from `input`; returns the final state and the shot record.
    pub fn run_shot(
        &self,
        input: &State<T>,
        noise: &NoiseModel,
        seed: u64,
    ) -> Result<(State<T>, ShotRecord)> {
        self.check_input(input)?;
        let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
        noise_rng.set_stream(0);
        let mut meas_rng = ChaCha8Rng::seed_from_u64(seed);
        meas_rng.set_stream(1);
        let mut state = input.clone();
        let mut bits = 0u64;
        let mut events = Vec::new();
        let mut visited = 0usize;
        for step in &self.steps {
            match step {
                Step::Gate {
                    prepared,
                    condition,
                    noise_qubits,
                    index,
                } => {
                    if let Some((c, v)) = condition {
                        if (bits >> c & 1 == 1) != *v {
                            continue;
                        }
                    }
                    run_kernel(&mut state, prepared);
                    if let Some(qs) = noise_qubits {
                        visited += 1;
                        if noise.p2 > 0.0 && noise_rng.gen::<f64>() < noise.p2 {
                            let count = 1u64 << (2 * qs.len());
                            let idx = noise_rng.gen_range(1..count);
                            let factors: Vec<(usize, Pauli)> = qs
                                .iter()
                                .enumerate()
                                .map(|(j, &q)| {
                                    (
                                        q,
                                        [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]
                                            [(idx >> (2 * j) & 3) as usize],
                                    )
                                })
                                .filter(|f| f.1 != Pauli::I)
                                .collect();
                            let p = PauliString::from_sparse(self.n_qubits, &factors)?;
                            state.apply_pauli(&p);
                            events.push(NoiseEvent {
                                instruction: *index,
                                factors,
                            });
                        }
                    }
                }
                Step::Measure { qubit, clbit } => {
                    let outcome = measure(&mut state, *qubit, &mut meas_rng);
                    let mut recorded = outcome;
                    if noise.p_spam > 0.0 && meas_rng.gen::<f64>() < noise.p_spam {
                        recorded = !recorded;
                    }
                    bits = (bits & !(1 << clbit)) | ((recorded as u64) << clbit);
                }
                Step::Reset { qubit } => {
                    if measure(&mut state, *qubit, &mut meas_rng) {
                        state.flip(*qubit);
                    }
                }
            }
        }
        Ok((
            state,
            ShotRecord {
                bits,
                discarded: false,
                seed,
                events,
                noisy_gates_executed: visited,
            },
        ))
    }

    /// Exact enumeration of measurement and reset branches of a noiseless run.
    pub fn branches(&self, input: &State<T>) -> Result<Vec<Branch<T>>> {
        self.check_input(input)?;
        let tol = T::lit(1e-14);
        let mut out = Vec::new();
        let mut stack = vec![(0usize, input.clone(), 0u64, T::one())];
        while let Some((start, mut state, bits, prob)) = stack.pop() {
            let mut finished = true;
            for (pos, step) in self.steps.iter().enumerate().skip(start) {
                match step {
                    Step::Gate {
                        prepared,
                        condition,
                        ..
                    } => {
                        if let Some((c, v)) = condition {
                            if (bits >> c & 1 == 1) != *v {
                                continue;
                            }
                        }
                        run_kernel(&mut state, prepared);
                    }
                    Step::Measure { qubit, .. } | Step::Reset { qubit } => {
                        let q = *qubit;
                        let p1 = state.prob_one(q);
                        let p0 = T::one() - p1;
                        let mut outcomes = Vec::new();
                        if p0 * prob > tol {
                            outcomes.push((false, p0));
                        }
                        if p1 * prob > tol {
                            outcomes.push((true, p1));
                        }
                        for (o, p) in outcomes.into_iter().rev() {
                            let mut s = state.clone();
                            s.collapse(q, o, p);
                            let mut b = bits;
                            match step {
                                Step::Measure { clbit, .. } => {
                                    b = (b & !(1 << clbit)) | ((o as u64) << clbit);
                                }
                                _ => {
                                    if o {
                                        s.flip(q);
                                    }
                                }
                            }
                            stack.push((pos + 1, s, b, prob * p));
                        }
                        finished = false;
                        break;
                    }
                }
            }
            if finished {
                out.push(Branch { bits, prob, state });
            }
        }
        Ok(out)
    }
}

/// One leaf of the measurement tree.
#[derive(Clone, Debug)]
pub struct Branch<T> {
    pub bits: u64,
    pub prob: T,
    pub state: State<T>,
}

fn mul2<T: Real>(a: &[Complex<T>; 4], b: &[Complex<T>; 4]) -> [Complex<T>; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn measure<T: Real>(state: &mut State<T>, q: usize, rng: &mut ChaCha8Rng) -> bool {
    let p1 = state.prob_one(q);
    let p0 = T::one() - p1;
    let u: f64 = rng.gen();
    let outcome = u >= p0.to_f64_lossy();
    state.collapse(q, outcome, if outcome { p1 } else { p0 });
    outcome
}

/// Single noiseless run: final state and classical register.
pub fn run_pure<T: Real>(
    circuit: &Circuit<T>,
    input: &State<T>,
    seed: u64,
) -> Result<(State<T>, Vec<bool>)> {
    let (state, rec) = Program::new(circuit)?.run_shot(input, &NoiseModel::noiseless(), seed)?;
    let bits = (0..circuit.n_clbits())
        .map(|c| rec.bits >> c & 1 == 1)
        .collect();
    Ok((state, bits))
}

/// Runs `n_shots` shots; per-shot seeds are `seed ^ shot_index`.
pub fn run_shots<T: Real>(
    circuit: &Circuit<T>,
    input: &State<T>,
    n_shots: usize,
    noise: &NoiseModel,
    seed: u64,
) -> Result<(Histogram, Vec<ShotRecord>)> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    let program = Program::new(circuit)?;
    let records: Vec<ShotRecord> = (0..n_shots as u64)
        .into_par_iter()
        .map(|i| {
            program
                .run_shot(input, noise, shot_seed(seed, i))
                .map(|r| r.1)
        })
        .collect::<Result<_>>()?;
    let mut hist = Histogram::new(circuit.n_clbits());
    for r in &records {
        hist.record(r.bits);
    }
    Ok((hist, records))
}

/// Exact distribution over the classical register of a noiseless run.
pub fn exact_distribution<T: Real>(
    circuit: &Circuit<T>,
    input: &State<T>,
) -> Result<BTreeMap<u64, T>> {
    let mut out = BTreeMap::new();
    for b in Program::new(circuit)?.branches(input)? {
        let e = out.entry(b.bits).or_insert_with(T::zero);
        *e = *e + b.prob;
    }
    Ok(out)
}

/// Distribution over the listed clbits (bit `j` of the key is `clbits[j]`).
pub fn marginalize_bits<T: Real>(dist: &BTreeMap<u64, T>, clbits: &[usize]) -> Vec<T> {
    let mut out = vec![T::zero(); 1 << clbits.len()];
    for (&b, &p) in dist {
        let k: usize = clbits
            .iter()
            .enumerate()
            .map(|(j, &c)| ((b >> c & 1) as usize) << j)
            .sum();
        out[k] = out[k] + p;
    }
    out
}

/// Exact marginal of `qubits` in a state.
pub fn marginal_distribution<T: Real>(state: &State<T>, qubits: &[usize]) -> Result<Vec<T>> {
    state.marginal(qubits)
}
