//! Shot discarding on detection, discard statistics and the `p₂` fit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::iceberg::IcebergLayout;
use crate::scalar::Real;
use crate::sim::{run_shots, Circuit, Detector, DetectorKind, Histogram, NoiseModel, State};

/// Detection counts of one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundStats {
    pub round: usize,
    pub cumulative_n2q: usize,
    /// Shots whose `X`-type check of this round fired.
    pub x_detections: u64,
    /// Shots whose `Z`-type check (or the encoding flag in round 0) fired.
    pub z_detections: u64,
    /// Shots with any detection in this or an earlier round.
    pub discarded_through: u64,
}

/// Discard bookkeeping of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscardStats {
    pub total: u64,
    pub discarded: u64,
    /// Two-qubit gates of the whole circuit.
    pub n2q: usize,
    pub rounds: Vec<RoundStats>,
}

impl DiscardStats {
    /// Counts from raw register values.
    pub fn from_bits(
        detectors: &[Detector],
        n2q: usize,
        bits: impl IntoIterator<Item = u64>,
    ) -> Self {
        let mut by_round: BTreeMap<usize, (usize, u64, u64)> = BTreeMap::new();
        for d in detectors {
            let e = by_round.entry(d.round).or_insert((d.cumulative_n2q, 0, 0));
            e.0 = e.0.max(d.cumulative_n2q);
            match d.kind {
                DetectorKind::X => e.1 |= 1 << d.clbit,
                DetectorKind::Z | DetectorKind::Flag => e.2 |= 1 << d.clbit,
            }
        }
        let mut rounds: Vec<RoundStats> = by_round
            .iter()
            .map(|(&round, &(cumulative_n2q, _, _))| RoundStats {
                round,
                cumulative_n2q,
                x_detections: 0,
                z_detections: 0,
                discarded_through: 0,
            })
            .collect();
        let masks: Vec<(u64, u64)> = by_round.values().map(|v| (v.1, v.2)).collect();
        let mut total = 0;
        let mut discarded = 0;
        for b in bits {
            total += 1;
            let mut first: Option<usize> = None;
            for (i, &(xm, zm)) in masks.iter().enumerate() {
                if b & xm != 0 {
                    rounds[i].x_detections += 1;
                }
                if b & zm != 0 {
                    rounds[i].z_detections += 1;
                }
                if first.is_none() && b & (xm | zm) != 0 {
                    first = Some(i);
                }
            }
            if let Some(i) = first {
                discarded += 1;
                for r in &mut rounds[i..] {
                    r.discarded_through += 1;
                }
            }
        }
        Self {
            total,
            discarded,
            n2q,
            rounds,
        }
    }

    pub fn accepted(&self) -> u64 {
        self.total - self.discarded
    }

    pub fn discard_rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.discarded as f64 / self.total as f64
        }
    }

    /// `(cumulative N_2Q, cumulative discard rate)` per round.
    pub fn points(&self) -> Vec<(usize, f64)> {
        self.rounds
            .iter()
            .map(|r| {
                (
                    r.cumulative_n2q,
                    r.discarded_through as f64 / self.total.max(1) as f64,
                )
            })
            .collect()
    }

    /// Adds counts from a run of the same circuit.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        let same_shape = self.n2q == other.n2q
            && self.rounds.len() == other.rounds.len()
            && self
                .rounds
                .iter()
                .zip(&other.rounds)
                .all(|(a, b)| a.round == b.round && a.cumulative_n2q == b.cumulative_n2q);
        if !same_shape {
            return Err(Error::DimensionMismatch(
                "discard statistics of different circuits".into(),
            ));
        }
        self.total += other.total;
        self.discarded += other.discarded;
        for (a, b) in self.rounds.iter_mut().zip(&other.rounds) {
            a.x_detections += b.x_detections;
            a.z_detections += b.z_detections;
            a.discarded_through += b.discarded_through;
        }
        Ok(())
    }

    /// `round_index,cumulative_n2q,x_detections,z_detections,discard_rate`.
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("round_index,cumulative_n2q,x_detections,z_detections,discard_rate\n");
        for (r, (_, rate)) in self.rounds.iter().zip(self.points()) {
            let _ = writeln!(
                s,
                "{},{},{},{},{rate}",
                r.round, r.cumulative_n2q, r.x_detections, r.z_detections
            );
        }
        s
    }
}

/// Reads `(cumulative_n2q, discard_rate)` pairs from any CSV carrying those two columns,
/// including the output of [`DiscardStats::to_csv`].
pub fn parse_discard_points(text: &str) -> Result<Vec<(usize, f64)>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty discard table".into(),
    })?;
    let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    let find = |name: &str| {
        cols.iter().position(|c| *c == name).ok_or(Error::Parse {
            line: 1,
            msg: format!("missing column {name}"),
        })
    };
    let (ni, di) = (find("cumulative_n2q")?, find("discard_rate")?);
    let mut out = Vec::new();
    for (i, line) in lines {
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        let f: Vec<&str> = line.trim().split(',').map(str::trim).collect();
        if f.len() != cols.len() {
            return Err(bad(format!("expected {} fields", cols.len())));
        }
        let n = f[ni].parse::<usize>().map_err(|e| bad(e.to_string()))?;
        let d = f[di].parse::<f64>().map_err(|e| bad(e.to_string()))?;
        out.push((n, d));
    }
    Ok(out)
}

/// Accepted shots and discard statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscardRun {
    /// Histogram over the readout clbits; `None` when every shot was discarded.
    pub accepted: Option<Histogram>,
    pub stats: DiscardStats,
}

/// Runs `shots` noisy shots from `|0…0⟩`, discarding any shot with a nonzero detector bit.
pub fn run_with_discard<T: Real>(
    circuit: &Circuit<T>,
    readout: &[usize],
    noise: &NoiseModel,
    shots: usize,
    seed: u64,
) -> Result<DiscardRun> {
    if let Some(&c) = readout.iter().find(|&&c| c >= circuit.n_clbits()) {
        return Err(Error::IndexOutOfRange {
            what: "readout clbit",
            index: c,
            limit: circuit.n_clbits(),
        });
    }
    let (_, records) = run_shots(
        circuit,
        &State::zero(circuit.n_qubits()),
        shots,
        noise,
        seed,
    )?;
    let mask: u64 = circuit.detectors().iter().map(|d| 1u64 << d.clbit).sum();
    let stats = DiscardStats::from_bits(
        circuit.detectors(),
        circuit.two_qubit_count(),
        records.iter().map(|r| r.bits),
    );
    let mut hist = Histogram::new(readout.len());
    for r in records.iter().filter(|r| r.bits & mask == 0) {
        let key = readout
            .iter()
            .enumerate()
            .map(|(j, &c)| (r.bits >> c & 1) << j)
            .sum();
        hist.record(key);
    }
    Ok(DiscardRun {
        accepted: (!hist.is_empty()).then_some(hist),
        stats,
    })
}

/// `1 − (1 − p₂)^N`.
pub fn discard_model(n2q: usize, p2: f64) -> f64 {
    1.0 - (1.0 - p2).powf(n2q as f64)
}

/// Fitted gate infidelity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct P2Fit {
    pub p2: f64,
    /// Sum of squared residuals of `log(1 − d)` against `N log(1 − p₂)`.
    pub residual: f64,
    /// Points with `d = 1` left out of the fit.
    pub dropped: usize,
}

/// Least-squares fit of `log(1 − d) = N log(1 − p₂)` through the origin.
pub fn fit_p2(points: &[(usize, f64)]) -> Result<P2Fit> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "at least two points are needed".into(),
        ));
    }
    if let Some(&(_, d)) = points.iter().find(|p| !(0.0..=1.0).contains(&p.1)) {
        return Err(Error::InvalidArgument(format!(
            "discard rate {d} outside [0, 1]"
        )));
    }
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 < 1.0)
        .map(|&(n, d)| (n as f64, (1.0 - d).ln()))
        .collect();
    let dropped = points.len() - used.len();
    let sxx: f64 = used.iter().map(|p| p.0 * p.0).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "no usable point with a nonzero gate count".into(),
        ));
    }
    let slope = used.iter().map(|p| p.0 * p.1).sum::<f64>() / sxx;
    let residual = used.iter().map(|p| (p.1 - slope * p.0).powi(2)).sum();
    Ok(P2Fit {
        p2: -slope.exp_m1(),
        residual,
        dropped,
    })
}

/// Two `k = 2` blocks sharing syndrome ancillas and flag, with `layers` rounds of
/// transversal CNOTs between them. Encoding and syndrome rounds are ideal, so the only
/// noise locations are the `4·layers` transversal CNOTs. With `check_every = Some(m)` both
/// blocks are checked after every `m` layers; otherwise only at the end.
pub fn discard_benchmark_circuit<T: Real>(
    layers: usize,
    check_every: Option<usize>,
) -> Result<Circuit<T>> {
    if check_every == Some(0) {
        return Err(Error::InvalidArgument(
            "check interval must be at least 1".into(),
        ));
    }
    let a = IcebergLayout::new(2, vec![0, 1], 2, 3, [8, 9], 10, 11)?;
    let b = IcebergLayout::new(2, vec![4, 5], 6, 7, [8, 9], 10, 11)?;
    let mut c = Circuit::new(11, 0);
    append_ideal(&mut c, &super::encode_circuit(&a))?;
    append_ideal(&mut c, &super::encode_circuit(&b))?;
    let (ta, tb) = (a.code_qubits(), b.code_qubits());
    let mut round = 0;
    for layer in 1..=layers {
        for (&x, &y) in ta.iter().zip(&tb) {
            c.cx(x, y);
        }
        let due = match check_every {
            Some(m) => layer % m == 0 || layer == layers,
            None => layer == layers,
        };
        if due {
            round += 1;
            append_ideal(&mut c, &super::syndrome_circuit(&a, round))?;
            append_ideal(&mut c, &super::syndrome_circuit(&b, round))?;
        }
    }
    if layers == 0 {
        append_ideal(&mut c, &super::syndrome_circuit(&a, 1))?;
        append_ideal(&mut c, &super::syndrome_circuit(&b, 1))?;
    }
    Ok(c)
}

/// Appends `frag` as ideal gates with fresh clbits; its detectors are shifted onto them.
fn append_ideal<T: Real>(c: &mut Circuit<T>, frag: &Circuit<T>) -> Result<()> {
    let first = c.add_clbits(frag.n_clbits());
    let qmap: Vec<usize> = (0..frag.n_qubits()).collect();
    let cmap: Vec<usize> = (first..first + frag.n_clbits()).collect();
    c.append_mapped(&frag.clone().into_ideal(), &qmap, &cmap)?;
    Ok(())
}
