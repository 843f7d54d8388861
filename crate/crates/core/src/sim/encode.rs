//! Arbitrary state preparation with multiplexed rotations.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sim::circuit::{Circuit, GateOp};
use crate::sim::gate::Gate;
use crate::sim::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationAxis {
    Y,
    Z,
}

fn rotation<T: Real>(axis: RotationAxis, a: T) -> Gate<T> {
    match axis {
        RotationAxis::Y => Gate::Ry(a),
        RotationAxis::Z => Gate::Rz(a),
    }
}

/// Appends the rotation multiplexed by `controls`: control value `p` (bit `j` is
/// `controls[j]`) rotates `target` by `angles[p]`. Uses `2^k` CNOTs in Gray-code order.
pub fn uniformly_controlled_rotation<T: Real>(
    c: &mut Circuit<T>,
    axis: RotationAxis,
    controls: &[usize],
    target: usize,
    angles: &[T],
) -> Result<()> {
    let k = controls.len();
    if angles.len() != 1 << k {
        return Err(Error::DimensionMismatch(format!(
            "{} angles for {k} controls",
            angles.len()
        )));
    }
    let tol = T::lit(1e-14);
    if angles.iter().all(|a| a.abs() < tol) {
        return Ok(());
    }
    if angles.iter().all(|a| (*a - angles[0]).abs() < tol) {
        c.push_gate(GateOp::new(rotation(axis, angles[0]), vec![target]))?;
        return Ok(());
    }
    let n = 1usize << k;
    let scale = T::one() / T::from_count(n);
    for i in 0..n {
        let g = i ^ (i >> 1);
        let theta = (0..n)
            .map(|p| {
                if (p & g).count_ones() % 2 == 0 {
                    angles[p]
                } else {
                    -angles[p]
                }
            })
            .fold(T::zero(), |acc, a| acc + a)
            * scale;
        if theta.abs() >= tol {
            c.push_gate(GateOp::new(rotation(axis, theta), vec![target]))?;
        }
        let bit = if i + 1 == n {
            k - 1
        } else {
            (i + 1).trailing_zeros() as usize
        };
        c.push_gate(GateOp::new(Gate::Cx, vec![controls[bit], target]))?;
    }
    Ok(())
}

/// Circuit mapping `|0…0⟩` to `target` exactly (including global phase).
pub fn amplitude_encode<T: Real>(target: &State<T>) -> Result<Circuit<T>> {
    let nrm = target.norm();
    if (nrm - T::one()).abs() > T::lit(1e-10) {
        return Err(Error::InvalidArgument(format!(
            "target norm {nrm} is not 1"
        )));
    }
    let n = target.n_qubits();
    let amps = target.amplitudes();
    let mut c = Circuit::new(n, 0);

    // Magnitudes: qubit q is rotated conditioned on the already prepared qubits above it.
    let probs: Vec<T> = amps.iter().map(|a| a.norm_sqr()).collect();
    for q in (0..n).rev() {
        let controls: Vec<usize> = (q + 1..n).collect();
        let block = 1usize << q;
        let angles: Vec<T> = (0..1usize << (n - 1 - q))
            .map(|p| {
                let base = p << (q + 1);
                let n0: T = probs[base..base + block].iter().copied().sum();
                let n1: T = probs[base + block..base + 2 * block].iter().copied().sum();
                T::lit(2.0) * n1.sqrt().atan2(n0.sqrt())
            })
            .collect();
        uniformly_controlled_rotation(&mut c, RotationAxis::Y, &controls, q, &angles)?;
    }

    // Phases: peel one qubit at a time from the bottom, passing mean phases upward.
    let mut phases: Vec<T> = amps.iter().map(|a| a.im.atan2(a.re)).collect();
    for q in 0..n {
        let controls: Vec<usize> = (q + 1..n).collect();
        let half = phases.len() / 2;
        let angles: Vec<T> = (0..half)
            .map(|p| phases[2 * p + 1] - phases[2 * p])
            .collect();
        uniformly_controlled_rotation(&mut c, RotationAxis::Z, &controls, q, &angles)?;
        phases = (0..half)
            .map(|p| (phases[2 * p] + phases[2 * p + 1]) * T::lit(0.5))
            .collect();
    }
    if phases[0].abs() > T::lit(1e-14) {
        c.push_gate(GateOp::new(Gate::GlobalPhase(phases[0]), vec![]))?;
    }
    Ok(c)
}
