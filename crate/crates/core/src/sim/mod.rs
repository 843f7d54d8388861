//! Dense statevector simulation.

pub mod circuit;
pub mod encode;
pub mod evolution;
pub mod exec;
pub mod gate;
pub mod histogram;
pub mod state;

pub use circuit::{Circuit, Condition, Detector, DetectorKind, GateOp, Instruction};
pub use encode::{amplitude_encode, uniformly_controlled_rotation, RotationAxis};
pub use evolution::{exact_evolution_gate, trotter_evolution_circuit};
pub use exec::{
    apply_gate, apply_gate_op, derive_seed, exact_distribution, marginal_distribution,
    marginalize_bits, run_pure, run_shots, shot_seed, Branch, NoiseEvent, NoiseModel, Program,
    ShotRecord,
};
pub use gate::Gate;
pub use histogram::Histogram;
pub use state::{ControlMask, State};
