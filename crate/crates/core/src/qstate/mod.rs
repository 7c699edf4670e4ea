//! State vectors, density matrices and the operations the games need:
//! subset and permuted-tuple states, tensor powers, projective revocation
//! checks, computational-basis measurement, averaged densities and trace
//! distance.
//!
//! Basis index convention: in a tensor product the first factor occupies the
//! most significant bits, so `|a⟩ ⊗ |b⟩` with `b` on `w` qubits is index
//! `(a << w) | b`.

mod average;
pub mod combinatorics;
mod dense;
mod density;
mod register;
mod subset;

pub use average::{avg_subset_density, avg_tuple_density, sample_avg_subset_density, ENUMERATION_BUDGET};
pub use dense::{measure_computational, project_accept_prob, project_and_collapse, tensor_power, DenseState};
pub use density::{trace_distance, DensityMatrix};
pub use register::Register;
pub use subset::{subset_to_dense, tuple_to_dense, SubsetState, TupleState};

use serde::{Deserialize, Serialize};

/// Largest state vector, in qubits.
pub const MAX_STATE_QUBITS: u32 = 20;
/// Largest density matrix, in qubits.
pub const MAX_DENSITY_QUBITS: u32 = 12;
/// Absolute tolerance for norm, trace and positivity checks.
pub const TOLERANCE: f64 = 1e-9;

/// Result of a two-outcome projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Accept,
    Reject,
}

impl Outcome {
    pub fn accepted(self) -> bool {
        self == Outcome::Accept
    }
}
