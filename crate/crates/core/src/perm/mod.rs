//! Bijections on `{0,1}^w`: keyed Feistel networks standing in for a
//! pseudorandom permutation, explicit uniformly random tables, their unitary
//! action on states, and query-counted oracle wrappers.

mod explicit;
mod feistel;
mod key;
pub mod oracle;

pub use explicit::{sample_random_perm, ExplicitPerm, MAX_EXPLICIT_WIDTH};
pub use feistel::{feistel_perm, FeistelPerm, FEISTEL_ROUNDS};
pub use key::PermKey;
pub use oracle::{counted, Counted, Oracle, UnitaryOracle};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qstate::DenseState;

/// A bijection on `width`-bit strings with inverse access.
pub trait Permutation: Send + Sync {
    fn width(&self) -> u32;
    fn forward(&self, x: u64) -> u64;
    fn inverse(&self, y: u64) -> u64;
}

impl<P: Permutation + ?Sized> Permutation for &P {
    fn width(&self) -> u32 {
        (**self).width()
    }
    fn forward(&self, x: u64) -> u64 {
        (**self).forward(x)
    }
    fn inverse(&self, y: u64) -> u64 {
        (**self).inverse(y)
    }
}

impl<P: Permutation + ?Sized> Permutation for Box<P> {
    fn width(&self) -> u32 {
        (**self).width()
    }
    fn forward(&self, x: u64) -> u64 {
        (**self).forward(x)
    }
    fn inverse(&self, y: u64) -> u64 {
        (**self).inverse(y)
    }
}

impl<P: Permutation + ?Sized> Permutation for Arc<P> {
    fn width(&self) -> u32 {
        (**self).width()
    }
    fn forward(&self, x: u64) -> u64 {
        (**self).forward(x)
    }
    fn inverse(&self, y: u64) -> u64 {
        (**self).inverse(y)
    }
}

/// Moves the amplitude at `i` to `perm(i)`.
pub fn apply_perm_unitary<P: Permutation + ?Sized>(perm: &P, state: &DenseState) -> Result<DenseState> {
    if perm.width() != state.qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1usize << perm.width(),
            actual: state.dim(),
        });
    }
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); state.dim()];
    for (i, a) in state.nonzero() {
        out[perm.forward(i) as usize] = a;
    }
    Ok(DenseState::from_parts_unchecked(state.qubits(), out))
}

/// Applies `perm^{-1}`.
pub fn apply_inverse_unitary<P: Permutation + ?Sized>(perm: &P, state: &DenseState) -> Result<DenseState> {
    if perm.width() != state.qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1usize << perm.width(),
            actual: state.dim(),
        });
    }
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); state.dim()];
    for (i, a) in state.nonzero() {
        out[perm.inverse(i) as usize] = a;
    }
    Ok(DenseState::from_parts_unchecked(state.qubits(), out))
}
