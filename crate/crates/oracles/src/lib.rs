//! Brute-force reference computations used to cross-check the simulator.
//!
//! Nothing here depends on the simulator crate. Linear algebra is a plain
//! cyclic Jacobi sweep on real symmetric matrices (complex Hermitian inputs are
//! embedded into a real matrix of twice the size), and every probability is
//! obtained by enumeration or a counting formula written out independently.

pub mod combinatorics;
pub mod jacobi;
pub mod identities;
pub mod perms;
pub mod sponge;
pub mod unforge;

pub use jacobi::{hermitian_eigenvalues, symmetric_eigenvalues, trace_distance_hermitian};
