//! Exact small-scale simulation of multi-copy revocable cryptography built
//! from subset states.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`] dense and sparse state vectors, density matrices, trace distance.
//! * [`perm`] keyed (Feistel) and explicit random permutations, counted oracles.
//! * [`revenc`] revocable encryption with k identical ciphertext copies.
//! * [`revprog`] revocable programs evaluated through a membership-checking oracle.
//! * [`pointfn`] hybrid encryption, wrong-key detection and revocable point functions.
//! * [`harness`] security games, adversary strategies, extractors and statistics.
//! * [`sponge`] single-round sponge hash tables and their attack experiments.
//!
//! Every probabilistic routine takes an explicit RNG; Monte-Carlo loops are
//! driven by [`parallel::run_trials`], which derives one stream per trial so
//! results do not depend on thread scheduling.

pub mod bits;
pub mod error;
pub mod harness;
pub mod parallel;
pub mod perm;
pub mod pointfn;
pub mod qstate;
pub mod revenc;
pub mod revprog;
pub mod rng;
pub mod sponge;

pub use bits::BitString;
pub use error::{Error, Result};
pub use rng::{SimRng, TrialSeed};
