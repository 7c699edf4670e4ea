//! Trial fan-out. With the `parallel` feature trials run on the rayon pool;
//! without it they run in order on the calling thread. Either way the output
//! vector is ordered by trial index and every trial sees the same stream.

use crate::rng::TrialSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `Parallel` when the crate was built with rayon support.
    pub fn available() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Runs `trials` independent trials with the default execution mode.
pub fn run_trials<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(TrialSeed) -> T + Sync + Send,
{
    run_trials_with(Execution::available(), seed, trials, f)
}

pub fn run_trials_with<T, F>(mode: Execution, seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(TrialSeed) -> T + Sync + Send,
{
    match mode {
        Execution::Sequential => sequential(seed, trials, f),
        Execution::Parallel => parallel(seed, trials, f),
    }
}

fn sequential<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    F: Fn(TrialSeed) -> T,
{
    (0..trials).map(|i| f(TrialSeed::new(seed, i))).collect()
}

#[cfg(feature = "parallel")]
fn parallel<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(TrialSeed) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|i| f(TrialSeed::new(seed, i)))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel<T, F>(seed: u64, trials: u64, f: F) -> Vec<T>
where
    F: Fn(TrialSeed) -> T,
{
    sequential(seed, trials, f)
}

/// Collects per-trial results, stopping at the first error in trial order.
pub fn try_run_trials<T, E, F>(seed: u64, trials: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(TrialSeed) -> Result<T, E> + Sync + Send,
{
    try_run_trials_with(Execution::available(), seed, trials, f)
}

pub fn try_run_trials_with<T, E, F>(mode: Execution, seed: u64, trials: u64, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(TrialSeed) -> Result<T, E> + Sync + Send,
{
    run_trials_with(mode, seed, trials, f).into_iter().collect()
}
