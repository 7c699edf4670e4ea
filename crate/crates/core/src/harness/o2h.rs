//! The random-query extractor: run the post-phase adversary, pick one of its
//! queries uniformly at random and output the (measured) query input.

use rand::Rng;
use serde::Serialize;

use super::SuccessEstimate;
use crate::error::{Error, Result};
use crate::parallel::try_run_trials;
use crate::perm::oracle::{oracle_fn, Recording};
use crate::perm::{Counted, Oracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extraction<I> {
    pub value: I,
    /// Zero-based position of the chosen query.
    pub index: usize,
    pub total_queries: usize,
}

/// Runs `post_phase` against `oracle`, returning the extracted query and the
/// post phase's own output. The index is uniform over the queries actually
/// made; an adversary that makes none yields [`Error::NoQueries`].
pub fn o2h_extractor<O, T, F, R>(post_phase: F, oracle: &mut O, rng: &mut R) -> Result<(Extraction<O::Input>, T)>
where
    O: Oracle + ?Sized,
    F: FnOnce(&mut dyn Oracle<Input = O::Input, Output = O::Output>) -> Result<T>,
    R: Rng + ?Sized,
{
    let mut recording = Recording::new(oracle);
    let output = post_phase(&mut recording)?;
    let (_, log) = recording.into_parts();
    if log.is_empty() {
        return Err(Error::NoQueries);
    }
    let index = rng.random_range(0..log.len());
    Ok((
        Extraction {
            value: log[index],
            index,
            total_queries: log.len(),
        },
        output,
    ))
}

/// Frequency audit of the extractor contract over `trials` runs each of: a
/// one-query adversary, a two-point adversary querying `a` and `b` once
/// each, and a `q`-query adversary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct O2hAudit {
    pub trials: u64,
    pub single_query_hits: u64,
    pub first_of_two: SuccessEstimate,
    pub index_counts: Vec<u64>,
}

impl O2hAudit {
    /// Every single-query run recovered the query, the two-point split is
    /// consistent with 1/2 and each index frequency with `1/q`, all at `z`.
    pub fn passes(&self, z: f64) -> bool {
        let q = self.index_counts.len() as f64;
        self.single_query_hits == self.trials
            && self.first_of_two.consistent_with(0.5, z)
            && self
                .index_counts
                .iter()
                .all(|&c| SuccessEstimate::from_counts(c, self.trials).consistent_with(1.0 / q, z))
    }
}

pub fn run_o2h_audit(q: usize, trials: u64, seed: u64) -> Result<O2hAudit> {
    if q == 0 {
        return Err(Error::param("q", "must be positive"));
    }
    let rows = try_run_trials(seed, trials, |ts| {
        let mut rng = ts.stream("extractor");
        let mut adv = ts.stream("adversary");
        let mut oracle = Counted::new(oracle_fn(|x: u64| x.rotate_left(7)));

        let a: u64 = adv.random();
        let (single, _) = o2h_extractor(|h| h.query(a), &mut oracle, &mut rng)?;

        let b = a ^ 1;
        let (pair, _) = o2h_extractor(
            |h| {
                h.query(a)?;
                h.query(b)
            },
            &mut oracle,
            &mut rng,
        )?;

        let (many, _) = o2h_extractor(
            |h| {
                for i in 0..q as u64 {
                    h.query(a.wrapping_add(i))?;
                }
                Ok(())
            },
            &mut oracle,
            &mut rng,
        )?;
        Ok::<_, Error>((single.value == a, pair.value == a, many.index))
    })?;
    let mut index_counts = vec![0u64; q];
    for r in &rows {
        index_counts[r.2] += 1;
    }
    Ok(O2hAudit {
        trials,
        single_query_hits: rows.iter().filter(|r| r.0).count() as u64,
        first_of_two: SuccessEstimate::from_counts(rows.iter().filter(|r| r.1).count() as u64, trials),
        index_counts,
    })
}
