//! The k ↦ k+1 unforgeability experiment: the adversary gets `|S⟩^{⊗k}` and
//! a counted membership oracle for `S` and must output `k+1` distinct
//! elements of `S`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{distinct_members, random_subset, GameReport, GameTranscript};
use crate::error::{Error, Result};
use crate::parallel::{try_run_trials_with, Execution};
use crate::perm::oracle::MembershipOracle;
use crate::perm::{Counted, Oracle};
use crate::qstate::Register;
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnforgeParams {
    pub n: u32,
    pub s: usize,
    pub k: usize,
}

impl UnforgeParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 20 {
            return Err(Error::param("n", format!("{} outside 1..=20", self.n)));
        }
        if self.s == 0 || self.s > 1usize << self.n {
            return Err(Error::param("s", format!("{} outside 1..=2^n", self.s)));
        }
        if self.k == 0 {
            return Err(Error::param("k", "must be positive"));
        }
        Ok(())
    }
}

pub type MembershipHandle<'a> = dyn Oracle<Input = u64, Output = bool> + 'a;

pub trait UnforgeStrategy: Sync {
    fn name(&self) -> String;

    /// Returns the `k+1` claimed elements.
    fn forge(
        &self,
        copies: &Register,
        oracle: &mut MembershipHandle<'_>,
        params: &UnforgeParams,
        rng: &mut SimRng,
    ) -> Result<Vec<u64>>;
}

/// Measures every copy, then fills the remaining slot with a uniform string
/// outside the measured values.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeasureAndGuess;

impl UnforgeStrategy for MeasureAndGuess {
    fn name(&self) -> String {
        "measure-guess".into()
    }

    fn forge(
        &self,
        copies: &Register,
        _oracle: &mut MembershipHandle<'_>,
        params: &UnforgeParams,
        rng: &mut SimRng,
    ) -> Result<Vec<u64>> {
        let mut out = copies.measure_all(rng);
        out.push(guess_outside(params.n, &out, rng));
        Ok(out)
    }
}

/// Uniform over `{0,1}^n` minus `avoid`, or 0 if nothing is left.
pub fn guess_outside<R: Rng + ?Sized>(n: u32, avoid: &[u64], rng: &mut R) -> u64 {
    let avoid: BTreeSet<u64> = avoid.iter().copied().collect();
    let free = (1u64 << n) - avoid.len() as u64;
    if free == 0 {
        return 0;
    }
    // The r-th free value in increasing order.
    let mut x = rng.random_range(0..free);
    for &a in &avoid {
        if a > x {
            break;
        }
        x += 1;
    }
    x
}

/// Measures every copy, then queries strings in increasing order until it
/// holds `k+1` distinct members or its budget runs out.
#[derive(Debug, Clone, Copy)]
pub struct MembershipScan {
    pub budget: u64,
}

impl UnforgeStrategy for MembershipScan {
    fn name(&self) -> String {
        format!("membership-scan(q={})", self.budget)
    }

    fn forge(
        &self,
        copies: &Register,
        oracle: &mut MembershipHandle<'_>,
        params: &UnforgeParams,
        rng: &mut SimRng,
    ) -> Result<Vec<u64>> {
        let known = copies.measure_all(rng);
        scan_for_members(&known, oracle, params.n, params.k + 1, self.budget)
    }
}

/// Extends `known` members to `want` distinct values by scanning the domain
/// with at most `budget` queries. The result has exactly `want` entries;
/// missing slots are filled with unqueried guesses.
pub fn scan_for_members(
    known: &[u64],
    oracle: &mut MembershipHandle<'_>,
    n: u32,
    want: usize,
    budget: u64,
) -> Result<Vec<u64>> {
    let mut members: BTreeSet<u64> = known.iter().copied().collect();
    let mut used = 0;
    let mut x = 0u64;
    while members.len() < want && used < budget && x < (1u64 << n) {
        if !members.contains(&x) {
            used += 1;
            if oracle.query(x)? {
                members.insert(x);
            }
        }
        x += 1;
    }
    let mut out: Vec<u64> = members.into_iter().collect();
    let mut filler = 0u64;
    while out.len() < want {
        if !out.contains(&filler) {
            out.push(filler);
        }
        filler += 1;
    }
    out.truncate(want);
    Ok(out)
}

pub fn strategy_by_name(name: &str, queries: u64) -> Result<Box<dyn UnforgeStrategy>> {
    match name {
        "measure-guess" => Ok(Box::new(MeasureAndGuess)),
        "membership-scan" => Ok(Box::new(MembershipScan { budget: queries })),
        other => Err(Error::param("strategy", format!("unknown unforge strategy `{other}`"))),
    }
}

pub fn run_unforgeability(
    params: &UnforgeParams,
    strategy: &dyn UnforgeStrategy,
    trials: u64,
    seed: u64,
) -> Result<GameReport> {
    run_unforgeability_with(Execution::available(), params, strategy, trials, seed)
}

pub fn run_unforgeability_with(
    mode: Execution,
    params: &UnforgeParams,
    strategy: &dyn UnforgeStrategy,
    trials: u64,
    seed: u64,
) -> Result<GameReport> {
    params.validate()?;
    let name = strategy.name();
    let json = serde_json::to_value(params).expect("params serialize");
    let transcripts = try_run_trials_with(mode, seed, trials, |ts| {
        let set = Arc::new(random_subset(params.n, params.s, &mut ts.stream("challenger"))?);
        let copies = Register::copies_of(&set.to_dense()?, params.k)?;
        let mut oracle = Counted::new(MembershipOracle::new(set.clone()));
        let out = strategy.forge(&copies, &mut oracle, params, &mut ts.stream("adversary"))?;
        let win = out.len() == params.k + 1 && distinct_members(&out, &set);
        Ok::<_, Error>(GameTranscript {
            experiment: "unforge".into(),
            seed,
            trial: ts.trial,
            params: json.clone(),
            strategy: name.clone(),
            queries: BTreeMap::from([("membership".to_string(), oracle.queries())]),
            revocation: None,
            output: format!("{out:?}"),
            win,
        })
    })?;
    let report = GameReport::from_transcripts(transcripts);
    if params.k >= params.s && report.estimate.wins != 0 {
        return Err(Error::InvalidState(format!(
            "{} wins with k = {} ≥ s = {}",
            report.estimate.wins, params.k, params.s
        )));
    }
    Ok(report)
}

/// Exact win probability of [`MeasureAndGuess`]:
/// `Pr[k measured values distinct] · (s − k)/(2^n − k)`.
pub fn measure_and_guess_probability(params: &UnforgeParams) -> f64 {
    let s = params.s as f64;
    let k = params.k;
    if k >= params.s {
        return 0.0;
    }
    let distinct: f64 = (0..k).map(|i| (s - i as f64) / s).product();
    distinct * (s - k as f64) / ((1u64 << params.n) as f64 - k as f64)
}
