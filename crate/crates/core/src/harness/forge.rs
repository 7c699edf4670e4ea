//! The forging reduction: a revocable-encryption adversary pair becomes a
//! k ↦ k+1 forger for a random `S ⊂ {0,1}^{n+m}` of size `2^n`.
//!
//! Forge samples `y` and `u`, runs the pre-phase on `|S⟩^{⊗k}`, measures the
//! returned register for `x_1..x_k`, then extracts `x_{k+1}` from the
//! post-phase run against `G(x) = g₁(x)‖u` on `S` and `g₂(x)` elsewhere,
//! with `g₁`, `g₂` lazily sampled.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::o2h::o2h_extractor;
use super::{distinct_members, random_subset, Aux, GameReport, GameTranscript};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::parallel::{try_run_trials_with, Execution};
use crate::perm::oracle::oracle_fn;
use crate::perm::{Counted, Oracle};
use crate::qstate::{Register, SubsetState};
use crate::rng::{SimRng, TrialSeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgeParams {
    pub n: u32,
    pub m: u32,
    pub k: usize,
}

impl ForgeParams {
    pub fn width(&self) -> u32 {
        self.n + self.m
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.k == 0 {
            return Err(Error::param("n/m/k", "must be positive"));
        }
        if self.width() > 20 {
            return Err(Error::DimensionTooLarge {
                qubits: self.width(),
                limit: 20,
            });
        }
        Ok(())
    }
}

/// A pre/post-revocation adversary pair as used inside Forge.
pub trait ForgeAdversary: Sync {
    fn name(&self) -> String;

    /// Returns the register handed back for revocation plus auxiliary state.
    fn pre_phase(&self, copies: &Register, y: BitString, rng: &mut SimRng) -> Result<(Register, Aux)>;

    /// Runs with oracle access to `G`; the output itself is ignored by Forge.
    fn post_phase(
        &self,
        aux: &Aux,
        y: BitString,
        oracle: &mut dyn Oracle<Input = u64, Output = u64>,
        params: &ForgeParams,
        rng: &mut SimRng,
    ) -> Result<()>;
}

/// Returns the copies untouched, then queries every input once.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestFullScan;

impl ForgeAdversary for HonestFullScan {
    fn name(&self) -> String {
        "honest-full-scan".into()
    }

    fn pre_phase(&self, copies: &Register, _y: BitString, _rng: &mut SimRng) -> Result<(Register, Aux)> {
        Ok((copies.clone(), Aux::default()))
    }

    fn post_phase(
        &self,
        _aux: &Aux,
        _y: BitString,
        oracle: &mut dyn Oracle<Input = u64, Output = u64>,
        params: &ForgeParams,
        _rng: &mut SimRng,
    ) -> Result<()> {
        for x in 0..(1u64 << params.width()) {
            oracle.query(x)?;
        }
        Ok(())
    }
}

/// Returns the copies and never queries.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullPostPhase;

impl ForgeAdversary for NullPostPhase {
    fn name(&self) -> String {
        "null-post-phase".into()
    }

    fn pre_phase(&self, copies: &Register, _y: BitString, _rng: &mut SimRng) -> Result<(Register, Aux)> {
        Ok((copies.clone(), Aux::default()))
    }

    fn post_phase(
        &self,
        _aux: &Aux,
        _y: BitString,
        _oracle: &mut dyn Oracle<Input = u64, Output = u64>,
        _params: &ForgeParams,
        _rng: &mut SimRng,
    ) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForgeOutcome {
    /// `k` measured values, plus the extracted one when extraction succeeded.
    pub outputs: Vec<u64>,
    pub extracted: bool,
    pub post_queries: u64,
    pub win: bool,
}

/// One Forge run against `S`.
pub fn run_forge(
    params: &ForgeParams,
    set: &Arc<SubsetState>,
    adversary: &dyn ForgeAdversary,
    ts: TrialSeed,
) -> Result<ForgeOutcome> {
    params.validate()?;
    if set.width() != params.width() || set.len() != 1usize << params.n {
        return Err(Error::param("S", "expected 2^n elements of {0,1}^{n+m}"));
    }
    let mut rng = ts.stream("forge");
    let mut adv = ts.stream("adversary");
    let y = BitString::random(params.m, &mut rng);
    let u = BitString::random(params.m, &mut rng);

    let copies = Register::copies_of(&set.to_dense()?, params.k)?;
    let (returned, aux) = adversary.pre_phase(&copies, y, &mut adv)?;
    if returned.copies() != params.k || returned.copy_qubits() != params.width() {
        return Err(Error::DimensionMismatch {
            expected: params.k * params.width() as usize,
            actual: returned.total_qubits() as usize,
        });
    }
    let mut outputs = returned.measure_all(&mut rng);

    let mut g_rng = ts.stream("g");
    let mut table: HashMap<u64, u64> = HashMap::new();
    let n = params.n;
    let width = params.width();
    let members = set.clone();
    let g = oracle_fn(move |x: u64| {
        *table.entry(x).or_insert_with(|| {
            if members.contains(x) {
                (g_rng.random_range(0..1u64 << n) << u.width()) | u.value()
            } else {
                g_rng.random_range(0..1u64 << width)
            }
        })
    });
    let mut g = Counted::new(g);
    let extraction = o2h_extractor(
        |h| adversary.post_phase(&aux, y, h, params, &mut adv),
        &mut g,
        &mut rng,
    );
    let extracted = match extraction {
        Ok((e, ())) => {
            outputs.push(e.value);
            true
        }
        Err(Error::NoQueries) => false,
        Err(e) => return Err(e),
    };
    let win = extracted && distinct_members(&outputs, set);
    Ok(ForgeOutcome {
        outputs,
        extracted,
        post_queries: g.queries(),
        win,
    })
}

pub fn run_forge_trials(
    params: &ForgeParams,
    adversary: &dyn ForgeAdversary,
    trials: u64,
    seed: u64,
) -> Result<GameReport> {
    run_forge_trials_with(Execution::available(), params, adversary, trials, seed)
}

pub fn run_forge_trials_with(
    mode: Execution,
    params: &ForgeParams,
    adversary: &dyn ForgeAdversary,
    trials: u64,
    seed: u64,
) -> Result<GameReport> {
    params.validate()?;
    let name = adversary.name();
    let json = serde_json::to_value(params).expect("params serialize");
    let transcripts = try_run_trials_with(mode, seed, trials, |ts| {
        let set = Arc::new(random_subset(params.width(), 1usize << params.n, &mut ts.stream("challenger"))?);
        let out = run_forge(params, &set, adversary, ts)?;
        Ok::<_, Error>(GameTranscript {
            experiment: "forge".into(),
            seed,
            trial: ts.trial,
            params: json.clone(),
            strategy: name.clone(),
            queries: BTreeMap::from([("post".to_string(), out.post_queries)]),
            revocation: None,
            output: format!("{:?}", out.outputs),
            win: out.win,
        })
    })?;
    Ok(GameReport::from_transcripts(transcripts))
}

/// Win probability of Forge with [`HonestFullScan`]: the `k` measurements
/// are distinct and the uniformly chosen scan query is a new member of `S`.
pub fn full_scan_probability(params: &ForgeParams) -> f64 {
    let s = (1u64 << params.n) as f64;
    let distinct: f64 = (0..params.k).map(|i| 1.0 - i as f64 / s).product();
    distinct * (s - params.k as f64).max(0.0) / (1u64 << params.width()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_post_phase_loses() {
        let params = ForgeParams { n: 2, m: 2, k: 1 };
        let r = run_forge_trials(&params, &NullPostPhase, 50, 1).unwrap();
        assert_eq!(r.estimate.wins, 0);
        assert!(r.transcripts.iter().all(|t| t.total_queries() == 0));
    }

    #[test]
    fn full_scan_matches_composition() {
        let params = ForgeParams { n: 2, m: 2, k: 1 };
        let p = full_scan_probability(&params);
        assert!((p - 3.0 / 16.0).abs() < 1e-12);
        let r = run_forge_trials(&params, &HonestFullScan, 4000, 2).unwrap();
        assert!(r.estimate.consistent_with(p, 3.0), "{:?}", r.estimate);
        assert!(r.transcripts.iter().all(|t| t.total_queries() == 16));
    }

    #[test]
    fn g_tags_members_with_u() {
        // With a full scan every member of S answers with the same low bits.
        struct Probe;
        impl ForgeAdversary for Probe {
            fn name(&self) -> String {
                "probe".into()
            }
            fn pre_phase(&self, c: &Register, _: BitString, _: &mut SimRng) -> Result<(Register, Aux)> {
                Ok((c.clone(), Aux::default()))
            }
            fn post_phase(
                &self,
                _: &Aux,
                _: BitString,
                oracle: &mut dyn Oracle<Input = u64, Output = u64>,
                _: &ForgeParams,
                _: &mut SimRng,
            ) -> Result<()> {
                let a = oracle.query(3)?;
                assert_eq!(a, oracle.query(3)?);
                Ok(())
            }
        }
        let params = ForgeParams { n: 2, m: 2, k: 1 };
        let set = Arc::new(SubsetState::new(4, [0, 3, 7, 12]).unwrap());
        let out = run_forge(&params, &set, &Probe, TrialSeed::new(0, 0)).unwrap();
        assert!(out.extracted);
        assert_eq!(out.outputs[1], 3);
        assert_eq!(out.post_queries, 2);
    }
}
