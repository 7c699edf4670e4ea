//! Hybrid-swap audits. Each hybrid is run with the same distinguisher and
//! adjacent hybrids are compared by the gap in the distinguisher's output
//! rate, with a pooled standard error.
//!
//! Revocable encryption (`H1`…`H6`, explicit permutations):
//! - `H1`: the real game with a random permutation `φ`; the post phase gets `φ^{-1}`.
//! - `H2`: random `S` of size `2^n`, then a random bijection `π` with `π(S) = T_y = {x‖y}`.
//! - `H3`: on `S` the oracle is a random function into `T_y`; off `S` a random bijection onto the complement of `T_y`.
//! - `H4`: as `H3` but a uniformly random function off `S`.
//! - `H5`: the ciphertext pad is `y`, and the oracle on `S` answers `x‖(y ⊕ μ_b)`.
//! - `H6`: the oracle on `S` answers `x‖u` for a fresh uniform `u`.
//!
//! Unforgeability (`H1`…`H5`):
//! - `H1`: `|S⟩^{⊗k}` with `O_S`, `S` uniform of size `s`.
//! - `H2`: the same, with `S` drawn as a uniform `s`-subset of a uniform `t`-set `T`.
//! - `H3`: `|S⟩^{⊗k}` with `O_T`.
//! - `H4`: `|σ_X⟩` for a uniform `k`-subset `X ⊂ T`, with `O_T`.
//! - `H5`: `|σ_X⟩` with `O_X`.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::revoke_expt::{RevEncAdversary, RevEncVariant};
use super::stats::{pooled_se, same_rate, Z_GATE};
use super::{random_subset, SuccessEstimate};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::parallel::try_run_trials;
use crate::perm::oracle::{oracle_fn, MembershipOracle};
use crate::perm::{sample_random_perm, Counted, Oracle};
use crate::qstate::{Outcome, Register, SubsetState, TupleState};
use crate::revenc::{self, Backend, Ciphertext, RevEncParams, SecretKey};
use crate::rng::{SimRng, TrialSeed};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridRate {
    pub hybrid: String,
    pub estimate: SuccessEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridPair {
    pub left: String,
    pub right: String,
    pub advantage: f64,
    pub std_error: f64,
    /// The two hybrids are the same distribution by construction.
    pub identical: bool,
    pub consistent_with_zero: bool,
    /// `q·√((t−s)/2^n)` for the oracle swap of the unforgeability chain.
    pub envelope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridTable {
    pub chain: String,
    pub params: serde_json::Value,
    pub distinguisher: String,
    pub rates: Vec<HybridRate>,
    pub pairs: Vec<HybridPair>,
}

impl HybridTable {
    /// Every pair flagged identical is consistent with zero advantage.
    pub fn identical_pairs_pass(&self) -> bool {
        self.pairs.iter().filter(|p| p.identical).all(|p| p.consistent_with_zero)
    }

    fn build(
        chain: &str,
        params: serde_json::Value,
        distinguisher: String,
        rates: Vec<HybridRate>,
        identical: impl Fn(usize) -> bool,
        envelope: impl Fn(usize) -> Option<f64>,
    ) -> Self {
        let pairs = rates
            .windows(2)
            .enumerate()
            .map(|(i, w)| HybridPair {
                left: w[0].hybrid.clone(),
                right: w[1].hybrid.clone(),
                advantage: (w[0].estimate.p_hat - w[1].estimate.p_hat).abs(),
                std_error: pooled_se(&w[0].estimate, &w[1].estimate),
                identical: identical(i),
                consistent_with_zero: same_rate(&w[0].estimate, &w[1].estimate, Z_GATE),
                envelope: envelope(i),
            })
            .collect();
        Self {
            chain: chain.into(),
            params,
            distinguisher,
            rates,
            pairs,
        }
    }
}

// ---------------------------------------------------------------------------
// Revocable encryption chain

/// Number of hybrids in the revocable-encryption chain.
pub const REVENC_HYBRIDS: usize = 6;

struct Section6World {
    set: SubsetState,
    /// The post-phase oracle as a full table over `{0,1}^{n+m}`.
    table: Vec<u64>,
    pad: BitString,
}

fn shuffled<R: Rng + ?Sized>(mut v: Vec<u64>, rng: &mut R) -> Vec<u64> {
    v.shuffle(rng);
    v
}

fn section6_world(h: usize, params: &RevEncParams, mu: BitString, rng: &mut SimRng) -> Result<Section6World> {
    let (n, m, w) = (params.n, params.m, params.width());
    let size = 1usize << w;
    let y = BitString::random(m, rng);
    if h == 1 {
        let phi = sample_random_perm(w, rng)?;
        let table = phi.inverse_table().to_vec();
        let sk = SecretKey::from_explicit(phi);
        let set = revenc::subset_for(&sk, params, y)?;
        return Ok(Section6World { set, table, pad: y ^ mu });
    }
    let set = random_subset(w, 1 << n, rng)?;
    let label = |x: u64, low: BitString| (x << m) | low.value();
    let t_y: Vec<u64> = (0..1u64 << n).map(|x| label(x, y)).collect();
    let off_s: Vec<u64> = (0..size as u64).filter(|x| !set.contains(*x)).collect();
    let off_t: Vec<u64> = (0..size as u64).filter(|x| x & crate::bits::mask(m) != y.value()).collect();
    let mut table = vec![0u64; size];
    let u = BitString::random(m, rng);
    let on_s_low = match h {
        2..=4 => y,
        5 => y ^ mu,
        6 => u,
        _ => return Err(Error::param("hybrid", format!("{h} outside 1..=6"))),
    };
    match h {
        2 => {
            for (&s, t) in set.support().iter().zip(shuffled(t_y, rng)) {
                table[s as usize] = t;
            }
        }
        _ => {
            for &s in set.support() {
                table[s as usize] = label(rng.random_range(0..1u64 << n), on_s_low);
            }
        }
    }
    match h {
        2 | 3 => {
            for (&s, t) in off_s.iter().zip(shuffled(off_t, rng)) {
                table[s as usize] = t;
            }
        }
        _ => {
            for &s in &off_s {
                table[s as usize] = rng.random_range(0..size as u64);
            }
        }
    }
    let pad = if h >= 5 { y } else { y ^ mu };
    Ok(Section6World { set, table, pad })
}

fn section6_trial(
    h: usize,
    params: &RevEncParams,
    variant: RevEncVariant,
    adversary: &dyn RevEncAdversary,
    ts: TrialSeed,
) -> Result<bool> {
    let RevEncVariant::Indistinguishability { mu0, mu1 } = variant else {
        return Err(Error::param("variant", "the hybrid chain needs two messages"));
    };
    let mut ch = ts.stream(&format!("h{h}/challenger"));
    let mut adv = ts.stream(&format!("h{h}/adversary"));
    let b = ch.random_range(0..2u8);
    let mu = if b == 0 { mu0 } else { mu1 };
    let world = section6_world(h, params, mu, &mut ch)?;
    let target = world.set.to_dense()?;
    let ct = Ciphertext {
        copies: Register::copies_of(&target, params.k)?,
        pad: world.pad,
    };
    let (returned, aux) = adversary.pre_phase(&ct, params, &mut adv)?;
    let (outcome, _) = returned.collapse(&target, &mut ch)?;
    if outcome == Outcome::Reject {
        return Ok(false);
    }
    let table = world.table;
    let mut oracle = Counted::new(oracle_fn(move |x: u64| table[x as usize]));
    let guess = adversary.post_phase(&aux, Some([mu0, mu1]), &mut oracle, params, &mut adv)?;
    Ok(u8::from(guess == mu1) == b)
}

/// Runs the revocable-encryption chain with `params` on explicit
/// permutations. The distinguisher output is the game's win indicator.
pub fn revenc_hybrids(
    params: &RevEncParams,
    adversary: &dyn RevEncAdversary,
    trials: u64,
    seed: u64,
) -> Result<HybridTable> {
    let params = RevEncParams {
        backend: Backend::Explicit,
        ..*params
    };
    params.validate()?;
    let variant = RevEncVariant::standard(params.m)?;
    let mut rates = Vec::new();
    for h in 1..=REVENC_HYBRIDS {
        let wins = try_run_trials(seed, trials, |ts| section6_trial(h, &params, variant, adversary, ts))?;
        rates.push(HybridRate {
            hybrid: format!("H{h}"),
            estimate: super::estimate(&wins),
        });
    }
    Ok(HybridTable::build(
        "revenc",
        serde_json::to_value(params).expect("params serialize"),
        adversary.name(),
        rates,
        |i| i == 0,
        |_| None,
    ))
}

// ---------------------------------------------------------------------------
// Unforgeability chain

pub const UNFORGE_HYBRIDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloodParams {
    pub n: u32,
    pub s: usize,
    pub t: usize,
    pub k: usize,
}

impl FloodParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 16 {
            return Err(Error::param("n", format!("{} outside 1..=16", self.n)));
        }
        if self.k == 0 || self.k > self.s || self.s > self.t || self.t > 1usize << self.n {
            return Err(Error::param("s/t/k", "need 1 ≤ k ≤ s ≤ t ≤ 2^n"));
        }
        if self.n as usize * self.k > 20 {
            return Err(Error::DimensionTooLarge {
                qubits: self.n * self.k as u32,
                limit: 20,
            });
        }
        Ok(())
    }
}

/// Distinguishers for the unforgeability chain. Both measure every copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FloodDistinguisher {
    /// Outputs 1 iff one of `q` uniform membership probes hits.
    Probe { q: u64 },
    /// Outputs 1 iff two measured copies agree.
    Collision,
}

impl FloodDistinguisher {
    pub fn name(&self) -> String {
        match self {
            FloodDistinguisher::Probe { q } => format!("probe(q={q})"),
            FloodDistinguisher::Collision => "collision".into(),
        }
    }

    fn run(&self, copies: &Register, oracle: &mut dyn Oracle<Input = u64, Output = bool>, n: u32, rng: &mut SimRng) -> Result<bool> {
        let measured = copies.measure_all(rng);
        match *self {
            FloodDistinguisher::Probe { q } => {
                let mut hit = false;
                for _ in 0..q {
                    hit |= oracle.query(rng.random_range(0..1u64 << n))?;
                }
                Ok(hit)
            }
            FloodDistinguisher::Collision => {
                let mut seen = HashMap::new();
                Ok(measured.iter().any(|v| seen.insert(*v, ()).is_some()))
            }
        }
    }
}

fn sample_within<R: Rng + ?Sized>(outer: &SubsetState, size: usize, rng: &mut R) -> Result<SubsetState> {
    let idx = rand::seq::index::sample(rng, outer.len(), size);
    SubsetState::new(outer.width(), idx.into_iter().map(|i| outer.support()[i]))
}

fn flood_trial(h: usize, params: &FloodParams, d: FloodDistinguisher, ts: TrialSeed) -> Result<bool> {
    let mut ch = ts.stream(&format!("h{h}/challenger"));
    let mut adv = ts.stream(&format!("h{h}/adversary"));
    let n = params.n;
    let (copies, oracle_set) = if h == 1 {
        let s = random_subset(n, params.s, &mut ch)?;
        (Register::copies_of(&s.to_dense()?, params.k)?, s)
    } else {
        let t = random_subset(n, params.t, &mut ch)?;
        match h {
            2 | 3 => {
                let s = sample_within(&t, params.s, &mut ch)?;
                let copies = Register::copies_of(&s.to_dense()?, params.k)?;
                (copies, if h == 2 { s } else { t })
            }
            4 | 5 => {
                let x = sample_within(&t, params.k, &mut ch)?;
                let mut tuple = x.support().to_vec();
                tuple.shuffle(&mut ch);
                let sigma = TupleState::new(n, tuple)?.to_dense()?;
                let copies = Register::joint(params.k, sigma)?;
                (copies, if h == 4 { t } else { x })
            }
            _ => return Err(Error::param("hybrid", format!("{h} outside 1..=5"))),
        }
    };
    let mut oracle = Counted::new(MembershipOracle::new(std::sync::Arc::new(oracle_set)));
    d.run(&copies, &mut oracle, n, &mut adv)
}

pub fn unforge_hybrids(params: &FloodParams, d: FloodDistinguisher, trials: u64, seed: u64) -> Result<HybridTable> {
    params.validate()?;
    let mut rates = Vec::new();
    for h in 1..=UNFORGE_HYBRIDS {
        let out = try_run_trials(seed, trials, |ts| flood_trial(h, params, d, ts))?;
        rates.push(HybridRate {
            hybrid: format!("H{h}"),
            estimate: super::estimate(&out),
        });
    }
    let q = match d {
        FloodDistinguisher::Probe { q } => q as f64,
        FloodDistinguisher::Collision => 0.0,
    };
    let env = q * ((params.t - params.s) as f64 / (1u64 << params.n) as f64).sqrt();
    let degenerate = params.t == params.s;
    Ok(HybridTable::build(
        "unforge",
        serde_json::to_value(params).expect("params serialize"),
        d.name(),
        rates,
        |i| i == 0 || (i == 1 && degenerate),
        |i| (i == 1).then_some(env),
    ))
}
