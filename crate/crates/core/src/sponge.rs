//! Single-round sponge hashing `h = top_r(φ(x‖IV))`, salted hash tables, the
//! `Valid` range oracle, table-extension attacks and the space-time bound.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{mask, BitString};
use crate::error::{Error, Result};
use crate::harness::unforge::{guess_outside, scan_for_members};
use crate::harness::{distinct_members, random_subset, GameReport, GameTranscript};
use crate::parallel::{try_run_trials_with, Execution};
use crate::perm::oracle::MembershipOracle;
use crate::perm::{sample_random_perm, Counted, Oracle, PermKey, Permutation};
use crate::revenc::{Backend, SecretKey};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpongeParams {
    /// Rate.
    pub r: u32,
    /// Capacity.
    pub c: u32,
    /// Number of table entries `S`.
    pub table_size: u64,
    pub backend: Backend,
}

impl SpongeParams {
    pub fn width(&self) -> u32 {
        self.r + self.c
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.c == 0 {
            return Err(Error::param("r/c", "rate and capacity must be positive"));
        }
        let limit = match self.backend {
            Backend::Explicit => 24,
            Backend::Keyed => 64,
        };
        if self.width() > limit {
            return Err(Error::param("r+c", format!("{} > {limit} for the {:?} backend", self.width(), self.backend)));
        }
        if self.r > 30 || self.table_size > 1u64 << self.r {
            return Err(Error::param("table_size", format!("{} > 2^r", self.table_size)));
        }
        Ok(())
    }

    /// A fresh permutation on `r + c` bits.
    pub fn sample_perm<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SecretKey> {
        Ok(match self.backend {
            Backend::Keyed => SecretKey::from_perm_key(PermKey::random(rng), self.width()),
            Backend::Explicit => SecretKey::from_explicit(sample_random_perm(self.width(), rng)?),
        })
    }
}

/// `top_r(φ(x‖iv))`.
pub fn sponge_hash<P: Permutation + ?Sized>(phi: &P, iv: BitString, x: BitString) -> Result<BitString> {
    if x.width() + iv.width() != phi.width() {
        return Err(Error::DimensionMismatch {
            expected: phi.width() as usize,
            actual: (x.width() + iv.width()) as usize,
        });
    }
    let out = phi.forward(x.concat(iv)?.value());
    BitString::new(out >> iv.width(), x.width())
}

/// The challenger's table. Only `iv` and `hashes` are shown to attackers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashTable {
    pub iv: BitString,
    pub inputs: Vec<BitString>,
    pub hashes: Vec<BitString>,
}

impl HashTable {
    /// Recomputes every hash from the inputs.
    pub fn is_consistent<P: Permutation + ?Sized>(&self, phi: &P) -> bool {
        self.inputs.len() == self.hashes.len()
            && self
                .inputs
                .iter()
                .zip(&self.hashes)
                .all(|(&x, &h)| sponge_hash(phi, self.iv, x).ok() == Some(h))
    }

    pub fn hash_set(&self) -> HashSet<u64> {
        self.hashes.iter().map(|h| h.value()).collect()
    }
}

/// A uniform IV and `S` distinct uniform inputs.
pub fn build_table<P: Permutation + ?Sized, R: Rng + ?Sized>(phi: &P, params: &SpongeParams, rng: &mut R) -> Result<HashTable> {
    params.validate()?;
    let iv = BitString::random(params.c, rng);
    let picks = rand::seq::index::sample(rng, 1usize << params.r, params.table_size as usize);
    let inputs: Vec<BitString> = picks
        .into_iter()
        .map(|i| BitString::new(i as u64, params.r))
        .collect::<Result<_>>()?;
    let hashes = inputs
        .iter()
        .map(|&x| sponge_hash(phi, iv, x))
        .collect::<Result<_>>()?;
    Ok(HashTable { iv, inputs, hashes })
}

/// Membership bitmap of the range of `x ↦ top_r(φ(x‖iv))`.
pub fn range_bitmap<P: Permutation + ?Sized>(phi: &P, iv: BitString, r: u32) -> Vec<bool> {
    let mut range = vec![false; 1 << r];
    for x in 0..(1u64 << r) {
        range[(phi.forward((x << iv.width()) | iv.value()) >> iv.width()) as usize] = true;
    }
    range
}

/// `Valid(h)`: is `h` in the range of the salted sponge?
pub enum ValidOracle<P> {
    /// Precomputed by forward enumeration of all `2^r` inputs.
    Range(Vec<bool>),
    /// Searches the fiber `{h‖g}` through `φ^{-1}` for a preimage ending in `iv`.
    Fiber { phi: P, iv: BitString, r: u32 },
}

impl<P: Permutation> ValidOracle<P> {
    pub fn by_range<Q: Permutation + ?Sized>(phi: &Q, iv: BitString, r: u32) -> Self {
        ValidOracle::Range(range_bitmap(phi, iv, r))
    }

    pub fn by_fiber(phi: P, iv: BitString, r: u32) -> Self {
        ValidOracle::Fiber { phi, iv, r }
    }

    pub fn check(&self, h: u64) -> bool {
        match self {
            ValidOracle::Range(bits) => bits.get(h as usize).copied().unwrap_or(false),
            ValidOracle::Fiber { phi, iv, r } => {
                if h > mask(*r) {
                    return false;
                }
                let c = iv.width();
                (0..1u64 << c).any(|g| phi.inverse((h << c) | g) & mask(c) == iv.value())
            }
        }
    }
}

impl<P: Permutation> Oracle for ValidOracle<P> {
    type Input = u64;
    type Output = bool;

    fn query(&mut self, h: u64) -> Result<bool> {
        Ok(self.check(h))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackStrategy {
    /// Outputs a uniform `r`-bit string; makes no queries.
    RandomGuess,
    /// Inverts uniform blocks `h‖g` with fresh `h` until a preimage ends in the IV.
    InverseProbe,
    /// Asks `Valid` about uniform fresh `h` until one is accepted.
    TableExtend,
    /// Hashes fresh inputs with forward access. Outside the model the bound covers.
    ForwardProbe,
}

impl std::str::FromStr for AttackStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-guess" => Ok(AttackStrategy::RandomGuess),
            "inverse-probe" => Ok(AttackStrategy::InverseProbe),
            "table-extend" => Ok(AttackStrategy::TableExtend),
            "forward-probe" => Ok(AttackStrategy::ForwardProbe),
            other => Err(Error::param("strategy", format!("unknown sponge strategy `{other}`"))),
        }
    }
}

impl std::fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AttackStrategy::RandomGuess => "random-guess",
            AttackStrategy::InverseProbe => "inverse-probe",
            AttackStrategy::TableExtend => "table-extend",
            AttackStrategy::ForwardProbe => "forward-probe",
        };
        f.write_str(s)
    }
}

/// Oracle access granted to an attacker, sharing one query budget `T`.
pub struct AttackOracles<'a> {
    phi: &'a SecretKey,
    valid: &'a ValidOracle<&'a SecretKey>,
    forward_allowed: bool,
    budget: u64,
    counts: BTreeMap<String, u64>,
}

impl<'a> AttackOracles<'a> {
    fn spend(&mut self, which: &str) -> Result<()> {
        let used: u64 = self.counts.values().sum();
        if used >= self.budget {
            return Err(Error::BudgetExceeded(format!("query budget {} exhausted", self.budget)));
        }
        *self.counts.entry(which.to_string()).or_default() += 1;
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.counts.values().sum::<u64>()
    }

    pub fn inverse(&mut self, y: u64) -> Result<u64> {
        self.spend("inverse")?;
        Ok(self.phi.inverse(y))
    }

    pub fn valid(&mut self, h: u64) -> Result<bool> {
        self.spend("valid")?;
        Ok(self.valid.check(h))
    }

    pub fn forward(&mut self, x: u64) -> Result<u64> {
        if !self.forward_allowed {
            return Err(Error::param("forward", "forward access is disabled"));
        }
        self.spend("forward")?;
        Ok(self.phi.forward(x))
    }
}

/// Uniform `r`-bit string outside `known`.
fn fresh<R: Rng + ?Sized>(r: u32, known: &HashSet<u64>, rng: &mut R) -> u64 {
    let mut avoid: Vec<u64> = known.iter().copied().collect();
    avoid.sort_unstable();
    guess_outside(r, &avoid, rng)
}

/// Runs one attack; returns the output candidate.
pub fn attack(
    strategy: AttackStrategy,
    params: &SpongeParams,
    iv: BitString,
    hashes: &HashSet<u64>,
    oracles: &mut AttackOracles<'_>,
    rng: &mut SimRng,
) -> Result<u64> {
    let (r, c) = (params.r, params.c);
    match strategy {
        AttackStrategy::RandomGuess => Ok(rng.random_range(0..1u64 << r)),
        AttackStrategy::InverseProbe => {
            let mut last = fresh(r, hashes, rng);
            while oracles.remaining() > 0 {
                let h = fresh(r, hashes, rng);
                let g = rng.random_range(0..1u64 << c);
                last = h;
                if oracles.inverse((h << c) | g)? & mask(c) == iv.value() {
                    return Ok(h);
                }
            }
            Ok(last)
        }
        AttackStrategy::TableExtend => {
            let mut tried = hashes.clone();
            let mut last = fresh(r, &tried, rng);
            while oracles.remaining() > 0 && (tried.len() as u64) < 1u64 << r {
                let h = fresh(r, &tried, rng);
                last = h;
                if oracles.valid(h)? {
                    return Ok(h);
                }
                tried.insert(h);
            }
            Ok(last)
        }
        AttackStrategy::ForwardProbe => {
            let mut last = fresh(r, hashes, rng);
            while oracles.remaining() > 0 {
                let x = rng.random_range(0..1u64 << r);
                let h = oracles.forward((x << c) | iv.value())? >> c;
                last = h;
                if !hashes.contains(&h) {
                    return Ok(h);
                }
            }
            Ok(last)
        }
    }
}

/// One point of an attack curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackReport {
    pub params: SpongeParams,
    pub queries: u64,
    pub strategy: AttackStrategy,
    pub game: GameReport,
    /// Mean of `|range \ table| / 2^r` over the sampled instances.
    pub exact_guess_rate: f64,
    pub bound: f64,
    /// `2^c` inverse calls per `Valid` query when the range check is done by
    /// classical fiber search, and the `√(2^c)` Grover figure.
    pub fiber_search_cost: f64,
    pub grover_cost: f64,
    pub unsupported_by_theory: bool,
}

pub struct AttackConfig {
    pub params: SpongeParams,
    pub strategy: AttackStrategy,
    pub queries: u64,
    pub allow_forward: bool,
    /// Multiplier for the O-constants of the bound.
    pub bound_scale: f64,
}

pub fn run_attack(config: &AttackConfig, trials: u64, seed: u64) -> Result<AttackReport> {
    run_attack_with(Execution::available(), config, trials, seed)
}

pub fn run_attack_with(mode: Execution, config: &AttackConfig, trials: u64, seed: u64) -> Result<AttackReport> {
    let params = &config.params;
    params.validate()?;
    if config.strategy == AttackStrategy::ForwardProbe && !config.allow_forward {
        return Err(Error::param("strategy", "forward-probe needs forward access to be enabled"));
    }
    let json = serde_json::json!({ "params": params, "queries": config.queries });
    let name = config.strategy.to_string();
    let rows = try_run_trials_with(mode, seed, trials, |ts| {
        let mut ch = ts.stream("challenger");
        let phi = params.sample_perm(&mut ch)?;
        let table = build_table(&phi, params, &mut ch)?;
        let hashes = table.hash_set();
        let valid = match params.backend {
            Backend::Explicit => ValidOracle::<&SecretKey>::by_range(&phi, table.iv, params.r),
            Backend::Keyed => ValidOracle::by_fiber(&phi, table.iv, params.r),
        };
        let range = range_bitmap(&phi, table.iv, params.r);
        let new_in_range = range
            .iter()
            .enumerate()
            .filter(|&(h, &b)| b && !hashes.contains(&(h as u64)))
            .count();
        let mut oracles = AttackOracles {
            phi: &phi,
            valid: &valid,
            forward_allowed: config.allow_forward,
            budget: config.queries,
            counts: BTreeMap::new(),
        };
        let out = attack(config.strategy, params, table.iv, &hashes, &mut oracles, &mut ts.stream("adversary"))?;
        let win = valid.check(out) && !hashes.contains(&out);
        Ok::<_, Error>((
            GameTranscript {
                experiment: "sponge".into(),
                seed,
                trial: ts.trial,
                params: json.clone(),
                strategy: name.clone(),
                queries: oracles.counts,
                revocation: None,
                output: format!("{out:x}"),
                win,
            },
            new_in_range as f64 / (1u64 << params.r) as f64,
        ))
    })?;
    let exact_guess_rate = rows.iter().map(|r| r.1).sum::<f64>() / rows.len().max(1) as f64;
    let game = GameReport::from_transcripts(rows.into_iter().map(|r| r.0).collect());
    let fiber = 2f64.powi(params.c as i32);
    Ok(AttackReport {
        params: *params,
        queries: config.queries,
        strategy: config.strategy,
        game,
        exact_guess_rate,
        bound: bound_eval(params, config.queries, config.bound_scale),
        fiber_search_cost: fiber,
        grover_cost: fiber.sqrt(),
        unsupported_by_theory: config.strategy == AttackStrategy::ForwardProbe,
    })
}

/// `scale · (T√((2^r−S)/2^{r+c}) + √((2^r−S)/2^r) + T³/(2^{r+c}−2^r) + T³/2^r)`.
pub fn bound_eval(params: &SpongeParams, t: u64, scale: f64) -> f64 {
    let two_r = 2f64.powi(params.r as i32);
    let two_rc = 2f64.powi(params.width() as i32);
    let gap = (two_r - params.table_size as f64).max(0.0);
    let t = t as f64;
    let t3 = t * t * t;
    scale * (t * (gap / two_rc).sqrt() + (gap / two_r).sqrt() + t3 / (two_rc - two_r) + t3 / two_r)
}

/// CSV row of an attack curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub r: u32,
    pub c: u32,
    #[serde(rename = "S")]
    pub s: u64,
    #[serde(rename = "T")]
    pub t: u64,
    pub strategy: String,
    pub trials: u64,
    pub wins: u64,
    pub eps_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bound: f64,
}

impl From<&AttackReport> for CurveRow {
    fn from(r: &AttackReport) -> Self {
        let e = &r.game.estimate;
        Self {
            r: r.params.r,
            c: r.params.c,
            s: r.params.table_size,
            t: r.queries,
            strategy: r.strategy.to_string(),
            trials: e.trials,
            wins: e.wins,
            eps_hat: e.p_hat,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            bound: r.bound,
        }
    }
}

// ---------------------------------------------------------------------------
// Classical k ↦ k+1 unforgeability

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalParams {
    pub n: u32,
    pub s: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalStrategy {
    /// Uniform guess outside the given elements, no queries.
    RandomGuess,
    /// Scans the domain with the membership oracle.
    Scan,
}

impl std::str::FromStr for ClassicalStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-guess" => Ok(ClassicalStrategy::RandomGuess),
            "scan" => Ok(ClassicalStrategy::Scan),
            other => Err(Error::param("strategy", format!("unknown classical strategy `{other}`"))),
        }
    }
}

/// Given `k` distinct elements of `S` and `O_S` with budget `q`, output a
/// new element of `S`.
pub fn run_classical_unforgeability(
    params: &ClassicalParams,
    strategy: ClassicalStrategy,
    q: u64,
    trials: u64,
    seed: u64,
) -> Result<GameReport> {
    if params.k == 0 || params.k > params.s {
        return Err(Error::param("k", "need 1 ≤ k ≤ s"));
    }
    let json = serde_json::json!({ "params": params, "queries": q });
    let transcripts = try_run_trials_with(Execution::available(), seed, trials, |ts| {
        let set = Arc::new(random_subset(params.n, params.s, &mut ts.stream("challenger"))?);
        let picks = rand::seq::index::sample(&mut ts.stream("samples"), params.s, params.k);
        let given: Vec<u64> = picks.into_iter().map(|i| set.support()[i]).collect();
        let mut oracle = Counted::with_budget(MembershipOracle::new(set.clone()), q);
        let mut adv = ts.stream("adversary");
        let out = match strategy {
            ClassicalStrategy::RandomGuess => guess_outside(params.n, &given, &mut adv),
            ClassicalStrategy::Scan => *scan_for_members(&given, &mut oracle, params.n, params.k + 1, q)?
                .iter()
                .find(|x| !given.contains(x))
                .expect("scan returns k+1 distinct values"),
        };
        let mut all = given.clone();
        all.push(out);
        Ok::<_, Error>(GameTranscript {
            experiment: "classical-unforge".into(),
            seed,
            trial: ts.trial,
            params: json.clone(),
            strategy: format!("{strategy:?}"),
            queries: BTreeMap::from([("membership".to_string(), oracle.queries())]),
            revocation: None,
            output: format!("{out}"),
            win: distinct_members(&all, &set),
        })
    })?;
    let report = GameReport::from_transcripts(transcripts);
    if params.k >= params.s && report.estimate.wins != 0 {
        return Err(Error::InvalidState("wins with k = s".into()));
    }
    Ok(report)
}

/// `(s − k)/(2^n − k)`.
pub fn classical_guess_probability(params: &ClassicalParams) -> f64 {
    (params.s as f64 - params.k as f64) / ((1u64 << params.n) as f64 - params.k as f64)
}

/// Whether every curve point lies at or below its bound.
pub fn curve_dominated(points: &[AttackReport]) -> bool {
    points.iter().all(|p| p.game.estimate.p_hat <= p.bound + 1e-12)
}
