//! Revocation experiments. The challenger encrypts or compiles, the
//! pre-revocation adversary returns a register, the challenger runs
//! revocation, and only on acceptance does the post-revocation adversary run.
//! A rejected revocation ends the game with ⊥, which never wins.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Aux, GameReport, GameTranscript, SuccessEstimate};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::parallel::{try_run_trials_with, Execution};
use crate::perm::oracle::InverseOracle;
use crate::perm::{Counted, Oracle};
use crate::pointfn::{self, ChallengeDist, CompiledPointFunction, PointFunction, WkdParams};
use crate::qstate::{DenseState, Outcome, Register};
use crate::revenc::{self, Ciphertext, RevEncParams};
use crate::revprog::{self, Program, ProgramOracle, ProgramParams};
use crate::rng::{SimRng, TrialSeed};

/// One trial of a revocation game.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub transcript: GameTranscript,
    pub accept_probability: f64,
    /// Challenge bit of an indistinguishability game.
    pub bit: Option<u8>,
}

/// Output symbol of an indistinguishability game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symbol {
    Zero,
    One,
    Abort,
}

impl Symbol {
    fn index(self) -> usize {
        match self {
            Symbol::Zero => 0,
            Symbol::One => 1,
            Symbol::Abort => 2,
        }
    }

    fn parse(s: &str) -> Self {
        match s {
            "0" => Symbol::Zero,
            "1" => Symbol::One,
            _ => Symbol::Abort,
        }
    }
}

pub const ABORT: &str = "⊥";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevokeReport {
    pub game: GameReport,
    pub acceptance: SuccessEstimate,
    pub win_given_accept: SuccessEstimate,
    pub win_given_reject: SuccessEstimate,
    pub mean_accept_probability: f64,
    /// `counts[b][symbol]` with symbols ordered 0, 1, ⊥.
    pub symbol_counts: Option<[[u64; 3]; 2]>,
    /// Largest gap `|Pr[symbol | b=0] − Pr[symbol | b=1]|` over the three symbols.
    pub advantage: Option<f64>,
}

impl RevokeReport {
    pub fn from_records(records: Vec<TrialRecord>) -> Self {
        let n = records.len() as u64;
        let accepted = |r: &&TrialRecord| r.transcript.revocation == Some(Outcome::Accept);
        let acc = records.iter().filter(accepted).count() as u64;
        let wins_acc = records.iter().filter(accepted).filter(|r| r.transcript.win).count() as u64;
        let wins_rej = records
            .iter()
            .filter(|r| r.transcript.revocation != Some(Outcome::Accept) && r.transcript.win)
            .count() as u64;
        let mean_accept_probability = if n == 0 {
            0.0
        } else {
            records.iter().map(|r| r.accept_probability).sum::<f64>() / n as f64
        };
        let symbol_counts = records.iter().all(|r| r.bit.is_some()).then(|| {
            let mut counts = [[0u64; 3]; 2];
            for r in &records {
                let b = r.bit.unwrap() as usize;
                counts[b][Symbol::parse(&r.transcript.output).index()] += 1;
            }
            counts
        });
        let advantage = symbol_counts.map(|c| {
            let n0: u64 = c[0].iter().sum();
            let n1: u64 = c[1].iter().sum();
            (0..3)
                .map(|s| (ratio(c[0][s], n0) - ratio(c[1][s], n1)).abs())
                .fold(0.0, f64::max)
        });
        Self {
            game: GameReport::from_transcripts(records.into_iter().map(|r| r.transcript).collect()),
            acceptance: SuccessEstimate::from_counts(acc, n),
            win_given_accept: SuccessEstimate::from_counts(wins_acc, acc),
            win_given_reject: SuccessEstimate::from_counts(wins_rej, n - acc),
            mean_accept_probability,
            symbol_counts,
            advantage,
        }
    }

    /// `Pr[win | acc]·Pr[acc] + Pr[win | rej]·Pr[rej] = Pr[win]`, from the
    /// transcript counts.
    pub fn conditioning_holds(&self) -> bool {
        let n = self.game.estimate.trials as f64;
        if n == 0.0 {
            return self.game.estimate.wins == 0;
        }
        let acc = self.acceptance.p_hat;
        let recombined = self.win_given_accept.p_hat * acc + self.win_given_reject.p_hat * (1.0 - acc);
        self.win_given_accept.wins + self.win_given_reject.wins == self.game.estimate.wins
            && (recombined - self.game.estimate.p_hat).abs() < 1e-12
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// A uniformly random computational basis state, the pure-state unraveling
/// of a maximally mixed register.
fn random_basis<R: Rng + ?Sized>(qubits: u32, rng: &mut R) -> Result<DenseState> {
    DenseState::basis(qubits, rng.random_range(0..1u64 << qubits))
}

/// `copies` with copy 0 replaced by `fake`.
fn with_fake_first(copies: &Register, fake: DenseState) -> Result<Register> {
    let mut regs: Vec<DenseState> = (0..copies.copies())
        .map(|i| {
            copies
                .copy(i)
                .cloned()
                .ok_or_else(|| Error::InvalidState("copies are entangled".into()))
        })
        .collect::<Result<_>>()?;
    regs[0] = fake;
    Register::product(regs)
}

fn first_copy(copies: &Register) -> Result<DenseState> {
    copies
        .copy(0)
        .cloned()
        .ok_or_else(|| Error::InvalidState("copies are entangled".into()))
}

// ---------------------------------------------------------------------------
// Revocable encryption

/// Indistinguishability between two fixed messages, or search for a uniform one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RevEncVariant {
    Indistinguishability { mu0: BitString, mu1: BitString },
    Search,
}

impl RevEncVariant {
    /// Messages `0^m` and `1^m`.
    pub fn standard(m: u32) -> Result<Self> {
        Ok(RevEncVariant::Indistinguishability {
            mu0: BitString::zero(m),
            mu1: BitString::new(crate::bits::mask(m), m)?,
        })
    }
}

pub type InverseHandle<'a> = dyn Oracle<Input = u64, Output = u64> + 'a;

pub trait RevEncAdversary: Sync {
    fn name(&self) -> String;

    fn pre_phase(&self, ct: &Ciphertext, params: &RevEncParams, rng: &mut SimRng) -> Result<(Register, Aux)>;

    /// Guesses the encrypted message. In the indistinguishability game
    /// `candidates` holds `(μ₀, μ₁)`; the guess counts as `b′ = 1` exactly
    /// when it equals `μ₁`. `inverse` evaluates `φ^{-1}`.
    fn post_phase(
        &self,
        aux: &Aux,
        candidates: Option<[BitString; 2]>,
        inverse: &mut InverseHandle<'_>,
        params: &RevEncParams,
        rng: &mut SimRng,
    ) -> Result<BitString>;
}

fn random_message(candidates: Option<[BitString; 2]>, m: u32, rng: &mut SimRng) -> BitString {
    match candidates {
        Some(c) => c[rng.random_range(0..2)],
        None => BitString::random(m, rng),
    }
}

/// Recovers the message from a basis element `v` of one copy via `φ^{-1}`.
fn decrypt_with_oracle(v: u64, pad: BitString, inverse: &mut InverseHandle<'_>) -> Result<BitString> {
    let w = inverse.query(v)?;
    Ok(BitString::truncated(w, pad.width()) ^ pad)
}

/// Returns every copy, then guesses uniformly.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestRandomGuess;

impl RevEncAdversary for HonestRandomGuess {
    fn name(&self) -> String {
        "honest-random-guess".into()
    }

    fn pre_phase(&self, ct: &Ciphertext, _params: &RevEncParams, _rng: &mut SimRng) -> Result<(Register, Aux)> {
        Ok((
            ct.copies.clone(),
            Aux {
                classical: vec![ct.pad],
                ..Aux::default()
            },
        ))
    }

    fn post_phase(
        &self,
        _aux: &Aux,
        candidates: Option<[BitString; 2]>,
        _inverse: &mut InverseHandle<'_>,
        params: &RevEncParams,
        rng: &mut SimRng,
    ) -> Result<BitString> {
        Ok(random_message(candidates, params.m, rng))
    }
}

/// Keeps copy 0, returns a uniformly random basis state in its place, and
/// decrypts the kept copy with one `φ^{-1}` query if revocation passes.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeepOneCopy;

impl RevEncAdversary for KeepOneCopy {
    fn name(&self) -> String {
        "keep-one-copy".into()
    }

    fn pre_phase(&self, ct: &Ciphertext, params: &RevEncParams, rng: &mut SimRng) -> Result<(Register, Aux)> {
        let kept = first_copy(&ct.copies)?;
        let fake = random_basis(params.width(), rng)?;
        Ok((
            with_fake_first(&ct.copies, fake)?,
            Aux {
                kept: vec![kept],
                classical: vec![ct.pad],
                ..Aux::default()
            },
        ))
    }

    fn post_phase(
        &self,
        aux: &Aux,
        _candidates: Option<[BitString; 2]>,
        inverse: &mut InverseHandle<'_>,
        _params: &RevEncParams,
        rng: &mut SimRng,
    ) -> Result<BitString> {
        let v = aux.kept[0].measure(rng);
        decrypt_with_oracle(v, aux.classical[0], inverse)
    }
}

/// Measures copy 0, returns the collapsed basis state, and decrypts the
/// measured value afterwards.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeasureOneCopy;

impl RevEncAdversary for MeasureOneCopy {
    fn name(&self) -> String {
        "measure-one-copy".into()
    }

    fn pre_phase(&self, ct: &Ciphertext, params: &RevEncParams, rng: &mut SimRng) -> Result<(Register, Aux)> {
        let v = first_copy(&ct.copies)?.measure(rng);
        Ok((
            with_fake_first(&ct.copies, DenseState::basis(params.width(), v)?)?,
            Aux {
                measured: vec![v],
                classical: vec![ct.pad],
                ..Aux::default()
            },
        ))
    }

    fn post_phase(
        &self,
        aux: &Aux,
        _candidates: Option<[BitString; 2]>,
        inverse: &mut InverseHandle<'_>,
        _params: &RevEncParams,
        _rng: &mut SimRng,
    ) -> Result<BitString> {
        decrypt_with_oracle(aux.measured[0], aux.classical[0], inverse)
    }
}

pub fn revenc_adversary(name: &str) -> Result<Box<dyn RevEncAdversary>> {
    match name {
        "honest-random-guess" => Ok(Box::new(HonestRandomGuess)),
        "keep-one-copy" => Ok(Box::new(KeepOneCopy)),
        "measure-one-copy" => Ok(Box::new(MeasureOneCopy)),
        other => Err(Error::param("strategy", format!("unknown revenc strategy `{other}`"))),
    }
}

/// Runs both phases against a prepared ciphertext. Returns the transcript
/// pieces: (revocation, accept probability, guess, post-phase queries).
fn play_revenc(
    sk: &revenc::SecretKey,
    vk: &revenc::VerificationKey,
    ct: &Ciphertext,
    candidates: Option<[BitString; 2]>,
    params: &RevEncParams,
    adversary: &dyn RevEncAdversary,
    ts: TrialSeed,
) -> Result<(Outcome, f64, Option<BitString>, u64)> {
    let mut adv = ts.stream("adversary");
    let (returned, aux) = adversary.pre_phase(ct, params, &mut adv)?;
    let rev = revenc::revoke(sk, vk, params, &returned, &mut ts.stream("revoke"))?;
    if rev.outcome == Outcome::Reject {
        return Ok((rev.outcome, rev.accept_probability, None, 0));
    }
    let mut inverse = Counted::new(InverseOracle(sk));
    let guess = adversary.post_phase(&aux, candidates, &mut inverse, params, &mut adv)?;
    Ok((rev.outcome, rev.accept_probability, Some(guess), inverse.queries()))
}

pub fn run_revenc(
    params: &RevEncParams,
    variant: RevEncVariant,
    adversary: &dyn RevEncAdversary,
    trials: u64,
    seed: u64,
) -> Result<RevokeReport> {
    run_revenc_with(Execution::available(), params, variant, adversary, trials, seed)
}

pub fn run_revenc_with(
    mode: Execution,
    params: &RevEncParams,
    variant: RevEncVariant,
    adversary: &dyn RevEncAdversary,
    trials: u64,
    seed: u64,
) -> Result<RevokeReport> {
    params.validate()?;
    let name = adversary.name();
    let json = serde_json::json!({ "params": params, "variant": variant });
    let experiment = match variant {
        RevEncVariant::Indistinguishability { .. } => "revenc",
        RevEncVariant::Search => "revenc-search",
    };
    let records = try_run_trials_with(mode, seed, trials, |ts| {
        let sk = revenc::keygen(params, &mut ts.stream("key"))?;
        let (mu, bit, candidates) = match variant {
            RevEncVariant::Indistinguishability { mu0, mu1 } => {
                let b = ts.stream("message").random_range(0..2u8);
                (if b == 0 { mu0 } else { mu1 }, Some(b), Some([mu0, mu1]))
            }
            RevEncVariant::Search => (BitString::random(params.m, &mut ts.stream("r")), None, None),
        };
        let y = BitString::random(params.m, &mut ts.stream("c1"));
        let (ct, vk) = revenc::encrypt_with_y(&sk, mu, y, params)?;
        let (outcome, p, guess, queries) = play_revenc(&sk, &vk, &ct, candidates, params, adversary, ts)?;
        let (output, win) = match (guess, candidates) {
            (None, _) => (ABORT.to_string(), false),
            (Some(g), Some([_, mu1])) => {
                let b_guess = u8::from(g == mu1);
                (b_guess.to_string(), Some(b_guess) == bit)
            }
            (Some(g), None) => (g.to_hex(), g == mu),
        };
        Ok::<_, Error>(TrialRecord {
            transcript: GameTranscript {
                experiment: experiment.into(),
                seed,
                trial: ts.trial,
                params: json.clone(),
                strategy: name.clone(),
                queries: BTreeMap::from([("pre".to_string(), 0), ("post".to_string(), queries)]),
                revocation: Some(outcome),
                output,
                win,
            },
            accept_probability: p,
            bit,
        })
    })?;
    Ok(RevokeReport::from_records(records))
}

/// Search game against the hybrid scheme, played by a revocable-encryption
/// adversary through the adapter that unmasks its guess of `r` with the
/// one-time pad. Shares the `key`, `r`, `c1`, `revoke` and `adversary`
/// streams with [`run_revenc`]'s search variant, so the two games see the
/// same inner ciphertext trial by trial.
pub fn run_hybrid_search(
    params: &RevEncParams,
    adversary: &dyn RevEncAdversary,
    trials: u64,
    seed: u64,
) -> Result<RevokeReport> {
    params.validate()?;
    let name = format!("otp-adapter({})", adversary.name());
    let json = serde_json::json!({ "params": params, "variant": "search" });
    let records = try_run_trials_with(Execution::available(), seed, trials, |ts| {
        let sk = revenc::keygen(params, &mut ts.stream("key"))?;
        let m = BitString::random(params.m, &mut ts.stream("message"));
        let r = BitString::random(params.m, &mut ts.stream("r"));
        let y = BitString::random(params.m, &mut ts.stream("c1"));
        let (ct, vk) = pointfn::hybrid_encrypt_with(&sk, m, r, y, params)?;
        let (outcome, p, guess, queries) = play_revenc(&sk, &vk, &ct.inner, None, params, adversary, ts)?;
        let guess = guess.map(|g| g ^ ct.otp);
        Ok::<_, Error>(TrialRecord {
            transcript: GameTranscript {
                experiment: "hybrid-search".into(),
                seed,
                trial: ts.trial,
                params: json.clone(),
                strategy: name.clone(),
                queries: BTreeMap::from([("pre".to_string(), 0), ("post".to_string(), queries)]),
                revocation: Some(outcome),
                output: guess.map_or(ABORT.to_string(), |g| g.to_hex()),
                win: guess == Some(m),
            },
            accept_probability: p,
            bit: None,
        })
    })?;
    Ok(RevokeReport::from_records(records))
}

// ---------------------------------------------------------------------------
// Revocable programs

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProgramFamily {
    /// `P_{y,v}` with `y` and `v` uniform.
    PointFunctions { range_bits: u32 },
    /// Uniformly random lookup tables.
    RandomTables { range_bits: u32 },
}

impl ProgramFamily {
    pub fn range_bits(&self) -> u32 {
        match *self {
            ProgramFamily::PointFunctions { range_bits } | ProgramFamily::RandomTables { range_bits } => range_bits,
        }
    }

    /// Samples a program on `domain_bits` inputs and its marked input (0 for
    /// random tables).
    pub fn sample<R: Rng + ?Sized>(&self, domain_bits: u32, rng: &mut R) -> Result<(Program, BitString)> {
        match *self {
            ProgramFamily::PointFunctions { range_bits } => {
                let y = BitString::random(domain_bits, rng);
                let v = BitString::random(range_bits, rng);
                Ok((Program::point_function(y, v)?, y))
            }
            ProgramFamily::RandomTables { range_bits } => Ok((
                Program::random(domain_bits, range_bits, rng)?,
                BitString::zero(domain_bits),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevProgGame {
    pub params: ProgramParams,
    pub family: ProgramFamily,
    pub challenge: ChallengeDist,
}

impl RevProgGame {
    /// Programs take `m`-bit inputs.
    pub fn domain_bits(&self) -> u32 {
        self.params.m
    }

    /// Best win probability without any state or oracle.
    pub fn trivial_probability(&self) -> f64 {
        let d = self.domain_bits();
        match self.family {
            ProgramFamily::PointFunctions { range_bits } => {
                let p = self.challenge.marked_weight(d);
                let inv = 2f64.powi(-(range_bits as i32));
                (1.0 - p + p * inv).max(p * inv)
            }
            ProgramFamily::RandomTables { range_bits } => 2f64.powi(-(range_bits as i32)),
        }
    }
}

pub type ProgramHandle<'a> = dyn Oracle<Input = (u64, u64), Output = u64> + 'a;

pub trait ProgramAdversary: Sync {
    fn name(&self) -> String;

    fn pre_phase(
        &self,
        copies: &Register,
        oracle: &mut ProgramHandle<'_>,
        game: &RevProgGame,
        rng: &mut SimRng,
    ) -> Result<(Register, Aux)>;

    /// Guesses `P(x)`.
    fn post_phase(
        &self,
        aux: &Aux,
        x: u64,
        oracle: &mut ProgramHandle<'_>,
        game: &RevProgGame,
        rng: &mut SimRng,
    ) -> Result<u64>;
}

/// Returns every copy and answers `0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestZeroGuess;

impl ProgramAdversary for HonestZeroGuess {
    fn name(&self) -> String {
        "honest-zero-guess".into()
    }

    fn pre_phase(&self, copies: &Register, _: &mut ProgramHandle<'_>, _: &RevProgGame, _: &mut SimRng) -> Result<(Register, Aux)> {
        Ok((copies.clone(), Aux::default()))
    }

    fn post_phase(&self, _: &Aux, _: u64, _: &mut ProgramHandle<'_>, _: &RevProgGame, _: &mut SimRng) -> Result<u64> {
        Ok(0)
    }
}

/// Keeps copy 0 behind a random basis fake; after acceptance measures the
/// kept copy for some `s ∈ S` and asks the oracle for `P(x)` with it.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProgramKeepOneCopy;

impl ProgramAdversary for ProgramKeepOneCopy {
    fn name(&self) -> String {
        "keep-one-copy".into()
    }

    fn pre_phase(
        &self,
        copies: &Register,
        _: &mut ProgramHandle<'_>,
        _: &RevProgGame,
        rng: &mut SimRng,
    ) -> Result<(Register, Aux)> {
        let kept = first_copy(copies)?;
        let fake = random_basis(copies.copy_qubits(), rng)?;
        Ok((
            with_fake_first(copies, fake)?,
            Aux {
                kept: vec![kept],
                ..Aux::default()
            },
        ))
    }

    fn post_phase(
        &self,
        aux: &Aux,
        x: u64,
        oracle: &mut ProgramHandle<'_>,
        _: &RevProgGame,
        rng: &mut SimRng,
    ) -> Result<u64> {
        let s = aux.kept[0].measure(rng);
        oracle.query((x, s))
    }
}

/// Returns every copy, then searches for a member of `S` by querying
/// `O(x, s)` for `s = 0, 1, …` until the answer is nonzero or the budget runs
/// out.
#[derive(Debug, Clone, Copy)]
pub struct OracleScan {
    pub budget: u64,
}

impl ProgramAdversary for OracleScan {
    fn name(&self) -> String {
        format!("oracle-scan(q={})", self.budget)
    }

    fn pre_phase(&self, copies: &Register, _: &mut ProgramHandle<'_>, _: &RevProgGame, _: &mut SimRng) -> Result<(Register, Aux)> {
        Ok((copies.clone(), Aux::default()))
    }

    fn post_phase(
        &self,
        _: &Aux,
        x: u64,
        oracle: &mut ProgramHandle<'_>,
        game: &RevProgGame,
        _: &mut SimRng,
    ) -> Result<u64> {
        let width = game.params.n + game.params.m;
        let end = (1u64 << width).min(self.budget);
        for s in 0..end {
            let v = oracle.query((x, s))?;
            if v != 0 {
                return Ok(v);
            }
        }
        Ok(0)
    }
}

pub fn program_adversary(name: &str, queries: u64) -> Result<Box<dyn ProgramAdversary>> {
    match name {
        "honest-zero-guess" => Ok(Box::new(HonestZeroGuess)),
        "keep-one-copy" => Ok(Box::new(ProgramKeepOneCopy)),
        "oracle-scan" => Ok(Box::new(OracleScan { budget: queries })),
        other => Err(Error::param("strategy", format!("unknown revprog strategy `{other}`"))),
    }
}

pub fn run_revprog(game: &RevProgGame, adversary: &dyn ProgramAdversary, trials: u64, seed: u64) -> Result<RevokeReport> {
    game.params.revenc()?;
    let name = adversary.name();
    let json = serde_json::to_value(game).expect("params serialize");
    let records = try_run_trials_with(Execution::available(), seed, trials, |ts| {
        let mut ch = ts.stream("challenger");
        let (program, y) = game.family.sample(game.domain_bits(), &mut ch)?;
        let (cp, vk) = revprog::compile(program.clone(), &game.params, &mut ts.stream("key"))?;
        let copies = cp.copies(game.params.k)?;
        let mut adv = ts.stream("adversary");

        let mut pre = Counted::new(cp.oracle.clone());
        let (returned, aux) = adversary.pre_phase(&copies, &mut pre, game, &mut adv)?;
        let rev = revprog::revoke(&vk, &game.params, &returned, &mut ts.stream("revoke"))?;
        let mut post = Counted::new(cp.oracle.clone());
        let (output, win) = if rev.outcome == Outcome::Accept {
            let x = game.challenge.sample(y, &mut ch).value();
            let guess = adversary.post_phase(&aux, x, &mut post, game, &mut adv)?;
            (guess.to_string(), guess == program.eval(x))
        } else {
            (ABORT.to_string(), false)
        };
        Ok::<_, Error>(TrialRecord {
            transcript: GameTranscript {
                experiment: "revprog".into(),
                seed,
                trial: ts.trial,
                params: json.clone(),
                strategy: name.clone(),
                queries: BTreeMap::from([("pre".to_string(), pre.queries()), ("post".to_string(), post.queries())]),
                revocation: Some(rev.outcome),
                output,
                win,
            },
            accept_probability: rev.accept_probability,
            bit: None,
        })
    })?;
    Ok(RevokeReport::from_records(records))
}

/// The checking oracle of a compiled program, for adversaries that want it
/// outside a game.
pub fn program_oracle(program: Program, members: crate::qstate::SubsetState) -> ProgramOracle {
    ProgramOracle::new(Arc::new(program), Arc::new(members))
}

// ---------------------------------------------------------------------------
// Point functions

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointFnGame {
    pub params: WkdParams,
    pub challenge: ChallengeDist,
}

impl PointFnGame {
    pub fn trivial_probability(&self) -> f64 {
        pointfn::trivial_win_probability(self.challenge, self.params.lambda)
    }
}

pub type HashHandle<'a> = dyn Oracle<Input = u64, Output = u64> + 'a;

pub trait PointFnAdversary: Sync {
    fn name(&self) -> String;

    fn pre_phase(
        &self,
        state: &CompiledPointFunction,
        h: &mut HashHandle<'_>,
        game: &PointFnGame,
        rng: &mut SimRng,
    ) -> Result<(Register, Aux)>;

    /// Guesses `P(x)`.
    fn post_phase(
        &self,
        aux: &Aux,
        x: BitString,
        h: &mut HashHandle<'_>,
        game: &PointFnGame,
        rng: &mut SimRng,
    ) -> Result<BitString>;
}

/// Returns every copy and answers `0^λ′`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestReturn;

impl PointFnAdversary for HonestReturn {
    fn name(&self) -> String {
        "honest-return".into()
    }

    fn pre_phase(&self, state: &CompiledPointFunction, _: &mut HashHandle<'_>, _: &PointFnGame, _: &mut SimRng) -> Result<(Register, Aux)> {
        Ok((state.copies().clone(), Aux::default()))
    }

    fn post_phase(&self, _: &Aux, _: BitString, _: &mut HashHandle<'_>, game: &PointFnGame, _: &mut SimRng) -> Result<BitString> {
        Ok(BitString::zero(game.params.lambda))
    }
}

/// Returns every copy but remembers the classical ciphertext. After
/// revocation it guesses a key uniformly and runs the tag check under it on a
/// uniformly random basis state standing in for the surrendered copy,
/// answering the decrypted payload if the check passes and `0^λ′` otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct WrongKeyDecryptor;

impl PointFnAdversary for WrongKeyDecryptor {
    fn name(&self) -> String {
        "wrong-key-decryptor".into()
    }

    fn pre_phase(
        &self,
        state: &CompiledPointFunction,
        _: &mut HashHandle<'_>,
        _: &PointFnGame,
        rng: &mut SimRng,
    ) -> Result<(Register, Aux)> {
        let copies = state.copies();
        let mut ct = state.ct.clone();
        ct.inner.inner.copies = Register::product(vec![random_basis(copies.copy_qubits(), rng)?])?;
        Ok((
            copies.clone(),
            Aux {
                wkd: Some(ct),
                ..Aux::default()
            },
        ))
    }

    fn post_phase(
        &self,
        aux: &Aux,
        _x: BitString,
        h: &mut HashHandle<'_>,
        game: &PointFnGame,
        rng: &mut SimRng,
    ) -> Result<BitString> {
        let ct = aux.wkd.clone().ok_or_else(|| Error::InvalidState("no ciphertext kept".into()))?;
        let key = BitString::random(game.params.lambda, rng);
        let mut stand_in = CompiledPointFunction { ct };
        pointfn::pf_eval(&mut stand_in, key, h, &game.params, rng)
    }
}

/// Keeps a real copy behind a random basis fake and evaluates on it after
/// acceptance.
#[derive(Debug, Clone, Copy, Default)]
pub struct PointFnKeepOneCopy;

impl PointFnAdversary for PointFnKeepOneCopy {
    fn name(&self) -> String {
        "keep-one-copy".into()
    }

    fn pre_phase(
        &self,
        state: &CompiledPointFunction,
        _: &mut HashHandle<'_>,
        _: &PointFnGame,
        rng: &mut SimRng,
    ) -> Result<(Register, Aux)> {
        let copies = state.copies();
        let kept = first_copy(copies)?;
        let mut ct = state.ct.clone();
        ct.inner.inner.copies = Register::product(vec![kept])?;
        let fake = random_basis(copies.copy_qubits(), rng)?;
        Ok((
            with_fake_first(copies, fake)?,
            Aux {
                wkd: Some(ct),
                ..Aux::default()
            },
        ))
    }

    fn post_phase(
        &self,
        aux: &Aux,
        x: BitString,
        h: &mut HashHandle<'_>,
        game: &PointFnGame,
        rng: &mut SimRng,
    ) -> Result<BitString> {
        let ct = aux.wkd.clone().ok_or_else(|| Error::InvalidState("no ciphertext kept".into()))?;
        let mut kept = CompiledPointFunction { ct };
        pointfn::pf_eval(&mut kept, x, h, &game.params, rng)
    }
}

pub fn pointfn_adversary(name: &str) -> Result<Box<dyn PointFnAdversary>> {
    match name {
        "honest-return" => Ok(Box::new(HonestReturn)),
        "wrong-key-decryptor" => Ok(Box::new(WrongKeyDecryptor)),
        "keep-one-copy" => Ok(Box::new(PointFnKeepOneCopy)),
        other => Err(Error::param("strategy", format!("unknown pointfn strategy `{other}`"))),
    }
}

pub fn run_pointfn(game: &PointFnGame, adversary: &dyn PointFnAdversary, trials: u64, seed: u64) -> Result<RevokeReport> {
    game.params.revenc()?;
    let name = adversary.name();
    let json = serde_json::to_value(game).expect("params serialize");
    let records = try_run_trials_with(Execution::available(), seed, trials, |ts| {
        let mut ch = ts.stream("challenger");
        let mut h = game.params.random_oracle(ts.stream("oracle"))?;
        let p = PointFunction::random(game.params.lambda, &mut ch);
        let (state, vk) = pointfn::pf_compile(&p, &game.params, &mut h, &mut ts.stream("key"))?;
        let mut adv = ts.stream("adversary");

        let mut pre = Counted::new(&mut h);
        let (returned, aux) = adversary.pre_phase(&state, &mut pre, game, &mut adv)?;
        let pre_queries = pre.queries();
        let rev = pointfn::pf_revoke(&vk, &returned, &game.params, &mut ts.stream("revoke"))?;
        let mut post = Counted::new(&mut h);
        let (output, win) = if rev.outcome == Outcome::Accept {
            let x = game.challenge.sample(p.y, &mut ch);
            let guess = adversary.post_phase(&aux, x, &mut post, game, &mut adv)?;
            (guess.to_hex(), guess == p.eval(x))
        } else {
            (ABORT.to_string(), false)
        };
        Ok::<_, Error>(TrialRecord {
            transcript: GameTranscript {
                experiment: "pointfn".into(),
                seed,
                trial: ts.trial,
                params: json.clone(),
                strategy: name.clone(),
                queries: BTreeMap::from([("pre".to_string(), pre_queries), ("post".to_string(), post.queries())]),
                revocation: Some(rev.outcome),
                output,
                win,
            },
            accept_probability: rev.accept_probability,
            bit: None,
        })
    })?;
    Ok(RevokeReport::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::project_accept_prob;
    use crate::revenc::Backend;

    fn revenc_params(k: usize) -> RevEncParams {
        RevEncParams::new(2, 2, k, Backend::Keyed).unwrap()
    }

    #[test]
    fn honest_returner_has_no_advantage() {
        let params = revenc_params(2);
        let r = run_revenc(&params, RevEncVariant::standard(2).unwrap(), &HonestRandomGuess, 4000, 1).unwrap();
        assert_eq!(r.acceptance.wins, 4000);
        assert!((r.mean_accept_probability - 1.0).abs() < 1e-9);
        let c = r.symbol_counts.unwrap();
        let a = SuccessEstimate::from_counts(c[0][1], c[0].iter().sum());
        let b = SuccessEstimate::from_counts(c[1][1], c[1].iter().sum());
        assert!(super::super::stats::same_rate(&a, &b, 3.0), "{c:?}");
        assert!(r.conditioning_holds());
        assert!(r.game.transcripts.iter().all(|t| t.queries["post"] == 0));
    }

    #[test]
    fn keep_one_copy_acceptance_is_one_over_dim() {
        // Averaged over the uniformly random basis fake, the acceptance
        // probability is ⟨S|(I/16)|S⟩ = 1/16 at n = m = 2.
        let params = revenc_params(2);
        let mut rng = crate::rng::seeded(5);
        let sk = revenc::keygen(&params, &mut rng).unwrap();
        let y = BitString::new(1, 2).unwrap();
        let target = revenc::subset_for(&sk, &params, y).unwrap().to_dense().unwrap();
        let mean: f64 = (0..16u64)
            .map(|v| project_accept_prob(&DenseState::basis(4, v).unwrap(), &target).unwrap())
            .sum::<f64>()
            / 16.0;
        assert!((mean - 1.0 / 16.0).abs() < 1e-12);

        let r = run_revenc(&params, RevEncVariant::standard(2).unwrap(), &KeepOneCopy, 8000, 2).unwrap();
        assert!(r.acceptance.consistent_with(1.0 / 16.0, 3.0), "{:?}", r.acceptance);
        assert!((r.mean_accept_probability - 1.0 / 16.0).abs() < 0.01);
        assert_eq!(r.win_given_accept.wins, r.win_given_accept.trials);
        assert!(r.conditioning_holds());
    }

    #[test]
    fn hybrid_adapter_matches_revenc_search_per_trial() {
        let params = revenc_params(2);
        for adv in [&KeepOneCopy as &dyn RevEncAdversary, &MeasureOneCopy, &HonestRandomGuess] {
            let a = run_revenc(&params, RevEncVariant::Search, adv, 600, 9).unwrap();
            let b = run_hybrid_search(&params, adv, 600, 9).unwrap();
            let wa: Vec<bool> = a.game.transcripts.iter().map(|t| t.win).collect();
            let wb: Vec<bool> = b.game.transcripts.iter().map(|t| t.win).collect();
            assert_eq!(wa, wb, "{}", adv.name());
        }
    }

    #[test]
    fn revprog_trivial_guess_matches_enumeration() {
        let game = RevProgGame {
            params: ProgramParams { n: 2, m: 2, k: 2, backend: Backend::Keyed },
            family: ProgramFamily::PointFunctions { range_bits: 2 },
            challenge: ChallengeDist::Uniform,
        };
        let mut programs = Vec::new();
        for y in BitString::all(2) {
            for v in BitString::all(2) {
                programs.push((1.0 / 16.0, Program::point_function(y, v).unwrap()));
            }
        }
        let exact = revprog::trivial_guess_prob(&programs, |i, _| {
            ChallengeDist::Uniform.weights(BitString::new(i as u64 / 4, 2).unwrap())
        });
        assert!((exact - game.trivial_probability()).abs() < 1e-12);
        assert!((exact - 13.0 / 16.0).abs() < 1e-12);

        let r = run_revprog(&game, &HonestZeroGuess, 4000, 3).unwrap();
        assert!(r.game.estimate.consistent_with(exact, 3.0), "{:?}", r.game.estimate);
        assert!(r.conditioning_holds());
    }

    #[test]
    fn revprog_full_oracle_scan_always_wins() {
        let game = RevProgGame {
            params: ProgramParams { n: 2, m: 2, k: 1, backend: Backend::Explicit },
            family: ProgramFamily::RandomTables { range_bits: 3 },
            challenge: ChallengeDist::Uniform,
        };
        let r = run_revprog(&game, &OracleScan { budget: 16 }, 300, 4).unwrap();
        assert_eq!(r.game.estimate.wins, 300);
        let r = run_revprog(&game, &ProgramKeepOneCopy, 2000, 4).unwrap();
        assert_eq!(r.win_given_accept.wins, r.win_given_accept.trials);
        assert!(r.game.transcripts.iter().all(|t| t.queries["pre"] == 0));
    }

    #[test]
    fn pointfn_wrong_key_decryptor_stays_near_trivial() {
        let game = PointFnGame {
            params: WkdParams::with_defaults(3, 2),
            challenge: ChallengeDist::Marked(1.0),
        };
        let r = run_pointfn(&game, &WrongKeyDecryptor, 2000, 5).unwrap();
        let bound = game.trivial_probability() + game.params.wkd_bound();
        assert!(r.game.estimate.p_hat <= bound + 3.0 * (bound * (1.0 - bound) / 2000.0).sqrt() + 1e-12);
        let honest = run_pointfn(&game, &HonestReturn, 500, 5).unwrap();
        assert_eq!(honest.acceptance.wins, 500);
        let keep = run_pointfn(&game, &PointFnKeepOneCopy, 2000, 6).unwrap();
        assert_eq!(keep.win_given_accept.wins, keep.win_given_accept.trials);
    }
}
