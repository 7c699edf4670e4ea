//! Revocable programs in the classical-oracle model.
//!
//! Compiling `P` prepares `|S_y⟩` exactly as in [`crate::revenc`] and publishes
//! the checking oracle `O_{P,S}(x, s) = P(x)` if `s ∈ S`, else `0`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{mask, BitString};
use crate::error::{Error, Result};
use crate::perm::Oracle;
use crate::qstate::{measure_computational, DenseState, Register, SubsetState};
use crate::revenc::{self, Backend, RevEncParams, Revocation, SecretKey, VerificationKey};

/// A total function on `domain_bits`-bit inputs, stored as a table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Program {
    domain_bits: u32,
    range_bits: u32,
    table: Vec<u64>,
}

impl Program {
    pub fn from_table(domain_bits: u32, range_bits: u32, table: Vec<u64>) -> Result<Self> {
        if domain_bits > 20 {
            return Err(Error::DimensionTooLarge {
                qubits: domain_bits,
                limit: 20,
            });
        }
        if range_bits > 63 {
            return Err(Error::param("range_bits", format!("{range_bits} > 63")));
        }
        if table.len() != 1usize << domain_bits {
            return Err(Error::DimensionMismatch {
                expected: 1usize << domain_bits,
                actual: table.len(),
            });
        }
        if table.iter().any(|&v| v & !mask(range_bits) != 0) {
            return Err(Error::param("table", format!("output exceeds {range_bits} bits")));
        }
        Ok(Self {
            domain_bits,
            range_bits,
            table,
        })
    }

    /// `P_{y,m}(x) = m` if `x = y`, else `0`.
    pub fn point_function(y: BitString, m: BitString) -> Result<Self> {
        let mut table = vec![0u64; 1usize << y.width()];
        table[y.value() as usize] = m.value();
        Self::from_table(y.width(), m.width(), table)
    }

    pub fn random<R: Rng + ?Sized>(domain_bits: u32, range_bits: u32, rng: &mut R) -> Result<Self> {
        let table = (0..(1usize << domain_bits))
            .map(|_| rng.random::<u64>() & mask(range_bits))
            .collect();
        Self::from_table(domain_bits, range_bits, table)
    }

    /// Parses a JSON object of hex `input → output` pairs; missing inputs map to 0.
    pub fn from_json(domain_bits: u32, range_bits: u32, json: &str) -> Result<Self> {
        let pairs: BTreeMap<String, String> =
            serde_json::from_str(json).map_err(|e| Error::param("program", e.to_string()))?;
        let mut table = vec![0u64; 1usize << domain_bits.min(20)];
        for (x, v) in pairs {
            let x = BitString::from_hex(&x, domain_bits)?;
            let v = BitString::from_hex(&v, range_bits)?;
            table[x.value() as usize] = v.value();
        }
        Self::from_table(domain_bits, range_bits, table)
    }

    pub fn domain_bits(&self) -> u32 {
        self.domain_bits
    }

    pub fn range_bits(&self) -> u32 {
        self.range_bits
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }
}

/// `O_{P,S}`.
#[derive(Debug, Clone)]
pub struct ProgramOracle {
    program: Arc<Program>,
    members: Arc<SubsetState>,
}

impl ProgramOracle {
    pub fn new(program: Arc<Program>, members: Arc<SubsetState>) -> Self {
        Self { program, members }
    }

    pub fn evaluate(&self, x: u64, s: u64) -> u64 {
        if self.members.contains(s) {
            self.program.eval(x)
        } else {
            0
        }
    }
}

impl Oracle for ProgramOracle {
    type Input = (u64, u64);
    type Output = u64;

    fn query(&mut self, (x, s): (u64, u64)) -> Result<u64> {
        Ok(self.evaluate(x, s))
    }
}

/// The compiled program: one copy of `|S_y⟩` plus its public checking oracle.
#[derive(Debug, Clone)]
pub struct CompiledProgram {
    pub state: SubsetState,
    pub oracle: ProgramOracle,
}

/// The revocation key: the backend bijection and `y`.
#[derive(Debug, Clone)]
pub struct ProgramVerificationKey {
    pub y: BitString,
    pub perm: Arc<SecretKey>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramParams {
    pub n: u32,
    pub m: u32,
    pub k: usize,
    pub backend: Backend,
}

impl ProgramParams {
    pub fn revenc(&self) -> Result<RevEncParams> {
        RevEncParams::new(self.n, self.m, self.k, self.backend)
    }
}

pub fn compile<R: Rng + ?Sized>(
    program: Program,
    params: &ProgramParams,
    rng: &mut R,
) -> Result<(CompiledProgram, ProgramVerificationKey)> {
    let rp = params.revenc()?;
    let sk = Arc::new(revenc::keygen(&rp, rng)?);
    let y = BitString::random(params.m, rng);
    compile_with(program, params, sk, y)
}

/// Compiles under a given bijection and `y`.
pub fn compile_with(
    program: Program,
    params: &ProgramParams,
    perm: Arc<SecretKey>,
    y: BitString,
) -> Result<(CompiledProgram, ProgramVerificationKey)> {
    let rp = params.revenc()?;
    let state = revenc::subset_for(perm.as_ref(), &rp, y)?;
    let oracle = ProgramOracle::new(Arc::new(program), Arc::new(state.clone()));
    Ok((CompiledProgram { state, oracle }, ProgramVerificationKey { y, perm }))
}

impl CompiledProgram {
    pub fn dense_state(&self) -> Result<DenseState> {
        self.state.to_dense()
    }

    /// `k` copies of the compiled state.
    pub fn copies(&self, k: usize) -> Result<Register> {
        Register::copies_of(&self.dense_state()?, k)
    }
}

/// Honest evaluation. Every support element of the compiled state lies in
/// `S`, so the ancilla always holds `P(x)` and no measurement is needed.
pub fn eval(cp: &CompiledProgram, x: u64) -> u64 {
    cp.oracle.program.eval(x)
}

/// Evaluation by simulating the coherent oracle call on `|x⟩|Ψ⟩|0⟩` and
/// measuring the output register.
pub fn eval_coherent<R: Rng + ?Sized>(state: &DenseState, oracle: &ProgramOracle, x: u64, rng: &mut R) -> u64 {
    let mut weights: HashMap<u64, f64> = HashMap::new();
    for (s, a) in state.nonzero() {
        *weights.entry(oracle.evaluate(x, s)).or_default() += a.norm_sqr();
    }
    let mut outcomes: Vec<(u64, f64)> = weights.into_iter().collect();
    outcomes.sort_unstable_by_key(|e| e.0);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(v, p) in &outcomes {
        acc += p;
        if u < acc {
            return v;
        }
    }
    outcomes.last().map(|e| e.0).unwrap_or(0)
}

/// Collapsed state after observing output `v` in [`eval_coherent`].
pub fn post_eval_state(state: &DenseState, oracle: &ProgramOracle, x: u64, v: u64) -> Result<DenseState> {
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(s, &a)| {
            if oracle.evaluate(x, s as u64) == v {
                a
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    DenseState::normalized(state.qubits(), amps)
}

pub fn revoke<R: Rng + ?Sized>(
    vk: &ProgramVerificationKey,
    params: &ProgramParams,
    returned: &Register,
    rng: &mut R,
) -> Result<Revocation> {
    let rp = params.revenc()?;
    revenc::revoke(vk.perm.as_ref(), &VerificationKey { y: vk.y }, &rp, returned, rng)
}

/// Measures one copy of a compiled state (what a guessing adversary can do).
pub fn measure_copy<R: Rng + ?Sized>(cp: &CompiledProgram, rng: &mut R) -> Result<u64> {
    Ok(measure_computational(&cp.dense_state()?, rng))
}

/// Best success of a deterministic guesser that sees only the challenge `x`,
/// over weighted programs and per-program weighted challenges:
/// `Σ_x max_v Pr[x, P(x) = v]`. `challenge` receives the index of the program
/// in `programs`.
pub fn trivial_guess_prob<F>(programs: &[(f64, Program)], challenge: F) -> f64
where
    F: Fn(usize, &Program) -> Vec<(f64, u64)>,
{
    let mut joint: HashMap<u64, HashMap<u64, f64>> = HashMap::new();
    for (i, (w, p)) in programs.iter().enumerate() {
        for (wx, x) in challenge(i, p) {
            *joint.entry(x).or_default().entry(p.eval(x)).or_default() += w * wx;
        }
    }
    joint
        .values()
        .map(|by_v| by_v.values().cloned().fold(0.0, f64::max))
        .sum()
}
