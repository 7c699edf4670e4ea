//! Hybrid encryption, the wrong-key-detection transform in a lazily sampled
//! random oracle, and revocable point functions built on both.
//!
//! The point-function scheme uses the marked input `y` itself as the secret
//! key of the wrong-key-detecting scheme, so every key, message and input is a
//! `λ′`-bit string and `H` maps `2λ′` bits to `ℓ` bits. The revocable
//! encryption underneath runs with pad width `m = λ′`; its bijection is
//! derived deterministically from the `λ′`-bit key.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::bits::{mask, BitString};
use crate::error::{Error, Result};
use crate::perm::{sample_random_perm, Oracle, PermKey, Permutation};
use crate::qstate::{measure_computational, DenseState, Register};
use crate::revenc::{self, Backend, Ciphertext, RevEncParams, Revocation, SecretKey, VerificationKey};
use crate::rng::SimRng;

/// Lazily sampled random function `{0,1}^{input_bits} → {0,1}^{output_bits}`.
#[derive(Debug, Clone)]
pub struct RandomOracle {
    input_bits: u32,
    output_bits: u32,
    table: HashMap<u64, u64>,
    rng: SimRng,
}

impl RandomOracle {
    pub fn new(input_bits: u32, output_bits: u32, rng: SimRng) -> Result<Self> {
        if input_bits > 64 || output_bits == 0 || output_bits > 64 {
            return Err(Error::param(
                "random oracle",
                format!("unsupported widths {input_bits} -> {output_bits}"),
            ));
        }
        Ok(Self {
            input_bits,
            output_bits,
            table: HashMap::new(),
            rng,
        })
    }

    pub fn eval(&mut self, x: u64) -> u64 {
        let x = x & mask(self.input_bits);
        let out_mask = mask(self.output_bits);
        let rng = &mut self.rng;
        *self.table.entry(x).or_insert_with(|| rng.random::<u64>() & out_mask)
    }

    pub fn input_bits(&self) -> u32 {
        self.input_bits
    }

    pub fn output_bits(&self) -> u32 {
        self.output_bits
    }

    /// Number of distinct points sampled so far.
    pub fn sampled_points(&self) -> usize {
        self.table.len()
    }
}

impl Oracle for RandomOracle {
    type Input = u64;
    type Output = u64;

    fn query(&mut self, x: u64) -> Result<u64> {
        Ok(self.eval(x))
    }
}

/// Revocable encryption of a fresh `r` plus the one-time pad `r ⊕ m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridCiphertext {
    pub inner: Ciphertext,
    pub otp: BitString,
}

pub fn hybrid_encrypt<P: Permutation + ?Sized, R: Rng + ?Sized>(
    sk: &P,
    m: BitString,
    params: &RevEncParams,
    rng: &mut R,
) -> Result<(HybridCiphertext, VerificationKey)> {
    let r = BitString::random(params.m, rng);
    let y = BitString::random(params.m, rng);
    hybrid_encrypt_with(sk, m, r, y, params)
}

/// [`hybrid_encrypt`] with the inner secret `r` and subset label `y` given.
pub fn hybrid_encrypt_with<P: Permutation + ?Sized>(
    sk: &P,
    m: BitString,
    r: BitString,
    y: BitString,
    params: &RevEncParams,
) -> Result<(HybridCiphertext, VerificationKey)> {
    if m.width() != params.m {
        return Err(Error::param("m", format!("expected {} bits, got {}", params.m, m.width())));
    }
    let (inner, vk) = revenc::encrypt_with_y(sk, r, y, params)?;
    Ok((HybridCiphertext { inner, otp: r ^ m }, vk))
}

/// Decrypts using the first copy.
pub fn hybrid_decrypt<P: Permutation + ?Sized, R: Rng + ?Sized>(
    sk: &P,
    ct: &HybridCiphertext,
    rng: &mut R,
) -> Result<BitString> {
    let copy = first_copy(&ct.inner.copies)?;
    let r = revenc::decrypt(sk, copy, ct.inner.pad, rng)?;
    Ok(r ^ ct.otp)
}

fn first_copy(reg: &Register) -> Result<&DenseState> {
    reg.copy(0)
        .ok_or_else(|| Error::InvalidState("ciphertext copies are entangled".into()))
}

/// Parameters of the wrong-key-detecting scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WkdParams {
    /// Key, message and input length `λ′`.
    pub lambda: u32,
    /// Tag length `ℓ`.
    pub ell: u32,
    /// Subset exponent of the underlying revocable encryption.
    pub n: u32,
    pub k: usize,
    pub backend: Backend,
}

impl WkdParams {
    /// `ℓ = 4λ′` and `n = 2`.
    pub fn with_defaults(lambda: u32, k: usize) -> Self {
        Self {
            lambda,
            ell: 4 * lambda,
            n: 2,
            k,
            backend: Backend::Keyed,
        }
    }

    pub fn revenc(&self) -> Result<RevEncParams> {
        if 2 * self.lambda > 64 {
            return Err(Error::param("lambda", format!("{} > 32", self.lambda)));
        }
        if self.ell == 0 || self.ell > 64 {
            return Err(Error::param("ell", format!("{} outside 1..=64", self.ell)));
        }
        RevEncParams::new(self.n, self.lambda, self.k, self.backend)
    }

    /// A random oracle with the right widths.
    pub fn random_oracle(&self, rng: SimRng) -> Result<RandomOracle> {
        RandomOracle::new(2 * self.lambda, self.ell, rng)
    }

    /// The union bound `2^{2λ′} / 2^ℓ` on a wrong-key false accept.
    pub fn wkd_bound(&self) -> f64 {
        2f64.powi(2 * self.lambda as i32 - self.ell as i32)
    }
}

/// The bijection of the revocable encryption keyed by the `λ′`-bit key.
pub fn wkd_key(sk: BitString, params: &WkdParams) -> Result<SecretKey> {
    let rp = params.revenc()?;
    let mut data = sk.value().to_le_bytes().to_vec();
    data.extend(sk.width().to_le_bytes());
    let key = PermKey::derive("revoqsim/wkd-key", &data);
    Ok(match params.backend {
        Backend::Keyed => SecretKey::from_perm_key(key, rp.width()),
        Backend::Explicit => {
            let mut seed = [0u8; 32];
            seed.copy_from_slice(key.bytes());
            let mut rng = SimRng::from_seed(seed);
            SecretKey::from_explicit(sample_random_perm(rp.width(), &mut rng)?)
        }
    })
}

/// Hybrid ciphertext of a fresh `x`, the tag `H(sk‖x)` and the mask `x ⊕ m`.
#[derive(Debug, Clone, PartialEq)]
pub struct WkdCiphertext {
    pub inner: HybridCiphertext,
    pub tag: BitString,
    pub mask: BitString,
}

fn oracle_input(key: BitString, x: BitString) -> u64 {
    (key.value() << x.width()) | x.value()
}

pub fn wkd_encrypt<H: Oracle<Input = u64, Output = u64> + ?Sized, R: Rng + ?Sized>(
    sk: BitString,
    m: BitString,
    h: &mut H,
    params: &WkdParams,
    rng: &mut R,
) -> Result<(WkdCiphertext, VerificationKey)> {
    check_width("sk", sk, params.lambda)?;
    check_width("m", m, params.lambda)?;
    let rp = params.revenc()?;
    let key = wkd_key(sk, params)?;
    let x = BitString::random(params.lambda, rng);
    let (inner, vk) = hybrid_encrypt(&key, x, &rp, rng)?;
    let tag = BitString::truncated(h.query(oracle_input(sk, x))?, params.ell);
    Ok((WkdCiphertext { inner, tag, mask: x ^ m }, vk))
}

/// Decrypts with key `sk′`; `None` is the rejection symbol ⊥.
pub fn wkd_decrypt<H: Oracle<Input = u64, Output = u64> + ?Sized, R: Rng + ?Sized>(
    sk: BitString,
    ct: &WkdCiphertext,
    h: &mut H,
    params: &WkdParams,
    rng: &mut R,
) -> Result<Option<BitString>> {
    check_width("sk", sk, params.lambda)?;
    let key = wkd_key(sk, params)?;
    let x = hybrid_decrypt(&key, &ct.inner, rng)?;
    Ok(check_tag(sk, x, ct, h)?.then_some(x ^ ct.mask))
}

fn check_tag<H: Oracle<Input = u64, Output = u64> + ?Sized>(
    sk: BitString,
    x: BitString,
    ct: &WkdCiphertext,
    h: &mut H,
) -> Result<bool> {
    Ok(h.query(oracle_input(sk, x))? == ct.tag.value())
}

/// The value `x′` recovered from basis element `v` of one copy under `key`.
pub fn decode_basis(key: &SecretKey, v: u64, ct: &WkdCiphertext) -> BitString {
    let (_, r) = BitString::truncated(key.inverse(v), key.width()).split(ct.inner.inner.pad.width());
    r ^ ct.inner.inner.pad ^ ct.inner.otp
}

/// Probability that decrypting `copy` under `sk` passes the tag check.
pub fn pass_probability<H: Oracle<Input = u64, Output = u64> + ?Sized>(
    sk: BitString,
    copy: &DenseState,
    ct: &WkdCiphertext,
    h: &mut H,
    params: &WkdParams,
) -> Result<f64> {
    let key = wkd_key(sk, params)?;
    let mut p = 0.0;
    for (v, a) in copy.nonzero() {
        if check_tag(sk, decode_basis(&key, v, ct), ct, h)? {
            p += a.norm_sqr();
        }
    }
    Ok(p.min(1.0))
}

fn check_width(name: &'static str, b: BitString, width: u32) -> Result<()> {
    if b.width() != width {
        return Err(Error::param(name, format!("expected {width} bits, got {}", b.width())));
    }
    Ok(())
}

/// `P_{y,m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFunction {
    pub y: BitString,
    pub m: BitString,
}

impl PointFunction {
    pub fn new(y: BitString, m: BitString) -> Result<Self> {
        if y.width() != m.width() {
            return Err(Error::param("m", "marked input and payload widths differ"));
        }
        Ok(Self { y, m })
    }

    pub fn random<R: Rng + ?Sized>(lambda: u32, rng: &mut R) -> Self {
        Self {
            y: BitString::random(lambda, rng),
            m: BitString::random(lambda, rng),
        }
    }

    pub fn eval(&self, x: BitString) -> BitString {
        if x == self.y {
            self.m
        } else {
            BitString::zero(self.m.width())
        }
    }
}

/// The program held by the evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledPointFunction {
    pub ct: WkdCiphertext,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PfVerificationKey {
    pub y: BitString,
    pub inner: VerificationKey,
}

impl CompiledPointFunction {
    pub fn copies(&self) -> &Register {
        &self.ct.inner.inner.copies
    }
}

pub fn pf_compile<H: Oracle<Input = u64, Output = u64> + ?Sized, R: Rng + ?Sized>(
    p: &PointFunction,
    params: &WkdParams,
    h: &mut H,
    rng: &mut R,
) -> Result<(CompiledPointFunction, PfVerificationKey)> {
    let (ct, inner) = wkd_encrypt(p.y, p.m, h, params, rng)?;
    Ok((CompiledPointFunction { ct }, PfVerificationKey { y: p.y, inner }))
}

/// Evaluates at `x` on the first copy. The tag check is a two-outcome
/// measurement: on ⊥ the copy is left exactly as it was and `0^λ′` is
/// returned; otherwise the copy is projected onto the passing branch,
/// measured, and the decrypted payload returned.
pub fn pf_eval<H: Oracle<Input = u64, Output = u64> + ?Sized, R: Rng + ?Sized>(
    state: &mut CompiledPointFunction,
    x: BitString,
    h: &mut H,
    params: &WkdParams,
    rng: &mut R,
) -> Result<BitString> {
    check_width("x", x, params.lambda)?;
    let key = wkd_key(x, params)?;
    let ct = state.ct.clone();
    let Register::Product(copies) = &mut state.ct.inner.inner.copies else {
        return Err(Error::InvalidState("ciphertext copies are entangled".into()));
    };
    let copy = &mut copies[0];
    let mut passing = vec![Complex64::new(0.0, 0.0); copy.dim()];
    let mut p = 0.0;
    for (v, a) in copy.nonzero() {
        if check_tag(x, decode_basis(&key, v, &ct), &ct, h)? {
            passing[v as usize] = a;
            p += a.norm_sqr();
        }
    }
    if p == 0.0 || rng.random::<f64>() >= p {
        return Ok(BitString::zero(params.lambda));
    }
    let projected = DenseState::normalized(copy.qubits(), passing)?;
    let v = measure_computational(&projected, rng);
    *copy = DenseState::basis(copy.qubits(), v)?;
    Ok(decode_basis(&key, v, &ct) ^ ct.mask)
}

pub fn pf_revoke<R: Rng + ?Sized>(
    vk: &PfVerificationKey,
    returned: &Register,
    params: &WkdParams,
    rng: &mut R,
) -> Result<Revocation> {
    let key = wkd_key(vk.y, params)?;
    revenc::revoke(&key, &vk.inner, &params.revenc()?, returned, rng)
}

/// How the challenge input is drawn given the marked input `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChallengeDist {
    /// `x` uniform over `{0,1}^λ′`.
    Uniform,
    /// `x = y` with probability `p`, else uniform over the other inputs.
    Marked(f64),
}

impl std::str::FromStr for ChallengeDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "uniform" {
            return Ok(ChallengeDist::Uniform);
        }
        if let Some(p) = s.strip_prefix("marked:") {
            let p: f64 = p
                .parse()
                .map_err(|_| Error::param("challenge-dist", format!("bad probability in {s:?}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param("challenge-dist", format!("{p} outside [0, 1]")));
            }
            return Ok(ChallengeDist::Marked(p));
        }
        Err(Error::param("challenge-dist", format!("unknown distribution {s:?}")))
    }
}

impl std::fmt::Display for ChallengeDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChallengeDist::Uniform => write!(f, "uniform"),
            ChallengeDist::Marked(p) => write!(f, "marked:{p}"),
        }
    }
}

impl ChallengeDist {
    /// Weighted challenge list for marked input `y`.
    pub fn weights(&self, y: BitString) -> Vec<(f64, u64)> {
        let size = 1u64 << y.width();
        match *self {
            ChallengeDist::Uniform => (0..size).map(|x| (1.0 / size as f64, x)).collect(),
            ChallengeDist::Marked(p) => (0..size)
                .map(|x| {
                    let w = if x == y.value() {
                        p
                    } else {
                        (1.0 - p) / (size - 1) as f64
                    };
                    (w, x)
                })
                .collect(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, y: BitString, rng: &mut R) -> BitString {
        match *self {
            ChallengeDist::Uniform => BitString::random(y.width(), rng),
            ChallengeDist::Marked(p) => {
                if rng.random::<f64>() < p {
                    y
                } else {
                    let size = 1u64 << y.width();
                    let mut x = rng.random_range(0..size - 1);
                    if x >= y.value() {
                        x += 1;
                    }
                    BitString::truncated(x, y.width())
                }
            }
        }
    }

    /// Probability that the challenge equals the marked input.
    pub fn marked_weight(&self, lambda: u32) -> f64 {
        match *self {
            ChallengeDist::Uniform => 2f64.powi(-(lambda as i32)),
            ChallengeDist::Marked(p) => p,
        }
    }
}

/// Best no-state guessing probability against uniform `(y, m)`: the answer
/// is `0^λ′` unless `x = y`, in which case it is a uniform payload.
pub fn trivial_win_probability(dist: ChallengeDist, lambda: u32) -> f64 {
    let p = dist.marked_weight(lambda);
    let inv = 2f64.powi(-(lambda as i32));
    (1.0 - p + p * inv).max(p * inv)
}
