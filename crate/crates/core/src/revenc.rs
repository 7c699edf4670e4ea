//! Multi-copy revocable encryption.
//!
//! A key is a bijection `φ` on `n + m` bits. Encrypting `μ` samples
//! `y ← {0,1}^m`, sends `k` copies of the subset state over
//! `S_y = {φ(x‖y) : x ∈ {0,1}^n}` together with the pad `y ⊕ μ`, and keeps `y`
//! as the private verification key. Revocation projects the returned
//! register onto `|S_y⟩^{⊗k}`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::perm::{feistel_perm, sample_random_perm, ExplicitPerm, FeistelPerm, PermKey, Permutation};
use crate::qstate::{DenseState, Outcome, Register, SubsetState, MAX_STATE_QUBITS};

/// Which bijection family backs the secret key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Keyed,
    Explicit,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keyed" => Ok(Backend::Keyed),
            "explicit" => Ok(Backend::Explicit),
            other => Err(Error::param("backend", format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevEncParams {
    pub n: u32,
    pub m: u32,
    pub k: usize,
    pub backend: Backend,
}

impl RevEncParams {
    pub fn new(n: u32, m: u32, k: usize, backend: Backend) -> Result<Self> {
        let p = Self { n, m, k, backend };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        if self.m == 0 {
            return Err(Error::param("m", "must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        let total = self.k as u64 * (self.n + self.m) as u64;
        if total > MAX_STATE_QUBITS as u64 {
            return Err(Error::DimensionTooLarge {
                qubits: total.min(u32::MAX as u64) as u32,
                limit: MAX_STATE_QUBITS,
            });
        }
        Ok(())
    }

    /// Qubits in one ciphertext copy.
    pub fn width(&self) -> u32 {
        self.n + self.m
    }
}

/// The secret bijection.
#[derive(Debug, Clone)]
pub enum SecretKey {
    Keyed(FeistelPerm),
    Explicit(Arc<ExplicitPerm>),
}

impl SecretKey {
    pub fn from_perm_key(key: PermKey, width: u32) -> Self {
        SecretKey::Keyed(feistel_perm(key, width))
    }

    pub fn from_explicit(perm: ExplicitPerm) -> Self {
        SecretKey::Explicit(Arc::new(perm))
    }

    pub fn backend(&self) -> Backend {
        match self {
            SecretKey::Keyed(_) => Backend::Keyed,
            SecretKey::Explicit(_) => Backend::Explicit,
        }
    }
}

impl Permutation for SecretKey {
    fn width(&self) -> u32 {
        match self {
            SecretKey::Keyed(p) => p.width(),
            SecretKey::Explicit(p) => p.width(),
        }
    }

    fn forward(&self, x: u64) -> u64 {
        match self {
            SecretKey::Keyed(p) => p.forward(x),
            SecretKey::Explicit(p) => p.forward(x),
        }
    }

    fn inverse(&self, y: u64) -> u64 {
        match self {
            SecretKey::Keyed(p) => p.inverse(y),
            SecretKey::Explicit(p) => p.inverse(y),
        }
    }
}

/// `k` copies of `|S_y⟩` and the classical pad `y ⊕ μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ciphertext {
    pub copies: Register,
    pub pad: BitString,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VerificationKey {
    pub y: BitString,
}

/// Result of running revocation on a returned register.
#[derive(Debug, Clone, PartialEq)]
pub struct Revocation {
    pub outcome: Outcome,
    pub accept_probability: f64,
    pub post_state: Register,
}

pub fn keygen<R: Rng + ?Sized>(params: &RevEncParams, rng: &mut R) -> Result<SecretKey> {
    params.validate()?;
    Ok(match params.backend {
        Backend::Keyed => SecretKey::from_perm_key(PermKey::random(rng), params.width()),
        Backend::Explicit => SecretKey::from_explicit(sample_random_perm(params.width(), rng)?),
    })
}

fn check_key<P: Permutation + ?Sized>(sk: &P, params: &RevEncParams) -> Result<()> {
    if sk.width() != params.width() {
        return Err(Error::DimensionMismatch {
            expected: params.width() as usize,
            actual: sk.width() as usize,
        });
    }
    Ok(())
}

/// `S_y = {φ(x‖y) : x ∈ {0,1}^n}`.
pub fn subset_for<P: Permutation + ?Sized>(sk: &P, params: &RevEncParams, y: BitString) -> Result<SubsetState> {
    check_key(sk, params)?;
    if y.width() != params.m {
        return Err(Error::param("y", format!("expected {} bits, got {}", params.m, y.width())));
    }
    let m = params.m;
    SubsetState::new(
        params.width(),
        (0..(1u64 << params.n)).map(|x| sk.forward((x << m) | y.value())),
    )
}

/// Encrypts under a caller-chosen `y`; [`encrypt`] draws `y` uniformly.
pub fn encrypt_with_y<P: Permutation + ?Sized>(
    sk: &P,
    mu: BitString,
    y: BitString,
    params: &RevEncParams,
) -> Result<(Ciphertext, VerificationKey)> {
    params.validate()?;
    if mu.width() != params.m {
        return Err(Error::param("mu", format!("expected {} bits, got {}", params.m, mu.width())));
    }
    let state = subset_for(sk, params, y)?.to_dense()?;
    let copies = Register::copies_of(&state, params.k)?;
    Ok((Ciphertext { copies, pad: y ^ mu }, VerificationKey { y }))
}

pub fn encrypt<P: Permutation + ?Sized, R: Rng + ?Sized>(
    sk: &P,
    mu: BitString,
    params: &RevEncParams,
    rng: &mut R,
) -> Result<(Ciphertext, VerificationKey)> {
    let y = BitString::random(params.m, rng);
    encrypt_with_y(sk, mu, y, params)
}

/// Inverts `φ` on a measured basis element of one copy and unmasks the low
/// `m` bits with the pad. Measuring then relabeling gives the same outcome
/// distribution as relabeling coherently then measuring.
pub fn decrypt<P: Permutation + ?Sized, R: Rng + ?Sized>(
    sk: &P,
    single_copy: &DenseState,
    pad: BitString,
    rng: &mut R,
) -> Result<BitString> {
    if single_copy.qubits() != sk.width() {
        return Err(Error::DimensionMismatch {
            expected: 1usize << sk.width(),
            actual: single_copy.dim(),
        });
    }
    let v = single_copy.measure(rng);
    let (_, y) = BitString::truncated(sk.inverse(v), sk.width()).split(pad.width());
    Ok(y ^ pad)
}

/// `|⟨S_y|^{⊗k} returned⟩|²` without measuring.
pub fn accept_probability<P: Permutation + ?Sized>(
    sk: &P,
    vk: &VerificationKey,
    params: &RevEncParams,
    returned: &Register,
) -> Result<f64> {
    check_returned(params, returned)?;
    let target = subset_for(sk, params, vk.y)?.to_dense()?;
    returned.accept_prob(&target)
}

/// Projects the returned register onto `|S_y⟩^{⊗k}`.
pub fn revoke<P: Permutation + ?Sized, R: Rng + ?Sized>(
    sk: &P,
    vk: &VerificationKey,
    params: &RevEncParams,
    returned: &Register,
    rng: &mut R,
) -> Result<Revocation> {
    check_returned(params, returned)?;
    let target = subset_for(sk, params, vk.y)?.to_dense()?;
    let accept_probability = returned.accept_prob(&target)?;
    let (outcome, post_state) = returned.collapse(&target, rng)?;
    Ok(Revocation {
        outcome,
        accept_probability,
        post_state,
    })
}

fn check_returned(params: &RevEncParams, returned: &Register) -> Result<()> {
    if returned.copies() != params.k || returned.copy_qubits() != params.width() {
        return Err(Error::DimensionMismatch {
            expected: params.k * params.width() as usize,
            actual: returned.total_qubits() as usize,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn bits(v: u64, w: u32) -> BitString {
        BitString::new(v, w).unwrap()
    }

    #[test]
    fn identity_permutation_example() {
        let params = RevEncParams::new(2, 2, 1, Backend::Explicit).unwrap();
        let id = ExplicitPerm::identity(4).unwrap();
        let (ct, vk) = encrypt_with_y(&id, bits(0b11, 2), bits(0b01, 2), &params).unwrap();
        assert_eq!(ct.pad, bits(0b10, 2));
        assert_eq!(vk.y, bits(0b01, 2));
        let copy = ct.copies.copy(0).unwrap();
        let support: Vec<u64> = copy.nonzero().map(|(i, _)| i).collect();
        assert_eq!(support, vec![0b0001, 0b0101, 0b1001, 0b1101]);
        let basis = DenseState::basis(4, 0b0001).unwrap();
        assert_eq!(decrypt(&id, &basis, bits(0b10, 2), &mut seeded(0)).unwrap(), bits(0b11, 2));
    }

    #[test]
    fn round_trip_both_backends() {
        let mut rng = seeded(12);
        for backend in [Backend::Keyed, Backend::Explicit] {
            let params = RevEncParams::new(3, 3, 2, backend).unwrap();
            let sk = keygen(&params, &mut rng).unwrap();
            for mu in BitString::all(3) {
                let (ct, vk) = encrypt(&sk, mu, &params, &mut rng).unwrap();
                for i in 0..2 {
                    let got = decrypt(&sk, ct.copies.copy(i).unwrap(), ct.pad, &mut rng).unwrap();
                    assert_eq!(got, mu);
                }
                let rev = revoke(&sk, &vk, &params, &ct.copies, &mut rng).unwrap();
                assert_eq!(rev.outcome, Outcome::Accept);
                assert!((rev.accept_probability - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn other_y_is_rejected() {
        let mut rng = seeded(1);
        let params = RevEncParams::new(2, 2, 2, Backend::Explicit).unwrap();
        let sk = keygen(&params, &mut rng).unwrap();
        let (ct, _) = encrypt_with_y(&sk, bits(0, 2), bits(1, 2), &params).unwrap();
        let vk = VerificationKey { y: bits(2, 2) };
        assert_eq!(accept_probability(&sk, &vk, &params, &ct.copies).unwrap(), 0.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(RevEncParams::new(0, 2, 1, Backend::Keyed).is_err());
        assert!(RevEncParams::new(2, 0, 1, Backend::Keyed).is_err());
        assert!(RevEncParams::new(2, 2, 0, Backend::Keyed).is_err());
        assert!(matches!(
            RevEncParams::new(5, 6, 2, Backend::Keyed),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn backends_agree_on_the_same_table() {
        let mut rng = seeded(3);
        let params = RevEncParams::new(2, 2, 2, Backend::Keyed).unwrap();
        let keyed = keygen(&params, &mut rng).unwrap();
        let table = SecretKey::from_explicit(ExplicitPerm::tabulate(&keyed).unwrap());
        let y = bits(3, 2);
        let a = encrypt_with_y(&keyed, bits(1, 2), y, &params).unwrap();
        let b = encrypt_with_y(&table, bits(1, 2), y, &params).unwrap();
        assert_eq!(a, b);
    }
}
