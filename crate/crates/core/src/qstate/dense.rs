use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::{Outcome, MAX_STATE_QUBITS, TOLERANCE};
use crate::error::{Error, Result};

/// A normalized state vector on `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    qubits: u32,
    amplitudes: Vec<Complex64>,
}

/// One nonzero amplitude in the JSON debug format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEntry(pub u64, pub f64, pub f64);

fn check_qubits(qubits: u32) -> Result<usize> {
    if qubits > MAX_STATE_QUBITS {
        return Err(Error::DimensionTooLarge {
            qubits,
            limit: MAX_STATE_QUBITS,
        });
    }
    Ok(1usize << qubits)
}

impl DenseState {
    /// Validates length and unit norm.
    pub fn new(qubits: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = check_qubits(qubits)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let state = Self { qubits, amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(qubits: u32, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = check_qubits(qubits)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < TOLERANCE {
            return Err(Error::InvalidState("zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { qubits, amplitudes })
    }

    pub fn basis(qubits: u32, index: u64) -> Result<Self> {
        let dim = check_qubits(qubits)?;
        if index as usize >= dim {
            return Err(Error::param("index", format!("{index} >= {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amplitudes })
    }

    pub(crate) fn from_real_support(
        qubits: u32,
        entries: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<Self> {
        let dim = check_qubits(qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for (i, a) in entries {
            amplitudes[i as usize] = Complex64::new(a, 0.0);
        }
        Self::new(qubits, amplitudes)
    }

    pub(crate) fn from_parts_unchecked(qubits: u32, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << qubits);
        Self { qubits, amplitudes }
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Indices and amplitudes of the nonzero entries.
    pub fn nonzero(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, &a)| (i as u64, a))
    }

    /// Multiplies every amplitude by `e^{iθ}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self {
            qubits: self.qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DenseState) -> Result<DenseState> {
        let qubits = self.qubits + other.qubits;
        check_qubits(qubits)?;
        let mut amplitudes = Vec::with_capacity(1usize << qubits);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(Self { qubits, amplitudes })
    }

    pub fn tensor_power(&self, k: usize) -> Result<DenseState> {
        tensor_power(self, k)
    }

    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        measure_computational(self, rng)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_pure(self)
    }

    pub fn to_entries(&self) -> Vec<AmplitudeEntry> {
        self.nonzero()
            .map(|(i, a)| AmplitudeEntry(i, a.re, a.im))
            .collect()
    }

    pub fn from_entries(qubits: u32, entries: &[AmplitudeEntry]) -> Result<Self> {
        let dim = check_qubits(qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for &AmplitudeEntry(i, re, im) in entries {
            let slot = amplitudes
                .get_mut(i as usize)
                .ok_or_else(|| Error::param("index", format!("{i} >= {dim}")))?;
            *slot = Complex64::new(re, im);
        }
        Self::new(qubits, amplitudes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_entries()).expect("amplitude entries serialize")
    }

    pub fn from_json(qubits: u32, json: &str) -> Result<Self> {
        let entries: Vec<AmplitudeEntry> =
            serde_json::from_str(json).map_err(|e| Error::InvalidState(e.to_string()))?;
        Self::from_entries(qubits, &entries)
    }
}

/// `state^{⊗k}`.
pub fn tensor_power(state: &DenseState, k: usize) -> Result<DenseState> {
    if k == 0 {
        return Err(Error::param("k", "at least one copy"));
    }
    let qubits = state.qubits as u64 * k as u64;
    if qubits > MAX_STATE_QUBITS as u64 {
        return Err(Error::DimensionTooLarge {
            qubits: qubits.min(u32::MAX as u64) as u32,
            limit: MAX_STATE_QUBITS,
        });
    }
    let mut out = state.clone();
    for _ in 1..k {
        out = out.tensor(state)?;
    }
    Ok(out)
}

/// `|⟨target|state⟩|²`.
pub fn project_accept_prob(state: &DenseState, target: &DenseState) -> Result<f64> {
    Ok(target.inner(state)?.norm_sqr().clamp(0.0, 1.0))
}

/// Measures `{|t⟩⟨t|, I − |t⟩⟨t|}` and returns the outcome with the
/// normalized post-measurement state.
pub fn project_and_collapse<R: Rng + ?Sized>(
    state: &DenseState,
    target: &DenseState,
    rng: &mut R,
) -> Result<(Outcome, DenseState)> {
    let overlap = target.inner(state)?;
    let p = overlap.norm_sqr().clamp(0.0, 1.0);
    if rng.random::<f64>() < p {
        return Ok((Outcome::Accept, target.clone()));
    }
    let residual: Vec<Complex64> = state
        .amplitudes
        .iter()
        .zip(&target.amplitudes)
        .map(|(s, t)| s - overlap * t)
        .collect();
    let post = DenseState::normalized(state.qubits, residual)?;
    Ok((Outcome::Reject, post))
}

/// Samples a basis index with probability `|amplitude|²`.
pub fn measure_computational<R: Rng + ?Sized>(state: &DenseState, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, a) in state.amplitudes.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i as u64;
        }
    }
    last as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::SubsetState;
    use crate::rng::seeded;

    fn plus() -> DenseState {
        DenseState::normalized(1, vec![Complex64::new(1.0, 0.0); 2]).unwrap()
    }

    #[test]
    fn tensor_power_examples() {
        let zero = DenseState::basis(1, 0).unwrap();
        assert_eq!(tensor_power(&zero, 1).unwrap(), zero);
        let pp = tensor_power(&plus(), 2).unwrap();
        for a in pp.amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-12);
        }
        let s = SubsetState::new(2, [1, 2]).unwrap().to_dense().unwrap();
        let ss = tensor_power(&s, 2).unwrap();
        let nz: Vec<_> = ss.nonzero().collect();
        assert_eq!(nz.len(), 4);
        let idx: Vec<u64> = nz.iter().map(|e| e.0).collect();
        assert_eq!(idx, vec![0b0101, 0b0110, 0b1001, 0b1010]);
        for (_, a) in nz {
            assert!((a.re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_power_limit() {
        let s = DenseState::basis(11, 0).unwrap();
        assert!(matches!(tensor_power(&s, 2), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn accept_probability_examples() {
        let a = DenseState::basis(2, 1).unwrap();
        let b = DenseState::basis(2, 2).unwrap();
        assert!((project_accept_prob(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(project_accept_prob(&a, &b).unwrap(), 0.0);
        let s = SubsetState::new(2, [0, 1]).unwrap().to_dense().unwrap();
        let t = SubsetState::new(2, [1, 2]).unwrap().to_dense().unwrap();
        assert!((project_accept_prob(&s, &t).unwrap() - 0.25).abs() < 1e-12);
        let c = DenseState::basis(3, 1).unwrap();
        assert!(matches!(
            project_accept_prob(&a, &c),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn collapse_post_states() {
        let s = SubsetState::new(2, [0, 1]).unwrap().to_dense().unwrap();
        let t = SubsetState::new(2, [1, 2]).unwrap().to_dense().unwrap();
        let mut rng = seeded(3);
        let mut seen = [false; 2];
        for _ in 0..64 {
            let (outcome, post) = project_and_collapse(&s, &t, &mut rng).unwrap();
            match outcome {
                Outcome::Accept => {
                    seen[0] = true;
                    assert!((project_accept_prob(&post, &t).unwrap() - 1.0).abs() < 1e-12);
                }
                Outcome::Reject => {
                    seen[1] = true;
                    assert!(t.inner(&post).unwrap().norm() < 1e-9);
                    assert!((post.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
        assert!(seen[0] && seen[1]);
        let a = project_and_collapse(&s, &t, &mut seeded(9)).unwrap();
        let b = project_and_collapse(&s, &t, &mut seeded(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn measurement_examples() {
        let mut rng = seeded(1);
        let five = DenseState::basis(3, 5).unwrap();
        assert!((0..100).all(|_| measure_computational(&five, &mut rng) == 5));
        let s = SubsetState::new(2, [1, 2]).unwrap().to_dense().unwrap();
        let draws = 10_000;
        let ones = (0..draws)
            .filter(|_| {
                let v = measure_computational(&s, &mut rng);
                assert!(v == 1 || v == 2);
                v == 1
            })
            .count();
        let sigma = (0.25f64 / draws as f64).sqrt();
        assert!(((ones as f64 / draws as f64) - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn json_round_trip() {
        let s = SubsetState::new(3, [1, 6]).unwrap().to_dense().unwrap();
        let json = s.to_json();
        assert_eq!(DenseState::from_json(3, &json).unwrap(), s);
    }
}
