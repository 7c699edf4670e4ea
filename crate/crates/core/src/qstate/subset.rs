use rand::Rng;
use serde::{Deserialize, Serialize};

use super::combinatorics::permutations;
use super::dense::DenseState;
use super::MAX_STATE_QUBITS;
use crate::bits::mask;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Uniform superposition `|S⟩ = |S|^{-1/2} Σ_{x∈S} |x⟩` over a sorted support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetState {
    width: u32,
    support: Vec<u64>,
}

impl SubsetState {
    /// Sorts `support`; rejects empty sets, duplicates and out-of-range values.
    pub fn new(width: u32, support: impl IntoIterator<Item = u64>) -> Result<Self> {
        if width == 0 || width > 63 {
            return Err(Error::param("width", format!("{width} outside 1..=63")));
        }
        let mut support: Vec<u64> = support.into_iter().collect();
        if support.is_empty() {
            return Err(Error::param("support", "empty subset"));
        }
        support.sort_unstable();
        if support.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("support", "duplicate element"));
        }
        if *support.last().unwrap() > mask(width) {
            return Err(Error::param("support", format!("element exceeds {width} bits")));
        }
        Ok(Self { width, support })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.support.binary_search(&x).is_ok()
    }

    pub fn amplitude(&self) -> f64 {
        1.0 / (self.len() as f64).sqrt()
    }

    /// `|⟨S|S′⟩| = |S∩S′| / √(|S||S′|)`.
    pub fn overlap(&self, other: &SubsetState) -> f64 {
        let common = self.intersection_size(other);
        common as f64 / ((self.len() * other.len()) as f64).sqrt()
    }

    pub fn intersection_size(&self, other: &SubsetState) -> usize {
        let (mut i, mut j, mut common) = (0, 0, 0);
        while i < self.support.len() && j < other.support.len() {
            match self.support[i].cmp(&other.support[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    common += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        common
    }

    /// Computational-basis measurement: a uniform element of the support.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.support[rng.random_range(0..self.support.len())]
    }

    /// `φ(S)` as a subset state.
    pub fn image<P: Permutation + ?Sized>(&self, perm: &P) -> Result<SubsetState> {
        if perm.width() != self.width {
            return Err(Error::DimensionMismatch {
                expected: self.width as usize,
                actual: perm.width() as usize,
            });
        }
        SubsetState::new(self.width, self.support.iter().map(|&x| perm.forward(x)))
    }

    pub fn to_dense(&self) -> Result<DenseState> {
        subset_to_dense(self)
    }
}

/// `|σ_X⟩`: the normalized symmetrization of `k` distinct `width`-bit strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleState {
    width: u32,
    tuple: Vec<u64>,
}

impl TupleState {
    pub fn new(width: u32, tuple: Vec<u64>) -> Result<Self> {
        if width == 0 || width > 63 {
            return Err(Error::param("width", format!("{width} outside 1..=63")));
        }
        if tuple.is_empty() {
            return Err(Error::param("tuple", "empty tuple"));
        }
        let mut sorted = tuple.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("tuple", "entries must be distinct"));
        }
        if *sorted.last().unwrap() > mask(width) {
            return Err(Error::param("tuple", format!("element exceeds {width} bits")));
        }
        Ok(Self { width, tuple })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn tuple(&self) -> &[u64] {
        &self.tuple
    }

    pub fn k(&self) -> usize {
        self.tuple.len()
    }

    pub fn to_dense(&self) -> Result<DenseState> {
        tuple_to_dense(self)
    }
}

pub fn subset_to_dense(s: &SubsetState) -> Result<DenseState> {
    check_qubits(s.width)?;
    let amp = s.amplitude();
    DenseState::from_real_support(s.width, s.support.iter().map(|&x| (x, amp)))
}

pub fn tuple_to_dense(t: &TupleState) -> Result<DenseState> {
    let qubits = t.width * t.k() as u32;
    check_qubits(qubits)?;
    let orderings = permutations(&t.tuple);
    let amp = 1.0 / (orderings.len() as f64).sqrt();
    let entries = orderings
        .into_iter()
        .map(|o| (o.iter().fold(0u64, |acc, &x| (acc << t.width) | x), amp));
    DenseState::from_real_support(qubits, entries)
}

fn check_qubits(qubits: u32) -> Result<()> {
    if qubits > MAX_STATE_QUBITS {
        return Err(Error::DimensionTooLarge {
            qubits,
            limit: MAX_STATE_QUBITS,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_is_sorted_and_checked() {
        let s = SubsetState::new(3, [5, 1, 2]).unwrap();
        assert_eq!(s.support(), &[1, 2, 5]);
        assert!(SubsetState::new(3, [1, 1]).is_err());
        assert!(SubsetState::new(3, [8]).is_err());
        assert!(SubsetState::new(3, []).is_err());
    }

    #[test]
    fn subset_dense_examples() {
        let d = subset_to_dense(&SubsetState::new(1, [0]).unwrap()).unwrap();
        assert_eq!(d.amplitudes()[0].re, 1.0);
        assert_eq!(d.amplitudes()[1].re, 0.0);
        let d = subset_to_dense(&SubsetState::new(3, [1, 2, 5]).unwrap()).unwrap();
        let w = 1.0 / 3f64.sqrt();
        for i in 0..8 {
            let expect = if [1, 2, 5].contains(&i) { w } else { 0.0 };
            assert!((d.amplitudes()[i].re - expect).abs() < 1e-12);
        }
        assert!((d.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tuple_dense_examples() {
        let d = tuple_to_dense(&TupleState::new(1, vec![0]).unwrap()).unwrap();
        assert_eq!(d.amplitudes()[0].re, 1.0);
        let d = tuple_to_dense(&TupleState::new(1, vec![0, 1]).unwrap()).unwrap();
        let h = 0.5f64.sqrt();
        let expect = [0.0, h, h, 0.0];
        for (a, e) in d.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-12);
        }
        let d = tuple_to_dense(&TupleState::new(3, vec![1, 2, 4]).unwrap()).unwrap();
        let nonzero: Vec<_> = d.amplitudes().iter().filter(|a| a.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 6);
        for a in nonzero {
            assert!((a.re - 1.0 / 6f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn tuple_dimension_limit() {
        let t = TupleState::new(7, vec![1, 2, 3]).unwrap();
        assert!(matches!(tuple_to_dense(&t), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn overlap_of_subsets() {
        let a = SubsetState::new(2, [0, 1]).unwrap();
        let b = SubsetState::new(2, [1, 2]).unwrap();
        assert!((a.overlap(&b) - 0.5).abs() < 1e-12);
    }
}
