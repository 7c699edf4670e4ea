use num_complex::Complex64;
use rand::Rng;

use super::dense::{project_and_collapse, tensor_power, DenseState};
use super::{Outcome, MAX_STATE_QUBITS};
use crate::error::{Error, Result};

/// `k` registers of equal width, held either as a product of single-copy
/// states or as one joint (possibly entangled) state vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Register {
    Product(Vec<DenseState>),
    Joint { copies: usize, state: DenseState },
}

impl Register {
    pub fn product(copies: Vec<DenseState>) -> Result<Self> {
        let first = copies.first().ok_or_else(|| Error::param("copies", "empty register"))?;
        for c in &copies {
            if c.qubits() != first.qubits() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    actual: c.dim(),
                });
            }
        }
        Ok(Register::Product(copies))
    }

    /// `k` identical copies of `state`.
    pub fn copies_of(state: &DenseState, k: usize) -> Result<Self> {
        if state.qubits() as u64 * k as u64 > MAX_STATE_QUBITS as u64 {
            return Err(Error::DimensionTooLarge {
                qubits: (state.qubits() as u64 * k as u64).min(u32::MAX as u64) as u32,
                limit: MAX_STATE_QUBITS,
            });
        }
        Self::product(vec![state.clone(); k])
    }

    pub fn joint(copies: usize, state: DenseState) -> Result<Self> {
        if copies == 0 || !(state.qubits() as usize).is_multiple_of(copies) {
            return Err(Error::param(
                "copies",
                format!("{} qubits do not split into {copies} registers", state.qubits()),
            ));
        }
        Ok(Register::Joint { copies, state })
    }

    pub fn copies(&self) -> usize {
        match self {
            Register::Product(c) => c.len(),
            Register::Joint { copies, .. } => *copies,
        }
    }

    pub fn copy_qubits(&self) -> u32 {
        match self {
            Register::Product(c) => c[0].qubits(),
            Register::Joint { copies, state } => state.qubits() / *copies as u32,
        }
    }

    pub fn total_qubits(&self) -> u32 {
        self.copy_qubits() * self.copies() as u32
    }

    /// The `i`-th copy when the register is a product.
    pub fn copy(&self, i: usize) -> Option<&DenseState> {
        match self {
            Register::Product(c) => c.get(i),
            Register::Joint { .. } => None,
        }
    }

    pub fn to_dense(&self) -> Result<DenseState> {
        match self {
            Register::Joint { state, .. } => Ok(state.clone()),
            Register::Product(c) => {
                let mut out = c[0].clone();
                for next in &c[1..] {
                    out = out.tensor(next)?;
                }
                Ok(out)
            }
        }
    }

    fn check_target(&self, target: &DenseState) -> Result<()> {
        if target.qubits() != self.copy_qubits() {
            return Err(Error::DimensionMismatch {
                expected: 1usize << self.copy_qubits(),
                actual: target.dim(),
            });
        }
        Ok(())
    }

    /// `|⟨target|^{⊗k} register⟩|²`.
    pub fn accept_prob(&self, target: &DenseState) -> Result<f64> {
        self.check_target(target)?;
        match self {
            Register::Product(c) => {
                let mut p = 1.0;
                for copy in c {
                    p *= target.inner(copy)?.norm_sqr();
                }
                Ok(p.clamp(0.0, 1.0))
            }
            Register::Joint { copies, state } => {
                let t = tensor_power(target, *copies)?;
                Ok(t.inner(state)?.norm_sqr().clamp(0.0, 1.0))
            }
        }
    }

    /// Measures `{|t⟩⟨t|^{⊗k}, I − |t⟩⟨t|^{⊗k}}` and returns the collapsed
    /// register. Accepted product registers stay in product form.
    pub fn collapse<R: Rng + ?Sized>(&self, target: &DenseState, rng: &mut R) -> Result<(Outcome, Register)> {
        self.check_target(target)?;
        let k = self.copies();
        if let Register::Product(_) = self {
            let p = self.accept_prob(target)?;
            if p >= 1.0 {
                return Ok((Outcome::Accept, Register::copies_of(target, k)?));
            }
        }
        let joint = self.to_dense()?;
        let t = tensor_power(target, k)?;
        let (outcome, post) = project_and_collapse(&joint, &t, rng)?;
        let reg = match outcome {
            Outcome::Accept => Register::copies_of(target, k)?,
            Outcome::Reject => Register::Joint { copies: k, state: post },
        };
        Ok((outcome, reg))
    }

    /// Measures every register in the computational basis.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        match self {
            Register::Product(c) => c.iter().map(|s| s.measure(rng)).collect(),
            Register::Joint { copies, state } => {
                let w = state.qubits() / *copies as u32;
                let v = state.measure(rng);
                (0..*copies)
                    .rev()
                    .map(|i| (v >> (i as u32 * w)) & ((1u64 << w) - 1))
                    .collect()
            }
        }
    }

    /// Amplitude-wise view used by tests: the joint vector.
    pub fn amplitudes(&self) -> Result<Vec<Complex64>> {
        Ok(self.to_dense()?.amplitudes().to_vec())
    }
}
