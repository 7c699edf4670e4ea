//! Numerical audit of simultaneous distinct extraction.
//!
//! For a pure state `ψ` on `X ⊗ Y` (`X` = `k` registers of `n` qubits) and an
//! isometry `V: Y → {0,1}^n ⊗ E`, compares
//!
//! ```text
//! LHS = ⟨ψ| Λ |ψ⟩,   Λ = Σ_{distinct (s_1..s_{k+1}) ∈ S} |s_1..s_k⟩⟨s_1..s_k| ⊗ V†(|s_{k+1}⟩⟨s_{k+1}| ⊗ I_E)V
//! RHS = c · Tr[(|S⟩⟨S|^{⊗k} ⊗ I)ρ] · Tr[|S⟩⟨S| E(σ)]
//! ```
//!
//! with `c = (|S|−1)(|S|−2)…(|S|−k)/|S|^k`, `E(σ) = Tr_E[VσV†]` and `σ` the
//! normalised `Y` marginal after projecting `X` onto `|S⟩^{⊗k}`. The report
//! also evaluates the right-hand side with `|S⟩⟨S|` replaced by the
//! projector `Π_S` onto `span(S)`.
//!
//! The inequality does not hold for every input: `ψ = |a⟩|a⟩` with `a ∈ S`
//! and `V = I` has `LHS = 0` and `RHS > 0`. The shipped audit consists of the
//! closed-form case, a zero-overlap case and Haar-random instances.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::random_subset;
use crate::error::{Error, Result};
use crate::qstate::{SubsetState, TOLERANCE};
use crate::rng::SimRng;

/// Largest `dim X · dim Y` handled.
pub const MAX_DIM: usize = 1 << 12;

#[derive(Debug, Clone)]
pub struct Instance {
    pub set: SubsetState,
    pub k: usize,
    /// `ψ` on `X ⊗ Y`, `X` most significant.
    pub psi: DVector<Complex64>,
    /// Columns are `V|j⟩`; rows index `{0,1}^n ⊗ E`, the `n`-qubit factor most
    /// significant.
    pub v: DMatrix<Complex64>,
    pub env_dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub lhs: f64,
    pub rhs: f64,
    /// RHS with `Π_S` in place of `|S⟩⟨S|`.
    pub rhs_projector: f64,
    pub slack: f64,
}

impl Evaluation {
    pub fn holds(&self) -> bool {
        self.slack >= -TOLERANCE
    }
}

/// `(|S|−1)(|S|−2)…(|S|−k)/|S|^k`.
pub fn distinct_factor(s: usize, k: usize) -> f64 {
    (1..=k).map(|i| (s as f64 - i as f64).max(0.0) / s as f64).product()
}

impl Instance {
    pub fn new(set: SubsetState, k: usize, psi: DVector<Complex64>, v: DMatrix<Complex64>, env_dim: usize) -> Result<Self> {
        let n = set.width();
        let dx = 1usize
            .checked_shl(n * k as u32)
            .filter(|&d| d <= MAX_DIM)
            .ok_or_else(|| Error::BudgetExceeded(format!("X has {} qubits", n as usize * k)))?;
        let dy = v.ncols();
        if dx * dy > MAX_DIM {
            return Err(Error::BudgetExceeded(format!("dim X·Y = {} > {MAX_DIM}", dx * dy)));
        }
        if v.nrows() != (1usize << n) * env_dim {
            return Err(Error::DimensionMismatch {
                expected: (1usize << n) * env_dim,
                actual: v.nrows(),
            });
        }
        if psi.len() != dx * dy {
            return Err(Error::DimensionMismatch {
                expected: dx * dy,
                actual: psi.len(),
            });
        }
        let gram = v.adjoint() * &v;
        if (gram - DMatrix::identity(dy, dy)).iter().any(|z| z.norm() > 1e-9) {
            return Err(Error::InvalidState("V is not an isometry".into()));
        }
        if (psi.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState("ψ is not normalised".into()));
        }
        Ok(Self { set, k, psi, v, env_dim })
    }

    fn dy(&self) -> usize {
        self.v.ncols()
    }

    /// The `Y` vector at `X` basis index `t`.
    fn slice(&self, t: usize) -> DVector<Complex64> {
        let dy = self.dy();
        DVector::from_iterator(dy, (0..dy).map(|j| self.psi[t * dy + j]))
    }

    /// `‖(⟨j| ⊗ I_E) V φ‖²`.
    fn weight_on(&self, j: u64, vphi: &DVector<Complex64>) -> f64 {
        let e = self.env_dim;
        (0..e).map(|i| vphi[j as usize * e + i].norm_sqr()).sum()
    }

    pub fn evaluate(&self) -> Evaluation {
        let n = self.set.width();
        let s = self.set.support();
        let k = self.k;

        // LHS: sum over distinct k-tuples t in S and s_{k+1} ∈ S \ t.
        let mut lhs = 0.0;
        for_each_tuple(s.len(), k, |tuple| {
            let elems: Vec<u64> = tuple.iter().map(|&i| s[i]).collect();
            let mut sorted = elems.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return;
            }
            let t = elems.iter().fold(0usize, |acc, &x| (acc << n) | x as usize);
            let vphi = &self.v * self.slice(t);
            for &j in s.iter().filter(|j| !elems.contains(j)) {
                lhs += self.weight_on(j, &vphi);
            }
        });

        // φ = (⟨S|^{⊗k} ⊗ I) ψ.
        let amp = Complex64::new(self.set.amplitude().powi(k as i32), 0.0);
        let mut phi = DVector::<Complex64>::zeros(self.dy());
        for_each_tuple(s.len(), k, |tuple| {
            let t = tuple.iter().fold(0usize, |acc, &i| (acc << n) | s[i] as usize);
            phi += self.slice(t) * amp;
        });
        let vphi = &self.v * &phi;
        let e = self.env_dim;
        // ⟨S| ⊗ I_E applied to Vφ, then the squared norm.
        let mut on_s = vec![Complex64::new(0.0, 0.0); e];
        for &j in s {
            for (i, slot) in on_s.iter_mut().enumerate() {
                *slot += vphi[j as usize * e + i] * self.set.amplitude();
            }
        }
        let overlap_s: f64 = on_s.iter().map(|z| z.norm_sqr()).sum();
        let overlap_pi: f64 = s.iter().map(|&j| self.weight_on(j, &vphi)).sum();
        let c = distinct_factor(s.len(), k);
        let rhs = c * overlap_s;
        Evaluation {
            lhs,
            rhs,
            rhs_projector: c * overlap_pi,
            slack: lhs - rhs,
        }
    }
}

/// Calls `f` on every index tuple in `[0, len)^k`, lexicographically.
fn for_each_tuple(len: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut tuple = vec![0usize; k];
    loop {
        f(&tuple);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < len {
                break;
            }
            tuple[i] = 0;
        }
    }
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut SimRng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// A Haar-random unit vector.
pub fn haar_state(dim: usize, rng: &mut SimRng) -> DVector<Complex64> {
    let g = gaussian_matrix(dim, 1, rng).column(0).into_owned();
    let norm = g.norm();
    g / Complex64::new(norm, 0.0)
}

/// A Haar-random isometry `C^{dy} → C^{rows}`.
pub fn haar_isometry(rows: usize, dy: usize, rng: &mut SimRng) -> DMatrix<Complex64> {
    let qr = gaussian_matrix(rows, dy, rng).qr();
    let (q, r) = qr.unpack();
    // Fix the phases of R's diagonal so the distribution is Haar.
    let mut q = q;
    for j in 0..dy {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

/// The identity isometry on `n` qubits with trivial environment.
pub fn identity_isometry(n: u32) -> DMatrix<Complex64> {
    DMatrix::identity(1 << n, 1 << n)
}

/// `|S⟩^{⊗k} ⊗ |S⟩` with `V = I`, where both sides equal the distinct factor.
pub fn closed_form_instance(set: &SubsetState, k: usize) -> Result<Instance> {
    let dense = set.to_dense()?;
    let single = DVector::from_vec(dense.amplitudes().to_vec());
    let mut psi = single.clone();
    for _ in 0..k {
        psi = psi.kronecker(&single);
    }
    Instance::new(set.clone(), k, psi, identity_isometry(set.width()), 1)
}

/// `|a⟩^{⊗k} ⊗ |b⟩` with every `a ∉ S`: no overlap with `|S⟩^{⊗k}`.
pub fn zero_overlap_instance(set: &SubsetState, k: usize, b: u64) -> Result<Instance> {
    let n = set.width();
    let a = (0..1u64 << n)
        .find(|x| !set.contains(*x))
        .ok_or_else(|| Error::param("S", "S is the whole space"))?;
    let t = (0..k).fold(0u64, |acc, _| (acc << n) | a);
    let dy = 1usize << n;
    let dim = (1usize << (n as usize * k)) * dy;
    let mut psi = DVector::zeros(dim);
    psi[t as usize * dy + b as usize] = Complex64::new(1.0, 0.0);
    Instance::new(set.clone(), k, psi, identity_isometry(n), 1)
}

/// `|a⟩^{⊗k} ⊗ |a⟩` with `a ∈ S` and `V = I`: the left-hand side vanishes.
pub fn counterexample_instance(set: &SubsetState, k: usize) -> Result<Instance> {
    let n = set.width();
    let a = set.support()[0];
    let t = (0..k).fold(0u64, |acc, _| (acc << n) | a);
    let dy = 1usize << n;
    let mut psi = DVector::zeros((1usize << (n as usize * k)) * dy);
    psi[t as usize * dy + a as usize] = Complex64::new(1.0, 0.0);
    Instance::new(set.clone(), k, psi, identity_isometry(n), 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuditParams {
    pub n: u32,
    pub s: usize,
    pub k: usize,
    pub y_dim: usize,
    pub env_dim: usize,
    pub random_instances: usize,
}

impl Default for AuditParams {
    fn default() -> Self {
        Self {
            n: 3,
            s: 4,
            k: 1,
            y_dim: 2,
            env_dim: 2,
            random_instances: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub label: String,
    #[serde(flatten)]
    pub eval: Evaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub params: AuditParams,
    pub rows: Vec<AuditRow>,
    pub violations: usize,
    pub min_slack: f64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Closed form, zero overlap, then `random_instances` Haar-random `(ψ, V)`.
pub fn check_distinct_extraction(params: &AuditParams, rng: &mut SimRng) -> Result<AuditReport> {
    let set = random_subset(params.n, params.s, rng)?;
    let mut rows = vec![
        AuditRow {
            label: "closed-form".into(),
            eval: closed_form_instance(&set, params.k)?.evaluate(),
        },
        AuditRow {
            label: "zero-overlap".into(),
            eval: zero_overlap_instance(&set, params.k, set.support()[0])?.evaluate(),
        },
    ];
    let dx = 1usize << (params.n as usize * params.k);
    for i in 0..params.random_instances {
        let set = random_subset(params.n, params.s, rng)?;
        let psi = haar_state(dx * params.y_dim, rng);
        let v = haar_isometry((1 << params.n) * params.env_dim, params.y_dim, rng);
        let inst = Instance::new(set, params.k, psi, v, params.env_dim)?;
        rows.push(AuditRow {
            label: format!("haar-{i}"),
            eval: inst.evaluate(),
        });
    }
    let violations = rows.iter().filter(|r| !r.eval.holds()).count();
    let min_slack = rows.iter().map(|r| r.eval.slack).fold(f64::INFINITY, f64::min);
    Ok(AuditReport {
        params: *params,
        rows,
        violations,
        min_slack,
    })
}
