use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;

use super::combinatorics::{binomial, permutations, Combinations};
use super::density::DensityMatrix;
use super::MAX_DENSITY_QUBITS;
use crate::error::{Error, Result};

/// Upper bound on `#subsets × (support size)²` for exact enumeration.
pub const ENUMERATION_BUDGET: f64 = (1u64 << 32) as f64;

fn domain(n: u32, superset: Option<&[u64]>) -> Result<Vec<u64>> {
    match superset {
        Some(t) => {
            let mut t = t.to_vec();
            t.sort_unstable();
            t.dedup();
            if t.iter().any(|&x| x >> n != 0) {
                return Err(Error::param("superset", format!("element exceeds {n} bits")));
            }
            Ok(t)
        }
        None => Ok((0..(1u64 << n)).collect()),
    }
}

fn density_qubits(n: u32, k: usize) -> Result<u32> {
    let qubits = n as u64 * k as u64;
    if qubits > MAX_DENSITY_QUBITS as u64 {
        return Err(Error::BudgetExceeded(format!(
            "{k} copies of {n} qubits exceed the {MAX_DENSITY_QUBITS}-qubit density limit"
        )));
    }
    Ok(qubits as u32)
}

/// Index of every length-`k` sequence over `elems`, concatenated.
fn power_support(elems: &[u64], n: u32, k: usize) -> Vec<usize> {
    let mut idx = vec![0usize];
    for _ in 0..k {
        let mut next = Vec::with_capacity(idx.len() * elems.len());
        for &prefix in &idx {
            for &x in elems {
                next.push((prefix << n) | x as usize);
            }
        }
        idx = next;
    }
    idx
}

fn add_flat(acc: &mut DMatrix<f64>, support: &[usize], weight: f64) {
    for &i in support {
        for &j in support {
            acc[(i, j)] += weight;
        }
    }
}

fn finish(qubits: u32, acc: DMatrix<f64>) -> Result<DensityMatrix> {
    let m = acc.map(|v| Complex64::new(v, 0.0));
    DensityMatrix::new(qubits, m)
}

/// `E_S[|S⟩⟨S|^{⊗k}]` over every size-`s` subset of `superset` (default: the
/// whole `n`-bit domain), by exact enumeration.
pub fn avg_subset_density(n: u32, s: usize, k: usize, superset: Option<&[u64]>) -> Result<DensityMatrix> {
    let t = domain(n, superset)?;
    check_sizes(s, k, t.len())?;
    let qubits = density_qubits(n, k)?;
    let subsets = binomial(t.len() as u64, s as u64);
    let cost = subsets * (s as f64).powi(2 * k as i32);
    if cost > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "exact average needs ~{cost:.3e} operations; use sampling"
        )));
    }
    let dim = 1usize << qubits;
    let mut acc = DMatrix::<f64>::zeros(dim, dim);
    let weight = 1.0 / (subsets * (s as f64).powi(k as i32));
    for pick in Combinations::new(t.len(), s) {
        let elems: Vec<u64> = pick.iter().map(|&i| t[i]).collect();
        add_flat(&mut acc, &power_support(&elems, n, k), weight);
    }
    finish(qubits, acc)
}

/// Monte-Carlo estimate of [`avg_subset_density`] from `samples` uniformly
/// drawn subsets.
pub fn sample_avg_subset_density<R: Rng + ?Sized>(
    n: u32,
    s: usize,
    k: usize,
    superset: Option<&[u64]>,
    samples: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let t = domain(n, superset)?;
    check_sizes(s, k, t.len())?;
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let qubits = density_qubits(n, k)?;
    let dim = 1usize << qubits;
    let mut acc = DMatrix::<f64>::zeros(dim, dim);
    let weight = 1.0 / (samples as f64 * (s as f64).powi(k as i32));
    for _ in 0..samples {
        let elems: Vec<u64> = sample(rng, t.len(), s).into_iter().map(|i| t[i]).collect();
        add_flat(&mut acc, &power_support(&elems, n, k), weight);
    }
    finish(qubits, acc)
}

/// `E_X[|σ_X⟩⟨σ_X|]` over every size-`k` subset `X` of `superset`.
pub fn avg_tuple_density(n: u32, k: usize, superset: Option<&[u64]>) -> Result<DensityMatrix> {
    let t = domain(n, superset)?;
    check_sizes(k, k, t.len())?;
    let qubits = density_qubits(n, k)?;
    let subsets = binomial(t.len() as u64, k as u64);
    let orderings: f64 = (1..=k).map(|v| v as f64).product();
    let cost = subsets * orderings * orderings;
    if cost > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "exact average needs ~{cost:.3e} operations"
        )));
    }
    let dim = 1usize << qubits;
    let mut acc = DMatrix::<f64>::zeros(dim, dim);
    let weight = 1.0 / (subsets * orderings);
    for pick in Combinations::new(t.len(), k) {
        let elems: Vec<u64> = pick.iter().map(|&i| t[i]).collect();
        let support: Vec<usize> = permutations(&elems)
            .into_iter()
            .map(|o| o.iter().fold(0usize, |acc, &x| (acc << n) | x as usize))
            .collect();
        add_flat(&mut acc, &support, weight);
    }
    finish(qubits, acc)
}

fn check_sizes(s: usize, k: usize, domain: usize) -> Result<()> {
    if s == 0 || s > domain {
        return Err(Error::param("s", format!("{s} outside 1..={domain}")));
    }
    if k == 0 {
        return Err(Error::param("k", "at least one copy"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{trace_distance, DenseState};
    use crate::rng::seeded;

    #[test]
    fn single_subset_is_plus_state() {
        let rho = avg_subset_density(1, 2, 1, None).unwrap();
        for z in rho.matrix().iter() {
            assert!((z.re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn singletons_average_to_identity() {
        let rho = avg_subset_density(2, 1, 1, None).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(trace_distance(&rho, &mixed).unwrap() < 1e-12);
        let tuple = avg_tuple_density(2, 1, None).unwrap();
        assert!(trace_distance(&rho, &tuple).unwrap() < 1e-12);
    }

    #[test]
    fn pairs_of_two_bit_strings() {
        // Six subsets; diagonal 1/4, off-diagonal (s−1)/(t(t−1)) = 1/12.
        let rho = avg_subset_density(2, 2, 1, None).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.25 } else { 1.0 / 12.0 };
                assert!((rho.matrix()[(i, j)].re - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn superset_restricts_support() {
        let t = [1u64, 3, 6];
        let rho = avg_subset_density(3, 2, 1, Some(&t)).unwrap();
        let outside = DenseState::basis(3, 0).unwrap();
        assert!(rho.expectation(&outside).unwrap().abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            avg_subset_density(7, 2, 2, None),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn sampling_converges() {
        let exact = avg_subset_density(3, 3, 1, None).unwrap();
        let samples = 4000;
        let approx = sample_avg_subset_density(3, 3, 1, None, samples, &mut seeded(5)).unwrap();
        let dist = exact.frobenius_distance(&approx).unwrap();
        assert!(dist <= 5.0 / (samples as f64).sqrt(), "{dist}");
    }
}
