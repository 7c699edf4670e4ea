//! Reference values for subset-state identities.

use crate::combinatorics::{orderings, sequences, subsets};
use crate::jacobi::trace_distance_real;

fn domain(n: u32, superset: Option<&[usize]>) -> Vec<usize> {
    match superset {
        Some(t) => t.to_vec(),
        None => (0..(1usize << n)).collect(),
    }
}

fn index_of(tuple: &[usize], n: u32) -> usize {
    tuple.iter().fold(0, |acc, &x| (acc << n) | x)
}

fn add_outer(acc: &mut [Vec<f64>], vec: &[(usize, f64)], weight: f64) {
    for &(i, a) in vec {
        for &(j, b) in vec {
            acc[i][j] += weight * a * b;
        }
    }
}

/// `E_S |S⟩⟨S|^{⊗k}` over all size-`s` subsets of `superset` (default: the
/// whole `n`-bit domain), as a dense real matrix.
pub fn avg_subset_density(n: u32, s: usize, k: usize, superset: Option<&[usize]>) -> Vec<Vec<f64>> {
    let t = domain(n, superset);
    let dim = 1usize << (n as usize * k);
    let mut acc = vec![vec![0.0; dim]; dim];
    let all = subsets(t.len(), s);
    let amp = (1.0 / s as f64).powf(k as f64 / 2.0);
    for pick in &all {
        let elems: Vec<usize> = pick.iter().map(|&i| t[i]).collect();
        let vec: Vec<(usize, f64)> = sequences(s, k)
            .into_iter()
            .map(|seq| {
                let tuple: Vec<usize> = seq.iter().map(|&i| elems[i]).collect();
                (index_of(&tuple, n), amp)
            })
            .collect();
        add_outer(&mut acc, &vec, 1.0 / all.len() as f64);
    }
    acc
}

/// `E_X |σ_X⟩⟨σ_X|` over all size-`k` subsets `X` of `superset`.
pub fn avg_tuple_density(n: u32, k: usize, superset: Option<&[usize]>) -> Vec<Vec<f64>> {
    let t = domain(n, superset);
    let dim = 1usize << (n as usize * k);
    let mut acc = vec![vec![0.0; dim]; dim];
    let all = subsets(t.len(), k);
    for pick in &all {
        let elems: Vec<usize> = pick.iter().map(|&i| t[i]).collect();
        let perms = orderings(&elems);
        let amp = 1.0 / (perms.len() as f64).sqrt();
        let vec: Vec<(usize, f64)> = perms.iter().map(|p| (index_of(p, n), amp)).collect();
        add_outer(&mut acc, &vec, 1.0 / all.len() as f64);
    }
    acc
}

/// Trace distance between the averaged subset-state and permuted-tuple
/// densities, by enumeration and Jacobi diagonalization.
pub fn subset_vs_tuple_trace_distance(n: u32, s: usize, k: usize, superset: Option<&[usize]>) -> f64 {
    let a = avg_subset_density(n, s, k, superset);
    let b = avg_tuple_density(n, k, superset);
    trace_distance_real(&a, &b)
}

/// Closed form of the same distance for a single copy over a domain of size
/// `t`: the subset average is `αI + βJ` with `β = (s−1)/(t(t−1))`, which
/// differs from `I/t` by `(s−1)/t` on the all-ones direction and by `−β` on
/// its complement.
pub fn single_copy_trace_distance(t: u64, s: u64) -> f64 {
    (s as f64 - 1.0) / t as f64
}

/// `√(1 − |⟨a|b⟩|²)` for pure states.
pub fn pure_trace_distance(overlap_abs: f64) -> f64 {
    (1.0 - overlap_abs * overlap_abs).max(0.0).sqrt()
}

/// Fraction of `k`-tuples over a set of size `set_size` that are pairwise
/// distinct and avoid one further fixed element:
/// `(|S|−1)(|S|−2)…(|S|−k)/|S|^k`.
pub fn distinct_extraction_factor(set_size: u64, k: u32) -> f64 {
    (1..=k as u64)
        .map(|i| (set_size as f64 - i as f64) / set_size as f64)
        .product()
}

/// Same factor by direct enumeration of tuples.
pub fn distinct_extraction_factor_enumerated(set_size: usize, k: usize) -> f64 {
    let fixed = 0usize;
    let good = sequences(set_size, k)
        .into_iter()
        .filter(|seq| {
            let mut all = seq.clone();
            all.push(fixed);
            let mut sorted = all.clone();
            sorted.sort_unstable();
            sorted.dedup();
            sorted.len() == all.len()
        })
        .count();
    good as f64 / (set_size as f64).powi(k as i32)
}

/// Both sides of the extraction inequality for `ρ = |S⟩⟨S|^{⊗k} ⊗ |S⟩⟨S|` and
/// the identity isometry, evaluated in closed form. Returns `(lhs, rhs)`.
pub fn distinct_extraction_closed_form(set_size: u64, k: u32) -> (f64, f64) {
    let s = set_size as f64;
    let lhs: f64 = (0..=k as u64).map(|i| (s - i as f64) / s).product();
    let rhs = distinct_extraction_factor(set_size, k);
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_copy_matches_enumeration() {
        for s in [2usize, 4, 8] {
            let td = subset_vs_tuple_trace_distance(3, s, 1, None);
            assert!((td - single_copy_trace_distance(8, s as u64)).abs() < 1e-10);
        }
    }

    #[test]
    fn factor_agrees_with_enumeration() {
        for (size, k) in [(4, 1), (5, 2), (6, 3)] {
            let a = distinct_extraction_factor(size as u64, k as u32);
            let b = distinct_extraction_factor_enumerated(size, k);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn densities_have_unit_trace() {
        let a = avg_subset_density(2, 2, 2, None);
        let b = avg_tuple_density(2, 2, None);
        let tr = |m: &Vec<Vec<f64>>| (0..m.len()).map(|i| m[i][i]).sum::<f64>();
        assert!((tr(&a) - 1.0).abs() < 1e-12);
        assert!((tr(&b) - 1.0).abs() < 1e-12);
    }
}
