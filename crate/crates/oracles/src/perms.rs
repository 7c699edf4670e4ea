//! Exact statistics of uniformly random permutations.

use std::collections::BTreeMap;

use crate::combinatorics::orderings;

/// Sorted cycle lengths of the permutation `table`.
pub fn cycle_type(table: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; table.len()];
    let mut lengths = Vec::new();
    for start in 0..table.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = table[cur];
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    lengths
}

/// Probability of each cycle type for a uniform permutation of `points`
/// elements, by enumerating the whole symmetric group.
pub fn cycle_type_distribution(points: usize) -> BTreeMap<Vec<usize>, f64> {
    let all = orderings(&(0..points).collect::<Vec<_>>());
    let total = all.len() as f64;
    let mut counts: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for p in &all {
        *counts.entry(cycle_type(p)).or_default() += 1.0;
    }
    for v in counts.values_mut() {
        *v /= total;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_distribution() {
        let d = cycle_type_distribution(3);
        assert!((d[&vec![1, 1, 1]] - 1.0 / 6.0).abs() < 1e-12);
        assert!((d[&vec![1, 2]] - 0.5).abs() < 1e-12);
        assert!((d[&vec![3]] - 1.0 / 3.0).abs() < 1e-12);
    }
}
