//! Counting references for the unforgeability and guessing experiments.

use crate::combinatorics::{sequences, subsets};

/// Win probability of "measure the k copies, then guess a fresh string
/// uniformly outside the measured ones": the measured values must be
/// pairwise distinct and the guess must land in the remaining `s − k`
/// elements of `S` among the `2^n − k` candidates.
pub fn measure_and_guess(n: u32, s: u64, k: u64) -> f64 {
    if k >= s {
        return 0.0;
    }
    let distinct: f64 = (0..k).map(|i| (s - i) as f64 / s as f64).product();
    let domain = (1u64 << n) as f64;
    distinct * (s - k) as f64 / (domain - k as f64)
}

/// The same quantity by enumerating every subset, every measurement record
/// and every guess.
pub fn measure_and_guess_exhaustive(n: u32, s: usize, k: usize) -> f64 {
    let domain = 1usize << n;
    let all = subsets(domain, s);
    let mut total = 0.0;
    for set in &all {
        let member = |x: usize| set.contains(&x);
        for seq in sequences(s, k) {
            let measured: Vec<usize> = seq.iter().map(|&i| set[i]).collect();
            let mut uniq = measured.clone();
            uniq.sort_unstable();
            uniq.dedup();
            if uniq.len() != k {
                continue;
            }
            let candidates: Vec<usize> = (0..domain).filter(|x| !measured.contains(x)).collect();
            let hits = candidates.iter().filter(|&&g| member(g)).count();
            let p_record = (1.0 / s as f64).powi(k as i32);
            total += p_record * hits as f64 / candidates.len() as f64;
        }
    }
    total / all.len() as f64
}

/// Zero-query classical guesser given `k` distinct members of `S`.
pub fn classical_guess(n: u32, s: u64, k: u64) -> f64 {
    if k >= s {
        return 0.0;
    }
    (s - k) as f64 / ((1u64 << n) - k) as f64
}

/// Accept probability of revocation when the returned register is
/// `|S′⟩^{⊗k}` with `|S| = |S′| = 2^n`.
pub fn overlap_accept(intersection: u64, n: u32, k: u32) -> f64 {
    (intersection as f64 / (1u64 << n) as f64).powi(2 * k as i32)
}

/// Best deterministic guess for `P(x)` given `x`, for an explicit weighted list
/// of `(weight, challenge x, program output P(x))` triples, by trying every
/// guess table over `domain` inputs and `range` outputs.
pub fn trivial_guess_exhaustive(events: &[(f64, usize, usize)], domain: usize, range: usize) -> f64 {
    let mut best = 0.0f64;
    for table in sequences(range, domain) {
        let p: f64 = events
            .iter()
            .filter(|(_, x, y)| table[*x] == *y)
            .map(|(w, _, _)| w)
            .sum();
        best = best.max(p);
    }
    best
}

/// Probability that the four-round forging pipeline wins when its extractor
/// queries the membership-tagged oracle on every input: the k measured copies
/// must be distinct and the extracted point must be one of the remaining
/// members, one of which is selected uniformly among all `2^{n+m}` queries.
pub fn forge_full_scan(n: u32, m: u32, k: u64) -> f64 {
    let s = (1u64 << n) as f64;
    let distinct: f64 = (0..k).map(|i| (s - i as f64) / s).product();
    distinct * (s - k as f64) / (1u64 << (n + m)) as f64
}
