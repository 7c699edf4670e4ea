//! Reference values for single-round sponge hashing.

use crate::combinatorics::binomial;

/// Range of `x ↦ top_r(φ(x‖iv))` by enumerating the whole domain of
/// the permutation table, returned as a membership bitmap over `{0,1}^r`.
pub fn range_by_enumeration(table: &[u64], r: u32, c: u32, iv: u64) -> Vec<bool> {
    let mut range = vec![false; 1 << r];
    for x in 0..(1u64 << r) {
        let out = table[((x << c) | iv) as usize];
        range[(out >> c) as usize] = true;
    }
    range
}

/// `E|range|` for a uniformly random permutation: each of the `2^r` outputs is
/// hit unless all `2^c` points of its output block avoid the `2^r` inputs
/// sharing the IV.
pub fn expected_range_size(r: u32, c: u32) -> f64 {
    let n = (1u64 << (r + c)) as f64;
    let block = 1u64 << c;
    let inputs = 1u64 << r;
    let miss = binomial(n as u64 - block, inputs) / binomial(n as u64, inputs);
    inputs as f64 * (1.0 - miss)
}

/// `E|{h_1..h_S}|` for `S` distinct inputs.
pub fn expected_table_hashes(r: u32, c: u32, table_size: u64) -> f64 {
    let n = 1u64 << (r + c);
    let block = 1u64 << c;
    let miss = binomial(n - block, table_size) / binomial(n, table_size);
    (1u64 << r) as f64 * (1.0 - miss)
}
