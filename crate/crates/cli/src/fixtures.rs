//! Reference tables recomputed from the brute-force oracles and frozen as
//! JSON fixtures for the test suites.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use serde_json::{json, Value};

use revoqsim_oracles::combinatorics::{orderings, subsets};
use revoqsim_oracles::{identities, perms, sponge, unforge};

/// Bumped whenever a table changes meaning.
pub const FIXTURE_VERSION: &str = "v1";

fn qstate() -> Value {
    let tuple = orderings(&[1usize, 2, 4]);
    let (a, b) = ([0usize, 1], [1usize, 2]);
    let shared = a.iter().filter(|x| b.contains(x)).count() as f64;
    let single_copy = [2usize, 4, 8]
        .iter()
        .map(|&s| {
            json!({
                "n": 3, "t": 8, "k": 1, "s": s,
                "trace_distance": identities::subset_vs_tuple_trace_distance(3, s, 1, None),
                "closed_form": identities::single_copy_trace_distance(8, s as u64),
            })
        })
        .collect::<Vec<_>>();
    let two_copy = [2usize, 3, 4]
        .iter()
        .map(|&s| {
            json!({
                "n": 2, "t": 4, "k": 2, "s": s,
                "trace_distance": identities::subset_vs_tuple_trace_distance(2, s, 2, None),
            })
        })
        .collect::<Vec<_>>();
    json!({
        "subset_state": { "n": 3, "set": [1, 2, 5], "amplitude": (1.0f64 / 3.0).sqrt() },
        "tuple_state": {
            "n": 3, "tuple": [1, 2, 4],
            "nonzero": tuple.len(),
            "amplitude": 1.0 / (tuple.len() as f64).sqrt(),
        },
        "tensor_power": { "n": 2, "set": [1, 2], "k": 2, "nonzero": 4, "amplitude": 0.5 },
        "subset_overlap": { "n": 2, "a": a, "b": b, "fidelity": shared * shared / (a.len() * b.len()) as f64 },
        "avg_subset_density": {
            "n": 2, "s": 2, "k": 1, "subsets": subsets(4, 2).len(),
            "matrix": identities::avg_subset_density(2, 2, 1, None),
        },
        "avg_tuple_density": { "n": 2, "k": 2, "matrix": identities::avg_tuple_density(2, 2, None) },
        "pure_trace_distance": { "a": "|0>", "b": "|+>", "value": identities::pure_trace_distance(0.5f64.sqrt()) },
        "subset_vs_tuple": single_copy,
        "subset_vs_tuple_two_copies": two_copy,
    })
}

fn perm() -> Value {
    let dist: Vec<Value> = perms::cycle_type_distribution(8)
        .into_iter()
        .map(|(cycles, p)| json!({ "cycle_type": cycles, "probability": p }))
        .collect();
    json!({ "points": 8, "cycle_types": dist })
}

fn revenc() -> Value {
    let mut rows = Vec::new();
    for n in 1..=3u32 {
        for k in 1..=2u32 {
            for i in 0..=(1u64 << n) {
                rows.push(json!({ "n": n, "k": k, "intersection": i, "accept": unforge::overlap_accept(i, n, k) }));
            }
        }
    }
    json!({ "overlap_law": rows })
}

/// `(weight, x, P(x))` for uniform point functions `P_{y,v}` on `d`-bit
/// inputs and `r`-bit outputs, with `Pr[x = y] = p_marked` (or uniform `x`).
fn point_events(d: u32, r: u32, p_marked: Option<f64>) -> Vec<(f64, usize, usize)> {
    let (dom, ran) = (1usize << d, 1usize << r);
    let mut out = Vec::new();
    for y in 0..dom {
        for v in 0..ran {
            for x in 0..dom {
                let px = match p_marked {
                    None => 1.0 / dom as f64,
                    Some(p) if x == y => p,
                    Some(p) => (1.0 - p) / (dom - 1) as f64,
                };
                let w = px / (dom * ran) as f64;
                out.push((w, x, if x == y { v } else { 0 }));
            }
        }
    }
    out
}

fn revprog() -> Value {
    let table_events: Vec<(f64, usize, usize)> = {
        // Random 2-bit tables on 2-bit inputs, uniform challenge.
        let tables = revoqsim_oracles::combinatorics::sequences(4, 4);
        let w = 1.0 / (tables.len() * 4) as f64;
        tables
            .iter()
            .flat_map(|t| (0..4).map(move |x| (w, x, t[x])))
            .collect()
    };
    json!({
        "trivial": [
            { "family": "point", "domain_bits": 2, "range_bits": 2, "challenge": "uniform",
              "probability": unforge::trivial_guess_exhaustive(&point_events(2, 2, None), 4, 4) },
            { "family": "point", "domain_bits": 2, "range_bits": 2, "challenge": "marked:0.5",
              "probability": unforge::trivial_guess_exhaustive(&point_events(2, 2, Some(0.5)), 4, 4) },
            { "family": "point", "domain_bits": 2, "range_bits": 1, "challenge": "marked:1",
              "probability": unforge::trivial_guess_exhaustive(&point_events(2, 1, Some(1.0)), 4, 2) },
            { "family": "random", "domain_bits": 2, "range_bits": 2, "challenge": "uniform",
              "probability": unforge::trivial_guess_exhaustive(&table_events, 4, 4) },
        ]
    })
}

fn pointfn() -> Value {
    let trivial: Vec<Value> = [(2u32, None), (2, Some(1.0)), (2, Some(0.5))]
        .iter()
        .map(|&(lambda, p)| {
            let size = 1usize << lambda;
            json!({
                "lambda": lambda,
                "challenge": p.map_or("uniform".to_string(), |p| format!("marked:{p}")),
                "probability": unforge::trivial_guess_exhaustive(&point_events(lambda, lambda, p), size, size),
            })
        })
        .collect();
    // A wrong key reads the random oracle at a point never used for the tag,
    // so the stored tag matches a fresh uniform ℓ-bit value.
    let wkd: Vec<Value> = [(4u32, 16u32), (2, 2), (4, 32), (3, 12), (2, 8)]
        .iter()
        .map(|&(lambda, ell)| {
            json!({
                "lambda": lambda, "ell": ell,
                "false_accept": 2f64.powi(-(ell as i32)),
                "bound": 2f64.powi(2 * lambda as i32 - ell as i32),
            })
        })
        .collect();
    json!({ "trivial": trivial, "wkd": wkd })
}

fn harness() -> Value {
    let measure = [(8u32, 64usize, 2usize), (3, 4, 1), (4, 6, 2), (6, 16, 3)]
        .iter()
        .map(|&(n, s, k)| {
            let mut row = json!({ "n": n, "s": s, "k": k, "probability": unforge::measure_and_guess(n, s as u64, k as u64) });
            if n <= 4 {
                row["exhaustive"] = json!(unforge::measure_and_guess_exhaustive(n, s, k));
            }
            row
        })
        .collect::<Vec<_>>();
    let distinct = [(4u64, 1u32), (4, 2), (8, 1), (8, 3)]
        .iter()
        .map(|&(s, k)| {
            let (lhs, rhs) = identities::distinct_extraction_closed_form(s, k);
            json!({
                "set_size": s, "k": k, "lhs": lhs, "rhs": rhs,
                "factor_enumerated": identities::distinct_extraction_factor_enumerated(s as usize, k as usize),
            })
        })
        .collect::<Vec<_>>();
    let forge = [(2u32, 2u32, 1u64), (2, 1, 2), (3, 1, 1)]
        .iter()
        .map(|&(n, m, k)| json!({ "n": n, "m": m, "k": k, "probability": unforge::forge_full_scan(n, m, k) }))
        .collect::<Vec<_>>();
    // The faked copy is a uniformly random basis state of the n+m = 4 qubit
    // register; a copy is uniform over 2^n of the 16 basis states.
    let support = 1usize << 2;
    let fake_accept = (0..16)
        .map(|b| if b < support { 1.0 / support as f64 } else { 0.0 })
        .sum::<f64>()
        / 16.0;
    let keep_one = json!({ "n": 2, "m": 2, "k": 2, "accept": fake_accept });
    json!({
        "measure_and_guess": measure,
        "distinct_extraction": distinct,
        "forge_full_scan": forge,
        "keep_one_copy": keep_one,
    })
}

fn classical() -> Value {
    let rows = [(8u32, 64u64, 2u64), (5, 10, 3), (4, 4, 4), (3, 5, 1)]
        .iter()
        .map(|&(n, s, k)| json!({ "n": n, "s": s, "k": k, "probability": unforge::classical_guess(n, s, k) }))
        .collect::<Vec<_>>();
    json!({ "random_guess": rows })
}

fn sponge_tables() -> Value {
    let (r, c, s) = (6u32, 6u32, 16u64);
    let range = sponge::expected_range_size(r, c);
    let hashes = sponge::expected_table_hashes(r, c, s);
    let full = sponge::expected_range_size(8, 2);
    json!({
        "zero_query": {
            "r": r, "c": c, "table_size": s,
            "expected_range": range,
            "expected_table_hashes": hashes,
            "guess_rate": (range - hashes) / (1u64 << r) as f64,
        },
        "collisions": {
            "r": 8, "c": 2,
            "expected_distinct": full,
            "expected_collisions": (1u64 << 8) as f64 - full,
        },
    })
}

/// Every table, keyed by file stem.
pub fn reference_tables() -> BTreeMap<&'static str, Value> {
    BTreeMap::from([
        ("qstate", qstate()),
        ("perm", perm()),
        ("revenc", revenc()),
        ("revprog", revprog()),
        ("pointfn", pointfn()),
        ("harness", harness()),
        ("classical", classical()),
        ("sponge", sponge_tables()),
    ])
}

/// Writes `<dir>/<name>.json` for every table and returns the paths.
pub fn regen_reference_tables(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut written = Vec::new();
    for (name, value) in reference_tables() {
        let path = dir.join(format!("{name}.json"));
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        crate::output::write_atomic(&path, text.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
