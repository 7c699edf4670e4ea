//! Acceptance suite. Prints one PASS/FAIL line per criterion with its wall
//! time against the limit.
//!
//! Criterion 4 asks for the averaged subset/tuple trace distance to be
//! non-increasing in `s`; the exact values grow with `s` (`(s−1)/t` for one
//! copy), so it is reported as FAIL. Known failures do not fail the process
//! unless `ACCEPTANCE_STRICT=1`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;

use revoqsim_cli::{build_config, dispatch};
use revoqsim_core::harness::distinct::{check_distinct_extraction, AuditParams};
use revoqsim_core::harness::hybrids::{revenc_hybrids, unforge_hybrids, FloodDistinguisher, FloodParams};
use revoqsim_core::harness::o2h::run_o2h_audit;
use revoqsim_core::harness::revoke_expt::revenc_adversary;
use revoqsim_core::harness::unforge::{measure_and_guess_probability, run_unforgeability, strategy_by_name, UnforgeParams};
use revoqsim_core::harness::wkd::run_wkd_false_accept;
use revoqsim_core::harness::Z_GATE;
use revoqsim_core::perm::sample_random_perm;
use revoqsim_core::pointfn::{self, PointFunction, WkdParams};
use revoqsim_core::qstate::{avg_subset_density, avg_tuple_density, trace_distance, Outcome, Register, SubsetState};
use revoqsim_core::revenc::{self, Backend, RevEncParams};
use revoqsim_core::rng::seeded;
use revoqsim_core::sponge::{
    bound_eval, classical_guess_probability, range_bitmap, run_attack, run_classical_unforgeability, AttackConfig,
    AttackStrategy, ClassicalParams, ClassicalStrategy, SpongeParams,
};
use revoqsim_core::BitString;
use revoqsim_oracles::{identities, sponge as sponge_oracle, unforge as unforge_oracle};

type Check = Result<(bool, String), Box<dyn std::error::Error>>;

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

const KNOWN_UNATTAINABLE: &[u8] = &[4];

const BACKENDS: [Backend; 2] = [Backend::Keyed, Backend::Explicit];

fn decryption_correctness() -> Check {
    let mut cases = 0;
    let mut wrong = 0;
    for backend in BACKENDS {
        for k in 1..=2 {
            let params = RevEncParams::new(2, 2, k, backend)?;
            for seed in 0..20 {
                let mut rng = seeded(seed);
                let sk = revenc::keygen(&params, &mut rng)?;
                for mu in BitString::all(2) {
                    let (ct, _) = revenc::encrypt(&sk, mu, &params, &mut rng)?;
                    for i in 0..k {
                        cases += 1;
                        if revenc::decrypt(&sk, ct.copies.copy(i).ok_or("missing copy")?, ct.pad, &mut rng)? != mu {
                            wrong += 1;
                        }
                    }
                }
            }
        }
    }
    Ok((wrong == 0, format!("{} of {cases} decryptions correct", cases - wrong)))
}

fn revocation_correctness() -> Check {
    let (mut cases, mut worst, mut rejected) = (0, 0.0f64, 0);
    for backend in BACKENDS {
        for k in 1..=2 {
            let params = RevEncParams::new(2, 2, k, backend)?;
            for seed in 0..20 {
                let mut rng = seeded(seed);
                let sk = revenc::keygen(&params, &mut rng)?;
                for mu in BitString::all(2) {
                    let (ct, vk) = revenc::encrypt(&sk, mu, &params, &mut rng)?;
                    let rev = revenc::revoke(&sk, &vk, &params, &ct.copies, &mut rng)?;
                    cases += 1;
                    worst = worst.max((rev.accept_probability - 1.0).abs());
                    if rev.outcome != Outcome::Accept {
                        rejected += 1;
                    }
                }
            }
        }
    }
    Ok((
        worst <= 1e-9 && rejected == 0,
        format!("{cases} returns, max |p − 1| = {worst:.1e}, {rejected} rejected"),
    ))
}

fn overlap_law() -> Check {
    let mut worst = 0.0f64;
    for case in 0..50u64 {
        let n = 2 + (case % 2) as u32;
        let k = 1 + ((case / 2) % 2) as usize;
        let backend = BACKENDS[((case / 4) % 2) as usize];
        let params = RevEncParams::new(n, 2, k, backend)?;
        let mut rng = seeded(1000 + case);
        let sk = revenc::keygen(&params, &mut rng)?;
        let (_, vk) = revenc::encrypt(&sk, BitString::random(2, &mut rng), &params, &mut rng)?;
        let s = revenc::subset_for(&sk, &params, vk.y)?;
        let half = 1usize << (n - 1);
        let mut inside = s.support().to_vec();
        let mut outside: Vec<u64> = (0..1u64 << params.width()).filter(|x| !s.contains(*x)).collect();
        inside.shuffle(&mut rng);
        outside.shuffle(&mut rng);
        let forged = SubsetState::new(params.width(), inside[..half].iter().chain(&outside[..half]).copied())?;
        let returned = Register::copies_of(&forged.to_dense()?, k)?;
        let p = revenc::accept_probability(&sk, &vk, &params, &returned)?;
        let expected = unforge_oracle::overlap_accept(s.intersection_size(&forged) as u64, n, k as u32);
        worst = worst.max((p - expected).abs());
    }
    Ok((worst <= 1e-9, format!("50 forgeries, max deviation {worst:.1e}")))
}

fn averaged_trace_distance() -> Check {
    let mut values = Vec::new();
    let mut worst = 0.0f64;
    for s in [2usize, 4, 8] {
        let td = trace_distance(&avg_subset_density(3, s, 1, None)?, &avg_tuple_density(3, 1, None)?)?;
        let oracle = identities::subset_vs_tuple_trace_distance(3, s, 1, None);
        worst = worst.max((td - oracle).abs());
        values.push(td);
    }
    let non_increasing = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    Ok((
        worst <= 1e-9 && non_increasing,
        format!(
            "TD at s = 2, 4, 8: {values:.4?}; oracle agreement {worst:.1e}; {}",
            if non_increasing { "non-increasing" } else { "increases with s" }
        ),
    ))
}

fn pigeonhole_zero() -> Check {
    let params = UnforgeParams { n: 8, s: 2, k: 2 };
    let mut wins = Vec::new();
    for (name, q) in [("measure-guess", 0), ("membership-scan", 64)] {
        let strategy = strategy_by_name(name, q)?;
        wins.push(run_unforgeability(&params, strategy.as_ref(), 10_000, 5)?.estimate.wins);
    }
    Ok((wins.iter().all(|&w| w == 0), format!("wins over 10^4 trials per strategy: {wins:?}")))
}

fn measure_and_guess_calibration() -> Check {
    let params = UnforgeParams { n: 8, s: 64, k: 2 };
    let exact = measure_and_guess_probability(&params);
    let oracle = unforge_oracle::measure_and_guess(8, 64, 2);
    let micro = measure_and_guess_probability(&UnforgeParams { n: 3, s: 4, k: 1 });
    let micro_enum = unforge_oracle::measure_and_guess_exhaustive(3, 4, 1);
    let strategy = strategy_by_name("measure-guess", 0)?;
    let e = run_unforgeability(&params, strategy.as_ref(), 10_000, 6)?.estimate;
    Ok((
        e.consistent_with(exact, Z_GATE) && (exact - oracle).abs() < 1e-12 && (micro - micro_enum).abs() < 1e-9,
        format!(
            "p̂ = {:.5} [{:.5}, {:.5}] vs {exact:.5}; micro {micro:.6} vs enumerated {micro_enum:.6}",
            e.p_hat, e.ci_lo, e.ci_hi
        ),
    ))
}

fn extractor_contract() -> Check {
    let audit = run_o2h_audit(4, 10_000, 7)?;
    Ok((
        audit.passes(Z_GATE),
        format!(
            "single-query {}/{}, first-of-two {:.4}, index counts {:?}",
            audit.single_query_hits, audit.trials, audit.first_of_two.p_hat, audit.index_counts
        ),
    ))
}

fn distinct_extraction_audit() -> Check {
    let params = AuditParams {
        n: 3,
        s: 4,
        k: 1,
        y_dim: 2,
        env_dim: 2,
        random_instances: 100,
    };
    let report = check_distinct_extraction(&params, &mut seeded(8))?;
    let closed = &report.rows[0].eval;
    let (lhs, rhs) = identities::distinct_extraction_closed_form(4, 1);
    let closed_ok = (closed.lhs - lhs).abs() < 1e-9 && (closed.rhs - rhs).abs() < 1e-9;
    Ok((
        report.violations == 0 && report.min_slack >= -1e-9 && closed_ok && report.rows.len() == 102,
        format!(
            "{} instances, {} violations, min slack {:.3e}, closed form {}",
            report.rows.len(),
            report.violations,
            report.min_slack,
            if closed_ok { "matches" } else { "differs" }
        ),
    ))
}

fn hybrid_sanity() -> Check {
    let revenc_params = RevEncParams::new(2, 2, 1, Backend::Explicit)?;
    let adversary = revenc_adversary("honest-random-guess")?;
    let flood = FloodParams { n: 6, s: 8, t: 32, k: 1 };
    let tables = [
        revenc_hybrids(&revenc_params, adversary.as_ref(), 10_000, 9)?,
        unforge_hybrids(&flood, FloodDistinguisher::Probe { q: 4 }, 10_000, 9)?,
        unforge_hybrids(&FloodParams { k: 2, ..flood }, FloodDistinguisher::Collision, 10_000, 9)?,
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for t in &tables {
        let identical: Vec<_> = t.pairs.iter().filter(|p| p.identical).collect();
        ok &= !identical.is_empty() && t.identical_pairs_pass();
        for p in identical {
            detail.push(format!("{} {}~{} {:+.4}±{:.4}", t.chain, p.left, p.right, p.advantage, p.std_error));
        }
    }
    Ok((ok, detail.join("; ")))
}

fn wkd_bound() -> Check {
    let long = WkdParams { ell: 16, ..WkdParams::with_defaults(4, 1) };
    let r = run_wkd_false_accept(&long, 100_000, 10)?;
    let n = r.false_accepts.trials as f64;
    let ceiling = r.bound + Z_GATE * (r.bound * (1.0 - r.bound) / n).sqrt();
    let short = WkdParams { ell: 2, ..WkdParams::with_defaults(4, 1) };
    let s = run_wkd_false_accept(&short, 100_000, 11)?;
    Ok((
        r.false_accepts.p_hat <= ceiling && s.false_accepts.consistent_with(s.analytic, Z_GATE),
        format!(
            "ℓ=16: {:.2e} ≤ {ceiling:.2e}; ℓ=2: {:.4} vs {:.4}",
            r.false_accepts.p_hat, s.false_accepts.p_hat, s.analytic
        ),
    ))
}

fn point_function_functionality() -> Check {
    let mut evals = 0;
    let mut bad_eval = 0;
    let mut worst_revoke = 0.0f64;
    let mut rng = seeded(12);
    for lambda in 1..=3 {
        let params = WkdParams::with_defaults(lambda, 1);
        for y in BitString::all(lambda) {
            for m in BitString::all(lambda) {
                let mut h = params.random_oracle(seeded(evals))?;
                let p = PointFunction::new(y, m)?;
                let (mut state, vk) = pointfn::pf_compile(&p, &params, &mut h, &mut rng)?;
                let rev = pointfn::pf_revoke(&vk, state.copies(), &params, &mut rng)?;
                worst_revoke = worst_revoke.max((rev.accept_probability - 1.0).abs());
                evals += 1;
                if pointfn::pf_eval(&mut state, y, &mut h, &params, &mut rng)? != m {
                    bad_eval += 1;
                }
            }
        }
    }
    let params = WkdParams { ell: 32, ..WkdParams::with_defaults(3, 1) };
    let mut leaks = 0;
    for probe in 0..10_000u64 {
        let mut h = params.random_oracle(seeded(1 << 32 | probe))?;
        let p = PointFunction::random(3, &mut rng);
        let (mut state, _) = pointfn::pf_compile(&p, &params, &mut h, &mut rng)?;
        let mut x = BitString::random(3, &mut rng);
        while x == p.y {
            x = BitString::random(3, &mut rng);
        }
        if !pointfn::pf_eval(&mut state, x, &mut h, &params, &mut rng)?.is_zero() {
            leaks += 1;
        }
    }
    Ok((
        bad_eval == 0 && leaks == 0 && worst_revoke <= 1e-9,
        format!("{evals} marked evals ({bad_eval} wrong), 10^4 off-point probes ({leaks} nonzero), max |p_revoke − 1| = {worst_revoke:.1e}"),
    ))
}

fn sponge_baseline() -> Check {
    let params = SpongeParams {
        r: 6,
        c: 6,
        table_size: 16,
        backend: Backend::Explicit,
    };
    let mut rng = seeded(13);
    let mut mismatched = 0;
    for _ in 0..200 {
        let phi = sample_random_perm(params.width(), &mut rng)?;
        let iv = BitString::random(params.c, &mut rng);
        if range_bitmap(&phi, iv, params.r) != sponge_oracle::range_by_enumeration(phi.table(), params.r, params.c, iv.value()) {
            mismatched += 1;
        }
    }
    let expected = (sponge_oracle::expected_range_size(6, 6) - sponge_oracle::expected_table_hashes(6, 6, 16)) / 64.0;

    let grid = [0u64, 1, 2, 4, 8, 16];
    let mut baseline = None;
    let mut dominated = true;
    for strategy in [AttackStrategy::RandomGuess, AttackStrategy::InverseProbe, AttackStrategy::TableExtend] {
        for &t in &grid {
            let config = AttackConfig {
                params,
                strategy,
                queries: t,
                allow_forward: false,
                bound_scale: 1.0,
            };
            let r = run_attack(&config, 10_000, 14)?;
            dominated &= r.game.estimate.p_hat <= r.bound;
            if t == 0 && strategy == AttackStrategy::RandomGuess {
                baseline = Some(r);
            }
        }
    }
    let baseline = baseline.expect("grid contains T = 0");
    let monotone = grid.windows(2).all(|w| bound_eval(&params, w[0], 1.0) <= bound_eval(&params, w[1], 1.0));
    let calibrated = baseline.game.estimate.consistent_with(expected, Z_GATE);
    Ok((
        calibrated && mismatched == 0 && monotone && dominated,
        format!(
            "T=0 ε̂ = {:.4} vs {expected:.4} (sampled fibers {:.4}); range check mismatches {mismatched}/200; bound {}; curves {}",
            baseline.game.estimate.p_hat,
            baseline.exact_guess_rate,
            if monotone { "monotone" } else { "not monotone" },
            if dominated { "dominated" } else { "exceed bound" }
        ),
    ))
}

fn classical_baseline() -> Check {
    let params = ClassicalParams { n: 8, s: 64, k: 2 };
    let exact = classical_guess_probability(&params);
    let oracle = unforge_oracle::classical_guess(8, 64, 2);
    let guess = run_classical_unforgeability(&params, ClassicalStrategy::RandomGuess, 0, 10_000, 15)?.estimate;
    let saturated = ClassicalParams { n: 8, s: 4, k: 4 };
    let zero = run_classical_unforgeability(&saturated, ClassicalStrategy::RandomGuess, 0, 10_000, 16)?.estimate;
    let scan = run_classical_unforgeability(&params, ClassicalStrategy::Scan, 1 << 8, 10_000, 17)?.estimate;
    Ok((
        guess.consistent_with(exact, Z_GATE) && (exact - oracle).abs() < 1e-12 && zero.wins == 0 && scan.wins == scan.trials,
        format!(
            "guess {:.4} vs {exact:.4}; k=s wins {}; full scan {}/{}",
            guess.p_hat, zero.wins, scan.wins, scan.trials
        ),
    ))
}

fn reproducibility() -> Check {
    let runs: [(&str, &[(&str, &str)]); 8] = [
        ("revenc", &[]),
        ("revprog", &[]),
        ("pointfn", &[("strategy", "wrong-key-decryptor")]),
        ("unforge", &[]),
        ("forge", &[]),
        ("hybrid-audit", &[]),
        ("distinct-extraction", &[("instances", "10")]),
        ("sponge", &[("queries", "0,4")]),
    ];
    let mut differing = Vec::new();
    for (name, extra) in runs {
        let mut flags = vec![("trials".to_string(), "200".to_string()), ("seed".to_string(), "21".to_string())];
        flags.extend(extra.iter().map(|(k, v)| (k.to_string(), v.to_string())));
        let config = build_config(name, &[], &flags, None)?;
        let (a, b) = (dispatch(&config)?, dispatch(&config)?);
        if a.manifest.digest != b.manifest.digest || a.transcripts != b.transcripts {
            differing.push(name);
        }
    }
    let detail = if differing.is_empty() {
        "8 experiments re-run with identical digests".to_string()
    } else {
        format!("digests differ for {differing:?}")
    };
    Ok((differing.is_empty(), detail))
}

const CRITERIA: [Criterion; 14] = [
    Criterion { id: 1, name: "decryption correctness", limit: Duration::from_secs(5), run: decryption_correctness },
    Criterion { id: 2, name: "revocation correctness", limit: Duration::from_secs(5), run: revocation_correctness },
    Criterion { id: 3, name: "revocation overlap law", limit: Duration::from_secs(10), run: overlap_law },
    Criterion { id: 4, name: "averaged trace distance", limit: Duration::from_secs(60), run: averaged_trace_distance },
    Criterion { id: 5, name: "pigeonhole zero", limit: Duration::from_secs(30), run: pigeonhole_zero },
    Criterion { id: 6, name: "measure-and-guess calibration", limit: Duration::from_secs(60), run: measure_and_guess_calibration },
    Criterion { id: 7, name: "query extractor contract", limit: Duration::from_secs(10), run: extractor_contract },
    Criterion { id: 8, name: "distinct-extraction audit", limit: Duration::from_secs(60), run: distinct_extraction_audit },
    Criterion { id: 9, name: "hybrid sanity", limit: Duration::from_secs(60), run: hybrid_sanity },
    Criterion { id: 10, name: "wrong-key detection bound", limit: Duration::from_secs(60), run: wkd_bound },
    Criterion { id: 11, name: "point-function functionality", limit: Duration::from_secs(30), run: point_function_functionality },
    Criterion { id: 12, name: "sponge zero-query baseline", limit: Duration::from_secs(120), run: sponge_baseline },
    Criterion { id: 13, name: "classical unforgeability baseline", limit: Duration::from_secs(30), run: classical_baseline },
    Criterion { id: 14, name: "reproducibility", limit: Duration::from_secs(10), run: reproducibility },
];

fn main() -> ExitCode {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut unexpected = Vec::new();
    println!();
    for c in &CRITERIA {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok((ok, detail)) => (ok && elapsed <= c.limit, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = format!("{:.2}s / {}s", elapsed.as_secs_f64(), c.limit.as_secs());
        println!(
            "{} {:>2} {:<34} {:<14} {detail}",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            timing
        );
        if !passed && (strict || !KNOWN_UNATTAINABLE.contains(&c.id)) {
            unexpected.push(c.id);
        }
    }
    if unexpected.is_empty() {
        println!("\nacceptance: no unexpected failures (known unattainable: {KNOWN_UNATTAINABLE:?})\n");
        ExitCode::SUCCESS
    } else {
        println!("\nacceptance: unexpected failures {unexpected:?}\n");
        ExitCode::FAILURE
    }
}
