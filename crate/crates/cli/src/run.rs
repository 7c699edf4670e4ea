//! Turns a validated config into a typed plan, runs it and collects the
//! manifest.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use revoqsim_core::harness::distinct::{check_distinct_extraction, AuditParams};
use revoqsim_core::harness::forge::{full_scan_probability, run_forge_trials, ForgeAdversary, ForgeParams, HonestFullScan, NullPostPhase};
use revoqsim_core::harness::hybrids::{revenc_hybrids, unforge_hybrids, FloodDistinguisher, FloodParams, HybridTable};
use revoqsim_core::harness::revoke_expt::{
    pointfn_adversary, program_adversary, revenc_adversary, run_hybrid_search, run_pointfn, run_revenc, run_revprog,
    PointFnGame, ProgramFamily, RevEncVariant, RevProgGame, RevokeReport,
};
use revoqsim_core::harness::unforge::{measure_and_guess_probability, run_unforgeability, strategy_by_name, UnforgeParams};
use revoqsim_core::harness::wkd::run_wkd_false_accept;
use revoqsim_core::harness::{GameReport, GameTranscript, SuccessEstimate, Z_GATE};
use revoqsim_core::pointfn::{ChallengeDist, WkdParams};
use revoqsim_core::revenc::{Backend, RevEncParams};
use revoqsim_core::revprog::ProgramParams;
use revoqsim_core::rng::seeded;
use revoqsim_core::sponge::{
    bound_eval, classical_guess_probability, run_attack, run_classical_unforgeability, AttackConfig, AttackReport,
    AttackStrategy, ClassicalParams, ClassicalStrategy, CurveRow, SpongeParams,
};

use crate::config::{ConfigError, Experiment, ExperimentConfig};

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub label: String,
    pub strategy: String,
    pub trials: u64,
    pub wins: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_queries: f64,
}

impl ResultRecord {
    fn new(label: impl Into<String>, strategy: impl Into<String>, e: &SuccessEstimate, mean_queries: f64) -> Self {
        Self {
            label: label.into(),
            strategy: strategy.into(),
            trials: e.trials,
            wins: e.wins,
            p_hat: e.p_hat,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            mean_queries,
        }
    }

    fn from_game(label: impl Into<String>, strategy: impl Into<String>, g: &GameReport) -> Self {
        Self::new(label, strategy, &g.estimate, g.mean_queries)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn assertion(name: &str, passed: bool, detail: impl Into<String>) -> Assertion {
    Assertion {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub version: String,
    pub wall_time_secs: f64,
    pub results: Vec<ResultRecord>,
    /// Full experiment report.
    pub report: Value,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    /// SHA-256 over the results, the report and the transcript lines.
    pub digest: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub transcripts: Vec<GameTranscript>,
    /// Attack curve rows, for the sponge experiment.
    pub curve: Vec<CurveRow>,
}

enum Plan {
    Revenc {
        params: RevEncParams,
        variant: String,
        strategy: String,
    },
    Revprog {
        game: RevProgGame,
        strategy: String,
        queries: u64,
    },
    Pointfn {
        game: PointFnGame,
        strategy: String,
    },
    Unforge {
        params: UnforgeParams,
        strategy: String,
        queries: u64,
    },
    Classical {
        params: ClassicalParams,
        strategy: ClassicalStrategy,
        queries: u64,
    },
    Forge {
        params: ForgeParams,
        strategy: String,
    },
    RevencHybrids {
        params: RevEncParams,
        strategy: String,
    },
    UnforgeHybrids {
        params: FloodParams,
        distinguisher: FloodDistinguisher,
    },
    Distinct(AuditParams),
    Sponge {
        params: SpongeParams,
        queries: Vec<u64>,
        strategies: Vec<AttackStrategy>,
        forward: bool,
        scale: f64,
    },
}

fn core(e: revoqsim_core::Error) -> ConfigError {
    ConfigError::from_core(e)
}

fn plan(cfg: &ExperimentConfig) -> Result<Plan, ConfigError> {
    Ok(match cfg.experiment {
        Experiment::Revenc => {
            let params = RevEncParams::new(cfg.u32("n"), cfg.u32("m"), cfg.usize("k"), cfg.parsed("backend")?).map_err(core)?;
            let strategy = cfg.text("strategy").to_string();
            revenc_adversary(&strategy).map_err(core)?;
            Plan::Revenc {
                params,
                variant: cfg.text("variant").into(),
                strategy,
            }
        }
        Experiment::Revprog => {
            let params = ProgramParams {
                n: cfg.u32("n"),
                m: cfg.u32("m"),
                k: cfg.usize("k"),
                backend: cfg.parsed("backend")?,
            };
            params.revenc().map_err(core)?;
            let range_bits = cfg.u32("range-bits");
            let family = match cfg.text("family") {
                "point" => ProgramFamily::PointFunctions { range_bits },
                _ => ProgramFamily::RandomTables { range_bits },
            };
            let challenge: ChallengeDist = cfg.parsed("challenge-dist")?;
            let strategy = cfg.text("strategy").to_string();
            program_adversary(&strategy, cfg.u64("queries")).map_err(core)?;
            Plan::Revprog {
                game: RevProgGame { params, family, challenge },
                strategy,
                queries: cfg.u64("queries"),
            }
        }
        Experiment::Pointfn => {
            let lambda = cfg.u32("lambda");
            let ell = match cfg.u32("ell") {
                0 => 4 * lambda,
                l => l,
            };
            let params = WkdParams {
                lambda,
                ell,
                n: cfg.u32("n"),
                k: cfg.usize("k"),
                backend: cfg.parsed("backend")?,
            };
            params.revenc().map_err(core)?;
            let strategy = cfg.text("strategy").to_string();
            if strategy != "wkd-false-accept" {
                pointfn_adversary(&strategy).map_err(core)?;
            }
            Plan::Pointfn {
                game: PointFnGame {
                    params,
                    challenge: cfg.parsed("challenge-dist")?,
                },
                strategy,
            }
        }
        Experiment::Unforge => {
            let (n, s, k) = (cfg.u32("n"), cfg.usize("s"), cfg.usize("k"));
            let strategy = cfg.text("strategy").to_string();
            let queries = cfg.u64("queries");
            match cfg.text("mode") {
                "quantum" => {
                    let params = UnforgeParams { n, s, k };
                    params.validate().map_err(core)?;
                    strategy_by_name(&strategy, queries).map_err(core)?;
                    Plan::Unforge { params, strategy, queries }
                }
                _ => {
                    if n > 30 || s > 1usize << n {
                        return Err(ConfigError::bad("s", format!("{s} > 2^{n}")));
                    }
                    if k > s {
                        return Err(ConfigError::bad("k", format!("{k} > s = {s}")));
                    }
                    Plan::Classical {
                        params: ClassicalParams { n, s, k },
                        strategy: strategy.parse().map_err(core)?,
                        queries,
                    }
                }
            }
        }
        Experiment::Forge => {
            let params = ForgeParams {
                n: cfg.u32("n"),
                m: cfg.u32("m"),
                k: cfg.usize("k"),
            };
            params.validate().map_err(core)?;
            Plan::Forge {
                params,
                strategy: cfg.text("strategy").into(),
            }
        }
        Experiment::HybridAudit => {
            let n = cfg.u32("n");
            match cfg.text("chain") {
                "revenc" => {
                    let params = RevEncParams::new(if n == 0 { 2 } else { n }, cfg.u32("m"), cfg.usize("k"), Backend::Explicit)
                        .map_err(core)?;
                    let strategy = cfg.text("strategy").to_string();
                    revenc_adversary(&strategy).map_err(core)?;
                    Plan::RevencHybrids { params, strategy }
                }
                _ => {
                    let params = FloodParams {
                        n: if n == 0 { 6 } else { n },
                        s: cfg.usize("s"),
                        t: cfg.usize("t"),
                        k: cfg.usize("k"),
                    };
                    params.validate().map_err(core)?;
                    let distinguisher = match cfg.text("distinguisher") {
                        "probe" => FloodDistinguisher::Probe { q: cfg.u64("q") },
                        _ => FloodDistinguisher::Collision,
                    };
                    Plan::UnforgeHybrids { params, distinguisher }
                }
            }
        }
        Experiment::DistinctExtraction => {
            let params = AuditParams {
                n: cfg.u32("n"),
                s: cfg.usize("s"),
                k: cfg.usize("k"),
                y_dim: cfg.usize("y-dim"),
                env_dim: cfg.usize("env-dim"),
                random_instances: cfg.usize("instances"),
            };
            if params.s > 1usize << params.n {
                return Err(ConfigError::bad("s", format!("{} > 2^n", params.s)));
            }
            let dim = (1usize << (params.n as usize * params.k)) * params.y_dim;
            if params.n as usize * params.k > 12 || dim > revoqsim_core::harness::distinct::MAX_DIM {
                return Err(ConfigError::bad("k", format!("state dimension {dim} too large")));
            }
            Plan::Distinct(params)
        }
        Experiment::Sponge => {
            let params = SpongeParams {
                r: cfg.u32("r"),
                c: cfg.u32("c"),
                table_size: cfg.u64("table-size"),
                backend: cfg.parsed("backend")?,
            };
            params.validate().map_err(core)?;
            let queries: Vec<u64> = cfg.list("queries").iter().map(|q| q.parse().expect("validated")).collect();
            let strategies = cfg
                .list("strategy")
                .iter()
                .map(|s| s.parse::<AttackStrategy>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(core)?;
            let forward = cfg.flag("forward-access");
            if strategies.contains(&AttackStrategy::ForwardProbe) && !forward {
                return Err(ConfigError::bad("strategy", "forward-probe needs forward-access = true"));
            }
            Plan::Sponge {
                params,
                queries,
                strategies,
                forward,
                scale: cfg.f64("bound-scale"),
            }
        }
    })
}

/// Checks that `config` describes a runnable experiment without running it.
pub fn validate(config: &ExperimentConfig) -> Result<(), ConfigError> {
    plan(config).map(|_| ())
}

struct Collected {
    results: Vec<ResultRecord>,
    report: Value,
    assertions: Vec<Assertion>,
    transcripts: Vec<GameTranscript>,
    curve: Vec<CurveRow>,
}

impl Collected {
    fn new(report: Value) -> Self {
        Self {
            results: Vec::new(),
            report,
            assertions: Vec::new(),
            transcripts: Vec::new(),
            curve: Vec::new(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn revoke_checks(out: &mut Collected, r: &RevokeReport, honest: bool) {
    out.assertions.push(assertion(
        "no-win-after-reject",
        r.conditioning_holds(),
        format!("{} wins among rejected trials", r.win_given_reject.wins),
    ));
    if honest {
        out.assertions.push(assertion(
            "honest-return-accepted",
            r.acceptance.wins == r.acceptance.trials,
            format!("{}/{} accepted", r.acceptance.wins, r.acceptance.trials),
        ));
    }
}

fn calibrated(name: &str, e: &SuccessEstimate, p: f64) -> Assertion {
    assertion(
        name,
        e.consistent_with(p, Z_GATE),
        format!("p_hat = {:.6}, exact = {p:.6}, {}/{}", e.p_hat, e.wins, e.trials),
    )
}

/// `p_hat ≤ bound + 3σ` with `σ` the binomial deviation at the bound.
fn below(name: &str, e: &SuccessEstimate, bound: f64) -> Assertion {
    let b = bound.min(1.0);
    let sigma = (b * (1.0 - b) / e.trials as f64).sqrt();
    assertion(
        name,
        e.p_hat <= b + Z_GATE * sigma,
        format!("p_hat = {:.3e} vs bound {bound:.3e} + 3σ ({sigma:.3e})", e.p_hat),
    )
}

fn execute(cfg: &ExperimentConfig, plan: Plan) -> Result<Collected, revoqsim_core::Error> {
    let (seed, trials) = (cfg.seed, cfg.trials);
    Ok(match plan {
        Plan::Revenc { params, variant, strategy } => {
            let adv = revenc_adversary(&strategy)?;
            let r = match variant.as_str() {
                "ind" => run_revenc(&params, RevEncVariant::standard(params.m)?, adv.as_ref(), trials, seed)?,
                "search" => run_revenc(&params, RevEncVariant::Search, adv.as_ref(), trials, seed)?,
                _ => run_hybrid_search(&params, adv.as_ref(), trials, seed)?,
            };
            let mut out = Collected::new(to_value(&r));
            out.results.push(ResultRecord::from_game(format!("revenc/{variant}"), adv.name(), &r.game));
            revoke_checks(&mut out, &r, strategy == "honest-random-guess");
            out.transcripts = r.game.transcripts;
            out
        }
        Plan::Revprog { game, strategy, queries } => {
            let adv = program_adversary(&strategy, queries)?;
            let r = run_revprog(&game, adv.as_ref(), trials, seed)?;
            let mut out = Collected::new(json!({ "trivial_probability": game.trivial_probability(), "game": r }));
            out.results.push(ResultRecord::from_game("revprog", adv.name(), &r.game));
            revoke_checks(&mut out, &r, strategy == "honest-zero-guess");
            out.transcripts = r.game.transcripts;
            out
        }
        Plan::Pointfn { game, strategy } if strategy == "wkd-false-accept" => {
            let r = run_wkd_false_accept(&game.params, trials, seed)?;
            let mut out = Collected::new(to_value(&r));
            out.results.push(ResultRecord::new("wkd", "wrong-key", &r.false_accepts, 0.0));
            out.assertions.push(below("false-accept-below-bound", &r.false_accepts, r.bound));
            out
        }
        Plan::Pointfn { game, strategy } => {
            let adv = pointfn_adversary(&strategy)?;
            let r = run_pointfn(&game, adv.as_ref(), trials, seed)?;
            let trivial = game.trivial_probability();
            let bound = game.params.wkd_bound();
            let mut out = Collected::new(json!({ "trivial_probability": trivial, "wkd_bound": bound, "game": r }));
            out.results.push(ResultRecord::from_game("pointfn", adv.name(), &r.game));
            revoke_checks(&mut out, &r, strategy == "honest-return");
            if strategy == "wrong-key-decryptor" {
                out.assertions.push(below("wrong-key-within-trivial-plus-wkd", &r.game.estimate, trivial + bound));
            }
            out.transcripts = r.game.transcripts;
            out
        }
        Plan::Unforge { params, strategy, queries } => {
            let s = strategy_by_name(&strategy, queries)?;
            let g = run_unforgeability(&params, s.as_ref(), trials, seed)?;
            let exact = measure_and_guess_probability(&params);
            let mut out = Collected::new(json!({ "params": params, "measure_guess_exact": exact, "game": g }));
            out.results.push(ResultRecord::from_game("unforge", s.name(), &g));
            if params.k >= params.s {
                out.assertions.push(assertion("pigeonhole-zero", g.estimate.wins == 0, format!("{} wins", g.estimate.wins)));
            } else if strategy == "measure-guess" {
                out.assertions.push(calibrated("measure-guess-calibrated", &g.estimate, exact));
            }
            out.transcripts = g.transcripts;
            out
        }
        Plan::Classical { params, strategy, queries } => {
            let g = run_classical_unforgeability(&params, strategy, queries, trials, seed)?;
            let exact = classical_guess_probability(&params);
            let mut out = Collected::new(json!({ "params": params, "random_guess_exact": exact, "game": g }));
            out.results.push(ResultRecord::from_game("classical-unforge", format!("{strategy:?}"), &g));
            match strategy {
                _ if params.k >= params.s => {
                    out.assertions.push(assertion("pigeonhole-zero", g.estimate.wins == 0, format!("{} wins", g.estimate.wins)));
                }
                ClassicalStrategy::RandomGuess => out.assertions.push(calibrated("random-guess-calibrated", &g.estimate, exact)),
                ClassicalStrategy::Scan if queries >= 1u64 << params.n => out.assertions.push(assertion(
                    "full-scan-wins",
                    g.estimate.wins == g.estimate.trials,
                    format!("{}/{}", g.estimate.wins, g.estimate.trials),
                )),
                ClassicalStrategy::Scan => {}
            }
            out.transcripts = g.transcripts;
            out
        }
        Plan::Forge { params, strategy } => {
            let adv: Box<dyn ForgeAdversary> = match strategy.as_str() {
                "full-scan" => Box::new(HonestFullScan),
                _ => Box::new(NullPostPhase),
            };
            let g = run_forge_trials(&params, adv.as_ref(), trials, seed)?;
            let exact = full_scan_probability(&params);
            let mut out = Collected::new(json!({ "params": params, "full_scan_exact": exact, "game": g }));
            out.results.push(ResultRecord::from_game("forge", adv.name(), &g));
            if strategy == "full-scan" {
                out.assertions.push(calibrated("full-scan-calibrated", &g.estimate, exact));
            }
            out.transcripts = g.transcripts;
            out
        }
        Plan::RevencHybrids { params, strategy } => {
            let adv = revenc_adversary(&strategy)?;
            hybrid_output(revenc_hybrids(&params, adv.as_ref(), trials, seed)?)
        }
        Plan::UnforgeHybrids { params, distinguisher } => hybrid_output(unforge_hybrids(&params, distinguisher, trials, seed)?),
        Plan::Distinct(params) => {
            let r = check_distinct_extraction(&params, &mut seeded(seed))?;
            let holding = r.rows.iter().filter(|row| row.eval.holds()).count() as u64;
            let e = SuccessEstimate::from_counts(holding, r.rows.len() as u64);
            let mut out = Collected::new(to_value(&r));
            out.results.push(ResultRecord::new("distinct-extraction", "audit", &e, 0.0));
            out.assertions.push(assertion(
                "no-violations",
                r.passed(),
                format!("{} violations, min slack {:.3e}", r.violations, r.min_slack),
            ));
            out
        }
        Plan::Sponge {
            params,
            queries,
            strategies,
            forward,
            scale,
        } => {
            let mut points: Vec<AttackReport> = Vec::new();
            for &strategy in &strategies {
                for &t in &queries {
                    let config = AttackConfig {
                        params,
                        strategy,
                        queries: t,
                        allow_forward: forward,
                        bound_scale: scale,
                    };
                    points.push(run_attack(&config, trials, seed)?);
                }
            }
            let mut out = Collected::new(json!({
                "params": params,
                "bound_scale": scale,
                "points": points,
            }));
            for p in &points {
                out.results.push(ResultRecord::from_game(
                    format!("sponge/T={}", p.queries),
                    p.strategy.to_string(),
                    &p.game,
                ));
                if p.queries == 0 && p.strategy == AttackStrategy::RandomGuess {
                    out.assertions.push(calibrated("zero-query-guess-calibrated", &p.game.estimate, p.exact_guess_rate));
                }
            }
            let mut grid = queries.clone();
            grid.sort_unstable();
            let monotone = grid.windows(2).all(|w| bound_eval(&params, w[0], scale) <= bound_eval(&params, w[1], scale));
            out.assertions.push(assertion("bound-monotone", monotone, format!("over T = {grid:?}")));
            let supported: Vec<&AttackReport> = points.iter().filter(|p| !p.unsupported_by_theory).collect();
            let dominated = supported.iter().all(|p| p.game.estimate.p_hat <= p.bound + 1e-12);
            out.assertions.push(assertion(
                "bound-dominates-curves",
                dominated,
                format!("{} points inside the model", supported.len()),
            ));
            out.curve = points.iter().map(CurveRow::from).collect();
            for p in points {
                out.transcripts.extend(p.game.transcripts);
            }
            out
        }
    })
}

fn hybrid_output(table: HybridTable) -> Collected {
    let mut out = Collected::new(to_value(&table));
    for r in &table.rates {
        out.results.push(ResultRecord::new(
            format!("{}/{}", table.chain, r.hybrid),
            table.distinguisher.clone(),
            &r.estimate,
            0.0,
        ));
    }
    let identical: Vec<String> = table
        .pairs
        .iter()
        .filter(|p| p.identical)
        .map(|p| format!("{}~{}: {:+.4} ± {:.4}", p.left, p.right, p.advantage, p.std_error))
        .collect();
    out.assertions.push(assertion(
        "identical-pairs-zero-advantage",
        table.identical_pairs_pass(),
        identical.join(", "),
    ));
    out
}

/// SHA-256 of the deterministic parts of a run.
pub fn run_digest(results: &[ResultRecord], report: &Value, transcripts: &[GameTranscript]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(results).expect("results serialize"));
    h.update(b"\n");
    h.update(serde_json::to_vec(report).expect("report serializes"));
    h.update(b"\n");
    for t in transcripts {
        h.update(t.to_json_line().as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("experiment failed: {0}")]
    Core(#[from] revoqsim_core::Error),
}

pub fn dispatch(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let plan = plan(config)?;
    let start = Instant::now();
    let out = execute(config, plan)?;
    let digest = run_digest(&out.results, &out.report, &out.transcripts);
    let passed = out.assertions.iter().all(|a| a.passed);
    Ok(RunOutput {
        manifest: RunManifest {
            config: config.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_secs: start.elapsed().as_secs_f64(),
            results: out.results,
            report: out.report,
            assertions: out.assertions,
            passed,
            digest,
        },
        transcripts: out.transcripts,
        curve: out.curve,
    })
}
