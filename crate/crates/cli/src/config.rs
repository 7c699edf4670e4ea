//! Flat key-value configuration: a text file of `key = value` lines merged
//! with command-line flags, validated against per-experiment schemas before
//! anything runs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "REVOQSIM_SEED";

/// Seed used when neither a flag, the file, nor the environment sets one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("bad parameter `{field}`: {reason}")]
    BadParameter { field: String, reason: String },
}

impl ConfigError {
    pub fn bad(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::BadParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Maps a core validation error onto the field it names.
    pub fn from_core(err: revoqsim_core::Error) -> Self {
        match err {
            revoqsim_core::Error::InvalidParameter { name, reason } => ConfigError::bad(name, reason),
            other => ConfigError::bad("params", other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Revenc,
    Revprog,
    Pointfn,
    Unforge,
    Forge,
    HybridAudit,
    DistinctExtraction,
    Sponge,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Revenc,
        Experiment::Revprog,
        Experiment::Pointfn,
        Experiment::Unforge,
        Experiment::Forge,
        Experiment::HybridAudit,
        Experiment::DistinctExtraction,
        Experiment::Sponge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Revenc => "revenc",
            Experiment::Revprog => "revprog",
            Experiment::Pointfn => "pointfn",
            Experiment::Unforge => "unforge",
            Experiment::Forge => "forge",
            Experiment::HybridAudit => "hybrid-audit",
            Experiment::DistinctExtraction => "distinct-extraction",
            Experiment::Sponge => "sponge",
        }
    }

    /// Parameter keys, defaults and kinds.
    pub fn schema(self) -> &'static [Field] {
        match self {
            Experiment::Revenc => REVENC,
            Experiment::Revprog => REVPROG,
            Experiment::Pointfn => POINTFN,
            Experiment::Unforge => UNFORGE,
            Experiment::Forge => FORGE,
            Experiment::HybridAudit => HYBRID_AUDIT,
            Experiment::DistinctExtraction => DISTINCT,
            Experiment::Sponge => SPONGE,
        }
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::UnknownExperiment(s.to_string()))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// Integer in `min..=max`.
    Int { min: u64, max: u64 },
    Float { min: f64, max: f64 },
    Bool,
    Choice(&'static [&'static str]),
    /// Comma-separated integers.
    IntList { min: u64, max: u64 },
    /// Comma-separated choices.
    ChoiceList(&'static [&'static str]),
    /// Free text checked by the experiment itself.
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Field {
    pub key: &'static str,
    pub default: &'static str,
    pub kind: Kind,
}

const fn int(key: &'static str, default: &'static str, min: u64, max: u64) -> Field {
    Field {
        key,
        default,
        kind: Kind::Int { min, max },
    }
}

const fn choice(key: &'static str, default: &'static str, options: &'static [&'static str]) -> Field {
    Field {
        key,
        default,
        kind: Kind::Choice(options),
    }
}

const BACKENDS: &[&str] = &["keyed", "explicit"];
const REVENC_STRATEGIES: &[&str] = &["honest-random-guess", "keep-one-copy", "measure-one-copy"];

const REVENC: &[Field] = &[
    int("n", "2", 1, 16),
    int("m", "2", 1, 16),
    int("k", "2", 1, 8),
    choice("backend", "keyed", BACKENDS),
    choice("strategy", "honest-random-guess", REVENC_STRATEGIES),
    choice("variant", "ind", &["ind", "search", "hybrid-search"]),
];

const REVPROG: &[Field] = &[
    int("n", "2", 1, 16),
    int("m", "2", 1, 12),
    int("k", "1", 1, 8),
    choice("backend", "keyed", BACKENDS),
    choice("family", "point", &["point", "random"]),
    int("range-bits", "2", 1, 16),
    Field {
        key: "challenge-dist",
        default: "uniform",
        kind: Kind::Text,
    },
    choice("strategy", "honest-zero-guess", &["honest-zero-guess", "keep-one-copy", "oracle-scan"]),
    int("queries", "0", 0, 1 << 20),
];

const POINTFN: &[Field] = &[
    int("lambda", "2", 1, 16),
    // 0 means 4·lambda.
    int("ell", "0", 0, 64),
    int("n", "2", 1, 8),
    int("k", "1", 1, 4),
    choice("backend", "keyed", BACKENDS),
    Field {
        key: "challenge-dist",
        default: "uniform",
        kind: Kind::Text,
    },
    choice(
        "strategy",
        "honest-return",
        &["honest-return", "wrong-key-decryptor", "keep-one-copy", "wkd-false-accept"],
    ),
];

const UNFORGE: &[Field] = &[
    int("n", "8", 1, 20),
    int("s", "64", 1, 1 << 20),
    int("k", "2", 1, 8),
    choice("mode", "quantum", &["quantum", "classical"]),
    choice("strategy", "measure-guess", &["measure-guess", "membership-scan", "random-guess", "scan"]),
    int("queries", "0", 0, 1 << 20),
];

const FORGE: &[Field] = &[
    int("n", "2", 1, 10),
    int("m", "2", 1, 10),
    int("k", "1", 1, 4),
    choice("strategy", "full-scan", &["full-scan", "null"]),
];

const HYBRID_AUDIT: &[Field] = &[
    choice("chain", "revenc", &["revenc", "unforge"]),
    // 0 picks the chain default: 2 for revenc, 6 for unforge.
    int("n", "0", 0, 16),
    int("m", "2", 1, 8),
    int("k", "1", 1, 4),
    int("s", "8", 1, 1 << 16),
    int("t", "32", 1, 1 << 16),
    choice("strategy", "measure-one-copy", REVENC_STRATEGIES),
    choice("distinguisher", "probe", &["probe", "collision"]),
    int("q", "4", 0, 1 << 16),
];

const DISTINCT: &[Field] = &[
    int("n", "3", 1, 8),
    int("s", "4", 1, 256),
    int("k", "1", 1, 4),
    int("y-dim", "2", 1, 64),
    int("env-dim", "2", 1, 64),
    int("instances", "100", 0, 100_000),
];

const STRATEGIES: &[&str] = &["random-guess", "inverse-probe", "table-extend", "forward-probe"];

const SPONGE: &[Field] = &[
    int("r", "6", 1, 30),
    int("c", "6", 1, 34),
    int("table-size", "16", 0, 1 << 30),
    Field {
        key: "queries",
        default: "0,1,2,4,8,16",
        kind: Kind::IntList { min: 0, max: 1 << 24 },
    },
    Field {
        key: "strategy",
        default: "random-guess,inverse-probe,table-extend",
        kind: Kind::ChoiceList(STRATEGIES),
    },
    choice("backend", "explicit", BACKENDS),
    Field {
        key: "forward-access",
        default: "false",
        kind: Kind::Bool,
    },
    Field {
        key: "bound-scale",
        default: "1",
        kind: Kind::Float { min: 0.0, max: 1e12 },
    },
];

impl Field {
    fn check(&self, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: String| ConfigError::bad(self.key, reason);
        let int_in = |v: &str, min: u64, max: u64| -> Result<(), ConfigError> {
            let x: u64 = v.trim().parse().map_err(|_| bad(format!("`{v}` is not a non-negative integer")))?;
            if x < min || x > max {
                return Err(bad(format!("{x} outside {min}..={max}")));
            }
            Ok(())
        };
        match self.kind {
            Kind::Int { min, max } => int_in(value, min, max),
            Kind::Float { min, max } => {
                let x: f64 = value.parse().map_err(|_| bad(format!("`{value}` is not a number")))?;
                if !(min..=max).contains(&x) {
                    return Err(bad(format!("{x} outside [{min}, {max}]")));
                }
                Ok(())
            }
            Kind::Bool => match value {
                "true" | "false" => Ok(()),
                _ => Err(bad(format!("`{value}` is not true or false"))),
            },
            Kind::Choice(options) => {
                if options.contains(&value) {
                    Ok(())
                } else {
                    Err(bad(format!("`{value}` not one of {options:?}")))
                }
            }
            Kind::IntList { min, max } => {
                if value.trim().is_empty() {
                    return Err(bad("empty list".into()));
                }
                value.split(',').try_for_each(|v| int_in(v, min, max))
            }
            Kind::ChoiceList(options) => {
                if value.trim().is_empty() {
                    return Err(bad("empty list".into()));
                }
                for v in value.split(',') {
                    if !options.contains(&v.trim()) {
                        return Err(bad(format!("`{v}` not one of {options:?}")));
                    }
                }
                Ok(())
            }
            Kind::Text => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(ConfigError::bad("format", format!("`{other}` is not json or csv"))),
        }
    }
}

/// Where the seed came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Flag,
    File,
    Env,
    Default,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Every schema key, defaults filled in.
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub trials: u64,
    pub out: Option<PathBuf>,
    pub transcripts: Option<PathBuf>,
    pub format: Format,
}

/// Keys handled by the runner rather than the experiment.
const RESERVED: &[&str] = &["seed", "trials", "out", "transcripts", "format"];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::bad(format!("line {}", i + 1), format!("expected key = value, got `{line}`")))?;
        out.push((normalize_key(k), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses trailing command-line parameters: `--key value`, `--key=value`,
/// `key=value`, or a bare `--key` meaning `true`.
pub fn parse_param_tokens(tokens: &[String]) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        let body = tok.strip_prefix("--").unwrap_or(tok);
        if let Some((k, v)) = body.split_once('=') {
            out.push((normalize_key(k), v.to_string()));
        } else if tok.starts_with("--") {
            match tokens.get(i + 1) {
                Some(v) if !v.starts_with("--") => {
                    out.push((normalize_key(body), v.clone()));
                    i += 1;
                }
                _ => out.push((normalize_key(body), "true".into())),
            }
        } else {
            return Err(ConfigError::bad(tok.clone(), "expected --key value or key=value"));
        }
        i += 1;
    }
    Ok(out)
}

/// `table_size` and `table-size` name the same key.
pub fn normalize_key(k: &str) -> String {
    k.trim().replace('_', "-")
}

/// Merges defaults, file entries and flags (in increasing priority) and
/// validates the result.
pub fn build_config(
    experiment: &str,
    file: &[(String, String)],
    flags: &[(String, String)],
    env_seed: Option<&str>,
) -> Result<ExperimentConfig, ConfigError> {
    let experiment: Experiment = experiment.parse()?;
    let schema = experiment.schema();
    let mut params: BTreeMap<String, String> =
        schema.iter().map(|f| (f.key.to_string(), f.default.to_string())).collect();
    let mut reserved: BTreeMap<&str, (String, SeedSource)> = BTreeMap::new();
    for (entries, source) in [(file, SeedSource::File), (flags, SeedSource::Flag)] {
        for (k, v) in entries {
            let k = normalize_key(k);
            if let Some(r) = RESERVED.iter().find(|r| **r == k) {
                reserved.insert(r, (v.clone(), source));
            } else if let Some(slot) = params.get_mut(&k) {
                *slot = v.clone();
            } else {
                let known: Vec<&str> = schema.iter().map(|f| f.key).collect();
                return Err(ConfigError::bad(
                    k,
                    format!("not a parameter of `{experiment}` (expected one of {})", known.join(", ")),
                ));
            }
        }
    }
    for f in schema {
        f.check(&params[f.key])?;
    }

    let (seed, seed_source) = match (reserved.get("seed"), env_seed) {
        (Some((v, src)), _) => (parse_u64("seed", v)?, *src),
        (None, Some(v)) => (parse_u64("seed", v)?, SeedSource::Env),
        (None, None) => (DEFAULT_SEED, SeedSource::Default),
    };
    let trials = match reserved.get("trials") {
        Some((v, _)) => parse_u64("trials", v)?,
        None => DEFAULT_TRIALS,
    };
    if trials == 0 {
        return Err(ConfigError::bad("trials", "must be positive"));
    }
    let format = match reserved.get("format") {
        Some((v, _)) => v.parse()?,
        None => Format::Json,
    };
    let config = ExperimentConfig {
        experiment,
        params,
        seed,
        seed_source,
        trials,
        out: reserved.get("out").map(|(v, _)| PathBuf::from(v)),
        transcripts: reserved.get("transcripts").map(|(v, _)| PathBuf::from(v)),
        format,
    };
    crate::run::validate(&config)?;
    Ok(config)
}

fn parse_u64(field: &str, v: &str) -> Result<u64, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError::bad(field, format!("`{v}` is not a non-negative integer")))
}

impl ExperimentConfig {
    fn raw(&self, key: &str) -> &str {
        self.params
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("`{key}` is not in the {} schema", self.experiment))
    }

    pub fn text(&self, key: &str) -> &str {
        self.raw(key)
    }

    pub fn u64(&self, key: &str) -> u64 {
        self.raw(key).parse().expect("validated integer")
    }

    pub fn u32(&self, key: &str) -> u32 {
        self.u64(key) as u32
    }

    pub fn usize(&self, key: &str) -> usize {
        self.u64(key) as usize
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.raw(key).parse().expect("validated number")
    }

    pub fn flag(&self, key: &str) -> bool {
        self.raw(key) == "true"
    }

    pub fn list(&self, key: &str) -> Vec<&str> {
        self.raw(key).split(',').map(str::trim).collect()
    }

    /// Parses a core type from a text parameter.
    pub fn parsed<T>(&self, key: &str) -> Result<T, ConfigError>
    where
        T: FromStr<Err = revoqsim_core::Error>,
    {
        self.raw(key).parse().map_err(ConfigError::from_core)
    }

    /// The parameters as `key=value` pairs joined by `;`.
    pub fn params_line(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_and_seed_fallback() {
        let c = build_config("revenc", &[], &[], None).unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.seed_source, SeedSource::Default);
        assert_eq!(c.u32("n"), 2);
        let c = build_config("revenc", &[], &[], Some("9")).unwrap();
        assert_eq!((c.seed, c.seed_source), (9, SeedSource::Env));
    }

    #[test]
    fn zero_n_is_rejected_by_name() {
        let err = build_config("revenc", &[], &kv(&[("n", "0")]), None).unwrap_err();
        assert!(matches!(err, ConfigError::BadParameter { ref field, .. } if field == "n"));
    }

    #[test]
    fn flags_win_over_file() {
        let file = parse_kv("# comment\nn = 3\nseed=4\n\nk=1").unwrap();
        let c = build_config("revenc", &file, &kv(&[("n", "1"), ("seed", "7")]), Some("99")).unwrap();
        assert_eq!(c.u32("n"), 1);
        assert_eq!(c.u32("k"), 1);
        assert_eq!((c.seed, c.seed_source), (7, SeedSource::Flag));
    }

    #[test]
    fn unknown_names() {
        assert_eq!(
            build_config("teleport", &[], &[], None).unwrap_err(),
            ConfigError::UnknownExperiment("teleport".into())
        );
        let err = build_config("revenc", &[], &kv(&[("lambda", "2")]), None).unwrap_err();
        assert!(matches!(err, ConfigError::BadParameter { ref field, .. } if field == "lambda"));
    }

    #[test]
    fn token_forms() {
        let toks: Vec<String> = ["--n", "3", "--k=2", "seed=5", "--forward-access"].iter().map(|s| s.to_string()).collect();
        assert_eq!(
            parse_param_tokens(&toks).unwrap(),
            kv(&[("n", "3"), ("k", "2"), ("seed", "5"), ("forward-access", "true")])
        );
        assert!(parse_param_tokens(&["stray".to_string()]).is_err());
    }

    #[test]
    fn malformed_line() {
        assert!(matches!(parse_kv("n 3"), Err(ConfigError::BadParameter { .. })));
    }

    #[test]
    fn list_kinds() {
        let c = build_config("sponge", &[], &kv(&[("queries", "0, 4"), ("strategy", "table-extend")]), None).unwrap();
        assert_eq!(c.list("queries"), vec!["0", "4"]);
        assert!(build_config("sponge", &[], &kv(&[("strategy", "teleport")]), None).is_err());
        assert!(build_config("sponge", &[], &kv(&[("queries", "1,x")]), None).is_err());
    }

    #[test]
    fn underscore_keys() {
        let c = build_config("sponge", &[], &kv(&[("table_size", "8")]), None).unwrap();
        assert_eq!(c.u64("table-size"), 8);
    }
}
