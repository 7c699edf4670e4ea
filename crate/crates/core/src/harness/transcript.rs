use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::qstate::Outcome;

/// One seeded run of a game. Transcripts carry no timing data, so the same
/// `(seed, params, strategy)` always serializes to the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub experiment: String,
    pub seed: u64,
    pub trial: u64,
    pub params: serde_json::Value,
    pub strategy: String,
    /// Adversary oracle queries, by phase.
    pub queries: BTreeMap<String, u64>,
    pub revocation: Option<Outcome>,
    pub output: String,
    pub win: bool,
}

impl GameTranscript {
    pub fn total_queries(&self) -> u64 {
        self.queries.values().sum()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("transcripts serialize")
    }
}

/// SHA-256 over the JSON-lines encoding, in the given order.
pub fn transcript_digest(transcripts: &[GameTranscript]) -> String {
    let mut h = Sha256::new();
    for t in transcripts {
        h.update(t.to_json_line().as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Mean total adversary queries.
pub fn mean_queries(transcripts: &[GameTranscript]) -> f64 {
    if transcripts.is_empty() {
        return 0.0;
    }
    transcripts.iter().map(|t| t.total_queries() as f64).sum::<f64>() / transcripts.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(win: bool) -> GameTranscript {
        GameTranscript {
            experiment: "x".into(),
            seed: 1,
            trial: 0,
            params: serde_json::json!({"n": 2}),
            strategy: "s".into(),
            queries: BTreeMap::from([("post".to_string(), 3)]),
            revocation: Some(Outcome::Accept),
            output: "1".into(),
            win,
        }
    }

    #[test]
    fn digest_tracks_content() {
        let a = transcript_digest(&[sample(true)]);
        assert_eq!(a, transcript_digest(&[sample(true)]));
        assert_ne!(a, transcript_digest(&[sample(false)]));
        assert_eq!(mean_queries(&[sample(true), sample(false)]), 3.0);
    }
}
