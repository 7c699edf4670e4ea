//! Security games, adversary strategies, extractors and statistics.
//!
//! Every experiment runs `trials` independent trials through
//! [`crate::parallel`]. Within a trial the challenger and the adversary draw
//! from separate named streams, so swapping a strategy does not perturb the
//! challenger's randomness.

pub mod distinct;
pub mod forge;
pub mod hybrids;
pub mod o2h;
pub mod revoke_expt;
pub mod stats;
pub mod transcript;
pub mod unforge;
pub mod wkd;

pub use stats::{estimate, SuccessEstimate, Z95, Z_GATE};
pub use transcript::{mean_queries, transcript_digest, GameTranscript};

use rand::Rng;
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pointfn::WkdCiphertext;
use crate::qstate::{DenseState, SubsetState};

/// What a pre-revocation adversary carries into its post-revocation phase.
#[derive(Debug, Clone, Default)]
pub struct Aux {
    /// Registers kept back from the challenger.
    pub kept: Vec<DenseState>,
    /// Classical measurement outcomes.
    pub measured: Vec<u64>,
    /// Classical ciphertext data the adversary saw (pads, labels).
    pub classical: Vec<BitString>,
    /// A point-function ciphertext the adversary holds on to.
    pub wkd: Option<WkdCiphertext>,
}

/// Per-trial transcripts of one experiment with their summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameReport {
    pub estimate: SuccessEstimate,
    pub mean_queries: f64,
    pub digest: String,
    #[serde(skip)]
    pub transcripts: Vec<GameTranscript>,
}

impl GameReport {
    pub fn from_transcripts(transcripts: Vec<GameTranscript>) -> Self {
        let wins = transcripts.iter().filter(|t| t.win).count() as u64;
        Self {
            estimate: SuccessEstimate::from_counts(wins, transcripts.len() as u64),
            mean_queries: mean_queries(&transcripts),
            digest: transcript_digest(&transcripts),
            transcripts,
        }
    }
}

/// A uniformly random `s`-element subset of `{0,1}^n`.
pub fn random_subset<R: Rng + ?Sized>(n: u32, s: usize, rng: &mut R) -> Result<SubsetState> {
    if n == 0 || n > 30 {
        return Err(Error::param("n", format!("{n} outside 1..=30")));
    }
    let universe = 1usize << n;
    if s == 0 || s > universe {
        return Err(Error::param("s", format!("{s} outside 1..={universe}")));
    }
    let idx = rand::seq::index::sample(rng, universe, s);
    SubsetState::new(n, idx.into_iter().map(|i| i as u64))
}

/// Whether `xs` are pairwise distinct members of `set`.
pub fn distinct_members(xs: &[u64], set: &SubsetState) -> bool {
    let mut sorted = xs.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|w| w[0] != w[1]) && xs.iter().all(|&x| set.contains(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn random_subsets_have_the_right_size() {
        let mut rng = seeded(0);
        let s = random_subset(5, 7, &mut rng).unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(random_subset(3, 8, &mut rng).unwrap().len(), 8);
        assert!(random_subset(3, 9, &mut rng).is_err());
        assert!(random_subset(3, 0, &mut rng).is_err());
    }

    #[test]
    fn distinctness_predicate_exhaustive() {
        let set = SubsetState::new(4, [1, 5, 9]).unwrap();
        for a in 0..16u64 {
            for b in 0..16u64 {
                let expected = a != b && set.contains(a) && set.contains(b);
                assert_eq!(distinct_members(&[a, b], &set), expected);
            }
        }
    }
}
