//! Wrong-key false accepts: encrypt under `sk`, decrypt under a uniformly
//! chosen `sk′ ≠ sk`, and count how often the tag check passes.

use serde::Serialize;

use super::SuccessEstimate;
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::parallel::try_run_trials;
use crate::pointfn::{self, WkdParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WkdReport {
    pub params: WkdParams,
    pub false_accepts: SuccessEstimate,
    /// `2^{-ℓ}`: the wrong key always queries a fresh oracle point.
    pub analytic: f64,
    /// `2^{2λ′}/2^ℓ`.
    pub bound: f64,
}

pub fn run_wkd_false_accept(params: &WkdParams, trials: u64, seed: u64) -> Result<WkdReport> {
    params.revenc()?;
    if params.lambda == 0 {
        return Err(Error::param("lambda", "must be positive"));
    }
    let hits = try_run_trials(seed, trials, |ts| {
        let mut rng = ts.stream("challenger");
        let mut h = params.random_oracle(ts.stream("oracle"))?;
        let sk = BitString::random(params.lambda, &mut rng);
        let m = BitString::random(params.lambda, &mut rng);
        let (ct, _) = pointfn::wkd_encrypt(sk, m, &mut h, params, &mut rng)?;
        let mut other = BitString::random(params.lambda, &mut rng);
        while other == sk {
            other = BitString::random(params.lambda, &mut rng);
        }
        Ok::<_, Error>(pointfn::wkd_decrypt(other, &ct, &mut h, params, &mut rng)?.is_some())
    })?;
    let wins = hits.iter().filter(|&&h| h).count() as u64;
    Ok(WkdReport {
        params: *params,
        false_accepts: SuccessEstimate::from_counts(wins, trials),
        analytic: 2f64.powi(-(params.ell as i32)),
        bound: params.wkd_bound(),
    })
}
