//! Monte Carlo simulation of HARQ episodes over the correlated channel.
//!
//! Each episode draws `h_0, w_1, ..., w_K ~ CN(0, 1)`, builds the channel
//! coefficients and counts an outage when every round's SNR falls below
//! `2^R - 1`.
//!
//! Work is split into `streams` fixed substreams. Stream `i` draws from a
//! ChaCha generator keyed by `seed` on stream id `i`, so an estimate is a
//! pure function of `(spec, power, config)` whatever the thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSpec, PowerProfile};
use crate::error::{Error, Result};

/// Below `RARE_EVENT_FAILURES / samples` the normal-approximation interval
/// is not trustworthy.
pub const RARE_EVENT_FAILURES: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCConfig {
    pub samples: u64,
    pub seed: u64,
    pub streams: u32,
}

impl MCConfig {
    pub fn new(samples: u64, seed: u64, streams: u32) -> Result<Self> {
        let cfg = Self { samples, seed, streams };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("mc.samples must be >= 1".into()));
        }
        if self.streams == 0 {
            return Err(Error::InvalidParameter("mc.streams must be >= 1".into()));
        }
        Ok(())
    }

    /// Episodes assigned to stream `i`; the remainder goes to the first streams.
    fn stream_samples(&self, i: u32) -> u64 {
        let streams = self.streams as u64;
        self.samples / streams + u64::from((i as u64) < self.samples % streams)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub samples: u64,
    pub failures: u64,
}

impl MCEstimate {
    pub fn from_counts(failures: u64, samples: u64) -> Self {
        let n = samples as f64;
        let p_hat = failures as f64 / n;
        let stderr = (p_hat * (1.0 - p_hat) / n).sqrt();
        Self { p_hat, stderr, samples, failures }
    }

    /// Fewer than 100 expected outages: the estimate and its interval are
    /// unreliable.
    pub fn rare_event(&self) -> bool {
        self.p_hat < RARE_EVENT_FAILURES / self.samples as f64
    }

    /// `|p_hat - reference| <= sigmas · stderr`.
    pub fn agrees_with(&self, reference: f64, sigmas: f64) -> bool {
        (self.p_hat - reference).abs() <= sigmas * self.stderr
    }
}

/// Pre-computed per-round mixing coefficients.
struct RoundMix {
    anchor: f64,
    innovation: f64,
    power: f64,
}

fn round_mix(spec: &ChannelSpec, power: &PowerProfile) -> Vec<RoundMix> {
    (0..spec.rounds())
        .map(|i| {
            let sigma = spec.sigma_sq()[i].sqrt();
            let c = spec.corr(i);
            RoundMix {
                anchor: c.sqrt() * sigma,
                innovation: (1.0 - c).sqrt() * sigma,
                power: power.power_of(i),
            }
        })
        .collect()
}

/// One `CN(0, 1)` draw as `(re, im)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    (re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
}

fn channel_into<R: Rng + ?Sized>(mix: &[RoundMix], rng: &mut R, out: &mut Vec<(f64, f64)>) {
    out.clear();
    let h0 = complex_normal(rng);
    for m in mix {
        let w = complex_normal(rng);
        out.push((m.anchor * h0.0 + m.innovation * w.0, m.anchor * h0.1 + m.innovation * w.1));
    }
}

/// Channel coefficients `h_1, ..., h_K` of one episode, as `(re, im)`.
pub fn sample_channel<R: Rng + ?Sized>(spec: &ChannelSpec, rng: &mut R) -> Vec<(f64, f64)> {
    let unit = PowerProfile::full_each_round(spec.rounds(), 1.0).expect("unit power is valid");
    let mut out = Vec::with_capacity(spec.rounds());
    channel_into(&round_mix(spec, &unit), rng, &mut out);
    out
}

/// Per-round SNRs `γ_k = P_k |h_k|²` of one episode.
pub fn sample_episode<R: Rng + ?Sized>(
    spec: &ChannelSpec,
    power: &PowerProfile,
    rng: &mut R,
) -> Result<Vec<f64>> {
    spec.check_power(power)?;
    let mix = round_mix(spec, power);
    let mut h = Vec::with_capacity(spec.rounds());
    channel_into(&mix, rng, &mut h);
    Ok(mix.iter().zip(&h).map(|(m, &(re, im))| m.power * (re * re + im * im)).collect())
}

/// Generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn count_failures(mix: &[RoundMix], threshold: f64, episodes: u64, rng: &mut ChaCha8Rng) -> u64 {
    let mut h = Vec::with_capacity(mix.len());
    let mut failures = 0;
    for _ in 0..episodes {
        channel_into(mix, rng, &mut h);
        let outage = mix
            .iter()
            .zip(&h)
            .all(|(m, &(re, im))| m.power * (re * re + im * im) < threshold);
        failures += u64::from(outage);
    }
    failures
}

/// Empirical outage probability with its normal-approximation standard error.
pub fn estimate_outage(spec: &ChannelSpec, power: &PowerProfile, mc: &MCConfig) -> Result<MCEstimate> {
    spec.check_power(power)?;
    mc.validate()?;
    let mix = round_mix(spec, power);
    let threshold = spec.snr_threshold();
    let failures: u64 = (0..mc.streams)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(mc.seed, i);
            count_failures(&mix, threshold, mc.stream_samples(i), &mut rng)
        })
        .sum();
    Ok(MCEstimate::from_counts(failures, mc.samples))
}
