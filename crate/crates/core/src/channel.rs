//! Exponentially time-correlated Rayleigh channel and per-round transmit powers.
//!
//! Round `k` sees `h_k = ρ^{k+δ-1} σ_k h_0 + sqrt(1-ρ^{2(k+δ-1)}) σ_k w_k`
//! with `h_0, w_1, ..., w_K ~ CN(0, 1)` and unit-variance receiver noise, so
//! all powers are SNR-scaled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts a power in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Model parameters of the correlated channel and the packet rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    rounds: usize,
    rho: f64,
    delta: f64,
    sigma_sq: Vec<f64>,
    rate: f64,
}

impl ChannelSpec {
    pub fn new(rounds: usize, rho: f64, delta: f64, sigma_sq: Vec<f64>, rate: f64) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::InvalidParameter("K must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidParameter(format!(
                "rho must satisfy 0 ≤ ρ < 1, got {rho}"
            )));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta must satisfy δ > 0, got {delta}"
            )));
        }
        if sigma_sq.len() != rounds {
            return Err(Error::InvalidParameter(format!(
                "sigma_sq needs K = {rounds} entries, got {}",
                sigma_sq.len()
            )));
        }
        if let Some(bad) = sigma_sq.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_sq entries must be > 0, got {bad}"
            )));
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!("rate must satisfy R > 0, got {rate}")));
        }
        Ok(Self { rounds, rho, delta, sigma_sq, rate })
    }

    /// Unit channel gains and `δ = 1`.
    pub fn with_unit_gains(rounds: usize, rho: f64, rate: f64) -> Result<Self> {
        Self::new(rounds, rho, 1.0, vec![1.0; rounds], rate)
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sigma_sq(&self) -> &[f64] {
        &self.sigma_sq
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn check_round(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.rounds {
            return Err(Error::IndexOutOfRange { index: k, rounds: self.rounds });
        }
        Ok(k - 1)
    }

    /// `ρ^{2(k+δ-1)}` for 0-based round `i`.
    pub(crate) fn corr(&self, i: usize) -> f64 {
        self.rho.powf(2.0 * (i as f64 + self.delta))
    }

    pub(crate) fn load(&self, i: usize) -> f64 {
        let c = self.corr(i);
        c / (1.0 - c)
    }

    /// `ρ^{2(k+δ-1)}` for round `k` in `1..=K`.
    pub fn correlation_exponent(&self, k: usize) -> Result<f64> {
        Ok(self.corr(self.check_round(k)?))
    }

    /// `s_k = ρ^{2(k+δ-1)} / (1 - ρ^{2(k+δ-1)})`.
    pub fn correlation_load(&self, k: usize) -> Result<f64> {
        Ok(self.load(self.check_round(k)?))
    }

    /// `S = Σ_k s_k`.
    pub fn total_load(&self) -> f64 {
        (0..self.rounds).map(|i| self.load(i)).sum()
    }

    /// Geometric ratio `q = S/(1+S)` of the mixture layer weights.
    pub fn layer_ratio(&self) -> f64 {
        let s = self.total_load();
        s / (1.0 + s)
    }

    /// Per-round outage threshold `2^R - 1`.
    pub fn snr_threshold(&self) -> f64 {
        self.rate.exp2() - 1.0
    }

    pub(crate) fn scale(&self, power: &PowerProfile, i: usize) -> f64 {
        power.power_of(i) * self.sigma_sq[i] * (1.0 - self.corr(i))
    }

    /// Gamma scale `θ_k = P_k σ_k² (1 - ρ^{2(k+δ-1)})` of round `k`.
    pub fn gamma_scale(&self, power: &PowerProfile, k: usize) -> Result<f64> {
        self.check_power(power)?;
        Ok(self.scale(power, self.check_round(k)?))
    }

    pub fn check_power(&self, power: &PowerProfile) -> Result<()> {
        if power.fractions.len() != self.rounds {
            return Err(Error::InvalidParameter(format!(
                "power profile has {} rounds, channel has K = {}",
                power.fractions.len(),
                self.rounds
            )));
        }
        Ok(())
    }
}

/// Total power `P_T` and per-round fractions, `P_k = p_k P_T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    p_total: f64,
    fractions: Vec<f64>,
}

impl PowerProfile {
    pub fn new(p_total: f64, fractions: Vec<f64>) -> Result<Self> {
        if !(p_total > 0.0) || !p_total.is_finite() {
            return Err(Error::InvalidParameter(format!("P_T must be > 0, got {p_total}")));
        }
        if fractions.is_empty() {
            return Err(Error::InvalidParameter("power fractions must be nonempty".into()));
        }
        for &p in &fractions {
            if !(p > 0.0) || !(p * p_total).is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "power fractions must be > 0 with finite P_k, got {p}"
                )));
            }
        }
        Ok(Self { p_total, fractions })
    }

    /// Every round transmits at the full power `P_T`.
    pub fn full_each_round(rounds: usize, p_total: f64) -> Result<Self> {
        Self::new(p_total, vec![1.0; rounds])
    }

    pub fn from_db(p_total_db: f64, fractions: Vec<f64>) -> Result<Self> {
        Self::new(db_to_linear(p_total_db), fractions)
    }

    pub fn p_total(&self) -> f64 {
        self.p_total
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub(crate) fn power_of(&self, i: usize) -> f64 {
        self.fractions[i] * self.p_total
    }

    /// Same fractions at a different total power.
    pub fn with_total(&self, p_total: f64) -> Result<Self> {
        Self::new(p_total, self.fractions.clone())
    }
}
