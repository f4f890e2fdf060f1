//! High-SNR behaviour of the outage probability.
//!
//! As `P_T → ∞` only the `n = 0` mixture term survives and
//!
//! ```text
//! P_out ≈ (2^R - 1)^K · Π_k 1/(P_k σ_k²) · 1/ℓ(ρ, K)
//! ℓ(ρ, K) = (1 + Σ_k s_k) · Π_k (1 - ρ^{2(k+δ-1)})
//! ```
//!
//! The three factors isolate the rate, the transmit powers and the time
//! correlation. `ℓ` is at most one and falls as `ρ` grows, so correlation
//! raises the high-SNR outage while the diversity order stays `K`.

use serde::Serialize;

use crate::channel::{ChannelSpec, PowerProfile};
use crate::error::{Error, Result};

/// Correlation penalty `ℓ(ρ, K)`.
///
/// Expanded as `Π_j (1-x_j) + Σ_k x_k Π_{j≠k} (1-x_j)` with
/// `x_k = ρ^{2(k+δ-1)}`, which avoids dividing by `1 - x_k` and keeps
/// `ℓ(ρ, 1) = 1` exact.
pub fn ell(spec: &ChannelSpec) -> f64 {
    let corr: Vec<f64> = (0..spec.rounds()).map(|i| spec.corr(i)).collect();
    let complement_product = |skip: Option<usize>| -> f64 {
        corr.iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != skip)
            .map(|(_, x)| 1.0 - x)
            .product()
    };
    let mut total = complement_product(None);
    for (k, x) in corr.iter().enumerate() {
        total += x * complement_product(Some(k));
    }
    total
}

/// The rate, power and correlation factors of the asymptotic outage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticBreakdown {
    /// `(2^R - 1)^K`
    pub term_a: f64,
    /// `Π_k 1/(P_k σ_k²)`
    pub term_b: f64,
    /// `1/ℓ(ρ, K)`
    pub term_c: f64,
    pub product: f64,
}

pub fn breakdown(spec: &ChannelSpec, power: &PowerProfile) -> Result<AsymptoticBreakdown> {
    spec.check_power(power)?;
    let term_a = spec.snr_threshold().powi(spec.rounds() as i32);
    let term_b: f64 = (0..spec.rounds())
        .map(|i| 1.0 / (power.power_of(i) * spec.sigma_sq()[i]))
        .product();
    let term_c = 1.0 / ell(spec);
    Ok(AsymptoticBreakdown { term_a, term_b, term_c, product: term_a * term_b * term_c })
}

/// Asymptotic outage `A · B · C`. Exceeds one at low SNR, where it is not
/// meaningful.
pub fn outage_asymptotic(spec: &ChannelSpec, power: &PowerProfile) -> Result<f64> {
    Ok(breakdown(spec, power)?.product)
}

/// Leading mixture term in closed form, `W_0 · Π_k z_k/θ_k`. Algebraically
/// identical to [`outage_asymptotic`]; computed along the other route.
pub fn asymptotic_leading_with_w0(spec: &ChannelSpec, power: &PowerProfile) -> Result<f64> {
    spec.check_power(power)?;
    let w0 = 1.0 / (1.0 + spec.total_load());
    let z = spec.snr_threshold();
    let prod: f64 = (0..spec.rounds()).map(|i| z / spec.scale(power, i)).product();
    Ok(w0 * prod)
}

/// Diversity estimate: the negated least-squares slope of `ln P_out`
/// against `ln P_T`.
pub fn diversity_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Degenerate(format!(
            "slope needs at least 2 points, got {}",
            points.len()
        )));
    }
    for &(p, out) in points {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Degenerate(format!("powers must be positive, got {p}")));
        }
        if !(out > 0.0 && out < 1.0) {
            return Err(Error::Degenerate(format!("outage values must lie in (0, 1), got {out}")));
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let mut distinct = xs.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() != xs.len() || sxx == 0.0 {
        return Err(Error::Degenerate("powers must be distinct".into()));
    }
    Ok(-sxy / sxx)
}
