//! Outage probability as a Gamma-mixture series.
//!
//! The joint CDF of the correlated per-round SNRs is a mixture, indexed by
//! `n = [n_1, ..., n_K]`, of products of independent Gamma CDFs with shapes
//! `n_k + 1` and scales `θ_k`:
//!
//! ```text
//! F(z) = Σ_n W_n Π_k P(n_k + 1, z_k / θ_k)
//! W_n  = 1/(1+S) · (Σ n_k)! / Π n_k! · Π (s_k / (1+S))^{n_k}
//! ```
//!
//! The layer `t = Σ n_k` sums to `(1-q) q^t` with `q = S/(1+S)`, so keeping
//! layers `0..=N` leaves a tail of at most `q^{N+1}`.
//!
//! Terms are enumerated layer by layer in lexicographic order and accumulated
//! with compensated summation, so results are reproducible bit for bit.

use crate::channel::{ChannelSpec, PowerProfile};
use crate::error::{Error, Result};
use crate::special_functions::{
    log_factorial, marcum_q1_complement, regularized_lower_gamma, GaussLaguerre,
};

/// Default limit on the number of series terms.
pub const DEFAULT_TERM_CAP: u64 = 10_000_000;

/// Environment variable that overrides [`DEFAULT_TERM_CAP`].
pub const TERM_CAP_ENV: &str = "HARQ_TERM_CAP";

/// Default node count of the quadrature oracle.
pub const DEFAULT_ORACLE_NODES: usize = 64;

/// Upper limit on the number of series terms a computation may evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermCap(pub u64);

impl Default for TermCap {
    fn default() -> Self {
        TermCap(DEFAULT_TERM_CAP)
    }
}

impl TermCap {
    /// Reads `HARQ_TERM_CAP`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TERM_CAP_ENV) {
            Ok(raw) => raw.trim().parse::<u64>().map(TermCap).map_err(|_| {
                Error::InvalidParameter(format!("{TERM_CAP_ENV} must be a positive integer, got {raw:?}"))
            }),
            Err(_) => Ok(Self::default()),
        }
    }

    fn check(self, required: u128) -> Result<()> {
        if required > self.0 as u128 {
            Err(Error::TermCap { required, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

/// Series index `n = [n_1, ..., n_K]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixtureIndex {
    entries: Vec<u64>,
}

impl MixtureIndex {
    pub fn new(entries: Vec<u64>) -> Self {
        Self { entries }
    }

    pub fn zero(rounds: usize) -> Self {
        Self { entries: vec![0; rounds] }
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn rounds(&self) -> usize {
        self.entries.len()
    }

    /// `t = Σ n_k`.
    pub fn layer(&self) -> u64 {
        self.entries.iter().sum()
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = match c.checked_mul(n as u128 - k as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    c
}

/// Number of indices with `K` parts in layer `t`: `C(t+K-1, K-1)`.
pub fn layer_size(rounds: usize, t: u64) -> u128 {
    binomial(t + rounds as u64 - 1, rounds as u64 - 1)
}

/// Number of indices in layers `0..=order`: `C(order+K, K)`.
pub fn terms_through_order(rounds: usize, order: u64) -> u128 {
    binomial(order + rounds as u64, rounds as u64)
}

/// Calls `visit` with every composition of `total` into `parts` nonnegative
/// parts, in lexicographic order.
pub fn for_each_composition(parts: usize, total: u64, mut visit: impl FnMut(&[u64])) {
    fn recurse(buf: &mut [u64], pos: usize, remaining: u64, visit: &mut dyn FnMut(&[u64])) {
        if pos + 1 == buf.len() {
            buf[pos] = remaining;
            visit(buf);
            return;
        }
        for v in 0..=remaining {
            buf[pos] = v;
            recurse(buf, pos + 1, remaining - v, visit);
        }
    }
    if parts == 0 {
        return;
    }
    let mut buf = vec![0; parts];
    recurse(&mut buf, 0, total, &mut visit);
}

/// All indices of layer `t`, in lexicographic order.
pub fn compositions(parts: usize, total: u64) -> Vec<MixtureIndex> {
    let mut out = Vec::new();
    for_each_composition(parts, total, |n| out.push(MixtureIndex::new(n.to_vec())));
    out
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn check_index(spec: &ChannelSpec, index: &MixtureIndex) -> Result<()> {
    if index.rounds() != spec.rounds() {
        return Err(Error::InvalidParameter(format!(
            "mixture index has {} entries, channel has K = {}",
            index.rounds(),
            spec.rounds()
        )));
    }
    Ok(())
}

/// `n · ln x`, treating `0 · ln 0` as zero.
fn n_log(n: u64, log_x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * log_x
    }
}

fn log_ratios(spec: &ChannelSpec) -> (f64, Vec<f64>) {
    let one_plus_s = 1.0 + spec.total_load();
    let ratios = (0..spec.rounds()).map(|i| (spec.load(i) / one_plus_s).ln()).collect();
    (one_plus_s.ln(), ratios)
}

/// Mixture weight `W_n`, evaluated in the log domain.
pub fn weight(spec: &ChannelSpec, index: &MixtureIndex) -> Result<f64> {
    check_index(spec, index)?;
    let (log_norm, log_ratio) = log_ratios(spec);
    let mut log_w = -log_norm + log_factorial(index.layer());
    for (&n, &lr) in index.entries().iter().zip(&log_ratio) {
        log_w += n_log(n, lr) - log_factorial(n);
    }
    Ok(log_w.exp().min(1.0))
}

/// Joint CDF `Π_k P(n_k + 1, z_k / θ_k)` of independent Gamma variables.
pub fn gamma_mixture_cdf(
    spec: &ChannelSpec,
    power: &PowerProfile,
    index: &MixtureIndex,
    z: &[f64],
) -> Result<f64> {
    check_index(spec, index)?;
    spec.check_power(power)?;
    check_thresholds(spec, z)?;
    let mut prod = 1.0;
    for (i, (&n, &zk)) in index.entries().iter().zip(z).enumerate() {
        prod *= regularized_lower_gamma(n + 1, zk / spec.scale(power, i))?;
    }
    Ok(prod)
}

fn check_thresholds(spec: &ChannelSpec, z: &[f64]) -> Result<()> {
    if z.len() != spec.rounds() {
        return Err(Error::InvalidParameter(format!(
            "threshold vector has {} entries, channel has K = {}",
            z.len(),
            spec.rounds()
        )));
    }
    if let Some(bad) = z.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::Domain(format!("thresholds must be finite and >= 0, got {bad}")));
    }
    Ok(())
}

/// Truncated series value with its certified tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedOutage {
    /// Partial sum over layers `0..=order`; a lower bound on the exact value.
    pub value: f64,
    pub order: u64,
    /// `q^{order+1}`; the exact value lies in `[value, value + bound]`.
    pub bound: f64,
    pub terms_evaluated: u128,
}

/// Tail bound `q^{order+1}`.
pub fn truncation_bound(spec: &ChannelSpec, order: u64) -> f64 {
    spec.layer_ratio().powf(order as f64 + 1.0)
}

/// Truncated joint CDF `Σ_{t<=order} Σ_{|n|=t} W_n F_n(z)` at an arbitrary
/// threshold vector.
pub fn joint_cdf_truncated(
    spec: &ChannelSpec,
    power: &PowerProfile,
    z: &[f64],
    order: u64,
    cap: TermCap,
) -> Result<TruncatedOutage> {
    spec.check_power(power)?;
    check_thresholds(spec, z)?;
    let rounds = spec.rounds();
    let terms = terms_through_order(rounds, order);
    cap.check(terms)?;

    let max_n = order as usize;
    let log_fact: Vec<f64> = (0..=order).map(log_factorial).collect();
    let (log_norm, log_ratio) = log_ratios(spec);

    // Per-round factor of every term: n ln r_k - ln n! + ln P(n+1, z_k/θ_k).
    let mut factors = vec![vec![0.0; max_n + 1]; rounds];
    for (i, row) in factors.iter_mut().enumerate() {
        let x = z[i] / spec.scale(power, i);
        for (n, slot) in row.iter_mut().enumerate() {
            let n = n as u64;
            let ln_cdf = regularized_lower_gamma(n + 1, x)?.ln();
            *slot = n_log(n, log_ratio[i]) - log_fact[n as usize] + ln_cdf;
        }
    }

    let mut total = CompensatedSum::default();
    for t in 0..=order {
        let base = -log_norm + log_fact[t as usize];
        let mut layer = CompensatedSum::default();
        layer_terms(&factors, t, base, &mut |log_term| layer.add(log_term.exp()));
        total.add(layer.value());
    }

    Ok(TruncatedOutage {
        value: total.value().clamp(0.0, 1.0),
        order,
        bound: truncation_bound(spec, order),
        terms_evaluated: terms,
    })
}

/// Visits the log of every term in layer `t`, accumulating per-round factors
/// along the lexicographic recursion.
fn layer_terms(factors: &[Vec<f64>], t: u64, base: f64, emit: &mut dyn FnMut(f64)) {
    fn recurse(factors: &[Vec<f64>], pos: usize, remaining: u64, acc: f64, emit: &mut dyn FnMut(f64)) {
        let row = &factors[pos];
        if pos + 1 == factors.len() {
            emit(acc + row[remaining as usize]);
            return;
        }
        for v in 0..=remaining {
            recurse(factors, pos + 1, remaining - v, acc + row[v as usize], emit);
        }
    }
    recurse(factors, 0, t, base, emit);
}

/// Outage probability truncated at `order`, with the default term cap.
pub fn outage_truncated(spec: &ChannelSpec, power: &PowerProfile, order: u64) -> Result<TruncatedOutage> {
    outage_truncated_with_cap(spec, power, order, TermCap::default())
}

/// Outage probability `F(2^R-1, ..., 2^R-1)` truncated at `order`.
pub fn outage_truncated_with_cap(
    spec: &ChannelSpec,
    power: &PowerProfile,
    order: u64,
    cap: TermCap,
) -> Result<TruncatedOutage> {
    let z = vec![spec.snr_threshold(); spec.rounds()];
    joint_cdf_truncated(spec, power, &z, order, cap)
}

/// Smallest order `N` with `q^{N+1} <= target_eps`.
pub fn choose_truncation(spec: &ChannelSpec, target_eps: f64) -> Result<u64> {
    if !(target_eps > 0.0 && target_eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target error must lie in (0, 1), got {target_eps}"
        )));
    }
    let q = spec.layer_ratio();
    if q == 0.0 {
        return Ok(0);
    }
    let guess = (target_eps.ln() / q.ln()).ceil() - 1.0;
    let mut n = guess.max(0.0) as u64;
    while n > 0 && q.powf(n as f64) <= target_eps {
        n -= 1;
    }
    while q.powf(n as f64 + 1.0) > target_eps {
        n += 1;
    }
    Ok(n)
}

/// Outage truncated at the order certified by `target_eps`.
pub fn outage_certified(
    spec: &ChannelSpec,
    power: &PowerProfile,
    target_eps: f64,
    cap: TermCap,
) -> Result<TruncatedOutage> {
    let order = choose_truncation(spec, target_eps)?;
    outage_truncated_with_cap(spec, power, order, cap)
}

/// `Σ_{|n|=t} W_n` by explicit enumeration; equals `(1-q) q^t`.
pub fn layer_weight_sum(spec: &ChannelSpec, t: u64, cap: TermCap) -> Result<f64> {
    cap.check(layer_size(spec.rounds(), t))?;
    let (log_norm, log_ratio) = log_ratios(spec);
    let base = -log_norm + log_factorial(t);
    let mut sum = CompensatedSum::default();
    for_each_composition(spec.rounds(), t, |n| {
        let mut log_w = base;
        for (&nk, &lr) in n.iter().zip(&log_ratio) {
            log_w += n_log(nk, lr) - log_factorial(nk);
        }
        sum.add(log_w.exp());
    });
    Ok(sum.value())
}

/// Independent check on the series: conditional on the anchor power
/// `|h_0|² = t ~ Exp(1)` the rounds are independent Rice variables, so
///
/// ```text
/// F(z) = ∫_0^∞ e^{-t} Π_k [1 - Q1(sqrt(2 s_k t), sqrt(2 z_k / θ_k))] dt
/// ```
///
/// which is integrated with an `nodes`-point Gauss–Laguerre rule.
pub fn joint_cdf_quadrature(
    spec: &ChannelSpec,
    power: &PowerProfile,
    z: &[f64],
    nodes: usize,
) -> Result<f64> {
    if nodes < 8 {
        return Err(Error::InvalidParameter(format!("oracle needs at least 8 nodes, got {nodes}")));
    }
    spec.check_power(power)?;
    check_thresholds(spec, z)?;
    let rule = GaussLaguerre::new(nodes)?;
    let rounds: Vec<(f64, f64)> = (0..spec.rounds())
        .map(|i| (2.0 * spec.load(i), (2.0 * z[i] / spec.scale(power, i)).sqrt()))
        .collect();
    let mut sum = CompensatedSum::default();
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        let mut prod = 1.0;
        for &(two_s, b) in &rounds {
            prod *= marcum_q1_complement((two_s * t).sqrt(), b)?;
        }
        sum.add(w * prod);
    }
    Ok(sum.value().clamp(0.0, 1.0))
}

/// Quadrature oracle for the outage probability.
pub fn outage_quadrature_oracle(spec: &ChannelSpec, power: &PowerProfile, nodes: usize) -> Result<f64> {
    let z = vec![spec.snr_threshold(); spec.rounds()];
    joint_cdf_quadrature(spec, power, &z, nodes)
}
