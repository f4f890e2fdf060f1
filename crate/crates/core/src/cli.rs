//! Command implementations behind the `harq-outage` binary.
//!
//! Every command takes a parsed [`Config`] and returns the rendered output
//! as a string, so the binary only handles arguments and I/O. CSV output is
//! comma separated with 17 significant digits and `#` metadata lines; it is
//! byte-identical across runs for a fixed config and seed.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{breakdown, diversity_slope, ell, AsymptoticBreakdown};
use crate::channel::{db_to_linear, ChannelSpec, PowerProfile};
use crate::error::Error;
use crate::monte_carlo::{estimate_outage, MCConfig, MCEstimate};
use crate::series::{choose_truncation, outage_truncated_with_cap, TermCap};

/// Header of `sweep` (and `outage`) CSV output.
pub const SWEEP_HEADER: &str =
    "p_total_db,outage_series,bound,n_used,outage_asymptotic,mc_p_hat,mc_stderr";

const DEFAULT_EPS: f64 = 1e-9;
const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

/// Errors surfaced by the command line, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::TermCap { .. } => CliError::Resource(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_mc_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_streams")]
    pub streams: u32,
}

fn default_mc_samples() -> u64 {
    DEFAULT_MC_SAMPLES
}

fn default_streams() -> u32 {
    1
}

fn default_delta() -> f64 {
    1.0
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

impl Default for McSection {
    fn default() -> Self {
        Self { samples: DEFAULT_MC_SAMPLES, seed: 0, streams: 1 }
    }
}

/// JSON experiment description shared by all subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(rename = "K")]
    pub rounds: usize,
    pub rho: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub sigma_sq: Option<Vec<f64>>,
    #[serde(alias = "R")]
    pub rate: f64,
    #[serde(default)]
    pub p_fractions: Option<Vec<f64>>,
    #[serde(default, alias = "P_T_dB")]
    pub p_total_db: Option<f64>,
    #[serde(default)]
    pub db_grid: Option<Vec<f64>>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Fixed truncation order; overrides `eps` when present.
    #[serde(default)]
    pub order: Option<u64>,
    #[serde(default)]
    pub mc: Option<McSection>,
    /// Orders for `truncation-study`.
    #[serde(default)]
    pub n_list: Option<Vec<u64>>,
    /// Round counts for `ell-study`.
    #[serde(default)]
    pub k_list: Option<Vec<usize>>,
    /// Correlation grid for `ell-study`.
    #[serde(default)]
    pub rho_grid: Option<Vec<f64>>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config JSON: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Replaces the Monte Carlo seed, creating a default MC section if needed.
    pub fn override_seed(&mut self, seed: u64) {
        self.mc.get_or_insert_with(McSection::default).seed = seed;
    }

    pub fn channel(&self) -> Result<ChannelSpec, CliError> {
        let sigma_sq = self.sigma_sq.clone().unwrap_or_else(|| vec![1.0; self.rounds]);
        Ok(ChannelSpec::new(self.rounds, self.rho, self.delta, sigma_sq, self.rate)?)
    }

    fn fractions(&self) -> Result<Vec<f64>, CliError> {
        let fr = self.p_fractions.clone().unwrap_or_else(|| vec![1.0; self.rounds]);
        if fr.len() != self.rounds {
            return Err(CliError::Config(format!(
                "p_fractions needs K = {} entries, got {}",
                self.rounds,
                fr.len()
            )));
        }
        Ok(fr)
    }

    pub fn power_at_db(&self, db: f64) -> Result<PowerProfile, CliError> {
        if !db.is_finite() {
            return Err(CliError::Config(format!("power in dB must be finite, got {db}")));
        }
        Ok(PowerProfile::new(db_to_linear(db), self.fractions()?)?)
    }

    fn check_eps(&self) -> Result<(), CliError> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(CliError::Config(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        Ok(())
    }

    fn single_db(&self) -> Result<f64, CliError> {
        match (self.p_total_db, self.db_grid.as_deref()) {
            (Some(db), _) => Ok(db),
            (None, Some([db])) => Ok(*db),
            _ => Err(CliError::Config("p_total_db is required".into())),
        }
    }

    fn grid(&self) -> Result<Vec<f64>, CliError> {
        let grid = match (&self.db_grid, self.p_total_db) {
            (Some(g), _) => g.clone(),
            (None, Some(db)) => vec![db],
            (None, None) => return Err(CliError::Config("db_grid is required".into())),
        };
        if grid.is_empty() {
            return Err(CliError::Config("db_grid must be nonempty".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Config("db_grid must be strictly ascending".into()));
        }
        Ok(grid)
    }

    fn mc_config(&self, point: usize) -> Result<Option<MCConfig>, CliError> {
        self.mc
            .map(|m| Ok(MCConfig::new(m.samples, point_seed(m.seed, point), m.streams)?))
            .transpose()
    }

    fn truncation_order(&self, spec: &ChannelSpec) -> Result<u64, CliError> {
        match self.order {
            Some(n) => Ok(n),
            None => {
                self.check_eps()?;
                Ok(choose_truncation(spec, self.eps)?)
            }
        }
    }

    fn metadata(&self) -> String {
        let mut m = format!(
            "# K={} rho={} delta={} rate={}",
            self.rounds, self.rho, self.delta, self.rate
        );
        match self.order {
            Some(n) => write!(m, " order={n}").unwrap(),
            None => write!(m, " eps={:e}", self.eps).unwrap(),
        }
        m.push('\n');
        m
    }
}

/// Seed used for the Monte Carlo run at grid point `point`.
pub fn point_seed(seed: u64, point: usize) -> u64 {
    seed.wrapping_add((point as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One `sweep` record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p_total_db: f64,
    pub outage_series: f64,
    pub bound: f64,
    pub n_used: u64,
    pub outage_asymptotic: f64,
    pub mc_p_hat: Option<f64>,
    pub mc_stderr: Option<f64>,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            fmt_f64(self.p_total_db),
            fmt_f64(self.outage_series),
            fmt_f64(self.bound),
            self.n_used,
            fmt_f64(self.outage_asymptotic),
            opt(self.mc_p_hat),
            opt(self.mc_stderr),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
struct PointReport {
    #[serde(flatten)]
    row: SweepRow,
    terms_evaluated: u128,
    asymptotic_breakdown: AsymptoticBreakdown,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc: Option<McReport>,
}

#[derive(Debug, Clone, Serialize)]
struct McReport {
    #[serde(flatten)]
    estimate: MCEstimate,
    rare_event: bool,
}

impl From<MCEstimate> for McReport {
    fn from(estimate: MCEstimate) -> Self {
        Self { rare_event: estimate.rare_event(), estimate }
    }
}

fn evaluate_point(
    config: &Config,
    spec: &ChannelSpec,
    order: u64,
    cap: TermCap,
    point: usize,
    db: f64,
) -> Result<PointReport, CliError> {
    let power = config.power_at_db(db)?;
    let series = outage_truncated_with_cap(spec, &power, order, cap)?;
    let asym = breakdown(spec, &power)?;
    let mc = match config.mc_config(point)? {
        Some(mc) => Some(estimate_outage(spec, &power, &mc)?),
        None => None,
    };
    Ok(PointReport {
        row: SweepRow {
            p_total_db: db,
            outage_series: series.value,
            bound: series.bound,
            n_used: series.order,
            outage_asymptotic: asym.product,
            mc_p_hat: mc.map(|m| m.p_hat),
            mc_stderr: mc.map(|m| m.stderr),
        },
        terms_evaluated: series.terms_evaluated,
        asymptotic_breakdown: asym,
        mc: mc.map(McReport::from),
    })
}

fn sweep_csv(config: &Config, reports: &[PointReport]) -> String {
    let mut out = config.metadata();
    out.push_str("# outage_true lies in [outage_series, outage_series + bound]\n");
    if reports.iter().any(|r| r.mc.as_ref().is_some_and(|m| m.rare_event)) {
        out.push_str("# rows with fewer than 100 observed MC outages are in the rare-event regime; MC estimate unreliable there\n");
    }
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.row.to_csv());
        out.push('\n');
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn run_points(config: &Config, grid: &[f64], cap: TermCap) -> Result<Vec<PointReport>, CliError> {
    let spec = config.channel()?;
    let order = config.truncation_order(&spec)?;
    grid.par_iter()
        .enumerate()
        .map(|(i, &db)| evaluate_point(config, &spec, order, cap, i, db))
        .collect()
}

/// Single operating point: series value, bound, order, asymptotic and
/// optional Monte Carlo estimate.
pub fn cmd_outage(config: &Config, format: Format, cap: TermCap) -> Result<String, CliError> {
    let db = config.single_db()?;
    let reports = run_points(config, &[db], cap)?;
    Ok(match format {
        Format::Csv => sweep_csv(config, &reports),
        Format::Json => to_json(&reports[0]),
    })
}

/// Outage versus total power over `db_grid`, in grid order.
pub fn cmd_sweep(config: &Config, format: Format, cap: TermCap) -> Result<String, CliError> {
    let grid = config.grid()?;
    let reports = run_points(config, &grid, cap)?;
    Ok(match format {
        Format::Csv => sweep_csv(config, &reports),
        Format::Json => to_json(&reports),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationRow {
    pub order: u64,
    pub value: f64,
    pub bound: f64,
    pub error_vs_reference: f64,
}

/// Series value and bound per truncation order, against the value at
/// `max(N) + 20`.
/// Returns the reference order, the reference's own tail bound and the rows;
/// `error_vs_reference` understates the true error by at most that bound.
pub fn truncation_study(config: &Config, cap: TermCap) -> Result<(u64, f64, Vec<TruncationRow>), CliError> {
    let spec = config.channel()?;
    let power = config.power_at_db(config.single_db()?)?;
    let orders = config
        .n_list
        .clone()
        .filter(|l| !l.is_empty())
        .ok_or_else(|| CliError::Config("n_list must be a nonempty list of orders".into()))?;
    let reference_order = orders.iter().max().unwrap() + 20;
    let reference = outage_truncated_with_cap(&spec, &power, reference_order, cap)?;
    let (reference_bound, reference) = (reference.bound, reference.value);
    let rows = orders
        .par_iter()
        .map(|&n| {
            let t = outage_truncated_with_cap(&spec, &power, n, cap)?;
            Ok(TruncationRow {
                order: n,
                value: t.value,
                bound: t.bound,
                error_vs_reference: (reference - t.value).max(0.0),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((reference_order, reference_bound, rows))
}

pub fn cmd_truncation_study(config: &Config, format: Format, cap: TermCap) -> Result<String, CliError> {
    let (reference_order, reference_bound, rows) = truncation_study(config, cap)?;
    Ok(match format {
        Format::Csv => {
            let mut out = config.metadata();
            writeln!(out, "# reference order {reference_order}, reference bound {}", fmt_f64(reference_bound)).unwrap();
            out.push_str("N,value,bound,error_vs_reference\n");
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.order,
                    fmt_f64(r.value),
                    fmt_f64(r.bound),
                    fmt_f64(r.error_vs_reference)
                )
                .unwrap();
            }
            out
        }
        Format::Json => to_json(&serde_json::json!({
            "reference_order": reference_order,
            "reference_bound": reference_bound,
            "rows": rows,
        })),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EllRow {
    pub rho: f64,
    #[serde(rename = "K")]
    pub rounds: usize,
    pub ell: f64,
}

/// `ℓ(ρ, K)` over `k_list × rho_grid`, sorted by `(K, ρ)`.
pub fn ell_study(config: &Config) -> Result<Vec<EllRow>, CliError> {
    let mut ks = config.k_list.clone().unwrap_or_else(|| vec![config.rounds]);
    let mut rhos = config
        .rho_grid
        .clone()
        .unwrap_or_else(|| (0..20).map(|i| i as f64 * 0.05).collect());
    if ks.is_empty() || rhos.is_empty() {
        return Err(CliError::Config("k_list and rho_grid must be nonempty".into()));
    }
    ks.sort_unstable();
    ks.dedup();
    rhos.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(ks.len() * rhos.len());
    for &k in &ks {
        for &rho in &rhos {
            let spec = ChannelSpec::new(k, rho, config.delta, vec![1.0; k], config.rate)?;
            rows.push(EllRow { rho, rounds: k, ell: ell(&spec) });
        }
    }
    Ok(rows)
}

pub fn cmd_ell_study(config: &Config, format: Format) -> Result<String, CliError> {
    let rows = ell_study(config)?;
    Ok(match format {
        Format::Csv => {
            let mut out = format!("# delta={}\n", config.delta);
            out.push_str("rho,K,ell\n");
            for r in &rows {
                writeln!(out, "{},{},{}", fmt_f64(r.rho), r.rounds, fmt_f64(r.ell)).unwrap();
            }
            out
        }
        Format::Json => to_json(&rows),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiversityReport {
    pub window_db: Vec<f64>,
    pub outage_series: Vec<f64>,
    pub slope: f64,
    pub target: usize,
}

/// Least-squares diversity estimate over the `db_grid` window.
pub fn diversity(config: &Config, cap: TermCap) -> Result<DiversityReport, CliError> {
    let grid = config.grid()?;
    if grid.len() < 3 {
        return Err(CliError::Config(format!(
            "diversity window needs at least 3 points, got {}",
            grid.len()
        )));
    }
    let spec = config.channel()?;
    let order = config.truncation_order(&spec)?;
    let values = grid
        .par_iter()
        .map(|&db| Ok(outage_truncated_with_cap(&spec, &config.power_at_db(db)?, order, cap)?.value))
        .collect::<Result<Vec<f64>, CliError>>()?;
    let points: Vec<(f64, f64)> = grid.iter().map(|&db| db_to_linear(db)).zip(values.iter().copied()).collect();
    let slope = diversity_slope(&points)?;
    Ok(DiversityReport { window_db: grid, outage_series: values, slope, target: spec.rounds() })
}

pub fn cmd_diversity(config: &Config, format: Format, cap: TermCap) -> Result<String, CliError> {
    let report = diversity(config, cap)?;
    Ok(match format {
        Format::Csv => {
            let mut out = config.metadata();
            out.push_str("window_start_db,window_end_db,points,slope,target_diversity\n");
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(report.window_db[0]),
                fmt_f64(*report.window_db.last().unwrap()),
                report.window_db.len(),
                fmt_f64(report.slope),
                report.target
            )
            .unwrap();
            out
        }
        Format::Json => to_json(&report),
    })
}

#[derive(Debug, Clone, Serialize)]
struct McRow {
    p_total_db: f64,
    #[serde(flatten)]
    report: McReport,
}

/// Monte Carlo estimates only, over the grid (or the single point).
pub fn cmd_mc(config: &Config, format: Format) -> Result<String, CliError> {
    let spec = config.channel()?;
    let grid = config.grid()?;
    let section = config.mc.unwrap_or_default();
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &db)| {
            let mc = MCConfig::new(section.samples, point_seed(section.seed, i), section.streams)?;
            let est = estimate_outage(&spec, &config.power_at_db(db)?, &mc)?;
            Ok(McRow { p_total_db: db, report: est.into() })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(match format {
        Format::Csv => {
            let mut out = format!(
                "# K={} rho={} delta={} rate={} samples={} seed={} streams={}\n",
                config.rounds, config.rho, config.delta, config.rate, section.samples, section.seed, section.streams
            );
            out.push_str("p_total_db,mc_p_hat,mc_stderr,samples,failures,rare_event\n");
            for r in &rows {
                let e = &r.report.estimate;
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_f64(r.p_total_db),
                    fmt_f64(e.p_hat),
                    fmt_f64(e.stderr),
                    e.samples,
                    e.failures,
                    r.report.rare_event
                )
                .unwrap();
            }
            out
        }
        Format::Json => to_json(&rows),
    })
}
