//! Outage probability of Type I HARQ over exponentially time-correlated
//! Rayleigh fading.
//!
//! Three independent routes to the same quantity:
//!
//! * [`series`]: the exact Gamma-mixture series, truncated with a certified
//!   geometric tail bound, plus a Gauss–Laguerre quadrature oracle;
//! * [`asymptotics`]: the high-SNR closed form, the correlation penalty
//!   `ℓ(ρ, K)` and a log-log diversity estimator;
//! * [`monte_carlo`]: reproducible parallel simulation of the channel.
//!
//! ```
//! use harq_outage::{ChannelSpec, PowerProfile, series, asymptotics};
//!
//! let spec = ChannelSpec::with_unit_gains(4, 0.5, 2.0).unwrap();
//! let power = PowerProfile::from_db(20.0, vec![1.0; 4]).unwrap();
//! let exact = series::outage_truncated(&spec, &power, 5).unwrap();
//! let asym = asymptotics::outage_asymptotic(&spec, &power).unwrap();
//! assert!(exact.value < 1e-5 && (asym / exact.value - 1.0).abs() < 0.2);
//! ```

pub mod asymptotics;
pub mod channel;
pub mod cli;
pub mod error;
pub mod monte_carlo;
pub mod series;
pub mod special_functions;

pub use channel::{db_to_linear, linear_to_db, ChannelSpec, PowerProfile};
pub use error::{Error, Result};
pub use monte_carlo::{MCConfig, MCEstimate};
pub use series::{MixtureIndex, TermCap, TruncatedOutage};
