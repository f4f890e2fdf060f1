//! Seeded, stream-parallel Monte Carlo estimate against the series.
//!
//! cargo run --release --example monte_carlo

use harq_outage::monte_carlo::estimate_outage;
use harq_outage::series::outage_certified;
use harq_outage::{ChannelSpec, MCConfig, PowerProfile, TermCap};

fn main() -> harq_outage::Result<()> {
    let spec = ChannelSpec::with_unit_gains(2, 0.5, 2.0)?;
    let mc = MCConfig::new(2_000_000, 42, 8)?;
    for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let power = PowerProfile::from_db(db, vec![1.0; 2])?;
        let series = outage_certified(&spec, &power, 1e-10, TermCap::default())?.value;
        let est = estimate_outage(&spec, &power, &mc)?;
        println!(
            "{db:>5.1} dB  series {series:.5e}  mc {:.5e} ± {:.1e}  z = {:+.2}{}",
            est.p_hat,
            est.stderr,
            (est.p_hat - series) / est.stderr,
            if est.rare_event() { "  (rare event)" } else { "" }
        );
    }
    Ok(())
}
