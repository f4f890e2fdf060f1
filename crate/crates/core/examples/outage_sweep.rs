//! Outage versus total power for K = 1..4 at two correlation levels,
//! written as CSV to stdout.
//!
//! cargo run --release --example outage_sweep > sweep.csv

use harq_outage::asymptotics::outage_asymptotic;
use harq_outage::series::outage_certified;
use harq_outage::{ChannelSpec, PowerProfile, TermCap};

fn main() -> harq_outage::Result<()> {
    println!("K,rho,p_total_db,outage_series,bound,outage_asymptotic");
    for k in 1..=4 {
        for rho in [0.0, 0.5] {
            let spec = ChannelSpec::with_unit_gains(k, rho, 2.0)?;
            for step in 0..=16 {
                let db = -10.0 + 2.5 * step as f64;
                let power = PowerProfile::from_db(db, vec![1.0; k])?;
                let t = outage_certified(&spec, &power, 1e-9, TermCap::default())?;
                let asym = outage_asymptotic(&spec, &power)?;
                println!("{k},{rho},{db},{:.16e},{:.16e},{:.16e}", t.value, t.bound, asym);
            }
        }
    }
    Ok(())
}
