//! High-SNR approximation next to the exact series, and the three factors
//! that make it up.
//!
//! cargo run --example asymptotics

use harq_outage::asymptotics::{breakdown, ell};
use harq_outage::series::outage_certified;
use harq_outage::{ChannelSpec, PowerProfile, TermCap};

fn main() -> harq_outage::Result<()> {
    for rho in [0.0, 0.5, 0.9] {
        let spec = ChannelSpec::with_unit_gains(3, rho, 2.0)?;
        println!("rho = {rho}: ell = {:.6}", ell(&spec));
        for db in [10.0, 20.0, 30.0, 40.0] {
            let power = PowerProfile::from_db(db, vec![1.0; 3])?;
            let b = breakdown(&spec, &power)?;
            let exact = outage_certified(&spec, &power, (1e-6 * b.product).min(1e-12), TermCap::default())?.value;
            println!(
                "  {db:>4.0} dB  A={:.3e} B={:.3e} C={:.4}  asym={:.4e} exact={:.4e} ratio={:.4}",
                b.term_a, b.term_b, b.term_c, b.product, exact, b.product / exact
            );
        }
    }
    Ok(())
}
