//! Outage of a four-round retransmission link from the gamma-mixture series,
//! with a certified truncation and the quadrature cross-check.
//!
//! cargo run --example series_outage

use harq_outage::series::{choose_truncation, outage_certified, outage_quadrature_oracle, terms_through_order};
use harq_outage::{ChannelSpec, PowerProfile, TermCap};

fn main() -> harq_outage::Result<()> {
    let spec = ChannelSpec::with_unit_gains(4, 0.5, 2.0)?;
    println!("q = {:.6}, S = {:.6}", spec.layer_ratio(), spec.total_load());
    for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let power = PowerProfile::from_db(db, vec![1.0; 4])?;
        let t = outage_certified(&spec, &power, 1e-10, TermCap::default())?;
        let oracle = outage_quadrature_oracle(&spec, &power, 64)?;
        println!(
            "{db:>5.1} dB  P_out = {:.10e}  (+≤ {:.1e}, N = {}, {} terms)  quadrature {:.10e}",
            t.value, t.bound, t.order, t.terms_evaluated, oracle
        );
    }
    let n = choose_truncation(&spec, 1e-12)?;
    println!("eps = 1e-12 needs N = {n}, i.e. {} terms", terms_through_order(4, n));
    Ok(())
}
