//! How fast the truncated series converges, and how tight the geometric
//! tail bound is.
//!
//! cargo run --release --example truncation_study

use harq_outage::series::{choose_truncation, outage_truncated};
use harq_outage::{ChannelSpec, PowerProfile};

fn main() -> harq_outage::Result<()> {
    for (rho, db) in [(0.5, 10.0), (0.9, 0.0), (0.9, 10.0)] {
        let spec = ChannelSpec::with_unit_gains(4, rho, 2.0)?;
        let power = PowerProfile::from_db(db, vec![1.0; 4])?;
        let reference_order = choose_truncation(&spec, 1e-6)?.max(60);
        let reference = outage_truncated(&spec, &power, reference_order)?;
        println!(
            "rho = {rho}, {db} dB, reference {:.12e} (N = {reference_order}, tail ≤ {:.1e})",
            reference.value, reference.bound
        );
        let reference = reference.value;
        for n in [0, 1, 2, 5, 10, 20, 40] {
            let t = outage_truncated(&spec, &power, n)?;
            let err = reference - t.value;
            println!("  N = {n:>2}  error {err:.3e}  bound {:.3e}  error/bound {:.3}", t.bound, err / t.bound);
        }
    }
    Ok(())
}
