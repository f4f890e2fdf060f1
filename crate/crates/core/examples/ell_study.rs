//! Correlation penalty ell(rho, K): one column per K.
//!
//! cargo run --example ell_study

use harq_outage::asymptotics::ell;
use harq_outage::ChannelSpec;

fn main() -> harq_outage::Result<()> {
    let ks = [1, 2, 3, 4, 6];
    print!("rho");
    for k in ks {
        print!(",K={k}");
    }
    println!();
    for i in 0..20 {
        let rho = i as f64 * 0.05;
        print!("{rho:.2}");
        for k in ks {
            print!(",{:.6}", ell(&ChannelSpec::with_unit_gains(k, rho, 2.0)?));
        }
        println!();
    }
    Ok(())
}
