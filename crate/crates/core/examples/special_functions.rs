//! The numerical building blocks: regularized gamma, Marcum Q1 and
//! Gauss–Laguerre quadrature.
//!
//! cargo run --example special_functions

use harq_outage::special_functions::{
    marcum_q1, marcum_q1_complement, regularized_lower_gamma, GaussLaguerre,
};

fn main() -> harq_outage::Result<()> {
    for (a, x) in [(1, 1.0), (5, 2.0), (5, 10.0), (40, 30.0)] {
        println!("P({a}, {x}) = {:.15e}", regularized_lower_gamma(a, x)?);
    }
    for (a, b) in [(0.0, 1.0), (1.0, 2.0), (3.0, 0.5), (0.5, 6.0)] {
        println!(
            "Q1({a}, {b}) = {:.15e}   1 - Q1 = {:.15e}",
            marcum_q1(a, b)?,
            marcum_q1_complement(a, b)?
        );
    }
    let rule = GaussLaguerre::new(64)?;
    // ∫ x^3 e^{-x} dx = 3! and ∫ cos(x) e^{-x} dx = 1/2
    println!("∫x³e^-x = {:.15}", rule.integrate(|x| x.powi(3)));
    println!("∫cos(x)e^-x = {:.15}", rule.integrate(f64::cos));
    Ok(())
}
