use harq_outage::monte_carlo::{estimate_outage, sample_channel, sample_episode, stream_rng};
use harq_outage::series::{outage_certified, outage_truncated};
use harq_outage::{ChannelSpec, MCConfig, PowerProfile, TermCap};

#[test]
fn independent_rounds_are_exponential() {
    // Kolmogorov–Smirnov at the 1% level: sqrt(n) D < 1.628.
    let means = [1.0, 2.0, 0.5];
    let spec = ChannelSpec::with_unit_gains(3, 0.0, 2.0).unwrap();
    let power = PowerProfile::new(1.0, means.to_vec()).unwrap();
    let n = 100_000;
    let mut rng = stream_rng(11, 0);
    let mut cols = vec![Vec::with_capacity(n); 3];
    for _ in 0..n {
        for (c, g) in cols.iter_mut().zip(sample_episode(&spec, &power, &mut rng).unwrap()) {
            c.push(g);
        }
    }
    for (k, col) in cols.iter_mut().enumerate() {
        col.sort_by(f64::total_cmp);
        let d = col
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = 1.0 - (-x / means[k]).exp();
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!((n as f64).sqrt() * d < 1.628, "round {}: KS statistic {}", k + 1, d);
    }
}

#[test]
fn strong_correlation_shows_in_channel_powers() {
    let spec = ChannelSpec::with_unit_gains(2, 0.99, 2.0).unwrap();
    let mut rng = stream_rng(3, 0);
    let n = 1_000_000;
    let (mut s1, mut s2, mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let h = sample_channel(&spec, &mut rng);
        let a = h[0].0 * h[0].0 + h[0].1 * h[0].1;
        let b = h[1].0 * h[1].0 + h[1].1 * h[1].1;
        s1 += a;
        s2 += b;
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
    }
    let nf = n as f64;
    let cov = s12 / nf - (s1 / nf) * (s2 / nf);
    let corr = cov / ((s11 / nf - (s1 / nf).powi(2)) * (s22 / nf - (s2 / nf).powi(2))).sqrt();
    assert!(corr > 0.8, "sample correlation {corr}");
}

#[test]
fn channel_moments_match_model() {
    let sigma_sq = [1.0, 2.0, 0.5];
    let (rho, delta) = (0.7, 1.5);
    let spec = ChannelSpec::new(3, rho, delta, sigma_sq.to_vec(), 2.0).unwrap();
    let mut rng = stream_rng(21, 0);
    let n = 1_000_000;
    let mut power = [0.0; 3];
    let mut power_sq = [0.0; 3];
    // E[h_j h_k*] for (j, k) = (1, 2), (1, 3), (2, 3): real and imaginary parts.
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let mut cross = [(0.0, 0.0); 3];
    let mut cross_sq = [(0.0, 0.0); 3];
    for _ in 0..n {
        let h = sample_channel(&spec, &mut rng);
        for k in 0..3 {
            let p = h[k].0 * h[k].0 + h[k].1 * h[k].1;
            power[k] += p;
            power_sq[k] += p * p;
        }
        for (slot, &(j, k)) in pairs.iter().enumerate() {
            let re = h[j].0 * h[k].0 + h[j].1 * h[k].1;
            let im = h[j].1 * h[k].0 - h[j].0 * h[k].1;
            cross[slot].0 += re;
            cross[slot].1 += im;
            cross_sq[slot].0 += re * re;
            cross_sq[slot].1 += im * im;
        }
    }
    let nf = n as f64;
    let within = |sum: f64, sum_sq: f64, want: f64| {
        let mean = sum / nf;
        let se = ((sum_sq / nf - mean * mean) / nf).sqrt();
        (mean - want).abs() <= 4.0 * se
    };
    for k in 0..3 {
        assert!(within(power[k], power_sq[k], sigma_sq[k]), "E|h_{}|²", k + 1);
    }
    for (slot, &(j, k)) in pairs.iter().enumerate() {
        let e = (j + k) as f64 + 2.0 + 2.0 * delta - 2.0;
        let want = rho.powf(e) * (sigma_sq[j] * sigma_sq[k]).sqrt();
        assert!(within(cross[slot].0, cross_sq[slot].0, want), "Re E[h_{} h_{}*]", j + 1, k + 1);
        assert!(within(cross[slot].1, cross_sq[slot].1, 0.0), "Im E[h_{} h_{}*]", j + 1, k + 1);
    }
}

#[test]
fn agrees_with_series_at_five_db() {
    let spec = ChannelSpec::with_unit_gains(2, 0.5, 2.0).unwrap();
    let power = PowerProfile::from_db(5.0, vec![1.0; 2]).unwrap();
    let series = outage_certified(&spec, &power, 1e-10, TermCap::default()).unwrap();
    let mc = estimate_outage(&spec, &power, &MCConfig::new(10_000_000, 5, 8).unwrap()).unwrap();
    assert!(mc.agrees_with(series.value, 4.0), "{mc:?} vs {}", series.value);
}

#[test]
fn agrees_with_order_twelve_series_at_ten_db() {
    let spec = ChannelSpec::with_unit_gains(2, 0.5, 2.0).unwrap();
    let power = PowerProfile::from_db(10.0, vec![1.0; 2]).unwrap();
    let series = outage_truncated(&spec, &power, 12).unwrap();
    let mc = estimate_outage(&spec, &power, &MCConfig::new(10_000_000, 6, 8).unwrap()).unwrap();
    assert!(mc.agrees_with(series.value, 4.0), "{mc:?} vs {}", series.value);
}

#[test]
fn stream_count_changes_draws_not_estimand() {
    let spec = ChannelSpec::with_unit_gains(3, 0.6, 2.0).unwrap();
    let power = PowerProfile::from_db(2.0, vec![1.0; 3]).unwrap();
    let series = outage_certified(&spec, &power, 1e-10, TermCap::default()).unwrap().value;
    let one = estimate_outage(&spec, &power, &MCConfig::new(1_000_000, 8, 1).unwrap()).unwrap();
    let eight = estimate_outage(&spec, &power, &MCConfig::new(1_000_000, 8, 8).unwrap()).unwrap();
    assert!(one.agrees_with(series, 4.0));
    assert!(eight.agrees_with(series, 4.0));
    assert_eq!(eight, estimate_outage(&spec, &power, &MCConfig::new(1_000_000, 8, 8).unwrap()).unwrap());
}
