use v2v_anomaly::geometry::Point;
use v2v_anomaly::rng::substream;
use v2v_anomaly::sim::*;
use v2v_anomaly::trace::{extract_features, reconcile};

const C: f64 = 299_792_458.0;

fn closed_form_rssi(d: f64, p: &ChannelParams) -> f64 {
    let d0 = p.reference_distance;
    let fspl = 20.0 * (4.0 * std::f64::consts::PI * d0 * p.carrier_freq / C).log10();
    p.tx_power + p.antenna_gain_tx + p.antenna_gain_rx - p.cable_loss
        - (fspl + 10.0 * p.path_loss_exponent * (d / d0).log10())
}

#[test]
fn link_budget_matches_closed_form() {
    let p = ChannelParams::default();
    let mut worst: f64 = 0.0;
    let mut d = p.reference_distance;
    while d <= 3000.0 {
        let got = compute_rssi_with_gain(Point::new(0.0, 0.0), Point::new(d, 0.0), &p, &[], 1.0);
        worst = worst.max((got - closed_form_rssi(d, &p)).abs());
        d *= 1.01;
    }
    assert!(worst < 1e-9, "worst deviation {worst:e} dB");
}

/// Moment estimate of K from `Var/mean² = (2K+1)/(K+1)²`.
fn k_from_moments(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n;
    let gamma = var / (mean * mean);
    ((1.0 - gamma) + (1.0 - gamma).sqrt()) / gamma
}

#[test]
fn rician_gain_monte_carlo() {
    let mut rng = substream(20, &[1]);
    for k_db in [0.0, 8.0, 12.0] {
        let g: Vec<f64> = (0..1_000_000).map(|_| sample_rician_gain(k_db, &mut rng)).collect();
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        assert!((mean - 1.0).abs() < 0.01, "K={k_db} dB: mean gain {mean}");
        let k_hat_db = 10.0 * k_from_moments(&g).log10();
        assert!((k_hat_db - k_db).abs() < 0.5, "K={k_db} dB: estimated {k_hat_db} dB");
    }
    assert_eq!(sample_rician_gain(f64::INFINITY, &mut rng), 1.0);
}

#[test]
fn delivery_rate_falls_with_distance() {
    let p = ChannelParams::default();
    let bits = ScenarioConfig::default().packet_bits();
    let trials = 10_000;
    let mut last = f64::INFINITY;
    let mut rates = Vec::new();
    for step in 0..30 {
        let d = 1000.0 + 75.0 * step as f64;
        let delivered = (0..trials)
            .filter(|&t| {
                // same draws at every distance
                let mut rng = substream(5, &[t]);
                let rssi = compute_rssi(Point::new(0.0, 0.0), Point::new(d, 0.0), &p, &[], &mut rng);
                delivery_decision(rssi, &p, bits, &mut rng).is_delivered()
            })
            .count();
        let rate = delivered as f64 / trials as f64;
        assert!(rate <= last, "rate rose to {rate} at {d} m (was {last})");
        last = rate;
        rates.push(rate);
    }
    assert!(rates[0] > 0.99 && *rates.last().unwrap() < 0.5, "{rates:?}");
}

fn small_config(seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        sim_duration: 40.0,
        fleet_size: 50,
        seed,
        ..Default::default()
    }
}

#[test]
fn full_run_verdicts_are_consistent_and_reconcile() {
    let cfg = small_config(3);
    let p = ChannelParams::default();
    let mut events = Vec::new();
    let mut log = Vec::new();
    let stats = simulate(&cfg, &p, Mobility::Grid, |e| events.push(e.clone()), |r| {
        log.push(r);
        Ok(())
    })
    .unwrap();

    assert_eq!(stats.tx_records, 50 * 40);
    assert_eq!(stats.link_evaluations, 50 * 49 * 40);
    assert_eq!(
        stats.delivered + stats.below_sensitivity + stats.below_snir + stats.per_drop,
        stats.link_evaluations
    );
    for e in &events {
        assert!(e.outcome.is_consistent(&p), "{e:?}");
        if e.outcome.verdict == Verdict::BelowSensitivity {
            assert!(e.outcome.rssi < p.sensitivity);
        }
    }

    let (linked, summary) = reconcile(&log).unwrap();
    assert_eq!(linked.len(), stats.delivered);
    assert_eq!(summary.tx_records, stats.tx_records);
    assert_eq!(summary.rx_records, stats.rx_records);
    assert!(summary.linked > 0);

    // feature distances agree with the simulator's link distances up to the
    // motion during propagation and airtime
    let airtime = p.airtime(cfg.packet_bits());
    let max_drift = cfg.speed_max * 2.0 * (airtime + 1e-5);
    let delivered: Vec<&LinkEvent> = events.iter().filter(|e| e.outcome.is_delivered()).collect();
    for (lp, e) in linked.iter().zip(&delivered) {
        let f = extract_features(lp);
        assert_eq!(f.rssi, e.outcome.rssi);
        assert_eq!(f.l_t, e.tx_pos);
        assert!((f.d_true - e.distance).abs() <= max_drift);
    }
}

#[test]
fn simulation_is_reproducible_and_seed_sensitive() {
    let p = ChannelParams::default();
    let a = run_simulation(&small_config(9), &p).unwrap();
    let b = run_simulation(&small_config(9), &p).unwrap();
    let c = run_simulation(&small_config(10), &p).unwrap();
    assert_eq!(a.log, b.log);
    assert_ne!(a.log, c.log);
}

#[test]
fn vehicles_stay_on_streets_for_a_full_run() {
    let cfg = ScenarioConfig {
        seed: 4,
        ..Default::default()
    };
    let mut s = build_scenario(&cfg).unwrap();
    for _ in 0..1800 {
        s.step_mobility(1.0);
        for v in s.states() {
            assert!(s.grid.on_street(v.pos), "vehicle {} left the streets at {:?}", v.id, v.pos);
            assert!(s.obstacles.iter().all(|o| !o.rect.contains_interior(v.pos)));
        }
    }
}
