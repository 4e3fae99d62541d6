use v2v_anomaly::anomaly::*;
use v2v_anomaly::sim::{run_simulation, ChannelParams, ScenarioConfig};
use v2v_anomaly::trace::{extract_features, reconcile, FeatureVector, Label};

fn normal_features() -> (ScenarioConfig, Vec<FeatureVector>) {
    let cfg = ScenarioConfig {
        sim_duration: 30.0,
        fleet_size: 80,
        seed: 12,
        ..Default::default()
    };
    let out = run_simulation(&cfg, &ChannelParams::default()).unwrap();
    let (linked, _) = reconcile(&out.log).unwrap();
    (cfg, linked.iter().map(extract_features).collect())
}

#[test]
fn every_band_holds_its_predicate() {
    let (cfg, normal) = normal_features();
    let region = AccessibleRegion::from_config(&cfg).unwrap();
    for band in BandSpec::standard(300) {
        let ds = build_anomaly_dataset(&normal, &band, &region, 8).unwrap();
        assert_eq!(ds.samples.len(), 300, "{}", band.name);
        for (s, t) in ds.samples.iter().zip(&ds.true_l_t) {
            let d_tt = s.l_t.distance(*t);
            let gap = (s.d_true - s.l_t.distance(s.l_r)).abs();
            assert!(band.admits(d_tt, gap), "{}: D_tt {d_tt}, gap {gap}", band.name);
            assert!(region.accessible(s.l_t), "{}: ghost at {:?}", band.name, s.l_t);
            assert_eq!(s.label, Label::Anomalous);
            // only the reported location is falsified
            let src = normal
                .iter()
                .find(|n| n.l_t == *t && n.l_r == s.l_r && n.rssi == s.rssi)
                .expect("source packet");
            assert_eq!(src.d_true, s.d_true);
        }
        if band.name == "AD9" {
            assert!(ds.samples.iter().all(|s| (s.d_true - s.l_t.distance(s.l_r)).abs() < 1.0));
        }
        let again = build_anomaly_dataset(&normal, &band, &region, 8).unwrap();
        assert_eq!(again, ds, "{} not reproducible", band.name);
    }
}

#[test]
fn near_band_mean_distance() {
    let (cfg, normal) = normal_features();
    let region = AccessibleRegion::from_config(&cfg).unwrap();
    let ad1 = &BandSpec::standard(2000)[0];
    let ds = build_anomaly_dataset(&normal, ad1, &region, 3).unwrap();
    let d = ds.ghost_distances();
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    assert!((mean - 7.16).abs() <= 2.0, "mean D_tt {mean}");
}

#[test]
fn exhausted_sources_report_the_band() {
    let (cfg, normal) = normal_features();
    let region = AccessibleRegion::from_config(&cfg).unwrap();
    let band = BandSpec::standard(normal.len() + 1).remove(3);
    match build_anomaly_dataset(&normal, &band, &region, 1) {
        Err(v2v_anomaly::Error::InfeasibleBand { band, .. }) => assert_eq!(band, "AD4"),
        other => panic!("expected an infeasible band, got {other:?}"),
    }
}
