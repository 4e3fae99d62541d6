use proptest::prelude::*;
use v2v_anomaly::checkpoint;
use v2v_anomaly::dae::{init_model, train, Architecture, TrainParams};
use v2v_anomaly::geometry::Point;
use v2v_anomaly::ocsvm::{train_ocsvm, OcsvmParams};
use v2v_anomaly::trace::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e4..1e4f64,
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
    ]
}

fn record() -> impl Strategy<Value = PacketRecord> {
    (
        "[A-Za-z][A-Za-z0-9_.\\[\\]]{0,40}",
        any::<u32>(),
        "[A-Za-z][A-Za-z0-9_-]{0,16}",
        any::<u64>(),
        0.0..1e5f64,
        0.0..1.0f64,
        (finite(), finite(), finite(), finite()),
        prop::option::of(finite()),
    )
        .prop_map(|(iface, node, sig, seq, t0, dt, (x1, y1, x2, y2), rssi)| PacketRecord {
            interface_id: iface,
            node_id: node,
            signal_name: sig,
            sequence_no: seq,
            start_time: t0,
            start_pos: Point::new(x1, y1),
            end_time: t0 + dt,
            end_pos: Point::new(x2, y2),
            rssi,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn parse_inverts_write(r in record()) {
        let line = write_record(&r);
        let back = parse_record(&line).unwrap();
        prop_assert_eq!(back.start_pos.x.to_bits(), r.start_pos.x.to_bits());
        prop_assert_eq!(back.end_pos.y.to_bits(), r.end_pos.y.to_bits());
        prop_assert_eq!(back.rssi.map(f64::to_bits), r.rssi.map(f64::to_bits));
        prop_assert_eq!(&back, &r);
        let fields = line.split(' ').count();
        prop_assert_eq!(fields, if r.rssi.is_some() { 11 } else { 10 });
    }
}

#[test]
fn whole_log_round_trips() {
    let runner_records: Vec<PacketRecord> = (0..50u32)
        .map(|i| PacketRecord {
            interface_id: format!("ScenarioWorking.node[{i}].wlan[0].radio"),
            node_id: i,
            signal_name: format!("UDPData-{}", i / 5),
            sequence_no: u64::from(i / 5),
            start_time: f64::from(i) * 0.1,
            start_pos: Point::new(f64::from(i) * 3.7, 1.0 / f64::from(i + 1)),
            end_time: f64::from(i) * 0.1 + 0.000_186_666,
            end_pos: Point::new(f64::from(i) * 3.7 + 0.001, 1.0 / f64::from(i + 1)),
            rssi: (i % 5 != 0).then(|| -60.0 - f64::from(i) / 7.0),
        })
        .collect();
    let mut buf = Vec::new();
    write_log(&mut buf, &runner_records).unwrap();
    assert_eq!(read_log(buf.as_slice()).unwrap(), runner_records);
    let (linked, summary) = reconcile(&runner_records).unwrap();
    assert_eq!(linked.len(), 40);
    assert_eq!(summary.unmatched_tx, 0);
}

#[test]
fn parse_errors_name_the_field() {
    let good = "ScenarioWorking.node[1].wlan[0].radio 1 UDPData-50 1027 50 812.5 400 50.000187 812.50187 400";
    assert!(parse_record(good).is_ok());
    let bad = good.replace(" 50 812.5", " fifty 812.5");
    let msg = parse_record(&bad).unwrap_err().to_string();
    assert!(msg.contains("start_time"), "{msg}");
    let bad = good.replace(" 400 50.0", " 4x0 50.0");
    assert!(parse_record(&bad).unwrap_err().to_string().contains("start_y"));
    assert!(parse_record("").is_err());
}

#[test]
fn checkpoints_reload_bit_identical() {
    let data: Vec<[f64; FEATURE_DIM]> = (0..200)
        .map(|i| {
            let t = f64::from(i) / 200.0;
            [t, 1.0 - t, t * t, (3.0 * t).sin().abs(), 0.5]
        })
        .collect();
    let params = TrainParams {
        epochs: 3,
        seed: 2,
        ..Default::default()
    };
    let (dae, _) = train(init_model(&Architecture::default(), 6).unwrap(), &data, &data, &params).unwrap();
    let svm = train_ocsvm(&data, &OcsvmParams { seed: 3, ..Default::default() }).unwrap();
    let scaler = Scaler {
        min: [0.0, 0.0, -95.5, 0.0, 0.0],
        max: [2000.0, 2000.0, -30.125, 2000.0, 2000.0],
    };

    let dir = tempfile::tempdir().unwrap();
    let (pd, po, ps) = (dir.path().join("d"), dir.path().join("o"), dir.path().join("s"));
    checkpoint::save_dae(&dae, &pd).unwrap();
    checkpoint::save_ocsvm(&svm, &po).unwrap();
    checkpoint::save_scaler(&scaler, &ps).unwrap();
    let dae2 = checkpoint::load_dae(&pd).unwrap();
    assert_eq!(dae2, dae);
    assert_eq!(checkpoint::load_ocsvm(&po).unwrap(), svm);
    assert_eq!(checkpoint::load_scaler(&ps).unwrap(), scaler);
    for x in &data {
        assert_eq!(dae2.score(x).to_bits(), dae.score(x).to_bits());
    }
    assert!(matches!(
        checkpoint::load_dae(&dir.path().join("missing")),
        Err(v2v_anomaly::Error::MissingArtifact(_))
    ));
}

#[test]
fn shipped_configs_load() {
    use v2v_anomaly::pipeline::RunConfig;
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let default = RunConfig::load(&dir.join("default.toml")).unwrap();
    assert_eq!(default, RunConfig::default());
    let quick = RunConfig::load(&dir.join("quick.toml")).unwrap();
    quick.validate().unwrap();
    assert!(quick.scenario.sim_duration < default.scenario.sim_duration);
}
