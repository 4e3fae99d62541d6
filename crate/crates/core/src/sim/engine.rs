//! The beaconing loop: mobility, per-link RSSI and delivery, packet logging.

use rayon::prelude::*;

use super::channel::{
    delivery_decision, obstacle_loss, path_loss_det, sample_rician_gain, DeliveryOutcome,
    Verdict, SPEED_OF_LIGHT,
};
use super::config::{ChannelParams, Obstacle, ScenarioConfig};
use super::scenario::{build_scenario, NodeState};
use super::traces::VehicleTrace;
use crate::error::Result;
use crate::geometry::Point;
use crate::rng::substream;
use crate::trace::record::{interface_name, PacketLog, PacketRecord};

const TAG_LINK: u64 = 0x4c49_4e4b_0000_0004;

/// One (TX, RX) evaluation of one beacon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkEvent {
    pub beacon: usize,
    pub time: f64,
    pub tx: u32,
    pub rx: u32,
    pub tx_pos: Point,
    pub rx_pos: Point,
    pub distance: f64,
    /// The distance was below the reference distance.
    pub clamped: bool,
    pub outcome: DeliveryOutcome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimStats {
    pub tx_records: usize,
    pub rx_records: usize,
    pub link_evaluations: usize,
    pub delivered: usize,
    pub below_sensitivity: usize,
    pub below_snir: usize,
    pub per_drop: usize,
    pub clamped_distance: usize,
}

impl SimStats {
    fn count(&mut self, e: &LinkEvent) {
        self.link_evaluations += 1;
        self.clamped_distance += usize::from(e.clamped);
        match e.outcome.verdict {
            Verdict::Delivered => self.delivered += 1,
            Verdict::BelowSensitivity => self.below_sensitivity += 1,
            Verdict::BelowSnir => self.below_snir += 1,
            Verdict::PerDrop => self.per_drop += 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub log: PacketLog,
    pub stats: SimStats,
}

/// Where vehicle positions come from.
#[derive(Debug, Clone)]
pub enum Mobility {
    /// Built-in Manhattan-grid movement.
    Grid,
    /// External traces replace the built-in movement.
    Traces(Vec<VehicleTrace>),
}

/// Runs the default grid-mobility simulation and keeps the whole log in memory.
pub fn run_simulation(config: &ScenarioConfig, params: &ChannelParams) -> Result<SimOutput> {
    let mut log = Vec::new();
    let stats = simulate(config, params, Mobility::Grid, |_| {}, |r| {
        log.push(r);
        Ok(())
    })?;
    Ok(SimOutput { log, stats })
}

/// Evaluates one beacon from `tx` at every other node.
fn evaluate_beacon(
    seed: u64,
    beacon: usize,
    time: f64,
    tx: &NodeState,
    nodes: &[NodeState],
    params: &ChannelParams,
    obstacles: &[Obstacle],
    bits: usize,
) -> Vec<LinkEvent> {
    nodes
        .iter()
        .filter(|rx| rx.id != tx.id)
        .map(|rx| {
            let mut rng = substream(
                seed,
                &[TAG_LINK, beacon as u64, u64::from(tx.id), u64::from(rx.id)],
            );
            let distance = tx.pos.distance(rx.pos);
            let pl = path_loss_det(distance, params);
            let gain = sample_rician_gain(params.rician_k, &mut rng);
            let rssi = params.budget_gain_dbm() - pl.db - obstacle_loss(tx.pos, rx.pos, obstacles)
                + 10.0 * gain.log10();
            let outcome = delivery_decision(rssi, params, bits, &mut rng);
            LinkEvent {
                beacon,
                time,
                tx: tx.id,
                rx: rx.id,
                tx_pos: tx.pos,
                rx_pos: rx.pos,
                distance,
                clamped: pl.clamped,
                outcome,
            }
        })
        .collect()
}

fn shift(p: Point, v: Point, dt: f64) -> Point {
    Point::new(p.x + v.x * dt, p.y + v.y * dt)
}

/// Core simulation loop.
///
/// Every vehicle beacons at `k · beacon_interval`. Each (TX, RX) pair is
/// evaluated with its own random substream keyed by `(seed, beacon, tx, rx)`,
/// so per-TX work runs in parallel while records reach `sink` in
/// `(time, tx, rx)` order. `observe` sees every link evaluation, delivered or not.
pub fn simulate(
    config: &ScenarioConfig,
    params: &ChannelParams,
    mobility: Mobility,
    mut observe: impl FnMut(&LinkEvent),
    mut sink: impl FnMut(PacketRecord) -> Result<()>,
) -> Result<SimStats> {
    params.validate()?;
    let mut scenario = build_scenario(config)?;
    if let Mobility::Traces(traces) = &mobility {
        for t in traces {
            t.validate(config.area_width, config.area_height, &scenario.obstacles)?;
        }
    }
    let bits = config.packet_bits();
    let airtime = params.airtime(bits);
    let mut stats = SimStats::default();
    let mut sequence: u64 = 0;

    for beacon in 0..config.beacon_count() {
        let time = beacon as f64 * config.beacon_interval;
        let nodes: Vec<NodeState> = match &mobility {
            Mobility::Grid => {
                if beacon > 0 {
                    scenario.step_mobility(config.beacon_interval);
                }
                scenario.states()
            }
            Mobility::Traces(traces) => traces.iter().filter_map(|t| t.state_at(time)).collect(),
        };

        let per_tx: Vec<Vec<LinkEvent>> = nodes
            .par_iter()
            .map(|tx| {
                evaluate_beacon(
                    config.seed,
                    beacon,
                    time,
                    tx,
                    &nodes,
                    params,
                    &scenario.obstacles,
                    bits,
                )
            })
            .collect();

        for (tx, events) in nodes.iter().zip(per_tx) {
            let signal_name = format!("UDPData-{beacon}");
            sink(PacketRecord {
                interface_id: interface_name(tx.id),
                node_id: tx.id,
                signal_name: signal_name.clone(),
                sequence_no: sequence,
                start_time: time,
                start_pos: tx.pos,
                end_time: time + airtime,
                end_pos: shift(tx.pos, tx.vel, airtime),
                rssi: None,
            })?;
            stats.tx_records += 1;
            for e in &events {
                stats.count(e);
                observe(e);
                if !e.outcome.is_delivered() {
                    continue;
                }
                let rx = nodes.iter().find(|n| n.id == e.rx).expect("receiver exists");
                let delay = e.distance / SPEED_OF_LIGHT;
                sink(PacketRecord {
                    interface_id: interface_name(rx.id),
                    node_id: rx.id,
                    signal_name: signal_name.clone(),
                    sequence_no: sequence,
                    start_time: time + delay,
                    start_pos: shift(rx.pos, rx.vel, delay),
                    end_time: time + delay + airtime,
                    end_pos: shift(rx.pos, rx.vel, delay + airtime),
                    rssi: Some(e.outcome.rssi),
                })?;
                stats.rx_records += 1;
            }
            sequence += 1;
        }
    }
    Ok(stats)
}
