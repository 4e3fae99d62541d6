//! Time-indexed vehicle positions, including import of external traces.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Deserialize;

use super::config::Obstacle;
use super::scenario::NodeState;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Positions of one vehicle at increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleTrace {
    pub node_id: u32,
    /// `(seconds, position)`, timestamps strictly increasing.
    pub samples: Vec<(f64, Point)>,
}

impl VehicleTrace {
    /// Checks ordering, bounds and that no sample sits inside an obstacle.
    pub fn validate(&self, width: f64, height: f64, obstacles: &[Obstacle]) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::InvalidInput(format!("trace of node {} is empty", self.node_id)));
        }
        for w in self.samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidInput(format!(
                    "trace of node {}: timestamps not strictly increasing at t = {}",
                    self.node_id, w[1].0
                )));
            }
        }
        for &(t, p) in &self.samples {
            if !(p.is_finite() && p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height) {
                return Err(Error::InvalidInput(format!(
                    "trace of node {}: position ({}, {}) at t = {t} is outside the area",
                    self.node_id, p.x, p.y
                )));
            }
            if obstacles.iter().any(|o| o.rect.contains_interior(p)) {
                return Err(Error::InvalidInput(format!(
                    "trace of node {}: position ({}, {}) at t = {t} is inside an obstacle",
                    self.node_id, p.x, p.y
                )));
            }
        }
        Ok(())
    }

    /// Linearly interpolated state at `t`, or `None` outside the trace's time span.
    pub fn state_at(&self, t: f64) -> Option<NodeState> {
        let first = self.samples.first()?;
        let last = self.samples.last()?;
        if t < first.0 || t > last.0 {
            return None;
        }
        if self.samples.len() == 1 {
            return Some(NodeState {
                id: self.node_id,
                pos: first.1,
                vel: Point::default(),
            });
        }
        let i = self
            .samples
            .partition_point(|s| s.0 <= t)
            .clamp(1, self.samples.len() - 1);
        let (t0, p0) = self.samples[i - 1];
        let (t1, p1) = self.samples[i];
        let dt = t1 - t0;
        let vel = Point::new((p1.x - p0.x) / dt, (p1.y - p0.y) / dt);
        let f = t - t0;
        Some(NodeState {
            id: self.node_id,
            pos: Point::new(p0.x + vel.x * f, p0.y + vel.y * f),
            vel,
        })
    }
}

#[derive(Deserialize)]
struct TraceRow {
    node_id: u32,
    t: f64,
    x: f64,
    y: f64,
}

/// Reads `node_id,t,x,y` CSV (with header) into per-node traces sorted by node id.
pub fn read_traces_csv<R: Read>(r: R) -> Result<Vec<VehicleTrace>> {
    let mut by_node: BTreeMap<u32, Vec<(f64, Point)>> = BTreeMap::new();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    for row in rdr.deserialize() {
        let row: TraceRow = row?;
        by_node
            .entry(row.node_id)
            .or_default()
            .push((row.t, Point::new(row.x, row.y)));
    }
    Ok(by_node
        .into_iter()
        .map(|(node_id, mut samples)| {
            samples.sort_by(|a, b| a.0.total_cmp(&b.0));
            VehicleTrace { node_id, samples }
        })
        .collect())
}
