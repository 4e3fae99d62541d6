//! Reconciliation of TX and RX records and the detector feature set.

use std::collections::HashMap;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::record::{PacketRecord, Side};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rng::substream;

/// A reception paired with the transmission it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkedPacket<'a> {
    pub tx: &'a PacketRecord,
    pub rx: &'a PacketRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReconcileSummary {
    pub tx_records: usize,
    pub rx_records: usize,
    pub linked: usize,
    /// Transmissions nobody received.
    pub unmatched_tx: usize,
}

/// Pairs every RX record with its TX record on `(signal_name, sequence_no)`.
///
/// Unmatched transmissions are lost packets and are allowed; an RX record
/// without a transmission, or two transmissions sharing a key, is an error.
pub fn reconcile(log: &[PacketRecord]) -> Result<(Vec<LinkedPacket<'_>>, ReconcileSummary)> {
    let mut tx_by_key: HashMap<(&str, u64), (&PacketRecord, bool)> = HashMap::new();
    let mut summary = ReconcileSummary::default();
    for r in log.iter().filter(|r| r.side() == Side::Tx) {
        summary.tx_records += 1;
        if tx_by_key.insert(r.key(), (r, false)).is_some() {
            return Err(Error::Reconcile(format!(
                "duplicate transmission key {} {}",
                r.signal_name, r.sequence_no
            )));
        }
    }
    let mut linked = Vec::new();
    for rx in log.iter().filter(|r| r.side() == Side::Rx) {
        summary.rx_records += 1;
        let entry = tx_by_key.get_mut(&rx.key()).ok_or_else(|| {
            Error::Reconcile(format!(
                "reception at node {} has no transmission {} {}",
                rx.node_id, rx.signal_name, rx.sequence_no
            ))
        })?;
        entry.1 = true;
        linked.push(LinkedPacket { tx: entry.0, rx });
    }
    summary.linked = linked.len();
    summary.unmatched_tx = tx_by_key.values().filter(|(_, seen)| !seen).count();
    Ok((linked, summary))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Normal,
    Anomalous,
}

/// One detector sample `[l_R, V_RSSI, l_T]` with its label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// Receiver position.
    pub l_r: Point,
    /// dBm.
    pub rssi: f64,
    /// Transmitter position as reported in the beacon.
    pub l_t: Point,
    pub label: Label,
    /// True TX–RX distance, diagnostics only.
    pub d_true: f64,
}

pub const FEATURE_DIM: usize = 5;

impl FeatureVector {
    /// `[x_R, y_R, rssi, x_T, y_T]`.
    pub fn to_array(&self) -> [f64; FEATURE_DIM] {
        [self.l_r.x, self.l_r.y, self.rssi, self.l_t.x, self.l_t.y]
    }
}

/// Receiver position at the end of reception, reported TX position at the
/// start of transmission.
pub fn extract_features(lp: &LinkedPacket<'_>) -> FeatureVector {
    let l_r = lp.rx.end_pos;
    let l_t = lp.tx.start_pos;
    FeatureVector {
        l_r,
        rssi: lp.rx.rssi.expect("reconciled reception carries an RSSI"),
        l_t,
        label: Label::Normal,
        d_true: l_r.distance(l_t),
    }
}

/// Per-dimension min-max scaling fitted on training data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaler {
    pub min: [f64; FEATURE_DIM],
    pub max: [f64; FEATURE_DIM],
}

impl Scaler {
    pub fn fit(data: &[FeatureVector]) -> Result<Scaler> {
        fit_scaler(data)
    }

    /// Maps to `[0, 1]` on the training range; values beyond it extrapolate linearly.
    pub fn apply(&self, x: &FeatureVector) -> [f64; FEATURE_DIM] {
        let raw = x.to_array();
        std::array::from_fn(|i| (raw[i] - self.min[i]) / (self.max[i] - self.min[i]))
    }

    pub fn apply_all(&self, data: &[FeatureVector]) -> Vec<[f64; FEATURE_DIM]> {
        data.iter().map(|x| self.apply(x)).collect()
    }
}

pub fn fit_scaler(data: &[FeatureVector]) -> Result<Scaler> {
    if data.is_empty() {
        return Err(Error::InvalidInput("cannot fit a scaler on no data".into()));
    }
    let mut min = [f64::INFINITY; FEATURE_DIM];
    let mut max = [f64::NEG_INFINITY; FEATURE_DIM];
    for x in data {
        for (i, v) in x.to_array().into_iter().enumerate() {
            min[i] = min[i].min(v);
            max[i] = max[i].max(v);
        }
    }
    let dims: Vec<usize> = (0..FEATURE_DIM).filter(|&i| !(max[i] > min[i])).collect();
    if !dims.is_empty() {
        return Err(Error::DegenerateScaler { dims });
    }
    Ok(Scaler { min, max })
}

pub fn apply_scaler(s: &Scaler, x: &FeatureVector) -> [f64; FEATURE_DIM] {
    s.apply(x)
}

/// Seeded uniform split; the first part receives `round(ratio · n)` samples.
pub fn split<T: Clone>(data: &[T], ratio: f64, seed: u64) -> (Vec<T>, Vec<T>) {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.shuffle(&mut substream(seed, &[0x0053_504c_4954]));
    let n_first = ((data.len() as f64) * ratio).round() as usize;
    let n_first = n_first.min(data.len());
    let first = idx[..n_first].iter().map(|&i| data[i].clone()).collect();
    let second = idx[n_first..].iter().map(|&i| data[i].clone()).collect();
    (first, second)
}

#[derive(Debug, Serialize, Deserialize)]
struct FeatureRow {
    x_r: f64,
    y_r: f64,
    rssi: f64,
    x_t: f64,
    y_t: f64,
    label: Label,
    d_true: f64,
}

/// Writes features as CSV with header `x_r,y_r,rssi,x_t,y_t,label,d_true`.
pub fn write_features_csv<W: Write>(w: W, data: &[FeatureVector]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for f in data {
        wtr.serialize(FeatureRow {
            x_r: f.l_r.x,
            y_r: f.l_r.y,
            rssi: f.rssi,
            x_t: f.l_t.x,
            y_t: f.l_t.y,
            label: f.label,
            d_true: f.d_true,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_features_csv<R: Read>(r: R) -> Result<Vec<FeatureVector>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: FeatureRow = row?;
        out.push(FeatureVector {
            l_r: Point::new(row.x_r, row.y_r),
            rssi: row.rssi,
            l_t: Point::new(row.x_t, row.y_t),
            label: row.label,
            d_true: row.d_true,
        });
    }
    Ok(out)
}
