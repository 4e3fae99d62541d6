//! The space-separated packet log.
//!
//! One record per line:
//!
//! ```text
//! interface_id node_id signal_name sequence_no start_time x1 y1 end_time x2 y2 [rssi]
//! ```
//!
//! e.g. `ScenarioWorking.node[1].wlan[0].radio 1 UDPData-50 1027 50 812.5 400 50.000187 812.50187 400`.
//! Reception lines carry the trailing RSSI (dBm); transmission lines do not.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Tx,
    Rx,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketRecord {
    pub interface_id: String,
    pub node_id: u32,
    pub signal_name: String,
    pub sequence_no: u64,
    pub start_time: f64,
    pub start_pos: Point,
    pub end_time: f64,
    pub end_pos: Point,
    /// Present on reception records only, dBm.
    pub rssi: Option<f64>,
}

pub type PacketLog = Vec<PacketRecord>;

/// Field names in column order.
pub const FIELDS: [&str; 11] = [
    "interface_id",
    "node_id",
    "signal_name",
    "sequence_no",
    "start_time",
    "start_x",
    "start_y",
    "end_time",
    "end_x",
    "end_y",
    "rssi",
];

/// Interface name of a node's single radio.
pub fn interface_name(node_id: u32) -> String {
    format!("ScenarioWorking.node[{node_id}].wlan[0].radio")
}

impl PacketRecord {
    pub fn side(&self) -> Side {
        if self.rssi.is_some() {
            Side::Rx
        } else {
            Side::Tx
        }
    }

    /// Key shared by a transmission and all of its receptions.
    pub fn key(&self) -> (&str, u64) {
        (&self.signal_name, self.sequence_no)
    }
}

/// Renders one record as a log line (no trailing newline).
///
/// Floats use the shortest representation that parses back to the same bits.
pub fn write_record(r: &PacketRecord) -> String {
    debug_assert!(!r.interface_id.contains(char::is_whitespace));
    debug_assert!(!r.signal_name.contains(char::is_whitespace));
    let mut line = format!(
        "{} {} {} {} {} {} {} {} {} {}",
        r.interface_id,
        r.node_id,
        r.signal_name,
        r.sequence_no,
        r.start_time,
        r.start_pos.x,
        r.start_pos.y,
        r.end_time,
        r.end_pos.x,
        r.end_pos.y
    );
    if let Some(rssi) = r.rssi {
        line.push(' ');
        line.push_str(&rssi.to_string());
    }
    line
}

fn field_err(line: usize, column: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        field: FIELDS[column - 1],
        column,
        reason: reason.into(),
    }
}

/// Parses one log line; `line_no` is only used for error messages.
pub fn parse_record_at(line: &str, line_no: usize) -> Result<PacketRecord> {
    let tokens: Vec<&str> = line.split_ascii_whitespace().collect();
    if tokens.len() < 10 {
        return Err(field_err(line_no, tokens.len() + 1, "missing field"));
    }
    if tokens.len() > 11 {
        return Err(Error::Parse {
            line: line_no,
            field: "rssi",
            column: 12,
            reason: format!("unexpected trailing field `{}`", tokens[11]),
        });
    }
    let real = |col: usize| -> Result<f64> {
        let v: f64 = tokens[col - 1]
            .parse()
            .map_err(|_| field_err(line_no, col, format!("`{}` is not a number", tokens[col - 1])))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(field_err(line_no, col, "value is not finite"))
        }
    };
    let node_id = tokens[1]
        .parse()
        .map_err(|_| field_err(line_no, 2, format!("`{}` is not a node id", tokens[1])))?;
    let sequence_no = tokens[3]
        .parse()
        .map_err(|_| field_err(line_no, 4, format!("`{}` is not a sequence number", tokens[3])))?;
    let start_time = real(5)?;
    let start_pos = Point::new(real(6)?, real(7)?);
    let end_time = real(8)?;
    let end_pos = Point::new(real(9)?, real(10)?);
    if end_time < start_time {
        return Err(field_err(line_no, 8, "end_time precedes start_time"));
    }
    let rssi = if tokens.len() == 11 { Some(real(11)?) } else { None };
    Ok(PacketRecord {
        interface_id: tokens[0].to_owned(),
        node_id,
        signal_name: tokens[2].to_owned(),
        sequence_no,
        start_time,
        start_pos,
        end_time,
        end_pos,
        rssi,
    })
}

pub fn parse_record(line: &str) -> Result<PacketRecord> {
    parse_record_at(line, 1)
}

pub fn write_log<W: Write>(mut w: W, log: &[PacketRecord]) -> Result<()> {
    for r in log {
        writeln!(w, "{}", write_record(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a whole log; blank lines are skipped.
pub fn read_log<R: BufRead>(r: R) -> Result<PacketLog> {
    let mut log = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        log.push(parse_record_at(&line, i + 1)?);
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_tx() -> PacketRecord {
        PacketRecord {
            interface_id: interface_name(1),
            node_id: 1,
            signal_name: "UDPData-50".into(),
            sequence_no: 1027,
            start_time: 50.0,
            start_pos: Point::new(812.5, 400.0),
            end_time: 50.000_186_666_666_67,
            end_pos: Point::new(812.502_613_333, 400.0),
            rssi: None,
        }
    }

    #[test]
    fn tx_round_trip_and_signal_format() {
        let r = sample_tx();
        let line = write_record(&r);
        assert!(line.contains(" UDPData-50 1027 "), "{line}");
        assert_eq!(parse_record(&line).unwrap(), r);
        assert_eq!(parse_record(&line).unwrap().side(), Side::Tx);
    }

    #[test]
    fn rx_line_has_one_more_field() {
        let tx = sample_tx();
        let mut rx = tx.clone();
        rx.interface_id = interface_name(7);
        rx.node_id = 7;
        rx.rssi = Some(-71.25);
        let n_tx = write_record(&tx).split(' ').count();
        let n_rx = write_record(&rx).split(' ').count();
        assert_eq!(n_rx, n_tx + 1);
        assert_eq!(parse_record(&write_record(&rx)).unwrap(), rx);
    }

    #[test]
    fn empty_line_is_an_error() {
        let err = parse_record("").unwrap_err();
        assert!(matches!(err, Error::Parse { field: "interface_id", column: 1, .. }));
    }

    #[test]
    fn bad_timestamp_names_the_field() {
        let line = "ScenarioWorking.node[1].wlan[0].radio 1 UDPData-50 1027 abc 1 2 3 4 5";
        let err = parse_record(line).unwrap_err();
        assert!(matches!(err, Error::Parse { field: "start_time", column: 5, .. }), "{err}");
        assert!(err.to_string().contains("start_time"));
    }

    #[test]
    fn reversed_times_rejected() {
        let line = "if 1 UDPData-1 3 5.0 1 2 4.0 1 2";
        let err = parse_record(line).unwrap_err();
        assert!(matches!(err, Error::Parse { field: "end_time", .. }));
    }

    #[test]
    fn too_many_fields_rejected() {
        let line = "if 1 UDPData-1 3 5.0 1 2 6.0 1 2 -70 9";
        assert!(parse_record(line).is_err());
    }
}
