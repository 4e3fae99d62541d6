use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real interval with open or closed ends; `hi` may be infinite.
///
/// Written in the usual notation: `[0,10)`, `(30,inf)`, `[10,20]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Interval {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    pub const fn half_open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            lo_closed: true,
            hi,
            hi_closed: false,
        }
    }

    pub const fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            lo_closed: true,
            hi,
            hi_closed: true,
        }
    }

    /// `(lo, ∞)`.
    pub const fn above(lo: f64) -> Self {
        Self {
            lo,
            lo_closed: false,
            hi: f64::INFINITY,
            hi_closed: false,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let lo_ok = if self.lo_closed { v >= self.lo } else { v > self.lo };
        let hi_ok = if self.hi_closed { v <= self.hi } else { v < self.hi };
        lo_ok && hi_ok
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi || (self.lo == self.hi && self.lo_closed && self.hi_closed))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hi = if self.hi.is_infinite() {
            "inf".to_string()
        } else {
            self.hi.to_string()
        };
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("`{s}` is not an interval like [0,10) or (30,inf)"));
        let s = s.trim();
        let lo_closed = match s.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let hi_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let (lo, hi) = s[1..s.len() - 1].split_once(',').ok_or_else(bad)?;
        let parse = |t: &str| -> Result<f64> {
            match t.trim() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                t => t.parse().map_err(|_| bad()),
            }
        };
        let iv = Interval {
            lo: parse(lo)?,
            lo_closed,
            hi: parse(hi)?,
            hi_closed,
        };
        if iv.lo.is_nan() || iv.hi.is_nan() || iv.is_empty() {
            return Err(bad());
        }
        Ok(iv)
    }
}

impl TryFrom<String> for Interval {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Interval> for String {
    fn from(iv: Interval) -> String {
        iv.to_string()
    }
}

/// One anomaly dataset definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub name: String,
    /// Allowed distance between the true and the reported TX location, meters.
    pub d_tt: Interval,
    /// Allowed `|D(T,R) − D(T',R)|`, meters; set for direction anomalies.
    #[serde(default)]
    pub annulus: Option<Interval>,
    pub sample_count: usize,
}

impl BandSpec {
    pub fn distance(name: &str, d_tt: Interval, sample_count: usize) -> Self {
        Self {
            name: name.to_owned(),
            d_tt,
            annulus: None,
            sample_count,
        }
    }

    pub fn directional(name: &str, d_tt: Interval, annulus: Interval, sample_count: usize) -> Self {
        Self {
            name: name.to_owned(),
            d_tt,
            annulus: Some(annulus),
            sample_count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::Config(format!("band {}: sample_count must be positive", self.name)));
        }
        if self.d_tt.is_empty() || self.d_tt.lo < 0.0 {
            return Err(Error::Config(format!("band {}: d_tt range {} is empty", self.name, self.d_tt)));
        }
        if let Some(a) = self.annulus {
            if a.is_empty() || a.lo < 0.0 || a.hi.is_infinite() {
                return Err(Error::Config(format!(
                    "band {}: annulus {} must be a bounded non-negative range",
                    self.name, a
                )));
            }
        }
        Ok(())
    }

    /// Whether a ghost at distance `d_tt` from T (and `d_gap = |D(T,R) − D(T',R)|`) belongs to the band.
    pub fn admits(&self, d_tt: f64, d_gap: f64) -> bool {
        self.d_tt.contains(d_tt) && self.annulus.is_none_or(|a| a.contains(d_gap))
    }

    /// The ten standard datasets: eight distance bands and two direction bands.
    pub fn standard(sample_count: usize) -> Vec<BandSpec> {
        let distance = [
            ("AD1", 0.0, 10.0),
            ("AD2", 10.0, 20.0),
            ("AD3", 20.0, 30.0),
            ("AD4", 30.0, 40.0),
            ("AD5", 40.0, 50.0),
            ("AD6", 50.0, 100.0),
            ("AD7", 100.0, 500.0),
            ("AD8", 500.0, f64::INFINITY),
        ];
        let mut bands: Vec<BandSpec> = distance
            .iter()
            .map(|&(n, lo, hi)| BandSpec::distance(n, Interval::half_open(lo, hi), sample_count))
            .collect();
        bands.push(BandSpec::directional(
            "AD9",
            Interval::above(30.0),
            Interval::half_open(0.0, 1.0),
            sample_count,
        ));
        bands.push(BandSpec::directional(
            "AD10",
            Interval::above(30.0),
            Interval::closed(10.0, 20.0),
            sample_count,
        ));
        bands
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_bands() {
        let b = BandSpec::standard(1000);
        assert_eq!(b.len(), 10);
        assert_eq!(b[0].d_tt, Interval::half_open(0.0, 10.0));
        assert_eq!(b[3].d_tt.to_string(), "[30,40)");
        assert_eq!(b[7].d_tt.to_string(), "[500,inf)");
        assert_eq!(b[8].annulus.unwrap().to_string(), "[0,1)");
        assert_eq!(b[9].annulus.unwrap().to_string(), "[10,20]");
        assert!(b.iter().all(|b| b.sample_count == 1000 && b.validate().is_ok()));
    }

    #[test]
    fn interval_membership() {
        let iv: Interval = "[0,10)".parse().unwrap();
        assert!(iv.contains(0.0) && iv.contains(9.999) && !iv.contains(10.0));
        let iv: Interval = "(30,inf)".parse().unwrap();
        assert!(!iv.contains(30.0) && iv.contains(1e9));
        let iv: Interval = "[10,20]".parse().unwrap();
        assert!(iv.contains(20.0));
        assert!("[5,1)".parse::<Interval>().is_err());
        assert!("5,1".parse::<Interval>().is_err());
    }

    #[test]
    fn interval_text_round_trip() {
        for s in ["[0,10)", "(30,inf)", "[10,20]", "[0.5,1.25)"] {
            assert_eq!(s.parse::<Interval>().unwrap().to_string(), s);
        }
    }
}
