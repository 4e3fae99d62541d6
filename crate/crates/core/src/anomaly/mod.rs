//! Ghost-transmitter injection: falsified self-reported TX locations drawn
//! under distance-band and direction-band constraints.

mod band;

use rand::seq::SliceRandom;
use rand::Rng;

pub use band::{BandSpec, Interval};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rng::{label_tag, substream};
use crate::sim::{build_scenario, Obstacle, Scenario, ScenarioConfig, StreetGrid};
use crate::trace::{FeatureVector, Label};

/// Proposal cap per ghost.
pub const MAX_ATTEMPTS: usize = 100_000;

/// Where a vehicle could plausibly be: on a street, inside the area, outside
/// every obstacle.
#[derive(Debug, Clone)]
pub struct AccessibleRegion {
    pub grid: StreetGrid,
    pub obstacles: Vec<Obstacle>,
}

impl AccessibleRegion {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            grid: s.grid.clone(),
            obstacles: s.obstacles.clone(),
        }
    }

    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        Ok(Self::from_scenario(&build_scenario(config)?))
    }

    pub fn accessible(&self, p: Point) -> bool {
        self.grid.on_street(p) && self.obstacles.iter().all(|o| !o.rect.contains_interior(p))
    }

    fn width(&self) -> f64 {
        self.grid.width
    }

    fn height(&self) -> f64 {
        self.grid.height
    }

    /// Uniform proposals in the square of half-side `radius` around `c`,
    /// clipped to the area; the whole area when `radius` is infinite.
    fn proposal_box(&self, c: Point, radius: f64) -> (f64, f64, f64, f64) {
        if radius.is_finite() {
            (
                (c.x - radius).max(0.0),
                (c.x + radius).min(self.width()),
                (c.y - radius).max(0.0),
                (c.y + radius).min(self.height()),
            )
        } else {
            (0.0, self.width(), 0.0, self.height())
        }
    }
}

fn propose<R: Rng + ?Sized>(rng: &mut R, b: (f64, f64, f64, f64)) -> Point {
    let x = b.0 + (b.1 - b.0) * rng.random::<f64>();
    let y = b.2 + (b.3 - b.2) * rng.random::<f64>();
    Point::new(x, y)
}

/// Draws a ghost location uniformly over the accessible points whose distance
/// to `l_t` falls in the band.
///
/// Proposals come from the bounding square of the band's disc, so accepted
/// points are uniform over accessible ∩ band.
pub fn sample_ghost<R: Rng + ?Sized>(
    l_t: Point,
    band: &BandSpec,
    region: &AccessibleRegion,
    rng: &mut R,
) -> Result<Point> {
    debug_assert!(band.annulus.is_none());
    let bounds = region.proposal_box(l_t, band.d_tt.hi);
    for _ in 0..MAX_ATTEMPTS {
        let p = propose(rng, bounds);
        if band.d_tt.contains(l_t.distance(p)) && region.accessible(p) {
            return Ok(p);
        }
    }
    Err(Error::InfeasibleSample {
        band: band.name.clone(),
        sample: 0,
        attempts: MAX_ATTEMPTS,
    })
}

/// Draws a ghost location that keeps roughly the true TX–RX distance:
/// `D(T,T')` in the band's distance range and `|D(T,R) − D(T',R)|` in its annulus.
pub fn sample_ghost_directional<R: Rng + ?Sized>(
    l_t: Point,
    l_r: Point,
    band: &BandSpec,
    region: &AccessibleRegion,
    rng: &mut R,
) -> Result<Point> {
    let annulus = band
        .annulus
        .expect("directional sampling needs an annulus constraint");
    let d_tr = l_t.distance(l_r);
    let infeasible = |attempts| Error::InfeasibleSample {
        band: band.name.clone(),
        sample: 0,
        attempts,
    };
    // farthest admissible ghost sits opposite T on the outer circle
    let reach = d_tr + d_tr + annulus.hi;
    if reach < band.d_tt.lo || (reach == band.d_tt.lo && !band.d_tt.lo_closed) {
        return Err(infeasible(0));
    }
    let bounds = region.proposal_box(l_r, d_tr + annulus.hi);
    for _ in 0..MAX_ATTEMPTS {
        let p = propose(rng, bounds);
        if band.admits(l_t.distance(p), (d_tr - p.distance(l_r)).abs()) && region.accessible(p) {
            return Ok(p);
        }
    }
    Err(infeasible(MAX_ATTEMPTS))
}

/// Ghost samples for one band together with the true locations they replace.
#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyDataset {
    pub band: BandSpec,
    pub samples: Vec<FeatureVector>,
    /// True transmitter location of each sample.
    pub true_l_t: Vec<Point>,
    /// Source packets skipped because no ghost could be placed.
    pub failures: usize,
}

impl AnomalyDataset {
    /// `D(T,T')` of every sample.
    pub fn ghost_distances(&self) -> Vec<f64> {
        self.samples
            .iter()
            .zip(&self.true_l_t)
            .map(|(s, t)| s.l_t.distance(*t))
            .collect()
    }
}

/// Falsifies the reported TX location of `band.sample_count` packets drawn
/// without replacement from `normal`.
///
/// RSSI and receiver location are kept. A source packet whose geometry admits
/// no ghost is skipped and the next one drawn; running out of packets is an
/// error carrying the failure count.
pub fn build_anomaly_dataset(
    normal: &[FeatureVector],
    band: &BandSpec,
    region: &AccessibleRegion,
    seed: u64,
) -> Result<AnomalyDataset> {
    band.validate()?;
    let tag = label_tag(&band.name);
    let mut order: Vec<usize> = (0..normal.len()).collect();
    order.shuffle(&mut substream(seed, &[tag]));

    let mut samples = Vec::with_capacity(band.sample_count);
    let mut true_l_t = Vec::with_capacity(band.sample_count);
    let mut failures = 0;
    for (k, &i) in order.iter().enumerate() {
        if samples.len() == band.sample_count {
            break;
        }
        let src = &normal[i];
        let mut rng = substream(seed, &[tag, k as u64]);
        let ghost = if band.annulus.is_some() {
            sample_ghost_directional(src.l_t, src.l_r, band, region, &mut rng)
        } else {
            sample_ghost(src.l_t, band, region, &mut rng)
        };
        match ghost {
            Ok(g) => {
                samples.push(FeatureVector {
                    l_t: g,
                    label: Label::Anomalous,
                    ..*src
                });
                true_l_t.push(src.l_t);
            }
            Err(Error::InfeasibleSample { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if samples.len() < band.sample_count {
        return Err(Error::InfeasibleBand {
            band: band.name.clone(),
            requested: band.sample_count,
            produced: samples.len(),
            failures,
        });
    }
    Ok(AnomalyDataset {
        band: band.clone(),
        samples,
        true_l_t,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region() -> AccessibleRegion {
        AccessibleRegion::from_config(&ScenarioConfig::default()).unwrap()
    }

    #[test]
    fn accessibility() {
        let r = region();
        // centroid of the first block
        assert!(!r.accessible(Point::new(100.0, 100.0)));
        assert!(r.accessible(Point::new(200.0, 100.0)));
        assert!(!r.accessible(Point::new(2100.0, 0.0)));
        assert!(!r.accessible(Point::new(-0.5, 400.0)));
    }

    #[test]
    fn distance_band_samples() {
        let r = region();
        let bands = BandSpec::standard(10);
        let l_t = Point::new(400.0, 730.0);
        let mut rng = substream(1, &[2]);
        for band in &bands[..8] {
            for _ in 0..20 {
                let g = sample_ghost(l_t, band, &r, &mut rng).unwrap();
                assert!(r.accessible(g));
                assert!(band.d_tt.contains(l_t.distance(g)), "{} {}", band.name, l_t.distance(g));
            }
        }
    }

    #[test]
    fn direction_band_samples() {
        let r = region();
        let bands = BandSpec::standard(10);
        let l_t = Point::new(400.0, 730.0);
        let l_r = Point::new(400.0, 1130.0);
        let mut rng = substream(5, &[6]);
        for band in &bands[8..] {
            let a = band.annulus.unwrap();
            for _ in 0..20 {
                let g = sample_ghost_directional(l_t, l_r, band, &r, &mut rng).unwrap();
                assert!(r.accessible(g));
                assert!(l_t.distance(g) > 30.0);
                assert!(a.contains((l_t.distance(l_r) - g.distance(l_r)).abs()));
            }
        }
    }

    #[test]
    fn coincident_tx_rx_is_infeasible_for_direction_band() {
        let r = region();
        let ad9 = &BandSpec::standard(1)[8];
        let p = Point::new(400.0, 730.0);
        let err = sample_ghost_directional(p, p, ad9, &r, &mut substream(1, &[1])).unwrap_err();
        assert!(matches!(err, Error::InfeasibleSample { .. }));
    }
}
