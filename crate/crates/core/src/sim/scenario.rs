//! Manhattan street grid, building layout and constant-speed grid mobility.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::config::{Material, Obstacle, ScenarioConfig};
use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::rng::{substream, StreamRng};

const TAG_SPAWN: u64 = 0x5350_4157_4e00_0001;
const TAG_TURN: u64 = 0x5455_524e_0000_0002;
const TAG_BLOCKS: u64 = 0x424c_4f43_4b00_0003;

/// Minimum street length per vehicle for a fleet to fit on the grid, meters.
pub const MIN_STREET_PER_VEHICLE: f64 = 5.0;

/// Street centerlines of a Manhattan grid: vertical streets at `xs`,
/// horizontal streets at `ys`.
#[derive(Debug, Clone, PartialEq)]
pub struct StreetGrid {
    pub width: f64,
    pub height: f64,
    pub street_width: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl StreetGrid {
    pub fn new(width: f64, height: f64, spacing: f64, street_width: f64) -> Self {
        let lines = |extent: f64| {
            let n = (extent / spacing + 1e-9).floor() as usize + 1;
            (0..n).map(|k| k as f64 * spacing).collect::<Vec<_>>()
        };
        Self {
            width,
            height,
            street_width,
            xs: lines(width),
            ys: lines(height),
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.street_width
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }

    fn vertical_span(&self) -> (f64, f64) {
        (self.ys[0], *self.ys.last().unwrap())
    }

    fn horizontal_span(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn total_length(&self) -> f64 {
        let (y0, y1) = self.vertical_span();
        let (x0, x1) = self.horizontal_span();
        self.xs.len() as f64 * (y1 - y0) + self.ys.len() as f64 * (x1 - x0)
    }

    /// True if `p` is within half a street width of some centerline and inside bounds.
    pub fn on_street(&self, p: Point) -> bool {
        if !self.in_bounds(p) {
            return false;
        }
        let hw = self.half_width();
        let (y0, y1) = self.vertical_span();
        let (x0, x1) = self.horizontal_span();
        let near = |lines: &[f64], v: f64| {
            let i = lines.partition_point(|&c| c < v);
            (i < lines.len() && lines[i] - v <= hw) || (i > 0 && v - lines[i - 1] <= hw)
        };
        (p.y >= y0 - hw && p.y <= y1 + hw && near(&self.xs, p.x))
            || (p.x >= x0 - hw && p.x <= x1 + hw && near(&self.ys, p.y))
    }

    /// True if `p` lies exactly on a centerline (within `tol`) inside the grid span.
    pub fn on_centerline(&self, p: Point, tol: f64) -> bool {
        let (y0, y1) = self.vertical_span();
        let (x0, x1) = self.horizontal_span();
        let on_v = self.xs.iter().any(|&x| (p.x - x).abs() <= tol)
            && p.y >= y0 - tol
            && p.y <= y1 + tol;
        let on_h = self.ys.iter().any(|&y| (p.y - y).abs() <= tol)
            && p.x >= x0 - tol
            && p.x <= x1 + tol;
        on_v || on_h
    }

    /// Centerline segments, vertical streets first.
    pub fn centerlines(&self) -> Vec<(Point, Point)> {
        let (y0, y1) = self.vertical_span();
        let (x0, x1) = self.horizontal_span();
        let v = self
            .xs
            .iter()
            .map(|&x| (Point::new(x, y0), Point::new(x, y1)));
        let h = self
            .ys
            .iter()
            .map(|&y| (Point::new(x0, y), Point::new(x1, y)));
        v.chain(h).collect()
    }

    /// Building footprint of every block, row-major from the south-west.
    pub fn block_footprints(&self, setback: f64) -> Vec<Rect> {
        let inset = self.half_width() + setback;
        let mut out = Vec::new();
        for yw in self.ys.windows(2) {
            for xw in self.xs.windows(2) {
                let r = Rect::new(xw[0] + inset, yw[0] + inset, xw[1] - inset, yw[1] - inset);
                if r.width() > 0.0 && r.height() > 0.0 {
                    out.push(r);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    pub fn unit(self) -> Point {
        match self {
            Heading::North => Point::new(0.0, 1.0),
            Heading::East => Point::new(1.0, 0.0),
            Heading::South => Point::new(0.0, -1.0),
            Heading::West => Point::new(-1.0, 0.0),
        }
    }

    pub fn reverse(self) -> Heading {
        match self {
            Heading::North => Heading::South,
            Heading::East => Heading::West,
            Heading::South => Heading::North,
            Heading::West => Heading::East,
        }
    }

    fn is_vertical(self) -> bool {
        matches!(self, Heading::North | Heading::South)
    }
}

/// One vehicle moving along the grid at constant speed.
#[derive(Debug, Clone)]
pub struct Vehicle {
    pub id: u32,
    pub pos: Point,
    pub heading: Heading,
    /// m/s.
    pub speed: f64,
    /// Index of the street the vehicle is on: into `xs` when heading north or
    /// south, into `ys` otherwise.
    line: usize,
    turns: StreamRng,
}

impl Vehicle {
    pub fn velocity(&self) -> Point {
        let u = self.heading.unit();
        Point::new(u.x * self.speed, u.y * self.speed)
    }

    /// Next intersection coordinate strictly ahead along the heading.
    fn next_stop(&self, grid: &StreetGrid) -> Option<(f64, usize)> {
        let (along, stops) = if self.heading.is_vertical() {
            (self.pos.y, &grid.ys)
        } else {
            (self.pos.x, &grid.xs)
        };
        match self.heading {
            Heading::North | Heading::East => {
                let i = stops.partition_point(|&c| c <= along);
                (i < stops.len()).then(|| (stops[i], i))
            }
            Heading::South | Heading::West => {
                let i = stops.partition_point(|&c| c < along);
                (i > 0).then(|| (stops[i - 1], i - 1))
            }
        }
    }

    /// Picks a new heading at intersection `(ix, iy)`; reversing only at dead ends.
    fn turn(&mut self, grid: &StreetGrid, ix: usize, iy: usize) {
        let mut legal = Vec::with_capacity(4);
        if iy + 1 < grid.ys.len() {
            legal.push(Heading::North);
        }
        if ix + 1 < grid.xs.len() {
            legal.push(Heading::East);
        }
        if iy > 0 {
            legal.push(Heading::South);
        }
        if ix > 0 {
            legal.push(Heading::West);
        }
        let back = self.heading.reverse();
        let forward: Vec<Heading> = legal.iter().copied().filter(|&h| h != back).collect();
        let choices = if forward.is_empty() { &legal } else { &forward };
        self.heading = *choices.choose(&mut self.turns).expect("grid has at least two streets per axis");
        self.line = if self.heading.is_vertical() { ix } else { iy };
    }

    fn intersection_indices(&self, stop_index: usize) -> (usize, usize) {
        if self.heading.is_vertical() {
            (self.line, stop_index)
        } else {
            (stop_index, self.line)
        }
    }

    /// Advances `distance` meters along the street network.
    pub fn advance(&mut self, grid: &StreetGrid, mut distance: f64) {
        while distance > 0.0 {
            match self.next_stop(grid) {
                None => {
                    // parked at the end of a street facing outward
                    let stop = if self.heading.is_vertical() {
                        grid.ys.partition_point(|&c| c < self.pos.y).min(grid.ys.len() - 1)
                    } else {
                        grid.xs.partition_point(|&c| c < self.pos.x).min(grid.xs.len() - 1)
                    };
                    let (ix, iy) = self.intersection_indices(stop);
                    self.turn(grid, ix, iy);
                }
                Some((coord, stop)) => {
                    let along = if self.heading.is_vertical() { self.pos.y } else { self.pos.x };
                    let gap = (coord - along).abs();
                    if gap > distance {
                        let u = self.heading.unit();
                        self.pos.x += u.x * distance;
                        self.pos.y += u.y * distance;
                        distance = 0.0;
                    } else {
                        let (ix, iy) = self.intersection_indices(stop);
                        self.pos = Point::new(grid.xs[ix], grid.ys[iy]);
                        distance -= gap;
                        self.turn(grid, ix, iy);
                    }
                }
            }
        }
    }
}

/// Position and velocity of one node at an instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeState {
    pub id: u32,
    pub pos: Point,
    pub vel: Point,
}

/// Street grid, obstacles and the fleet moving on it.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub grid: StreetGrid,
    pub obstacles: Vec<Obstacle>,
    pub vehicles: Vec<Vehicle>,
    /// Seconds since the start of the run.
    pub time: f64,
}

/// Builds the grid, lays out buildings and places the fleet on streets.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let grid = StreetGrid::new(
        config.area_width,
        config.area_height,
        config.grid_spacing,
        config.street_width,
    );
    if grid.xs.len() < 2 || grid.ys.len() < 2 {
        return Err(Error::Scenario(format!(
            "grid spacing {} m leaves fewer than two streets per axis in a {} x {} m area",
            config.grid_spacing, config.area_width, config.area_height
        )));
    }
    if config.street_width >= config.grid_spacing {
        return Err(Error::Scenario(format!(
            "street width {} m must be below the grid spacing {} m",
            config.street_width, config.grid_spacing
        )));
    }
    let capacity = grid.total_length() / MIN_STREET_PER_VEHICLE;
    if (config.fleet_size as f64) > capacity {
        return Err(Error::Scenario(format!(
            "{} vehicles need {} m of street but the grid has {} m",
            config.fleet_size,
            config.fleet_size as f64 * MIN_STREET_PER_VEHICLE,
            grid.total_length()
        )));
    }

    let obstacles = layout_obstacles(config, &grid)?;

    let mut spawn = substream(config.seed, &[TAG_SPAWN]);
    let (y0, y1) = (grid.ys[0], *grid.ys.last().unwrap());
    let (x0, x1) = (grid.xs[0], *grid.xs.last().unwrap());
    let v_len = y1 - y0;
    let h_len = x1 - x0;
    let total = grid.total_length();
    let mut vehicles = Vec::with_capacity(config.fleet_size);
    for id in 0..config.fleet_size as u32 {
        let u = spawn.random::<f64>() * total;
        let forward: bool = spawn.random();
        let speed = spawn.random_range(config.speed_min..=config.speed_max);
        let v_total = grid.xs.len() as f64 * v_len;
        let (pos, heading, line) = if u < v_total {
            let line = ((u / v_len) as usize).min(grid.xs.len() - 1);
            let off = u - line as f64 * v_len;
            let h = if forward { Heading::North } else { Heading::South };
            (Point::new(grid.xs[line], y0 + off), h, line)
        } else {
            let w = u - v_total;
            let line = ((w / h_len) as usize).min(grid.ys.len() - 1);
            let off = w - line as f64 * h_len;
            let h = if forward { Heading::East } else { Heading::West };
            (Point::new(x0 + off, grid.ys[line]), h, line)
        };
        vehicles.push(Vehicle {
            id,
            pos,
            heading,
            speed,
            line,
            turns: substream(config.seed, &[TAG_TURN, u64::from(id)]),
        });
    }

    Ok(Scenario {
        config: config.clone(),
        grid,
        obstacles,
        vehicles,
        time: 0.0,
    })
}

fn layout_obstacles(config: &ScenarioConfig, grid: &StreetGrid) -> Result<Vec<Obstacle>> {
    let spec = &config.obstacles;
    let material = spec.material();
    let mut obstacles = Vec::new();
    if spec.fill_blocks {
        let mut pick = substream(config.seed, &[TAG_BLOCKS]);
        for rect in grid.block_footprints(spec.setback) {
            // one draw per block regardless of the fill level
            let keep = pick.random::<f64>() < spec.block_fill;
            if keep {
                obstacles.push(Obstacle { rect, material });
            }
        }
    }
    let centerlines = grid.centerlines();
    for (i, r) in spec.extra.iter().enumerate() {
        let rect = Rect::new(r.x_min, r.y_min, r.x_max, r.y_max);
        if centerlines.iter().any(|&(a, b)| rect.traverse(a, b).is_some()) {
            return Err(Error::Scenario(format!(
                "obstacles.extra[{i}] overlaps a street centerline"
            )));
        }
        obstacles.push(Obstacle {
            rect,
            material: Material {
                wall_loss_db: r.wall_loss_db.unwrap_or(material.wall_loss_db),
                interior_loss_db_per_m: r
                    .interior_loss_db_per_m
                    .unwrap_or(material.interior_loss_db_per_m),
            },
        });
    }
    Ok(obstacles)
}

impl Scenario {
    /// Advances every vehicle by `dt` seconds.
    pub fn step_mobility(&mut self, dt: f64) {
        assert!(dt > 0.0, "mobility step must be positive");
        for v in &mut self.vehicles {
            v.advance(&self.grid, v.speed * dt);
        }
        self.time += dt;
    }

    pub fn states(&self) -> Vec<NodeState> {
        self.vehicles
            .iter()
            .map(|v| NodeState {
                id: v.id,
                pos: v.pos,
                vel: v.velocity(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            fleet_size: 40,
            sim_duration: 60.0,
            seed,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn default_grid_has_eleven_streets_per_axis() {
        let s = build_scenario(&ScenarioConfig::default()).unwrap();
        assert_eq!(s.grid.xs.len(), 11);
        assert_eq!(s.grid.ys.len(), 11);
        assert_eq!(s.obstacles.len(), 100);
        assert_eq!(s.vehicles.len(), 150);
    }

    #[test]
    fn placement_is_deterministic() {
        let cfg = ScenarioConfig {
            seed: 7,
            ..ScenarioConfig::default()
        };
        let a = build_scenario(&cfg).unwrap();
        let b = build_scenario(&cfg).unwrap();
        let pa: Vec<_> = a.vehicles.iter().map(|v| (v.pos, v.heading, v.speed)).collect();
        let pb: Vec<_> = b.vehicles.iter().map(|v| (v.pos, v.heading, v.speed)).collect();
        assert_eq!(pa, pb);
    }

    #[test]
    fn no_vehicle_starts_inside_a_building() {
        let s = build_scenario(&ScenarioConfig {
            seed: 3,
            ..ScenarioConfig::default()
        })
        .unwrap();
        for v in &s.vehicles {
            assert!(s.obstacles.iter().all(|o| !o.rect.contains_interior(v.pos)));
            assert!(s.grid.on_centerline(v.pos, 1e-9));
            assert!((8.0..=14.0).contains(&v.speed));
        }
    }

    #[test]
    fn mid_segment_vehicle_advances_by_speed() {
        let mut s = build_scenario(&small_config(1)).unwrap();
        let v = &mut s.vehicles[0];
        v.pos = Point::new(200.0, 50.0);
        v.line = 1;
        v.heading = Heading::North;
        v.speed = 10.0;
        s.step_mobility(1.0);
        assert_eq!(s.vehicles[0].pos, Point::new(200.0, 60.0));
    }

    #[test]
    fn stationary_vehicle_does_not_move() {
        let mut s = build_scenario(&small_config(2)).unwrap();
        s.vehicles[0].speed = 0.0;
        let before = s.vehicles[0].pos;
        s.step_mobility(1.0);
        assert_eq!(s.vehicles[0].pos, before);
    }

    #[test]
    fn corner_forces_a_legal_turn() {
        let mut s = build_scenario(&small_config(5)).unwrap();
        let v = &mut s.vehicles[0];
        v.pos = Point::new(5.0, 0.0);
        v.line = 0;
        v.heading = Heading::West;
        v.speed = 10.0;
        s.step_mobility(1.0);
        let v = &s.vehicles[0];
        // reached (0,0) after 5 m and can only go north
        assert_eq!(v.heading, Heading::North);
        assert_eq!(v.pos, Point::new(0.0, 5.0));
    }

    #[test]
    fn vehicles_stay_on_streets() {
        let mut s = build_scenario(&small_config(9)).unwrap();
        for _ in 0..600 {
            s.step_mobility(1.0);
            for v in &s.vehicles {
                assert!(s.grid.on_centerline(v.pos, 1e-6), "{:?}", v.pos);
                assert!(s.grid.in_bounds(v.pos));
            }
        }
    }

    #[test]
    fn rejects_grids_that_cannot_host_the_fleet() {
        let cfg = ScenarioConfig {
            area_width: 100.0,
            area_height: 100.0,
            grid_spacing: 200.0,
            ..ScenarioConfig::default()
        };
        assert!(matches!(build_scenario(&cfg), Err(Error::Scenario(_))));
        let cfg = ScenarioConfig {
            area_width: 100.0,
            area_height: 100.0,
            grid_spacing: 50.0,
            fleet_size: 10_000,
            ..ScenarioConfig::default()
        };
        assert!(matches!(build_scenario(&cfg), Err(Error::Scenario(_))));
    }

    #[test]
    fn street_membership() {
        let g = StreetGrid::new(2000.0, 2000.0, 200.0, 20.0);
        assert!(g.on_street(Point::new(209.9, 517.0)));
        assert!(!g.on_street(Point::new(300.0, 300.0)));
        assert!(!g.on_street(Point::new(-1.0, 0.0)));
        assert!(!g.on_street(Point::new(2000.5, 400.0)));
        assert!(g.on_street(Point::new(2000.0, 400.0)));
    }
}
