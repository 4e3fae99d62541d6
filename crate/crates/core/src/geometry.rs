//! Planar geometry on the scenario plane (meters, origin at the south-west corner).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned rectangle `[min.x, max.x] × [min.y, max.y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

/// Portion of a segment lying strictly inside a rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traversal {
    /// Length of the segment inside the open rectangle, in meters.
    pub inside_length: f64,
    /// Number of rectangle boundaries crossed (0, 1 or 2).
    pub crossings: u32,
}

impl Rect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self {
            min: Point::new(x_min, y_min),
            max: Point::new(x_max, y_max),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.min.x + self.max.x),
            0.5 * (self.min.y + self.max.y),
        )
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Open-interior containment; boundary points are outside.
    pub fn contains_interior(&self, p: Point) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    /// Clips the segment `a → b` against the open interior (Liang–Barsky).
    ///
    /// A segment running along an edge, or touching only a corner, does not
    /// enter the interior and yields `None`.
    pub fn traverse(&self, a: Point, b: Point) -> Option<Traversal> {
        // cheap reject on bounding boxes
        if a.x.max(b.x) <= self.min.x
            || a.x.min(b.x) >= self.max.x
            || a.y.max(b.y) <= self.min.y
            || a.y.min(b.y) >= self.max.y
        {
            return None;
        }
        let dx = b.x - a.x;
        let dy = b.y - a.y;
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        let edges = [
            (-dx, a.x - self.min.x),
            (dx, self.max.x - a.x),
            (-dy, a.y - self.min.y),
            (dy, self.max.y - a.y),
        ];
        for (p, q) in edges {
            if p == 0.0 {
                if q <= 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
            }
        }
        if t1 <= t0 {
            return None;
        }
        let length = (t1 - t0) * dx.hypot(dy);
        let crossings = u32::from(t0 > 0.0) + u32::from(t1 < 1.0);
        Some(Traversal {
            inside_length: length,
            crossings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_pass_through() {
        let r = Rect::new(10.0, 0.0, 30.0, 50.0);
        let t = r
            .traverse(Point::new(0.0, 20.0), Point::new(100.0, 20.0))
            .unwrap();
        assert!((t.inside_length - 20.0).abs() < 1e-12);
        assert_eq!(t.crossings, 2);
    }

    #[test]
    fn tangent_and_corner_do_not_count() {
        let r = Rect::new(10.0, 0.0, 30.0, 50.0);
        assert!(r
            .traverse(Point::new(0.0, 50.0), Point::new(100.0, 50.0))
            .is_none());
        assert!(r
            .traverse(Point::new(10.0, -5.0), Point::new(10.0, 80.0))
            .is_none());
        // touches the (30, 50) corner only
        assert!(r
            .traverse(Point::new(20.0, 60.0), Point::new(40.0, 40.0))
            .is_none());
    }

    #[test]
    fn endpoint_inside_counts_one_wall() {
        let r = Rect::new(0.0, 0.0, 10.0, 10.0);
        let t = r
            .traverse(Point::new(5.0, 5.0), Point::new(20.0, 5.0))
            .unwrap();
        assert_eq!(t.crossings, 1);
        assert!((t.inside_length - 5.0).abs() < 1e-12);
    }

    #[test]
    fn miss() {
        let r = Rect::new(0.0, 0.0, 10.0, 10.0);
        assert!(r
            .traverse(Point::new(20.0, 0.0), Point::new(30.0, 30.0))
            .is_none());
    }
}
