//! Axis-aligned rectangle arithmetic on the plane.
//!
//! Cells are half-open, `[xmin, xmax) x [ymin, ymax)`. Partition code closes
//! the edges that coincide with the domain's upper boundary through
//! [`Rect::contains_in`], so every point of a closed domain belongs to exactly
//! one cell of any quadtree cut.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Like [`Point::new`] but rejects NaN and infinite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(Error::invalid(format!("non-finite point ({x}, {y})")))
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        let finite = [xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite());
        if !finite || xmin > xmax || ymin > ymax {
            return Err(Error::invalid(format!(
                "invalid rect [{xmin}, {xmax}] x [{ymin}, {ymax}]"
            )));
        }
        Ok(Rect { xmin, xmax, ymin, ymax })
    }

    pub const fn unit() -> Self {
        Rect { xmin: 0.0, xmax: 1.0, ymin: 0.0, ymax: 1.0 }
    }

    /// Square `[-half, half]^2`.
    pub fn centered_square(half: f64) -> Result<Self> {
        Rect::new(-half, half, -half, half)
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn centroid(&self) -> Point {
        Point::new(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))
    }

    /// Half-open membership.
    pub fn contains(&self, p: &Point) -> bool {
        self.xmin <= p.x && p.x < self.xmax && self.ymin <= p.y && p.y < self.ymax
    }

    /// Closed membership, used for range-query ground truth.
    pub fn contains_closed(&self, p: &Point) -> bool {
        self.xmin <= p.x && p.x <= self.xmax && self.ymin <= p.y && p.y <= self.ymax
    }

    /// Half-open membership, except that edges lying on the upper boundary of
    /// `domain` are closed.
    pub fn contains_in(&self, domain: &Rect, p: &Point) -> bool {
        let in_x = self.xmin <= p.x && (p.x < self.xmax || (p.x == self.xmax && self.xmax == domain.xmax));
        let in_y = self.ymin <= p.y && (p.y < self.ymax || (p.y == self.ymax && self.ymax == domain.ymax));
        in_x && in_y
    }

    /// True when `other` lies entirely inside `self` (closed sense).
    pub fn encloses(&self, other: &Rect) -> bool {
        self.xmin <= other.xmin && other.xmax <= self.xmax && self.ymin <= other.ymin && other.ymax <= self.ymax
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let xmin = self.xmin.max(other.xmin);
        let xmax = self.xmax.min(other.xmax);
        let ymin = self.ymin.max(other.ymin);
        let ymax = self.ymax.min(other.ymax);
        (xmin <= xmax && ymin <= ymax).then_some(Rect { xmin, xmax, ymin, ymax })
    }

    pub fn intersection_area(&self, other: &Rect) -> f64 {
        let w = (self.xmax.min(other.xmax) - self.xmin.max(other.xmin)).max(0.0);
        let h = (self.ymax.min(other.ymax) - self.ymin.max(other.ymin)).max(0.0);
        w * h
    }

    /// Nearest point of the closed rectangle to `p`.
    pub fn clamp(&self, p: &Point) -> Point {
        Point::new(p.x.clamp(self.xmin, self.xmax), p.y.clamp(self.ymin, self.ymax))
    }

    /// Quadrant by code: 0 lower-left, 1 lower-right, 2 upper-left, 3 upper-right.
    pub fn quadrant(&self, code: u8) -> Rect {
        let mx = 0.5 * (self.xmin + self.xmax);
        let my = 0.5 * (self.ymin + self.ymax);
        let (xmin, xmax) = if code & 1 == 0 { (self.xmin, mx) } else { (mx, self.xmax) };
        let (ymin, ymax) = if code & 2 == 0 { (self.ymin, my) } else { (my, self.ymax) };
        Rect { xmin, xmax, ymin, ymax }
    }

    /// Code of the quadrant holding `p`, consistent with [`Rect::quadrant`]
    /// under the half-open convention.
    pub fn quadrant_of(&self, p: &Point) -> u8 {
        let mx = 0.5 * (self.xmin + self.xmax);
        let my = 0.5 * (self.ymin + self.ymax);
        (p.x >= mx) as u8 | (((p.y >= my) as u8) << 1)
    }

    pub fn quadrants(&self) -> [Rect; 4] {
        [self.quadrant(0), self.quadrant(1), self.quadrant(2), self.quadrant(3)]
    }

    /// Smallest rectangle holding every point; `None` for an empty slice.
    pub fn bounding(points: &[Point]) -> Option<Rect> {
        let first = points.first()?;
        let mut r = Rect { xmin: first.x, xmax: first.x, ymin: first.y, ymax: first.y };
        for p in &points[1..] {
            r.xmin = r.xmin.min(p.x);
            r.xmax = r.xmax.max(p.x);
            r.ymin = r.ymin.min(p.y);
            r.ymax = r.ymax.max(p.y);
        }
        Some(r)
    }
}
