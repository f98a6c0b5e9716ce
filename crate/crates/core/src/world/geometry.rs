//! Installation floor plan and the 12-cell exterior audience grid.
//!
//! Coordinates are meters on the floor plane with `+x` pointing east and
//! `+y` pointing north. The interior is the closed square `[0, W] × [0, W]`;
//! the exterior band is the ring between the interior and the square
//! `[-b, W + b] × [-b, W + b]`.
//!
//! The band is cut into four side strips of length `W + b`, each split into
//! three equal cells. Strips are laid out as a pinwheel: walking the band
//! clockwise, every side strip begins with the corner block at its start.
//! Numbering also runs clockwise: cells 1-3 on the north strip (west to east,
//! owning the north-west corner), 4-6 on the east strip (north to south,
//! owning the north-east corner), 7-9 on the south strip (east to west) and
//! 10-12 on the west strip (south to north).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of exterior audience cells.
pub const GRID_COUNT: u8 = 12;

const CELLS_PER_SIDE: u8 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("grid id {0} out of range 1..=12")]
    BadGrid(i64),
    #[error("point ({x}, {y}) is not in the exterior band")]
    NotInBand { x: f64, y: f64 },
    #[error("invalid geometry: {0}")]
    Invalid(String),
}

/// An exterior cell number, 1 through 12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct GridId(u8);

impl GridId {
    pub fn new(value: i64) -> Result<Self, GeometryError> {
        if (1..=GRID_COUNT as i64).contains(&value) {
            Ok(GridId(value as u8))
        } else {
            Err(GeometryError::BadGrid(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = GridId> {
        (1..=GRID_COUNT).map(GridId)
    }

    fn side_and_slot(self) -> (Side, u8) {
        let zero = self.0 - 1;
        let side = match zero / CELLS_PER_SIDE {
            0 => Side::North,
            1 => Side::East,
            2 => Side::South,
            _ => Side::West,
        };
        (side, zero % CELLS_PER_SIDE)
    }
}

impl TryFrom<i64> for GridId {
    type Error = GeometryError;
    fn try_from(v: i64) -> Result<Self, Self::Error> {
        GridId::new(v)
    }
}

impl From<GridId> for u8 {
    fn from(g: GridId) -> u8 {
        g.0
    }
}

impl fmt::Display for GridId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    North,
    East,
    South,
    West,
}

/// A point on the floor plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn distance(self, other: Point3) -> f64 {
        let (dx, dy, dz) = (other.x - self.x, other.y - self.y, other.z - self.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArenaGeometry {
    /// Interior side length `W` in meters.
    pub side: f64,
    pub height: f64,
    pub tree_home: Point3,
    /// Width of the audience band around the interior.
    pub exterior_band: f64,
}

impl Default for ArenaGeometry {
    fn default() -> Self {
        ArenaGeometry {
            side: 6.0,
            height: 3.0,
            tree_home: Point3::new(3.0, 3.0, 0.0),
            exterior_band: 1.5,
        }
    }
}

impl ArenaGeometry {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let finite = [self.side, self.height, self.exterior_band]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.side <= 0.0 || self.height <= 0.0 || self.exterior_band <= 0.0 {
            return Err(GeometryError::Invalid(
                "side, height and exterior_band must be finite and positive".into(),
            ));
        }
        if !self.contains_volume(self.tree_home) {
            return Err(GeometryError::Invalid("tree_home lies outside the interior".into()));
        }
        Ok(())
    }

    pub fn contains_interior(&self, p: Point2) -> bool {
        (0.0..=self.side).contains(&p.x) && (0.0..=self.side).contains(&p.y)
    }

    pub fn contains_volume(&self, p: Point3) -> bool {
        self.contains_interior(Point2::new(p.x, p.y)) && (0.0..=self.height).contains(&p.z)
    }

    /// Any floor point: the interior plus the exterior band.
    pub fn contains_floor(&self, p: Point2) -> bool {
        let lo = -self.exterior_band;
        let hi = self.side + self.exterior_band;
        (lo..=hi).contains(&p.x) && (lo..=hi).contains(&p.y)
    }

    pub fn in_band(&self, p: Point2) -> bool {
        self.contains_floor(p) && !self.contains_interior(p)
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.side / 2.0, self.side / 2.0)
    }

    fn strip_len(&self) -> f64 {
        self.side + self.exterior_band
    }

    fn cell_len(&self) -> f64 {
        self.strip_len() / CELLS_PER_SIDE as f64
    }

    /// Maps an exterior-band point to the cell containing it.
    pub fn grid_of_point(&self, p: Point2) -> Result<GridId, GeometryError> {
        if !p.x.is_finite() || !p.y.is_finite() || !self.in_band(p) {
            return Err(GeometryError::NotInBand { x: p.x, y: p.y });
        }
        let (w, b) = (self.side, self.exterior_band);
        let (side, along) = if p.y > w && p.x < w {
            (Side::North, p.x + b)
        } else if p.x >= w && p.y > 0.0 {
            (Side::East, w + b - p.y)
        } else if p.y <= 0.0 && p.x > 0.0 {
            (Side::South, w + b - p.x)
        } else {
            (Side::West, p.y + b)
        };
        let slot = ((along / self.cell_len()).floor().max(0.0) as u8).min(CELLS_PER_SIDE - 1);
        let base = match side {
            Side::North => 0,
            Side::East => 3,
            Side::South => 6,
            Side::West => 9,
        };
        Ok(GridId(base + slot + 1))
    }

    /// Center of a cell's rectangle.
    pub fn grid_centroid(&self, grid: GridId) -> Point2 {
        let (w, b) = (self.side, self.exterior_band);
        let (side, slot) = grid.side_and_slot();
        let along = (slot as f64 + 0.5) * self.cell_len();
        let mid = b / 2.0;
        match side {
            Side::North => Point2::new(along - b, w + mid),
            Side::East => Point2::new(w + mid, w + b - along),
            Side::South => Point2::new(w + b - along, -mid),
            Side::West => Point2::new(-mid, along - b),
        }
    }

    /// Axis-aligned bounds `(min, max)` of a cell.
    pub fn grid_bounds(&self, grid: GridId) -> (Point2, Point2) {
        let (w, b) = (self.side, self.exterior_band);
        let (side, slot) = grid.side_and_slot();
        let (s0, s1) = (slot as f64 * self.cell_len(), (slot as f64 + 1.0) * self.cell_len());
        match side {
            Side::North => (Point2::new(s0 - b, w), Point2::new(s1 - b, w + b)),
            Side::East => (Point2::new(w, w + b - s1), Point2::new(w + b, w + b - s0)),
            Side::South => (Point2::new(w + b - s1, -b), Point2::new(w + b - s0, 0.0)),
            Side::West => (Point2::new(-b, s0 - b), Point2::new(0.0, s1 - b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> ArenaGeometry {
        ArenaGeometry::default()
    }

    #[test]
    fn just_north_of_northwest_corner_is_grid_one() {
        assert_eq!(g().grid_of_point(Point2::new(0.0, 6.01)).unwrap().get(), 1);
        assert_eq!(g().grid_of_point(Point2::new(0.01, 6.01)).unwrap().get(), 1);
    }

    #[test]
    fn centroids_map_back_bijectively() {
        let geo = g();
        let mut seen = std::collections::BTreeSet::new();
        for id in GridId::all() {
            let c = geo.grid_centroid(id);
            assert_eq!(geo.grid_of_point(c).unwrap(), id, "centroid of {id}");
            seen.insert(id);
        }
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn interior_and_outside_points_are_domain_errors() {
        let geo = g();
        assert!(matches!(
            geo.grid_of_point(Point2::new(3.0, 3.0)),
            Err(GeometryError::NotInBand { .. })
        ));
        assert!(geo.grid_of_point(Point2::new(0.0, 0.0)).is_err());
        assert!(geo.grid_of_point(Point2::new(-2.0, 3.0)).is_err());
        assert!(geo.grid_of_point(Point2::new(f64::NAN, 3.0)).is_err());
    }

    #[test]
    fn corner_blocks_follow_pinwheel() {
        let geo = g();
        let grid = |x, y| geo.grid_of_point(Point2::new(x, y)).unwrap().get();
        assert_eq!(grid(-1.0, 7.0), 1); // NW corner
        assert_eq!(grid(7.0, 7.0), 4); // NE corner
        assert_eq!(grid(7.0, -1.0), 7); // SE corner
        assert_eq!(grid(-1.0, -1.0), 10); // SW corner
        assert_eq!(grid(-1.0, 6.0), 12);
        assert_eq!(grid(6.0, 7.0), 4);
    }

    #[test]
    fn grid_id_range() {
        assert!(GridId::new(0).is_err());
        assert!(GridId::new(13).is_err());
        assert_eq!(GridId::new(12).unwrap().get(), 12);
        let parsed: Result<GridId, _> = serde_json::from_str("13");
        assert!(parsed.is_err());
    }

    #[test]
    fn bounds_contain_their_centroid() {
        let geo = g();
        for id in GridId::all() {
            let (lo, hi) = geo.grid_bounds(id);
            let c = geo.grid_centroid(id);
            assert!(lo.x < c.x && c.x < hi.x && lo.y < c.y && c.y < hi.y);
            assert!(((hi.x - lo.x) * (hi.y - lo.y) - 3.75).abs() < 1e-9);
        }
    }
}
