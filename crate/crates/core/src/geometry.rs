//! Axis-aligned rectangles, wall orientation and the placement lattice.
//!
//! Plan coordinates are metres with +x pointing east and +y pointing north in
//! the building frame. A rectangle's origin is its south-west corner.

use serde::{Deserialize, Serialize};

use crate::num::Scalar;

/// Dimension grid of the generator (m).
pub const GRID: f64 = 0.1;
/// Position lattice. Quarter turns about a space centre can land origins on
/// half grid steps, so positions live on a lattice twice as fine as the grid.
pub const LATTICE: f64 = GRID / 2.0;
/// Tolerance used for wall-line coincidence and containment tests (1 mm).
pub const TOL: f64 = 1e-3;

const LATTICE_PER_M: f64 = 20.0;
const GRID_PER_M: f64 = 10.0;

/// Snaps a value to the position lattice, producing one canonical `f64` per lattice point.
#[inline]
pub fn snap(v: f64) -> f64 {
    // adding zero folds -0.0 into 0.0 so equal layouts serialise identically
    (v * LATTICE_PER_M).round() / LATTICE_PER_M + 0.0
}

/// Snaps a value to the dimension grid.
#[inline]
pub fn snap_grid(v: f64) -> f64 {
    (v * GRID_PER_M).round() / GRID_PER_M + 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Orientation {
    N,
    E,
    S,
    W,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation::N,
        Orientation::E,
        Orientation::S,
        Orientation::W,
    ];

    pub fn index(self) -> usize {
        match self {
            Orientation::N => 0,
            Orientation::E => 1,
            Orientation::S => 2,
            Orientation::W => 3,
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i % 4]
    }

    /// Rotates clockwise (viewed from above) by `quarter_turns`.
    pub fn rotate_cw(self, quarter_turns: i32) -> Self {
        Self::from_index((self.index() as i32 + quarter_turns).rem_euclid(4) as usize)
    }

    pub fn opposite(self) -> Self {
        self.rotate_cw(2)
    }

    /// True when the wall runs along the x axis.
    pub fn runs_along_x(self) -> bool {
        matches!(self, Orientation::N | Orientation::S)
    }

    pub fn label(self) -> &'static str {
        match self {
            Orientation::N => "N",
            Orientation::E => "E",
            Orientation::S => "S",
            Orientation::W => "W",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// A wall of a rectangle projected on the plan: the fixed coordinate plus the span along the wall.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WallLine<T> {
    pub side: Orientation,
    /// y for N/S walls, x for E/W walls.
    pub fixed: T,
    pub start: T,
    pub end: T,
}

impl<T: Scalar> WallLine<T> {
    pub fn length(&self) -> T {
        self.end - self.start
    }
}

/// Axis-aligned rectangle with south-west origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub x: T,
    pub y: T,
    pub width: T,
    pub depth: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(x: T, y: T, width: T, depth: T) -> Self {
        Self { x, y, width, depth }
    }

    pub fn x_max(&self) -> T {
        self.x + self.width
    }

    pub fn y_max(&self) -> T {
        self.y + self.depth
    }

    pub fn area(&self) -> T {
        self.width * self.depth
    }

    pub fn center(&self) -> (T, T) {
        let half = T::lit(0.5);
        (self.x + self.width * half, self.y + self.depth * half)
    }

    /// Long side over short side.
    pub fn aspect_ratio(&self) -> T {
        let (lo, hi) = if self.width < self.depth {
            (self.width, self.depth)
        } else {
            (self.depth, self.width)
        };
        hi / lo
    }

    pub fn intersection(&self, other: &Self) -> Option<Self> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.x_max().min(other.x_max());
        let y1 = self.y_max().min(other.y_max());
        if x1 > x0 && y1 > y0 {
            Some(Self::new(x0, y0, x1 - x0, y1 - y0))
        } else {
            None
        }
    }

    /// Area of the intersection; zero when disjoint or only touching.
    pub fn overlap_area(&self, other: &Self) -> T {
        let w = self.x_max().min(other.x_max()) - self.x.max(other.x);
        let d = self.y_max().min(other.y_max()) - self.y.max(other.y);
        if w > T::zero() && d > T::zero() {
            w * d
        } else {
            T::zero()
        }
    }

    pub fn translated(&self, dx: T, dy: T) -> Self {
        Self::new(self.x + dx, self.y + dy, self.width, self.depth)
    }

    pub fn wall(&self, side: Orientation) -> WallLine<T> {
        match side {
            Orientation::N => WallLine {
                side,
                fixed: self.y_max(),
                start: self.x,
                end: self.x_max(),
            },
            Orientation::S => WallLine {
                side,
                fixed: self.y,
                start: self.x,
                end: self.x_max(),
            },
            Orientation::E => WallLine {
                side,
                fixed: self.x_max(),
                start: self.y,
                end: self.y_max(),
            },
            Orientation::W => WallLine {
                side,
                fixed: self.x,
                start: self.y,
                end: self.y_max(),
            },
        }
    }

    pub fn wall_length(&self, side: Orientation) -> T {
        if side.runs_along_x() {
            self.width
        } else {
            self.depth
        }
    }

    /// Interval (absolute coordinates along the wall) where `side` of `self`
    /// coincides with the opposite wall of `other`, if it has positive length.
    pub fn shared_interval(&self, side: Orientation, other: &Self) -> Option<(T, T)> {
        let mine = self.wall(side);
        let theirs = other.wall(side.opposite());
        if (mine.fixed - theirs.fixed).abs() > T::lit(TOL) {
            return None;
        }
        let s = mine.start.max(theirs.start);
        let e = mine.end.min(theirs.end);
        (e > s).then_some((s, e))
    }

    /// Total length of wall shared between the two rectangles.
    pub fn shared_wall_length(&self, other: &Self) -> T {
        Orientation::ALL
            .iter()
            .filter_map(|&side| self.shared_interval(side, other))
            .fold(T::zero(), |acc, (s, e)| acc + (e - s))
    }

    /// Area of `self` covered by the union of `others` (exact, by coordinate compression).
    pub fn covered_area(&self, others: &[Self]) -> T {
        let clipped: Vec<Self> = others.iter().filter_map(|o| self.intersection(o)).collect();
        if clipped.is_empty() {
            return T::zero();
        }
        let mut xs: Vec<T> = Vec::with_capacity(clipped.len() * 2);
        let mut ys: Vec<T> = Vec::with_capacity(clipped.len() * 2);
        for r in &clipped {
            xs.extend([r.x, r.x_max()]);
            ys.extend([r.y, r.y_max()]);
        }
        let cmp = |a: &T, b: &T| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal);
        xs.sort_by(cmp);
        xs.dedup();
        ys.sort_by(cmp);
        ys.dedup();
        let half = T::lit(0.5);
        let mut total = T::zero();
        for xw in xs.windows(2) {
            let cx = (xw[0] + xw[1]) * half;
            for yw in ys.windows(2) {
                let cy = (yw[0] + yw[1]) * half;
                if clipped.iter().any(|r| r.contains_point(cx, cy)) {
                    total = total + (xw[1] - xw[0]) * (yw[1] - yw[0]);
                }
            }
        }
        total
    }

    /// Open-interior point test.
    pub fn contains_point(&self, px: T, py: T) -> bool {
        px > self.x && px < self.x_max() && py > self.y && py < self.y_max()
    }

    /// Decomposes `self` minus the union of `holes` into disjoint rectangles.
    pub fn subtract(&self, holes: &[Self]) -> Vec<Self> {
        let clipped: Vec<Self> = holes.iter().filter_map(|o| self.intersection(o)).collect();
        if clipped.is_empty() {
            return vec![*self];
        }
        let cmp = |a: &T, b: &T| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal);
        let mut xs = vec![self.x, self.x_max()];
        let mut ys = vec![self.y, self.y_max()];
        for r in &clipped {
            xs.extend([r.x, r.x_max()]);
            ys.extend([r.y, r.y_max()]);
        }
        xs.sort_by(cmp);
        xs.dedup();
        ys.sort_by(cmp);
        ys.dedup();
        let half = T::lit(0.5);
        let mut out = Vec::new();
        // merge free cells row by row into maximal horizontal runs
        for yw in ys.windows(2) {
            let cy = (yw[0] + yw[1]) * half;
            let mut run: Option<(T, T)> = None;
            for xw in xs.windows(2) {
                let cx = (xw[0] + xw[1]) * half;
                let free = !clipped.iter().any(|r| r.contains_point(cx, cy));
                run = match (run, free) {
                    (Some((s, _)), true) => Some((s, xw[1])),
                    (None, true) => Some((xw[0], xw[1])),
                    (Some((s, e)), false) => {
                        out.push(Self::new(s, yw[0], e - s, yw[1] - yw[0]));
                        None
                    }
                    (None, false) => None,
                };
            }
            if let Some((s, e)) = run {
                out.push(Self::new(s, yw[0], e - s, yw[1] - yw[0]));
            }
        }
        out
    }

    pub fn cast<U: Scalar>(&self) -> Rect<U> {
        Rect {
            x: U::lit(self.x.to_f64_lossy()),
            y: U::lit(self.y.to_f64_lossy()),
            width: U::lit(self.width.to_f64_lossy()),
            depth: U::lit(self.depth.to_f64_lossy()),
        }
    }
}

impl Rect<f64> {
    /// Returns the rectangle with origin on the lattice and dimensions on the grid.
    pub fn snapped(&self) -> Self {
        Self::new(
            snap(self.x),
            snap(self.y),
            snap_grid(self.width),
            snap_grid(self.depth),
        )
    }
}

/// Area of intersection of two rectangles.
pub fn rect_overlap_area<T: Scalar>(a: &Rect<T>, b: &Rect<T>) -> T {
    a.overlap_area(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overlap_examples() {
        let a = Rect::new(0.0, 0.0, 1.0, 1.0);
        assert_eq!(rect_overlap_area(&a, &Rect::new(0.5, 0.5, 1.0, 1.0)), 0.25);
        let b = Rect::new(1.0, 2.0, 2.0, 3.0);
        assert_eq!(rect_overlap_area(&b, &b), 6.0);
        assert_eq!(rect_overlap_area(&a, &Rect::new(5.0, 5.0, 1.0, 1.0)), 0.0);
    }

    #[test]
    fn overlap_in_single_precision() {
        let a = Rect::<f32>::new(0.0, 0.0, 1.0, 1.0);
        assert_eq!(a.overlap_area(&Rect::new(0.5, 0.5, 1.0, 1.0)), 0.25);
    }

    #[test]
    fn shared_wall_full_and_corner() {
        let a = Rect::new(0.0, 0.0, 4.0, 4.0);
        let b = Rect::new(4.0, 0.0, 4.0, 4.0);
        assert_eq!(a.shared_interval(Orientation::E, &b), Some((0.0, 4.0)));
        assert_eq!(b.shared_interval(Orientation::W, &a), Some((0.0, 4.0)));
        let corner = Rect::new(4.0, 4.0, 2.0, 2.0);
        assert_eq!(a.shared_wall_length(&corner), 0.0);
    }

    #[test]
    fn covered_area_unions_overlapping_covers() {
        let r = Rect::<f64>::new(0.0, 0.0, 4.0, 4.0);
        let covers = [
            Rect::new(-1.0, -1.0, 3.0, 3.0),
            Rect::new(1.0, 1.0, 2.0, 2.0),
        ];
        // 2x2 from first; second adds 2x2 minus 1x1 overlap = 3
        assert!((r.covered_area(&covers) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn subtract_partitions_remainder() {
        let r = Rect::new(0.0, 0.0, 4.0, 3.0);
        let pieces = r.subtract(&[Rect::new(1.0, 1.0, 1.0, 1.0)]);
        let total: f64 = pieces.iter().map(|p| p.area()).sum();
        assert!((total - 11.0).abs() < 1e-12);
        for (i, a) in pieces.iter().enumerate() {
            for b in &pieces[i + 1..] {
                assert_eq!(a.overlap_area(b), 0.0);
            }
        }
    }

    #[test]
    fn snap_is_canonical() {
        assert_eq!(snap(0.1 + 0.2), snap(0.3));
        assert_eq!(snap(snap(1.05) - 0.1 + 0.1), snap(1.05));
        assert_eq!(snap_grid(2.4 * 1.0000000001), 2.4);
    }

    #[test]
    fn orientation_rotation() {
        assert_eq!(Orientation::N.rotate_cw(1), Orientation::E);
        assert_eq!(Orientation::N.rotate_cw(-1), Orientation::W);
        assert_eq!(Orientation::S.opposite(), Orientation::N);
    }

    fn rect_strategy() -> impl Strategy<Value = Rect<f64>> {
        (-20.0..20.0f64, -20.0..20.0f64, 0.1..10.0f64, 0.1..10.0f64)
            .prop_map(|(x, y, w, d)| Rect::new(x, y, w, d))
    }

    proptest! {
        #[test]
        fn overlap_is_symmetric(a in rect_strategy(), b in rect_strategy()) {
            prop_assert_eq!(rect_overlap_area(&a, &b), rect_overlap_area(&b, &a));
        }

        #[test]
        fn self_overlap_is_area(a in rect_strategy()) {
            prop_assert!((rect_overlap_area(&a, &a) - a.area()).abs() < 1e-9);
        }

        #[test]
        fn overlap_bounded_by_either_area(a in rect_strategy(), b in rect_strategy()) {
            let o = rect_overlap_area(&a, &b);
            prop_assert!(o >= 0.0 && o <= a.area().min(b.area()) + 1e-9);
        }
    }
}
