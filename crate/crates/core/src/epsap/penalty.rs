//! The seven geometric indicators aggregated into the generator's objective.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::geometry::{Rect, TOL};
use crate::model::{
    AdjacencyKind, Layout, Opening, OpeningKind, PenaltyWeights, SpaceProgram, MAX_ASPECT,
    MIN_SHARED_WALL,
};

/// Residues below this are floating point noise from lattice arithmetic.
const EPS: f64 = 1e-9;

#[inline]
fn clean(v: f64) -> f64 {
    if v.abs() < EPS {
        0.0
    } else {
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    Overlap,
    Bounds,
    Connectivity,
    Dimension,
    Orientation,
    Opening,
    Storey,
}

impl Indicator {
    pub const ALL: [Indicator; 7] = [
        Indicator::Overlap,
        Indicator::Bounds,
        Indicator::Connectivity,
        Indicator::Dimension,
        Indicator::Orientation,
        Indicator::Opening,
        Indicator::Storey,
    ];
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PenaltyComponents {
    pub overlap: f64,
    pub bounds: f64,
    pub connectivity: f64,
    pub dimension: f64,
    pub orientation: f64,
    pub opening: f64,
    pub storey: f64,
}

impl PenaltyComponents {
    pub fn get(&self, indicator: Indicator) -> f64 {
        match indicator {
            Indicator::Overlap => self.overlap,
            Indicator::Bounds => self.bounds,
            Indicator::Connectivity => self.connectivity,
            Indicator::Dimension => self.dimension,
            Indicator::Orientation => self.orientation,
            Indicator::Opening => self.opening,
            Indicator::Storey => self.storey,
        }
    }

    pub fn to_map(&self) -> BTreeMap<Indicator, f64> {
        Indicator::ALL.iter().map(|&i| (i, self.get(i))).collect()
    }

    pub fn weighted_sum(&self, w: &PenaltyWeights) -> f64 {
        Indicator::ALL
            .iter()
            .zip(w.as_array())
            .map(|(&i, wi)| wi * self.get(i))
            .sum()
    }

    /// Sum of every indicator except `dimension`; zero means the geometry is buildable
    /// even if areas drifted from their targets.
    pub fn geometric_total(&self) -> f64 {
        self.overlap
            + self.bounds
            + self.connectivity
            + self.orientation
            + self.opening
            + self.storey
    }

    pub fn is_zero(&self) -> bool {
        Indicator::ALL.iter().all(|&i| self.get(i) == 0.0)
    }
}

/// Evaluates every indicator of `layout` against `program`.
pub fn penalty_components(layout: &Layout, program: &SpaceProgram) -> PenaltyComponents {
    PenaltyComponents {
        overlap: overlap(layout),
        bounds: bounds(layout, program),
        connectivity: connectivity(layout, program),
        dimension: dimension(layout, program),
        orientation: orientation(layout, program),
        opening: opening(layout),
        storey: storey_support(layout),
    }
}

/// Layout-only indicators (no program needed): overlap, opening and storey support.
pub fn intrinsic_penalty(layout: &Layout) -> f64 {
    overlap(layout) + opening(layout) + storey_support(layout)
}

pub(crate) fn overlap(layout: &Layout) -> f64 {
    let mut total = 0.0;
    for storey in &layout.storeys {
        for (i, a) in storey.spaces.iter().enumerate() {
            for b in &storey.spaces[i + 1..] {
                total += clean(a.rect.overlap_area(&b.rect));
            }
        }
    }
    total
}

pub(crate) fn bounds(layout: &Layout, program: &SpaceProgram) -> f64 {
    let mut total = 0.0;
    for storey in &layout.storeys {
        let Some(b) = program.boundary_for(storey.index) else {
            continue;
        };
        for s in &storey.spaces {
            total += clean(s.rect.area() - s.rect.overlap_area(&b));
        }
    }
    total
}

/// A door on `owner`'s wall that lies inside a segment shared with `connects_to`.
pub(crate) fn door_on_shared_wall(layout: &Layout, door: &Opening) -> bool {
    let Some(other_id) = &door.connects_to else {
        return false;
    };
    let (Some(owner), Some(other)) = (layout.space(&door.owner), layout.space(other_id)) else {
        return false;
    };
    if owner.storey != other.storey || !layout.opening_fits_wall(door) {
        return false;
    }
    let Some((s, e)) = owner.rect.shared_interval(door.wall, &other.rect) else {
        return false;
    };
    let Some((ds, de)) = layout.opening_span(door) else {
        return false;
    };
    ds >= s - TOL && de <= e + TOL
}

/// A window or exterior door fully inside one exterior segment of its wall.
pub(crate) fn on_exterior_segment(layout: &Layout, o: &Opening) -> bool {
    let Some(owner) = layout.space(&o.owner) else {
        return false;
    };
    let Some((os, oe)) = layout.opening_span(o) else {
        return false;
    };
    layout
        .wall_segments(owner, o.wall)
        .iter()
        .any(|seg| seg.neighbor.is_none() && os >= seg.start - TOL && oe <= seg.end + TOL)
}

fn door_links(o: &Opening, a: &str, b: &str) -> bool {
    o.kind == OpeningKind::Door
        && match &o.connects_to {
            Some(c) => (o.owner == a && c == b) || (o.owner == b && c == a),
            None => false,
        }
}

fn components(nodes: &BTreeSet<&str>, edges: &[(&str, &str)]) -> usize {
    let idx: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (a, b) in edges {
        if let (Some(&ia), Some(&ib)) = (idx.get(a), idx.get(b)) {
            let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    (0..nodes.len())
        .filter(|&i| find(&mut parent, i) == i)
        .count()
}

pub(crate) fn connectivity(layout: &Layout, program: &SpaceProgram) -> f64 {
    let mut unsatisfied = 0usize;
    // per storey: nodes in door requirements, required edges, realised edges
    let mut per_storey: BTreeMap<usize, (BTreeSet<&str>, Vec<(&str, &str)>, Vec<(&str, &str)>)> =
        BTreeMap::new();
    for req in &program.adjacency_requirements {
        if req.a == req.b {
            continue;
        }
        let (a, b) = (layout.space(&req.a), layout.space(&req.b));
        let satisfied = match (a, b) {
            (Some(a), Some(b)) if a.storey == b.storey => match req.kind {
                AdjacencyKind::WallAdjacent => {
                    a.rect.shared_wall_length(&b.rect) >= MIN_SHARED_WALL - TOL
                }
                AdjacencyKind::DoorConnected => layout.storeys[a.storey]
                    .openings
                    .iter()
                    .any(|o| door_links(o, &a.id, &b.id) && door_on_shared_wall(layout, o)),
            },
            _ => false,
        };
        if !satisfied {
            unsatisfied += 1;
        }
        if req.kind == AdjacencyKind::DoorConnected {
            if let Some(s) = program.space(&req.a).map(|s| s.storey) {
                let entry = per_storey.entry(s).or_default();
                entry.0.insert(req.a.as_str());
                entry.0.insert(req.b.as_str());
                entry.1.push((req.a.as_str(), req.b.as_str()));
                if satisfied {
                    entry.2.push((req.a.as_str(), req.b.as_str()));
                }
            }
        }
    }
    let mut extra_components = 0usize;
    for (nodes, required, realised) in per_storey.values() {
        let want = components(nodes, required);
        let have = components(nodes, realised);
        extra_components += have.saturating_sub(want);
    }
    (unsatisfied + extra_components) as f64
}

pub(crate) fn dimension(layout: &Layout, program: &SpaceProgram) -> f64 {
    let mut total = 0.0;
    for req in &program.spaces {
        match layout.space(&req.id) {
            Some(s) => {
                total += clean((s.rect.area() - req.target_area).abs() / req.target_area);
                total += clean((s.rect.aspect_ratio() - MAX_ASPECT).max(0.0));
            }
            None => total += 1.0,
        }
    }
    total
}

pub(crate) fn orientation(layout: &Layout, program: &SpaceProgram) -> f64 {
    layout
        .openings()
        .filter(|o| o.kind == OpeningKind::Window)
        .filter(|o| match program.space(&o.owner) {
            Some(req) => !req
                .preferred_window_orientations
                .contains(&program.site.true_orientation(o.wall)),
            None => false,
        })
        .count() as f64
}

pub(crate) fn opening(layout: &Layout) -> f64 {
    let mut count = 0usize;
    for storey in &layout.storeys {
        for o in &storey.openings {
            let well_placed = layout.opening_fits_wall(o)
                && match (o.kind, &o.connects_to) {
                    (OpeningKind::Door, Some(_)) => door_on_shared_wall(layout, o),
                    _ => on_exterior_segment(layout, o),
                };
            if !well_placed {
                count += 1;
            }
        }
        for (i, a) in storey.openings.iter().enumerate() {
            for b in &storey.openings[i + 1..] {
                if a.owner != b.owner || a.wall != b.wall {
                    continue;
                }
                let (a0, a1) = (a.offset_along_wall, a.offset_along_wall + a.width);
                let (b0, b1) = (b.offset_along_wall, b.offset_along_wall + b.width);
                if a1.min(b1) - a0.max(b0) > TOL {
                    count += 1;
                }
            }
        }
    }
    count as f64
}

pub(crate) fn storey_support(layout: &Layout) -> f64 {
    let mut total = 0.0;
    for w in layout.storeys.windows(2) {
        let below: Vec<Rect<f64>> = w[0].spaces.iter().map(|s| s.rect).collect();
        for s in &w[1].spaces {
            total += clean(s.rect.area() - s.rect.covered_area(&below));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epsap::test_support::*;
    use crate::geometry::Orientation;

    #[test]
    fn compliant_pair_with_door_is_zero() {
        let (layout, program) = compliant_pair();
        let p = penalty_components(&layout, &program);
        assert!(p.is_zero(), "{p:?}");
        assert_eq!(p.to_map().len(), 7);
    }

    #[test]
    fn unit_squares_overlapping_quarter() {
        let mut program = bare_program(&[("a", 1.0), ("b", 1.0)]);
        program.spaces.iter_mut().for_each(|s| s.min_side = 1.0);
        let layout = boxes(&[("a", 0.0, 0.0, 1.0, 1.0), ("b", 0.5, 0.5, 1.0, 1.0)]);
        let p = penalty_components(&layout, &program);
        assert_eq!(p.overlap, 0.25);
        assert_eq!(p.dimension, 0.0);
        assert_eq!(p.bounds, 0.0);
    }

    /// Clipped-area oracle: count 1 cm cells of the space lying outside the boundary.
    fn brute_outside(space: &Rect<f64>, boundary: &Rect<f64>) -> f64 {
        let h = 0.01;
        let nx = (space.width / h).round() as usize;
        let ny = (space.depth / h).round() as usize;
        let mut cells = 0usize;
        for i in 0..nx {
            for j in 0..ny {
                let cx = space.x + (i as f64 + 0.5) * h;
                let cy = space.y + (j as f64 + 0.5) * h;
                if !boundary.contains_point(cx, cy) {
                    cells += 1;
                }
            }
        }
        cells as f64 * h * h
    }

    #[test]
    fn displaced_space_counts_full_area_outside() {
        let mut program = bare_program(&[("a", 4.0), ("b", 4.0), ("c", 4.0)]);
        program.boundary = vec![Rect::new(0.0, 0.0, 6.0, 6.0)];
        let layout = boxes(&[
            ("a", 0.0, 0.0, 2.0, 2.0),
            ("b", 2.0, 0.0, 2.0, 2.0),
            ("c", 7.0, 1.0, 2.0, 2.0),
        ]);
        let boundary = program.boundary[0];
        let oracle: f64 = layout
            .spaces()
            .map(|s| brute_outside(&s.rect, &boundary))
            .sum();
        assert!((oracle - 4.0).abs() < 1e-9);
        assert_eq!(penalty_components(&layout, &program).bounds, oracle);
    }

    #[test]
    fn misplaced_window_and_missing_door() {
        let (mut layout, program) = compliant_pair();
        // move the door off the shared wall
        let door = layout.opening_mut("a-door-b").unwrap();
        door.wall = Orientation::W;
        let p = penalty_components(&layout, &program);
        // unsatisfied requirement plus the extra door-graph component
        assert_eq!(p.connectivity, 2.0);
        assert_eq!(p.opening, 1.0);
    }

    #[test]
    fn window_outside_preferred_orientation() {
        let (mut layout, program) = compliant_pair();
        let w = layout.opening_mut("a-win-S").unwrap();
        w.wall = Orientation::N;
        let p = penalty_components(&layout, &program);
        assert_eq!(p.orientation, 1.0);
        assert_eq!(p.opening, 0.0);
    }

    #[test]
    fn unsupported_upper_storey() {
        let mut layout = boxes(&[("a", 0.0, 0.0, 4.0, 4.0)]);
        layout.storeys.push(crate::model::Storey {
            index: 1,
            ..Default::default()
        });
        layout.storeys[1].spaces.push(crate::model::SpaceBox {
            id: "u".into(),
            storey: 1,
            rect: Rect::new(2.0, 0.0, 4.0, 4.0),
        });
        assert_eq!(storey_support(&layout), 8.0);
    }

    #[test]
    fn weighted_sum_zero_weights() {
        let p = PenaltyComponents {
            overlap: 3.0,
            storey: 1.0,
            ..Default::default()
        };
        assert_eq!(p.weighted_sum(&PenaltyWeights::uniform(0.0)), 0.0);
        assert_eq!(p.weighted_sum(&PenaltyWeights::uniform(1.0)), 4.0);
    }
}
