//! Space programs, layouts and the checks shared by every pipeline stage.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::{Orientation, Rect, TOL};

/// Default storey height (m).
pub const DEFAULT_STOREY_HEIGHT: f64 = 2.7;
/// Minimum shared wall length for two spaces to count as wall-adjacent (a door leaf, m).
pub const MIN_SHARED_WALL: f64 = 0.8;
/// Largest long/short side ratio a space may have without penalty.
pub const MAX_ASPECT: f64 = 3.0;
/// Overhang depth cap (m).
pub const MAX_OVERHANG_DEPTH: f64 = 2.0;
/// Hours in a week; gain profiles are indexed by hour-of-week.
pub const HOURS_PER_WEEK: usize = 168;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjacencyKind {
    DoorConnected,
    WallAdjacent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyRequirement {
    pub a: String,
    pub b: String,
    pub kind: AdjacencyKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hemisphere {
    #[default]
    North,
    South,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteSpec {
    pub latitude: f64,
    #[serde(default)]
    pub hemisphere: Hemisphere,
    /// Clockwise angle from true north to the building's +y axis (degrees).
    #[serde(default)]
    pub north_angle: f64,
}

impl Default for SiteSpec {
    fn default() -> Self {
        Self {
            latitude: 40.2,
            hemisphere: Hemisphere::North,
            north_angle: 0.0,
        }
    }
}

impl SiteSpec {
    /// North angle rounded to the nearest quarter turn.
    pub fn quarter_turns(&self) -> i32 {
        ((self.north_angle / 90.0).round() as i32).rem_euclid(4)
    }

    /// True compass orientation of a wall given in the building frame.
    pub fn true_orientation(&self, wall: Orientation) -> Orientation {
        wall.rotate_cw(self.quarter_turns())
    }

    /// Building-frame wall facing the given true orientation.
    pub fn local_wall(&self, facing: Orientation) -> Orientation {
        facing.rotate_cw(-self.quarter_turns())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub w_overlap: f64,
    pub w_bounds: f64,
    pub w_connectivity: f64,
    pub w_dimension: f64,
    pub w_orientation: f64,
    pub w_opening: f64,
    pub w_storey: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl PenaltyWeights {
    pub fn uniform(w: f64) -> Self {
        Self {
            w_overlap: w,
            w_bounds: w,
            w_connectivity: w,
            w_dimension: w,
            w_orientation: w,
            w_opening: w,
            w_storey: w,
        }
    }

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.w_overlap,
            self.w_bounds,
            self.w_connectivity,
            self.w_dimension,
            self.w_orientation,
            self.w_opening,
            self.w_storey,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceRequirement {
    pub id: String,
    pub target_area: f64,
    pub min_side: f64,
    #[serde(default)]
    pub storey: usize,
    /// True compass orientations where the space wants a window.
    #[serde(default)]
    pub preferred_window_orientations: BTreeSet<Orientation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_profile: Option<String>,
}

/// The user's space program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceProgram {
    pub spaces: Vec<SpaceRequirement>,
    #[serde(default)]
    pub adjacency_requirements: Vec<AdjacencyRequirement>,
    pub storey_count: usize,
    /// Empty: unbounded. One rectangle: shared by every storey. Otherwise one per storey.
    #[serde(default)]
    pub boundary: Vec<Rect<f64>>,
    #[serde(default)]
    pub objective_weights: PenaltyWeights,
    #[serde(default)]
    pub site: SiteSpec,
    /// Internal gain profiles in W/m² per hour-of-week.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gain_profiles: BTreeMap<String, Vec<f64>>,
}

impl SpaceProgram {
    pub fn space(&self, id: &str) -> Option<&SpaceRequirement> {
        self.spaces.iter().find(|s| s.id == id)
    }

    pub fn boundary_for(&self, storey: usize) -> Option<Rect<f64>> {
        match self.boundary.len() {
            0 => None,
            1 => Some(self.boundary[0]),
            _ => self.boundary.get(storey).copied(),
        }
    }

    pub fn storey_target_area(&self, storey: usize) -> f64 {
        self.spaces
            .iter()
            .filter(|s| s.storey == storey)
            .map(|s| s.target_area)
            .sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Checks every program invariant; problems are reported as data.
pub fn validate_program(program: &SpaceProgram) -> ValidationReport {
    let mut report = ValidationReport::default();
    if program.storey_count < 1 {
        report.errors.push("storey_count must be at least 1".into());
    }
    let mut seen = BTreeSet::new();
    for s in &program.spaces {
        if !seen.insert(s.id.as_str()) {
            report.errors.push(format!("duplicate id '{}'", s.id));
        }
        if s.storey >= program.storey_count {
            report.errors.push(format!(
                "space '{}' assigned to storey {} outside [0, {})",
                s.id, s.storey, program.storey_count
            ));
        }
        if !(s.target_area > 0.0) || !(s.min_side > 0.0) {
            report.errors.push(format!(
                "space '{}' needs positive target_area and min_side",
                s.id
            ));
        } else if s.target_area < s.min_side * s.min_side / MAX_ASPECT {
            report.errors.push(format!(
                "space '{}' target_area {} unsatisfiable with min_side {}",
                s.id, s.target_area, s.min_side
            ));
        }
        if let Some(p) = &s.gain_profile {
            if !program.gain_profiles.contains_key(p) {
                report.errors.push(format!(
                    "space '{}' references unknown gain profile '{}'",
                    s.id, p
                ));
            }
        }
    }
    for (name, profile) in &program.gain_profiles {
        if profile.len() != HOURS_PER_WEEK {
            report.errors.push(format!(
                "gain profile '{}' has {} values, expected {}",
                name,
                profile.len(),
                HOURS_PER_WEEK
            ));
        }
        if profile.iter().any(|v| !(*v >= 0.0)) {
            report.errors.push(format!(
                "gain profile '{}' has negative or non-finite values",
                name
            ));
        }
    }
    for adj in &program.adjacency_requirements {
        match (program.space(&adj.a), program.space(&adj.b)) {
            (Some(a), Some(b)) => {
                if a.id == b.id {
                    report
                        .warnings
                        .push(format!("adjacency of '{}' with itself ignored", a.id));
                } else if adj.kind == AdjacencyKind::DoorConnected && a.storey != b.storey {
                    report.errors.push(format!(
                        "door_connected spaces '{}' and '{}' are on different storeys",
                        a.id, b.id
                    ));
                }
            }
            _ => report
                .errors
                .push(format!("unknown space in adjacency ({}, {})", adj.a, adj.b)),
        }
    }
    let n = program.boundary.len();
    if n > 1 && n != program.storey_count {
        report.errors.push(format!(
            "boundary lists {} rectangles for {} storeys",
            n, program.storey_count
        ));
    }
    for b in &program.boundary {
        if !(b.width > 0.0 && b.depth > 0.0) {
            report
                .errors
                .push("boundary rectangles need positive dimensions".into());
        }
    }
    for storey in 0..program.storey_count {
        if let Some(b) = program.boundary_for(storey) {
            let area = program.storey_target_area(storey);
            if area > b.area() + 1e-9 {
                report.errors.push(format!(
                    "program area {} exceeds boundary {} on storey {}",
                    area,
                    b.area(),
                    storey
                ));
            }
        }
    }
    let weights = program.objective_weights.as_array();
    if weights.iter().any(|w| !(*w >= 0.0)) {
        report
            .errors
            .push("objective weights must be non-negative".into());
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpeningKind {
    Window,
    Door,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Opening {
    pub id: String,
    pub kind: OpeningKind,
    pub owner: String,
    pub wall: Orientation,
    /// Distance from the wall's low-coordinate end (west for N/S walls, south for E/W walls).
    pub offset_along_wall: f64,
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub sill: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connects_to: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overhang {
    /// Window id.
    pub owner: String,
    pub depth: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceBox {
    pub id: String,
    pub storey: usize,
    pub rect: Rect<f64>,
}

impl SpaceBox {
    /// Thermal zone name, `Z-<storey>-<id>`.
    pub fn zone_name(&self) -> String {
        format!("Z-{}-{}", self.storey, self.id)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Storey {
    pub index: usize,
    pub spaces: Vec<SpaceBox>,
    #[serde(default)]
    pub openings: Vec<Opening>,
    #[serde(default)]
    pub shades: Vec<Overhang>,
}

/// A concrete multi-storey design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    #[serde(default = "default_storey_height")]
    pub storey_height: f64,
    pub storeys: Vec<Storey>,
}

fn default_storey_height() -> f64 {
    DEFAULT_STOREY_HEIGHT
}

/// Piece of a wall: either exterior or shared with one neighbour.
#[derive(Clone, Debug, PartialEq)]
pub struct WallSegment {
    pub start: f64,
    pub end: f64,
    pub neighbor: Option<String>,
}

impl Layout {
    pub fn new(storey_count: usize) -> Self {
        Self {
            storey_height: DEFAULT_STOREY_HEIGHT,
            storeys: (0..storey_count)
                .map(|index| Storey {
                    index,
                    ..Default::default()
                })
                .collect(),
        }
    }

    pub fn spaces(&self) -> impl Iterator<Item = &SpaceBox> {
        self.storeys.iter().flat_map(|s| s.spaces.iter())
    }

    pub fn openings(&self) -> impl Iterator<Item = &Opening> {
        self.storeys.iter().flat_map(|s| s.openings.iter())
    }

    pub fn space_count(&self) -> usize {
        self.storeys.iter().map(|s| s.spaces.len()).sum()
    }

    pub fn space(&self, id: &str) -> Option<&SpaceBox> {
        self.spaces().find(|s| s.id == id)
    }

    pub fn space_mut(&mut self, id: &str) -> Option<&mut SpaceBox> {
        self.storeys
            .iter_mut()
            .flat_map(|s| s.spaces.iter_mut())
            .find(|s| s.id == id)
    }

    /// Storey index of a space.
    pub fn storey_of(&self, id: &str) -> Option<usize> {
        self.space(id).map(|s| s.storey)
    }

    pub fn opening(&self, id: &str) -> Option<&Opening> {
        self.openings().find(|o| o.id == id)
    }

    pub fn opening_mut(&mut self, id: &str) -> Option<&mut Opening> {
        self.storeys
            .iter_mut()
            .flat_map(|s| s.openings.iter_mut())
            .find(|o| o.id == id)
    }

    pub fn overhang(&self, window_id: &str) -> Option<&Overhang> {
        self.storeys
            .iter()
            .flat_map(|s| s.shades.iter())
            .find(|o| o.owner == window_id)
    }

    /// Absolute span along the wall occupied by an opening.
    pub fn opening_span(&self, opening: &Opening) -> Option<(f64, f64)> {
        let owner = self.space(&opening.owner)?;
        let wall = owner.rect.wall(opening.wall);
        let s = wall.start + opening.offset_along_wall;
        Some((s, s + opening.width))
    }

    /// Splits a wall of `space` into exterior and shared segments, ordered along the wall.
    pub fn wall_segments(&self, space: &SpaceBox, side: Orientation) -> Vec<WallSegment> {
        let wall = space.rect.wall(side);
        let mut shared: Vec<(f64, f64, &str)> = self.storeys[space.storey]
            .spaces
            .iter()
            .filter(|o| o.id != space.id)
            .filter_map(|o| {
                space
                    .rect
                    .shared_interval(side, &o.rect)
                    .map(|(s, e)| (s, e, o.id.as_str()))
            })
            .collect();
        shared.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(b.2)));
        let mut out = Vec::new();
        let mut cursor = wall.start;
        for (s, e, id) in shared {
            // overlapping neighbours leave the covered part to the first one
            let s = s.max(cursor);
            if e <= s {
                continue;
            }
            if s > cursor + 1e-9 {
                out.push(WallSegment {
                    start: cursor,
                    end: s,
                    neighbor: None,
                });
            }
            out.push(WallSegment {
                start: s,
                end: e,
                neighbor: Some(id.to_string()),
            });
            cursor = e;
        }
        if wall.end > cursor + 1e-9 {
            out.push(WallSegment {
                start: cursor,
                end: wall.end,
                neighbor: None,
            });
        }
        out
    }

    /// Hard structural invariants (positive dimensions, consistent storey indices, unique ids,
    /// openings and shades with existing owners). Soft geometric quality is a penalty matter.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let mut ids = BTreeSet::new();
        for (i, storey) in self.storeys.iter().enumerate() {
            if storey.index != i {
                errs.push(format!(
                    "storey at position {} has index {}",
                    i, storey.index
                ));
            }
            for s in &storey.spaces {
                if !ids.insert(s.id.clone()) {
                    errs.push(format!("duplicate space id '{}'", s.id));
                }
                if s.storey != i {
                    errs.push(format!(
                        "space '{}' has storey {} inside storey {}",
                        s.id, s.storey, i
                    ));
                }
                if !(s.rect.width > 0.0 && s.rect.depth > 0.0) {
                    errs.push(format!("space '{}' has non-positive dimensions", s.id));
                }
            }
        }
        let mut opening_ids = BTreeSet::new();
        for storey in &self.storeys {
            for o in &storey.openings {
                if !opening_ids.insert(o.id.clone()) {
                    errs.push(format!("duplicate opening id '{}'", o.id));
                }
                if !storey.spaces.iter().any(|s| s.id == o.owner) {
                    errs.push(format!(
                        "opening '{}' owner '{}' not on storey {}",
                        o.id, o.owner, storey.index
                    ));
                }
                if !(o.width > 0.0 && o.height > 0.0) {
                    errs.push(format!("opening '{}' has non-positive size", o.id));
                }
            }
            for sh in &storey.shades {
                match storey.openings.iter().find(|o| o.id == sh.owner) {
                    Some(o) if o.kind == OpeningKind::Window => {}
                    _ => errs.push(format!(
                        "overhang owner '{}' is not a window on storey {}",
                        sh.owner, storey.index
                    )),
                }
                if !(0.0..=MAX_OVERHANG_DEPTH).contains(&sh.depth) {
                    errs.push(format!(
                        "overhang on '{}' depth {} outside [0, {}]",
                        sh.owner, sh.depth, MAX_OVERHANG_DEPTH
                    ));
                }
            }
        }
        errs
    }

    /// True when the opening lies within its owner's wall and storey height.
    pub fn opening_fits_wall(&self, opening: &Opening) -> bool {
        let Some(owner) = self.space(&opening.owner) else {
            return false;
        };
        let len = owner.rect.wall_length(opening.wall);
        opening.offset_along_wall >= -TOL
            && opening.offset_along_wall + opening.width <= len + TOL
            && opening.height + opening.sill <= self.storey_height + TOL
    }

    /// Stable content hash (hex, 16 chars) used for ranking ties and solution ids.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("layout serializes");
        let digest = Sha256::digest(&bytes);
        digest[..8].iter().map(|b| format!("{:02x}", b)).collect()
    }

    pub fn floor_area(&self) -> f64 {
        self.spaces().map(|s| s.rect.area()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdjacencyEdge {
    pub a: String,
    pub b: String,
    pub kind: AdjacencyKind,
}

impl AdjacencyEdge {
    fn new(x: &str, y: &str, kind: AdjacencyKind) -> Self {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        Self {
            a: a.to_string(),
            b: b.to_string(),
            kind,
        }
    }
}

/// Undirected labelled graph over space ids.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<AdjacencyEdge>,
}

impl AdjacencyGraph {
    pub fn has_edge(&self, x: &str, y: &str, kind: AdjacencyKind) -> bool {
        self.edges.contains(&AdjacencyEdge::new(x, y, kind))
    }

    /// Connected component containing `start`, following edges of `kind`.
    pub fn component(&self, start: &str, kind: AdjacencyKind) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![start.to_string()];
        while let Some(n) = stack.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            for e in self.edges.iter().filter(|e| e.kind == kind) {
                if e.a == n && !seen.contains(&e.b) {
                    stack.push(e.b.clone());
                } else if e.b == n && !seen.contains(&e.a) {
                    stack.push(e.a.clone());
                }
            }
        }
        seen
    }
}

/// Wall adjacency and door connections between spaces of a layout.
pub fn adjacency_graph(layout: &Layout) -> AdjacencyGraph {
    let mut g = AdjacencyGraph::default();
    for storey in &layout.storeys {
        for s in &storey.spaces {
            g.nodes.insert(s.id.clone());
        }
        for (i, a) in storey.spaces.iter().enumerate() {
            for b in &storey.spaces[i + 1..] {
                if a.rect.shared_wall_length(&b.rect) >= MIN_SHARED_WALL - TOL {
                    g.edges.insert(AdjacencyEdge::new(
                        &a.id,
                        &b.id,
                        AdjacencyKind::WallAdjacent,
                    ));
                }
            }
        }
    }
    for o in layout.openings() {
        if let (OpeningKind::Door, Some(other)) = (o.kind, &o.connects_to) {
            if g.nodes.contains(other) && *other != o.owner {
                g.edges.insert(AdjacencyEdge::new(
                    &o.owner,
                    other,
                    AdjacencyKind::DoorConnected,
                ));
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn req(id: &str, area: f64, storey: usize) -> SpaceRequirement {
        SpaceRequirement {
            id: id.into(),
            target_area: area,
            min_side: 2.0,
            storey,
            preferred_window_orientations: BTreeSet::new(),
            gain_profile: None,
        }
    }

    fn program(spaces: Vec<SpaceRequirement>) -> SpaceProgram {
        SpaceProgram {
            spaces,
            adjacency_requirements: vec![],
            storey_count: 1,
            boundary: vec![],
            objective_weights: PenaltyWeights::default(),
            site: SiteSpec::default(),
            gain_profiles: BTreeMap::new(),
        }
    }

    #[test]
    fn duplicate_id_is_reported() {
        let p = program(vec![req("kitchen", 12.0, 0), req("kitchen", 10.0, 0)]);
        let r = validate_program(&p);
        assert!(r.errors.iter().any(|e| e.contains("duplicate id")));
    }

    #[test]
    fn unknown_adjacency_is_reported() {
        let mut p = program(vec![req("a", 12.0, 0)]);
        p.adjacency_requirements.push(AdjacencyRequirement {
            a: "a".into(),
            b: "ghost".into(),
            kind: AdjacencyKind::WallAdjacent,
        });
        let r = validate_program(&p);
        assert!(r
            .errors
            .iter()
            .any(|e| e.contains("unknown space in adjacency")));
    }

    #[test]
    fn program_area_exceeding_boundary() {
        let mut p = program(vec![
            req("a", 20.0, 0),
            req("b", 20.0, 0),
            req("c", 20.0, 0),
        ]);
        p.boundary = vec![Rect::new(0.0, 0.0, 10.0, 5.0)];
        let r = validate_program(&p);
        assert!(
            r.errors
                .iter()
                .any(|e| e.contains("program area 60 exceeds boundary 50")),
            "{:?}",
            r.errors
        );
    }

    #[test]
    fn valid_program_has_no_errors_and_validation_is_idempotent() {
        let mut p = program(vec![req("a", 12.0, 0), req("b", 9.0, 0)]);
        p.boundary = vec![Rect::new(0.0, 0.0, 10.0, 10.0)];
        let before = p.clone();
        let r1 = validate_program(&p);
        let r2 = validate_program(&p);
        assert!(r1.is_ok());
        assert_eq!(r1, r2);
        assert_eq!(p, before);
    }

    #[test]
    fn storey_and_profile_checks() {
        let mut p = program(vec![req("a", 12.0, 3)]);
        p.spaces[0].gain_profile = Some("office".into());
        let r = validate_program(&p);
        assert_eq!(r.errors.len(), 2, "{:?}", r.errors);
    }

    fn two_boxes(gap: f64) -> Layout {
        let mut l = Layout::new(1);
        l.storeys[0].spaces.push(SpaceBox {
            id: "a".into(),
            storey: 0,
            rect: Rect::new(0.0, 0.0, 4.0, 4.0),
        });
        l.storeys[0].spaces.push(SpaceBox {
            id: "b".into(),
            storey: 0,
            rect: Rect::new(4.0 + gap, 0.0, 4.0, 4.0),
        });
        l
    }

    #[test]
    fn shared_edge_gives_wall_adjacency() {
        let g = adjacency_graph(&two_boxes(0.0));
        assert_eq!(g.edges.len(), 1);
        assert!(g.has_edge("a", "b", AdjacencyKind::WallAdjacent));
        assert!(adjacency_graph(&two_boxes(0.1)).edges.is_empty());
    }

    #[test]
    fn door_adds_door_edge() {
        let mut l = two_boxes(0.0);
        l.storeys[0].openings.push(Opening {
            id: "d1".into(),
            kind: OpeningKind::Door,
            owner: "a".into(),
            wall: Orientation::E,
            offset_along_wall: 1.0,
            width: 0.8,
            height: 2.1,
            sill: 0.0,
            connects_to: Some("b".into()),
        });
        let g = adjacency_graph(&l);
        assert_eq!(g.edges.len(), 2);
        assert!(g.has_edge("b", "a", AdjacencyKind::DoorConnected));
    }

    /// Brute-force shared length: sample each boundary edge of `a` densely and
    /// count samples lying on an edge of `b`.
    fn brute_shared(a: &Rect<f64>, b: &Rect<f64>) -> f64 {
        let n = 4000;
        let mut total = 0.0;
        let corners = |r: &Rect<f64>| {
            [
                (r.x, r.y),
                (r.x_max(), r.y),
                (r.x_max(), r.y_max()),
                (r.x, r.y_max()),
            ]
        };
        let on_boundary = |r: &Rect<f64>, px: f64, py: f64| {
            let inside_x = px >= r.x - 1e-9 && px <= r.x_max() + 1e-9;
            let inside_y = py >= r.y - 1e-9 && py <= r.y_max() + 1e-9;
            ((py - r.y).abs() < 1e-9 || (py - r.y_max()).abs() < 1e-9) && inside_x
                || ((px - r.x).abs() < 1e-9 || (px - r.x_max()).abs() < 1e-9) && inside_y
        };
        let c = corners(a);
        for k in 0..4 {
            let (x0, y0) = c[k];
            let (x1, y1) = c[(k + 1) % 4];
            let len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
            let step = len / n as f64;
            for i in 0..n {
                let t = (i as f64 + 0.5) / n as f64;
                if on_boundary(b, x0 + t * (x1 - x0), y0 + t * (y1 - y0)) {
                    total += step;
                }
            }
        }
        total
    }

    #[test]
    fn corner_touch_gives_no_edge() {
        let mut l = Layout::new(1);
        l.storeys[0].spaces.push(SpaceBox {
            id: "a".into(),
            storey: 0,
            rect: Rect::new(0.0, 0.0, 4.0, 4.0),
        });
        l.storeys[0].spaces.push(SpaceBox {
            id: "b".into(),
            storey: 0,
            rect: Rect::new(4.0, 4.0, 3.0, 3.0),
        });
        let a = l.storeys[0].spaces[0].rect;
        let b = l.storeys[0].spaces[1].rect;
        assert!(brute_shared(&a, &b) < 1e-6);
        assert_eq!(a.shared_wall_length(&b), 0.0);
        assert!(adjacency_graph(&l).edges.is_empty());
    }

    #[test]
    fn shared_length_matches_brute_force_for_partial_contact() {
        let a = Rect::new(0.0, 0.0, 4.0, 4.0);
        let b = Rect::new(4.0, 2.5, 3.0, 3.0);
        assert!((brute_shared(&a, &b) - a.shared_wall_length(&b)).abs() < 1e-3);
        assert!((a.shared_wall_length(&b) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn adjacency_invariant_under_translation() {
        let mut l = two_boxes(0.0);
        l.storeys[0].spaces.push(SpaceBox {
            id: "c".into(),
            storey: 0,
            rect: Rect::new(0.0, 4.0, 8.0, 2.0),
        });
        let g0 = adjacency_graph(&l);
        for s in &mut l.storeys[0].spaces {
            s.rect = s.rect.translated(3.7, -12.25);
        }
        assert_eq!(adjacency_graph(&l), g0);
    }

    #[test]
    fn wall_segments_split_at_neighbours() {
        let mut l = Layout::new(1);
        l.storeys[0].spaces.push(SpaceBox {
            id: "a".into(),
            storey: 0,
            rect: Rect::new(0.0, 0.0, 6.0, 4.0),
        });
        l.storeys[0].spaces.push(SpaceBox {
            id: "b".into(),
            storey: 0,
            rect: Rect::new(2.0, 4.0, 2.0, 2.0),
        });
        let a = l.space("a").unwrap().clone();
        let segs = l.wall_segments(&a, Orientation::N);
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[1].neighbor.as_deref(), Some("b"));
        assert_eq!((segs[1].start, segs[1].end), (2.0, 4.0));
    }

    #[test]
    fn site_rotation_maps_walls() {
        let site = SiteSpec {
            latitude: 40.0,
            hemisphere: Hemisphere::North,
            north_angle: 92.0,
        };
        assert_eq!(site.true_orientation(Orientation::N), Orientation::E);
        assert_eq!(site.local_wall(Orientation::E), Orientation::N);
    }
}
