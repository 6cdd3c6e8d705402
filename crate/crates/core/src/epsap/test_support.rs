use std::collections::{BTreeMap, BTreeSet};

use crate::geometry::{Orientation, Rect};
use crate::model::*;

pub fn bare_program(spaces: &[(&str, f64)]) -> SpaceProgram {
    SpaceProgram {
        spaces: spaces
            .iter()
            .map(|(id, area)| SpaceRequirement {
                id: id.to_string(),
                target_area: *area,
                min_side: 1.0,
                storey: 0,
                preferred_window_orientations: BTreeSet::new(),
                gain_profile: None,
            })
            .collect(),
        adjacency_requirements: vec![],
        storey_count: 1,
        boundary: vec![],
        objective_weights: PenaltyWeights::default(),
        site: SiteSpec::default(),
        gain_profiles: BTreeMap::new(),
    }
}

pub fn boxes(spec: &[(&str, f64, f64, f64, f64)]) -> Layout {
    let mut l = Layout::new(1);
    for (id, x, y, w, d) in spec {
        l.storeys[0].spaces.push(SpaceBox {
            id: id.to_string(),
            storey: 0,
            rect: Rect::new(*x, *y, *w, *d),
        });
    }
    l
}

/// Two 4x4 rooms sharing a wall, joined by a door, with a south window in `a`.
pub fn compliant_pair() -> (Layout, SpaceProgram) {
    let mut program = bare_program(&[("a", 16.0), ("b", 16.0)]);
    program.boundary = vec![Rect::new(0.0, 0.0, 10.0, 10.0)];
    program.spaces[0].preferred_window_orientations = [Orientation::S].into();
    program.adjacency_requirements.push(AdjacencyRequirement {
        a: "a".into(),
        b: "b".into(),
        kind: AdjacencyKind::DoorConnected,
    });
    let mut layout = boxes(&[("a", 1.0, 1.0, 4.0, 4.0), ("b", 5.0, 1.0, 4.0, 4.0)]);
    layout.storeys[0].openings.push(Opening {
        id: "a-door-b".into(),
        kind: OpeningKind::Door,
        owner: "a".into(),
        wall: Orientation::E,
        offset_along_wall: 1.0,
        width: 0.8,
        height: 2.1,
        sill: 0.0,
        connects_to: Some("b".into()),
    });
    layout.storeys[0].openings.push(Opening {
        id: "a-win-S".into(),
        kind: OpeningKind::Window,
        owner: "a".into(),
        wall: Orientation::S,
        offset_along_wall: 1.0,
        width: 1.2,
        height: 1.2,
        sill: 0.9,
        connects_to: None,
    });
    (layout, program)
}
