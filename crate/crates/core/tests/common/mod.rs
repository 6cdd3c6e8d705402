#![allow(dead_code)]

use planforge_core::constructions::{
    Construction, ConstructionSet, Glazing, Material, SurfaceAssignments,
};
use planforge_core::geometry::{Orientation, Rect};
use planforge_core::model::{Layout, Opening, OpeningKind, SpaceBox};
use planforge_core::surrogate::{Location, WeatherSeries, HOURS_PER_YEAR};

/// Constructions with round U-values: walls 0.5, roof and floors 0.3, partitions 2.0,
/// slabs 1.5, doors 2.5, glazing U 2.8 / SHGC 0.6.
pub fn round_constructions() -> ConstructionSet {
    let u = |name: &str, u: f64| Material {
        name: name.into(),
        conductivity: 0.1 * u,
        density: 1000.0,
        specific_heat: 1000.0,
        thickness: 0.1,
    };
    let cons = |name: &str| Construction {
        name: name.into(),
        layers: vec![name.into()],
    };
    let names = [
        ("wall", 0.5),
        ("roof", 0.3),
        ("floor", 0.3),
        ("part", 2.0),
        ("slab", 1.5),
        ("door", 2.5),
    ];
    ConstructionSet {
        id: "round".into(),
        materials: names.iter().map(|(n, v)| u(n, *v)).collect(),
        constructions: names.iter().map(|(n, _)| cons(n)).collect(),
        glazings: vec![Glazing {
            name: "glass".into(),
            u_factor: 2.8,
            shgc: 0.6,
        }],
        assignments: SurfaceAssignments {
            exterior_wall: "wall".into(),
            roof: "roof".into(),
            ground_floor: "floor".into(),
            interior_wall: "part".into(),
            interior_floor: "slab".into(),
            door: "door".into(),
            window: "glass".into(),
        },
    }
}

pub fn layout_of(storey_count: usize, spaces: &[(&str, usize, Rect<f64>)]) -> Layout {
    let mut l = Layout::new(storey_count);
    for (id, storey, rect) in spaces {
        l.storeys[*storey].spaces.push(SpaceBox {
            id: id.to_string(),
            storey: *storey,
            rect: *rect,
        });
    }
    l
}

pub fn window(
    id: &str,
    owner: &str,
    wall: Orientation,
    offset: f64,
    width: f64,
    height: f64,
) -> Opening {
    Opening {
        id: id.into(),
        kind: OpeningKind::Window,
        owner: owner.into(),
        wall,
        offset_along_wall: offset,
        width,
        height,
        sill: 0.9,
        connects_to: None,
    }
}

pub fn constant_weather(t: f64, dni: f64, dhi: f64) -> WeatherSeries<f64> {
    WeatherSeries {
        location: Location::default(),
        dry_bulb: vec![t; HOURS_PER_YEAR],
        ghi: vec![dhi + dni; HOURS_PER_YEAR],
        dni: vec![dni; HOURS_PER_YEAR],
        dhi: vec![dhi; HOURS_PER_YEAR],
        warnings: Vec::new(),
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
