#![allow(dead_code)]

use planforge_core::geometry::Orientation;
use planforge_core::model::{Layout, Opening, OpeningKind, SpaceBox};
use planforge_core::project::Project;
use planforge_core::surrogate::Location;
use planforge_core::systems::{DhwSpec, ElectricCenterSpec, HvacTemplate, SystemsSpec};
use planforge_core::Rect;
use planforge_idf::{emit_project, IdfDocument, IdfError};

pub const SINGLE: &str = include_str!("../../../core/data/projects/single_storey.json");
pub const TWO: &str = include_str!("../../../core/data/projects/two_storey.json");
pub const THREE: &str = include_str!("../../../core/data/projects/three_storey.json");

pub fn project(text: &str) -> Project {
    Project::from_json_str(text).expect("bundled project parses")
}

pub fn location() -> Location {
    Location {
        name: "Test Site".into(),
        latitude: 40.0,
        longitude: -105.0,
        time_zone: -7.0,
        elevation: 1600.0,
    }
}

/// Every HVAC template with and without hot water and generation.
pub fn system_variants() -> Vec<(String, SystemsSpec)> {
    let mut out = Vec::new();
    for hvac in HvacTemplate::ALL {
        let base = SystemsSpec {
            hvac,
            ..SystemsSpec::default()
        };
        out.push((format!("{hvac:?}"), base.clone()));
        let full = SystemsSpec {
            dhw: Some(DhwSpec {
                tank_volume: 0.2,
                solar_collector_area: 4.0,
                use_flow_profile: None,
            }),
            electric_center: Some(ElectricCenterSpec {
                pv_area: 10.0,
                wind_rated_w: 1500.0,
                battery_kwh: 5.0,
                inverter_efficiency: 0.95,
            }),
            ..base
        };
        out.push((format!("{hvac:?}+dhw+ec"), full));
    }
    out
}

pub fn rect(x: f64, y: f64, w: f64, d: f64) -> Rect {
    Rect::new(x, y, w, d)
}

pub fn single_storey(spaces: &[(&str, Rect)]) -> Layout {
    let mut l = Layout::new(1);
    for (id, r) in spaces {
        l.storeys[0].spaces.push(SpaceBox {
            id: id.to_string(),
            storey: 0,
            rect: *r,
        });
    }
    l
}

pub fn window(id: &str, owner: &str, wall: Orientation, offset: f64) -> Opening {
    Opening {
        id: id.into(),
        kind: OpeningKind::Window,
        owner: owner.into(),
        wall,
        offset_along_wall: offset,
        width: 1.2,
        height: 1.2,
        sill: 0.9,
        connects_to: None,
    }
}

/// A 4 m by 5 m box with one south window, the smallest model the emitter accepts.
pub fn minimal_layout() -> Layout {
    let mut l = single_storey(&[("room", rect(0.0, 0.0, 4.0, 5.0))]);
    l.storeys[0]
        .openings
        .push(window("w1", "room", Orientation::S, 1.0));
    l
}

/// Emits `layout` with the settings of the single-storey bundled project.
pub fn emit_with(layout: &Layout, systems: SystemsSpec) -> Result<IdfDocument, IdfError> {
    let mut p = project(SINGLE);
    p.systems = systems;
    emit_project(&p, layout, &location())
}
