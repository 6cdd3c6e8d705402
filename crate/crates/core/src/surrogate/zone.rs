//! Lumped thermal parameters of each zone, taken off the layout geometry.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constructions::{ConstructionSet, SurfaceRole};
use crate::geometry::{Orientation, Rect};
use crate::model::{Hemisphere, Layout, OpeningKind, SiteSpec, SpaceProgram, HOURS_PER_WEEK};
use crate::num::Scalar;
use crate::systems::SystemsSpec;

use super::SurrogateError;

/// Volumetric heat capacity of air used for the infiltration term (Wh/m³K).
pub const AIR_HEAT_CAPACITY: f64 = 0.33;
/// Default lumped capacitance per m² of floor (J/K·m²), medium-weight construction.
pub const UNIT_CAPACITANCE: f64 = 165e3;
/// Default continuous internal gain (W/m²).
pub const DEFAULT_GAIN_DENSITY: f64 = 4.0;

/// Multiplier applied to a window's aperture for an overhang of `depth` over a window of
/// `height` (both m).
pub fn shading_multiplier(depth: f64, height: f64) -> f64 {
    if height <= 0.0 {
        return 1.0;
    }
    1.0 - 0.6 * (depth / height).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneThermalParams<T> {
    pub zone_id: String,
    /// Envelope conduction plus infiltration (W/K).
    pub ua_ext: T,
    /// Lumped capacitance (J/K).
    pub capacitance: T,
    /// Effective solar aperture per true orientation (m²).
    pub window_gain: BTreeMap<Orientation, T>,
    /// Internal gains per hour of week (W).
    pub internal_gain_profile: Vec<T>,
    /// Conductance towards each neighbouring zone (W/K).
    pub ua_int: BTreeMap<String, T>,
}

impl<T: Scalar> ZoneThermalParams<T> {
    pub fn ua_total(&self) -> T {
        self.ua_int.values().fold(self.ua_ext, |a, &b| a + b)
    }

    pub fn cast<U: Scalar>(&self) -> ZoneThermalParams<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        ZoneThermalParams {
            zone_id: self.zone_id.clone(),
            ua_ext: c(self.ua_ext),
            capacitance: c(self.capacitance),
            window_gain: self.window_gain.iter().map(|(k, &v)| (*k, c(v))).collect(),
            internal_gain_profile: self.internal_gain_profile.iter().map(|&v| c(v)).collect(),
            ua_int: self
                .ua_int
                .iter()
                .map(|(k, &v)| (k.clone(), c(v)))
                .collect(),
        }
    }
}

/// A building as a network of one-node zones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalModel<T> {
    pub zones: Vec<ZoneThermalParams<T>>,
    #[serde(default)]
    pub hemisphere: Hemisphere,
}

impl<T: Scalar> ThermalModel<T> {
    pub fn cast<U: Scalar>(&self) -> ThermalModel<U> {
        ThermalModel {
            zones: self.zones.iter().map(ZoneThermalParams::cast).collect(),
            hemisphere: self.hemisphere,
        }
    }
}

/// Inputs to the take-off besides geometry and constructions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZoneOptions {
    pub ach: f64,
    pub unit_capacitance: f64,
    pub default_gain_density: f64,
    /// Gain profile (W/m² per hour of week) per space id.
    pub gain_profiles: BTreeMap<String, Vec<f64>>,
    pub site: SiteSpec,
}

impl Default for ZoneOptions {
    fn default() -> Self {
        Self {
            ach: 0.0,
            unit_capacitance: UNIT_CAPACITANCE,
            default_gain_density: DEFAULT_GAIN_DENSITY,
            gain_profiles: BTreeMap::new(),
            site: SiteSpec::default(),
        }
    }
}

impl ZoneOptions {
    /// Options for a program: ventilation from the systems, profiles resolved per space
    /// (systems assignment first, then the program's).
    pub fn for_program(program: &SpaceProgram, systems: &SystemsSpec) -> Self {
        let mut gain_profiles = BTreeMap::new();
        for s in &program.spaces {
            let id = systems.gains.get(&s.id).or(s.gain_profile.as_ref());
            if let Some(profile) = id.and_then(|id| program.gain_profiles.get(id)) {
                gain_profiles.insert(s.id.clone(), profile.clone());
            }
        }
        Self {
            ach: systems.ventilation.ach,
            gain_profiles,
            site: program.site.clone(),
            ..Self::default()
        }
    }
}

fn area_below(layout: &Layout, storey: usize, r: &Rect<f64>) -> f64 {
    if storey == 0 {
        return 0.0;
    }
    let below: Vec<Rect<f64>> = layout.storeys[storey - 1]
        .spaces
        .iter()
        .map(|s| s.rect)
        .collect();
    r.covered_area(&below)
}

fn area_above(layout: &Layout, storey: usize, r: &Rect<f64>) -> f64 {
    match layout.storeys.get(storey + 1) {
        Some(up) => r.covered_area(&up.spaces.iter().map(|s| s.rect).collect::<Vec<_>>()),
        None => 0.0,
    }
}

/// Derives one parameter set per space.
///
/// Exterior walls lose window and exterior door areas; shared wall segments become
/// partition conductances. Floors are ground-coupled on storey 0 and exposed where nothing
/// lies below; roofs are the parts not covered by the storey above.
pub fn derive_zone_params(
    layout: &Layout,
    constructions: &ConstructionSet,
    options: &ZoneOptions,
) -> Result<ThermalModel<f64>, SurrogateError> {
    let u_wall = constructions.role_u_value(SurfaceRole::ExteriorWall)?;
    let u_roof = constructions.role_u_value(SurfaceRole::Roof)?;
    let u_ground = constructions.role_u_value(SurfaceRole::GroundFloor)?;
    let u_part = constructions.role_u_value(SurfaceRole::InteriorWall)?;
    let u_slab = constructions.role_u_value(SurfaceRole::InteriorFloor)?;
    let u_door = constructions.role_u_value(SurfaceRole::Door)?;
    let glazing = constructions.window_glazing()?;
    let h = layout.storey_height;

    let mut zones = Vec::new();
    for storey in &layout.storeys {
        for space in &storey.spaces {
            let r = space.rect;
            let mut ua_ext = 0.0;
            let mut ua_int: BTreeMap<String, f64> = BTreeMap::new();
            let mut window_gain: BTreeMap<Orientation, f64> = BTreeMap::new();
            for side in Orientation::ALL {
                let mut exterior_len = 0.0;
                for seg in layout.wall_segments(space, side) {
                    let len = seg.end - seg.start;
                    match seg.neighbor {
                        Some(n) => *ua_int.entry(n).or_default() += len * h * u_part,
                        None => exterior_len += len,
                    }
                }
                let mut opaque = exterior_len * h;
                for o in storey
                    .openings
                    .iter()
                    .filter(|o| o.owner == space.id && o.wall == side)
                {
                    let area = o.width * o.height;
                    match (o.kind, &o.connects_to) {
                        (OpeningKind::Window, _) => {
                            opaque -= area;
                            ua_ext += area * glazing.u_factor;
                            let depth = layout.overhang(&o.id).map_or(0.0, |s| s.depth);
                            let facing = options.site.true_orientation(side);
                            *window_gain.entry(facing).or_default() +=
                                area * glazing.shgc * shading_multiplier(depth, o.height);
                        }
                        (OpeningKind::Door, None) => {
                            opaque -= area;
                            ua_ext += area * u_door;
                        }
                        (OpeningKind::Door, Some(_)) => {}
                    }
                }
                ua_ext += opaque.max(0.0) * u_wall;
            }
            let floor = r.area();
            let below = area_below(layout, space.storey, &r);
            let above = area_above(layout, space.storey, &r);
            ua_ext += (floor - below) * u_ground + (floor - above) * u_roof;
            let vertical = [space.storey.checked_sub(1), Some(space.storey + 1)];
            for other in vertical
                .into_iter()
                .flatten()
                .filter_map(|k| layout.storeys.get(k))
            {
                for o in &other.spaces {
                    let shared = r.overlap_area(&o.rect);
                    if shared > 1e-9 {
                        *ua_int.entry(o.id.clone()).or_default() += shared * u_slab;
                    }
                }
            }
            ua_ext += AIR_HEAT_CAPACITY * options.ach * floor * h;

            let internal_gain_profile = match options.gain_profiles.get(&space.id) {
                Some(p) => p.iter().map(|w| w * floor).collect(),
                None => vec![options.default_gain_density * floor; HOURS_PER_WEEK],
            };
            zones.push(ZoneThermalParams {
                zone_id: space.id.clone(),
                ua_ext,
                capacitance: floor * options.unit_capacitance,
                window_gain,
                internal_gain_profile,
                ua_int,
            });
        }
    }
    Ok(ThermalModel {
        zones,
        hemisphere: options.site.hemisphere,
    })
}
