//! Thermal zones, their envelope surfaces, constructions and internal loads.
//!
//! Coordinates are absolute (zone origins at 0). Vertices start at the upper-left corner and
//! run counter-clockwise seen from outside the zone.

use planforge_core::constructions::{ConstructionSet, SurfaceRole};
use planforge_core::epsap::intrinsic_penalty;
use planforge_core::geometry::{Orientation, Rect, TOL};
use planforge_core::model::{Layout, Opening, OpeningKind, SpaceBox};
use planforge_core::surrogate::ZoneOptions;

use crate::builder::{checked_name, num, RecordBuilder};
use crate::defaults::Defaults;
use crate::document::Record;
use crate::IdfError;

pub const ALWAYS_ON: &str = "Always On";
pub const FRACTION: &str = "Fraction";
pub const TEMPERATURE: &str = "Temperature";
pub const ANY_NUMBER: &str = "Any Number";

/// A zone as the system templates see it.
#[derive(Clone, Debug, PartialEq)]
pub struct ZoneInfo {
    pub space_id: String,
    pub name: String,
    pub storey: usize,
    pub floor_area: f64,
    pub volume: f64,
}

pub type Vertex = [f64; 3];

/// Wall rectangle over `start..end` along `side`, between heights `zb` and `zt`.
pub fn wall_vertices(
    side: Orientation,
    fixed: f64,
    start: f64,
    end: f64,
    zb: f64,
    zt: f64,
) -> [Vertex; 4] {
    let (s, e, f) = (start, end, fixed);
    match side {
        Orientation::S => [[s, f, zt], [s, f, zb], [e, f, zb], [e, f, zt]],
        Orientation::N => [[e, f, zt], [e, f, zb], [s, f, zb], [s, f, zt]],
        Orientation::E => [[f, s, zt], [f, s, zb], [f, e, zb], [f, e, zt]],
        Orientation::W => [[f, e, zt], [f, e, zb], [f, s, zb], [f, s, zt]],
    }
}

/// Horizontal rectangle at height `z`, facing up.
pub fn up_vertices(r: &Rect<f64>, z: f64) -> [Vertex; 4] {
    let (x0, y0, x1, y1) = (r.x, r.y, r.x_max(), r.y_max());
    [[x0, y1, z], [x0, y0, z], [x1, y0, z], [x1, y1, z]]
}

/// Horizontal rectangle at height `z`, facing down.
pub fn down_vertices(r: &Rect<f64>, z: f64) -> [Vertex; 4] {
    let (x0, y0, x1, y1) = (r.x, r.y, r.x_max(), r.y_max());
    [[x1, y1, z], [x1, y0, z], [x0, y0, z], [x0, y1, z]]
}

pub fn with_vertices(mut b: RecordBuilder, vertices: &[Vertex]) -> RecordBuilder {
    b = b.set("Number of Vertices", vertices.len());
    for v in vertices {
        for c in v {
            b = b.push(num(*c));
        }
    }
    b
}

/// Names of the constructions each surface family uses, with reversed variants for
/// surfaces that face their partner.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionNames {
    pub exterior_wall: String,
    pub roof: String,
    pub ground_floor: String,
    pub interior_wall: (String, String),
    pub interior_floor: (String, String),
    pub door: (String, String),
    pub window: String,
}

fn material_records(
    set: &ConstructionSet,
    defaults: &Defaults,
) -> Result<(Vec<Record>, ConstructionNames), IdfError> {
    set.check()?;
    let glazing = set.window_glazing()?;
    let roles = [
        SurfaceRole::ExteriorWall,
        SurfaceRole::Roof,
        SurfaceRole::GroundFloor,
        SurfaceRole::InteriorWall,
        SurfaceRole::InteriorFloor,
        SurfaceRole::Door,
    ];
    let mut used: Vec<&str> = Vec::new();
    for role in roles {
        let name = set.assigned(role);
        if !used.contains(&name) {
            used.push(name);
        }
    }
    let mut records = Vec::new();
    let mut materials: Vec<&str> = Vec::new();
    for name in &used {
        let c = set.construction(name).expect("checked set");
        for l in &c.layers {
            if !materials.contains(&l.as_str()) {
                materials.push(l);
            }
        }
    }
    for m in &materials {
        let m = set.material(m).expect("checked set");
        records.push(
            RecordBuilder::new("Material")
                .set("Name", checked_name(&m.name)?)
                .num("Thickness", m.thickness)
                .num("Conductivity", m.conductivity)
                .num("Density", m.density)
                .num("Specific Heat", m.specific_heat)
                .build(defaults),
        );
    }
    records.push(
        RecordBuilder::new("WindowMaterial:SimpleGlazingSystem")
            .set("Name", checked_name(&glazing.name)?)
            .num("U-Factor", glazing.u_factor)
            .num("Solar Heat Gain Coefficient", glazing.shgc)
            .build(defaults),
    );
    let construction = |name: &str, layers: &[&str]| -> Result<Record, IdfError> {
        let mut b = RecordBuilder::new("Construction")
            .set("Name", checked_name(name)?)
            .set("Outside Layer", layers[0]);
        for l in &layers[1..] {
            b = b.push(l);
        }
        Ok(b.build(defaults))
    };
    for name in &used {
        let c = set.construction(name).expect("checked set");
        let layers: Vec<&str> = c.layers.iter().map(String::as_str).collect();
        records.push(construction(name, &layers)?);
    }
    records.push(construction(&glazing.name, &[&glazing.name])?);

    let mut reversed = |role: SurfaceRole| -> Result<(String, String), IdfError> {
        let name = set.assigned(role);
        let c = set.construction(name).expect("checked set");
        let mut layers: Vec<&str> = c.layers.iter().map(String::as_str).collect();
        layers.reverse();
        if layers.iter().eq(c.layers.iter()) {
            return Ok((name.to_string(), name.to_string()));
        }
        let rev = format!("{name} Reversed");
        if !records
            .iter()
            .any(|r| r.class == "Construction" && r.name() == rev)
        {
            records.push(construction(&rev, &layers)?);
        }
        Ok((name.to_string(), rev))
    };
    let names = ConstructionNames {
        interior_wall: reversed(SurfaceRole::InteriorWall)?,
        interior_floor: reversed(SurfaceRole::InteriorFloor)?,
        door: reversed(SurfaceRole::Door)?,
        exterior_wall: set.assigned(SurfaceRole::ExteriorWall).to_string(),
        roof: set.assigned(SurfaceRole::Roof).to_string(),
        ground_floor: set.assigned(SurfaceRole::GroundFloor).to_string(),
        window: glazing.name.clone(),
    };
    Ok((records, names))
}

/// Zones and everything attached to their geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub zones: Vec<ZoneInfo>,
    pub constructions: ConstructionNames,
    pub records: Vec<Record>,
}

struct Ctx<'a> {
    layout: &'a Layout,
    names: &'a ConstructionNames,
    defaults: &'a Defaults,
    out: Vec<Record>,
}

#[derive(Clone, Copy)]
enum Exposure {
    Outdoors,
    Ground,
    Partner,
}

impl Ctx<'_> {
    #[allow(clippy::too_many_arguments)]
    fn surface(
        &mut self,
        name: &str,
        kind: &str,
        construction: &str,
        zone: &str,
        exposure: Exposure,
        partner: &str,
        v: &[Vertex],
    ) {
        let (obc, sun, wind) = match exposure {
            Exposure::Outdoors if kind == "Floor" => ("Outdoors", "NoSun", "WindExposed"),
            Exposure::Outdoors => ("Outdoors", "SunExposed", "WindExposed"),
            Exposure::Ground => ("Ground", "NoSun", "NoWind"),
            Exposure::Partner => ("Surface", "NoSun", "NoWind"),
        };
        let b = RecordBuilder::new("BuildingSurface:Detailed")
            .set("Name", name)
            .set("Surface Type", kind)
            .set("Construction Name", construction)
            .set("Zone Name", zone)
            .set("Outside Boundary Condition", obc)
            .set("Outside Boundary Condition Object", partner)
            .set("Sun Exposure", sun)
            .set("Wind Exposure", wind);
        self.out.push(with_vertices(b, v).build(self.defaults));
    }

    fn heights(&self, storey: usize) -> (f64, f64) {
        let h = self.layout.storey_height;
        (storey as f64 * h, (storey + 1) as f64 * h)
    }
}

fn wall_name(zone: &str, side: Orientation, k: usize) -> String {
    format!("{zone} Wall {} {k}", side.label())
}

/// Host wall surface (name, segment index) of an opening on `space`'s `side` over `span`.
fn host_segment(
    layout: &Layout,
    space: &SpaceBox,
    side: Orientation,
    span: (f64, f64),
    neighbor: Option<&str>,
) -> Option<usize> {
    layout.wall_segments(space, side).iter().position(|s| {
        s.neighbor.as_deref() == neighbor && span.0 >= s.start - TOL && span.1 <= s.end + TOL
    })
}

fn pieces(r: &Rect<f64>, holes: &[Rect<f64>]) -> Vec<Rect<f64>> {
    r.subtract(holes)
        .into_iter()
        .filter(|p| p.area() > 1e-6)
        .collect()
}

fn numbered(base: String, k: usize, n: usize) -> String {
    if n > 1 {
        format!("{base} {}", k + 1)
    } else {
        base
    }
}

/// Builds zones, materials, constructions, surfaces, windows, doors and overhangs.
///
/// The layout must be free of overlaps, misplaced openings and unsupported upper storeys, since
/// EnergyPlus needs every surface pair to match exactly.
pub fn envelope(
    layout: &Layout,
    set: &ConstructionSet,
    defaults: &Defaults,
) -> Result<Envelope, IdfError> {
    let broken = layout.check_invariants();
    if !broken.is_empty() {
        return Err(IdfError::InfeasibleLayout(broken.join("; ")));
    }
    let p = intrinsic_penalty(layout);
    if p > 0.0 {
        return Err(IdfError::InfeasibleLayout(format!(
            "overlap, opening placement or storey support penalty is {p}, expected 0"
        )));
    }
    for s in layout.spaces() {
        checked_name(&s.id)?;
    }
    for o in layout.openings() {
        checked_name(&o.id)?;
    }
    let (mut records, names) = material_records(set, defaults)?;
    let h = layout.storey_height;
    let mut zones = Vec::new();
    for s in layout.spaces() {
        let name = s.zone_name();
        let area = s.rect.area();
        zones.push(ZoneInfo {
            space_id: s.id.clone(),
            name: name.clone(),
            storey: s.storey,
            floor_area: area,
            volume: area * h,
        });
        records.push(
            RecordBuilder::new("Zone")
                .set("Name", &name)
                .num("Ceiling Height", h)
                .num("Volume", area * h)
                .build(defaults),
        );
    }
    let mut ctx = Ctx {
        layout,
        names: &names,
        defaults,
        out: Vec::new(),
    };
    for s in layout.spaces() {
        walls(&mut ctx, s)?;
        floors_and_ceilings(&mut ctx, s);
    }
    for o in layout.openings() {
        opening(&mut ctx, o)?;
    }
    records.append(&mut ctx.out);
    Ok(Envelope {
        zones,
        constructions: names,
        records,
    })
}

fn walls(ctx: &mut Ctx, s: &SpaceBox) -> Result<(), IdfError> {
    let zone = s.zone_name();
    let (zb, zt) = ctx.heights(s.storey);
    for side in Orientation::ALL {
        let fixed = s.rect.wall(side).fixed;
        for (k, seg) in ctx.layout.wall_segments(s, side).iter().enumerate() {
            let v = wall_vertices(side, fixed, seg.start, seg.end, zb, zt);
            let name = wall_name(&zone, side, k + 1);
            match &seg.neighbor {
                None => {
                    let c = ctx.names.exterior_wall.clone();
                    ctx.surface(&name, "Wall", &c, &zone, Exposure::Outdoors, "", &v);
                }
                Some(n) => {
                    let other = ctx.layout.space(n).expect("neighbour exists");
                    let j = host_segment(
                        ctx.layout,
                        other,
                        side.opposite(),
                        (seg.start, seg.end),
                        Some(&s.id),
                    )
                    .ok_or_else(|| {
                        IdfError::InfeasibleLayout(format!(
                            "wall {name} has no matching partner segment"
                        ))
                    })?;
                    let other_zone = other.zone_name();
                    let partner = wall_name(&other_zone, side.opposite(), j + 1);
                    let (normal, rev) = &ctx.names.interior_wall;
                    let c = if zone < other_zone {
                        normal.clone()
                    } else {
                        rev.clone()
                    };
                    ctx.surface(&name, "Wall", &c, &zone, Exposure::Partner, &partner, &v);
                }
            }
        }
    }
    Ok(())
}

fn floors_and_ceilings(ctx: &mut Ctx, s: &SpaceBox) {
    let zone = s.zone_name();
    let (zb, zt) = ctx.heights(s.storey);
    let layout = ctx.layout;
    if s.storey == 0 {
        let c = ctx.names.ground_floor.clone();
        ctx.surface(
            &format!("{zone} Floor"),
            "Floor",
            &c,
            &zone,
            Exposure::Ground,
            "",
            &down_vertices(&s.rect, zb),
        );
    } else {
        let below = &layout.storeys[s.storey - 1].spaces;
        for l in below {
            if let Some(i) = s.rect.intersection(&l.rect).filter(|i| i.area() > 1e-6) {
                let lz = l.zone_name();
                let c = ctx.names.interior_floor.0.clone();
                let name = format!("{zone} Floor {lz}");
                ctx.surface(
                    &name,
                    "Floor",
                    &c,
                    &zone,
                    Exposure::Partner,
                    &format!("{lz} Ceiling {zone}"),
                    &down_vertices(&i, zb),
                );
            }
        }
        let rects: Vec<Rect<f64>> = below.iter().map(|b| b.rect).collect();
        let exposed = pieces(&s.rect, &rects);
        for (k, r) in exposed.iter().enumerate() {
            let name = numbered(format!("{zone} Floor Exposed"), k, exposed.len());
            let c = ctx.names.ground_floor.clone();
            ctx.surface(
                &name,
                "Floor",
                &c,
                &zone,
                Exposure::Outdoors,
                "",
                &down_vertices(r, zb),
            );
        }
    }
    let above: &[SpaceBox] = layout
        .storeys
        .get(s.storey + 1)
        .map_or(&[], |st| &st.spaces);
    for u in above {
        if let Some(i) = s.rect.intersection(&u.rect).filter(|i| i.area() > 1e-6) {
            let uz = u.zone_name();
            let c = ctx.names.interior_floor.1.clone();
            let name = format!("{zone} Ceiling {uz}");
            ctx.surface(
                &name,
                "Ceiling",
                &c,
                &zone,
                Exposure::Partner,
                &format!("{uz} Floor {zone}"),
                &up_vertices(&i, zt),
            );
        }
    }
    let rects: Vec<Rect<f64>> = above.iter().map(|b| b.rect).collect();
    let roofs = pieces(&s.rect, &rects);
    for (k, r) in roofs.iter().enumerate() {
        let name = numbered(format!("{zone} Roof"), k, roofs.len());
        let c = ctx.names.roof.clone();
        ctx.surface(
            &name,
            "Roof",
            &c,
            &zone,
            Exposure::Outdoors,
            "",
            &up_vertices(r, zt),
        );
    }
}

pub fn opening_name(zone: &str, o: &Opening) -> String {
    match o.kind {
        OpeningKind::Window => format!("{zone} Window {}", o.id),
        OpeningKind::Door => format!("{zone} Door {}", o.id),
    }
}

fn opening(ctx: &mut Ctx, o: &Opening) -> Result<(), IdfError> {
    let layout = ctx.layout;
    let owner = layout.space(&o.owner).expect("invariants checked");
    let zone = owner.zone_name();
    let span = layout.opening_span(o).expect("owner exists");
    let (zb, _) = ctx.heights(owner.storey);
    let (z0, z1) = (zb + o.sill, zb + o.sill + o.height);
    let name = opening_name(&zone, o);
    let misplaced = || {
        IdfError::InfeasibleLayout(format!(
            "opening '{}' does not sit on a single wall segment",
            o.id
        ))
    };
    let interior = if o.kind == OpeningKind::Door {
        o.connects_to.as_deref()
    } else {
        None
    };
    let k = host_segment(layout, owner, o.wall, span, interior).ok_or_else(misplaced)?;
    let host = wall_name(&zone, o.wall, k + 1);
    let fixed = owner.rect.wall(o.wall).fixed;
    let kind = if o.kind == OpeningKind::Window {
        "Window"
    } else {
        "Door"
    };
    let fen = |name: &str, construction: &str, host: &str, partner: &str, v: [Vertex; 4]| {
        let b = RecordBuilder::new("FenestrationSurface:Detailed")
            .set("Name", name)
            .set("Surface Type", kind)
            .set("Construction Name", construction)
            .set("Building Surface Name", host)
            .set("Outside Boundary Condition Object", partner);
        with_vertices(b, &v).build(ctx.defaults)
    };
    let v = wall_vertices(o.wall, fixed, span.0, span.1, z0, z1);
    match (o.kind, interior) {
        (OpeningKind::Window, _) => {
            let r = fen(&name, &ctx.names.window, &host, "", v);
            ctx.out.push(r);
            if let Some(sh) = layout.overhang(&o.id).filter(|sh| sh.depth > 0.0) {
                let r = RecordBuilder::new("Shading:Overhang")
                    .set("Name", format!("{name} Overhang"))
                    .set("Window or Door Name", &name)
                    .num("Height above Window or Door", 0.0)
                    .num("Tilt Angle from Window/Door", 90.0)
                    .num("Left extension from Window/Door Width", 0.0)
                    .num("Right extension from Window/Door Width", 0.0)
                    .num("Depth", sh.depth)
                    .build(ctx.defaults);
                ctx.out.push(r);
            }
        }
        (OpeningKind::Door, None) => {
            let r = fen(&name, &ctx.names.door.0, &host, "", v);
            ctx.out.push(r);
        }
        (OpeningKind::Door, Some(other_id)) => {
            let other = layout.space(other_id).ok_or_else(misplaced)?;
            let side = o.wall.opposite();
            let j =
                host_segment(layout, other, side, span, Some(&owner.id)).ok_or_else(misplaced)?;
            let other_zone = other.zone_name();
            let other_name = opening_name(&other_zone, o);
            let other_host = wall_name(&other_zone, side, j + 1);
            let ov = wall_vertices(side, other.rect.wall(side).fixed, span.0, span.1, z0, z1);
            let a = fen(&name, &ctx.names.door.0, &host, &other_name, v);
            let b = fen(&other_name, &ctx.names.door.1, &other_host, &name, ov);
            ctx.out.push(a);
            ctx.out.push(b);
        }
    }
    Ok(())
}

const WEEKDAYS: [&str; 7] = [
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
    "Sunday",
];

/// Fraction schedule `<base> Schedule` repeating an hour-of-week profile scaled by its peak.
/// Profile hour 0 is Monday 00:00, matching a run period that starts on a Monday.
pub fn weekly_fraction_schedule(
    base: &str,
    profile: &[f64],
    peak: f64,
    defaults: &Defaults,
) -> (Vec<Record>, String) {
    let mut out = Vec::new();
    let day_name = |d: usize| format!("{base} {}", WEEKDAYS[d]);
    for d in 0..7 {
        let mut b = RecordBuilder::new("Schedule:Day:Hourly")
            .set("Name", day_name(d))
            .set("Schedule Type Limits Name", FRACTION);
        for hr in 0..24 {
            b = b.set(
                &format!("Hour {}", hr + 1),
                num(profile[(d * 24 + hr) % profile.len()] / peak),
            );
        }
        out.push(b.build(defaults));
    }
    let week = format!("{base} Week");
    let mut b = RecordBuilder::new("Schedule:Week:Daily").set("Name", &week);
    let days = [
        ("Sunday", 6),
        ("Monday", 0),
        ("Tuesday", 1),
        ("Wednesday", 2),
        ("Thursday", 3),
        ("Friday", 4),
        ("Saturday", 5),
        ("Holiday", 6),
        ("SummerDesignDay", 0),
        ("WinterDesignDay", 0),
        ("CustomDay1", 0),
        ("CustomDay2", 0),
    ];
    for (f, d) in days {
        b = b.set(&format!("{f} Schedule:Day Name"), day_name(d));
    }
    out.push(b.build(defaults));
    let year = format!("{base} Schedule");
    out.push(
        RecordBuilder::new("Schedule:Year")
            .set("Name", &year)
            .set("Schedule Type Limits Name", FRACTION)
            .push(&week)
            .push(1)
            .push(1)
            .push(12)
            .push(31)
            .build(defaults),
    );
    (out, year)
}

pub fn peak(profile: &[f64]) -> f64 {
    profile.iter().copied().fold(0.0, f64::max)
}

/// Internal gains and infiltration of every zone, with the schedules they need. A gain
/// profile becomes its peak W/m² level times a weekly fraction schedule.
pub fn load_records(zones: &[ZoneInfo], options: &ZoneOptions, defaults: &Defaults) -> Vec<Record> {
    let mut out = Vec::new();
    for z in zones {
        let gains = format!("{} Gains", z.name);
        let (schedule, density) = match options
            .gain_profiles
            .get(&z.space_id)
            .filter(|p| !p.is_empty())
        {
            Some(p) if peak(p) > 0.0 => {
                let (mut records, year) = weekly_fraction_schedule(&gains, p, peak(p), defaults);
                out.append(&mut records);
                (year, peak(p))
            }
            Some(_) => (ALWAYS_ON.to_string(), 0.0),
            None => (ALWAYS_ON.to_string(), options.default_gain_density),
        };
        out.push(
            RecordBuilder::new("ElectricEquipment")
                .set("Name", &gains)
                .set("Zone or ZoneList Name", &z.name)
                .set("Schedule Name", schedule)
                .set("Design Level Calculation Method", "Watts/Area")
                .num("Watts per Zone Floor Area", density)
                .build(defaults),
        );
        if options.ach > 0.0 {
            out.push(
                RecordBuilder::new("ZoneInfiltration:DesignFlowRate")
                    .set("Name", format!("{} Infiltration", z.name))
                    .set("Zone or ZoneList Name", &z.name)
                    .set("Schedule Name", ALWAYS_ON)
                    .set("Design Flow Rate Calculation Method", "AirChanges/Hour")
                    .num("Air Changes per Hour", options.ach)
                    .build(defaults),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn newell(v: &[Vertex]) -> Vertex {
        let mut n = [0.0; 3];
        for i in 0..v.len() {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            n[0] += (a[1] - b[1]) * (a[2] + b[2]);
            n[1] += (a[2] - b[2]) * (a[0] + b[0]);
            n[2] += (a[0] - b[0]) * (a[1] + b[1]);
        }
        n
    }

    #[test]
    fn vertex_orders_face_outwards() {
        let cases = [
            (Orientation::N, [0.0, 1.0, 0.0]),
            (Orientation::S, [0.0, -1.0, 0.0]),
            (Orientation::E, [1.0, 0.0, 0.0]),
            (Orientation::W, [-1.0, 0.0, 0.0]),
        ];
        for (side, dir) in cases {
            let n = newell(&wall_vertices(side, 3.0, 1.0, 4.0, 0.0, 2.7));
            let dot: f64 = n.iter().zip(dir).map(|(a, b)| a * b).sum();
            assert!((dot - 2.0 * 3.0 * 2.7).abs() < 1e-9, "{side:?} {n:?}");
        }
        let r = Rect::new(1.0, 2.0, 3.0, 4.0);
        assert!((newell(&up_vertices(&r, 2.7))[2] - 24.0).abs() < 1e-9);
        assert!((newell(&down_vertices(&r, 0.0))[2] + 24.0).abs() < 1e-9);
    }

    #[test]
    fn upper_left_corner_first() {
        let v = wall_vertices(Orientation::S, 0.0, 1.0, 4.0, 0.0, 2.7);
        assert_eq!(v[0], [1.0, 0.0, 2.7]);
        let v = wall_vertices(Orientation::N, 5.0, 1.0, 4.0, 0.0, 2.7);
        assert_eq!(v[0], [4.0, 5.0, 2.7]);
    }

    #[test]
    fn palindromic_constructions_are_not_reversed() {
        let set = ConstructionSet::bundled_default();
        let (records, names) = material_records(&set, &Defaults::bundled()).unwrap();
        assert_eq!(names.interior_wall.0, names.interior_wall.1);
        assert_eq!(
            names.interior_floor.1,
            format!("{} Reversed", names.interior_floor.0)
        );
        let rev = records
            .iter()
            .find(|r| r.name() == names.interior_floor.1)
            .unwrap();
        let orig = records
            .iter()
            .find(|r| r.class == "Construction" && r.name() == names.interior_floor.0)
            .unwrap();
        let mut layers: Vec<&str> = orig.values().skip(1).collect();
        layers.reverse();
        assert_eq!(rev.values().skip(1).collect::<Vec<_>>(), layers);
    }
}
