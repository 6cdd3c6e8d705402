//! Whole-document assembly.

use std::collections::{BTreeMap, BTreeSet};

use planforge_core::constructions::ConstructionSet;
use planforge_core::model::Layout;
use planforge_core::project::Project;
use planforge_core::reporting::{cost_summary, CostItem, CostKind};
use planforge_core::surrogate::{Location, SetpointBand, ZoneOptions};
use planforge_core::systems::{HvacTemplate, SystemsSpec};

use crate::builder::{checked_name, num, RecordBuilder};
use crate::check::check_closure;
use crate::defaults::Defaults;
use crate::document::{IdfDocument, Record};
use crate::schema;
use crate::systems::{assemble_systems, constant_schedule, SiteFrame, SystemsInput};
use crate::zones::{envelope, load_records, ALWAYS_ON, ANY_NUMBER, FRACTION, TEMPERATURE};
use crate::{IdfError, IDF_VERSION};

/// Everything the emitter needs besides the defaults' object properties.
#[derive(Clone, Debug)]
pub struct EmitInput<'a> {
    pub building: &'a str,
    pub layout: &'a Layout,
    pub systems: &'a SystemsSpec,
    pub constructions: &'a ConstructionSet,
    /// Ventilation, default gains and per-space gain profiles.
    pub zone_options: &'a ZoneOptions,
    /// Every profile of the program, by id (the hot water use profile is looked up here).
    pub profiles: &'a BTreeMap<String, Vec<f64>>,
    pub location: &'a Location,
    pub band: SetpointBand<f64>,
    pub costs: &'a [CostItem],
    pub defaults: &'a Defaults,
}

/// Hourly variables requested from every run.
pub const BASE_OUTPUTS: [&str; 6] = [
    "Zone Mean Air Temperature",
    "Site Outdoor Air Drybulb Temperature",
    "Zone Air System Sensible Heating Energy",
    "Zone Air System Sensible Cooling Energy",
    "Zone Infiltration Air Change Rate",
    "Zone Electric Equipment Electric Energy",
];

/// Replaces characters that would end a field; free-text location names come from weather files.
fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if matches!(c, ',' | ';' | '!' | '\n' | '\r') {
                ' '
            } else {
                c
            }
        })
        .collect();
    let s = s.split_whitespace().collect::<Vec<_>>().join(" ");
    if s.is_empty() {
        "Site".into()
    } else {
        s
    }
}

fn site_records(input: &EmitInput) -> Vec<Record> {
    let d = input.defaults;
    let loc = input.location;
    vec![
        RecordBuilder::new("Version")
            .set("Version Identifier", IDF_VERSION)
            .build(d),
        RecordBuilder::new("SimulationControl").build(d),
        RecordBuilder::new("Building")
            .set("Name", sanitize(input.building))
            .num("North Axis", input.zone_options.site.north_angle)
            .build(d),
        RecordBuilder::new("GlobalGeometryRules")
            .set("Starting Vertex Position", "UpperLeftCorner")
            .set("Vertex Entry Direction", "Counterclockwise")
            .set("Coordinate System", "Relative")
            .build(d),
        RecordBuilder::new("Timestep").build(d),
        RecordBuilder::new("Site:Location")
            .set("Name", sanitize(&loc.name))
            .num("Latitude", loc.latitude)
            .num("Longitude", loc.longitude)
            .num("Time Zone", loc.time_zone)
            .num("Elevation", loc.elevation)
            .build(d),
        RecordBuilder::new("RunPeriod")
            .set("Name", "Annual")
            .set("Begin Month", 1)
            .set("Begin Day of Month", 1)
            .set("End Month", 12)
            .set("End Day of Month", 31)
            .build(d),
        RecordBuilder::new("Site:GroundTemperature:BuildingSurface").build(d),
        RecordBuilder::new("ScheduleTypeLimits")
            .set("Name", FRACTION)
            .set("Lower Limit Value", 0)
            .set("Upper Limit Value", 1)
            .set("Numeric Type", "Continuous")
            .build(d),
        RecordBuilder::new("ScheduleTypeLimits")
            .set("Name", TEMPERATURE)
            .set("Lower Limit Value", -60)
            .set("Upper Limit Value", 200)
            .set("Numeric Type", "Continuous")
            .build(d),
        RecordBuilder::new("ScheduleTypeLimits")
            .set("Name", ANY_NUMBER)
            .build(d),
        constant_schedule(ALWAYS_ON, FRACTION, 1.0, d),
    ]
}

fn output_records(systems: &SystemsSpec, d: &Defaults) -> Vec<Record> {
    let mut vars: Vec<&str> = BASE_OUTPUTS.to_vec();
    if systems.hvac == HvacTemplate::IdealLoads {
        vars.extend([
            "Zone Ideal Loads Zone Total Heating Energy",
            "Zone Ideal Loads Zone Total Cooling Energy",
        ]);
    }
    if let Some(dhw) = &systems.dhw {
        vars.extend([
            "Water Use Equipment Hot Water Volume",
            "Water Heater Heating Energy",
        ]);
        if dhw.solar_collector_area > 0.0 {
            vars.push("Solar Collector Heat Transfer Energy");
        }
    }
    let mut meters = vec!["Electricity:Facility"];
    if systems.electric_center.is_some() {
        vars.extend([
            "Generator Produced Electric Energy",
            "Inverter AC Output Electric Energy",
        ]);
        meters.push("ElectricityProduced:Facility");
    }
    let mut out = vec![RecordBuilder::new("Output:VariableDictionary")
        .set("Key Field", "IDF")
        .build(d)];
    for v in vars {
        out.push(
            RecordBuilder::new("Output:Variable")
                .set("Key Value", "*")
                .set("Variable Name", v)
                .set("Reporting Frequency", "Hourly")
                .build(d),
        );
    }
    for m in meters {
        out.push(
            RecordBuilder::new("Output:Meter")
                .set("Key Name", m)
                .set("Reporting Frequency", "Hourly")
                .build(d),
        );
    }
    out
}

/// One line item per cost entry, in cost-summary order; repeated names get a numeric suffix.
fn cost_records(costs: &[CostItem], d: &Defaults) -> Result<Vec<Record>, IdfError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for line in cost_summary(costs).items {
        checked_name(&line.name)?;
        let mut name = line.name.clone();
        let mut k = 2;
        while !seen.insert(name.to_ascii_uppercase()) {
            name = format!("{} {k}", line.name);
            k += 1;
        }
        let kind = match line.kind {
            CostKind::Equipment => "Equipment",
            CostKind::Construction => "Construction",
        };
        out.push(
            RecordBuilder::new("ComponentCost:LineItem")
                .set("Name", &name)
                .set("Type", kind)
                .set("Line Item Type", "General")
                .set("Item Name", &line.name)
                .set("Cost per Each", num(line.unit_cost))
                .set("Quantity", num(line.quantity))
                .build(d),
        );
    }
    Ok(out)
}

/// Orders records by section, keeping their relative order within a section.
pub fn sort_sections(records: &mut [Record]) {
    records.sort_by_key(|r| schema::class(&r.class).map(|c| c.section));
}

/// Compiles a layout and its systems into an EnergyPlus input document.
///
/// The result is deterministic for equal inputs and passes [`check_closure`]; a failure of that
/// check would be a template bug and is reported as [`IdfError::Closure`].
pub fn emit_idf(input: &EmitInput) -> Result<IdfDocument, IdfError> {
    if input.layout.space_count() == 0 {
        return Err(IdfError::InfeasibleLayout("layout has no spaces".into()));
    }
    let d = input.defaults;
    let env = envelope(input.layout, input.constructions, d)?;
    let mut records = site_records(input);
    records.extend(env.records);
    records.extend(load_records(&env.zones, input.zone_options, d));
    let rects: Vec<_> = input.layout.spaces().map(|s| s.rect).collect();
    let frame = SiteFrame {
        x: rects.iter().map(|r| r.x).fold(f64::INFINITY, f64::min),
        y: rects.iter().map(|r| r.y).fold(f64::INFINITY, f64::min),
        roof_height: input.layout.storeys.len() as f64 * input.layout.storey_height,
    };
    let systems = assemble_systems(&SystemsInput {
        zones: &env.zones,
        systems: input.systems,
        profiles: input.profiles,
        band: &input.band,
        frame,
        defaults: d,
    })?;
    records.extend(systems.records);
    records.extend(output_records(input.systems, d));
    records.extend(cost_records(input.costs, d)?);
    sort_sections(&mut records);
    let doc = IdfDocument { records };
    let report = check_closure(&doc);
    if !report.is_clean() {
        let mut problems = report.duplicates;
        problems.extend(report.dangling);
        problems.extend(report.node_problems);
        problems.extend(report.unknown_classes);
        return Err(IdfError::Closure(problems));
    }
    Ok(doc)
}

/// Emits a project's layout with its systems, constructions, costs and object defaults.
pub fn emit_project(
    project: &Project,
    layout: &Layout,
    location: &Location,
) -> Result<IdfDocument, IdfError> {
    let constructions = project.constructions()?;
    let defaults = Defaults::bundled().with_overrides(&project.settings.idf_defaults)?;
    let zone_options = ZoneOptions::for_program(&project.program, &project.systems);
    emit_idf(&EmitInput {
        building: &project.name,
        layout,
        systems: &project.systems,
        constructions: &constructions,
        zone_options: &zone_options,
        profiles: &project.program.gain_profiles,
        location,
        band: project.settings.fpop.discomfort.band,
        costs: &project.settings.costs,
        defaults: &defaults,
    })
}
