//! Field layout and reference roles of the record classes the emitter knows.
//!
//! Each field is written as `<role><namespace>|<name>`:
//! `@` defines a name, `&` references one, `^k` references an object whose class is the value
//! of the field `k` positions away, `<` and `>` are node inlet and outlet ports and `~` mentions
//! a node without owning a port. A bare name is a plain value. An empty namespace on `@` means
//! the class itself.

use std::collections::HashMap;
use std::sync::OnceLock;

/// Groups of record classes, in the order they appear in an emitted document.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Section {
    Version,
    Building,
    Timestep,
    Site,
    Materials,
    Constructions,
    Zones,
    Surfaces,
    Fenestration,
    Shading,
    Gains,
    Ventilation,
    Systems,
    Loops,
    Branches,
    Nodes,
    LoadCenter,
    Outputs,
    Costs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Role {
    Plain,
    Def(String),
    Ref(String),
    /// Reference whose namespace is the value of the field at this relative offset.
    DynRef(isize),
    NodeIn,
    NodeOut,
    NodeRef,
}

#[derive(Clone, Debug)]
pub struct FieldDef {
    pub name: String,
    pub role: Role,
}

#[derive(Clone, Debug)]
pub struct ClassDef {
    pub name: &'static str,
    pub section: Section,
    pub fields: Vec<FieldDef>,
    /// Repeating group appended after `fields`; `{n}` in names is the group number.
    pub group: Vec<FieldDef>,
    pub group_start: usize,
}

impl ClassDef {
    /// Name and role of field `i`, expanding the repeating group as needed.
    pub fn field(&self, i: usize) -> Option<FieldDef> {
        if let Some(f) = self.fields.get(i) {
            return Some(f.clone());
        }
        if self.group.is_empty() {
            return None;
        }
        let k = i - self.fields.len();
        let n = self.group_start + k / self.group.len();
        let g = &self.group[k % self.group.len()];
        Some(FieldDef {
            name: g.name.replace("{n}", &n.to_string()),
            role: g.role.clone(),
        })
    }

    /// Index of the field whose name, without units, is `key`.
    pub fn index_of(&self, key: &str) -> Option<usize> {
        self.fields.iter().position(|f| field_key(&f.name) == key)
    }
}

/// Field name without its `{units}` suffix.
pub fn field_key(name: &str) -> &str {
    match name.find(" {") {
        Some(i) => &name[..i],
        None => name,
    }
}

fn parse_field(spec: &str) -> (String, Role) {
    let Some((head, name)) = spec.split_once('|') else {
        return (spec.to_string(), Role::Plain);
    };
    let (code, ns) = head.split_at(1);
    let role = match code {
        "@" => Role::Def(ns.to_string()),
        "&" => Role::Ref(ns.to_string()),
        "^" => Role::DynRef(ns.parse().expect("offset")),
        "<" => Role::NodeIn,
        ">" => Role::NodeOut,
        "~" => Role::NodeRef,
        other => panic!("unknown role code {other}"),
    };
    (name.to_string(), role)
}

type Spec = (
    &'static str,
    Section,
    &'static [&'static str],
    &'static [&'static str],
    usize,
);

const VERTEX: &[&str] = &[
    "Vertex {n} X-coordinate {m}",
    "Vertex {n} Y-coordinate {m}",
    "Vertex {n} Z-coordinate {m}",
];
const GROUND_MONTHS: &[&str] = &[
    "January Ground Temperature {C}",
    "February Ground Temperature {C}",
    "March Ground Temperature {C}",
    "April Ground Temperature {C}",
    "May Ground Temperature {C}",
    "June Ground Temperature {C}",
    "July Ground Temperature {C}",
    "August Ground Temperature {C}",
    "September Ground Temperature {C}",
    "October Ground Temperature {C}",
    "November Ground Temperature {C}",
    "December Ground Temperature {C}",
];
const DAY_HOURLY: &[&str] = &[
    "@ScheduleDay|Name",
    "&ScheduleTypeLimits|Schedule Type Limits Name",
    "Hour 1",
    "Hour 2",
    "Hour 3",
    "Hour 4",
    "Hour 5",
    "Hour 6",
    "Hour 7",
    "Hour 8",
    "Hour 9",
    "Hour 10",
    "Hour 11",
    "Hour 12",
    "Hour 13",
    "Hour 14",
    "Hour 15",
    "Hour 16",
    "Hour 17",
    "Hour 18",
    "Hour 19",
    "Hour 20",
    "Hour 21",
    "Hour 22",
    "Hour 23",
    "Hour 24",
];

use Section::*;

const SPECS: &[Spec] = &[
    ("Version", Version, &["Version Identifier"], &[], 0),
    (
        "SimulationControl",
        Building,
        &[
            "Do Zone Sizing Calculation",
            "Do System Sizing Calculation",
            "Do Plant Sizing Calculation",
            "Run Simulation for Sizing Periods",
            "Run Simulation for Weather File Run Periods",
        ],
        &[],
        0,
    ),
    (
        "Building",
        Building,
        &[
            "@|Name",
            "North Axis {deg}",
            "Terrain",
            "Loads Convergence Tolerance Value",
            "Temperature Convergence Tolerance Value {deltaC}",
            "Solar Distribution",
            "Maximum Number of Warmup Days",
            "Minimum Number of Warmup Days",
        ],
        &[],
        0,
    ),
    (
        "GlobalGeometryRules",
        Building,
        &[
            "Starting Vertex Position",
            "Vertex Entry Direction",
            "Coordinate System",
        ],
        &[],
        0,
    ),
    (
        "Timestep",
        Timestep,
        &["Number of Timesteps per Hour"],
        &[],
        0,
    ),
    (
        "Site:Location",
        Site,
        &[
            "@|Name",
            "Latitude {deg}",
            "Longitude {deg}",
            "Time Zone {hr}",
            "Elevation {m}",
        ],
        &[],
        0,
    ),
    (
        "RunPeriod",
        Site,
        &[
            "@|Name",
            "Begin Month",
            "Begin Day of Month",
            "End Month",
            "End Day of Month",
            "Day of Week for Start Day",
            "Use Weather File Holidays and Special Days",
            "Use Weather File Daylight Saving Period",
            "Apply Weekend Holiday Rule",
            "Use Weather File Rain Indicators",
            "Use Weather File Snow Indicators",
        ],
        &[],
        0,
    ),
    (
        "Site:GroundTemperature:BuildingSurface",
        Site,
        GROUND_MONTHS,
        &[],
        0,
    ),
    (
        "ScheduleTypeLimits",
        Site,
        &[
            "@|Name",
            "Lower Limit Value",
            "Upper Limit Value",
            "Numeric Type",
        ],
        &[],
        0,
    ),
    (
        "Schedule:Constant",
        Site,
        &[
            "@Schedule|Name",
            "&ScheduleTypeLimits|Schedule Type Limits Name",
            "Hourly Value",
        ],
        &[],
        0,
    ),
    ("Schedule:Day:Hourly", Site, DAY_HOURLY, &[], 0),
    (
        "Schedule:Week:Daily",
        Site,
        &[
            "@ScheduleWeek|Name",
            "&ScheduleDay|Sunday Schedule:Day Name",
            "&ScheduleDay|Monday Schedule:Day Name",
            "&ScheduleDay|Tuesday Schedule:Day Name",
            "&ScheduleDay|Wednesday Schedule:Day Name",
            "&ScheduleDay|Thursday Schedule:Day Name",
            "&ScheduleDay|Friday Schedule:Day Name",
            "&ScheduleDay|Saturday Schedule:Day Name",
            "&ScheduleDay|Holiday Schedule:Day Name",
            "&ScheduleDay|SummerDesignDay Schedule:Day Name",
            "&ScheduleDay|WinterDesignDay Schedule:Day Name",
            "&ScheduleDay|CustomDay1 Schedule:Day Name",
            "&ScheduleDay|CustomDay2 Schedule:Day Name",
        ],
        &[],
        0,
    ),
    (
        "Schedule:Year",
        Site,
        &[
            "@Schedule|Name",
            "&ScheduleTypeLimits|Schedule Type Limits Name",
        ],
        &[
            "&ScheduleWeek|Schedule:Week Name {n}",
            "Start Month {n}",
            "Start Day {n}",
            "End Month {n}",
            "End Day {n}",
        ],
        1,
    ),
    (
        "Material",
        Materials,
        &[
            "@Material|Name",
            "Roughness",
            "Thickness {m}",
            "Conductivity {W/m-K}",
            "Density {kg/m3}",
            "Specific Heat {J/kg-K}",
            "Thermal Absorptance",
            "Solar Absorptance",
            "Visible Absorptance",
        ],
        &[],
        0,
    ),
    (
        "WindowMaterial:SimpleGlazingSystem",
        Materials,
        &[
            "@Material|Name",
            "U-Factor {W/m2-K}",
            "Solar Heat Gain Coefficient",
            "Visible Transmittance",
        ],
        &[],
        0,
    ),
    (
        "Construction",
        Constructions,
        &["@|Name", "&Material|Outside Layer"],
        &["&Material|Layer {n}"],
        2,
    ),
    (
        "Zone",
        Zones,
        &[
            "@|Name",
            "Direction of Relative North {deg}",
            "X Origin {m}",
            "Y Origin {m}",
            "Z Origin {m}",
            "Type",
            "Multiplier",
            "Ceiling Height {m}",
            "Volume {m3}",
        ],
        &[],
        0,
    ),
    (
        "BuildingSurface:Detailed",
        Surfaces,
        &[
            "@Surface|Name",
            "Surface Type",
            "&Construction|Construction Name",
            "&Zone|Zone Name",
            "Outside Boundary Condition",
            "&Surface|Outside Boundary Condition Object",
            "Sun Exposure",
            "Wind Exposure",
            "View Factor to Ground",
            "Number of Vertices",
        ],
        VERTEX,
        1,
    ),
    (
        "FenestrationSurface:Detailed",
        Fenestration,
        &[
            "@Surface|Name",
            "Surface Type",
            "&Construction|Construction Name",
            "&Surface|Building Surface Name",
            "&Surface|Outside Boundary Condition Object",
            "View Factor to Ground",
            "Shading Control Name",
            "Frame and Divider Name",
            "Multiplier",
            "Number of Vertices",
        ],
        VERTEX,
        1,
    ),
    (
        "Shading:Overhang",
        Shading,
        &[
            "@Surface|Name",
            "&Surface|Window or Door Name",
            "Height above Window or Door {m}",
            "Tilt Angle from Window/Door {deg}",
            "Left extension from Window/Door Width {m}",
            "Right extension from Window/Door Width {m}",
            "Depth {m}",
        ],
        &[],
        0,
    ),
    (
        "Shading:Site:Detailed",
        Shading,
        &[
            "@Surface|Name",
            "&Schedule|Transmittance Schedule Name",
            "Number of Vertices",
        ],
        VERTEX,
        1,
    ),
    (
        "ElectricEquipment",
        Gains,
        &[
            "@|Name",
            "&Zone|Zone or ZoneList Name",
            "&Schedule|Schedule Name",
            "Design Level Calculation Method",
            "Design Level {W}",
            "Watts per Zone Floor Area {W/m2}",
            "Watts per Person {W/person}",
            "Fraction Latent",
            "Fraction Radiant",
            "Fraction Lost",
            "End-Use Subcategory",
        ],
        &[],
        0,
    ),
    (
        "ZoneInfiltration:DesignFlowRate",
        Ventilation,
        &[
            "@|Name",
            "&Zone|Zone or ZoneList Name",
            "&Schedule|Schedule Name",
            "Design Flow Rate Calculation Method",
            "Design Flow Rate {m3/s}",
            "Flow per Zone Floor Area {m3/s-m2}",
            "Flow per Exterior Surface Area {m3/s-m2}",
            "Air Changes per Hour {1/hr}",
            "Constant Term Coefficient",
            "Temperature Term Coefficient",
            "Velocity Term Coefficient",
            "Velocity Squared Term Coefficient",
        ],
        &[],
        0,
    ),
    (
        "ZoneControl:Thermostat",
        Systems,
        &[
            "@|Name",
            "&Zone|Zone or ZoneList Name",
            "&Schedule|Control Type Schedule Name",
            "Control 1 Object Type",
            "^-1|Control 1 Name",
        ],
        &[],
        0,
    ),
    (
        "ThermostatSetpoint:DualSetpoint",
        Systems,
        &[
            "@|Name",
            "&Schedule|Heating Setpoint Temperature Schedule Name",
            "&Schedule|Cooling Setpoint Temperature Schedule Name",
        ],
        &[],
        0,
    ),
    (
        "ZoneHVAC:EquipmentConnections",
        Systems,
        &[
            "&Zone|Zone Name",
            "&ZoneHVAC:EquipmentList|Zone Conditioning Equipment List Name",
            "<|Zone Air Inlet Node or NodeList Name",
            ">|Zone Air Exhaust Node or NodeList Name",
            ">|Zone Air Node Name",
            ">|Zone Return Air Node or NodeList Name",
        ],
        &[],
        0,
    ),
    (
        "ZoneHVAC:EquipmentList",
        Systems,
        &["@|Name", "Load Distribution Scheme"],
        &[
            "Zone Equipment {n} Object Type",
            "^-1|Zone Equipment {n} Name",
            "Zone Equipment {n} Cooling Sequence",
            "Zone Equipment {n} Heating or No-Load Sequence",
        ],
        1,
    ),
    (
        "ZoneHVAC:IdealLoadsAirSystem",
        Systems,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            ">|Zone Supply Air Node Name",
            "<|Zone Exhaust Air Node Name",
            "Maximum Heating Supply Air Temperature {C}",
            "Minimum Cooling Supply Air Temperature {C}",
            "Maximum Heating Supply Air Humidity Ratio {kgWater/kgDryAir}",
            "Minimum Cooling Supply Air Humidity Ratio {kgWater/kgDryAir}",
            "Heating Limit",
            "Maximum Heating Air Flow Rate {m3/s}",
            "Maximum Sensible Heating Capacity {W}",
            "Cooling Limit",
        ],
        &[],
        0,
    ),
    (
        "ZoneHVAC:Baseboard:Convective:Electric",
        Systems,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            "Heating Design Capacity Method",
            "Heating Design Capacity {W}",
            "Heating Design Capacity Per Floor Area {W/m2}",
            "Fraction of Autosized Heating Design Capacity",
            "Efficiency",
        ],
        &[],
        0,
    ),
    (
        "ZoneHVAC:Baseboard:Convective:Water",
        Systems,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            "<|Inlet Node Name",
            ">|Outlet Node Name",
            "Heating Design Capacity Method",
            "Heating Design Capacity {W}",
            "Heating Design Capacity Per Floor Area {W/m2}",
            "Fraction of Autosized Heating Design Capacity",
            "U-Factor Times Area Value {W/K}",
            "Maximum Water Flow Rate {m3/s}",
            "Convergence Tolerance",
        ],
        &[],
        0,
    ),
    (
        "AirTerminal:SingleDuct:Uncontrolled",
        Systems,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            "~|Zone Supply Air Node Name",
            "Maximum Air Flow Rate {m3/s}",
        ],
        &[],
        0,
    ),
    (
        "Boiler:HotWater",
        Systems,
        &[
            "@|Name",
            "Fuel Type",
            "Nominal Capacity {W}",
            "Nominal Thermal Efficiency",
            "Efficiency Curve Temperature Evaluation Variable",
            "&Curve|Normalized Boiler Efficiency Curve Name",
            "Design Water Outlet Temperature {C}",
            "Design Water Flow Rate {m3/s}",
            "Minimum Part Load Ratio",
            "Maximum Part Load Ratio",
            "Optimum Part Load Ratio",
            "<|Boiler Water Inlet Node Name",
            ">|Boiler Water Outlet Node Name",
            "Water Outlet Upper Temperature Limit {C}",
            "Boiler Flow Mode",
        ],
        &[],
        0,
    ),
    (
        "Pump:ConstantSpeed",
        Systems,
        &[
            "@|Name",
            "<|Inlet Node Name",
            ">|Outlet Node Name",
            "Rated Flow Rate {m3/s}",
            "Rated Pump Head {Pa}",
            "Rated Power Consumption {W}",
            "Motor Efficiency",
            "Fraction of Motor Inefficiencies to Fluid Stream",
            "Pump Control Type",
        ],
        &[],
        0,
    ),
    (
        "Pipe:Adiabatic",
        Systems,
        &["@|Name", "<|Inlet Node Name", ">|Outlet Node Name"],
        &[],
        0,
    ),
    (
        "WaterHeater:Mixed",
        Systems,
        &[
            "@|Name",
            "Tank Volume {m3}",
            "&Schedule|Setpoint Temperature Schedule Name",
            "Deadband Temperature Difference {deltaC}",
            "Maximum Temperature Limit {C}",
            "Heater Control Type",
            "Heater Maximum Capacity {W}",
            "Heater Minimum Capacity {W}",
            "Heater Ignition Minimum Flow Rate {m3/s}",
            "Heater Ignition Delay {s}",
            "Heater Fuel Type",
            "Heater Thermal Efficiency",
            "&Curve|Part Load Factor Curve Name",
            "Off Cycle Parasitic Fuel Consumption Rate {W}",
            "Off Cycle Parasitic Fuel Type",
            "Off Cycle Parasitic Heat Fraction to Tank",
            "On Cycle Parasitic Fuel Consumption Rate {W}",
            "On Cycle Parasitic Fuel Type",
            "On Cycle Parasitic Heat Fraction to Tank",
            "Ambient Temperature Indicator",
            "&Schedule|Ambient Temperature Schedule Name",
            "&Zone|Ambient Temperature Zone Name",
            "~|Ambient Temperature Outdoor Air Node Name",
            "Off Cycle Loss Coefficient to Ambient Temperature {W/K}",
            "Off Cycle Loss Fraction to Zone",
            "On Cycle Loss Coefficient to Ambient Temperature {W/K}",
            "On Cycle Loss Fraction to Zone",
            "Peak Use Flow Rate {m3/s}",
            "&Schedule|Use Flow Rate Fraction Schedule Name",
            "&Schedule|Cold Water Supply Temperature Schedule Name",
            "<|Use Side Inlet Node Name",
            ">|Use Side Outlet Node Name",
            "Use Side Effectiveness",
            "<|Source Side Inlet Node Name",
            ">|Source Side Outlet Node Name",
            "Source Side Effectiveness",
            "Use Side Design Flow Rate {m3/s}",
            "Source Side Design Flow Rate {m3/s}",
            "Indirect Water Heating Recovery Time {hr}",
        ],
        &[],
        0,
    ),
    (
        "SolarCollectorPerformance:FlatPlate",
        Systems,
        &[
            "@|Name",
            "Gross Area {m2}",
            "Test Fluid",
            "Test Flow Rate {m3/s}",
            "Test Correlation Type",
            "Coefficient 1 of Efficiency Equation",
            "Coefficient 2 of Efficiency Equation",
            "Coefficient 3 of Efficiency Equation",
            "Coefficient 2 of Incident Angle Modifier",
            "Coefficient 3 of Incident Angle Modifier",
        ],
        &[],
        0,
    ),
    (
        "SolarCollector:FlatPlate:Water",
        Systems,
        &[
            "@|Name",
            "&SolarCollectorPerformance:FlatPlate|SolarCollectorPerformance Name",
            "&Surface|Surface Name",
            "<|Inlet Node Name",
            ">|Outlet Node Name",
            "Maximum Flow Rate {m3/s}",
        ],
        &[],
        0,
    ),
    (
        "WaterUse:Equipment",
        Systems,
        &[
            "@|Name",
            "End-Use Subcategory",
            "Peak Flow Rate {m3/s}",
            "&Schedule|Flow Rate Fraction Schedule Name",
            "&Schedule|Target Temperature Schedule Name",
            "&Schedule|Hot Water Supply Temperature Schedule Name",
            "&Schedule|Cold Water Supply Temperature Schedule Name",
            "&Zone|Zone Name",
            "&Schedule|Sensible Fraction Schedule Name",
            "&Schedule|Latent Fraction Schedule Name",
        ],
        &[],
        0,
    ),
    (
        "WaterUse:Connections",
        Systems,
        &[
            "@|Name",
            "<|Inlet Node Name",
            ">|Outlet Node Name",
            "Supply Water Storage Tank Name",
            "Reclamation Water Storage Tank Name",
            "&Schedule|Hot Water Supply Temperature Schedule Name",
            "&Schedule|Cold Water Supply Temperature Schedule Name",
            "Drain Water Heat Exchanger Type",
            "Drain Water Heat Exchanger Destination",
            "Drain Water Heat Exchanger U-Factor Times Area {W/K}",
        ],
        &["&WaterUse:Equipment|Water Use Equipment {n} Name"],
        1,
    ),
    (
        "AirLoopHVAC:UnitarySystem",
        Systems,
        &[
            "@|Name",
            "Control Type",
            "&Zone|Controlling Zone or Thermostat Location",
            "Dehumidification Control Type",
            "&Schedule|Availability Schedule Name",
            "~|Air Inlet Node Name",
            "~|Air Outlet Node Name",
            "Supply Fan Object Type",
            "^-1|Supply Fan Name",
            "Fan Placement",
            "&Schedule|Supply Air Fan Operating Mode Schedule Name",
            "Heating Coil Object Type",
            "^-1|Heating Coil Name",
            "DX Heating Coil Sizing Ratio",
            "Cooling Coil Object Type",
            "^-1|Cooling Coil Name",
            "Use DOAS DX Cooling Coil",
            "DOAS DX Cooling Coil Leaving Minimum Air Temperature {C}",
            "Latent Load Control",
            "Supplemental Heating Coil Object Type",
            "^-1|Supplemental Heating Coil Name",
            "Cooling Supply Air Flow Rate Method",
            "Cooling Supply Air Flow Rate {m3/s}",
            "Cooling Supply Air Flow Rate Per Floor Area {m3/s-m2}",
            "Cooling Fraction of Autosized Cooling Supply Air Flow Rate",
            "Cooling Supply Air Flow Rate Per Unit of Capacity {m3/s-W}",
            "Heating Supply Air Flow Rate Method",
            "Heating Supply Air Flow Rate {m3/s}",
            "Heating Supply Air Flow Rate Per Floor Area {m3/s-m2}",
            "Heating Fraction of Autosized Heating Supply Air Flow Rate",
            "Heating Supply Air Flow Rate Per Unit of Capacity {m3/s-W}",
            "No Load Supply Air Flow Rate Method",
            "No Load Supply Air Flow Rate {m3/s}",
        ],
        &[],
        0,
    ),
    (
        "Fan:OnOff",
        Systems,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            "Fan Total Efficiency",
            "Pressure Rise {Pa}",
            "Maximum Flow Rate {m3/s}",
            "Motor Efficiency",
            "Motor In Airstream Fraction",
            "<|Air Inlet Node Name",
            ">|Air Outlet Node Name",
        ],
        &[],
        0,
    ),
    (
        "Coil:Cooling:DX:SingleSpeed",
        Systems,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            "Gross Rated Total Cooling Capacity {W}",
            "Gross Rated Sensible Heat Ratio",
            "Gross Rated Cooling COP {W/W}",
            "Rated Air Flow Rate {m3/s}",
            "Rated Evaporator Fan Power Per Volume Flow Rate {W/(m3/s)}",
            "<|Air Inlet Node Name",
            ">|Air Outlet Node Name",
            "&Curve|Total Cooling Capacity Function of Temperature Curve Name",
            "&Curve|Total Cooling Capacity Function of Flow Fraction Curve Name",
            "&Curve|Energy Input Ratio Function of Temperature Curve Name",
            "&Curve|Energy Input Ratio Function of Flow Fraction Curve Name",
            "&Curve|Part Load Fraction Correlation Curve Name",
        ],
        &[],
        0,
    ),
    (
        "Coil:Heating:Electric",
        Systems,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            "Efficiency",
            "Nominal Capacity {W}",
            "<|Air Inlet Node Name",
            ">|Air Outlet Node Name",
            "~|Temperature Setpoint Node Name",
        ],
        &[],
        0,
    ),
    (
        "Curve:Biquadratic",
        Systems,
        &[
            "@Curve|Name",
            "Coefficient1 Constant",
            "Coefficient2 x",
            "Coefficient3 x**2",
            "Coefficient4 y",
            "Coefficient5 y**2",
            "Coefficient6 x*y",
            "Minimum Value of x",
            "Maximum Value of x",
            "Minimum Value of y",
            "Maximum Value of y",
        ],
        &[],
        0,
    ),
    (
        "Curve:Quadratic",
        Systems,
        &[
            "@Curve|Name",
            "Coefficient1 Constant",
            "Coefficient2 x",
            "Coefficient3 x**2",
            "Minimum Value of x",
            "Maximum Value of x",
        ],
        &[],
        0,
    ),
    (
        "PlantEquipmentOperationSchemes",
        Systems,
        &["@|Name"],
        &[
            "Control Scheme {n} Object Type",
            "^-1|Control Scheme {n} Name",
            "&Schedule|Control Scheme {n} Schedule Name",
        ],
        1,
    ),
    (
        "PlantEquipmentOperation:HeatingLoad",
        Systems,
        &["@|Name"],
        &[
            "Load Range {n} Lower Limit {W}",
            "Load Range {n} Upper Limit {W}",
            "&PlantEquipmentList|Range {n} Equipment List Name",
        ],
        1,
    ),
    (
        "PlantEquipmentOperation:Uncontrolled",
        Systems,
        &["@|Name", "&PlantEquipmentList|Equipment List Name"],
        &[],
        0,
    ),
    (
        "PlantEquipmentList",
        Systems,
        &["@|Name"],
        &["Equipment {n} Object Type", "^-1|Equipment {n} Name"],
        1,
    ),
    (
        "SetpointManager:Scheduled",
        Systems,
        &[
            "@|Name",
            "Control Variable",
            "&Schedule|Schedule Name",
            "&NodeList|Setpoint Node or NodeList Name",
        ],
        &[],
        0,
    ),
    (
        "PlantLoop",
        Loops,
        &[
            "@|Name",
            "Fluid Type",
            "User Defined Fluid Type",
            "&PlantEquipmentOperationSchemes|Plant Equipment Operation Scheme Name",
            "~|Loop Temperature Setpoint Node Name",
            "Maximum Loop Temperature {C}",
            "Minimum Loop Temperature {C}",
            "Maximum Loop Flow Rate {m3/s}",
            "Minimum Loop Flow Rate {m3/s}",
            "Plant Loop Volume {m3}",
            ">|Plant Side Inlet Node Name",
            "<|Plant Side Outlet Node Name",
            "&BranchList|Plant Side Branch List Name",
            "&ConnectorList|Plant Side Connector List Name",
            ">|Demand Side Inlet Node Name",
            "<|Demand Side Outlet Node Name",
            "&BranchList|Demand Side Branch List Name",
            "&ConnectorList|Demand Side Connector List Name",
            "Load Distribution Scheme",
        ],
        &[],
        0,
    ),
    (
        "AirLoopHVAC",
        Loops,
        &[
            "@|Name",
            "Controller List Name",
            "Availability Manager List Name",
            "Design Supply Air Flow Rate {m3/s}",
            "&BranchList|Branch List Name",
            "&ConnectorList|Connector List Name",
            ">|Supply Side Inlet Node Name",
            "<|Demand Side Outlet Node Name",
            ">|Demand Side Inlet Node Names",
            "<|Supply Side Outlet Node Names",
        ],
        &[],
        0,
    ),
    (
        "AirLoopHVAC:SupplyPath",
        Loops,
        &["@|Name", "~|Supply Air Path Inlet Node Name"],
        &["Component {n} Object Type", "^-1|Component {n} Name"],
        1,
    ),
    (
        "AirLoopHVAC:ZoneSplitter",
        Loops,
        &["@|Name", "<|Inlet Node Name"],
        &[">|Outlet {n} Node Name"],
        1,
    ),
    (
        "AirLoopHVAC:ReturnPath",
        Loops,
        &["@|Name", "~|Return Air Path Outlet Node Name"],
        &["Component {n} Object Type", "^-1|Component {n} Name"],
        1,
    ),
    (
        "AirLoopHVAC:ZoneMixer",
        Loops,
        &["@|Name", ">|Outlet Node Name"],
        &["<|Inlet {n} Node Name"],
        1,
    ),
    (
        "Connector:Splitter",
        Loops,
        &["@|Name", "&Branch|Inlet Branch Name"],
        &["&Branch|Outlet Branch {n} Name"],
        1,
    ),
    (
        "Connector:Mixer",
        Loops,
        &["@|Name", "&Branch|Outlet Branch Name"],
        &["&Branch|Inlet Branch {n} Name"],
        1,
    ),
    (
        "ConnectorList",
        Loops,
        &["@|Name"],
        &["Connector {n} Object Type", "^-1|Connector {n} Name"],
        1,
    ),
    (
        "Branch",
        Branches,
        &["@|Name", "&Curve|Pressure Drop Curve Name"],
        &[
            "Component {n} Object Type",
            "^-1|Component {n} Name",
            "~|Component {n} Inlet Node Name",
            "~|Component {n} Outlet Node Name",
        ],
        1,
    ),
    (
        "BranchList",
        Branches,
        &["@|Name"],
        &["&Branch|Branch {n} Name"],
        1,
    ),
    ("NodeList", Nodes, &["@|Name"], &["~|Node {n} Name"], 1),
    (
        "ElectricLoadCenter:Distribution",
        LoadCenter,
        &[
            "@|Name",
            "&ElectricLoadCenter:Generators|Generator List Name",
            "Generator Operation Scheme Type",
            "Generator Demand Limit Scheme Purchased Electric Demand Limit {W}",
            "&Schedule|Generator Track Schedule Name Scheme Schedule Name",
            "Generator Track Meter Scheme Meter Name",
            "Electrical Buss Type",
            "&ElectricLoadCenter:Inverter:Simple|Inverter Name",
            "&ElectricLoadCenter:Storage:Simple|Electrical Storage Object Name",
        ],
        &[],
        0,
    ),
    (
        "ElectricLoadCenter:Generators",
        LoadCenter,
        &["@|Name"],
        &[
            "^1|Generator {n} Name",
            "Generator {n} Object Type",
            "Generator {n} Rated Electric Power Output {W}",
            "&Schedule|Generator {n} Availability Schedule Name",
            "Generator {n} Rated Thermal to Electrical Power Ratio",
        ],
        1,
    ),
    (
        "Generator:Photovoltaic",
        LoadCenter,
        &[
            "@|Name",
            "&Surface|Surface Name",
            "Photovoltaic Performance Object Type",
            "^-1|Module Performance Name",
            "Heat Transfer Integration Mode",
            "Number of Series Strings in Parallel",
            "Number of Modules in Series",
        ],
        &[],
        0,
    ),
    (
        "PhotovoltaicPerformance:Simple",
        LoadCenter,
        &[
            "@|Name",
            "Fraction of Surface Area with Active Solar Cells",
            "Conversion Efficiency Input Mode",
            "Value for Cell Efficiency if Fixed",
            "&Schedule|Efficiency Schedule Name",
        ],
        &[],
        0,
    ),
    (
        "Generator:WindTurbine",
        LoadCenter,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            "Rotor Type",
            "Power Control",
            "Rated Rotor Speed {rev/min}",
            "Rotor Diameter {m}",
            "Overall Height {m}",
            "Number of Blades",
            "Rated Power {W}",
            "Rated Wind Speed {m/s}",
            "Cut In Wind Speed {m/s}",
            "Cut Out Wind Speed {m/s}",
            "Fraction system Efficiency",
            "Maximum Tip Speed Ratio",
            "Maximum Power Coefficient",
            "Annual Local Average Wind Speed {m/s}",
            "Height for Local Average Wind Speed {m}",
            "Blade Chord Area {m2}",
            "Blade Drag Coefficient",
            "Blade Lift Coefficient",
            "Power Coefficient C1",
            "Power Coefficient C2",
            "Power Coefficient C3",
            "Power Coefficient C4",
            "Power Coefficient C5",
            "Power Coefficient C6",
        ],
        &[],
        0,
    ),
    (
        "ElectricLoadCenter:Inverter:Simple",
        LoadCenter,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            "&Zone|Zone Name",
            "Radiative Fraction",
            "Inverter Efficiency",
        ],
        &[],
        0,
    ),
    (
        "ElectricLoadCenter:Storage:Simple",
        LoadCenter,
        &[
            "@|Name",
            "&Schedule|Availability Schedule Name",
            "&Zone|Zone Name",
            "Radiative Fraction for Zone Heat Gains",
            "Nominal Energetic Efficiency for Charging",
            "Nominal Discharging Energetic Efficiency",
            "Maximum Storage Capacity {J}",
            "Maximum Power for Discharging {W}",
            "Maximum Power for Charging {W}",
            "Initial State of Charge {J}",
        ],
        &[],
        0,
    ),
    ("Output:VariableDictionary", Outputs, &["Key Field"], &[], 0),
    (
        "Output:Variable",
        Outputs,
        &["Key Value", "Variable Name", "Reporting Frequency"],
        &[],
        0,
    ),
    (
        "Output:Meter",
        Outputs,
        &["Key Name", "Reporting Frequency"],
        &[],
        0,
    ),
    (
        "ComponentCost:LineItem",
        Costs,
        &[
            "@|Name",
            "Type",
            "Line Item Type",
            "Item Name",
            "Object End-Use Key",
            "Cost per Each {$}",
            "Cost per Area {$/m2}",
            "Cost per Unit of Output Capacity {$/kW}",
            "Cost per Unit of Output Capacity per COP {$/kW}",
            "Cost per Volume {$/m3}",
            "Cost per Volume Rate {$/(m3/s)}",
            "Cost per Energy per Temperature Difference {$/(W/K)}",
            "Quantity {dimensionless}",
        ],
        &[],
        0,
    ),
];

fn build(spec: &Spec) -> ClassDef {
    let (name, section, fields, group, group_start) = *spec;
    let conv = |list: &[&str]| {
        list.iter()
            .map(|s| {
                let (name, role) = parse_field(s);
                FieldDef { name, role }
            })
            .collect::<Vec<_>>()
    };
    let mut def = ClassDef {
        name,
        section,
        fields: conv(fields),
        group: conv(group),
        group_start,
    };
    for f in def.fields.iter_mut().chain(def.group.iter_mut()) {
        if let Role::Def(ns) = &f.role {
            f.role = Role::Def(def_ns_of(name, ns));
        }
    }
    def
}

fn def_ns_of(class: &str, ns: &str) -> String {
    if ns.is_empty() {
        class.to_string()
    } else {
        ns.to_string()
    }
}

fn registry() -> &'static HashMap<String, ClassDef> {
    static REG: OnceLock<HashMap<String, ClassDef>> = OnceLock::new();
    REG.get_or_init(|| {
        SPECS
            .iter()
            .map(|s| (s.0.to_ascii_uppercase(), build(s)))
            .collect()
    })
}

/// Definition of a record class, matched case-insensitively.
pub fn class(name: &str) -> Option<&'static ClassDef> {
    registry().get(&name.to_ascii_uppercase())
}

/// Every known class, in document order.
pub fn classes() -> Vec<&'static ClassDef> {
    let mut all: Vec<&ClassDef> = registry().values().collect();
    all.sort_by_key(|c| (c.section, SPECS.iter().position(|s| s.0 == c.name)));
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_spec_parses_and_names_are_unique() {
        assert_eq!(registry().len(), SPECS.len());
        for c in classes() {
            let mut seen = std::collections::BTreeSet::new();
            for f in &c.fields {
                assert!(
                    seen.insert(field_key(&f.name).to_string()),
                    "{} repeats {}",
                    c.name,
                    f.name
                );
            }
        }
    }

    #[test]
    fn groups_expand_with_numbers() {
        let c = class("construction").unwrap();
        assert_eq!(c.field(1).unwrap().name, "Outside Layer");
        assert_eq!(c.field(2).unwrap().name, "Layer 2");
        assert_eq!(c.field(4).unwrap().name, "Layer 4");
        let b = class("Branch").unwrap();
        assert_eq!(b.field(7).unwrap().name, "Component 2 Name");
        assert_eq!(b.field(7).unwrap().role, Role::DynRef(-1));
        assert!(class("Zone").unwrap().field(9).is_none());
        assert_eq!(
            class("Zone").unwrap().fields[0].role,
            Role::Def("Zone".into())
        );
    }

    #[test]
    fn units_are_stripped_from_keys() {
        assert_eq!(field_key("Thickness {m}"), "Thickness");
        assert_eq!(field_key("Name"), "Name");
        assert_eq!(class("Material").unwrap().index_of("Thickness"), Some(2));
    }
}
