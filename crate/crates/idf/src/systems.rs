//! HVAC, domestic hot water and electric load center templates.

use std::collections::BTreeMap;

use planforge_core::surrogate::SetpointBand;
use planforge_core::systems::{DhwSpec, ElectricCenterSpec, HvacTemplate, SystemsSpec};

use crate::builder::{checked_name, num, RecordBuilder};
use crate::defaults::Defaults;
use crate::document::Record;
use crate::nodes::{name_nodes, topology_records, Branch, Component, Loop, LoopKind, LoopSide};
use crate::zones::{
    peak, up_vertices, weekly_fraction_schedule, with_vertices, ZoneInfo, ALWAYS_ON, ANY_NUMBER,
    TEMPERATURE,
};
use crate::IdfError;

pub const HEATING_SETPOINT: &str = "Heating Setpoint";
pub const COOLING_SETPOINT: &str = "Cooling Setpoint";
pub const CONTROL_TYPE: &str = "Thermostat Control Type";
pub const DUAL_SETPOINT: &str = "Dual Setpoint";

pub const HW_LOOP: &str = "HW Loop";
pub const AIR_LOOP: &str = "Air Loop";
pub const DHW_LOOP: &str = "DHW Loop";
pub const SOLAR_LOOP: &str = "DHW Solar Loop";
pub const DHW_TANK: &str = "DHW Tank";
pub const SOLAR_COLLECTOR: &str = "DHW Solar Collector";
pub const LOAD_CENTER: &str = "Electric Load Center";

/// Upper bound of the single heating load range of a plant operation scheme (W).
const LOAD_RANGE_MAX: f64 = 1e6;

pub fn constant_schedule(name: &str, limits: &str, value: f64, defaults: &Defaults) -> Record {
    RecordBuilder::new("Schedule:Constant")
        .set("Name", name)
        .set("Schedule Type Limits Name", limits)
        .num("Hourly Value", value)
        .build(defaults)
}

/// Placement of site-level collector and panel surfaces: above the building's roof.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteFrame {
    pub x: f64,
    pub y: f64,
    pub roof_height: f64,
}

pub struct SystemsInput<'a> {
    pub zones: &'a [ZoneInfo],
    pub systems: &'a SystemsSpec,
    /// Profiles by id, for the hot water use schedule.
    pub profiles: &'a BTreeMap<String, Vec<f64>>,
    pub band: &'a SetpointBand<f64>,
    pub frame: SiteFrame,
    pub defaults: &'a Defaults,
}

/// Records of every template plus the named loops they were built from.
#[derive(Clone, Debug, Default)]
pub struct Systems {
    pub records: Vec<Record>,
    pub loops: Vec<Loop>,
}

pub fn assemble_systems(input: &SystemsInput) -> Result<Systems, IdfError> {
    input
        .systems
        .check()
        .map_err(IdfError::UnsupportedCombination)?;
    let mut out = Systems::default();
    let d = input.defaults;
    out.records.extend([
        constant_schedule(HEATING_SETPOINT, TEMPERATURE, input.band.heating_base, d),
        constant_schedule(COOLING_SETPOINT, TEMPERATURE, input.band.cooling_base, d),
        constant_schedule(CONTROL_TYPE, ANY_NUMBER, 4.0, d),
        RecordBuilder::new("ThermostatSetpoint:DualSetpoint")
            .set("Name", DUAL_SETPOINT)
            .set(
                "Heating Setpoint Temperature Schedule Name",
                HEATING_SETPOINT,
            )
            .set(
                "Cooling Setpoint Temperature Schedule Name",
                COOLING_SETPOINT,
            )
            .build(d),
    ]);
    for z in input.zones {
        out.records.push(
            RecordBuilder::new("ZoneControl:Thermostat")
                .set("Name", format!("{} Thermostat", z.name))
                .set("Zone or ZoneList Name", &z.name)
                .set("Control Type Schedule Name", CONTROL_TYPE)
                .set("Control 1 Object Type", "ThermostatSetpoint:DualSetpoint")
                .set("Control 1 Name", DUAL_SETPOINT)
                .build(d),
        );
    }
    match input.systems.hvac {
        HvacTemplate::IdealLoads => ideal_loads(input, &mut out),
        HvacTemplate::BaseboardElectric => baseboard_electric(input, &mut out)?,
        HvacTemplate::HotWaterBaseboardLoop => hot_water_loop(input, &mut out)?,
        HvacTemplate::UnitaryAirLoop => unitary_air_loop(input, &mut out)?,
    }
    if let Some(dhw) = &input.systems.dhw {
        hot_water_service(input, dhw, &mut out)?;
    }
    if let Some(ec) = &input.systems.electric_center {
        electric_center(input, ec, &mut out)?;
    }
    Ok(out)
}

/// Zone equipment connections and a one-item equipment list.
struct ZoneNodes {
    inlet: bool,
    exhaust: bool,
    ret: bool,
}

fn zone_equipment(
    z: &ZoneInfo,
    nodes: ZoneNodes,
    class: &str,
    name: &str,
    d: &Defaults,
) -> [Record; 2] {
    let list = format!("{} Equipment", z.name);
    let node = |on: bool, kind: &str| {
        if on {
            format!("{} {kind} Node", z.name)
        } else {
            String::new()
        }
    };
    [
        RecordBuilder::new("ZoneHVAC:EquipmentConnections")
            .set("Zone Name", &z.name)
            .set("Zone Conditioning Equipment List Name", &list)
            .set(
                "Zone Air Inlet Node or NodeList Name",
                node(nodes.inlet, "Inlet"),
            )
            .set(
                "Zone Air Exhaust Node or NodeList Name",
                node(nodes.exhaust, "Exhaust"),
            )
            .set("Zone Air Node Name", node(true, "Air"))
            .set(
                "Zone Return Air Node or NodeList Name",
                node(nodes.ret, "Return"),
            )
            .build(d),
        RecordBuilder::new("ZoneHVAC:EquipmentList")
            .set("Name", &list)
            .push(class)
            .push(name)
            .push(1)
            .push(1)
            .build(d),
    ]
}

fn ideal_loads(input: &SystemsInput, out: &mut Systems) {
    let d = input.defaults;
    for z in input.zones {
        let name = format!("{} Ideal Loads", z.name);
        let class = "ZoneHVAC:IdealLoadsAirSystem";
        out.records.extend(zone_equipment(
            z,
            ZoneNodes {
                inlet: true,
                exhaust: true,
                ret: false,
            },
            class,
            &name,
            d,
        ));
        out.records.push(
            RecordBuilder::new(class)
                .set("Name", &name)
                .set(
                    "Zone Supply Air Node Name",
                    format!("{} Inlet Node", z.name),
                )
                .set(
                    "Zone Exhaust Air Node Name",
                    format!("{} Exhaust Node", z.name),
                )
                .build(d),
        );
    }
}

fn design_capacity(d: &Defaults, class: &str, area: f64) -> Result<f64, IdfError> {
    Ok(d.num(class, "Heating Design Capacity Per Floor Area")? * area)
}

fn baseboard_electric(input: &SystemsInput, out: &mut Systems) -> Result<(), IdfError> {
    let d = input.defaults;
    let class = "ZoneHVAC:Baseboard:Convective:Electric";
    for z in input.zones {
        let name = format!("{} Baseboard", z.name);
        out.records.extend(zone_equipment(
            z,
            ZoneNodes {
                inlet: false,
                exhaust: false,
                ret: false,
            },
            class,
            &name,
            d,
        ));
        out.records.push(
            RecordBuilder::new(class)
                .set("Name", &name)
                .set("Availability Schedule Name", ALWAYS_ON)
                .num(
                    "Heating Design Capacity",
                    design_capacity(d, class, z.floor_area)?,
                )
                .build(d),
        );
    }
    Ok(())
}

fn pipe(name: String) -> Component {
    Component::new("Pipe:Adiabatic", name)
}

/// Plant loop with a pump on the supply inlet branch, the given parallel supply and demand
/// branches, and bypass and outlet pipes on both sides.
fn plant_loop(name: &str, supply: Vec<Branch>, demand: Vec<Branch>) -> Loop {
    let mut s = vec![Branch::new(
        "Supply Inlet",
        vec![Component::new("Pump:ConstantSpeed", format!("{name} Pump"))],
    )];
    s.extend(supply);
    s.push(Branch::new(
        "Supply Bypass",
        vec![pipe(format!("{name} Supply Bypass"))],
    ));
    s.push(Branch::new(
        "Supply Outlet",
        vec![pipe(format!("{name} Supply Outlet Pipe"))],
    ));
    let mut dm = vec![Branch::new(
        "Demand Inlet",
        vec![pipe(format!("{name} Demand Inlet Pipe"))],
    )];
    dm.extend(demand);
    dm.push(Branch::new(
        "Demand Bypass",
        vec![pipe(format!("{name} Demand Bypass"))],
    ));
    dm.push(Branch::new(
        "Demand Outlet",
        vec![pipe(format!("{name} Demand Outlet Pipe"))],
    ));
    Loop {
        name: name.into(),
        kind: LoopKind::Plant,
        supply: LoopSide { branches: s },
        demand: LoopSide { branches: dm },
    }
}

/// Pump and pipe records, the loop object, its topology and a scheduled supply setpoint.
fn plant_loop_records(
    lp: &Loop,
    operation: Vec<Record>,
    setpoint_schedule: &str,
    d: &Defaults,
) -> Result<Vec<Record>, IdfError> {
    let mut out = topology_records(lp, d)?;
    for c in lp.components() {
        let b = match c.class.as_str() {
            "Pump:ConstantSpeed" | "Pipe:Adiabatic" => RecordBuilder::new(&c.class),
            _ => continue,
        };
        out.push(
            b.set("Name", &c.name)
                .set("Inlet Node Name", &c.inlet)
                .set("Outlet Node Name", &c.outlet)
                .build(d),
        );
    }
    let schemes = format!("{} Operation", lp.name);
    let nodes = format!("{} Setpoint Nodes", lp.name);
    out.push(
        RecordBuilder::new("PlantLoop")
            .set("Name", &lp.name)
            .set("Plant Equipment Operation Scheme Name", &schemes)
            .set("Loop Temperature Setpoint Node Name", lp.supply.outlet())
            .set("Plant Side Inlet Node Name", lp.supply.inlet())
            .set("Plant Side Outlet Node Name", lp.supply.outlet())
            .set(
                "Plant Side Branch List Name",
                format!("{} Supply Branches", lp.name),
            )
            .set(
                "Plant Side Connector List Name",
                format!("{} Supply Connectors", lp.name),
            )
            .set("Demand Side Inlet Node Name", lp.demand.inlet())
            .set("Demand Side Outlet Node Name", lp.demand.outlet())
            .set(
                "Demand Side Branch List Name",
                format!("{} Demand Branches", lp.name),
            )
            .set(
                "Demand Side Connector List Name",
                format!("{} Demand Connectors", lp.name),
            )
            .build(d),
    );
    let mut schemes_rec =
        RecordBuilder::new("PlantEquipmentOperationSchemes").set("Name", &schemes);
    for op in &operation {
        schemes_rec = schemes_rec.push(&op.class).push(op.name()).push(ALWAYS_ON);
    }
    out.push(schemes_rec.build(d));
    out.extend(operation);
    out.push(
        RecordBuilder::new("SetpointManager:Scheduled")
            .set("Name", format!("{} Setpoint Manager", lp.name))
            .set("Control Variable", "Temperature")
            .set("Schedule Name", setpoint_schedule)
            .set("Setpoint Node or NodeList Name", &nodes)
            .build(d),
    );
    out.push(
        RecordBuilder::new("NodeList")
            .set("Name", &nodes)
            .push(lp.supply.outlet())
            .build(d),
    );
    out.push(constant_schedule(
        setpoint_schedule,
        TEMPERATURE,
        d.schedule_value(setpoint_schedule)?,
        d,
    ));
    Ok(out)
}

/// Heating-load operation over the whole range, running one piece of equipment.
fn heating_operation(loop_name: &str, class: &str, name: &str, d: &Defaults) -> Vec<Record> {
    let list = format!("{loop_name} Equipment");
    vec![
        RecordBuilder::new("PlantEquipmentOperation:HeatingLoad")
            .set("Name", format!("{loop_name} Heating Operation"))
            .push(0)
            .push(LOAD_RANGE_MAX)
            .push(&list)
            .build(d),
        RecordBuilder::new("PlantEquipmentList")
            .set("Name", &list)
            .push(class)
            .push(name)
            .build(d),
    ]
}

fn hot_water_loop(input: &SystemsInput, out: &mut Systems) -> Result<(), IdfError> {
    let d = input.defaults;
    let boiler = format!("{HW_LOOP} Boiler");
    let class = "ZoneHVAC:Baseboard:Convective:Water";
    let demand = input
        .zones
        .iter()
        .map(|z| {
            Branch::new(
                format!("Demand {}", z.name),
                vec![Component::new(class, format!("{} Baseboard", z.name))],
            )
        })
        .collect();
    let mut lp = plant_loop(
        HW_LOOP,
        vec![Branch::new(
            "Supply Boiler",
            vec![Component::new("Boiler:HotWater", &boiler)],
        )],
        demand,
    );
    name_nodes(&mut lp)?;
    let supply_temp = "HW Loop Supply Temperature";
    let b = lp.component(&boiler, None).expect("boiler on loop");
    out.records.push(
        RecordBuilder::new("Boiler:HotWater")
            .set("Name", &boiler)
            .num(
                "Design Water Outlet Temperature",
                d.schedule_value(supply_temp)?,
            )
            .set("Boiler Water Inlet Node Name", &b.inlet)
            .set("Boiler Water Outlet Node Name", &b.outlet)
            .build(d),
    );
    for z in input.zones {
        let name = format!("{} Baseboard", z.name);
        let c = lp.component(&name, None).expect("baseboard on loop");
        out.records.extend(zone_equipment(
            z,
            ZoneNodes {
                inlet: false,
                exhaust: false,
                ret: false,
            },
            class,
            &name,
            d,
        ));
        out.records.push(
            RecordBuilder::new(class)
                .set("Name", &name)
                .set("Availability Schedule Name", ALWAYS_ON)
                .set("Inlet Node Name", &c.inlet)
                .set("Outlet Node Name", &c.outlet)
                .num(
                    "Heating Design Capacity",
                    design_capacity(d, class, z.floor_area)?,
                )
                .build(d),
        );
    }
    let operation = heating_operation(HW_LOOP, "Boiler:HotWater", &boiler, d);
    out.records
        .extend(plant_loop_records(&lp, operation, supply_temp, d)?);
    out.loops.push(lp);
    Ok(())
}

/// Performance curves of the DX cooling coil (the usual single-speed residential set).
fn dx_curves(d: &Defaults) -> Vec<Record> {
    let biquadratic = |name: &str, c: [f64; 10]| {
        let keys = [
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
        ];
        keys.iter()
            .zip(c)
            .fold(
                RecordBuilder::new("Curve:Biquadratic").set("Name", name),
                |b, (k, v)| b.num(k, v),
            )
            .build(d)
    };
    let quadratic = |name: &str, c: [f64; 5]| {
        let keys = [
            "Coefficient1 Constant",
            "Coefficient2 x",
            "Coefficient3 x**2",
            "Minimum Value of x",
            "Maximum Value of x",
        ];
        keys.iter()
            .zip(c)
            .fold(
                RecordBuilder::new("Curve:Quadratic").set("Name", name),
                |b, (k, v)| b.num(k, v),
            )
            .build(d)
    };
    vec![
        biquadratic(
            "Cooling Coil CapFT",
            [
                0.942587793,
                0.009543347,
                0.000683770,
                -0.011042676,
                0.000005249,
                -0.000009720,
                12.77778,
                23.88889,
                18.0,
                46.11111,
            ],
        ),
        quadratic("Cooling Coil CapFFF", [0.8, 0.2, 0.0, 0.5, 1.5]),
        biquadratic(
            "Cooling Coil EIRFT",
            [
                0.342414409,
                0.034885008,
                -0.000623700,
                0.004977216,
                0.000437951,
                -0.000728028,
                12.77778,
                23.88889,
                18.0,
                46.11111,
            ],
        ),
        quadratic("Cooling Coil EIRFFF", [1.1552, -0.1808, 0.0256, 0.5, 1.5]),
        quadratic("Cooling Coil PLF", [0.85, 0.15, 0.0, 0.0, 1.0]),
    ]
}

fn unitary_air_loop(input: &SystemsInput, out: &mut Systems) -> Result<(), IdfError> {
    let d = input.defaults;
    let first = input.zones.first().ok_or_else(|| {
        IdfError::UnsupportedCombination("an air loop needs at least one zone".into())
    })?;
    let unitary = format!("{AIR_LOOP} Unitary");
    let fan = format!("{AIR_LOOP} Fan");
    let cooling = format!("{AIR_LOOP} Cooling Coil");
    let heating = format!("{AIR_LOOP} Heating Coil");
    let children = vec![
        Component::new("Fan:OnOff", &fan),
        Component::new("Coil:Cooling:DX:SingleSpeed", &cooling),
        Component::new("Coil:Heating:Electric", &heating),
    ];
    let mut lp = Loop {
        name: AIR_LOOP.into(),
        kind: LoopKind::Air,
        supply: LoopSide {
            branches: vec![Branch::new(
                "Supply",
                vec![Component::new("AirLoopHVAC:UnitarySystem", &unitary).with_children(children)],
            )],
        },
        demand: LoopSide::default(),
    };
    name_nodes(&mut lp)?;
    let demand_inlet = format!("{AIR_LOOP} Demand Inlet Node");
    let demand_outlet = format!("{AIR_LOOP} Demand Outlet Node");
    let u = lp.component(&unitary, None).expect("unitary on loop");
    let node = |name: &str| {
        lp.component(name, None)
            .map(|c| (c.inlet.clone(), c.outlet.clone()))
            .expect("child on loop")
    };
    let ((fi, fo), (ci, co), (hi, ho)) = (node(&fan), node(&cooling), node(&heating));
    out.records.extend(topology_records(&lp, d)?);
    out.records.push(
        RecordBuilder::new("AirLoopHVAC")
            .set("Name", AIR_LOOP)
            .set("Branch List Name", format!("{AIR_LOOP} Supply Branches"))
            .set("Supply Side Inlet Node Name", lp.supply.inlet())
            .set("Demand Side Outlet Node Name", &demand_outlet)
            .set("Demand Side Inlet Node Names", &demand_inlet)
            .set("Supply Side Outlet Node Names", lp.supply.outlet())
            .build(d),
    );
    out.records.push(
        RecordBuilder::new("AirLoopHVAC:UnitarySystem")
            .set("Name", &unitary)
            .set("Controlling Zone or Thermostat Location", &first.name)
            .set("Availability Schedule Name", ALWAYS_ON)
            .set("Air Inlet Node Name", &u.inlet)
            .set("Air Outlet Node Name", &u.outlet)
            .set("Supply Fan Object Type", "Fan:OnOff")
            .set("Supply Fan Name", &fan)
            .set("Heating Coil Object Type", "Coil:Heating:Electric")
            .set("Heating Coil Name", &heating)
            .set("Cooling Coil Object Type", "Coil:Cooling:DX:SingleSpeed")
            .set("Cooling Coil Name", &cooling)
            .build(d),
    );
    out.records.push(
        RecordBuilder::new("Fan:OnOff")
            .set("Name", &fan)
            .set("Availability Schedule Name", ALWAYS_ON)
            .set("Air Inlet Node Name", fi)
            .set("Air Outlet Node Name", fo)
            .build(d),
    );
    out.records.push(
        RecordBuilder::new("Coil:Cooling:DX:SingleSpeed")
            .set("Name", &cooling)
            .set("Availability Schedule Name", ALWAYS_ON)
            .set("Air Inlet Node Name", ci)
            .set("Air Outlet Node Name", co)
            .set(
                "Total Cooling Capacity Function of Temperature Curve Name",
                "Cooling Coil CapFT",
            )
            .set(
                "Total Cooling Capacity Function of Flow Fraction Curve Name",
                "Cooling Coil CapFFF",
            )
            .set(
                "Energy Input Ratio Function of Temperature Curve Name",
                "Cooling Coil EIRFT",
            )
            .set(
                "Energy Input Ratio Function of Flow Fraction Curve Name",
                "Cooling Coil EIRFFF",
            )
            .set(
                "Part Load Fraction Correlation Curve Name",
                "Cooling Coil PLF",
            )
            .build(d),
    );
    out.records.push(
        RecordBuilder::new("Coil:Heating:Electric")
            .set("Name", &heating)
            .set("Availability Schedule Name", ALWAYS_ON)
            .set("Air Inlet Node Name", hi)
            .set("Air Outlet Node Name", ho)
            .build(d),
    );
    out.records.extend(dx_curves(d));

    let splitter = format!("{AIR_LOOP} Zone Splitter");
    let mixer = format!("{AIR_LOOP} Zone Mixer");
    let mut s = RecordBuilder::new("AirLoopHVAC:ZoneSplitter")
        .set("Name", &splitter)
        .set("Inlet Node Name", &demand_inlet);
    let mut m = RecordBuilder::new("AirLoopHVAC:ZoneMixer")
        .set("Name", &mixer)
        .set("Outlet Node Name", &demand_outlet);
    let class = "AirTerminal:SingleDuct:Uncontrolled";
    for z in input.zones {
        let terminal = format!("{} Terminal", z.name);
        let inlet = format!("{} Inlet Node", z.name);
        s = s.push(&inlet);
        m = m.push(format!("{} Return Node", z.name));
        out.records.extend(zone_equipment(
            z,
            ZoneNodes {
                inlet: true,
                exhaust: false,
                ret: true,
            },
            class,
            &terminal,
            d,
        ));
        out.records.push(
            RecordBuilder::new(class)
                .set("Name", &terminal)
                .set("Availability Schedule Name", ALWAYS_ON)
                .set("Zone Supply Air Node Name", &inlet)
                .build(d),
        );
    }
    out.records.push(s.build(d));
    out.records.push(m.build(d));
    out.records.push(
        RecordBuilder::new("AirLoopHVAC:SupplyPath")
            .set("Name", format!("{AIR_LOOP} Supply Path"))
            .set("Supply Air Path Inlet Node Name", &demand_inlet)
            .push("AirLoopHVAC:ZoneSplitter")
            .push(&splitter)
            .build(d),
    );
    out.records.push(
        RecordBuilder::new("AirLoopHVAC:ReturnPath")
            .set("Name", format!("{AIR_LOOP} Return Path"))
            .set("Return Air Path Outlet Node Name", &demand_outlet)
            .push("AirLoopHVAC:ZoneMixer")
            .push(&mixer)
            .build(d),
    );
    out.loops.push(lp);
    Ok(())
}

fn square(area: f64, x: f64, y: f64) -> planforge_core::Rect {
    let side = area.sqrt();
    planforge_core::Rect::new(x, y, side, side)
}

fn hot_water_service(
    input: &SystemsInput,
    dhw: &DhwSpec,
    out: &mut Systems,
) -> Result<(), IdfError> {
    let d = input.defaults;
    if dhw.tank_volume <= 0.0 {
        return Err(IdfError::UnsupportedCombination(
            "hot water needs a tank volume above zero".into(),
        ));
    }
    if input.zones.is_empty() {
        return Err(IdfError::UnsupportedCombination(
            "hot water needs at least one zone".into(),
        ));
    }
    let use_schedule = match &dhw.use_flow_profile {
        None => ALWAYS_ON.to_string(),
        Some(id) => {
            checked_name(id)?;
            let p = input
                .profiles
                .get(id)
                .ok_or_else(|| IdfError::UnknownProfile(id.clone()))?;
            if p.is_empty() || peak(p) <= 0.0 {
                return Err(IdfError::UnsupportedCombination(format!(
                    "hot water profile '{id}' has no positive value"
                )));
            }
            let (mut records, year) = weekly_fraction_schedule("DHW Use", p, peak(p), d);
            out.records.append(&mut records);
            year
        }
    };
    let class = "WaterUse:Connections";
    let demand = input
        .zones
        .iter()
        .map(|z| {
            Branch::new(
                format!("Demand {}", z.name),
                vec![Component::new(class, format!("{} Water Use", z.name))],
            )
        })
        .collect();
    let tank = Component::new("WaterHeater:Mixed", DHW_TANK).on_port("Use");
    let mut lp = plant_loop(
        DHW_LOOP,
        vec![Branch::new("Supply Tank", vec![tank])],
        demand,
    );
    name_nodes(&mut lp)?;
    let (mains, target, setpoint, ambient) = (
        "DHW Mains Temperature",
        "DHW Target Temperature",
        "DHW Setpoint Temperature",
        "DHW Tank Ambient Temperature",
    );
    for s in [mains, target, ambient] {
        out.records
            .push(constant_schedule(s, TEMPERATURE, d.schedule_value(s)?, d));
    }
    for z in input.zones {
        let conn = format!("{} Water Use", z.name);
        let equip = format!("{} Water Use Equipment", z.name);
        let c = lp.component(&conn, None).expect("connection on loop");
        out.records.push(
            RecordBuilder::new("WaterUse:Equipment")
                .set("Name", &equip)
                .set("Flow Rate Fraction Schedule Name", &use_schedule)
                .set("Target Temperature Schedule Name", target)
                .set("Cold Water Supply Temperature Schedule Name", mains)
                .set("Zone Name", &z.name)
                .build(d),
        );
        out.records.push(
            RecordBuilder::new(class)
                .set("Name", &conn)
                .set("Inlet Node Name", &c.inlet)
                .set("Outlet Node Name", &c.outlet)
                .set("Cold Water Supply Temperature Schedule Name", mains)
                .push(&equip)
                .build(d),
        );
    }
    let use_side = lp
        .component(DHW_TANK, Some("Use"))
        .expect("tank on loop")
        .clone();
    let mut tank_rec = RecordBuilder::new("WaterHeater:Mixed")
        .set("Name", DHW_TANK)
        .num("Tank Volume", dhw.tank_volume)
        .set("Setpoint Temperature Schedule Name", setpoint)
        .set("Ambient Temperature Schedule Name", ambient)
        .set("Use Side Inlet Node Name", &use_side.inlet)
        .set("Use Side Outlet Node Name", &use_side.outlet);
    let operation = heating_operation(DHW_LOOP, "WaterHeater:Mixed", DHW_TANK, d);
    out.records
        .extend(plant_loop_records(&lp, operation, setpoint, d)?);
    out.loops.push(lp);

    if dhw.solar_collector_area > 0.0 {
        let collector = Component::new("SolarCollector:FlatPlate:Water", SOLAR_COLLECTOR);
        let mut solar = plant_loop(
            SOLAR_LOOP,
            vec![Branch::new("Supply Collector", vec![collector])],
            vec![Branch::new(
                "Demand Tank",
                vec![Component::new("WaterHeater:Mixed", DHW_TANK).on_port("Source")],
            )],
        );
        name_nodes(&mut solar)?;
        let source = solar
            .component(DHW_TANK, Some("Source"))
            .expect("tank on solar loop");
        tank_rec = tank_rec
            .set("Source Side Inlet Node Name", &source.inlet)
            .set("Source Side Outlet Node Name", &source.outlet);
        let c = solar
            .component(SOLAR_COLLECTOR, None)
            .expect("collector on loop");
        let surface = "DHW Collector Surface";
        let performance = format!("{SOLAR_COLLECTOR} Performance");
        let f = input.frame;
        let v = up_vertices(
            &square(dhw.solar_collector_area, f.x, f.y),
            f.roof_height + 0.1,
        );
        out.records.push(
            with_vertices(
                RecordBuilder::new("Shading:Site:Detailed").set("Name", surface),
                &v,
            )
            .build(d),
        );
        out.records.push(
            RecordBuilder::new("SolarCollectorPerformance:FlatPlate")
                .set("Name", &performance)
                .num("Gross Area", dhw.solar_collector_area)
                .build(d),
        );
        out.records.push(
            RecordBuilder::new("SolarCollector:FlatPlate:Water")
                .set("Name", SOLAR_COLLECTOR)
                .set("SolarCollectorPerformance Name", &performance)
                .set("Surface Name", surface)
                .set("Inlet Node Name", &c.inlet)
                .set("Outlet Node Name", &c.outlet)
                .build(d),
        );
        let list = format!("{SOLAR_LOOP} Equipment");
        let operation = vec![
            RecordBuilder::new("PlantEquipmentOperation:Uncontrolled")
                .set("Name", format!("{SOLAR_LOOP} Collector Operation"))
                .set("Equipment List Name", &list)
                .build(d),
            RecordBuilder::new("PlantEquipmentList")
                .set("Name", &list)
                .push("SolarCollector:FlatPlate:Water")
                .push(SOLAR_COLLECTOR)
                .build(d),
        ];
        out.records.extend(plant_loop_records(
            &solar,
            operation,
            "DHW Solar Loop Temperature",
            d,
        )?);
        out.loops.push(solar);
    }
    out.records.push(tank_rec.build(d));
    Ok(())
}

fn electric_center(
    input: &SystemsInput,
    ec: &ElectricCenterSpec,
    out: &mut Systems,
) -> Result<(), IdfError> {
    let d = input.defaults;
    if ec.pv_area <= 0.0 && ec.wind_rated_w <= 0.0 {
        return Err(IdfError::UnsupportedCombination(
            "an electric load center needs photovoltaic area or a wind turbine".into(),
        ));
    }
    let generators = format!("{LOAD_CENTER} Generators");
    let inverter = format!("{LOAD_CENTER} Inverter");
    let battery = format!("{LOAD_CENTER} Battery");
    let mut list = RecordBuilder::new("ElectricLoadCenter:Generators").set("Name", &generators);
    if ec.pv_area > 0.0 {
        let efficiency = d.num(
            "PhotovoltaicPerformance:Simple",
            "Value for Cell Efficiency if Fixed",
        )?;
        let f = input.frame;
        // beside the collector, which sits at the frame origin
        let offset = input
            .systems
            .dhw
            .as_ref()
            .map_or(0.0, |h| h.solar_collector_area.sqrt() + 0.5);
        let v = up_vertices(&square(ec.pv_area, f.x + offset, f.y), f.roof_height + 0.1);
        out.records.push(
            with_vertices(
                RecordBuilder::new("Shading:Site:Detailed").set("Name", "PV Surface"),
                &v,
            )
            .build(d),
        );
        out.records.push(
            RecordBuilder::new("PhotovoltaicPerformance:Simple")
                .set("Name", "PV Performance")
                .build(d),
        );
        out.records.push(
            RecordBuilder::new("Generator:Photovoltaic")
                .set("Name", "PV Generator")
                .set("Surface Name", "PV Surface")
                .set(
                    "Photovoltaic Performance Object Type",
                    "PhotovoltaicPerformance:Simple",
                )
                .set("Module Performance Name", "PV Performance")
                .build(d),
        );
        list = list
            .push("PV Generator")
            .push("Generator:Photovoltaic")
            .push(num(ec.pv_area * 1000.0 * efficiency))
            .push(ALWAYS_ON)
            .push("");
    }
    if ec.wind_rated_w > 0.0 {
        out.records.push(
            RecordBuilder::new("Generator:WindTurbine")
                .set("Name", "Wind Turbine")
                .set("Availability Schedule Name", ALWAYS_ON)
                .num("Rated Power", ec.wind_rated_w)
                .build(d),
        );
        list = list
            .push("Wind Turbine")
            .push("Generator:WindTurbine")
            .push(num(ec.wind_rated_w))
            .push(ALWAYS_ON)
            .push("");
    }
    out.records.push(list.build(d));
    out.records.push(
        RecordBuilder::new("ElectricLoadCenter:Inverter:Simple")
            .set("Name", &inverter)
            .set("Availability Schedule Name", ALWAYS_ON)
            .num("Inverter Efficiency", ec.inverter_efficiency)
            .build(d),
    );
    let with_battery = ec.battery_kwh > 0.0;
    if with_battery {
        let joules = ec.battery_kwh * 3.6e6;
        out.records.push(
            RecordBuilder::new("ElectricLoadCenter:Storage:Simple")
                .set("Name", &battery)
                .set("Availability Schedule Name", ALWAYS_ON)
                .num("Maximum Storage Capacity", joules)
                .num("Initial State of Charge", joules / 2.0)
                .build(d),
        );
    }
    out.records.push(
        RecordBuilder::new("ElectricLoadCenter:Distribution")
            .set("Name", LOAD_CENTER)
            .set("Generator List Name", &generators)
            .set(
                "Electrical Buss Type",
                if with_battery {
                    "DirectCurrentWithInverterDCStorage"
                } else {
                    "DirectCurrentWithInverter"
                },
            )
            .set("Inverter Name", &inverter)
            .set(
                "Electrical Storage Object Name",
                if with_battery { battery.as_str() } else { "" },
            )
            .build(d),
    );
    Ok(())
}
