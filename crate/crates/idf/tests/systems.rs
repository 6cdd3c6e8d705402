mod common;

use common::*;
use planforge_core::reporting::{CostItem, CostKind};
use planforge_core::systems::{DhwSpec, ElectricCenterSpec, HvacTemplate, SystemsSpec};
use planforge_idf::defaults::Defaults;
use planforge_idf::nodes::{
    name_nodes, topology_records, Branch, Component, Loop, LoopKind, LoopSide,
};
use planforge_idf::systems::{DHW_TANK, SOLAR_COLLECTOR, SOLAR_LOOP};
use planforge_idf::{emit_project, IdfDocument, IdfError};

/// Three spaces side by side.
fn three_zones() -> planforge_core::model::Layout {
    single_storey(&[
        ("a", rect(0.0, 0.0, 4.0, 4.0)),
        ("b", rect(4.0, 0.0, 4.0, 4.0)),
        ("c", rect(8.0, 0.0, 4.0, 4.0)),
    ])
}

fn with_hvac(hvac: HvacTemplate) -> IdfDocument {
    emit_with(
        &three_zones(),
        SystemsSpec {
            hvac,
            ..SystemsSpec::default()
        },
    )
    .unwrap()
}

fn dhw(area: f64) -> DhwSpec {
    DhwSpec {
        tank_volume: 0.2,
        solar_collector_area: area,
        use_flow_profile: None,
    }
}

/// Component classes along a loop, supply branches then demand branches, pipes left out.
fn loop_sequence(doc: &IdfDocument, loop_name: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for side in ["Supply", "Demand"] {
        let list = doc
            .find("BranchList", &format!("{loop_name} {side} Branches"))
            .unwrap();
        for branch in list.values().skip(1) {
            let b = doc.find("Branch", branch).unwrap();
            let vals: Vec<&str> = b.values().collect();
            for c in vals[2..].chunks(4) {
                if c[0] != "Pipe:Adiabatic" {
                    out.push((c[0].to_string(), c[1].to_string()));
                }
            }
        }
    }
    out
}

#[test]
fn ideal_loads_gives_one_system_per_zone_and_no_loops() {
    let doc = with_hvac(HvacTemplate::IdealLoads);
    assert_eq!(doc.count("ZoneHVAC:IdealLoadsAirSystem"), 3);
    assert_eq!(doc.count("PlantLoop"), 0);
    assert_eq!(doc.count("AirLoopHVAC"), 0);
    assert_eq!(doc.count("ZoneControl:Thermostat"), 3);
}

#[test]
fn electric_baseboards_are_per_zone() {
    let doc = with_hvac(HvacTemplate::BaseboardElectric);
    assert_eq!(doc.count("ZoneHVAC:Baseboard:Convective:Electric"), 3);
    assert_eq!(doc.count("PlantLoop"), 0);
}

#[test]
fn hot_water_loop_has_boiler_pump_and_a_baseboard_per_zone() {
    let doc = with_hvac(HvacTemplate::HotWaterBaseboardLoop);
    assert_eq!(doc.count("PlantLoop"), 1);
    assert_eq!(doc.count("Boiler:HotWater"), 1);
    assert_eq!(doc.count("Pump:ConstantSpeed"), 1);
    assert_eq!(doc.count("ZoneHVAC:Baseboard:Convective:Water"), 3);
    let seq = loop_sequence(&doc, "HW Loop");
    let classes: Vec<&str> = seq.iter().map(|(c, _)| c.as_str()).collect();
    assert_eq!(classes[..2], ["Pump:ConstantSpeed", "Boiler:HotWater"]);
    assert_eq!(
        classes[2..]
            .iter()
            .filter(|c| **c == "ZoneHVAC:Baseboard:Convective:Water")
            .count(),
        3
    );
    assert!(doc.count("Pipe:Adiabatic") >= 4);
}

#[test]
fn unitary_air_loop_has_fan_coils_and_terminals() {
    let doc = with_hvac(HvacTemplate::UnitaryAirLoop);
    assert_eq!(doc.count("AirLoopHVAC"), 1);
    assert_eq!(doc.count("AirLoopHVAC:UnitarySystem"), 1);
    assert_eq!(doc.count("Fan:OnOff"), 1);
    assert_eq!(doc.count("Coil:Heating:Electric"), 1);
    assert_eq!(doc.count("Coil:Cooling:DX:SingleSpeed"), 1);
    assert_eq!(doc.count("AirTerminal:SingleDuct:Uncontrolled"), 3);
    let unitary = doc.of_class("AirLoopHVAC:UnitarySystem").next().unwrap();
    let fan = doc.of_class("Fan:OnOff").next().unwrap();
    let heating = doc.of_class("Coil:Heating:Electric").next().unwrap();
    assert_eq!(
        unitary.get("Air Inlet Node Name"),
        fan.get("Air Inlet Node Name")
    );
    assert_eq!(
        unitary.get("Air Outlet Node Name"),
        heating.get("Air Outlet Node Name")
    );
}

#[test]
fn solar_hot_water_runs_pump_collector_tank() {
    let systems = SystemsSpec {
        dhw: Some(dhw(4.0)),
        ..SystemsSpec::default()
    };
    let doc = emit_with(&three_zones(), systems).unwrap();
    let seq = loop_sequence(&doc, SOLAR_LOOP);
    let expected = [
        ("Pump:ConstantSpeed", format!("{SOLAR_LOOP} Pump")),
        (
            "SolarCollector:FlatPlate:Water",
            SOLAR_COLLECTOR.to_string(),
        ),
        ("WaterHeater:Mixed", DHW_TANK.to_string()),
    ];
    assert_eq!(seq, expected.map(|(c, n)| (c.to_string(), n)));
    // the pump branch feeds the collector branch through the supply splitter
    let splitter: Vec<&str> = doc
        .find(
            "Connector:Splitter",
            &format!("{SOLAR_LOOP} Supply Splitter"),
        )
        .unwrap()
        .values()
        .collect();
    assert_eq!(splitter[1], format!("{SOLAR_LOOP} Supply Inlet Branch"));
    assert!(splitter[2..].contains(&format!("{SOLAR_LOOP} Supply Collector Branch").as_str()));
    assert_eq!(doc.count("WaterHeater:Mixed"), 1);
    assert_eq!(doc.count("WaterUse:Equipment"), 3);
    assert_eq!(doc.count("PlantLoop"), 2);
    let gross = doc
        .find("Shading:Site:Detailed", "DHW Collector Surface")
        .unwrap();
    assert!(gross.get("Number of Vertices").is_some());
}

#[test]
fn hot_water_without_collector_has_one_loop() {
    let doc = emit_with(
        &three_zones(),
        SystemsSpec {
            dhw: Some(dhw(0.0)),
            ..SystemsSpec::default()
        },
    )
    .unwrap();
    assert_eq!(doc.count("PlantLoop"), 1);
    assert_eq!(doc.count("SolarCollector:FlatPlate:Water"), 0);
}

#[test]
fn electric_center_lists_two_generators_an_inverter_and_a_battery() {
    let ec = ElectricCenterSpec {
        pv_area: 10.0,
        wind_rated_w: 1500.0,
        battery_kwh: 5.0,
        inverter_efficiency: 0.95,
    };
    let doc = emit_with(
        &three_zones(),
        SystemsSpec {
            electric_center: Some(ec),
            ..SystemsSpec::default()
        },
    )
    .unwrap();
    assert_eq!(doc.count("ElectricLoadCenter:Generators"), 1);
    let gens = doc
        .of_class("ElectricLoadCenter:Generators")
        .next()
        .unwrap();
    let types: Vec<&str> = gens
        .fields
        .iter()
        .filter(|f| f.comment.ends_with("Object Type"))
        .map(|f| f.value.as_str())
        .collect();
    assert_eq!(types, ["Generator:Photovoltaic", "Generator:WindTurbine"]);
    assert_eq!(doc.count("ElectricLoadCenter:Inverter:Simple"), 1);
    assert_eq!(doc.count("ElectricLoadCenter:Storage:Simple"), 1);
    let battery = doc
        .of_class("ElectricLoadCenter:Storage:Simple")
        .next()
        .unwrap();
    let capacity: f64 = battery
        .get("Maximum Storage Capacity")
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(capacity, 5.0 * 3.6e6);
    let inverter = doc
        .of_class("ElectricLoadCenter:Inverter:Simple")
        .next()
        .unwrap();
    assert_eq!(inverter.get("Inverter Efficiency"), Some("0.95"));
}

#[test]
fn pv_only_center_has_one_generator() {
    let ec = ElectricCenterSpec {
        pv_area: 10.0,
        wind_rated_w: 0.0,
        battery_kwh: 0.0,
        inverter_efficiency: 0.9,
    };
    let doc = emit_with(
        &three_zones(),
        SystemsSpec {
            electric_center: Some(ec),
            ..SystemsSpec::default()
        },
    )
    .unwrap();
    assert_eq!(doc.count("Generator:Photovoltaic"), 1);
    assert_eq!(doc.count("Generator:WindTurbine"), 0);
    assert_eq!(doc.count("ElectricLoadCenter:Storage:Simple"), 0);
}

#[test]
fn costs_are_grouped_by_type() {
    let mut p = project(SINGLE);
    p.settings.costs = vec![
        CostItem {
            name: "wall construction".into(),
            kind: CostKind::Construction,
            quantity: 120.0,
            unit_cost: 80.0,
        },
        CostItem {
            name: "boiler".into(),
            kind: CostKind::Equipment,
            quantity: 1.0,
            unit_cost: 1500.0,
        },
        CostItem {
            name: "glazing".into(),
            kind: CostKind::Construction,
            quantity: 14.0,
            unit_cost: 250.0,
        },
    ];
    let doc = emit_project(&p, &p.layouts[0].layout, &location()).unwrap();
    let items: Vec<(&str, &str)> = doc
        .of_class("ComponentCost:LineItem")
        .map(|r| (r.get("Type").unwrap(), r.name()))
        .collect();
    assert_eq!(items.len(), 3);
    let kinds: Vec<&str> = items.iter().map(|(k, _)| *k).collect();
    let mut groups = kinds.clone();
    groups.dedup();
    assert_eq!(
        groups.len(),
        2,
        "line items are contiguous by type: {kinds:?}"
    );
    let boiler = doc.find("ComponentCost:LineItem", "boiler").unwrap();
    assert_eq!(boiler.get("Cost per Each"), Some("1500"));
    assert_eq!(boiler.get("Quantity"), Some("1"));
    let wall = doc
        .find("ComponentCost:LineItem", "wall construction")
        .unwrap();
    assert_eq!(wall.get("Cost per Each"), Some("80"));
}

#[test]
fn unknown_hot_water_profile_is_reported() {
    let spec = DhwSpec {
        use_flow_profile: Some("nope".into()),
        ..dhw(4.0)
    };
    let err = emit_with(
        &three_zones(),
        SystemsSpec {
            dhw: Some(spec),
            ..SystemsSpec::default()
        },
    )
    .unwrap_err();
    assert_eq!(err, IdfError::UnknownProfile("nope".into()));
}

fn pipe(name: &str) -> Component {
    Component::new("Pipe:Adiabatic", name)
}

#[test]
fn plant_sides_without_parallel_branches_are_unsupported() {
    let mut lp = Loop {
        name: "L".into(),
        kind: LoopKind::Plant,
        supply: LoopSide {
            branches: vec![
                Branch::new("In", vec![pipe("a")]),
                Branch::new("Out", vec![pipe("b")]),
            ],
        },
        demand: LoopSide::default(),
    };
    name_nodes(&mut lp).unwrap();
    let err = topology_records(&lp, &Defaults::bundled()).unwrap_err();
    assert!(
        matches!(err, IdfError::UnsupportedCombination(_)),
        "{err:?}"
    );
}

#[test]
fn node_naming_handles_the_empty_graph_and_is_stable() {
    let mut empty = Loop {
        name: "E".into(),
        kind: LoopKind::Air,
        supply: LoopSide::default(),
        demand: LoopSide::default(),
    };
    name_nodes(&mut empty).unwrap();
    assert!(empty.components().is_empty());
    let build = || {
        let mut lp = Loop {
            name: "L".into(),
            kind: LoopKind::Plant,
            supply: LoopSide {
                branches: vec![Branch::new("Main", vec![pipe("a"), pipe("b"), pipe("c")])],
            },
            demand: LoopSide::default(),
        };
        name_nodes(&mut lp).unwrap();
        lp
    };
    assert_eq!(build(), build());
    let mut dup = build();
    dup.supply.branches[0].components.push(pipe("b"));
    assert!(matches!(
        name_nodes(&mut dup),
        Err(IdfError::DuplicateComponent { .. })
    ));
}
