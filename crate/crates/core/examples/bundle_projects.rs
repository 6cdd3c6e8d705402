//! Regenerates the example projects in `data/projects` from the bundled programs.
//!
//! Run from the crate directory: `cargo run --release --example bundle_projects`.

use std::path::Path;

use planforge_core::epsap::{evolve, EsParams};
use planforge_core::model::SpaceProgram;
use planforge_core::project::{save_project, Project};
use planforge_core::reporting::{CostItem, CostKind};
use planforge_core::systems::{DhwSpec, ElectricCenterSpec, HvacTemplate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for (name, seed) in [("single_storey", 0), ("two_storey", 9), ("three_storey", 0)] {
        let text = std::fs::read_to_string(data.join("programs").join(format!("{name}.json")))?;
        let program: SpaceProgram = serde_json::from_str(&text)?;
        let mut project = Project::new(name.replace('_', "-"), program);
        project.settings.epsap = EsParams {
            seed,
            ..EsParams::default()
        };
        project.settings.n_solutions = 3;
        match name {
            "single_storey" => {
                project.settings.costs = vec![
                    CostItem {
                        name: "exterior wall".into(),
                        kind: CostKind::Construction,
                        quantity: 120.0,
                        unit_cost: 80.0,
                    },
                    CostItem {
                        name: "glazing".into(),
                        kind: CostKind::Construction,
                        quantity: 14.0,
                        unit_cost: 250.0,
                    },
                ];
            }
            "two_storey" => {
                project.systems.hvac = HvacTemplate::HotWaterBaseboardLoop;
                project.systems.dhw = Some(DhwSpec {
                    tank_volume: 0.3,
                    solar_collector_area: 4.0,
                    use_flow_profile: None,
                });
                project.settings.costs = vec![
                    CostItem {
                        name: "boiler".into(),
                        kind: CostKind::Equipment,
                        quantity: 1.0,
                        unit_cost: 1500.0,
                    },
                    CostItem {
                        name: "solar collector".into(),
                        kind: CostKind::Equipment,
                        quantity: 4.0,
                        unit_cost: 400.0,
                    },
                ];
            }
            _ => {
                project.systems.hvac = HvacTemplate::UnitaryAirLoop;
                project.systems.electric_center = Some(ElectricCenterSpec {
                    pv_area: 12.0,
                    wind_rated_w: 1500.0,
                    battery_kwh: 5.0,
                    inverter_efficiency: 0.95,
                });
            }
        }
        project.layouts = evolve(
            &project.program,
            &project.settings.epsap,
            project.settings.n_solutions,
        )?;
        let path = data.join("projects").join(format!("{name}.json"));
        save_project(&project, &path)?;
        println!(
            "{}: best fitness {}",
            path.display(),
            project.layouts[0].fitness
        );
    }
    Ok(())
}
