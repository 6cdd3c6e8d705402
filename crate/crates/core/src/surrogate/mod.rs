//! Degree-hour thermal surrogate: weather input, zone take-off and hourly simulation.

mod sim;
pub mod weather;
mod zone;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{ConstructionError, ConstructionSet};
use crate::model::{Layout, SpaceProgram};

pub use sim::{
    annual_solar_gain, degree_hours, incident_solar, simulate_free_float, simulate_ideal_loads,
    weighted_discomfort, DegreeHours, IdealLoads, SetpointBand, ZoneSeries,
};
pub use weather::{
    load_weather, render_epw, synthetic_weather, Location, SyntheticClimate, WeatherSeries,
    HOURS_PER_YEAR,
};
pub use zone::{
    derive_zone_params, shading_multiplier, ThermalModel, ZoneOptions, ZoneThermalParams,
    AIR_HEAT_CAPACITY, DEFAULT_GAIN_DENSITY, UNIT_CAPACITANCE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurrogateError {
    #[error("malformed weather{}: {reason}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    MalformedWeather { line: Option<usize>, reason: String },
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("invalid setpoint band: {0}")]
    InvalidBand(String),
}

/// How discomfort is scored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscomfortSpec {
    pub band: SetpointBand<f64>,
    /// Weight per zone (space id); absent zones weigh 1.
    pub zone_weights: BTreeMap<String, f64>,
    pub cooling_weight: f64,
    /// Initial zone temperature; the band midpoint when absent.
    pub start_temperature: Option<f64>,
}

impl Default for DiscomfortSpec {
    fn default() -> Self {
        Self {
            band: SetpointBand::default(),
            zone_weights: BTreeMap::new(),
            cooling_weight: 1.0,
            start_temperature: None,
        }
    }
}

/// Everything besides the layout needed to run the surrogate.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalSetup {
    pub constructions: ConstructionSet,
    pub options: ZoneOptions,
    pub discomfort: DiscomfortSpec,
}

impl ThermalSetup {
    pub fn model(&self, layout: &Layout) -> Result<ThermalModel<f64>, SurrogateError> {
        derive_zone_params(layout, &self.constructions, &self.options)
    }
}

/// Weighted heating and cooling degree-hours of the free-running building (K·h).
pub fn discomfort_objective(
    layout: &Layout,
    weather: &WeatherSeries<f64>,
    setup: &ThermalSetup,
) -> Result<f64, SurrogateError> {
    let spec = &setup.discomfort;
    spec.band.check()?;
    let model = setup.model(layout)?;
    let start = spec
        .start_temperature
        .unwrap_or((spec.band.heating_base + spec.band.cooling_base) / 2.0);
    let series = simulate_free_float(&model, weather, start);
    Ok(weighted_discomfort(
        &series,
        &spec.band,
        &spec.zone_weights,
        spec.cooling_weight,
    ))
}

/// Builds a setup for `program` with the given constructions and systems defaults.
pub fn setup_for(
    program: &SpaceProgram,
    systems: &crate::systems::SystemsSpec,
    constructions: ConstructionSet,
    discomfort: DiscomfortSpec,
) -> ThermalSetup {
    ThermalSetup {
        constructions,
        options: ZoneOptions::for_program(program, systems),
        discomfort,
    }
}
