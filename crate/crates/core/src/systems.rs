//! Declarative description of the HVAC, hot water and on-site generation systems.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HvacTemplate {
    IdealLoads,
    BaseboardElectric,
    UnitaryAirLoop,
    HotWaterBaseboardLoop,
}

impl HvacTemplate {
    pub const ALL: [HvacTemplate; 4] = [
        HvacTemplate::IdealLoads,
        HvacTemplate::BaseboardElectric,
        HvacTemplate::UnitaryAirLoop,
        HvacTemplate::HotWaterBaseboardLoop,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DhwSpec {
    /// m³
    pub tank_volume: f64,
    /// m²
    pub solar_collector_area: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_flow_profile: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElectricCenterSpec {
    /// m²
    pub pv_area: f64,
    /// W
    pub wind_rated_w: f64,
    pub battery_kwh: f64,
    pub inverter_efficiency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VentilationSpec {
    /// Air changes per hour.
    pub ach: f64,
}

impl Default for VentilationSpec {
    fn default() -> Self {
        Self { ach: 0.6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemsSpec {
    pub hvac: HvacTemplate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dhw: Option<DhwSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electric_center: Option<ElectricCenterSpec>,
    /// Construction set id.
    #[serde(default = "default_constructions")]
    pub constructions: String,
    /// Gain profile id per space, overriding the program's assignment.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gains: BTreeMap<String, String>,
    #[serde(default)]
    pub ventilation: VentilationSpec,
}

fn default_constructions() -> String {
    "default".into()
}

impl Default for SystemsSpec {
    fn default() -> Self {
        Self {
            hvac: HvacTemplate::IdealLoads,
            dhw: None,
            electric_center: None,
            constructions: default_constructions(),
            gains: BTreeMap::new(),
            ventilation: VentilationSpec::default(),
        }
    }
}

impl SystemsSpec {
    /// Returns the first violated invariant, if any.
    pub fn check(&self) -> Result<(), String> {
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be a non-negative number, got {v}"))
            }
        };
        nonneg("ventilation.ach", self.ventilation.ach)?;
        if let Some(d) = &self.dhw {
            nonneg("dhw.tank_volume", d.tank_volume)?;
            nonneg("dhw.solar_collector_area", d.solar_collector_area)?;
        }
        if let Some(e) = &self.electric_center {
            nonneg("electric_center.pv_area", e.pv_area)?;
            nonneg("electric_center.wind_rated_w", e.wind_rated_w)?;
            nonneg("electric_center.battery_kwh", e.battery_kwh)?;
            if !(e.inverter_efficiency > 0.0 && e.inverter_efficiency <= 1.0) {
                return Err(format!(
                    "electric_center.inverter_efficiency must be in (0, 1], got {}",
                    e.inverter_efficiency
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_rejects_bad_inverter() {
        let mut s = SystemsSpec::default();
        assert!(s.check().is_ok());
        s.electric_center = Some(ElectricCenterSpec {
            pv_area: 10.0,
            wind_rated_w: 1000.0,
            battery_kwh: 5.0,
            inverter_efficiency: 0.0,
        });
        assert!(s.check().unwrap_err().contains("inverter_efficiency"));
    }

    #[test]
    fn hvac_serializes_snake_case() {
        let j = serde_json::to_string(&HvacTemplate::HotWaterBaseboardLoop).unwrap();
        assert_eq!(j, "\"hot_water_baseboard_loop\"");
    }
}
