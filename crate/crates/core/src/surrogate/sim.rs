//! Hourly one-node zone simulation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Orientation;
use crate::model::Hemisphere;
use crate::num::{compensated_sum, Scalar};

use super::weather::WeatherSeries;
use super::zone::{ThermalModel, ZoneThermalParams};
use super::SurrogateError;

const SECONDS_PER_HOUR: f64 = 3600.0;

/// Heating and cooling setpoints bounding the comfort band (°C).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetpointBand<T> {
    pub heating_base: T,
    pub cooling_base: T,
}

impl<T: Scalar> SetpointBand<T> {
    pub fn new(heating_base: T, cooling_base: T) -> Result<Self, SurrogateError> {
        let band = Self {
            heating_base,
            cooling_base,
        };
        band.check()?;
        Ok(band)
    }

    pub fn check(&self) -> Result<(), SurrogateError> {
        if self.heating_base < self.cooling_base {
            Ok(())
        } else {
            Err(SurrogateError::InvalidBand(format!(
                "heating base {} must be below cooling base {}",
                self.heating_base, self.cooling_base
            )))
        }
    }
}

impl<T: Scalar> Default for SetpointBand<T> {
    fn default() -> Self {
        Self {
            heating_base: T::lit(20.0),
            cooling_base: T::lit(25.0),
        }
    }
}

/// Degree-hours below the heating base and above the cooling base (K·h).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DegreeHours<T> {
    pub hdh: T,
    pub cdh: T,
}

pub fn degree_hours<T: Scalar>(series: &[T], band: &SetpointBand<T>) -> DegreeHours<T> {
    let zero = T::zero();
    DegreeHours {
        hdh: compensated_sum(series.iter().map(|&t| (band.heating_base - t).max(zero))),
        cdh: compensated_sum(series.iter().map(|&t| (t - band.cooling_base).max(zero))),
    }
}

/// Orientation factor applied to direct normal irradiation.
fn direct_factor(facing: Orientation, hemisphere: Hemisphere) -> f64 {
    let facing = match hemisphere {
        Hemisphere::North => facing,
        Hemisphere::South => match facing {
            Orientation::N => Orientation::S,
            Orientation::S => Orientation::N,
            o => o,
        },
    };
    match facing {
        Orientation::S => 0.40,
        Orientation::E | Orientation::W => 0.25,
        Orientation::N => 0.05,
    }
}

/// Incident irradiance on a vertical surface facing `facing` for one hour (W/m²).
pub fn incident_solar<T: Scalar>(facing: Orientation, dni: T, dhi: T, hemisphere: Hemisphere) -> T {
    dhi * T::lit(0.5) + dni * T::lit(direct_factor(facing, hemisphere))
}

/// Annual solar gain of one zone (Wh).
pub fn annual_solar_gain<T: Scalar>(
    zone: &ZoneThermalParams<T>,
    weather: &WeatherSeries<T>,
    hemisphere: Hemisphere,
) -> T {
    compensated_sum((0..weather.len()).map(|h| solar_gain(zone, weather, h, hemisphere)))
}

fn solar_gain<T: Scalar>(
    zone: &ZoneThermalParams<T>,
    weather: &WeatherSeries<T>,
    h: usize,
    hemisphere: Hemisphere,
) -> T {
    zone.window_gain.iter().fold(T::zero(), |acc, (&o, &a)| {
        acc + a * incident_solar(o, weather.dni[h], weather.dhi[h], hemisphere)
    })
}

/// Per-zone quantities that stay fixed over the run.
struct Prepared<T> {
    ua_ext: T,
    ua_tot: T,
    decay: T,
    /// (zone index, conductance) of neighbours present in the model.
    coupling: Vec<(usize, T)>,
}

fn prepare<T: Scalar>(model: &ThermalModel<T>) -> Vec<Prepared<T>> {
    let index: BTreeMap<&str, usize> = model
        .zones
        .iter()
        .enumerate()
        .map(|(i, z)| (z.zone_id.as_str(), i))
        .collect();
    model
        .zones
        .iter()
        .map(|z| {
            let coupling: Vec<(usize, T)> = z
                .ua_int
                .iter()
                .filter_map(|(id, &ua)| index.get(id.as_str()).map(|&i| (i, ua)))
                .collect();
            let ua_tot = coupling.iter().fold(z.ua_ext, |a, &(_, ua)| a + ua);
            Prepared {
                ua_ext: z.ua_ext,
                ua_tot,
                decay: (-(ua_tot * T::lit(SECONDS_PER_HOUR)) / z.capacitance).exp(),
                coupling,
            }
        })
        .collect()
}

/// Equilibrium temperature of zone `z` for hour `h` given neighbour temperatures `prev`.
fn equilibrium<T: Scalar>(
    model: &ThermalModel<T>,
    p: &Prepared<T>,
    z: usize,
    weather: &WeatherSeries<T>,
    h: usize,
    prev: &[T],
) -> T {
    let zone = &model.zones[z];
    let gains = zone
        .internal_gain_profile
        .get(h % zone.internal_gain_profile.len().max(1))
        .copied()
        .unwrap_or_default();
    let coupled = p
        .coupling
        .iter()
        .fold(T::zero(), |a, &(i, ua)| a + ua * prev[i]);
    (p.ua_ext * weather.dry_bulb[h]
        + coupled
        + solar_gain(zone, weather, h, model.hemisphere)
        + gains)
        / p.ua_tot
}

/// Hourly temperatures per zone with ids, in model order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneSeries<T> {
    pub zone_ids: Vec<String>,
    /// `temperatures[z][h]`: temperature of zone `z` at the end of hour `h` (°C).
    pub temperatures: Vec<Vec<T>>,
}

/// Free-running temperatures: exact exponential update per hour with inputs held constant,
/// neighbours taken from the previous hour.
pub fn simulate_free_float<T: Scalar>(
    model: &ThermalModel<T>,
    weather: &WeatherSeries<T>,
    start_t: T,
) -> ZoneSeries<T> {
    let prepared = prepare(model);
    let n = model.zones.len();
    let hours = weather.len();
    let mut prev = vec![start_t; n];
    let mut out = vec![Vec::with_capacity(hours); n];
    for h in 0..hours {
        let next: Vec<T> = (0..n)
            .map(|z| {
                let p = &prepared[z];
                let t_eq = equilibrium(model, p, z, weather, h, &prev);
                t_eq + (prev[z] - t_eq) * p.decay
            })
            .collect();
        for z in 0..n {
            out[z].push(next[z]);
        }
        prev = next;
    }
    ZoneSeries {
        zone_ids: model.zones.iter().map(|z| z.zone_id.clone()).collect(),
        temperatures: out,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealLoads<T> {
    pub zone_ids: Vec<String>,
    pub temperatures: Vec<Vec<T>>,
    /// Heating energy per zone and hour (Wh).
    pub q_heat: Vec<Vec<T>>,
    /// Cooling energy per zone and hour (Wh).
    pub q_cool: Vec<Vec<T>>,
}

/// Free float clamped to the band. An hour that would leave the band is held at the violated
/// setpoint, and the energy to hold it steadily is reported.
pub fn simulate_ideal_loads<T: Scalar>(
    model: &ThermalModel<T>,
    weather: &WeatherSeries<T>,
    band: &SetpointBand<T>,
) -> IdealLoads<T> {
    let prepared = prepare(model);
    let n = model.zones.len();
    let hours = weather.len();
    let mut prev = vec![band.heating_base; n];
    let mut temperatures = vec![Vec::with_capacity(hours); n];
    let mut q_heat = vec![Vec::with_capacity(hours); n];
    let mut q_cool = vec![Vec::with_capacity(hours); n];
    let zero = T::zero();
    for h in 0..hours {
        let mut next = vec![zero; n];
        for z in 0..n {
            let p = &prepared[z];
            let t_eq = equilibrium(model, p, z, weather, h, &prev);
            let free = t_eq + (prev[z] - t_eq) * p.decay;
            let (t, qh, qc) = if free < band.heating_base {
                (
                    band.heating_base,
                    (p.ua_tot * (band.heating_base - t_eq)).max(zero),
                    zero,
                )
            } else if free > band.cooling_base {
                (
                    band.cooling_base,
                    zero,
                    (p.ua_tot * (t_eq - band.cooling_base)).max(zero),
                )
            } else {
                (free, zero, zero)
            };
            next[z] = t;
            temperatures[z].push(t);
            q_heat[z].push(qh);
            q_cool[z].push(qc);
        }
        prev = next;
    }
    IdealLoads {
        zone_ids: model.zones.iter().map(|z| z.zone_id.clone()).collect(),
        temperatures,
        q_heat,
        q_cool,
    }
}

/// Weighted discomfort of a free-float run: Σ w_z (hdh_z + cooling_weight · cdh_z).
/// Zones missing from `zone_weights` weigh 1.
pub fn weighted_discomfort<T: Scalar>(
    series: &ZoneSeries<T>,
    band: &SetpointBand<T>,
    zone_weights: &BTreeMap<String, T>,
    cooling_weight: T,
) -> T {
    compensated_sum(
        series
            .zone_ids
            .iter()
            .zip(&series.temperatures)
            .map(|(id, temps)| {
                let w = zone_weights.get(id).copied().unwrap_or_else(T::one);
                if w == T::zero() {
                    return T::zero();
                }
                let dh = degree_hours(temps, band);
                w * (dh.hdh + cooling_weight * dh.cdh)
            }),
    )
}
