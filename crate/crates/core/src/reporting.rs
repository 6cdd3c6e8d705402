//! Report periods, hourly aggregates and cost summaries.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::model::Layout;
use crate::num::compensated_sum;
use crate::surrogate::weather::{WeatherSeries, HOURS_PER_YEAR, MONTH_DAYS};
use crate::surrogate::{simulate_free_float, simulate_ideal_loads, SurrogateError, ThermalSetup};

pub const ZONE_TEMPERATURE: &str = "Zone Mean Air Temperature";
pub const FREE_FLOAT_TEMPERATURE: &str = "Zone Free Float Air Temperature";
pub const OUTDOOR_TEMPERATURE: &str = "Site Outdoor Air Drybulb Temperature";
pub const HEATING_ENERGY: &str = "Zone Ideal Loads Zone Total Heating Energy";
pub const COOLING_ENERGY: &str = "Zone Ideal Loads Zone Total Cooling Energy";
/// Key used for site-level variables.
pub const ENVIRONMENT_KEY: &str = "Environment";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("series has {got} values, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("unknown report period '{0}' (expected all_year, trimester_1..trimester_4, coldest_day or hottest_day)")]
    BadPeriod(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReportPeriod {
    AllYear,
    /// Calendar quarter, 1 to 4.
    Trimester(u8),
    ColdestDay,
    HottestDay,
}

impl ReportPeriod {
    pub const ALL: [ReportPeriod; 7] = [
        ReportPeriod::AllYear,
        ReportPeriod::Trimester(1),
        ReportPeriod::Trimester(2),
        ReportPeriod::Trimester(3),
        ReportPeriod::Trimester(4),
        ReportPeriod::ColdestDay,
        ReportPeriod::HottestDay,
    ];
}

impl fmt::Display for ReportPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportPeriod::AllYear => f.write_str("all_year"),
            ReportPeriod::Trimester(k) => write!(f, "trimester_{k}"),
            ReportPeriod::ColdestDay => f.write_str("coldest_day"),
            ReportPeriod::HottestDay => f.write_str("hottest_day"),
        }
    }
}

impl FromStr for ReportPeriod {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all_year" => Ok(ReportPeriod::AllYear),
            "coldest_day" => Ok(ReportPeriod::ColdestDay),
            "hottest_day" => Ok(ReportPeriod::HottestDay),
            _ => match s
                .strip_prefix("trimester_")
                .and_then(|k| k.parse::<u8>().ok())
            {
                Some(k @ 1..=4) => Ok(ReportPeriod::Trimester(k)),
                _ => Err(ReportError::BadPeriod(s.to_string())),
            },
        }
    }
}

impl Serialize for ReportPeriod {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReportPeriod {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// First hour of each month in a non-leap year, plus the year end.
fn month_starts() -> [usize; 13] {
    let mut out = [0; 13];
    for (m, days) in MONTH_DAYS.iter().enumerate() {
        out[m + 1] = out[m] + days * 24;
    }
    out
}

fn extreme_day<T: crate::num::Scalar>(weather: &WeatherSeries<T>, coldest: bool) -> usize {
    let means = weather.daily_mean_dry_bulb();
    let mut best = 0;
    for (d, &m) in means.iter().enumerate() {
        let better = if coldest {
            m < means[best]
        } else {
            m > means[best]
        };
        if better {
            best = d;
        }
    }
    best
}

/// Day of year (0-based) with the lowest mean outdoor dry-bulb; ties go to the earliest day.
pub fn coldest_day<T: crate::num::Scalar>(weather: &WeatherSeries<T>) -> usize {
    extreme_day(weather, true)
}

/// Day of year (0-based) with the highest mean outdoor dry-bulb; ties go to the earliest day.
pub fn hottest_day<T: crate::num::Scalar>(weather: &WeatherSeries<T>) -> usize {
    extreme_day(weather, false)
}

/// Hour range of a period within the year.
pub fn period_hours<T: crate::num::Scalar>(
    period: ReportPeriod,
    weather: &WeatherSeries<T>,
) -> Range<usize> {
    match period {
        ReportPeriod::AllYear => 0..HOURS_PER_YEAR,
        ReportPeriod::Trimester(k) => {
            let starts = month_starts();
            let k = usize::from(k.clamp(1, 4));
            starts[3 * k - 3]..starts[3 * k]
        }
        ReportPeriod::ColdestDay => {
            let d = coldest_day(weather);
            d * 24..d * 24 + 24
        }
        ReportPeriod::HottestDay => {
            let d = hottest_day(weather);
            d * 24..d * 24 + 24
        }
    }
}

/// One hourly output channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HourlySeries {
    pub variable: String,
    /// Zone, system or meter the values belong to.
    pub key: String,
    pub units: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub sum: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Aggregates {
    pub fn of(values: &[f64]) -> Self {
        let sum = compensated_sum(values.iter().copied());
        Self {
            sum,
            mean: if values.is_empty() {
                0.0
            } else {
                sum / values.len() as f64
            },
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub variable: String,
    pub key: String,
    pub units: String,
    pub period: ReportPeriod,
    /// Hour of year of the first value.
    pub start_hour: usize,
    pub values: Vec<f64>,
    pub aggregates: Aggregates,
}

impl Report {
    /// Whether the aggregates match a recomputation on the slice.
    pub fn is_consistent(&self) -> bool {
        let again = Aggregates::of(&self.values);
        let near = |a: f64, b: f64| a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        near(again.sum, self.aggregates.sum)
            && near(again.mean, self.aggregates.mean)
            && again.min == self.aggregates.min
            && again.max == self.aggregates.max
    }

    /// `hour,value` CSV with hour of year.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("hour,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.start_hour + i, v));
        }
        out
    }
}

pub fn aggregate_report<T: crate::num::Scalar>(
    series: &HourlySeries,
    weather: &WeatherSeries<T>,
    period: ReportPeriod,
) -> Result<Report, ReportError> {
    if series.values.len() != HOURS_PER_YEAR {
        return Err(ReportError::BadLength {
            expected: HOURS_PER_YEAR,
            got: series.values.len(),
        });
    }
    if let ReportPeriod::Trimester(k) = period {
        if !(1..=4).contains(&k) {
            return Err(ReportError::BadPeriod(period.to_string()));
        }
    }
    let hours = period_hours(period, weather);
    let values = series.values[hours.clone()].to_vec();
    Ok(Report {
        variable: series.variable.clone(),
        key: series.key.clone(),
        units: series.units.clone(),
        period,
        start_hour: hours.start,
        aggregates: Aggregates::of(&values),
        values,
    })
}

/// Hourly outputs of one simulation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// `surrogate` or `energyplus`.
    pub engine: String,
    pub series: Vec<HourlySeries>,
}

impl SimulationResult {
    /// Distinct variable names, sorted.
    pub fn variables(&self) -> Vec<String> {
        let mut v: Vec<String> = self.series.iter().map(|s| s.variable.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Keys available for a variable, in output order.
    pub fn keys(&self, variable: &str) -> Vec<String> {
        self.series
            .iter()
            .filter(|s| s.variable == variable)
            .map(|s| s.key.clone())
            .collect()
    }

    /// Finds a series; keys compare case-insensitively since EnergyPlus upper-cases them.
    pub fn find(&self, variable: &str, key: &str) -> Option<&HourlySeries> {
        self.series
            .iter()
            .find(|s| s.variable == variable && s.key.eq_ignore_ascii_case(key))
    }
}

/// Runs the surrogate under ideal loads and in free float and packages the hourly channels
/// under EnergyPlus-style variable names. Energies are reported in J.
pub fn surrogate_results(
    layout: &Layout,
    weather: &WeatherSeries<f64>,
    setup: &ThermalSetup,
) -> Result<SimulationResult, SurrogateError> {
    setup.discomfort.band.check()?;
    let model = setup.model(layout)?;
    let band = &setup.discomfort.band;
    let loads = simulate_ideal_loads(&model, weather, band);
    let start = setup
        .discomfort
        .start_temperature
        .unwrap_or((band.heating_base + band.cooling_base) / 2.0);
    let free = simulate_free_float(&model, weather, start);
    let names: Vec<String> = layout.spaces().map(|s| s.zone_name()).collect();
    let mut series = vec![HourlySeries {
        variable: OUTDOOR_TEMPERATURE.into(),
        key: ENVIRONMENT_KEY.into(),
        units: "C".into(),
        values: weather.dry_bulb.clone(),
    }];
    let channel = |variable: &str, units: &str, key: &str, values: Vec<f64>| HourlySeries {
        variable: variable.into(),
        key: key.into(),
        units: units.into(),
        values,
    };
    for (z, name) in names.iter().enumerate() {
        series.push(channel(
            ZONE_TEMPERATURE,
            "C",
            name,
            loads.temperatures[z].clone(),
        ));
        series.push(channel(
            FREE_FLOAT_TEMPERATURE,
            "C",
            name,
            free.temperatures[z].clone(),
        ));
        series.push(channel(
            HEATING_ENERGY,
            "J",
            name,
            loads.q_heat[z].iter().map(|q| q * 3600.0).collect(),
        ));
        series.push(channel(
            COOLING_ENERGY,
            "J",
            name,
            loads.q_cool[z].iter().map(|q| q * 3600.0).collect(),
        ));
    }
    Ok(SimulationResult {
        engine: "surrogate".into(),
        series,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    Equipment,
    Construction,
}

/// An entry of a project's cost table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostItem {
    pub name: String,
    pub kind: CostKind,
    /// Units, or m² for constructions.
    #[serde(default = "one")]
    pub quantity: f64,
    pub unit_cost: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostLine {
    pub name: String,
    pub kind: CostKind,
    pub quantity: f64,
    pub unit_cost: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostTotals {
    pub equipment: f64,
    pub construction: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    pub items: Vec<CostLine>,
    pub totals: CostTotals,
    pub grand_total: f64,
}

/// Line items sorted by (kind, name) with per-kind and grand totals.
pub fn cost_summary(items: &[CostItem]) -> CostSummary {
    let mut lines: Vec<CostLine> = items
        .iter()
        .map(|c| CostLine {
            name: c.name.clone(),
            kind: c.kind,
            quantity: c.quantity,
            unit_cost: c.unit_cost,
            total: c.quantity * c.unit_cost,
        })
        .collect();
    lines.sort_by(|a, b| {
        (a.kind, &a.name)
            .cmp(&(b.kind, &b.name))
            .then(a.quantity.total_cmp(&b.quantity))
            .then(a.unit_cost.total_cmp(&b.unit_cost))
    });
    let total_of =
        |k: CostKind| compensated_sum(lines.iter().filter(|l| l.kind == k).map(|l| l.total));
    let totals = CostTotals {
        equipment: total_of(CostKind::Equipment),
        construction: total_of(CostKind::Construction),
    };
    CostSummary {
        grand_total: totals.equipment + totals.construction,
        totals,
        items: lines,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::{synthetic_weather, SyntheticClimate};

    #[test]
    fn periods_round_trip_as_text() {
        for p in ReportPeriod::ALL {
            assert_eq!(p.to_string().parse::<ReportPeriod>().unwrap(), p);
            let json = serde_json::to_string(&p).unwrap();
            assert_eq!(serde_json::from_str::<ReportPeriod>(&json).unwrap(), p);
        }
        assert!("trimester_5".parse::<ReportPeriod>().is_err());
        assert!("summer".parse::<ReportPeriod>().is_err());
    }

    #[test]
    fn trimester_one_is_first_ninety_days() {
        let w = synthetic_weather(&SyntheticClimate::default());
        assert_eq!(period_hours(ReportPeriod::Trimester(1), &w), 0..2160);
        assert_eq!(
            period_hours(ReportPeriod::Trimester(4), &w).end,
            HOURS_PER_YEAR
        );
    }

    #[test]
    fn constant_series_aggregates() {
        let w = synthetic_weather(&SyntheticClimate::default());
        let s = HourlySeries {
            variable: "v".into(),
            key: "k".into(),
            units: "C".into(),
            values: vec![5.0; HOURS_PER_YEAR],
        };
        for p in ReportPeriod::ALL {
            let r = aggregate_report(&s, &w, p).unwrap();
            assert_eq!(
                (r.aggregates.mean, r.aggregates.min, r.aggregates.max),
                (5.0, 5.0, 5.0)
            );
            assert!(r.is_consistent());
        }
        let short = HourlySeries {
            values: vec![1.0; 10],
            ..s
        };
        assert_eq!(
            aggregate_report(&short, &w, ReportPeriod::AllYear),
            Err(ReportError::BadLength {
                expected: 8760,
                got: 10
            })
        );
    }

    #[test]
    fn costs_sorted_and_totalled() {
        let items = vec![
            CostItem {
                name: "wall".into(),
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
        ];
        let s = cost_summary(&items);
        assert_eq!(
            s.totals,
            CostTotals {
                equipment: 1500.0,
                construction: 9600.0
            }
        );
        assert_eq!(s.grand_total, 11100.0);
        assert_eq!(s.items[0].name, "boiler");
        let mut rev = items.clone();
        rev.reverse();
        assert_eq!(cost_summary(&rev), s);
        assert_eq!(cost_summary(&[]), CostSummary::default());
    }
}
