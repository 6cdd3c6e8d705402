//! EPW weather ingestion and synthetic climates.

use serde::{Deserialize, Serialize};

use crate::num::Scalar;

use super::SurrogateError;

pub const HOURS_PER_YEAR: usize = 8760;
const HEADER_LINES: usize = 8;
const EPW_FIELDS: usize = 35;

/// Days per month of the non-leap year used for every hourly series.
pub const MONTH_DAYS: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
    #[serde(default)]
    pub time_zone: f64,
    #[serde(default)]
    pub elevation: f64,
}

/// One non-leap year of hourly weather. Radiation values are hourly sums in Wh/m².
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeatherSeries<T> {
    pub location: Location,
    pub dry_bulb: Vec<T>,
    pub ghi: Vec<T>,
    pub dni: Vec<T>,
    pub dhi: Vec<T>,
    /// Data repairs made while reading (missing-value substitutions).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl<T: Scalar> WeatherSeries<T> {
    pub fn len(&self) -> usize {
        self.dry_bulb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dry_bulb.is_empty()
    }

    /// Mean outdoor dry-bulb of each calendar day.
    pub fn daily_mean_dry_bulb(&self) -> Vec<T> {
        self.dry_bulb
            .chunks(24)
            .map(|d| d.iter().fold(T::zero(), |a, &b| a + b) / T::lit(d.len() as f64))
            .collect()
    }

    pub fn cast<U: Scalar>(&self) -> WeatherSeries<U> {
        let c = |v: &[T]| v.iter().map(|x| U::lit(x.to_f64_lossy())).collect();
        WeatherSeries {
            location: self.location.clone(),
            dry_bulb: c(&self.dry_bulb),
            ghi: c(&self.ghi),
            dni: c(&self.dni),
            dhi: c(&self.dhi),
            warnings: self.warnings.clone(),
        }
    }
}

fn malformed(line: Option<usize>, reason: impl Into<String>) -> SurrogateError {
    SurrogateError::MalformedWeather {
        line,
        reason: reason.into(),
    }
}

fn parse_location(header: &str) -> Location {
    let f: Vec<&str> = header.split(',').map(str::trim).collect();
    if f.first().map(|s| s.eq_ignore_ascii_case("LOCATION")) != Some(true) {
        return Location::default();
    }
    let num = |i: usize| f.get(i).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    Location {
        name: f.get(1).copied().unwrap_or_default().to_string(),
        latitude: num(6),
        longitude: num(7),
        time_zone: num(8),
        elevation: num(9),
    }
}

fn is_missing_radiation(v: f64) -> bool {
    v == 999.0 || v == 9999.0
}

fn is_missing_dry_bulb(v: f64) -> bool {
    v >= 99.9
}

/// Fills gaps by linear interpolation between the nearest valid neighbours.
fn interpolate_gaps(values: &mut [f64], missing: &[bool]) -> Result<(), SurrogateError> {
    let valid: Vec<usize> = (0..values.len()).filter(|&i| !missing[i]).collect();
    if valid.is_empty() {
        return Err(malformed(None, "every dry-bulb value is missing"));
    }
    for i in 0..values.len() {
        if !missing[i] {
            continue;
        }
        let next = valid.partition_point(|&v| v < i);
        values[i] = match (next.checked_sub(1).map(|p| valid[p]), valid.get(next)) {
            (Some(a), Some(&b)) => {
                values[a] + (values[b] - values[a]) * (i - a) as f64 / (b - a) as f64
            }
            (Some(a), None) => values[a],
            (None, Some(&b)) => values[b],
            (None, None) => unreachable!("valid is non-empty"),
        };
    }
    Ok(())
}

/// Reads EPW text: 8 header lines then one 35-field row per hour. Leap-year files lose Feb 29.
pub fn load_weather<T: Scalar>(epw_text: &str) -> Result<WeatherSeries<T>, SurrogateError> {
    let lines: Vec<&str> = epw_text.lines().collect();
    if lines.len() < HEADER_LINES {
        return Err(malformed(
            None,
            format!(
                "expected {HEADER_LINES} header lines, found {}",
                lines.len()
            ),
        ));
    }
    let location = parse_location(lines[0]);
    let mut rows: Vec<[f64; 4]> = Vec::with_capacity(HOURS_PER_YEAR);
    let mut leap_rows = 0usize;
    let mut total_rows = 0usize;
    for (i, line) in lines.iter().enumerate().skip(HEADER_LINES) {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != EPW_FIELDS {
            return Err(malformed(
                Some(line_no),
                format!("expected {EPW_FIELDS} fields, found {}", f.len()),
            ));
        }
        let num = |idx: usize, name: &str| -> Result<f64, SurrogateError> {
            f[idx - 1]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    malformed(
                        Some(line_no),
                        format!("unparsable {name} '{}'", f[idx - 1].trim()),
                    )
                })
        };
        total_rows += 1;
        let (month, day) = (num(2, "month")?, num(3, "day")?);
        if month == 2.0 && day == 29.0 {
            leap_rows += 1;
            continue;
        }
        rows.push([
            num(7, "dry bulb")?,
            num(14, "GHI")?,
            num(15, "DNI")?,
            num(16, "DHI")?,
        ]);
    }
    let expected = if leap_rows > 0 {
        HOURS_PER_YEAR + 24
    } else {
        HOURS_PER_YEAR
    };
    if total_rows != expected || rows.len() != HOURS_PER_YEAR {
        return Err(malformed(
            None,
            format!("expected {HOURS_PER_YEAR} hourly rows, found {total_rows}"),
        ));
    }

    let mut warnings = Vec::new();
    let mut dry: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let missing: Vec<bool> = dry.iter().map(|&v| is_missing_dry_bulb(v)).collect();
    let n_missing = missing.iter().filter(|&&m| m).count();
    if n_missing > 0 {
        interpolate_gaps(&mut dry, &missing)?;
        warnings.push(format!("dry bulb: {n_missing} missing values interpolated"));
    }
    let mut radiation = |col: usize, name: &str| -> Vec<T> {
        let mut replaced = 0usize;
        let mut negative = 0usize;
        let out = rows
            .iter()
            .map(|r| {
                let v = r[col];
                if is_missing_radiation(v) {
                    replaced += 1;
                    T::zero()
                } else if v < 0.0 {
                    negative += 1;
                    T::zero()
                } else {
                    T::lit(v)
                }
            })
            .collect();
        if replaced > 0 {
            warnings.push(format!("{name}: {replaced} missing values replaced by 0"));
        }
        if negative > 0 {
            warnings.push(format!("{name}: {negative} negative values clamped to 0"));
        }
        out
    };
    let ghi = radiation(1, "GHI");
    let dni = radiation(2, "DNI");
    let dhi = radiation(3, "DHI");
    Ok(WeatherSeries {
        location,
        dry_bulb: dry.into_iter().map(T::lit).collect(),
        ghi,
        dni,
        dhi,
        warnings,
    })
}

/// Renders a series as EPW text. Unused columns carry EPW missing markers or neutral values.
pub fn render_epw<T: Scalar>(w: &WeatherSeries<T>) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "LOCATION,{},-,-,synthetic,000000,{},{},{},{}\n",
        w.location.name,
        w.location.latitude,
        w.location.longitude,
        w.location.time_zone,
        w.location.elevation
    ));
    for h in [
        "DESIGN CONDITIONS,0",
        "TYPICAL/EXTREME PERIODS,0",
        "GROUND TEMPERATURES,0",
        "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0",
        "COMMENTS 1,generated",
        "COMMENTS 2,",
        "DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31",
    ] {
        out.push_str(h);
        out.push('\n');
    }
    let mut h = 0usize;
    for (m, &days) in MONTH_DAYS.iter().enumerate() {
        for d in 1..=days {
            for hour in 1..=24 {
                let (t, ghi, dni, dhi) = (
                    w.dry_bulb[h].to_f64_lossy(),
                    w.ghi[h].to_f64_lossy(),
                    w.dni[h].to_f64_lossy(),
                    w.dhi[h].to_f64_lossy(),
                );
                out.push_str(&format!(
                    "2017,{},{d},{hour},60,A7A7A7A7*0?9?9?9?9?9?9?9A7A7A7A7A7A7*0E8*0*0,{t},{dp},80,101325,9999,9999,350,{ghi},{dni},{dhi},999999,999999,999999,9999,180,2.0,5,5,9999,77777,9,999999999,0,0.2,0,88,0.0,0.0,0.0\n",
                    m + 1,
                    dp = t - 3.0,
                ));
                h += 1;
            }
        }
    }
    out
}

/// Parameters of a smooth synthetic climate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticClimate {
    pub name: String,
    pub latitude: f64,
    pub annual_mean: f64,
    pub annual_amplitude: f64,
    pub daily_amplitude: f64,
    /// Day of year (0-based) of the coldest daily mean.
    pub coldest_day: usize,
    /// Peak hourly direct normal irradiation (Wh/m²).
    pub dni_peak: f64,
    /// Peak hourly diffuse horizontal irradiation (Wh/m²).
    pub dhi_peak: f64,
}

impl Default for SyntheticClimate {
    fn default() -> Self {
        Self {
            name: "synthetic".into(),
            latitude: 40.2,
            annual_mean: 15.0,
            annual_amplitude: 8.0,
            daily_amplitude: 5.0,
            coldest_day: 16,
            dni_peak: 700.0,
            dhi_peak: 200.0,
        }
    }
}

/// Builds a deterministic sinusoidal climate: annual and daily temperature cycles and clear-sky
/// shaped radiation between 06:00 and 18:00.
pub fn synthetic_weather(c: &SyntheticClimate) -> WeatherSeries<f64> {
    use std::f64::consts::PI;
    let mut w = WeatherSeries {
        location: Location {
            name: c.name.clone(),
            latitude: c.latitude,
            ..Location::default()
        },
        dry_bulb: Vec::with_capacity(HOURS_PER_YEAR),
        ghi: Vec::with_capacity(HOURS_PER_YEAR),
        dni: Vec::with_capacity(HOURS_PER_YEAR),
        dhi: Vec::with_capacity(HOURS_PER_YEAR),
        warnings: Vec::new(),
    };
    for h in 0..HOURS_PER_YEAR {
        let day = (h / 24) as f64;
        let hour = (h % 24) as f64;
        let season = -(2.0 * PI * (day - c.coldest_day as f64) / 365.0).cos();
        let diurnal = -(2.0 * PI * (hour - 3.0) / 24.0).cos();
        w.dry_bulb
            .push(c.annual_mean + c.annual_amplitude * season + c.daily_amplitude * diurnal);
        let sun = if (6.0..18.0).contains(&hour) {
            (PI * (hour - 5.5) / 13.0).sin().max(0.0)
        } else {
            0.0
        };
        let strength = 0.75 + 0.25 * season;
        let dni = (c.dni_peak * sun * strength).round();
        let dhi = (c.dhi_peak * sun).round();
        w.dni.push(dni);
        w.dhi.push(dhi);
        w.ghi.push(dhi + (dni * 0.6).round());
    }
    w
}
