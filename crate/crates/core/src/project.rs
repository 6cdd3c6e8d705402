//! Project files: one versioned JSON document holding the program, generated solutions,
//! systems and settings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::constructions::{ConstructionError, ConstructionSet};
use crate::epsap::EsParams;
use crate::fpop::{default_strategy, DesignVariable, ObjectiveKind, OptimizationStrategy};
use crate::model::{validate_program, Layout, SpaceProgram};
use crate::reporting::CostItem;
use crate::solution::SolutionRecord;
use crate::surrogate::{
    load_weather, setup_for, synthetic_weather, DiscomfortSpec, SurrogateError, SyntheticClimate,
    ThermalSetup, WeatherSeries,
};
use crate::systems::SystemsSpec;

pub const FORMAT_VERSION: u64 = 1;

const PROJECT_KEYS: [&str; 6] = [
    "format_version",
    "layouts",
    "name",
    "program",
    "settings",
    "systems",
];
const SETTINGS_KEYS: [&str; 8] = [
    "construction_sets",
    "costs",
    "energyplus",
    "epsap",
    "fpop",
    "idf_defaults",
    "n_solutions",
    "weather",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectError {
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("unsupported format_version {found} (this build reads {expected})")]
    FormatVersionMismatch { found: String, expected: u64 },
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error(transparent)]
    Weather(#[from] SurrogateError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// Where hourly weather comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeatherSource {
    Synthetic(SyntheticClimate),
    /// EPW file, relative paths resolved against the project file's directory.
    Epw {
        path: String,
    },
}

impl Default for WeatherSource {
    fn default() -> Self {
        WeatherSource::Synthetic(SyntheticClimate::default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FpopSettings {
    pub passes: usize,
    pub objective: ObjectiveKind,
    pub discomfort: DiscomfortSpec,
    /// Explicit variables; the default strategy for the layout when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<DesignVariable>>,
}

impl Default for FpopSettings {
    fn default() -> Self {
        Self {
            passes: 2,
            objective: ObjectiveKind::Surrogate,
            discomfort: DiscomfortSpec::default(),
            variables: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyPlusSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub executable: Option<String>,
    pub timeout_secs: u64,
    pub max_concurrent: usize,
}

impl Default for EnergyPlusSettings {
    fn default() -> Self {
        Self {
            executable: None,
            timeout_secs: 900,
            max_concurrent: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub epsap: EsParams,
    pub n_solutions: usize,
    pub fpop: FpopSettings,
    pub weather: WeatherSource,
    /// Construction sets in addition to the bundled `default`.
    pub construction_sets: Vec<ConstructionSet>,
    pub costs: Vec<CostItem>,
    /// Overrides of the IDF defaults database, record class then field.
    pub idf_defaults: BTreeMap<String, BTreeMap<String, Value>>,
    pub energyplus: EnergyPlusSettings,
    /// Unrecognised keys, kept verbatim.
    #[serde(skip)]
    pub extra: BTreeMap<String, Value>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            epsap: EsParams::default(),
            n_solutions: 5,
            fpop: FpopSettings::default(),
            weather: WeatherSource::default(),
            construction_sets: Vec::new(),
            costs: Vec::new(),
            idf_defaults: BTreeMap::new(),
            energyplus: EnergyPlusSettings::default(),
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub format_version: u64,
    #[serde(default)]
    pub name: String,
    pub program: SpaceProgram,
    /// Generated and optimised solutions.
    #[serde(default)]
    pub layouts: Vec<SolutionRecord>,
    #[serde(default)]
    pub systems: SystemsSpec,
    #[serde(default)]
    pub settings: Settings,
    /// Unrecognised top-level keys, kept verbatim.
    #[serde(skip)]
    pub extra: BTreeMap<String, Value>,
}

fn split_unknown(map: &mut Map<String, Value>, known: &[&str]) -> BTreeMap<String, Value> {
    let unknown: Vec<String> = map
        .keys()
        .filter(|k| !known.contains(&k.as_str()))
        .cloned()
        .collect();
    unknown
        .into_iter()
        .filter_map(|k| map.remove(&k).map(|v| (k, v)))
        .collect()
}

impl Project {
    pub fn new(name: impl Into<String>, program: SpaceProgram) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            name: name.into(),
            program,
            layouts: Vec::new(),
            systems: SystemsSpec::default(),
            settings: Settings::default(),
            extra: BTreeMap::new(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, ProjectError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| ProjectError::SchemaViolation {
                path: format!("line {} column {}", e.line(), e.column()),
                message: e.to_string(),
            })?;
        Self::from_value(value)
    }

    pub fn from_value(mut value: Value) -> Result<Self, ProjectError> {
        let Some(map) = value.as_object_mut() else {
            return Err(ProjectError::SchemaViolation {
                path: ".".into(),
                message: "expected a JSON object".into(),
            });
        };
        match map.get("format_version") {
            Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(ProjectError::FormatVersionMismatch {
                    found: v.to_string(),
                    expected: FORMAT_VERSION,
                })
            }
            None => {
                return Err(ProjectError::SchemaViolation {
                    path: "format_version".into(),
                    message: "missing field".into(),
                })
            }
        }
        let extra = split_unknown(map, &PROJECT_KEYS);
        let settings_extra = match map.get_mut("settings").and_then(Value::as_object_mut) {
            Some(s) => split_unknown(s, &SETTINGS_KEYS),
            None => BTreeMap::new(),
        };
        let mut project: Project =
            serde_path_to_error::deserialize(value).map_err(|e| ProjectError::SchemaViolation {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        project.extra = extra;
        project.settings.extra = settings_extra;
        Ok(project)
    }

    pub fn to_value(&self) -> Value {
        let mut value = serde_json::to_value(self).expect("project serialises");
        let map = value.as_object_mut().expect("object");
        if let Some(s) = map.get_mut("settings").and_then(Value::as_object_mut) {
            s.extend(self.settings.extra.clone());
        }
        map.extend(self.extra.clone());
        value
    }

    /// Pretty JSON with a trailing newline; keys in sorted order.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("project serialises");
        s.push('\n');
        s
    }

    /// Problems that would make the pipeline fail, as readable messages.
    pub fn check(&self) -> Vec<String> {
        let mut errors = validate_program(&self.program).errors;
        if let Err(e) = self.systems.check() {
            errors.push(format!("systems: {e}"));
        }
        match self.constructions() {
            Ok(set) => {
                if let Err(e) = set.check() {
                    errors.push(format!("constructions: {e}"));
                }
            }
            Err(e) => errors.push(format!("constructions: {e}")),
        }
        if let Err(e) = self.settings.epsap.check() {
            errors.push(format!("settings.epsap: {e}"));
        }
        for (i, l) in self.layouts.iter().enumerate() {
            if l.layout.storeys.len() != self.program.storey_count {
                errors.push(format!(
                    "layouts[{i}]: {} storeys, program has {}",
                    l.layout.storeys.len(),
                    self.program.storey_count
                ));
            }
            errors.extend(
                l.layout
                    .check_invariants()
                    .into_iter()
                    .map(|e| format!("layouts[{i}]: {e}")),
            );
        }
        errors
    }

    pub fn solution(&self, id: &str) -> Option<&SolutionRecord> {
        self.layouts.iter().find(|s| s.id == id)
    }

    /// The construction set named by the systems spec.
    pub fn constructions(&self) -> Result<ConstructionSet, ConstructionError> {
        let id = &self.systems.constructions;
        if let Some(set) = self.settings.construction_sets.iter().find(|c| &c.id == id) {
            return Ok(set.clone());
        }
        if id == "default" {
            return Ok(ConstructionSet::bundled_default());
        }
        Err(ConstructionError::MissingConstruction(id.clone()))
    }

    pub fn weather(&self, base_dir: Option<&Path>) -> Result<WeatherSeries<f64>, ProjectError> {
        match &self.settings.weather {
            WeatherSource::Synthetic(c) => Ok(synthetic_weather(c)),
            WeatherSource::Epw { path } => {
                let mut full = PathBuf::from(path);
                if full.is_relative() {
                    if let Some(dir) = base_dir {
                        full = dir.join(full);
                    }
                }
                let text = std::fs::read_to_string(&full).map_err(|e| ProjectError::Io {
                    path: full.display().to_string(),
                    message: e.to_string(),
                })?;
                Ok(load_weather(&text)?)
            }
        }
    }

    pub fn thermal_setup(&self) -> Result<ThermalSetup, ProjectError> {
        Ok(setup_for(
            &self.program,
            &self.systems,
            self.constructions()?,
            self.settings.fpop.discomfort.clone(),
        ))
    }

    pub fn strategy_for(&self, layout: &Layout) -> OptimizationStrategy {
        let fp = &self.settings.fpop;
        let mut s = default_strategy(layout, Some(&self.program));
        if let Some(vars) = &fp.variables {
            s.variables = vars.clone();
        }
        s.passes = fp.passes;
        s.objective = fp.objective;
        s.discomfort = fp.discomfort.clone();
        s
    }
}

pub fn load_project(path: &Path) -> Result<Project, ProjectError> {
    let text = std::fs::read_to_string(path).map_err(|e| ProjectError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Project::from_json_str(&text)
}

/// Writes to a temporary file beside `path`, then renames it into place.
pub fn save_project(project: &Project, path: &Path) -> Result<(), ProjectError> {
    let io = |e: std::io::Error| ProjectError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(project.to_json_string().as_bytes())
        .map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    // temporary files are private; keep the mode an existing file had
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mode = std::fs::metadata(path)
            .map(|m| m.permissions().mode())
            .unwrap_or(0o644);
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(mode))
            .map_err(io)?;
    }
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
