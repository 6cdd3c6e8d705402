//! Pipeline operations shared by the command line and the HTTP service.
//!
//! Every response either front end produces is built here, so both stay thin and agree.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use planforge_core::epsap::{evolve_with_observer, EpsapError, PenaltyComponents};
use planforge_core::fpop::{
    optimize_sequential, FpopError, LayoutObjective, ObjectiveKind, SurrogateObjective,
};
use planforge_core::geometry::Orientation;
use planforge_core::model::{Layout, OpeningKind};
use planforge_core::project::{Project, ProjectError};
use planforge_core::reporting::{
    aggregate_report, cost_summary, surrogate_results, CostSummary, Report, ReportError,
    ReportPeriod, SimulationResult,
};
use planforge_core::solution::{Provenance, SolutionRecord};
use planforge_core::surrogate::{render_epw, SurrogateError, WeatherSeries};
use planforge_idf::eplus::{EplusError, RunConfig, RunSlots};
use planforge_idf::{emit_project, IdfError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Variables summed by the EnergyPlus objective, in J.
const ENERGY_OBJECTIVE_VARIABLES: [&str; 2] = [
    "Zone Air System Sensible Heating Energy",
    "Zone Air System Sensible Cooling Energy",
];

#[derive(Debug, Error)]
pub enum OpsError {
    #[error("unknown solution '{0}'")]
    UnknownSolution(String),
    #[error("project has no solutions")]
    NoSolutions,
    #[error("unknown variable '{variable}' for key '{key}'; available: {}", available.join(", "))]
    UnknownVariable {
        variable: String,
        key: String,
        available: Vec<String>,
    },
    #[error("invalid parameter at {path}: {message}")]
    InvalidParams { path: String, message: String },
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error(transparent)]
    Generation(#[from] EpsapError),
    #[error(transparent)]
    Optimization(#[from] FpopError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Idf(#[from] IdfError),
    #[error(transparent)]
    EnergyPlus(#[from] EplusError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{0}")]
    Io(String),
}

/// Deserialises `value` into `T`, reporting the failing field path.
pub fn parse_params<T: for<'de> Deserialize<'de>>(value: serde_json::Value) -> Result<T, OpsError> {
    serde_path_to_error::deserialize(value).map_err(|e| OpsError::InvalidParams {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub ok: bool,
    pub errors: Vec<String>,
}

pub fn validate(project: &Project) -> Validation {
    let errors = project.check();
    Validation {
        ok: errors.is_empty(),
        errors,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateParams {
    /// Overrides the project's generator seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_solutions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_generations: Option<usize>,
}

/// Runs the layout generator and replaces the project's solutions with its output. `progress`
/// receives completed generations over the generation budget.
pub fn generate(
    project: &mut Project,
    params: &GenerateParams,
    progress: &mut dyn FnMut(f64),
) -> Result<Vec<String>, OpsError> {
    let mut es = project.settings.epsap.clone();
    if let Some(seed) = params.seed {
        es.seed = seed;
    }
    if let Some(g) = params.max_generations {
        es.max_generations_stage1 = g;
    }
    let n = params.n_solutions.unwrap_or(project.settings.n_solutions);
    let outcome = evolve_with_observer(&project.program, &es, n, &mut |log| {
        if log.max_generations > 0 {
            progress((log.generation as f64 / log.max_generations as f64).min(1.0));
        }
    })?;
    project.layouts = outcome.solutions;
    Ok(project.layouts.iter().map(|s| s.id.clone()).collect())
}

/// The named solution, or the best ranked one.
pub fn select_solution<'a>(
    project: &'a Project,
    id: Option<&str>,
) -> Result<&'a SolutionRecord, OpsError> {
    match id {
        Some(id) => project
            .solution(id)
            .ok_or_else(|| OpsError::UnknownSolution(id.into())),
        None => ranked(project)
            .into_iter()
            .next()
            .ok_or(OpsError::NoSolutions),
    }
}

/// Solutions by ascending fitness, ties broken by layout hash.
pub fn ranked(project: &Project) -> Vec<&SolutionRecord> {
    let mut v: Vec<(&SolutionRecord, String)> = project
        .layouts
        .iter()
        .map(|s| (s, s.layout.content_hash()))
        .collect();
    v.sort_by(|a, b| {
        a.0.fitness
            .total_cmp(&b.0.fitness)
            .then_with(|| a.1.cmp(&b.1))
    });
    v.into_iter().map(|(s, _)| s).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub id: String,
    pub fitness: f64,
    pub penalties: PenaltyComponents,
    pub thermal_objective: Option<f64>,
    pub floor_area: f64,
    pub storey_areas: Vec<f64>,
    pub space_areas: BTreeMap<String, f64>,
    pub cost_total: f64,
    pub optimized: bool,
}

pub fn solution_summaries(project: &Project) -> Vec<SolutionSummary> {
    let cost_total = cost_summary(&project.settings.costs).grand_total;
    ranked(project)
        .into_iter()
        .map(|s| SolutionSummary {
            id: s.id.clone(),
            fitness: s.fitness,
            penalties: s.penalties,
            thermal_objective: s.thermal_objective,
            floor_area: s.layout.floor_area(),
            storey_areas: s
                .layout
                .storeys
                .iter()
                .map(|st| st.spaces.iter().map(|b| b.rect.area()).sum())
                .collect(),
            space_areas: s
                .layout
                .spaces()
                .map(|b| (b.id.clone(), b.rect.area()))
                .collect(),
            cost_total,
            optimized: !s.provenance.optimization_trace.is_empty(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacePolygon {
    pub id: String,
    pub zone: String,
    /// Counter-clockwise corners in plan, starting at the south-west one.
    pub polygon: Vec<[f64; 2]>,
    pub area: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpeningMark {
    pub id: String,
    pub kind: OpeningKind,
    pub owner: String,
    pub wall: Orientation,
    /// End points of the opening on the wall line.
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub height: f64,
    pub sill: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overhang_depth: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoreyGeometry {
    pub index: usize,
    pub spaces: Vec<SpacePolygon>,
    pub openings: Vec<OpeningMark>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutGeometry {
    pub storey_height: f64,
    pub storeys: Vec<StoreyGeometry>,
}

/// Plan polygons per storey for drawing.
pub fn layout_geometry(layout: &Layout) -> LayoutGeometry {
    let storeys = layout
        .storeys
        .iter()
        .map(|st| StoreyGeometry {
            index: st.index,
            spaces: st
                .spaces
                .iter()
                .map(|s| {
                    let r = s.rect;
                    SpacePolygon {
                        id: s.id.clone(),
                        zone: s.zone_name(),
                        polygon: vec![
                            [r.x, r.y],
                            [r.x_max(), r.y],
                            [r.x_max(), r.y_max()],
                            [r.x, r.y_max()],
                        ],
                        area: r.area(),
                    }
                })
                .collect(),
            openings: st
                .openings
                .iter()
                .filter_map(|o| {
                    let owner = layout.space(&o.owner)?;
                    let line = owner.rect.wall(o.wall);
                    let (a, b) = (
                        line.start + o.offset_along_wall,
                        line.start + o.offset_along_wall + o.width,
                    );
                    let point = |t: f64| {
                        if o.wall.runs_along_x() {
                            [t, line.fixed]
                        } else {
                            [line.fixed, t]
                        }
                    };
                    Some(OpeningMark {
                        id: o.id.clone(),
                        kind: o.kind,
                        owner: o.owner.clone(),
                        wall: o.wall,
                        start: point(a),
                        end: point(b),
                        height: o.height,
                        sill: o.sill,
                        overhang_depth: layout.overhang(&o.id).map(|h| h.depth),
                    })
                })
                .collect(),
        })
        .collect();
    LayoutGeometry {
        storey_height: layout.storey_height,
        storeys,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    #[default]
    Surrogate,
    Energyplus,
}

/// Where EnergyPlus is and where its runs go.
#[derive(Clone, Debug, Default)]
pub struct EplusContext {
    /// Overrides the project setting; `ENERGYPLUS_EXE` overrides both.
    pub executable: Option<PathBuf>,
    /// Parent of the per-run working directories; a temporary directory when absent.
    pub work_root: Option<PathBuf>,
}

/// Loaded project inputs that stay fixed while one operation runs.
pub struct Context<'a> {
    pub project: &'a Project,
    pub weather: WeatherSeries<f64>,
}

impl<'a> Context<'a> {
    /// `base_dir` resolves a relative weather file path.
    pub fn new(project: &'a Project, base_dir: Option<&Path>) -> Result<Self, OpsError> {
        Ok(Self {
            project,
            weather: project.weather(base_dir)?,
        })
    }
}

fn run_eplus(
    ctx: &Context,
    layout: &Layout,
    eplus: &EplusContext,
    slots: &RunSlots,
) -> Result<SimulationResult, OpsError> {
    let p = ctx.project;
    let doc = emit_project(p, layout, &ctx.weather.location)?;
    let scratch;
    let root = match &eplus.work_root {
        Some(r) => r.clone(),
        None => {
            scratch = tempfile::tempdir().map_err(|e| OpsError::Io(e.to_string()))?;
            scratch.path().to_path_buf()
        }
    };
    std::fs::create_dir_all(&root).map_err(|e| OpsError::Io(format!("{}: {e}", root.display())))?;
    let dir = tempfile::Builder::new()
        .prefix("run-")
        .tempdir_in(&root)
        .map_err(|e| OpsError::Io(e.to_string()))?;
    let weather = dir.path().join("weather.epw");
    std::fs::write(&weather, render_epw(&ctx.weather)).map_err(|e| OpsError::Io(e.to_string()))?;
    let configured = eplus
        .executable
        .clone()
        .or_else(|| p.settings.energyplus.executable.as_ref().map(PathBuf::from));
    let config = RunConfig::new(
        configured.as_deref(),
        dir.path(),
        Duration::from_secs(p.settings.energyplus.timeout_secs.max(1)),
        &weather,
    );
    Ok(slots.run(&doc, &config)?.into_result())
}

/// Hourly results of one solution.
pub fn simulate(
    ctx: &Context,
    layout: &Layout,
    engine: EngineKind,
    eplus: &EplusContext,
) -> Result<SimulationResult, OpsError> {
    match engine {
        EngineKind::Surrogate => Ok(surrogate_results(
            layout,
            &ctx.weather,
            &ctx.project.thermal_setup()?,
        )?),
        EngineKind::Energyplus => run_eplus(
            ctx,
            layout,
            eplus,
            &RunSlots::new(ctx.project.settings.energyplus.max_concurrent),
        ),
    }
}

/// Annual sensible heating plus cooling energy of all zones, in kWh.
struct EnergyPlusObjective<'a> {
    ctx: &'a Context<'a>,
    eplus: &'a EplusContext,
    slots: RunSlots,
}

impl LayoutObjective for EnergyPlusObjective<'_> {
    fn evaluate(&self, layout: &Layout) -> Result<f64, String> {
        let result =
            run_eplus(self.ctx, layout, self.eplus, &self.slots).map_err(|e| e.to_string())?;
        let joules: f64 = result
            .series
            .iter()
            .filter(|s| ENERGY_OBJECTIVE_VARIABLES.contains(&s.variable.as_str()))
            .flat_map(|s| s.values.iter())
            .sum();
        Ok(joules / 3.6e6)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passes: Option<usize>,
    /// Overrides the project's objective.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveKind>,
}

/// Runs the sequential optimizer on a solution and appends the result as a new solution,
/// returning its id. An unchanged layout is not duplicated; its score is recorded instead.
pub fn optimize(
    project: &mut Project,
    params: &OptimizeParams,
    base_dir: Option<&Path>,
    eplus: &EplusContext,
) -> Result<String, OpsError> {
    let start = select_solution(project, params.solution.as_deref())?.clone();
    let mut strategy = project.strategy_for(&start.layout);
    if let Some(p) = params.passes {
        strategy.passes = p;
    }
    if let Some(k) = params.objective {
        strategy.objective = k;
    }
    let outcome = {
        let ctx = Context::new(project, base_dir)?;
        let setup = project.thermal_setup()?;
        match strategy.objective {
            ObjectiveKind::Surrogate => {
                let objective = SurrogateObjective {
                    weather: &ctx.weather,
                    setup: &setup,
                };
                optimize_sequential(&start.layout, &strategy, &objective, Some(&project.program))?
            }
            ObjectiveKind::Energyplus => {
                let objective = EnergyPlusObjective {
                    ctx: &ctx,
                    eplus,
                    slots: RunSlots::new(project.settings.energyplus.max_concurrent),
                };
                optimize_sequential(&start.layout, &strategy, &objective, Some(&project.program))?
            }
        }
    };
    let hash = outcome.layout.content_hash();
    if hash == start.layout.content_hash() {
        let s = project
            .layouts
            .iter_mut()
            .find(|s| s.id == start.id)
            .expect("selected above");
        s.thermal_objective = Some(outcome.final_objective);
        return Ok(start.id);
    }
    let evaluated = planforge_core::epsap::evaluate(&outcome.layout, &project.program);
    let record = SolutionRecord {
        id: hash.clone(),
        layout: outcome.layout,
        fitness: evaluated.fitness,
        penalties: evaluated.penalty_breakdown,
        thermal_objective: Some(outcome.final_objective),
        provenance: Provenance {
            optimization_trace: outcome.trace,
            ..start.provenance.clone()
        },
    };
    match project.layouts.iter_mut().find(|s| s.id == hash) {
        Some(existing) => *existing = record,
        None => project.layouts.push(record),
    }
    Ok(hash)
}

/// EnergyPlus input text of a solution, located at the project's weather site.
pub fn export_idf(ctx: &Context, layout: &Layout) -> Result<String, OpsError> {
    Ok(emit_project(ctx.project, layout, &ctx.weather.location)?.render())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableInfo {
    pub variable: String,
    pub units: String,
    pub keys: Vec<String>,
}

/// The variables a result actually contains, sorted by name.
pub fn variable_catalog(result: &SimulationResult) -> Vec<VariableInfo> {
    result
        .variables()
        .into_iter()
        .map(|v| VariableInfo {
            units: result
                .series
                .iter()
                .find(|s| s.variable == v)
                .map(|s| s.units.clone())
                .unwrap_or_default(),
            keys: result.keys(&v),
            variable: v,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportQuery {
    pub variable: String,
    /// Zone, system or meter; the variable's first key when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default = "all_year")]
    pub period: ReportPeriod,
}

fn all_year() -> ReportPeriod {
    ReportPeriod::AllYear
}

pub fn report(
    result: &SimulationResult,
    weather: &WeatherSeries<f64>,
    query: &ReportQuery,
) -> Result<Report, OpsError> {
    let keys = result.keys(&query.variable);
    let key = query
        .key
        .clone()
        .or_else(|| keys.first().cloned())
        .unwrap_or_default();
    let series = result
        .find(&query.variable, &key)
        .ok_or_else(|| OpsError::UnknownVariable {
            variable: query.variable.clone(),
            key: key.clone(),
            available: result.variables(),
        })?;
    Ok(aggregate_report(series, weather, query.period)?)
}

pub fn costs(project: &Project) -> CostSummary {
    cost_summary(&project.settings.costs)
}
