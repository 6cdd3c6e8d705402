//! Sequential variable optimisation of windows, shading and space size.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::epsap::{
    apply_transformation, intrinsic_penalty, penalty_components, Operation, Target, Transformation,
};
use crate::geometry::{snap, Orientation, GRID};
use crate::model::{Layout, OpeningKind, Overhang, SpaceProgram, MAX_ASPECT, MAX_OVERHANG_DEPTH};
use crate::solution::TraceEntry;
use crate::surrogate::{discomfort_objective, DiscomfortSpec, ThermalSetup, WeatherSeries};

/// Overhang depths tried by the default strategy (m).
pub const OVERHANG_DEPTHS: [f64; 5] = [0.0, 0.3, 0.6, 0.9, 1.2];
/// Width changes tried for each space (m).
pub const STRETCH_DELTA: f64 = 0.3;
/// Relative area deviation tolerated while optimising.
pub const AREA_TOLERANCE: f64 = 0.1;
const WINDOW_SCALES: [f64; 5] = [0.5, 0.75, 1.0, 1.25, 1.5];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableKind {
    WindowWidth,
    WindowHeight,
    WindowOffset,
    OverhangDepth,
    /// Width of a space, moving its east side.
    SpaceStretch,
}

impl VariableKind {
    fn label(self) -> &'static str {
        match self {
            VariableKind::WindowWidth => "window_width",
            VariableKind::WindowHeight => "window_height",
            VariableKind::WindowOffset => "window_offset",
            VariableKind::OverhangDepth => "overhang_depth",
            VariableKind::SpaceStretch => "space_stretch",
        }
    }
}

/// One coordinate of the search. Values are absolute (m): the width, height or offset of a
/// window, the depth of its overhang, or the width of a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignVariable {
    pub kind: VariableKind,
    pub target: String,
    pub candidate_values: Vec<f64>,
}

impl fmt::Display for DesignVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.label(), self.target)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    #[default]
    Surrogate,
    Energyplus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationStrategy {
    pub variables: Vec<DesignVariable>,
    pub passes: usize,
    #[serde(default)]
    pub objective: ObjectiveKind,
    #[serde(default)]
    pub discomfort: DiscomfortSpec,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FpopError {
    #[error("objective failed while optimising {variable}: {message}")]
    ObjectiveFailure { variable: String, message: String },
    #[error("layout is not geometrically feasible (penalty {0})")]
    InfeasibleLayout(f64),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

/// Anything that scores a layout, lower being better.
pub trait LayoutObjective: Sync {
    fn evaluate(&self, layout: &Layout) -> Result<f64, String>;
}

impl<F> LayoutObjective for F
where
    F: Fn(&Layout) -> Result<f64, String> + Sync,
{
    fn evaluate(&self, layout: &Layout) -> Result<f64, String> {
        self(layout)
    }
}

/// Discomfort degree-hours from the surrogate.
pub struct SurrogateObjective<'a> {
    pub weather: &'a WeatherSeries<f64>,
    pub setup: &'a ThermalSetup,
}

impl LayoutObjective for SurrogateObjective<'_> {
    fn evaluate(&self, layout: &Layout) -> Result<f64, String> {
        discomfort_objective(layout, self.weather, self.setup).map_err(|e| e.to_string())
    }
}

/// Geometric feasibility kept throughout the optimisation. With a program: every penalty
/// except dimension is zero, areas stay within [`AREA_TOLERANCE`] of target and aspect
/// ratios within limits. Without one, only the program-independent indicators count.
pub fn geometric_violation(layout: &Layout, program: Option<&SpaceProgram>) -> f64 {
    let Some(program) = program else {
        return intrinsic_penalty(layout);
    };
    let mut v = penalty_components(layout, program).geometric_total();
    for req in &program.spaces {
        let Some(s) = layout.space(&req.id) else {
            v += 1.0;
            continue;
        };
        let dev = (s.rect.area() - req.target_area).abs() / req.target_area;
        v += (dev - AREA_TOLERANCE).max(0.0) + (s.rect.aspect_ratio() - MAX_ASPECT).max(0.0);
    }
    if v < 1e-9 {
        0.0
    } else {
        v
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

/// Current value of a variable, `None` when its target is missing.
pub fn current_value(layout: &Layout, var: &DesignVariable) -> Option<f64> {
    match var.kind {
        VariableKind::WindowWidth => layout.opening(&var.target).map(|o| o.width),
        VariableKind::WindowHeight => layout.opening(&var.target).map(|o| o.height),
        VariableKind::WindowOffset => layout.opening(&var.target).map(|o| o.offset_along_wall),
        VariableKind::OverhangDepth => {
            layout.opening(&var.target)?;
            Some(layout.overhang(&var.target).map_or(0.0, |s| s.depth))
        }
        VariableKind::SpaceStretch => layout.space(&var.target).map(|s| s.rect.width),
    }
}

/// Returns a copy of `layout` with the variable set to `value`.
pub fn apply_value(layout: &Layout, var: &DesignVariable, value: f64) -> Option<Layout> {
    let mut out = layout.clone();
    match var.kind {
        VariableKind::WindowWidth => out.opening_mut(&var.target)?.width = snap(value),
        VariableKind::WindowHeight => out.opening_mut(&var.target)?.height = snap(value),
        VariableKind::WindowOffset => out.opening_mut(&var.target)?.offset_along_wall = snap(value),
        VariableKind::OverhangDepth => {
            let storey = out.opening(&var.target)?.owner.clone();
            let storey = out.storey_of(&storey)?;
            let shades = &mut out.storeys[storey].shades;
            match shades.iter_mut().find(|s| s.owner == var.target) {
                Some(s) => s.depth = value,
                None => shades.push(Overhang {
                    owner: var.target.clone(),
                    depth: value,
                }),
            }
        }
        VariableKind::SpaceStretch => {
            let width = layout.space(&var.target)?.rect.width;
            let steps = ((value - width) / GRID).round() as i32;
            if steps == 0 {
                return Some(out);
            }
            let t = Transformation::new(
                Target::Space(var.target.clone()),
                Operation::Stretch {
                    side: Orientation::E,
                    steps,
                },
            );
            out = apply_transformation(layout, &t).ok()?;
        }
    }
    Some(out)
}

fn feasible_candidates(
    layout: &Layout,
    program: Option<&SpaceProgram>,
    kind: VariableKind,
    target: &str,
    values: impl IntoIterator<Item = f64>,
) -> DesignVariable {
    let mut var = DesignVariable {
        kind,
        target: target.to_string(),
        candidate_values: Vec::new(),
    };
    let current = current_value(layout, &var);
    let mut values: Vec<f64> = values.into_iter().map(snap).collect();
    values.extend(current);
    values.sort_by(f64::total_cmp);
    values.dedup_by(|a, b| same(*a, *b));
    var.candidate_values = values
        .into_iter()
        .filter(|&v| {
            current.is_some_and(|c| same(c, v))
                || apply_value(layout, &var, v)
                    .is_some_and(|l| geometric_violation(&l, program) == 0.0)
        })
        .collect();
    var
}

/// Variables in the default order: window widths, heights, offsets, overhang depths, then
/// one east-side stretch per space. Candidates that would break feasibility are dropped.
pub fn default_strategy(layout: &Layout, program: Option<&SpaceProgram>) -> OptimizationStrategy {
    let windows: Vec<_> = layout
        .openings()
        .filter(|o| o.kind == OpeningKind::Window)
        .cloned()
        .collect();
    let mut vars = Vec::new();
    for o in &windows {
        let len = layout
            .space(&o.owner)
            .map_or(0.0, |s| s.rect.wall_length(o.wall));
        let values = WINDOW_SCALES
            .iter()
            .map(|k| (k * o.width).min(len - o.offset_along_wall).max(GRID));
        vars.push(feasible_candidates(
            layout,
            program,
            VariableKind::WindowWidth,
            &o.id,
            values,
        ));
    }
    for o in &windows {
        let room = layout.storey_height - o.sill;
        let values = WINDOW_SCALES
            .iter()
            .map(|k| (k * o.height).min(room).max(GRID));
        vars.push(feasible_candidates(
            layout,
            program,
            VariableKind::WindowHeight,
            &o.id,
            values,
        ));
    }
    for o in &windows {
        let len = layout
            .space(&o.owner)
            .map_or(0.0, |s| s.rect.wall_length(o.wall));
        let max_off = (len - o.width).max(0.0);
        let values =
            (-2..=2).map(|k| (o.offset_along_wall + k as f64 * 0.25 * o.width).clamp(0.0, max_off));
        vars.push(feasible_candidates(
            layout,
            program,
            VariableKind::WindowOffset,
            &o.id,
            values,
        ));
    }
    for o in &windows {
        vars.push(feasible_candidates(
            layout,
            program,
            VariableKind::OverhangDepth,
            &o.id,
            OVERHANG_DEPTHS,
        ));
    }
    for s in layout.spaces() {
        let w = s.rect.width;
        let values = [w - STRETCH_DELTA, w, w + STRETCH_DELTA]
            .into_iter()
            .filter(|v| *v >= GRID);
        vars.push(feasible_candidates(
            layout,
            program,
            VariableKind::SpaceStretch,
            &s.id,
            values,
        ));
    }
    OptimizationStrategy {
        variables: vars,
        passes: 2,
        objective: ObjectiveKind::Surrogate,
        discomfort: DiscomfortSpec::default(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FpopOutcome {
    pub layout: Layout,
    pub trace: Vec<TraceEntry>,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub passes_run: usize,
}

fn check_strategy(layout: &Layout, strategy: &OptimizationStrategy) -> Result<(), FpopError> {
    if strategy.passes < 1 {
        return Err(FpopError::InvalidStrategy(
            "passes must be at least 1".into(),
        ));
    }
    for v in &strategy.variables {
        if v.candidate_values.is_empty() {
            return Err(FpopError::InvalidStrategy(format!("{v} has no candidates")));
        }
        if v.candidate_values
            .iter()
            .any(|c| !c.is_finite() || *c < 0.0)
        {
            return Err(FpopError::InvalidStrategy(format!(
                "{v} has a negative or non-finite candidate"
            )));
        }
        if v.kind == VariableKind::OverhangDepth
            && v.candidate_values.iter().any(|&c| c > MAX_OVERHANG_DEPTH)
        {
            return Err(FpopError::InvalidStrategy(format!(
                "{v} exceeds the overhang cap"
            )));
        }
        if current_value(layout, v).is_none() {
            return Err(FpopError::InvalidStrategy(format!(
                "{v} targets an unknown element"
            )));
        }
    }
    Ok(())
}

/// Coordinate search: each variable in turn takes the candidate with the lowest objective,
/// other variables held fixed. Ties keep the current value, then prefer the smaller candidate.
/// Candidates breaking feasibility are skipped. Stops after `passes` passes or a pass without
/// changes.
pub fn optimize_sequential(
    layout: &Layout,
    strategy: &OptimizationStrategy,
    objective: &dyn LayoutObjective,
    program: Option<&SpaceProgram>,
) -> Result<FpopOutcome, FpopError> {
    let start_violation = geometric_violation(layout, program);
    if start_violation > 0.0 {
        return Err(FpopError::InfeasibleLayout(start_violation));
    }
    check_strategy(layout, strategy)?;
    let mut current = layout.clone();
    for v in strategy
        .variables
        .iter()
        .filter(|v| v.kind == VariableKind::OverhangDepth)
    {
        if current.overhang(&v.target).is_none() {
            current = apply_value(&current, v, 0.0).expect("checked target");
        }
    }
    let fail = |v: &DesignVariable, message: String| FpopError::ObjectiveFailure {
        variable: v.to_string(),
        message,
    };
    let initial = match strategy.variables.first() {
        Some(v) => objective.evaluate(&current).map_err(|m| fail(v, m))?,
        None => objective
            .evaluate(&current)
            .map_err(|m| FpopError::ObjectiveFailure {
                variable: String::new(),
                message: m,
            })?,
    };
    let mut best = initial;
    let mut trace = Vec::new();
    let mut passes_run = 0;
    for _ in 0..strategy.passes {
        passes_run += 1;
        let mut changed = false;
        for var in &strategy.variables {
            let cur_val = current_value(&current, var).expect("checked target");
            let scored: Vec<Result<Option<(f64, f64, Layout)>, FpopError>> = var
                .candidate_values
                .par_iter()
                .filter(|&&c| !same(c, cur_val))
                .map(|&c| {
                    let Some(l) = apply_value(&current, var, c) else {
                        return Ok(None);
                    };
                    if geometric_violation(&l, program) > 0.0 {
                        return Ok(None);
                    }
                    let obj = objective.evaluate(&l).map_err(|m| fail(var, m))?;
                    Ok(Some((c, obj, l)))
                })
                .collect();
            let mut pick: Option<(f64, f64, Layout)> = None;
            for s in scored {
                let Some((c, obj, l)) = s? else { continue };
                let better = match &pick {
                    None => obj < best,
                    Some((pc, pobj, _)) => obj < *pobj || (obj == *pobj && c < *pc),
                };
                if better {
                    pick = Some((c, obj, l));
                }
            }
            if let Some((c, obj, l)) = pick {
                current = l;
                best = obj;
                changed = true;
                trace.push(TraceEntry {
                    variable: var.to_string(),
                    value: c,
                    objective: obj,
                });
            }
        }
        if !changed {
            break;
        }
    }
    Ok(FpopOutcome {
        layout: current,
        trace,
        initial_objective: initial,
        final_objective: best,
        passes_run,
    })
}
