use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{snap_grid, Orientation, Rect, GRID};
use crate::model::{
    validate_program, AdjacencyKind, Layout, Opening, OpeningKind, SpaceBox, SpaceProgram,
    SpaceRequirement, MAX_ASPECT,
};

use super::evolve::{evaluate, EsParams, Individual};
use super::EpsapError;

pub(crate) const WINDOW_WIDTH: f64 = 1.2;
pub(crate) const WINDOW_HEIGHT: f64 = 1.2;
pub(crate) const WINDOW_SILL: f64 = 0.9;
pub(crate) const DOOR_WIDTH: f64 = 0.8;
pub(crate) const DOOR_HEIGHT: f64 = 2.1;

/// Placement region of a storey: its boundary, or a square twice the storey's program area.
pub(crate) fn placement_region(program: &SpaceProgram, storey: usize) -> Rect<f64> {
    if let Some(b) = program.boundary_for(storey) {
        return b;
    }
    let area = (0..program.storey_count)
        .map(|s| program.storey_target_area(s))
        .fold(0.0, f64::max);
    let longest = program
        .spaces
        .iter()
        .map(|s| (s.target_area * MAX_ASPECT).sqrt())
        .fold(0.0, f64::max);
    let side = snap_grid((2.0 * area).sqrt().ceil().max(longest.ceil()));
    Rect::new(0.0, 0.0, side, side)
}

/// Candidate footprints on the grid: aspect within limits, area within ±10% of target,
/// fitting the region. Exact-area footprints are returned alone when any exist.
pub(crate) fn footprints(req: &SpaceRequirement, region: &Rect<f64>) -> Vec<(f64, f64)> {
    let lo = (req.min_side / GRID).ceil().max(1.0) as i64;
    let hi = ((req.target_area * MAX_ASPECT).sqrt().min(region.width) / GRID).floor() as i64;
    let mut exact = Vec::new();
    let mut near = Vec::new();
    for k in lo..=hi {
        let w = snap_grid(k as f64 * GRID);
        let d = snap_grid(req.target_area / w);
        if d < GRID || d > region.depth + 1e-9 || d < req.min_side - 1e-9 {
            continue;
        }
        let r = Rect::new(0.0, 0.0, w, d);
        if r.aspect_ratio() > MAX_ASPECT + 1e-9 {
            continue;
        }
        let rel = (r.area() - req.target_area).abs() / req.target_area;
        if rel < 1e-9 {
            exact.push((w, d));
        } else if rel <= 0.1 {
            near.push((w, d));
        }
    }
    if exact.is_empty() {
        near
    } else {
        exact
    }
}

fn grid_position<R: Rng>(rng: &mut R, lo: f64, span: f64) -> f64 {
    let steps = (span / GRID + 1e-9).floor().max(0.0) as i64;
    snap_grid(lo + rng.gen_range(0..=steps) as f64 * GRID)
}

pub(crate) fn random_layout<R: Rng>(
    program: &SpaceProgram,
    rng: &mut R,
) -> Result<Layout, EpsapError> {
    let mut layout = Layout::new(program.storey_count);
    for req in &program.spaces {
        let region = placement_region(program, req.storey);
        let options = footprints(req, &region);
        if options.is_empty() {
            return Err(EpsapError::InfeasibleProgram(format!(
                "space '{}' ({} m²) cannot fit the boundary {}x{}",
                req.id, req.target_area, region.width, region.depth
            )));
        }
        let (w, d) = options[rng.gen_range(0..options.len())];
        let x = grid_position(rng, region.x, region.width - w);
        let y = grid_position(rng, region.y, region.depth - d);
        layout.storeys[req.storey].spaces.push(SpaceBox {
            id: req.id.clone(),
            storey: req.storey,
            rect: Rect::new(x, y, w, d),
        });
    }
    for req in &program.spaces {
        let rect = layout.space(&req.id).expect("just placed").rect;
        for &facing in &req.preferred_window_orientations {
            let wall = program.site.local_wall(facing);
            let len = rect.wall_length(wall);
            let width = WINDOW_WIDTH.min(snap_grid(len * 0.6)).max(GRID);
            let offset = grid_position(rng, 0.0, len - width);
            layout.storeys[req.storey].openings.push(Opening {
                id: format!("{}-win-{}", req.id, facing.label()),
                kind: OpeningKind::Window,
                owner: req.id.clone(),
                wall,
                offset_along_wall: offset,
                width,
                height: WINDOW_HEIGHT,
                sill: WINDOW_SILL,
                connects_to: None,
            });
        }
    }
    for adj in program
        .adjacency_requirements
        .iter()
        .filter(|a| a.kind == AdjacencyKind::DoorConnected)
    {
        let Some(owner) = layout.space(&adj.a).cloned() else {
            continue;
        };
        if adj.a == adj.b {
            continue;
        }
        let wall = Orientation::from_index(rng.gen_range(0..4));
        let len = owner.rect.wall_length(wall);
        let width = DOOR_WIDTH.min(len);
        let offset = grid_position(rng, 0.0, len - width);
        let id = format!("{}-door-{}", adj.a, adj.b);
        if layout.opening(&id).is_some() {
            continue;
        }
        layout.storeys[owner.storey].openings.push(Opening {
            id,
            kind: OpeningKind::Door,
            owner: adj.a.clone(),
            wall,
            offset_along_wall: offset,
            width,
            height: DOOR_HEIGHT,
            sill: 0.0,
            connects_to: Some(adj.b.clone()),
        });
    }
    Ok(layout)
}

pub(crate) fn check_program(program: &SpaceProgram) -> Result<(), EpsapError> {
    for req in &program.spaces {
        let region = placement_region(program, req.storey);
        if req.target_area > region.area() {
            return Err(EpsapError::InfeasibleProgram(format!(
                "space '{}' needs {} m² but the boundary holds {} m²",
                req.id,
                req.target_area,
                region.area()
            )));
        }
    }
    let report = validate_program(program);
    if !report.is_ok() {
        return Err(EpsapError::InvalidProgram(report.errors));
    }
    Ok(())
}

pub(crate) fn init_with_rng<R: Rng>(
    program: &SpaceProgram,
    mu: usize,
    rng: &mut R,
) -> Result<Vec<Individual>, EpsapError> {
    check_program(program)?;
    (0..mu)
        .map(|_| random_layout(program, rng).map(|l| evaluate(&l, program)))
        .collect()
}

/// Random initial population of `params.mu` individuals, deterministic in `params.seed`.
pub fn init_population(
    program: &SpaceProgram,
    params: &EsParams,
) -> Result<Vec<Individual>, EpsapError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    init_with_rng(program, params.mu, &mut rng)
}
