//! Geometric transformations applied by the generator at every level of the design.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{snap, Axis, Orientation, Rect, GRID};
use crate::model::{adjacency_graph, AdjacencyKind, Layout, Opening, OpeningKind};

use super::EpsapError;

/// Largest displacement of one application, in grid steps.
pub const MAX_STEPS: i32 = 20;
/// Narrowest window a stretch may produce (m).
pub const MIN_WINDOW_WIDTH: f64 = 0.6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Translate,
    Rotate90,
    Stretch,
    Mirror,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Opening,
    Space,
    Cluster,
    Storey,
    Building,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Opening(String),
    Space(String),
    /// The wall-adjacency component containing this space.
    Cluster(String),
    Storey(usize),
    Building,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    /// Displacement in grid steps. Openings only use the component along their wall.
    Translate { dx: i32, dy: i32 },
    /// Counter-clockwise quarter turns (1..=3). Openings move to another wall of their owner.
    Rotate90 { quarter_turns: u8 },
    /// Moves one side outward (positive) or inward by grid steps. Windows change width.
    Stretch { side: Orientation, steps: i32 },
    /// `x` flips x coordinates (reflection about a vertical line), `y` flips y coordinates.
    Mirror { axis: Axis },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transformation {
    pub target: Target,
    pub op: Operation,
}

impl Transformation {
    pub fn new(target: Target, op: Operation) -> Self {
        Self { target, op }
    }

    pub fn kind(&self) -> TransformKind {
        match self.op {
            Operation::Translate { .. } => TransformKind::Translate,
            Operation::Rotate90 { .. } => TransformKind::Rotate90,
            Operation::Stretch { .. } => TransformKind::Stretch,
            Operation::Mirror { .. } => TransformKind::Mirror,
        }
    }

    pub fn level(&self) -> Level {
        match self.target {
            Target::Opening(_) => Level::Opening,
            Target::Space(_) => Level::Space,
            Target::Cluster(_) => Level::Cluster,
            Target::Storey(_) => Level::Storey,
            Target::Building => Level::Building,
        }
    }

    /// Parameters inside the configured bounds.
    pub fn within_bounds(&self) -> bool {
        match self.op {
            Operation::Translate { dx, dy } => dx.abs() <= MAX_STEPS && dy.abs() <= MAX_STEPS,
            Operation::Rotate90 { quarter_turns } => (1..=3).contains(&quarter_turns),
            Operation::Stretch { steps, .. } => steps.abs() <= MAX_STEPS,
            Operation::Mirror { .. } => true,
        }
    }
}

/// Applies `t`, returning a new layout. Openings follow their owners; openings pushed off
/// a wall are clamped back onto it.
pub fn apply_transformation(layout: &Layout, t: &Transformation) -> Result<Layout, EpsapError> {
    let mut out = layout.clone();
    match &t.target {
        Target::Opening(id) => {
            if layout.opening(id).is_none() {
                return Err(EpsapError::InvalidTarget(format!("opening '{id}'")));
            }
            transform_opening(&mut out, id, t.op);
        }
        Target::Space(id) => {
            if layout.space(id).is_none() {
                return Err(EpsapError::InvalidTarget(format!("space '{id}'")));
            }
            transform_single_space(&mut out, id, t.op);
        }
        Target::Cluster(id) => {
            if layout.space(id).is_none() {
                return Err(EpsapError::InvalidTarget(format!(
                    "cluster of space '{id}'"
                )));
            }
            let members = adjacency_graph(layout).component(id, AdjacencyKind::WallAdjacent);
            transform_group(&mut out, &members, t.op);
        }
        Target::Storey(i) => {
            let Some(storey) = layout.storeys.get(*i) else {
                return Err(EpsapError::InvalidTarget(format!("storey {i}")));
            };
            let members = storey.spaces.iter().map(|s| s.id.clone()).collect();
            transform_group(&mut out, &members, t.op);
        }
        Target::Building => {
            let members = layout.spaces().map(|s| s.id.clone()).collect();
            transform_group(&mut out, &members, t.op);
        }
    }
    Ok(out)
}

fn clamp_on_wall(o: &mut Opening, wall_len: f64) {
    if o.width > wall_len {
        o.width = snap(wall_len);
    }
    let max_off = (wall_len - o.width).max(0.0);
    o.offset_along_wall = snap(o.offset_along_wall.clamp(0.0, max_off));
}

fn transform_opening(layout: &mut Layout, id: &str, op: Operation) {
    let owner_rect = {
        let o = layout.opening(id).expect("checked");
        layout.space(&o.owner).expect("opening owner exists").rect
    };
    let o = layout.opening_mut(id).expect("checked");
    match op {
        Operation::Translate { dx, dy } => {
            let steps = if o.wall.runs_along_x() { dx } else { dy };
            o.offset_along_wall = snap(o.offset_along_wall + steps as f64 * GRID);
        }
        Operation::Rotate90 { quarter_turns } => {
            o.wall = o.wall.rotate_cw(-(quarter_turns as i32));
        }
        Operation::Stretch { steps, .. } => {
            if o.kind == OpeningKind::Window {
                o.width = snap((o.width + steps as f64 * GRID).max(MIN_WINDOW_WIDTH.min(o.width)));
            }
        }
        Operation::Mirror { .. } => {
            let len = owner_rect.wall_length(o.wall);
            o.offset_along_wall = snap(len - o.offset_along_wall - o.width);
        }
    }
    clamp_on_wall(o, owner_rect.wall_length(o.wall));
}

/// Rigid point map shared by a rectangle and the openings it owns.
#[derive(Clone, Copy)]
enum PointMap {
    Shift(f64, f64),
    /// Quarter turn counter-clockwise about a centre.
    RotateAbout(f64, f64),
    /// Quarter turn counter-clockwise keeping the bounding box's south-west corner and
    /// an exact four-cycle on the lattice.
    RotateInBox {
        x0: f64,
        y0: f64,
        depth: f64,
    },
    MirrorX(f64),
    MirrorY(f64),
}

impl PointMap {
    fn apply(self, (px, py): (f64, f64)) -> (f64, f64) {
        match self {
            PointMap::Shift(dx, dy) => (px + dx, py + dy),
            PointMap::RotateAbout(cx, cy) => (cx - (py - cy), cy + (px - cx)),
            PointMap::RotateInBox { x0, y0, depth } => (x0 + depth - (py - y0), y0 + (px - x0)),
            PointMap::MirrorX(c2) => (c2 - px, py),
            PointMap::MirrorY(c2) => (px, c2 - py),
        }
    }

    fn map_side(self, side: Orientation) -> Orientation {
        match self {
            PointMap::Shift(..) => side,
            PointMap::RotateAbout(..) | PointMap::RotateInBox { .. } => side.rotate_cw(-1),
            PointMap::MirrorX(_) => match side {
                Orientation::E => Orientation::W,
                Orientation::W => Orientation::E,
                s => s,
            },
            PointMap::MirrorY(_) => match side {
                Orientation::N => Orientation::S,
                Orientation::S => Orientation::N,
                s => s,
            },
        }
    }

    fn map_rect(self, r: &Rect<f64>) -> Rect<f64> {
        let (ax, ay) = self.apply((r.x, r.y));
        let (bx, by) = self.apply((r.x_max(), r.y_max()));
        let (x0, x1) = (ax.min(bx), ax.max(bx));
        let (y0, y1) = (ay.min(by), ay.max(by));
        Rect::new(snap(x0), snap(y0), snap(x1 - x0), snap(y1 - y0))
    }
}

fn wall_point(rect: &Rect<f64>, side: Orientation, along: f64) -> (f64, f64) {
    let w = rect.wall(side);
    if side.runs_along_x() {
        (along, w.fixed)
    } else {
        (w.fixed, along)
    }
}

/// Moves the spaces in `ids` and their openings through `map`.
fn map_spaces(layout: &mut Layout, ids: &BTreeSet<String>, map: impl Fn(&Rect<f64>) -> PointMap) {
    for storey in &mut layout.storeys {
        let moved: Vec<(String, Rect<f64>, Rect<f64>, PointMap)> = storey
            .spaces
            .iter()
            .filter(|s| ids.contains(&s.id))
            .map(|s| {
                let m = map(&s.rect);
                (s.id.clone(), s.rect, m.map_rect(&s.rect), m)
            })
            .collect();
        for (id, old, new, m) in &moved {
            for o in storey.openings.iter_mut().filter(|o| &o.owner == id) {
                let wall = old.wall(o.wall);
                let a = m.apply(wall_point(old, o.wall, wall.start + o.offset_along_wall));
                let b = m.apply(wall_point(
                    old,
                    o.wall,
                    wall.start + o.offset_along_wall + o.width,
                ));
                let side = m.map_side(o.wall);
                let along = |p: (f64, f64)| if side.runs_along_x() { p.0 } else { p.1 };
                let start = along(a).min(along(b));
                o.wall = side;
                o.offset_along_wall = snap(start - new.wall(side).start);
                clamp_on_wall(o, new.wall_length(side));
            }
            if let Some(s) = storey.spaces.iter_mut().find(|s| &s.id == id) {
                s.rect = *new;
            }
        }
    }
}

fn transform_single_space(layout: &mut Layout, id: &str, op: Operation) {
    let ids: BTreeSet<String> = [id.to_string()].into();
    match op {
        Operation::Translate { dx, dy } => {
            map_spaces(layout, &ids, |_| {
                PointMap::Shift(dx as f64 * GRID, dy as f64 * GRID)
            });
        }
        Operation::Rotate90 { quarter_turns } => {
            for _ in 0..quarter_turns {
                map_spaces(layout, &ids, |r| {
                    let (cx, cy) = r.center();
                    PointMap::RotateAbout(cx, cy)
                });
            }
        }
        Operation::Mirror { axis } => map_spaces(layout, &ids, |r| match axis {
            Axis::X => PointMap::MirrorX(r.x + r.x_max()),
            Axis::Y => PointMap::MirrorY(r.y + r.y_max()),
        }),
        Operation::Stretch { side, steps } => stretch_space(layout, id, side, steps),
    }
}

fn stretch_space(layout: &mut Layout, id: &str, side: Orientation, steps: i32) {
    let Some(space) = layout.space(id) else {
        return;
    };
    let old = space.rect;
    let storey = space.storey;
    let along_x = !side.runs_along_x();
    let dim = if along_x { old.width } else { old.depth };
    let delta = (steps as f64 * GRID).max(GRID - dim);
    let mut new = old;
    match side {
        Orientation::E => new.width = old.width + delta,
        Orientation::W => {
            new.x = old.x - delta;
            new.width = old.width + delta;
        }
        Orientation::N => new.depth = old.depth + delta,
        Orientation::S => {
            new.y = old.y - delta;
            new.depth = old.depth + delta;
        }
    }
    let new = Rect::new(snap(new.x), snap(new.y), snap(new.width), snap(new.depth));
    for o in layout.storeys[storey]
        .openings
        .iter_mut()
        .filter(|o| o.owner == id)
    {
        // openings keep their absolute position along the wall
        let shift = old.wall(o.wall).start - new.wall(o.wall).start;
        o.offset_along_wall = snap(o.offset_along_wall + shift);
        clamp_on_wall(o, new.wall_length(o.wall));
    }
    if let Some(s) = layout.space_mut(id) {
        s.rect = new;
    }
}

fn bbox(layout: &Layout, ids: &BTreeSet<String>) -> Option<Rect<f64>> {
    let mut it = layout
        .spaces()
        .filter(|s| ids.contains(&s.id))
        .map(|s| s.rect);
    let first = it.next()?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x_max(), first.y_max());
    for r in it {
        x0 = x0.min(r.x);
        y0 = y0.min(r.y);
        x1 = x1.max(r.x_max());
        y1 = y1.max(r.y_max());
    }
    Some(Rect::new(x0, y0, x1 - x0, y1 - y0))
}

fn transform_group(layout: &mut Layout, ids: &BTreeSet<String>, op: Operation) {
    if ids.is_empty() {
        return;
    }
    match op {
        Operation::Translate { dx, dy } => {
            map_spaces(layout, ids, |_| {
                PointMap::Shift(dx as f64 * GRID, dy as f64 * GRID)
            });
        }
        Operation::Rotate90 { quarter_turns } => {
            for _ in 0..quarter_turns {
                let b = bbox(layout, ids).expect("non-empty group");
                map_spaces(layout, ids, |_| PointMap::RotateInBox {
                    x0: b.x,
                    y0: b.y,
                    depth: b.depth,
                });
            }
        }
        Operation::Mirror { axis } => {
            let b = bbox(layout, ids).expect("non-empty group");
            map_spaces(layout, ids, |_| match axis {
                Axis::X => PointMap::MirrorX(b.x + b.x_max()),
                Axis::Y => PointMap::MirrorY(b.y + b.y_max()),
            });
        }
        Operation::Stretch { side, steps } => {
            for id in ids {
                stretch_space(layout, id, side, steps);
            }
        }
    }
}
