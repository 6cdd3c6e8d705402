//! Repair moves: short transformation sequences aimed at one violated requirement.
//!
//! Each move is built only from ordinary bounded transformations, so the search space is
//! unchanged; the moves just propose the displacement that would close a specific gap.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::geometry::{Orientation, Rect, GRID, TOL};
use crate::model::{
    adjacency_graph, AdjacencyKind, Layout, Opening, OpeningKind, SpaceProgram, MAX_ASPECT,
};

use super::init::{footprints, placement_region};
use super::penalty::{door_on_shared_wall, on_exterior_segment};
use super::transform::{
    apply_transformation, Operation, Target, Transformation, MAX_STEPS, MIN_WINDOW_WIDTH,
};

pub(crate) type Move = Vec<Transformation>;

/// Every candidate repair for the current layout, used by the deterministic local search.
pub(crate) fn repair_moves(layout: &Layout, program: &SpaceProgram) -> Vec<Move> {
    Family::ALL
        .iter()
        .flat_map(|f| f.moves(layout, program))
        .collect()
}

/// Picks a random family with at least one candidate, then a random move inside it.
pub(crate) fn random_repair<R: Rng>(
    layout: &Layout,
    program: &SpaceProgram,
    rng: &mut R,
) -> Option<Move> {
    let mut order = Family::ALL;
    order.shuffle(rng);
    for family in order {
        let mut moves = if family == Family::Door {
            let reqs = unsatisfied_doors(layout, program);
            if reqs.is_empty() {
                continue;
            }
            door_repairs(layout, reqs[rng.gen_range(0..reqs.len())])
        } else {
            family.moves(layout, program)
        };
        if !moves.is_empty() {
            let i = rng.gen_range(0..moves.len());
            return Some(moves.swap_remove(i));
        }
    }
    None
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Door,
    Opening,
    Dimension,
    Overlap,
    Bounds,
    Storey,
}

impl Family {
    const ALL: [Family; 6] = [
        Family::Door,
        Family::Opening,
        Family::Dimension,
        Family::Overlap,
        Family::Bounds,
        Family::Storey,
    ];

    fn moves(self, layout: &Layout, program: &SpaceProgram) -> Vec<Move> {
        match self {
            Family::Door => unsatisfied_doors(layout, program)
                .into_iter()
                .flat_map(|r| door_repairs(layout, r))
                .collect(),
            Family::Opening => opening_repairs(layout),
            Family::Dimension => dimension_repairs(layout, program),
            Family::Overlap => overlap_repairs(layout),
            Family::Bounds => bounds_repairs(layout, program),
            Family::Storey => storey_repairs(layout),
        }
    }
}

/// Doors realising a door requirement that do not sit on the shared wall.
fn unsatisfied_doors<'a>(layout: &'a Layout, program: &SpaceProgram) -> Vec<&'a Opening> {
    program
        .adjacency_requirements
        .iter()
        .filter(|r| r.kind == AdjacencyKind::DoorConnected)
        .filter_map(|req| {
            layout.openings().find(|o| {
                o.kind == OpeningKind::Door
                    && o.connects_to.as_deref().is_some_and(|c| {
                        (o.owner == req.a && c == req.b) || (o.owner == req.b && c == req.a)
                    })
            })
        })
        .filter(|door| !door_on_shared_wall(layout, door))
        .collect()
}

fn steps(delta: f64) -> i32 {
    (delta / GRID).round() as i32
}

/// Splits a displacement into bounded translations.
fn translate(target: Target, mut dx: i32, mut dy: i32) -> Move {
    let mut out = Vec::new();
    while dx != 0 || dy != 0 {
        let sx = dx.clamp(-MAX_STEPS, MAX_STEPS);
        let sy = dy.clamp(-MAX_STEPS, MAX_STEPS);
        out.push(Transformation::new(
            target.clone(),
            Operation::Translate { dx: sx, dy: sy },
        ));
        dx -= sx;
        dy -= sy;
    }
    out
}

fn stretch(id: &str, side: Orientation, mut n: i32) -> Move {
    let mut out = Vec::new();
    while n != 0 {
        let s = n.clamp(-MAX_STEPS, MAX_STEPS);
        out.push(Transformation::new(
            Target::Space(id.to_string()),
            Operation::Stretch { side, steps: s },
        ));
        n -= s;
    }
    out
}

fn space_shift(id: &str, from: &Rect<f64>, to_x: f64, to_y: f64) -> Move {
    translate(
        Target::Space(id.to_string()),
        steps(to_x - from.x),
        steps(to_y - from.y),
    )
}

/// Moves an opening of `layout` onto `side` of its owner so that it sits within `[s, e]`
/// (absolute coordinates along the wall). Returns one move per placement choice.
fn place_opening(layout: &Layout, id: &str, side: Orientation, s: f64, e: f64) -> Vec<Move> {
    let Some(o) = layout.opening(id) else {
        return Vec::new();
    };
    let mut prefix = Vec::new();
    let mut current = layout.clone();
    if o.wall != side {
        let q = (o.wall.index() as i32 - side.index() as i32).rem_euclid(4) as u8;
        let t = Transformation::new(
            Target::Opening(id.to_string()),
            Operation::Rotate90 { quarter_turns: q },
        );
        current = apply_transformation(layout, &t).expect("opening exists");
        prefix.push(t);
    }
    let o = current.opening(id).expect("opening exists");
    let owner = current.space(&o.owner).expect("owner exists");
    let start = owner.rect.wall(side).start;
    let cur = start + o.offset_along_wall;
    let kmin = ((s - cur) / GRID - 1e-6).ceil() as i32;
    let kmax = ((e - o.width - cur) / GRID + 1e-6).floor() as i32;
    if kmin > kmax {
        return Vec::new();
    }
    let mut ks = vec![kmin, (kmin + kmax) / 2, kmax];
    ks.dedup();
    ks.into_iter()
        .map(|k| {
            let mut m = prefix.clone();
            let (dx, dy) = if side.runs_along_x() { (k, 0) } else { (0, k) };
            m.extend(translate(Target::Opening(id.to_string()), dx, dy));
            m
        })
        .collect()
}

/// Positions for `mover` abutting `side` of `anchor` with three alignments along that side.
fn abutting_positions(mover: &Rect<f64>, anchor: &Rect<f64>, side: Orientation) -> Vec<(f64, f64)> {
    let along_x = side.runs_along_x();
    let fixed = match side {
        Orientation::N => anchor.y_max(),
        Orientation::S => anchor.y - mover.depth,
        Orientation::E => anchor.x_max(),
        Orientation::W => anchor.x - mover.width,
    };
    let (a0, a1, len) = if along_x {
        (anchor.x, anchor.x_max(), mover.width)
    } else {
        (anchor.y, anchor.y_max(), mover.depth)
    };
    let aligns = [a0, a1 - len, (a0 + a1 - len) / 2.0];
    aligns
        .iter()
        .map(|&p| if along_x { (p, fixed) } else { (fixed, p) })
        .collect()
}

fn door_repairs(layout: &Layout, door: &Opening) -> Vec<Move> {
    let mut out = Vec::new();
    let graph = adjacency_graph(layout);
    {
        let other_id = door.connects_to.clone().expect("filtered");
        let (Some(owner), Some(other)) = (layout.space(&door.owner), layout.space(&other_id))
        else {
            return out;
        };
        if owner.storey != other.storey {
            return out;
        }
        let mut placed = false;
        for side in Orientation::ALL {
            if let Some((s, e)) = owner.rect.shared_interval(side, &other.rect) {
                if e - s >= door.width - TOL {
                    out.extend(place_opening(layout, &door.id, side, s, e));
                    placed = true;
                }
            }
        }
        if placed {
            return out;
        }
        // bring the two spaces together, then put the door on the new shared wall
        for (mover, anchor) in [(owner, other), (other, owner)] {
            for side in Orientation::ALL {
                for (x, y) in abutting_positions(&mover.rect, &anchor.rect, side) {
                    let mut m = space_shift(&mover.id, &mover.rect, x, y);
                    if m.is_empty() {
                        continue;
                    }
                    let mut moved = layout.clone();
                    for t in &m {
                        moved = apply_transformation(&moved, t).expect("space exists");
                    }
                    let (o2, t2) = (
                        moved.space(&door.owner).unwrap(),
                        moved.space(&other_id).unwrap(),
                    );
                    let door_side = if mover.id == door.owner {
                        side.opposite()
                    } else {
                        side
                    };
                    if let Some((s, e)) = o2.rect.shared_interval(door_side, &t2.rect) {
                        let mut fixes = place_opening(&moved, &door.id, door_side, s, e);
                        if !fixes.is_empty() {
                            let mid = fixes.len() / 2;
                            m.extend(fixes.swap_remove(mid));
                        }
                    }
                    out.push(m);
                    // the same shift applied to the mover's whole cluster keeps its neighbours attached
                    let cluster = graph.component(&mover.id, AdjacencyKind::WallAdjacent);
                    if cluster.len() > 1 && !cluster.contains(&anchor.id) {
                        out.push(translate(
                            Target::Cluster(mover.id.clone()),
                            steps(x - mover.rect.x),
                            steps(y - mover.rect.y),
                        ));
                    }
                }
            }
        }
    }
    out
}

fn opening_repairs(layout: &Layout) -> Vec<Move> {
    let mut out = Vec::new();
    for storey in &layout.storeys {
        for o in &storey.openings {
            if o.kind == OpeningKind::Door && o.connects_to.is_some() {
                continue;
            }
            let clash = storey.openings.iter().any(|p| {
                p.id != o.id
                    && p.owner == o.owner
                    && p.wall == o.wall
                    && (o.offset_along_wall + o.width).min(p.offset_along_wall + p.width)
                        - o.offset_along_wall.max(p.offset_along_wall)
                        > TOL
            });
            if on_exterior_segment(layout, o) && !clash {
                continue;
            }
            let owner = layout.space(&o.owner).expect("owner exists");
            let segs: Vec<_> = layout
                .wall_segments(owner, o.wall)
                .into_iter()
                .filter(|s| s.neighbor.is_none())
                .collect();
            let mut fitted = false;
            for seg in &segs {
                if seg.end - seg.start >= o.width - TOL {
                    out.extend(place_opening(layout, &o.id, o.wall, seg.start, seg.end));
                    fitted = true;
                }
            }
            if !fitted && o.kind == OpeningKind::Window {
                if let Some(seg) = segs
                    .iter()
                    .max_by(|a, b| (a.end - a.start).total_cmp(&(b.end - b.start)))
                {
                    let room = ((seg.end - seg.start) / GRID).floor() as i32;
                    let shrink = room - steps(o.width);
                    if room as f64 * GRID >= MIN_WINDOW_WIDTH - TOL && shrink < 0 {
                        let t = Transformation::new(
                            Target::Opening(o.id.clone()),
                            Operation::Stretch {
                                side: o.wall,
                                steps: shrink.max(-MAX_STEPS),
                            },
                        );
                        let narrowed = apply_transformation(layout, &t).expect("opening exists");
                        for fix in place_opening(&narrowed, &o.id, o.wall, seg.start, seg.end) {
                            let mut m = vec![t.clone()];
                            m.extend(fix);
                            out.push(m);
                        }
                    }
                }
            }
        }
    }
    out
}

fn dimension_repairs(layout: &Layout, program: &SpaceProgram) -> Vec<Move> {
    let mut out = Vec::new();
    for req in &program.spaces {
        let Some(space) = layout.space(&req.id) else {
            continue;
        };
        let r = space.rect;
        let off = (r.area() - req.target_area).abs() / req.target_area > 1e-9
            || r.aspect_ratio() > MAX_ASPECT + 1e-9;
        if !off {
            continue;
        }
        let mut options = footprints(req, &placement_region(program, req.storey));
        options.sort_by(|a, b| {
            let da = (a.0 - r.width).abs() + (a.1 - r.depth).abs();
            let db = (b.0 - r.width).abs() + (b.1 - r.depth).abs();
            da.total_cmp(&db)
        });
        for &(w, d) in options.iter().take(4) {
            for (sx, sy) in [
                (Orientation::E, Orientation::N),
                (Orientation::W, Orientation::S),
                (Orientation::E, Orientation::S),
                (Orientation::W, Orientation::N),
            ] {
                let mut m = stretch(&req.id, sx, steps(w - r.width));
                m.extend(stretch(&req.id, sy, steps(d - r.depth)));
                if !m.is_empty() {
                    out.push(m);
                }
            }
        }
    }
    out
}

fn overlap_repairs(layout: &Layout) -> Vec<Move> {
    let mut out = Vec::new();
    for storey in &layout.storeys {
        for a in &storey.spaces {
            for b in &storey.spaces {
                if a.id == b.id || a.rect.overlap_area(&b.rect) <= 1e-9 {
                    continue;
                }
                let (ra, rb) = (a.rect, b.rect);
                let pushes = [
                    (rb.x_max() - ra.x, 0.0),
                    (rb.x - ra.x_max(), 0.0),
                    (0.0, rb.y_max() - ra.y),
                    (0.0, rb.y - ra.y_max()),
                ];
                for (dx, dy) in pushes {
                    let m = translate(Target::Space(a.id.clone()), steps(dx), steps(dy));
                    if !m.is_empty() {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

fn clamp_into(r: &Rect<f64>, region: &Rect<f64>) -> (f64, f64) {
    let x = r.x.min(region.x_max() - r.width).max(region.x);
    let y = r.y.min(region.y_max() - r.depth).max(region.y);
    (x, y)
}

fn bounds_repairs(layout: &Layout, program: &SpaceProgram) -> Vec<Move> {
    let mut out = Vec::new();
    for s in layout.spaces() {
        let Some(b) = program.boundary_for(s.storey) else {
            continue;
        };
        if s.rect.area() - s.rect.overlap_area(&b) <= 1e-9 {
            continue;
        }
        let (x, y) = clamp_into(&s.rect, &b);
        let m = space_shift(&s.id, &s.rect, x, y);
        if !m.is_empty() {
            out.push(m);
        }
    }
    out
}

fn bbox(rects: &[Rect<f64>]) -> Option<Rect<f64>> {
    let first = rects.first()?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x_max(), first.y_max());
    for r in rects {
        x0 = x0.min(r.x);
        y0 = y0.min(r.y);
        x1 = x1.max(r.x_max());
        y1 = y1.max(r.y_max());
    }
    Some(Rect::new(x0, y0, x1 - x0, y1 - y0))
}

fn storey_repairs(layout: &Layout) -> Vec<Move> {
    let mut out = Vec::new();
    for (k, w) in layout.storeys.windows(2).enumerate() {
        let below: Vec<Rect<f64>> = w[0].spaces.iter().map(|s| s.rect).collect();
        let above: Vec<Rect<f64>> = w[1].spaces.iter().map(|s| s.rect).collect();
        let uncovered: f64 = above
            .iter()
            .map(|r| r.area() - r.covered_area(&below))
            .sum();
        if uncovered > 1e-9 {
            if let (Some(lo), Some(hi)) = (bbox(&below), bbox(&above)) {
                // align the whole upper storey on a corner of the one below
                let targets = [
                    (lo.x, lo.y),
                    (lo.x_max() - hi.width, lo.y),
                    (lo.x, lo.y_max() - hi.depth),
                    (lo.x_max() - hi.width, lo.y_max() - hi.depth),
                ];
                for (x, y) in targets {
                    let m = translate(Target::Storey(k + 1), steps(x - hi.x), steps(y - hi.y));
                    if !m.is_empty() {
                        out.push(m);
                    }
                }
            }
        }
        for s in &w[1].spaces {
            if s.rect.area() - s.rect.covered_area(&below) <= 1e-9 {
                continue;
            }
            for l in &below {
                // inside one support if it fits, else aligned on its corners
                let targets = [
                    clamp_into(&s.rect, l),
                    (l.x, l.y),
                    (l.x_max() - s.rect.width, l.y_max() - s.rect.depth),
                ];
                for (x, y) in targets {
                    let m = space_shift(&s.id, &s.rect, x, y);
                    if !m.is_empty() {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}
