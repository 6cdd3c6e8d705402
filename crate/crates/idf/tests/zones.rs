mod common;

use common::*;
use planforge_core::epsap::intrinsic_penalty;
use planforge_core::geometry::Orientation;
use planforge_core::model::{Layout, OpeningKind, Overhang};
use planforge_core::systems::SystemsSpec;
use planforge_idf::{emit_project, IdfDocument, IdfError, Record};
use proptest::prelude::*;

const SURFACE: &str = "BuildingSurface:Detailed";
const FENESTRATION: &str = "FenestrationSurface:Detailed";

fn emit(layout: &Layout) -> IdfDocument {
    emit_with(layout, SystemsSpec::default()).unwrap()
}

fn vertices(r: &Record) -> Vec<[f64; 3]> {
    let v: Vec<f64> = r
        .fields
        .iter()
        .filter(|f| f.comment.starts_with("Vertex"))
        .map(|f| f.value.parse().unwrap())
        .collect();
    v.chunks(3).map(|c| [c[0], c[1], c[2]]).collect()
}

/// Newell's method, normalised.
fn normal(vs: &[[f64; 3]]) -> [f64; 3] {
    let mut n = [0.0; 3];
    for (i, a) in vs.iter().enumerate() {
        let b = vs[(i + 1) % vs.len()];
        n[0] += (a[1] - b[1]) * (a[2] + b[2]);
        n[1] += (a[2] - b[2]) * (a[0] + b[0]);
        n[2] += (a[0] - b[0]) * (a[1] + b[1]);
    }
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    n.map(|c| c / len)
}

fn outward(side: &str) -> [f64; 3] {
    match side {
        "N" => [0.0, 1.0, 0.0],
        "E" => [1.0, 0.0, 0.0],
        "S" => [0.0, -1.0, 0.0],
        "W" => [-1.0, 0.0, 0.0],
        other => panic!("side {other}"),
    }
}

fn expected_normal(r: &Record) -> [f64; 3] {
    match r.get("Surface Type").unwrap() {
        "Wall" => outward(
            r.name()
                .split(" Wall ")
                .nth(1)
                .unwrap()
                .split(' ')
                .next()
                .unwrap(),
        ),
        "Floor" => [0.0, 0.0, -1.0],
        "Roof" | "Ceiling" => [0.0, 0.0, 1.0],
        other => panic!("surface type {other}"),
    }
}

fn assert_parallel(a: [f64; 3], b: [f64; 3], what: &str) {
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    assert!((dot - 1.0).abs() < 1e-9, "{what}: {a:?} vs {b:?}");
}

/// Walls per wall segment, plus one floor and one roof per zone on a single storey.
fn single_storey_surface_count(layout: &Layout) -> usize {
    layout
        .spaces()
        .map(|s| {
            Orientation::ALL
                .iter()
                .map(|&side| layout.wall_segments(s, side).len())
                .sum::<usize>()
                + 2
        })
        .sum()
}

fn assert_reciprocal(doc: &IdfDocument) {
    for class in [SURFACE, FENESTRATION] {
        for r in doc.of_class(class) {
            let boundary = r.get("Outside Boundary Condition").unwrap_or("Surface");
            let other = r.get("Outside Boundary Condition Object").unwrap_or("");
            if boundary != "Surface" || other.is_empty() {
                continue;
            }
            let partner = doc
                .find(class, other)
                .unwrap_or_else(|| panic!("{} points at missing {other}", r.name()));
            assert_eq!(
                partner.get("Outside Boundary Condition Object"),
                Some(r.name())
            );
            assert_parallel(
                normal(&vertices(r)),
                normal(&vertices(partner)).map(|c| -c),
                r.name(),
            );
        }
    }
}

#[test]
fn one_space_gives_one_zone_and_six_surfaces() {
    let doc = emit(&minimal_layout());
    assert_eq!(doc.count("Zone"), 1);
    assert_eq!(
        doc.find("Zone", "Z-0-room").map(|z| z.class.as_str()),
        Some("Zone")
    );
    assert_eq!(doc.count(SURFACE), 6);
    assert_eq!(doc.count(FENESTRATION), 1);
    assert_eq!(doc.count("Shading:Overhang"), 0);
    let window = doc.find(FENESTRATION, "Z-0-room Window w1").unwrap();
    assert_eq!(
        window.get("Building Surface Name"),
        Some("Z-0-room Wall S 1")
    );
}

#[test]
fn adjacent_spaces_share_a_reciprocal_wall_pair() {
    let layout = single_storey(&[
        ("a", rect(0.0, 0.0, 4.0, 5.0)),
        ("b", rect(4.0, 0.0, 3.0, 5.0)),
    ]);
    let doc = emit(&layout);
    let east = doc.find(SURFACE, "Z-0-a Wall E 1").unwrap();
    let west = doc.find(SURFACE, "Z-0-b Wall W 1").unwrap();
    assert_eq!(east.get("Outside Boundary Condition"), Some("Surface"));
    assert_eq!(
        east.get("Outside Boundary Condition Object"),
        Some("Z-0-b Wall W 1")
    );
    assert_eq!(
        west.get("Outside Boundary Condition Object"),
        Some("Z-0-a Wall E 1")
    );
    assert_eq!(east.get("Sun Exposure"), Some("NoSun"));
    // one side uses the reversed layer order so both faces see the same wall
    let names = [
        east.get("Construction Name").unwrap(),
        west.get("Construction Name").unwrap(),
    ];
    assert_eq!(
        names[1].strip_suffix(" Reversed").unwrap_or(names[1]),
        names[0]
    );
    assert_eq!(doc.count(SURFACE), single_storey_surface_count(&layout));
    assert_reciprocal(&doc);
}

#[test]
fn partial_contact_splits_walls() {
    // b touches only the upper 3 m of a's 5 m east wall
    let layout = single_storey(&[
        ("a", rect(0.0, 0.0, 4.0, 5.0)),
        ("b", rect(4.0, 2.0, 3.0, 3.0)),
    ]);
    let doc = emit(&layout);
    assert_eq!(doc.count(SURFACE), single_storey_surface_count(&layout));
    assert_eq!(doc.count(SURFACE), 2 * 6 + 1);
    let a_east: Vec<&Record> = doc
        .of_class(SURFACE)
        .filter(|r| r.name().starts_with("Z-0-a Wall E"))
        .collect();
    assert_eq!(a_east.len(), 2);
    assert_eq!(
        a_east
            .iter()
            .filter(|r| r.get("Outside Boundary Condition") == Some("Outdoors"))
            .count(),
        1
    );
    assert_reciprocal(&doc);
}

#[test]
fn interior_doors_come_in_pairs_and_overhangs_follow_depth() {
    let mut layout = single_storey(&[
        ("a", rect(0.0, 0.0, 4.0, 5.0)),
        ("b", rect(4.0, 0.0, 3.0, 5.0)),
    ]);
    let mut door = window("d1", "a", Orientation::E, 1.0);
    door.kind = OpeningKind::Door;
    door.width = 0.9;
    door.height = 2.1;
    door.sill = 0.0;
    door.connects_to = Some("b".into());
    layout.storeys[0].openings.push(door);
    layout.storeys[0]
        .openings
        .push(window("w1", "a", Orientation::S, 1.0));
    layout.storeys[0]
        .openings
        .push(window("w2", "b", Orientation::S, 1.0));
    layout.storeys[0].shades.push(Overhang {
        owner: "w1".into(),
        depth: 0.6,
    });
    layout.storeys[0].shades.push(Overhang {
        owner: "w2".into(),
        depth: 0.0,
    });
    assert_eq!(intrinsic_penalty(&layout), 0.0);
    let doc = emit(&layout);
    // 2 windows + door + its reciprocal
    assert_eq!(doc.count(FENESTRATION), 4);
    assert_eq!(doc.count("Shading:Overhang"), 1);
    let overhang = doc.of_class("Shading:Overhang").next().unwrap();
    assert_eq!(overhang.get("Window or Door Name"), Some("Z-0-a Window w1"));
    assert_reciprocal(&doc);
}

#[test]
fn surfaces_face_outwards() {
    for text in [SINGLE, TWO, THREE] {
        let p = project(text);
        for s in p
            .layouts
            .iter()
            .filter(|s| intrinsic_penalty(&s.layout) == 0.0)
        {
            let doc = emit_project(&p, &s.layout, &location()).unwrap();
            for r in doc.of_class(SURFACE) {
                assert_parallel(normal(&vertices(r)), expected_normal(r), r.name());
            }
            for r in doc.of_class(FENESTRATION) {
                let host = doc
                    .find(SURFACE, r.get("Building Surface Name").unwrap())
                    .unwrap();
                assert_parallel(normal(&vertices(r)), normal(&vertices(host)), r.name());
            }
            assert_reciprocal(&doc);
        }
    }
}

#[test]
fn bundled_single_storey_counts_are_exact() {
    let p = project(SINGLE);
    for s in p
        .layouts
        .iter()
        .filter(|s| intrinsic_penalty(&s.layout) == 0.0)
    {
        let doc = emit_project(&p, &s.layout, &location()).unwrap();
        let l = &s.layout;
        assert_eq!(doc.count("Zone"), l.space_count());
        assert_eq!(doc.count(SURFACE), single_storey_surface_count(l));
        let interior_doors = l
            .openings()
            .filter(|o| o.kind == OpeningKind::Door && o.connects_to.is_some())
            .count();
        assert_eq!(
            doc.count(FENESTRATION),
            l.openings().count() + interior_doors
        );
        let shaded = l
            .storeys
            .iter()
            .flat_map(|s| &s.shades)
            .filter(|o| o.depth > 0.0)
            .count();
        assert_eq!(doc.count("Shading:Overhang"), shaded);
    }
}

#[test]
fn upper_storeys_pair_floors_with_ceilings() {
    let p = project(TWO);
    let doc = emit_project(&p, &p.layouts[0].layout, &location()).unwrap();
    let interzone = doc.of_class(SURFACE).filter(|r| {
        r.get("Surface Type") == Some("Floor")
            && r.get("Outside Boundary Condition") == Some("Surface")
    });
    assert!(interzone.count() > 0);
    let ground = doc
        .of_class(SURFACE)
        .filter(|r| r.get("Outside Boundary Condition") == Some("Ground"))
        .count();
    assert_eq!(ground, p.layouts[0].layout.storeys[0].spaces.len());
}

#[test]
fn infeasible_layouts_are_rejected() {
    let overlapping = single_storey(&[
        ("a", rect(0.0, 0.0, 4.0, 5.0)),
        ("b", rect(3.0, 0.0, 3.0, 5.0)),
    ]);
    assert!(matches!(
        emit_with(&overlapping, SystemsSpec::default()),
        Err(IdfError::InfeasibleLayout(_))
    ));
    assert!(matches!(
        emit_with(&Layout::new(1), SystemsSpec::default()),
        Err(IdfError::InfeasibleLayout(_))
    ));
    let p = project(SINGLE);
    let bad = p
        .layouts
        .iter()
        .find(|s| intrinsic_penalty(&s.layout) > 0.0)
        .unwrap();
    assert!(matches!(
        emit_project(&p, &bad.layout, &location()),
        Err(IdfError::InfeasibleLayout(_))
    ));
}

#[test]
fn names_that_would_break_the_format_are_rejected() {
    let layout = single_storey(&[("a,b", rect(0.0, 0.0, 4.0, 5.0))]);
    assert!(matches!(
        emit_with(&layout, SystemsSpec::default()),
        Err(IdfError::InvalidName { .. })
    ));
}

/// A row of boxes along x, each either touching its predecessor or separated by a gap.
fn row() -> impl Strategy<Value = Layout> {
    prop::collection::vec((3u32..7, 3u32..7, 0u32..2, 0u32..3), 1..6).prop_map(|boxes| {
        let mut x = 0.0;
        let mut spaces = Vec::new();
        for (i, (w, d, gap, y)) in boxes.into_iter().enumerate() {
            x += gap as f64;
            spaces.push((format!("s{i}"), rect(x, y as f64, w as f64, d as f64)));
            x += w as f64;
        }
        let refs: Vec<(&str, _)> = spaces.iter().map(|(id, r)| (id.as_str(), *r)).collect();
        single_storey(&refs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zones_biject_with_spaces(layout in row()) {
        let doc = emit(&layout);
        prop_assert_eq!(doc.count("Zone"), layout.space_count());
        for s in layout.spaces() {
            prop_assert!(doc.find("Zone", &s.zone_name()).is_some());
        }
        prop_assert_eq!(doc.count(SURFACE), single_storey_surface_count(&layout));
        assert_reciprocal(&doc);
    }
}
