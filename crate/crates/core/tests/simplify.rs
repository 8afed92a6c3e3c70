mod common;

use std::collections::{BTreeSet, HashSet};

use knotforge::codes::{edge_key, euler_identity_check, parse_pd, serialize_pd, Face, PlanarDiagram};
use knotforge::detour::{detect_loop_tangle, find_first_loop, loop_detour_sequence, LoopTangle};
use knotforge::fixtures;
use knotforge::generate::{random_braid_knot, random_knot, random_loop_tangle_knot};
use knotforge::moves::{is_simplification, perform, replay, MoveKind, MoveRecord};
use knotforge::robot::{is_ascending, run_robot_at_base};
use knotforge::simplify::{
    discharge, find_tracks, reduce_to_minimal, resolve_pentagon, simplify_ascending, simplify_ascending_report,
    simplify_loop_tangle, transport_triangle, SimplifyError, StructureKind, Terminal, Thirds, Track,
};
use proptest::prelude::*;

use common::{disc_states, normalized_bracket};

/// Smallest loop interior found with no 1-gon or 2-gon: three triangles
/// and a quadrilateral around one crossing.
const SMALL_MINIMAL_PD: &str = "base 1 fwd
X 1 8 2 9 -
X 2 8 3 7 +
X 3 1 4 14 +
X 4 12 5 11 +
X 5 12 6 13 -
X 6 9 7 10 -
X 10 14 11 13 +
";

/// A loop interior with a track of at least two quadrilaterals between
/// two triangles.
const LONG_TRACK_PD: &str = "base 1 fwd
X 1 10 2 11 -
X 2 10 3 9 +
X 3 1 4 24 +
X 4 16 5 15 +
X 5 21 6 20 +
X 6 21 7 22 -
X 7 16 8 17 -
X 8 11 9 12 -
X 12 18 13 17 +
X 13 23 14 22 +
X 14 19 15 20 -
X 18 24 19 23 +
";

/// A loop interior with a pentagon that has triangles on three
/// consecutive sides.
const PENTAGON_PD: &str = "base 1 fwd
X 1 24 2 25 -
X 2 10 3 9 +
X 3 10 4 11 -
X 4 24 5 23 +
X 5 1 6 30 +
X 6 15 7 16 -
X 7 15 8 14 +
X 8 25 9 26 -
X 11 18 12 19 -
X 12 28 13 27 +
X 13 21 14 20 +
X 16 21 17 22 -
X 17 28 18 29 -
X 19 27 20 26 +
X 22 29 23 30 -
";

fn first_loop(d: &PlanarDiagram) -> LoopTangle {
    let (ul, _) = find_first_loop(&d.gauss()).unwrap();
    detect_loop_tangle(d, d.crossing_order()[ul as usize - 1]).unwrap()
}

fn touches(t: &Track, u: usize) -> bool {
    let on = |f: &Face| f.corners().any(|x| x == u);
    on(&t.triangle)
        || t.quads.iter().any(on)
        || (t.terminal == Terminal::Triangle && t.terminal_face.as_ref().is_some_and(on))
}

fn kinds(t: &knotforge::moves::MoveTrace) -> Vec<MoveKind> {
    t.records.iter().map(|r| r.kind).collect()
}

fn assert_monotone_to_zero(d: &PlanarDiagram, t: &knotforge::moves::MoveTrace) {
    let end = replay(t).unwrap();
    assert_eq!(end.crossing_count(), 0, "{}", serialize_pd(d));
    assert!(is_simplification(t).unwrap());
    let mut prev = d.crossing_count();
    for r in &t.records {
        assert!(r.crossings_after <= prev);
        prev = r.crossings_after;
    }
}

#[test]
fn kink_is_removed_first() {
    let mut d = fixtures::ascending_trefoil();
    let x = d.darts().find(|x| x.crossing() == 2 && d.is_incoming(*x)).unwrap();
    let kinked = [false, true].into_iter().find_map(|over| {
        let mut e = d.clone();
        perform(&mut e, MoveRecord::new(MoveKind::RIAdd, vec![x]).with_over(over)).unwrap();
        is_ascending(&e.gauss()).then_some(e)
    });
    d = kinked.unwrap();
    let (out, t) = reduce_to_minimal(&d).unwrap();
    assert_eq!(t.records[0].kind, MoveKind::RIRemove);
    assert_eq!(out.crossing_count(), 0);
}

#[test]
fn reduction_is_idempotent() {
    for seed in 0..40 {
        let d = run_robot_at_base(&random_loop_tangle_knot(4, 10, 8, seed)).unwrap();
        let (once, t) = reduce_to_minimal(&d).unwrap();
        assert!(is_simplification(&t).unwrap());
        let (twice, t2) = reduce_to_minimal(&once).unwrap();
        assert!(t2.is_empty());
        assert_eq!(twice, once);
    }
}

#[test]
fn reduction_rejects_non_ascending_input() {
    assert_eq!(reduce_to_minimal(&fixtures::trefoil()).unwrap_err(), SimplifyError::NotAscending);
}

#[test]
fn empty_disc_comes_off_by_rii_then_ri() {
    let d = fixtures::ascending_trefoil();
    let lt = first_loop(&d);
    assert_eq!(lt.c(), 0);
    let t = simplify_loop_tangle(&d, &lt).unwrap();
    assert_eq!(kinds(&t), [MoveKind::RIIRemove, MoveKind::RIRemove]);
    assert!(is_simplification(&t).unwrap());
}

#[test]
fn ascending_trefoil_golden_trace() {
    let d = fixtures::ascending_trefoil();
    let t = simplify_ascending(&d).unwrap();
    assert_monotone_to_zero(&d, &t);
    assert_eq!(kinds(&t), [MoveKind::RIIRemove, MoveKind::RIRemove]);
}

#[test]
fn unknot_gives_empty_trace() {
    assert!(simplify_ascending(&PlanarDiagram::unknot()).unwrap().is_empty());
    let (out, t) = reduce_to_minimal(&PlanarDiagram::unknot()).unwrap();
    assert!(t.is_empty());
    assert_eq!(out.crossing_count(), 0);
}

/// Charges recomputed from scratch: every disc face starts at 4 - n and
/// each triangle sends 1/3 across every side not on the loop.
fn charge_oracle(d: &PlanarDiagram, lt: &LoopTangle) -> Vec<(Face, i64)> {
    let loop_edges = lt.loop_edges(d);
    let disc: HashSet<&Face> = lt.interior_faces.iter().collect();
    lt.interior_faces
        .iter()
        .map(|f| {
            let mut q = 3 * (4 - f.sides() as i64);
            for x in f.darts() {
                if loop_edges.contains(&edge_key(*x, d.pair(*x))) {
                    continue;
                }
                let g = d.face_of(d.pair(*x));
                assert!(disc.contains(&g));
                if f.sides() == 3 {
                    q -= 1;
                }
                if g.sides() == 3 {
                    q += 1;
                }
            }
            (f.clone(), q)
        })
        .collect()
}

#[test]
fn smallest_minimal_disc_discharges_to_three() {
    let d = parse_pd(SMALL_MINIMAL_PD).unwrap();
    let lt = first_loop(&d);
    assert_eq!(lt.c(), 1);
    assert_eq!(lt.census().counts, [(3, 3), (4, 1)].into());
    let rep = discharge(&d, &lt).unwrap();
    assert_eq!(rep.total(), Thirds(9));
    assert!(!rep.positive_structures.is_empty());
    let oracle = charge_oracle(&d, &lt);
    for c in &rep.charges {
        assert!(oracle.contains(&(c.face.clone(), c.charge.0)));
    }
}

#[test]
fn kink_disc_is_not_minimal() {
    let d = random_loop_tangle_knot(3, 6, 0, 5);
    let lt = first_loop(&d);
    assert_eq!(lt.census().counts, [(1, 1)].into());
    assert!(matches!(discharge(&d, &lt), Err(SimplifyError::NotMinimal(_))));
}

#[test]
fn discharge_matches_oracle_on_minimal_discs() {
    let mut checked = 0;
    for (d, u) in disc_states(0..120, 30) {
        let lt = detect_loop_tangle(&d, u).unwrap();
        assert_eq!(euler_identity_check(&lt.census()).1, 0);
        if lt.interior_faces.iter().any(|f| f.sides() <= 2) {
            continue;
        }
        let rep = discharge(&d, &lt).unwrap();
        let oracle = charge_oracle(&d, &lt);
        assert_eq!(rep.total(), Thirds(9));
        assert_eq!(oracle.iter().map(|(_, q)| q).sum::<i64>(), 9);
        assert!(!rep.positive_structures.is_empty());
        for c in &rep.charges {
            assert!(oracle.contains(&(c.face.clone(), c.charge.0)));
        }
        for s in &rep.positive_structures {
            match s {
                StructureKind::TriangleOnLoop { triangle } => assert_eq!(triangle.sides(), 3),
                StructureKind::TriangleTrianglePair { first, second } => {
                    assert_eq!((first.sides(), second.sides()), (3, 3))
                }
                StructureKind::QuadWithTriangle { quad, triangles } => {
                    assert_eq!(quad.sides(), 4);
                    assert!(!triangles.is_empty());
                }
                StructureKind::PentagonWithFourTriangles { pentagon, triangles } => {
                    assert_eq!(pentagon.sides(), 5);
                    assert!(triangles.len() >= 4);
                }
            }
        }
        checked += 1;
    }
    assert!(checked > 50, "only {checked} minimal discs");
}

#[test]
fn tracks_are_glued_along_opposite_sides() {
    for (d, u) in disc_states(0..60, 20) {
        let lt = detect_loop_tangle(&d, u).unwrap();
        for t in find_tracks(&d, &lt) {
            assert_eq!(t.triangle.sides(), 3);
            assert!(t.triangle.contains(t.exit));
            let mut cur = t.exit;
            for q in &t.quads {
                assert_eq!(q.sides(), 4);
                let entry = d.pair(cur);
                let around = q.starting_at(entry).expect("consecutive faces share a side");
                cur = around[2];
            }
            match t.terminal {
                Terminal::Loop => assert!(lt.loop_edges(&d).contains(&edge_key(cur, d.pair(cur)))),
                Terminal::Triangle => assert_eq!(d.face_of(d.pair(cur)).sides(), 3),
                Terminal::BigPolygon(n) => {
                    assert!(n >= 5);
                    assert_eq!(d.face_of(d.pair(cur)).sides(), n);
                }
            }
            if t.terminal != Terminal::Loop {
                assert_eq!(t.entry, Some(d.pair(cur)));
                assert_eq!(t.terminal_face.as_ref(), Some(&d.face_of(d.pair(cur))));
            }
        }
    }
}

#[test]
fn adjacent_triangles_give_zero_length_track() {
    let d = parse_pd(SMALL_MINIMAL_PD).unwrap();
    let lt = first_loop(&d);
    let tracks = find_tracks(&d, &lt);
    let pair = tracks.iter().find(|t| t.length() == 0 && t.terminal == Terminal::Triangle);
    let rep = discharge(&d, &lt).unwrap();
    let has_pair = rep.positive_structures.iter().any(|s| matches!(s, StructureKind::TriangleTrianglePair { .. }));
    assert_eq!(pair.is_some(), has_pair);
    assert!(tracks.iter().any(|t| t.length() == 0));
}

#[test]
fn transport_along_long_track_removes_two_crossings() {
    let d = parse_pd(LONG_TRACK_PD).unwrap();
    let lt = first_loop(&d);
    let u = lt.base_crossing;
    let track = find_tracks(&d, &lt)
        .into_iter()
        .filter(|t| t.terminal == Terminal::Triangle && t.length() >= 2 && !touches(t, u))
        .min_by_key(|t| t.length())
        .unwrap();
    let t = transport_triangle(&d, &track).unwrap();
    let n = track.length();
    assert_eq!(t.count(MoveKind::RIII), n + 1);
    assert_eq!(kinds(&t).last(), Some(&MoveKind::RIIRemove));
    let end = replay(&t).unwrap();
    assert_eq!(end.crossing_count(), d.crossing_count() - 2);
    assert!(is_simplification(&t).unwrap());
    assert_eq!(normalized_bracket(&end), normalized_bracket(&d));
}

#[test]
fn transport_outcomes_match_terminals() {
    let mut seen = BTreeSet::new();
    for (d, u) in disc_states(0..80, 20) {
        let lt = detect_loop_tangle(&d, u).unwrap();
        if lt.interior_faces.iter().any(|f| f.sides() <= 2) {
            continue;
        }
        for track in find_tracks(&d, &lt).into_iter().filter(|t| !touches(t, u)) {
            let t = transport_triangle(&d, &track).unwrap();
            let end = replay(&t).unwrap();
            assert!(is_ascending(&end.gauss()));
            let after = detect_loop_tangle(&end, u).unwrap();
            let n = track.length();
            match track.terminal {
                Terminal::Triangle => {
                    assert_eq!(t.len(), n + 2);
                    assert_eq!(end.crossing_count() + 2, d.crossing_count());
                }
                Terminal::Loop => {
                    assert_eq!(t.len(), n + 1);
                    assert_eq!(end.crossing_count(), d.crossing_count());
                    assert!(after.c() < lt.c());
                }
                Terminal::BigPolygon(_) => {
                    assert_eq!(t.len(), n);
                    assert!(after.c() <= lt.c());
                    let polygon = track.terminal_face.as_ref().unwrap();
                    let moved = end.face_of(end.pair(track.entry.unwrap()));
                    assert_eq!(moved.sides(), 3, "transport stops next to {polygon:?}");
                }
            }
            seen.insert(match track.terminal {
                Terminal::BigPolygon(_) => 2,
                Terminal::Loop => 1,
                Terminal::Triangle => 0,
            });
        }
    }
    assert_eq!(seen.len(), 3);
}

#[test]
fn pentagon_between_triangles_becomes_a_quadrilateral() {
    let d = parse_pd(PENTAGON_PD).unwrap();
    let lt = first_loop(&d);
    let u = lt.base_crossing;
    let tri = |g: &Face| g.sides() == 3 && !g.corners().any(|c| c == u);
    let (p, side) = lt
        .interior_faces
        .iter()
        .filter(|f| f.sides() == 5 && !f.corners().any(|c| c == u))
        .find_map(|p| {
            let ds = p.darts();
            let across = |i: usize| d.face_of(d.pair(ds[i % 5]));
            (0..5).find(|i| tri(&across(i + 4)) && tri(&across(*i)) && tri(&across(i + 1))).map(|i| (p.clone(), i))
        })
        .unwrap();
    let r = resolve_pentagon(&d, &p, side).unwrap();
    assert_eq!(kinds(&r.trace), [MoveKind::RIII]);
    let end = replay(&r.trace).unwrap();
    assert_eq!(end.face_of(p.darts()[0]).sides(), 4);
    for i in [side + 4, side + 1] {
        let entry = d.pair(p.darts()[i % 5]);
        let apex = d.face_of(entry).starting_at(entry).unwrap()[2];
        assert_eq!(end.face_of(apex).sides(), 4);
    }
    // local bookkeeping: the pentagon and the faces on the middle
    // triangle's other two sides lose a side, the far-corner face gains one
    let middle = d.face_of(d.pair(p.darts()[side]));
    let lose: Vec<usize> = middle
        .darts()
        .iter()
        .map(|x| d.face_of(d.pair(*x)))
        .filter(|g| *g != p)
        .map(|g| g.sides())
        .collect();
    let mut expected = r.pentagons_before as i64 - 1;
    for n in lose {
        expected += i64::from(n == 6) - i64::from(n == 5);
    }
    expected += i64::from(r.third_vertex_sides == 4) - i64::from(r.third_vertex_sides == 5);
    assert_eq!(r.pentagons_after as i64, expected);
    assert_eq!(r.pentagons_after, end.faces().iter().filter(|f| f.sides() == 5).count());
}

#[test]
fn non_pentagon_site_is_rejected() {
    let d = parse_pd(SMALL_MINIMAL_PD).unwrap();
    let f = d.faces().into_iter().find(|f| f.sides() != 5).unwrap();
    assert!(matches!(resolve_pentagon(&d, &f, 0), Err(SimplifyError::SiteShape(_))));
}

#[test]
fn loop_detour_alone_adds_crossings_but_simplification_does_not() {
    let d = fixtures::detour_push();
    let lt = first_loop(&d);
    let plan = loop_detour_sequence(&d, &lt).unwrap();
    assert!(!is_simplification(&plan.trace).unwrap());
    let t = simplify_loop_tangle(&d, &lt).unwrap();
    assert!(is_simplification(&t).unwrap());
    let end = replay(&t).unwrap();
    assert!(!end.is_alive(lt.base_crossing));
}

#[test]
fn descending_diagrams_are_turned_around() {
    for seed in 0..20 {
        let d = run_robot_at_base(&random_knot(6, seed)).unwrap().mirrored();
        let t = simplify_ascending(&d).unwrap();
        assert_monotone_to_zero(&d, &t);
    }
}

#[test]
fn links_and_non_ascending_diagrams_are_rejected() {
    let t = serialize_pd(&fixtures::ascending_trefoil());
    let with_circle = parse_pd(&format!("loops 1\n{t}")).unwrap();
    assert!(matches!(simplify_ascending(&with_circle), Err(SimplifyError::NotAKnot(2))));
    let chain = run_robot_at_base(&fixtures::chain3()).unwrap();
    assert!(matches!(simplify_ascending(&chain), Err(SimplifyError::NotAKnot(3))));
    assert_eq!(simplify_ascending(&fixtures::trefoil()).unwrap_err(), SimplifyError::NotAscending);
}

#[test]
fn fuzzed_ascending_knots_simplify_monotonically() {
    let mut checks = 0;
    for seed in 0..150u64 {
        let raw = match seed % 3 {
            0 => random_knot(3 + (seed as usize % 13), seed),
            1 => random_braid_knot(3 + (seed as usize % 3), 6 + (seed as usize % 10), seed),
            _ => random_loop_tangle_knot(3 + (seed as usize % 3), 4 + (seed as usize % 6), 2 + (seed as usize % 8), seed),
        };
        let d = run_robot_at_base(&raw).unwrap();
        let (t, rep) = simplify_ascending_report(&d).unwrap();
        assert_monotone_to_zero(&d, &t);
        assert_eq!(rep.total_moves, t.len());
        checks += rep.minimal_checks();
    }
    assert!(checks > 0);
}

#[test]
fn disc_interiors_simplify_without_global_reduction() {
    for (d, u) in disc_states(0..60, 10) {
        let lt = detect_loop_tangle(&d, u).unwrap();
        let t = simplify_loop_tangle(&d, &lt).unwrap();
        assert!(is_simplification(&t).unwrap());
        let end = replay(&t).unwrap();
        assert!(!end.is_alive(u));
        assert!(is_ascending(&end.gauss()) || end.crossing_count() == 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn simplify_is_monotone_and_reaches_zero(seed in 0u64..1_000_000, c in 3usize..12) {
        let d = run_robot_at_base(&random_loop_tangle_knot(3, c, c / 2, seed)).unwrap();
        let t = simplify_ascending(&d).unwrap();
        prop_assert!(is_simplification(&t).unwrap());
        prop_assert_eq!(replay(&t).unwrap().crossing_count(), 0);
    }
}
