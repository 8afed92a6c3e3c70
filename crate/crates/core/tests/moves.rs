mod common;

use std::collections::BTreeSet;

use knotforge::codes::{Dart, PlanarDiagram};
use knotforge::fixtures;
use knotforge::generate::{random_growth_move, random_knot, random_link};
use knotforge::moves::{
    apply, available_moves, is_simplification, legal_moves, perform, replay, MoveKind, MoveRecord,
    MoveTrace, TraceBuilder,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{bracket, normalized_bracket, writhe};

fn face_with_corners(d: &PlanarDiagram, sides: usize, corners: &BTreeSet<usize>) -> Vec<Vec<Dart>> {
    d.faces()
        .into_iter()
        .filter(|f| f.sides() == sides && f.corners().collect::<BTreeSet<_>>() == *corners)
        .map(|f| f.darts().to_vec())
        .collect()
}

#[test]
fn random_moves_keep_diagrams_valid_and_invariant() {
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = random_knot(5, seed);
        let inv = normalized_bracket(&d);
        for _ in 0..6 {
            let m = random_growth_move(&d, &mut rng);
            let before = d.clone();
            let r = perform(&mut d, m).unwrap();
            assert!(d.validate().is_empty(), "seed {seed} {:?}: {:?}", r.kind, d.validate());
            assert_eq!(normalized_bracket(&d), inv, "seed {seed} after {:?}", r.kind);
            match r.kind {
                MoveKind::RIII | MoveKind::RIIAdd => assert_eq!(bracket(&d), bracket(&before)),
                _ => {}
            }
            if d.crossing_count() > 11 {
                break;
            }
        }
    }
}

#[test]
fn riii_preserves_signs_and_is_an_involution() {
    let mut checked = 0;
    for seed in 0..60 {
        let d = random_knot(8, seed);
        for m in legal_moves(&d).into_iter().filter(|m| m.kind == MoveKind::RIII) {
            let e = apply(&d, &m).unwrap();
            assert_eq!(writhe(&e), writhe(&d));
            let corners: BTreeSet<usize> = m.site.iter().map(|x| x.crossing()).collect();
            let back = face_with_corners(&e, 3, &corners)
                .into_iter()
                .filter_map(|site| apply(&e, &MoveRecord { crossings_after: e.crossing_count(), ..MoveRecord::new(MoveKind::RIII, site) }).ok())
                .any(|f| f.canonical() == d.canonical());
            assert!(back, "seed {seed}: RIII has no inverse RIII");
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn rii_add_then_remove_is_identity() {
    for seed in 0..30 {
        let d = random_knot(6, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let m = random_growth_move(&d, &mut rng);
            if m.kind != MoveKind::RIIAdd {
                continue;
            }
            let mut e = d.clone();
            perform(&mut e, m).unwrap();
            let n = d.capacity();
            let corners = BTreeSet::from([n, n + 1]);
            let bigons = face_with_corners(&e, 2, &corners);
            assert!(!bigons.is_empty());
            let undone = bigons.into_iter().any(|site| {
                let mut f = e.clone();
                perform(&mut f, MoveRecord::new(MoveKind::RIIRemove, site)).is_ok()
                    && f.canonical() == d.canonical()
            });
            assert!(undone, "seed {seed}");
        }
    }
}

#[test]
fn ri_add_then_remove_is_identity() {
    for seed in 0..20 {
        let d = random_knot(4, seed);
        for x in d.darts().take(6).collect::<Vec<_>>() {
            for variant in 0..2 {
                let mut e = d.clone();
                perform(&mut e, MoveRecord::new(MoveKind::RIAdd, vec![x]).with_variant(variant)).unwrap();
                assert_eq!((writhe(&e) - writhe(&d)).abs(), 1);
                let c = d.capacity();
                let kink: Vec<_> = e.faces().into_iter().filter(|f| f.sides() == 1 && f.min_crossing() == c).collect();
                assert_eq!(kink.len(), 1);
                perform(&mut e, MoveRecord::new(MoveKind::RIRemove, kink[0].darts().to_vec())).unwrap();
                assert_eq!(e.canonical(), d.canonical());
            }
        }
    }
}

#[test]
fn ri_remove_on_kink_drops_a_crossing() {
    let d = fixtures::kink();
    let site = d.faces().into_iter().find(|f| f.sides() == 1).unwrap();
    let e = apply(&d, &MoveRecord { crossings_after: 0, ..MoveRecord::new(MoveKind::RIRemove, site.darts().to_vec()) }).unwrap();
    assert_eq!(e.crossing_count(), 0);
    assert_eq!(e.free_loops(), 1);
    assert!(e.basepoint().is_none());
}

#[test]
fn links_stay_valid() {
    for seed in 0..20 {
        let mut d = random_link(3, 6, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inv = normalized_bracket(&d);
        for _ in 0..4 {
            let m = random_growth_move(&d, &mut rng);
            perform(&mut d, m).unwrap();
            assert!(d.validate().is_empty());
            assert_eq!(d.component_count(), 3);
            assert_eq!(normalized_bracket(&d), inv);
        }
    }
}

#[test]
fn removals_preserve_the_invariant() {
    for seed in 0..40 {
        let d = random_knot(7, seed);
        let inv = normalized_bracket(&d);
        for m in legal_moves(&d) {
            if m.kind == MoveKind::RIII {
                continue;
            }
            let e = apply(&d, &m).unwrap();
            assert!(e.validate().is_empty());
            assert_eq!(normalized_bracket(&e), inv, "seed {seed} {:?}", m.kind);
        }
    }
}

#[test]
fn zero_crossing_unknot_has_no_moves() {
    assert!(available_moves(&PlanarDiagram::unknot()).is_empty());
}

#[test]
fn ascending_trefoil_has_moves() {
    let d = fixtures::ascending_trefoil();
    assert!(!legal_moves(&d).is_empty());
}

#[test]
fn replay_reports_first_failure() {
    let d = fixtures::kink();
    let site = d.faces().into_iter().find(|f| f.sides() == 1).unwrap().darts().to_vec();
    let mut t = MoveTrace::new(d.clone());
    assert_eq!(replay(&t).unwrap(), d);
    t.records.push(MoveRecord { crossings_after: 0, ..MoveRecord::new(MoveKind::RIRemove, site.clone()) });
    t.records.push(MoveRecord { crossings_after: 0, ..MoveRecord::new(MoveKind::RIRemove, site) });
    assert_eq!(replay(&t).unwrap_err().index, 1);
    let mut bad = t.clone();
    bad.records.truncate(1);
    bad.records[0].kind = MoveKind::RIII;
    assert_eq!(replay(&bad).unwrap_err().index, 0);
}

#[test]
fn simplification_predicate() {
    let d = random_knot(4, 3);
    let mut b = TraceBuilder::new(d.clone());
    let x = d.darts().next().unwrap();
    b.push(MoveRecord::new(MoveKind::RIAdd, vec![x])).unwrap();
    let (t, _) = b.finish();
    assert!(!is_simplification(&t).unwrap());
    assert!(is_simplification(&MoveTrace::new(d)).unwrap());
}

#[test]
fn trace_json_round_trip() {
    let d = random_knot(5, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut b = TraceBuilder::new(d);
    for _ in 0..4 {
        let m = random_growth_move(b.current(), &mut rng);
        b.push(m).unwrap();
    }
    let (t, end) = b.finish();
    let text = serde_json::to_string(&t.to_json()).unwrap();
    let back = MoveTrace::parse_json(&text).unwrap();
    assert_eq!(back, t);
    assert_eq!(replay(&back).unwrap(), end);
}
