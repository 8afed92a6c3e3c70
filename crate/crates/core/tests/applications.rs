mod common;

use std::collections::{BTreeMap, HashMap, VecDeque};

use knotforge::applications::*;
use knotforge::codes::{parse_pd, Basepoint, Dart, Direction, PlanarDiagram};
use knotforge::fixtures;
use knotforge::generate::{random_knot, random_link, random_loop_tangle_knot};
use knotforge::moves::{legal_moves, perform, replay, MoveKind, MoveRecord, MoveTrace};
use knotforge::robot::{default_link_order, run_robot_at_base, run_robot_link};
use proptest::prelude::*;

fn figure_eight_at(edge: u32) -> PlanarDiagram {
    parse_pd(&format!("base {edge} fwd\n{}", fixtures::FIGURE_EIGHT_PD)).unwrap()
}

/// A crossing-preserving isomorphism of the two maps, grown from one
/// crossing by following edges. Tries both handednesses and every
/// rotation of the first crossing; passes must agree as well.
fn maps_isomorphic(a: &PlanarDiagram, b: &PlanarDiagram) -> bool {
    let ca: Vec<usize> = a.crossings().collect();
    let Some(&c0) = ca.first() else { return b.crossing_count() == 0 };
    if ca.len() != b.crossing_count() {
        return false;
    }
    let Some(b0) = b.crossings().next() else { return false };
    for mirror in [false, true] {
        for rot in 0..4 {
            let place = |x: Dart, y0: usize, k: usize| -> Dart {
                let s = if mirror { (k + 4 - x.slot()) % 4 } else { (x.slot() + k) % 4 };
                Dart::new(y0, s)
            };
            let mut phi: HashMap<usize, (usize, usize)> = HashMap::from([(c0, (b0, rot))]);
            let mut queue = VecDeque::from([c0]);
            let mut ok = true;
            while let Some(c) = queue.pop_front() {
                let (y, k) = phi[&c];
                for s in 0..4 {
                    let x = Dart::new(c, s);
                    let fx = place(x, y, k);
                    if a.pass_at(x) != b.pass_at(fx) {
                        ok = false;
                    }
                    let (px, pfx) = (a.pair(x), b.pair(fx));
                    let want_k = if mirror { (pfx.slot() + px.slot()) % 4 } else { (pfx.slot() + 4 - px.slot()) % 4 };
                    match phi.get(&px.crossing()) {
                        Some(&(yy, kk)) => ok &= yy == pfx.crossing() && kk == want_k,
                        None => {
                            phi.insert(px.crossing(), (pfx.crossing(), want_k));
                            queue.push_back(px.crossing());
                        }
                    }
                }
                if !ok {
                    break;
                }
            }
            let images: std::collections::BTreeSet<usize> = phi.values().map(|v| v.0).collect();
            if ok && phi.len() == ca.len() && images.len() == ca.len() {
                return true;
            }
        }
    }
    false
}

fn strip(mut g: SignedPlaneGraph) -> SignedPlaneGraph {
    g.rotation = None;
    g
}

#[test]
fn isomorphism_oracle_sees_passes() {
    let d = fixtures::figure_eight();
    assert!(maps_isomorphic(&d, &d.canonical()));
    assert!(!maps_isomorphic(&d, &run_robot_at_base(&d).unwrap()));
    assert!(!maps_isomorphic(&d, &fixtures::trefoil()));
}

#[test]
fn writhe_examples() {
    assert_eq!(writhe(&fixtures::figure_eight()), 0);
    assert_eq!(writhe(&PlanarDiagram::unknot()), 0);
    assert_eq!(writhe(&fixtures::trefoil()).abs(), 3);
}

#[test]
fn figure_eight_framing_changes_with_basepoint() {
    let on_two = figure_eight_at(2);
    let w = robot_writhe_parity(&on_two, on_two.basepoint().unwrap()).unwrap();
    assert_eq!((w.before, w.after), (0, 0));
    let on_one = figure_eight_at(1);
    let w = robot_writhe_parity(&on_one, on_one.basepoint().unwrap()).unwrap();
    assert_eq!((w.before, w.after), (0, -2));
    let all: Vec<i32> = writhe_by_basepoint(&on_one).unwrap().into_iter().map(|x| x.1).collect();
    assert_eq!(all.len(), 16);
    assert!(all.contains(&0) && all.contains(&-2));
}

#[test]
fn no_bigons_on_the_unknot() {
    assert!(find_hooked_juxtapositions(&PlanarDiagram::unknot()).is_empty());
}

#[test]
fn reidemeister_two_bigon_is_not_hooked() {
    let mut d = fixtures::kink();
    let f = d.faces().into_iter().find(|f| f.sides() == 2).unwrap();
    let cap = d.capacity();
    perform(&mut d, MoveRecord::new(MoveKind::RIIAdd, f.darts().to_vec())).unwrap();
    let fresh: Vec<Bigon> = bigons(&d).into_iter().filter(|b| b.crossings.iter().all(|c| *c >= cap)).collect();
    assert!(!fresh.is_empty());
    assert!(fresh.iter().all(|b| !b.is_hooked(&d)));
}

#[test]
fn trefoil_bigons_are_hooked_and_the_robot_removes_them_from_outside() {
    let d = fixtures::trefoil();
    assert_eq!(find_hooked_juxtapositions(&d).len(), 3);
    let effects = robot_hooked_effect(&d, d.basepoint().unwrap()).unwrap();
    let outside: Vec<_> = effects.iter().filter(|e| !e.basepoint_inside).collect();
    assert!(!outside.is_empty());
    assert!(outside.iter().all(|e| e.removed));
}

#[test]
fn inside_basepoints_can_keep_or_create_hooks() {
    let mut kept = 0;
    let mut created = 0;
    let corpus = [fixtures::trefoil(), fixtures::figure_eight()].into_iter().chain((0..40).map(|s| random_knot(6, s)));
    for d in corpus {
        for (base, _) in writhe_by_basepoint(&d).unwrap() {
            for e in robot_hooked_effect(&d, base).unwrap() {
                if e.basepoint_inside {
                    kept += (e.hooked_before && e.hooked_after) as usize;
                    created += e.created as usize;
                }
            }
        }
    }
    assert!(kept > 0 && created > 0, "kept {kept} created {created}");
}

#[test]
fn hopf_link_hooks_are_removed_by_the_link_robot() {
    let d = fixtures::hopf();
    assert!(!inter_component_hooked(&d).is_empty());
    assert!(link_hooked_removal(&d, &default_link_order(&d)).unwrap());
    let split = fixtures::split_kinks();
    assert!(link_hooked_removal(&split, &default_link_order(&split)).unwrap());
}

#[test]
fn trefoil_graphs() {
    let d = fixtures::trefoil();
    let black = to_signed_graph(&d, Shading::Black).unwrap();
    assert_eq!(black.vertex_count(), 2);
    assert_eq!(black.edge_count(), 3);
    let signs: Vec<i8> = black.edges.values().map(|e| e.sign).collect();
    assert!(signs.iter().all(|s| *s == signs[0]));
    let ends: Vec<[usize; 2]> = black.edges.values().map(|e| {
        let mut x = e.ends;
        x.sort();
        x
    }).collect();
    assert!(ends.iter().all(|x| *x == [0, 1]));
    let white = to_signed_graph(&d, Shading::White).unwrap();
    assert_eq!(white.vertex_count(), 3);
    assert!(white.edges.values().all(|e| e.sign == -signs[0]));
    assert!(black.dual().unwrap().same_shape(&strip(white)));
}

#[test]
fn unknot_graph_is_a_point() {
    let g = to_signed_graph(&PlanarDiagram::unknot(), Shading::Black).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
    assert_eq!(medial(&g).unwrap().free_loops(), 1);
}

#[test]
fn split_diagram_has_no_graph() {
    assert_eq!(to_signed_graph(&fixtures::split_kinks(), Shading::Black), Err(GraphError::Disconnected));
}

#[test]
fn signed_graph_text() {
    let g = to_signed_graph(&fixtures::figure_eight(), Shading::Black).unwrap();
    let text = g.to_string();
    assert_eq!(parse_signed_graph(&text).unwrap(), g);
    let plain = parse_signed_graph("# two points joined twice\nv 3\nv 7\ne 10 3 7 -\ne 11 7 3\n").unwrap();
    assert_eq!(plain.edges[&11].sign, 1);
    assert!(plain.rotation.is_none());
    assert_eq!(medial(&plain), Err(GraphError::NoRotation));
    for bad in ["v x\n", "e 1 0 0 +\n", "v 0\ne 1 0 0 *\n", "v 0\nv 0\n", "v 0\ne 1 0 0\nr 0 1.0\n", "q\n", "v 0\ne 1 0 0\nr 0 1.0 1.2\n"] {
        assert!(parse_signed_graph(bad).is_err(), "{bad:?}");
    }
}

#[test]
fn single_loop_edge_reduces_in_one_move() {
    let g = parse_signed_graph("v 0\ne 5 0 0 +\nr 0 5.0 5.1\n").unwrap();
    let r = reduce_graph_to_points(&g).unwrap();
    assert_eq!(r.moves.len(), 1);
    assert_eq!(r.moves[0].edges, vec![5]);
    assert_eq!(r.result.edge_count(), 0);
}

fn check_reduction(g: &SignedPlaneGraph) -> GraphReduction {
    let r = reduce_graph_to_points(g).unwrap();
    assert_eq!(r.result.edge_count(), 0);
    assert_eq!(r.moves.len(), r.trace.records.len());
    let mut counts = vec![r.trace.initial.crossing_count()];
    counts.extend(r.trace.records.iter().map(|m| m.crossings_after));
    assert_eq!(r.edge_counts, counts);
    assert_eq!(replay(&r.trace).unwrap().crossing_count(), 0);
    r
}

#[test]
fn trefoil_and_figure_eight_graphs_reduce_to_points() {
    for d in [fixtures::trefoil(), fixtures::figure_eight()] {
        let g = assign_unlink_signs(&to_signed_graph(&d, Shading::Black).unwrap()).unwrap();
        let r = check_reduction(&g);
        let c = d.crossing_count();
        assert!(r.moves.len() <= (7 * c + 1) * c);
        assert_eq!(r.result.vertex_count(), 1);
    }
}

#[test]
fn triple_edge_reduces_by_series_and_parallel_moves() {
    let g = parse_signed_graph("v 0\nv 1\ne 0 0 1 -\ne 1 0 1 -\ne 2 0 1 -\nr 0 0.0 1.0 2.0\nr 1 0.1 2.1 1.1\n").unwrap();
    let r = check_reduction(&assign_unlink_signs(&g).unwrap());
    assert!(r.moves.iter().all(|m| matches!(
        m.kind,
        GraphMoveKind::DeleteParallelPair | GraphMoveKind::ContractSeriesPair | GraphMoveKind::DeleteLoop | GraphMoveKind::ContractPendant
    )));
}

#[test]
fn alternating_signs_are_not_an_unlink() {
    let g = to_signed_graph(&fixtures::trefoil(), Shading::Black).unwrap();
    assert!(matches!(reduce_graph_to_points(&g), Err(ReduceError::NotUnlinkSigned)));
}

#[test]
fn link_graphs_are_not_reduced() {
    let g = to_signed_graph(&fixtures::hopf(), Shading::Black).unwrap();
    assert!(matches!(reduce_graph_to_points(&assign_unlink_signs(&g).unwrap()), Err(ReduceError::NotAKnot(2))));
}

#[test]
fn star_triangle_moves_follow_the_diagram() {
    use rand::{Rng, SeedableRng};
    let mut riii = 0;
    for seed in 0..120u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let start = random_knot(4 + (seed % 10) as usize, seed);
        let mut d = start.clone();
        let mut records = Vec::new();
        for _ in 0..25 {
            let ms = legal_moves(&d);
            if ms.is_empty() {
                break;
            }
            let m = ms[rng.gen_range(0..ms.len())].clone();
            riii += (m.kind == MoveKind::RIII) as usize;
            records.push(perform(&mut d, m).unwrap());
        }
        let trace = MoveTrace { initial: start.clone(), records };
        let black = checkerboard(&start, Shading::Black).unwrap();
        let moves = translate_trace(&trace, &black).unwrap();
        let graphs = replay_graph_moves(&graph_with_colouring(&start, &black), &moves).unwrap();
        assert_eq!(graphs.len(), trace.records.len() + 1);
    }
    assert!(riii > 100, "{riii}");
}

#[test]
fn additions_have_no_translation() {
    let d = fixtures::trefoil();
    let mut e = d.clone();
    let f = d.faces().into_iter().find(|f| f.sides() == 3).unwrap();
    let r = perform(&mut e, MoveRecord::new(MoveKind::RIIAdd, vec![f.darts()[0], f.darts()[1]]).with_over(true)).unwrap();
    let trace = MoveTrace { initial: d.clone(), records: vec![r] };
    let black = checkerboard(&d, Shading::Black).unwrap();
    assert!(matches!(translate_trace(&trace, &black), Err(ReduceError::Untranslatable { index: 0, .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn robot_changes_writhe_by_an_even_amount(n in 1usize..16, seed in any::<u64>(), k in any::<usize>()) {
        let d = random_knot(n, seed);
        let walk = d.walk(d.basepoint().unwrap().dart);
        let base = Basepoint { dart: walk[k % walk.len()], direction: Direction::Forward };
        let w = robot_writhe_parity(&d, base).unwrap();
        prop_assert_eq!((w.after - w.before).rem_euclid(2), 0);
    }

    #[test]
    fn robot_removes_hooks_when_started_outside(n in 2usize..14, seed in any::<u64>(), k in any::<usize>()) {
        let d = random_knot(n, seed);
        let walk = d.walk(d.basepoint().unwrap().dart);
        let base = Basepoint { dart: walk[k % walk.len()], direction: Direction::Forward };
        for e in robot_hooked_effect(&d, base).unwrap() {
            if !e.basepoint_inside {
                prop_assert!(!e.hooked_after);
            }
        }
    }

    #[test]
    fn link_robot_leaves_no_hook_between_components(comps in 2usize..4, n in 2usize..12, seed in any::<u64>()) {
        let d = random_link(comps, n, seed);
        let out = run_robot_link(&d, &default_link_order(&d)).unwrap();
        prop_assert!(inter_component_hooked(&out).is_empty());
    }

    #[test]
    fn medial_rebuilds_the_map(n in 1usize..16, seed in any::<u64>(), white in any::<bool>()) {
        let d = random_knot(n, seed);
        let shading = if white { Shading::White } else { Shading::Black };
        let g = to_signed_graph(&d, shading).unwrap();
        prop_assert_eq!(g.edge_count(), d.crossing_count());
        prop_assert_eq!(g.vertex_count() + to_signed_graph(&d, if white { Shading::Black } else { Shading::White }).unwrap().vertex_count(), d.faces().len());
        let m = medial(&g).unwrap();
        prop_assert!(maps_isomorphic(&d, &m));
        let back = graph_with_colouring(&m, &medial_colouring(&m));
        let ids: Vec<usize> = g.edges.keys().copied().collect();
        let renamed: BTreeMap<usize, SignedEdge> = back.edges.values().map(|e| (ids[e.id], SignedEdge { id: ids[e.id], ..*e })).collect();
        let rebuilt = SignedPlaneGraph { vertices: back.vertices.clone(), edges: renamed, rotation: None };
        prop_assert!(rebuilt.same_shape(&strip(g.clone())));
        let other = strip(to_signed_graph(&d, if white { Shading::Black } else { Shading::White }).unwrap());
        prop_assert!(g.dual().unwrap().same_shape(&other));
        prop_assert_eq!(parse_signed_graph(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn unlink_signed_graphs_reduce_to_points(n in 1usize..10, seed in any::<u64>(), tangle in any::<bool>()) {
        let d = if tangle { random_loop_tangle_knot(3, 4 + n, 2 + n, seed) } else { random_knot(n, seed) };
        let g = assign_unlink_signs(&to_signed_graph(&d, Shading::Black).unwrap()).unwrap();
        check_reduction(&g);
        let asc = run_robot_at_base(&d).unwrap();
        prop_assert_eq!(common::writhe(&asc).rem_euclid(2), writhe(&d).rem_euclid(2));
    }
}
