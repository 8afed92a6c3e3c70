//! Reidemeister traces as graphical moves on checkerboard graphs.
//!
//! Each move changes the graph according to the colour of the face it
//! acts on:
//!
//! | move   | black face                 | white face             |
//! |--------|----------------------------|------------------------|
//! | RI     | contract a pendant edge    | delete a loop          |
//! | RII    | contract two series edges  | delete two parallel edges |
//! | RIII   | star to triangle           | triangle to star       |
//!
//! Star and triangle exchanges negate the three signs. A moved crossing
//! now joins the two far vertices it did not touch before.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::graph::{checkerboard, graph_with_colouring, medial, medial_colouring, GraphError, Shading, SignedEdge, SignedPlaneGraph};
use crate::codes::Direction;
use crate::moves::{perform, MoveError, MoveKind, MoveTrace};
use crate::robot::{default_link_order, is_ascending, is_descending, run_robot_at_base, run_robot_link, RobotError};
use crate::simplify::{simplify_ascending, SimplifyError};

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Robot(#[from] RobotError),
    #[error(transparent)]
    Simplify(#[from] SimplifyError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("the medial diagram has {0} components; reduction needs a knot")]
    NotAKnot(usize),
    #[error("the signs do not give an ascending or descending diagram from any basepoint")]
    NotUnlinkSigned,
    #[error("record {index}: {kind} has no graphical translation here")]
    Untranslatable { index: usize, kind: MoveKind },
    #[error("graph move {index}: {msg}")]
    Replay { index: usize, msg: String },
    #[error("record {index}: replayed graph differs from the graph of the diagram")]
    Mismatch { index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMoveKind {
    DeleteLoop,
    ContractPendant,
    DeleteParallelPair,
    ContractSeriesPair,
    StarToTriangle,
    TriangleToStar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphMove {
    pub kind: GraphMoveKind,
    pub edges: Vec<usize>,
    pub edges_after: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphReduction {
    /// The graph the moves start from.
    pub graph: SignedPlaneGraph,
    /// The Reidemeister trace on the medial diagram.
    #[serde(skip)]
    pub trace: MoveTrace,
    pub moves: Vec<GraphMove>,
    /// Edge count before the first move and after each move.
    pub edge_counts: Vec<usize>,
    /// The graph left at the end.
    pub result: SignedPlaneGraph,
}

fn replay_err(index: usize, msg: impl Into<String>) -> ReduceError {
    ReduceError::Replay { index, msg: msg.into() }
}

fn edge(g: &SignedPlaneGraph, index: usize, id: usize) -> Result<SignedEdge, ReduceError> {
    g.edges.get(&id).copied().ok_or_else(|| replay_err(index, format!("edge {id} does not exist")))
}

fn other_end(e: &SignedEdge, v: usize) -> usize {
    if e.ends[0] == v {
        e.ends[1]
    } else {
        e.ends[0]
    }
}

/// Renames vertex `from` to `to` in every edge and drops it.
fn merge(g: &mut SignedPlaneGraph, from: usize, to: usize) {
    if from == to {
        return;
    }
    for e in g.edges.values_mut() {
        for v in e.ends.iter_mut() {
            if *v == from {
                *v = to;
            }
        }
    }
    g.vertices.remove(&from);
}

/// Applies one graphical move as plain graph rewriting. The rotation
/// system is dropped.
pub fn apply_graph_move(g: &mut SignedPlaneGraph, m: &GraphMove, index: usize) -> Result<(), ReduceError> {
    g.rotation = None;
    let es: Vec<SignedEdge> = m.edges.iter().map(|id| edge(g, index, *id)).collect::<Result<_, _>>()?;
    match (m.kind, es.as_slice()) {
        (GraphMoveKind::DeleteLoop, [e]) => {
            if e.ends[0] != e.ends[1] {
                return Err(replay_err(index, "edge is not a loop"));
            }
            g.edges.remove(&e.id);
        }
        (GraphMoveKind::ContractPendant, [e]) => {
            let leaf = e.ends.into_iter().find(|v| g.degree(*v) == 1);
            let Some(leaf) = leaf.filter(|_| e.ends[0] != e.ends[1]) else {
                return Err(replay_err(index, "edge has no end of degree 1"));
            };
            g.edges.remove(&e.id);
            g.vertices.remove(&leaf);
        }
        (GraphMoveKind::DeleteParallelPair, [e, f]) => {
            let (mut a, mut b) = (e.ends, f.ends);
            a.sort_unstable();
            b.sort_unstable();
            if a != b || e.sign == f.sign {
                return Err(replay_err(index, "edges are not parallel with opposite signs"));
            }
            g.edges.remove(&e.id);
            g.edges.remove(&f.id);
        }
        (GraphMoveKind::ContractSeriesPair, [e, f]) => {
            let mid = e
                .ends
                .into_iter()
                .find(|v| f.ends.contains(v) && g.degree(*v) == 2 && e.ends[0] != e.ends[1] && f.ends[0] != f.ends[1]);
            let Some(mid) = mid.filter(|_| e.sign != f.sign) else {
                return Err(replay_err(index, "edges are not in series with opposite signs"));
            };
            let (p, q) = (other_end(e, mid), other_end(f, mid));
            g.edges.remove(&e.id);
            g.edges.remove(&f.id);
            merge(g, mid, p);
            merge(g, q, p);
        }
        (GraphMoveKind::StarToTriangle, [x, y, z]) => {
            let centre = x
                .ends
                .into_iter()
                .find(|v| [y, z].iter().all(|e| e.ends.contains(v)) && g.degree(*v) == 3);
            let Some(c) = centre.filter(|_| es.iter().all(|e| e.ends[0] != e.ends[1])) else {
                return Err(replay_err(index, "edges do not form a star"));
            };
            let far: Vec<usize> = es.iter().map(|e| other_end(e, c)).collect();
            for (i, e) in es.iter().enumerate() {
                let ends = [far[(i + 1) % 3], far[(i + 2) % 3]];
                g.edges.insert(e.id, SignedEdge { id: e.id, ends, sign: -e.sign });
            }
            g.vertices.remove(&c);
        }
        (GraphMoveKind::TriangleToStar, [x, y, z]) => {
            // Ends of the other two edges, less this edge's ends, leave its
            // opposite vertex twice. Repeated vertices are allowed.
            let tri = [x, y, z];
            let mut opp = Vec::new();
            for (i, e) in tri.iter().enumerate() {
                let mut rest: Vec<usize> = [tri[(i + 1) % 3], tri[(i + 2) % 3]].iter().flat_map(|f| f.ends).collect();
                for v in e.ends {
                    match rest.iter().position(|w| *w == v) {
                        Some(p) => {
                            rest.swap_remove(p);
                        }
                        None => return Err(replay_err(index, "edges do not form a triangle")),
                    }
                }
                if rest[0] != rest[1] {
                    return Err(replay_err(index, "edges do not form a triangle"));
                }
                opp.push(rest[0]);
            }
            let c = g.vertices.iter().next_back().map_or(0, |v| v + 1);
            g.vertices.insert(c);
            for (e, o) in tri.iter().zip(opp) {
                g.edges.insert(e.id, SignedEdge { id: e.id, ends: [c, o], sign: -e.sign });
            }
        }
        _ => return Err(replay_err(index, "wrong number of edges")),
    }
    if g.edges.len() != m.edges_after {
        return Err(replay_err(index, "edge count differs from the record"));
    }
    Ok(())
}

/// Replays graphical moves from `g` and returns every intermediate graph,
/// starting with `g` itself.
pub fn replay_graph_moves(g: &SignedPlaneGraph, moves: &[GraphMove]) -> Result<Vec<SignedPlaneGraph>, ReduceError> {
    let mut cur = g.clone();
    cur.rotation = None;
    let mut out = vec![cur.clone()];
    for (i, m) in moves.iter().enumerate() {
        apply_graph_move(&mut cur, m, i)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Translates a crossing-removing or RIII trace into graphical moves on
/// the graph of `black` corners of its initial diagram. After every move
/// the replayed graph is compared with the graph of the new diagram,
/// whose colouring is fixed by a corner away from the move.
pub fn translate_trace(trace: &MoveTrace, black: &[bool]) -> Result<Vec<GraphMove>, ReduceError> {
    let mut d = trace.initial.clone();
    let mut black = black.to_vec();
    let mut g = graph_with_colouring(&d, &black);
    g.rotation = None;
    let mut moves = Vec::new();
    for (index, r) in trace.records.iter().enumerate() {
        let f = match r.site.first() {
            Some(x) if d.is_alive(x.crossing()) => d.face_of(*x),
            _ => return Err(ReduceError::Untranslatable { index, kind: r.kind }),
        };
        let dark = black[f.darts()[0].0];
        let kind = match (r.kind, dark) {
            (MoveKind::RIRemove, true) => GraphMoveKind::ContractPendant,
            (MoveKind::RIRemove, false) => GraphMoveKind::DeleteLoop,
            (MoveKind::RIIRemove, true) => GraphMoveKind::ContractSeriesPair,
            (MoveKind::RIIRemove, false) => GraphMoveKind::DeleteParallelPair,
            (MoveKind::RIII, true) => GraphMoveKind::StarToTriangle,
            (MoveKind::RIII, false) => GraphMoveKind::TriangleToStar,
            (kind, _) => return Err(ReduceError::Untranslatable { index, kind }),
        };
        let involved: BTreeSet<usize> = f.corners().collect();
        let mut next = d.clone();
        let done = perform(&mut next, r.clone())?;
        let m = GraphMove { kind, edges: involved.iter().copied().collect(), edges_after: done.crossings_after };
        let mut expected = g.clone();
        apply_graph_move(&mut expected, &m, index)?;
        let anchor = d.darts().find(|x| !involved.contains(&x.crossing()) && next.is_alive(x.crossing()));
        let options = [checkerboard(&next, Shading::Black)?, checkerboard(&next, Shading::White)?];
        let chosen = match anchor {
            Some(a) => options.into_iter().find(|o| o[a.0] == black[a.0]),
            None => options.into_iter().find(|o| {
                let mut h = graph_with_colouring(&next, o);
                h.rotation = None;
                h.same_shape(&expected)
            }),
        };
        let Some(chosen) = chosen else { return Err(ReduceError::Mismatch { index }) };
        let mut h = graph_with_colouring(&next, &chosen);
        h.rotation = None;
        if !h.same_shape(&expected) {
            return Err(ReduceError::Mismatch { index });
        }
        moves.push(m);
        d = next;
        black = chosen;
        g = expected;
    }
    Ok(moves)
}

/// Re-signs `g` so its medial diagram is a diagram of an unlink: the
/// robot runs on a knot, and the link robot stacks the components of a
/// link. Edge ids are kept.
pub fn assign_unlink_signs(g: &SignedPlaneGraph) -> Result<SignedPlaneGraph, ReduceError> {
    let d = medial(g)?;
    if d.crossing_count() == 0 {
        return Ok(g.clone());
    }
    let out = if d.component_count() == 1 {
        run_robot_at_base(&d)?
    } else {
        run_robot_link(&d, &default_link_order(&d))?
    };
    Ok(with_ids(g, graph_with_colouring(&out, &medial_colouring(&out))))
}

/// Puts the edge ids of `g` back on a graph of its medial diagram, whose
/// crossings are numbered by position. The rotation is the original one,
/// so only signs are taken from `h`.
fn with_ids(g: &SignedPlaneGraph, h: SignedPlaneGraph) -> SignedPlaneGraph {
    let ids: Vec<usize> = g.edges.keys().copied().collect();
    let mut out = g.clone();
    for (i, e) in h.edges.values().enumerate() {
        debug_assert_eq!(e.id, i);
        out.edges.get_mut(&ids[i]).expect("same edge count").sign = e.sign;
    }
    out
}

/// Reduces a graph whose medial diagram is an ascending or descending
/// knot diagram (from some basepoint) to isolated points. The medial
/// diagram is simplified without adding crossings, and each record
/// becomes one graphical move. Edge ids in the moves are those of `g`.
pub fn reduce_graph_to_points(g: &SignedPlaneGraph) -> Result<GraphReduction, ReduceError> {
    let d = medial(g)?;
    let comps = d.component_count();
    if d.crossing_count() > 0 && comps != 1 {
        return Err(ReduceError::NotAKnot(comps));
    }
    let start = match d.basepoint() {
        None => d.clone(),
        Some(b) => d
            .walk(b.dart)
            .into_iter()
            .map(|x| d.clone().with_basepoint(x, Direction::Forward))
            .find(|v| {
                let code = v.gauss();
                is_ascending(&code) || is_descending(&code)
            })
            .ok_or(ReduceError::NotUnlinkSigned)?,
    };
    let trace = if start.crossing_count() == 0 {
        MoveTrace { initial: start, records: Vec::new() }
    } else {
        simplify_ascending(&start)?
    };
    let black = medial_colouring(&trace.initial);
    let mut moves = translate_trace(&trace, &black)?;
    let ids: Vec<usize> = g.edges.keys().copied().collect();
    for m in moves.iter_mut() {
        for e in m.edges.iter_mut() {
            *e = ids[*e];
        }
    }
    let graphs = replay_graph_moves(g, &moves)?;
    let edge_counts = graphs.iter().map(|h| h.edge_count()).collect();
    let result = graphs.last().cloned().expect("at least the start");
    Ok(GraphReduction { graph: g.clone(), trace, moves, edge_counts, result })
}
