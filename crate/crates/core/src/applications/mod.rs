//! Writhe and framing under the robot, hooked juxtapositions, and signed
//! checkerboard graphs with their reduction to points.

mod graph;
mod reduce;

use serde::Serialize;

use crate::codes::{Basepoint, ComponentId, CrossingId, Dart, Direction, PlanarDiagram};
use crate::robot::{run_robot_diagram, run_robot_link, RobotError};

pub use graph::{
    checkerboard, graph_with_colouring, medial, medial_colouring, parse_signed_graph,
    to_signed_graph, GraphError, HalfEdge, Shading, SignedEdge, SignedPlaneGraph,
};
pub use reduce::{
    apply_graph_move, assign_unlink_signs, reduce_graph_to_points, replay_graph_moves, translate_trace,
    GraphMove, GraphMoveKind, GraphReduction, ReduceError,
};

/// Sum of the crossing signs.
pub fn writhe(d: &PlanarDiagram) -> i32 {
    d.crossings().map(|c| d.sign(c)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WritheChange {
    pub before: i32,
    pub after: i32,
}

/// Writhe before and after the robot. Each switched crossing changes the
/// writhe by two, so the difference is always even.
pub fn robot_writhe_parity(d: &PlanarDiagram, base: Basepoint) -> Result<WritheChange, RobotError> {
    let after = writhe(&run_robot_diagram(d, base)?);
    let w = WritheChange { before: writhe(d), after };
    assert_eq!((w.after - w.before).rem_euclid(2), 0, "robot changed the writhe by an odd amount");
    Ok(w)
}

/// A 2-gon face given by its two face darts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bigon {
    pub darts: [Dart; 2],
    pub crossings: [CrossingId; 2],
}

impl Bigon {
    pub fn is_hooked(&self, d: &PlanarDiagram) -> bool {
        d.sign(self.crossings[0]) == d.sign(self.crossings[1])
    }

    /// True when the dart lies on one of the two sides.
    pub fn has_on_side(&self, d: &PlanarDiagram, x: Dart) -> bool {
        self.darts.iter().any(|s| *s == x || d.pair(*s) == x)
    }
}

/// Every 2-gon face with two distinct crossings.
pub fn bigons(d: &PlanarDiagram) -> Vec<Bigon> {
    d.faces()
        .into_iter()
        .filter(|f| f.sides() == 2)
        .map(|f| {
            let ds = f.darts();
            Bigon { darts: [ds[0], ds[1]], crossings: [ds[0].crossing(), ds[1].crossing()] }
        })
        .filter(|b| b.crossings[0] != b.crossings[1])
        .collect()
}

/// Bigons whose two crossings have the same sign. On the sphere every
/// face is bounded, so none is excluded.
pub fn find_hooked_juxtapositions(d: &PlanarDiagram) -> Vec<Bigon> {
    bigons(d).into_iter().filter(|b| b.is_hooked(d)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BigonEffect {
    pub bigon: Bigon,
    pub hooked_before: bool,
    pub hooked_after: bool,
    pub removed: bool,
    pub created: bool,
    /// The basepoint lies on a side of the bigon, between its crossings.
    pub basepoint_inside: bool,
}

/// What the robot does to each bigon. The robot changes only crossing
/// types, so the bigons of the input are the bigons of the output.
pub fn robot_hooked_effect(d: &PlanarDiagram, base: Basepoint) -> Result<Vec<BigonEffect>, RobotError> {
    let out = run_robot_diagram(d, base)?;
    Ok(bigons(d)
        .into_iter()
        .map(|b| {
            let (before, after) = (b.is_hooked(d), b.is_hooked(&out));
            BigonEffect {
                basepoint_inside: b.has_on_side(d, base.dart),
                hooked_before: before,
                hooked_after: after,
                removed: before && !after,
                created: !before && after,
                bigon: b,
            }
        })
        .collect())
}

/// Hooked bigons whose two crossings are both between the same two
/// different components.
pub fn inter_component_hooked(d: &PlanarDiagram) -> Vec<Bigon> {
    let comp = d.component_of_darts();
    let pair_of = |c: CrossingId| {
        let (a, b) = (comp[&d.under_in(c)], comp[&d.over_in(c)]);
        (a.min(b), a.max(b))
    };
    find_hooked_juxtapositions(d)
        .into_iter()
        .filter(|b| {
            let (p, q) = (pair_of(b.crossings[0]), pair_of(b.crossings[1]));
            p.0 != p.1 && p == q
        })
        .collect()
}

/// Runs the link robot and reports whether no hooked bigon between two
/// components remains.
pub fn link_hooked_removal(
    d: &PlanarDiagram,
    order: &[(ComponentId, Basepoint)],
) -> Result<bool, RobotError> {
    Ok(inter_component_hooked(&run_robot_link(d, order)?).is_empty())
}

/// Writhe after the robot for every basepoint: each entry dart read
/// forward, then each exit dart read backward.
pub fn writhe_by_basepoint(d: &PlanarDiagram) -> Result<Vec<(Basepoint, i32)>, RobotError> {
    let Some(b) = d.basepoint() else { return Ok(Vec::new()) };
    let fwd = if b.direction == Direction::Forward { b.dart } else { d.pair(b.dart) };
    let walk = d.walk(fwd);
    let bases = walk
        .iter()
        .map(|x| Basepoint { dart: *x, direction: Direction::Forward })
        .chain(walk.iter().map(|x| Basepoint { dart: d.pair(*x), direction: Direction::Backward }));
    bases.map(|base| Ok((base, writhe(&run_robot_diagram(d, base)?)))).collect()
}
