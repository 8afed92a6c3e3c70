//! Reidemeister moves on [`PlanarDiagram`], move records and traces.
//!
//! Sites are given as darts. Crossing ids never change during a trace, so a
//! record stays addressable until one of its darts is removed.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{
    Basepoint, CrossingId, Dart, DiagramJson, DiagramJsonError, Direction, Face, PlanarDiagram,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    #[serde(rename = "RI_add")]
    RIAdd,
    #[serde(rename = "RI_remove")]
    RIRemove,
    #[serde(rename = "RII_add")]
    RIIAdd,
    #[serde(rename = "RII_remove")]
    RIIRemove,
    #[serde(rename = "RIII")]
    RIII,
}

impl MoveKind {
    pub fn delta(self) -> i64 {
        match self {
            MoveKind::RIAdd => 1,
            MoveKind::RIRemove => -1,
            MoveKind::RIIAdd => 2,
            MoveKind::RIIRemove => -2,
            MoveKind::RIII => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::RIAdd => "RI_add",
            MoveKind::RIRemove => "RI_remove",
            MoveKind::RIIAdd => "RII_add",
            MoveKind::RIIRemove => "RII_remove",
            MoveKind::RIII => "RIII",
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One move. For removals and RIII the site is a face given as its dart
/// cycle (any rotation). RI_add takes one dart of the edge to kink (or none
/// to kink a free loop); RII_add takes two darts of one face, and pushes
/// the edge of the first across the edge of the second.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub site: Vec<Dart>,
    pub crossings_after: usize,
    /// For additions: whether the strand through the first site dart is
    /// the overstrand at the new crossings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub over: Option<bool>,
    /// For RI_add: which side of the edge the new 1-gon lies on (0 or 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<u8>,
}

impl MoveRecord {
    pub fn new(kind: MoveKind, site: Vec<Dart>) -> Self {
        MoveRecord { kind, site, crossings_after: 0, over: None, variant: None }
    }

    pub fn with_over(mut self, over: bool) -> Self {
        self.over = Some(over);
        self
    }

    pub fn with_variant(mut self, v: u8) -> Self {
        self.variant = Some(v);
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("{kind}: site dart {dart} is not on a live crossing")]
    Stale { kind: MoveKind, dart: Dart },
    #[error("{kind}: illegal site: {reason}")]
    Illegal { kind: MoveKind, reason: String },
    #[error("{kind}: record says {claimed} crossings after the move, replay gives {actual}")]
    CountMismatch { kind: MoveKind, claimed: usize, actual: usize },
}

fn illegal(kind: MoveKind, reason: impl Into<String>) -> MoveError {
    MoveError::Illegal { kind, reason: reason.into() }
}

fn live(d: &PlanarDiagram, kind: MoveKind, x: Dart) -> Result<(), MoveError> {
    if d.is_alive(x.crossing()) {
        Ok(())
    } else {
        Err(MoveError::Stale { kind, dart: x })
    }
}

/// The face through `site[0]`, checked to be exactly the darts of `site`.
fn site_face(d: &PlanarDiagram, kind: MoveKind, site: &[Dart], sides: usize) -> Result<Face, MoveError> {
    if site.len() != sides {
        return Err(illegal(kind, format!("expected {sides} site darts, got {}", site.len())));
    }
    for x in site {
        live(d, kind, *x)?;
    }
    let f = d.face_of(site[0]);
    if f.sides() != sides {
        return Err(illegal(kind, format!("face at {} has {} sides", site[0], f.sides())));
    }
    if site.iter().any(|x| !f.contains(*x)) {
        return Err(illegal(kind, "site darts are not one face"));
    }
    Ok(f)
}

/// Whether `site` (a 2-gon face) can be removed by RII.
pub fn rii_remove_legal(d: &PlanarDiagram, f: &Face) -> bool {
    let [a, b] = match f.darts() {
        [a, b] => [*a, *b],
        _ => return false,
    };
    a.crossing() != b.crossing() && d.pass_at(a) == d.pass_at(d.pair(a))
}

/// Whether a 3-gon face admits RIII: one side strand is over at both its
/// crossings or under at both.
pub fn riii_legal(d: &PlanarDiagram, f: &Face) -> bool {
    let ds = f.darts();
    if ds.len() != 3 {
        return false;
    }
    let cs: BTreeSet<_> = ds.iter().map(|x| x.crossing()).collect();
    cs.len() == 3 && ds.iter().any(|x| d.pass_at(*x) == d.pass_at(d.pair(*x)))
}

/// Applies a move in place and fills in `crossings_after`.
pub fn apply_mut(d: &mut PlanarDiagram, m: &mut MoveRecord) -> Result<(), MoveError> {
    let kind = m.kind;
    match kind {
        MoveKind::RIRemove => {
            let f = site_face(d, kind, &m.site, 1)?;
            remove_crossings(d, &BTreeSet::from([f.darts()[0].crossing()]));
        }
        MoveKind::RIIRemove => {
            let f = site_face(d, kind, &m.site, 2)?;
            if !rii_remove_legal(d, &f) {
                return Err(illegal(kind, "no strand is over at both crossings"));
            }
            let set = f.corners().collect();
            remove_crossings(d, &set);
        }
        MoveKind::RIII => {
            let f = site_face(d, kind, &m.site, 3)?;
            if !riii_legal(d, &f) {
                return Err(illegal(kind, "no side is over or under at both its crossings"));
            }
            riii(d, f.darts());
        }
        MoveKind::RIAdd => {
            let over = m.over.unwrap_or(false);
            let variant = m.variant.unwrap_or(0);
            if variant > 1 {
                return Err(illegal(kind, "variant must be 0 or 1"));
            }
            match m.site.as_slice() {
                [] => {
                    if d.free_loops() == 0 {
                        return Err(illegal(kind, "no free loop to kink"));
                    }
                    ri_add_free_loop(d, over);
                }
                [x] => {
                    live(d, kind, *x)?;
                    ri_add(d, *x, variant, over);
                }
                _ => return Err(illegal(kind, "expected at most one site dart")),
            }
        }
        MoveKind::RIIAdd => {
            let over = m.over.unwrap_or(true);
            let [x1, x2] = match m.site.as_slice() {
                [a, b] => [*a, *b],
                _ => return Err(illegal(kind, "expected two site darts")),
            };
            live(d, kind, x1)?;
            live(d, kind, x2)?;
            if x1 == x2 || !d.face_of(x1).contains(x2) {
                return Err(illegal(kind, "site darts must be distinct darts of one face"));
            }
            rii_add(d, x1, x2, over);
        }
    }
    let actual = d.crossing_count();
    if m.crossings_after != actual && m.crossings_after != usize::MAX {
        let claimed = m.crossings_after;
        m.crossings_after = actual;
        return Err(MoveError::CountMismatch { kind, claimed, actual });
    }
    m.crossings_after = actual;
    Ok(())
}

/// Applies a move, checking `crossings_after` against the result.
pub fn apply(d: &PlanarDiagram, m: &MoveRecord) -> Result<PlanarDiagram, MoveError> {
    let mut out = d.clone();
    let mut m = m.clone();
    apply_mut(&mut out, &mut m)?;
    Ok(out)
}

/// Applies a move whose `crossings_after` is not known yet and returns the
/// completed record.
pub fn perform(d: &mut PlanarDiagram, m: MoveRecord) -> Result<MoveRecord, MoveError> {
    let mut m = MoveRecord { crossings_after: usize::MAX, ..m };
    apply_mut(d, &mut m)?;
    Ok(m)
}

/// Deletes a set of crossings, splicing the strands through them. Strands
/// that close up entirely inside the set become free loops.
pub(crate) fn remove_crossings(d: &mut PlanarDiagram, set: &BTreeSet<CrossingId>) {
    let inside = |x: Dart| set.contains(&x.crossing());
    let mut visited: HashSet<Dart> = HashSet::new();
    let mut links = Vec::new();
    for c in d.crossings().filter(|c| !set.contains(c)) {
        for s in 0..4 {
            let a = Dart::new(c, s);
            let mut p = d.pair(a);
            while inside(p) {
                visited.insert(p);
                visited.insert(p.opposite());
                p = d.pair(p.opposite());
            }
            links.push((a, p));
        }
    }
    let mut loops = 0;
    for c in set {
        for s in 0..4 {
            let start = Dart::new(*c, s);
            if visited.contains(&start) {
                continue;
            }
            loops += 1;
            let mut p = start;
            loop {
                visited.insert(p);
                visited.insert(p.opposite());
                p = d.pair(p.opposite());
                if p == start {
                    break;
                }
            }
        }
    }
    let base = d.basepoint().and_then(|b| {
        let mut p = b.dart;
        let mut steps = 0;
        while inside(p) {
            p = d.pair(p.opposite());
            steps += 1;
            if p == b.dart || steps > 4 * set.len() {
                return None;
            }
        }
        Some(Basepoint { dart: p, direction: b.direction })
    });
    for (a, p) in links {
        d.link(a, p);
    }
    for c in set {
        d.kill(*c);
    }
    d.add_free_loops(loops);
    d.set_basepoint(if d.crossing_count() == 0 { None } else { base });
    if d.basepoint().is_none() && d.crossing_count() > 0 {
        let c = d.crossings().next().expect("a live crossing");
        let b = d.under_in(c);
        d.set_basepoint(Some(Basepoint { dart: b, direction: Direction::Forward }));
    }
}

/// Kinks the edge through `x`. The strand through the old edge passes the
/// new crossing on slots 0/2 and then 1/3.
fn ri_add(d: &mut PlanarDiagram, x: Dart, variant: u8, over: bool) {
    let y = d.pair(x);
    let s = d.is_incoming(x);
    let inc = if variant == 0 { [!s, !s, s, s] } else { [!s, s, s, !s] };
    let c = d.push_crossing(over, inc);
    let n = |k| Dart::new(c, k);
    d.link(x, n(0));
    if variant == 0 {
        d.link(n(2), n(1));
        d.link(n(3), y);
    } else {
        d.link(n(2), n(3));
        d.link(n(1), y);
    }
}

fn ri_add_free_loop(d: &mut PlanarDiagram, over: bool) {
    let c = d.push_crossing(over, [false, true, true, false]);
    let n = |k| Dart::new(c, k);
    d.link(n(0), n(1));
    d.link(n(2), n(3));
    d.set_free_loops(d.free_loops() - 1);
    if d.basepoint().is_none() {
        d.set_basepoint(Some(Basepoint { dart: n(1), direction: Direction::Forward }));
    }
}

/// Pushes the edge through `x1` across the edge through `x2` (both on one
/// face), creating a 2-gon. `over` makes the first strand pass over.
fn rii_add(d: &mut PlanarDiagram, x1: Dart, x2: Dart, over: bool) {
    let y1 = d.pair(x1);
    let y2 = d.pair(x2);
    let s1 = d.is_incoming(x1);
    let s2 = d.is_incoming(x2);
    // strand 1 runs x1 -> p0 p2 -> q0 q2 -> y1, strand 2 runs x2 -> q3 q1 -> p1 p3 -> y2
    let p = d.push_crossing(over, [!s1, !s2, s1, s2]);
    let q = d.push_crossing(over, [!s1, s2, s1, !s2]);
    let pd = |k| Dart::new(p, k);
    let qd = |k| Dart::new(q, k);
    d.link(x1, pd(0));
    d.link(pd(2), qd(0));
    d.link(qd(2), y1);
    d.link(x2, qd(3));
    d.link(qd(1), pd(1));
    d.link(pd(3), y2);
}

/// RIII on the triangle with face darts `t` (in face order).
fn riii(d: &mut PlanarDiagram, t: &[Dart]) {
    // side i runs from t[i] at P to pair(t[i]) at Q
    let sides: Vec<(Dart, Dart)> = t.iter().map(|&x| (x, d.pair(x))).collect();
    let mut newport = std::collections::HashMap::new();
    let mut moved = std::collections::HashMap::new();
    for &(pp, qq) in &sides {
        newport.insert(pp.opposite(), qq);
        newport.insert(qq.opposite(), pp);
        moved.insert(pp, qq.opposite());
        moved.insert(qq, pp.opposite());
    }
    let old_incoming: std::collections::HashMap<Dart, bool> =
        newport.keys().map(|&x| (x, d.is_incoming(x))).collect();
    let externals: Vec<(Dart, Dart)> = newport.keys().map(|&x| (x, d.pair(x))).collect();
    for (x, partner) in externals {
        let target = newport.get(&partner).copied().unwrap_or(partner);
        d.link(newport[&x], target);
    }
    for &(pp, qq) in &sides {
        d.link(qq.opposite(), pp.opposite());
    }
    for (&x, &inc) in &old_incoming {
        let np = newport[&x];
        d.set_incoming(np, inc);
        d.set_incoming(np.opposite(), !inc);
    }
    if let Some(b) = d.basepoint() {
        let dart = newport.get(&b.dart).or_else(|| moved.get(&b.dart)).copied().unwrap_or(b.dart);
        d.set_basepoint(Some(Basepoint { dart, direction: b.direction }));
    }
}

/// Faces adjacent to the basepoint edge. With the basepoint at infinity
/// these are the unbounded faces.
pub fn base_faces(d: &PlanarDiagram) -> Vec<Face> {
    match d.basepoint() {
        Some(b) if d.is_alive(b.dart.crossing()) => {
            let f1 = d.face_of(b.dart);
            let f2 = d.face_of(d.pair(b.dart));
            if f1 == f2 {
                vec![f1]
            } else {
                vec![f1, f2]
            }
        }
        _ => Vec::new(),
    }
}

/// Every legal crossing-removing move and RIII, over all faces.
pub fn legal_moves(d: &PlanarDiagram) -> Vec<MoveRecord> {
    let n = d.crossing_count();
    let mut out = Vec::new();
    for f in d.faces() {
        let site = f.darts().to_vec();
        match f.sides() {
            1 => out.push(MoveRecord { crossings_after: n - 1, ..MoveRecord::new(MoveKind::RIRemove, site) }),
            2 if rii_remove_legal(d, &f) => {
                out.push(MoveRecord { crossings_after: n - 2, ..MoveRecord::new(MoveKind::RIIRemove, site) })
            }
            3 if riii_legal(d, &f) => {
                out.push(MoveRecord { crossings_after: n, ..MoveRecord::new(MoveKind::RIII, site) })
            }
            _ => {}
        }
    }
    out
}

/// Legal crossing-removing moves and RIII on bounded faces, viewing the
/// basepoint as the point at infinity.
pub fn available_moves(d: &PlanarDiagram) -> Vec<MoveRecord> {
    let unbounded = base_faces(d);
    legal_moves(d)
        .into_iter()
        .filter(|m| !unbounded.iter().any(|f| f.contains(m.site[0])))
        .collect()
}

/// Bounded faces with at most three sides.
pub fn small_bounded_faces(d: &PlanarDiagram) -> Vec<Face> {
    let unbounded = base_faces(d);
    d.faces().into_iter().filter(|f| f.sides() <= 3 && !unbounded.contains(f)).collect()
}

/// 2-gons and 3-gons admitting no move.
pub fn blocked_faces(d: &PlanarDiagram) -> Vec<Face> {
    d.faces()
        .into_iter()
        .filter(|f| match f.sides() {
            2 => !rii_remove_legal(d, f),
            3 => !riii_legal(d, f),
            _ => false,
        })
        .collect()
}

/// An initial diagram and the moves applied to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveTrace {
    pub initial: PlanarDiagram,
    pub records: Vec<MoveRecord>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("record {index}: {error}")]
pub struct ReplayError {
    pub index: usize,
    pub error: MoveError,
}

impl MoveTrace {
    pub fn new(initial: PlanarDiagram) -> Self {
        MoveTrace { initial, records: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, kind: MoveKind) -> usize {
        self.records.iter().filter(|r| r.kind == kind).count()
    }

    /// Diagrams before the first move and after each move.
    pub fn snapshots(&self) -> Result<Vec<PlanarDiagram>, ReplayError> {
        let mut d = self.initial.clone();
        let mut out = vec![d.clone()];
        for (index, r) in self.records.iter().enumerate() {
            d = apply(&d, r).map_err(|error| ReplayError { index, error })?;
            out.push(d.clone());
        }
        Ok(out)
    }
}

/// Replays a trace, reporting the first record that fails.
pub fn replay(t: &MoveTrace) -> Result<PlanarDiagram, ReplayError> {
    let mut d = t.initial.clone();
    for (index, r) in t.records.iter().enumerate() {
        let mut r = r.clone();
        apply_mut(&mut d, &mut r).map_err(|error| ReplayError { index, error })?;
    }
    Ok(d)
}

/// True when the trace replays and never increases the crossing count.
pub fn is_simplification(t: &MoveTrace) -> Result<bool, ReplayError> {
    replay(t)?;
    let mut prev = t.initial.crossing_count();
    for r in &t.records {
        if r.crossings_after > prev {
            return Ok(false);
        }
        prev = r.crossings_after;
    }
    Ok(true)
}

/// Records moves as they are applied to a working diagram.
#[derive(Clone, Debug)]
pub struct TraceBuilder {
    trace: MoveTrace,
    current: PlanarDiagram,
}

impl TraceBuilder {
    pub fn new(initial: PlanarDiagram) -> Self {
        TraceBuilder { current: initial.clone(), trace: MoveTrace::new(initial) }
    }

    pub fn current(&self) -> &PlanarDiagram {
        &self.current
    }

    pub fn records(&self) -> &[MoveRecord] {
        &self.trace.records
    }

    pub fn push(&mut self, m: MoveRecord) -> Result<&MoveRecord, MoveError> {
        let r = perform(&mut self.current, m)?;
        self.trace.records.push(r);
        Ok(self.trace.records.last().expect("just pushed"))
    }

    pub fn finish(self) -> (MoveTrace, PlanarDiagram) {
        (self.trace, self.current)
    }
}

/// JSON form of a trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceJson {
    pub initial: DiagramJson,
    pub records: Vec<MoveRecord>,
}

#[derive(Debug, Error)]
pub enum TraceJsonError {
    #[error("malformed trace JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("initial diagram: {0}")]
    Initial(#[from] DiagramJsonError),
}

impl MoveTrace {
    pub fn to_json(&self) -> TraceJson {
        TraceJson { initial: self.initial.to_json(), records: self.records.clone() }
    }

    pub fn from_json(j: &TraceJson) -> Result<Self, TraceJsonError> {
        Ok(MoveTrace { initial: j.initial.to_diagram()?, records: j.records.clone() })
    }

    pub fn parse_json(text: &str) -> Result<Self, TraceJsonError> {
        let j: TraceJson = serde_json::from_str(text)?;
        Self::from_json(&j)
    }
}
