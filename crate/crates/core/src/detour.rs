//! Loop detours: removing the first loop of an ascending diagram by sliding
//! it across everything that lies over it.
//!
//! The sweep works face by face inside the disc bounded by the loop:
//! a 2-gon between the loop and a chord goes by RII, a 3-gon between the
//! loop and an interior crossing goes by RIII, and otherwise the loop is
//! pushed under the next tangle edge by RII so that such a 3-gon appears.
//! The kink left at the self-crossing is removed by RI.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{
    edge_key, CrossingId, Dart, Direction, Face, FaceCensus, GaussCode, GaussLetter, Pass, PlanarDiagram,
    Region,
};
use crate::moves::{riii_legal, rii_remove_legal, MoveError, MoveKind, MoveRecord, MoveTrace, TraceBuilder};
use crate::robot::{is_ascending, is_descending};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetourError {
    #[error("the code is not ascending")]
    NotAscending,
    #[error("the code has no loop")]
    NoLoop,
    #[error("labels ({u}, {v}) do not mark the first loop of the code")]
    Shape { u: u32, v: u32 },
    #[error("crossing {0} is not the self-crossing of a loop: {1}")]
    NotALoop(CrossingId, String),
    #[error("detour diagrams must be knots, found {0} components")]
    NotAKnot(usize),
    #[error("the diagram has no basepoint")]
    NoBasepoint,
    #[error("no detour move applies with {crossings} crossings in the disc")]
    Stuck { crossings: usize },
    #[error("detour used {actual} moves, budget {budget}")]
    OverBudget { actual: usize, budget: usize },
    #[error("after the detour the code is {got}, expected {want}")]
    CodeMismatch { got: String, want: String },
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// Finds the first loop: `u` is the first label whose second occurrence is
/// reached, `v` the label just before that occurrence.
pub fn find_first_loop(code: &GaussCode) -> Result<(u32, u32), DetourError> {
    if !is_ascending(code) {
        return Err(DetourError::NotAscending);
    }
    let mut seen = HashSet::new();
    for (i, l) in code.letters().iter().enumerate() {
        if !seen.insert(l.label) {
            return Ok((l.label, code.letters()[i - 1].label));
        }
    }
    Err(DetourError::NoLoop)
}

/// The loop detour on a code: deletes the subword from the first `u` to
/// the second `u`, and every other occurrence of the labels strictly
/// inside it, then renumbers.
pub fn loop_detour_gauss(code: &GaussCode, u: u32, v: u32) -> Result<GaussCode, DetourError> {
    let letters = code.letters();
    let shape = || DetourError::Shape { u, v };
    let i = letters.iter().position(|l| l.label == u).ok_or_else(shape)?;
    let j = letters.iter().rposition(|l| l.label == u).ok_or_else(shape)?;
    if i == j || letters[i].pass == letters[j].pass {
        return Err(shape());
    }
    let inner = &letters[i + 1..j];
    let first_pass = letters[i].pass;
    let mut inside = HashSet::new();
    for l in inner {
        if l.pass != first_pass || !inside.insert(l.label) {
            return Err(shape());
        }
    }
    let last = inner.last().map(|l| l.label).unwrap_or(u);
    if last != v || letters[..i].iter().any(|l| inside.contains(&l.label) || l.label == u) {
        return Err(shape());
    }
    let kept: Vec<GaussLetter> = letters
        .iter()
        .enumerate()
        .filter(|(k, l)| (*k < i || *k > j) && !inside.contains(&l.label))
        .map(|(_, l)| *l)
        .collect();
    GaussCode::from_letters(kept).map_err(|_| shape())
}

/// A loop at crossing `u` and the tangle inside the disc it bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopTangle {
    pub base_crossing: CrossingId,
    pub first_after: Option<CrossingId>,
    pub last_inside: CrossingId,
    /// Entry darts along the loop, ending with the second entry at `u`.
    pub loop_darts: Vec<Dart>,
    pub loop_pass: Pass,
    pub interior_faces: Vec<Face>,
    pub tangle_crossings: BTreeSet<CrossingId>,
    pub sprout_count: usize,
    pub trivial_arcs: usize,
    pub interior_nonsprout_edges: usize,
    pub boundary_edges: usize,
    pub sprouts_total: usize,
    /// The dart owning the disc corner at `u`.
    pub corner: Dart,
    /// The dart at `u` where the loop starts.
    pub first_exit: Dart,
}

impl LoopTangle {
    pub fn c(&self) -> usize {
        self.tangle_crossings.len()
    }

    pub fn m(&self) -> usize {
        self.sprout_count
    }

    pub fn t(&self) -> usize {
        self.trivial_arcs
    }

    /// `4c = 2e + m - 2t`.
    pub fn edge_identity_holds(&self) -> bool {
        4 * self.c() + 2 * self.t() == 2 * self.interior_nonsprout_edges + self.m()
    }

    /// Move budget for sliding the loop across the tangle.
    pub fn tangle_budget(&self) -> usize {
        5 * self.c() + self.m() - self.t()
    }

    pub fn census(&self) -> FaceCensus {
        FaceCensus::from_faces(self.interior_faces.iter(), Region::LoopInterior)
    }

    pub fn loop_crossings(&self) -> BTreeSet<CrossingId> {
        self.loop_darts.iter().map(|d| d.crossing()).collect()
    }

    /// Edge keys of the loop edges.
    pub fn loop_edges(&self, d: &PlanarDiagram) -> HashSet<(Dart, Dart)> {
        let mut out = HashSet::new();
        let mut from = self.first_exit;
        for x in &self.loop_darts {
            out.insert(edge_key(from, d.pair(from)));
            from = x.opposite();
        }
        out
    }
}

/// Locates the loop at crossing `u` on the basepoint component and the disc
/// on the side of the corner its two loop edges make at `u`.
pub fn detect_loop_tangle(d: &PlanarDiagram, u: CrossingId) -> Result<LoopTangle, DetourError> {
    let not_loop = |why: &str| DetourError::NotALoop(u, why.to_string());
    match d.basepoint() {
        None => return Err(DetourError::NoBasepoint),
        Some(b) if b.direction != Direction::Forward => {
            return Err(not_loop("the basepoint must point forward"))
        }
        _ => {}
    }
    let walk = d.base_walk();
    let pos: Vec<usize> = walk.iter().enumerate().filter(|(_, x)| x.crossing() == u).map(|(i, _)| i).collect();
    if pos.len() != 2 {
        return Err(not_loop("not a self-crossing of the basepoint component"));
    }
    let e1 = walk[pos[0]];
    let e2 = walk[pos[1]];
    let inner: Vec<Dart> = walk[pos[0] + 1..pos[1]].to_vec();
    let mut loop_set = HashSet::new();
    for x in &inner {
        if !loop_set.insert(x.crossing()) {
            return Err(not_loop("the loop crosses itself"));
        }
    }
    let loop_pass = d.pass_at(e1);
    if inner.iter().any(|x| d.pass_at(*x) != loop_pass) {
        return Err(not_loop("the loop passes both over and under"));
    }
    let first_exit = e1.opposite();
    let mut loop_darts = inner.clone();
    loop_darts.push(e2);
    let mut loop_edges = HashSet::new();
    let mut from = first_exit;
    for x in &loop_darts {
        loop_edges.insert(edge_key(from, d.pair(from)));
        from = x.opposite();
    }
    // the disc corner at u sits between the loop exit and the loop return
    let corner = if e2 == first_exit.turn(1) { first_exit } else { e2 };
    let mut disc: Vec<Face> = Vec::new();
    let mut seen: HashSet<Face> = HashSet::new();
    let start = d.face_of(corner);
    seen.insert(start.clone());
    let mut stack = vec![start];
    while let Some(f) = stack.pop() {
        for x in f.darts() {
            if loop_edges.contains(&edge_key(*x, d.pair(*x))) {
                continue;
            }
            let g = d.face_of(d.pair(*x));
            if seen.insert(g.clone()) {
                stack.push(g);
            }
        }
        disc.push(f);
    }
    disc.sort();
    let base = d.basepoint().expect("walk is nonempty").dart;
    if disc.iter().any(|f| f.contains(base) || f.contains(d.pair(base))) {
        return Err(not_loop("the basepoint lies inside the disc"));
    }
    let mut corners_of: HashMap<CrossingId, usize> = HashMap::new();
    for f in &disc {
        for c in f.corners() {
            *corners_of.entry(c).or_default() += 1;
        }
    }
    let interior: BTreeSet<CrossingId> =
        corners_of.keys().copied().filter(|c| *c != u && !loop_set.contains(c)).collect();
    let mut trivial = 0;
    let mut nonsprout = 0;
    let mut counted = HashSet::new();
    for f in &disc {
        for x in f.darts() {
            let key = edge_key(*x, d.pair(*x));
            if loop_edges.contains(&key) || !counted.insert(key) {
                continue;
            }
            let (a, b) = (x.crossing(), d.pair(*x).crossing());
            match (interior.contains(&a), interior.contains(&b)) {
                (true, true) => nonsprout += 1,
                (false, false) => trivial += 1,
                _ => {}
            }
        }
    }
    let m = inner.len();
    let first_after = inner.first().map(|x| x.crossing());
    let last_inside = inner.last().map(|x| x.crossing()).unwrap_or(u);
    Ok(LoopTangle {
        base_crossing: u,
        first_after,
        last_inside,
        loop_darts,
        loop_pass,
        interior_faces: disc,
        tangle_crossings: interior,
        sprout_count: m,
        trivial_arcs: trivial,
        interior_nonsprout_edges: nonsprout,
        boundary_edges: m + 1,
        sprouts_total: m + 2,
        corner,
        first_exit,
    })
}

enum SweepStep {
    Single(MoveRecord),
    /// Push the loop side under a tangle edge, then slide the crossing
    /// `apex` out of the disc across the 3-gon it forms with `corner`.
    PushThenSlide { push: MoveRecord, corner: CrossingId, apex: CrossingId },
}

fn site(kind: MoveKind, f: &Face) -> MoveRecord {
    MoveRecord::new(kind, f.darts().to_vec())
}

/// Chooses the next sweep step, or `None` when the disc is empty.
fn next_step(d: &PlanarDiagram, lt: &LoopTangle) -> Option<SweepStep> {
    if lt.m() == 0 && lt.c() == 0 {
        return None;
    }
    let u = lt.base_crossing;
    let loop_edges = lt.loop_edges(d);
    let on_loop = lt.loop_crossings();
    let is_loop_side = |x: Dart| loop_edges.contains(&edge_key(x, d.pair(x)));
    let mut faces: Vec<&Face> = lt.interior_faces.iter().collect();
    faces.sort_by_key(|f| (f.sides(), f.min_crossing()));

    for f in &faces {
        if f.sides() == 2
            && !f.corners().any(|c| c == u)
            && f.darts().iter().filter(|x| is_loop_side(**x)).count() == 1
            && rii_remove_legal(d, f)
        {
            return Some(SweepStep::Single(site(MoveKind::RIIRemove, f)));
        }
    }
    for f in &faces {
        if f.sides() == 3
            && !f.corners().any(|c| c == u)
            && f.darts().iter().any(|x| is_loop_side(*x))
            && f.corners().any(|c| lt.tangle_crossings.contains(&c))
            && riii_legal(d, f)
        {
            return Some(SweepStep::Single(site(MoveKind::RIII, f)));
        }
    }
    let over = lt.loop_pass == Pass::Over;
    for f in &faces {
        let ds = f.darts();
        let k = ds.len();
        if k < 3 {
            continue;
        }
        let corner = |i: usize| ds[i % k].crossing();
        for i in 0..k {
            if !is_loop_side(ds[i]) {
                continue;
            }
            // loop side ends at b, followed by the tangle side b -> p1
            let b = corner(i + 1);
            let p1 = corner(i + 2);
            if b != u && on_loop.contains(&b) && lt.tangle_crossings.contains(&p1) {
                let push = MoveRecord::new(MoveKind::RIIAdd, vec![ds[i], ds[(i + 2) % k]]).with_over(over);
                return Some(SweepStep::PushThenSlide { push, corner: b, apex: p1 });
            }
            // loop side starts at a, preceded by the tangle side p1 -> a
            let a = corner(i);
            let p1 = corner(i + k - 1);
            if a != u && on_loop.contains(&a) && lt.tangle_crossings.contains(&p1) {
                let push = MoveRecord::new(MoveKind::RIIAdd, vec![ds[i], ds[(i + k - 2) % k]]).with_over(over);
                return Some(SweepStep::PushThenSlide { push, corner: a, apex: p1 });
            }
        }
    }
    None
}

/// Moves that slide the loop across its tangle until the disc is empty.
/// Only RII and RIII moves are used.
pub fn tangle_detour_sequence(d: &PlanarDiagram, lt: &LoopTangle) -> Result<MoveTrace, DetourError> {
    let (trace, _) = sweep(d, lt)?;
    Ok(trace)
}

fn sweep(d: &PlanarDiagram, lt: &LoopTangle) -> Result<(MoveTrace, PlanarDiagram), DetourError> {
    let u = lt.base_crossing;
    let budget = lt.tangle_budget();
    let mut b = TraceBuilder::new(d.clone());
    let mut cur = lt.clone();
    while let Some(step) = next_step(b.current(), &cur) {
        match step {
            SweepStep::Single(m) => {
                b.push(m)?;
            }
            SweepStep::PushThenSlide { push, corner, apex } => {
                let first_new = b.current().capacity();
                b.push(push)?;
                let tri = b
                    .current()
                    .faces()
                    .into_iter()
                    .find(|f| {
                        let cs: BTreeSet<_> = f.corners().collect();
                        f.sides() == 3
                            && cs.contains(&corner)
                            && cs.contains(&apex)
                            && cs.iter().any(|c| *c >= first_new)
                    })
                    .ok_or(DetourError::Stuck { crossings: cur.c() })?;
                b.push(site(MoveKind::RIII, &tri))?;
            }
        }
        if b.records().len() > budget {
            return Err(DetourError::OverBudget { actual: b.records().len(), budget });
        }
        cur = detect_loop_tangle(b.current(), u)?;
    }
    if cur.m() != 0 || cur.c() != 0 {
        return Err(DetourError::Stuck { crossings: cur.c() });
    }
    Ok(b.finish())
}

/// A loop detour: the tangle sweep followed by RI at the self-crossing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetourPlan {
    pub loop_tangle: LoopTangle,
    pub trace: MoveTrace,
    pub budget: usize,
}

pub fn loop_detour_sequence(d: &PlanarDiagram, lt: &LoopTangle) -> Result<DetourPlan, DetourError> {
    let (sweep_trace, after) = sweep(d, lt)?;
    let mut b = TraceBuilder::new(after);
    let kink = b.current().face_of(detect_loop_tangle(b.current(), lt.base_crossing)?.corner);
    b.push(site(MoveKind::RIRemove, &kink))?;
    let (last, _) = b.finish();
    let mut trace = sweep_trace;
    trace.records.extend(last.records);
    let budget = lt.tangle_budget() + 1;
    if trace.len() > budget {
        return Err(DetourError::OverBudget { actual: trace.len(), budget });
    }
    Ok(DetourPlan { loop_tangle: lt.clone(), trace, budget })
}

/// Counts for one loop detour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub u: u32,
    pub v: u32,
    pub c: usize,
    pub m: usize,
    pub t: usize,
    pub e: usize,
    pub budget: usize,
    pub actual: usize,
    pub crossings_after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetourReport {
    #[serde(rename = "C")]
    pub crossings: usize,
    pub phases: usize,
    pub per_phase: Vec<PhaseReport>,
    pub total_moves: usize,
    pub total_budget: usize,
}

/// Unknots an ascending (or descending) knot diagram by repeated loop
/// detours, checking every phase against its code-level counterpart and
/// its move budget.
pub fn unknot_by_detours(d: &PlanarDiagram) -> Result<(MoveTrace, DetourReport), DetourError> {
    let comps = d.component_count();
    if d.crossing_count() > 0 && comps != 1 {
        return Err(DetourError::NotAKnot(comps));
    }
    let start = d.forward_view();
    let mut work = if is_ascending(&start.gauss()) {
        start
    } else if is_descending(&start.gauss()) {
        start.turned_around()
    } else {
        return Err(DetourError::NotAscending);
    };
    let big_c = d.crossing_count();
    let mut trace = MoveTrace::new(d.clone());
    let mut phases = Vec::new();
    while work.crossing_count() > 0 {
        let code = work.gauss();
        let (u_label, v_label) = find_first_loop(&code)?;
        let order = work.crossing_order();
        let u = order[u_label as usize - 1];
        let lt = detect_loop_tangle(&work, u)?;
        debug_assert!(lt.edge_identity_holds());
        let plan = loop_detour_sequence(&work, &lt)?;
        let before = work.crossing_count();
        for r in &plan.trace.records {
            work = crate::moves::apply(&work, r)?;
        }
        let want = loop_detour_gauss(&code, u_label, v_label)?;
        let got = work.gauss();
        if got != want {
            return Err(DetourError::CodeMismatch { got: got.to_string(), want: want.to_string() });
        }
        debug_assert!(work.crossing_count() < before);
        log::debug!("loop detour at U{u_label}: {} moves, {} crossings left", plan.trace.len(), work.crossing_count());
        phases.push(PhaseReport {
            u: u_label,
            v: v_label,
            c: lt.c(),
            m: lt.m(),
            t: lt.t(),
            e: lt.interior_nonsprout_edges,
            budget: plan.budget,
            actual: plan.trace.len(),
            crossings_after: work.crossing_count(),
        });
        trace.records.extend(plan.trace.records);
    }
    let total_budget = (7 * big_c + 1) * big_c;
    if trace.len() > total_budget {
        return Err(DetourError::OverBudget { actual: trace.len(), budget: total_budget });
    }
    let report = DetourReport {
        crossings: big_c,
        phases: phases.len(),
        total_moves: trace.len(),
        per_phase: phases,
        total_budget,
    };
    Ok((trace, report))
}
