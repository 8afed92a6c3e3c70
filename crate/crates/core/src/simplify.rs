//! Monotone simplification of ascending diagrams.
//!
//! Inside the disc of the first loop, faces with few sides are worked off
//! in order: 1-gons and 2-gons are removed, a triangle next to another
//! triangle is turned into a 2-gon, a triangle on the loop is slid out of
//! the disc, triangles are carried along tracks of quadrilaterals towards
//! such a place, and pentagons surrounded by triangles are broken up.
//! Once the disc holds no crossings the loop comes off without adding
//! crossings. Every move keeps the crossing count or lowers it.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::codes::{
    edge_key, euler_identity_check, serialize_pd, CrossingId, Dart, Face, FaceCensus, PlanarDiagram,
};
use crate::detour::{detect_loop_tangle, find_first_loop, loop_detour_sequence, DetourError, LoopTangle};
use crate::moves::{
    riii_legal, rii_remove_legal, available_moves, MoveError, MoveKind, MoveRecord, MoveTrace, TraceBuilder,
};
use crate::robot::{is_ascending, is_descending};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplifyError {
    #[error("the diagram is neither ascending nor descending")]
    NotAscending,
    #[error("simplification needs a knot diagram, found {0} components")]
    NotAKnot(usize),
    #[error("the loop interior is not minimal: it has {0}")]
    NotMinimal(String),
    #[error("site does not fit: {0}")]
    SiteShape(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no simplifying move found with {crossings} crossings in the disc")]
    Stuck { crossings: usize },
    #[error(transparent)]
    Detour(#[from] DetourError),
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// A charge in thirds: `Thirds(4)` is 4/3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Thirds(pub i64);

impl std::fmt::Display for Thirds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 % 3 == 0 {
            write!(f, "{}", self.0 / 3)
        } else {
            write!(f, "{}/3", self.0)
        }
    }
}

/// A configuration that keeps positive charge after discharging.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum StructureKind {
    /// A triangle with one side on the loop.
    TriangleOnLoop { triangle: Face },
    /// Two triangles sharing a side.
    TriangleTrianglePair { first: Face, second: Face },
    /// A quadrilateral sharing sides with triangles.
    QuadWithTriangle { quad: Face, triangles: Vec<Face> },
    /// A pentagon sharing at least four sides with triangles.
    PentagonWithFourTriangles { pentagon: Face, triangles: Vec<Face> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceCharge {
    pub face: Face,
    pub sides: usize,
    pub charge: Thirds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DischargeReport {
    pub census: FaceCensus,
    pub charges: Vec<FaceCharge>,
    pub positive_structures: Vec<StructureKind>,
}

impl DischargeReport {
    pub fn total(&self) -> Thirds {
        Thirds(self.charges.iter().map(|c| c.charge.0).sum())
    }
}

/// Where a track of quadrilaterals ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    Triangle,
    Loop,
    BigPolygon(usize),
}

/// Quadrilaterals glued along opposite sides, starting from a side of a
/// triangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Track {
    pub triangle: Face,
    /// Dart of the triangle on the side the track leaves through.
    pub exit: Dart,
    pub quads: Vec<Face>,
    pub terminal: Terminal,
    /// The face reached at the end, unless the track runs into the loop.
    pub terminal_face: Option<Face>,
    /// Dart of the terminal face on the side the track arrives through.
    pub entry: Option<Dart>,
}

impl Track {
    pub fn length(&self) -> usize {
        self.quads.len()
    }

    fn touches(&self, c: CrossingId) -> bool {
        let on = |f: &Face| f.corners().any(|x| x == c);
        on(&self.triangle)
            || self.quads.iter().any(on)
            || (self.terminal == Terminal::Triangle && self.terminal_face.as_ref().is_some_and(on))
    }

    /// A track whose transport ends in fewer disc crossings.
    fn simplifies(&self) -> bool {
        matches!(self.terminal, Terminal::Triangle | Terminal::Loop)
    }
}

/// The faces of a loop interior with their adjacencies.
struct Disc {
    u: CrossingId,
    faces: Vec<Face>,
    index: HashMap<Dart, usize>,
    loop_edges: HashSet<(Dart, Dart)>,
}

impl Disc {
    fn new(d: &PlanarDiagram, lt: &LoopTangle) -> Self {
        let faces = lt.interior_faces.clone();
        let mut index = HashMap::new();
        for (i, f) in faces.iter().enumerate() {
            for x in f.darts() {
                index.insert(*x, i);
            }
        }
        Disc { u: lt.base_crossing, faces, index, loop_edges: lt.loop_edges(d) }
    }

    fn is_loop_side(&self, d: &PlanarDiagram, x: Dart) -> bool {
        self.loop_edges.contains(&edge_key(x, d.pair(x)))
    }

    /// The disc face across the side of `x`, or `None` across the loop.
    fn across(&self, d: &PlanarDiagram, x: Dart) -> Option<usize> {
        if self.is_loop_side(d, x) {
            None
        } else {
            self.index.get(&d.pair(x)).copied()
        }
    }

    fn touches_u(&self, f: &Face) -> bool {
        f.corners().any(|c| c == self.u)
    }

    fn count(&self, sides: usize) -> usize {
        self.faces.iter().filter(|f| f.sides() == sides).count()
    }

    fn is_minimal(&self) -> bool {
        self.faces.iter().all(|f| f.sides() > 2)
    }
}

fn record(kind: MoveKind, f: &Face) -> MoveRecord {
    MoveRecord::new(kind, f.darts().to_vec())
}

/// Removes bounded 1-gons by RI and bounded 2-gons by RII until none is
/// left. The basepoint is taken as the point at infinity.
pub fn reduce_to_minimal(d: &PlanarDiagram) -> Result<(PlanarDiagram, MoveTrace), SimplifyError> {
    if d.crossing_count() > 0 && !is_ascending(&d.forward_view().gauss()) {
        return Err(SimplifyError::NotAscending);
    }
    let mut b = TraceBuilder::new(d.clone());
    loop {
        let mut moves: Vec<MoveRecord> = available_moves(b.current())
            .into_iter()
            .filter(|m| matches!(m.kind, MoveKind::RIRemove | MoveKind::RIIRemove))
            .collect();
        if moves.is_empty() {
            break;
        }
        moves.sort_by_key(|m| (m.site.len(), m.site.iter().map(|x| x.crossing()).min()));
        b.push(moves.swap_remove(0))?;
    }
    let (trace, out) = b.finish();
    let unbounded = crate::moves::base_faces(&out);
    if let Some(f) = out.faces().into_iter().find(|f| f.sides() <= 2 && !unbounded.contains(f)) {
        return Err(SimplifyError::Invariant(format!("bounded {}-gon left after reduction", f.sides())));
    }
    Ok((out, trace))
}

/// Charges `4 - n` on every n-gon of the loop interior, then each triangle
/// hands 1/3 across each side to the disc face there.
pub fn discharge(d: &PlanarDiagram, lt: &LoopTangle) -> Result<DischargeReport, SimplifyError> {
    let disc = Disc::new(d, lt);
    if let Some(f) = disc.faces.iter().find(|f| f.sides() <= 2) {
        return Err(SimplifyError::NotMinimal(format!("a {}-gon", f.sides())));
    }
    let mut thirds: Vec<i64> = disc.faces.iter().map(|f| 3 * (4 - f.sides() as i64)).collect();
    for (i, f) in disc.faces.iter().enumerate() {
        if f.sides() != 3 {
            continue;
        }
        for x in f.darts() {
            if let Some(j) = disc.across(d, *x) {
                thirds[i] -= 1;
                thirds[j] += 1;
            }
        }
    }
    let triangle_neighbours = |f: &Face| -> Vec<Face> {
        let mut out: Vec<Face> = f
            .darts()
            .iter()
            .filter_map(|x| disc.across(d, *x))
            .map(|j| disc.faces[j].clone())
            .filter(|g| g.sides() == 3 && g != f)
            .collect();
        out.dedup();
        out
    };
    let mut structures = Vec::new();
    let mut pairs = BTreeSet::new();
    for (i, f) in disc.faces.iter().enumerate() {
        if thirds[i] <= 0 {
            continue;
        }
        let tris = triangle_neighbours(f);
        match f.sides() {
            3 => {
                let mut found = false;
                if f.darts().iter().any(|x| disc.is_loop_side(d, *x)) {
                    structures.push(StructureKind::TriangleOnLoop { triangle: f.clone() });
                    found = true;
                }
                for g in tris {
                    found = true;
                    let key = if *f < g { (f.clone(), g) } else { (g, f.clone()) };
                    if pairs.insert(key.clone()) {
                        structures.push(StructureKind::TriangleTrianglePair { first: key.0, second: key.1 });
                    }
                }
                if !found {
                    return Err(SimplifyError::Invariant(format!("positive triangle {f:?} of no known kind")));
                }
            }
            4 if !tris.is_empty() => {
                structures.push(StructureKind::QuadWithTriangle { quad: f.clone(), triangles: tris })
            }
            5 if tris.len() >= 4 => structures
                .push(StructureKind::PentagonWithFourTriangles { pentagon: f.clone(), triangles: tris }),
            n => {
                return Err(SimplifyError::Invariant(format!(
                    "{n}-gon keeps charge {} after discharging",
                    Thirds(thirds[i])
                )))
            }
        }
    }
    let charges = disc
        .faces
        .iter()
        .zip(&thirds)
        .map(|(f, t)| FaceCharge { face: f.clone(), sides: f.sides(), charge: Thirds(*t) })
        .collect();
    Ok(DischargeReport { census: lt.census(), charges, positive_structures: structures })
}

fn follow(d: &PlanarDiagram, disc: &Disc, triangle: &Face, exit: Dart) -> Option<Track> {
    let mut quads: Vec<Face> = Vec::new();
    let mut cur = exit;
    loop {
        let Some(j) = disc.across(d, cur) else {
            return Some(Track { triangle: triangle.clone(), exit, quads, terminal: Terminal::Loop, terminal_face: None, entry: None });
        };
        let g = &disc.faces[j];
        let entry = d.pair(cur);
        let done = |terminal| Track {
            triangle: triangle.clone(),
            exit,
            quads: quads.clone(),
            terminal,
            terminal_face: Some(g.clone()),
            entry: Some(entry),
        };
        match g.sides() {
            0..=2 => return None,
            3 if g == triangle => return None,
            3 => return Some(done(Terminal::Triangle)),
            4 => {
                if quads.contains(g) {
                    return None;
                }
                quads.push(g.clone());
                cur = g.starting_at(entry).expect("entry is on its face")[2];
            }
            n => return Some(done(Terminal::BigPolygon(n))),
        }
    }
}

/// Every track leaving a side of a disc triangle, followed through
/// quadrilaterals to the first face that is not one. Tracks that close up
/// on themselves are left out.
pub fn find_tracks(d: &PlanarDiagram, lt: &LoopTangle) -> Vec<Track> {
    let disc = Disc::new(d, lt);
    tracks_in(d, &disc)
}

fn tracks_in(d: &PlanarDiagram, disc: &Disc) -> Vec<Track> {
    let mut out = Vec::new();
    for f in disc.faces.iter().filter(|f| f.sides() == 3) {
        for x in f.darts() {
            out.extend(follow(d, disc, f, *x));
        }
    }
    out
}

fn expect_sides(f: &Face, n: usize, what: &str) -> Result<(), SimplifyError> {
    if f.sides() == n {
        Ok(())
    } else {
        Err(SimplifyError::SiteShape(format!("{what} has {} sides, expected {n}", f.sides())))
    }
}

/// Carries the track's triangle across its quadrilaterals by RIII. At a
/// triangle the carried triangle makes a 2-gon, removed by RII; at the loop
/// one more RIII moves a crossing out of the disc; before a larger face
/// the transport stops.
pub fn transport_triangle(d: &PlanarDiagram, track: &Track) -> Result<MoveTrace, SimplifyError> {
    let mut b = TraceBuilder::new(d.clone());
    let mut tri = d.face_of(track.exit);
    if tri != track.triangle {
        return Err(SimplifyError::SiteShape("the track does not start at its triangle".into()));
    }
    let mut exit = track.exit;
    for _ in &track.quads {
        let quad = b.current().face_of(b.current().pair(exit));
        expect_sides(&quad, 4, "track face")?;
        let far = quad.starting_at(b.current().pair(exit)).expect("entry is on its face")[2];
        b.push(record(MoveKind::RIII, &tri))?;
        tri = b.current().face_of(far);
        expect_sides(&tri, 3, "carried triangle")?;
        exit = far;
    }
    match track.terminal {
        Terminal::Triangle => {
            let target = b.current().face_of(b.current().pair(exit));
            expect_sides(&target, 3, "terminal face")?;
            let apex = target.starting_at(b.current().pair(exit)).expect("entry is on its face")[2];
            b.push(record(MoveKind::RIII, &tri))?;
            let bigon = b.current().face_of(apex);
            expect_sides(&bigon, 2, "face left by the carried triangle")?;
            b.push(record(MoveKind::RIIRemove, &bigon))?;
        }
        Terminal::Loop => {
            b.push(record(MoveKind::RIII, &tri))?;
        }
        Terminal::BigPolygon(_) => {}
    }
    Ok(b.finish().0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PentagonResolution {
    pub trace: MoveTrace,
    /// Sides of the face at the middle triangle's far corner, before the
    /// move; it gains a side.
    pub third_vertex_sides: usize,
    pub pentagons_before: usize,
    pub pentagons_after: usize,
}

/// RIII on the triangle across side `side` of a pentagon, when the sides
/// on either hand also carry triangles. The pentagon and those two
/// triangles become quadrilaterals.
pub fn resolve_pentagon(d: &PlanarDiagram, pentagon: &Face, side: usize) -> Result<PentagonResolution, SimplifyError> {
    expect_sides(pentagon, 5, "pentagon site")?;
    if d.face_of(pentagon.darts()[0]) != *pentagon {
        return Err(SimplifyError::SiteShape("pentagon is not a face of the diagram".into()));
    }
    let ds = pentagon.darts();
    let across = |i: usize| d.face_of(d.pair(ds[i % 5]));
    let middle = across(side);
    for (i, what) in [(side + 4, "left neighbour"), (side, "middle triangle"), (side + 1, "right neighbour")] {
        expect_sides(&across(i), 3, what)?;
    }
    let apex = middle.starting_at(d.pair(ds[side % 5])).expect("entry is on its face")[2];
    let third = d.face_of(apex.opposite());
    let pentagons = |e: &PlanarDiagram| e.faces().iter().filter(|f| f.sides() == 5).count();
    let mut b = TraceBuilder::new(d.clone());
    b.push(record(MoveKind::RIII, &middle))?;
    let (trace, after) = b.finish();
    Ok(PentagonResolution {
        trace,
        third_vertex_sides: third.sides(),
        pentagons_before: pentagons(d),
        pentagons_after: pentagons(&after),
    })
}

/// The kinds of step the driver takes, simplest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Kink,
    Bigon,
    TrianglePair,
    TriangleOnLoop,
    Track,
    Pentagon,
    Search,
    Detour,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopTangleReport {
    pub u: CrossingId,
    pub c: usize,
    pub m: usize,
    /// Disc census when the phase starts.
    pub census: FaceCensus,
    pub levels: Vec<Level>,
    /// Minimal disc states whose discharge was checked.
    pub minimal_checks: usize,
    pub anomalies: Vec<String>,
    pub moves: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplifyReport {
    #[serde(rename = "C")]
    pub crossings: usize,
    /// Moves spent removing bounded 1-gons and 2-gons between phases.
    pub reductions: usize,
    pub phases: Vec<LoopTangleReport>,
    pub total_moves: usize,
}

impl SimplifyReport {
    pub fn minimal_checks(&self) -> usize {
        self.phases.iter().map(|p| p.minimal_checks).sum()
    }

    pub fn anomalies(&self) -> usize {
        self.phases.iter().map(|p| p.anomalies.len()).sum()
    }
}

/// `(crossings, disc crossings, disc pentagons)`; each driver step must
/// lower it.
type Metric = (usize, usize, usize);

fn metric(d: &PlanarDiagram, lt: &LoopTangle) -> Metric {
    (d.crossing_count(), lt.c(), lt.census().get(5))
}

enum Action {
    Remove(Level, MoveRecord),
    Transport(Level, Track),
}

/// The first simplifying step by the hierarchy, ignoring faces at `u`.
fn find_action(d: &PlanarDiagram, disc: &Disc) -> Option<Action> {
    let mut small: Vec<&Face> = disc.faces.iter().filter(|f| f.sides() <= 2 && !disc.touches_u(f)).collect();
    small.sort_by_key(|f| (f.sides(), f.min_crossing()));
    for f in small {
        match f.sides() {
            1 => return Some(Action::Remove(Level::Kink, record(MoveKind::RIRemove, f))),
            2 if rii_remove_legal(d, f) => return Some(Action::Remove(Level::Bigon, record(MoveKind::RIIRemove, f))),
            _ => {}
        }
    }
    let mut tracks: Vec<Track> = tracks_in(d, disc)
        .into_iter()
        .filter(|t| t.simplifies() && !t.touches(disc.u) && riii_legal(d, &t.triangle))
        .collect();
    tracks.sort_by_key(|t| (t.length(), t.terminal, t.triangle.min_crossing(), t.exit));
    let t = tracks.into_iter().next()?;
    let level = match (t.length(), t.terminal) {
        (0, Terminal::Triangle) => Level::TrianglePair,
        (0, _) => Level::TriangleOnLoop,
        _ => Level::Track,
    };
    Some(Action::Transport(level, t))
}

/// A working diagram for one loop, checked after every move.
struct Driver {
    b: TraceBuilder,
    u: CrossingId,
    report: LoopTangleReport,
}

impl Driver {
    fn d(&self) -> &PlanarDiagram {
        self.b.current()
    }

    fn push(&mut self, m: MoveRecord) -> Result<(), SimplifyError> {
        let before = self.d().crossing_count();
        let r = self.b.push(m)?;
        if r.crossings_after > before {
            return Err(SimplifyError::Invariant(format!("{} raised the crossing count", r.kind)));
        }
        if self.d().is_alive(self.u) {
            self.loop_tangle()?;
        }
        Ok(())
    }

    fn push_all(&mut self, t: MoveTrace) -> Result<(), SimplifyError> {
        for r in t.records {
            self.push(r)?;
        }
        Ok(())
    }

    /// The loop at `u`, with the disc Euler identity checked.
    fn loop_tangle(&self) -> Result<LoopTangle, SimplifyError> {
        let lt = detect_loop_tangle(self.d(), self.u)?;
        let (ok, residual) = euler_identity_check(&lt.census());
        if !ok {
            return Err(SimplifyError::Invariant(format!("disc Euler residual {residual}")));
        }
        Ok(lt)
    }

    fn act(&mut self, a: Action) -> Result<(), SimplifyError> {
        match a {
            Action::Remove(level, m) => {
                self.report.levels.push(level);
                self.push(m)
            }
            Action::Transport(level, t) => {
                self.report.levels.push(level);
                let trace = transport_triangle(self.d(), &t)?;
                self.push_all(trace)
            }
        }
    }

    /// Carries triangles next to a pentagon that has tracks arriving on
    /// three consecutive sides, then resolves it. Returns false, leaving
    /// the diagram as it was, when no pentagon qualifies or the result
    /// does not improve the metric.
    fn try_pentagon(&mut self, lt: &LoopTangle) -> Result<bool, SimplifyError> {
        let disc = Disc::new(self.d(), lt);
        let census = lt.census();
        if census.n_max() == 5 && census.get(3) <= census.get(5) {
            return Err(SimplifyError::Invariant("fewer triangles than pentagons in a minimal disc".into()));
        }
        let star: usize = census.counts.iter().filter(|(n, _)| **n >= 5).map(|(n, f)| n * f).sum();
        if 3 * census.get(3) > star {
            self.report.anomalies.push(format!(
                "3 f3 = {} exceeds the big-face sides {star} but no track simplifies",
                3 * census.get(3)
            ));
        }
        let mut pentagons: Vec<Face> =
            disc.faces.iter().filter(|f| f.sides() == 5 && !disc.touches_u(f)).cloned().collect();
        pentagons.sort_by_key(|f| f.min_crossing());
        let before = metric(self.d(), lt);
        for p in pentagons {
            let Some(side) = pentagon_window(self.d(), &disc, &p) else { continue };
            let saved = (self.b.clone(), self.report.clone());
            match self.stage_pentagon(&p, side) {
                Ok(true) => {
                    let lt2 = self.loop_tangle()?;
                    let disc2 = Disc::new(self.d(), &lt2);
                    if metric(self.d(), &lt2) < before || find_action(self.d(), &disc2).is_some() {
                        return Ok(true);
                    }
                }
                Ok(false) | Err(SimplifyError::SiteShape(_)) => {}
                Err(e) => return Err(e),
            }
            self.b = saved.0;
            self.report = saved.1;
        }
        Ok(false)
    }

    fn stage_pentagon(&mut self, p: &Face, side: usize) -> Result<bool, SimplifyError> {
        let anchor = p.darts()[0];
        for _ in 0..3 {
            let lt = self.loop_tangle()?;
            let disc = Disc::new(self.d(), &lt);
            let live = self.d().face_of(anchor);
            expect_sides(&live, 5, "staged pentagon")?;
            let ds = live.darts();
            let shift = ds.iter().position(|x| *x == anchor).unwrap_or(0);
            let want: Vec<usize> = [side + 4, side, side + 1].iter().map(|i| (i + shift) % 5).collect();
            let missing: Vec<usize> = want
                .iter()
                .copied()
                .filter(|i| disc.across(self.d(), ds[*i]).map(|j| disc.faces[j].sides()) != Some(3))
                .collect();
            if missing.is_empty() {
                self.report.levels.push(Level::Pentagon);
                let r = resolve_pentagon(self.d(), &live, want[1])?;
                self.push_all(r.trace)?;
                return Ok(true);
            }
            let tracks = tracks_in(self.d(), &disc);
            let arriving = |i: usize| {
                tracks
                    .iter()
                    .filter(|t| t.entry == Some(self.d().pair(ds[i])) && !t.touches(self.u))
                    .min_by_key(|t| t.length())
                    .cloned()
            };
            let Some(t) = missing.iter().find_map(|i| arriving(*i)) else { return Ok(false) };
            self.report.levels.push(Level::Track);
            let trace = transport_triangle(self.d(), &t)?;
            self.push_all(trace)?;
        }
        Ok(false)
    }

    /// Breadth-first search over RIII moves on disc triangles for a state
    /// where the hierarchy finds a simplifying step.
    fn search(&mut self, limit: usize) -> Result<bool, SimplifyError> {
        let u = self.u;
        let start = self.d().clone();
        let mut seen = HashSet::from([serialize_pd(&start.canonical())]);
        let mut queue = VecDeque::from([(start, Vec::<MoveRecord>::new())]);
        let mut expanded = 0;
        while let Some((s, path)) = queue.pop_front() {
            expanded += 1;
            if expanded > limit {
                break;
            }
            let Ok(lt_s) = detect_loop_tangle(&s, u) else { continue };
            let disc = Disc::new(&s, &lt_s);
            if !path.is_empty() && find_action(&s, &disc).is_some() {
                self.report.levels.push(Level::Search);
                self.report.anomalies.push(format!("search found a way after {} RIII moves", path.len()));
                for r in path {
                    self.push(r)?;
                }
                return Ok(true);
            }
            for f in disc.faces.iter().filter(|f| f.sides() == 3 && !disc.touches_u(f) && riii_legal(&s, f)) {
                let mut next = s.clone();
                let Ok(r) = crate::moves::perform(&mut next, record(MoveKind::RIII, f)) else { continue };
                if seen.insert(serialize_pd(&next.canonical())) {
                    let mut p = path.clone();
                    p.push(r);
                    queue.push_back((next, p));
                }
            }
        }
        Ok(false)
    }
}

/// A side of `p` such that it and both neighbouring sides have a triangle
/// next to them or a track arriving there.
fn pentagon_window(d: &PlanarDiagram, disc: &Disc, p: &Face) -> Option<usize> {
    let ds = p.darts();
    let entries: HashSet<Dart> = tracks_in(d, disc)
        .into_iter()
        .filter(|t| !t.touches(disc.u) && t.terminal_face.as_ref() == Some(p))
        .filter_map(|t| t.entry)
        .collect();
    let covered: Vec<bool> = (0..5)
        .map(|i| {
            disc.across(d, ds[i]).map(|j| disc.faces[j].sides()) == Some(3) || entries.contains(&d.pair(ds[i]))
        })
        .collect();
    (0..5).find(|i| covered[(i + 4) % 5] && covered[*i] && covered[(i + 1) % 5])
}

/// Empties the disc of the loop at `lt` without adding crossings, then
/// takes the loop off.
pub fn simplify_loop_tangle(d: &PlanarDiagram, lt: &LoopTangle) -> Result<MoveTrace, SimplifyError> {
    Ok(simplify_loop_tangle_report(d, lt)?.0)
}

pub fn simplify_loop_tangle_report(
    d: &PlanarDiagram,
    lt: &LoopTangle,
) -> Result<(MoveTrace, LoopTangleReport), SimplifyError> {
    let big_c = d.crossing_count();
    let limit = (7 * big_c + 1) * big_c;
    let mut dr = Driver {
        b: TraceBuilder::new(d.clone()),
        u: lt.base_crossing,
        report: LoopTangleReport {
            u: lt.base_crossing,
            c: lt.c(),
            m: lt.m(),
            census: lt.census(),
            levels: Vec::new(),
            minimal_checks: 0,
            anomalies: Vec::new(),
            moves: 0,
        },
    };
    loop {
        let lt = dr.loop_tangle()?;
        let disc = Disc::new(dr.d(), &lt);
        if disc.is_minimal() && lt.c() > 0 {
            let rep = discharge(dr.d(), &lt)?;
            if rep.positive_structures.is_empty() || rep.total() != Thirds(9) {
                return Err(SimplifyError::Invariant(format!(
                    "discharge left total {} with {} positive structures",
                    rep.total(),
                    rep.positive_structures.len()
                )));
            }
            if disc.count(1) + disc.count(2) == 0 && disc.count(3) < 3 {
                return Err(SimplifyError::Invariant("a minimal disc with fewer than three triangles".into()));
            }
            dr.report.minimal_checks += 1;
        }
        if let Some(a) = find_action(dr.d(), &disc) {
            dr.act(a)?;
            continue;
        }
        if lt.c() == 0 {
            let plan = loop_detour_sequence(dr.d(), &lt)?;
            dr.report.levels.push(Level::Detour);
            dr.push_all(plan.trace)?;
            break;
        }
        if dr.try_pentagon(&lt)? {
            continue;
        }
        if !dr.search(limit.max(1))? {
            return Err(SimplifyError::Stuck { crossings: lt.c() });
        }
    }
    let (trace, _) = dr.b.finish();
    let mut report = dr.report;
    report.moves = trace.len();
    Ok((trace, report))
}

/// Simplifies an ascending or descending knot diagram to the crossingless
/// unknot without ever adding a crossing.
pub fn simplify_ascending(d: &PlanarDiagram) -> Result<MoveTrace, SimplifyError> {
    Ok(simplify_ascending_report(d)?.0)
}

pub fn simplify_ascending_report(d: &PlanarDiagram) -> Result<(MoveTrace, SimplifyReport), SimplifyError> {
    let comps = d.component_count();
    if d.crossing_count() > 0 && comps != 1 {
        return Err(SimplifyError::NotAKnot(comps));
    }
    let start = d.forward_view();
    let mut work = if is_ascending(&start.gauss()) {
        start
    } else if is_descending(&start.gauss()) {
        start.turned_around()
    } else {
        return Err(SimplifyError::NotAscending);
    };
    let mut trace = MoveTrace::new(d.clone());
    let mut phases = Vec::new();
    let mut reductions = 0;
    let extend = |trace: &mut MoveTrace, work: &mut PlanarDiagram, t: MoveTrace| -> Result<(), SimplifyError> {
        for r in t.records {
            *work = crate::moves::apply(work, &r)?;
            trace.records.push(r);
        }
        Ok(())
    };
    while work.crossing_count() > 0 {
        let (_, t) = reduce_to_minimal(&work)?;
        reductions += t.len();
        extend(&mut trace, &mut work, t)?;
        if work.crossing_count() == 0 {
            break;
        }
        let (u_label, _) = find_first_loop(&work.gauss())?;
        let u = work.crossing_order()[u_label as usize - 1];
        let lt = detect_loop_tangle(&work, u)?;
        let before = work.crossing_count();
        let (t, rep) = simplify_loop_tangle_report(&work, &lt)?;
        extend(&mut trace, &mut work, t)?;
        if work.crossing_count() >= before {
            return Err(SimplifyError::Invariant("a loop phase removed no crossing".into()));
        }
        log::debug!("loop-tangle phase at crossing {}: {} moves, levels {:?}", rep.u, rep.moves, rep.levels);
        phases.push(rep);
    }
    let report = SimplifyReport { crossings: d.crossing_count(), reductions, total_moves: trace.len(), phases };
    Ok((trace, report))
}
