use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::faces::{Face, FaceCensus, Region};
use super::gauss::{GaussCode, GaussLetter, Pass};

pub type CrossingId = usize;
pub type ComponentId = usize;

/// A half-edge: slot `0..4` at a crossing, numbered counterclockwise.
/// Slots `{0, 2}` and `{1, 3}` are the two strands through the crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dart(pub usize);

impl Dart {
    pub fn new(crossing: CrossingId, slot: usize) -> Dart {
        debug_assert!(slot < 4);
        Dart(4 * crossing + slot)
    }

    pub fn crossing(self) -> CrossingId {
        self.0 / 4
    }

    pub fn slot(self) -> usize {
        self.0 % 4
    }

    /// The dart `k` slots further counterclockwise at the same crossing.
    pub fn turn(self, k: usize) -> Dart {
        Dart::new(self.crossing(), (self.slot() + k) % 4)
    }

    /// The other end of the strand through this crossing.
    pub fn opposite(self) -> Dart {
        self.turn(2)
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.crossing(), self.slot())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[serde(rename = "fwd")]
    Forward,
    #[serde(rename = "bwd")]
    Backward,
}

/// A point on an edge, given by the dart the traversal enters next.
/// Going forward that dart is an incoming one; going backward it is outgoing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Basepoint {
    pub dart: Dart,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    DeadDart(Dart),
    PairingFixedPoint(Dart),
    PairingNotInvolution(Dart),
    Orientation(Dart),
    Euler { component: usize, vertices: usize, edges: usize, faces: usize },
    RepeatedEdgeInFace { face: Vec<Dart> },
    Basepoint(String),
    Component(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DeadDart(d) => write!(f, "dart {d} refers to a removed crossing"),
            Violation::PairingFixedPoint(d) => write!(f, "edge pairing fixes dart {d}"),
            Violation::PairingNotInvolution(d) => write!(f, "edge pairing is not an involution at {d}"),
            Violation::Orientation(d) => write!(f, "inconsistent orientation at {d}"),
            Violation::Euler { component, vertices, edges, faces } => write!(
                f,
                "component {component}: V - E + F = {vertices} - {edges} + {faces} != 2"
            ),
            Violation::RepeatedEdgeInFace { face } => write!(f, "face {face:?} repeats an edge"),
            Violation::Basepoint(s) => write!(f, "basepoint: {s}"),
            Violation::Component(s) => write!(f, "components: {s}"),
        }
    }
}

/// An oriented link diagram stored as a 4-valent combinatorial map.
///
/// Crossings are never renumbered while moves are applied; removed crossings
/// leave a tombstone until [`PlanarDiagram::canonical`] is called.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanarDiagram {
    pair: Vec<Dart>,
    incoming: Vec<bool>,
    over_even: Vec<bool>,
    alive: Vec<bool>,
    base: Option<Basepoint>,
    free_loops: usize,
}

impl PlanarDiagram {
    /// The empty diagram (no crossings, no loops).
    pub fn empty() -> Self {
        PlanarDiagram {
            pair: Vec::new(),
            incoming: Vec::new(),
            over_even: Vec::new(),
            alive: Vec::new(),
            base: None,
            free_loops: 0,
        }
    }

    /// The zero-crossing unknot.
    pub fn unknot() -> Self {
        PlanarDiagram { free_loops: 1, ..Self::empty() }
    }

    /// Builds a diagram from raw arrays and rejects it unless it validates.
    pub fn from_parts(
        pair: Vec<Dart>,
        incoming: Vec<bool>,
        over_even: Vec<bool>,
        base: Option<Basepoint>,
        free_loops: usize,
    ) -> Result<Self, Vec<Violation>> {
        let d = Self::from_parts_unchecked(pair, incoming, over_even, base, free_loops);
        let v = d.validate();
        if v.is_empty() {
            Ok(d)
        } else {
            Err(v)
        }
    }

    pub(crate) fn from_parts_unchecked(
        pair: Vec<Dart>,
        incoming: Vec<bool>,
        over_even: Vec<bool>,
        base: Option<Basepoint>,
        free_loops: usize,
    ) -> Self {
        let n = over_even.len();
        PlanarDiagram { pair, incoming, over_even, alive: vec![true; n], base, free_loops }
    }

    /// Number of crossing slots ever allocated, including removed ones.
    pub fn capacity(&self) -> usize {
        self.alive.len()
    }

    pub fn is_alive(&self, c: CrossingId) -> bool {
        self.alive.get(c).copied().unwrap_or(false)
    }

    pub fn crossings(&self) -> impl Iterator<Item = CrossingId> + '_ {
        (0..self.alive.len()).filter(move |&c| self.alive[c])
    }

    pub fn crossing_count(&self) -> usize {
        self.alive.iter().filter(|a| **a).count()
    }

    pub fn edge_count(&self) -> usize {
        2 * self.crossing_count()
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        self.crossings().flat_map(|c| (0..4).map(move |s| Dart::new(c, s)))
    }

    pub fn pair(&self, d: Dart) -> Dart {
        self.pair[d.0]
    }

    pub fn is_incoming(&self, d: Dart) -> bool {
        self.incoming[d.0]
    }

    /// True when the strand through slots `{0, 2}` of `c` is the overstrand.
    pub fn over_even(&self, c: CrossingId) -> bool {
        self.over_even[c]
    }

    /// Pass of the strand that uses dart `d`.
    pub fn pass_at(&self, d: Dart) -> Pass {
        if self.over_even[d.crossing()] == d.slot().is_multiple_of(2) {
            Pass::Over
        } else {
            Pass::Under
        }
    }

    /// The incoming dart of the understrand at `c`.
    pub fn under_in(&self, c: CrossingId) -> Dart {
        let first = if self.over_even[c] { 1 } else { 0 };
        let d = Dart::new(c, first);
        if self.incoming[d.0] {
            d
        } else {
            d.opposite()
        }
    }

    /// The incoming dart of the overstrand at `c`.
    pub fn over_in(&self, c: CrossingId) -> Dart {
        let d = self.under_in(c).turn(1);
        if self.incoming[d.0] {
            d
        } else {
            d.opposite()
        }
    }

    /// Oriented crossing sign: +1 when the overstrand, entering, has the
    /// incoming understrand on its clockwise side.
    pub fn sign(&self, c: CrossingId) -> i32 {
        let u = self.under_in(c);
        let o = self.over_in(c);
        if o == u.turn(1) {
            -1
        } else {
            1
        }
    }

    pub fn basepoint(&self) -> Option<Basepoint> {
        self.base
    }

    pub fn set_basepoint(&mut self, base: Option<Basepoint>) {
        self.base = base;
    }

    /// Basepoint on the edge ending at incoming dart `d`, going forward.
    pub fn with_basepoint(mut self, dart: Dart, direction: Direction) -> Self {
        let dart = match direction {
            Direction::Forward if !self.incoming[dart.0] => self.pair(dart),
            Direction::Backward if self.incoming[dart.0] => self.pair(dart),
            _ => dart,
        };
        self.base = Some(Basepoint { dart, direction });
        self
    }

    /// Following the strand: the next dart entered after entering at `d`.
    pub fn next_entry(&self, d: Dart) -> Dart {
        self.pair(d.opposite())
    }

    /// Entry darts met when walking from `start` until returning to it.
    pub fn walk(&self, start: Dart) -> Vec<Dart> {
        let mut out = vec![start];
        let mut d = self.next_entry(start);
        while d != start {
            out.push(d);
            d = self.next_entry(d);
            debug_assert!(out.len() <= 4 * self.alive.len() + 1);
        }
        out
    }

    /// Link components as cycles of incoming darts in orientation order.
    /// Component ids follow the smallest incoming dart of each cycle; each
    /// cycle starts at the diagram basepoint when it lies on it.
    pub fn components(&self) -> Vec<Vec<Dart>> {
        let mut seen = vec![false; self.pair.len()];
        let mut comps = Vec::new();
        for d in self.darts() {
            if !self.incoming[d.0] || seen[d.0] {
                continue;
            }
            let mut cyc = self.walk(d);
            for x in &cyc {
                seen[x.0] = true;
            }
            if let Some(b) = self.base {
                let fwd = if b.direction == Direction::Forward { b.dart } else { self.pair(b.dart) };
                if let Some(pos) = cyc.iter().position(|x| *x == fwd) {
                    cyc.rotate_left(pos);
                }
            }
            comps.push(cyc);
        }
        comps
    }

    pub fn component_count(&self) -> usize {
        self.components().len() + self.free_loops
    }

    /// Component index of every crossing strand: map from dart to component.
    pub fn component_of_darts(&self) -> HashMap<Dart, ComponentId> {
        let mut m = HashMap::new();
        for (i, cyc) in self.components().iter().enumerate() {
            for d in cyc {
                m.insert(*d, i);
                m.insert(d.opposite(), i);
            }
        }
        m
    }

    /// Component holding the basepoint.
    pub fn base_component(&self) -> Option<ComponentId> {
        let b = self.base?;
        self.component_of_darts().get(&b.dart).copied()
    }

    /// Entry darts read from the basepoint in its direction.
    pub fn base_walk(&self) -> Vec<Dart> {
        match self.base {
            Some(b) => self.walk(b.dart),
            None => Vec::new(),
        }
    }

    /// Gauss code of the basepoint component read from the basepoint.
    /// Crossings with other components are left out.
    pub fn gauss(&self) -> GaussCode {
        match self.base {
            Some(b) => self.gauss_from(b.dart),
            None => GaussCode::empty(),
        }
    }

    /// Gauss code read from an entry dart; labels follow first meeting.
    pub fn gauss_from(&self, start: Dart) -> GaussCode {
        let walk = self.walk(start);
        let mut count: HashMap<CrossingId, usize> = HashMap::new();
        for d in &walk {
            *count.entry(d.crossing()).or_default() += 1;
        }
        let letters = walk
            .iter()
            .filter(|d| count[&d.crossing()] == 2)
            .map(|d| GaussLetter { label: d.crossing() as u32 + 1, pass: self.pass_at(*d) })
            .collect();
        GaussCode::from_normalized_unchecked(letters)
    }

    /// Crossing ids in order of first meeting from the basepoint.
    pub fn crossing_order(&self) -> Vec<CrossingId> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for d in self.base_walk() {
            if seen.insert(d.crossing()) {
                out.push(d.crossing());
            }
        }
        out
    }

    /// The next dart counterclockwise around the face to the left of `d`.
    pub fn face_next(&self, d: Dart) -> Dart {
        self.pair(d).turn(3)
    }

    /// All faces, each starting at its smallest dart, sorted.
    pub fn faces(&self) -> Vec<Face> {
        let mut seen = vec![false; self.pair.len()];
        let mut out = Vec::new();
        for d in self.darts() {
            if seen[d.0] {
                continue;
            }
            let mut cyc = vec![d];
            seen[d.0] = true;
            let mut x = self.face_next(d);
            while x != d {
                seen[x.0] = true;
                cyc.push(x);
                x = self.face_next(x);
            }
            out.push(Face::new(cyc));
        }
        out.sort_by_key(|f| f.darts()[0]);
        out
    }

    /// Face containing dart `d`.
    pub fn face_of(&self, d: Dart) -> Face {
        let mut cyc = vec![d];
        let mut x = self.face_next(d);
        while x != d {
            cyc.push(x);
            x = self.face_next(x);
        }
        Face::new(cyc)
    }

    pub fn census(&self) -> FaceCensus {
        FaceCensus::from_faces(self.faces().iter(), Region::Sphere)
    }

    /// Connected components of the underlying graph, as crossing sets.
    pub fn graph_components(&self) -> Vec<BTreeSet<CrossingId>> {
        let mut seen = vec![false; self.alive.len()];
        let mut out = Vec::new();
        for c in self.crossings() {
            if seen[c] {
                continue;
            }
            let mut set = BTreeSet::new();
            let mut stack = vec![c];
            seen[c] = true;
            while let Some(x) = stack.pop() {
                set.insert(x);
                for s in 0..4 {
                    let y = self.pair(Dart::new(x, s)).crossing();
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            out.push(set);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.graph_components().len();
        n + self.free_loops <= 1
    }

    /// Every structural problem with the diagram; empty when valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let n = self.alive.len();
        if self.pair.len() != 4 * n || self.incoming.len() != 4 * n || self.over_even.len() != n {
            v.push(Violation::Component("array lengths disagree".into()));
            return v;
        }
        for d in self.darts() {
            let p = self.pair(d);
            if p.0 >= self.pair.len() || !self.alive[p.crossing()] {
                v.push(Violation::DeadDart(d));
                continue;
            }
            if p == d {
                v.push(Violation::PairingFixedPoint(d));
            } else if self.pair(p) != d {
                v.push(Violation::PairingNotInvolution(d));
            }
            if self.incoming[d.0] == self.incoming[d.opposite().0]
                || (p != d && self.incoming[d.0] == self.incoming[p.0])
            {
                v.push(Violation::Orientation(d));
            }
        }
        if !v.is_empty() {
            return v;
        }
        let faces = self.faces();
        let mut face_of = HashMap::new();
        for (i, f) in faces.iter().enumerate() {
            for d in f.darts() {
                face_of.insert(*d, i);
            }
            let mut edges = BTreeSet::new();
            for d in f.darts() {
                if !edges.insert(edge_key(*d, self.pair(*d))) {
                    v.push(Violation::RepeatedEdgeInFace { face: f.darts().to_vec() });
                    break;
                }
            }
        }
        for (i, comp) in self.graph_components().iter().enumerate() {
            let vertices = comp.len();
            let edges = 2 * vertices;
            let fs: BTreeSet<usize> = comp
                .iter()
                .flat_map(|c| (0..4).map(move |s| Dart::new(*c, s)))
                .map(|d| face_of[&d])
                .collect();
            if vertices + fs.len() != edges + 2 {
                v.push(Violation::Euler { component: i, vertices, edges, faces: fs.len() });
            }
        }
        if let Some(b) = self.base {
            if b.dart.0 >= self.pair.len() || !self.alive[b.dart.crossing()] {
                v.push(Violation::Basepoint("dart refers to a removed crossing".into()));
            } else {
                let want_in = b.direction == Direction::Forward;
                if self.incoming[b.dart.0] != want_in {
                    v.push(Violation::Basepoint("dart does not face the traversal".into()));
                }
            }
        } else if self.crossing_count() > 0 {
            v.push(Violation::Basepoint("missing on a diagram with crossings".into()));
        }
        v
    }

    /// Same map with every orientation reversed. A forward basepoint becomes a
    /// backward one on the same edge and vice versa, so the reading order of
    /// the basepoint is unchanged.
    pub fn reversed(&self) -> PlanarDiagram {
        let mut d = self.clone();
        for x in d.incoming.iter_mut() {
            *x = !*x;
        }
        if let Some(b) = d.base.as_mut() {
            b.direction = match b.direction {
                Direction::Forward => Direction::Backward,
                Direction::Backward => Direction::Forward,
            };
        }
        d
    }

    /// Same diagram with the basepoint re-expressed as a forward one by
    /// reversing orientation when needed.
    pub fn forward_view(&self) -> PlanarDiagram {
        match self.base {
            Some(b) if b.direction == Direction::Backward => self.reversed(),
            _ => self.clone(),
        }
    }

    /// Orientation reversed with the basepoint kept on its edge and its
    /// direction flag kept, so the code is read in reverse.
    pub fn turned_around(&self) -> PlanarDiagram {
        let mut d = self.reversed();
        if let Some(b) = self.base {
            d.base = Some(Basepoint { dart: self.pair(b.dart), direction: b.direction });
        }
        d
    }

    /// Every crossing switched.
    pub fn mirrored(&self) -> PlanarDiagram {
        let mut d = self.clone();
        for x in d.over_even.iter_mut() {
            *x = !*x;
        }
        d
    }

    /// Renumbers crossings `0..n` by first meeting from the basepoint (other
    /// components after, in component order) and rotates slots so slot 0 is
    /// the incoming understrand.
    pub fn canonical(&self) -> PlanarDiagram {
        let mut order: Vec<CrossingId> = Vec::new();
        let mut seen = vec![false; self.alive.len()];
        for cyc in self.ordered_components() {
            for d in cyc {
                if !seen[d.crossing()] {
                    seen[d.crossing()] = true;
                    order.push(d.crossing());
                }
            }
        }
        let n = order.len();
        let mut new_id = vec![usize::MAX; self.alive.len()];
        let mut shift = vec![0usize; self.alive.len()];
        for (i, &c) in order.iter().enumerate() {
            new_id[c] = i;
            shift[c] = self.under_in(c).slot();
        }
        let map = |d: Dart| Dart::new(new_id[d.crossing()], (d.slot() + 4 - shift[d.crossing()]) % 4);
        let mut pair = vec![Dart(0); 4 * n];
        let mut incoming = vec![false; 4 * n];
        let mut over_even = vec![false; n];
        for &c in &order {
            for s in 0..4 {
                let d = Dart::new(c, s);
                let nd = map(d);
                pair[nd.0] = map(self.pair(d));
                incoming[nd.0] = self.incoming[d.0];
            }
            over_even[new_id[c]] = false;
        }
        let base = self.base.map(|b| Basepoint { dart: map(b.dart), direction: b.direction });
        PlanarDiagram::from_parts_unchecked(pair, incoming, over_even, base, self.free_loops)
    }

    /// Components in a deterministic reading order: the basepoint component
    /// first, read from the basepoint; each later component is the one
    /// meeting the earliest already-read crossing, read from that crossing.
    pub fn ordered_components(&self) -> Vec<Vec<Dart>> {
        let mut rest = self.components();
        let mut out: Vec<Vec<Dart>> = Vec::new();
        let mut rank: HashMap<CrossingId, usize> = HashMap::new();
        if let Some(b) = self.base {
            let fwd = if b.direction == Direction::Forward { b.dart } else { self.pair(b.dart) };
            if let Some(i) = rest.iter().position(|c| c.contains(&fwd)) {
                out.push(rest.remove(i));
            }
        }
        let note = |cyc: &Vec<Dart>, rank: &mut HashMap<CrossingId, usize>| {
            for d in cyc {
                let n = rank.len();
                rank.entry(d.crossing()).or_insert(n);
            }
        };
        if let Some(c) = out.first() {
            note(c, &mut rank);
        }
        while !rest.is_empty() {
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, cyc) in rest.iter().enumerate() {
                for (j, d) in cyc.iter().enumerate() {
                    if let Some(&r) = rank.get(&d.crossing()) {
                        if best.is_none_or(|b| r < b.0) {
                            best = Some((r, i, j));
                        }
                    }
                }
            }
            let (i, j) = match best {
                Some((_, i, j)) => (i, j),
                None => (0, 0),
            };
            let mut cyc = rest.remove(i);
            cyc.rotate_left(j);
            note(&cyc, &mut rank);
            out.push(cyc);
        }
        out
    }

    /// Over/under data as a map from crossing to the over-pair flag.
    pub fn over_flags(&self) -> BTreeMap<CrossingId, bool> {
        self.crossings().map(|c| (c, self.over_even[c])).collect()
    }

    // --- mutation used by the move engine and the robot ---

    /// Makes the strand using dart `d` pass over (or under) at its crossing.
    pub(crate) fn set_pass(&mut self, d: Dart, pass: Pass) {
        let even = d.slot().is_multiple_of(2);
        self.over_even[d.crossing()] = match pass {
            Pass::Over => even,
            Pass::Under => !even,
        };
    }

    pub(crate) fn set_incoming(&mut self, d: Dart, v: bool) {
        self.incoming[d.0] = v;
    }

    pub(crate) fn link(&mut self, a: Dart, b: Dart) {
        self.pair[a.0] = b;
        self.pair[b.0] = a;
    }

    pub(crate) fn push_crossing(&mut self, over_even: bool, incoming: [bool; 4]) -> CrossingId {
        let c = self.alive.len();
        self.alive.push(true);
        self.over_even.push(over_even);
        for (s, inc) in incoming.iter().enumerate() {
            self.pair.push(Dart::new(c, s));
            self.incoming.push(*inc);
        }
        c
    }

    pub(crate) fn kill(&mut self, c: CrossingId) {
        self.alive[c] = false;
    }

    pub(crate) fn add_free_loops(&mut self, n: usize) {
        self.free_loops += n;
    }

    pub(crate) fn set_free_loops(&mut self, n: usize) {
        self.free_loops = n;
    }
}

/// Undirected edge key.
pub fn edge_key(a: Dart, b: Dart) -> (Dart, Dart) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
