//! Checkerboard graphs of diagrams, their text form, and the medial
//! construction back to a diagram.
//!
//! A corner of a crossing is the region between slot `k` and slot `k + 1`;
//! it is named by dart `k`. A corner is black or white, and corners on
//! either side of an edge differ. Each black face is a vertex and each
//! crossing an edge joining its two black corners. The edge is `+` when
//! its black corners are the ones swept by turning the overstrand
//! counterclockwise, i.e. the corners named by the over darts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{Basepoint, Dart, Direction, Pass, PlanarDiagram};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("the diagram is not connected")]
    Disconnected,
    #[error("the faces admit no checkerboard colouring")]
    NotColourable,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("the graph has no rotation system")]
    NoRotation,
    #[error("bad rotation system: {0}")]
    BadRotation(String),
    #[error("the graph is not connected")]
    GraphDisconnected,
    #[error("the medial diagram is invalid: {0}")]
    Medial(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shading {
    /// The colour class with fewer faces. On a tie, the class of the
    /// corner at the lowest dart.
    Black,
    White,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignedEdge {
    pub id: usize,
    pub ends: [usize; 2],
    pub sign: i8,
}

/// One end of an edge: `end` indexes `SignedEdge::ends`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfEdge {
    pub edge: usize,
    pub end: u8,
}

/// A signed multigraph, optionally with a rotation system: the cyclic
/// order of half-edges around each vertex. Loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedPlaneGraph {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeMap<usize, SignedEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<BTreeMap<usize, Vec<HalfEdge>>>,
}

impl SignedPlaneGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.values().map(|e| e.ends.iter().filter(|x| **x == v).count()).sum()
    }

    /// Vertices as multisets of incident edge ids (loops twice), sorted,
    /// with the signed edge list. Two graphs with equal keys are the same
    /// graph up to renaming vertices.
    pub fn shape(&self) -> (Vec<Vec<usize>>, Vec<(usize, i8)>) {
        let mut inc: BTreeMap<usize, Vec<usize>> = self.vertices.iter().map(|v| (*v, Vec::new())).collect();
        for e in self.edges.values() {
            for v in e.ends {
                inc.entry(v).or_default().push(e.id);
            }
        }
        let mut vs: Vec<Vec<usize>> = inc
            .into_values()
            .map(|mut v| {
                v.sort_unstable();
                v
            })
            .collect();
        vs.sort();
        (vs, self.edges.values().map(|e| (e.id, e.sign)).collect())
    }

    pub fn same_shape(&self, other: &SignedPlaneGraph) -> bool {
        self.shape() == other.shape()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else { return true };
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for e in self.edges.values() {
            adj.entry(e.ends[0]).or_default().push(e.ends[1]);
            adj.entry(e.ends[1]).or_default().push(e.ends[0]);
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in adj.get(&v).into_iter().flatten() {
                if seen.insert(*w) {
                    stack.push(*w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Checks that each half-edge appears exactly once, at its own vertex.
    pub fn check_rotation(&self) -> Result<(), GraphError> {
        let rot = self.rotation.as_ref().ok_or(GraphError::NoRotation)?;
        let mut seen = BTreeSet::new();
        for (v, hs) in rot {
            if !self.vertices.contains(v) {
                return Err(GraphError::BadRotation(format!("vertex {v} does not exist")));
            }
            for h in hs {
                let e = self.edges.get(&h.edge).ok_or_else(|| GraphError::BadRotation(format!("edge {} does not exist", h.edge)))?;
                if h.end > 1 || e.ends[h.end as usize] != *v {
                    return Err(GraphError::BadRotation(format!("{}.{} is not at vertex {v}", h.edge, h.end)));
                }
                if !seen.insert(*h) {
                    return Err(GraphError::BadRotation(format!("{}.{} is listed twice", h.edge, h.end)));
                }
            }
        }
        if seen.len() != 2 * self.edges.len() {
            return Err(GraphError::BadRotation("some half-edges are not listed".into()));
        }
        Ok(())
    }

    /// Faces of the embedding as cycles of half-edges: after arriving
    /// along an edge, leave by the next half-edge in the rotation there.
    pub fn faces(&self) -> Result<Vec<Vec<HalfEdge>>, GraphError> {
        self.check_rotation()?;
        let rot = self.rotation.as_ref().expect("checked");
        let mut next_at: HashMap<HalfEdge, HalfEdge> = HashMap::new();
        for hs in rot.values() {
            for (i, h) in hs.iter().enumerate() {
                next_at.insert(*h, hs[(i + 1) % hs.len()]);
            }
        }
        let mut seen = BTreeSet::new();
        let mut faces = Vec::new();
        for h in next_at.keys().copied().collect::<BTreeSet<_>>() {
            if seen.contains(&h) {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = h;
            while seen.insert(x) {
                cyc.push(x);
                x = next_at[&HalfEdge { edge: x.edge, end: 1 - x.end }];
            }
            faces.push(cyc);
        }
        Ok(faces)
    }

    /// The planar dual with every sign negated: one vertex per face, and
    /// each edge joining the faces on its two sides. Without a rotation
    /// system there are no faces to use.
    pub fn dual(&self) -> Result<SignedPlaneGraph, GraphError> {
        let faces = self.faces()?;
        let mut face_of: HashMap<HalfEdge, usize> = HashMap::new();
        for (i, f) in faces.iter().enumerate() {
            for h in f {
                face_of.insert(*h, i);
            }
        }
        let edges = self
            .edges
            .values()
            .map(|e| {
                let a = face_of[&HalfEdge { edge: e.id, end: 0 }];
                let b = face_of[&HalfEdge { edge: e.id, end: 1 }];
                (e.id, SignedEdge { id: e.id, ends: [a, b], sign: -e.sign })
            })
            .collect();
        let vertices = if faces.is_empty() { BTreeSet::from([0]) } else { (0..faces.len()).collect() };
        Ok(SignedPlaneGraph { vertices, edges, rotation: None })
    }
}

impl fmt::Display for SignedPlaneGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            writeln!(f, "v {v}")?;
        }
        for e in self.edges.values() {
            let s = if e.sign >= 0 { '+' } else { '-' };
            writeln!(f, "e {} {} {} {s}", e.id, e.ends[0], e.ends[1])?;
        }
        if let Some(rot) = &self.rotation {
            for (v, hs) in rot {
                if hs.is_empty() {
                    continue;
                }
                write!(f, "r {v}")?;
                for h in hs {
                    write!(f, " {}.{}", h.edge, h.end)?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Parses `v <id>`, `e <id> <v1> <v2> [+|-]` and optional rotation lines
/// `r <v> <edge>.<end> ...`. Blank lines and `#` comments are skipped. If
/// any rotation line is present, the rotation system must be complete.
pub fn parse_signed_graph(text: &str) -> Result<SignedPlaneGraph, GraphError> {
    let mut g = SignedPlaneGraph { vertices: BTreeSet::new(), edges: BTreeMap::new(), rotation: None };
    let mut rot: BTreeMap<usize, Vec<HalfEdge>> = BTreeMap::new();
    let mut pending_edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: &str| GraphError::Parse { line, msg: msg.to_string() };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(&format!("bad number `{s}`")));
        match toks[0] {
            "v" => {
                if toks.len() != 2 {
                    return Err(err("expected `v <id>`"));
                }
                if !g.vertices.insert(num(toks[1])?) {
                    return Err(err("duplicate vertex"));
                }
            }
            "e" => {
                if !(4..=5).contains(&toks.len()) {
                    return Err(err("expected `e <id> <v1> <v2> [+|-]`"));
                }
                let sign = match toks.get(4) {
                    None | Some(&"+") => 1,
                    Some(&"-") => -1,
                    Some(_) => return Err(err("sign must be + or -")),
                };
                let e = SignedEdge { id: num(toks[1])?, ends: [num(toks[2])?, num(toks[3])?], sign };
                if g.edges.insert(e.id, e).is_some() {
                    return Err(err("duplicate edge"));
                }
                pending_edges.push((line, e));
            }
            "r" => {
                if toks.len() < 2 {
                    return Err(err("expected `r <v> <edge>.<end> ...`"));
                }
                let v = num(toks[1])?;
                let mut hs = Vec::new();
                for t in &toks[2..] {
                    let (e, end) = t.split_once('.').ok_or_else(|| err("half-edge must be <edge>.<end>"))?;
                    let end = match end {
                        "0" => 0,
                        "1" => 1,
                        _ => return Err(err("end must be 0 or 1")),
                    };
                    hs.push(HalfEdge { edge: num(e)?, end });
                }
                if rot.insert(v, hs).is_some() {
                    return Err(err("duplicate rotation line"));
                }
            }
            other => return Err(err(&format!("unknown line kind `{other}`"))),
        }
    }
    for (line, e) in pending_edges {
        if !g.vertices.contains(&e.ends[0]) || !g.vertices.contains(&e.ends[1]) {
            return Err(GraphError::Parse { line, msg: "edge end is not a vertex".into() });
        }
    }
    if !rot.is_empty() {
        g.rotation = Some(rot);
        g.check_rotation()?;
    }
    Ok(g)
}

/// Checkerboard colouring of the corners: `true` is the class that
/// `shading` selects. Indexed by dart id; corners of removed crossings
/// are `false`.
pub fn checkerboard(d: &PlanarDiagram, shading: Shading) -> Result<Vec<bool>, GraphError> {
    let faces = d.faces();
    let mut face_of = vec![usize::MAX; 4 * d.capacity()];
    for (i, f) in faces.iter().enumerate() {
        for x in f.darts() {
            face_of[x.0] = i;
        }
    }
    let mut colour: Vec<Option<bool>> = vec![None; faces.len()];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); faces.len()];
    for x in d.darts() {
        let (a, b) = (face_of[x.0], face_of[x.turn(1).0]);
        adj[a].push(b);
        adj[b].push(a);
    }
    if let Some(first) = d.darts().next() {
        let start = face_of[first.0];
        colour[start] = Some(true);
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            let c = colour[f].expect("coloured");
            for &g in &adj[f] {
                match colour[g] {
                    None => {
                        colour[g] = Some(!c);
                        stack.push(g);
                    }
                    Some(x) if x == c => return Err(GraphError::NotColourable),
                    _ => {}
                }
            }
        }
    }
    if colour.iter().any(Option::is_none) || (d.free_loops() > 0 && d.crossing_count() > 0) {
        return Err(GraphError::Disconnected);
    }
    let first_class = colour.iter().filter(|c| **c == Some(true)).count();
    let black_is_first = 2 * first_class <= faces.len();
    let want_first = black_is_first == (shading == Shading::Black);
    let mut out = vec![false; 4 * d.capacity()];
    for x in d.darts() {
        out[x.0] = colour[face_of[x.0]] == Some(want_first);
    }
    Ok(out)
}

/// The graph of the corners marked `true` in `black`. Vertices are
/// numbered by their smallest corner dart; edge ids are crossing ids.
pub fn graph_with_colouring(d: &PlanarDiagram, black: &[bool]) -> SignedPlaneGraph {
    if d.crossing_count() == 0 {
        let n = d.free_loops().max(1);
        return SignedPlaneGraph {
            vertices: (0..n).collect(),
            edges: BTreeMap::new(),
            rotation: Some(BTreeMap::new()),
        };
    }
    let faces: Vec<_> = d.faces().into_iter().filter(|f| black[f.darts()[0].0]).collect();
    let mut vertex_of = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for x in f.darts() {
            vertex_of.insert(*x, i);
        }
    }
    let mut edges = BTreeMap::new();
    for c in d.crossings() {
        let k = if black[Dart::new(c, 0).0] { 0 } else { 1 };
        let (a, b) = (Dart::new(c, k), Dart::new(c, k + 2));
        let sign = if d.pass_at(a) == Pass::Over { 1 } else { -1 };
        edges.insert(c, SignedEdge { id: c, ends: [vertex_of[&a], vertex_of[&b]], sign });
    }
    let rotation = faces
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let hs = f
                .darts()
                .iter()
                .map(|x| HalfEdge { edge: x.crossing(), end: if x.slot() < 2 { 0 } else { 1 } })
                .collect();
            (i, hs)
        })
        .collect();
    SignedPlaneGraph { vertices: (0..faces.len()).collect(), edges, rotation: Some(rotation) }
}

/// The checkerboard graph of a connected diagram. The zero-crossing
/// unknot gives a single vertex.
pub fn to_signed_graph(d: &PlanarDiagram, shading: Shading) -> Result<SignedPlaneGraph, GraphError> {
    if d.crossing_count() == 0 && d.free_loops() > 1 {
        return Err(GraphError::Disconnected);
    }
    let black = checkerboard(d, shading)?;
    Ok(graph_with_colouring(d, &black))
}

/// The diagram whose checkerboard graph is `g`, built by the medial
/// construction. Crossing `i` comes from the `i`-th edge in id order, with
/// its black corners at slots 0 and 2. Strands are oriented from the
/// lowest unoriented dart; the basepoint enters crossing 0 at slot 0. A
/// graph without edges gives one free loop per vertex.
pub fn medial(g: &SignedPlaneGraph) -> Result<PlanarDiagram, GraphError> {
    if g.edges.is_empty() {
        let mut d = PlanarDiagram::empty();
        for _ in 0..g.vertices.len().max(1) {
            d = add_free_loop(d);
        }
        return Ok(d);
    }
    g.check_rotation()?;
    if !g.is_connected() {
        return Err(GraphError::GraphDisconnected);
    }
    let rot = g.rotation.as_ref().expect("checked");
    let index: HashMap<usize, usize> = g.edges.keys().enumerate().map(|(i, e)| (*e, i)).collect();
    let n = g.edges.len();
    let corner = |h: &HalfEdge| Dart::new(index[&h.edge], 2 * h.end as usize);
    let mut pair = vec![Dart(usize::MAX); 4 * n];
    for hs in rot.values() {
        for (i, h) in hs.iter().enumerate() {
            let a = corner(h);
            let b = corner(&hs[(i + 1) % hs.len()]).turn(1);
            pair[a.0] = b;
            pair[b.0] = a;
        }
    }
    let mut incoming = vec![false; 4 * n];
    let mut done = vec![false; 4 * n];
    for s in 0..4 * n {
        if done[s] {
            continue;
        }
        let mut x = Dart(s);
        while !done[x.0] {
            incoming[x.0] = true;
            done[x.0] = true;
            done[x.opposite().0] = true;
            x = pair[x.opposite().0];
        }
    }
    let over_even = g.edges.values().map(|e| e.sign > 0).collect();
    let base = Some(Basepoint { dart: Dart::new(0, 0), direction: Direction::Forward });
    PlanarDiagram::from_parts(pair, incoming, over_even, base, 0)
        .map_err(|v| GraphError::Medial(format!("{v:?}")))
}

fn add_free_loop(d: PlanarDiagram) -> PlanarDiagram {
    let loops = d.free_loops() + 1;
    PlanarDiagram::from_parts(Vec::new(), Vec::new(), Vec::new(), None, loops).expect("loops only")
}

/// Colouring of a medial diagram that gives back its graph: the corners
/// at even slots are black.
pub fn medial_colouring(d: &PlanarDiagram) -> Vec<bool> {
    (0..4 * d.capacity()).map(|i| d.is_alive(i / 4) && i % 2 == 0).collect()
}
