//! SVG drawings from a barycentric (Tutte) layout of the 4-valent map.
//! Each edge is subdivided twice so loops and parallel edges stay apart.
//! The largest face is pinned to a circle and every other point is moved
//! to the average of its neighbours.

use std::collections::HashMap;
use std::fmt::Write;

use anyhow::{bail, Result};
use knotforge::codes::{edge_key, Dart, Pass, PlanarDiagram};

const SIZE: f64 = 500.0;
const RADIUS: f64 = 220.0;
const ROUNDS: usize = 4000;

type Point = (f64, f64);

struct Layout {
    at: Vec<Point>,
    crossing: HashMap<usize, usize>,
    /// Subdivision points of each edge, listed from the smaller dart.
    inner: HashMap<(Dart, Dart), [usize; 2]>,
}

fn layout(d: &PlanarDiagram) -> Result<Layout> {
    if d.graph_components().len() > 1 {
        bail!("layout failure: the diagram is not connected");
    }
    let mut n = 0;
    let mut crossing = HashMap::new();
    for c in d.crossings() {
        crossing.insert(c, n);
        n += 1;
    }
    let mut inner = HashMap::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges: Vec<(Dart, Dart)> = d.darts().map(|x| edge_key(x, d.pair(x))).collect();
    edges.sort();
    edges.dedup();
    for &(a, b) in &edges {
        let (s1, s2) = (n, n + 1);
        n += 2;
        adj.push(Vec::new());
        adj.push(Vec::new());
        let (ca, cb) = (crossing[&a.crossing()], crossing[&b.crossing()]);
        for (p, q) in [(ca, s1), (s1, s2), (s2, cb)] {
            adj[p].push(q);
            adj[q].push(p);
        }
        inner.insert((a, b), [s1, s2]);
    }
    let outer = d
        .faces()
        .into_iter()
        .max_by_key(|f| (f.sides(), std::cmp::Reverse(f.darts()[0])))
        .expect("a diagram with crossings has faces");
    let mut ring = Vec::new();
    for &x in outer.darts() {
        ring.push(crossing[&x.crossing()]);
        let key = edge_key(x, d.pair(x));
        let [s1, s2] = inner[&key];
        if key.0 == x {
            ring.extend([s1, s2]);
        } else {
            ring.extend([s2, s1]);
        }
    }
    let mut at = vec![(SIZE / 2.0, SIZE / 2.0); n];
    let mut pinned = vec![false; n];
    for (i, &p) in ring.iter().enumerate() {
        if pinned[p] {
            continue;
        }
        let t = 2.0 * std::f64::consts::PI * i as f64 / ring.len() as f64;
        at[p] = (SIZE / 2.0 + RADIUS * t.cos(), SIZE / 2.0 + RADIUS * t.sin());
        pinned[p] = true;
    }
    for _ in 0..ROUNDS {
        for p in 0..n {
            if pinned[p] || adj[p].is_empty() {
                continue;
            }
            let k = adj[p].len() as f64;
            let sx: f64 = adj[p].iter().map(|q| at[*q].0).sum();
            let sy: f64 = adj[p].iter().map(|q| at[*q].1).sum();
            at[p] = (sx / k, sy / k);
        }
    }
    if at.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        bail!("layout failure: non-finite coordinates");
    }
    Ok(Layout { at, crossing, inner })
}

fn toward(a: Point, b: Point, t: f64) -> Point {
    (a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t)
}

fn header(out: &mut String) {
    let s = SIZE as u32;
    writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">").unwrap();
    writeln!(out, "<rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>").unwrap();
}

/// Renders the diagram. Understrands stop short of their crossing. The
/// zero-crossing diagram is drawn as circles.
pub fn render(d: &PlanarDiagram) -> Result<String> {
    let mut out = String::new();
    header(&mut out);
    if d.crossing_count() == 0 {
        let loops = d.free_loops().max(1);
        for i in 0..loops {
            let r = RADIUS * (i + 1) as f64 / loops as f64;
            writeln!(out, "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{r:.6}\" fill=\"none\" stroke=\"black\" stroke-width=\"3\"/>", SIZE / 2.0, SIZE / 2.0).unwrap();
        }
        out.push_str("</svg>\n");
        return Ok(out);
    }
    if d.free_loops() > 0 {
        bail!("layout failure: free loops beside crossings");
    }
    let l = layout(d)?;
    let mut keys: Vec<_> = l.inner.keys().copied().collect();
    keys.sort();
    for (a, b) in keys {
        let [s1, s2] = l.inner[&(a, b)];
        let mut pts = [l.at[l.crossing[&a.crossing()]], l.at[s1], l.at[s2], l.at[l.crossing[&b.crossing()]]];
        if d.pass_at(a) == Pass::Under {
            pts[0] = toward(pts[0], pts[1], 0.35);
        }
        if d.pass_at(b) == Pass::Under {
            pts[3] = toward(pts[3], pts[2], 0.35);
        }
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.6},{y:.6}")).collect();
        writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"3\"/>", coords.join(" ")).unwrap();
    }
    let mut cs: Vec<_> = l.crossing.iter().collect();
    cs.sort();
    for (c, p) in cs {
        let (x, y) = l.at[*p];
        writeln!(out, "<text x=\"{:.6}\" y=\"{:.6}\" font-size=\"12\" fill=\"gray\">{c}</text>", x + 6.0, y - 6.0).unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}
