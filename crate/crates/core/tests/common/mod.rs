#![allow(dead_code)]

use std::collections::BTreeMap;

use knotforge::codes::{Dart, Pass, PlanarDiagram};

/// Laurent polynomial in A: exponent -> coefficient.
pub type Poly = BTreeMap<i32, i64>;

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            *out.entry(ea + eb).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn add_into(acc: &mut Poly, p: &Poly) {
    for (e, c) in p {
        *acc.entry(*e).or_insert(0) += c;
    }
    acc.retain(|_, c| *c != 0);
}

fn loop_value() -> Poly {
    Poly::from([(2, -1), (-2, -1)])
}

fn pow(p: &Poly, n: usize) -> Poly {
    let mut out = Poly::from([(0, 1)]);
    for _ in 0..n {
        out = mul(&out, p);
    }
    out
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let n = parent[y];
        parent[y] = r;
        y = n;
    }
    r
}

/// Kauffman bracket by the state sum. The diagram must be small.
pub fn bracket(d: &PlanarDiagram) -> Poly {
    let cs: Vec<usize> = d.crossings().collect();
    assert!(cs.len() <= 16, "state sum too large");
    let cap = d.capacity();
    let mut total = Poly::new();
    for state in 0u32..(1u32 << cs.len()) {
        let mut parent: Vec<usize> = (0..4 * cap).collect();
        let union = |parent: &mut Vec<usize>, a: Dart, b: Dart| {
            let (ra, rb) = (find(parent, a.0), find(parent, b.0));
            parent[ra] = rb;
        };
        for x in d.darts() {
            union(&mut parent, x, d.pair(x));
        }
        let mut a_count = 0i32;
        for (i, &c) in cs.iter().enumerate() {
            // o is a slot on the overstrand
            let o = if d.pass_at(Dart::new(c, 0)) == Pass::Over { 0 } else { 1 };
            let od = Dart::new(c, o);
            if state & (1 << i) == 0 {
                a_count += 1;
                union(&mut parent, od, od.turn(3));
                union(&mut parent, od.turn(1), od.turn(2));
            } else {
                a_count -= 1;
                union(&mut parent, od, od.turn(1));
                union(&mut parent, od.turn(2), od.turn(3));
            }
        }
        let mut roots = std::collections::BTreeSet::new();
        for x in d.darts() {
            roots.insert(find(&mut parent, x.0));
        }
        let loops = roots.len() + d.free_loops();
        let term = mul(&Poly::from([(a_count, 1)]), &pow(&loop_value(), loops - 1));
        add_into(&mut total, &term);
    }
    if cs.is_empty() {
        return pow(&loop_value(), d.free_loops().saturating_sub(1));
    }
    total
}

pub fn writhe(d: &PlanarDiagram) -> i32 {
    d.crossings().map(|c| d.sign(c)).sum()
}

/// Bracket times (-A^3)^(-writhe): an isotopy invariant.
pub fn normalized_bracket(d: &PlanarDiagram) -> Poly {
    let w = writhe(d);
    let sign = if w.rem_euclid(2) == 0 { 1 } else { -1 };
    mul(&bracket(d), &Poly::from([(-3 * w, sign)]))
}

/// Loop-interior states of ascending knots whose disc holds crossings,
/// reached by removing disc 1-gons and 2-gons and taking random RIII moves
/// on disc triangles away from the loop. Returns (diagram, loop crossing).
pub fn disc_states(seeds: std::ops::Range<u64>, steps: usize) -> Vec<(PlanarDiagram, usize)> {
    use knotforge::codes::edge_key;
    use knotforge::detour::{detect_loop_tangle, find_first_loop};
    use knotforge::generate::random_loop_tangle_knot;
    use knotforge::moves::{perform, MoveKind, MoveRecord};
    use rand::{Rng, SeedableRng};

    let mut out = Vec::new();
    for seed in seeds {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut d = random_loop_tangle_knot(3 + (seed % 4) as usize, 4 + (seed % 12) as usize, 2 + (seed % 20) as usize, seed);
        let (ul, _) = find_first_loop(&d.gauss()).unwrap();
        let u = d.crossing_order()[ul as usize - 1];
        for _ in 0..steps {
            let lt = detect_loop_tangle(&d, u).unwrap();
            if lt.c() == 0 {
                break;
            }
            out.push((d.clone(), u));
            let le = lt.loop_edges(&d);
            if let Some(f) = lt.interior_faces.iter().find(|f| f.sides() <= 2 && !f.corners().any(|c| c == u)) {
                let kind = if f.sides() == 1 { MoveKind::RIRemove } else { MoveKind::RIIRemove };
                perform(&mut d, MoveRecord::new(kind, f.darts().to_vec())).unwrap();
                continue;
            }
            let tris: Vec<_> = lt
                .interior_faces
                .iter()
                .filter(|f| f.sides() == 3 && !f.corners().any(|c| c == u))
                .filter(|f| !f.darts().iter().any(|x| le.contains(&edge_key(*x, d.pair(*x)))))
                .collect();
            if tris.is_empty() {
                break;
            }
            let f = tris[rng.gen_range(0..tris.len())];
            perform(&mut d, MoveRecord::new(MoveKind::RIII, f.darts().to_vec())).unwrap();
        }
    }
    out
}
