//! Random valid diagrams for fuzzing and property tests, grown from a
//! single kink by random Reidemeister additions and RIII moves.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codes::{Dart, Pass, PlanarDiagram};
use crate::moves::{legal_moves, perform, MoveKind, MoveRecord};

/// A random move that adds crossings or is an RIII.
pub fn random_growth_move<R: Rng>(d: &PlanarDiagram, rng: &mut R) -> MoveRecord {
    if d.crossing_count() == 0 {
        return MoveRecord::new(MoveKind::RIAdd, vec![]).with_over(rng.gen());
    }
    let roll: f64 = rng.gen();
    if roll < 0.3 {
        let riii: Vec<_> = legal_moves(d).into_iter().filter(|m| m.kind == MoveKind::RIII).collect();
        if let Some(m) = riii.choose(rng) {
            return m.clone();
        }
    }
    if roll < 0.45 {
        let darts: Vec<Dart> = d.darts().collect();
        let x = *darts.choose(rng).expect("a dart");
        return MoveRecord::new(MoveKind::RIAdd, vec![x])
            .with_variant(rng.gen_range(0..2))
            .with_over(rng.gen());
    }
    let faces: Vec<_> = d.faces().into_iter().filter(|f| f.sides() >= 2).collect();
    let f = faces.choose(rng).expect("a face with two sides");
    let picks: Vec<Dart> = f.darts().choose_multiple(rng, 2).copied().collect();
    MoveRecord::new(MoveKind::RIIAdd, picks).with_over(rng.gen())
}

/// A connected knot diagram with at least `crossings` crossings and random
/// crossing passes.
pub fn random_knot(crossings: usize, seed: u64) -> PlanarDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = PlanarDiagram::unknot();
    while d.crossing_count() < crossings.max(1) {
        let m = random_growth_move(&d, &mut rng);
        perform(&mut d, m).expect("generated moves are legal");
    }
    randomize_passes(&mut d, &mut rng);
    d.canonical()
}

/// Like [`random_knot`] but over/under data comes only from the moves, so
/// the diagram is a diagram of the unknot.
pub fn random_unknot(crossings: usize, seed: u64) -> PlanarDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = PlanarDiagram::unknot();
    while d.crossing_count() < crossings.max(1) {
        let m = random_growth_move(&d, &mut rng);
        perform(&mut d, m).expect("generated moves are legal");
    }
    d.canonical()
}

/// A connected link diagram: a kink with `components - 1` circles clasped
/// around random edges, grown to at least `crossings` crossings.
pub fn random_link(components: usize, crossings: usize, seed: u64) -> PlanarDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = PlanarDiagram::unknot();
    perform(&mut d, MoveRecord::new(MoveKind::RIAdd, vec![]).with_over(true)).expect("kink");
    for _ in 1..components.max(1) {
        let darts: Vec<Dart> = d.darts().collect();
        let x = *darts.choose(&mut rng).expect("a dart");
        clasp(&mut d, x, rng.gen(), rng.gen());
    }
    while d.crossing_count() < crossings {
        let m = random_growth_move(&d, &mut rng);
        perform(&mut d, m).expect("generated moves are legal");
    }
    randomize_passes(&mut d, &mut rng);
    d.canonical()
}

fn randomize_passes<R: Rng>(d: &mut PlanarDiagram, rng: &mut R) {
    let cs: Vec<_> = d.crossings().collect();
    for c in cs {
        let pass = if rng.gen() { Pass::Over } else { Pass::Under };
        d.set_pass(Dart::new(c, 0), pass);
    }
}

/// Adds a new circle component hooked around the edge through `x`,
/// meeting it at two new crossings.
pub(crate) fn clasp(d: &mut PlanarDiagram, x: Dart, over_p: bool, over_q: bool) {
    let y = d.pair(x);
    let s = d.is_incoming(x);
    let p = d.push_crossing(over_p, [!s, true, s, false]);
    let q = d.push_crossing(over_q, [!s, false, s, true]);
    let pd = |k| Dart::new(p, k);
    let qd = |k| Dart::new(q, k);
    d.link(x, pd(0));
    d.link(pd(2), qd(0));
    d.link(qd(2), y);
    d.link(pd(3), qd(3));
    d.link(pd(1), qd(1));
}

/// Closure of a random braid word with `crossings` letters on `strands`
/// strands, redrawn until it is a connected knot diagram. Passes are
/// random. Braid closures keep many triangles that no RI or RII touches.
/// The letter count is raised by one when its parity rules out a knot.
pub fn random_braid_knot(strands: usize, crossings: usize, seed: u64) -> PlanarDiagram {
    let n = strands.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut len = crossings.max(n - 1);
    if (len - (n - 1)) % 2 == 1 {
        len += 1;
    }
    loop {
        let word: Vec<(usize, bool)> = (0..len).map(|_| (rng.gen_range(0..n - 1), rng.gen())).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n - 1];
        for (i, _) in &word {
            perm.swap(*i, *i + 1);
            used[*i] = true;
        }
        let mut cycle = 1;
        let mut p = perm[0];
        while p != 0 {
            p = perm[p];
            cycle += 1;
        }
        if cycle != n || used.contains(&false) {
            continue;
        }
        let mut next = n + 1;
        let mut cur: Vec<usize> = (1..=n).collect();
        let mut xs = Vec::new();
        for (i, left_under) in word {
            let (a, b) = (cur[i], cur[i + 1]);
            let (c, e) = (next, next + 1);
            next += 2;
            // corners counterclockwise: bottom-left, bottom-right, top-right, top-left
            xs.push(if left_under { [a, b, e, c] } else { [b, e, c, a] });
            cur[i] = c;
            cur[i + 1] = e;
        }
        let close: std::collections::HashMap<usize, usize> = cur.iter().enumerate().map(|(p, l)| (*l, p + 1)).collect();
        let text: String = xs
            .iter()
            .map(|x| {
                let l: Vec<String> = x.iter().map(|v| close.get(v).unwrap_or(v).to_string()).collect();
                format!("X {}\n", l.join(" "))
            })
            .collect();
        let d = crate::codes::parse_pd(&text).expect("braid closures are valid diagrams");
        if d.is_connected() {
            return d.canonical();
        }
    }
}

/// An ascending knot whose first loop encloses part of a random braid
/// closure. A kink is put just after the first crossing and its loop is grown
/// outwards `swallow` times, each time sliding a crossing into the disc by
/// RIII (after an RII push when no 3-gon is at hand). The robot then makes
/// the diagram ascending.
pub fn random_loop_tangle_knot(strands: usize, crossings: usize, swallow: usize, seed: u64) -> PlanarDiagram {
    use crate::codes::edge_key;
    use crate::detour::detect_loop_tangle;

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut d = random_braid_knot(strands, crossings, seed);
    let b = d.basepoint().expect("braid closures have a basepoint").dart;
    let x = b.opposite();
    let k = d.capacity();
    perform(&mut d, MoveRecord::new(MoveKind::RIAdd, vec![x]).with_variant(rng.gen_range(0..2)).with_over(false))
        .expect("RI_add is always legal");
    for _ in 0..swallow {
        let Ok(lt) = detect_loop_tangle(&d, k) else { break };
        let loop_edges = lt.loop_edges(&d);
        let on_loop = lt.loop_crossings();
        let unbounded = crate::moves::base_faces(&d);
        let mut outside: Vec<_> = d
            .faces()
            .into_iter()
            .filter(|f| !lt.interior_faces.contains(f) && !unbounded.contains(f))
            .filter(|f| f.darts().iter().any(|y| loop_edges.contains(&edge_key(*y, d.pair(*y)))))
            .collect();
        outside.shuffle(&mut rng);
        let mut done = false;
        for f in &outside {
            let ds = f.darts();
            let n = ds.len();
            let is_loop = |y: Dart| loop_edges.contains(&edge_key(y, d.pair(y)));
            if n == 3
                && !f.corners().any(|c| c == k)
                && ds.iter().filter(|y| is_loop(**y)).count() == 1
                && f.corners().any(|c| !on_loop.contains(&c))
            {
                let m = MoveRecord::new(MoveKind::RIII, ds.to_vec());
                if perform(&mut d, m).is_ok() {
                    done = true;
                    break;
                }
            }
        }
        if done {
            continue;
        }
        for f in &outside {
            let ds = f.darts();
            let n = ds.len();
            if n < 4 {
                continue;
            }
            let is_loop = |y: Dart| loop_edges.contains(&edge_key(y, d.pair(y)));
            if let Some(i) = (0..n).find(|i| is_loop(ds[*i]) && !on_loop.contains(&ds[(i + 2) % n].crossing())) {
                let m = MoveRecord::new(MoveKind::RIIAdd, vec![ds[i], ds[(i + 2) % n]]).with_over(false);
                if perform(&mut d, m).is_ok() {
                    break;
                }
            }
        }
    }
    crate::robot::run_robot_at_base(&d).expect("basepoint present")
}
