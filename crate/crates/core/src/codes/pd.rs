use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::diagram::{Basepoint, Dart, Direction, PlanarDiagram};
use super::CodeError;

struct PdCrossing {
    labels: [u64; 4],
    sign: Option<i32>,
    line: usize,
}

/// Parses the PD text format.
///
/// Crossings are numbered by line order and slot 0 is the first label.
/// Orientation is propagated along strands from each slot 0 (the incoming
/// understrand). A component met only as overstrand takes its direction
/// from the crossing signs, or an arbitrary one when no sign is given.
pub fn parse_pd(text: &str) -> Result<PlanarDiagram, CodeError> {
    let mut crossings: Vec<PdCrossing> = Vec::new();
    let mut base: Option<(u64, Direction)> = None;
    let mut loops = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let bad = |msg: &str| CodeError::BadLine { line, msg: msg.to_string() };
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        if head.starts_with('#') {
            continue;
        }
        match head {
            "X" => {
                if toks.len() != 5 && toks.len() != 6 {
                    return Err(bad("a crossing needs four labels and an optional sign"));
                }
                let mut labels = [0u64; 4];
                for (k, t) in toks[1..5].iter().enumerate() {
                    labels[k] = parse_label(t)?;
                }
                let sign = match toks.get(5) {
                    None => None,
                    Some(&"+") => Some(1),
                    Some(&"-") => Some(-1),
                    Some(t) => return Err(CodeError::BadToken(t.to_string())),
                };
                crossings.push(PdCrossing { labels, sign, line });
            }
            "base" => {
                if toks.len() != 3 || base.is_some() {
                    return Err(bad("expected a single `base <edge> <fwd|bwd>`"));
                }
                let dir = match toks[2] {
                    "fwd" => Direction::Forward,
                    "bwd" => Direction::Backward,
                    t => return Err(CodeError::BadToken(t.to_string())),
                };
                base = Some((parse_label(toks[1])?, dir));
            }
            "loops" => {
                if toks.len() != 2 {
                    return Err(bad("expected `loops <count>`"));
                }
                let n: usize =
                    toks[1].parse().map_err(|_| CodeError::BadToken(toks[1].to_string()))?;
                loops = loops.checked_add(n).ok_or_else(|| bad("loop count overflows"))?;
            }
            "unknot" if toks.len() == 1 => loops += 1,
            t => return Err(CodeError::BadToken(t.to_string())),
        }
    }

    let n = crossings.len();
    let mut uses: BTreeMap<u64, Vec<Dart>> = BTreeMap::new();
    for (c, x) in crossings.iter().enumerate() {
        for (s, l) in x.labels.iter().enumerate() {
            uses.entry(*l).or_default().push(Dart::new(c, s));
        }
    }
    let mut pair = vec![Dart(0); 4 * n];
    let mut label_of = vec![0u64; 4 * n];
    for (label, ds) in &uses {
        if ds.len() != 2 {
            return Err(CodeError::EdgeLabelCount { label: *label, count: ds.len() });
        }
        pair[ds[0].0] = ds[1];
        pair[ds[1].0] = ds[0];
        label_of[ds[0].0] = *label;
        label_of[ds[1].0] = *label;
    }

    let mut incoming: Vec<Option<bool>> = vec![None; 4 * n];
    let set = |incoming: &mut Vec<Option<bool>>, d: Dart, v: bool| -> Result<(), CodeError> {
        let mut stack = vec![(d, v)];
        while let Some((d, v)) = stack.pop() {
            match incoming[d.0] {
                Some(w) if w == v => continue,
                Some(_) => return Err(CodeError::Orientation { label: label_of[d.0] }),
                None => {
                    incoming[d.0] = Some(v);
                    stack.push((pair[d.0], !v));
                    stack.push((d.opposite(), !v));
                }
            }
        }
        Ok(())
    };
    for c in 0..n {
        set(&mut incoming, Dart::new(c, 0), true)?;
    }
    for (c, x) in crossings.iter().enumerate() {
        if incoming[Dart::new(c, 1).0].is_none() {
            if let Some(sign) = x.sign {
                let slot = if sign > 0 { 3 } else { 1 };
                set(&mut incoming, Dart::new(c, slot), true)?;
            }
        }
    }
    for c in 0..n {
        if incoming[Dart::new(c, 1).0].is_none() {
            set(&mut incoming, Dart::new(c, 1), true)?;
        }
    }
    let incoming: Vec<bool> = incoming.into_iter().map(|v| v.unwrap_or(false)).collect();

    let base = match base {
        Some((label, dir)) => {
            let ds = uses.get(&label).ok_or(CodeError::UnknownBase(label))?;
            let want_in = dir == Direction::Forward;
            let dart = if incoming[ds[0].0] == want_in { ds[0] } else { ds[1] };
            Some(Basepoint { dart, direction: dir })
        }
        None if n > 0 => Some(Basepoint { dart: Dart::new(0, 0), direction: Direction::Forward }),
        None => None,
    };
    let d = PlanarDiagram::from_parts(pair, incoming, vec![false; n], base, loops)
        .map_err(CodeError::Invalid)?;
    for (c, x) in crossings.iter().enumerate() {
        if let Some(s) = x.sign {
            if d.sign(c) != s {
                return Err(CodeError::SignMismatch { crossing: x.line });
            }
        }
    }
    Ok(d)
}

fn parse_label(t: &str) -> Result<u64, CodeError> {
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(CodeError::BadToken(t.to_string()));
    }
    t.parse().map_err(|_| CodeError::BadToken(t.to_string()))
}

/// Writes the canonical PD text of a diagram. Crossings are listed in
/// first-meeting order from the basepoint and edges are labelled `1..` in
/// traversal order, so the base edge is always edge 1.
pub fn serialize_pd(d: &PlanarDiagram) -> String {
    let d = d.canonical();
    let mut label: HashMap<Dart, u64> = HashMap::new();
    let mut next = 1u64;
    for cyc in d.ordered_components() {
        for x in cyc {
            label.insert(x, next);
            label.insert(d.pair(x), next);
            next += 1;
        }
    }
    let mut out = String::new();
    if d.free_loops() > 0 {
        let _ = writeln!(out, "loops {}", d.free_loops());
    }
    if let Some(b) = d.basepoint() {
        let dir = match b.direction {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        };
        let _ = writeln!(out, "base {} {}", label[&b.dart], dir);
    }
    for c in d.crossings() {
        let l: Vec<String> = (0..4).map(|s| label[&Dart::new(c, s)].to_string()).collect();
        let sign = if d.sign(c) > 0 { "+" } else { "-" };
        let _ = writeln!(out, "X {} {}", l.join(" "), sign);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TREFOIL: &str = "X 1 5 2 4\nX 3 1 4 6\nX 5 3 6 2\n";

    #[test]
    fn trefoil_counts() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.edge_count(), 6);
        assert_eq!(d.faces().len(), 5);
    }

    #[test]
    fn unknot_sentinels() {
        for t in ["loops 1\n", "unknot\n"] {
            let d = parse_pd(t).unwrap();
            assert_eq!(d.crossing_count(), 0);
            assert_eq!(d.free_loops(), 1);
        }
        assert_eq!(serialize_pd(&PlanarDiagram::unknot()), "loops 1\n");
    }

    #[test]
    fn triple_label_rejected() {
        let t = "X 1 1 2 2\nX 1 3 3 4\n";
        assert!(matches!(parse_pd(t), Err(CodeError::EdgeLabelCount { label: 1, count: 3 })));
    }

    #[test]
    fn round_trip_is_fixed() {
        let d = parse_pd(TREFOIL).unwrap();
        let s = serialize_pd(&d);
        let e = parse_pd(&s).unwrap();
        assert_eq!(serialize_pd(&e), s);
        assert_eq!(e, d.canonical());
    }

    #[test]
    fn garbage_rejected() {
        for t in ["X 1 2 3\n", "Y\n", "X 1 2 3 4 *\n", "base 1\n", "X a b c d\n"] {
            assert!(parse_pd(t).is_err(), "{t:?}");
        }
    }

    #[test]
    fn trefoil_gauss_from_default_base() {
        let d = parse_pd(TREFOIL).unwrap();
        assert_eq!(d.gauss().to_string(), "U1 O2 U3 O1 U2 O3");
    }
}
