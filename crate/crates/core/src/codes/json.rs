use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::diagram::{Basepoint, Dart, PlanarDiagram, Violation};

/// JSON form of a [`PlanarDiagram`].
///
/// Dart `4c + k` is slot `k` of crossing `c`. Each crossing lists the dart
/// paired with each of its slots, which slots are incoming, and which
/// slot pair (`"even"` = 0/2, `"odd"` = 1/3) is the overstrand. Crossing
/// ids need not be dense: a missing id is a removed crossing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub crossings: Vec<CrossingJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Basepoint>,
    #[serde(default)]
    pub free_loops: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingJson {
    pub id: usize,
    pub pair: [usize; 4],
    pub incoming: [bool; 4],
    pub over: OverPair,
    pub sign: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverPair {
    Even,
    Odd,
}

#[derive(Debug, Error)]
pub enum DiagramJsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("crossing id {0} is listed twice")]
    DuplicateId(usize),
    #[error("crossing id {0} is too large")]
    IdTooLarge(usize),
    #[error("dart {0} does not exist")]
    NoSuchDart(usize),
    #[error("sign of crossing {0} disagrees with its orientation")]
    SignMismatch(usize),
    #[error("invalid diagram: {0:?}")]
    Invalid(Vec<Violation>),
}

const MAX_ID: usize = 1 << 20;

impl DiagramJson {
    pub fn from_diagram(d: &PlanarDiagram) -> Self {
        let crossings = d
            .crossings()
            .map(|c| CrossingJson {
                id: c,
                pair: std::array::from_fn(|s| d.pair(Dart::new(c, s)).0),
                incoming: std::array::from_fn(|s| d.is_incoming(Dart::new(c, s))),
                over: if d.over_even(c) { OverPair::Even } else { OverPair::Odd },
                sign: d.sign(c),
            })
            .collect();
        DiagramJson { crossings, base: d.basepoint(), free_loops: d.free_loops() }
    }

    pub fn to_diagram(&self) -> Result<PlanarDiagram, DiagramJsonError> {
        let cap = match self.crossings.iter().map(|c| c.id).max() {
            Some(m) if m >= MAX_ID => return Err(DiagramJsonError::IdTooLarge(m)),
            Some(m) => m + 1,
            None => 0,
        };
        let mut seen = vec![false; cap];
        let mut pair: Vec<Dart> = (0..4 * cap).map(Dart).collect();
        let mut incoming = vec![false; 4 * cap];
        let mut over_even = vec![false; cap];
        for x in &self.crossings {
            if std::mem::replace(&mut seen[x.id], true) {
                return Err(DiagramJsonError::DuplicateId(x.id));
            }
            for s in 0..4 {
                let p = x.pair[s];
                if p >= 4 * cap {
                    return Err(DiagramJsonError::NoSuchDart(p));
                }
                pair[4 * x.id + s] = Dart(p);
                incoming[4 * x.id + s] = x.incoming[s];
            }
            over_even[x.id] = x.over == OverPair::Even;
        }
        let mut d =
            PlanarDiagram::from_parts_unchecked(pair, incoming, over_even, self.base, self.free_loops);
        for (c, alive) in seen.iter().enumerate() {
            if !alive {
                d.kill(c);
            }
        }
        let v = d.validate();
        if !v.is_empty() {
            return Err(DiagramJsonError::Invalid(v));
        }
        for x in &self.crossings {
            if d.sign(x.id) != x.sign {
                return Err(DiagramJsonError::SignMismatch(x.id));
            }
        }
        Ok(d)
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram JSON serializes")
    }

    pub fn parse(text: &str) -> Result<PlanarDiagram, DiagramJsonError> {
        let j: DiagramJson = serde_json::from_str(text)?;
        j.to_diagram()
    }
}

impl PlanarDiagram {
    pub fn to_json(&self) -> DiagramJson {
        DiagramJson::from_diagram(self)
    }
}
