use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CodeError;

/// Whether a strand passes over or under at a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pass {
    Over,
    Under,
}

impl Pass {
    pub fn flip(self) -> Pass {
        match self {
            Pass::Over => Pass::Under,
            Pass::Under => Pass::Over,
        }
    }
}

/// One letter of a Gauss code: a crossing label met over or under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussLetter {
    pub label: u32,
    pub pass: Pass,
}

impl GaussLetter {
    pub fn over(label: u32) -> Self {
        GaussLetter { label, pass: Pass::Over }
    }

    pub fn under(label: u32) -> Self {
        GaussLetter { label, pass: Pass::Under }
    }
}

impl fmt::Display for GaussLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.pass {
            Pass::Over => 'O',
            Pass::Under => 'U',
        };
        write!(f, "{}{}", c, self.label)
    }
}

/// A Gauss code. Every label occurs exactly twice, once over and once
/// under, and labels are `1..=n` numbered by first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussCode {
    letters: Vec<GaussLetter>,
}

impl GaussCode {
    pub fn empty() -> Self {
        GaussCode::default()
    }

    /// Checks the exactly-twice / opposite-pass rule and renumbers labels
    /// by first appearance.
    pub fn from_letters(letters: Vec<GaussLetter>) -> Result<Self, CodeError> {
        let mut seen: HashMap<u32, Vec<Pass>> = HashMap::new();
        for l in &letters {
            if l.label == 0 {
                return Err(CodeError::ZeroLabel);
            }
            seen.entry(l.label).or_default().push(l.pass);
        }
        let mut labels: Vec<_> = seen.keys().copied().collect();
        labels.sort_unstable();
        for label in labels {
            let passes = &seen[&label];
            if passes.len() != 2 {
                return Err(CodeError::LabelCount { label, count: passes.len() });
            }
            if passes[0] == passes[1] {
                return Err(CodeError::SamePass { label });
            }
        }
        Ok(GaussCode { letters: renumber(&letters) })
    }

    pub fn letters(&self) -> &[GaussLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn crossing_count(&self) -> usize {
        self.letters.len() / 2
    }

    /// Labels in letter order.
    pub fn labels(&self) -> impl Iterator<Item = u32> + '_ {
        self.letters.iter().map(|l| l.label)
    }

    /// The code read against the orientation, signs kept, renumbered.
    pub fn reversed(&self) -> GaussCode {
        let mut letters = self.letters.clone();
        letters.reverse();
        GaussCode { letters: renumber(&letters) }
    }

    /// Every pass swapped (the mirror image).
    pub fn mirrored(&self) -> GaussCode {
        GaussCode {
            letters: self
                .letters
                .iter()
                .map(|l| GaussLetter { label: l.label, pass: l.pass.flip() })
                .collect(),
        }
    }

    /// Drops every letter whose label is in `labels` and renumbers.
    pub fn without_labels(&self, labels: &[u32]) -> GaussCode {
        let letters: Vec<_> =
            self.letters.iter().filter(|l| !labels.contains(&l.label)).copied().collect();
        GaussCode { letters: renumber(&letters) }
    }

    pub(crate) fn from_normalized_unchecked(letters: Vec<GaussLetter>) -> Self {
        GaussCode { letters: renumber(&letters) }
    }
}

fn renumber(letters: &[GaussLetter]) -> Vec<GaussLetter> {
    let mut map: HashMap<u32, u32> = HashMap::new();
    letters
        .iter()
        .map(|l| {
            let next = map.len() as u32 + 1;
            let label = *map.entry(l.label).or_insert(next);
            GaussLetter { label, pass: l.pass }
        })
        .collect()
}

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated `U<k>` / `O<k>` tokens.
pub fn parse_gauss(text: &str) -> Result<GaussCode, CodeError> {
    let mut letters = Vec::new();
    for tok in text.split_whitespace() {
        let mut chars = tok.chars();
        let pass = match chars.next() {
            Some('U') => Pass::Under,
            Some('O') => Pass::Over,
            _ => return Err(CodeError::BadToken(tok.to_string())),
        };
        let rest = chars.as_str();
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(CodeError::BadToken(tok.to_string()));
        }
        let label: u32 = rest.parse().map_err(|_| CodeError::BadToken(tok.to_string()))?;
        letters.push(GaussLetter { label, pass });
    }
    GaussCode::from_letters(letters)
}
