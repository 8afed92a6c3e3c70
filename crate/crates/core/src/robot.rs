//! The unknotting robot: a walk from a basepoint that makes every crossing
//! an undercrossing the first time it is met.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{
    Basepoint, ComponentId, CrossingId, Dart, Direction, GaussCode, GaussLetter, Pass,
    PlanarDiagram,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RobotError {
    #[error("the diagram has no basepoint")]
    NoBasepoint,
    #[error("basepoint dart {0} is on a removed crossing")]
    DeadBasepoint(Dart),
    #[error("basepoint dart {0} is not on component {1}")]
    BasepointNotOnComponent(Dart, ComponentId),
    #[error("basepoint dart {0} does not face its direction")]
    BasepointDirection(Dart),
    #[error("component {0} is listed twice")]
    DuplicateComponent(ComponentId),
    #[error("component {0} is missing from the order")]
    MissingComponent(ComponentId),
    #[error("component {0} does not exist")]
    NoSuchComponent(ComponentId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotRun {
    pub input_code: GaussCode,
    pub output_code: GaussCode,
    pub switched: BTreeSet<u32>,
    pub basepoint: Option<Dart>,
    pub direction: Direction,
}

/// Sets every label's first occurrence under and its second over.
pub fn run_robot_gauss(code: &GaussCode) -> RobotRun {
    let mut seen = HashSet::new();
    let mut switched = BTreeSet::new();
    let letters = code
        .letters()
        .iter()
        .map(|l| {
            let first = seen.insert(l.label);
            let pass = if first { Pass::Under } else { Pass::Over };
            if first && l.pass == Pass::Over {
                switched.insert(l.label);
            }
            GaussLetter { label: l.label, pass }
        })
        .collect();
    RobotRun {
        input_code: code.clone(),
        output_code: GaussCode::from_normalized_unchecked(letters),
        switched,
        basepoint: None,
        direction: Direction::Forward,
    }
}

/// The robot read against the orientation: the code is reversed, made
/// ascending, and reversed back, so it comes out descending.
pub fn run_robot_gauss_backward(code: &GaussCode) -> RobotRun {
    let rev = run_robot_gauss(&code.reversed());
    let mut letters = rev.output_code.letters().to_vec();
    letters.reverse();
    let output_code = GaussCode::from_normalized_unchecked(letters);
    let switched = code
        .letters()
        .iter()
        .zip(output_code.letters())
        .filter(|(a, b)| a.pass != b.pass)
        .map(|(a, _)| a.label)
        .collect();
    RobotRun { input_code: code.clone(), output_code, switched, basepoint: None, direction: Direction::Backward }
}

/// The descending robot: first occurrence over, second under.
pub fn run_descending_robot_gauss(code: &GaussCode) -> RobotRun {
    let mut run = run_robot_gauss(&code.mirrored());
    run.input_code = code.clone();
    run.output_code = run.output_code.mirrored();
    run
}

pub fn is_ascending(code: &GaussCode) -> bool {
    let mut seen = HashSet::new();
    code.letters().iter().all(|l| {
        let first = seen.insert(l.label);
        (l.pass == Pass::Under) == first
    })
}

pub fn is_descending(code: &GaussCode) -> bool {
    is_ascending(&code.mirrored())
}

fn check_base(d: &PlanarDiagram, b: Basepoint) -> Result<(), RobotError> {
    if !d.is_alive(b.dart.crossing()) {
        return Err(RobotError::DeadBasepoint(b.dart));
    }
    if d.is_incoming(b.dart) != (b.direction == Direction::Forward) {
        return Err(RobotError::BasepointDirection(b.dart));
    }
    Ok(())
}

/// Runs the robot on the component through `base`. Only over/under data
/// changes. Crossings with other components are left alone.
pub fn run_robot_diagram(d: &PlanarDiagram, base: Basepoint) -> Result<PlanarDiagram, RobotError> {
    check_base(d, base)?;
    let mut out = d.clone();
    out.set_basepoint(Some(base));
    let walk = d.walk(base.dart);
    let mut count: HashMap<CrossingId, usize> = HashMap::new();
    for e in &walk {
        *count.entry(e.crossing()).or_default() += 1;
    }
    let mut seen = HashSet::new();
    for e in &walk {
        if count[&e.crossing()] == 2 && seen.insert(e.crossing()) {
            out.set_pass(*e, Pass::Under);
        }
    }
    Ok(out)
}

/// Runs the robot at the diagram's own basepoint.
pub fn run_robot_at_base(d: &PlanarDiagram) -> Result<PlanarDiagram, RobotError> {
    let b = d.basepoint().ok_or(RobotError::NoBasepoint)?;
    run_robot_diagram(d, b)
}

/// Runs the robot on every component in `order`, each from its own
/// basepoint. At a crossing between two components the one later in the
/// order ends up over. The first basepoint becomes the diagram basepoint.
pub fn run_robot_link(
    d: &PlanarDiagram,
    order: &[(ComponentId, Basepoint)],
) -> Result<PlanarDiagram, RobotError> {
    let comps = d.components();
    let comp_of = d.component_of_darts();
    let mut listed = HashSet::new();
    for (c, b) in order {
        if *c >= comps.len() {
            return Err(RobotError::NoSuchComponent(*c));
        }
        if !listed.insert(*c) {
            return Err(RobotError::DuplicateComponent(*c));
        }
        check_base(d, *b)?;
        if comp_of.get(&b.dart) != Some(c) {
            return Err(RobotError::BasepointNotOnComponent(b.dart, *c));
        }
    }
    if let Some(m) = (0..comps.len()).find(|c| !listed.contains(c)) {
        return Err(RobotError::MissingComponent(m));
    }
    let mut out = d.clone();
    let mut done = HashSet::new();
    for (c, b) in order {
        let mut seen = HashSet::new();
        for e in d.walk(b.dart) {
            let x = e.crossing();
            let other = comp_of[&e.turn(1)];
            if other == *c {
                if seen.insert(x) {
                    out.set_pass(e, Pass::Under);
                }
            } else if done.contains(&other) {
                out.set_pass(e, Pass::Over);
            }
        }
        done.insert(*c);
    }
    out.set_basepoint(order.first().map(|(_, b)| *b));
    Ok(out)
}

/// Each component read from the first forward entry dart of its cycle, in
/// component order.
pub fn default_link_order(d: &PlanarDiagram) -> Vec<(ComponentId, Basepoint)> {
    d.components()
        .iter()
        .enumerate()
        .map(|(i, cyc)| (i, Basepoint { dart: cyc[0], direction: Direction::Forward }))
        .collect()
}

/// True when at every crossing between two components the one later in
/// `order` passes over. Components absent from `order` make it false.
pub fn stacking_certificate(d: &PlanarDiagram, order: &[ComponentId]) -> bool {
    let comp_of = d.component_of_darts();
    let rank: HashMap<ComponentId, usize> = order.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    for c in d.crossings() {
        let u = d.under_in(c);
        let o = d.over_in(c);
        let (cu, co) = (comp_of[&u], comp_of[&o]);
        if cu == co {
            continue;
        }
        match (rank.get(&cu), rank.get(&co)) {
            (Some(ru), Some(ro)) if ro > ru => {}
            _ => return false,
        }
    }
    true
}
