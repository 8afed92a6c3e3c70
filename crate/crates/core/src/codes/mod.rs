//! Diagram representations: Gauss codes, the combinatorial map, faces,
//! and the PD and JSON text formats.

mod diagram;
mod faces;
mod gauss;
mod json;
mod pd;

pub use diagram::{
    edge_key, Basepoint, ComponentId, CrossingId, Dart, Direction, PlanarDiagram, Violation,
};
pub use faces::{euler_identity_check, Face, FaceCensus, Region};
pub use gauss::{parse_gauss, GaussCode, GaussLetter, Pass};
pub use json::{CrossingJson, DiagramJson, DiagramJsonError, OverPair};
pub use pd::{parse_pd, serialize_pd};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("label 0 is not allowed")]
    ZeroLabel,
    #[error("label {label} appears {count} times, expected 2")]
    LabelCount { label: u32, count: usize },
    #[error("label {label} is met twice with the same pass")]
    SamePass { label: u32 },
    #[error("malformed token `{0}`")]
    BadToken(String),
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
    #[error("edge label {label} is used {count} times, expected 2")]
    EdgeLabelCount { label: u64, count: usize },
    #[error("orientation of edge {label} is inconsistent")]
    Orientation { label: u64 },
    #[error("sign of crossing {crossing} disagrees with its orientation")]
    SignMismatch { crossing: usize },
    #[error("base edge {0} does not exist")]
    UnknownBase(u64),
    #[error("invalid diagram: {}", join(.0))]
    Invalid(Vec<Violation>),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Gauss code of one component read from the basepoint, which must lie on
/// that component. Crossings with other components are left out.
pub fn gauss_of(d: &PlanarDiagram, component: ComponentId) -> Option<GaussCode> {
    if d.base_component()? != component {
        return None;
    }
    Some(d.gauss())
}

/// Faces of the diagram together with their census.
pub fn faces(d: &PlanarDiagram) -> (Vec<Face>, FaceCensus) {
    let fs = d.faces();
    let census = FaceCensus::from_faces(fs.iter(), Region::Sphere);
    (fs, census)
}

/// Structural problems with the diagram; empty when valid.
pub fn validate(d: &PlanarDiagram) -> Vec<Violation> {
    d.validate()
}
