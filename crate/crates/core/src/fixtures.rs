//! Small named diagrams used by tests, examples and the CLI.

use crate::codes::{parse_pd, Dart, PlanarDiagram};
use crate::generate::clasp;

/// Alternating trefoil; read from the default basepoint its code is
/// `U1 O2 U3 O1 U2 O3`.
pub const TREFOIL_PD: &str = "X 1 5 2 4\nX 3 1 4 6\nX 5 3 6 2\n";

/// Alternating figure-eight knot.
pub const FIGURE_EIGHT_PD: &str = "X 4 2 5 1\nX 8 6 1 5\nX 6 3 7 4\nX 2 7 3 8\n";

/// Alternating Hopf link.
pub const HOPF_PD: &str = "X 4 1 3 2\nX 2 3 1 4\n";

pub fn trefoil() -> PlanarDiagram {
    parse_pd(TREFOIL_PD).expect("trefoil fixture parses")
}

/// The trefoil after the robot: code `U1 U2 U3 O1 O2 O3`.
pub fn ascending_trefoil() -> PlanarDiagram {
    crate::robot::run_robot_at_base(&trefoil()).expect("basepoint present")
}

pub fn figure_eight() -> PlanarDiagram {
    parse_pd(FIGURE_EIGHT_PD).expect("figure-eight fixture parses")
}

pub fn hopf() -> PlanarDiagram {
    parse_pd(HOPF_PD).expect("Hopf fixture parses")
}

/// Three circles in a chain: the first links the second, the second links
/// the third, and the first and third do not meet.
pub fn chain3() -> PlanarDiagram {
    let mut d = hopf();
    let comps = d.components();
    let last = comps.last().expect("two components")[0];
    clasp(&mut d, last, true, false);
    d.canonical()
}

/// Two disjoint one-crossing kinks: a split diagram of the two-component
/// unlink.
pub fn split_kinks() -> PlanarDiagram {
    parse_pd("X 1 1 2 2\nX 3 3 4 4\n").expect("split fixture parses")
}

/// A single kink.
pub fn kink() -> PlanarDiagram {
    parse_pd("X 1 1 2 2\n").expect("kink fixture parses")
}

/// First dart of component `i`.
pub fn component_start(d: &PlanarDiagram, i: usize) -> Dart {
    d.components()[i][0]
}

/// An ascending knot whose first loop encloses a kink. Sliding the loop
/// off directly must first push it across the kink, adding crossings;
/// removing the kink first avoids that.
pub const DETOUR_PUSH_PD: &str = "base 1 fwd
X 1 7 2 6 +
X 2 14 3 13 +
X 3 8 4 9 -
X 4 10 5 9 +
X 5 10 6 11 -
X 7 1 8 14 +
X 11 13 12 12 +
";

pub fn detour_push() -> PlanarDiagram {
    parse_pd(DETOUR_PUSH_PD).expect("detour fixture parses")
}
