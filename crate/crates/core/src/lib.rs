//! Knot diagram manipulation: Gauss codes and planar maps, Reidemeister
//! moves, the ascending-diagram robot, detour unknotting, face-discharge
//! simplification, and signed-graph applications.

pub mod codes;
pub mod robot;
pub mod moves;
pub mod generate;
pub mod fixtures;
pub mod detour;
pub mod simplify;
pub mod applications;
