use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::diagram::Dart;

/// A face of the map, as the cycle of darts whose edges bound it
/// counterclockwise. The cycle starts at its smallest dart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    darts: Vec<Dart>,
}

impl Face {
    pub fn new(mut darts: Vec<Dart>) -> Self {
        if let Some(pos) = darts.iter().enumerate().min_by_key(|(_, d)| **d).map(|(i, _)| i) {
            darts.rotate_left(pos);
        }
        Face { darts }
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn sides(&self) -> usize {
        self.darts.len()
    }

    pub fn contains(&self, d: Dart) -> bool {
        self.darts.contains(&d)
    }

    /// Crossings at the corners, in boundary order.
    pub fn corners(&self) -> impl Iterator<Item = usize> + '_ {
        self.darts.iter().map(|d| d.crossing())
    }

    pub fn min_crossing(&self) -> usize {
        self.corners().min().unwrap_or(usize::MAX)
    }

    /// The face cycle starting at `d`, if `d` is on it.
    pub fn starting_at(&self, d: Dart) -> Option<Vec<Dart>> {
        let pos = self.darts.iter().position(|x| *x == d)?;
        let mut v = self.darts.clone();
        v.rotate_left(pos);
        Some(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Every face of a connected diagram on the sphere.
    Sphere,
    /// The faces inside the disc bounded by a loop.
    LoopInterior,
}

/// Number of `n`-sided faces in a region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceCensus {
    pub region: Region,
    pub counts: BTreeMap<usize, usize>,
}

impl FaceCensus {
    pub fn new(region: Region, counts: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let counts = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        FaceCensus { region, counts }
    }

    pub fn from_faces<'a>(faces: impl Iterator<Item = &'a Face>, region: Region) -> Self {
        let mut counts = BTreeMap::new();
        for f in faces {
            *counts.entry(f.sides()).or_insert(0) += 1;
        }
        FaceCensus { region, counts }
    }

    pub fn get(&self, n: usize) -> usize {
        self.counts.get(&n).copied().unwrap_or(0)
    }

    pub fn face_count(&self) -> usize {
        self.counts.values().sum()
    }

    /// Sum of `n * f_n`.
    pub fn side_incidences(&self) -> usize {
        self.counts.iter().map(|(n, f)| n * f).sum()
    }

    pub fn n_max(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// `3 f1 + 2 f2 + f3 - sum_n n f_{n+4}`.
    pub fn curvature(&self) -> i64 {
        self.counts.iter().map(|(n, f)| (4 - *n as i64) * *f as i64).sum()
    }

    /// Target value of [`FaceCensus::curvature`] for this region.
    pub fn curvature_target(&self) -> i64 {
        match self.region {
            Region::Sphere => 8,
            Region::LoopInterior => 3,
        }
    }
}

/// Checks `3 f1 + 2 f2 + f3 = 8 + sum n f_{n+4}` on the sphere, or the same
/// with 3 on the right for a loop interior. Returns the verdict and
/// `lhs - rhs`.
pub fn euler_identity_check(census: &FaceCensus) -> (bool, i64) {
    let residual = census.curvature() - census.curvature_target();
    (residual == 0, residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trefoil_census_balances() {
        let c = FaceCensus::new(Region::Sphere, [(2, 3), (3, 2)]);
        assert_eq!(euler_identity_check(&c), (true, 0));
    }

    #[test]
    fn kink_interior_balances() {
        let c = FaceCensus::new(Region::LoopInterior, [(1, 1)]);
        assert_eq!(euler_identity_check(&c), (true, 0));
    }

    #[test]
    fn all_quads_fail() {
        let c = FaceCensus::new(Region::Sphere, [(4, 7)]);
        assert_eq!(euler_identity_check(&c), (false, -8));
    }

    #[test]
    fn large_faces_count_against() {
        // f3 = 10 and f6 = 1: 10 - 2 = 8
        let c = FaceCensus::new(Region::Sphere, [(3, 10), (6, 1)]);
        assert_eq!(euler_identity_check(&c), (true, 0));
    }

    #[test]
    fn face_rotates_to_min() {
        let f = Face::new(vec![Dart(9), Dart(3), Dart(5)]);
        assert_eq!(f.darts(), &[Dart(3), Dart(5), Dart(9)]);
    }
}
