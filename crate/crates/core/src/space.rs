//! Action spaces: a finite set of experts or a midpoint lattice on the unit cube.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the ambient domain of an action space.
pub type Point = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Finite { n: usize },
    CubeGrid { d: usize, points_per_axis: usize },
}

/// The learner's action set, represented by its evaluation points.
///
/// Finite spaces use the indices `0..n` as one-dimensional coordinates.
/// Cube grids use the midpoint lattice `{(2l+1)/(2n)}^d`, enumerated with the
/// last coordinate varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSpace {
    kind: SpaceKind,
    points: Vec<Point>,
    grid_radius: f64,
}

impl ActionSpace {
    pub fn finite(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("finite action space needs at least one expert"));
        }
        Ok(Self {
            kind: SpaceKind::Finite { n },
            points: (0..n).map(|i| vec![i as f64]).collect(),
            grid_radius: 0.0,
        })
    }

    pub fn cube_grid(d: usize, points_per_axis: usize) -> Result<Self> {
        if d == 0 || points_per_axis == 0 {
            return Err(Error::invalid("cube grid needs d >= 1 and points_per_axis >= 1"));
        }
        let total = points_per_axis
            .checked_pow(d as u32)
            .ok_or_else(|| Error::invalid("cube grid too large"))?;
        let n = points_per_axis as f64;
        let mut points = Vec::with_capacity(total);
        let mut idx = vec![0usize; d];
        for _ in 0..total {
            points.push(idx.iter().map(|&l| (2 * l + 1) as f64 / (2.0 * n)).collect());
            for axis in (0..d).rev() {
                idx[axis] += 1;
                if idx[axis] < points_per_axis {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Ok(Self {
            kind: SpaceKind::CubeGrid { d, points_per_axis },
            points,
            grid_radius: (d as f64).sqrt() / (2.0 * n),
        })
    }

    pub fn from_kind(kind: SpaceKind) -> Result<Self> {
        match kind {
            SpaceKind::Finite { n } => Self::finite(n),
            SpaceKind::CubeGrid { d, points_per_axis } => Self::cube_grid(d, points_per_axis),
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Covering radius of the evaluation points: `sqrt(d) / (2 n)` for grids, 0 for finite sets.
    pub fn grid_radius(&self) -> f64 {
        self.grid_radius
    }

    /// Ambient dimension (1 for finite spaces).
    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::Finite { .. } => 1,
            SpaceKind::CubeGrid { d, .. } => d,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, SpaceKind::Finite { .. })
    }

    /// Distance between adjacent lattice points along one axis.
    pub fn grid_spacing(&self) -> Option<f64> {
        match self.kind {
            SpaceKind::Finite { .. } => None,
            SpaceKind::CubeGrid { points_per_axis, .. } => Some(1.0 / points_per_axis as f64),
        }
    }

    /// Index pairs `(i, j)` of lattice neighbours that differ by one step along one axis.
    pub fn grid_neighbors(&self) -> Vec<(usize, usize)> {
        let SpaceKind::CubeGrid { d, points_per_axis: n } = self.kind else {
            return (1..self.len()).map(|i| (i - 1, i)).collect();
        };
        let mut pairs = Vec::new();
        for i in 0..self.len() {
            let mut stride = 1;
            for _ in 0..d {
                if (i / stride) % n + 1 < n {
                    pairs.push((i, i + stride));
                }
                stride *= n;
            }
        }
        pairs
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_space_has_zero_radius() {
        let s = ActionSpace::finite(4).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.grid_radius(), 0.0);
        assert_eq!(s.points()[3], vec![3.0]);
        assert!(ActionSpace::finite(0).is_err());
    }

    #[test]
    fn cube_grid_is_midpoint_lattice() {
        let s = ActionSpace::cube_grid(2, 4).unwrap();
        assert_eq!(s.len(), 16);
        assert_eq!(s.points()[0], vec![0.125, 0.125]);
        assert_eq!(s.points()[1], vec![0.125, 0.375]);
        assert_eq!(s.points()[15], vec![0.875, 0.875]);
        assert!((s.grid_radius() - 2f64.sqrt() / 8.0).abs() < 1e-15);
        for p in s.points() {
            assert!(p.iter().all(|&c| (0.0..=1.0).contains(&c)));
        }
    }

    #[test]
    fn neighbors_are_one_spacing_apart() {
        let s = ActionSpace::cube_grid(3, 3).unwrap();
        let pairs = s.grid_neighbors();
        // 3 axes * 3*3 lines * 2 edges per line
        assert_eq!(pairs.len(), 54);
        for (i, j) in pairs {
            let d = distance(&s.points()[i], &s.points()[j]);
            assert!((d - 1.0 / 3.0).abs() < 1e-12);
        }
    }
}
