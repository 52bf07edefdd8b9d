//! Direction grids on S^{d−1}.
//!
//! d = 2 uses a uniform angle grid (cyclic neighbors); d = 3 a Fibonacci
//! sphere with k-nearest neighbor lists. Both are deterministic.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirectionGrid {
    dim: usize,
    points: Vec<Vec<f64>>,
    neighbors: Vec<Vec<usize>>,
}

impl DirectionGrid {
    /// Uniform circle grid: `ω_i = (cos 2πi/n, sin 2πi/n)`. Degenerate
    /// grids (n < 3) are allowed for single-direction runs; their neighbor
    /// lists are empty of self-references.
    pub fn circle(n: usize) -> Self {
        assert!(n >= 1, "circle grid needs at least 1 direction");
        let points: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let phi = 2.0 * core::f64::consts::PI * i as f64 / n as f64;
                vec![libm::cos(phi), libm::sin(phi)]
            })
            .collect();
        let neighbors = (0..n)
            .map(|i| {
                let mut nb = vec![(i + n - 1) % n, (i + 1) % n];
                nb.sort_unstable();
                nb.dedup();
                nb.retain(|&j| j != i);
                nb
            })
            .collect();
        Self {
            dim: 2,
            points,
            neighbors,
        }
    }

    /// Fibonacci sphere with 6-nearest-neighbor lists.
    pub fn fibonacci_sphere(n: usize) -> Self {
        assert!(n >= 12, "sphere grid needs at least 12 directions");
        let golden = core::f64::consts::PI * (3.0 - libm::sqrt(5.0));
        let points: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                let r = libm::sqrt((1.0 - z * z).max(0.0));
                let phi = golden * i as f64;
                vec![r * libm::cos(phi), r * libm::sin(phi), z]
            })
            .collect();
        let k = 6usize.min(n - 1);
        let neighbors = (0..n)
            .map(|i| {
                let mut dists: Vec<(f64, usize)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (linalg::norm(&linalg::sub(&points[i], &points[j])), j))
                    .collect();
                dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                dists.truncate(k);
                dists.into_iter().map(|(_, j)| j).collect()
            })
            .collect();
        Self {
            dim: 3,
            points,
            neighbors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Polar angle of grid point `i` (d = 2 only).
    pub fn angle(&self, i: usize) -> f64 {
        assert_eq!(self.dim, 2);
        libm::atan2(self.points[i][1], self.points[i][0])
    }

    /// Index of the grid direction nearest to `dir`.
    pub fn nearest_index(&self, dir: &[f64]) -> usize {
        if self.dim == 2 {
            let n = self.len();
            let phi = libm::atan2(dir[1], dir[0]);
            let step = 2.0 * core::f64::consts::PI / n as f64;
            let idx = libm::round(phi / step) as i64;
            (idx.rem_euclid(n as i64)) as usize
        } else {
            let mut best = 0usize;
            let mut best_dot = f64::NEG_INFINITY;
            for (i, p) in self.points.iter().enumerate() {
                let d = linalg::dot(p, dir);
                if d > best_dot {
                    best_dot = d;
                    best = i;
                }
            }
            best
        }
    }

    /// Largest distance between neighboring grid points.
    pub fn max_neighbor_gap(&self) -> f64 {
        let mut gap = 0.0f64;
        for i in 0..self.len() {
            for &j in self.neighbors(i) {
                gap = gap.max(linalg::norm(&linalg::sub(&self.points[i], &self.points[j])));
            }
        }
        gap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_grid_is_uniform_and_cyclic() {
        let g = DirectionGrid::circle(360);
        assert_eq!(g.len(), 360);
        for i in 0..g.len() {
            let n = linalg::norm(g.point(i));
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert_eq!(g.neighbors(0), &[1, 359]);
        assert_eq!(g.nearest_index(&[1.0, 0.0]), 0);
        assert_eq!(g.nearest_index(&[0.0, -1.0]), 270);
    }

    #[test]
    fn fibonacci_sphere_covers() {
        let g = DirectionGrid::fibonacci_sphere(500);
        assert_eq!(g.len(), 500);
        for i in 0..g.len() {
            assert!((linalg::norm(g.point(i)) - 1.0).abs() < 1e-12);
            assert_eq!(g.neighbors(i).len(), 6);
        }
        // Mesh gap for 500 points stays below 0.3 (poles are the worst).
        assert!(g.max_neighbor_gap() < 0.3);
    }
}
