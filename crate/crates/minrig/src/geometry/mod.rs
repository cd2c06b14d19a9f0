//! Point configurations and convex hull computations backing the
//! framework constructions.

mod hull2d;
mod hull3d;

pub use hull2d::{convex_hull_2d, select_center_2d, Hull2d};
pub use hull3d::{convex_hull_3d, select_central_edge_3d, Hull3d};

use crate::error::{Error, Result};
use crate::TOL_RANK;
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A finite point set, indexed 0..n. Construction and hulls work in
/// dimension 2 or 3; higher ambient dimensions appear only as targets of
/// lifted realization searches.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dim: usize,
    coords: Vec<f64>,
}

impl Configuration {
    /// Builds a configuration from flat row-major coordinates.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DegenerateInput("dimension 0 not supported".into()));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::DegenerateInput(format!(
                "coordinate count {} is not a positive multiple of {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateInput("non-finite coordinate".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points_2d(points: &[[f64; 2]]) -> Result<Self> {
        Self::new(2, points.iter().flatten().copied().collect())
    }

    pub fn from_points_3d(points: &[[f64; 3]]) -> Result<Self> {
        Self::new(3, points.iter().flatten().copied().collect())
    }

    /// Uniform random points in the unit cube, reproducible from the seed.
    pub fn random(n: usize, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n * dim).map(|_| rng.random::<f64>()).collect();
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn set_point(&mut self, i: usize, p: &[f64]) {
        self.coords[i * self.dim..(i + 1) * self.dim].copy_from_slice(p);
    }

    pub fn push_point(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }

    pub fn remove_point(&mut self, i: usize) {
        self.coords.drain(i * self.dim..(i + 1) * self.dim);
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist2(i, j).sqrt()
    }

    pub fn dist2(&self, i: usize, j: usize) -> f64 {
        let (p, q) = (self.point(i), self.point(j));
        p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// Diagonal of the axis-aligned bounding box; the length scale for
    /// tolerance decisions.
    pub fn scale(&self) -> f64 {
        let d = self.dim;
        let mut span2 = 0.0;
        for k in 0..d {
            let axis = self.coords.iter().skip(k).step_by(d);
            let lo = axis.clone().fold(f64::INFINITY, |a, &b| a.min(b));
            let hi = axis.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            span2 += (hi - lo) * (hi - lo);
        }
        span2.sqrt()
    }

    /// Dimension of the affine span, decided by singular values of the
    /// centered coordinate matrix relative to the largest one.
    pub fn affine_rank(&self) -> usize {
        let n = self.len();
        if n <= 1 {
            return 0;
        }
        let d = self.dim;
        let mut centroid = vec![0.0; d];
        for i in 0..n {
            for k in 0..d {
                centroid[k] += self.point(i)[k];
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }
        let m = DMatrix::from_fn(n, d, |i, k| self.point(i)[k] - centroid[k]);
        let sv = m.singular_values();
        let smax = sv.max();
        if smax <= 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > TOL_RANK * smax).count()
    }

    /// Errors unless the affine span has full dimension.
    pub fn require_full_dimensional(&self) -> Result<()> {
        let rank = self.affine_rank();
        if rank < self.dim {
            return Err(Error::NotFullDimensional { rank, dim: self.dim });
        }
        Ok(())
    }

    /// Errors if two points coincide within the geometric tolerance.
    pub fn require_distinct_points(&self) -> Result<()> {
        let tol = crate::TOL_GEOM * self.scale();
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                if self.dist(i, j) <= tol {
                    return Err(Error::DegenerateInput(format!("points {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }
}
