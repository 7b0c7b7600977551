use crate::error::{Error, Result};
use crate::geometry::{add, norm, sub, Vec3};
use serde::{Deserialize, Serialize};

/// Cubic domain split into `n³` voxels; collocation at voxel centres with
/// midpoint weights `h³`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainGrid {
    pub center: Vec3,
    pub edge: f64,
    pub n: usize,
}

impl DomainGrid {
    pub fn new(center: Vec3, edge: f64, n: usize) -> Result<Self> {
        if !(edge > 0.0 && edge.is_finite()) {
            return Err(Error::InvalidGrid(format!("edge length must be positive, got {edge}")));
        }
        if n == 0 {
            return Err(Error::InvalidGrid("resolution must be at least 1".into()));
        }
        Ok(Self { center, edge, n })
    }

    pub fn spacing(&self) -> f64 {
        self.edge / self.n as f64
    }

    pub fn weight(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn ijk(&self, a: usize) -> [usize; 3] {
        [a / (self.n * self.n), (a / self.n) % self.n, a % self.n]
    }

    pub fn point_ijk(&self, ijk: [usize; 3]) -> Vec3 {
        let h = self.spacing();
        let lo = self.lower_corner();
        [
            lo[0] + (ijk[0] as f64 + 0.5) * h,
            lo[1] + (ijk[1] as f64 + 0.5) * h,
            lo[2] + (ijk[2] as f64 + 0.5) * h,
        ]
    }

    pub fn point(&self, a: usize) -> Vec3 {
        self.point_ijk(self.ijk(a))
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.len()).map(|a| self.point(a)).collect()
    }

    pub fn lower_corner(&self) -> Vec3 {
        let half = 0.5 * self.edge;
        sub(self.center, [half; 3])
    }

    pub fn contains(&self, p: Vec3) -> bool {
        let lo = self.lower_corner();
        (0..3).all(|d| p[d] >= lo[d] && p[d] <= lo[d] + self.edge)
    }

    /// Nearest collocation node (clamped into the domain).
    pub fn nearest_node(&self, p: Vec3) -> usize {
        let h = self.spacing();
        let lo = self.lower_corner();
        let c = |d: usize| (((p[d] - lo[d]) / h - 0.5).round().max(0.0) as usize).min(self.n - 1);
        self.index(c(0), c(1), c(2))
    }

    /// Diagonal offset `(h/2)(1,1,1)/√3` used to keep sources off the nodes.
    pub fn source_offset(&self) -> Vec3 {
        [0.5 * self.spacing() / 3f64.sqrt(); 3]
    }

    /// Source-placement rule: a point closer than `h/4` to a collocation
    /// node is moved to that node plus [`source_offset`](Self::source_offset);
    /// other points are returned unchanged.
    pub fn place_source(&self, p: Vec3) -> Vec3 {
        let a = self.nearest_node(p);
        let node = self.point(a);
        if norm(sub(p, node)) < 0.25 * self.spacing() {
            add(node, self.source_offset())
        } else {
            p
        }
    }

    /// Smallest distance from `p` to any collocation node.
    pub fn distance_to_nodes(&self, p: Vec3) -> f64 {
        norm(sub(p, self.point(self.nearest_node(p))))
    }
}
