//! Uniform voxel grid and bounded voxel domains.

use libm::{ceil, floor};

use crate::geometry::Vec3;

/// Integer voxel coordinates. Ordering is lexicographic `(ix, iy, iz)`,
/// which is the tie-break order used by both planners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoxelIndex {
    pub ix: i32,
    pub iy: i32,
    pub iz: i32,
}

impl VoxelIndex {
    pub const fn new(ix: i32, iy: i32, iz: i32) -> Self {
        VoxelIndex { ix, iy, iz }
    }

    pub fn offset(self, d: VoxelIndex) -> VoxelIndex {
        VoxelIndex::new(self.ix + d.ix, self.iy + d.iy, self.iz + d.iz)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub origin: Vec3,
    pub dxy: f64,
    pub dz: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl GridSpec {
    pub fn is_valid(&self) -> bool {
        self.dxy > 0.0 && self.dz > 0.0 && self.z_min < self.z_max && self.origin.is_finite()
    }

    pub fn center(&self, v: VoxelIndex) -> Vec3 {
        Vec3::new(
            self.origin.x + v.ix as f64 * self.dxy,
            self.origin.y + v.iy as f64 * self.dxy,
            self.origin.z + v.iz as f64 * self.dz,
        )
    }

    /// Nearest voxel; exact half-way ties go to the lower index on each axis.
    /// The z coordinate is first clamped into `[z_min, z_max]`.
    pub fn snap(&self, p: Vec3) -> VoxelIndex {
        let z = p.z.clamp(self.z_min, self.z_max);
        VoxelIndex::new(
            snap_axis(p.x - self.origin.x, self.dxy),
            snap_axis(p.y - self.origin.y, self.dxy),
            snap_axis(z - self.origin.z, self.dz),
        )
    }

    /// Inclusive range of vertical indices whose centres lie in `[z_min, z_max]`.
    pub fn z_index_range(&self) -> (i32, i32) {
        let lo = ceil((self.z_min - self.origin.z) / self.dz) as i32;
        let hi = floor((self.z_max - self.origin.z) / self.dz) as i32;
        (lo, hi)
    }

    /// Half of the voxel diagonal: the largest possible snap displacement.
    pub fn half_diagonal(&self) -> f64 {
        0.5 * libm::sqrt(2.0 * self.dxy * self.dxy + self.dz * self.dz)
    }
}

fn snap_axis(offset: f64, res: f64) -> i32 {
    ceil(offset / res - 0.5) as i32
}

/// Axis-aligned block of voxel indices with a dense linear numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VoxelDomain {
    pub min: VoxelIndex,
    pub max: VoxelIndex,
}

impl VoxelDomain {
    pub fn size(&self) -> (usize, usize, usize) {
        (
            (self.max.ix - self.min.ix + 1).max(0) as usize,
            (self.max.iy - self.min.iy + 1).max(0) as usize,
            (self.max.iz - self.min.iz + 1).max(0) as usize,
        )
    }

    pub fn volume(&self) -> usize {
        let (a, b, c) = self.size();
        a * b * c
    }

    pub fn contains(&self, v: VoxelIndex) -> bool {
        v.ix >= self.min.ix
            && v.ix <= self.max.ix
            && v.iy >= self.min.iy
            && v.iy <= self.max.iy
            && v.iz >= self.min.iz
            && v.iz <= self.max.iz
    }

    /// Dense index of `v`, or `None` outside the domain.
    #[inline]
    pub fn linear(&self, v: VoxelIndex) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        let (nx, ny, _) = self.size();
        let x = (v.ix - self.min.ix) as usize;
        let y = (v.iy - self.min.iy) as usize;
        let z = (v.iz - self.min.iz) as usize;
        Some((z * ny + y) * nx + x)
    }
}
