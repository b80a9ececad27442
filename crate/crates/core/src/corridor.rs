//! Search corridor: a lateral band around the target path plus buffer zones
//! around obstacles whose footprint enters that band.
//!
//! Admission is decided per voxel column from the horizontal distance of the
//! column centre to the target polyline, so the predicate is a 2D bitmap
//! combined with the grid's vertical range.

use alloc::vec;
use alloc::vec::Vec;

use libm::{ceil, floor, sqrt};

use crate::geometry::{point_segment_distance_xy, BoxFrame, ObstacleBox, Vec3};
use crate::grid::{GridSpec, VoxelDomain, VoxelIndex};

#[derive(Clone, Debug)]
pub struct Corridor {
    pub half_width: f64,
    pub buffer: f64,
    domain: VoxelDomain,
    columns: Vec<bool>,
}

/// Footprint of a box in the xy plane.
#[derive(Clone, Copy)]
struct Footprint {
    frame: BoxFrame,
    hx: f64,
    hy: f64,
}

impl Footprint {
    fn of(b: &ObstacleBox) -> Self {
        Footprint { frame: b.frame(), hx: b.half_extents.x, hy: b.half_extents.y }
    }

    fn local(&self, p: Vec3) -> (f64, f64) {
        let l = self.frame.to_local(p);
        (l.x, l.y)
    }

    fn point_distance(&self, p: Vec3) -> f64 {
        let (x, y) = self.local(p);
        let qx = (x.abs() - self.hx).max(0.0);
        let qy = (y.abs() - self.hy).max(0.0);
        sqrt(qx * qx + qy * qy)
    }

    /// Horizontal radius of the circumscribed circle.
    fn radius(&self) -> f64 {
        sqrt(self.hx * self.hx + self.hy * self.hy)
    }

    fn corners(&self) -> [Vec3; 4] {
        let f = &self.frame;
        let mut out = [Vec3::ZERO; 4];
        for (k, (sx, sy)) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].into_iter().enumerate() {
            let (lx, ly) = (sx * self.hx, sy * self.hy);
            out[k] = Vec3::new(f.center.x + f.cos * lx - f.sin * ly, f.center.y + f.sin * lx + f.cos * ly, 0.0);
        }
        out
    }

    fn segment_crosses(&self, a: Vec3, b: Vec3) -> bool {
        let (ax, ay) = self.local(a);
        let (bx, by) = self.local(b);
        let (dx, dy) = (bx - ax, by - ay);
        let (mut enter, mut exit) = (0.0f64, 1.0f64);
        for (o, d, h) in [(ax, dx, self.hx), (ay, dy, self.hy)] {
            if d == 0.0 {
                if o.abs() > h {
                    return false;
                }
            } else {
                let (mut t0, mut t1) = ((-h - o) / d, (h - o) / d);
                if t0 > t1 {
                    core::mem::swap(&mut t0, &mut t1);
                }
                enter = enter.max(t0);
                exit = exit.min(t1);
                if enter > exit {
                    return false;
                }
            }
        }
        true
    }

    fn segment_distance(&self, a: Vec3, b: Vec3) -> f64 {
        if self.segment_crosses(a, b) {
            return 0.0;
        }
        let mut d = self.point_distance(a).min(self.point_distance(b));
        for c in self.corners() {
            d = d.min(point_segment_distance_xy(c, a, b));
        }
        d
    }
}

/// Horizontal distance from `p` to the polyline through `pts`.
pub fn polyline_distance_xy(p: Vec3, pts: &[Vec3]) -> f64 {
    match pts.len() {
        0 => f64::INFINITY,
        1 => (p - pts[0]).norm_xy(),
        _ => pts.windows(2).map(|w| point_segment_distance_xy(p, w[0], w[1])).fold(f64::INFINITY, f64::min),
    }
}

impl Corridor {
    /// Builds the corridor for `path` with lateral `half_width` and obstacle
    /// buffer `buffer` (the influence distance).
    pub fn build(path: &[Vec3], obstacles: &[ObstacleBox], grid: &GridSpec, half_width: f64, buffer: f64) -> Corridor {
        let (iz_lo, iz_hi) = grid.z_index_range();
        if path.is_empty() {
            let domain = VoxelDomain { min: VoxelIndex::new(0, 0, iz_lo), max: VoxelIndex::new(-1, -1, iz_hi) };
            return Corridor { half_width, buffer, domain, columns: Vec::new() };
        }
        let segments: Vec<(Vec3, Vec3)> = if path.len() == 1 {
            vec![(path[0], path[0])]
        } else {
            path.windows(2).map(|w| (w[0], w[1])).collect()
        };

        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut include = |x0: f64, y0: f64, x1: f64, y1: f64| {
            lo = (lo.0.min(x0), lo.1.min(y0));
            hi = (hi.0.max(x1), hi.1.max(y1));
        };
        for p in path {
            include(p.x - half_width, p.y - half_width, p.x + half_width, p.y + half_width);
        }

        let footprints: Vec<Footprint> = obstacles.iter().map(Footprint::of).collect();
        let intersecting: Vec<Footprint> = footprints
            .iter()
            .copied()
            .filter(|fp| {
                let c = fp.frame.center;
                let r = fp.radius() + half_width;
                segments.iter().any(|&(a, b)| {
                    point_segment_distance_xy(c, a, b) <= r && fp.segment_distance(a, b) <= half_width
                })
            })
            .collect();
        for fp in &intersecting {
            let r = fp.radius() + buffer;
            let c = fp.frame.center;
            include(c.x - r, c.y - r, c.x + r, c.y + r);
        }

        let ix_lo = floor((lo.0 - grid.origin.x) / grid.dxy) as i32;
        let iy_lo = floor((lo.1 - grid.origin.y) / grid.dxy) as i32;
        let ix_hi = ceil((hi.0 - grid.origin.x) / grid.dxy) as i32;
        let iy_hi = ceil((hi.1 - grid.origin.y) / grid.dxy) as i32;
        let domain = VoxelDomain { min: VoxelIndex::new(ix_lo, iy_lo, iz_lo), max: VoxelIndex::new(ix_hi, iy_hi, iz_hi) };
        let nx = (ix_hi - ix_lo + 1) as usize;
        let ny = (iy_hi - iy_lo + 1) as usize;
        let mut columns = vec![false; nx * ny];

        let mut mark_disc = |cx: f64, cy: f64, r: f64, test: &dyn Fn(Vec3) -> bool| {
            let x0 = (floor((cx - r - grid.origin.x) / grid.dxy) as i32).max(ix_lo);
            let x1 = (ceil((cx + r - grid.origin.x) / grid.dxy) as i32).min(ix_hi);
            let y0 = (floor((cy - r - grid.origin.y) / grid.dxy) as i32).max(iy_lo);
            let y1 = (ceil((cy + r - grid.origin.y) / grid.dxy) as i32).min(iy_hi);
            for iy in y0..=y1 {
                for ix in x0..=x1 {
                    let k = (iy - iy_lo) as usize * nx + (ix - ix_lo) as usize;
                    if columns[k] {
                        continue;
                    }
                    let c = grid.center(VoxelIndex::new(ix, iy, 0));
                    if test(c) {
                        columns[k] = true;
                    }
                }
            }
        };

        for &(a, b) in &segments {
            let mid = (a + b) * 0.5;
            let r = 0.5 * (b - a).norm_xy() + half_width;
            mark_disc(mid.x, mid.y, r, &|c| point_segment_distance_xy(c, a, b) <= half_width);
        }
        for fp in &intersecting {
            let c = fp.frame.center;
            mark_disc(c.x, c.y, fp.radius() + buffer, &|p| fp.point_distance(p) <= buffer);
        }

        Corridor { half_width, buffer, domain, columns }
    }

    /// Bounding block of all admissible voxels (vertical range included).
    pub fn domain(&self) -> VoxelDomain {
        self.domain
    }

    #[inline]
    pub fn admits(&self, v: VoxelIndex) -> bool {
        if !self.domain.contains(v) {
            return false;
        }
        let nx = (self.domain.max.ix - self.domain.min.ix + 1) as usize;
        self.columns[(v.iy - self.domain.min.iy) as usize * nx + (v.ix - self.domain.min.ix) as usize]
    }

    pub fn admitted_columns(&self) -> usize {
        self.columns.iter().filter(|&&c| c).count()
    }
}
