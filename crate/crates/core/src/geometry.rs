//! Vector math and oriented-box obstacles.

use alloc::string::String;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use libm::{cos, sin, sqrt};

/// A point or offset in the world frame, metres.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        sqrt(self.norm_squared())
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Horizontal (xy) length.
    pub fn norm_xy(self) -> f64 {
        sqrt(self.x * self.x + self.y * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn component_min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn component_max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn axis(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Axis-aligned bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
        max: Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    pub fn union(self, o: Aabb) -> Aabb {
        Aabb { min: self.min.component_min(o.min), max: self.max.component_max(o.max) }
    }

    pub fn grow(self, p: Vec3) -> Aabb {
        Aabb { min: self.min.component_min(p), max: self.max.component_max(p) }
    }

    pub fn contains(&self, o: &Aabb) -> bool {
        self.min.x <= o.min.x
            && self.min.y <= o.min.y
            && self.min.z <= o.min.z
            && self.max.x >= o.max.x
            && self.max.y >= o.max.y
            && self.max.z >= o.max.z
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    /// Squared distance from `p` to the closed box; 0 inside.
    pub fn distance_squared(&self, p: Vec3) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        let dz = (self.min.z - p.z).max(0.0).max(p.z - self.max.z);
        dx * dx + dy * dy + dz * dz
    }

    /// Conservative closed test of the segment `a + t (b - a)`, `t ∈ [0, 1]`.
    pub fn intersects_segment(&self, a: Vec3, b: Vec3) -> bool {
        let d = b - a;
        let mut enter = 0.0f64;
        let mut exit = 1.0f64;
        for i in 0..3 {
            let (o, di, lo, hi) = (a.axis(i), d.axis(i), self.min.axis(i), self.max.axis(i));
            if di == 0.0 {
                if o < lo || o > hi {
                    return false;
                }
            } else {
                let inv = 1.0 / di;
                let (mut t0, mut t1) = ((lo - o) * inv, (hi - o) * inv);
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
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryError {
    NonFinite(&'static str),
    NonPositiveHalfExtent { axis: usize, value: f64 },
    NegativeInflation(f64),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::NonFinite(field) => write!(f, "obstacle field `{field}` is not finite"),
            GeometryError::NonPositiveHalfExtent { axis, value } => {
                write!(f, "half extent on axis {axis} must be > 0, got {value}")
            }
            GeometryError::NegativeInflation(v) => write!(f, "inflation must be >= 0, got {v}"),
        }
    }
}

impl core::error::Error for GeometryError {}

/// A static obstacle: a box rotated by `yaw` about the world z axis.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstacleBox {
    pub center: Vec3,
    pub half_extents: Vec3,
    /// Radians in `[-π, π)`.
    pub yaw: f64,
    pub class_label: String,
}

impl ObstacleBox {
    pub fn new(center: Vec3, half_extents: Vec3, yaw: f64, class_label: impl Into<String>) -> Result<Self, GeometryError> {
        let b = ObstacleBox { center, half_extents, yaw: wrap_angle(yaw), class_label: class_label.into() };
        b.validate()?;
        Ok(b)
    }

    /// Axis-aligned box (yaw 0).
    pub fn axis_aligned(center: Vec3, half_extents: Vec3, class_label: impl Into<String>) -> Result<Self, GeometryError> {
        Self::new(center, half_extents, 0.0, class_label)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !self.center.is_finite() {
            return Err(GeometryError::NonFinite("center"));
        }
        if !self.half_extents.is_finite() {
            return Err(GeometryError::NonFinite("half_extents"));
        }
        if !self.yaw.is_finite() {
            return Err(GeometryError::NonFinite("yaw"));
        }
        for axis in 0..3 {
            let value = self.half_extents.axis(axis);
            if value <= 0.0 {
                return Err(GeometryError::NonPositiveHalfExtent { axis, value });
            }
        }
        Ok(())
    }

    pub fn top(&self) -> f64 {
        self.center.z + self.half_extents.z
    }

    pub fn frame(&self) -> BoxFrame {
        BoxFrame::new(self.center, self.yaw)
    }

    /// World-frame bounds with the half extents grown by `inflation`.
    pub fn aabb(&self, inflation: f64) -> Aabb {
        let f = self.frame();
        let h = self.half_extents + Vec3::new(inflation, inflation, inflation);
        let ex = f.cos.abs() * h.x + f.sin.abs() * h.y;
        let ey = f.sin.abs() * h.x + f.cos.abs() * h.y;
        let e = Vec3::new(ex, ey, h.z);
        // pad so rounding in the rotation can never make the bounds tighter
        // than the box they enclose
        let pad = 1e-9 * (1.0 + self.center.x.abs().max(self.center.y.abs()).max(self.center.z.abs()) + e.x.max(e.y).max(e.z));
        let e = e + Vec3::new(pad, pad, pad);
        Aabb { min: self.center - e, max: self.center + e }
    }
}

/// Rigid frame of an oriented box (translation plus rotation about z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxFrame {
    pub center: Vec3,
    pub cos: f64,
    pub sin: f64,
}

impl BoxFrame {
    pub fn new(center: Vec3, yaw: f64) -> Self {
        BoxFrame { center, cos: cos(yaw), sin: sin(yaw) }
    }

    /// World point into box-local coordinates.
    pub fn to_local(&self, p: Vec3) -> Vec3 {
        let d = p - self.center;
        Vec3::new(self.cos * d.x + self.sin * d.y, -self.sin * d.x + self.cos * d.y, d.z)
    }

    /// Distance from a world point to the box with the given half extents.
    pub fn distance(&self, half: Vec3, p: Vec3) -> f64 {
        let l = self.to_local(p);
        let qx = (l.x.abs() - half.x).max(0.0);
        let qy = (l.y.abs() - half.y).max(0.0);
        let qz = (l.z.abs() - half.z).max(0.0);
        sqrt(qx * qx + qy * qy + qz * qz)
    }

    /// True iff the open segment `(a, b)` touches the closed box. A zero-length
    /// segment is occluded only when its point lies in the box.
    pub fn segment_hits(&self, half: Vec3, a: Vec3, b: Vec3) -> bool {
        let la = self.to_local(a);
        let lb = self.to_local(b);
        let d = lb - la;
        let mut enter = f64::NEG_INFINITY;
        let mut exit = f64::INFINITY;
        for i in 0..3 {
            let (o, di, h) = (la.axis(i), d.axis(i), half.axis(i));
            if di == 0.0 {
                if o < -h || o > h {
                    return false;
                }
            } else {
                let inv = 1.0 / di;
                let (mut t0, mut t1) = ((-h - o) * inv, (h - o) * inv);
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
        if d == Vec3::ZERO {
            return true;
        }
        enter < 1.0 && exit > 0.0
    }
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(a: f64) -> f64 {
    use core::f64::consts::PI;
    if (-PI..PI).contains(&a) {
        return a;
    }
    let two_pi = 2.0 * PI;
    let mut w = a - two_pi * libm::floor((a + PI) / two_pi);
    if w >= PI {
        w -= two_pi;
    }
    if w < -PI {
        w += two_pi;
    }
    w
}

/// Distance from `p` to segment `[a, b]` in the xy plane.
pub fn point_segment_distance_xy(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let (apx, apy) = (p.x - a.x, p.y - a.y);
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 { ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (dx, dy) = (apx - t * abx, apy - t * aby);
    sqrt(dx * dx + dy * dy)
}

/// Distance from `p` to segment `[a, b]` in 3D.
pub fn point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + ab * t)).norm()
}
