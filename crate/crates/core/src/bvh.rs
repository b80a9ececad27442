//! Bounding volume hierarchy over oriented obstacle boxes.
//!
//! Two queries are served: distance from a point to the nearest box grown by
//! the build-time inflation, and whether a segment is blocked by any box at
//! its raw (uninflated) size. Each node therefore carries two sets of bounds.
//!
//! The tree is built by a median split on the longest axis of the centroid
//! bounds, with primitive index as the tie-break, so a given input order
//! always produces the same tree.

use alloc::vec::Vec;

use crate::geometry::{Aabb, BoxFrame, GeometryError, ObstacleBox, Vec3};

const LEAF_SIZE: usize = 2;
const STACK_DEPTH: usize = 64;

#[derive(Clone, Debug)]
struct Prim {
    frame: BoxFrame,
    half: Vec3,
    half_inflated: Vec3,
}

#[derive(Clone, Debug)]
struct Node {
    inflated: Aabb,
    raw: Aabb,
    /// For leaves: first primitive; for interior nodes: left child (right is `left + 1`).
    first: u32,
    /// Primitive count for leaves, 0 for interior nodes.
    count: u32,
}

/// Immutable spatial index; safe to share across threads.
#[derive(Clone, Debug)]
pub struct Bvh {
    nodes: Vec<Node>,
    prims: Vec<Prim>,
    inflation: f64,
}

impl Bvh {
    pub fn build(obstacles: &[ObstacleBox], inflation: f64) -> Result<Bvh, GeometryError> {
        if !(inflation >= 0.0) || !inflation.is_finite() {
            return Err(GeometryError::NegativeInflation(inflation));
        }
        let mut prims = Vec::with_capacity(obstacles.len());
        let mut raw = Vec::with_capacity(obstacles.len());
        let mut inflated = Vec::with_capacity(obstacles.len());
        for b in obstacles {
            b.validate()?;
            let d = Vec3::new(inflation, inflation, inflation);
            prims.push(Prim { frame: b.frame(), half: b.half_extents, half_inflated: b.half_extents + d });
            raw.push(b.aabb(0.0));
            inflated.push(b.aabb(inflation));
        }
        let mut bvh = Bvh { nodes: Vec::new(), prims: Vec::new(), inflation };
        if prims.is_empty() {
            return Ok(bvh);
        }
        let mut order: Vec<u32> = (0..prims.len() as u32).collect();
        bvh.nodes.push(Node { inflated: Aabb::EMPTY, raw: Aabb::EMPTY, first: 0, count: 0 });
        let mut builder = Builder { raw: &raw, inflated: &inflated, nodes: &mut bvh.nodes };
        builder.split(0, &mut order, 0);
        bvh.prims = order.iter().map(|&i| prims[i as usize].clone()).collect();
        Ok(bvh)
    }

    pub fn inflation(&self) -> f64 {
        self.inflation
    }

    pub fn len(&self) -> usize {
        self.prims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prims.is_empty()
    }

    /// Euclidean distance to the nearest inflated box surface, 0 inside one,
    /// `f64::INFINITY` for an empty index.
    pub fn distance(&self, p: Vec3) -> f64 {
        self.distance_within(p, f64::INFINITY)
    }

    /// `min(distance(p), limit)`, computed exactly; subtrees at or beyond
    /// `limit` are skipped.
    pub fn distance_within(&self, p: Vec3, limit: f64) -> f64 {
        if self.nodes.is_empty() {
            return limit;
        }
        let mut best = limit;
        let mut best_sq = limit * limit;
        let mut stack = [0u32; STACK_DEPTH];
        let mut sp = 1usize;
        stack[0] = 0;
        while sp > 0 {
            sp -= 1;
            let node = &self.nodes[stack[sp] as usize];
            if node.inflated.distance_squared(p) >= best_sq {
                continue;
            }
            if node.count > 0 {
                let start = node.first as usize;
                for prim in &self.prims[start..start + node.count as usize] {
                    let d = prim.frame.distance(prim.half_inflated, p);
                    if d < best {
                        best = d;
                        best_sq = d * d;
                    }
                }
                if best == 0.0 {
                    return 0.0;
                }
            } else {
                let l = node.first;
                let (dl, dr) = (
                    self.nodes[l as usize].inflated.distance_squared(p),
                    self.nodes[l as usize + 1].inflated.distance_squared(p),
                );
                // push the farther child first so the nearer one is popped next
                let (near, far) = if dl <= dr { (l, l + 1) } else { (l + 1, l) };
                stack[sp] = far;
                stack[sp + 1] = near;
                sp += 2;
            }
        }
        best
    }

    /// True iff the open segment `(a, b)` touches any raw obstacle box.
    pub fn segment_occluded(&self, a: Vec3, b: Vec3) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut stack = [0u32; STACK_DEPTH];
        let mut sp = 1usize;
        stack[0] = 0;
        while sp > 0 {
            sp -= 1;
            let node = &self.nodes[stack[sp] as usize];
            if !node.raw.intersects_segment(a, b) {
                continue;
            }
            if node.count > 0 {
                let start = node.first as usize;
                for prim in &self.prims[start..start + node.count as usize] {
                    if prim.frame.segment_hits(prim.half, a, b) {
                        return true;
                    }
                }
            } else {
                stack[sp] = node.first + 1;
                stack[sp + 1] = node.first;
                sp += 2;
            }
        }
        false
    }

    /// Checks the containment invariant: every node's bounds enclose its
    /// children's (and leaves enclose their boxes' bounds).
    pub fn bounds_are_nested(&self) -> bool {
        self.nodes.iter().all(|n| {
            if n.count > 0 {
                true
            } else {
                let (l, r) = (&self.nodes[n.first as usize], &self.nodes[n.first as usize + 1]);
                n.inflated.contains(&l.inflated)
                    && n.inflated.contains(&r.inflated)
                    && n.raw.contains(&l.raw)
                    && n.raw.contains(&r.raw)
            }
        })
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            let n = &nodes[i];
            if n.count > 0 {
                1
            } else {
                1 + go(nodes, n.first as usize).max(go(nodes, n.first as usize + 1))
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            go(&self.nodes, 0)
        }
    }
}

struct Builder<'a> {
    raw: &'a [Aabb],
    inflated: &'a [Aabb],
    nodes: &'a mut Vec<Node>,
}

impl Builder<'_> {
    fn split(&mut self, node: usize, items: &mut [u32], offset: usize) {
        let mut raw = Aabb::EMPTY;
        let mut inflated = Aabb::EMPTY;
        let mut centroids = Aabb::EMPTY;
        for &i in items.iter() {
            raw = raw.union(self.raw[i as usize]);
            inflated = inflated.union(self.inflated[i as usize]);
            centroids = centroids.grow(self.raw[i as usize].center());
        }
        self.nodes[node].raw = raw;
        self.nodes[node].inflated = inflated;
        if items.len() <= LEAF_SIZE {
            self.nodes[node].first = offset as u32;
            self.nodes[node].count = items.len() as u32;
            return;
        }
        let ext = centroids.extent();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let raw_boxes = self.raw;
        items.sort_by(|&a, &b| {
            let ca = raw_boxes[a as usize].center().axis(axis);
            let cb = raw_boxes[b as usize].center().axis(axis);
            ca.total_cmp(&cb).then(a.cmp(&b))
        });
        let mid = items.len() / 2;
        let left = self.nodes.len();
        self.nodes.push(Node { inflated: Aabb::EMPTY, raw: Aabb::EMPTY, first: 0, count: 0 });
        self.nodes.push(Node { inflated: Aabb::EMPTY, raw: Aabb::EMPTY, first: 0, count: 0 });
        self.nodes[node].first = left as u32;
        self.nodes[node].count = 0;
        let (lo, hi) = items.split_at_mut(mid);
        self.split(left, lo, offset);
        self.split(left + 1, hi, offset + mid);
    }
}
