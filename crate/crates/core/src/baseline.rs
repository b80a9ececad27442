//! Priority-queue baseline: best-first search over `(voxel, t)` nodes ordered
//! by `g` alone, with a closed set and no pruning.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::vec;
use core::cmp::Ordering;

use crate::bvh::Bvh;
use crate::config::PlannerConfig;
use crate::grid::VoxelIndex;
use crate::objective::{transition_cost, visibility};
use crate::scenario::Scenario;
use crate::search::{PlanContext, PlanError, PlanResult};

#[derive(Clone, Copy, Debug)]
pub struct SearchNode {
    pub voxel: VoxelIndex,
    pub layer: u32,
    pub g: f64,
    /// Arena index of the predecessor; `u32::MAX` for the root.
    pub parent: u32,
}

/// Heap key: smallest `g` first, then deeper layer, then smaller voxel.
#[derive(Clone, Copy)]
struct Open {
    g: f64,
    layer: u32,
    voxel: VoxelIndex,
    node: u32,
}

impl Ord for Open {
    fn cmp(&self, o: &Self) -> Ordering {
        o.g.total_cmp(&self.g)
            .then(self.layer.cmp(&o.layer))
            .then_with(|| o.voxel.cmp(&self.voxel))
            .then(o.node.cmp(&self.node))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl PartialEq for Open {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Open {}

pub fn plan_baseline(scenario: &Scenario, bvh: &Bvh, cfg: &PlannerConfig) -> Result<PlanResult, PlanError> {
    let ctx = PlanContext::new(scenario, bvh, cfg)?;
    Ok(search(&ctx))
}

pub fn search(ctx: &PlanContext<'_>) -> PlanResult {
    let cfg = &ctx.cfg;
    let grid = &ctx.grid;
    let cap = cfg.expansion_cap;
    let horizon = ctx.horizon() as u32;
    let start_pos = ctx.snapped_start();

    let mut distances = ctx.distances();
    let mut arena = vec![SearchNode { voxel: ctx.start, layer: 0, g: 0.0, parent: u32::MAX }];
    let mut heap = BinaryHeap::new();
    heap.push(Open { g: 0.0, layer: 0, voxel: ctx.start, node: 0 });
    let mut best: BTreeMap<(VoxelIndex, u32), f64> = BTreeMap::new();
    best.insert((ctx.start, 0), 0.0);
    let mut closed: BTreeSet<(VoxelIndex, u32)> = BTreeSet::new();
    let mut closed_per_layer = vec![0usize; horizon as usize + 1];
    let mut expansions = 0u64;

    while let Some(top) = heap.pop() {
        if !closed.insert((top.voxel, top.layer)) {
            continue;
        }
        closed_per_layer[top.layer as usize] += 1;
        if top.layer == horizon {
            let mut trajectory = vec![start_pos; horizon as usize + 1];
            let mut k = top.node;
            while k != u32::MAX {
                let n = arena[k as usize];
                trajectory[n.layer as usize] = grid.center(n.voxel);
                k = n.parent;
            }
            return PlanResult {
                trajectory,
                converged: true,
                expansions,
                runtime: 0.0,
                total_cost: top.g,
                per_layer_frontier_sizes: closed_per_layer,
                max_unpruned_frontier: 0,
            };
        }
        let t = top.layer + 1;
        let p = ctx.target(t as usize);
        let q = ctx.viewpoints[t as usize];
        let a = grid.center(top.voxel);
        for &d in &ctx.offsets {
            let v = top.voxel.offset(d);
            if !ctx.gate(v, t as usize) {
                continue;
            }
            let dist = distances.get(v, grid, ctx.bvh);
            if dist < cfg.d_safe || closed.contains(&(v, t)) {
                continue;
            }
            if expansions >= cap {
                return PlanResult::fallback(start_pos, expansions, closed_per_layer, 0);
            }
            expansions += 1;
            let b = grid.center(v);
            let vb = visibility(b, p, ctx.bvh, &ctx.rays);
            if vb < cfg.v_min {
                continue;
            }
            let g = top.g + transition_cost(a, b, q, vb, dist, cfg);
            let slot = best.entry((v, t)).or_insert(f64::INFINITY);
            if g < *slot {
                *slot = g;
                let node = arena.len() as u32;
                arena.push(SearchNode { voxel: v, layer: t, g, parent: top.node });
                heap.push(Open { g, layer: t, voxel: v, node });
            }
        }
    }
    PlanResult::fallback(start_pos, expansions, closed_per_layer, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn heap_order() {
        let v = VoxelIndex::new(0, 0, 0);
        let w = VoxelIndex::new(1, 0, 0);
        let mut h = BinaryHeap::new();
        h.push(Open { g: 2.0, layer: 5, voxel: v, node: 0 });
        h.push(Open { g: 1.0, layer: 1, voxel: w, node: 1 });
        h.push(Open { g: 1.0, layer: 3, voxel: w, node: 2 });
        h.push(Open { g: 1.0, layer: 3, voxel: v, node: 3 });
        let order: Vec<u32> = core::iter::from_fn(|| h.pop().map(|o| o.node)).collect();
        assert_eq!(order, vec![3, 2, 1, 0]);
    }
}
