//! Layered DAG beam search.
//!
//! Layer `t` is relaxed from the pruned frontier of layer `t - 1`; only the
//! `B` lowest-`g` states survive each layer. Ties are broken by voxel index.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::bvh::Bvh;
use crate::config::PlannerConfig;
use crate::grid::VoxelIndex;
use crate::objective::{transition_cost, visibility};
use crate::scenario::Scenario;
use crate::search::{PlanContext, PlanError, PlanResult};

#[derive(Clone, Copy, Debug)]
struct Entry {
    voxel: VoxelIndex,
    g: f64,
    /// Position of the predecessor in the previous layer's pruned frontier.
    parent: u32,
}

fn order(a: &Entry, b: &Entry) -> Ordering {
    a.g.total_cmp(&b.g).then_with(|| a.voxel.cmp(&b.voxel))
}

/// Keeps the `limit` best entries, sorted by `(g, voxel)`.
fn prune(entries: &mut Vec<Entry>, limit: usize) {
    if entries.len() > limit {
        entries.select_nth_unstable_by(limit, order);
        entries.truncate(limit);
    }
    entries.sort_unstable_by(order);
}

pub fn plan(scenario: &Scenario, bvh: &Bvh, cfg: &PlannerConfig) -> Result<PlanResult, PlanError> {
    let ctx = PlanContext::new(scenario, bvh, cfg)?;
    Ok(search(&ctx))
}

/// Runs the layered search on a prepared context.
pub fn search(ctx: &PlanContext<'_>) -> PlanResult {
    let cfg = &ctx.cfg;
    let grid = &ctx.grid;
    let domain = ctx.corridor.domain();
    let volume = domain.volume();
    let beam = cfg.beam_width.limit();
    let cap = cfg.expansion_cap;
    let horizon = ctx.horizon();
    let start_pos = ctx.snapped_start();

    let mut distances = ctx.distances();
    // slot of a voxel in the layer being built, valid when stamp matches
    let mut slot = vec![0u32; volume];
    let mut slot_stamp = vec![u32::MAX; volume];
    // visibility at a voxel for the layer being built
    let mut vis = vec![0.0f64; volume];
    let mut vis_stamp = vec![u32::MAX; volume];

    let mut frontier = vec![Entry { voxel: ctx.start, g: 0.0, parent: 0 }];
    // per layer: (voxel, parent) of the pruned frontier, for backtracking
    let mut history: Vec<Vec<(VoxelIndex, u32)>> = Vec::with_capacity(horizon + 1);
    history.push(vec![(ctx.start, 0)]);
    let mut sizes = Vec::with_capacity(horizon + 1);
    sizes.push(1);
    let mut max_unpruned = 1usize;
    let mut expansions = 0u64;
    let mut next: Vec<Entry> = Vec::new();

    for t in 1..=horizon {
        let stamp = t as u32;
        let p = ctx.target(t);
        let q = ctx.viewpoints[t];
        next.clear();
        for (ui, u) in frontier.iter().enumerate() {
            let a = grid.center(u.voxel);
            for &d in &ctx.offsets {
                let v = u.voxel.offset(d);
                if !ctx.gate(v, t) {
                    continue;
                }
                let dist = distances.get(v, grid, ctx.bvh);
                if dist < cfg.d_safe {
                    continue;
                }
                if expansions >= cap {
                    return PlanResult::fallback(start_pos, expansions, sizes, max_unpruned);
                }
                expansions += 1;
                let b = grid.center(v);
                let i = domain.linear(v).expect("admitted voxel inside domain");
                let vb = if vis_stamp[i] == stamp {
                    vis[i]
                } else {
                    let x = visibility(b, p, ctx.bvh, &ctx.rays);
                    vis[i] = x;
                    vis_stamp[i] = stamp;
                    x
                };
                if vb < cfg.v_min {
                    continue;
                }
                let g = u.g + transition_cost(a, b, q, vb, dist, cfg);
                if slot_stamp[i] == stamp {
                    let e = &mut next[slot[i] as usize];
                    if g < e.g {
                        e.g = g;
                        e.parent = ui as u32;
                    }
                } else {
                    slot_stamp[i] = stamp;
                    slot[i] = next.len() as u32;
                    next.push(Entry { voxel: v, g, parent: ui as u32 });
                }
            }
        }
        if next.is_empty() {
            return PlanResult::fallback(start_pos, expansions, sizes, max_unpruned);
        }
        max_unpruned = max_unpruned.max(next.len());
        prune(&mut next, beam);
        sizes.push(next.len());
        history.push(next.iter().map(|e| (e.voxel, e.parent)).collect());
        core::mem::swap(&mut frontier, &mut next);
    }

    // frontier is sorted, so its head is the argmin with the voxel tie-break
    let best = frontier[0];
    let mut trajectory = vec![start_pos; horizon + 1];
    let mut k = 0usize;
    for t in (0..=horizon).rev() {
        let (v, parent) = history[t][k];
        trajectory[t] = grid.center(v);
        k = parent as usize;
    }
    PlanResult {
        trajectory,
        converged: true,
        expansions,
        runtime: 0.0,
        total_cost: best.g,
        per_layer_frontier_sizes: sizes,
        max_unpruned_frontier: max_unpruned,
    }
}
