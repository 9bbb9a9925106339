use std::collections::HashSet;

use super::blocks::is_class_member;
use super::trees::{level_sequence_graph, level_sequences, MAX_UNLABELLED_TREES};
use crate::canon::{rooted_code, vertex_orbits};
use crate::classes::{BlockClass, BlockFamily};
use crate::error::{Error, Result};
use crate::graph::RootedGraph;

pub const MAX_LABELLED_MEMBERS: usize = 7;

/// Every connected labelled graph on `0..n` whose blocks lie in `class`,
/// rooted at 0.
pub fn all_class_members_labelled(n: usize, class: &BlockClass) -> Result<Vec<RootedGraph>> {
    if n == 0 || n > MAX_LABELLED_MEMBERS {
        return Err(Error::SizeBound {
            size: n,
            bound: MAX_LABELLED_MEMBERS,
        });
    }
    if !class.has_block_generator() {
        return Err(Error::NoBlockGenerator(class.name().to_string()));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    let mut edges = Vec::with_capacity(pairs.len());
    for mask in 0u64..(1u64 << pairs.len()) {
        if (mask.count_ones() as usize) + 1 < n {
            continue;
        }
        edges.clear();
        edges.extend((0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]));
        let g = RootedGraph::new(n, 0, &edges)?;
        if g.is_connected() && is_class_member(&g, class)? {
            out.push(g);
        }
    }
    Ok(out)
}

/// Rooted unlabelled members of `class` with `1..=max_n` vertices, one per
/// isomorphism type; entry `k` holds the members on `k` vertices.
pub fn rooted_members(class: &BlockClass, max_n: usize) -> Result<Vec<Vec<RootedGraph>>> {
    let mut members: Vec<Vec<RootedGraph>> = vec![Vec::new(); max_n + 1];
    if max_n == 0 {
        return Ok(members);
    }
    if matches!(class.family(), BlockFamily::Trees) && max_n <= MAX_UNLABELLED_TREES {
        for (k, slot) in members.iter_mut().enumerate().skip(1) {
            *slot = level_sequences(k)?.map(|l| level_sequence_graph(&l)).collect();
        }
        return Ok(members);
    }
    let blocks = class.blocks(max_n)?;
    // pieces[k]: root in a single block, k vertices in total
    let mut pieces: Vec<Vec<RootedGraph>> = vec![Vec::new(); max_n + 1];
    members[1].push(RootedGraph::single_vertex());
    for m in 2..=max_n {
        pieces[m] = pieces_of_size(&blocks, &members, m);
        members[m] = multisets(&pieces, m);
    }
    Ok(members)
}

/// Rooted graphs whose root lies in one block, on `m` vertices.
pub(crate) fn pieces_of_size(blocks: &[RootedGraph], members: &[Vec<RootedGraph>], m: usize) -> Vec<RootedGraph> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for b in blocks.iter().filter(|b| b.n() <= m) {
        let orbits = vertex_orbits(b, &vec![0; b.n()]);
        let mut reps = Vec::new();
        for v in 0..b.n() {
            if !reps.iter().any(|&r: &usize| orbits[r] == orbits[v]) {
                reps.push(v);
            }
        }
        for r in reps {
            let others: Vec<usize> = (0..b.n()).filter(|&v| v != r).collect();
            for_each_assignment(&others, members, m - 1, &mut |assign| {
                let g = attach(&b.with_root(r), &others, assign);
                if seen.insert(rooted_code(&g)) {
                    out.push(g);
                }
            });
        }
    }
    out
}

/// Glues `branches[i]` (by its root) onto vertex `at[i]` of `base`.
pub(crate) fn attach(base: &RootedGraph, at: &[usize], branches: &[&RootedGraph]) -> RootedGraph {
    let mut g = base.clone();
    for (&v, br) in at.iter().zip(branches) {
        if br.n() > 1 {
            g = g.glue(v, br).0;
        }
    }
    g
}

/// Calls `f` with every choice of one member per slot, sizes summing to
/// `total`.
pub(crate) fn for_each_assignment<'a>(
    slots: &[usize],
    members: &'a [Vec<RootedGraph>],
    total: usize,
    f: &mut dyn FnMut(&[&'a RootedGraph]),
) {
    fn rec<'a>(
        k: usize,
        left: usize,
        slots: usize,
        members: &'a [Vec<RootedGraph>],
        cur: &mut Vec<&'a RootedGraph>,
        f: &mut dyn FnMut(&[&'a RootedGraph]),
    ) {
        if k == slots {
            if left == 0 {
                f(cur);
            }
            return;
        }
        let remaining = slots - k - 1;
        if left < remaining + 1 {
            return;
        }
        for size in 1..=left - remaining {
            if size >= members.len() {
                break;
            }
            for g in &members[size] {
                cur.push(g);
                rec(k + 1, left - size, slots, members, cur, f);
                cur.pop();
            }
        }
    }
    rec(0, total, slots.len(), members, &mut Vec::new(), f);
}

/// Joins of multisets of pieces with `m` vertices in total.
fn multisets(pieces: &[Vec<RootedGraph>], m: usize) -> Vec<RootedGraph> {
    let flat: Vec<&RootedGraph> = pieces.iter().flatten().collect();
    let mut out = Vec::new();
    fn rec<'a>(
        start: usize,
        left: usize,
        flat: &[&'a RootedGraph],
        cur: &mut Vec<&'a RootedGraph>,
        out: &mut Vec<RootedGraph>,
    ) {
        if left == 0 {
            let parts: Vec<RootedGraph> = cur.iter().map(|g| (*g).clone()).collect();
            out.push(RootedGraph::join(&parts));
            return;
        }
        for i in start..flat.len() {
            let w = flat[i].n() - 1;
            if w <= left {
                cur.push(flat[i]);
                rec(i, left - w, flat, cur, out);
                cur.pop();
            }
        }
    }
    rec(0, m - 1, &flat, &mut Vec::new(), &mut out);
    out
}
