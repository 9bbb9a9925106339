//! Canonical forms and automorphism groups of small graphs.
//!
//! Colour refinement to an equitable partition, then individualisation and
//! backtracking over the first non-singleton cell. Leaves are compared by the
//! adjacency matrix read in leaf order; the lexicographically smallest one is
//! canonical. Automorphisms found on the way (two leaves with equal matrices)
//! prune sibling branches lying in the same orbit of the stabiliser of the
//! current prefix.
//!
//! Adjacency is held as `u64` bitsets, so graphs here have at most 64 vertices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::RootedGraph;

/// Default vertex bound for [`canonical_rooted`].
pub const CANON_BOUND: usize = 20;

/// Canonical code: graph6 of the canonically ordered graph, with a colour
/// suffix when more than one colour class is present. Equal codes mean
/// isomorphic (colour- and root-preserving).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonCode(pub String);

impl fmt::Display for CanonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Result of a canonical labelling run.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub code: CanonCode,
    /// `order[p]` is the vertex placed at canonical position `p`.
    pub order: Vec<usize>,
    /// Generators of the automorphism group discovered during the search.
    pub generators: Vec<Vec<usize>>,
}

type Partition = Vec<Vec<usize>>;

fn initial_partition(n: usize, colors: &[u32]) -> Partition {
    let mut vs: Vec<usize> = (0..n).collect();
    vs.sort_by_key(|&v| (colors[v], v));
    let mut cells: Partition = Vec::new();
    for v in vs {
        match cells.last_mut() {
            Some(c) if colors[c[0]] == colors[v] => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    cells
}

fn refine(rows: &[u64], mut cells: Partition) -> Partition {
    loop {
        let masks: Vec<u64> = cells
            .iter()
            .map(|c| c.iter().fold(0u64, |m, &v| m | (1u64 << v)))
            .collect();
        let mut changed = false;
        let mut next: Partition = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| {
                    let sig = masks.iter().map(|m| (rows[v] & m).count_ones()).collect();
                    (sig, v)
                })
                .collect();
            keyed.sort();
            let start = next.len();
            for (i, (sig, v)) in keyed.iter().enumerate() {
                if i > 0 && keyed[i - 1].0 == *sig {
                    next.last_mut().unwrap().push(*v);
                } else {
                    next.push(vec![*v]);
                }
            }
            if next.len() - start > 1 {
                changed = true;
            }
        }
        cells = next;
        if !changed {
            return cells;
        }
    }
}

fn individualize(cells: &Partition, cell: usize, v: usize) -> Partition {
    let mut out = Vec::with_capacity(cells.len() + 1);
    for (i, c) in cells.iter().enumerate() {
        if i == cell {
            out.push(vec![v]);
            out.push(c.iter().copied().filter(|&w| w != v).collect());
        } else {
            out.push(c.clone());
        }
    }
    out
}

fn permuted_rows(rows: &[u64], order: &[usize]) -> Vec<u64> {
    let n = rows.len();
    let mut pos = vec![0usize; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    order
        .iter()
        .map(|&v| {
            let mut r = 0u64;
            let mut bits = rows[v];
            while bits != 0 {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                r |= 1u64 << pos[w];
            }
            r
        })
        .collect()
}

struct Search<'a> {
    rows: &'a [u64],
    best: Option<(Vec<u64>, Vec<usize>)>,
    generators: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self, cells: Partition, prefix: &mut Vec<usize>) {
        let cells = refine(self.rows, cells);
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            self.leaf(order);
            return;
        };
        let cell = cells[target].clone();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if !tried.is_empty() && self.same_orbit_as_tried(prefix, &tried, v) {
                continue;
            }
            tried.push(v);
            prefix.push(v);
            self.run(individualize(&cells, target, v), prefix);
            prefix.pop();
        }
    }

    fn leaf(&mut self, order: Vec<usize>) {
        let code = permuted_rows(self.rows, &order);
        match &self.best {
            None => self.best = Some((code, order)),
            Some((best, best_order)) => {
                if code < *best {
                    self.best = Some((code, order));
                } else if code == *best {
                    let n = order.len();
                    let mut gamma = vec![0usize; n];
                    for p in 0..n {
                        gamma[best_order[p]] = order[p];
                    }
                    if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                        self.generators.push(gamma);
                    }
                }
            }
        }
    }

    /// Orbits of the subgroup generated by the known automorphisms that fix
    /// `prefix` pointwise.
    fn same_orbit_as_tried(&self, prefix: &[usize], tried: &[usize], v: usize) -> bool {
        let n = self.rows.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for g in &self.generators {
            if prefix.iter().any(|&u| g[u] != u) {
                continue;
            }
            any = true;
            for x in 0..n {
                let (a, b) = (find(&mut parent, x), find(&mut parent, g[x]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&t| find(&mut parent, t) == rv)
    }
}

fn graph6(rows: &[u64]) -> String {
    let n = rows.len();
    let mut out = String::new();
    if n < 63 {
        out.push((n as u8 + 63) as char);
    } else {
        out.push(126 as char);
        for shift in [12, 6, 0] {
            out.push((((n >> shift) & 63) as u8 + 63) as char);
        }
    }
    let mut acc = 0u8;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | ((rows[i] >> j) & 1) as u8;
            k += 1;
            if k == 6 {
                out.push((acc + 63) as char);
                acc = 0;
                k = 0;
            }
        }
    }
    if k > 0 {
        out.push(((acc << (6 - k)) + 63) as char);
    }
    out
}

/// Decodes a graph6 string (the part before any colour suffix).
pub fn decode_graph6(s: &str) -> Result<RootedGraph> {
    let bytes: Vec<u8> = s.bytes().collect();
    let bad = |msg: &str| Error::InvalidGraph(format!("graph6 `{s}`: {msg}"));
    if bytes.is_empty() || bytes.iter().any(|&b| !(63..=126).contains(&b)) {
        return Err(bad("invalid characters"));
    }
    let (n, mut i) = if bytes[0] == 126 {
        if bytes.len() < 4 {
            return Err(bad("truncated header"));
        }
        let n = bytes[1..4]
            .iter()
            .fold(0usize, |a, &b| (a << 6) | (b - 63) as usize);
        (n, 4)
    } else {
        ((bytes[0] - 63) as usize, 1)
    };
    let mut edges = Vec::new();
    let mut k = 0;
    let mut cur = 0u8;
    for j in 1..n {
        for u in 0..j {
            if k == 0 {
                cur = *bytes.get(i).ok_or_else(|| bad("truncated body"))? - 63;
                i += 1;
                k = 6;
            }
            k -= 1;
            if (cur >> k) & 1 == 1 {
                edges.push((u, j));
            }
        }
    }
    RootedGraph::new(n.max(1), 0, &edges)
}

fn color_suffix(colors_in_order: &[u32]) -> String {
    let mut runs: Vec<(u32, usize)> = Vec::new();
    for &c in colors_in_order {
        match runs.last_mut() {
            Some((d, k)) if *d == c => *k += 1,
            _ => runs.push((c, 1)),
        }
    }
    if runs.len() <= 1 {
        return String::new();
    }
    let parts: Vec<String> = runs.iter().map(|(c, k)| format!("{c}x{k}")).collect();
    format!("#{}", parts.join(","))
}

/// Canonical labelling of `g` with a vertex colouring. Vertices of smaller
/// colour come first in the canonical order; the root plays no role unless
/// encoded in `colors`.
pub fn canonical_colored(g: &RootedGraph, colors: &[u32]) -> Canonical {
    assert_eq!(colors.len(), g.n());
    let rows = g.bit_rows();
    let mut search = Search {
        rows: &rows,
        best: None,
        generators: Vec::new(),
    };
    search.run(initial_partition(g.n(), colors), &mut Vec::new());
    let (best, order) = search.best.expect("search reaches a leaf");
    let in_order: Vec<u32> = order.iter().map(|&v| colors[v]).collect();
    Canonical {
        code: CanonCode(format!("{}{}", graph6(&best), color_suffix(&in_order))),
        order,
        generators: search.generators,
    }
}

/// Root-preserving canonical form; the root is canonical vertex 0.
pub fn canonical_rooted(g: &RootedGraph) -> Result<CanonCode> {
    if g.n() > CANON_BOUND {
        return Err(Error::SizeBound {
            size: g.n(),
            bound: CANON_BOUND,
        });
    }
    Ok(rooted_code(g))
}

/// [`canonical_rooted`] without the size bound (up to 64 vertices).
pub(crate) fn rooted_code(g: &RootedGraph) -> CanonCode {
    let mut colors = vec![1u32; g.n()];
    colors[g.root()] = 0;
    let c = canonical_colored(g, &colors);
    CanonCode(c.code.0.split('#').next().unwrap().to_string())
}

/// Canonical code ignoring the root.
pub fn canonical_unrooted(g: &RootedGraph) -> CanonCode {
    canonical_colored(g, &vec![0; g.n()]).code
}

/// The canonically relabelled graph: root at 0 when rooted, and equal for
/// isomorphic inputs.
pub fn canonical_graph(g: &RootedGraph) -> RootedGraph {
    let mut colors = vec![1u32; g.n()];
    colors[g.root()] = 0;
    let c = canonical_colored(g, &colors);
    let mut perm = vec![0; g.n()];
    for (p, &v) in c.order.iter().enumerate() {
        perm[v] = p;
    }
    g.relabel(&perm)
}

/// All colour-preserving automorphisms, by depth-first extension of partial
/// maps inside the refined colour classes.
pub fn automorphisms(g: &RootedGraph, colors: &[u32]) -> Vec<Vec<usize>> {
    let n = g.n();
    let rows = g.bit_rows();
    let cells = refine(&rows, initial_partition(n, colors));
    let mut class = vec![0usize; n];
    for (i, c) in cells.iter().enumerate() {
        for &v in c {
            class[v] = i;
        }
    }
    // visit order: BFS from each component so images are pinned early
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = std::collections::VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn dfs(
        i: usize,
        order: &[usize],
        rows: &[u64],
        class: &[usize],
        map: &mut [usize],
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == order.len() {
            out.push(map.to_vec());
            return;
        }
        let v = order[i];
        for w in 0..order.len() {
            if used[w] || class[w] != class[v] {
                continue;
            }
            let ok = order[..i]
                .iter()
                .all(|&u| ((rows[v] >> u) & 1) == ((rows[w] >> map[u]) & 1));
            if !ok {
                continue;
            }
            map[v] = w;
            used[w] = true;
            dfs(i + 1, order, rows, class, map, used, out);
            used[w] = false;
            map[v] = usize::MAX;
        }
    }
    dfs(0, &order, &rows, &class, &mut map, &mut used, &mut out);
    out
}

/// Order of the colour-preserving automorphism group, by orbit-stabiliser
/// along a chain of individualised vertices.
pub fn automorphism_group_order(g: &RootedGraph, colors: &[u32]) -> u128 {
    let rows = g.bit_rows();
    let n = g.n();
    let mut colors: Vec<u32> = colors.to_vec();
    let mut total: u128 = 1;
    loop {
        let cells = refine(&rows, initial_partition(n, &colors));
        let Some(cell) = cells.iter().find(|c| c.len() > 1) else {
            return total;
        };
        let mut refined = vec![0u32; n];
        for (i, c) in cells.iter().enumerate() {
            for &v in c {
                refined[v] = i as u32;
            }
        }
        let fresh = cells.len() as u32;
        let pinned = |v: usize| {
            let mut c = refined.clone();
            c[v] = fresh;
            c
        };
        let v = cell[0];
        let base = canonical_colored(g, &pinned(v)).code;
        let orbit = 1 + cell[1..]
            .iter()
            .filter(|&&w| canonical_colored(g, &pinned(w)).code == base)
            .count();
        total *= orbit as u128;
        colors = pinned(v);
    }
}

/// Orbit index of every vertex under colour-preserving automorphisms;
/// vertices in the same orbit share the index, indices are `0..k`.
pub fn vertex_orbits(g: &RootedGraph, colors: &[u32]) -> Vec<usize> {
    let n = g.n();
    let rows = g.bit_rows();
    let cells = refine(&rows, initial_partition(n, colors));
    let mut refined = vec![0u32; n];
    for (i, c) in cells.iter().enumerate() {
        for &v in c {
            refined[v] = i as u32;
        }
    }
    let fresh = cells.len() as u32;
    let mut orbit = vec![usize::MAX; n];
    let mut next = 0;
    for cell in &cells {
        let mut reps: Vec<(CanonCode, usize)> = Vec::new();
        for &v in cell {
            if cell.len() == 1 {
                orbit[v] = next;
                next += 1;
                continue;
            }
            let mut c = refined.clone();
            c[v] = fresh;
            let code = canonical_colored(g, &c).code;
            match reps.iter().find(|(k, _)| *k == code) {
                Some((_, id)) => orbit[v] = *id,
                None => {
                    reps.push((code, next));
                    orbit[v] = next;
                    next += 1;
                }
            }
        }
    }
    orbit
}
