use crate::error::{Error, Result};
use crate::graph::RootedGraph;

pub const MAX_LABELLED_TREES: usize = 12;
pub const MAX_UNLABELLED_TREES: usize = 18;

fn check_range(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::SizeBound { size: n, bound: max });
    }
    Ok(())
}

/// Edges of the labelled tree on `0..n` with Prüfer sequence `seq`
/// (`seq.len() == n - 2`), written into `edges`.
pub fn prufer_decode_into(seq: &[usize], n: usize, degree: &mut Vec<usize>, edges: &mut Vec<(usize, usize)>) {
    edges.clear();
    if n < 2 {
        return;
    }
    degree.clear();
    degree.resize(n, 1);
    for &v in seq {
        degree[v] += 1;
    }
    let mut ptr = 0;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &v in seq {
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 && v < ptr {
            leaf = v;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, n - 1));
}

pub fn prufer_decode(seq: &[usize], n: usize) -> RootedGraph {
    let mut edges = Vec::new();
    prufer_decode_into(seq, n, &mut Vec::new(), &mut edges);
    RootedGraph::new(n, 0, &edges).expect("Prüfer decoding gives a tree")
}

/// All `n^(n-2)` labelled trees on `0..n`, rooted at 0.
pub struct LabelledTrees {
    n: usize,
    seq: Vec<usize>,
    done: bool,
}

impl Iterator for LabelledTrees {
    type Item = RootedGraph;

    fn next(&mut self) -> Option<RootedGraph> {
        if self.done {
            return None;
        }
        let g = if self.n == 1 {
            RootedGraph::single_vertex()
        } else {
            prufer_decode(&self.seq, self.n)
        };
        self.done = !odometer(&mut self.seq, self.n);
        Some(g)
    }
}

/// Advances `seq` as a base-`n` counter; false once it wraps around.
fn odometer(seq: &mut [usize], n: usize) -> bool {
    for d in seq.iter_mut().rev() {
        *d += 1;
        if *d < n {
            return true;
        }
        *d = 0;
    }
    false
}

pub fn all_labelled_trees(n: usize) -> Result<LabelledTrees> {
    check_range(n, MAX_LABELLED_TREES)?;
    Ok(LabelledTrees {
        n,
        seq: vec![0; n.saturating_sub(2)],
        done: false,
    })
}

/// Calls `f` on every labelled tree on `0..n` (rooted at 0), reusing one
/// graph buffer.
pub fn for_each_labelled_tree(n: usize, mut f: impl FnMut(&RootedGraph)) -> Result<()> {
    check_range(n, MAX_LABELLED_TREES)?;
    if n == 1 {
        f(&RootedGraph::single_vertex());
        return Ok(());
    }
    let mut seq = vec![0; n - 2];
    let mut degree = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n - 1);
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(n); n];
    loop {
        prufer_decode_into(&seq, n, &mut degree, &mut edges);
        for l in adj.iter_mut() {
            l.clear();
        }
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        let g = RootedGraph::from_adjacency(adj, 0);
        f(&g);
        adj = g.into_adjacency();
        if !odometer(&mut seq, n) {
            return Ok(());
        }
    }
}

/// Canonical level sequences of rooted unlabelled trees on `n` vertices,
/// in the successor order of Beyer and Hedetniemi.
pub struct LevelSequences {
    levels: Vec<usize>,
    done: bool,
}

impl LevelSequences {
    fn advance(&mut self) {
        let l = &mut self.levels;
        let Some(p) = l.iter().rposition(|&x| x > 1) else {
            self.done = true;
            return;
        };
        let q = (0..p).rev().find(|&i| l[i] == l[p] - 1).expect("a parent level exists");
        let shift = p - q;
        for i in p..l.len() {
            l[i] = l[i - shift];
        }
    }
}

impl Iterator for LevelSequences {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.levels.clone();
        self.advance();
        Some(out)
    }
}

pub fn level_sequences(n: usize) -> Result<LevelSequences> {
    check_range(n, MAX_UNLABELLED_TREES)?;
    Ok(LevelSequences {
        levels: (0..n).collect(),
        done: false,
    })
}

/// Tree with vertex `i` at depth `levels[i]`, parent the nearest earlier
/// vertex one level up; rooted at 0.
pub fn level_sequence_graph(levels: &[usize]) -> RootedGraph {
    let mut last_at = vec![0usize; levels.len() + 1];
    let mut edges = Vec::with_capacity(levels.len().saturating_sub(1));
    for (i, &d) in levels.iter().enumerate() {
        if i > 0 {
            edges.push((last_at[d - 1], i));
        }
        last_at[d] = i;
    }
    RootedGraph::new(levels.len(), 0, &edges).expect("level sequences give trees")
}

/// One representative per rooted unlabelled tree on `n` vertices.
pub fn all_unlabelled_rooted_trees(n: usize) -> Result<impl Iterator<Item = RootedGraph>> {
    Ok(level_sequences(n)?.map(|l| level_sequence_graph(&l)))
}

/// Start indices of the root's subtrees within a level sequence.
fn root_subtrees(levels: &[usize]) -> Vec<std::ops::Range<usize>> {
    let starts: Vec<usize> = (1..levels.len()).filter(|&i| levels[i] == 1).collect();
    starts
        .iter()
        .enumerate()
        .map(|(k, &s)| s..starts.get(k + 1).copied().unwrap_or(levels.len()))
        .collect()
}

/// One representative per unlabelled free tree on `n` vertices, each
/// rooted at a centre.
pub fn all_unlabelled_free_trees(n: usize) -> Result<Vec<RootedGraph>> {
    let mut out = Vec::new();
    for l in level_sequences(n)? {
        if n <= 2 {
            if n == 1 || out.is_empty() {
                out.push(level_sequence_graph(&l));
            }
            continue;
        }
        let subs = root_subtrees(&l);
        let mut depths: Vec<(usize, usize)> = subs
            .iter()
            .enumerate()
            .map(|(k, r)| (l[r.clone()].iter().copied().max().unwrap_or(0), k))
            .collect();
        depths.sort_unstable_by(|a, b| b.cmp(a));
        let d1 = depths[0].0;
        let d2 = depths.get(1).map_or(0, |d| d.0);
        if d1 == d2 {
            out.push(level_sequence_graph(&l));
        } else if d1 == d2 + 1 {
            // two centres: keep the rooting whose root half is the larger one
            let r = subs[depths[0].1].clone();
            let child: Vec<usize> = l[r.clone()].iter().map(|&x| x - 1).collect();
            let rest: Vec<usize> = l[..r.start].iter().chain(&l[r.end..]).copied().collect();
            if (rest.len(), &rest) >= (child.len(), &child) {
                out.push(level_sequence_graph(&l));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::{canonical_unrooted, rooted_code};
    use std::collections::HashSet;

    #[test]
    fn cayley_counts() {
        for (n, count) in [(1, 1), (2, 1), (3, 3), (4, 16), (6, 1296)] {
            assert_eq!(all_labelled_trees(n).unwrap().count(), count, "n = {n}");
            let mut k = 0;
            for_each_labelled_tree(n, |g| {
                assert!(g.is_tree());
                k += 1;
            })
            .unwrap();
            assert_eq!(k, count);
        }
        assert!(all_labelled_trees(13).is_err());
    }

    #[test]
    fn labelled_trees_are_distinct() {
        let set: HashSet<Vec<(usize, usize)>> = all_labelled_trees(6).unwrap().map(|g| g.edges()).collect();
        assert_eq!(set.len(), 1296);
    }

    #[test]
    fn rooted_tree_counts() {
        let expect = [1, 1, 2, 4, 9, 20, 48, 115, 286];
        for (i, &c) in expect.iter().enumerate() {
            let trees: Vec<RootedGraph> = all_unlabelled_rooted_trees(i + 1).unwrap().collect();
            assert_eq!(trees.len(), c);
            let codes: HashSet<_> = trees.iter().map(rooted_code).collect();
            assert_eq!(codes.len(), c);
        }
    }

    #[test]
    fn free_tree_counts() {
        let expect = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106];
        for (i, &c) in expect.iter().enumerate() {
            let trees = all_unlabelled_free_trees(i + 1).unwrap();
            assert_eq!(trees.len(), c, "n = {}", i + 1);
            let codes: HashSet<_> = trees.iter().map(canonical_unrooted).collect();
            assert_eq!(codes.len(), c);
        }
    }
}
