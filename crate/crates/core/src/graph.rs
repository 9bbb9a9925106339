//! Finite simple graphs with a distinguished root.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite simple graph on `0..n` with a root vertex.
///
/// Adjacency lists are kept sorted; vertex indices double as labels in
/// labelled mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootedGraph {
    adj: Vec<Vec<usize>>,
    root: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    #[serde(default)]
    root: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for RootedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            n: self.n(),
            root: self.root,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RootedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let g = GraphJson::deserialize(d)?;
        let edges: Vec<(usize, usize)> = g.edges.iter().map(|e| (e[0], e[1])).collect();
        RootedGraph::new(g.n, g.root, &edges).map_err(serde::de::Error::custom)
    }
}

impl RootedGraph {
    /// Validates simplicity (no loops, no repeated edges) and index ranges.
    pub fn new(n: usize, root: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        if root >= n {
            return Err(Error::InvalidGraph(format!("root {root} out of range for n = {n}")));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("repeated edge at vertex {v}")));
            }
        }
        Ok(RootedGraph { adj, root })
    }

    /// Builds from sorted, duplicate-free adjacency lists (not re-checked).
    pub(crate) fn from_adjacency(adj: Vec<Vec<usize>>, root: usize) -> Self {
        debug_assert!(adj.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        RootedGraph { adj, root }
    }

    pub(crate) fn into_adjacency(self) -> Vec<Vec<usize>> {
        self.adj
    }

    pub fn single_vertex() -> Self {
        RootedGraph {
            adj: vec![Vec::new()],
            root: 0,
        }
    }

    /// Path on `vertices` vertices, rooted at vertex 0 (an end).
    pub fn path(vertices: usize) -> Self {
        let edges: Vec<_> = (1..vertices).map(|i| (i - 1, i)).collect();
        Self::new(vertices, 0, &edges).expect("path")
    }

    /// Cycle `C_k` on `0..k`, rooted at 0.
    pub fn cycle(k: usize) -> Self {
        assert!(k >= 3);
        let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Self::new(k, 0, &edges).expect("cycle")
    }

    /// Complete graph `K_k`, rooted at 0.
    pub fn complete(k: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                edges.push((i, j));
            }
        }
        Self::new(k, 0, &edges).expect("complete")
    }

    /// Star `K_{1,leaves}` rooted at the centre 0.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::new(leaves + 1, 0, &edges).expect("star")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn with_root(&self, root: usize) -> Self {
        assert!(root < self.n());
        RootedGraph {
            adj: self.adj.clone(),
            root,
        }
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Vertices reachable from `start` avoiding `blocked` vertices.
    pub fn reach(&self, start: usize, blocked: &[bool]) -> Vec<usize> {
        let mut seen = vec![false; self.n()];
        let mut out = vec![start];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !seen[w] && !blocked[w] {
                    seen[w] = true;
                    out.push(w);
                    queue.push_back(w);
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.reach(0, &vec![false; self.n()]).len() == self.n()
    }

    /// Graph distance from `v` to every vertex (`usize::MAX` if unreachable).
    pub fn distances_from(&self, v: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[v] = 0;
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Subgraph induced on `vertices`; vertex `vertices[i]` becomes `i`.
    /// The root is `root` if given (must be among `vertices`), else 0.
    pub fn induced(&self, vertices: &[usize], root: Option<usize>) -> RootedGraph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut l: Vec<usize> = self.adj[v]
                    .iter()
                    .filter(|&&w| index[w] != usize::MAX)
                    .map(|&w| index[w])
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        let root = root.map(|r| index[r]).unwrap_or(0);
        assert!(root != usize::MAX, "root must be an induced vertex");
        RootedGraph { adj, root }
    }

    /// Renames vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> RootedGraph {
        let n = self.n();
        let mut adj = vec![Vec::new(); n];
        for (v, list) in self.adj.iter().enumerate() {
            let mut l: Vec<usize> = list.iter().map(|&w| perm[w]).collect();
            l.sort_unstable();
            adj[perm[v]] = l;
        }
        RootedGraph {
            adj,
            root: perm[self.root],
        }
    }

    /// Disjoint union with `other`, identifying `other`'s root with `at`.
    /// Returns the combined graph and the new index of each `other` vertex.
    pub fn glue(&self, at: usize, other: &RootedGraph) -> (RootedGraph, Vec<usize>) {
        let base = self.n();
        let mut map = vec![0; other.n()];
        let mut next = base;
        for (v, slot) in map.iter_mut().enumerate() {
            if v == other.root {
                *slot = at;
            } else {
                *slot = next;
                next += 1;
            }
        }
        let mut adj = self.adj.clone();
        adj.resize(next, Vec::new());
        for (u, v) in other.edges() {
            let (a, b) = (map[u], map[v]);
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        (
            RootedGraph {
                adj,
                root: self.root,
            },
            map,
        )
    }

    /// Join: the disjoint union of rooted graphs with all roots identified.
    pub fn join(parts: &[RootedGraph]) -> RootedGraph {
        let mut g = RootedGraph::single_vertex();
        for p in parts {
            let r = g.root;
            g = g.glue(r, p).0;
        }
        g
    }

    /// Adjacency rows as bitsets (requires `n <= 64`).
    pub fn bit_rows(&self) -> Vec<u64> {
        assert!(self.n() <= 64, "bitset view supports at most 64 vertices");
        self.adj
            .iter()
            .map(|l| l.iter().fold(0u64, |acc, &w| acc | (1u64 << w)))
            .collect()
    }

    /// 2-connected, or exactly `K_2`.
    pub fn is_block(&self) -> bool {
        let n = self.n();
        if n == 2 {
            return self.edge_count() == 1;
        }
        if n < 3 || !self.is_connected() {
            return false;
        }
        let mut blocked = vec![false; n];
        for v in 0..n {
            blocked[v] = true;
            let start = if v == 0 { 1 } else { 0 };
            let ok = self.reach(start, &blocked).len() == n - 1;
            blocked[v] = false;
            if !ok {
                return false;
            }
        }
        true
    }

    pub fn is_cycle(&self) -> bool {
        self.n() >= 3 && self.is_connected() && self.adj.iter().all(|l| l.len() == 2)
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.adj.iter().all(|l| l.len() == n - 1)
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edge_count() + 1 == self.n()
    }
}
