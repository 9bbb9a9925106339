use std::collections::HashMap;

use super::trees::for_each_labelled_tree;
use crate::canon::{canonical_colored, CanonCode};
use crate::error::Result;
use crate::graph::RootedGraph;
use crate::limits::{ChainPrefix, Link};

const UNSET: usize = usize::MAX;

/// Tests rooted graphs for the chain event: some cutvertex `v` has a root
/// component `D` in `G - v` such that `G[D ∪ {v}]`, with the root as source
/// and `v` as sink, is the chain, and the remainder `G - D` is larger than
/// the chain.
///
/// Keeps its scratch buffers and a memo of decided induced subgraphs, so one
/// matcher should be reused across many graphs.
pub struct ChainMatcher {
    links: usize,
    /// Vertices of the chain other than the last sink.
    size: usize,
    code: CanonCode,
    memo: HashMap<Vec<u64>, bool>,
    tin: Vec<usize>,
    low: Vec<usize>,
    parent: Vec<usize>,
    sub: Vec<usize>,
    sep: Vec<usize>,
    order: Vec<usize>,
    stack: Vec<(usize, usize)>,
    seen: Vec<bool>,
    comp: Vec<usize>,
}

impl ChainMatcher {
    pub fn new(links: &[Link]) -> Self {
        let chain = ChainPrefix::new(links.to_vec());
        ChainMatcher {
            links: links.len(),
            size: chain.size(),
            code: chain.pinned_code(),
            memo: HashMap::new(),
            tin: Vec::new(),
            low: Vec::new(),
            parent: Vec::new(),
            sub: Vec::new(),
            sep: Vec::new(),
            order: Vec::new(),
            stack: Vec::new(),
            seen: Vec::new(),
            comp: Vec::new(),
        }
    }

    /// Total size of the chain.
    pub fn chain_size(&self) -> usize {
        self.size
    }

    pub fn matches(&mut self, g: &RootedGraph) -> bool {
        if self.links == 0 {
            return true;
        }
        let n = g.n();
        if n <= 2 * self.size {
            return false;
        }
        self.search(g);
        let root = g.root();
        for v in 0..n {
            if v == root || self.sep[v] == 0 || n - 1 - self.sep[v] != self.size {
                continue;
            }
            if self.check(g, v) {
                return true;
            }
        }
        false
    }

    /// Low-link DFS from the root; `sep[v]` is the number of vertices cut
    /// off from the root by deleting `v`.
    fn search(&mut self, g: &RootedGraph) {
        let n = g.n();
        for buf in [&mut self.tin, &mut self.low, &mut self.parent] {
            buf.clear();
            buf.resize(n, UNSET);
        }
        self.sub.clear();
        self.sub.resize(n, 1);
        self.sep.clear();
        self.sep.resize(n, 0);
        self.order.clear();
        let root = g.root();
        self.stack.clear();
        self.stack.push((root, 0));
        self.tin[root] = 0;
        self.low[root] = 0;
        self.order.push(root);
        while let Some(top) = self.stack.last_mut() {
            let v = top.0;
            if top.1 < g.degree(v) {
                let w = g.neighbors(v)[top.1];
                top.1 += 1;
                if self.tin[w] == UNSET {
                    self.tin[w] = self.order.len();
                    self.low[w] = self.tin[w];
                    self.parent[w] = v;
                    self.order.push(w);
                    self.stack.push((w, 0));
                } else if w != self.parent[v] {
                    self.low[v] = self.low[v].min(self.tin[w]);
                }
            } else {
                self.stack.pop();
                let p = self.parent[v];
                if p != UNSET {
                    self.low[p] = self.low[p].min(self.low[v]);
                    self.sub[p] += self.sub[v];
                    if p != root && self.low[v] >= self.tin[p] {
                        self.sep[p] += self.sub[v];
                    }
                }
            }
        }
    }

    fn check(&mut self, g: &RootedGraph, v: usize) -> bool {
        let n = g.n();
        let root = g.root();
        self.seen.clear();
        self.seen.resize(n, false);
        self.seen[v] = true;
        self.seen[root] = true;
        self.comp.clear();
        self.stack.clear();
        self.stack.push((root, 0));
        while let Some((u, _)) = self.stack.pop() {
            for &w in g.neighbors(u) {
                if !self.seen[w] {
                    self.seen[w] = true;
                    self.comp.push(w);
                    self.stack.push((w, 0));
                }
            }
        }
        self.comp.sort_unstable();
        let mut vs = Vec::with_capacity(self.comp.len() + 2);
        vs.push(root);
        vs.push(v);
        vs.extend_from_slice(&self.comp);
        let key: Vec<u64> = vs
            .iter()
            .map(|&a| {
                vs.iter()
                    .enumerate()
                    .filter(|&(_, &b)| g.has_edge(a, b))
                    .fold(0u64, |acc, (i, _)| acc | 1 << i)
            })
            .collect();
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let h = g.induced(&vs, Some(root));
        let mut colors = vec![2; vs.len()];
        colors[0] = 0;
        colors[1] = 1;
        let hit = canonical_colored(&h, &colors).code == self.code;
        self.memo.insert(key, hit);
        hit
    }
}

/// Whether `g` has the chain event for `links`; see [`ChainMatcher`].
pub fn matches_chain(g: &RootedGraph, links: &[Link]) -> bool {
    ChainMatcher::new(links).matches(g)
}

/// Fraction of `graphs` matching each chain.
pub fn chain_frequencies(graphs: impl IntoIterator<Item = RootedGraph>, matchers: &mut [ChainMatcher]) -> Vec<f64> {
    let mut hits = vec![0u64; matchers.len()];
    let mut total = 0u64;
    for g in graphs {
        total += 1;
        for (h, m) in hits.iter_mut().zip(matchers.iter_mut()) {
            *h += m.matches(&g) as u64;
        }
    }
    hits.iter().map(|&h| h as f64 / total.max(1) as f64).collect()
}

/// Exact probability of each chain event for a uniform rooted labelled tree
/// on `n` vertices. Relabelling makes every root equally likely to match, so
/// the trees are enumerated rooted at vertex 0 only.
pub fn exact_chain_frequencies_labelled_trees(n: usize, matchers: &mut [ChainMatcher]) -> Result<Vec<f64>> {
    let mut hits = vec![0u64; matchers.len()];
    let mut total = 0u64;
    for_each_labelled_tree(n, |g| {
        total += 1;
        for (h, m) in hits.iter_mut().zip(matchers.iter_mut()) {
            *h += m.matches(g) as u64;
        }
    })?;
    Ok(hits.iter().map(|&h| h as f64 / total as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{all_labelled_trees, all_unlabelled_rooted_trees};

    #[test]
    fn leaf_chain_is_root_a_leaf() {
        for n in [3, 5, 7] {
            let mut m = [ChainMatcher::new(&[Link::leaf()])];
            let f = exact_chain_frequencies_labelled_trees(n, &mut m).unwrap()[0];
            let direct = all_labelled_trees(n).unwrap().filter(|g| g.degree(0) == 1).count() as f64
                / (n as f64).powi(n as i32 - 2);
            assert!((f - direct).abs() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn two_leaf_links_is_a_pendant_path() {
        let links = [Link::leaf(), Link::leaf()];
        for g in all_unlabelled_rooted_trees(8).unwrap() {
            let r = g.root();
            let expect = g.degree(r) == 1 && g.degree(g.neighbors(r)[0]) == 2;
            assert_eq!(matches_chain(&g, &links), expect);
        }
    }

    #[test]
    fn assembled_chain_with_remainder_matches() {
        let l2 = Link::edge_with_branch(RootedGraph::path(2)).unwrap();
        let chain = ChainPrefix::new(vec![l2.clone(), Link::leaf()]);
        let (g, _) = chain.graph().glue(chain.last_sink(), &RootedGraph::star(5));
        assert!(matches_chain(&g, &[l2.clone(), Link::leaf()]));
        assert!(!matches_chain(&g, &[Link::leaf(), l2]));
        assert!(matches_chain(&RootedGraph::cycle(5), &[]));
        // root of degree two in its block
        assert!(!matches_chain(&RootedGraph::path(7).with_root(3), &[Link::leaf()]));
    }

    #[test]
    fn small_remainders_do_not_count() {
        assert!(!matches_chain(&RootedGraph::path(2), &[Link::leaf()]));
        assert!(matches_chain(&RootedGraph::path(3), &[Link::leaf()]));
    }
}
