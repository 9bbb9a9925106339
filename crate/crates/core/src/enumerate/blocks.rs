use serde::Serialize;

use crate::canon::rooted_code;
use crate::classes::BlockClass;
use crate::error::{Error, Result};
use crate::graph::RootedGraph;

const UNSET: usize = usize::MAX;

/// Depth-first search data from one start vertex: preorder, parents,
/// low-links and subtree sizes.
#[derive(Clone, Debug)]
pub(crate) struct Dfs {
    /// Vertices in preorder.
    pub order: Vec<usize>,
    /// Preorder index of each vertex.
    pub tin: Vec<usize>,
    pub parent: Vec<usize>,
    pub low: Vec<usize>,
    pub size: Vec<usize>,
    pub children: Vec<Vec<usize>>,
    /// Blocks as edge lists, in order of completion.
    pub block_edges: Vec<Vec<(usize, usize)>>,
}

impl Dfs {
    pub fn new(g: &RootedGraph, start: usize) -> Self {
        let n = g.n();
        let mut d = Dfs {
            order: Vec::with_capacity(n),
            tin: vec![UNSET; n],
            parent: vec![UNSET; n],
            low: vec![UNSET; n],
            size: vec![1; n],
            children: vec![Vec::new(); n],
            block_edges: Vec::new(),
        };
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        d.tin[start] = 0;
        d.low[start] = 0;
        d.order.push(start);
        while let Some(top) = stack.last_mut() {
            let v = top.0;
            if top.1 < g.degree(v) {
                let w = g.neighbors(v)[top.1];
                top.1 += 1;
                if d.tin[w] == UNSET {
                    d.tin[w] = d.order.len();
                    d.low[w] = d.tin[w];
                    d.parent[w] = v;
                    d.children[v].push(w);
                    d.order.push(w);
                    edges.push((v, w));
                    stack.push((w, 0));
                } else if w != d.parent[v] && d.tin[w] < d.tin[v] {
                    edges.push((v, w));
                    d.low[v] = d.low[v].min(d.tin[w]);
                }
            } else {
                stack.pop();
                let p = d.parent[v];
                if p != UNSET {
                    d.low[p] = d.low[p].min(d.low[v]);
                    d.size[p] += d.size[v];
                    if d.low[v] >= d.tin[p] {
                        let mut block = Vec::new();
                        while let Some(e) = edges.pop() {
                            block.push(e);
                            if e == (p, v) {
                                break;
                            }
                        }
                        d.block_edges.push(block);
                    }
                }
            }
        }
        d
    }

    pub fn reached(&self) -> usize {
        self.order.len()
    }

    /// Children `c` of `v` whose subtrees become separate components when
    /// `v` is deleted.
    pub fn separated(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let is_start = self.parent[v] == UNSET;
        self.children[v]
            .iter()
            .copied()
            .filter(move |&c| is_start || self.low[c] >= self.tin[v])
    }

    pub fn subtree(&self, c: usize) -> &[usize] {
        &self.order[self.tin[c]..self.tin[c] + self.size[c]]
    }
}

/// Blocks and cut vertices of a connected graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockCutTree {
    /// Vertex sets of the blocks, each sorted.
    pub blocks: Vec<Vec<usize>>,
    /// Cut vertices, sorted.
    pub cutvertices: Vec<usize>,
    /// `(block index, cut vertex)` incidences.
    pub incidence: Vec<(usize, usize)>,
}

impl BlockCutTree {
    /// Indices of the blocks containing `v`.
    pub fn blocks_of(&self, v: usize) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.binary_search(&v).is_ok())
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn block_cut_tree(g: &RootedGraph) -> Result<BlockCutTree> {
    let dfs = Dfs::new(g, 0);
    if dfs.reached() != g.n() {
        return Err(Error::Disconnected);
    }
    let mut blocks: Vec<Vec<usize>> = dfs
        .block_edges
        .iter()
        .map(|edges| {
            let mut vs: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            vs.sort_unstable();
            vs.dedup();
            vs
        })
        .collect();
    blocks.sort();
    let mut count = vec![0usize; g.n()];
    for b in &blocks {
        for &v in b {
            count[v] += 1;
        }
    }
    let cutvertices: Vec<usize> = (0..g.n()).filter(|&v| count[v] >= 2).collect();
    let mut incidence = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for &v in b {
            if count[v] >= 2 {
                incidence.push((i, v));
            }
        }
    }
    Ok(BlockCutTree {
        blocks,
        cutvertices,
        incidence,
    })
}

/// Whether `g` is connected and every block belongs to `class`.
pub fn is_class_member(g: &RootedGraph, class: &BlockClass) -> Result<bool> {
    if g.n() == 1 {
        return Ok(true);
    }
    let bct = match block_cut_tree(g) {
        Ok(b) => b,
        Err(Error::Disconnected) => return Ok(false),
        Err(e) => return Err(e),
    };
    for b in &bct.blocks {
        if !class.contains_block(&g.induced(b, None))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `h` is a connected rooted graph whose root lies in exactly
/// one block.
pub(crate) fn check_fringe_graph(h: &RootedGraph) -> Result<()> {
    if h.n() < 2 {
        return Err(Error::RootInSeveralBlocks(0));
    }
    let dfs = Dfs::new(h, h.root());
    if dfs.reached() != h.n() {
        return Err(Error::Disconnected);
    }
    let k = dfs.children[h.root()].len();
    if k != 1 {
        return Err(Error::RootInSeveralBlocks(k));
    }
    Ok(())
}

/// Number of fringe occurrences of `h` in `g`: pairs `(x, D)` with `D` a
/// component of `g - x` and `g[D ∪ {x}]`, rooted at `x`, isomorphic to `h`.
/// In rooted mode the root of `g` may not lie in `D`.
pub fn fringe_count(g: &RootedGraph, h: &RootedGraph, rooted: bool) -> Result<usize> {
    check_fringe_graph(h)?;
    let dfs = Dfs::new(g, g.root());
    if dfs.reached() != g.n() {
        return Err(Error::Disconnected);
    }
    let want = h.n() - 1;
    let code = rooted_code(h);
    let n = g.n();
    let matches = |x: usize, comp: &[usize]| -> bool {
        let mut vs = Vec::with_capacity(comp.len() + 1);
        vs.push(x);
        vs.extend_from_slice(comp);
        rooted_code(&g.induced(&vs, Some(x))) == code
    };
    let mut count = 0;
    let mut in_sep = vec![false; n];
    for x in 0..n {
        let mut separated = 0;
        for c in dfs.separated(x) {
            separated += dfs.size[c];
            if dfs.size[c] == want && matches(x, dfs.subtree(c)) {
                count += 1;
            }
        }
        let rest = n - 1 - separated;
        if x != g.root() && !rooted && rest == want {
            for c in dfs.separated(x) {
                for &v in dfs.subtree(c) {
                    in_sep[v] = true;
                }
            }
            let comp: Vec<usize> = (0..n).filter(|&v| v != x && !in_sep[v]).collect();
            if matches(x, &comp) {
                count += 1;
            }
            for c in dfs.separated(x) {
                for &v in dfs.subtree(c) {
                    in_sep[v] = false;
                }
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompositions() {
        let t = RootedGraph::path(5);
        let b = block_cut_tree(&t).unwrap();
        assert_eq!(b.blocks.len(), 4);
        assert!(b.blocks.iter().all(|x| x.len() == 2));
        assert_eq!(b.cutvertices, vec![1, 2, 3]);
        let c = block_cut_tree(&RootedGraph::cycle(6)).unwrap();
        assert_eq!(c.blocks.len(), 1);
        assert!(c.cutvertices.is_empty());
        let bowtie = RootedGraph::new(5, 0, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
        let d = block_cut_tree(&bowtie).unwrap();
        assert_eq!(d.blocks, vec![vec![0, 1, 2], vec![2, 3, 4]]);
        assert_eq!(d.cutvertices, vec![2]);
        assert_eq!(d.blocks_of(2), vec![0, 1]);
        let split = RootedGraph::new(3, 0, &[(0, 1)]).unwrap();
        assert!(matches!(block_cut_tree(&split), Err(Error::Disconnected)));
    }

    #[test]
    fn fringe_examples() {
        let leaf = RootedGraph::path(2);
        assert_eq!(fringe_count(&RootedGraph::star(3), &leaf, true).unwrap(), 3);
        assert_eq!(fringe_count(&RootedGraph::path(3), &leaf, true).unwrap(), 1);
        assert_eq!(fringe_count(&RootedGraph::path(3), &leaf, false).unwrap(), 2);
        let cherry = RootedGraph::path(3).with_root(1);
        assert!(matches!(
            fringe_count(&RootedGraph::path(4), &cherry, true),
            Err(Error::RootInSeveralBlocks(2))
        ));
    }

    #[test]
    fn membership() {
        let cacti = BlockClass::builtin("cacti_labelled").unwrap();
        let trees = BlockClass::builtin("trees_labelled").unwrap();
        let bowtie = RootedGraph::new(5, 0, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
        assert!(is_class_member(&bowtie, &cacti).unwrap());
        assert!(!is_class_member(&bowtie, &trees).unwrap());
        assert!(!is_class_member(&RootedGraph::complete(4), &cacti).unwrap());
    }
}
