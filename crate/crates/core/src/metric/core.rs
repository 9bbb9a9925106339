use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::RootedGraph;

/// A rooted graph in which every vertex of `marked` carries infinitely many
/// extra pendant neighbours, so `marked` is the set of infinite-degree
/// vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaMarkedGraph {
    pub base: RootedGraph,
    pub marked: BTreeSet<usize>,
}

impl OmegaMarkedGraph {
    pub fn new(base: RootedGraph, marked: impl IntoIterator<Item = usize>) -> Result<Self> {
        let marked: BTreeSet<usize> = marked.into_iter().collect();
        if let Some(&w) = marked.iter().find(|&&w| w >= base.n()) {
            return Err(Error::InvalidGraph(format!(
                "marked vertex {w} out of range for {} vertices",
                base.n()
            )));
        }
        Ok(OmegaMarkedGraph { base, marked })
    }

    pub fn unmarked(base: RootedGraph) -> Self {
        OmegaMarkedGraph {
            base,
            marked: BTreeSet::new(),
        }
    }

    /// Ground floor, first floor and core.
    pub fn core(&self) -> Result<Core> {
        let g = &self.base;
        if self.marked.contains(&g.root()) {
            return Err(Error::RootInfiniteDegree);
        }
        let mut blocked = vec![false; g.n()];
        for &w in &self.marked {
            blocked[w] = true;
        }
        let mut ground = g.reach(g.root(), &blocked);
        ground.sort_unstable();
        let first: Vec<usize> = self
            .marked
            .iter()
            .copied()
            .filter(|&w| ground.iter().any(|&v| g.has_edge(v, w)))
            .collect();
        let mut vertices = ground.clone();
        vertices.extend_from_slice(&first);
        vertices.sort_unstable();
        let graph = g.induced(&vertices, Some(g.root()));
        let infinite = vertices.iter().map(|v| first.contains(v)).collect();
        Ok(Core {
            ground_floor: ground,
            first_floor: first,
            vertices,
            graph,
            infinite,
        })
    }
}

/// The core of an [`OmegaMarkedGraph`]. Vertex lists are in base labels;
/// `graph` is on `vertices` in that order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Core {
    /// Component of the root after deleting the infinite-degree vertices.
    pub ground_floor: Vec<usize>,
    /// Infinite-degree vertices adjacent to the ground floor.
    pub first_floor: Vec<usize>,
    pub vertices: Vec<usize>,
    pub graph: RootedGraph,
    /// Per core vertex, whether it has infinite degree.
    pub infinite: Vec<bool>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::rooted_code;

    #[test]
    fn unmarked_graph_is_its_own_core() {
        let g = RootedGraph::cycle(5).glue(2, &RootedGraph::star(3)).0;
        let c = OmegaMarkedGraph::unmarked(g.clone()).core().unwrap();
        assert_eq!(rooted_code(&c.graph), rooted_code(&g));
        assert!(c.first_floor.is_empty());
        assert_eq!(c.ground_floor.len(), g.n());
    }

    #[test]
    fn marked_path() {
        let c = OmegaMarkedGraph::new(RootedGraph::path(3), [2]).unwrap().core().unwrap();
        assert_eq!((c.ground_floor, c.first_floor), (vec![0, 1], vec![2]));
        assert_eq!(rooted_code(&c.graph), rooted_code(&RootedGraph::path(3)));
        assert_eq!(c.infinite, vec![false, false, true]);
    }

    #[test]
    fn marked_star_centre() {
        // centre 0, leaves 1 and 2, rooted at leaf 1
        let c = OmegaMarkedGraph::new(RootedGraph::star(2).with_root(1), [0])
            .unwrap()
            .core()
            .unwrap();
        assert_eq!((c.ground_floor, c.first_floor), (vec![1], vec![0]));
        assert_eq!((c.graph.n(), c.graph.edge_count()), (2, 1));
    }

    #[test]
    fn marked_root_is_refused() {
        let g = OmegaMarkedGraph::new(RootedGraph::path(3), [0]).unwrap();
        assert!(matches!(g.core(), Err(Error::RootInfiniteDegree)));
        assert!(OmegaMarkedGraph::new(RootedGraph::path(3), [3]).is_err());
    }
}
