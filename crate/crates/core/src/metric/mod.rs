//! Rooted connected induced subgraphs (RCIS), the radius of similarity
//! `r(G, H)` and the pseudometric `d = 1/r`, the neighbourhood metric, ball
//! censuses and the core of a graph with infinite-degree vertices.
//!
//! Infinite graphs enter through [`GraphFamily`] terms. Their profiles come
//! from constructor rules:
//!
//! * `path(n)` (`n` edges) and `ray`, rooted at an end: an RCIS is a
//!   subpath starting at the root.
//! * `star(n)` (`n` leaves) and `star(inf)`, rooted at the centre: the
//!   RCIS are the stars `K_{1,r-1}` with `r - 1 <= n`.
//! * `fan(n)` (apex joined to a path on `n` vertices) and `fan(inf)` (apex
//!   and a one-way infinite path), rooted at the apex: an RCIS is the apex
//!   plus a set of path vertices, so it is the apex joined to disjoint paths
//!   with lengths forming a partition of `r - 1`. In `fan(n)` the parts and
//!   the gaps between them must fit: `Σ parts + #parts - 1 <= n`.
//! * `join(...)`: an RCIS is the join of one RCIS of every member.
//! * `joinall(paths)`, `joinall(fans)`: the joins of all `path(n)`, resp.
//!   `fan(n)`, `n >= 1`. Every member type occurs in infinitely many members,
//!   so an RCIS is the join of any finite multiset of member RCIS.
//! * `rado`: every finite graph embeds, so every connected rooted graph.

mod core;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

pub use self::core::{Core, OmegaMarkedGraph};
pub use parse::parse_family;

use crate::canon::{rooted_code, CanonCode};
use crate::error::{Error, Result};
use crate::graph::RootedGraph;

/// Default largest RCIS size compared.
pub const DEFAULT_RMAX: usize = 8;
/// Largest RCIS size supported for `rado`.
pub const RADO_RMAX: usize = 6;
/// Largest RCIS size supported at all.
pub const MAX_RCIS_SIZE: usize = 10;

/// A finite or countably infinite rooted graph given by a term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GraphFamily {
    Finite(RootedGraph),
    /// Path with `n` edges, rooted at an end.
    Path(usize),
    Ray,
    /// Star with `n` leaves, rooted at the centre.
    Star(usize),
    StarInf,
    /// Apex joined to a path on `n` vertices, rooted at the apex.
    Fan(usize),
    FanInf,
    /// Members glued at their roots.
    Join(Vec<GraphFamily>),
    JoinAllPaths,
    JoinAllFans,
    Rado,
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Finite(g) => {
                let code = crate::canon::canonical_colored(g, &vec![0; g.n()]);
                let root = code.order.iter().position(|&v| v == g.root()).unwrap_or(0);
                write!(f, "graph6({},{root})", code.code)
            }
            GraphFamily::Path(n) => write!(f, "path({n})"),
            GraphFamily::Ray => f.write_str("ray"),
            GraphFamily::Star(n) => write!(f, "star({n})"),
            GraphFamily::StarInf => f.write_str("star(inf)"),
            GraphFamily::Fan(n) => write!(f, "fan({n})"),
            GraphFamily::FanInf => f.write_str("fan(inf)"),
            GraphFamily::Join(parts) => {
                f.write_str("join(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            GraphFamily::JoinAllPaths => f.write_str("joinall(paths)"),
            GraphFamily::JoinAllFans => f.write_str("joinall(fans)"),
            GraphFamily::Rado => f.write_str("rado"),
        }
    }
}

/// The RCIS types on exactly `size` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RcisProfile {
    pub size: usize,
    pub codes: BTreeSet<CanonCode>,
}

/// Types by code, with a representative rooted at its root.
type Types = BTreeMap<CanonCode, RootedGraph>;

fn single(g: RootedGraph) -> Types {
    let mut t = Types::new();
    t.insert(rooted_code(&g), g);
    t
}

fn rooted_path(vertices: usize) -> RootedGraph {
    RootedGraph::path(vertices)
}

/// Apex 0 joined to disjoint paths with the given vertex counts.
fn fan_graph(parts: &[usize]) -> RootedGraph {
    let n = 1 + parts.iter().sum::<usize>();
    let mut edges = Vec::new();
    let mut next = 1;
    for &p in parts {
        for i in 0..p {
            edges.push((0, next + i));
            if i > 0 {
                edges.push((next + i - 1, next + i));
            }
        }
        next += p;
    }
    RootedGraph::new(n, 0, &edges).expect("fan pieces are simple")
}

/// Partitions of `total` into parts of size at most `max`, non-increasing.
fn partitions(total: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if total == 0 {
        out.push(cur.clone());
        return;
    }
    for p in (1..=max.min(total)).rev() {
        cur.push(p);
        partitions(total - p, p, cur, out);
        cur.pop();
    }
}

fn fan_types(s: usize, path_vertices: Option<usize>) -> Types {
    let mut parts = Vec::new();
    partitions(s - 1, s - 1, &mut Vec::new(), &mut parts);
    let mut t = Types::new();
    for p in parts {
        let need = p.iter().sum::<usize>() + p.len().saturating_sub(1);
        if path_vertices.is_none_or(|n| need <= n) {
            let g = fan_graph(&p);
            t.insert(rooted_code(&g), g);
        }
    }
    t
}

/// Connected rooted graphs on `s` vertices, one per type. Each one arises
/// from one on `s - 1` vertices by adding a vertex, since a connected graph
/// on two or more vertices has a non-cut vertex other than the root.
pub fn connected_rooted_graphs(s: usize) -> Result<Vec<RootedGraph>> {
    if s == 0 || s > MAX_RCIS_SIZE {
        return Err(Error::SizeBound {
            size: s,
            bound: MAX_RCIS_SIZE,
        });
    }
    let mut cur = single(RootedGraph::single_vertex());
    for k in 1..s {
        let mut next = Types::new();
        for g in cur.values() {
            let edges = g.edges();
            for mask in 1u32..(1 << k) {
                let mut e = edges.clone();
                e.extend((0..k).filter(|&v| mask >> v & 1 == 1).map(|v| (v, k)));
                let h = RootedGraph::new(k + 1, g.root(), &e).expect("new vertex edges are fresh");
                next.entry(rooted_code(&h)).or_insert(h);
            }
        }
        cur = next;
    }
    Ok(cur.into_values().collect())
}

/// Calls `f` with every connected vertex set of size `r` containing `root`.
fn connected_sets(g: &RootedGraph, root: usize, r: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(
        g: &RootedGraph,
        set: &mut Vec<usize>,
        frontier: &[usize],
        banned: &mut [bool],
        r: usize,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if set.len() == r {
            f(set);
            return;
        }
        for (i, &w) in frontier.iter().enumerate() {
            // sets through frontier[..i] were all produced already
            let mut next: Vec<usize> = frontier[i + 1..].to_vec();
            let mut added = Vec::new();
            for &x in g.neighbors(w) {
                if !banned[x] {
                    banned[x] = true;
                    added.push(x);
                    next.push(x);
                }
            }
            set.push(w);
            rec(g, set, &next, banned, r, f);
            set.pop();
            for x in added {
                banned[x] = false;
            }
        }
    }
    let mut banned = vec![false; g.n()];
    banned[root] = true;
    let mut frontier = Vec::new();
    for &x in g.neighbors(root) {
        banned[x] = true;
        frontier.push(x);
    }
    let mut set = vec![root];
    rec(g, &mut set, &frontier, &mut banned, r, f);
}

fn finite_types(g: &RootedGraph, s: usize) -> Types {
    let mut t = Types::new();
    connected_sets(g, g.root(), s, &mut |set| {
        let h = g.induced(set, Some(g.root()));
        t.entry(rooted_code(&h)).or_insert(h);
    });
    t
}

fn join_types(a: &Types, b: &Types, out: &mut Types) {
    for x in a.values() {
        for y in b.values() {
            let (g, _) = x.glue(x.root(), y);
            out.entry(rooted_code(&g)).or_insert(g);
        }
    }
}

/// `tables[s]`: types on `s` vertices, `1 <= s <= r`; entry 0 is empty.
fn tables(f: &GraphFamily, r: usize) -> Result<Vec<Types>> {
    if r > MAX_RCIS_SIZE {
        return Err(Error::SizeBound {
            size: r,
            bound: MAX_RCIS_SIZE,
        });
    }
    let mut out: Vec<Types> = vec![Types::new(); r + 1];
    if r == 0 {
        return Ok(out);
    }
    match f {
        GraphFamily::Finite(g) => {
            for (s, slot) in out.iter_mut().enumerate().skip(1) {
                *slot = finite_types(g, s);
            }
        }
        GraphFamily::Path(n) => {
            for (s, slot) in out.iter_mut().enumerate().skip(1) {
                if s <= n + 1 {
                    *slot = single(rooted_path(s));
                }
            }
        }
        GraphFamily::Ray => {
            for (s, slot) in out.iter_mut().enumerate().skip(1) {
                *slot = single(rooted_path(s));
            }
        }
        GraphFamily::Star(n) => {
            for (s, slot) in out.iter_mut().enumerate().skip(1) {
                if s - 1 <= *n {
                    *slot = single(RootedGraph::star(s - 1));
                }
            }
        }
        GraphFamily::StarInf => {
            for (s, slot) in out.iter_mut().enumerate().skip(1) {
                *slot = single(RootedGraph::star(s - 1));
            }
        }
        GraphFamily::Fan(n) => {
            for (s, slot) in out.iter_mut().enumerate().skip(1) {
                *slot = fan_types(s, Some(*n));
            }
        }
        GraphFamily::FanInf => {
            for (s, slot) in out.iter_mut().enumerate().skip(1) {
                *slot = fan_types(s, None);
            }
        }
        GraphFamily::Join(parts) => {
            // acc[k]: joins of the members so far with k non-root vertices
            let mut acc: Vec<Types> = vec![Types::new(); r];
            acc[0] = single(RootedGraph::single_vertex());
            for p in parts {
                let t = tables(p, r)?;
                let mut next: Vec<Types> = vec![Types::new(); r];
                for (a, types) in acc.iter().enumerate() {
                    for b in 0..r - a {
                        join_types(types, &t[b + 1], &mut next[a + b]);
                    }
                }
                acc = next;
            }
            for (k, types) in acc.into_iter().enumerate() {
                out[k + 1] = types;
            }
        }
        GraphFamily::JoinAllPaths | GraphFamily::JoinAllFans => {
            // pieces: the union of the member profiles, by size
            let pieces: Vec<Types> = (0..=r)
                .map(|s| match (s, f) {
                    (0 | 1, _) => Types::new(),
                    (_, GraphFamily::JoinAllPaths) => single(rooted_path(s)),
                    _ => fan_types(s, None),
                })
                .collect();
            let mut acc: Vec<Types> = vec![Types::new(); r];
            acc[0] = single(RootedGraph::single_vertex());
            for k in 1..r {
                let mut next = Types::new();
                for (s, piece) in pieces.iter().enumerate().take(k + 2).skip(2) {
                    join_types(&acc[k + 1 - s], piece, &mut next);
                }
                acc[k] = next;
            }
            for (k, types) in acc.into_iter().enumerate() {
                out[k + 1] = types;
            }
        }
        GraphFamily::Rado => {
            if r > RADO_RMAX {
                return Err(Error::SizeBound {
                    size: r,
                    bound: RADO_RMAX,
                });
            }
            for (s, slot) in out.iter_mut().enumerate().skip(1) {
                *slot = connected_rooted_graphs(s)?
                    .into_iter()
                    .map(|g| (rooted_code(&g), g))
                    .collect();
            }
        }
    }
    Ok(out)
}

/// RCIS profiles of `f` at sizes `1..=r_max`.
pub fn rcis_profiles(f: &GraphFamily, r_max: usize) -> Result<Vec<RcisProfile>> {
    Ok(tables(f, r_max)?
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(size, t)| RcisProfile {
            size,
            codes: t.into_keys().collect(),
        })
        .collect())
}

pub fn rcis_profile(f: &GraphFamily, r: usize) -> Result<RcisProfile> {
    if r == 0 {
        return Err(Error::SizeBound { size: 0, bound: 0 });
    }
    Ok(rcis_profiles(f, r)?.pop().expect("r >= 1"))
}

/// A radius of similarity, or a distance, that may only be bounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Similarity {
    /// Profiles first differ at size `r + 1`.
    Exactly(usize),
    /// Profiles agree at every size compared.
    AtLeast(usize),
}

impl Similarity {
    pub fn radius(self) -> usize {
        match self {
            Similarity::Exactly(r) | Similarity::AtLeast(r) => r,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Similarity::Exactly(_))
    }

    /// `d = 1/r`; for [`Similarity::AtLeast`] this is an upper bound.
    pub fn distance(self) -> f64 {
        match self.radius() {
            0 => f64::INFINITY,
            r => 1.0 / r as f64,
        }
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Similarity::Exactly(r) => write!(f, "{r}"),
            Similarity::AtLeast(r) => write!(f, ">= {r}"),
        }
    }
}

fn first_difference(a: &[RcisProfile], b: &[RcisProfile]) -> Option<usize> {
    a.iter().zip(b).find(|(x, y)| x.codes != y.codes).map(|(x, _)| x.size)
}

/// `r(F, G)`: the largest `r <= r_max` with equal profiles at every size up
/// to `r`.
pub fn radius_similarity(f: &GraphFamily, g: &GraphFamily, r_max: usize) -> Result<Similarity> {
    let a = rcis_profiles(f, r_max)?;
    let b = rcis_profiles(g, r_max)?;
    Ok(match first_difference(&a, &b) {
        Some(s) => Similarity::Exactly(s - 1),
        None => Similarity::AtLeast(r_max),
    })
}

/// First differing size, with the codes only in the first and only in the
/// second profile there.
pub type Witness = (usize, Vec<CanonCode>, Vec<CanonCode>);

/// Codes present in exactly one of the two profiles at the first size where
/// they differ.
pub fn profile_witnesses(f: &GraphFamily, g: &GraphFamily, r_max: usize) -> Result<Option<Witness>> {
    let a = rcis_profiles(f, r_max)?;
    let b = rcis_profiles(g, r_max)?;
    Ok(first_difference(&a, &b).map(|s| {
        let (x, y) = (&a[s - 1].codes, &b[s - 1].codes);
        (s, x.difference(y).cloned().collect(), y.difference(x).cloned().collect())
    }))
}

/// `d(F, G) = 1/r(F, G)`.
pub fn d_value(f: &GraphFamily, g: &GraphFamily, r_max: usize) -> Result<Similarity> {
    radius_similarity(f, g, r_max)
}

/// The ball of radius `r` around the root.
pub fn ball(g: &RootedGraph, r: usize) -> RootedGraph {
    let dist = g.distances_from(g.root());
    let vs: Vec<usize> = (0..g.n()).filter(|&v| dist[v] <= r).collect();
    g.induced(&vs, Some(g.root()))
}

/// `r_N(G, H)`: the largest radius, up to `r_max`, at which the balls around
/// the roots are isomorphic. Balls of radius 0 always agree.
pub fn neighbourhood_radius(g: &RootedGraph, h: &RootedGraph, r_max: usize) -> Similarity {
    for r in 1..=r_max {
        if rooted_code(&ball(g, r)) != rooted_code(&ball(h, r)) {
            return Similarity::Exactly(r - 1);
        }
    }
    Similarity::AtLeast(r_max)
}

/// `d_N(G, H) = 1/r_N(G, H)`, infinite when the 1-balls differ.
pub fn d_neighbourhood(g: &RootedGraph, h: &RootedGraph, r_max: usize) -> Similarity {
    neighbourhood_radius(g, h, r_max)
}

/// Partition of families by their profiles at sizes `<= k`.
#[derive(Clone, Debug, Serialize)]
pub struct BallCensus {
    pub k: usize,
    /// Indices into the input, one list per part.
    pub parts: Vec<Vec<usize>>,
    /// `|K|`: connected rooted graphs on at most `k` vertices.
    pub types: usize,
}

impl BallCensus {
    /// Whether the part count is at most `2^|K|`.
    pub fn within_bound(&self) -> bool {
        self.types >= 64 || self.parts.len() as u128 <= 1u128 << self.types
    }
}

pub fn ball_census(families: &[GraphFamily], k: usize) -> Result<BallCensus> {
    let mut parts: BTreeMap<Vec<RcisProfile>, Vec<usize>> = BTreeMap::new();
    for (i, f) in families.iter().enumerate() {
        parts.entry(rcis_profiles(f, k)?).or_default().push(i);
    }
    let types = (1..=k).map(|s| connected_rooted_graphs(s).map(|v| v.len())).sum::<Result<usize>>()?;
    let mut parts: Vec<Vec<usize>> = parts.into_values().collect();
    parts.sort();
    Ok(BallCensus { k, parts, types })
}

impl PartialOrd for RcisProfile {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RcisProfile {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.size, &self.codes).cmp(&(other.size, &other.codes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(f: &GraphFamily, r: usize) -> usize {
        rcis_profile(f, r).unwrap().codes.len()
    }

    #[test]
    fn single_vertex_profile() {
        for f in [GraphFamily::Ray, GraphFamily::Rado, GraphFamily::Star(0), GraphFamily::JoinAllFans] {
            let p = rcis_profile(&f, 1).unwrap();
            assert_eq!(p.codes.len(), 1);
            assert!(p.codes.contains(&rooted_code(&RootedGraph::single_vertex())));
        }
    }

    #[test]
    fn connected_rooted_counts() {
        // connected rooted graphs on 1..=5 vertices, by brute force
        for s in 1..=5usize {
            let pairs: Vec<(usize, usize)> = (0..s).flat_map(|u| (u + 1..s).map(move |v| (u, v))).collect();
            let mut set = BTreeSet::new();
            for mask in 0u32..(1 << pairs.len()) {
                let e: Vec<_> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
                let g = RootedGraph::new(s, 0, &e).unwrap();
                if g.is_connected() {
                    for r in 0..s {
                        set.insert(rooted_code(&g.with_root(r)));
                    }
                }
            }
            assert_eq!(connected_rooted_graphs(s).unwrap().len(), set.len(), "s = {s}");
        }
        assert_eq!(codes(&GraphFamily::Rado, 3), 3);
    }

    #[test]
    fn constructor_rules_match_finite_graphs() {
        let fan = |n: usize| {
            let mut e: Vec<(usize, usize)> = (1..=n).map(|i| (0, i)).collect();
            e.extend((2..=n).map(|i| (i - 1, i)));
            RootedGraph::new(n + 1, 0, &e).unwrap()
        };
        let cases = [
            (GraphFamily::Path(4), RootedGraph::path(5)),
            (GraphFamily::Star(4), RootedGraph::star(4)),
            (GraphFamily::Fan(5), fan(5)),
            (GraphFamily::Fan(1), fan(1)),
            (
                GraphFamily::Join(vec![GraphFamily::Path(2), GraphFamily::Fan(3)]),
                RootedGraph::path(3).glue(0, &fan(3)).0,
            ),
        ];
        for (f, g) in cases {
            let a = rcis_profiles(&f, 7).unwrap();
            let b = rcis_profiles(&GraphFamily::Finite(g), 7).unwrap();
            assert_eq!(a, b, "{f}");
        }
    }

    #[test]
    fn connected_sets_are_counted_once() {
        // the 5-cycle has 5 connected 3-sets, 3 of them through a vertex
        let mut k = 0;
        connected_sets(&RootedGraph::cycle(5), 0, 3, &mut |_| k += 1);
        assert_eq!(k, 3);
        let mut k = 0;
        connected_sets(&RootedGraph::complete(5), 0, 3, &mut |_| k += 1);
        assert_eq!(k, 6);
    }

    #[test]
    fn stars() {
        for n in 0..=7 {
            assert_eq!(
                radius_similarity(&GraphFamily::Star(n), &GraphFamily::StarInf, 9).unwrap(),
                Similarity::Exactly(n + 1)
            );
        }
        let d = d_value(&GraphFamily::Star(3), &GraphFamily::StarInf, 8).unwrap();
        assert_eq!(d.distance(), 0.25);
    }

    #[test]
    fn neighbourhood_metric() {
        let p = RootedGraph::path(6);
        assert_eq!(neighbourhood_radius(&p, &RootedGraph::path(9), 8), Similarity::Exactly(5));
        assert_eq!(neighbourhood_radius(&p, &p, 8), Similarity::AtLeast(8));
        assert!(d_neighbourhood(&p, &RootedGraph::star(3), 4).distance().is_infinite());
    }

    #[test]
    fn joins_of_members() {
        let r = radius_similarity(&GraphFamily::JoinAllFans, &GraphFamily::FanInf, 8).unwrap();
        assert_eq!(r, Similarity::AtLeast(8));
        let rado2 = GraphFamily::Join(vec![GraphFamily::Rado, GraphFamily::Rado]);
        assert_eq!(radius_similarity(&rado2, &GraphFamily::Rado, 6).unwrap(), Similarity::AtLeast(6));
        // paths joined at the root: spiders; the ray gives only bare paths
        let r = radius_similarity(&GraphFamily::JoinAllPaths, &GraphFamily::Ray, 8).unwrap();
        assert_eq!(r, Similarity::Exactly(2));
        assert!(rcis_profile(&GraphFamily::Rado, 7).is_err());
    }
}
