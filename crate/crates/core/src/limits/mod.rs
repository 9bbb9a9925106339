//! 2-ended links, the link measures `p_L` (labelled) and `q_L` (unlabelled
//! rooted), fringe densities `μ_H`, the Benjamini–Schramm chain weights and
//! samples of the limiting chain.

mod boltzmann;

use std::collections::HashSet;

use num_rational::BigRational;
use serde::Serialize;

pub use boltzmann::{sample_limit_chain, ChainSampler, MAX_LINK_SIZE};

use crate::canon::{automorphism_group_order, automorphisms, canonical_colored, CanonCode};
use crate::classes::{BlockClass, ClassKind, CycleIndex};
use crate::enumerate::{check_fringe_graph, for_each_assignment, is_class_member, rooted_members, Shape};
use crate::error::{Error, Result};
use crate::graph::RootedGraph;
use crate::series::{
    fit_asymptotics, pointing_weights, richardson, scaled_substitution, solve_class_scaled,
    solve_unlabelled_class, SingularityData, TruncatedSeries, RICHARDSON_LEVELS,
};

/// Largest link size accepted by [`enumerate_links`].
pub const MAX_ENUMERATED_LINK_SIZE: usize = 12;

/// Which limit a chain probability refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    /// Uniform labelled graphs, rooted uniformly.
    Labelled,
    /// Uniform rooted unlabelled graphs.
    UnlabelledRooted,
}

/// A block with a source and a sink; every vertex except the sink carries
/// a rooted branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Link {
    /// The block, rooted at the source.
    block: RootedGraph,
    sink: usize,
    /// `branches[v]` hangs at block vertex `v`; the sink's is a single vertex.
    branches: Vec<RootedGraph>,
    #[serde(skip)]
    graph: RootedGraph,
}

fn pinned_colors(n: usize, source: usize, sink: usize) -> Vec<u32> {
    let mut colors = vec![2u32; n];
    colors[source] = 0;
    colors[sink] = 1;
    colors
}

impl Link {
    pub fn new(block: RootedGraph, sink: usize, branches: Vec<RootedGraph>) -> Result<Self> {
        if !block.is_block() {
            return Err(Error::NotBiconnected);
        }
        if sink >= block.n() || sink == block.root() {
            return Err(Error::InvalidGraph("the sink must be a block vertex other than the source".into()));
        }
        if branches.len() != block.n() {
            return Err(Error::InvalidGraph(format!(
                "{} branches given for a block on {} vertices",
                branches.len(),
                block.n()
            )));
        }
        if branches[sink].n() != 1 {
            return Err(Error::InvalidGraph("the sink carries no branch".into()));
        }
        if branches.iter().any(|b| !b.is_connected()) {
            return Err(Error::Disconnected);
        }
        let graph = assemble(&block, &branches);
        Ok(Link {
            block,
            sink,
            branches,
            graph,
        })
    }

    /// Assembles a link from trusted parts.
    pub(crate) fn from_shapes(block: RootedGraph, sink: usize, branches: Vec<Shape>) -> Self {
        let branches: Vec<RootedGraph> = branches.into_iter().map(Shape::into_graph).collect();
        let graph = assemble(&block, &branches);
        Link {
            block,
            sink,
            branches,
            graph,
        }
    }

    /// `K_2` with a trivial branch at the source.
    pub fn leaf() -> Self {
        Link::new(
            RootedGraph::complete(2),
            1,
            vec![RootedGraph::single_vertex(), RootedGraph::single_vertex()],
        )
        .expect("K2 is a block")
    }

    /// `K_2` whose source carries the given branch.
    pub fn edge_with_branch(branch: RootedGraph) -> Result<Self> {
        Link::new(RootedGraph::complete(2), 1, vec![branch, RootedGraph::single_vertex()])
    }

    pub fn block(&self) -> &RootedGraph {
        &self.block
    }

    pub fn source(&self) -> usize {
        self.block.root()
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn branches(&self) -> &[RootedGraph] {
        &self.branches
    }

    /// `|L|`: the number of vertices other than the sink.
    pub fn size(&self) -> usize {
        self.graph.n() - 1
    }

    /// The assembled graph, rooted at the source; the sink keeps its block
    /// index.
    pub fn graph(&self) -> &RootedGraph {
        &self.graph
    }

    /// Canonical code of the assembled graph with source and sink pinned.
    pub fn pinned_code(&self) -> CanonCode {
        canonical_colored(&self.graph, &pinned_colors(self.graph.n(), self.source(), self.sink)).code
    }

    /// Number of automorphisms fixing source and sink.
    pub fn automorphism_count(&self) -> u128 {
        automorphism_group_order(&self.graph, &pinned_colors(self.graph.n(), self.source(), self.sink))
    }

    /// `ℓ(L) = |L|! / |Aut_{s,t}(L)|`, the number of non-isomorphic labellings.
    pub fn labellings(&self) -> BigRational {
        let mut f = num_bigint::BigInt::from(1);
        for i in 2..=self.size() {
            f *= i;
        }
        BigRational::new(f, self.automorphism_count().into())
    }

    /// Cycle index of the automorphisms fixing source and sink, acting on
    /// the non-sink vertices. Enumerates the group, so meant for small links.
    pub fn cycle_index(&self) -> CycleIndex {
        let group = automorphisms(&self.graph, &pinned_colors(self.graph.n(), self.source(), self.sink));
        let support: Vec<usize> = (0..self.graph.n()).filter(|&v| v != self.sink).collect();
        CycleIndex::from_group(&group, &support)
    }
}

/// `block` with `branches[v]` glued at `v` by its root; block vertices keep
/// their indices and the root stays the block's root.
fn assemble(block: &RootedGraph, branches: &[RootedGraph]) -> RootedGraph {
    let mut n = block.n();
    let mut edges = block.edges();
    for (v, br) in branches.iter().enumerate() {
        let r = br.root();
        let base = n;
        let map = |u: usize| match u.cmp(&r) {
            std::cmp::Ordering::Equal => v,
            std::cmp::Ordering::Less => base + u,
            std::cmp::Ordering::Greater => base + u - 1,
        };
        edges.extend(br.edges().into_iter().map(|(a, b)| (map(a), map(b))));
        n += br.n() - 1;
    }
    RootedGraph::new(n, block.root(), &edges).expect("glued branches form a simple graph")
}

/// Links joined sink to source, rooted at the source of the first.
#[derive(Clone, Debug, Serialize)]
pub struct ChainPrefix {
    links: Vec<Link>,
    graph: RootedGraph,
    /// Vertex of `graph` at the sink of each link.
    sinks: Vec<usize>,
}

impl ChainPrefix {
    pub fn new(links: Vec<Link>) -> Self {
        let mut graph = RootedGraph::single_vertex();
        let mut at = 0;
        let mut sinks = Vec::with_capacity(links.len());
        for l in &links {
            let (g, map) = graph.glue(at, l.graph());
            graph = g;
            at = map[l.sink()];
            sinks.push(at);
        }
        ChainPrefix { links, graph, sinks }
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// The assembled graph, rooted at the source of the first link.
    pub fn graph(&self) -> &RootedGraph {
        &self.graph
    }

    /// The sink of the last link (the root for an empty chain).
    pub fn last_sink(&self) -> usize {
        self.sinks.last().copied().unwrap_or(0)
    }

    /// Total size `Σ |L_j|`.
    pub fn size(&self) -> usize {
        self.graph.n() - 1
    }

    pub fn pinned_code(&self) -> CanonCode {
        canonical_colored(&self.graph, &pinned_colors(self.graph.n(), 0, self.last_sink())).code
    }

    /// The chain as a fringe graph: rooted at the last sink.
    pub fn fringe_graph(&self) -> RootedGraph {
        self.graph.with_root(self.last_sink())
    }
}

/// All 2-ended links of `class` with `|L| <= max_size`, one per isomorphism
/// type (isomorphisms fix source and sink), sorted by size.
pub fn enumerate_links(class: &BlockClass, max_size: usize) -> Result<Vec<Link>> {
    if max_size > MAX_ENUMERATED_LINK_SIZE {
        return Err(Error::SizeBound {
            size: max_size,
            bound: MAX_ENUMERATED_LINK_SIZE,
        });
    }
    if !class.has_block_generator() {
        return Err(Error::NoBlockGenerator(class.name().to_string()));
    }
    let shapes = class.with_kind(ClassKind::Unlabelled)?;
    let members = rooted_members(&shapes, max_size)?;
    let mut out: Vec<(usize, CanonCode, Link)> = Vec::new();
    let mut seen = HashSet::new();
    for b in class.blocks(max_size + 1)? {
        let n = b.n();
        for (s, t) in pair_orbit_reps(&b) {
            let slots: Vec<usize> = (0..n).filter(|&v| v != t).collect();
            for total in slots.len()..=max_size {
                for_each_assignment(&slots, &members, total, &mut |assign| {
                    let mut branches = vec![RootedGraph::single_vertex(); n];
                    for (&v, br) in slots.iter().zip(assign) {
                        branches[v] = (*br).clone();
                    }
                    let link = Link::new(b.with_root(s), t, branches).expect("assembled from class blocks");
                    let code = link.pinned_code();
                    if seen.insert(code.clone()) {
                        out.push((link.size(), code, link));
                    }
                });
            }
        }
    }
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(out.into_iter().map(|(_, _, l)| l).collect())
}

/// Ordered pairs `(s, t)`, `s != t`, one per orbit of `Aut(b)`.
fn pair_orbit_reps(b: &RootedGraph) -> Vec<(usize, usize)> {
    let n = b.n();
    let orbits = crate::canon::vertex_orbits(b, &vec![0; n]);
    let mut out = Vec::new();
    let mut sources = Vec::new();
    for s in 0..n {
        if sources.iter().any(|&r: &usize| orbits[r] == orbits[s]) {
            continue;
        }
        sources.push(s);
        let mut colors = vec![1; n];
        colors[s] = 0;
        let fixed = crate::canon::vertex_orbits(b, &colors);
        let mut sinks: Vec<usize> = Vec::new();
        for t in (0..n).filter(|&t| t != s) {
            if !sinks.iter().any(|&r| fixed[r] == fixed[t]) {
                sinks.push(t);
                out.push((s, t));
            }
        }
    }
    out
}

/// `p_L = ℓ(L) ρ^|L| / |L|! = ρ^|L| / |Aut_{s,t}(L)|`.
pub fn p_link(link: &Link, sing: &SingularityData) -> f64 {
    sing.rho.powi(link.size() as i32) / link.automorphism_count() as f64
}

/// `q_L = Z_L(ρ, ρ², ...)`. Every monomial of `Z_L` has weight `|L|` and the
/// coefficients sum to one, so this is `ρ^|L|`.
pub fn q_link(link: &Link, sing: &SingularityData) -> f64 {
    sing.rho.powi(link.size() as i32)
}

/// `Π_j p_{L_j}` or `Π_j q_{L_j}`.
pub fn chain_probability(links: &[Link], sing: &SingularityData, mode: ChainMode) -> f64 {
    links
        .iter()
        .map(|l| match mode {
            ChainMode::Labelled => p_link(l, sing),
            ChainMode::UnlabelledRooted => q_link(l, sing),
        })
        .product()
}

/// `C•(ρz)·B''(C•(ρz))` (labelled) or `C•(ρz)·Z_{B''}(C•(ρz), C•(ρ²z²), ...)`
/// (unlabelled) to `order`: the generating function of links by size, with
/// link `L` weighted by its probability.
pub fn link_mass_series(class: &BlockClass, rho: f64, order: usize) -> Result<TruncatedSeries<f64>> {
    let c = solve_class_scaled(class, order, rho)?;
    let inner = match class.kind() {
        ClassKind::Labelled => {
            let b2 = class.bdoubleprime::<f64>(order)?;
            let mut acc = TruncatedSeries::zero(order);
            let mut pow = TruncatedSeries::one(order);
            for k in 0..=order {
                if *b2.coeff(k) != 0.0 {
                    acc = &acc + &pow.scale(b2.coeff(k));
                }
                pow = pow.mul_to(&c, order);
            }
            acc
        }
        ClassKind::Unlabelled => {
            let z2 = class.z_bdoubleprime(order)?;
            let max_len = z2.terms().map(|(m, _)| m.exponents().len()).max().unwrap_or(1);
            let args: Vec<TruncatedSeries<f64>> = (1..=max_len)
                .map(|l| scaled_substitution(&c, l, order, &rho))
                .collect();
            z2.eval_series(&args, order)
        }
    };
    Ok(c.mul_to(&inner, order))
}

/// Total link probability by size `m = 0..=max_size`.
pub fn link_mass_by_size(class: &BlockClass, sing: &SingularityData, max_size: usize) -> Result<Vec<f64>> {
    Ok(link_mass_series(class, sing.rho, max_size)?.into_coeffs())
}

/// `κ` in `P(|L| = m) ~ κ m^(-3/2)`, fitted at `order`.
pub fn link_tail_constant(class: &BlockClass, sing: &SingularityData, order: usize) -> Result<f64> {
    let mass = link_mass_series(class, sing.rho, order)?;
    fit_asymptotics(&mass, 1.0, 1e-2)
}

/// Fringe density of a labelled `H` (root unlabelled, `h = |H| - 1`
/// labelled vertices): `μ_H = ρ^h / (h!·τ)` per labelled version of `H`.
pub fn mu_fringe_labelled(h: &RootedGraph, class: &BlockClass, sing: &SingularityData) -> Result<f64> {
    check_fringe_graph(h)?;
    class.require_kind(ClassKind::Labelled)?;
    if class.has_block_generator() && !is_class_member(h, class)? {
        return Err(Error::InvalidGraph("fringe graph is not a class member".into()));
    }
    let k = h.n() - 1;
    let mut fact = 1.0;
    for i in 2..=k {
        fact *= i as f64;
    }
    Ok(sing.rho.powi(k as i32) / (fact * sing.tau))
}

/// Occurrences of the shape of `H` per vertex: `μ_H` times the
/// `h!/|Aut_root(H)|` labelled versions of `H`.
pub fn fringe_shape_density_labelled(h: &RootedGraph, class: &BlockClass, sing: &SingularityData) -> Result<f64> {
    let mu = mu_fringe_labelled(h, class, sing)?;
    let mut colors = vec![1; h.n()];
    colors[h.root()] = 0;
    let aut = automorphism_group_order(h, &colors) as f64;
    let mut fact = 1.0;
    for i in 2..h.n() {
        fact *= i as f64;
    }
    Ok(mu * fact / aut)
}

/// `D(z) = Σ_G F_H(G) z^|G|` over rooted unlabelled members `G`, where
/// `F_H` counts fringe occurrences avoiding the root. With `h = |H| - 1`:
/// `D = C•·(Σ_i z^{ih} + Σ_{i,ℓ} ℓ·∂_ℓ Z_{B'}(C•(z^i), ...)·D(z^{iℓ}))`.
pub fn fringe_series(h: &RootedGraph, class: &BlockClass, order: usize) -> Result<TruncatedSeries<f64>> {
    check_fringe_graph(h)?;
    class.require_kind(ClassKind::Unlabelled)?;
    if class.has_block_generator() && !is_class_member(h, class)? {
        return Err(Error::InvalidGraph("fringe graph is not a class member".into()));
    }
    let c = solve_unlabelled_class::<f64>(class, order)?;
    let weights = pointing_weights(class, &c, order)?;
    let hh = h.n() - 1;
    let mut d = vec![0.0; order + 1];
    let mut e = vec![0.0; order + 1];
    e[0] = 0.0;
    for n in 1..=order {
        d[n] = (1..=n).map(|a| c.coeff(a) * e[n - a]).sum();
        let mut v = if n % hh == 0 { 1.0 } else { 0.0 };
        for (s, p) in &weights {
            let mut j = 1;
            while s * j <= n {
                v += p.coeff(n - s * j) * d[j];
                j += 1;
            }
        }
        e[n] = v;
    }
    Ok(TruncatedSeries::from_coeffs(d))
}

/// `μ_H` for an unlabelled class: the extrapolated limit of
/// `[z^n] D(z) / (n [z^n] C•(z))`, at `n` near `order` and near `order/2`.
pub fn mu_fringe_unlabelled(h: &RootedGraph, class: &BlockClass, order: usize, rel_tol: f64) -> Result<f64> {
    if order < crate::series::MIN_FIT_ORDER {
        return Err(Error::OrderTooLow(format!(
            "order {order}; at least {} is needed",
            crate::series::MIN_FIT_ORDER
        )));
    }
    let d = fringe_series(h, class, order)?;
    let c = solve_unlabelled_class::<f64>(class, order)?;
    let ratio = |n: usize| d.coeff(n) / (n as f64 * c.coeff(n));
    let levels = RICHARDSON_LEVELS;
    let hi = richardson(ratio, order - levels, levels);
    let lo = richardson(ratio, order / 2 - levels, levels);
    if !hi.is_finite() || !lo.is_finite() || (hi - lo).abs() > rel_tol * hi.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::OrderTooLow(format!(
            "fringe density estimates {lo:.8} (n = {}) and {hi:.8} (n = {order}) disagree",
            order / 2
        )));
    }
    Ok(hi)
}

/// `ω(H)`: vertices `v` of the chain graph, other than the last sink, such
/// that the graph with `v` as source and the last sink as sink is again the
/// chain.
pub fn omega(chain: &ChainPrefix) -> usize {
    let g = chain.graph();
    let t = chain.last_sink();
    let code = chain.pinned_code();
    (0..g.n())
        .filter(|&v| v != t && canonical_colored(g, &pinned_colors(g.n(), v, t)).code == code)
        .count()
}

/// `P^(k)(L_1, ..., L_k) = ω(H)·μ_H`, `H` the chain rooted at its last sink:
/// the limiting probability that a uniformly chosen vertex of a uniform
/// unlabelled graph has this `k`-block neighbourhood.
pub fn bs_chain_probability(class: &BlockClass, links: &[Link], order: usize, rel_tol: f64) -> Result<f64> {
    if links.is_empty() {
        return Ok(1.0);
    }
    let chain = ChainPrefix::new(links.to_vec());
    let mu = mu_fringe_unlabelled(&chain.fringe_graph(), class, order, rel_tol)?;
    Ok(omega(&chain) as f64 * mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::find_singularity;

    fn sing(name: &str) -> (BlockClass, SingularityData) {
        let c = BlockClass::builtin(name).unwrap();
        let s = find_singularity(&c, c.default_order(), 1e-9).unwrap();
        (c, s)
    }

    #[test]
    fn tree_links() {
        let t = BlockClass::builtin("trees_labelled").unwrap();
        let one = enumerate_links(&t, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].size(), 1);
        let two = enumerate_links(&t, 2).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two[1].labellings(), BigRational::from_integer(2.into()));
    }

    #[test]
    fn leaf_link_probabilities() {
        let (_, s) = sing("trees_labelled");
        assert!((p_link(&Link::leaf(), &s) - (-1.0f64).exp()).abs() < 1e-12);
        let (_, u) = sing("trees_unlabelled");
        let q = q_link(&Link::leaf(), &u);
        let z = Link::leaf().cycle_index().eval_at_powers(u.rho);
        assert!((q - z).abs() < 1e-15);
    }

    #[test]
    fn q_is_the_cycle_index_value() {
        let (c, s) = sing("cacti_unlabelled");
        for l in enumerate_links(&c, 4).unwrap() {
            let z = l.cycle_index().eval_at_powers(s.rho);
            assert!((q_link(&l, &s) - z).abs() < 1e-14);
        }
    }

    #[test]
    fn enumerated_links_match_mass_series() {
        for name in ["trees_labelled", "cacti_labelled", "trees_unlabelled", "cacti_unlabelled"] {
            let (c, s) = sing(name);
            let links = enumerate_links(&c, 5).unwrap();
            let mass = link_mass_by_size(&c, &s, 5).unwrap();
            for m in 1..=5 {
                let sum: f64 = links
                    .iter()
                    .filter(|l| l.size() == m)
                    .map(|l| match c.kind() {
                        ClassKind::Labelled => p_link(l, &s),
                        ClassKind::Unlabelled => q_link(l, &s),
                    })
                    .sum();
                assert!((sum - mass[m]).abs() < 1e-12 * mass[m].max(1.0), "{name}, m = {m}");
            }
        }
    }

    #[test]
    fn chain_probability_is_multiplicative() {
        let (_, s) = sing("trees_labelled");
        let l2 = Link::edge_with_branch(RootedGraph::path(2)).unwrap();
        let all = [Link::leaf(), l2.clone(), Link::leaf()];
        let m = ChainMode::Labelled;
        let whole = chain_probability(&all, &s, m);
        let parts = chain_probability(&all[..1], &s, m) * chain_probability(&all[1..], &s, m);
        assert!((whole - parts).abs() < 1e-15);
        assert_eq!(chain_probability(&[], &s, m), 1.0);
        assert!((chain_probability(&[Link::leaf(), Link::leaf()], &s, m) - (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn chain_assembly() {
        let c = ChainPrefix::new(vec![Link::leaf(), Link::leaf()]);
        assert_eq!(c.graph().n(), 3);
        assert_eq!(c.graph().degree(c.last_sink()), 1);
        assert_eq!(c.size(), 2);
        assert_eq!(omega(&c), 1);
        assert_eq!(ChainPrefix::new(vec![]).graph().n(), 1);
    }

    #[test]
    fn labelled_fringe_values() {
        let (c, s) = sing("trees_labelled");
        let leaf = RootedGraph::path(2);
        assert!((mu_fringe_labelled(&leaf, &c, &s).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
        let p3 = RootedGraph::path(3);
        let mu = mu_fringe_labelled(&p3, &c, &s).unwrap();
        assert!((mu - (-2.0f64).exp() / 2.0).abs() < 1e-12);
        assert!(matches!(
            mu_fringe_labelled(&RootedGraph::path(3).with_root(1), &c, &s),
            Err(Error::RootInSeveralBlocks(2))
        ));
    }

    #[test]
    fn fringe_series_counts_small_trees() {
        let c = BlockClass::builtin("trees_unlabelled").unwrap();
        let leaf = RootedGraph::path(2);
        let d = fringe_series(&leaf, &c, 10).unwrap();
        for n in 1..=10 {
            let total: usize = crate::enumerate::all_unlabelled_rooted_trees(n)
                .unwrap()
                .map(|g| crate::enumerate::fringe_count(&g, &leaf, true).unwrap())
                .sum();
            assert_eq!(d.coeff(n).round() as usize, total, "n = {n}");
        }
    }
}
