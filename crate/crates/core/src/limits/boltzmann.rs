//! Critical Boltzmann samplers for 2-ended links. A labelled Boltzmann
//! link at `ρ` has law `p_L`, an unlabelled (Pólya) one has law `q_L`.
//! Links above a size cap are rejected, so draws follow the measure
//! restricted to `|L| <= M` and renormalised.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;

use super::{link_tail_constant, ChainMode, ChainPrefix, Link};
use crate::classes::{BlockClass, ClassKind};
use crate::enumerate::{blocks_of_size, cycles_of, Shape};
use crate::error::{Error, Result};
use crate::graph::RootedGraph;
use crate::series::{solve_unlabelled_class, SingularityData};

/// Largest size cap a sampler accepts.
pub const MAX_LINK_SIZE: usize = 10_000_000;

/// Block weights below this fraction of the running total are dropped.
const BLOCK_WEIGHT_CUTOFF: f64 = 1e-18;
const MAX_BLOCK_VERTICES: usize = 400;
/// `C•(ρ^m)` for `m` above this is `ρ^m (1 + O(ρ^m))` and every structure
/// drawn there is a single vertex up to probability `O(ρ^m)`.
const MAX_LEVEL: usize = 64;

/// The size cap was exceeded; the draw is discarded.
struct Aborted;

type Step<T> = std::result::Result<T, Aborted>;

fn charge(budget: &mut usize, k: usize) -> Step<()> {
    if k > *budget {
        return Err(Aborted);
    }
    *budget -= k;
    Ok(())
}

fn new_vertex(s: &mut Shape, budget: &mut usize) -> Step<usize> {
    charge(budget, 1)?;
    Ok(s.add_vertex())
}

enum Model {
    Labelled(LabelledModel),
    Unlabelled(UnlabelledModel),
}

struct LabelledModel {
    /// Number of pieces at a vertex: Poisson(`B'(τ)`).
    pieces: Poisson<f64>,
    /// Non-root block sizes `k`, weight `[y^k] B'·τ^k`; index `k - 1`.
    piece_k: WeightedIndex<f64>,
    /// Blocks by vertex count, with their `1/|Aut|` weights.
    blocks: Vec<Option<(Vec<RootedGraph>, WeightedIndex<f64>)>>,
    /// Inner vertices `k` of the link block, weight `[y^k] B''·τ^(k+1)`.
    link_k: WeightedIndex<f64>,
}

impl LabelledModel {
    fn new(class: &BlockClass, sing: &SingularityData) -> Result<Self> {
        let tau = sing.tau;
        let coeff = |k: usize| -> f64 { num_traits::ToPrimitive::to_f64(&class.bprime_coeff(k)).unwrap_or(0.0) };
        let kmax = class.bprime_degree().unwrap_or(MAX_BLOCK_VERTICES - 1);
        let mut piece_w = Vec::new();
        let mut total = 0.0;
        for k in 1..=kmax {
            let w = coeff(k) * tau.powi(k as i32);
            if k > 2 && w < BLOCK_WEIGHT_CUTOFF * total {
                break;
            }
            total += w;
            piece_w.push(w);
        }
        let max_k = piece_w.len();
        let mut link_w: Vec<f64> = (0..max_k)
            .map(|k| (k + 1) as f64 * coeff(k + 1) * tau.powi(k as i32 + 1))
            .collect();
        while link_w.last() == Some(&0.0) {
            link_w.pop();
        }
        let mut blocks = vec![None; max_k + 2];
        for (v, slot) in blocks.iter_mut().enumerate().skip(2) {
            if piece_w.get(v - 2).is_some_and(|&w| w > 0.0) {
                let list = blocks_of_size(class, v)?;
                let w: Vec<f64> = list.iter().map(|(_, w)| *w).collect();
                let gs = list.into_iter().map(|(g, _)| g).collect();
                *slot = Some((gs, WeightedIndex::new(w).map_err(|e| Error::InvalidClass(e.to_string()))?));
            }
        }
        Ok(LabelledModel {
            pieces: Poisson::new(total).map_err(|e| Error::InvalidClass(e.to_string()))?,
            piece_k: WeightedIndex::new(piece_w).map_err(|e| Error::InvalidClass(e.to_string()))?,
            blocks,
            link_k: WeightedIndex::new(link_w).map_err(|e| Error::InvalidClass(e.to_string()))?,
        })
    }

    fn block(&self, v: usize, rng: &mut impl Rng) -> &RootedGraph {
        let (gs, w) = self.blocks[v].as_ref().expect("weights vanish for missing block sizes");
        &gs[w.sample(rng)]
    }

    /// Grows a critical `C•` structure at `at`.
    fn grow(&self, s: &mut Shape, at: usize, rng: &mut impl Rng, budget: &mut usize) -> Step<()> {
        let mut stack = vec![at];
        while let Some(v) = stack.pop() {
            let count = self.pieces.sample(rng) as u64;
            for _ in 0..count {
                let k = self.piece_k.sample(rng) + 1;
                let b = self.block(k + 1, rng);
                let r = rng.random_range(0..=k);
                let mut map = vec![v; k + 1];
                for (u, m) in map.iter_mut().enumerate() {
                    if u != r {
                        *m = new_vertex(s, budget)?;
                        stack.push(*m);
                    }
                }
                s.edges.extend(b.edges().into_iter().map(|(x, y)| (map[x], map[y])));
            }
        }
        Ok(())
    }

    fn link(&self, rng: &mut impl Rng, budget: &mut usize) -> Step<Link> {
        let k = self.link_k.sample(rng);
        let b = self.block(k + 2, rng);
        let n = k + 2;
        let src = rng.random_range(0..n);
        let mut sink = rng.random_range(0..n - 1);
        if sink >= src {
            sink += 1;
        }
        let mut branches = Vec::with_capacity(n);
        for v in 0..n {
            let mut s = Shape::vertex();
            if v != sink {
                charge(budget, 1)?;
                self.grow(&mut s, 0, rng, budget)?;
            }
            branches.push(s);
        }
        Ok(Link::from_shapes(b.with_root(src), sink, branches))
    }
}

/// One root-fixing symmetry of a block, with its non-root cycles.
struct Term {
    block: RootedGraph,
    weight: f64,
    cycles: Vec<Vec<usize>>,
}

struct Level {
    /// Piece term choice at `y = ρ^m`.
    pieces: Option<WeightedIndex<f64>>,
    /// Number of pieces in the multiset that are not repeated.
    single: Option<Poisson<f64>>,
    /// Number of `i`-cycles with `i >= 2`, all `i` together, and the law
    /// of `i` (index `i - 2`).
    repeated: Option<(Poisson<f64>, WeightedIndex<f64>)>,
}

struct UnlabelledModel {
    terms: Vec<Term>,
    /// Index `m` is the level `y = ρ^m`; index 0 is unused.
    levels: Vec<Level>,
    /// `(term, sink)` pairs for the link block.
    link_choices: Vec<(usize, usize)>,
    link_w: WeightedIndex<f64>,
}

impl UnlabelledModel {
    fn new(class: &BlockClass, sing: &SingularityData) -> Result<Self> {
        let max_nonroot = class.bprime_degree().unwrap_or(60).min(MAX_BLOCK_VERTICES - 1);
        let terms: Vec<Term> = class
            .symmetry_terms(max_nonroot)?
            .into_iter()
            .map(|t| Term {
                weight: num_traits::ToPrimitive::to_f64(&t.weight).unwrap_or(0.0),
                cycles: cycles_of(&t.perm, t.block.root()),
                block: t.block,
            })
            .collect();
        let max_cycle = terms
            .iter()
            .flat_map(|t| t.cycles.iter().map(Vec::len))
            .max()
            .unwrap_or(1);
        let series = solve_unlabelled_class::<f64>(class, class.default_order())?;
        // c[m] = C•(ρ^m)
        let top = MAX_LEVEL * max_cycle;
        let mut c = vec![0.0; top + 1];
        c[1] = sing.tau;
        for (m, v) in c.iter_mut().enumerate().skip(2) {
            *v = series.eval_f64(sing.rho.powi(m as i32));
        }
        let c_at = |m: usize| c.get(m).copied().unwrap_or(0.0);
        let mut p_total = vec![0.0; MAX_LEVEL + 1];
        let mut piece_w = Vec::with_capacity(MAX_LEVEL + 1);
        piece_w.push(None);
        for (m, total) in p_total.iter_mut().enumerate().skip(1) {
            let w: Vec<f64> = terms
                .iter()
                .map(|t| t.weight * t.cycles.iter().map(|cy| c_at(m * cy.len())).product::<f64>())
                .collect();
            *total = w.iter().sum();
            piece_w.push(WeightedIndex::new(w).ok());
        }
        let mut levels = Vec::with_capacity(MAX_LEVEL + 1);
        for (m, pieces) in piece_w.into_iter().enumerate() {
            if m == 0 {
                levels.push(Level {
                    pieces,
                    single: None,
                    repeated: None,
                });
                continue;
            }
            let lambda: Vec<f64> = (2..=MAX_LEVEL / m).map(|i| p_total[m * i] / i as f64).collect();
            let repeated = Poisson::new(lambda.iter().sum())
                .ok()
                .zip(WeightedIndex::new(&lambda).ok());
            levels.push(Level {
                pieces,
                single: Poisson::new(p_total[m]).ok(),
                repeated,
            });
        }
        let mut link_choices = Vec::new();
        let mut link_w = Vec::new();
        for (ti, t) in terms.iter().enumerate() {
            for (ci, cy) in t.cycles.iter().enumerate() {
                if cy.len() != 1 {
                    continue;
                }
                let rest: f64 = t
                    .cycles
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != ci)
                    .map(|(_, o)| c_at(o.len()))
                    .product();
                link_choices.push((ti, cy[0]));
                link_w.push(t.weight * rest);
            }
        }
        Ok(UnlabelledModel {
            terms,
            levels,
            link_choices,
            link_w: WeightedIndex::new(link_w).map_err(|e| Error::InvalidClass(e.to_string()))?,
        })
    }

    /// Grows the `C•` structures queued as `(vertex, level)`.
    fn drain(
        &self,
        s: &mut Shape,
        mut stack: Vec<(usize, usize)>,
        rng: &mut impl Rng,
        budget: &mut usize,
    ) -> Step<()> {
        while let Some((v, m)) = stack.pop() {
            if m > MAX_LEVEL {
                continue;
            }
            let level = &self.levels[m];
            if let Some(p) = &level.single {
                for _ in 0..p.sample(rng) as u64 {
                    self.piece_into(s, v, m, rng, budget, &mut stack)?;
                }
            }
            if let Some((p, which)) = &level.repeated {
                for _ in 0..p.sample(rng) as u64 {
                    let i = which.sample(rng) + 2;
                    let mut piece = Shape::vertex();
                    let mut sub = Vec::new();
                    self.piece_into(&mut piece, 0, m * i, rng, budget, &mut sub)?;
                    self.drain(&mut piece, sub, rng, budget)?;
                    charge(budget, (i - 1) * (piece.n - 1))?;
                    for _ in 0..i {
                        s.paste(v, &piece);
                    }
                }
            }
        }
        Ok(())
    }

    /// A piece at level `m` rooted at `at`; fixed points are queued.
    fn piece_into(
        &self,
        s: &mut Shape,
        at: usize,
        m: usize,
        rng: &mut impl Rng,
        budget: &mut usize,
        stack: &mut Vec<(usize, usize)>,
    ) -> Step<()> {
        let Some(w) = &self.levels[m].pieces else {
            return Ok(());
        };
        let t = &self.terms[w.sample(rng)];
        let root = t.block.root();
        let mut map = vec![at; t.block.n()];
        for (u, slot) in map.iter_mut().enumerate() {
            if u != root {
                *slot = new_vertex(s, budget)?;
            }
        }
        s.edges.extend(t.block.edges().into_iter().map(|(x, y)| (map[x], map[y])));
        for cy in &t.cycles {
            let l = cy.len();
            if l == 1 {
                stack.push((map[cy[0]], m));
            } else {
                let br = self.member(m * l, rng, budget)?;
                charge(budget, (l - 1) * (br.n - 1))?;
                for &u in cy {
                    s.paste(map[u], &br);
                }
            }
        }
        Ok(())
    }

    fn member(&self, m: usize, rng: &mut impl Rng, budget: &mut usize) -> Step<Shape> {
        let mut s = Shape::vertex();
        self.drain(&mut s, vec![(0, m)], rng, budget)?;
        Ok(s)
    }

    fn link(&self, rng: &mut impl Rng, budget: &mut usize) -> Step<Link> {
        let (ti, sink) = self.link_choices[self.link_w.sample(rng)];
        let t = &self.terms[ti];
        let n = t.block.n();
        let mut branches = vec![Shape::vertex(); n];
        charge(budget, 1)?;
        branches[t.block.root()] = self.member(1, rng, budget)?;
        for cy in &t.cycles {
            if cy == &[sink] {
                continue;
            }
            charge(budget, cy.len())?;
            let br = self.member(cy.len(), rng, budget)?;
            charge(budget, (cy.len() - 1) * (br.n - 1))?;
            for &u in cy {
                branches[u] = br.clone();
            }
        }
        Ok(Link::from_shapes(t.block.clone(), sink, branches))
    }
}

/// Independent links drawn from `p_L` (labelled classes) or `q_L`
/// (unlabelled classes), conditioned on `|L| <= M`. `M` is chosen so that
/// the discarded mass is about `ε`, from the tail `κ m^(-3/2)` of the link
/// size law: `M = ceil((2κ/ε)^2)`.
pub struct ChainSampler {
    model: Model,
    mode: ChainMode,
    cap: usize,
    epsilon: f64,
    kappa: f64,
    rng: ChaCha8Rng,
}

impl ChainSampler {
    pub fn new(class: &BlockClass, sing: &SingularityData, epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::MassCutoff(format!("ε = {epsilon} must lie in (0, 1)")));
        }
        if !class.has_block_generator() {
            return Err(Error::NoBlockGenerator(class.name().to_string()));
        }
        let kappa = link_tail_constant(class, sing, class.default_order())?;
        let cap = (2.0 * kappa / epsilon).powi(2).ceil();
        if cap > MAX_LINK_SIZE as f64 {
            return Err(Error::MassCutoff(format!(
                "ε = {epsilon} needs links up to size {cap:.0}, above the supported {MAX_LINK_SIZE}; use a larger ε"
            )));
        }
        let (model, mode) = match class.kind() {
            ClassKind::Labelled => (Model::Labelled(LabelledModel::new(class, sing)?), ChainMode::Labelled),
            ClassKind::Unlabelled => (
                Model::Unlabelled(UnlabelledModel::new(class, sing)?),
                ChainMode::UnlabelledRooted,
            ),
        };
        Ok(ChainSampler {
            model,
            mode,
            cap: cap as usize,
            epsilon,
            kappa,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn mode(&self) -> ChainMode {
        self.mode
    }

    /// The size cap `M`.
    pub fn size_cap(&self) -> usize {
        self.cap
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `κ` in `P(|L| = m) ~ κ m^(-3/2)`.
    pub fn tail_constant(&self) -> f64 {
        self.kappa
    }

    /// Total variation bound for `k` links against the untruncated measure.
    pub fn bias_bound(&self, k: usize) -> f64 {
        self.epsilon * k as f64
    }

    pub fn next_link(&mut self) -> Link {
        loop {
            let mut budget = self.cap;
            let drawn = match &self.model {
                Model::Labelled(m) => m.link(&mut self.rng, &mut budget),
                Model::Unlabelled(m) => m.link(&mut self.rng, &mut budget),
            };
            if let Ok(l) = drawn {
                return l;
            }
        }
    }

    /// The next `k` links, joined into a chain.
    pub fn sample(&mut self, k: usize) -> ChainPrefix {
        ChainPrefix::new((0..k).map(|_| self.next_link()).collect())
    }
}

/// `k` links of the limiting chain of `class` in the given mode.
pub fn sample_limit_chain(
    class: &BlockClass,
    sing: &SingularityData,
    k: usize,
    mode: ChainMode,
    seed: u64,
    epsilon: f64,
) -> Result<ChainPrefix> {
    let expected = match class.kind() {
        ClassKind::Labelled => ChainMode::Labelled,
        ClassKind::Unlabelled => ChainMode::UnlabelledRooted,
    };
    if mode != expected {
        return Err(Error::WrongKind(
            class.name().to_string(),
            class.kind().as_str(),
            match mode {
                ChainMode::Labelled => "labelled",
                ChainMode::UnlabelledRooted => "unlabelled",
            },
        ));
    }
    Ok(ChainSampler::new(class, sing, epsilon, seed)?.sample(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::find_singularity;

    fn setup(name: &str) -> (BlockClass, SingularityData) {
        let c = BlockClass::builtin(name).unwrap();
        let s = find_singularity(&c, c.default_order(), 1e-9).unwrap();
        (c, s)
    }

    #[test]
    fn empty_chain_is_a_vertex() {
        let (c, s) = setup("trees_labelled");
        let ch = sample_limit_chain(&c, &s, 0, ChainMode::Labelled, 1, 1e-2).unwrap();
        assert_eq!(ch.graph().n(), 1);
        assert!(sample_limit_chain(&c, &s, 1, ChainMode::UnlabelledRooted, 1, 1e-2).is_err());
    }

    #[test]
    fn prefixes_are_consistent() {
        for name in ["trees_labelled", "cacti_labelled", "blockgraphs_labelled", "trees_unlabelled", "cacti_unlabelled"] {
            let (c, s) = setup(name);
            let mut a = ChainSampler::new(&c, &s, 1e-2, 9).unwrap();
            let mut b = ChainSampler::new(&c, &s, 1e-2, 9).unwrap();
            let short = a.sample(3);
            let long = b.sample(4);
            for (x, y) in short.links().iter().zip(long.links()) {
                assert_eq!(x.pinned_code(), y.pinned_code(), "{name}");
            }
            for l in long.links() {
                assert!(l.size() <= b.size_cap());
                assert!(crate::enumerate::is_class_member(l.graph(), &c).unwrap());
            }
        }
    }

    #[test]
    fn link_weights_have_unit_mass() {
        for name in ["trees_unlabelled", "cacti_unlabelled"] {
            let (c, s) = setup(name);
            let m = UnlabelledModel::new(&c, &s).unwrap();
            assert!((m.link_w.total_weight() * s.tau - 1.0).abs() < 1e-6, "{name}");
        }
        for name in ["trees_labelled", "cacti_labelled", "blockgraphs_labelled"] {
            let (c, s) = setup(name);
            let m = LabelledModel::new(&c, &s).unwrap();
            assert!((m.link_k.total_weight() - 1.0).abs() < 1e-6, "{name}");
        }
    }

    #[test]
    fn tiny_epsilon_is_refused() {
        let (c, s) = setup("trees_labelled");
        assert!(matches!(ChainSampler::new(&c, &s, 1e-6, 0), Err(Error::MassCutoff(_))));
    }
}
