use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::trees::prufer_decode;
use crate::canon::automorphism_group_order;
use std::collections::HashMap;

use crate::classes::{BlockClass, BlockFamily, ClassKind, SymmetryTerm};
use crate::error::{Error, Result};
use crate::graph::RootedGraph;
use crate::scalar::Scalar;
use crate::series::{find_singularity, scaled_substitution, solve_class_scaled, TruncatedSeries};

/// Above this size the coefficient tables are rescaled by `ρ^n`.
const UNSCALED_LIMIT: usize = 150;

/// A rooted graph under construction: vertex 0 is the root.
#[derive(Clone, Debug, Default)]
pub(crate) struct Shape {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Shape {
    pub fn vertex() -> Self {
        Shape { n: 1, edges: Vec::new() }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    /// Copies `other` in, identifying its root with `at`.
    pub fn paste(&mut self, at: usize, other: &Shape) {
        let base = self.n - 1;
        let map = |v: usize| if v == 0 { at } else { base + v };
        self.edges.extend(other.edges.iter().map(|&(u, v)| (map(u), map(v))));
        self.n += other.n - 1;
    }

    pub fn into_graph(self) -> RootedGraph {
        RootedGraph::new(self.n, 0, &self.edges).expect("shapes are simple graphs")
    }
}

fn pick(weights: &[f64], rng: &mut impl Rng) -> usize {
    WeightedIndex::new(weights)
        .expect("a positive weight exists")
        .sample(rng)
}

/// Blocks on `v` vertices with weight `1/|Aut|`.
pub(crate) fn blocks_of_size(class: &BlockClass, v: usize) -> Result<Vec<(RootedGraph, f64)>> {
    Ok(match class.family() {
        BlockFamily::Trees => (v == 2).then(|| (RootedGraph::complete(2), 1.0)).into_iter().collect(),
        BlockFamily::Cacti => match v {
            2 => vec![(RootedGraph::complete(2), 1.0)],
            v if v >= 3 => vec![(RootedGraph::cycle(v), 1.0)],
            _ => vec![],
        },
        BlockFamily::BlockGraphs => (v >= 2).then(|| (RootedGraph::complete(v), 1.0)).into_iter().collect(),
        _ => class
            .blocks(v)?
            .into_iter()
            .filter(|b| b.n() == v)
            .map(|b| {
                let aut = automorphism_group_order(&b, &vec![0; v]) as f64;
                (b, 1.0 / aut)
            })
            .collect(),
    })
}

/// Exactly uniform sampler of rooted members of a class with at most
/// `max_n` vertices, by the recursive method over coefficient tables.
pub struct UniformSampler {
    class: BlockClass,
    max_n: usize,
    tables: Tables,
}

enum Tables {
    LabelledTrees,
    Labelled(LabelledTables),
    Unlabelled(UnlabelledTables),
}

struct LabelledTables {
    c: Vec<f64>,
    /// `pow[k][j] = [z^j] C•^k`.
    pow: Vec<Vec<f64>>,
    /// Derived-block coefficients `[y^k] B'`.
    b: Vec<f64>,
    p: Vec<f64>,
    e: Vec<f64>,
    blocks: Vec<Vec<(RootedGraph, f64)>>,
}

struct UnlabelledTables {
    scale: f64,
    /// `subs[l][j] = [z^j] C•(z^l)`, scaled.
    subs: Vec<TruncatedSeries<f64>>,
    terms: Vec<(SymmetryTerm, f64, Vec<f64>)>,
    p: Vec<f64>,
    m: Vec<f64>,
}

fn scale_for(class: &BlockClass, max_n: usize) -> Result<f64> {
    if max_n <= UNSCALED_LIMIT {
        return Ok(1.0);
    }
    Ok(find_singularity(class, class.default_order(), 1e-6)?.rho)
}

impl UniformSampler {
    pub fn new(class: &BlockClass, max_n: usize) -> Result<Self> {
        if max_n == 0 {
            return Err(Error::SizeBound { size: 0, bound: 1 });
        }
        class.check_order(max_n)?;
        let tables = match class.kind() {
            ClassKind::Labelled if class.is_trees() => Tables::LabelledTrees,
            ClassKind::Labelled => Tables::Labelled(Self::labelled_tables(class, max_n)?),
            ClassKind::Unlabelled => Tables::Unlabelled(Self::unlabelled_tables(class, max_n)?),
        };
        Ok(UniformSampler {
            class: class.clone(),
            max_n,
            tables,
        })
    }

    fn labelled_tables(class: &BlockClass, n: usize) -> Result<LabelledTables> {
        if !class.has_block_generator() {
            return Err(Error::NoBlockGenerator(class.name().to_string()));
        }
        let scale = scale_for(class, n)?;
        let c = solve_class_scaled(class, n, scale)?;
        let mut pow = vec![TruncatedSeries::<f64>::one(n)];
        for k in 1..=n {
            pow.push(pow[k - 1].mul_to(&c, n));
        }
        let b: Vec<f64> = (0..=n).map(|k| class.bprime_coeff(k).to_f64()).collect();
        let mut p = vec![0.0; n + 1];
        for (k, bk) in b.iter().enumerate().skip(1) {
            if *bk != 0.0 {
                for (j, pj) in p.iter_mut().enumerate() {
                    *pj += bk * pow[k].coeff(j);
                }
            }
        }
        let e = TruncatedSeries::from_coeffs(p.clone()).exp()?.into_coeffs();
        let blocks = (0..=n + 1).map(|v| blocks_of_size(class, v)).collect::<Result<_>>()?;
        Ok(LabelledTables {
            c: c.into_coeffs(),
            pow: pow.into_iter().map(|s| s.into_coeffs()).collect(),
            b,
            p,
            e,
            blocks,
        })
    }

    fn unlabelled_tables(class: &BlockClass, n: usize) -> Result<UnlabelledTables> {
        let scale = scale_for(class, n)?;
        let c = solve_class_scaled(class, n, scale)?;
        let subs: Vec<TruncatedSeries<f64>> = (0..=n)
            .map(|l| {
                if l == 0 {
                    TruncatedSeries::zero(n)
                } else {
                    scaled_substitution(&c, l, n, &scale)
                }
            })
            .collect();
        let mut terms = Vec::new();
        let mut p = vec![0.0; n + 1];
        let mut powers: HashMap<(usize, u32), TruncatedSeries<f64>> = HashMap::new();
        for t in class.symmetry_terms(n)? {
            if t.monomial.weight() > n {
                continue;
            }
            let mut acc = TruncatedSeries::<f64>::one(n);
            for (i, &e) in t.monomial.exponents().iter().enumerate() {
                if e > 0 {
                    let f = power(&mut powers, &subs[i + 1], i + 1, e, n);
                    acc = acc.mul_to(f, n);
                }
            }
            let prod = acc.into_coeffs();
            let w = t.weight.to_f64();
            for (j, pj) in p.iter_mut().enumerate() {
                *pj += w * prod[j];
            }
            terms.push((t, w, prod));
        }
        let mut log_m = TruncatedSeries::<f64>::zero(n);
        let pser = TruncatedSeries::from_coeffs(p.clone());
        for i in 1..=n {
            let pi = scaled_substitution(&pser, i, n, &scale).scale(&(1.0 / i as f64));
            log_m = &log_m + &pi;
        }
        let m = log_m.exp()?.into_coeffs();
        Ok(UnlabelledTables {
            scale,
            subs,
            terms,
            p,
            m,
        })
    }

    pub fn class(&self) -> &BlockClass {
        &self.class
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// A uniform rooted member on `n` vertices (labelled: uniform over the
    /// `n!·[z^n]C•` labelled rooted graphs; unlabelled: uniform over
    /// isomorphism types).
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> Result<RootedGraph> {
        if n == 0 || n > self.max_n {
            return Err(Error::OrderTooHigh {
                requested: n,
                available: self.max_n,
            });
        }
        Ok(match &self.tables {
            Tables::LabelledTrees => sample_labelled_tree(n, rng),
            Tables::Labelled(t) => {
                let shape = t.member(n, rng);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(rng);
                shape.into_graph().relabel(&perm)
            }
            Tables::Unlabelled(t) => t.member(n, rng).into_graph(),
        })
    }
}

/// Uniform rooted labelled tree on `0..n`: a random Prüfer sequence and a
/// random root.
pub fn sample_labelled_tree(n: usize, rng: &mut impl Rng) -> RootedGraph {
    if n == 1 {
        return RootedGraph::single_vertex();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    prufer_decode(&seq, n).with_root(rng.random_range(0..n))
}

impl LabelledTables {
    fn member(&self, n: usize, rng: &mut impl Rng) -> Shape {
        let mut s = Shape::vertex();
        self.set_at(&mut s, 0, n - 1, rng);
        s
    }

    fn set_at(&self, s: &mut Shape, root: usize, mut left: usize, rng: &mut impl Rng) {
        while left > 0 {
            let w: Vec<f64> = (1..=left).map(|j| j as f64 * self.p[j] * self.e[left - j]).collect();
            let j = pick(&w, rng) + 1;
            self.piece_at(s, root, j, rng);
            left -= j;
        }
    }

    fn piece_at(&self, s: &mut Shape, root: usize, j: usize, rng: &mut impl Rng) {
        let w: Vec<f64> = (1..=j).map(|k| self.b[k] * self.pow[k][j]).collect();
        let k = pick(&w, rng) + 1;
        // branch sizes, one per non-root block vertex
        let mut sizes = Vec::with_capacity(k);
        let mut left = j;
        for i in 0..k {
            let rest = k - i - 1;
            let w: Vec<f64> = (1..=left).map(|a| self.c[a] * self.pow[rest][left - a]).collect();
            let a = pick(&w, rng) + 1;
            sizes.push(a);
            left -= a;
        }
        let options = &self.blocks[k + 1];
        let weights: Vec<f64> = options.iter().map(|(_, w)| *w).collect();
        let block = &options[pick(&weights, rng)].0;
        let r = rng.random_range(0..=k);
        let mut others: Vec<usize> = (0..=k).filter(|&v| v != r).collect();
        others.shuffle(rng);
        let mut map = vec![root; k + 1];
        for &v in &others {
            map[v] = s.add_vertex();
        }
        s.edges.extend(block.edges().into_iter().map(|(u, v)| (map[u], map[v])));
        for (&v, &a) in others.iter().zip(&sizes) {
            self.set_at(s, map[v], a - 1, rng);
        }
    }
}

impl UnlabelledTables {
    fn member(&self, n: usize, rng: &mut impl Rng) -> Shape {
        let mut s = Shape::vertex();
        let mut left = n - 1;
        while left > 0 {
            let mut choices = Vec::new();
            let mut w = Vec::new();
            for k in 1..=left {
                for d in (1..=k).filter(|d| k % d == 0) {
                    let x = d as f64 * self.p[d] * self.scale.powi((k - d) as i32) * self.m[left - k];
                    if x > 0.0 {
                        choices.push((k, d));
                        w.push(x);
                    }
                }
            }
            let (k, d) = choices[pick(&w, rng)];
            let piece = self.piece(d, rng);
            for _ in 0..k / d {
                s.paste(0, &piece);
            }
            left -= k;
        }
        s
    }

    /// A uniform piece (root in a single block) with `d` non-root vertices.
    fn piece(&self, d: usize, rng: &mut impl Rng) -> Shape {
        let w: Vec<f64> = self
            .terms
            .iter()
            .map(|(_, wt, prod)| wt * prod.get(d).copied().unwrap_or(0.0))
            .collect();
        let term = &self.terms[pick(&w, rng)].0;
        let root = term.block.root();
        let cycles = cycles_of(&term.perm, root);
        // suffix[i]: product of C•(z^l) over cycles i.. (scaled), to order d
        let mut suffix = vec![TruncatedSeries::<f64>::one(d); cycles.len() + 1];
        for i in (0..cycles.len()).rev() {
            let f = self.subs[cycles[i].len()].truncate(d);
            suffix[i] = suffix[i + 1].mul_to(&f, d);
        }
        let mut s = Shape::vertex();
        let mut map = vec![0usize; term.block.n()];
        for v in (0..term.block.n()).filter(|&v| v != root) {
            map[v] = s.add_vertex();
        }
        s.edges.extend(term.block.edges().into_iter().map(|(u, v)| (map[u], map[v])));
        let mut left = d;
        for (i, cyc) in cycles.iter().enumerate() {
            let l = cyc.len();
            let opts: Vec<usize> = (1..=left / l).collect();
            let w: Vec<f64> = opts
                .iter()
                .map(|&a| self.subs[l].coeff(l * a) * suffix[i + 1].coeff(left - l * a))
                .collect();
            let a = opts[pick(&w, rng)];
            left -= l * a;
            let branch = self.member(a, rng);
            for &v in cyc {
                s.paste(map[v], &branch);
            }
        }
        debug_assert_eq!(left, 0);
        s
    }
}

fn power<'a>(
    cache: &'a mut HashMap<(usize, u32), TruncatedSeries<f64>>,
    base: &TruncatedSeries<f64>,
    l: usize,
    e: u32,
    n: usize,
) -> &'a TruncatedSeries<f64> {
    if !cache.contains_key(&(l, e)) {
        let v = if e == 1 {
            base.clone()
        } else {
            let prev = power(cache, base, l, e - 1, n).clone();
            prev.mul_to(base, n)
        };
        cache.insert((l, e), v);
    }
    &cache[&(l, e)]
}

/// Cycles of `perm` on all points except `fixed`.
pub(crate) fn cycles_of(perm: &[usize], fixed: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    seen[fixed] = true;
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut cyc = vec![s];
        seen[s] = true;
        let mut x = perm[s];
        while x != s {
            seen[x] = true;
            cyc.push(x);
            x = perm[x];
        }
        out.push(cyc);
    }
    out
}

/// One uniform rooted member of `class` on `n` vertices.
pub fn sample_uniform_rooted(class: &BlockClass, n: usize, seed: u64) -> Result<RootedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    UniformSampler::new(class, n)?.sample(n, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::rooted_code;

    #[test]
    fn single_vertex_and_determinism() {
        for name in crate::classes::BUILTIN_NAMES {
            let class = BlockClass::builtin(name).unwrap();
            assert_eq!(sample_uniform_rooted(&class, 1, 3).unwrap().n(), 1);
            let a = sample_uniform_rooted(&class, 12, 7).unwrap();
            let b = sample_uniform_rooted(&class, 12, 7).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.n(), 12);
            assert!(crate::enumerate::is_class_member(&a, &class).unwrap(), "{name}");
        }
    }

    #[test]
    fn large_unlabelled_sizes_are_rescaled() {
        let class = BlockClass::builtin("cacti_unlabelled").unwrap();
        let s = UniformSampler::new(&class, 200).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = s.sample(200, &mut rng).unwrap();
        assert_eq!(g.n(), 200);
        assert!(g.is_connected());
    }

    #[test]
    fn every_rooted_tree_shape_appears() {
        let class = BlockClass::builtin("trees_unlabelled").unwrap();
        let s = UniformSampler::new(&class, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let codes: std::collections::HashSet<_> =
            (0..400).map(|_| rooted_code(&s.sample(5, &mut rng).unwrap())).collect();
        assert_eq!(codes.len(), 9);
    }
}
