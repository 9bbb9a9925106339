//! Block-stable graph classes: built-ins and plug-ins.
//!
//! A class is described by its blocks. Labelled classes carry the exponential
//! generating function `B'(y)` of derived blocks (one vertex distinguished and
//! unlabelled); unlabelled classes carry the cycle index `Z_{B'}` of the same
//! derived class.

mod cycle_index;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

pub use cycle_index::{CycleIndex, Monomial};

use crate::canon::{automorphism_group_order, automorphisms, canonical_unrooted, vertex_orbits};
use crate::error::{Error, Result};
use crate::graph::RootedGraph;
use crate::scalar::{parse_rational, ratio, Scalar};
use crate::series::TruncatedSeries;

pub const BUILTIN_NAMES: [&str; 5] = [
    "trees_labelled",
    "cacti_labelled",
    "blockgraphs_labelled",
    "trees_unlabelled",
    "cacti_unlabelled",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassKind {
    Labelled,
    Unlabelled,
}

impl ClassKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassKind::Labelled => "labelled",
            ClassKind::Unlabelled => "unlabelled",
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which 2-connected graphs (plus `K_2`) the class admits.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockFamily {
    /// `K_2` only.
    Trees,
    /// `K_2` and all cycles.
    Cacti,
    /// All complete graphs.
    BlockGraphs,
    /// Only the coefficients of `B'` are known.
    CustomLabelled(Vec<BigRational>),
    /// An explicit finite list of blocks, pairwise non-isomorphic.
    CustomUnlabelled(Vec<RootedGraph>),
}

/// One element of a root stabiliser of a block, with its Burnside weight.
///
/// Summing `weight · monomial` over all terms gives `Z_{B'}`.
#[derive(Clone, Debug)]
pub struct SymmetryTerm {
    /// The block, rooted at the distinguished vertex.
    pub block: RootedGraph,
    /// A root-fixing automorphism of `block`.
    pub perm: Vec<usize>,
    /// `1 / |stabiliser|`.
    pub weight: BigRational,
    /// Cycle type of `perm` on the non-root vertices.
    pub monomial: Monomial,
}

/// A block-stable class containing `K_2`.
#[derive(Clone, Debug)]
pub struct BlockClass {
    name: String,
    kind: ClassKind,
    family: BlockFamily,
    valid_order: Option<usize>,
}

impl BlockClass {
    pub fn builtin(name: &str) -> Result<Self> {
        let (kind, family) = match name {
            "trees_labelled" => (ClassKind::Labelled, BlockFamily::Trees),
            "cacti_labelled" => (ClassKind::Labelled, BlockFamily::Cacti),
            "blockgraphs_labelled" => (ClassKind::Labelled, BlockFamily::BlockGraphs),
            "trees_unlabelled" => (ClassKind::Unlabelled, BlockFamily::Trees),
            "cacti_unlabelled" => (ClassKind::Unlabelled, BlockFamily::Cacti),
            _ => return Err(Error::UnknownClass(name.to_string())),
        };
        Ok(BlockClass {
            name: name.to_string(),
            kind,
            family,
            valid_order: None,
        })
    }

    /// Labelled class from the coefficients of `B'(y)`, taken as an exact
    /// polynomial unless `valid_order` limits it.
    pub fn custom_labelled(bprime: Vec<BigRational>, valid_order: Option<usize>) -> Result<Self> {
        if bprime.first().is_some_and(|c| !c.is_zero()) {
            return Err(Error::InvalidClass("B'(0) must be 0".into()));
        }
        if bprime.get(1) != Some(&BigRational::one()) {
            return Err(Error::InvalidClass(
                "the coefficient of y in B' must be 1 (K2 belongs to every class)".into(),
            ));
        }
        if bprime.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidClass("B' has a negative coefficient".into()));
        }
        if let Some(o) = valid_order {
            if o + 1 < bprime.len() {
                return Err(Error::InvalidClass(format!(
                    "order {o} is below the {} supplied coefficients",
                    bprime.len()
                )));
            }
        }
        Ok(BlockClass {
            name: "custom_labelled".into(),
            kind: ClassKind::Labelled,
            family: BlockFamily::CustomLabelled(bprime),
            valid_order,
        })
    }

    /// Unlabelled class from an explicit block list. `valid_order` bounds the
    /// series order if the list is a truncation of an infinite family.
    pub fn custom_unlabelled(blocks: Vec<RootedGraph>, valid_order: Option<usize>) -> Result<Self> {
        let mut codes = Vec::new();
        for b in &blocks {
            if !b.is_block() {
                return Err(Error::NotBiconnected);
            }
            let c = canonical_unrooted(b);
            if codes.contains(&c) {
                return Err(Error::InvalidClass("blocks must be pairwise non-isomorphic".into()));
            }
            codes.push(c);
        }
        if !blocks.iter().any(|b| b.n() == 2) {
            return Err(Error::InvalidClass("K2 must be among the blocks".into()));
        }
        Ok(BlockClass {
            name: "custom_unlabelled".into(),
            kind: ClassKind::Unlabelled,
            family: BlockFamily::CustomUnlabelled(blocks),
            valid_order,
        })
    }

    /// Loads `{"kind": ..., "bprime": ["p/q", ...]}` or
    /// `{"kind": ..., "blocks": [{"n", "root", "edges"}, ...]}`; an optional
    /// `"order"` marks truncated data and `"name"` renames the class.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            kind: Option<String>,
            name: Option<String>,
            bprime: Option<Vec<String>>,
            blocks: Option<Vec<RootedGraph>>,
            order: Option<usize>,
        }
        let doc: Doc = serde_json::from_str(text)?;
        let mut class = match (doc.bprime, doc.blocks) {
            (Some(b), None) => {
                if doc.kind.as_deref().is_some_and(|k| k != "labelled") {
                    return Err(Error::InvalidClass("\"bprime\" describes a labelled class".into()));
                }
                let coeffs = b
                    .iter()
                    .map(|s| {
                        parse_rational(s).ok_or_else(|| Error::InvalidClass(format!("bad rational `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::custom_labelled(coeffs, doc.order)?
            }
            (None, Some(blocks)) => match doc.kind.as_deref() {
                None | Some("unlabelled") => Self::custom_unlabelled(blocks, doc.order)?,
                Some("labelled") => {
                    let u = Self::custom_unlabelled(blocks, doc.order)?;
                    BlockClass {
                        kind: ClassKind::Labelled,
                        name: "custom_labelled".into(),
                        ..u
                    }
                }
                Some(k) => return Err(Error::InvalidClass(format!("unknown kind `{k}`"))),
            },
            _ => {
                return Err(Error::InvalidClass(
                    "exactly one of \"bprime\" and \"blocks\" is required".into(),
                ))
            }
        };
        if let Some(n) = doc.name {
            class.name = n;
        }
        Ok(class)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ClassKind {
        self.kind
    }

    pub fn family(&self) -> &BlockFamily {
        &self.family
    }

    pub fn valid_order(&self) -> Option<usize> {
        self.valid_order
    }

    pub fn is_trees(&self) -> bool {
        matches!(self.family, BlockFamily::Trees)
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(
            self.family,
            BlockFamily::CustomLabelled(_) | BlockFamily::CustomUnlabelled(_)
        )
    }

    /// Truncation order used when the caller does not choose one.
    pub fn default_order(&self) -> usize {
        match self.family {
            BlockFamily::Trees => 200,
            _ => 120,
        }
    }

    pub fn require_kind(&self, kind: ClassKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::WrongKind(self.name.clone(), self.kind.as_str(), kind.as_str()))
        }
    }

    /// The same blocks, counted the other way.
    pub fn with_kind(&self, kind: ClassKind) -> Result<Self> {
        if matches!(self.family, BlockFamily::CustomLabelled(_)) && kind == ClassKind::Unlabelled {
            return Err(Error::NoBlockGenerator(self.name.clone()));
        }
        let name = match self.is_builtin() {
            true => format!("{}_{}", self.name.rsplit_once('_').map_or(&*self.name, |p| p.0), kind),
            false => self.name.clone(),
        };
        Ok(BlockClass {
            name,
            kind,
            ..self.clone()
        })
    }

    pub fn check_order(&self, order: usize) -> Result<()> {
        match self.valid_order {
            Some(a) if order > a => Err(Error::OrderTooHigh {
                requested: order,
                available: a,
            }),
            _ => Ok(()),
        }
    }

    /// `[y^k] B'(y)` as an exact rational.
    pub fn bprime_coeff(&self, k: usize) -> BigRational {
        match &self.family {
            BlockFamily::Trees => {
                if k == 1 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
            BlockFamily::Cacti => match k {
                0 => BigRational::zero(),
                1 => BigRational::one(),
                _ => ratio(1, 2),
            },
            BlockFamily::BlockGraphs => {
                if k == 0 {
                    BigRational::zero()
                } else {
                    let mut f = BigRational::one();
                    for i in 2..=k {
                        f /= BigRational::from_integer(i.into());
                    }
                    f
                }
            }
            BlockFamily::CustomLabelled(c) => c.get(k).cloned().unwrap_or_else(BigRational::zero),
            BlockFamily::CustomUnlabelled(blocks) => {
                // B(y) = Σ y^|B| / |Aut B|, so [y^k] B' = Σ_{|B| = k+1} (k+1) / |Aut B|
                let mut s = BigRational::zero();
                for b in blocks.iter().filter(|b| b.n() == k + 1) {
                    let aut = automorphism_group_order(b, &vec![0; b.n()]);
                    s += BigRational::new((k + 1).into(), aut.into());
                }
                s
            }
        }
    }

    /// `B'(y)` to `order`.
    pub fn bprime<T: Scalar>(&self, order: usize) -> Result<TruncatedSeries<T>> {
        self.check_order(order)?;
        Ok(TruncatedSeries::from_coeffs(
            (0..=order).map(|k| T::from_rational(&self.bprime_coeff(k))).collect(),
        ))
    }

    /// `B''(y)` to `order`.
    pub fn bdoubleprime<T: Scalar>(&self, order: usize) -> Result<TruncatedSeries<T>> {
        self.check_order(order + 1)?;
        Ok(TruncatedSeries::from_coeffs(
            (0..=order)
                .map(|k| T::from_rational(&(self.bprime_coeff(k + 1) * BigRational::from_integer((k + 1).into()))))
                .collect(),
        ))
    }

    /// Largest `k` with nonzero `[y^k] B'`, or `None` for infinite families.
    pub fn bprime_degree(&self) -> Option<usize> {
        match &self.family {
            BlockFamily::Trees => Some(1),
            BlockFamily::Cacti | BlockFamily::BlockGraphs => None,
            BlockFamily::CustomLabelled(c) => {
                if self.valid_order.is_some() {
                    None
                } else {
                    c.iter().rposition(|x| !x.is_zero())
                }
            }
            BlockFamily::CustomUnlabelled(b) => {
                if self.valid_order.is_some() {
                    None
                } else {
                    b.iter().map(|g| g.n() - 1).max()
                }
            }
        }
    }

    /// Root-fixing symmetries of all derived blocks with at most
    /// `max_nonroot` non-root vertices.
    pub fn symmetry_terms(&self, max_nonroot: usize) -> Result<Vec<SymmetryTerm>> {
        let mut out = Vec::new();
        match &self.family {
            BlockFamily::Cacti => {
                if max_nonroot >= 1 {
                    out.extend(derived_symmetries(&RootedGraph::complete(2)));
                }
                for k in 3..=max_nonroot + 1 {
                    let c = RootedGraph::cycle(k);
                    let mut refl = vec![0; k];
                    for (i, r) in refl.iter_mut().enumerate() {
                        *r = (k - i) % k;
                    }
                    let support: Vec<usize> = (1..k).collect();
                    for perm in [(0..k).collect::<Vec<_>>(), refl] {
                        out.push(SymmetryTerm {
                            monomial: Monomial::cycle_type(&perm, &support),
                            block: c.clone(),
                            perm,
                            weight: ratio(1, 2),
                        });
                    }
                }
            }
            _ => {
                for b in self.blocks(max_nonroot + 1)? {
                    let orbits = vertex_orbits(&b, &vec![0; b.n()]);
                    let mut seen = Vec::new();
                    for v in 0..b.n() {
                        if seen.contains(&orbits[v]) {
                            continue;
                        }
                        seen.push(orbits[v]);
                        out.extend(derived_symmetries(&b.with_root(v)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `Z_{B'}` restricted to monomials of weight at most `max_weight`.
    pub fn z_bprime(&self, max_weight: usize) -> Result<CycleIndex> {
        self.require_kind(ClassKind::Unlabelled)?;
        self.check_order(max_weight)?;
        let mut z = CycleIndex::new();
        match &self.family {
            BlockFamily::Trees => z.add_term(Monomial::new(vec![1]), BigRational::one()),
            BlockFamily::Cacti => {
                if max_weight >= 1 {
                    z.add_term(Monomial::new(vec![1]), BigRational::one());
                }
                for k in 3..=max_weight + 1 {
                    z.add_term(Monomial::new(vec![(k - 1) as u32]), ratio(1, 2));
                    let m = if k % 2 == 0 {
                        vec![1, ((k - 2) / 2) as u32]
                    } else {
                        vec![0, ((k - 1) / 2) as u32]
                    };
                    z.add_term(Monomial::new(m), ratio(1, 2));
                }
            }
            _ => {
                for t in self.symmetry_terms(max_weight)? {
                    z.add_term(t.monomial, t.weight);
                }
            }
        }
        Ok(z.truncate_weight(max_weight))
    }

    /// `Z_{B''} = ∂Z_{B'}/∂s_1`, to weight `max_weight`.
    pub fn z_bdoubleprime(&self, max_weight: usize) -> Result<CycleIndex> {
        self.check_order(max_weight + 1)?;
        Ok(self.z_bprime(max_weight + 1)?.partial(1))
    }

    /// Unlabelled representatives of the blocks on at most `max_vertices`
    /// vertices, rooted at vertex 0.
    pub fn blocks(&self, max_vertices: usize) -> Result<Vec<RootedGraph>> {
        Ok(match &self.family {
            BlockFamily::Trees => {
                if max_vertices >= 2 {
                    vec![RootedGraph::complete(2)]
                } else {
                    vec![]
                }
            }
            BlockFamily::Cacti => {
                let mut v = Vec::new();
                if max_vertices >= 2 {
                    v.push(RootedGraph::complete(2));
                }
                v.extend((3..=max_vertices).map(RootedGraph::cycle));
                v
            }
            BlockFamily::BlockGraphs => (2..=max_vertices).map(RootedGraph::complete).collect(),
            BlockFamily::CustomUnlabelled(b) => b.iter().filter(|g| g.n() <= max_vertices).cloned().collect(),
            BlockFamily::CustomLabelled(_) => return Err(Error::NoBlockGenerator(self.name.clone())),
        })
    }

    pub fn has_block_generator(&self) -> bool {
        !matches!(self.family, BlockFamily::CustomLabelled(_))
    }

    /// Whether `b` (2-connected or `K_2`) is a block of the class.
    pub fn contains_block(&self, b: &RootedGraph) -> Result<bool> {
        Ok(match &self.family {
            BlockFamily::Trees => b.n() == 2,
            BlockFamily::Cacti => b.n() == 2 || b.is_cycle(),
            BlockFamily::BlockGraphs => b.is_complete(),
            BlockFamily::CustomUnlabelled(list) => {
                let c = canonical_unrooted(b);
                list.iter().any(|g| g.n() == b.n() && canonical_unrooted(g) == c)
            }
            BlockFamily::CustomLabelled(_) => return Err(Error::NoBlockGenerator(self.name.clone())),
        })
    }
}

fn derived_symmetries(rooted: &RootedGraph) -> Vec<SymmetryTerm> {
    let n = rooted.n();
    let mut colors = vec![1u32; n];
    colors[rooted.root()] = 0;
    let group = automorphisms(rooted, &colors);
    let support: Vec<usize> = (0..n).filter(|&v| v != rooted.root()).collect();
    let w = BigRational::new(1.into(), group.len().into());
    group
        .into_iter()
        .map(|perm| SymmetryTerm {
            monomial: Monomial::cycle_type(&perm, &support),
            block: rooted.clone(),
            perm,
            weight: w.clone(),
        })
        .collect()
}

/// Cycle index of the root stabiliser of `b`, acting on the non-root
/// vertices.
pub fn cycle_index_derived_block(b: &RootedGraph) -> Result<CycleIndex> {
    if !b.is_block() {
        return Err(Error::NotBiconnected);
    }
    let mut z = CycleIndex::new();
    for t in derived_symmetries(b) {
        z.add_term(t.monomial, t.weight);
    }
    Ok(z)
}
