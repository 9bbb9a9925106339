use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use subcrit::canon::canonical_unrooted;
use subcrit::enumerate::{
    all_class_members_labelled, all_unlabelled_free_trees, chain_frequencies, exact_chain_frequencies_labelled_trees,
    rooted_members, ChainMatcher, UniformSampler,
};
use subcrit::limits::{
    bs_chain_probability, chain_probability, enumerate_links, link_mass_by_size, p_link, q_link, ChainMode,
    ChainPrefix, ChainSampler, Link,
};
use subcrit::metric::{parse_family, profile_witnesses, radius_similarity, OmegaMarkedGraph};
use subcrit::series::find_singularity;
use subcrit::{BlockClass, ClassKind, RootedGraph, SingularityData};

use crate::report::{emit, Table};
use crate::{ClassArgs, Command, Failure, OutputArgs, Rooting};

const SINGULARITY_TOL: f64 = 1e-9;
/// Relative tolerance of the extrapolated fringe densities.
const FRINGE_TOL: f64 = 1e-3;
const LABELLED_TREES_EXHAUSTIVE: usize = 9;
const UNLABELLED_TREES_EXHAUSTIVE: usize = 14;
const FREE_TREES_EXHAUSTIVE: usize = 18;
const MEMBERS_EXHAUSTIVE: usize = 9;
/// Normal quantile of a two-sided 95% interval.
const Z95: f64 = 1.959964;

pub fn run(cmd: &Command, out: &OutputArgs) -> Result<(), Failure> {
    match cmd {
        Command::Constants { class } => constants(cmd, out, class),
        Command::Links { class, max_size } => links(cmd, out, class, *max_size),
        Command::VerifyChain { .. } => verify_chain(cmd, out),
        Command::Metric { a, b, rmax } => metric(cmd, out, a, b, *rmax),
        Command::Core { graph } => core(cmd, out, graph),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

struct Loaded {
    class: BlockClass,
    order: usize,
    sing: SingularityData,
    inputs: Vec<Vec<u8>>,
}

fn load(args: &ClassArgs) -> Result<Loaded, Failure> {
    let (class, inputs) = match &args.class_file {
        Some(p) => {
            let bytes = read(p)?;
            let text = String::from_utf8(bytes.clone()).map_err(|e| Failure::Config(e.to_string()))?;
            (BlockClass::from_json(&text)?, vec![bytes])
        }
        None => (BlockClass::builtin(&args.class)?, Vec::new()),
    };
    let order = args.order.unwrap_or_else(|| class.valid_order().unwrap_or(class.default_order()));
    if order == 0 {
        return Err(Failure::Config("--order must be positive".into()));
    }
    class.check_order(order)?;
    let sing = find_singularity(&class, order, SINGULARITY_TOL)?;
    Ok(Loaded {
        class,
        order,
        sing,
        inputs,
    })
}

fn mode_of(class: &BlockClass) -> ChainMode {
    match class.kind() {
        ClassKind::Labelled => ChainMode::Labelled,
        ClassKind::Unlabelled => ChainMode::UnlabelledRooted,
    }
}

fn link_probability(link: &Link, l: &Loaded) -> f64 {
    match l.class.kind() {
        ClassKind::Labelled => p_link(link, &l.sing),
        ClassKind::Unlabelled => q_link(link, &l.sing),
    }
}

fn constants(cmd: &Command, out: &OutputArgs, args: &ClassArgs) -> Result<(), Failure> {
    let l = load(args)?;
    let leaf = [Link::leaf()];
    let rooted = chain_probability(&leaf, &l.sing, mode_of(&l.class));
    // a uniform vertex of a uniform labelled graph is a uniform root
    let bs = match l.class.kind() {
        ClassKind::Labelled => rooted,
        ClassKind::Unlabelled => bs_chain_probability(&l.class, &leaf, l.order, FRINGE_TOL)?,
    };
    let s = &l.sing;
    let result = json!({
        "class": l.class.name(),
        "kind": l.class.kind().as_str(),
        "order": l.order,
        "rho": s.rho,
        "tau": s.tau,
        "b": s.b,
        "A": s.a,
        "residual": s.residual,
        "leaf_rooted": rooted,
        "leaf_bs": bs,
    });
    let rows = [
        ("rho", s.rho),
        ("tau", s.tau),
        ("b", s.b),
        ("A", s.a),
        ("residual", s.residual),
        ("leaf_rooted", rooted),
        ("leaf_bs", bs),
    ]
    .iter()
    .map(|(k, v)| vec![k.to_string(), v.to_string()])
    .collect();
    emit(
        cmd,
        out,
        &l.inputs,
        result,
        Table {
            header: vec!["quantity", "value"],
            rows,
        },
    )
}

#[derive(Serialize)]
struct LinkRow {
    index: usize,
    size: usize,
    code: String,
    block_vertices: usize,
    automorphisms: u128,
    probability: f64,
}

fn links(cmd: &Command, out: &OutputArgs, args: &ClassArgs, max_size: usize) -> Result<(), Failure> {
    if max_size == 0 {
        return Err(Failure::Config("--n must be positive".into()));
    }
    let l = load(args)?;
    let list = enumerate_links(&l.class, max_size)?;
    let rows: Vec<LinkRow> = list
        .iter()
        .enumerate()
        .map(|(index, link)| LinkRow {
            index,
            size: link.size(),
            code: link.pinned_code().to_string(),
            block_vertices: link.block().n(),
            automorphisms: link.automorphism_count(),
            probability: link_probability(link, &l),
        })
        .collect();
    let mass = link_mass_by_size(&l.class, &l.sing, max_size)?;
    let mut by_size = vec![0.0; max_size + 1];
    for r in &rows {
        by_size[r.size] += r.probability;
    }
    let sizes: Vec<Value> = (1..=max_size)
        .map(|k| json!({"size": k, "enumerated": by_size[k], "series": mass[k]}))
        .collect();
    let result = json!({
        "class": l.class.name(),
        "measure": if l.class.kind() == ClassKind::Labelled { "p" } else { "q" },
        "order": l.order,
        "rho": l.sing.rho,
        "links": rows,
        "mass_by_size": sizes,
    });
    let table = rows
        .iter()
        .map(|r| {
            vec![
                r.index.to_string(),
                r.size.to_string(),
                r.code.clone(),
                r.block_vertices.to_string(),
                r.automorphisms.to_string(),
                r.probability.to_string(),
            ]
        })
        .collect();
    emit(
        cmd,
        out,
        &l.inputs,
        result,
        Table {
            header: vec!["index", "size", "code", "block_vertices", "automorphisms", "probability"],
            rows: table,
        },
    )
}

fn parse_chain(spec: &str, class: &BlockClass, link_size: usize) -> Result<Vec<Link>, Failure> {
    let mut listing: Option<Vec<Link>> = None;
    let mut links = Vec::new();
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if tok == "leaf" {
            links.push(Link::leaf());
            continue;
        }
        let i: usize = tok
            .parse()
            .map_err(|_| Failure::Config(format!("chain token `{tok}` is neither `leaf` nor a link index")))?;
        if listing.is_none() {
            listing = Some(enumerate_links(class, link_size)?);
        }
        let all = listing.as_ref().expect("filled above");
        let link = all.get(i).ok_or_else(|| {
            Failure::Config(format!("link index {i} out of range: {} links up to size {link_size}", all.len()))
        })?;
        links.push(link.clone());
    }
    Ok(links)
}

/// Wilson score interval.
fn wilson(hits: f64, n: f64) -> (f64, f64) {
    let p = hits / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Serialize)]
struct ChainRow {
    n: usize,
    method: &'static str,
    count: usize,
    frequency: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    abs_error: Option<f64>,
}

/// Mean over distinct unrooted graphs of the fraction of vertices at which
/// the chain event holds.
fn vertex_average(graphs: &[RootedGraph], links: &[Link]) -> f64 {
    let mut m = ChainMatcher::new(links);
    let total: f64 = graphs
        .iter()
        .map(|g| (0..g.n()).filter(|&v| m.matches(&g.with_root(v))).count() as f64 / g.n() as f64)
        .sum();
    total / graphs.len() as f64
}

/// Exhaustive frequency at size `n`, if within reach.
fn exhaustive(class: &BlockClass, rooting: Rooting, links: &[Link], n: usize) -> Result<Option<(usize, f64)>, Failure> {
    let trees = class.is_trees();
    let out = match (class.kind(), rooting) {
        (ClassKind::Labelled, _) if trees => {
            if n > LABELLED_TREES_EXHAUSTIVE {
                return Ok(None);
            }
            let f = exact_chain_frequencies_labelled_trees(n, &mut [ChainMatcher::new(links)])?[0];
            let count = if n < 2 { 1 } else { n.pow(n as u32 - 2) };
            (count, f)
        }
        (ClassKind::Labelled, _) => {
            if n > subcrit::enumerate::MAX_LABELLED_MEMBERS {
                return Ok(None);
            }
            let all = all_class_members_labelled(n, class)?;
            (all.len(), chain_frequencies(all, &mut [ChainMatcher::new(links)])[0])
        }
        (ClassKind::Unlabelled, Rooting::Rooted) => {
            let bound = if trees { UNLABELLED_TREES_EXHAUSTIVE } else { MEMBERS_EXHAUSTIVE };
            if n > bound {
                return Ok(None);
            }
            let all = rooted_members(class, n)?.swap_remove(n);
            (all.len(), chain_frequencies(all, &mut [ChainMatcher::new(links)])[0])
        }
        (ClassKind::Unlabelled, Rooting::Bs) => {
            let graphs = if trees {
                if n > FREE_TREES_EXHAUSTIVE {
                    return Ok(None);
                }
                all_unlabelled_free_trees(n)?
            } else {
                if n > MEMBERS_EXHAUSTIVE {
                    return Ok(None);
                }
                let mut seen = BTreeMap::new();
                for g in rooted_members(class, n)?.swap_remove(n) {
                    seen.entry(canonical_unrooted(&g)).or_insert(g);
                }
                seen.into_values().collect()
            };
            (graphs.len(), vertex_average(&graphs, links))
        }
    };
    Ok(Some(out))
}

fn verify_chain(cmd: &Command, out: &OutputArgs) -> Result<(), Failure> {
    let Command::VerifyChain {
        class: args,
        chain,
        link_size,
        n: (lo, hi),
        samples,
        seed,
        mode,
        epsilon,
    } = cmd
    else {
        unreachable!("dispatched on VerifyChain")
    };
    let sampling = *samples > 0;
    let seed = match (seed, sampling || epsilon.is_some()) {
        (Some(s), _) => *s,
        (None, false) => 0,
        (None, true) => return Err(Failure::Config("sampling needs --seed".into())),
    };
    let l = load(args)?;
    let rooting = if l.class.kind() == ClassKind::Labelled { Rooting::Rooted } else { *mode };
    let links = parse_chain(chain, &l.class, *link_size)?;
    let theory = match rooting {
        Rooting::Rooted => chain_probability(&links, &l.sing, mode_of(&l.class)),
        Rooting::Bs => bs_chain_probability(&l.class, &links, l.order, FRINGE_TOL)?,
    };
    let mut rows = Vec::new();
    let mut sampler: Option<UniformSampler> = None;
    for n in *lo..=*hi {
        let row = match exhaustive(&l.class, rooting, &links, n)? {
            Some((count, f)) => ChainRow {
                n,
                method: "exhaustive",
                count,
                frequency: Some(f),
                ci_low: None,
                ci_high: None,
                abs_error: Some((f - theory).abs()),
            },
            None if sampling && rooting == Rooting::Rooted => {
                if sampler.is_none() {
                    sampler = Some(UniformSampler::new(&l.class, *hi)?);
                }
                let s = sampler.as_ref().expect("built above");
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                let mut m = ChainMatcher::new(&links);
                let mut hits = 0usize;
                for _ in 0..*samples {
                    hits += m.matches(&s.sample(n, &mut rng)?) as usize;
                }
                let f = hits as f64 / *samples as f64;
                let (a, b) = wilson(hits as f64, *samples as f64);
                ChainRow {
                    n,
                    method: "sampled",
                    count: *samples,
                    frequency: Some(f),
                    ci_low: Some(a),
                    ci_high: Some(b),
                    abs_error: Some((f - theory).abs()),
                }
            }
            None => ChainRow {
                n,
                method: "skipped",
                count: 0,
                frequency: None,
                ci_low: None,
                ci_high: None,
                abs_error: None,
            },
        };
        rows.push(row);
    }
    let limit = match epsilon {
        Some(eps) if rooting == Rooting::Rooted => {
            let draws = if sampling { *samples } else { 10_000 };
            let mut cs = ChainSampler::new(&l.class, &l.sing, *eps, seed)?;
            let target = ChainPrefix::new(links.clone());
            let code = target.pinned_code();
            let hits = (0..draws)
                .filter(|_| {
                    let c = cs.sample(links.len());
                    c.size() == target.size() && c.pinned_code() == code
                })
                .count();
            let (a, b) = wilson(hits as f64, draws as f64);
            json!({
                "epsilon": eps,
                "size_cap": cs.size_cap(),
                "draws": draws,
                "frequency": hits as f64 / draws as f64,
                "ci_low": a,
                "ci_high": b,
                "bias_bound": cs.bias_bound(links.len()),
            })
        }
        Some(_) => return Err(Failure::Config("--epsilon samples rooted chains only".into())),
        None => Value::Null,
    };
    let result = json!({
        "class": l.class.name(),
        "mode": rooting,
        "order": l.order,
        "chain": links.iter().map(|k| k.pinned_code().to_string()).collect::<Vec<_>>(),
        "chain_size": links.iter().map(Link::size).sum::<usize>(),
        "theory": theory,
        "rows": rows,
        "limit_sampler": limit,
    });
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let table = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.method.to_string(),
                r.count.to_string(),
                opt(r.frequency),
                opt(r.ci_low),
                opt(r.ci_high),
                theory.to_string(),
            ]
        })
        .collect();
    emit(
        cmd,
        out,
        &l.inputs,
        result,
        Table {
            header: vec!["n", "method", "count", "frequency", "ci_low", "ci_high", "theory"],
            rows: table,
        },
    )
}

fn metric(cmd: &Command, out: &OutputArgs, a: &str, b: &str, rmax: usize) -> Result<(), Failure> {
    if rmax == 0 {
        return Err(Failure::Config("--rmax must be positive".into()));
    }
    let parse = |s: &str| parse_family(s).map_err(|e| Failure::Config(format!("`{s}`: {e}")));
    let (fa, fb) = (parse(a)?, parse(b)?);
    let r = radius_similarity(&fa, &fb, rmax)?;
    let witness = profile_witnesses(&fa, &fb, rmax)?.map(|(size, only_a, only_b)| {
        json!({
            "size": size,
            "only_a": only_a.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "only_b": only_b.iter().map(ToString::to_string).collect::<Vec<_>>(),
        })
    });
    let result = json!({
        "a": fa.to_string(),
        "b": fb.to_string(),
        "rmax": rmax,
        "r": r.radius(),
        "exact": r.is_exact(),
        "display": r.to_string(),
        "d": r.distance(),
        "d_display": if r.is_exact() { format!("{}", r.distance()) } else { format!("<= {}", r.distance()) },
        "witness": witness,
    });
    let rows = vec![
        vec!["r".into(), r.to_string()],
        vec!["d".into(), r.distance().to_string()],
        vec!["exact".into(), r.is_exact().to_string()],
    ];
    emit(
        cmd,
        out,
        &[],
        result,
        Table {
            header: vec!["quantity", "value"],
            rows,
        },
    )
}

fn core(cmd: &Command, out: &OutputArgs, path: &Path) -> Result<(), Failure> {
    let bytes = read(path)?;
    let g: OmegaMarkedGraph =
        serde_json::from_slice(&bytes).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let g = OmegaMarkedGraph::new(g.base, g.marked)?;
    let c = g.core()?;
    let rows = c
        .vertices
        .iter()
        .zip(&c.infinite)
        .map(|(v, &inf)| {
            vec![
                v.to_string(),
                if inf { "first" } else { "ground" }.to_string(),
                inf.to_string(),
            ]
        })
        .collect();
    let result = serde_json::to_value(&c).map_err(|e| Failure::Numeric(e.to_string()))?;
    emit(
        cmd,
        out,
        &[bytes],
        result,
        Table {
            header: vec!["vertex", "floor", "infinite"],
            rows,
        },
    )
}
