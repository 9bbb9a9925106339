use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use subcrit::canon::{automorphism_group_order, canonical_rooted};
use subcrit::classes::BUILTIN_NAMES;
use subcrit::enumerate::{rooted_members, UniformSampler};
use subcrit::{BlockClass, ClassKind};

const SAMPLES: usize = 20_000;

/// Chi-square p-value of the sampled shape frequencies against the exact
/// shape distribution from the census.
fn uniformity_p_value(class: &BlockClass, n: usize, seed: u64) -> f64 {
    let shapes = rooted_members(&class.with_kind(ClassKind::Unlabelled).unwrap(), n).unwrap();
    let mut expected: HashMap<String, f64> = HashMap::new();
    for g in &shapes[n] {
        let w = match class.kind() {
            ClassKind::Unlabelled => 1.0,
            ClassKind::Labelled => {
                let mut colors = vec![1; g.n()];
                colors[g.root()] = 0;
                1.0 / automorphism_group_order(g, &colors) as f64
            }
        };
        expected.insert(canonical_rooted(g).unwrap().0, w);
    }
    let total: f64 = expected.values().sum();
    let sampler = UniformSampler::new(class, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashMap<String, usize> = HashMap::new();
    for _ in 0..SAMPLES {
        let g = sampler.sample(n, &mut rng).unwrap();
        let code = canonical_rooted(&g).unwrap().0;
        assert!(expected.contains_key(&code), "sampled a graph outside the class");
        *seen.entry(code).or_default() += 1;
    }
    let stat: f64 = expected
        .iter()
        .map(|(code, w)| {
            let e = w / total * SAMPLES as f64;
            let o = *seen.get(code).unwrap_or(&0) as f64;
            (o - e) * (o - e) / e
        })
        .sum();
    let df = (expected.len() - 1) as f64;
    if df == 0.0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

#[test]
fn builtin_samplers_pass_chi_square() {
    for name in BUILTIN_NAMES {
        let class = BlockClass::builtin(name).unwrap();
        for n in [5, 6] {
            let p = uniformity_p_value(&class, n, 11 + n as u64);
            println!("{name} n={n}: p = {p:.4}");
            assert!(p > 0.001, "{name} at n = {n}: p = {p}");
        }
    }
}

#[test]
fn custom_class_sampler_passes_chi_square() {
    let blocks = vec![
        subcrit::RootedGraph::complete(2),
        subcrit::RootedGraph::cycle(4),
        subcrit::RootedGraph::complete(4),
    ];
    let u = BlockClass::custom_unlabelled(blocks, None).unwrap();
    let l = u.with_kind(ClassKind::Labelled).unwrap();
    for class in [u, l] {
        let p = uniformity_p_value(&class, 6, 3);
        assert!(p > 0.001, "{}: p = {p}", class.name());
    }
}
