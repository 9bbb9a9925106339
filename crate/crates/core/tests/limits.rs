use subcrit::enumerate::{chain_frequencies, level_sequence_graph, level_sequences, ChainMatcher};
use subcrit::limits::{bs_chain_probability, chain_probability, q_link, ChainMode, ChainSampler, Link};
use subcrit::series::find_singularity;
use subcrit::BlockClass;

fn setup(name: &str) -> (BlockClass, subcrit::SingularityData) {
    let c = BlockClass::builtin(name).unwrap();
    let s = find_singularity(&c, c.default_order(), 1e-9).unwrap();
    (c, s)
}

#[test]
fn sampled_leaf_frequency_matches_link_probability() {
    let draws = 100_000;
    let eps = 1e-2;
    for (name, mode) in [
        ("trees_labelled", ChainMode::Labelled),
        ("trees_unlabelled", ChainMode::UnlabelledRooted),
    ] {
        let (c, s) = setup(name);
        let p = chain_probability(&[Link::leaf()], &s, mode);
        let mut sampler = ChainSampler::new(&c, &s, eps, 17).unwrap();
        let hits = (0..draws).filter(|_| sampler.next_link().size() == 1).count();
        let f = hits as f64 / draws as f64;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        // renormalising after the size cap inflates frequencies by at most about 1/(1 - eps)
        let tol = 3.0 * sigma + p * eps;
        println!("{name}: sampled {f:.5}, p = {p:.5}, tol {tol:.5}");
        assert!((f - p).abs() <= tol, "{name}: {f} vs {p}");
    }
}

#[test]
fn rooted_unlabelled_tree_chain_fractions() {
    let (_, s) = setup("trees_unlabelled");
    let chains = [vec![Link::leaf()], vec![Link::leaf(), Link::leaf()]];
    let mut matchers: Vec<ChainMatcher> = chains.iter().map(|c| ChainMatcher::new(c)).collect();
    let mut last = vec![f64::INFINITY; chains.len()];
    for n in 10..=15 {
        let trees: Vec<_> = level_sequences(n).unwrap().map(|l| level_sequence_graph(&l)).collect();
        // root is a leaf, counted directly
        let leaf = trees.iter().filter(|t| t.degree(t.root()) == 1).count() as f64 / trees.len() as f64;
        let f = chain_frequencies(trees, &mut matchers);
        assert!((f[0] - leaf).abs() < 1e-15);
        for (i, c) in chains.iter().enumerate() {
            let q: f64 = c.iter().map(|l| q_link(l, &s)).product();
            let err = (f[i] - q).abs();
            assert!(err < last[i], "chain {i} at n = {n}: {err}");
            last[i] = err;
        }
    }
    assert!(last[0] < 0.05 && last[1] < 0.05, "{last:?}");
}

#[test]
fn bs_leaf_probability_is_stable_in_the_order() {
    let c = BlockClass::builtin("trees_unlabelled").unwrap();
    let a = bs_chain_probability(&c, &[Link::leaf()], 200, 1e-3).unwrap();
    let b = bs_chain_probability(&c, &[Link::leaf()], 300, 1e-3).unwrap();
    assert!((a - b).abs() < 1e-6, "{a} {b}");
    assert_eq!(bs_chain_probability(&c, &[], 200, 1e-3).unwrap(), 1.0);
}
