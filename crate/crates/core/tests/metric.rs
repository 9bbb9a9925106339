use proptest::prelude::*;
use subcrit::metric::{
    d_neighbourhood, parse_family, radius_similarity, rcis_profiles, GraphFamily, Similarity,
};
use subcrit::RootedGraph;

/// Connected rooted graph: a random spanning tree plus extra edges.
fn graph() -> impl Strategy<Value = RootedGraph> {
    (1usize..=7).prop_flat_map(|n| {
        let parents: Vec<_> = (1..n).map(|v| 0..v).collect();
        (parents, proptest::collection::vec(any::<bool>(), n * n), 0..n).prop_map(move |(ps, extra, root)| {
            let mut edges: Vec<(usize, usize)> = ps.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            for u in 0..n {
                for v in u + 1..n {
                    if extra[u * n + v] && !edges.contains(&(u, v)) {
                        edges.push((u, v));
                    }
                }
            }
            RootedGraph::new(n, root, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabelling_keeps_the_profile(g in graph(), seed in any::<u64>()) {
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let h = g.relabel(&perm);
        let a = rcis_profiles(&GraphFamily::Finite(g), 7).unwrap();
        let b = rcis_profiles(&GraphFamily::Finite(h), 7).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn radius_is_symmetric_and_ultrametric(a in graph(), b in graph(), c in graph()) {
        let f = |x: &RootedGraph| GraphFamily::Finite(x.clone());
        let r = |x: &RootedGraph, y: &RootedGraph| radius_similarity(&f(x), &f(y), 7).unwrap().radius();
        prop_assert_eq!(r(&a, &b), r(&b, &a));
        prop_assert!(r(&a, &c) >= r(&a, &b).min(r(&b, &c)));
        prop_assert_eq!(radius_similarity(&f(&a), &f(&a), 7).unwrap(), Similarity::AtLeast(7));
    }

    #[test]
    fn display_parses_back(g in graph()) {
        let f = GraphFamily::Finite(g);
        let back = parse_family(&f.to_string()).unwrap();
        prop_assert_eq!(rcis_profiles(&back, 7).unwrap(), rcis_profiles(&f, 7).unwrap());
    }
}

#[test]
fn paths_converge_in_both_metrics() {
    // consecutive paths agree on ever larger radii
    for n in 2..8 {
        let (a, b) = (GraphFamily::Path(n), GraphFamily::Path(n + 1));
        assert_eq!(radius_similarity(&a, &b, 10).unwrap(), Similarity::Exactly(n + 1));
        let r = radius_similarity(&a, &GraphFamily::Ray, 10).unwrap();
        assert_eq!(r, Similarity::Exactly(n + 1));
        let dn = d_neighbourhood(&RootedGraph::path(n + 1), &RootedGraph::path(n + 2), 12);
        assert_eq!(dn, Similarity::Exactly(n));
    }
}

#[test]
fn stars_against_the_infinite_star() {
    for n in 0..=7 {
        let r = radius_similarity(&GraphFamily::Star(n), &GraphFamily::StarInf, 9).unwrap();
        assert_eq!(r, Similarity::Exactly(n + 1));
    }
}
