//! Randomised invariants.

use mdcensus::decomp::{validate, OrderedDecomposition, SignedLabel};
use mdcensus::fatgraph::fatten;
use mdcensus::multigraph::{generate, MultiGraph};
use mdcensus::oracle::{triangulation_of, GluingChoice};
use mdcensus::search::{canonicalize_walk, decomposition_less, is_canonical_walk, FrontierTracker};
use mdcensus::tri::{triangulation_to_decomposition, Perm4, Triangulation};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn walk_strategy() -> impl Strategy<Value = Vec<SignedLabel>> {
    prop::collection::vec((1usize..6, any::<bool>()), 1..9)
        .prop_map(|v| v.into_iter().map(|(l, f)| SignedLabel::new(l, f)).collect())
}

fn graphs() -> Vec<MultiGraph> {
    (1..=4).flat_map(generate).collect()
}

fn random_triangulation(seed: u64) -> (MultiGraph, Triangulation) {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let all = graphs();
    let g = all[rng.gen_range(0..all.len())].clone();
    let fg = fatten(&g).unwrap();
    let choice = GluingChoice((0..fg.arc_nodes().len()).map(|_| rng.gen_range(0..6)).collect());
    (g, triangulation_of(&fg, &choice))
}

fn relabelled(t: &Triangulation, seed: u64) -> Triangulation {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let n = t.size();
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(&mut rng);
    let perms: Vec<Perm4> = (0..n)
        .map(|_| {
            let all: Vec<Perm4> = Perm4::all().collect();
            all[rng.gen_range(0..24)]
        })
        .collect();
    let mut u = Triangulation::new(n);
    for tet in 0..n {
        for face in 0..4u8 {
            let g = t.gluing(tet, face).unwrap();
            let (nt, nf) = (sigma[tet], perms[tet].apply(face));
            if u.gluing(nt, nf).is_none() {
                let map = perms[g.tet].compose(g.perm).compose(perms[tet].inverse());
                u.glue(nt, nf, sigma[g.tet], map).unwrap();
            }
        }
    }
    u
}

proptest! {
    #[test]
    fn canonical_walk_is_invariant_under_rotation_and_reversal(w in walk_strategy(), r in 0usize..8) {
        let c = canonicalize_walk(&w);
        let m = w.len();
        let rotated: Vec<SignedLabel> = w[r % m..].iter().chain(&w[..r % m]).copied().collect();
        let reversed: Vec<SignedLabel> = w.iter().rev().map(|x| x.reversed()).collect();
        prop_assert_eq!(canonicalize_walk(&rotated), c.clone());
        prop_assert_eq!(canonicalize_walk(&reversed), c.clone());
        prop_assert!(is_canonical_walk(&c));
        prop_assert!(c[0].is_forward());
        prop_assert_eq!(c[0].label(), w.iter().map(|x| x.label()).min().unwrap());
        prop_assert!(c <= rotated && c <= reversed);
    }

    #[test]
    fn decomposition_order_is_total(a in prop::collection::vec(walk_strategy(), 1..4), b in prop::collection::vec(walk_strategy(), 1..4)) {
        let lt = decomposition_less(&a, &b);
        let gt = decomposition_less(&b, &a);
        prop_assert!(!(lt && gt));
        prop_assert_eq!(!lt && !gt, a == b);
    }

    #[test]
    fn perm_group_laws(a in 0usize..24, b in 0usize..24, c in 0usize..24) {
        let all: Vec<Perm4> = Perm4::all().collect();
        let (p, q, r) = (all[a], all[b], all[c]);
        prop_assert_eq!(p.compose(q).compose(r), p.compose(q.compose(r)));
        prop_assert_eq!(p.compose(q).sign(), p.sign() * q.sign());
        prop_assert_eq!(p.compose(q).inverse(), q.inverse().compose(p.inverse()));
    }

    #[test]
    fn frontier_rollback_restores_any_earlier_state(seed in any::<u64>(), cut in 0usize..100) {
        let (_, t) = random_triangulation(seed);
        let n = t.size();
        let mut ids = Vec::new();
        for tet in 0..n {
            for face in 0..4u8 {
                let g = t.gluing(tet, face).unwrap();
                if (tet, face) < (g.tet, g.perm.apply(face)) {
                    for v in (0..4u8).filter(|&v| v != face) {
                        ids.push((FrontierTracker::vertex(tet, v), FrontierTracker::vertex(g.tet, g.perm.apply(v))));
                    }
                }
            }
        }
        prop_assert_eq!(ids.len(), 6 * n);
        let mut ft = FrontierTracker::new(n);
        let cut = cut % (ids.len() + 1);
        for &(a, b) in &ids[..cut] {
            ft.glue(a, b);
        }
        let snapshot = ft.clone();
        let mark = ft.mark();
        for &(a, b) in &ids[cut..] {
            ft.glue(a, b);
        }
        // In a closed triangulation every link side is identified once, so
        // every link ends closed.
        prop_assert!((0..4 * n).all(|x| ft.frontier_edges(x) == 0));
        ft.rollback(mark);
        prop_assert_eq!(ft, snapshot);
    }

    #[test]
    fn gluing_tables_round_trip_and_relabel(seed in any::<u64>(), relabel_seed in any::<u64>()) {
        let (g, t) = random_triangulation(seed);
        let text = t.to_text();
        let back: Triangulation = text.parse().unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(back.to_text(), text);
        let u = relabelled(&t, relabel_seed);
        u.check().unwrap();
        prop_assert!(u.is_isomorphic(&t));
        prop_assert_eq!(u.euler_characteristic(), t.euler_characteristic());
        prop_assert_eq!(u.is_orientable(), t.is_orientable());
        prop_assert_eq!(u.is_3manifold(), t.is_3manifold());
        let k = t.vertex_classes().len() as i64;
        let e = t.edge_classes().len() as i64;
        let n = g.order() as i64;
        prop_assert_eq!(t.euler_characteristic(), k - e + 2 * n - n);
    }

    #[test]
    fn decompositions_of_random_gluings_are_valid(seed in any::<u64>()) {
        let (g, t) = random_triangulation(seed);
        let (fg, d) = triangulation_to_decomposition(&t).unwrap();
        validate(&d, &fg).unwrap();
        prop_assert_eq!(d.total_external(), 6 * g.order());
        prop_assert_eq!(d.walks().len(), t.edge_classes().len());
        let parsed: OrderedDecomposition = d.to_string().parse().unwrap();
        prop_assert_eq!(parsed, d);
    }

    #[test]
    fn graph_text_and_canonical_form_survive_relabelling(which in 0usize..1000, seed in any::<u64>()) {
        let all: Vec<MultiGraph> = (1..=5).flat_map(generate).collect();
        let g = &all[which % all.len()];
        let mut perm: Vec<usize> = (0..g.order()).collect();
        perm.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        let h = g.relabel(&perm);
        prop_assert_eq!(h.canonical_form(), g.canonical_form());
        prop_assert_eq!(h.to_text().parse::<MultiGraph>().unwrap(), h);
    }
}
