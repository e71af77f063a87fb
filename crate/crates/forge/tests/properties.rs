//! Property tests for the search kernels and deciders against their
//! independent oracles.

use forge::colored::{
    assignment_valid, embeds, embeds_naive, iso_colored, ColorRelation, ColoredSum,
};
use forge::graph::{automorphism_count_naive, automorphisms, find_embedding, is_embedding, Graph};
use forge::norm::{q, GraphNorm, Q};
use forge::trees::{clip, dominates, word_sum};
use num::{BigInt, BigRational};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|i| (i + 1..n as u32).map(move |j| (i, j)))
            .collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
            let edges = pairs
                .iter()
                .zip(&mask)
                .filter(|(_, &m)| m)
                .map(|(&e, _)| e)
                .collect();
            Graph::new(n, edges).unwrap()
        })
    })
}

fn arb_sum() -> impl Strategy<Value = ColoredSum> {
    proptest::collection::vec((0u32..=4, 0u32..=3), 0..=6).prop_map(ColoredSum::new)
}

fn arb_vector(dim: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec((-30i64..=30, 1i64..=9), dim).prop_map(|entries| {
        entries
            .into_iter()
            .map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_witnesses_validate(g in arb_graph(4), h in arb_graph(5)) {
        if let Some(w) = find_embedding(&g, &h).unwrap() {
            prop_assert!(is_embedding(&g, &h, &w).unwrap());
        }
    }

    #[test]
    fn automorphism_order_divides_factorial_and_matches_naive(g in arb_graph(5)) {
        let order = automorphisms(&g).unwrap().order;
        let fact: u128 = (1..=g.n() as u128).product();
        prop_assert_eq!(fact % order, 0);
        prop_assert_eq!(order, automorphism_count_naive(&g));
    }

    #[test]
    fn colored_decider_matches_oracle(a in arb_sum(), b in arb_sum()) {
        for r in [ColorRelation::Equality, ColorRelation::Geq] {
            let dp = embeds(&a, &b, &r);
            prop_assert_eq!(dp.is_some(), embeds_naive(&a, &b, &r).is_some());
            if let Some(phi) = dp {
                prop_assert!(assignment_valid(&a, &b, &r, &phi));
            }
        }
    }

    #[test]
    fn colored_iso_implies_mutual_embedding(a in arb_sum(), b in arb_sum()) {
        if iso_colored(&a, &b) {
            let eq = ColorRelation::Equality;
            prop_assert!(embeds(&a, &b, &eq).is_some());
            prop_assert!(embeds(&b, &a, &eq).is_some());
        }
    }

    #[test]
    fn norm_is_a_norm(g in arb_graph(5), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = GraphNorm::new(g).unwrap();
        let dim = n.dim();
        let v: Vec<Q> = (0..dim)
            .map(|_| q(rng.gen_range(-20i64..=20), rng.gen_range(1i64..=7)))
            .collect();
        let w: Vec<Q> = (0..dim)
            .map(|_| q(rng.gen_range(-20i64..=20), rng.gen_range(1i64..=7)))
            .collect();
        prop_assert!(n.sandwich_check(&v).unwrap());
        let sum: Vec<Q> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        prop_assert!(n.norm(&sum).unwrap() <= n.norm(&v).unwrap() + n.norm(&w).unwrap());
    }

    #[test]
    fn norm_vector_strategy_sandwich(g in arb_graph(4), v_seed in arb_vector(4)) {
        let n = GraphNorm::new(g).unwrap();
        let v: Vec<Q> = v_seed.into_iter().take(n.dim()).collect();
        if v.len() == n.dim() {
            prop_assert!(n.sandwich_check(&v).unwrap());
        }
    }

    #[test]
    fn clip_respects_domination(s in proptest::collection::vec(0u8..6, 1..4), t in proptest::collection::vec(0u8..6, 1..4)) {
        if s.len() == t.len() {
            let sum = word_sum(&s, &t);
            let clipped = clip(&sum, 3);
            prop_assert!(dominates(&sum, &clipped));
            prop_assert!(clipped.iter().all(|&c| c < 3));
        }
    }
}
