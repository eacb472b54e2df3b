mod common;

use alggraph::caps::Caps;
use alggraph::clone::term_ops;
use alggraph::congruence::{all_congruences, cg, link_congruence};
use alggraph::context::{ClassContext, Mode};
use alggraph::random::{passes, Filter};
use alggraph::structure::Structure;
use alggraph::thin::{thin_edges, Kinds};
use alggraph::{sg_closure, subpower_generate, FiniteAlgebra};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn algebra_from(seed: u64, max_size: usize, max_arity: usize) -> FiniteAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = rng.random_range(2..=max_size);
    let count = rng.random_range(1..=2);
    let arities: Vec<usize> = (0..count).map(|_| rng.random_range(1..=max_arity)).collect();
    common::random_algebra(&mut rng, size, &arities)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn sg_matches_fixpoint_and_is_a_closure(seed in any::<u64>(), picks in proptest::collection::vec(0usize..4, 1..4)) {
        let alg = algebra_from(seed, 4, 3);
        let gens: Vec<usize> = picks.iter().map(|&p| p % alg.size).collect();
        let s = sg_closure(&alg, &gens).unwrap().elements();
        let oracle: Vec<usize> = common::naive_sg(&alg, &gens).into_iter().collect();
        prop_assert_eq!(&s, &oracle);
        // extensive and idempotent
        prop_assert!(gens.iter().all(|g| s.contains(g)));
        prop_assert_eq!(sg_closure(&alg, &s).unwrap().elements(), s);
    }

    #[test]
    fn cg_matches_fixpoint(seed in any::<u64>(), raw in proptest::collection::vec((0usize..4, 0usize..4), 0..3)) {
        let alg = algebra_from(seed, 4, 3);
        let pairs: Vec<(usize, usize)> = raw.iter().map(|&(a, b)| (a % alg.size, b % alg.size)).collect();
        let p = cg(&alg, &pairs);
        let oracle = common::naive_cg(&alg, &pairs);
        for x in 0..alg.size {
            for y in 0..alg.size {
                prop_assert_eq!(p.block_of(x) == p.block_of(y), oracle[x][y]);
            }
        }
        prop_assert!(p.check_compatible(&alg).is_ok());
    }

    #[test]
    fn subpower_matches_fixpoint_and_replays(seed in any::<u64>(), arity in 1usize..=3, ngens in 1usize..=3) {
        let alg = algebra_from(seed, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let factors = vec![alg.clone(); arity];
        let gens: Vec<Vec<usize>> = (0..ngens).map(|_| (0..arity).map(|_| rng.random_range(0..alg.size)).collect()).collect();
        let rel = subpower_generate(&factors, &gens, true, 10_000).unwrap();
        let ours: std::collections::BTreeSet<Vec<usize>> = rel.tuples().cloned().collect();
        prop_assert_eq!(ours, common::naive_subpower(&factors, &gens));
        for (i, t) in rel.tuples().enumerate() {
            let term = rel.term(i).unwrap();
            let replay: Vec<usize> = (0..arity)
                .map(|c| term.eval(&alg, &gens.iter().map(|g| g[c]).collect::<Vec<_>>()))
                .collect();
            prop_assert_eq!(&replay, t);
        }
    }

    #[test]
    fn binary_term_operations_are_closed(seed in any::<u64>()) {
        let alg = algebra_from(seed, 3, 2);
        let ops = term_ops(&alg, 2, 5_000).unwrap();
        prop_assume!(ops.is_complete());
        let tables: std::collections::HashSet<&Vec<usize>> = ops.tables().collect();
        let n = alg.size;
        for op in &alg.operations {
            for args in common::tuples(ops.len(), op.arity) {
                let composed: Vec<usize> = (0..n * n)
                    .map(|p| {
                        let inner: Vec<usize> = args.iter().map(|&t| ops.table(t)[p]).collect();
                        op.table[inner.iter().fold(0, |acc, &x| acc * n + x)]
                    })
                    .collect();
                prop_assert!(tables.contains(&composed));
            }
        }
    }

    #[test]
    fn quotients_collapse_operations(seed in any::<u64>()) {
        let alg = algebra_from(seed, 4, 3);
        let base = Structure::base(&alg, 0);
        for theta in all_congruences(&alg, 1_000).unwrap() {
            let q = base.quotient(&theta, "q");
            prop_assert_eq!(q.size(), theta.blocks().len());
            let class = |x: usize| theta.block_of(x);
            for (oi, op) in alg.operations.iter().enumerate() {
                for args in common::tuples(alg.size, op.arity) {
                    let img: Vec<usize> = args.iter().map(|&x| class(x)).collect();
                    prop_assert_eq!(q.alg.apply(oi, &img), class(alg.apply(oi, &args)));
                }
            }
        }
    }

    #[test]
    fn link_congruences_are_congruences(seed in any::<u64>(), ngens in 1usize..=3) {
        let alg = algebra_from(seed, 3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(7));
        let factors = vec![alg.clone(), alg.clone()];
        let gens: Vec<Vec<usize>> = (0..ngens).map(|_| vec![rng.random_range(0..alg.size), rng.random_range(0..alg.size)]).collect();
        let rel = subpower_generate(&factors, &gens, false, 10_000).unwrap();
        prop_assume!(rel.is_subdirect());
        for i in 0..2 {
            let lk = link_congruence(&rel, i).unwrap();
            prop_assert!(lk.check_compatible(&alg).is_ok());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn witness_mode_never_loses_thin_edges(seed in any::<u64>()) {
        let alg = algebra_from(seed, 3, 3);
        let caps = Caps { clone: 400, ..Caps::default() };
        prop_assume!(passes(&alg, &[Filter::Clone], &caps).unwrap());
        let exact = ClassContext::for_algebra(&alg, caps, Mode::Exact).unwrap();
        let witness = ClassContext::for_algebra(&alg, caps, Mode::Witness).unwrap();
        let s = exact.base_structure(0);
        let (Ok(e), Ok(w)) = (thin_edges(&exact, &s, Kinds::ALL), thin_edges(&witness, &s, Kinds::ALL)) else {
            return Ok(());
        };
        for edge in &e.edges {
            prop_assert!(w.edges.iter().any(|x| x.tail == edge.tail && x.head == edge.head && x.kind == edge.kind));
        }
    }
}
