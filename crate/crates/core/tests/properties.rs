mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stepsched::exact::prefix_lower_bound;
use stepsched::metaheuristics::vnd;
use stepsched::neighborhoods::{descend, perturb_three_opt, shake, two_opt_move, Neighborhood};
use stepsched::schedule::total_tardiness;
use stepsched::{evaluate_schedule, Sequence};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluator_matches_naive((inst, order) in arb_instance_and_order(12)) {
        let seq = Sequence::new(order.clone()).unwrap();
        let r = evaluate_schedule(&inst, &seq).unwrap();
        prop_assert_eq!(r.total, naive_total(&inst, &order));
        prop_assert_eq!(total_tardiness(&inst, &order), r.total);
        prop_assert_eq!(r.tardiness.iter().sum::<i64>(), r.total);
        prop_assert!(r.tardiness.iter().all(|&t| t >= 0));
    }

    #[test]
    fn operators_keep_permutations((inst, order) in arb_instance_and_order(10), seed in any::<u64>()) {
        let n = inst.n();
        let seq = Sequence::new(order).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in Neighborhood::ALL {
            prop_assert!(is_permutation(shake(&seq, k, &mut rng).as_slice(), n));
            prop_assert!(is_permutation(descend(&inst, &seq, k).as_slice(), n));
        }
        prop_assert!(is_permutation(perturb_three_opt(&seq, &mut rng).as_slice(), n));
        prop_assert!(is_permutation(vnd(&inst, &seq, &Neighborhood::ALL).as_slice(), n));
    }

    #[test]
    fn shake_always_moves((inst, order) in arb_instance_and_order(10), seed in any::<u64>()) {
        let seq = Sequence::new(order).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in Neighborhood::ALL {
            let out = shake(&seq, k, &mut rng);
            if k.size(inst.n()) > 0 {
                prop_assert_ne!(&out, &seq);
                let reachable = neighbors(k.index(), seq.as_slice());
                prop_assert!(reachable.iter().any(|t| t.as_slice() == out.as_slice()));
            } else {
                prop_assert_eq!(&out, &seq);
            }
        }
    }

    #[test]
    fn descent_is_monotone_local_optimum((inst, order) in arb_instance_and_order(8)) {
        let seq = Sequence::new(order.clone()).unwrap();
        let before = naive_total(&inst, &order);
        for k in Neighborhood::ALL {
            let out = descend(&inst, &seq, k);
            let after = naive_total(&inst, out.as_slice());
            prop_assert!(after <= before);
            for t in neighbors(k.index(), out.as_slice()) {
                prop_assert!(naive_total(&inst, &t) >= after, "N{} move improves {:?}", k.index(), out);
            }
            // a local optimum is a fixpoint
            prop_assert_eq!(descend(&inst, &out, k), out);
        }
    }

    #[test]
    fn vnd_is_monotone((inst, order) in arb_instance_and_order(8)) {
        let seq = Sequence::new(order.clone()).unwrap();
        let out = vnd(&inst, &seq, &Neighborhood::ALL);
        let value = naive_total(&inst, out.as_slice());
        prop_assert!(value <= naive_total(&inst, &order));
        // the last neighborhood of the sweep is locally optimal
        for t in neighbors(5, out.as_slice()) {
            prop_assert!(naive_total(&inst, &t) >= value);
        }
    }

    #[test]
    fn two_opt_is_an_involution(order in Just((1..=12usize).collect::<Vec<_>>()).prop_shuffle(), i in 1usize..=12, j in 1usize..=12) {
        let seq = Sequence::new(order).unwrap();
        let moved = two_opt_move(&seq, i, j);
        if i.abs_diff(j) >= 3 {
            let moved = moved.unwrap();
            prop_assert_ne!(&moved, &seq);
            prop_assert_eq!(two_opt_move(&moved, i, j).unwrap(), seq.clone());
            prop_assert_eq!(two_opt_move(&seq, j, i).unwrap(), moved);
        } else {
            prop_assert!(moved.is_err());
        }
    }

    #[test]
    fn sequence_text_round_trip(order in Just((1..=15usize).collect::<Vec<_>>()).prop_shuffle()) {
        let seq = Sequence::new(order).unwrap();
        prop_assert_eq!(Sequence::parse(&seq.to_string()).unwrap(), seq);
    }

    #[test]
    fn instance_json_round_trip(inst in arb_instance(10)) {
        let text = inst.to_json().unwrap();
        prop_assert_eq!(stepsched::Instance::from_json(&text).unwrap(), inst);
    }
}

proptest! {
    // one thousand random prefixes
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn prefix_bound_is_valid((inst, order) in arb_instance_and_order(7), cut in 0usize..=7) {
        let cut = cut.min(inst.n());
        let prefix = &order[..cut];
        let bound = prefix_lower_bound(&inst, prefix);
        let rest: Vec<usize> = order[cut..].to_vec();
        // every completion of the prefix costs at least the bound
        for perm in all_permutations(rest.len()) {
            let mut full = prefix.to_vec();
            full.extend(perm.iter().map(|&p| rest[p - 1]));
            prop_assert!(naive_total(&inst, &full) >= bound);
        }
        if cut == inst.n() {
            prop_assert_eq!(bound, naive_total(&inst, &order));
        }
    }
}
