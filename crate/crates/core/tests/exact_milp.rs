mod common;

use common::*;
use stepsched::exact::{branch_and_bound, brute_force, brute_force_with, BranchAndBoundOptions};
use stepsched::generator::{generate_instance, GenSpec, GROUPS};
use stepsched::milp::{build_model, instance_to_lp, Assignment, ConstraintKind, Var};
use stepsched::{evaluate_schedule, Execution, Sequence};

#[test]
fn brute_force_matches_enumeration_oracle() {
    for seed in 0..40 {
        let n = 1 + (seed as usize % 7);
        let inst = random_instance(n, seed);
        let mut perms = all_permutations(n);
        perms.sort();
        let values: Vec<i64> = perms.iter().map(|p| naive_total(&inst, p)).collect();
        let best = *values.iter().min().unwrap();
        let first = perms
            .iter()
            .zip(&values)
            .find(|(_, &v)| v == best)
            .unwrap()
            .0;
        let count = values.iter().filter(|&&v| v == best).count() as u64;

        let r = brute_force(&inst, 10).unwrap();
        assert_eq!(r.best_value, best, "seed {seed}");
        assert_eq!(r.best_sequence.as_slice(), first.as_slice(), "seed {seed}");
        assert_eq!(r.optimal_set_size, Some(count), "seed {seed}");
        assert!(r.proven);
    }
}

#[test]
fn brute_force_modes_agree() {
    for seed in 0..5 {
        let inst = random_instance(8, 100 + seed);
        let seq = brute_force_with(&inst, 10, Execution::Sequential).unwrap();
        let par = brute_force_with(&inst, 10, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
    }
}

#[test]
fn branch_and_bound_matches_brute_force_at_nine_jobs() {
    for i in 0..30u64 {
        let (h, d) = GROUPS[i as usize % GROUPS.len()];
        let inst = generate_instance(&GenSpec::new(9, h, d, 7_000 + i)).unwrap();
        let exact = brute_force(&inst, 10).unwrap();
        for pruning in [true, false] {
            let bb = branch_and_bound(
                &inst,
                BranchAndBoundOptions {
                    interchange_pruning: pruning,
                    ..Default::default()
                },
            );
            assert!(bb.proven);
            assert_eq!(
                bb.best_value,
                exact.best_value,
                "{} pruning={pruning}",
                inst.name()
            );
            assert_eq!(
                naive_total(&inst, bb.best_sequence.as_slice()),
                bb.best_value
            );
        }
    }
}

#[test]
fn branch_and_bound_on_random_small_instances() {
    for seed in 0..200 {
        let n = 1 + (seed as usize % 8);
        let inst = random_instance(n, 50_000 + seed);
        let exact = brute_force(&inst, 10).unwrap();
        let bb = branch_and_bound(&inst, BranchAndBoundOptions::default());
        assert_eq!(bb.best_value, exact.best_value, "seed {seed}");
    }
}

#[test]
fn milp_agrees_with_evaluator_on_every_permutation() {
    for seed in 0..20u64 {
        let n = 1 + (seed as usize % 6);
        let inst = random_instance(n, 900 + seed);
        let model = build_model(&inst);
        let mut best = i64::MAX;
        for perm in all_permutations(n) {
            let seq = Sequence::new(perm.clone()).unwrap();
            let schedule = evaluate_schedule(&inst, &seq).unwrap();
            let point = Assignment::from_schedule(&inst, &schedule);
            let objective = model
                .check(&point)
                .unwrap_or_else(|v| panic!("{perm:?} violates {v:?}"));
            assert_eq!(objective, naive_total(&inst, &perm));
            best = best.min(objective);

            // under-reporting any positive tardiness must be infeasible
            for job in inst.jobs() {
                let t = schedule.tardiness[job.id - 1];
                if t > 0 {
                    let mut cheat = Assignment::from_schedule(&inst, &schedule);
                    cheat.set(Var::T(job.id), t - 1);
                    assert!(model.check(&cheat).is_err());
                }
            }
        }
        assert_eq!(best, brute_force(&inst, 10).unwrap().best_value);
    }
}

#[test]
fn milp_sizes() {
    for n in 1..=7 {
        let model = build_model(&random_instance(n, n as u64));
        assert_eq!(model.count(ConstraintKind::Step), n);
        assert_eq!(model.count(ConstraintKind::Ordering), n * (n - 1));
        assert_eq!(model.count(ConstraintKind::Pairing), n * (n - 1) / 2);
        assert_eq!(model.count(ConstraintKind::Tardiness), n);
        assert_eq!(model.variables().len(), n * (n - 1) + 3 * n);
    }
}

#[test]
fn lp_export_is_deterministic() {
    let inst = random_instance(6, 3);
    assert_eq!(instance_to_lp(&inst), instance_to_lp(&inst.clone()));
}
