mod common;

use common::*;
use stepsched::exact::brute_force;
use stepsched::schedule::DominanceRule;
use stepsched::{check_dominance, evaluate_schedule, Instance, Sequence};

/// Three jobs whose unique optimum runs a dominated job first: scheduling
/// the dominating job 3 earlier pushes job 1 past its deteriorating date.
fn counterexample() -> Instance {
    Instance::from_columns(
        "dominance_counterexample",
        &[44, 85, 31],
        &[11, 12, 25],
        &[75, 3, 66],
        &[20, 138, 143],
    )
    .unwrap()
}

#[test]
fn dominance_can_exclude_every_optimum() {
    let inst = counterexample();
    let exact = brute_force(&inst, 10).unwrap();
    assert_eq!(exact.best_value, 166);
    assert_eq!(exact.best_sequence.as_slice(), &[1, 3, 2]);
    assert_eq!(exact.optimal_set_size, Some(1));

    let schedule = evaluate_schedule(&inst, &exact.best_sequence).unwrap();
    let violations = check_dominance(&inst, &schedule);
    assert_eq!(violations.len(), 1);
    assert_eq!((violations[0].earlier, violations[0].later), (1, 3));
    assert_eq!(violations[0].rule, DominanceRule::NonDeteriorated);

    // honouring the rule costs more
    let swapped = Sequence::new(vec![3, 1, 2]).unwrap();
    assert_eq!(naive_total(&inst, swapped.as_slice()), 179);
}

#[test]
fn dominance_check_matches_pair_oracle() {
    for seed in 0..60 {
        let inst = random_instance(1 + seed as usize % 7, 300 + seed);
        for perm in all_permutations(inst.n()).into_iter().take(50) {
            let schedule = evaluate_schedule(&inst, &Sequence::new(perm.clone()).unwrap()).unwrap();
            let got: Vec<(usize, usize)> = check_dominance(&inst, &schedule)
                .iter()
                .map(|v| (v.earlier, v.later))
                .collect();

            let mut want = Vec::new();
            let mut clock = 0;
            let mut late = vec![false; inst.n() + 1];
            for &id in &perm {
                let job = inst.job(id);
                late[id] = clock > job.h;
                clock += if late[id] { job.a + job.b } else { job.a };
            }
            for x in 0..perm.len() {
                for y in x + 1..perm.len() {
                    let (k, j) = (inst.job(perm[x]), inst.job(perm[y]));
                    if late[k.id] != late[j.id] {
                        continue;
                    }
                    let (pk, pj) = if late[k.id] {
                        (k.a + k.b, j.a + j.b)
                    } else {
                        (k.a, j.a)
                    };
                    if pj <= pk && j.d <= k.d && (pj < pk || j.d < k.d) {
                        want.push((k.id, j.id));
                    }
                }
            }
            assert_eq!(got, want, "{perm:?}");
        }
    }
}
