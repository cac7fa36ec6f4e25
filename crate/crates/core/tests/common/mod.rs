//! Independent oracles shared by the integration tests. Nothing here calls
//! into the evaluator or the move code under test.

#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepsched::{Instance, Job};

/// Straight transcription of the objective: run jobs back to back, a job
/// takes `a` if it starts at or before `h`, else `a + b`.
pub fn naive_total(inst: &Instance, order: &[usize]) -> i64 {
    let mut t = 0i64;
    let mut total = 0i64;
    for &id in order {
        let job = inst.jobs().iter().find(|j| j.id == id).unwrap();
        let p = if t <= job.h { job.a } else { job.a + job.b };
        t += p;
        total += (t - job.d).max(0);
    }
    total
}

/// Every sequence one move of neighborhood `k` away (1-based `k`).
pub fn neighbors(k: u8, s: &[usize]) -> Vec<Vec<usize>> {
    let n = s.len();
    let mut out = Vec::new();
    match k {
        1 => {
            for i in 0..n {
                for j in i + 1..n {
                    let mut t = s.to_vec();
                    t.swap(i, j);
                    out.push(t);
                }
            }
        }
        2 => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let mut t = s.to_vec();
                        let x = t.remove(i);
                        t.insert(j, x);
                        out.push(t);
                    }
                }
            }
        }
        3 => {
            for i in 0..n.saturating_sub(1) {
                for j in i + 2..n.saturating_sub(1) {
                    let mut t = s.to_vec();
                    t.swap(i, j);
                    t.swap(i + 1, j + 1);
                    out.push(t);
                }
            }
        }
        4 => {
            for i in 0..n.saturating_sub(1) {
                for j in 0..n.saturating_sub(1) {
                    if i != j {
                        let mut rest = s.to_vec();
                        let couple: Vec<usize> = rest.drain(i..i + 2).collect();
                        let mut t = rest[..j].to_vec();
                        t.extend(couple);
                        t.extend(&rest[j..]);
                        out.push(t);
                    }
                }
            }
        }
        5 => {
            // 1-based I < J with J - I >= 3: reverse positions I+1..=J
            for big_i in 1..=n {
                for big_j in big_i + 3..=n {
                    let mut t = s.to_vec();
                    t[big_i..big_j].reverse();
                    out.push(t);
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

pub fn is_permutation(s: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n + 1];
    s.len() == n
        && s.iter().all(|&id| {
            let fresh = (1..=n).contains(&id) && !seen[id];
            if fresh {
                seen[id] = true;
            }
            fresh
        })
}

/// Heap's algorithm over `1..=n`, visiting every permutation once.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
    }
    let mut a: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

/// Random instance with tight due dates and deteriorating dates spread over
/// the schedule, so both processing regimes occur.
pub fn random_instance(n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=100)).collect();
    let total: i64 = a.iter().sum();
    let jobs = (0..n)
        .map(|i| {
            Job::new(
                i + 1,
                a[i],
                rng.gen_range(0..=50),
                rng.gen_range(1..=total),
                rng.gen_range(0..=total),
            )
        })
        .collect();
    Instance::new(format!("rand_n{n}_s{seed}"), Some(seed), jobs).unwrap()
}

pub fn arb_instance(max_n: usize) -> impl Strategy<Value = Instance> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((1i64..=100, 0i64..=50, 1i64..=500, 0i64..=500), n).prop_map(
            move |rows| {
                let jobs = rows
                    .into_iter()
                    .enumerate()
                    .map(|(i, (a, b, d, h))| Job::new(i + 1, a, b, d, h))
                    .collect();
                Instance::new("prop", None, jobs).unwrap()
            },
        )
    })
}

/// An instance together with a random permutation of its jobs.
pub fn arb_instance_and_order(max_n: usize) -> impl Strategy<Value = (Instance, Vec<usize>)> {
    arb_instance(max_n).prop_flat_map(|inst| {
        let ids: Vec<usize> = (1..=inst.n()).collect();
        (Just(inst), Just(ids).prop_shuffle())
    })
}
