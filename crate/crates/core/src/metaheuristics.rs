//! EDD start, variable neighborhood descent, the GVNS with 3-opt restarts
//! and the plain VNS baseline.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, JobId, Sequence, Time};
use crate::neighborhoods::{
    descend_in_place, perturb_in_place, shake_in_place, Neighborhood, PairRule,
};
pub use crate::run::RunResult;
use crate::schedule::total_tardiness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchParams {
    /// Stop once more than this many iterations have run.
    pub iter_max: u64,
    /// Stop once more than this many consecutive iterations fail to improve.
    pub iter_nip: u64,
    /// GVNS perturbs after more than this many non-improving iterations.
    pub gamma: u64,
    pub seed: u64,
    /// Neighborhoods `N1..=N_kmax` take part in shaking and descent.
    pub k_max: u8,
    /// Move set used for `N3`.
    pub pair_rule: PairRule,
    pub record_trace: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            iter_max: 500,
            iter_nip: 150,
            gamma: 75,
            seed: 0,
            k_max: 5,
            pair_rule: PairRule::AdjacentCouples,
            record_trace: false,
        }
    }
}

impl SearchParams {
    pub fn with_seed(seed: u64) -> Self {
        SearchParams {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iter_max == 0 {
            return Err(Error::InvalidParameter("iter_max must be positive".into()));
        }
        if self.iter_nip == 0 || self.iter_nip > self.iter_max {
            return Err(Error::InvalidParameter(
                "iter_nip must lie in 1..=iter_max".into(),
            ));
        }
        if self.gamma == 0 || self.gamma > self.iter_nip {
            return Err(Error::InvalidParameter(
                "gamma must lie in 1..=iter_nip".into(),
            ));
        }
        if !(1..=5).contains(&self.k_max) {
            return Err(Error::InvalidParameter("k_max must lie in 1..=5".into()));
        }
        Ok(())
    }

    fn neighborhoods(&self) -> Vec<Neighborhood> {
        Neighborhood::ALL[..self.k_max as usize].to_vec()
    }

    fn next_k(&self, k: Neighborhood) -> Neighborhood {
        Neighborhood::from_index(k.index() % self.k_max + 1).expect("k_max <= 5")
    }
}

/// Jobs by non-decreasing due date, ties by id.
pub fn edd_sequence(instance: &Instance) -> Sequence {
    let mut order: Vec<JobId> = (1..=instance.n()).collect();
    order.sort_by_key(|&id| (instance.job(id).d, id));
    Sequence::from_vec_unchecked(order)
}

/// Independent random streams for one run, all derived from its seed.
struct Streams {
    shake: ChaCha8Rng,
    order: ChaCha8Rng,
    perturb: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64) -> Self {
        let stream = |id: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        Streams {
            shake: stream(1),
            order: stream(2),
            perturb: stream(3),
        }
    }
}

fn vnd_in_place(
    instance: &Instance,
    order: &mut [JobId],
    sequence: &[Neighborhood],
    rule: PairRule,
) -> Time {
    let mut value = total_tardiness(instance, order);
    let mut i = 0;
    while i < sequence.len() {
        let next = descend_in_place(instance, order, sequence[i], rule);
        if next < value {
            // stay in this neighborhood
            value = next;
        } else {
            i += 1;
        }
    }
    value
}

/// Variable neighborhood descent through `sequence`: descend in the current
/// neighborhood, stay there after a strict improvement and move on
/// otherwise, until the list is exhausted.
pub fn vnd(instance: &Instance, sequence: &Sequence, order: &[Neighborhood]) -> Sequence {
    vnd_with(instance, sequence, order, PairRule::default())
}

pub fn vnd_with(
    instance: &Instance,
    sequence: &Sequence,
    order: &[Neighborhood],
    rule: PairRule,
) -> Sequence {
    let mut work = sequence.as_slice().to_vec();
    vnd_in_place(instance, &mut work, order, rule);
    Sequence::from_vec_unchecked(work)
}

/// General variable neighborhood search.
///
/// Starts from EDD. Every iteration shakes the current solution in `N_k`,
/// runs a VND in a freshly shuffled neighborhood order and accepts the
/// result only if it is strictly better. After more than `gamma`
/// iterations without improvement (and while the stopping counter is below
/// `iter_nip`) the best solution so far is perturbed by 3-opt and becomes
/// the new current solution. `k` advances every iteration.
pub fn gvns(instance: &Instance, params: &SearchParams) -> Result<RunResult> {
    params.validate()?;
    let started = Instant::now();
    let mut rng = Streams::new(params.seed);
    let neighborhoods = params.neighborhoods();

    let mut current = edd_sequence(instance).into_vec();
    let mut current_value = total_tardiness(instance, &current);
    let mut best = current.clone();
    let mut best_value = current_value;

    let (mut iter1, mut iter2, mut iter3) = (0u64, 0u64, 0u64);
    let mut perturbations = 0;
    let mut trace = params.record_trace.then(Vec::new);
    let mut k = Neighborhood::Swap;
    let mut candidate = current.clone();
    let mut k_order = neighborhoods.clone();

    loop {
        candidate.clone_from(&current);
        shake_in_place(&mut candidate, k, params.pair_rule, &mut rng.shake);
        k_order.shuffle(&mut rng.order);
        let candidate_value = vnd_in_place(instance, &mut candidate, &k_order, params.pair_rule);

        if candidate_value < current_value {
            std::mem::swap(&mut current, &mut candidate);
            current_value = candidate_value;
            iter2 = 0;
            iter3 = 0;
        } else {
            iter2 += 1;
            iter3 += 1;
        }
        iter1 += 1;
        if current_value < best_value {
            best.clone_from(&current);
            best_value = current_value;
        }

        if iter3 > params.gamma && iter2 < params.iter_nip {
            current.clone_from(&best);
            if perturb_in_place(&mut current, &mut rng.perturb) {
                perturbations += 1;
            }
            current_value = total_tardiness(instance, &current);
            iter3 = 0;
            if current_value < best_value {
                best.clone_from(&current);
                best_value = current_value;
            }
        }

        if let Some(trace) = trace.as_mut() {
            trace.push(best_value);
        }
        k = params.next_k(k);
        if iter1 > params.iter_max || iter2 > params.iter_nip {
            break;
        }
    }

    Ok(RunResult {
        best_sequence: Sequence::from_vec_unchecked(best),
        best_value,
        iterations: iter1,
        perturbations,
        elapsed: started.elapsed(),
        seed: Some(params.seed),
        trace,
    })
}

/// Basic variable neighborhood search.
///
/// Starts from EDD; shakes in `N_k`, descends with `N_k` only and accepts
/// strict improvements. `k` stays put after an improvement and advances
/// cyclically after a failure. No perturbation.
pub fn vns(instance: &Instance, params: &SearchParams) -> Result<RunResult> {
    params.validate()?;
    let started = Instant::now();
    let mut rng = Streams::new(params.seed);

    let mut current = edd_sequence(instance).into_vec();
    let mut current_value = total_tardiness(instance, &current);
    let (mut iter1, mut iter2) = (0u64, 0u64);
    let mut trace = params.record_trace.then(Vec::new);
    let mut k = Neighborhood::Swap;
    let mut candidate = current.clone();

    loop {
        candidate.clone_from(&current);
        shake_in_place(&mut candidate, k, params.pair_rule, &mut rng.shake);
        let candidate_value = descend_in_place(instance, &mut candidate, k, params.pair_rule);
        if candidate_value < current_value {
            std::mem::swap(&mut current, &mut candidate);
            current_value = candidate_value;
            iter2 = 0;
        } else {
            k = params.next_k(k);
            iter2 += 1;
        }
        iter1 += 1;
        if let Some(trace) = trace.as_mut() {
            trace.push(current_value);
        }
        if iter1 > params.iter_max || iter2 > params.iter_nip {
            break;
        }
    }

    Ok(RunResult {
        best_sequence: Sequence::from_vec_unchecked(current),
        best_value: current_value,
        iterations: iter1,
        perturbations: 0,
        elapsed: started.elapsed(),
        seed: Some(params.seed),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Job;

    fn two_jobs() -> Instance {
        Instance::new(
            "two",
            None,
            vec![Job::new(1, 3, 0, 3, 10), Job::new(2, 1, 0, 1, 10)],
        )
        .unwrap()
    }

    #[test]
    fn arbitrary_pair_rule_runs() {
        let inst = Instance::table1();
        let params = SearchParams {
            pair_rule: PairRule::ArbitraryPairs,
            ..SearchParams::with_seed(3)
        };
        let r = gvns(&inst, &params).unwrap();
        assert_eq!(r.best_value, 572);
        assert_eq!(gvns(&inst, &params).unwrap().best_sequence, r.best_sequence);
    }

    #[test]
    fn edd_table1() {
        let inst = Instance::table1();
        let seq = edd_sequence(&inst);
        assert_eq!(seq.as_slice(), &[2, 8, 1, 3, 5, 7, 4, 6]);
        assert_eq!(total_tardiness(&inst, seq.as_slice()), 959);
    }

    #[test]
    fn edd_ties_by_id() {
        let jobs = (1..=4).map(|id| Job::new(id, 3, 1, 10, 0)).collect();
        let inst = Instance::new("eq", None, jobs).unwrap();
        assert_eq!(edd_sequence(&inst).as_slice(), &[1, 2, 3, 4]);
        let one = Instance::new("one", None, vec![Job::new(1, 3, 1, 10, 0)]).unwrap();
        assert_eq!(edd_sequence(&one).as_slice(), &[1]);
    }

    #[test]
    fn params_validation() {
        assert!(SearchParams::default().validate().is_ok());
        let bad = |f: fn(&mut SearchParams)| {
            let mut p = SearchParams::default();
            f(&mut p);
            p.validate().is_err()
        };
        assert!(bad(|p| p.iter_max = 0));
        assert!(bad(|p| p.iter_nip = 0));
        assert!(bad(|p| p.iter_nip = 600));
        assert!(bad(|p| p.gamma = 0));
        assert!(bad(|p| p.gamma = 151));
        assert!(bad(|p| p.k_max = 6));
    }

    #[test]
    fn vnd_starts_at_first_listed_neighborhood() {
        let inst = two_jobs();
        let start = Sequence::new(vec![1, 2]).unwrap();
        // N3 and N5 are empty for two jobs; N1 fixes the order
        let order = [
            Neighborhood::PairExchange,
            Neighborhood::Swap,
            Neighborhood::Insertion,
            Neighborhood::TwoOpt,
            Neighborhood::CoupleInsertion,
        ];
        assert_eq!(vnd(&inst, &start, &order).as_slice(), &[2, 1]);
    }

    #[test]
    fn gvns_and_vns_on_two_jobs() {
        let inst = two_jobs();
        let p = SearchParams::with_seed(3);
        assert_eq!(gvns(&inst, &p).unwrap().best_value, 1);
        assert_eq!(vns(&inst, &p).unwrap().best_value, 1);
    }

    #[test]
    fn gvns_table1_reaches_optimum() {
        let inst = Instance::table1();
        let r = gvns(&inst, &SearchParams::with_seed(1)).unwrap();
        assert_eq!(r.best_value, 572);
        assert_eq!(total_tardiness(&inst, r.best_sequence.as_slice()), 572);
    }

    #[test]
    fn runs_are_reproducible() {
        let inst = Instance::table1();
        let p = SearchParams {
            record_trace: true,
            ..SearchParams::with_seed(42)
        };
        let a = gvns(&inst, &p).unwrap();
        let b = gvns(&inst, &p).unwrap();
        assert_eq!(
            (
                a.best_sequence.clone(),
                a.iterations,
                a.perturbations,
                a.trace.clone()
            ),
            (
                b.best_sequence.clone(),
                b.iterations,
                b.perturbations,
                b.trace.clone()
            )
        );
        let c = vns(&inst, &p).unwrap();
        let d = vns(&inst, &p).unwrap();
        assert_eq!(
            (c.best_sequence.clone(), c.iterations, c.trace.clone()),
            (d.best_sequence, d.iterations, d.trace)
        );
    }

    #[test]
    fn budget_is_respected() {
        let inst = Instance::table1();
        let p = SearchParams {
            iter_max: 30,
            iter_nip: 10,
            gamma: 5,
            ..SearchParams::with_seed(9)
        };
        let r = gvns(&inst, &p).unwrap();
        assert!(r.iterations <= p.iter_max + 1);
        let r = vns(&inst, &p).unwrap();
        assert!(r.iterations <= p.iter_max + 1);
    }
}
