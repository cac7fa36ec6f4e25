//! No-idle schedule evaluation and the pairwise dominance check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{check_permutation, Instance, JobId, Sequence, Time};

/// Per-job timing of a sequence scheduled without idle time.
///
/// All per-job vectors are indexed by `id - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleResult {
    pub order: Vec<JobId>,
    pub starts: Vec<Time>,
    pub processing: Vec<Time>,
    pub completions: Vec<Time>,
    pub tardiness: Vec<Time>,
    pub total: Time,
}

impl ScheduleResult {
    pub fn tardiness_by_position(&self) -> Vec<Time> {
        self.order
            .iter()
            .map(|&id| self.tardiness[id - 1])
            .collect()
    }

    pub fn is_deteriorated(&self, instance: &Instance, id: JobId) -> bool {
        self.starts[id - 1] > instance.job(id).h
    }

    pub fn makespan(&self) -> Time {
        self.order
            .last()
            .map(|&id| self.completions[id - 1])
            .unwrap_or(0)
    }
}

/// Schedules `sequence` from time zero with no idle time and reports every
/// job's start, actual processing time, completion and tardiness.
pub fn evaluate_schedule(instance: &Instance, sequence: &Sequence) -> Result<ScheduleResult> {
    evaluate_order(instance, sequence.as_slice())
}

/// Like [`evaluate_schedule`] but on a raw id slice, which is validated here.
pub fn evaluate_order(instance: &Instance, order: &[JobId]) -> Result<ScheduleResult> {
    let n = instance.n();
    if order.len() != n {
        return Err(Error::InvalidSequence(format!(
            "sequence has {} jobs, instance has {n}",
            order.len()
        )));
    }
    check_permutation(order)?;

    let mut result = ScheduleResult {
        order: order.to_vec(),
        starts: vec![0; n],
        processing: vec![0; n],
        completions: vec![0; n],
        tardiness: vec![0; n],
        total: 0,
    };
    let mut clock = 0;
    for &id in order {
        let job = instance.job(id);
        let p = job.processing_time_at(clock);
        let c = clock + p;
        let t = (c - job.d).max(0);
        let slot = id - 1;
        result.starts[slot] = clock;
        result.processing[slot] = p;
        result.completions[slot] = c;
        result.tardiness[slot] = t;
        result.total += t;
        clock = c;
    }
    Ok(result)
}

/// Total tardiness of an order assumed to be a valid permutation.
///
/// This is the hot path of every search procedure; it does not allocate.
#[inline]
pub fn total_tardiness(instance: &Instance, order: &[JobId]) -> Time {
    let (_, total) = advance(instance, order, 0, 0);
    total
}

/// Schedules `order` starting at `clock` and returns the final completion
/// time together with `tardiness` plus the tardiness accumulated on the way.
#[inline]
pub(crate) fn advance(
    instance: &Instance,
    order: &[JobId],
    mut clock: Time,
    mut tardiness: Time,
) -> (Time, Time) {
    for &id in order {
        let job = instance.job(id);
        clock += job.processing_time_at(clock);
        if clock > job.d {
            tardiness += clock - job.d;
        }
    }
    (clock, tardiness)
}

/// Cached completion times and running tardiness of one sequence, so that a
/// candidate sharing its first `k` positions can be scored from position `k`.
#[derive(Debug, Clone, Default)]
pub(crate) struct Timeline {
    /// `clock[k]` is the completion time of the first `k` jobs.
    clock: Vec<Time>,
    /// `tardy[k]` is the tardiness of the first `k` jobs.
    tardy: Vec<Time>,
}

impl Timeline {
    pub(crate) fn new(instance: &Instance, order: &[JobId]) -> Self {
        let mut timeline = Timeline::default();
        timeline.rebuild(instance, order);
        timeline
    }

    pub(crate) fn rebuild(&mut self, instance: &Instance, order: &[JobId]) {
        self.rebuild_from(instance, order, 0);
    }

    /// Recomputes the cache for positions after `from`, keeping the rest.
    pub(crate) fn rebuild_from(&mut self, instance: &Instance, order: &[JobId], from: usize) {
        let n = order.len();
        self.clock.resize(n + 1, 0);
        self.tardy.resize(n + 1, 0);
        if from == 0 {
            self.clock[0] = 0;
            self.tardy[0] = 0;
        }
        for (k, &id) in order.iter().enumerate().skip(from) {
            let job = instance.job(id);
            let c = self.clock[k] + job.processing_time_at(self.clock[k]);
            self.clock[k + 1] = c;
            self.tardy[k + 1] = self.tardy[k] + (c - job.d).max(0);
        }
    }

    pub(crate) fn total(&self) -> Time {
        *self.tardy.last().unwrap_or(&0)
    }

    /// Total tardiness of `candidate`, which must agree with the cached
    /// order on positions `..from`.
    #[inline]
    pub(crate) fn total_from(&self, instance: &Instance, candidate: &[JobId], from: usize) -> Time {
        let (_, total) = advance(
            instance,
            &candidate[from..],
            self.clock[from],
            self.tardy[from],
        );
        total
    }
}

/// Which pairwise dominance rule a pair violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DominanceRule {
    /// Both jobs start no later than their deteriorating dates.
    NonDeteriorated,
    /// Both jobs start after their deteriorating dates.
    Deteriorated,
}

/// An ordered pair where `earlier` precedes a job `later` that dominates it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DominanceViolation {
    pub earlier: JobId,
    pub later: JobId,
    pub rule: DominanceRule,
}

/// Lists every ordered pair `(k before j)` where `j` dominates `k` under the
/// pairwise interchange rules and the schedule nevertheless runs `k` first.
///
/// Pairs with an identical processing key and due date are not reported.
pub fn check_dominance(instance: &Instance, schedule: &ScheduleResult) -> Vec<DominanceViolation> {
    let order = &schedule.order;
    let mut violations = Vec::new();
    for (x, &k) in order.iter().enumerate() {
        let job_k = instance.job(k);
        let k_late = schedule.is_deteriorated(instance, k);
        for &j in &order[x + 1..] {
            let job_j = instance.job(j);
            let j_late = schedule.is_deteriorated(instance, j);
            let rule = match (k_late, j_late) {
                (false, false) => DominanceRule::NonDeteriorated,
                (true, true) => DominanceRule::Deteriorated,
                _ => continue,
            };
            let (pj, pk) = match rule {
                DominanceRule::NonDeteriorated => (job_j.a, job_k.a),
                DominanceRule::Deteriorated => {
                    (job_j.deteriorated_time(), job_k.deteriorated_time())
                }
            };
            if pj <= pk && job_j.d <= job_k.d && (pj, job_j.d) != (pk, job_k.d) {
                violations.push(DominanceViolation {
                    earlier: k,
                    later: j,
                    rule,
                });
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Job;

    fn seq(ids: &[JobId]) -> Sequence {
        Sequence::new(ids.to_vec()).unwrap()
    }

    #[test]
    fn table1_final_swsp_schedule() {
        let inst = Instance::table1();
        let r = evaluate_schedule(&inst, &seq(&[3, 2, 4, 1, 5, 7, 8, 6])).unwrap();
        assert_eq!(r.total, 575);
        assert_eq!(
            r.tardiness_by_position(),
            vec![0, 3, 0, 56, 64, 87, 317, 48]
        );
        // job 8 starts at 302 and deteriorates
        assert_eq!(r.starts[7], 302);
        assert_eq!(r.processing[7], 108);
    }

    #[test]
    fn table1_other_worked_values() {
        let inst = Instance::table1();
        let first = evaluate_schedule(&inst, &seq(&[2, 8, 3, 4, 6, 5, 1, 7])).unwrap();
        assert_eq!(first.total, 1291);
        let weighted = evaluate_schedule(&inst, &seq(&[2, 3, 1, 5, 8, 4, 7, 6])).unwrap();
        assert_eq!(weighted.total, 696);
    }

    #[test]
    fn single_job_on_time() {
        let inst = Instance::new("one", None, vec![Job::new(1, 5, 3, 100, 0)]).unwrap();
        let r = evaluate_schedule(&inst, &seq(&[1])).unwrap();
        assert_eq!(r.total, 0);
        assert_eq!(r.processing[0], 5);
    }

    #[test]
    fn rejects_wrong_length() {
        let inst = Instance::table1();
        assert!(evaluate_order(&inst, &[1, 2, 3]).is_err());
        assert!(evaluate_order(&inst, &[1, 2, 3, 4, 5, 6, 7, 7]).is_err());
    }

    #[test]
    fn no_idle_chain() {
        let inst = Instance::table1();
        let r = evaluate_schedule(&inst, &seq(&[8, 7, 6, 5, 4, 3, 2, 1])).unwrap();
        let mut prev = 0;
        for &id in &r.order {
            assert_eq!(r.starts[id - 1], prev);
            prev = r.completions[id - 1];
        }
        assert_eq!(r.processing.iter().sum::<Time>(), r.makespan());
    }

    #[test]
    fn timeline_matches_full_evaluation() {
        let inst = Instance::table1();
        let base = [3, 2, 4, 1, 5, 7, 8, 6];
        let timeline = Timeline::new(&inst, &base);
        assert_eq!(timeline.total(), 575);
        let cand = [3, 2, 4, 6, 8, 7, 5, 1];
        assert_eq!(
            timeline.total_from(&inst, &cand, 3),
            total_tardiness(&inst, &cand)
        );
    }

    #[test]
    fn dominance_two_jobs() {
        let inst = Instance::new(
            "pair",
            None,
            vec![Job::new(1, 1, 0, 1, 100), Job::new(2, 2, 0, 2, 100)],
        )
        .unwrap();
        let r = evaluate_schedule(&inst, &seq(&[2, 1])).unwrap();
        let v = check_dominance(&inst, &r);
        assert_eq!(
            v,
            vec![DominanceViolation {
                earlier: 2,
                later: 1,
                rule: DominanceRule::NonDeteriorated
            }]
        );
        let ok = evaluate_schedule(&inst, &seq(&[1, 2])).unwrap();
        assert!(check_dominance(&inst, &ok).is_empty());
    }

    #[test]
    fn dominance_ignores_ties_and_mixed_pairs() {
        let tied = Instance::new(
            "tied",
            None,
            vec![Job::new(1, 3, 0, 5, 100), Job::new(2, 3, 0, 5, 100)],
        )
        .unwrap();
        let r = evaluate_schedule(&tied, &seq(&[2, 1])).unwrap();
        assert!(check_dominance(&tied, &r).is_empty());

        // job 2 starts at 10 > h = 0, job 1 is on time: rules do not apply
        let mixed = Instance::new(
            "mixed",
            None,
            vec![Job::new(1, 10, 5, 50, 0), Job::new(2, 1, 0, 1, 0)],
        )
        .unwrap();
        let r = evaluate_schedule(&mixed, &seq(&[1, 2])).unwrap();
        assert!(check_dominance(&mixed, &r).is_empty());
    }

    #[test]
    fn dominance_deteriorated_pair() {
        // both jobs start after h = 0 once a leading job has run
        let inst = Instance::new(
            "late",
            None,
            vec![
                Job::new(1, 1, 0, 0, 0),
                Job::new(2, 5, 5, 20, 0),
                Job::new(3, 4, 1, 10, 0),
            ],
        )
        .unwrap();
        let r = evaluate_schedule(&inst, &seq(&[1, 2, 3])).unwrap();
        let v = check_dominance(&inst, &r);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, DominanceRule::Deteriorated);
        assert_eq!((v[0].earlier, v[0].later), (2, 3));
    }

    #[test]
    fn single_job_has_no_pairs() {
        let inst = Instance::new("one", None, vec![Job::new(1, 5, 3, 1, 0)]).unwrap();
        let r = evaluate_schedule(&inst, &seq(&[1])).unwrap();
        assert!(check_dominance(&inst, &r).is_empty());
    }
}
