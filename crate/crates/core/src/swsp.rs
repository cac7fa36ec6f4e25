//! Simple weighted search procedure (SWSP).
//!
//! For each weight triple `(w1, w2, w3)` of a grid, the job with the earliest
//! due date goes first and the remaining jobs are appended greedily by the
//! smallest weighted value `w1 d_j + w2 p_j + w3 h_j`, where `p_j` is the
//! processing time the job would actually take if started now. The best
//! greedy sequence is then refined by one pass of pairwise swaps.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{Instance, JobId, Sequence, Time};
use crate::run::RunResult;
use crate::schedule::{total_tardiness, Timeline};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightTriple {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

/// Which grid levels `l = 1..=L` are generated for each weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridSpan {
    /// `L = n`: both weight ranges are covered end to end.
    #[default]
    Full,
    /// `L = n - 1`: the top level of each weight is skipped. This is the
    /// grid that reproduces the published eight-job walkthrough
    /// (696 before the swap pass, 575 after).
    ExcludeLast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwspParams {
    pub w1_min: f64,
    pub w1_max: f64,
    pub w2_min: f64,
    pub w2_max: f64,
    /// Replaces `w3 = 1 - w1 - w2` when that is not positive.
    pub w3_fallback: f64,
    pub grid_span: GridSpan,
    /// Repeat the swap pass until it stops improving instead of running it once.
    pub swap_until_fixpoint: bool,
}

impl Default for SwspParams {
    fn default() -> Self {
        SwspParams {
            w1_min: 0.2,
            w1_max: 0.9,
            w2_min: 0.1,
            w2_max: 0.7,
            w3_fallback: 0.1,
            grid_span: GridSpan::Full,
            swap_until_fixpoint: false,
        }
    }
}

impl SwspParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.w1_min,
            self.w1_max,
            self.w2_min,
            self.w2_max,
            self.w3_fallback,
        ]
        .iter()
        .all(|w| w.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(
                "SWSP weights must be finite".into(),
            ));
        }
        if self.w1_min > self.w1_max || self.w2_min > self.w2_max {
            return Err(Error::InvalidParameter(
                "SWSP weight minimum exceeds maximum".into(),
            ));
        }
        if self.w3_fallback <= 0.0 {
            return Err(Error::InvalidParameter(
                "SWSP w3 fallback must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// All weight triples for `n` jobs, in `(l1, l2)` lexicographic order.
///
/// `w1 = w1_min + (w1_max - w1_min)(l1 - 1)/(n - 1)`, likewise `w2`, and
/// `w3 = 1 - w1 - w2` unless that is not positive.
pub fn weight_grid(n: usize, params: &SwspParams) -> Result<Vec<WeightTriple>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "weight grid needs n >= 2, got {n}"
        )));
    }
    params.validate()?;
    let levels = match params.grid_span {
        GridSpan::Full => n,
        GridSpan::ExcludeLast => n - 1,
    };
    let step = (n - 1) as f64;
    let level = |min: f64, max: f64, l: usize| min + (max - min) * (l - 1) as f64 / step;

    let mut grid = Vec::with_capacity(levels * levels);
    for l1 in 1..=levels {
        let w1 = level(params.w1_min, params.w1_max, l1);
        for l2 in 1..=levels {
            let w2 = level(params.w2_min, params.w2_max, l2);
            let mut w3 = 1.0 - w1 - w2;
            if w3 <= 0.0 {
                w3 = params.w3_fallback;
            }
            grid.push(WeightTriple { w1, w2, w3 });
        }
    }
    Ok(grid)
}

/// Greedy construction for one weight triple.
///
/// Ties on due date or on the weighted value go to the smaller job id.
pub fn greedy_construct(instance: &Instance, triple: &WeightTriple) -> Sequence {
    let n = instance.n();
    let first = instance
        .jobs()
        .iter()
        .min_by_key(|j| (j.d, j.id))
        .expect("instance is non-empty")
        .id;

    let mut remaining: Vec<JobId> = (1..=n).filter(|&id| id != first).collect();
    let mut order = Vec::with_capacity(n);
    order.push(first);
    let mut clock = instance.job(first).processing_time_at(0);

    while !remaining.is_empty() {
        let mut pick = 0;
        let mut pick_value = f64::INFINITY;
        // `remaining` stays sorted by id, so strict `<` keeps the smaller id on ties
        for (idx, &id) in remaining.iter().enumerate() {
            let job = instance.job(id);
            let p = job.processing_time_at(clock) as f64;
            let m = triple.w1 * job.d as f64 + triple.w2 * p + triple.w3 * job.h as f64;
            if m < pick_value {
                pick = idx;
                pick_value = m;
            }
        }
        let id = remaining.remove(pick);
        clock += instance.job(id).processing_time_at(clock);
        order.push(id);
    }
    Sequence::from_vec_unchecked(order)
}

fn swap_pass_in_place(instance: &Instance, order: &mut [JobId]) -> bool {
    let n = order.len();
    let mut timeline = Timeline::new(instance, order);
    let mut current = timeline.total();
    let mut improved = false;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            order.swap(i, j);
            let from = i.min(j);
            let value = timeline.total_from(instance, order, from);
            if value < current {
                current = value;
                timeline.rebuild_from(instance, order, from);
                improved = true;
            } else {
                order.swap(i, j);
            }
        }
    }
    improved
}

/// One full `i = 1..n, j = 1..n, i != j` pass; each swap is kept as soon
/// as it strictly lowers total tardiness.
pub fn pairwise_swap_pass(instance: &Instance, sequence: &Sequence) -> Sequence {
    let mut order = sequence.as_slice().to_vec();
    swap_pass_in_place(instance, &mut order);
    Sequence::from_vec_unchecked(order)
}

/// Both stages of an SWSP run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwspReport {
    /// Best greedy sequence over the grid (first found on ties).
    pub greedy_sequence: Sequence,
    pub greedy_value: Time,
    /// Grid position of the triple that built `greedy_sequence`.
    pub greedy_triple: Option<WeightTriple>,
    pub result: RunResult,
}

pub fn swsp(instance: &Instance, params: &SwspParams) -> Result<RunResult> {
    Ok(swsp_detailed(instance, params, Execution::default())?.result)
}

/// Runs SWSP and reports the weighted-search stage separately.
///
/// Grid triples may be built concurrently; the best is still chosen in grid
/// order, so the outcome does not depend on `exec`.
pub fn swsp_detailed(
    instance: &Instance,
    params: &SwspParams,
    exec: Execution,
) -> Result<SwspReport> {
    let started = Instant::now();
    params.validate()?;
    if instance.n() < 2 {
        let only = Sequence::identity(instance.n());
        let value = total_tardiness(instance, only.as_slice());
        return Ok(SwspReport {
            greedy_sequence: only.clone(),
            greedy_value: value,
            greedy_triple: None,
            result: RunResult::deterministic(only, value, started.elapsed()),
        });
    }

    let grid = weight_grid(instance.n(), params)?;
    let candidates = exec.map(&grid, |triple| {
        let seq = greedy_construct(instance, triple);
        let value = total_tardiness(instance, seq.as_slice());
        (seq, value)
    });

    let mut best: Option<(usize, Time)> = None;
    for (idx, (_, value)) in candidates.iter().enumerate() {
        if best.is_none_or(|(_, v)| *value < v) {
            best = Some((idx, *value));
        }
    }
    let (best_idx, greedy_value) = best.expect("grid is non-empty");
    let greedy_sequence = candidates[best_idx].0.clone();

    let mut order = greedy_sequence.as_slice().to_vec();
    while swap_pass_in_place(instance, &mut order) && params.swap_until_fixpoint {}
    let value = total_tardiness(instance, &order);

    Ok(SwspReport {
        greedy_sequence,
        greedy_value,
        greedy_triple: Some(grid[best_idx]),
        result: RunResult::deterministic(
            Sequence::from_vec_unchecked(order),
            value,
            started.elapsed(),
        ),
    })
}
