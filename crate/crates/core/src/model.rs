//! Problem data: jobs, instances and job sequences.
//!
//! Times are integers throughout. An [`Instance`] can only be built from jobs
//! that pass [`validate_jobs`], so downstream code indexes jobs by `id - 1`
//! without re-checking.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer time unit used for processing times, dates and tardiness.
pub type Time = i64;

/// 1-based job identifier.
pub type JobId = usize;

/// A job with a step-deteriorating processing time.
///
/// The job takes `a` time units if it starts no later than `h`, and `a + b`
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    /// Basic processing time.
    pub a: Time,
    /// Deterioration penalty.
    pub b: Time,
    /// Due date.
    pub d: Time,
    /// Deteriorating date.
    pub h: Time,
}

impl Job {
    pub fn new(id: JobId, a: Time, b: Time, d: Time, h: Time) -> Self {
        Job { id, a, b, d, h }
    }

    /// Processing time incurred when the job starts at `start`.
    ///
    /// The boundary is inclusive: starting exactly at `h` still costs `a`.
    #[inline]
    pub fn processing_time_at(&self, start: Time) -> Time {
        if start <= self.h {
            self.a
        } else {
            self.a + self.b
        }
    }

    #[inline]
    pub fn deteriorated_time(&self) -> Time {
        self.a + self.b
    }
}

/// Free-function form of [`Job::processing_time_at`].
pub fn actual_processing_time(job: &Job, start: Time) -> Time {
    job.processing_time_at(start)
}

/// One problem violation found by [`validate_jobs`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Offending job id, when the violation concerns a single job.
    pub job: Option<JobId>,
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.job {
            Some(id) => write!(f, "job {id}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, job: Option<JobId>, field: &'static str, message: impl Into<String>) {
        self.violations.push(Violation {
            job,
            field,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks every job and instance-level invariant and lists all violations.
///
/// Besides field ranges and the `{1..n}` id set, the total `n * sum(a + b)`
/// must stay below `2^63` so that no tardiness computation can overflow.
pub fn validate_jobs(jobs: &[Job]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = jobs.len();
    if n == 0 {
        report.push(None, "jobs", "instance must contain at least one job");
        return report;
    }

    let mut seen = HashSet::with_capacity(n);
    for job in jobs {
        if job.id < 1 || job.id > n {
            report.push(Some(job.id), "id", format!("id must lie in 1..={n}"));
        } else if !seen.insert(job.id) {
            report.push(Some(job.id), "id", "duplicate id");
        }
        if job.a < 1 {
            report.push(Some(job.id), "a", "a must be ≥ 1");
        }
        if job.b < 0 {
            report.push(Some(job.id), "b", "b must be ≥ 0");
        }
        if job.d < 0 {
            report.push(Some(job.id), "d", "d must be ≥ 0");
        }
        if job.h < 0 {
            report.push(Some(job.id), "h", "h must be ≥ 0");
        }
    }

    if report.is_valid() {
        let total = jobs
            .iter()
            .try_fold(0i64, |acc, j| acc.checked_add(j.a)?.checked_add(j.b));
        let capped = total.and_then(|t| t.checked_mul(n as i64));
        if capped.is_none() {
            report.push(None, "jobs", "n * sum(a + b) must be below 2^63");
        }
    }
    report
}

/// A validated problem instance.
///
/// Jobs are stored sorted by id, so job `id` lives at index `id - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRecord", into = "InstanceRecord")]
pub struct Instance {
    name: String,
    seed: Option<u64>,
    jobs: Vec<Job>,
}

/// The on-disk JSON shape of an instance, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub name: String,
    pub seed: Option<u64>,
    pub jobs: Vec<Job>,
}

impl TryFrom<InstanceRecord> for Instance {
    type Error = Error;

    fn try_from(record: InstanceRecord) -> Result<Self> {
        Instance::new(record.name, record.seed, record.jobs)
    }
}

impl From<Instance> for InstanceRecord {
    fn from(instance: Instance) -> Self {
        InstanceRecord {
            name: instance.name,
            seed: instance.seed,
            jobs: instance.jobs,
        }
    }
}

impl Instance {
    pub fn new(name: impl Into<String>, seed: Option<u64>, mut jobs: Vec<Job>) -> Result<Self> {
        let report = validate_jobs(&jobs);
        if !report.is_valid() {
            return Err(Error::InvalidInstance(report));
        }
        jobs.sort_by_key(|j| j.id);
        Ok(Instance {
            name: name.into(),
            seed,
            jobs,
        })
    }

    /// Builds an instance from parallel `(a, b, d, h)` columns, numbering
    /// jobs from 1.
    pub fn from_columns(
        name: impl Into<String>,
        a: &[Time],
        b: &[Time],
        d: &[Time],
        h: &[Time],
    ) -> Result<Self> {
        let n = a.len();
        if b.len() != n || d.len() != n || h.len() != n {
            return Err(Error::InvalidParameter("column lengths differ".to_string()));
        }
        let jobs = (0..n)
            .map(|i| Job::new(i + 1, a[i], b[i], d[i], h[i]))
            .collect();
        Instance::new(name, None, jobs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    /// Job with the given 1-based id. Panics on an out-of-range id.
    #[inline]
    pub fn job(&self, id: JobId) -> &Job {
        &self.jobs[id - 1]
    }

    /// Upper bound on any completion time: every job deteriorated.
    pub fn total_deteriorated_time(&self) -> Time {
        self.jobs.iter().map(Job::deteriorated_time).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Instance::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// The eight-job instance used as the running example in the literature
    /// on this problem.
    pub fn table1() -> Self {
        Instance::from_columns(
            "table1",
            &[49, 44, 45, 31, 51, 52, 82, 80],
            &[33, 19, 41, 27, 18, 47, 44, 28],
            &[113, 86, 114, 218, 156, 461, 215, 93],
            &[271, 255, 91, 131, 205, 101, 367, 85],
        )
        .expect("built-in example data is valid")
    }
}

/// A processing order: a permutation of the job ids `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<JobId>", into = "Vec<JobId>")]
pub struct Sequence(Vec<JobId>);

impl Sequence {
    pub fn new(order: Vec<JobId>) -> Result<Self> {
        check_permutation(&order)?;
        Ok(Sequence(order))
    }

    /// Validates that `order` is a permutation of exactly `1..=n`.
    pub fn for_instance(order: Vec<JobId>, instance: &Instance) -> Result<Self> {
        if order.len() != instance.n() {
            return Err(Error::InvalidSequence(format!(
                "sequence has {} jobs, instance has {}",
                order.len(),
                instance.n()
            )));
        }
        Sequence::new(order)
    }

    pub(crate) fn from_vec_unchecked(order: Vec<JobId>) -> Self {
        debug_assert!(check_permutation(&order).is_ok());
        Sequence(order)
    }

    pub fn identity(n: usize) -> Self {
        Sequence((1..=n).collect())
    }

    pub fn as_slice(&self) -> &[JobId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<JobId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a comma-separated id list such as `3,2,4,1`.
    pub fn parse(text: &str) -> Result<Self> {
        let order = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<JobId>()
                    .map_err(|_| Error::InvalidSequence(format!("not a job id: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Sequence::new(order)
    }
}

impl TryFrom<Vec<JobId>> for Sequence {
    type Error = Error;

    fn try_from(order: Vec<JobId>) -> Result<Self> {
        Sequence::new(order)
    }
}

impl From<Sequence> for Vec<JobId> {
    fn from(seq: Sequence) -> Self {
        seq.0
    }
}

impl AsRef<[JobId]> for Sequence {
    fn as_ref(&self) -> &[JobId] {
        &self.0
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|id| id.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

pub(crate) fn check_permutation(order: &[JobId]) -> Result<()> {
    let n = order.len();
    let mut seen = vec![false; n + 1];
    for &id in order {
        if id < 1 || id > n {
            return Err(Error::InvalidSequence(format!(
                "job id {id} outside 1..={n}"
            )));
        }
        if std::mem::replace(&mut seen[id], true) {
            return Err(Error::InvalidSequence(format!("job id {id} repeated")));
        }
    }
    Ok(())
}
