//! Random benchmark instances in six groups `S_{h}{d}`.
//!
//! Draws, in this order and from one ChaCha8 stream seeded with the
//! generation seed: `a_j` uniform on `{1..100}`; `h_j` on the group's interval relative
//! to `A = sum a_j`; `b_j` uniform on `{1..floor(100 tau)}`; `d_j` on the
//! group's interval relative to the reference makespan. An interval
//! `(0, x]` over integers is `{1..floor(x)}` and `[x, y]` is
//! `{ceil(x)..floor(y)}`.
//!
//! Suite cells get their own seeds:
//! `cell_seed = splitmix64(master ^ splitmix64(n << 8 | h_class << 4 | d_class))`.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{Instance, Job, Time};

pub const SMALL_SIZES: [usize; 5] = [8, 10, 15, 20, 25];
pub const LARGE_SIZES: [usize; 6] = [50, 60, 70, 80, 90, 100];

/// The six `(h_class, d_class)` groups in report order.
pub const GROUPS: [(u8, u8); 6] = [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    /// 1: `(0, A/2]`, 2: `[A/2, A]`, 3: `(0, A]`.
    pub h_class: u8,
    /// 1: `(0, Cmax/2]`, 2: `(0, Cmax]`.
    pub d_class: u8,
    #[serde(default = "default_tau")]
    pub tau: f64,
    pub seed: u64,
}

fn default_tau() -> f64 {
    0.5
}

impl GenSpec {
    pub fn new(n: usize, h_class: u8, d_class: u8, seed: u64) -> Self {
        GenSpec {
            n,
            h_class,
            d_class,
            tau: default_tau(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(1..=3).contains(&self.h_class) {
            return Err(Error::InvalidParameter(format!(
                "h_class {} outside 1..=3",
                self.h_class
            )));
        }
        if !(1..=2).contains(&self.d_class) {
            return Err(Error::InvalidParameter(format!(
                "d_class {} outside 1..=2",
                self.d_class
            )));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidParameter("tau must be positive".into()));
        }
        Ok(())
    }

    pub fn group_label(&self) -> String {
        group_label(self.h_class, self.d_class)
    }

    pub fn instance_name(&self) -> String {
        format!("{}_n{}_seed{}", self.group_label(), self.n, self.seed)
    }
}

pub fn group_label(h_class: u8, d_class: u8) -> String {
    format!("S_{h_class}{d_class}")
}

/// Extracts the `S_xy` group prefix from a generated instance name.
pub fn group_of(name: &str) -> Option<&str> {
    let label = name.get(..4)?;
    let bytes = label.as_bytes();
    let ok = label.starts_with("S_")
        && (b'1'..=b'3').contains(&bytes[2])
        && (b'1'..=b'2').contains(&bytes[3])
        && (name.len() == 4 || name.as_bytes()[4] == b'_');
    ok.then_some(label)
}

/// Inclusive integer support of `(0, upper]`.
fn open_zero(upper: f64) -> (Time, Time) {
    (1, upper.floor() as Time)
}

/// Inclusive integer support of `[lower, upper]`.
fn closed(lower: f64, upper: f64) -> (Time, Time) {
    (lower.ceil() as Time, upper.floor() as Time)
}

fn draw<R: Rng>(rng: &mut R, (lo, hi): (Time, Time), what: &'static str) -> Result<Time> {
    if hi < lo {
        return Err(Error::DegenerateInterval {
            what,
            lower: lo,
            upper: hi,
        });
    }
    Ok(rng.gen_range(lo..=hi))
}

/// Makespan of the no-idle schedule that orders jobs by `a_j / b_j`
/// (ties by id). Jobs with `b_j = 0` sort last.
pub fn reference_makespan(jobs: &[Job]) -> Time {
    let mut order: Vec<&Job> = jobs.iter().collect();
    order.sort_by(|x, y| ratio_cmp(x, y).then(x.id.cmp(&y.id)));
    order
        .iter()
        .fold(0, |clock, job| clock + job.processing_time_at(clock))
}

/// Compares `a_x / b_x` with `a_y / b_y` exactly; a zero penalty counts as
/// an infinite ratio.
fn ratio_cmp(x: &Job, y: &Job) -> Ordering {
    match (x.b == 0, y.b == 0) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => (x.a as i128 * y.b as i128).cmp(&(y.a as i128 * x.b as i128)),
    }
}

pub fn generate_instance(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let a: Vec<Time> = (0..n).map(|_| rng.gen_range(1..=100)).collect();
    let total_a: Time = a.iter().sum();
    let half_a = total_a as f64 / 2.0;
    let h_support = match spec.h_class {
        1 => open_zero(half_a),
        2 => closed(half_a, total_a as f64),
        _ => open_zero(total_a as f64),
    };
    let h = (0..n)
        .map(|_| draw(&mut rng, h_support, "deteriorating date"))
        .collect::<Result<Vec<_>>>()?;
    let b_support = open_zero(100.0 * spec.tau);
    let b = (0..n)
        .map(|_| draw(&mut rng, b_support, "deterioration penalty"))
        .collect::<Result<Vec<_>>>()?;

    let mut jobs: Vec<Job> = (0..n)
        .map(|i| Job::new(i + 1, a[i], b[i], 0, h[i]))
        .collect();
    let cmax = reference_makespan(&jobs) as f64;
    let d_support = match spec.d_class {
        1 => open_zero(0.5 * cmax),
        _ => open_zero(cmax),
    };
    for job in &mut jobs {
        job.d = draw(&mut rng, d_support, "due date")?;
    }
    Instance::new(spec.instance_name(), Some(spec.seed), jobs)
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn cell_seed(master: u64, n: usize, h_class: u8, d_class: u8) -> u64 {
    let key = ((n as u64) << 8) | ((h_class as u64) << 4) | d_class as u64;
    splitmix64(master ^ splitmix64(key))
}

/// The generation specs of a suite: one per size and group, sizes in the
/// given order, groups in [`GROUPS`] order.
pub fn suite_specs(sizes: &[usize], seed: u64) -> Result<Vec<GenSpec>> {
    if sizes.is_empty() {
        return Err(Error::InvalidParameter(
            "suite needs at least one size".into(),
        ));
    }
    Ok(sizes
        .iter()
        .flat_map(|&n| {
            GROUPS
                .iter()
                .map(move |&(hc, dc)| GenSpec::new(n, hc, dc, cell_seed(seed, n, hc, dc)))
        })
        .collect())
}

pub fn generate_suite(sizes: &[usize], seed: u64) -> Result<Vec<Instance>> {
    generate_suite_with(sizes, seed, Execution::default())
}

pub fn generate_suite_with(sizes: &[usize], seed: u64, exec: Execution) -> Result<Vec<Instance>> {
    let specs = suite_specs(sizes, seed)?;
    exec.map(&specs, generate_instance).into_iter().collect()
}
