//! Single-machine total tardiness scheduling with step-deteriorating jobs.
//!
//! A job `j` takes its basic time `a_j` when it starts no later than its
//! deteriorating date `h_j` and `a_j + b_j` otherwise. Jobs run back to back
//! from time zero and the objective is the total tardiness
//! `sum_j max(0, C_j - d_j)`.
//!
//! The crate provides:
//!
//! - [`schedule`]: the exact integer evaluator and a pairwise dominance check,
//! - [`exact`]: brute-force enumeration and a depth-first branch and bound,
//! - [`swsp`]: the simple weighted search constructive heuristic,
//! - [`neighborhoods`] and [`metaheuristics`]: five move neighborhoods, VND,
//!   GVNS with 3-opt restarts, and a plain VNS,
//! - [`milp`]: the disjunctive 0-1 model exported as an LP file,
//! - [`generator`] and [`harness`]: benchmark instances and reports.
//!
//! With the default `parallel` feature, brute force, the SWSP grid and
//! benchmark batches use rayon. Results never depend on the execution mode.

pub mod error;
pub mod exact;
pub mod exec;
pub mod generator;
pub mod harness;
pub mod metaheuristics;
pub mod milp;
pub mod model;
pub mod neighborhoods;
mod run;
pub mod schedule;
pub mod swsp;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{actual_processing_time, validate_jobs, Instance, Job, JobId, Sequence, Time};
pub use run::RunResult;
pub use schedule::{check_dominance, evaluate_schedule, ScheduleResult};
