//! Disjunctive 0-1 model of the problem and its LP-file export.
//!
//! Variables: `y_i_j` (binary, job `i` precedes job `j`), `z_j` (binary, job
//! `j` deteriorates), `s_j` (start time) and `T_j` (tardiness). The step
//! processing time is linearised as `a_j + b_j z_j` together with
//! `s_j - M z_j <= h_j`, which forces `z_j = 1` whenever `s_j > h_j`. The
//! reverse implication is left out: setting `z_j = 1` only lengthens the
//! schedule, so an optimal solution never does it needlessly.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Instance, JobId, Time};
use crate::schedule::ScheduleResult;

/// `max_j d_j + sum_j (a_j + b_j)`.
pub fn big_m(instance: &Instance) -> Time {
    let max_due = instance.jobs().iter().map(|j| j.d).max().unwrap_or(0);
    max_due + instance.total_deteriorated_time()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Var {
    Y(JobId, JobId),
    Z(JobId),
    S(JobId),
    T(JobId),
}

impl Var {
    pub fn is_binary(self) -> bool {
        matches!(self, Var::Y(..) | Var::Z(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::Y(i, j) => write!(f, "y_{i}_{j}"),
            Var::Z(j) => write!(f, "z_{j}"),
            Var::S(j) => write!(f, "s_{j}"),
            Var::T(j) => write!(f, "T_{j}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstraintKind {
    /// Forces the deterioration indicator on when the start passes `h_j`.
    Step,
    /// Disjunctive non-overlap of an ordered job pair.
    Ordering,
    /// Exactly one of `y_i_j`, `y_j_i`.
    Pairing,
    /// Tardiness at least completion minus due date.
    Tardiness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub name: String,
    pub kind: ConstraintKind,
    pub terms: Vec<(Var, Time)>,
    pub sense: Sense,
    pub rhs: Time,
}

impl Constraint {
    fn lhs(&self, assignment: &Assignment) -> Time {
        self.terms
            .iter()
            .map(|&(var, coef)| coef * assignment.value(var))
            .sum()
    }

    pub fn is_satisfied(&self, assignment: &Assignment) -> bool {
        let lhs = self.lhs(assignment);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MilpModel {
    pub name: String,
    pub n: usize,
    pub big_m: Time,
    pub objective: Vec<(Var, Time)>,
    pub constraints: Vec<Constraint>,
}

impl MilpModel {
    /// All decision variables in export order.
    pub fn variables(&self) -> Vec<Var> {
        let n = self.n;
        let mut vars = Vec::with_capacity(n * (n + 3));
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    vars.push(Var::Y(i, j));
                }
            }
        }
        vars.extend((1..=n).map(Var::Z));
        vars.extend((1..=n).map(Var::S));
        vars.extend((1..=n).map(Var::T));
        vars
    }

    pub fn count(&self, kind: ConstraintKind) -> usize {
        self.constraints.iter().filter(|c| c.kind == kind).count()
    }

    /// Checks every constraint and bound; returns the objective value on
    /// success or the names of the violated constraints.
    pub fn check(&self, assignment: &Assignment) -> std::result::Result<Time, Vec<String>> {
        let mut violated: Vec<String> = self
            .constraints
            .iter()
            .filter(|c| !c.is_satisfied(assignment))
            .map(|c| c.name.clone())
            .collect();
        for var in self.variables() {
            let v = assignment.value(var);
            let ok = if var.is_binary() {
                v == 0 || v == 1
            } else {
                v >= 0
            };
            if !ok {
                violated.push(format!("bound {var}"));
            }
        }
        if violated.is_empty() {
            Ok(self
                .objective
                .iter()
                .map(|&(var, coef)| coef * assignment.value(var))
                .sum())
        } else {
            Err(violated)
        }
    }
}

/// Builds the full model for a (validated) instance.
pub fn build_model(instance: &Instance) -> MilpModel {
    let n = instance.n();
    let m = big_m(instance);
    let mut constraints = Vec::new();

    for job in instance.jobs() {
        let j = job.id;
        constraints.push(Constraint {
            name: format!("step_{j}"),
            kind: ConstraintKind::Step,
            terms: vec![(Var::S(j), 1), (Var::Z(j), -m)],
            sense: Sense::Le,
            rhs: job.h,
        });
    }

    for ji in instance.jobs() {
        let i = ji.id;
        for j in 1..=n {
            if i == j {
                continue;
            }
            // s_i + a_i + b_i z_i <= s_j + M (1 - y_ij)
            let mut terms = vec![(Var::S(i), 1)];
            if ji.b != 0 {
                terms.push((Var::Z(i), ji.b));
            }
            terms.push((Var::S(j), -1));
            terms.push((Var::Y(i, j), m));
            constraints.push(Constraint {
                name: format!("order_{i}_{j}"),
                kind: ConstraintKind::Ordering,
                terms,
                sense: Sense::Le,
                rhs: m - ji.a,
            });
        }
    }

    for i in 1..=n {
        for j in i + 1..=n {
            constraints.push(Constraint {
                name: format!("pair_{i}_{j}"),
                kind: ConstraintKind::Pairing,
                terms: vec![(Var::Y(i, j), 1), (Var::Y(j, i), 1)],
                sense: Sense::Eq,
                rhs: 1,
            });
        }
    }

    for job in instance.jobs() {
        let j = job.id;
        // s_j + a_j + b_j z_j - d_j <= T_j
        let mut terms = vec![(Var::S(j), 1)];
        if job.b != 0 {
            terms.push((Var::Z(j), job.b));
        }
        terms.push((Var::T(j), -1));
        constraints.push(Constraint {
            name: format!("tardy_{j}"),
            kind: ConstraintKind::Tardiness,
            terms,
            sense: Sense::Le,
            rhs: job.d - job.a,
        });
    }

    MilpModel {
        name: instance.name().to_string(),
        n,
        big_m: m,
        objective: (1..=n).map(|j| (Var::T(j), 1)).collect(),
        constraints,
    }
}

/// Values for every model variable; binaries and times are both integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    n: usize,
    y: Vec<Time>,
    z: Vec<Time>,
    s: Vec<Time>,
    t: Vec<Time>,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment {
            n,
            y: vec![0; n * n],
            z: vec![0; n],
            s: vec![0; n],
            t: vec![0; n],
        }
    }

    /// The point induced by a no-idle schedule: precedence from the order,
    /// `z_j = 1` exactly for deteriorated jobs.
    pub fn from_schedule(instance: &Instance, schedule: &ScheduleResult) -> Self {
        let n = instance.n();
        let mut a = Assignment::zeros(n);
        for (x, &i) in schedule.order.iter().enumerate() {
            for &j in &schedule.order[x + 1..] {
                a.set(Var::Y(i, j), 1);
            }
        }
        for job in instance.jobs() {
            let j = job.id;
            a.set(Var::S(j), schedule.starts[j - 1]);
            a.set(Var::T(j), schedule.tardiness[j - 1]);
            a.set(Var::Z(j), Time::from(schedule.is_deteriorated(instance, j)));
        }
        a
    }

    fn slot(&mut self, var: Var) -> &mut Time {
        let n = self.n;
        match var {
            Var::Y(i, j) => &mut self.y[(i - 1) * n + (j - 1)],
            Var::Z(j) => &mut self.z[j - 1],
            Var::S(j) => &mut self.s[j - 1],
            Var::T(j) => &mut self.t[j - 1],
        }
    }

    pub fn set(&mut self, var: Var, value: Time) {
        *self.slot(var) = value;
    }

    pub fn value(&self, var: Var) -> Time {
        let n = self.n;
        match var {
            Var::Y(i, j) => self.y[(i - 1) * n + (j - 1)],
            Var::Z(j) => self.z[j - 1],
            Var::S(j) => self.s[j - 1],
            Var::T(j) => self.t[j - 1],
        }
    }
}

const TERMS_PER_LINE: usize = 8;

fn write_expr(out: &mut String, terms: &[(Var, Time)]) {
    for (idx, &(var, coef)) in terms.iter().enumerate() {
        if idx > 0 && idx % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if coef < 0 { "-" } else { "+" };
        let mag = coef.abs();
        if idx == 0 {
            if coef < 0 {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag == 1 {
            let _ = write!(out, "{var}");
        } else {
            let _ = write!(out, "{mag} {var}");
        }
    }
}

/// Renders the model in CPLEX LP format. Output depends only on the model,
/// so repeated exports of one instance are byte-identical.
pub fn export_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", model.name);
    let _ = writeln!(out, "\\ Jobs: {}  big-M: {}", model.n, model.big_m);
    out.push_str("Minimize\n obj: ");
    write_expr(&mut out, &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}: ", c.name);
        write_expr(&mut out, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
    }
    out.push_str("Bounds\n");
    for j in 1..=model.n {
        let _ = writeln!(out, " s_{j} >= 0");
    }
    for j in 1..=model.n {
        let _ = writeln!(out, " T_{j} >= 0");
    }
    out.push_str("Binaries\n");
    let binaries: Vec<Var> = model
        .variables()
        .into_iter()
        .filter(|v| v.is_binary())
        .collect();
    for chunk in binaries.chunks(TERMS_PER_LINE) {
        let names: Vec<String> = chunk.iter().map(Var::to_string).collect();
        let _ = writeln!(out, " {}", names.join(" "));
    }
    out.push_str("End\n");
    out
}

/// Convenience wrapper: build and export in one step.
pub fn instance_to_lp(instance: &Instance) -> String {
    export_lp(&build_model(instance))
}

pub fn write_lp(instance: &Instance, path: impl AsRef<std::path::Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, instance_to_lp(instance)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Job, Sequence};
    use crate::schedule::evaluate_schedule;

    fn pair_instance() -> Instance {
        Instance::new(
            "two",
            None,
            vec![Job::new(1, 1, 1, 5, 0), Job::new(2, 1, 1, 5, 0)],
        )
        .unwrap()
    }

    #[test]
    fn big_m_values() {
        assert_eq!(big_m(&Instance::table1()), 1152);
        let one = Instance::new("one", None, vec![Job::new(1, 1, 0, 0, 0)]).unwrap();
        assert_eq!(big_m(&one), 1);
        assert_eq!(big_m(&pair_instance()), 9);
    }

    #[test]
    fn two_job_counts() {
        let model = build_model(&pair_instance());
        let vars = model.variables();
        assert_eq!(vars.iter().filter(|v| matches!(v, Var::Y(..))).count(), 2);
        assert_eq!(vars.iter().filter(|v| matches!(v, Var::Z(_))).count(), 2);
        assert_eq!(vars.iter().filter(|v| matches!(v, Var::S(_))).count(), 2);
        assert_eq!(vars.iter().filter(|v| matches!(v, Var::T(_))).count(), 2);
        assert_eq!(model.count(ConstraintKind::Pairing), 1);
        assert_eq!(model.count(ConstraintKind::Ordering), 2);
        assert_eq!(model.count(ConstraintKind::Step), 2);
        assert_eq!(model.count(ConstraintKind::Tardiness), 2);
    }

    #[test]
    fn table1_counts() {
        let model = build_model(&Instance::table1());
        let vars = model.variables();
        assert_eq!(vars.iter().filter(|v| matches!(v, Var::Y(..))).count(), 56);
        assert_eq!(vars.len(), 56 + 3 * 8);
        assert_eq!(model.count(ConstraintKind::Pairing), 28);
    }

    #[test]
    fn table1_schedule_is_feasible() {
        let inst = Instance::table1();
        let model = build_model(&inst);
        let seq = Sequence::new(vec![3, 2, 4, 1, 5, 7, 8, 6]).unwrap();
        let schedule = evaluate_schedule(&inst, &seq).unwrap();
        let point = Assignment::from_schedule(&inst, &schedule);
        assert_eq!(model.check(&point), Ok(575));
    }

    #[test]
    fn infeasible_point_reported() {
        let inst = Instance::table1();
        let model = build_model(&inst);
        let seq = Sequence::new(vec![3, 2, 4, 1, 5, 7, 8, 6]).unwrap();
        let schedule = evaluate_schedule(&inst, &seq).unwrap();
        let mut point = Assignment::from_schedule(&inst, &schedule);
        // job 8 starts at 302 > h = 85; claiming it did not deteriorate breaks step_8
        point.set(Var::Z(8), 0);
        let err = model.check(&point).unwrap_err();
        assert!(err.contains(&"step_8".to_string()));
    }

    #[test]
    fn single_job_lp() {
        let inst = Instance::new("one", None, vec![Job::new(1, 3, 2, 1, 0)]).unwrap();
        let lp = instance_to_lp(&inst);
        assert!(lp.contains(" obj: T_1\n"));
        assert!(!lp.contains(" y_"));
        assert!(!lp.contains("order_"));
        assert!(lp.contains(" step_1: s_1 - 6 z_1 <= 0\n"));
        assert!(lp.ends_with("End\n"));
    }

    #[test]
    fn lp_is_deterministic() {
        let inst = Instance::table1();
        assert_eq!(instance_to_lp(&inst), instance_to_lp(&inst));
    }
}
