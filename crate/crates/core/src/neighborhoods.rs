//! The five move neighborhoods, their first-improvement descents, random
//! shaking moves and the direction-preserving 3-opt perturbation.
//!
//! Positions are 0-based internally. [`two_opt_move`] takes 1-based
//! positions to match how the move is usually stated.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, JobId, Sequence};
use crate::schedule::Timeline;

/// Neighborhood structure `N1`..`N5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Neighborhood {
    /// Exchange two jobs.
    Swap = 1,
    /// Move one job to another position.
    Insertion = 2,
    /// Exchange two disjoint blocks of two adjacent jobs.
    PairExchange = 3,
    /// Move a block of two adjacent jobs to another block position.
    CoupleInsertion = 4,
    /// Reverse the segment between two jobs at least three positions apart.
    TwoOpt = 5,
}

impl Neighborhood {
    pub const ALL: [Neighborhood; 5] = [
        Neighborhood::Swap,
        Neighborhood::Insertion,
        Neighborhood::PairExchange,
        Neighborhood::CoupleInsertion,
        Neighborhood::TwoOpt,
    ];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Neighborhood::Swap),
            2 => Ok(Neighborhood::Insertion),
            3 => Ok(Neighborhood::PairExchange),
            4 => Ok(Neighborhood::CoupleInsertion),
            5 => Ok(Neighborhood::TwoOpt),
            _ => Err(Error::InvalidParameter(format!(
                "neighborhood index {k} outside 1..=5"
            ))),
        }
    }

    /// The cyclic successor `k mod 5 + 1`.
    pub fn next(self) -> Self {
        Neighborhood::from_index(self.index() % 5 + 1).expect("index in range")
    }

    /// Number of moves in this neighborhood for a sequence of length `n`.
    pub fn size(self, n: usize) -> usize {
        match self {
            Neighborhood::Swap => n * n.saturating_sub(1) / 2,
            Neighborhood::Insertion => n * n.saturating_sub(1),
            // block starts i < j with j >= i + 2, both in 0..n-1
            Neighborhood::PairExchange => {
                let starts = n.saturating_sub(1);
                starts.saturating_sub(1) * starts.saturating_sub(2) / 2
            }
            Neighborhood::CoupleInsertion => {
                let starts = n.saturating_sub(1);
                starts * starts.saturating_sub(1)
            }
            Neighborhood::TwoOpt => {
                let m = n.saturating_sub(3);
                m * (m + 1) / 2
            }
        }
    }
}

impl TryFrom<u8> for Neighborhood {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        Neighborhood::from_index(k)
    }
}

impl From<Neighborhood> for u8 {
    fn from(k: Neighborhood) -> Self {
        k.index()
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.index())
    }
}

/// Move set of `N3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairRule {
    /// Exchange two disjoint adjacent couples `(i, i+1)` and `(j, j+1)`.
    #[default]
    AdjacentCouples,
    /// Any two disjoint transpositions: swap positions `a, b` and `c, d`,
    /// all four distinct. Contains the adjacent reading as a subset.
    ArbitraryPairs,
}

impl Neighborhood {
    /// Number of moves of `k` for length `n` under `rule`.
    pub fn size_with(self, n: usize, rule: PairRule) -> usize {
        match (self, rule) {
            (Neighborhood::PairExchange, PairRule::ArbitraryPairs) => {
                // three pairings of every 4-subset
                if n < 4 {
                    0
                } else {
                    n * (n - 1) * (n - 2) * (n - 3) / 8
                }
            }
            _ => self.size(n),
        }
    }
}

/// A single move, positions 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Swap {
        i: usize,
        j: usize,
    },
    /// Remove the job at `from`; it ends up at index `to`.
    Insert {
        from: usize,
        to: usize,
    },
    /// Exchange blocks starting at `i` and `j`, `j >= i + 2`.
    PairExchange {
        i: usize,
        j: usize,
    },
    /// Remove the block at `from`, `from + 1`; it ends up at `to`, `to + 1`.
    CoupleInsert {
        from: usize,
        to: usize,
    },
    /// Keep `..=i`, reverse `i + 1..=j`, keep the rest; `j >= i + 3`.
    TwoOpt {
        i: usize,
        j: usize,
    },
    /// Swap `a, b` and swap `c, d`; `a` is the smallest of the four.
    DoubleSwap {
        a: usize,
        b: usize,
        c: usize,
        d: usize,
    },
}

impl Move {
    /// First position whose job can differ after the move.
    pub fn first_changed(self) -> usize {
        match self {
            Move::Swap { i, .. } | Move::PairExchange { i, .. } => i,
            Move::Insert { from, to } | Move::CoupleInsert { from, to } => from.min(to),
            Move::TwoOpt { i, .. } => i + 1,
            Move::DoubleSwap { a, .. } => a,
        }
    }

    pub fn apply(self, order: &mut [JobId]) {
        match self {
            Move::Swap { i, j } => order.swap(i, j),
            Move::Insert { from, to } => {
                if from < to {
                    order[from..=to].rotate_left(1);
                } else {
                    order[to..=from].rotate_right(1);
                }
            }
            Move::PairExchange { i, j } => {
                order.swap(i, j);
                order.swap(i + 1, j + 1);
            }
            Move::CoupleInsert { from, to } => {
                if from < to {
                    order[from..=to + 1].rotate_left(2);
                } else {
                    order[to..=from + 1].rotate_right(2);
                }
            }
            Move::TwoOpt { i, j } => order[i + 1..=j].reverse(),
            Move::DoubleSwap { a, b, c, d } => {
                order.swap(a, b);
                order.swap(c, d);
            }
        }
    }
}

/// Calls `visit` on every move of `k` in canonical (row-major) order until
/// it returns `true`; reports whether it did.
pub fn for_each_move(k: Neighborhood, n: usize, visit: impl FnMut(Move) -> bool) -> bool {
    for_each_move_with(k, PairRule::default(), n, visit)
}

pub fn for_each_move_with(
    k: Neighborhood,
    rule: PairRule,
    n: usize,
    mut visit: impl FnMut(Move) -> bool,
) -> bool {
    if (k, rule) == (Neighborhood::PairExchange, PairRule::ArbitraryPairs) {
        for a in 0..n {
            for b in a + 1..n {
                for c in (a + 1..n).filter(|&c| c != b) {
                    for d in (c + 1..n).filter(|&d| d != b) {
                        if visit(Move::DoubleSwap { a, b, c, d }) {
                            return true;
                        }
                    }
                }
            }
        }
        return false;
    }
    match k {
        Neighborhood::Swap => {
            for i in 0..n {
                for j in i + 1..n {
                    if visit(Move::Swap { i, j }) {
                        return true;
                    }
                }
            }
        }
        Neighborhood::Insertion => {
            for from in 0..n {
                for to in 0..n {
                    if from != to && visit(Move::Insert { from, to }) {
                        return true;
                    }
                }
            }
        }
        Neighborhood::PairExchange => {
            for i in 0..n.saturating_sub(1) {
                for j in i + 2..n.saturating_sub(1) {
                    if visit(Move::PairExchange { i, j }) {
                        return true;
                    }
                }
            }
        }
        Neighborhood::CoupleInsertion => {
            let starts = n.saturating_sub(1);
            for from in 0..starts {
                for to in 0..starts {
                    if from != to && visit(Move::CoupleInsert { from, to }) {
                        return true;
                    }
                }
            }
        }
        Neighborhood::TwoOpt => {
            for i in 0..n {
                for j in i + 3..n {
                    if visit(Move::TwoOpt { i, j }) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// In-place first-improvement descent on a raw order. Returns the final
/// total tardiness.
pub(crate) fn descend_in_place(
    instance: &Instance,
    order: &mut [JobId],
    k: Neighborhood,
    rule: PairRule,
) -> i64 {
    let n = order.len();
    let mut timeline = Timeline::new(instance, order);
    let mut current = timeline.total();
    let mut scratch = order.to_vec();
    loop {
        let mut accepted = None;
        for_each_move_with(k, rule, n, |mv| {
            mv.apply(&mut scratch);
            let from = mv.first_changed();
            let value = timeline.total_from(instance, &scratch, from);
            if value < current {
                accepted = Some((from, value));
                return true;
            }
            scratch[from..].copy_from_slice(&order[from..]);
            false
        });
        match accepted {
            Some((from, value)) => {
                order[from..].copy_from_slice(&scratch[from..]);
                timeline.rebuild_from(instance, order, from);
                current = value;
            }
            None => return current,
        }
    }
}

/// First-improvement descent in neighborhood `k`: scan moves in canonical
/// order, take the first strictly improving one, restart the scan, and stop
/// once a full scan finds nothing.
pub fn descend(instance: &Instance, sequence: &Sequence, k: Neighborhood) -> Sequence {
    descend_with(instance, sequence, k, PairRule::default())
}

pub fn descend_with(
    instance: &Instance,
    sequence: &Sequence,
    k: Neighborhood,
    rule: PairRule,
) -> Sequence {
    let mut order = sequence.as_slice().to_vec();
    descend_in_place(instance, &mut order, k, rule);
    Sequence::from_vec_unchecked(order)
}

/// 2-opt on 1-based positions: with `I = min(i, j)`, `J = max(i, j)`, keep
/// positions `1..=I`, reverse `I+1..=J`, keep the rest.
pub fn two_opt_move(sequence: &Sequence, i: usize, j: usize) -> Result<Sequence> {
    let n = sequence.len();
    let (lo, hi) = (i.min(j), i.max(j));
    if lo < 1 || hi > n {
        return Err(Error::InvalidParameter(format!(
            "2-opt positions ({i}, {j}) outside 1..={n}"
        )));
    }
    if hi - lo < 3 {
        return Err(Error::InvalidParameter(format!(
            "2-opt positions ({i}, {j}) must be at least 3 apart"
        )));
    }
    let mut order = sequence.as_slice().to_vec();
    Move::TwoOpt {
        i: lo - 1,
        j: hi - 1,
    }
    .apply(&mut order);
    Ok(Sequence::from_vec_unchecked(order))
}

/// Two distinct values in `0..m`, ordered, uniformly over unordered pairs.
fn distinct_pair<R: Rng + ?Sized>(rng: &mut R, m: usize) -> (usize, usize) {
    let a = rng.gen_range(0..m);
    let mut b = rng.gen_range(0..m - 1);
    if b >= a {
        b += 1;
    }
    (a.min(b), a.max(b))
}

/// One uniformly random move of type `k`, or `None` when the neighborhood
/// is empty for length `n`.
pub fn random_move<R: Rng + ?Sized>(k: Neighborhood, n: usize, rng: &mut R) -> Option<Move> {
    random_move_with(k, PairRule::default(), n, rng)
}

pub fn random_move_with<R: Rng + ?Sized>(
    k: Neighborhood,
    rule: PairRule,
    n: usize,
    rng: &mut R,
) -> Option<Move> {
    if k.size_with(n, rule) == 0 {
        return None;
    }
    if (k, rule) == (Neighborhood::PairExchange, PairRule::ArbitraryPairs) {
        // uniform 4-subset, then one of its three pairings
        let mut picks = rand::seq::index::sample(rng, n, 4).into_vec();
        picks.sort_unstable();
        let [p, q, r, t] = [picks[0], picks[1], picks[2], picks[3]];
        let (b, c, d) = match rng.gen_range(0..3) {
            0 => (q, r, t),
            1 => (r, q, t),
            _ => (t, q, r),
        };
        return Some(Move::DoubleSwap { a: p, b, c, d });
    }
    let mv = match k {
        Neighborhood::Swap => {
            let (i, j) = distinct_pair(rng, n);
            Move::Swap { i, j }
        }
        Neighborhood::Insertion => {
            let from = rng.gen_range(0..n);
            let mut to = rng.gen_range(0..n - 1);
            if to >= from {
                to += 1;
            }
            Move::Insert { from, to }
        }
        Neighborhood::PairExchange => loop {
            let (i, j) = distinct_pair(rng, n - 1);
            if j >= i + 2 {
                break Move::PairExchange { i, j };
            }
        },
        Neighborhood::CoupleInsertion => {
            let starts = n - 1;
            let from = rng.gen_range(0..starts);
            let mut to = rng.gen_range(0..starts - 1);
            if to >= from {
                to += 1;
            }
            Move::CoupleInsert { from, to }
        }
        Neighborhood::TwoOpt => loop {
            let (i, j) = distinct_pair(rng, n);
            if j >= i + 3 {
                break Move::TwoOpt { i, j };
            }
        },
    };
    Some(mv)
}

pub(crate) fn shake_in_place<R: Rng + ?Sized>(
    order: &mut [JobId],
    k: Neighborhood,
    rule: PairRule,
    rng: &mut R,
) {
    if let Some(mv) = random_move_with(k, rule, order.len(), rng) {
        mv.apply(order);
    }
}

/// Applies one uniformly random move of type `k`; identity when the
/// neighborhood is empty for this length.
pub fn shake<R: Rng + ?Sized>(sequence: &Sequence, k: Neighborhood, rng: &mut R) -> Sequence {
    shake_with(sequence, k, PairRule::default(), rng)
}

pub fn shake_with<R: Rng + ?Sized>(
    sequence: &Sequence,
    k: Neighborhood,
    rule: PairRule,
    rng: &mut R,
) -> Sequence {
    let mut order = sequence.as_slice().to_vec();
    shake_in_place(&mut order, k, rule, rng);
    Sequence::from_vec_unchecked(order)
}

/// Orders of the three trailing fragments, identity excluded.
const FRAGMENT_ORDERS: [[usize; 3]; 5] = [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// 3-opt on cut points `p1 < p2 < p3` (0-based; each cut falls after that
/// position). The leading fragment stays first, the other three are
/// reconnected in `FRAGMENT_ORDERS[variant]`, none reversed.
pub(crate) fn three_opt_reconnect(order: &[JobId], cuts: [usize; 3], variant: usize) -> Vec<JobId> {
    let [p1, p2, p3] = cuts;
    let tail = [&order[p1 + 1..=p2], &order[p2 + 1..=p3], &order[p3 + 1..]];
    let mut out = Vec::with_capacity(order.len());
    out.extend_from_slice(&order[..=p1]);
    for &f in &FRAGMENT_ORDERS[variant] {
        out.extend_from_slice(tail[f]);
    }
    out
}

pub(crate) fn perturb_in_place<R: Rng + ?Sized>(order: &mut Vec<JobId>, rng: &mut R) -> bool {
    let n = order.len();
    if n < 4 {
        return false;
    }
    // three distinct jobs that each have a successor: positions 0..n-1
    let mut picks = rand::seq::index::sample(rng, n - 1, 3).into_vec();
    picks.sort_unstable();
    let variant = rng.gen_range(0..FRAGMENT_ORDERS.len());
    *order = three_opt_reconnect(order, [picks[0], picks[1], picks[2]], variant);
    true
}

/// Direction-preserving 3-opt perturbation: cut the edges after three
/// random jobs and reconnect the fragments in a random different order.
/// Sequences shorter than four jobs come back unchanged.
pub fn perturb_three_opt<R: Rng + ?Sized>(sequence: &Sequence, rng: &mut R) -> Sequence {
    let mut order = sequence.as_slice().to_vec();
    if !perturb_in_place(&mut order, rng) {
        log::warn!(
            "3-opt perturbation needs at least 4 jobs, got {}",
            order.len()
        );
    }
    Sequence::from_vec_unchecked(order)
}
