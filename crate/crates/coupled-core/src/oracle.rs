//! Brute-force ground truth for small instances.
//!
//! Two independent oracles:
//!
//! * [`oracle_structured`] minimizes over every structured sequence (every
//!   partition of the jobs into singletons and ordered pairs, in every
//!   element order).
//! * [`oracle_timeline`] minimizes over *all* feasible timed schedules,
//!   without assuming the pair/singleton structure. It enumerates every
//!   possible machine order of the `2n` tasks and assigns each order its
//!   componentwise-minimal start times, which dominate every other schedule
//!   with that task order.
//!
//! Both are kept deliberately simple; they exist to check the polynomial
//! solvers, not to scale.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{
    Instance, JobId, ScheduleElement, StructuredSequence, Time, TimedSchedule,
};

/// Default job-count cap for the structured enumeration.
pub const DEFAULT_STRUCTURED_CAP: usize = 10;
/// Default job-count cap for the timeline search (its state space is the
/// number of task interleavings, `(2n)!/2^n`).
pub const DEFAULT_TIMELINE_CAP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    CapExceeded { n: usize, cap: usize },
    EmptyInstance,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OracleError::CapExceeded { n, cap } => {
                write!(f, "instance has {n} jobs, oracle cap is {cap}")
            }
            OracleError::EmptyInstance => write!(f, "oracle needs at least one job"),
        }
    }
}

impl core::error::Error for OracleError {}

/// Minimum lateness over structured sequences, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub lmax: Time,
    pub witness: StructuredSequence,
}

/// Minimum lateness over all timed schedules, with witness start times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimelineResult {
    pub lmax: Time,
    pub starts: BTreeMap<JobId, Time>,
}

impl TimelineResult {
    pub fn timed_schedule(&self, inst: &Instance) -> TimedSchedule {
        TimedSchedule::from_starts(&self.starts, inst).expect("witness uses instance jobs")
    }
}

// Internal element encoding over job positions; ordered so that pairs sort
// before singletons, then by member ids. Enumeration follows this order, so
// "first minimizer found" is the lexicographically least one.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Cand {
    kind: u8, // 0 = pair, 1 = singleton
    a: usize, // first member position (or the singleton)
    b: usize, // second member position (or == a)
}

struct JobsView {
    ids: Vec<JobId>,
    b: Vec<Time>,
    d: Vec<Time>,
    by_id: Vec<usize>, // positions sorted by external id
    p: Time,
}

impl JobsView {
    fn new(inst: &Instance) -> Self {
        let ids: Vec<JobId> = inst.jobs().iter().map(|j| j.id).collect();
        let b: Vec<Time> = inst.jobs().iter().map(|j| j.b).collect();
        let d: Vec<Time> = inst.jobs().iter().map(|j| j.d).collect();
        let mut by_id: Vec<usize> = (0..ids.len()).collect();
        by_id.sort_unstable_by_key(|&k| ids[k]);
        JobsView {
            ids,
            b,
            d,
            by_id,
            p: inst.p(),
        }
    }

    fn candidates(&self, mask: u32) -> Vec<Cand> {
        let mut out = Vec::new();
        for &a in &self.by_id {
            if mask & (1 << a) == 0 || self.b[a] > self.p {
                continue;
            }
            for &bb in &self.by_id {
                if bb == a || mask & (1 << bb) == 0 {
                    continue;
                }
                out.push(Cand { kind: 0, a, b: bb });
            }
        }
        for &a in &self.by_id {
            if mask & (1 << a) != 0 {
                out.push(Cand { kind: 1, a, b: a });
            }
        }
        out
    }

    fn to_element(&self, c: Cand) -> ScheduleElement {
        if c.kind == 0 {
            ScheduleElement::Pair(self.ids[c.a], self.ids[c.b])
        } else {
            ScheduleElement::Singleton(self.ids[c.a])
        }
    }

    // (span, block lateness relative to block start)
    fn timing(&self, c: Cand) -> (Time, Time) {
        let p = self.p;
        if c.kind == 0 {
            let l_first = 2 * p + self.b[c.a] - self.d[c.a];
            let l_second = 3 * p + self.b[c.b] - self.d[c.b];
            (3 * p + self.b[c.b], l_first.max(l_second))
        } else {
            (2 * p + self.b[c.a], 2 * p + self.b[c.a] - self.d[c.a])
        }
    }
}

/// Lazily yields every structured sequence of the instance, in the
/// deterministic element order (pairs first, then singletons, by ids).
pub struct SequenceEnumerator {
    view: JobsView,
    // Each frame holds the remaining-job mask and the next candidate index.
    stack: Vec<(u32, Vec<Cand>, usize)>,
    chosen: Vec<Cand>,
    done: bool,
}

/// Streams all feasible structured sequences: every split of the jobs into
/// singletons and ordered pairs (pairs only where the first member fits the
/// gap), in every element order, without duplicates.
pub fn enumerate_structured(
    inst: &Instance,
    cap: usize,
) -> Result<SequenceEnumerator, OracleError> {
    let n = inst.n();
    if n > cap || n > 20 {
        return Err(OracleError::CapExceeded { n, cap: cap.min(20) });
    }
    let view = JobsView::new(inst);
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let cands = view.candidates(full);
    Ok(SequenceEnumerator {
        view,
        stack: vec![(full, cands, 0)],
        chosen: Vec::new(),
        done: n == 0,
    })
}

impl Iterator for SequenceEnumerator {
    type Item = StructuredSequence;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            let (mask, cand) = {
                let top = self.stack.last_mut()?;
                if top.2 >= top.1.len() {
                    self.stack.pop();
                    self.chosen.pop();
                    if self.stack.is_empty() {
                        self.done = true;
                        return None;
                    }
                    continue;
                }
                let cand = top.1[top.2];
                top.2 += 1;
                (top.0, cand)
            };
            let mut new_mask = mask & !(1 << cand.a);
            if cand.kind == 0 {
                new_mask &= !(1 << cand.b);
            }
            self.chosen.push(cand);
            if new_mask == 0 {
                let elements = self.chosen.iter().map(|&c| self.view.to_element(c)).collect();
                self.chosen.pop();
                return Some(StructuredSequence::new(elements));
            }
            let cands = self.view.candidates(new_mask);
            self.stack.push((new_mask, cands, 0));
        }
    }
}

struct StructuredSearch {
    view: JobsView,
    best: Time,
    best_seq: Vec<Cand>,
    current: Vec<Cand>,
}

impl StructuredSearch {
    fn run(&mut self, mask: u32, t: Time, running: Time) {
        if mask == 0 {
            if running < self.best {
                self.best = running;
                self.best_seq = self.current.clone();
            }
            return;
        }
        // Block lateness only grows along a branch; equal-to-best branches
        // cannot improve and are skipped, which keeps the first (and thus
        // lexicographically least) minimizer.
        if running >= self.best {
            return;
        }
        let n = self.view.by_id.len();
        for ai in 0..n {
            let a = self.view.by_id[ai];
            if mask & (1 << a) == 0 || self.view.b[a] > self.view.p {
                continue;
            }
            for bi in 0..n {
                let bb = self.view.by_id[bi];
                if bb == a || mask & (1 << bb) == 0 {
                    continue;
                }
                let c = Cand { kind: 0, a, b: bb };
                let (span, rel) = self.view.timing(c);
                self.current.push(c);
                self.run(
                    mask & !(1 << a) & !(1 << bb),
                    t + span,
                    running.max(t + rel),
                );
                self.current.pop();
            }
        }
        for ai in 0..n {
            let a = self.view.by_id[ai];
            if mask & (1 << a) == 0 {
                continue;
            }
            let c = Cand { kind: 1, a, b: a };
            let (span, rel) = self.view.timing(c);
            self.current.push(c);
            self.run(mask & !(1 << a), t + span, running.max(t + rel));
            self.current.pop();
        }
    }
}

/// Exact minimum over all structured sequences. The witness is the
/// lexicographically least minimizer under the element order of
/// [`ScheduleElement::sort_key`].
pub fn oracle_structured(inst: &Instance, cap: usize) -> Result<OracleResult, OracleError> {
    let n = inst.n();
    if n == 0 {
        return Err(OracleError::EmptyInstance);
    }
    if n > cap || n > 20 {
        return Err(OracleError::CapExceeded { n, cap: cap.min(20) });
    }
    let view = JobsView::new(inst);
    let full: u32 = (1 << n) - 1;
    let mut search = StructuredSearch {
        view,
        best: Time::MAX,
        best_seq: Vec::new(),
        current: Vec::new(),
    };
    search.run(full, 0, Time::MIN);
    let elements = search
        .best_seq
        .iter()
        .map(|&c| search.view.to_element(c))
        .collect();
    Ok(OracleResult {
        lmax: search.best,
        witness: StructuredSequence::new(elements),
    })
}

// Chain entry: (job position, task index 1 or 2).
type TaskRef = (usize, u8);

struct TimelineSearch {
    view: JobsView,
    n: usize,
    bound: Time,
    best: Time,
    best_starts: Option<Vec<Time>>,
}

impl TimelineSearch {
    /// Re-establishes, in place, the componentwise-minimal start times that
    /// satisfy the machine order `chain` and the exact-delay coupling.
    /// Returns false when the order is infeasible (starts grow past `bound`).
    fn relax(&self, chain: &[TaskRef], s: &mut [Time]) -> bool {
        let p = self.view.p;
        loop {
            let mut changed = false;
            for q in 1..chain.len() {
                let (ja, wa) = chain[q - 1];
                let (jb, wb) = chain[q];
                let end_a = s[ja] + if wa == 1 { p } else { 2 * p + self.view.b[ja] };
                let off_b = if wb == 1 { 0 } else { 2 * p };
                if s[jb] + off_b < end_a {
                    s[jb] = end_a - off_b;
                    if s[jb] > self.bound {
                        return false;
                    }
                    changed = true;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn run(&mut self, chain: &mut Vec<TaskRef>, s: &[Time], first_done: u32, second_done: u32) {
        let full: u32 = (1 << self.n) - 1;
        if second_done == full {
            let p = self.view.p;
            let lmax = (0..self.n)
                .map(|j| s[j] + 2 * p + self.view.b[j] - self.view.d[j])
                .max()
                .unwrap();
            if lmax < self.best {
                self.best = lmax;
                self.best_starts = Some(s.to_vec());
            }
            return;
        }
        // Start times only grow as the chain extends, so the lateness of
        // already-started jobs lower-bounds the final value.
        let p = self.view.p;
        let partial = (0..self.n)
            .filter(|&j| first_done & (1 << j) != 0)
            .map(|j| s[j] + 2 * p + self.view.b[j] - self.view.d[j])
            .max()
            .unwrap_or(Time::MIN);
        if partial >= self.best {
            return;
        }
        for ji in 0..self.n {
            let j = self.view.by_id[ji];
            let task: TaskRef = if first_done & (1 << j) == 0 {
                (j, 1)
            } else if second_done & (1 << j) == 0 {
                (j, 2)
            } else {
                continue;
            };
            let mut s2 = s.to_vec();
            chain.push(task);
            if self.relax(chain, &mut s2) {
                let (fd, sd) = if task.1 == 1 {
                    (first_done | (1 << j), second_done)
                } else {
                    (first_done, second_done | (1 << j))
                };
                self.run(chain, &s2, fd, sd);
            }
            chain.pop();
        }
    }
}

/// Exact minimum lateness over all feasible timed schedules.
///
/// Every schedule induces a total machine order of the `2n` tasks, and for a
/// fixed order the componentwise-minimal start assignment minimizes every
/// completion simultaneously. Enumerating all orders of first/second tasks
/// (seconds after their firsts) therefore covers the optimum exactly.
pub fn oracle_timeline(inst: &Instance, cap: usize) -> Result<TimelineResult, OracleError> {
    let n = inst.n();
    if n == 0 {
        return Err(OracleError::EmptyInstance);
    }
    if n > cap || n > 7 {
        return Err(OracleError::CapExceeded { n, cap: cap.min(7) });
    }
    let view = JobsView::new(inst);
    let bound: Time = view.b.iter().sum::<Time>() + 5 * view.p * n as Time + 16;
    let mut search = TimelineSearch {
        n,
        view,
        bound,
        best: Time::MAX,
        best_starts: None,
    };
    let mut chain = Vec::with_capacity(2 * n);
    let s = vec![0; n];
    search.run(&mut chain, &s, 0, 0);
    let starts_vec = search.best_starts.expect("some task order is feasible");
    let mut starts = BTreeMap::new();
    for (j, &t) in starts_vec.iter().enumerate() {
        starts.insert(search.view.ids[j], t);
    }
    Ok(TimelineResult {
        lmax: search.best,
        starts,
    })
}
