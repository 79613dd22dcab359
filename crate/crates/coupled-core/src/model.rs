//! Instance and schedule data model.
//!
//! A *coupled task* is a job of two tasks on one machine: a first task of the
//! common length `p`, then a gap of exactly `p` during which the machine may
//! serve other jobs, then a second task of job-dependent length `b`. The job
//! completes when its second task ends; lateness is completion minus due date.
//!
//! Schedules are described structurally as sequences of *elements*: either a
//! singleton `[i]` (the gap of job `i` stays empty, the element spans
//! `2p + b_i`) or an interlaced pair `(i, j)` (job `j`'s first task fills job
//! `i`'s gap, the element spans `3p + b_j`; this requires `b_i <= p`).
//! Elements are laid out back to back starting at time zero.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Times, durations, due dates and lateness values. Negative due dates and
/// lateness are meaningful; durations are non-negative.
pub type Time = i64;

/// External job identifier. Unique within an instance, otherwise arbitrary.
pub type JobId = u32;

/// One job: second-task duration `b` and due date `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    pub id: JobId,
    pub b: Time,
    pub d: Time,
}

/// A problem instance. Jobs are kept in earliest-due-date order, ties broken
/// by the order in which they were supplied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    p: Time,
    jobs: Vec<Job>,
}

/// Construction and timeline errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelError {
    /// `p` must be at least 1.
    InvalidP(Time),
    /// `b` must be non-negative.
    NegativeB(JobId, Time),
    /// Two jobs share an id.
    DuplicateId(JobId),
    /// An element refers to a job id not present in the instance.
    UnknownJob(JobId),
    /// A job occurs twice in a sequence.
    DuplicateJob(JobId),
    /// The first member of a pair has `b > p`, so its second task cannot fit
    /// inside the other job's gap.
    FirstTooLong { job: JobId, b: Time, p: Time },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelError::InvalidP(p) => write!(f, "p must be >= 1, got {p}"),
            ModelError::NegativeB(id, b) => write!(f, "job {id} has negative b = {b}"),
            ModelError::DuplicateId(id) => write!(f, "duplicate job id {id}"),
            ModelError::UnknownJob(id) => write!(f, "unknown job id {id}"),
            ModelError::DuplicateJob(id) => write!(f, "job {id} appears more than once"),
            ModelError::FirstTooLong { job, b, p } => {
                write!(f, "job {job} has b = {b} > p = {p} and cannot lead a pair")
            }
        }
    }
}

impl core::error::Error for ModelError {}

impl Instance {
    /// Builds an instance, sorting jobs by due date (stable, so ties keep the
    /// supplied order).
    pub fn new(p: Time, mut jobs: Vec<Job>) -> Result<Self, ModelError> {
        if p < 1 {
            return Err(ModelError::InvalidP(p));
        }
        for job in &jobs {
            if job.b < 0 {
                return Err(ModelError::NegativeB(job.id, job.b));
            }
        }
        jobs.sort_by_key(|j| j.d);
        let mut ids: Vec<JobId> = jobs.iter().map(|j| j.id).collect();
        ids.sort_unstable();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(ModelError::DuplicateId(w[0]));
            }
        }
        Ok(Instance { p, jobs })
    }

    pub fn p(&self) -> Time {
        self.p
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    /// Jobs in earliest-due-date order.
    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.jobs.iter().find(|j| j.id == id)
    }

    /// `true` if the job's second task is longer than `p`. Long jobs can only
    /// be the trailing member of a pair.
    pub fn is_long(&self, job: &Job) -> bool {
        job.b > self.p
    }

    /// Span of an element when scheduled: `2p + b_i` for a singleton,
    /// `3p + b_second` for a pair.
    pub fn element_span(&self, elem: &ScheduleElement) -> Result<Time, ModelError> {
        match *elem {
            ScheduleElement::Singleton(i) => {
                let job = self.job(i).ok_or(ModelError::UnknownJob(i))?;
                Ok(2 * self.p + job.b)
            }
            ScheduleElement::Pair(first, second) => {
                let fj = self.job(first).ok_or(ModelError::UnknownJob(first))?;
                let sj = self.job(second).ok_or(ModelError::UnknownJob(second))?;
                if fj.b > self.p {
                    return Err(ModelError::FirstTooLong {
                        job: first,
                        b: fj.b,
                        p: self.p,
                    });
                }
                Ok(3 * self.p + sj.b)
            }
        }
    }
}

/// One element of a structured schedule: a lone job or an interlaced pair
/// written in machine order (first member starts first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleElement {
    Singleton(JobId),
    Pair(JobId, JobId),
}

impl ScheduleElement {
    pub fn jobs(&self) -> impl Iterator<Item = JobId> {
        let (a, b) = match *self {
            ScheduleElement::Singleton(i) => (i, None),
            ScheduleElement::Pair(i, j) => (i, Some(j)),
        };
        core::iter::once(a).chain(b)
    }

    /// Sort key used wherever a deterministic element order is needed:
    /// pairs before singletons, then by member ids.
    pub fn sort_key(&self) -> (u8, JobId, JobId) {
        match *self {
            ScheduleElement::Pair(i, j) => (0, i, j),
            ScheduleElement::Singleton(i) => (1, i, 0),
        }
    }
}

impl fmt::Display for ScheduleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ScheduleElement::Singleton(i) => write!(f, "[{i}]"),
            ScheduleElement::Pair(i, j) => write!(f, "({i},{j})"),
        }
    }
}

/// An ordered list of schedule elements covering each job exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructuredSequence {
    pub elements: Vec<ScheduleElement>,
}

impl StructuredSequence {
    pub fn new(elements: Vec<ScheduleElement>) -> Self {
        StructuredSequence { elements }
    }

    pub fn job_ids(&self) -> impl Iterator<Item = JobId> + '_ {
        self.elements.iter().flat_map(|e| e.jobs())
    }
}

impl fmt::Display for StructuredSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.elements.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Start times, completion times and makespan of a laid-out schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedSchedule {
    /// First-task start time per job.
    pub starts: BTreeMap<JobId, Time>,
    /// Completion time (end of second task) per job.
    pub completions: BTreeMap<JobId, Time>,
    pub makespan: Time,
}

impl TimedSchedule {
    /// Rebuilds a timed schedule from raw start times; completion is forced
    /// to `start + 2p + b`.
    pub fn from_starts(starts: &BTreeMap<JobId, Time>, inst: &Instance) -> Result<Self, ModelError> {
        let mut completions = BTreeMap::new();
        let mut makespan = 0;
        for (&id, &s) in starts {
            let job = inst.job(id).ok_or(ModelError::UnknownJob(id))?;
            let c = s + 2 * inst.p() + job.b;
            completions.insert(id, c);
            makespan = makespan.max(c);
        }
        Ok(TimedSchedule {
            starts: starts.clone(),
            completions,
            makespan,
        })
    }
}

/// Per-job lateness, its maximum, and the smallest job id attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatenessReport {
    pub lateness: BTreeMap<JobId, Time>,
    pub lmax: Time,
    pub argmax: JobId,
}

/// A solver answer: the verified maximum lateness and a witness schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub lmax: Time,
    pub schedule: StructuredSequence,
}

/// Lays a structured sequence out on the machine, back to back from time 0.
///
/// A singleton block spans `2p + b_i`. A pair block `(i, j)` spans `3p + b_j`:
/// `i` starts at the block origin `t` (tasks `[t, t+p)` and
/// `[t+2p, t+2p+b_i)`), `j` starts at `t + p` (tasks `[t+p, t+2p)` and
/// `[t+3p, t+3p+b_j)`).
pub fn schedule_timeline(
    seq: &StructuredSequence,
    inst: &Instance,
) -> Result<TimedSchedule, ModelError> {
    let p = inst.p();
    let mut starts = BTreeMap::new();
    let mut completions = BTreeMap::new();
    let mut t = 0;
    let mut makespan = 0;
    let place = |id: JobId, s: Time, starts: &mut BTreeMap<JobId, Time>| {
        if starts.insert(id, s).is_some() {
            return Err(ModelError::DuplicateJob(id));
        }
        Ok(())
    };
    for elem in &seq.elements {
        let span = inst.element_span(elem)?;
        match *elem {
            ScheduleElement::Singleton(i) => {
                place(i, t, &mut starts)?;
            }
            ScheduleElement::Pair(i, j) => {
                if i == j {
                    return Err(ModelError::DuplicateJob(i));
                }
                place(i, t, &mut starts)?;
                place(j, t + p, &mut starts)?;
            }
        }
        t += span;
    }
    for (&id, &s) in &starts {
        let job = inst.job(id).expect("validated above");
        let c = s + 2 * p + job.b;
        completions.insert(id, c);
        makespan = makespan.max(c);
    }
    Ok(TimedSchedule {
        starts,
        completions,
        makespan,
    })
}

/// A reason a timed schedule is not a valid coupled-task schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Two machine tasks overlap (half-open interval test).
    Overlap { a: JobId, b: JobId },
    /// Completion is not `start + 2p + b`, i.e. the gap is not exactly `p`.
    DelayNotExact { job: JobId },
    /// A job of the instance is missing from the schedule.
    Missing { job: JobId },
    /// The schedule mentions a job the instance does not have.
    Unknown { job: JobId },
    /// The recorded makespan is not the latest completion.
    WrongMakespan { recorded: Time, actual: Time },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Overlap { a, b } => write!(f, "tasks of jobs {a} and {b} overlap"),
            Violation::DelayNotExact { job } => {
                write!(f, "job {job}: completion is not start + 2p + b")
            }
            Violation::Missing { job } => write!(f, "job {job} is not scheduled"),
            Violation::Unknown { job } => write!(f, "job {job} is not in the instance"),
            Violation::WrongMakespan { recorded, actual } => {
                write!(f, "makespan recorded as {recorded}, tasks end at {actual}")
            }
        }
    }
}

/// Checks machine capacity and the exact-delay rule.
///
/// Zero-length second tasks occupy no machine time and cannot overlap
/// anything; tasks may abut (a task can start exactly when another ends).
pub fn check_feasibility(ts: &TimedSchedule, inst: &Instance) -> Vec<Violation> {
    let p = inst.p();
    let mut violations = Vec::new();
    for job in inst.jobs() {
        if !ts.starts.contains_key(&job.id) {
            violations.push(Violation::Missing { job: job.id });
        }
    }
    let mut intervals: Vec<(Time, Time, JobId)> = Vec::new();
    let mut actual_makespan = Time::MIN;
    for (&id, &s) in &ts.starts {
        let job = match inst.job(id) {
            Some(j) => j,
            None => {
                violations.push(Violation::Unknown { job: id });
                continue;
            }
        };
        match ts.completions.get(&id) {
            Some(&c) if c == s + 2 * p + job.b => {}
            _ => violations.push(Violation::DelayNotExact { job: id }),
        }
        intervals.push((s, s + p, id));
        if job.b > 0 {
            intervals.push((s + 2 * p, s + 2 * p + job.b, id));
        }
        actual_makespan = actual_makespan.max(s + 2 * p + job.b);
    }
    intervals.sort_unstable();
    for w in intervals.windows(2) {
        let (.., e0, a) = (w[0].0, w[0].1, w[0].2);
        let (s1, _, b) = (w[1].0, w[1].1, w[1].2);
        if s1 < e0 {
            violations.push(Violation::Overlap { a, b });
        }
    }
    if !ts.starts.is_empty() && ts.makespan != actual_makespan {
        violations.push(Violation::WrongMakespan {
            recorded: ts.makespan,
            actual: actual_makespan,
        });
    }
    violations
}

/// Per-job lateness `C_j - d_j` and its maximum. `None` for an empty schedule.
pub fn lateness_report(ts: &TimedSchedule, inst: &Instance) -> Option<LatenessReport> {
    let mut lateness = BTreeMap::new();
    let mut lmax = Time::MIN;
    let mut argmax = None;
    for (&id, &c) in &ts.completions {
        let job = inst.job(id)?;
        let l = c - job.d;
        lateness.insert(id, l);
        if l > lmax {
            lmax = l;
            argmax = Some(id);
        }
    }
    argmax.map(|argmax| LatenessReport {
        lateness,
        lmax,
        argmax,
    })
}

/// How two jobs compare in the two orders that drive pair construction:
/// by due date, and by `d - b` (which decides the better order inside a pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderRelation {
    pub edd: Ordering,
    pub prec: Ordering,
}

/// Compares jobs `a` and `b` by due date and by `d - b`.
pub fn compare_orders(a: JobId, b: JobId, inst: &Instance) -> Option<OrderRelation> {
    let ja = inst.job(a)?;
    let jb = inst.job(b)?;
    Some(OrderRelation {
        edd: ja.d.cmp(&jb.d),
        prec: (ja.d - ja.b).cmp(&(jb.d - jb.b)),
    })
}

/// Which structural class an instance falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Strictly earlier due date implies a second task that is not longer.
    Agreeable,
    /// Strictly earlier due date implies a second task that is not shorter.
    Disagreeable,
    /// Both hold (single job, all `b` equal, or all `d` equal).
    Both,
    General,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Agreeable => "agreeable",
            Classification::Disagreeable => "disagreeable",
            Classification::Both => "both",
            Classification::General => "general",
        };
        f.write_str(s)
    }
}

/// Classifies an instance. Jobs sharing a due date never constrain each
/// other, so the test compares consecutive groups of equal due dates.
pub fn classify(inst: &Instance) -> Classification {
    let jobs = inst.jobs();
    let mut agreeable = true;
    let mut disagreeable = true;
    let mut k = 0;
    let mut prev: Option<(Time, Time)> = None; // (min b, max b) of previous d-group
    while k < jobs.len() {
        let d = jobs[k].d;
        let mut lo = jobs[k].b;
        let mut hi = jobs[k].b;
        while k < jobs.len() && jobs[k].d == d {
            lo = lo.min(jobs[k].b);
            hi = hi.max(jobs[k].b);
            k += 1;
        }
        if let Some((plo, phi)) = prev {
            if phi > lo {
                agreeable = false;
            }
            if plo < hi {
                disagreeable = false;
            }
        }
        prev = Some((lo, hi));
    }
    match (agreeable, disagreeable) {
        (true, true) => Classification::Both,
        (true, false) => Classification::Agreeable,
        (false, true) => Classification::Disagreeable,
        (false, false) => Classification::General,
    }
}

/// Ids of all jobs with `b > p`, in due-date order.
pub fn long_job_set(inst: &Instance) -> Vec<JobId> {
    inst.jobs()
        .iter()
        .filter(|j| inst.is_long(j))
        .map(|j| j.id)
        .collect()
}
