//! Feasibility test for a fixed split of the jobs, and an exact solver for
//! small general instances built on top of it.
//!
//! A split puts every job either in `P` (its second task ends a block: the
//! job is a singleton or the trailing member of a pair) or in `T` (it leads a
//! pair, so `b <= p`). For a given split and lateness bound `L`, a backward
//! greedy decides feasibility: walking from the schedule end, always place
//! the longest `P`-job whose block-end lateness fits, and attach the
//! still-unplaced `T`-job latest in the `d - b` order whenever its own
//! lateness allows. Exchange arguments make both greedy choices safe, so the
//! test is exact for the split.

use alloc::vec::Vec;
use core::fmt;

use crate::model::{
    lateness_report, schedule_timeline, Instance, JobId, ScheduleElement, Solution,
    StructuredSequence, Time,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionError {
    UnknownJob(JobId),
    DuplicatedJob(JobId),
    MissingJob(JobId),
    /// `T` jobs must satisfy `b <= p`.
    LongInT(JobId),
    /// `T` may not outnumber `P` (each pair consumes one job of each).
    TooManyT { t: usize, p: usize },
    EmptyInstance,
    CapExceeded { n: usize, cap: usize },
}

impl fmt::Display for PartitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PartitionError::UnknownJob(id) => write!(f, "unknown job id {id}"),
            PartitionError::DuplicatedJob(id) => write!(f, "job {id} listed twice"),
            PartitionError::MissingJob(id) => write!(f, "job {id} not covered by P or T"),
            PartitionError::LongInT(id) => write!(f, "job {id} has b > p and cannot be in T"),
            PartitionError::TooManyT { t, p } => {
                write!(f, "|T| = {t} exceeds |P| = {p}")
            }
            PartitionError::EmptyInstance => write!(f, "instance has no jobs"),
            PartitionError::CapExceeded { n, cap } => {
                write!(f, "instance has {n} jobs, partition-enumeration cap is {cap}")
            }
        }
    }
}

impl core::error::Error for PartitionError {}

/// A validated split. `t_jobs` is kept sorted by `(d - b, id)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub p_jobs: Vec<JobId>,
    pub t_jobs: Vec<JobId>,
}

impl Partition {
    pub fn new(
        inst: &Instance,
        p_jobs: Vec<JobId>,
        t_jobs: Vec<JobId>,
    ) -> Result<Self, PartitionError> {
        let mut seen: Vec<JobId> = Vec::new();
        for &id in p_jobs.iter().chain(t_jobs.iter()) {
            if inst.job(id).is_none() {
                return Err(PartitionError::UnknownJob(id));
            }
            if seen.contains(&id) {
                return Err(PartitionError::DuplicatedJob(id));
            }
            seen.push(id);
        }
        for job in inst.jobs() {
            if !seen.contains(&job.id) {
                return Err(PartitionError::MissingJob(job.id));
            }
        }
        for &id in &t_jobs {
            let job = inst.job(id).expect("checked above");
            if job.b > inst.p() {
                return Err(PartitionError::LongInT(id));
            }
        }
        if t_jobs.len() > p_jobs.len() {
            return Err(PartitionError::TooManyT {
                t: t_jobs.len(),
                p: p_jobs.len(),
            });
        }
        let mut t_sorted = t_jobs;
        t_sorted.sort_unstable_by_key(|&id| {
            let j = inst.job(id).expect("checked above");
            (j.d - j.b, id)
        });
        Ok(Partition {
            p_jobs,
            t_jobs: t_sorted,
        })
    }
}

/// Runs the backward greedy for the split under lateness bound `l`.
/// Returns a witness sequence, or `None` when no schedule for this split
/// keeps every lateness within `l`.
pub fn partition_test(
    part: &Partition,
    l: Time,
    inst: &Instance,
) -> Option<StructuredSequence> {
    let p = inst.p();
    let m = part.p_jobs.len();
    let m_t = part.t_jobs.len();
    // Total span of any schedule realizing this split.
    let mut beta: Time = 3 * p * m_t as Time
        + 2 * p * (m - m_t) as Time
        + part
            .p_jobs
            .iter()
            .map(|&id| inst.job(id).expect("validated").b)
            .sum::<Time>();

    let mut p_rem: Vec<JobId> = part.p_jobs.clone();
    let mut t_rem: Vec<JobId> = part.t_jobs.clone();
    let mut rev_elements: Vec<ScheduleElement> = Vec::with_capacity(m);

    for _ in 0..m {
        // Longest remaining P-job whose block-end lateness fits at beta;
        // ties broken toward the later due date, then the larger id.
        let pick = p_rem
            .iter()
            .enumerate()
            .filter(|(_, &id)| {
                let j = inst.job(id).expect("validated");
                beta - j.d <= l
            })
            .max_by_key(|(_, &id)| {
                let j = inst.job(id).expect("validated");
                (j.b, j.d, id)
            })
            .map(|(k, _)| k)?;
        let pi = p_rem.swap_remove(pick);
        let pi_b = inst.job(pi).expect("validated").b;
        let interlaced = if let Some(&t_id) = t_rem.last() {
            let t_job = inst.job(t_id).expect("validated");
            // Completion of the leading job when the block ends at beta.
            let c_t = beta - p - pi_b + t_job.b;
            c_t - t_job.d <= l
        } else {
            false
        };
        if interlaced {
            let t_id = t_rem.pop().expect("checked non-empty");
            rev_elements.push(ScheduleElement::Pair(t_id, pi));
            beta -= 3 * p + pi_b;
        } else {
            rev_elements.push(ScheduleElement::Singleton(pi));
            beta -= 2 * p + pi_b;
        }
    }
    if !t_rem.is_empty() {
        return None;
    }
    debug_assert_eq!(beta, 0, "block spans must add up to the initial beta");
    rev_elements.reverse();
    Some(StructuredSequence::new(rev_elements))
}

/// Exact solver for small instances of any class: binary search on the
/// lateness bound, trying every split (subsets of the short jobs as `T`,
/// smallest first) at each probe.
pub fn solve_general_small(inst: &Instance, cap: usize) -> Result<Solution, PartitionError> {
    let n = inst.n();
    if n == 0 {
        return Err(PartitionError::EmptyInstance);
    }
    if n > cap || n > 16 {
        return Err(PartitionError::CapExceeded { n, cap: cap.min(16) });
    }
    let p = inst.p();
    let short: Vec<JobId> = inst
        .jobs()
        .iter()
        .filter(|j| j.b <= p)
        .map(|j| j.id)
        .collect();
    // T-candidates by increasing size, then lexicographically by mask.
    let mut masks: Vec<u32> = (0..(1u32 << short.len()))
        .filter(|m| 2 * m.count_ones() as usize <= n)
        .collect();
    masks.sort_unstable_by_key(|m| (m.count_ones(), *m));
    let partitions: Vec<Partition> = masks
        .iter()
        .map(|&mask| {
            let t_jobs: Vec<JobId> = short
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &id)| id)
                .collect();
            let p_jobs: Vec<JobId> = inst
                .jobs()
                .iter()
                .map(|j| j.id)
                .filter(|id| !t_jobs.contains(id))
                .collect();
            Partition::new(inst, p_jobs, t_jobs).expect("constructed split is valid")
        })
        .collect();

    let probe = |l: Time| -> Option<StructuredSequence> {
        partitions.iter().find_map(|part| partition_test(part, l, inst))
    };

    let lb = inst
        .jobs()
        .iter()
        .map(|j| 2 * p + j.b - j.d)
        .max()
        .expect("non-empty");
    let edd = StructuredSequence::new(
        inst.jobs()
            .iter()
            .map(|j| ScheduleElement::Singleton(j.id))
            .collect(),
    );
    let edd_ts = schedule_timeline(&edd, inst).expect("singleton layout is valid");
    let ub = lateness_report(&edd_ts, inst).expect("non-empty").lmax;

    let mut lo = lb;
    let mut hi = ub;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if probe(mid).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let schedule = probe(lo).expect("upper bound is feasible");
    let ts = schedule_timeline(&schedule, inst).expect("witness is well-formed");
    let lmax = lateness_report(&ts, inst).expect("non-empty").lmax;
    Ok(Solution { lmax, schedule })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_feasibility, Job};
    use crate::oracle::oracle_structured;
    use alloc::vec;

    fn inst(p: Time, bd: &[(Time, Time)]) -> Instance {
        let jobs = bd
            .iter()
            .enumerate()
            .map(|(k, &(b, d))| Job {
                id: k as JobId + 1,
                b,
                d,
            })
            .collect();
        Instance::new(p, jobs).unwrap()
    }

    #[test]
    fn backward_greedy_example() {
        // p=2, jobs (b,d) = (1,5),(2,7), P={2}, T={1}: beta = 8, job 2 fits
        // at L=1, job 1 interlaces (completion 5), giving (1,2).
        let i = inst(2, &[(1, 5), (2, 7)]);
        let part = Partition::new(&i, vec![2], vec![1]).unwrap();
        let seq = partition_test(&part, 1, &i).unwrap();
        assert_eq!(seq.elements, vec![ScheduleElement::Pair(1, 2)]);
        let ts = schedule_timeline(&seq, &i).unwrap();
        assert_eq!(lateness_report(&ts, &i).unwrap().lmax, 1);

        // L=0: job 2 cannot end a block at 8.
        assert_eq!(partition_test(&part, 0, &i), None);
    }

    #[test]
    fn all_singleton_split_reduces_to_edd() {
        let i = inst(2, &[(2, 4), (1, 9)]);
        let part = Partition::new(&i, vec![1, 2], vec![]).unwrap();
        let seq = partition_test(&part, 2, &i).unwrap();
        assert_eq!(
            seq.elements,
            vec![ScheduleElement::Singleton(1), ScheduleElement::Singleton(2)]
        );
        let ts = schedule_timeline(&seq, &i).unwrap();
        let rep = lateness_report(&ts, &i).unwrap();
        assert_eq!(rep.lateness[&1], 2);
        assert_eq!(rep.lateness[&2], 2);
    }

    #[test]
    fn partition_validation() {
        let i = inst(2, &[(3, 5), (1, 7)]);
        assert_eq!(
            Partition::new(&i, vec![2], vec![1]),
            Err(PartitionError::LongInT(1))
        );
        assert_eq!(
            Partition::new(&i, vec![1], vec![2]).unwrap().t_jobs,
            vec![2]
        );
        assert_eq!(
            Partition::new(&i, vec![1, 2], vec![2]),
            Err(PartitionError::DuplicatedJob(2))
        );
        assert_eq!(
            Partition::new(&i, vec![1], vec![]),
            Err(PartitionError::MissingJob(2))
        );
    }

    #[test]
    fn partition_test_witness_is_feasible() {
        let i = inst(2, &[(1, 4), (2, 6), (0, 7), (2, 11)]);
        let part = Partition::new(&i, vec![2, 4], vec![1, 3]).unwrap();
        if let Some(seq) = partition_test(&part, 3, &i) {
            let ts = schedule_timeline(&seq, &i).unwrap();
            assert!(check_feasibility(&ts, &i).is_empty());
            assert!(lateness_report(&ts, &i).unwrap().lmax <= 3);
        }
    }

    #[test]
    fn small_solver_examples() {
        let i = inst(2, &[(1, 5), (2, 7)]);
        assert_eq!(solve_general_small(&i, 8).unwrap().lmax, 1);
        let i = inst(2, &[(2, 4), (1, 9)]);
        assert_eq!(solve_general_small(&i, 8).unwrap().lmax, 2);
        let i = inst(3, &[(2, 4)]);
        assert_eq!(solve_general_small(&i, 8).unwrap().lmax, 4);
    }

    #[test]
    fn small_solver_matches_oracle() {
        for seed in 0..40u64 {
            let cfg = crate::generator::GenConfig {
                long_job_fraction: if seed % 3 == 0 { 0.3 } else { 0.0 },
                ..crate::generator::GenConfig::new(
                    2 + (seed % 5) as usize,
                    1 + (seed % 3) as Time,
                    crate::generator::ClassTarget::General,
                    seed,
                )
            };
            let i = crate::generator::generate(&cfg).unwrap();
            let got = solve_general_small(&i, 8).unwrap();
            let want = oracle_structured(&i, 10).unwrap();
            assert_eq!(got.lmax, want.lmax, "instance {i:?}");
            let ts = schedule_timeline(&got.schedule, &i).unwrap();
            assert!(check_feasibility(&ts, &i).is_empty());
        }
    }
}
