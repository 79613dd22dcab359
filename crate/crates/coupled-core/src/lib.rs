//! Exact scheduling of coupled tasks with exact delays on one machine,
//! minimizing maximum lateness.
//!
//! Every job has a first task of the common length `p`, a gap of exactly
//! `p`, and a second task of length `b_j`; the machine runs one task at a
//! time and the objective is the worst completion-minus-due-date.
//!
//! The crate provides:
//!
//! * [`model`]: instances, structured schedules, timing, feasibility
//!   checking and lateness evaluation;
//! * [`agreeable`]: a polynomial exact solver for instances where earlier
//!   due dates come with shorter-or-equal second tasks;
//! * [`disagreeable`]: an exact solver for the opposite monotone class;
//! * [`partition`]: a feasibility test for a fixed split of the jobs into
//!   block-enders and pair-leaders, plus an exact small-instance solver
//!   built on it;
//! * [`oracle`]: brute-force references the other solvers are tested
//!   against;
//! * [`generator`]: seeded random instances of all three classes.
//!
//! The library is `no_std` (with `alloc`); all functions are pure.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod agreeable;
pub mod disagreeable;
pub mod generator;
pub mod model;
pub mod oracle;
pub mod partition;

pub use model::{
    check_feasibility, classify, compare_orders, lateness_report, long_job_set,
    schedule_timeline, Classification, Instance, Job, JobId, LatenessReport, ModelError,
    OrderRelation, ScheduleElement, Solution, StructuredSequence, Time, TimedSchedule, Violation,
};
