//! File formats, rendering and report plumbing for the `coupled` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use coupled_core::{
    check_feasibility, lateness_report, schedule_timeline, Instance, Job, JobId, ScheduleElement,
    StructuredSequence, Time, TimedSchedule, Violation,
};

/// Instance file: `{"p": <int>, "jobs": [{"id":, "b":, "d":}, ...]}`.
/// Jobs need not be sorted; the loader orders them by due date.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub p: Time,
    pub jobs: Vec<JobFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobFile {
    pub id: JobId,
    pub b: Time,
    pub d: Time,
}

/// Schedule file: lateness, makespan, the element list, and first-task
/// start times keyed by job id.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub lmax: Time,
    pub makespan: Time,
    pub elements: Vec<ElementFile>,
    pub starts: BTreeMap<String, Time>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementFile {
    Singleton(JobId),
    Pair(JobId, JobId),
}

impl From<ScheduleElement> for ElementFile {
    fn from(e: ScheduleElement) -> Self {
        match e {
            ScheduleElement::Singleton(i) => ElementFile::Singleton(i),
            ScheduleElement::Pair(i, j) => ElementFile::Pair(i, j),
        }
    }
}

impl From<ElementFile> for ScheduleElement {
    fn from(e: ElementFile) -> Self {
        match e {
            ElementFile::Singleton(i) => ScheduleElement::Singleton(i),
            ElementFile::Pair(i, j) => ScheduleElement::Pair(i, j),
        }
    }
}

#[derive(Debug)]
pub enum FileError {
    Io(io::Error),
    Parse(serde_json::Error),
    Invalid(String),
}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileError::Io(e) => write!(f, "io error: {e}"),
            FileError::Parse(e) => write!(f, "parse error: {e}"),
            FileError::Invalid(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for FileError {}

impl From<io::Error> for FileError {
    fn from(e: io::Error) -> Self {
        FileError::Io(e)
    }
}

impl From<serde_json::Error> for FileError {
    fn from(e: serde_json::Error) -> Self {
        FileError::Parse(e)
    }
}

pub fn load_instance(path: &Path) -> Result<Instance, FileError> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text)
}

pub fn parse_instance(text: &str) -> Result<Instance, FileError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let jobs: Vec<Job> = file
        .jobs
        .iter()
        .map(|j| Job {
            id: j.id,
            b: j.b,
            d: j.d,
        })
        .collect();
    Instance::new(file.p, jobs).map_err(|e| FileError::Invalid(e.to_string()))
}

pub fn instance_to_json(inst: &Instance) -> String {
    let file = InstanceFile {
        p: inst.p(),
        jobs: inst
            .jobs()
            .iter()
            .map(|j| JobFile {
                id: j.id,
                b: j.b,
                d: j.d,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}

pub fn schedule_to_file(seq: &StructuredSequence, inst: &Instance) -> ScheduleFile {
    let ts = schedule_timeline(seq, inst).expect("schedule fits instance");
    let report = lateness_report(&ts, inst).expect("non-empty schedule");
    ScheduleFile {
        lmax: report.lmax,
        makespan: ts.makespan,
        elements: seq.elements.iter().map(|&e| e.into()).collect(),
        starts: ts
            .starts
            .iter()
            .map(|(&id, &t)| (id.to_string(), t))
            .collect(),
    }
}

pub fn schedule_file_to_json(file: &ScheduleFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("serializable");
    s.push('\n');
    s
}

pub fn load_schedule(path: &Path) -> Result<ScheduleFile, FileError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes via a temp file and rename, so failures never leave partial
/// output behind.
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)
}

/// Problems found when checking a schedule file against an instance.
#[derive(Debug)]
pub enum VerifyIssue {
    Machine(Violation),
    ElementMismatch(String),
    WrongLmax { recorded: Time, actual: Time },
    WrongMakespan { recorded: Time, actual: Time },
}

impl std::fmt::Display for VerifyIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerifyIssue::Machine(v) => write!(f, "{v}"),
            VerifyIssue::ElementMismatch(msg) => write!(f, "{msg}"),
            VerifyIssue::WrongLmax { recorded, actual } => {
                write!(f, "lmax recorded as {recorded}, schedule gives {actual}")
            }
            VerifyIssue::WrongMakespan { recorded, actual } => {
                write!(f, "makespan recorded as {recorded}, schedule gives {actual}")
            }
        }
    }
}

/// Full check of a schedule file: machine feasibility, element/start
/// consistency, and the recorded lmax/makespan.
pub fn verify_schedule(file: &ScheduleFile, inst: &Instance) -> Vec<VerifyIssue> {
    let mut issues = Vec::new();
    let mut starts: BTreeMap<JobId, Time> = BTreeMap::new();
    for (key, &t) in &file.starts {
        match key.parse::<JobId>() {
            Ok(id) => {
                starts.insert(id, t);
            }
            Err(_) => issues.push(VerifyIssue::ElementMismatch(format!(
                "start key {key:?} is not a job id"
            ))),
        }
    }
    let ts = match TimedSchedule::from_starts(&starts, inst) {
        Ok(ts) => ts,
        Err(e) => {
            issues.push(VerifyIssue::ElementMismatch(e.to_string()));
            return issues;
        }
    };
    for v in check_feasibility(&ts, inst) {
        issues.push(VerifyIssue::Machine(v));
    }

    let mut seen: BTreeMap<JobId, usize> = BTreeMap::new();
    for e in &file.elements {
        let elem: ScheduleElement = (*e).into();
        for id in elem.jobs() {
            *seen.entry(id).or_insert(0) += 1;
        }
        if let ScheduleElement::Pair(i, j) = elem {
            match (starts.get(&i), starts.get(&j)) {
                (Some(&si), Some(&sj)) if sj == si + inst.p() => {}
                (Some(_), Some(_)) => issues.push(VerifyIssue::ElementMismatch(format!(
                    "pair ({i},{j}): trailing start is not leading start + p"
                ))),
                _ => issues.push(VerifyIssue::ElementMismatch(format!(
                    "pair ({i},{j}): member missing from starts"
                ))),
            }
        }
    }
    for job in inst.jobs() {
        match seen.get(&job.id) {
            Some(1) => {}
            Some(k) => issues.push(VerifyIssue::ElementMismatch(format!(
                "job {} occurs {k} times in elements",
                job.id
            ))),
            None => issues.push(VerifyIssue::ElementMismatch(format!(
                "job {} missing from elements",
                job.id
            ))),
        }
    }

    if issues.is_empty() {
        let report = lateness_report(&ts, inst).expect("non-empty");
        if file.lmax != report.lmax {
            issues.push(VerifyIssue::WrongLmax {
                recorded: file.lmax,
                actual: report.lmax,
            });
        }
        if file.makespan != ts.makespan {
            issues.push(VerifyIssue::WrongMakespan {
                recorded: file.makespan,
                actual: ts.makespan,
            });
        }
    }
    issues
}

/// Fixed-width text timeline: one row per job (due-date order), `#` for the
/// first task, `=` for the second, `.` for idle.
pub fn render_gantt(ts: &TimedSchedule, inst: &Instance) -> String {
    let width = ts.makespan.max(0) as usize;
    let label_w = inst
        .jobs()
        .iter()
        .map(|j| j.id.to_string().len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for job in inst.jobs() {
        let mut row = vec![b'.'; width];
        if let Some(&s) = ts.starts.get(&job.id) {
            let p = inst.p();
            for t in s..s + p {
                if t >= 0 && (t as usize) < width {
                    row[t as usize] = b'#';
                }
            }
            for t in s + 2 * p..s + 2 * p + job.b {
                if t >= 0 && (t as usize) < width {
                    row[t as usize] = b'=';
                }
            }
        }
        let _ = writeln!(
            out,
            "{:>label_w$} |{}|",
            job.id,
            String::from_utf8(row).expect("ascii")
        );
    }
    out
}

/// What `solve` reports: algorithm, verified objective, witness, timing,
/// and the oracle cross-check when requested.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub algorithm: String,
    pub n: usize,
    pub p: Time,
    pub class: String,
    pub lmax: Time,
    pub makespan: Time,
    pub schedule: StructuredSequence,
    pub wall_micros: u128,
    pub oracle_lmax: Option<Time>,
    pub oracle_match: Option<bool>,
}

impl SolveReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "algorithm: {}", self.algorithm);
        let _ = writeln!(out, "n: {}", self.n);
        let _ = writeln!(out, "p: {}", self.p);
        let _ = writeln!(out, "class: {}", self.class);
        let _ = writeln!(out, "lmax: {}", self.lmax);
        let _ = writeln!(out, "makespan: {}", self.makespan);
        let _ = writeln!(out, "schedule: {}", self.schedule);
        if let Some(o) = self.oracle_lmax {
            let _ = writeln!(out, "oracle_lmax: {o}");
            let _ = writeln!(out, "match: {}", self.oracle_match.unwrap_or(false));
        }
        let _ = writeln!(out, "wall_micros: {}", self.wall_micros);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst() -> Instance {
        parse_instance(r#"{"p": 2, "jobs": [{"id": 2, "b": 2, "d": 7}, {"id": 1, "b": 1, "d": 5}]}"#)
            .unwrap()
    }

    #[test]
    fn loader_sorts_by_due_date() {
        let i = inst();
        let ids: Vec<JobId> = i.jobs().iter().map(|j| j.id).collect();
        assert_eq!(ids, vec![1, 2]);
    }

    #[test]
    fn element_json_shapes() {
        assert_eq!(
            serde_json::to_string(&ElementFile::Singleton(3)).unwrap(),
            r#"{"singleton":3}"#
        );
        assert_eq!(
            serde_json::to_string(&ElementFile::Pair(1, 2)).unwrap(),
            r#"{"pair":[1,2]}"#
        );
    }

    #[test]
    fn instance_roundtrip_is_exact() {
        let i = inst();
        let json = instance_to_json(&i);
        let back = parse_instance(&json).unwrap();
        assert_eq!(i, back);
        assert_eq!(json, instance_to_json(&back));
    }

    #[test]
    fn schedule_file_verifies() {
        let i = inst();
        let seq = StructuredSequence::new(vec![ScheduleElement::Pair(1, 2)]);
        let file = schedule_to_file(&seq, &i);
        assert_eq!(file.lmax, 1);
        assert_eq!(file.makespan, 8);
        assert!(verify_schedule(&file, &i).is_empty());
    }

    #[test]
    fn tampered_schedule_is_rejected() {
        let i = inst();
        let seq = StructuredSequence::new(vec![ScheduleElement::Pair(1, 2)]);
        let mut file = schedule_to_file(&seq, &i);
        file.starts.insert("2".into(), 1); // overlaps job 1's first task
        assert!(!verify_schedule(&file, &i).is_empty());

        let mut file2 = schedule_to_file(&seq, &i);
        file2.lmax = 0;
        assert!(matches!(
            verify_schedule(&file2, &i).as_slice(),
            [VerifyIssue::WrongLmax { .. }]
        ));
    }

    #[test]
    fn gantt_marks_tasks() {
        let i = inst();
        let seq = StructuredSequence::new(vec![ScheduleElement::Pair(1, 2)]);
        let ts = schedule_timeline(&seq, &i).unwrap();
        let g = render_gantt(&ts, &i);
        let lines: Vec<&str> = g.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "1 |##..=...|");
        assert_eq!(lines[1], "2 |..##..==|");
    }
}
