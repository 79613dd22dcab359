//! `coupled` command line: solve, verify, generate and benchmark
//! coupled-task instances.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use coupled_cli::{
    instance_to_json, load_instance, load_schedule, render_gantt, schedule_file_to_json,
    schedule_to_file, verify_schedule, write_atomic, SolveReport,
};
use coupled_core::agreeable::{build_graph, solve_agreeable, AgreeableError};
use coupled_core::disagreeable::{
    solve_disagreeable_with, DisagreeableError, DisagreeableOptions, TrimStep,
};
use coupled_core::generator::{generate, ClassTarget, GenConfig, SplitMix64};
use coupled_core::oracle::{
    oracle_structured, oracle_timeline, OracleError, DEFAULT_STRUCTURED_CAP,
    DEFAULT_TIMELINE_CAP,
};
use coupled_core::partition::{partition_test, solve_general_small, Partition, PartitionError};
use coupled_core::{
    classify, lateness_report, schedule_timeline, Classification, Instance, JobId, Solution, Time,
};

const EXIT_BAD_INPUT: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "coupled",
    about = "Exact single-machine coupled-task scheduling, minimizing maximum lateness"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Agreeable,
    Disagreeable,
    Oracle,
    GeneralSmall,
    Partition,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Agreeable,
    Disagreeable,
    General,
}

impl From<ClassArg> for ClassTarget {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Agreeable => ClassTarget::Agreeable,
            ClassArg::Disagreeable => ClassTarget::Disagreeable,
            ClassArg::General => ClassTarget::General,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance file and report the minimum maximum lateness.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        algo: Algo,
        /// Cross-check the answer against the structured brute-force oracle.
        #[arg(long)]
        check_oracle: bool,
        /// Write the schedule file here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a text timeline of the solution.
        #[arg(long)]
        gantt: bool,
        /// Write the agreeable search graph (nodes and arcs) here.
        #[arg(long)]
        dump_graph: Option<PathBuf>,
        /// Write one line per trimming step here (disagreeable solver).
        #[arg(long)]
        trace_trims: Option<PathBuf>,
        /// Bisect candidate end times instead of scanning them
        /// (benchmarking mode; may overestimate).
        #[arg(long)]
        fast_cmax_bisect: bool,
        /// Block-ending jobs for --algo partition, e.g. 2,5,6.
        #[arg(long = "P", value_delimiter = ',')]
        p_jobs: Vec<JobId>,
        /// Pair-leading jobs for --algo partition, e.g. 1,3,4.
        #[arg(long = "T", value_delimiter = ',')]
        t_jobs: Vec<JobId>,
        /// Lateness bound for --algo partition.
        #[arg(long = "L", allow_hyphen_values = true)]
        l_bound: Option<Time>,
        /// Job-count cap for the structured oracle.
        #[arg(long, default_value_t = DEFAULT_STRUCTURED_CAP)]
        cap_structured: usize,
        /// Job-count cap for the timeline oracle.
        #[arg(long, default_value_t = DEFAULT_TIMELINE_CAP)]
        cap_timeline: usize,
        /// Job-count cap for the general-instance solver.
        #[arg(long, default_value_t = 8)]
        cap_general: usize,
    },
    /// Check a schedule file against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Generate a seeded random instance.
    Gen {
        #[arg(long)]
        n: usize,
        /// Common first-task length (fixes p; see --p-min/--p-max for a range).
        #[arg(long)]
        p: Option<Time>,
        #[arg(long)]
        p_min: Option<Time>,
        #[arg(long)]
        p_max: Option<Time>,
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        b_min: Option<Time>,
        #[arg(long)]
        b_max: Option<Time>,
        #[arg(long, allow_hyphen_values = true)]
        d_min: Option<Time>,
        #[arg(long, allow_hyphen_values = true)]
        d_max: Option<Time>,
        /// Fraction of jobs with a second task longer than p.
        #[arg(long, default_value_t = 0.0)]
        long_frac: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve seeded random instances and emit one CSV row per trial.
    Bench {
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        p: Option<Time>,
        #[arg(long, default_value_t = 0.0)]
        long_frac: f64,
        #[arg(long, default_value_t = DEFAULT_STRUCTURED_CAP)]
        cap_structured: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Usage errors are bad input (clap's own exit code would collide with
    // the infeasible outcome).
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_BAD_INPUT } else { 0 });
        }
    };
    match cli.cmd {
        Cmd::Solve {
            input,
            algo,
            check_oracle,
            out,
            gantt,
            dump_graph,
            trace_trims,
            fast_cmax_bisect,
            p_jobs,
            t_jobs,
            l_bound,
            cap_structured,
            cap_timeline,
            cap_general,
        } => run_solve(SolveArgs {
            input,
            algo,
            check_oracle,
            out,
            gantt,
            dump_graph,
            trace_trims,
            fast_cmax_bisect,
            p_jobs,
            t_jobs,
            l_bound,
            cap_structured,
            cap_timeline,
            cap_general,
        }),
        Cmd::Verify { instance, schedule } => run_verify(&instance, &schedule),
        Cmd::Gen {
            n,
            p,
            p_min,
            p_max,
            class,
            seed,
            b_min,
            b_max,
            d_min,
            d_max,
            long_frac,
            out,
        } => run_gen(GenArgs {
            n,
            p,
            p_min,
            p_max,
            class,
            seed,
            b_min,
            b_max,
            d_min,
            d_max,
            long_frac,
            out,
        }),
        Cmd::Bench {
            class,
            sizes,
            trials,
            seed,
            p,
            long_frac,
            cap_structured,
            out,
        } => run_bench(BenchArgs {
            class,
            sizes,
            trials,
            seed,
            p,
            long_frac,
            cap_structured,
            out,
        }),
    }
}

struct SolveArgs {
    input: PathBuf,
    algo: Algo,
    check_oracle: bool,
    out: Option<PathBuf>,
    gantt: bool,
    dump_graph: Option<PathBuf>,
    trace_trims: Option<PathBuf>,
    fast_cmax_bisect: bool,
    p_jobs: Vec<JobId>,
    t_jobs: Vec<JobId>,
    l_bound: Option<Time>,
    cap_structured: usize,
    cap_timeline: usize,
    cap_general: usize,
}

enum SolveFailure {
    Unsupported(String),
    Infeasible(String),
    Internal(String),
}

impl From<AgreeableError> for SolveFailure {
    fn from(e: AgreeableError) -> Self {
        match e {
            AgreeableError::NotAgreeable(_) | AgreeableError::EmptyInstance => {
                SolveFailure::Unsupported(e.to_string())
            }
            AgreeableError::Internal(_) => SolveFailure::Internal(e.to_string()),
        }
    }
}

impl From<DisagreeableError> for SolveFailure {
    fn from(e: DisagreeableError) -> Self {
        match e {
            DisagreeableError::NotDisagreeable(_) | DisagreeableError::EmptyInstance => {
                SolveFailure::Unsupported(e.to_string())
            }
            DisagreeableError::Internal(_) => SolveFailure::Internal(e.to_string()),
        }
    }
}

impl From<PartitionError> for SolveFailure {
    fn from(e: PartitionError) -> Self {
        match e {
            PartitionError::CapExceeded { .. } | PartitionError::EmptyInstance => {
                SolveFailure::Unsupported(e.to_string())
            }
            _ => SolveFailure::Infeasible(e.to_string()),
        }
    }
}

impl From<OracleError> for SolveFailure {
    fn from(e: OracleError) -> Self {
        SolveFailure::Unsupported(e.to_string())
    }
}

fn run_solve(args: SolveArgs) -> ExitCode {
    let inst = match load_instance(&args.input) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let class = classify(&inst);
    let started = Instant::now();
    let solved = dispatch(&args, &inst, class);
    let wall_micros = started.elapsed().as_micros();
    let (algo_name, solution) = match solved {
        Ok(x) => x,
        Err(SolveFailure::Unsupported(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_UNSUPPORTED);
        }
        Err(SolveFailure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            return ExitCode::from(EXIT_INFEASIBLE);
        }
        Err(SolveFailure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };

    let ts = match schedule_timeline(&solution.schedule, &inst) {
        Ok(ts) => ts,
        Err(e) => {
            eprintln!("internal error: solver emitted an invalid schedule: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };

    let (oracle_lmax, oracle_match) = if args.check_oracle {
        match oracle_structured(&inst, args.cap_structured) {
            Ok(r) => (Some(r.lmax), Some(r.lmax == solution.lmax)),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_UNSUPPORTED);
            }
        }
    } else {
        (None, None)
    };

    let report = SolveReport {
        algorithm: algo_name,
        n: inst.n(),
        p: inst.p(),
        class: class.to_string(),
        lmax: solution.lmax,
        makespan: ts.makespan,
        schedule: solution.schedule.clone(),
        wall_micros,
        oracle_lmax,
        oracle_match,
    };
    print!("{}", report.render());
    if args.gantt {
        print!("{}", render_gantt(&ts, &inst));
    }
    if let Some(path) = &args.out {
        let file = schedule_to_file(&solution.schedule, &inst);
        if let Err(e) = write_atomic(path, &schedule_file_to_json(&file)) {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    }
    if oracle_match == Some(false) {
        eprintln!("error: oracle mismatch");
        return ExitCode::from(EXIT_INTERNAL);
    }
    ExitCode::SUCCESS
}

fn dispatch(
    args: &SolveArgs,
    inst: &Instance,
    class: Classification,
) -> Result<(String, Solution), SolveFailure> {
    match args.algo {
        Algo::Auto => match class {
            Classification::Agreeable | Classification::Both => {
                run_agreeable(args, inst).map(|s| ("agreeable".into(), s))
            }
            Classification::Disagreeable => {
                run_disagreeable(args, inst).map(|s| ("disagreeable".into(), s))
            }
            Classification::General => {
                if inst.n() <= args.cap_general {
                    let s = solve_general_small(inst, args.cap_general)?;
                    Ok(("general-small".into(), s))
                } else {
                    Err(SolveFailure::Unsupported(format!(
                        "general instance with {} jobs exceeds the exact-search cap {}",
                        inst.n(),
                        args.cap_general
                    )))
                }
            }
        },
        Algo::Agreeable => run_agreeable(args, inst).map(|s| ("agreeable".into(), s)),
        Algo::Disagreeable => run_disagreeable(args, inst).map(|s| ("disagreeable".into(), s)),
        Algo::Oracle => {
            let r = oracle_structured(inst, args.cap_structured)?;
            // Small instances also get the free-form timeline cross-check.
            if inst.n() <= args.cap_timeline {
                let t = oracle_timeline(inst, args.cap_timeline)?;
                if t.lmax != r.lmax {
                    return Err(SolveFailure::Internal(format!(
                        "timeline optimum {} differs from structured optimum {}",
                        t.lmax, r.lmax
                    )));
                }
            }
            Ok((
                "oracle".into(),
                Solution {
                    lmax: r.lmax,
                    schedule: r.witness,
                },
            ))
        }
        Algo::GeneralSmall => {
            let s = solve_general_small(inst, args.cap_general)?;
            Ok(("general-small".into(), s))
        }
        Algo::Partition => {
            let l = args.l_bound.ok_or_else(|| {
                SolveFailure::Unsupported("--algo partition needs --L <bound>".into())
            })?;
            let part = Partition::new(inst, args.p_jobs.clone(), args.t_jobs.clone())?;
            match partition_test(&part, l, inst) {
                Some(schedule) => {
                    let ts = schedule_timeline(&schedule, inst)
                        .map_err(|e| SolveFailure::Internal(e.to_string()))?;
                    let lmax = lateness_report(&ts, inst)
                        .ok_or_else(|| SolveFailure::Internal("empty witness".into()))?
                        .lmax;
                    Ok(("partition".into(), Solution { lmax, schedule }))
                }
                None => Err(SolveFailure::Infeasible(format!(
                    "no schedule for this partition keeps every lateness within {l}"
                ))),
            }
        }
    }
}

fn run_agreeable(args: &SolveArgs, inst: &Instance) -> Result<Solution, SolveFailure> {
    if let Some(path) = &args.dump_graph {
        let graph = build_graph(inst).map_err(SolveFailure::from)?;
        write_atomic(path, &graph.dump_text())
            .map_err(|e| SolveFailure::Internal(e.to_string()))?;
    }
    solve_agreeable(inst).map_err(SolveFailure::from)
}

fn run_disagreeable(args: &SolveArgs, inst: &Instance) -> Result<Solution, SolveFailure> {
    let opts = DisagreeableOptions {
        fast_cmax_bisect: args.fast_cmax_bisect,
    };
    if let Some(path) = &args.trace_trims {
        let mut lines = String::new();
        let fmt_opt = |x: Option<usize>| x.map_or("none".to_string(), |v| v.to_string());
        let mut sink = |s: &TrimStep| {
            lines.push_str(&format!(
                "C={} L={} k*={} i*={} alpha={} beta={}\n",
                s.c,
                s.l,
                fmt_opt(s.k_star),
                fmt_opt(s.i_star),
                fmt_opt(s.alpha),
                fmt_opt(s.beta),
            ));
        };
        let solution = solve_disagreeable_with(inst, &opts, Some(&mut sink))?;
        write_atomic(path, &lines).map_err(|e| SolveFailure::Internal(e.to_string()))?;
        return Ok(solution);
    }
    solve_disagreeable_with(inst, &opts, None).map_err(SolveFailure::from)
}

fn run_verify(instance: &Path, schedule: &Path) -> ExitCode {
    let inst = match load_instance(instance) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let file = match load_schedule(schedule) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let issues = verify_schedule(&file, &inst);
    if issues.is_empty() {
        println!("ok: schedule is feasible, lmax = {}", file.lmax);
        ExitCode::SUCCESS
    } else {
        for issue in &issues {
            println!("violation: {issue}");
        }
        ExitCode::from(EXIT_INFEASIBLE)
    }
}

struct GenArgs {
    n: usize,
    p: Option<Time>,
    p_min: Option<Time>,
    p_max: Option<Time>,
    class: ClassArg,
    seed: u64,
    b_min: Option<Time>,
    b_max: Option<Time>,
    d_min: Option<Time>,
    d_max: Option<Time>,
    long_frac: f64,
    out: Option<PathBuf>,
}

fn run_gen(args: GenArgs) -> ExitCode {
    let p_range = match (args.p, args.p_min, args.p_max) {
        (Some(v), None, None) => (v, v),
        (None, Some(lo), Some(hi)) => (lo, hi),
        (None, None, None) => (1, 5),
        _ => {
            eprintln!("error: give either --p or both --p-min and --p-max");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let b_range = match (args.b_min, args.b_max) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => {
            eprintln!("error: give both --b-min and --b-max or neither");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let d_range = match (args.d_min, args.d_max) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => {
            eprintln!("error: give both --d-min and --d-max or neither");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let cfg = GenConfig {
        n: args.n,
        p_range,
        b_range,
        d_range,
        class: args.class.into(),
        long_job_fraction: args.long_frac,
        seed: args.seed,
    };
    match generate(&cfg) {
        Ok(inst) => {
            let json = instance_to_json(&inst);
            match args.out {
                Some(path) => {
                    if let Err(e) = write_atomic(&path, &json) {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_BAD_INPUT);
                    }
                }
                None => print!("{json}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

struct BenchArgs {
    class: ClassArg,
    sizes: Vec<usize>,
    trials: usize,
    seed: u64,
    p: Option<Time>,
    long_frac: f64,
    cap_structured: usize,
    out: Option<PathBuf>,
}

fn run_bench(args: BenchArgs) -> ExitCode {
    let mut csv = String::from("n,seed,algo,lmax,oracle_lmax,match,micros\n");
    let mut rng = SplitMix64::new(args.seed);
    for &n in &args.sizes {
        for _trial in 0..args.trials {
            let inst_seed = rng.next_u64();
            let cfg = GenConfig {
                long_job_fraction: args.long_frac,
                ..GenConfig::new(n, args.p.unwrap_or(3), args.class.into(), inst_seed)
            };
            let inst = match generate(&cfg) {
                Ok(i) => i,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_BAD_INPUT);
                }
            };
            let started = Instant::now();
            let solved: Result<(&str, Solution), String> = match args.class {
                ClassArg::Agreeable => solve_agreeable(&inst)
                    .map(|s| ("agreeable", s))
                    .map_err(|e| e.to_string()),
                ClassArg::Disagreeable => {
                    solve_disagreeable_with(&inst, &DisagreeableOptions::default(), None)
                        .map(|s| ("disagreeable", s))
                        .map_err(|e| e.to_string())
                }
                ClassArg::General => solve_general_small(&inst, inst.n())
                    .map(|s| ("general-small", s))
                    .map_err(|e| e.to_string()),
            };
            let micros = started.elapsed().as_micros();
            let (algo, solution) = match solved {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INTERNAL);
                }
            };
            let (oracle_s, match_s) = if inst.n() <= args.cap_structured {
                match oracle_structured(&inst, args.cap_structured) {
                    Ok(r) => (r.lmax.to_string(), (r.lmax == solution.lmax).to_string()),
                    Err(_) => (String::new(), String::new()),
                }
            } else {
                (String::new(), String::new())
            };
            csv.push_str(&format!(
                "{n},{inst_seed},{algo},{},{oracle_s},{match_s},{micros}\n",
                solution.lmax
            ));
        }
    }
    match args.out {
        Some(path) => {
            if let Err(e) = write_atomic(&path, &csv) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_BAD_INPUT);
            }
        }
        None => print!("{csv}"),
    }
    ExitCode::SUCCESS
}
