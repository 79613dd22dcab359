//! Seeded random instance generation for the three structural classes.

use alloc::vec::Vec;
use core::fmt;

use crate::model::{Instance, Job, JobId, Time};

/// splitmix64; small, stateless-friendly and stable across platforms, so
/// seeded outputs are reproducible byte for byte.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from the inclusive range, by rejection.
    pub fn range(&mut self, lo: Time, hi: Time) -> Time {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        if span == 0 {
            return lo.wrapping_add(self.next_u64() as Time);
        }
        let limit = u64::MAX - u64::MAX % span;
        loop {
            let x = self.next_u64();
            if x < limit {
                return lo + (x % span) as Time;
            }
        }
    }

    fn shuffle<T>(&mut self, xs: &mut [T]) {
        for k in (1..xs.len()).rev() {
            let j = self.range(0, k as Time) as usize;
            xs.swap(k, j);
        }
    }
}

/// Which structural class to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassTarget {
    Agreeable,
    Disagreeable,
    General,
}

impl fmt::Display for ClassTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassTarget::Agreeable => "agreeable",
            ClassTarget::Disagreeable => "disagreeable",
            ClassTarget::General => "general",
        };
        f.write_str(s)
    }
}

/// Generation parameters. `b_range` defaults to `[0, 2p]`; `d_range` defaults
/// to `[2p, (3p + b_max) * n]`, which keeps instances neither all-late nor
/// all-early.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub n: usize,
    pub p_range: (Time, Time),
    pub b_range: Option<(Time, Time)>,
    pub d_range: Option<(Time, Time)>,
    pub class: ClassTarget,
    /// Fraction of jobs whose `b` is drawn from `(p, 2p]`.
    pub long_job_fraction: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(n: usize, p: Time, class: ClassTarget, seed: u64) -> Self {
        GenConfig {
            n,
            p_range: (p, p),
            b_range: None,
            d_range: None,
            class,
            long_job_fraction: 0.0,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenError {
    EmptyRange,
    /// Long jobs requested but the `b` range has no value in `(p, 2p]`.
    NoLongValues { p: Time },
    /// Short jobs needed but the `b` range has no value in `[0, p]`.
    NoShortValues { p: Time },
    BadFraction,
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GenError::EmptyRange => write!(f, "empty parameter range"),
            GenError::NoLongValues { p } => {
                write!(f, "long jobs requested but b range misses (p, 2p] for p = {p}")
            }
            GenError::NoShortValues { p } => {
                write!(f, "short jobs needed but b range misses [0, p] for p = {p}")
            }
            GenError::BadFraction => write!(f, "long_job_fraction must lie in [0, 1]"),
        }
    }
}

impl core::error::Error for GenError {}

/// Draws an instance of the requested class, deterministically in the seed.
pub fn generate(cfg: &GenConfig) -> Result<Instance, GenError> {
    if cfg.p_range.0 > cfg.p_range.1 || cfg.p_range.0 < 1 {
        return Err(GenError::EmptyRange);
    }
    if !(0.0..=1.0).contains(&cfg.long_job_fraction) {
        return Err(GenError::BadFraction);
    }
    let mut rng = SplitMix64::new(cfg.seed);
    let p = rng.range(cfg.p_range.0, cfg.p_range.1);
    let (b_lo, b_hi) = cfg.b_range.unwrap_or((0, 2 * p));
    if b_lo > b_hi || b_lo < 0 {
        return Err(GenError::EmptyRange);
    }
    let n = cfg.n;
    let k_long = (cfg.long_job_fraction * n as f64 + 0.5) as usize;
    let k_long = k_long.min(n);
    let long_lo = b_lo.max(p + 1);
    let long_hi = b_hi.min(2 * p);
    if k_long > 0 && long_lo > long_hi {
        return Err(GenError::NoLongValues { p });
    }
    let short_hi = b_hi.min(p);
    if k_long < n && b_lo > short_hi {
        return Err(GenError::NoShortValues { p });
    }

    let (d_lo, d_hi) = cfg.d_range.unwrap_or((2 * p, (3 * p + b_hi) * n as Time));
    if d_lo > d_hi {
        return Err(GenError::EmptyRange);
    }

    let mut ds: Vec<Time> = (0..n).map(|_| rng.range(d_lo, d_hi)).collect();
    ds.sort_unstable();
    let mut bs: Vec<Time> = (0..n - k_long).map(|_| rng.range(b_lo, short_hi)).collect();
    bs.extend((0..k_long).map(|_| rng.range(long_lo, long_hi)));
    match cfg.class {
        ClassTarget::Agreeable => bs.sort_unstable(),
        ClassTarget::Disagreeable => bs.sort_unstable_by(|a, b| b.cmp(a)),
        ClassTarget::General => rng.shuffle(&mut bs),
    }
    let jobs: Vec<Job> = ds
        .iter()
        .zip(bs.iter())
        .enumerate()
        .map(|(k, (&d, &b))| Job {
            id: k as JobId + 1,
            b,
            d,
        })
        .collect();
    Ok(Instance::new(p, jobs).expect("generated values are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify, Classification};

    #[test]
    fn deterministic_in_seed() {
        let cfg = GenConfig {
            long_job_fraction: 0.4,
            ..GenConfig::new(8, 3, ClassTarget::General, 42)
        };
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    }

    #[test]
    fn classes_are_consistent() {
        for seed in 0..200 {
            let a = generate(&GenConfig::new(6, 2, ClassTarget::Agreeable, seed)).unwrap();
            assert!(matches!(
                classify(&a),
                Classification::Agreeable | Classification::Both
            ));
            let mut cfg = GenConfig::new(7, 2, ClassTarget::Disagreeable, seed);
            cfg.long_job_fraction = 0.3;
            let d = generate(&cfg).unwrap();
            assert!(matches!(
                classify(&d),
                Classification::Disagreeable | Classification::Both
            ));
        }
    }

    #[test]
    fn no_long_jobs_when_fraction_zero() {
        for seed in 0..50 {
            let i = generate(&GenConfig::new(6, 3, ClassTarget::Disagreeable, seed)).unwrap();
            assert!(i.jobs().iter().all(|j| j.b <= i.p()));
        }
    }

    #[test]
    fn long_fraction_respected() {
        let mut cfg = GenConfig::new(10, 3, ClassTarget::Agreeable, 7);
        cfg.long_job_fraction = 0.5;
        let i = generate(&cfg).unwrap();
        let longs = i.jobs().iter().filter(|j| j.b > i.p()).count();
        assert_eq!(longs, 5);
    }

    #[test]
    fn impossible_long_request_errors() {
        let mut cfg = GenConfig::new(4, 3, ClassTarget::General, 1);
        cfg.b_range = Some((0, 3));
        cfg.long_job_fraction = 0.5;
        assert_eq!(generate(&cfg), Err(GenError::NoLongValues { p: 3 }));
    }
}
