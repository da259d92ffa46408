//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # Gaussian design, 50 trials per point
//! n = 500
//! p = 50
//! m = 50
//! h = 50
//! dist = gaussian
//! snr_grid = logspace(-2, 1, 4), inf
//! trials = 50
//! master_seed = 7
//! estimator = one_step
//! ```
//!
//! Lists are comma separated. `logspace(a, b, k)` expands to `k` values
//! from `10^a` to `10^b`; `inf` (or `noiseless`) is the noiseless point.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::Snr;
use crate::model::DistributionKind;

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_ALT_MIN_ITERS: usize = 100;

pub const KNOWN_KEYS: &[&str] = &[
    "n",
    "p",
    "m",
    "h",
    "dist",
    "unit_variance",
    "signal",
    "scale",
    "snr_grid",
    "trials",
    "master_seed",
    "seed",
    "estimator",
    "max_iters",
    "threads",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignalSpec {
    /// Column `i < min(p, m)` is `scale·eᵢ`.
    Canonical { scale: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    OneStep,
    OraclePerm,
    AltMin { max_iters: usize },
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::OneStep => "one_step",
            EstimatorKind::OraclePerm => "oracle_perm",
            EstimatorKind::AltMin { .. } => "alt_min",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorKind::AltMin { max_iters } => write!(f, "alt_min({max_iters})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub h: usize,
    pub dist: DistributionKind,
    /// Rescale design entries to unit variance (only changes the uniform design).
    pub unit_variance: bool,
    pub signal: SignalSpec,
    pub snr_grid: Vec<Snr<f64>>,
    pub trials: usize,
    pub master_seed: u64,
    pub estimator: EstimatorKind,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    /// Defaults for everything except the dimensions and the grid.
    pub fn new(n: usize, p: usize, m: usize, h: usize, snr_grid: Vec<Snr<f64>>) -> Self {
        Self {
            n,
            p,
            m,
            h,
            dist: DistributionKind::Gaussian,
            unit_variance: false,
            signal: SignalSpec::Canonical { scale: 1.0 },
            snr_grid,
            trials: DEFAULT_TRIALS,
            master_seed: 0,
            estimator: EstimatorKind::OneStep,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::invalid(msg));
        if self.n == 0 || self.p == 0 || self.m == 0 {
            return fail(format!("dimensions must be positive: n={}, p={}, m={}", self.n, self.p, self.m));
        }
        if self.n < self.p {
            return fail(format!("need n >= p, got n={}, p={}", self.n, self.p));
        }
        if self.h == 1 || self.h > self.n {
            return fail(format!("h={} is not a valid displaced-row count for n={}", self.h, self.n));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.snr_grid.is_empty() {
            return fail("snr_grid must not be empty".into());
        }
        for s in &self.snr_grid {
            if let Snr::Finite(v) = s {
                if !(*v > 0.0) || !v.is_finite() {
                    return fail(format!("snr values must be positive and finite, got {v}"));
                }
            }
        }
        if self.snr_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return fail("snr_grid must be strictly ascending".into());
        }
        let SignalSpec::Canonical { scale } = self.signal;
        if !(scale > 0.0) || !scale.is_finite() {
            return fail(format!("signal scale must be positive, got {scale}"));
        }
        if let EstimatorKind::AltMin { max_iters: 0 } = self.estimator {
            return fail("alt_min needs max_iters >= 1".into());
        }
        if self.threads == Some(0) {
            return fail("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut p = None;
        let mut m = None;
        let mut h = None;
        let mut grid = None;
        let mut cfg = ExperimentConfig::new(0, 0, 0, 0, Vec::new());
        let mut estimator_name = None;
        let mut max_iters = None;
        let mut scale = 1.0;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => n = Some(parse_num(key, value)?),
                "p" => p = Some(parse_num(key, value)?),
                "m" => m = Some(parse_num(key, value)?),
                "h" => h = Some(parse_num(key, value)?),
                "dist" => cfg.dist = value.parse()?,
                "unit_variance" => cfg.unit_variance = parse_num(key, value)?,
                "signal" => {
                    if !value.eq_ignore_ascii_case("canonical") {
                        return Err(Error::invalid(format!("unsupported signal `{value}`")));
                    }
                }
                "scale" => scale = parse_num(key, value)?,
                "snr_grid" => grid = Some(parse_snr_grid(value)?),
                "trials" => cfg.trials = parse_num(key, value)?,
                "master_seed" | "seed" => cfg.master_seed = parse_num(key, value)?,
                "estimator" => estimator_name = Some(value.to_string()),
                "max_iters" => max_iters = Some(parse_num(key, value)?),
                "threads" => cfg.threads = Some(parse_num(key, value)?),
                other => return Err(Error::invalid(format!("unknown config key `{other}`"))),
            }
        }

        let require = |v: Option<usize>, k: &str| v.ok_or_else(|| Error::invalid(format!("missing config key `{k}`")));
        cfg.n = require(n, "n")?;
        cfg.p = require(p, "p")?;
        cfg.m = require(m, "m")?;
        cfg.h = require(h, "h")?;
        cfg.snr_grid = grid.ok_or_else(|| Error::invalid("missing config key `snr_grid`"))?;
        cfg.signal = SignalSpec::Canonical { scale };
        cfg.estimator = parse_estimator(estimator_name.as_deref().unwrap_or("one_step"), max_iters)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

fn parse_num<V: FromStr>(key: &str, value: &str) -> Result<V> {
    value.parse().map_err(|_| Error::invalid(format!("bad value `{value}` for `{key}`")))
}

fn parse_estimator(value: &str, max_iters: Option<usize>) -> Result<EstimatorKind> {
    let v = value.trim();
    match v {
        "one_step" => Ok(EstimatorKind::OneStep),
        "oracle_perm" => Ok(EstimatorKind::OraclePerm),
        "alt_min" => Ok(EstimatorKind::AltMin { max_iters: max_iters.unwrap_or(DEFAULT_ALT_MIN_ITERS) }),
        _ => {
            let inner = v
                .strip_prefix("alt_min(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::invalid(format!("unknown estimator `{v}`")))?;
            Ok(EstimatorKind::AltMin { max_iters: parse_num("estimator", inner.trim())? })
        }
    }
}

/// Parses a comma-separated grid of positive values, `inf`/`noiseless` and
/// `logspace(a, b, k)` items.
pub fn parse_snr_grid(value: &str) -> Result<Vec<Snr<f64>>> {
    let mut out = Vec::new();
    for item in split_top_level(value) {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if let Some(args) = item.strip_prefix("logspace(").and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::invalid(format!("logspace takes (start, stop, count), got `{item}`")));
            }
            let a: f64 = parse_num("logspace", parts[0])?;
            let b: f64 = parse_num("logspace", parts[1])?;
            let k: usize = parse_num("logspace", parts[2])?;
            out.extend(logspace(a, b, k).into_iter().map(Snr::Finite));
        } else if item.eq_ignore_ascii_case("inf") || item.eq_ignore_ascii_case("noiseless") {
            out.push(Snr::Noiseless);
        } else {
            out.push(Snr::Finite(parse_num("snr_grid", item)?));
        }
    }
    Ok(out)
}

/// `k` values `10^a … 10^b`, evenly spaced in the exponent.
pub fn logspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![10f64.powf(a)],
        _ => (0..k).map(|i| 10f64.powf(a + (b - a) * i as f64 / (k - 1) as f64)).collect(),
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}
