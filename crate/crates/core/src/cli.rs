//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime or data error, 2 usage or validation error.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::estimators::one_step_estimate;
use crate::experiments::{self, ExperimentConfig};
use crate::matrix::DenseMatrix;
use crate::metrics::{classify_regime, logdet, minimax_logdet_threshold, snr, stable_rank, Snr};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const BELOW_THRESHOLD_MESSAGE: &str = "below minimax threshold: recovery information-theoretically unreliable";

#[derive(Debug, Parser)]
#[command(name = "shuffled", version, about = "Permutation recovery for linear regression with shuffled labels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the permutation and signal from X and Y matrix files.
    Solve {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long = "out-perm")]
        out_perm: PathBuf,
        #[arg(long = "out-b")]
        out_b: PathBuf,
    },
    /// Run a Monte-Carlo sweep described by a config file and write CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `master_seed` from the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (results do not depend on this).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Trace alternating minimization on the p = 2, m = 1 stagnation example.
    DemoFailure {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print feasibility diagnostics for a signal matrix and noise level.
    Diagnose {
        #[arg(long)]
        b: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve { x, y, out_perm, out_b } => cmd_solve(&x, &y, &out_perm, &out_b),
        Command::Simulate { config, out, seed, threads } => cmd_simulate(&config, &out, seed, threads),
        Command::DemoFailure { n, iters, seed, out } => cmd_demo_failure(n, iters, seed, &out),
        Command::Diagnose { b, sigma, n, m } => cmd_diagnose(&b, sigma, n, m),
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

pub fn cmd_solve(x: &PathBuf, y: &PathBuf, out_perm: &PathBuf, out_b: &PathBuf) -> i32 {
    let result = (|| -> Result<(), Error> {
        let x = DenseMatrix::<f64>::read_from(x)?;
        let y = DenseMatrix::<f64>::read_from(y)?;
        let est = one_step_estimate(&x, &y)?;
        est.perm_hat.write_to(out_perm)?;
        est.b_hat.write_to(out_b)?;
        eprintln!("solved n={} p={} m={} objective={:e}", x.rows(), x.cols(), y.cols(), est.objective);
        Ok(())
    })();
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => fail(EXIT_RUNTIME, e),
    }
}

pub fn cmd_simulate(config: &PathBuf, out: &PathBuf, seed: Option<u64>, threads: Option<usize>) -> i32 {
    let text = match fs::read_to_string(config) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_RUNTIME, format!("{}: {e}", config.display())),
    };
    let mut cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", config.display())),
    };
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if threads.is_some() {
        cfg.threads = threads;
    }
    if let Err(e) = cfg.validate() {
        return fail(EXIT_USAGE, e);
    }
    let result = match experiments::run_sweep(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    for row in &result.rows {
        println!(
            "snr={} sigma={} recovery_rate={} mean_hamming={} trials={} failed={}",
            row.snr,
            experiments::format_sig12(row.sigma),
            experiments::format_sig12(row.recovery_rate),
            experiments::format_sig12(row.mean_hamming),
            row.trials,
            row.failed
        );
    }
    match experiments::write_csv(&result, out) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(EXIT_RUNTIME, e),
    }
}

pub fn cmd_demo_failure(n: usize, iters: usize, seed: u64, out: &PathBuf) -> i32 {
    if n < 100 {
        return fail(EXIT_USAGE, format!("--n must be at least 100, got {n}"));
    }
    let steps = match experiments::reproduce_failure_demo(n, iters, seed) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    if let (Some(first), Some(last)) = (steps.first(), steps.last()) {
        eprintln!("hamming: iteration 0 = {}, iteration {} = {}", first.hamming, last.iteration, last.hamming);
    }
    match fs::write(out, experiments::trace_to_csv(&steps)) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(EXIT_RUNTIME, format!("{}: {e}", out.display())),
    }
}

pub fn cmd_diagnose(b: &PathBuf, sigma: f64, n: usize, m: usize) -> i32 {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return fail(EXIT_USAGE, format!("--sigma must be finite and non-negative, got {sigma}"));
    }
    if n < 3 || m == 0 {
        return fail(EXIT_USAGE, format!("need n >= 3 and m >= 1, got n={n}, m={m}"));
    }
    let b = match DenseMatrix::<f64>::read_from(b) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    if b.cols() != m {
        eprintln!("warning: B has {} columns but --m is {m}", b.cols());
    }
    let srank = match stable_rank(&b) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    let ratio = match snr(&b, m, sigma) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let label = classify_regime(srank, n);
    let threshold = minimax_logdet_threshold(n);
    println!("srank = {}", experiments::format_sig12(srank));
    match ratio {
        Snr::Noiseless => println!("snr = noiseless"),
        Snr::Finite(v) => println!("snr = {}", experiments::format_sig12(v)),
    }
    println!("minimax_threshold = {}", experiments::format_sig12(threshold));
    if sigma > 0.0 {
        let ld = match logdet(&b, sigma) {
            Ok(v) => v,
            Err(e) => return fail(EXIT_USAGE, e),
        };
        println!("logdet = {}", experiments::format_sig12(ld));
        println!("logdet_ratio = {}", experiments::format_sig12(ld / (n as f64).ln()));
        if ld < threshold {
            println!("{BELOW_THRESHOLD_MESSAGE}");
        }
    } else {
        println!("logdet = noiseless");
    }
    println!(
        "regime = {} (hard from {}, medium from {}, easy from {})",
        label.tag,
        experiments::format_sig12(label.hard_from),
        experiments::format_sig12(label.medium_from),
        experiments::format_sig12(label.easy_from)
    );
    EXIT_OK
}
