//! Sweep CSV output.
//!
//! Header (fixed column order):
//! `n,p,m,h,dist,estimator,snr,sigma,logdet_ratio,recovery_rate,mean_hamming,mean_rel_b_error,trials,seed`.
//! Reals carry 12 significant digits; the noiseless point writes `inf` for
//! `snr` and `logdet_ratio`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::sweep::{SweepResult, SweepRow};
use crate::metrics::Snr;

pub const CSV_HEADER: &str =
    "n,p,m,h,dist,estimator,snr,sigma,logdet_ratio,recovery_rate,mean_hamming,mean_rel_b_error,trials,seed";

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn format_sig12(x: f64) -> String {
    format_sig(x, 12)
}

pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn snr_field(s: Snr<f64>) -> String {
    match s {
        Snr::Noiseless => "inf".into(),
        Snr::Finite(v) => format_sig12(v),
    }
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        let fields = [
            r.n.to_string(),
            r.p.to_string(),
            r.m.to_string(),
            r.h.to_string(),
            r.dist.name().to_string(),
            r.estimator.clone(),
            snr_field(r.snr),
            format_sig12(r.sigma),
            r.logdet_ratio.map_or_else(|| "inf".to_string(), format_sig12),
            format_sig12(r.recovery_rate),
            format_sig12(r.mean_hamming),
            format_sig12(r.mean_rel_b_error),
            r.trials.to_string(),
            r.seed.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_csv_string(result)).map_err(|e| Error::io(path, e))
}

/// Reads rows written by [`write_csv`]. Failure counts are not stored in the
/// file and come back as zero.
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected CSV header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 14 {
            return Err(Error::Parse(format!("row {k}: expected 14 fields, got {}", f.len())));
        }
        let bad = |name: &str, v: &str| Error::Parse(format!("row {k}: bad {name} `{v}`"));
        let int = |i: usize, name: &str| f[i].parse::<usize>().map_err(|_| bad(name, f[i]));
        let real = |i: usize, name: &str| f[i].parse::<f64>().map_err(|_| bad(name, f[i]));
        let snr = if f[6] == "inf" { Snr::Noiseless } else { Snr::Finite(real(6, "snr")?) };
        rows.push(SweepRow {
            n: int(0, "n")?,
            p: int(1, "p")?,
            m: int(2, "m")?,
            h: int(3, "h")?,
            dist: f[4].parse()?,
            estimator: f[5].to_string(),
            snr,
            sigma: real(7, "sigma")?,
            logdet_ratio: if f[8] == "inf" { None } else { Some(real(8, "logdet_ratio")?) },
            recovery_rate: real(9, "recovery_rate")?,
            mean_hamming: real(10, "mean_hamming")?,
            mean_rel_b_error: real(11, "mean_rel_b_error")?,
            trials: int(12, "trials")?,
            failed: 0,
            seed: f[13].parse().map_err(|_| bad("seed", f[13]))?,
        });
    }
    Ok(SweepResult { rows })
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<SweepResult> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(1.0), "1");
        assert_eq!(format_sig12(0.1), "0.1");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(123456.789), "123456.789");
        assert_eq!(format_sig12(1e-7), "1e-7");
        assert_eq!(format_sig12(2.5e13), "2.5e13");
        assert_eq!(format_sig12(-0.0015), "-0.0015");
        assert_eq!(format_sig12(f64::INFINITY), "inf");
    }

    #[test]
    fn empty_result_is_header_only() {
        let text = to_csv_string(&SweepResult::default());
        assert_eq!(text, format!("{CSV_HEADER}\n"));
        assert!(parse_csv(&text).unwrap().rows.is_empty());
    }
}
