//! File formats shared by the command-line tools and the bindings.
//!
//! Event lists are CSV with a `time` header and one ascending time per row.
//! Daily counts are CSV `day,count,observed` with `observed ∈ {0,1}`.
//! Sampled gap configurations are CSV `sample_index,n_points,points` with
//! the points semicolon-joined in one field. Floating-point fields are
//! written with 17 significant digits so parsing them back is exact.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::OrderedConfig;
use crate::error::{Error, Result};
use crate::lgcp::DailyCounts;

/// 17-significant-digit rendering (round-trips through `parse::<f64>()`).
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn events_to_csv(times: &[f64]) -> String {
    let mut out = String::from("time\n");
    for &t in times {
        let _ = writeln!(out, "{}", fmt_g17(t));
    }
    out
}

pub fn write_events_csv(path: &Path, times: &[f64]) -> Result<()> {
    std::fs::write(path, events_to_csv(times))?;
    Ok(())
}

pub fn read_events_csv(path: &Path) -> Result<OrderedConfig> {
    let body = std::fs::read_to_string(path)?;
    parse_events_csv(&body)
}

pub fn parse_events_csv(body: &str) -> Result<OrderedConfig> {
    let mut lines = body.lines();
    match lines.next() {
        Some(header) if header.trim() == "time" => {}
        other => {
            return Err(Error::InvalidData(format!(
                "expected 'time' header, got {other:?}"
            )))
        }
    }
    let mut times = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let t: f64 = line.parse().map_err(|_| {
            Error::InvalidData(format!("bad time on row {}: {line:?}", idx + 2))
        })?;
        times.push(t);
    }
    OrderedConfig::new(times)
}

pub fn counts_to_csv(counts: &DailyCounts) -> String {
    let mut out = String::from("day,count,observed\n");
    for day in 0..counts.len() {
        let _ = writeln!(
            out,
            "{day},{},{}",
            counts.counts()[day],
            u8::from(counts.is_observed(day))
        );
    }
    out
}

pub fn write_counts_csv(path: &Path, counts: &DailyCounts) -> Result<()> {
    std::fs::write(path, counts_to_csv(counts))?;
    Ok(())
}

pub fn read_counts_csv(path: &Path) -> Result<DailyCounts> {
    let body = std::fs::read_to_string(path)?;
    parse_counts_csv(&body)
}

pub fn parse_counts_csv(body: &str) -> Result<DailyCounts> {
    let mut lines = body.lines();
    match lines.next() {
        Some(header) if header.trim() == "day,count,observed" => {}
        other => {
            return Err(Error::InvalidData(format!(
                "expected 'day,count,observed' header, got {other:?}"
            )))
        }
    }
    let mut counts = Vec::new();
    let mut observed = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidData(format!(
                "expected three fields on row {}: {line:?}",
                idx + 2
            )));
        }
        let day: usize = parts[0]
            .parse()
            .map_err(|_| Error::InvalidData(format!("bad day on row {}", idx + 2)))?;
        if day != counts.len() {
            return Err(Error::InvalidData(format!(
                "days must be consecutive from 0, got {day} on row {}",
                idx + 2
            )));
        }
        counts.push(
            parts[1]
                .parse()
                .map_err(|_| Error::InvalidData(format!("bad count on row {}", idx + 2)))?,
        );
        observed.push(match parts[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::InvalidData(format!(
                    "observed must be 0 or 1, got {other:?} on row {}",
                    idx + 2
                )))
            }
        });
    }
    DailyCounts::new(counts, observed)
}

/// One row per sampled configuration: `sample_index,n_points,points` with
/// semicolon-joined points.
pub fn samples_to_csv(samples: &[OrderedConfig]) -> String {
    let mut out = String::from("sample_index,n_points,points\n");
    for (idx, sample) in samples.iter().enumerate() {
        let joined = sample
            .times()
            .iter()
            .map(|&t| fmt_g17(t))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(out, "{idx},{},{joined}", sample.len());
    }
    out
}

pub fn write_samples_csv(path: &Path, samples: &[OrderedConfig]) -> Result<()> {
    std::fs::write(path, samples_to_csv(samples))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn events_round_trip_exactly() {
        let times = vec![0.1, 0.2 + 1e-16, std::f64::consts::PI, 1e4 / 3.0];
        let body = events_to_csv(&times);
        let parsed = parse_events_csv(&body).unwrap();
        assert_eq!(parsed.times(), &times[..]);
    }

    #[test]
    fn events_reject_disorder_and_garbage() {
        assert!(parse_events_csv("time\n2.0\n1.0\n").is_err());
        assert!(parse_events_csv("time\nabc\n").is_err());
        assert!(parse_events_csv("wrong\n1.0\n").is_err());
    }

    #[test]
    fn counts_round_trip() {
        let counts = DailyCounts::new(vec![3, 0, 5], vec![true, false, true]).unwrap();
        let body = counts_to_csv(&counts);
        assert_eq!(parse_counts_csv(&body).unwrap(), counts);
    }

    #[test]
    fn samples_csv_shape() {
        let samples = vec![
            OrderedConfig::empty(),
            OrderedConfig::new(vec![1.5, 2.5]).unwrap(),
        ];
        let body = samples_to_csv(&samples);
        let mut lines = body.lines();
        assert_eq!(lines.next(), Some("sample_index,n_points,points"));
        assert_eq!(lines.next(), Some("0,0,"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("1,2,") && row.contains(';'));
    }
}
