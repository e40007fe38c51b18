//! Reference datasets and single-column CSV ingestion.
//!
//! The bladder-cancer remission times ship with the crate. The carbon-fibre
//! and carcinoma datasets are looked up on disk; whatever is loaded is
//! checked against the published summary statistics.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HewError, Result};
use crate::estimation::quantile_sorted;
use crate::sampling::{Sample, SampleSource};

const BLADDER_CSV: &str = include_str!("../data/bladder.csv");

/// Environment variable naming a directory with `carbon.csv` and
/// `carcinoma.csv`.
pub const DATA_DIR_ENV: &str = "HEW_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dataset {
    Bladder,
    Carcinoma,
    Carbon,
}

impl Dataset {
    pub const ALL: [Dataset; 3] = [Dataset::Bladder, Dataset::Carcinoma, Dataset::Carbon];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::Bladder => "bladder",
            Dataset::Carcinoma => "carcinoma",
            Dataset::Carbon => "carbon",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }

    /// Published summary statistics with the number of printed decimals.
    pub fn reference(self) -> ReferenceStats {
        let two = |v: f64| (v, 2);
        match self {
            Dataset::Bladder => ReferenceStats {
                n: 127,
                min: two(0.08),
                q1: two(3.34),
                median: two(6.25),
                mean: two(8.82),
                q3: two(11.72),
                max: two(46.12),
                skewness: two(2.08),
            },
            Dataset::Carcinoma => ReferenceStats {
                n: 194,
                min: two(1.00),
                q1: two(8.00),
                median: two(14.00),
                mean: two(18.81),
                q3: two(24.75),
                max: (101.0, 0),
                skewness: (2.078, 3),
            },
            Dataset::Carbon => ReferenceStats {
                n: 63,
                min: two(0.39),
                q1: two(2.09),
                median: two(2.85),
                mean: two(2.74),
                q3: two(3.28),
                max: two(4.90),
                skewness: (-0.198, 3),
            },
        }
    }

    /// Loads the dataset: bladder from the embedded copy, the others from
    /// `dir`. The result is checked against [`Dataset::reference`].
    pub fn load(self, dir: Option<&Path>) -> Result<Sample> {
        let values = match (self, dir) {
            (Dataset::Bladder, _) => parse_values(BLADDER_CSV)?,
            (_, Some(dir)) => read_values(&dir.join(self.file_name()))?,
            (_, None) => {
                return Err(HewError::InvalidSample(format!(
                    "{} is not bundled; set {DATA_DIR_ENV} to a directory containing {}",
                    self.name(),
                    self.file_name()
                )))
            }
        };
        let sample = Sample::new(values, SampleSource::File)?;
        self.reference().check(&summary_stats(&sample))?;
        Ok(sample)
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
    /// Bias-adjusted sample skewness (G1).
    pub skewness: f64,
}

/// Summary of a sorted sample. Quartiles use linear interpolation between
/// order statistics.
pub fn summary_stats(sorted: &[f64]) -> SummaryStats {
    let n = sorted.len();
    let nf = n as f64;
    let mean = sorted.iter().sum::<f64>() / nf;
    let m2 = sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    let m3 = sorted.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / nf;
    let g1 = m3 / m2.powf(1.5);
    let skewness = if n > 2 {
        g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0)
    } else {
        f64::NAN
    };
    SummaryStats {
        n,
        min: sorted[0],
        q1: quantile_sorted(sorted, 0.25),
        median: quantile_sorted(sorted, 0.5),
        mean,
        q3: quantile_sorted(sorted, 0.75),
        max: sorted[n - 1],
        skewness,
    }
}

/// Printed summary statistics, each paired with its number of decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceStats {
    pub n: usize,
    pub min: (f64, u32),
    pub q1: (f64, u32),
    pub median: (f64, u32),
    pub mean: (f64, u32),
    pub q3: (f64, u32),
    pub max: (f64, u32),
    pub skewness: (f64, u32),
}

impl ReferenceStats {
    /// Every statistic must round to its printed value (half a unit in the
    /// last printed place).
    pub fn check(&self, s: &SummaryStats) -> Result<()> {
        if s.n != self.n {
            return Err(HewError::InvalidSample(format!(
                "expected {} observations, found {}",
                self.n, s.n
            )));
        }
        let fields = [
            ("min", self.min, s.min),
            ("q1", self.q1, s.q1),
            ("median", self.median, s.median),
            ("mean", self.mean, s.mean),
            ("q3", self.q3, s.q3),
            ("max", self.max, s.max),
            ("skewness", self.skewness, s.skewness),
        ];
        for (name, (printed, decimals), actual) in fields {
            let half_unit = 0.5 * 10f64.powi(-(decimals as i32)) + 1e-9;
            if !((actual - printed).abs() <= half_unit) {
                return Err(HewError::InvalidSample(format!(
                    "{name} = {actual} does not match the reference value {printed}"
                )));
            }
        }
        Ok(())
    }
}

/// Parses one numeric column. A non-numeric first row is taken as a header;
/// blank lines are skipped; anything else that is not a positive number is
/// an error naming its 1-based line.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let token = line.split(',').next().unwrap_or("").trim();
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => values.push(v),
            Ok(v) => {
                return Err(HewError::InvalidSample(format!(
                    "line {}: value {v} is not a finite positive number",
                    idx + 1
                )))
            }
            Err(_) if values.is_empty() && idx == first_content_line(text) => {}
            Err(_) => {
                return Err(HewError::InvalidSample(format!(
                    "line {}: '{token}' is not a number",
                    idx + 1
                )))
            }
        }
    }
    if values.len() < 2 {
        return Err(HewError::InvalidSample(format!(
            "need at least 2 observations, found {}",
            values.len()
        )));
    }
    Ok(values)
}

fn first_content_line(text: &str) -> usize {
    text.lines().position(|l| !l.trim().is_empty()).unwrap_or(0)
}

pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HewError::Io(format!("{}: {e}", path.display())))?;
    parse_values(&text).map_err(|e| match e {
        HewError::InvalidSample(msg) => {
            HewError::InvalidSample(format!("{}: {msg}", path.display()))
        }
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bladder_matches_published_summary() {
        let s = Dataset::Bladder.load(None).unwrap();
        let stats = summary_stats(&s);
        assert_eq!(stats.n, 127);
        assert_eq!(stats.max, 46.12);
        assert!((stats.skewness - 2.08).abs() < 0.005);
    }

    #[test]
    fn header_is_optional() {
        assert_eq!(parse_values("x\n1.5\n2\n").unwrap(), vec![1.5, 2.0]);
        assert_eq!(parse_values("\n1.5\n\n2\n").unwrap(), vec![1.5, 2.0]);
        assert_eq!(parse_values("3,ignored\n4\n").unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn bad_rows_report_their_line() {
        let err = parse_values("x\n1\nabc\n").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = parse_values("1\n-2\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_values("1\n0\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(parse_values("header\n1\n").is_err());
    }

    #[test]
    fn reference_check_rejects_mismatch() {
        let mut stats = summary_stats(&Dataset::Bladder.load(None).unwrap());
        stats.mean += 0.01;
        assert!(Dataset::Bladder.reference().check(&stats).is_err());
        assert!(Dataset::Carbon.load(None).is_err());
    }
}
