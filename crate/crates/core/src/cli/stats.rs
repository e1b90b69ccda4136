//! Per-sample records and the aggregates computed from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Median of the finite values; `None` when there are none.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub j_seed: u64,
    pub h_seed: u64,
    pub fidelity_cd: Option<f64>,
    pub fidelity_no_cd: Option<f64>,
    pub error: Option<String>,
}

impl SampleRecord {
    pub fn from_result(j_seed: u64, h_seed: u64, result: Result<(f64, f64)>) -> Self {
        match result {
            Ok((cd, none)) => Self { j_seed, h_seed, fidelity_cd: Some(cd), fidelity_no_cd: Some(none), error: None },
            Err(e) => Self { j_seed, h_seed, fidelity_cd: None, fidelity_no_cd: None, error: Some(e.to_string()) },
        }
    }

    /// Strict improvement; failed samples never count as improved.
    pub fn improved(&self) -> bool {
        matches!((self.fidelity_cd, self.fidelity_no_cd), (Some(a), Some(b)) if a > b)
    }
}

/// Aggregates over the h seeds of one J seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchGroup {
    pub j_seed: u64,
    pub samples: usize,
    pub failures: usize,
    pub improved: usize,
    /// `improved / samples`; failed samples count as not improved.
    pub fraction_improved: f64,
    pub median_cd: Option<f64>,
    pub median_no_cd: Option<f64>,
}

impl BatchGroup {
    pub fn from_samples<'a>(j_seed: u64, samples: impl Iterator<Item = &'a SampleRecord>) -> Self {
        let samples: Vec<&SampleRecord> = samples.collect();
        let n = samples.len();
        let improved = samples.iter().filter(|s| s.improved()).count();
        let cd: Vec<f64> = samples.iter().filter_map(|s| s.fidelity_cd).collect();
        let none: Vec<f64> = samples.iter().filter_map(|s| s.fidelity_no_cd).collect();
        Self {
            j_seed,
            samples: n,
            failures: samples.iter().filter(|s| s.error.is_some()).count(),
            improved,
            fraction_improved: if n == 0 { 0.0 } else { improved as f64 / n as f64 },
            median_cd: median(&cd),
            median_no_cd: median(&none),
        }
    }
}

/// One `(T, schedule)` point of a success-probability curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessPoint {
    pub total_time: f64,
    pub schedule: String,
    pub seed: u64,
    pub shots: u64,
    pub successes: Option<u64>,
    pub probability: Option<f64>,
    pub wilson_low: Option<f64>,
    pub wilson_high: Option<f64>,
    /// `|<target|psi(T)>|^2` before sampling.
    pub exact_probability: Option<f64>,
    pub error: Option<String>,
}

impl SuccessPoint {
    pub fn failed(total_time: f64, schedule: &str, seed: u64, shots: u64, err: &Error) -> Self {
        Self {
            total_time,
            schedule: schedule.to_string(),
            seed,
            shots,
            successes: None,
            probability: None,
            wilson_low: None,
            wilson_high: None,
            exact_probability: None,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub samples: Vec<SampleRecord>,
    pub groups: Vec<BatchGroup>,
    pub failures: usize,
    pub success_curve: Vec<SuccessPoint>,
    /// Néel bitstring (site 0 leftmost) used as the success target.
    pub neel_target: Option<String>,
}
