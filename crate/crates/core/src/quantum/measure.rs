//! Computational-basis sampling.

use std::collections::BTreeMap;
use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};

use super::state::{bitstring, QuantumState};
use crate::error::{Error, Result};
use crate::model::{RngSpec, Stream};

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub shots: u64,
    /// Bitstring (site 0 leftmost) to number of occurrences.
    pub counts: BTreeMap<String, u64>,
    pub rng: RngSpec,
}

impl MeasurementRecord {
    /// CSV with columns `bitstring,count`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bitstring", "count"])?;
        for (b, c) in &self.counts {
            w.write_record([b.as_str(), &c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Draws `shots` i.i.d. outcomes from `|amplitude|^2` on the measurement stream.
pub fn sample_measurements(state: &QuantumState, shots: u64, rng: RngSpec) -> Result<MeasurementRecord> {
    let probs = state.probabilities();
    let total: f64 = probs.iter().sum();
    if !((total - 1.0).abs() <= 1e-6) {
        return Err(Error::InvalidArgument(format!("state is not normalized (norm^2 = {total})")));
    }
    let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut r = rng.rng(Stream::Measurements);
    let mut hits = vec![0u64; probs.len()];
    for _ in 0..shots {
        hits[dist.sample(&mut r)] += 1;
    }
    let counts = hits
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(b, &c)| (bitstring(b, state.n_sites), c))
        .collect();
    Ok(MeasurementRecord { shots, counts, rng })
}

/// Fraction of shots that returned `target`.
pub fn success_probability(record: &MeasurementRecord, target: &str) -> f64 {
    if record.shots == 0 {
        return 0.0;
    }
    record.counts.get(target).copied().unwrap_or(0) as f64 / record.shots as f64
}

/// Wilson score interval for `successes / shots` at normal quantile `z`.
pub fn wilson_interval(successes: u64, shots: u64, z: f64) -> (f64, f64) {
    if shots == 0 {
        return (0.0, 1.0);
    }
    let n = shots as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;
