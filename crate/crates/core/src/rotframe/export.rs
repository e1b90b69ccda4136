//! Piecewise-linear annealer schedule files.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::angle::END_CONVENTION;
use super::hardware::HardwareTraces;
use crate::error::{Error, Result};
use crate::model::{ProblemInstance, Provenance, Schedule};

/// Hardware range of the longitudinal schedule.
pub const G_PRIME_LIMIT: f64 = 3.0;
pub const DEFAULT_BREAKPOINTS: usize = 100;
pub const DEFAULT_RAMP_END: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportMetadata {
    pub instance_hash: String,
    pub provenance: Provenance,
    pub schedule_family: String,
    /// `"mfcd"` or `"none"`.
    pub drive: String,
    pub phi_end_convention: String,
}

impl ExportMetadata {
    pub fn new(inst: &ProblemInstance, sch: &Schedule, drive: &str) -> Self {
        Self {
            instance_hash: inst.content_hash(),
            provenance: inst.provenance().clone(),
            schedule_family: sch.family_name().to_string(),
            drive: drive.to_string(),
            phi_end_convention: END_CONVENTION.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealScheduleExport {
    pub annealing_time: f64,
    pub ramp_end: f64,
    #[serde(rename = "breakpoints_A")]
    pub breakpoints_a: Vec<(f64, f64)>,
    pub breakpoints_g: Vec<(f64, f64)>,
    pub metadata: ExportMetadata,
}

/// Resamples `traces` at `n_breakpoints` uniform values of `s` plus
/// `ramp_end`. `g'` ramps linearly from 0 at `s = 0` to its value at
/// `ramp_end`. Out-of-range `g'` is reported, never clamped.
pub fn export_schedule(
    traces: &HardwareTraces,
    n_breakpoints: usize,
    ramp_end: f64,
    metadata: ExportMetadata,
) -> Result<AnnealScheduleExport> {
    if n_breakpoints < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 breakpoints, got {n_breakpoints}")));
    }
    if !(ramp_end > 0.0 && ramp_end < 1.0) {
        return Err(Error::InvalidArgument(format!("ramp_end must lie in (0, 1), got {ramp_end}")));
    }
    let last = (n_breakpoints - 1) as f64;
    let mut grid: Vec<f64> = (0..n_breakpoints).map(|k| if k + 1 == n_breakpoints { 1.0 } else { k as f64 / last }).collect();
    if !grid.iter().any(|&s| s == ramp_end) {
        let at = grid.partition_point(|&s| s < ramp_end);
        grid.insert(at, ramp_end);
    }

    let breakpoints_a = grid.iter().map(|&s| (s, traces.a_at(s))).collect();
    let undefined = |s: f64| Error::InvalidArgument(format!("g' undefined at s = {s}; move ramp_end past the first grid step"));
    let mut breakpoints_g = vec![(0.0, 0.0), (ramp_end, traces.g_prime_at(ramp_end).ok_or_else(|| undefined(ramp_end))?)];
    for &s in grid.iter().filter(|&&s| s > ramp_end) {
        breakpoints_g.push((s, traces.g_prime_at(s).ok_or_else(|| undefined(s))?));
    }

    let points: Vec<(f64, f64)> = breakpoints_g.iter().copied().filter(|(_, g)| !(g.abs() <= G_PRIME_LIMIT)).collect();
    if !points.is_empty() {
        return Err(Error::RangeViolation { limit: G_PRIME_LIMIT, points });
    }
    Ok(AnnealScheduleExport {
        annealing_time: traces.total_time,
        ramp_end,
        breakpoints_a,
        breakpoints_g,
        metadata,
    })
}

impl AnnealScheduleExport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Plotting mirror: `series,s,value` with series `A` or `g_prime`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["series", "s", "value"])?;
        for (name, pts) in [("A", &self.breakpoints_a), ("g_prime", &self.breakpoints_g)] {
            for (s, v) in pts {
                w.write_record(&[name.to_string(), format!("{s:.17e}"), format!("{v:.17e}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Checks monotone `s` from 0 to 1, the `A` boundary values and the
    /// `g'` range.
    pub fn validate(&self) -> Result<()> {
        for (name, pts) in [("A", &self.breakpoints_a), ("g'", &self.breakpoints_g)] {
            let ok = pts.first().map(|p| p.0) == Some(0.0)
                && pts.last().map(|p| p.0) == Some(1.0)
                && pts.windows(2).all(|w| w[1].0 > w[0].0);
            if !ok {
                return Err(Error::InvalidSchedule(format!("{name} breakpoints must rise strictly from s = 0 to s = 1")));
            }
        }
        let (a0, a1) = (self.breakpoints_a[0].1, self.breakpoints_a.last().unwrap().1);
        if a0.abs() > 1e-9 || (a1 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSchedule(format!("A(0) = {a0}, A(1) = {a1}")));
        }
        let points: Vec<_> = self.breakpoints_g.iter().copied().filter(|(_, g)| !(g.abs() <= G_PRIME_LIMIT)).collect();
        if !points.is_empty() {
            return Err(Error::RangeViolation { limit: G_PRIME_LIMIT, points });
        }
        Ok(())
    }
}
