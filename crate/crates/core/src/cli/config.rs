//! Run configuration: one JSON file, every field optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    gaussian_instance, staggered_instance, ProblemInstance, RngSpec, Schedule, ScheduleFamily, Topology, DEFAULT_DELTA,
};
use crate::rotframe::{DEFAULT_BREAKPOINTS, DEFAULT_RAMP_END};

/// Where a single-run instance comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    Inline {
        instance: ProblemInstance,
    },
    File {
        path: PathBuf,
    },
    Gaussian {
        n_sites: usize,
        sigma: f64,
        topology: Topology,
        gamma: f64,
        gamma_d: f64,
        j_seed: u64,
        h_seed: u64,
    },
    Staggered {
        n_sites: usize,
        h: f64,
    },
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec::Gaussian {
            n_sites: 8,
            sigma: 1.0,
            topology: Topology::FullyConnected,
            gamma: 0.1,
            gamma_d: 1.0,
            j_seed: 0,
            h_seed: 0,
        }
    }
}

impl InstanceSpec {
    pub fn build(&self) -> Result<ProblemInstance> {
        match self {
            InstanceSpec::Inline { instance } => Ok(instance.clone()),
            InstanceSpec::File { path } => ProblemInstance::load(path),
            InstanceSpec::Gaussian { n_sites, sigma, topology, gamma, gamma_d, j_seed, h_seed } => gaussian_instance(
                *n_sites,
                *sigma,
                *topology,
                *gamma,
                *gamma_d,
                RngSpec::new(*j_seed),
                RngSpec::new(*h_seed),
            ),
            InstanceSpec::Staggered { n_sites, h } => staggered_instance(*n_sites, *h),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilySpec {
    Trig,
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSpec {
    pub family: FamilySpec,
    /// Annealing time in ns.
    pub total_time: f64,
    pub delta: f64,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self { family: FamilySpec::Trig, total_time: 1.0, delta: DEFAULT_DELTA }
    }
}

impl ScheduleSpec {
    pub fn build(&self) -> Result<Schedule> {
        self.with_time(self.total_time)
    }

    pub fn with_time(&self, total_time: f64) -> Result<Schedule> {
        let family = match self.family {
            FamilySpec::Trig => ScheduleFamily::TrigDefault,
            FamilySpec::Linear => ScheduleFamily::Linear,
        };
        Schedule::new(total_time, self.delta, family)
    }
}

/// Control added to the annealing Hamiltonian in the "with CD" arm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriveMode {
    Mfcd,
    Exact,
}

/// Disorder sweep for `fidelity-batch`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchSpec {
    pub n_sites: usize,
    pub sigma: f64,
    pub topology: Topology,
    pub gamma: f64,
    pub gamma_d: f64,
    pub j_seeds: Vec<u64>,
    pub h_seeds: Vec<u64>,
}

impl Default for BatchSpec {
    fn default() -> Self {
        Self {
            n_sites: 8,
            sigma: 1.0,
            topology: Topology::FullyConnected,
            gamma: 0.1,
            gamma_d: 1.0,
            j_seeds: vec![0],
            h_seeds: (1000..1100).collect(),
        }
    }
}

/// Néel success probability versus annealing time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuccessSpec {
    pub n_sites: usize,
    pub h: f64,
    pub total_times: Vec<f64>,
    pub shots: u64,
    /// Base measurement seed; run `r` of the sweep uses `seed + r`.
    pub seed: u64,
}

impl Default for SuccessSpec {
    fn default() -> Self {
        Self { n_sites: 8, h: 1.1, total_times: vec![0.5, 1.0, 2.0, 5.0], shots: 1000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportSpec {
    pub instance: InstanceSpec,
    pub total_time: f64,
    pub n_breakpoints: usize,
    pub ramp_end: f64,
}

impl Default for ExportSpec {
    fn default() -> Self {
        Self {
            instance: InstanceSpec::Staggered { n_sites: 8, h: 1.1 },
            total_time: 10.0,
            n_breakpoints: DEFAULT_BREAKPOINTS,
            ramp_end: DEFAULT_RAMP_END,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    /// Flip the sign of the feedback term in the derivative solve. Only
    /// useful to watch the finite-difference check fail.
    pub corrupt_feedback_sign: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Instance for `bloch` and `verify`.
    pub instance: InstanceSpec,
    pub schedule: ScheduleSpec,
    pub drive: DriveMode,
    /// State-vector RK4 steps per ns of annealing time (never fewer than
    /// this many in total). Bloch runs use twice as many.
    pub steps: usize,
    /// Recorded states per run, endpoints included.
    pub output_points: usize,
    /// Fixed-point snapshot times for `bloch`.
    pub snapshots: usize,
    /// Keep every `csv_stride`-th grid point in trajectory CSVs.
    pub csv_stride: usize,
    pub batch: BatchSpec,
    pub success: SuccessSpec,
    pub export: ExportSpec,
    pub verify: VerifySpec,
    pub workers: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            instance: InstanceSpec::default(),
            schedule: ScheduleSpec::default(),
            drive: DriveMode::Mfcd,
            steps: 2000,
            output_points: 11,
            snapshots: 11,
            csv_stride: 10,
            batch: BatchSpec::default(),
            success: SuccessSpec::default(),
            export: ExportSpec::default(),
            verify: VerifySpec::default(),
            workers: 1,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.to_string(), message: message.into() }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(&path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(".", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Replaces every seed: the single-run instance draws couplings and
    /// fields from `seed`, the batch sweeps the single J seed `seed`, and
    /// measurements start at `seed`.
    pub fn apply_seed_override(&mut self, seed: u64) {
        if let InstanceSpec::Gaussian { j_seed, h_seed, .. } = &mut self.instance {
            *j_seed = seed;
            *h_seed = seed;
        }
        if let InstanceSpec::Gaussian { j_seed, h_seed, .. } = &mut self.export.instance {
            *j_seed = seed;
            *h_seed = seed;
        }
        self.batch.j_seeds = vec![seed];
        self.success.seed = seed;
    }

    /// Checks ranges that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        let positive = |path: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_error(path, format!("must be positive, got {v}")))
            }
        };
        positive("schedule.total_time", self.schedule.total_time)?;
        if !(self.schedule.delta >= 0.0) {
            return Err(config_error("schedule.delta", "must be >= 0"));
        }
        if self.steps < 50 {
            return Err(config_error("steps", format!("need at least 50, got {}", self.steps)));
        }
        if self.output_points < 2 {
            return Err(config_error("output_points", "need at least 2"));
        }
        if self.snapshots < 2 {
            return Err(config_error("snapshots", "need at least 2"));
        }
        if self.csv_stride == 0 {
            return Err(config_error("csv_stride", "must be >= 1"));
        }
        if self.workers == 0 {
            return Err(config_error("workers", "must be >= 1"));
        }
        if self.batch.j_seeds.is_empty() {
            return Err(config_error("batch.j_seeds", "sweep axis is empty"));
        }
        if self.batch.h_seeds.is_empty() {
            return Err(config_error("batch.h_seeds", "sweep axis is empty"));
        }
        if self.success.total_times.is_empty() {
            return Err(config_error("success.total_times", "sweep axis is empty"));
        }
        for (i, &t) in self.success.total_times.iter().enumerate() {
            positive(&format!("success.total_times[{i}]"), t)?;
        }
        if self.success.shots == 0 {
            return Err(config_error("success.shots", "must be >= 1"));
        }
        positive("export.total_time", self.export.total_time)?;
        if self.export.n_breakpoints < 4 {
            return Err(config_error("export.n_breakpoints", "need at least 4"));
        }
        if !(self.export.ramp_end > 0.0 && self.export.ramp_end < 1.0) {
            return Err(config_error("export.ramp_end", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Quantum RK4 steps for annealing time `total_time`, rounded up to a
    /// multiple of `output_points - 1`.
    pub fn steps_for(&self, total_time: f64) -> usize {
        let raw = (self.steps as f64 * total_time.max(1.0)).ceil() as usize;
        let m = self.output_points - 1;
        raw.div_ceil(m) * m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_json(&cfg.to_json().unwrap()).unwrap(), cfg);
    }

    #[test]
    fn errors_name_the_path() {
        match RunConfig::from_json(r#"{"batch": {"topology": "ring"}}"#) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "batch.topology"),
            other => panic!("{other:?}"),
        }
        match RunConfig::from_json(r#"{"success": {"total_times": [1.0, -2.0]}}"#) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "success.total_times[1]"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(RunConfig::from_json(r#"{"stepz": 3}"#), Err(Error::Config { .. })));
    }

    #[test]
    fn steps_scale_with_time() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.steps_for(0.5), 2000);
        assert_eq!(cfg.steps_for(5.0), 10000);
        let odd = RunConfig { steps: 1001, ..RunConfig::default() };
        assert_eq!(odd.steps_for(1.0) % 10, 0);
    }

    #[test]
    fn seed_override_reaches_every_seed() {
        let mut cfg = RunConfig::default();
        cfg.apply_seed_override(42);
        assert_eq!(cfg.batch.j_seeds, vec![42]);
        assert_eq!(cfg.success.seed, 42);
        assert!(matches!(cfg.instance, InstanceSpec::Gaussian { j_seed: 42, h_seed: 42, .. }));
    }
}
