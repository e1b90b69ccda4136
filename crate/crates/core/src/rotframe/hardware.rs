//! Annealer-style schedules `A(t)`, `B(t)`, `g'(t)` for the uniform-site
//! rotating-frame Hamiltonian.

use super::angle::FrameAngle;
use crate::bloch::MagnetizationTrajectory;
use crate::error::{Error, Result};
use crate::model::{ProblemInstance, Schedule};
use crate::quantum::transverse;

/// Relative tolerance for `|B_y,i| = |B_y,0|` in the uniform-site check.
pub const UNIFORM_TOL: f64 = 1e-9;

/// One site's controls on the trajectory grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteProfile {
    pub times: Vec<f64>,
    /// Transverse coefficient `(1 - f) gamma_d + gamma`.
    pub transverse: Vec<f64>,
    pub by: Vec<f64>,
    pub phi_dot: Vec<f64>,
}

impl SiteProfile {
    /// Profile of a run without a CD field: `B_y = 0`, `phi_dot = 0`.
    pub fn without_cd(inst: &ProblemInstance, sch: &Schedule, steps: usize) -> Self {
        let times: Vec<f64> = (0..=steps).map(|k| sch.total_time * k as f64 / steps as f64).collect();
        let transverse = times.iter().map(|&t| transverse(inst, sch.f(t))).collect();
        Self { transverse, by: vec![0.0; steps + 1], phi_dot: vec![0.0; steps + 1], times }
    }

    /// Site-0 profile of an MFCD run, after checking that every site
    /// carries the same `|B_y|` (signs may alternate with the field signs).
    pub fn uniform(inst: &ProblemInstance, sch: &Schedule, traj: &MagnetizationTrajectory, frame: &FrameAngle) -> Result<Self> {
        let scale = traj.fields.iter().flat_map(|f| f.by.iter()).fold(1.0f64, |m, v| m.max(v.abs()));
        for f in &traj.fields {
            let r = f.by[0].abs();
            for (site, v) in f.by.iter().enumerate().skip(1) {
                let deviation = (v.abs() - r).abs();
                if deviation > UNIFORM_TOL * scale {
                    return Err(Error::NonUniformSites { site, deviation });
                }
            }
        }
        Ok(Self {
            times: traj.times.clone(),
            transverse: traj.times.iter().map(|&t| transverse(inst, sch.f(t))).collect(),
            by: traj.by_series(0),
            phi_dot: frame.phi_dot.iter().map(|p| p[0]).collect(),
        })
    }
}

/// `A`, `B` and `g'` on the profile grid. `g'` is `None` where `A = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardwareTraces {
    pub total_time: f64,
    pub times: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub g_prime: Vec<Option<f64>>,
}

/// `A = f / (f + r)`, `B = r / (f + r)` with `r = sqrt(a^2 + B_y^2)`, and
/// `g' = -(g + phi_dot / 2) / (12 A)`.
pub fn hardware_schedules(sch: &Schedule, profile: &SiteProfile) -> HardwareTraces {
    let len = profile.times.len();
    let (mut a, mut b, mut gp) = (Vec::with_capacity(len), Vec::with_capacity(len), Vec::with_capacity(len));
    for k in 0..len {
        let t = profile.times[k];
        let s = sch.at(t);
        let r = profile.transverse[k].hypot(profile.by[k]);
        let ak = s.f / (s.f + r);
        a.push(ak);
        b.push(1.0 - ak);
        gp.push((ak > 0.0).then(|| -(s.g + 0.5 * profile.phi_dot[k]) / (12.0 * ak)));
    }
    HardwareTraces { total_time: sch.total_time, times: profile.times.clone(), a, b, g_prime: gp }
}

impl HardwareTraces {
    fn locate(&self, s: f64) -> (usize, f64) {
        let steps = self.times.len() - 1;
        let x = (s * steps as f64).clamp(0.0, steps as f64);
        let k = (x.floor() as usize).min(steps - 1);
        (k, x - k as f64)
    }

    /// `A` at normalized time `s = t / T`, linearly interpolated.
    pub fn a_at(&self, s: f64) -> f64 {
        let (k, w) = self.locate(s);
        self.a[k] * (1.0 - w) + self.a[k + 1] * w
    }

    /// `g'` at `s`; `None` if a bracketing node has `A = 0`.
    pub fn g_prime_at(&self, s: f64) -> Option<f64> {
        let (k, w) = self.locate(s);
        if w == 0.0 {
            return self.g_prime[k];
        }
        Some(self.g_prime[k]? * (1.0 - w) + self.g_prime[k + 1]? * w)
    }
}
