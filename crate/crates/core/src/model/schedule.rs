//! Annealing schedules `f(t)` (problem weight) and `g(t)` (longitudinal weight).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default degeneracy-lifting offset added to `g`.
pub const DEFAULT_DELTA: f64 = 1e-3;

/// `f`, `g` and their time derivatives at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleValues {
    pub f: f64,
    pub f_dot: f64,
    pub g: f64,
    pub g_dot: f64,
}

/// Tabulated schedule: knots in `t`, interpolated piecewise-linearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tabulated {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ScheduleFamily {
    /// `f = (1 - cos(pi t/T))/2`, `g = sin^2(pi t/T)/2 + delta`.
    TrigDefault,
    /// `f = t/T`; `g` as in the trig family.
    Linear,
    Tabulated(Tabulated),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub total_time: f64,
    pub delta: f64,
    #[serde(flatten)]
    pub family: ScheduleFamily,
}

/// Trig schedule with vanishing `f`/`g` derivatives at both ends.
pub fn make_trig_schedule(total_time: f64, delta: f64) -> Result<Schedule> {
    Schedule::new(total_time, delta, ScheduleFamily::TrigDefault)
}

impl Schedule {
    pub fn new(total_time: f64, delta: f64, family: ScheduleFamily) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "annealing time must be positive, got {total_time}"
            )));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidSchedule(format!("delta must be >= 0, got {delta}")));
        }
        if let ScheduleFamily::Tabulated(tab) = &family {
            tab.validate(total_time)?;
        }
        Ok(Self { total_time, delta, family })
    }

    pub fn linear(total_time: f64, delta: f64) -> Result<Self> {
        Self::new(total_time, delta, ScheduleFamily::Linear)
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            ScheduleFamily::TrigDefault => "trig-default",
            ScheduleFamily::Linear => "linear",
            ScheduleFamily::Tabulated(_) => "tabulated",
        }
    }

    pub fn at(&self, t: f64) -> ScheduleValues {
        let tt = self.total_time;
        match &self.family {
            ScheduleFamily::TrigDefault => {
                let w = PI / tt;
                let (s, c) = (w * t).sin_cos();
                ScheduleValues {
                    f: 0.5 * (1.0 - c),
                    f_dot: 0.5 * w * s,
                    g: 0.5 * s * s + self.delta,
                    g_dot: w * s * c,
                }
            }
            ScheduleFamily::Linear => {
                let w = PI / tt;
                let (s, c) = (w * t).sin_cos();
                ScheduleValues {
                    f: t / tt,
                    f_dot: 1.0 / tt,
                    g: 0.5 * s * s + self.delta,
                    g_dot: w * s * c,
                }
            }
            ScheduleFamily::Tabulated(tab) => tab.at(t),
        }
    }

    pub fn f(&self, t: f64) -> f64 {
        self.at(t).f
    }

    pub fn g(&self, t: f64) -> f64 {
        self.at(t).g
    }
}

impl Tabulated {
    fn validate(&self, total_time: f64) -> Result<()> {
        let n = self.t.len();
        if n < 2 || self.f.len() != n || self.g.len() != n {
            return Err(Error::InvalidSchedule(
                "tabulated schedule needs >= 2 knots with matching f and g".into(),
            ));
        }
        if self.t[0] != 0.0 || (self.t[n - 1] - total_time).abs() > 1e-12 * total_time {
            return Err(Error::InvalidSchedule("tabulated knots must span [0, T]".into()));
        }
        if self.t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSchedule("tabulated knots must be strictly increasing".into()));
        }
        Ok(())
    }

    fn at(&self, t: f64) -> ScheduleValues {
        let n = self.t.len();
        let k = match self.t.partition_point(|&x| x <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (t0, t1) = (self.t[k], self.t[k + 1]);
        let w = (t - t0) / (t1 - t0);
        let f_dot = (self.f[k + 1] - self.f[k]) / (t1 - t0);
        let g_dot = (self.g[k + 1] - self.g[k]) / (t1 - t0);
        ScheduleValues {
            f: self.f[k] + w * (self.f[k + 1] - self.f[k]),
            f_dot,
            g: self.g[k] + w * (self.g[k + 1] - self.g[k]),
            g_dot,
        }
    }
}
