//! Fixed-step RK4 integration of `dm_i/dt = 2 m_i x B_i`.

use std::io::Write;

use nalgebra::Vector3;

use super::field::{field_at, EffectiveField, FieldOptions};
use crate::error::{Error, Result};
use crate::model::{ProblemInstance, Schedule};

/// Smallest accepted number of steps.
pub const MIN_STEPS: usize = 100;

/// Default steps for `T = 1`.
pub const DEFAULT_STEPS: usize = 2000;

/// Abort threshold on `| |m_i| - 1 |`.
pub const NORM_ABORT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlochOptions {
    pub steps: usize,
    pub field: FieldOptions,
}

impl BlochOptions {
    pub fn new(steps: usize, cd: bool) -> Self {
        Self { steps, field: FieldOptions { cd, corrupt_feedback_sign: false } }
    }
}

impl Default for BlochOptions {
    fn default() -> Self {
        Self::new(DEFAULT_STEPS, true)
    }
}

/// Magnetizations and effective fields on the uniform grid `t_k = k T / K`.
#[derive(Clone, Debug)]
pub struct MagnetizationTrajectory {
    pub times: Vec<f64>,
    /// `m[k][i]` is site `i` at `times[k]`.
    pub m: Vec<Vec<Vector3<f64>>>,
    pub fields: Vec<EffectiveField>,
    pub cd_enabled: bool,
    /// `max_{i,k} | |m_i(t_k)| - 1 |`.
    pub max_norm_drift: f64,
}

impl MagnetizationTrajectory {
    pub fn n_sites(&self) -> usize {
        self.m[0].len()
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn total_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn dt(&self) -> f64 {
        self.total_time() / self.steps() as f64
    }

    /// Largest `|m_y|` over all sites and grid points.
    pub fn max_abs_my(&self) -> f64 {
        self.m.iter().flatten().map(|v| v.y.abs()).fold(0.0, f64::max)
    }

    /// `m_z` of every site at grid index `k`.
    pub fn mz(&self, k: usize) -> Vec<f64> {
        self.m[k].iter().map(|v| v.z).collect()
    }

    /// Grid index nearest to `t`.
    pub fn index_of(&self, t: f64) -> usize {
        ((t / self.dt()).round() as usize).min(self.steps())
    }

    /// Per-grid-point `B_y` of one site.
    pub fn by_series(&self, site: usize) -> Vec<f64> {
        self.fields.iter().map(|f| f.by[site]).collect()
    }

    /// Linearly interpolated `B_y` of every site at time `t`.
    pub fn by_at(&self, t: f64, out: &mut [f64]) {
        interpolate(&self.times, t, |k| &self.fields[k].by, out);
    }

    /// Writes `t,site,m_x,m_y,m_z,bx,by,bz`, one row per site and grid point,
    /// keeping every `stride`-th grid point.
    pub fn write_csv<W: Write>(&self, writer: W, stride: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "site", "m_x", "m_y", "m_z", "bx", "by", "bz"])?;
        let stride = stride.max(1);
        for k in (0..self.times.len()).filter(|k| k % stride == 0 || *k == self.steps()) {
            let f = &self.fields[k];
            for (i, m) in self.m[k].iter().enumerate() {
                w.write_record(&[
                    format!("{:.17e}", self.times[k]),
                    i.to_string(),
                    format!("{:.17e}", m.x),
                    format!("{:.17e}", m.y),
                    format!("{:.17e}", m.z),
                    format!("{:.17e}", f.bx[i]),
                    format!("{:.17e}", f.by[i]),
                    format!("{:.17e}", f.bz[i]),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Linear interpolation on a uniform grid of per-site vectors.
pub(crate) fn interpolate<'a>(times: &[f64], t: f64, at: impl Fn(usize) -> &'a Vec<f64>, out: &mut [f64]) {
    let steps = times.len() - 1;
    let dt = times[steps] / steps as f64;
    let x = (t / dt).clamp(0.0, steps as f64);
    let k = (x.floor() as usize).min(steps - 1);
    let w = x - k as f64;
    let (a, b) = (at(k), at(k + 1));
    for i in 0..out.len() {
        out[i] = if w == 0.0 { a[i] } else if w == 1.0 { b[i] } else { a[i] + w * (b[i] - a[i]) };
    }
}

/// Integrates the mean-field Bloch equations from `m_i(0) = (1, 0, 0)`.
///
/// At every RK4 stage the effective field is rebuilt from the stage
/// magnetization; with `cd` on, `B_y` comes from the derivative solve.
pub fn integrate_bloch(
    inst: &ProblemInstance,
    sch: &Schedule,
    opts: BlochOptions,
) -> Result<MagnetizationTrajectory> {
    if opts.steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_STEPS} steps, got {}", opts.steps)));
    }
    let n = inst.n_sites();
    let k_max = opts.steps;
    let tt = sch.total_time;
    let dt = tt / k_max as f64;

    let rate = |t: f64, m: &[Vector3<f64>]| -> Result<(Vec<Vector3<f64>>, EffectiveField)> {
        let f = field_at(inst, sch, m, t, opts.field)?;
        let d = m
            .iter()
            .enumerate()
            .map(|(i, mi)| 2.0 * mi.cross(&Vector3::new(f.bx[i], f.by[i], f.bz[i])))
            .collect();
        Ok((d, f))
    };
    let shifted = |m: &[Vector3<f64>], d: &[Vector3<f64>], h: f64| -> Vec<Vector3<f64>> {
        m.iter().zip(d).map(|(a, b)| a + b * h).collect()
    };

    let mut times = Vec::with_capacity(k_max + 1);
    let mut traj = Vec::with_capacity(k_max + 1);
    let mut fields = Vec::with_capacity(k_max + 1);
    let mut m = vec![Vector3::new(1.0, 0.0, 0.0); n];
    let mut max_drift: f64 = 0.0;

    for k in 0..k_max {
        let t = k as f64 * dt;
        let (k1, f0) = rate(t, &m)?;
        let (k2, _) = rate(t + 0.5 * dt, &shifted(&m, &k1, 0.5 * dt))?;
        let (k3, _) = rate(t + 0.5 * dt, &shifted(&m, &k2, 0.5 * dt))?;
        let (k4, _) = rate(t + dt, &shifted(&m, &k3, dt))?;
        times.push(t);
        traj.push(m.clone());
        fields.push(f0);
        for i in 0..n {
            m[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
        let t_next = (k + 1) as f64 * dt;
        let drift = m.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
        if !(drift <= NORM_ABORT) {
            return Err(Error::NormDrift { t: t_next, drift, limit: NORM_ABORT });
        }
        max_drift = max_drift.max(drift);
    }
    times.push(tt);
    fields.push(field_at(inst, sch, &m, tt, opts.field)?);
    traj.push(m);

    Ok(MagnetizationTrajectory { times, m: traj, fields, cd_enabled: opts.field.cd, max_norm_drift: max_drift })
}

/// Bloch run on a grid twice as fine as a `quantum_steps` RK4 state-vector
/// run, so every RK4 stage time (midpoints included) is a stored node and
/// the `B_y` lookup needs no interpolation.
pub fn integrate_for_quantum(
    inst: &ProblemInstance,
    sch: &Schedule,
    quantum_steps: usize,
    cd: bool,
) -> Result<MagnetizationTrajectory> {
    integrate_bloch(inst, sch, BlochOptions::new(2 * quantum_steps, cd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_trig_schedule, staggered_instance, Topology};

    #[test]
    fn aligned_spin_stays_put() {
        let inst = ProblemInstance::new(1, vec![0.0], vec![0.0], 0.0, 1.0, Topology::Custom).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        for cd in [true, false] {
            // With gamma = 0 the cd run would hit bx = bz = 0 at t = T.
            let inst = if cd {
                ProblemInstance::new(1, vec![0.0], vec![0.0], 0.05, 1.0, Topology::Custom).unwrap()
            } else {
                inst.clone()
            };
            let traj = integrate_bloch(&inst, &sch, BlochOptions::new(200, cd)).unwrap();
            for m in traj.m.iter().flatten() {
                assert_eq!(*m, Vector3::new(1.0, 0.0, 0.0));
            }
        }
    }

    #[test]
    fn rejects_too_few_steps() {
        let inst = staggered_instance(2, 1.1).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        assert!(integrate_bloch(&inst, &sch, BlochOptions::new(50, true)).is_err());
    }

    #[test]
    fn single_spin_planar_under_cd() {
        // Start aligned with the field (delta = 0 makes B(0) = (1, 0, 0)).
        let inst = ProblemInstance::new(1, vec![0.0], vec![0.8], 0.1, 1.0, Topology::Custom).unwrap();
        let sch = make_trig_schedule(1.0, 0.0).unwrap();
        let traj = integrate_bloch(&inst, &sch, BlochOptions::new(2000, true)).unwrap();
        assert!(traj.max_abs_my() < 1e-9, "{}", traj.max_abs_my());
        assert!(traj.max_norm_drift < 1e-12);
        // and m tracks the field direction
        let last = traj.m.last().unwrap()[0];
        let f = traj.fields.last().unwrap();
        let b = Vector3::new(f.bx[0], 0.0, f.bz[0]).normalize();
        assert!((last - b).norm() < 1e-8);
    }

    #[test]
    fn grid_and_boundary_fields() {
        let inst = staggered_instance(4, 1.1).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let traj = integrate_bloch(&inst, &sch, BlochOptions::new(400, true)).unwrap();
        assert_eq!(traj.times.len(), 401);
        assert_eq!(traj.times[400], 1.0);
        assert!(traj.fields[0].by.iter().all(|b| b.abs() <= 1e-9));
        assert!(traj.fields[400].by.iter().all(|b| b.abs() <= 1e-9));
        let mut out = vec![0.0; 4];
        traj.by_at(traj.times[17], &mut out);
        assert_eq!(out, traj.fields[17].by);
        traj.by_at(0.5 * (traj.times[17] + traj.times[18]), &mut out);
        assert!((out[1] - 0.5 * (traj.fields[17].by[1] + traj.fields[18].by[1])).abs() < 1e-14);
    }

    #[test]
    fn csv_layout() {
        let inst = staggered_instance(2, 1.1).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let traj = integrate_bloch(&inst, &sch, BlochOptions::new(100, true)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf, 10).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,site,m_x,m_y,m_z,bx,by,bz");
        assert_eq!(lines.len(), 1 + 11 * 2);
    }
}
