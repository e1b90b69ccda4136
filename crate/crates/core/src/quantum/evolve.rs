//! RK4 integration of `i d psi/dt = H(t) psi`.

use num_complex::Complex64 as C64;

use super::operator::{check_size, exact_cd_from_tables, transverse, IsingTables, Operator, MAX_EXACT_CD_SITES};
use super::spectrum::ground_subspace;
use super::state::QuantumState;
use crate::bloch::MagnetizationTrajectory;
use crate::error::{Error, Result};
use crate::model::{ProblemInstance, Schedule};

/// Abort threshold on the raw (un-renormalized) state norm.
pub const NORM_ABORT: f64 = 1e-6;

/// A time-dependent Hamiltonian that can act on a state.
pub trait Hamiltonian {
    fn dim(&self) -> usize;
    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) -> Result<()>;
}

/// Extra control added to the annealing Hamiltonian.
#[derive(Clone, Copy, Debug)]
pub enum Drive<'a> {
    None,
    /// `-sum_i B_y,i(t) sigma_y^i` with `B_y` interpolated from a Bloch run.
    Mfcd(&'a MagnetizationTrajectory),
    /// Exact (non-local) counter-diabatic term.
    Exact,
}

impl Drive<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Drive::None => "none",
            Drive::Mfcd(_) => "mfcd",
            Drive::Exact => "exact",
        }
    }
}

/// Lab-frame `H_0(t)` plus an optional drive.
pub struct LabHamiltonian<'a> {
    inst: &'a ProblemInstance,
    sch: &'a Schedule,
    tables: IsingTables,
    drive: Drive<'a>,
}

impl<'a> LabHamiltonian<'a> {
    pub fn new(inst: &'a ProblemInstance, sch: &'a Schedule, drive: Drive<'a>) -> Result<Self> {
        let tables = IsingTables::new(inst)?;
        match drive {
            Drive::Exact => check_size("exact CD", inst.n_sites(), MAX_EXACT_CD_SITES)?,
            Drive::Mfcd(traj) => check_trajectory(inst, sch, traj)?,
            Drive::None => {}
        }
        Ok(Self { inst, sch, tables, drive })
    }
}

pub(crate) fn check_trajectory(inst: &ProblemInstance, sch: &Schedule, traj: &MagnetizationTrajectory) -> Result<()> {
    if !traj.cd_enabled {
        return Err(Error::GridMismatch("MFCD drive needs a trajectory integrated with cd on".into()));
    }
    if traj.n_sites() != inst.n_sites() {
        return Err(Error::GridMismatch(format!("trajectory has {} sites, instance {}", traj.n_sites(), inst.n_sites())));
    }
    if (traj.total_time() - sch.total_time).abs() > 1e-12 * sch.total_time {
        return Err(Error::GridMismatch(format!(
            "trajectory spans T = {}, schedule T = {}",
            traj.total_time(),
            sch.total_time
        )));
    }
    Ok(())
}

impl Hamiltonian for LabHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.tables.zz.len()
    }

    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) -> Result<()> {
        let s = self.sch.at(t);
        let mut op = self.tables.hamiltonian(s.f, s.g, transverse(self.inst, s.f));
        match self.drive {
            Drive::None => op.apply(psi, out),
            Drive::Mfcd(traj) => {
                let mut by = vec![0.0; op.n_sites];
                traj.by_at(t, &mut by);
                op.y = by.iter().map(|b| -b).collect();
                op.apply(psi, out);
            }
            Drive::Exact => {
                op.apply(psi, out);
                let cd = exact_cd_from_tables(&self.tables, self.inst, self.sch, t);
                let mut extra = vec![C64::new(0.0, 0.0); psi.len()];
                cd.apply(psi, &mut extra);
                out.iter_mut().zip(&extra).for_each(|(o, e)| *o += e);
            }
        }
        Ok(())
    }
}

/// States sampled on a uniform output grid.
#[derive(Clone, Debug)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    /// Renormalized copies of the raw states.
    pub states: Vec<QuantumState>,
    /// `max_k | |psi(t_k)| - 1 |` of the raw integration.
    pub max_norm_drift: f64,
}

impl StateTrajectory {
    pub fn final_state(&self) -> &QuantumState {
        self.states.last().unwrap()
    }
}

/// Integrates from `psi0` over `[0, total_time]` with `steps` RK4 steps and
/// records `output_points` evenly spaced states (both endpoints included).
/// `steps` must be a multiple of `output_points - 1`.
pub fn propagate<H: Hamiltonian + ?Sized>(
    ham: &H,
    psi0: &QuantumState,
    total_time: f64,
    steps: usize,
    output_points: usize,
) -> Result<StateTrajectory> {
    if steps == 0 || output_points < 2 || steps % (output_points - 1) != 0 {
        return Err(Error::GridMismatch(format!(
            "{steps} steps cannot be sampled at {output_points} evenly spaced points"
        )));
    }
    if psi0.dim() != ham.dim() {
        return Err(Error::GridMismatch("state and Hamiltonian dimensions differ".into()));
    }
    let stride = steps / (output_points - 1);
    let dt = total_time / steps as f64;
    let d = ham.dim();
    let zero = C64::new(0.0, 0.0);
    let mut psi = psi0.amplitudes.clone();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; d], vec![zero; d], vec![zero; d], vec![zero; d], vec![zero; d]);
    let minus_i = C64::new(0.0, -1.0);

    let mut times = vec![0.0];
    let mut states = vec![psi0.normalized()];
    let mut max_drift = (psi0.norm() - 1.0).abs();

    for k in 0..steps {
        let t = k as f64 * dt;
        ham.apply(t, &psi, &mut k1)?;
        k1.iter_mut().for_each(|v| *v *= minus_i);
        for j in 0..d {
            tmp[j] = psi[j] + k1[j] * (0.5 * dt);
        }
        ham.apply(t + 0.5 * dt, &tmp, &mut k2)?;
        k2.iter_mut().for_each(|v| *v *= minus_i);
        for j in 0..d {
            tmp[j] = psi[j] + k2[j] * (0.5 * dt);
        }
        ham.apply(t + 0.5 * dt, &tmp, &mut k3)?;
        k3.iter_mut().for_each(|v| *v *= minus_i);
        for j in 0..d {
            tmp[j] = psi[j] + k3[j] * dt;
        }
        ham.apply(t + dt, &tmp, &mut k4)?;
        k4.iter_mut().for_each(|v| *v *= minus_i);
        for j in 0..d {
            psi[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (dt / 6.0);
        }
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let drift = (norm - 1.0).abs();
        let t_next = (k + 1) as f64 * dt;
        if !(drift <= NORM_ABORT) {
            return Err(Error::NormDrift { t: t_next, drift, limit: NORM_ABORT });
        }
        max_drift = max_drift.max(drift);
        if (k + 1) % stride == 0 {
            times.push(if k + 1 == steps { total_time } else { t_next });
            states.push(QuantumState { n_sites: psi0.n_sites, amplitudes: psi.iter().map(|a| a / norm).collect() });
        }
    }
    Ok(StateTrajectory { times, states, max_norm_drift: max_drift })
}

/// Ground state of `H(0)` (first basis vector of the ground subspace).
pub fn initial_state(inst: &ProblemInstance, sch: &Schedule) -> Result<QuantumState> {
    let gs = ground_subspace(inst, sch, 0.0, super::spectrum::DEFAULT_DEGENERACY_TOL)?;
    QuantumState::from_real(inst.n_sites(), gs.basis[0].iter().copied())
}

/// Evolves the ground state of `H(0)` under `H_0(t)` plus `drive`.
pub fn evolve(
    inst: &ProblemInstance,
    sch: &Schedule,
    drive: Drive<'_>,
    steps: usize,
    output_points: usize,
) -> Result<StateTrajectory> {
    let ham = LabHamiltonian::new(inst, sch, drive)?;
    let psi0 = initial_state(inst, sch)?;
    propagate(&ham, &psi0, sch.total_time, steps, output_points)
}
