//! The MFCD-driven Hamiltonian seen from the frame rotating with
//! `U(t) = exp(i/2 sum_i phi_i(t) sigma_z^i)`.
//!
//! Conjugating `-a sigma_x - B_y sigma_y` by `U` leaves a pure
//! `-sqrt(a^2 + B_y^2) sigma_x`, and `i dU/dt U^dag` adds
//! `-1/2 phi_dot sigma_z`. Populations in the `z` basis are untouched.

use num_complex::Complex64 as C64;

use super::angle::FrameAngle;
use crate::bloch::MagnetizationTrajectory;
use crate::error::{Error, Result};
use crate::model::{ProblemInstance, Schedule};
use crate::quantum::{check_trajectory, spin_z, transverse, Hamiltonian, IsingTables, Operator};

pub struct RotatingHamiltonian<'a> {
    inst: &'a ProblemInstance,
    sch: &'a Schedule,
    traj: &'a MagnetizationTrajectory,
    frame: &'a FrameAngle,
    tables: IsingTables,
}

impl<'a> RotatingHamiltonian<'a> {
    pub fn new(
        inst: &'a ProblemInstance,
        sch: &'a Schedule,
        traj: &'a MagnetizationTrajectory,
        frame: &'a FrameAngle,
    ) -> Result<Self> {
        check_trajectory(inst, sch, traj)?;
        if frame.times.len() != traj.times.len() || frame.n_sites() != inst.n_sites() {
            return Err(Error::GridMismatch("frame angle and trajectory grids differ".into()));
        }
        let tables = IsingTables::new(inst)?;
        Ok(Self { inst, sch, traj, frame, tables })
    }
}

impl Hamiltonian for RotatingHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.tables.zz.len()
    }

    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) -> Result<()> {
        let n = self.inst.n_sites();
        let s = self.sch.at(t);
        let a = transverse(self.inst, s.f);
        let mut by = vec![0.0; n];
        let mut phi_dot = vec![0.0; n];
        self.traj.by_at(t, &mut by);
        self.frame.phi_dot_at(t, &mut phi_dot);

        let mut op = self.tables.hamiltonian(s.f, s.g, 0.0);
        for (b, d) in op.diag.iter_mut().enumerate() {
            *d -= 0.5 * phi_dot.iter().enumerate().map(|(i, p)| p * spin_z(b, i)).sum::<f64>();
        }
        op.x = by.iter().map(|y| -(a * a + y * y).sqrt()).collect();
        op.apply(psi, out);
        Ok(())
    }
}
