//! Instantaneous ground subspaces and fidelity.

use std::io::Write;

use nalgebra::SymmetricEigen;

use super::evolve::StateTrajectory;
use super::operator::{check_size, transverse, IsingTables, MAX_SITES};
use crate::error::Result;
use crate::model::{ProblemInstance, Schedule};

/// Default energy window for counting a level as part of the ground subspace.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct GroundSubspace {
    pub energy: f64,
    /// Distance from the ground energy to the lowest level outside the
    /// subspace (`inf` when every level is degenerate).
    pub gap: f64,
    /// Orthonormal real eigenvectors spanning the subspace.
    pub basis: Vec<Vec<f64>>,
}

impl GroundSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `sum_k |<phi_k|psi>|^2`.
    pub fn overlap(&self, amplitudes: &[num_complex::Complex64]) -> f64 {
        self.basis
            .iter()
            .map(|phi| {
                let (re, im) = phi.iter().zip(amplitudes).fold((0.0, 0.0), |(re, im), (p, a)| (re + p * a.re, im + p * a.im));
                re * re + im * im
            })
            .sum()
    }
}

/// Dense eigensolve of `H(t)`; every eigenvector within `tol` of the minimum
/// belongs to the subspace.
pub fn ground_subspace(inst: &ProblemInstance, sch: &Schedule, t: f64, tol: f64) -> Result<GroundSubspace> {
    check_size("ground subspace", inst.n_sites(), MAX_SITES)?;
    let tables = IsingTables::new(inst)?;
    Ok(ground_subspace_from_tables(&tables, inst, sch, t, tol))
}

pub(crate) fn ground_subspace_from_tables(
    tables: &IsingTables,
    inst: &ProblemInstance,
    sch: &Schedule,
    t: f64,
    tol: f64,
) -> GroundSubspace {
    let s = sch.at(t);
    let h = tables.hamiltonian(s.f, s.g, transverse(inst, s.f));
    // Diagonal Hamiltonians need no eigensolver.
    if h.x.iter().all(|&c| c == 0.0) {
        let e0 = h.diag.iter().copied().fold(f64::INFINITY, f64::min);
        let d = h.diag.len();
        let basis = (0..d)
            .filter(|&b| h.diag[b] <= e0 + tol)
            .map(|b| {
                let mut v = vec![0.0; d];
                v[b] = 1.0;
                v
            })
            .collect();
        let gap = h.diag.iter().filter(|&&e| e > e0 + tol).fold(f64::INFINITY, |a, &e| a.min(e - e0));
        return GroundSubspace { energy: e0, gap, basis };
    }
    let eig = SymmetricEigen::new(h.to_dense_real());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let inside: Vec<usize> = order.iter().copied().take_while(|&k| eig.eigenvalues[k] <= e0 + tol).collect();
    let gap = order.get(inside.len()).map_or(f64::INFINITY, |&k| eig.eigenvalues[k] - e0);
    let basis = inside.iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect();
    GroundSubspace { energy: e0, gap, basis }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub gap: Vec<f64>,
}

impl FidelityTrace {
    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity.last().unwrap()
    }

    pub fn min_fidelity(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// CSV with columns `t,fidelity,gap`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "fidelity", "gap"])?;
        for k in 0..self.times.len() {
            w.write_record(&[
                format!("{:.17e}", self.times[k]),
                format!("{:.17e}", self.fidelity[k]),
                format!("{:.17e}", self.gap[k]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Ground-subspace fidelity of every recorded state.
pub fn fidelity_trace(run: &StateTrajectory, inst: &ProblemInstance, sch: &Schedule) -> Result<FidelityTrace> {
    let tables = IsingTables::new(inst)?;
    let mut out = FidelityTrace::default();
    for (t, state) in run.times.iter().zip(&run.states) {
        let gs = ground_subspace_from_tables(&tables, inst, sch, *t, DEFAULT_DEGENERACY_TOL);
        out.times.push(*t);
        out.fidelity.push(gs.overlap(&state.amplitudes));
        out.gap.push(gs.gap);
    }
    Ok(out)
}

/// Fidelity of the last recorded state only.
pub fn final_fidelity(run: &StateTrajectory, inst: &ProblemInstance, sch: &Schedule) -> Result<f64> {
    let gs = ground_subspace(inst, sch, sch.total_time, DEFAULT_DEGENERACY_TOL)?;
    Ok(gs.overlap(&run.final_state().amplitudes))
}
