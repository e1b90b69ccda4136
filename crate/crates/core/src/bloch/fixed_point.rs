//! Damped fixed-point solve of the mean-field self-consistency condition
//! `m_z,i = bz_i / sqrt(bz_i^2 + bx_i^2)`.

use nalgebra::Vector3;

use super::field::effective_field;
use crate::error::{Error, Result};
use crate::model::{ProblemInstance, Schedule};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointOptions {
    pub damping: f64,
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self { damping: 0.5, tolerance: 1e-10, max_sweeps: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointResult {
    pub m_z: Vec<f64>,
    /// Max-norm self-consistency defect of `m_z`.
    pub residual: f64,
    /// Update sweeps performed.
    pub iterations: usize,
    pub converged: bool,
}

/// Single-site ground-state magnetizations implied by `m_z`, plus the defect.
pub fn self_consistency_defect(inst: &ProblemInstance, sch: &Schedule, t: f64, m_z: &[f64]) -> (Vec<f64>, f64) {
    let m: Vec<_> = m_z.iter().map(|&z| Vector3::new(0.0, 0.0, z)).collect();
    let (bx, bz) = effective_field(inst, sch, &m, t);
    let target: Vec<f64> = bz.iter().zip(&bx).map(|(z, x)| z / (z * z + x * x).sqrt()).collect();
    let defect = target.iter().zip(m_z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    (target, defect)
}

/// Iterates `m_z <- (1 - a) m_z + a * target(m_z)` until the defect drops
/// below tolerance. Sites whose target does not depend on the others (no
/// couplings, or `f(t) = 0`) jump straight to their target.
///
/// Non-convergence is reported through the flag, not as an error.
pub fn self_consistent_magnetization(
    inst: &ProblemInstance,
    sch: &Schedule,
    t: f64,
    init_mz: &[f64],
    opts: FixedPointOptions,
) -> Result<FixedPointResult> {
    let n = inst.n_sites();
    if init_mz.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} initial values, got {}", init_mz.len())));
    }
    if init_mz.iter().any(|z| !(-1.0..=1.0).contains(z)) {
        return Err(Error::InvalidArgument("initial m_z must lie in [-1, 1]".into()));
    }
    if !(0.0 < opts.damping && opts.damping <= 1.0) {
        return Err(Error::InvalidArgument(format!("damping must be in (0, 1], got {}", opts.damping)));
    }
    let f = sch.f(t);
    let decoupled: Vec<bool> = (0..n).map(|i| f == 0.0 || inst.coupling_row(i).iter().all(|&j| j == 0.0)).collect();

    let mut m_z = init_mz.to_vec();
    let mut sweeps = 0;
    loop {
        let (target, defect) = self_consistency_defect(inst, sch, t, &m_z);
        if defect <= opts.tolerance || sweeps >= opts.max_sweeps {
            return Ok(FixedPointResult { m_z, residual: defect, iterations: sweeps, converged: defect <= opts.tolerance });
        }
        for i in 0..n {
            m_z[i] = if decoupled[i] { target[i] } else { (1.0 - opts.damping) * m_z[i] + opts.damping * target[i] };
        }
        sweeps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_trig_schedule, staggered_instance, Topology};

    #[test]
    fn single_site_closed_form_in_one_sweep() {
        let inst = ProblemInstance::new(1, vec![0.0], vec![0.6], 0.1, 1.0, Topology::Custom).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let t = 0.37;
        let r = self_consistent_magnetization(&inst, &sch, t, &[0.0], FixedPointOptions::default()).unwrap();
        let s = sch.at(t);
        let (bz, bx) = (s.g * 0.6, (1.0 - s.f) + 0.1);
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert!((r.m_z[0] - bz / (bz * bz + bx * bx).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn decoupled_at_start() {
        let inst = staggered_instance(4, 1.1).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let r = self_consistent_magnetization(&inst, &sch, 0.0, &[0.0; 4], FixedPointOptions::default()).unwrap();
        assert!(r.converged);
        for (i, &h) in inst.fields().iter().enumerate() {
            let dh = 1e-3 * h;
            let want = dh / (dh * dh + 1.0).sqrt();
            assert!((r.m_z[i] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn converged_result_reproduces_itself() {
        let inst = ProblemInstance::uniform_ferromagnet(4, 0.5, 0.3, 0.1, 1.0).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let r = self_consistent_magnetization(&inst, &sch, 0.6, &[0.1; 4], FixedPointOptions::default()).unwrap();
        assert!(r.converged);
        let (_, defect) = self_consistency_defect(&inst, &sch, 0.6, &r.m_z);
        assert!(defect <= 1e-10);
    }

    #[test]
    fn non_convergence_is_flagged() {
        let inst = ProblemInstance::uniform_ferromagnet(4, 0.5, 0.3, 0.1, 1.0).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        let opts = FixedPointOptions { max_sweeps: 2, ..Default::default() };
        let r = self_consistent_magnetization(&inst, &sch, 0.6, &[0.0; 4], opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
        assert!(r.residual > 1e-10);
    }

    #[test]
    fn rejects_out_of_range_seed() {
        let inst = staggered_instance(2, 1.1).unwrap();
        let sch = make_trig_schedule(1.0, 1e-3).unwrap();
        assert!(self_consistent_magnetization(&inst, &sch, 0.5, &[1.5, 0.0], FixedPointOptions::default()).is_err());
    }
}
