//! Finite-difference cross-check of the linear-solve `dB_z/dt`.

use super::integrate::MagnetizationTrajectory;

/// RMS over sites and interior grid points of `bz_dot` (from the linear
/// solve) minus the centred difference of the stored `bz`.
pub fn derivative_consistency(traj: &MagnetizationTrajectory) -> f64 {
    let dt = traj.dt();
    let (mut sum, mut count) = (0.0, 0usize);
    for k in 1..traj.steps() {
        let (prev, here, next) = (&traj.fields[k - 1], &traj.fields[k], &traj.fields[k + 1]);
        for i in 0..traj.n_sites() {
            let fd = (next.bz[i] - prev.bz[i]) / (2.0 * dt);
            sum += (here.bz_dot[i] - fd).powi(2);
            count += 1;
        }
    }
    (sum / count.max(1) as f64).sqrt()
}
