//! Rotation angle `phi_i(t) = atan2(B_y,i, B_x,i)` that removes `sigma_y`.

use crate::bloch::MagnetizationTrajectory;
use crate::error::{Error, Result};

/// Both atan2 arguments below this make the angle undefined.
pub const ANGLE_EPS: f64 = 1e-12;

/// How the final grid point is filled when both atan2 arguments vanish.
pub const END_CONVENTION: &str =
    "phi(T) extrapolated quadratically from the three previous grid points when |B_y(T)| and B_x(T) are both below 1e-12";

#[derive(Clone, Debug, PartialEq)]
pub struct FrameAngle {
    pub times: Vec<f64>,
    /// `phi[k][i]` in radians.
    pub phi: Vec<Vec<f64>>,
    /// `d phi / dt` in rad/ns: five-point centred differences in the interior,
    /// three-point stencils next to and at the ends.
    pub phi_dot: Vec<Vec<f64>>,
    /// True when the last grid point used the end convention.
    pub end_filled: bool,
}

impl FrameAngle {
    pub fn n_sites(&self) -> usize {
        self.phi[0].len()
    }

    pub fn phi_dot_at(&self, t: f64, out: &mut [f64]) {
        crate::bloch::interpolate(&self.times, t, |k| &self.phi_dot[k], out);
    }
}

/// Frame angle from per-grid-point transverse fields `bx[k][i]` and MFCD
/// fields `by[k][i]` on the uniform grid `times`.
pub fn frame_angle(times: &[f64], bx: &[Vec<f64>], by: &[Vec<f64>]) -> Result<FrameAngle> {
    let len = times.len();
    if len < 3 || bx.len() != len || by.len() != len {
        return Err(Error::GridMismatch("frame angle needs >= 3 matching grid points".into()));
    }
    let n = by[0].len();
    let mut phi = vec![vec![0.0; n]; len];
    let mut end_filled = false;
    for k in 0..len {
        for i in 0..n {
            let (y, x) = (by[k][i], bx[k][i]);
            if y.abs() < ANGLE_EPS && x.abs() < ANGLE_EPS {
                if k == len - 1 {
                    phi[k][i] = if k >= 3 { 3.0 * phi[k - 1][i] - 3.0 * phi[k - 2][i] + phi[k - 3][i] } else { phi[k - 1][i] };
                    end_filled = true;
                    continue;
                }
                return Err(Error::UndefinedFrame { t: times[k], site: i });
            }
            phi[k][i] = y.atan2(x);
        }
    }
    let h = times[1] - times[0];
    let mut phi_dot = vec![vec![0.0; n]; len];
    for i in 0..n {
        let p = |k: usize| phi[k][i];
        let last = len - 1;
        phi_dot[0][i] = (-3.0 * p(0) + 4.0 * p(1) - p(2)) / (2.0 * h);
        phi_dot[last][i] = (3.0 * p(last) - 4.0 * p(last - 1) + p(last - 2)) / (2.0 * h);
        if len >= 5 {
            phi_dot[1][i] = (p(2) - p(0)) / (2.0 * h);
            phi_dot[last - 1][i] = (p(last) - p(last - 2)) / (2.0 * h);
            for k in 2..last - 1 {
                phi_dot[k][i] = (p(k - 2) - 8.0 * p(k - 1) + 8.0 * p(k + 1) - p(k + 2)) / (12.0 * h);
            }
        } else {
            phi_dot[1][i] = (p(2) - p(0)) / (2.0 * h);
        }
    }
    Ok(FrameAngle { times: times.to_vec(), phi, phi_dot, end_filled })
}

/// Frame angle along a Bloch trajectory.
pub fn frame_angle_from_trajectory(traj: &MagnetizationTrajectory) -> Result<FrameAngle> {
    let bx: Vec<Vec<f64>> = traj.fields.iter().map(|f| f.bx.clone()).collect();
    let by: Vec<Vec<f64>> = traj.fields.iter().map(|f| f.by.clone()).collect();
    frame_angle(&traj.times, &bx, &by)
}
