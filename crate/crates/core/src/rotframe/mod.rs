//! Rotating-frame form of the MFCD Hamiltonian and annealer schedule export.
//!
//! Rotating each spin about `z` by `phi_i = atan2(B_y,i, B_x,i)` trades the
//! `sigma_y` control for a stronger transverse field and an extra
//! longitudinal term `-phi_dot / 2`, both of which an annealer can express.

mod angle;
mod equivalence;
mod export;
mod hamiltonian;
mod hardware;

pub use angle::{frame_angle, frame_angle_from_trajectory, FrameAngle, ANGLE_EPS, END_CONVENTION};
pub use equivalence::{frame_convergence, verify_frame_equivalence, FrameReport};
pub use export::{
    export_schedule, AnnealScheduleExport, ExportMetadata, DEFAULT_BREAKPOINTS, DEFAULT_RAMP_END, G_PRIME_LIMIT,
};
pub use hamiltonian::RotatingHamiltonian;
pub use hardware::{hardware_schedules, HardwareTraces, SiteProfile, UNIFORM_TOL};
