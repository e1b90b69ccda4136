//! Classical mean-field spin dynamics and the MFCD field.
//!
//! Each site carries a unit magnetization `m_i` that precesses in its
//! effective field, `dm_i/dt = 2 m_i x B_i`. The `y` component of the field
//! is the counter-diabatic control: it is chosen so that `m_i` co-rotates with
//! the instantaneous `(B_x, 0, B_z)` direction instead of precessing about it.

mod check;
mod field;
mod fixed_point;
mod integrate;

pub use check::derivative_consistency;
pub use field::{
    cd_field, effective_field, field_at, solve_field_derivatives, EffectiveField, FieldOptions, DENOMINATOR_EPS,
    MAX_CONDITION,
};
pub use fixed_point::{
    self_consistency_defect, self_consistent_magnetization, FixedPointOptions, FixedPointResult,
};
pub use integrate::{
    integrate_bloch, integrate_for_quantum, BlochOptions, MagnetizationTrajectory, DEFAULT_STEPS, MIN_STEPS, NORM_ABORT,
};
pub(crate) use integrate::interpolate;
