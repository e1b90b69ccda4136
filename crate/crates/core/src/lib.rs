//! Quantum annealing with mean-field counter-diabatic (MFCD) driving.
//!
//! The crate builds the MFCD control field `B_y` by integrating classical
//! Bloch dynamics of per-site magnetizations, solving a small linear system
//! for `dB_z/dt` at every integrator stage. The result is checked against exact
//! state-vector evolution and the mean-field self-consistency condition, and
//! compiled into rotating-frame schedules for annealer hardware.
//!
//! * [`model`]: instances, schedules, seeded generators.
//! * [`bloch`]: effective fields, MFCD field, Bloch integration, fixed point.
//! * [`quantum`]: `2^N` state-vector evolution, exact CD, fidelity, sampling.
//! * [`rotframe`]: rotating frame and hardware schedule export.
//! * [`cli`]: config-driven experiments behind the `mfcd` binary.

pub mod bloch;
pub mod cli;
pub mod error;
pub mod model;
pub mod quantum;
pub mod rotframe;

pub use error::{Error, Result};
