//! Problem instances, annealing schedules and seeded generators.
//!
//! Units: energies in GHz, times in ns, with hbar = 1 and no factor of 2 pi.

mod instance;
mod rng;
mod schedule;

pub use instance::{
    gaussian_instance, sample_gaussian_couplings, sample_uniform_fields, staggered_instance, ProblemInstance,
    Provenance, Topology,
};
pub use rng::{RngAlgorithm, RngSpec, Stream};
pub use schedule::{make_trig_schedule, Schedule, ScheduleFamily, ScheduleValues, Tabulated, DEFAULT_DELTA};
