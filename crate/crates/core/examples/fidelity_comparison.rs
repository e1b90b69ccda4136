//! Final ground-state fidelity for a handful of disorder samples, with the
//! mean-field drive and without any drive.

use mfcd::cli::{fidelity_pair, DriveMode};
use mfcd::model::{gaussian_instance, make_trig_schedule, RngSpec, Topology};

fn main() -> mfcd::Result<()> {
    let sch = make_trig_schedule(1.0, 1e-3)?;
    println!("{:>6} {:>10} {:>10}", "h_seed", "F (MFCD)", "F (none)");
    for h in 1000..1008 {
        let inst =
            gaussian_instance(8, 1.0, Topology::FullyConnected, 0.1, 1.0, RngSpec::new(0), RngSpec::new(h))?;
        match fidelity_pair(&inst, &sch, DriveMode::Mfcd, 2000) {
            Ok((cd, none)) => println!("{h:>6} {cd:10.4} {none:10.4}"),
            Err(e) => println!("{h:>6} failed: {e}"),
        }
    }
    Ok(())
}
