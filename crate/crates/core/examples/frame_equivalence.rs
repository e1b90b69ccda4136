//! Evolution in the rotating frame, where the sigma_y drive becomes a
//! longitudinal field, reproduces the lab-frame populations. The gap shrinks
//! as the step count grows.

use mfcd::model::{make_trig_schedule, staggered_instance};
use mfcd::rotframe::frame_convergence;

fn main() -> mfcd::Result<()> {
    let inst = staggered_instance(4, 1.0)?;
    let sch = make_trig_schedule(1.0, 1e-3)?;
    for k in [500, 1000, 2000] {
        let (coarse, fine, ratio) = frame_convergence(&inst, &sch, k)?;
        println!("K={k:<5} max |dP| {:.3e}  at 2K {:.3e}  ratio {ratio:.2}", coarse.discrepancy, fine.discrepancy);
    }
    Ok(())
}
