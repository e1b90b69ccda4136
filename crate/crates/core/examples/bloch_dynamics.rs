//! Mean-field magnetization of a disordered 8-spin instance with and
//! without the counter-diabatic field, compared against the instantaneous
//! fixed point.

use mfcd::bloch::{integrate_bloch, self_consistent_magnetization, BlochOptions, FixedPointOptions};
use mfcd::model::{gaussian_instance, make_trig_schedule, RngSpec, Topology};

fn main() -> mfcd::Result<()> {
    let inst = gaussian_instance(8, 1.0, Topology::FullyConnected, 0.1, 1.0, RngSpec::new(0), RngSpec::new(0))?;
    let sch = make_trig_schedule(1.0, 1e-3)?;
    let on = integrate_bloch(&inst, &sch, BlochOptions::new(2000, true))?;
    let off = integrate_bloch(&inst, &sch, BlochOptions::new(2000, false))?;
    println!("max |m_y|: with CD {:.3e}, without {:.3e}", on.max_abs_my(), off.max_abs_my());

    println!("{:>5} {:>10} {:>10}", "t", "bloch m_z0", "fixed m_z0");
    for k in (0..=on.steps()).step_by(on.steps() / 10) {
        let t = on.times[k];
        let fp = self_consistent_magnetization(&inst, &sch, t, &on.mz(k), FixedPointOptions::default())?;
        println!("{t:5.2} {:10.5} {:10.5}", on.mz(k)[0], fp.m_z[0]);
    }
    Ok(())
}
