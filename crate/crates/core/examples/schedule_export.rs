//! Annealer breakpoints for the staggered antiferromagnet, written to the
//! system temp directory as JSON and CSV.

use mfcd::cli::{linear_export, mfcd_export};
use mfcd::model::{make_trig_schedule, staggered_instance, Schedule};
use mfcd::rotframe::{DEFAULT_BREAKPOINTS, DEFAULT_RAMP_END};

fn main() -> mfcd::Result<()> {
    let inst = staggered_instance(8, 1.1)?;
    let t = 10.0;
    let steps = 20_000;
    let mfcd = mfcd_export(&inst, &make_trig_schedule(t, 1e-3)?, steps, DEFAULT_BREAKPOINTS, DEFAULT_RAMP_END)?;
    let lin = linear_export(&inst, &Schedule::linear(t, 1e-3)?, steps, DEFAULT_BREAKPOINTS, DEFAULT_RAMP_END)?;

    let dir = std::env::temp_dir();
    for (name, ex) in [("mfcd", &mfcd), ("linear", &lin)] {
        let path = dir.join(format!("schedule_{name}.json"));
        ex.save(&path)?;
        ex.write_csv(std::fs::File::create(dir.join(format!("schedule_{name}.csv")))?)?;
        let (lo, hi) = ex.breakpoints_g.iter().fold((0.0f64, 0.0f64), |(l, h), p| (l.min(p.1), h.max(p.1)));
        println!("{name:>6}: {} A points, g' in [{lo:.3}, {hi:.3}] -> {}", ex.breakpoints_a.len(), path.display());
    }

    // Short anneals need a field larger than the hardware allows.
    match mfcd_export(&inst, &make_trig_schedule(1.0, 1e-3)?, 2000, DEFAULT_BREAKPOINTS, DEFAULT_RAMP_END) {
        Ok(_) => println!("T=1 export in range"),
        Err(e) => println!("T=1 export refused: {e}"),
    }
    Ok(())
}
