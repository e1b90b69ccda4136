//! Probability of reading out the Néel state after an MFCD-compiled anneal
//! versus a plain linear anneal, from 1000 sampled shots per point.

use mfcd::cli::{cmd_success_curve, RunConfig};

fn main() -> mfcd::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.success.total_times = vec![0.5, 1.0, 2.0, 5.0];
    let out = std::env::temp_dir().join("mfcd_success_curve");
    let outcome = cmd_success_curve(&cfg, &out)?;
    println!("target {}", outcome.summary.neel_target.as_deref().unwrap_or("?"));
    for p in &outcome.summary.success_curve {
        match (p.probability, p.wilson_low, p.wilson_high) {
            (Some(q), Some(lo), Some(hi)) => {
                println!("T={:<4} {:<6} P={q:.3} [{lo:.3}, {hi:.3}]", p.total_time, p.schedule)
            }
            _ => println!("T={:<4} {:<6} failed", p.total_time, p.schedule),
        }
    }
    println!("csv in {}", out.display());
    Ok(())
}
