//! The exact counter-diabatic term keeps a small ferromagnet in its ground
//! state even for very fast anneals, and for one spin the mean-field term
//! coincides with it.

use mfcd::bloch::integrate_for_quantum;
use mfcd::model::{make_trig_schedule, ProblemInstance};
use mfcd::quantum::{evolve, fidelity_trace, Drive};

fn main() -> mfcd::Result<()> {
    let inst = ProblemInstance::uniform_ferromagnet(3, 1.0, 0.5, 0.1, 1.0)?;
    for t in [0.01, 0.1, 1.0] {
        let sch = make_trig_schedule(t, 1e-3)?;
        let exact = evolve(&inst, &sch, Drive::Exact, 2000, 201)?;
        let none = evolve(&inst, &sch, Drive::None, 2000, 201)?;
        println!(
            "N=3 T={t:<5} min F exact CD {:.12}, final F no CD {:.4}",
            fidelity_trace(&exact, &inst, &sch)?.min_fidelity(),
            fidelity_trace(&none, &inst, &sch)?.final_fidelity()
        );
    }

    let spin = ProblemInstance::uniform_ferromagnet(1, 0.0, 0.5, 0.0, 1.0)?;
    let sch = make_trig_schedule(0.1, 1e-3)?;
    let traj = integrate_for_quantum(&spin, &sch, 2000, true)?;
    let run = evolve(&spin, &sch, Drive::Mfcd(&traj), 2000, 2)?;
    println!("N=1 T=0.1 mean-field infidelity {:.2e}", 1.0 - fidelity_trace(&run, &spin, &sch)?.final_fidelity());
    Ok(())
}
