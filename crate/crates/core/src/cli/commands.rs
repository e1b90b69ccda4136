//! One function per subcommand. Each writes its artifacts into `out` and a
//! `<command>_run.json` that embeds the resolved config next to the summary.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DriveMode, RunConfig};
use super::stats::{BatchGroup, SampleRecord, SuccessPoint, SummaryStats};
use crate::bloch::{integrate_for_quantum, self_consistent_magnetization, FixedPointOptions};
use crate::error::{Error, Result};
use crate::model::{gaussian_instance, staggered_instance, ProblemInstance, RngSpec, Schedule};
use crate::quantum::{
    bitstring, evolve, ground_subspace, initial_state, propagate, sample_measurements, wilson_interval, Drive,
    GroundSubspace, DEFAULT_DEGENERACY_TOL, Z95,
};
use crate::rotframe::{
    export_schedule, frame_angle_from_trajectory, hardware_schedules, AnnealScheduleExport, ExportMetadata,
    RotatingHamiltonian, SiteProfile,
};

/// How a command finished, mapped onto the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    InvariantFailure,
    PartialFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InvariantFailure => 2,
            Status::PartialFailure => 3,
        }
    }
}

/// Exit code for a command that returned an error.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. }
        | Error::InvalidInstance(_)
        | Error::InvalidSchedule(_)
        | Error::UnknownTopology(_)
        | Error::InvalidArgument(_) => 1,
        _ => 2,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord<S> {
    pub command: String,
    pub status: Status,
    pub workers: usize,
    pub config: RunConfig,
    pub summary: S,
}

#[derive(Clone, Debug)]
pub struct Outcome<S> {
    pub status: Status,
    pub summary: S,
    pub files: Vec<PathBuf>,
}

fn create(out: &Path, name: &str, files: &mut Vec<PathBuf>) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(out)?;
    let path = out.join(name);
    let file = File::create(&path)?;
    files.push(path);
    Ok(BufWriter::new(file))
}

pub(crate) fn finish<S: Serialize + Clone>(
    command: &str,
    cfg: &RunConfig,
    out: &Path,
    status: Status,
    summary: S,
    mut files: Vec<PathBuf>,
) -> Result<Outcome<S>> {
    let record = RunRecord {
        command: command.to_string(),
        status,
        workers: cfg.workers,
        config: cfg.clone(),
        summary: summary.clone(),
    };
    let w = create(out, &format!("{command}_run.json"), &mut files)?;
    serde_json::to_writer_pretty(w, &record)?;
    Ok(Outcome { status, summary, files })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

// ---------------------------------------------------------------- bloch

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochSummary {
    pub instance_hash: String,
    pub bloch_steps: usize,
    pub max_abs_my_cd: f64,
    pub max_abs_my_no_cd: f64,
    pub max_norm_drift: f64,
    /// Sup-norm gap between the CD trajectory's `m_z` and the fixed point
    /// over all snapshots.
    pub snapshot_gap: f64,
    pub snapshots_converged: bool,
}

/// Bloch dynamics with and without the MFCD field, plus fixed-point
/// snapshots seeded from the CD trajectory.
pub fn cmd_bloch(cfg: &RunConfig, out: &Path) -> Result<Outcome<BlochSummary>> {
    let inst = cfg.instance.build()?;
    let sch = cfg.schedule.build()?;
    let k = cfg.steps_for(sch.total_time);
    let with_cd = integrate_for_quantum(&inst, &sch, k, true)?;
    let without = integrate_for_quantum(&inst, &sch, k, false)?;

    let mut files = Vec::new();
    with_cd.write_csv(create(out, "bloch_cd.csv", &mut files)?, cfg.csv_stride)?;
    without.write_csv(create(out, "bloch_no_cd.csv", &mut files)?, cfg.csv_stride)?;

    let mut w = csv::Writer::from_writer(create(out, "bloch_snapshots.csv", &mut files)?);
    w.write_record(["t", "site", "bloch_m_z", "fixed_point_m_z", "residual", "converged"])?;
    let (mut gap, mut converged) = (0.0f64, true);
    let bloch_steps = with_cd.steps();
    for s in 0..cfg.snapshots {
        let idx = s * bloch_steps / (cfg.snapshots - 1);
        let t = with_cd.times[idx];
        let mz = with_cd.mz(idx);
        let fp = self_consistent_magnetization(&inst, &sch, t, &mz, FixedPointOptions::default())?;
        converged &= fp.converged;
        for (i, (b, c)) in mz.iter().zip(&fp.m_z).enumerate() {
            gap = gap.max((b - c).abs());
            w.write_record(&[fmt(t), i.to_string(), fmt(*b), fmt(*c), fmt(fp.residual), fp.converged.to_string()])?;
        }
    }
    w.flush()?;
    drop(w);

    let summary = BlochSummary {
        instance_hash: inst.content_hash(),
        bloch_steps,
        max_abs_my_cd: with_cd.max_abs_my(),
        max_abs_my_no_cd: without.max_abs_my(),
        max_norm_drift: with_cd.max_norm_drift.max(without.max_norm_drift),
        snapshot_gap: gap,
        snapshots_converged: converged,
    };
    finish("bloch", cfg, out, Status::Ok, summary, files)
}

// ------------------------------------------------------- fidelity batch

/// Final fidelities with and without the configured drive for one
/// disorder sample. Both runs share one ground-subspace solve.
pub fn fidelity_pair(
    inst: &ProblemInstance,
    sch: &Schedule,
    drive: DriveMode,
    steps: usize,
) -> Result<(f64, f64)> {
    let gs = ground_subspace(inst, sch, sch.total_time, DEFAULT_DEGENERACY_TOL)?;
    let with = match drive {
        DriveMode::Mfcd => {
            let traj = integrate_for_quantum(inst, sch, steps, true)?;
            evolve(inst, sch, Drive::Mfcd(&traj), steps, 2)?
        }
        DriveMode::Exact => evolve(inst, sch, Drive::Exact, steps, 2)?,
    };
    let without = evolve(inst, sch, Drive::None, steps, 2)?;
    Ok((gs.overlap(&with.final_state().amplitudes), gs.overlap(&without.final_state().amplitudes)))
}

/// Disorder sweep over J and h seeds. Per-sample failures are recorded, never
/// fatal.
pub fn cmd_fidelity_batch(cfg: &RunConfig, out: &Path) -> Result<Outcome<SummaryStats>> {
    let b = &cfg.batch;
    let sch = cfg.schedule.build()?;
    let steps = cfg.steps_for(sch.total_time);
    let jobs: Vec<(u64, u64)> = b.j_seeds.iter().flat_map(|&j| b.h_seeds.iter().map(move |&h| (j, h))).collect();

    let run = |&(j_seed, h_seed): &(u64, u64)| -> SampleRecord {
        let result = gaussian_instance(
            b.n_sites,
            b.sigma,
            b.topology,
            b.gamma,
            b.gamma_d,
            RngSpec::new(j_seed),
            RngSpec::new(h_seed),
        )
        .and_then(|inst| fidelity_pair(&inst, &sch, cfg.drive, steps));
        SampleRecord::from_result(j_seed, h_seed, result)
    };
    let samples: Vec<SampleRecord> = pool(cfg.workers)?.install(|| jobs.par_iter().map(run).collect());

    let mut files = Vec::new();
    let mut w = csv::Writer::from_writer(create(out, "fidelity_samples.csv", &mut files)?);
    w.write_record(["j_seed", "h_seed", "fidelity_cd", "fidelity_no_cd", "improved", "error"])?;
    for s in &samples {
        w.write_record(&[
            s.j_seed.to_string(),
            s.h_seed.to_string(),
            fmt_opt(s.fidelity_cd),
            fmt_opt(s.fidelity_no_cd),
            s.improved().to_string(),
            s.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    drop(w);

    let groups: Vec<BatchGroup> = b
        .j_seeds
        .iter()
        .map(|&j| BatchGroup::from_samples(j, samples.iter().filter(|s| s.j_seed == j)))
        .collect();
    let failures = samples.iter().filter(|s| s.error.is_some()).count();
    let summary = SummaryStats {
        samples,
        groups,
        failures,
        success_curve: Vec::new(),
        neel_target: None,
    };
    let status = if failures > 0 { Status::PartialFailure } else { Status::Ok };
    finish("fidelity-batch", cfg, out, status, summary, files)
}

// -------------------------------------------------------- success curve

/// Lowest-energy basis state at `t = T`, from exact diagonalization.
pub fn ground_bitstring(inst: &ProblemInstance, sch: &Schedule) -> Result<String> {
    let gs: GroundSubspace = ground_subspace(inst, sch, sch.total_time, DEFAULT_DEGENERACY_TOL)?;
    if gs.dim() != 1 {
        return Err(Error::InvalidInstance(format!("ground state at t = T is {}-fold degenerate", gs.dim())));
    }
    let v = &gs.basis[0];
    let best = (0..v.len()).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
    Ok(bitstring(best, inst.n_sites()))
}

/// Final state of the MFCD-compiled (rotating-frame) anneal.
pub fn rotating_frame_run(inst: &ProblemInstance, sch: &Schedule, steps: usize) -> Result<crate::quantum::QuantumState> {
    let traj = integrate_for_quantum(inst, sch, steps, true)?;
    let frame = frame_angle_from_trajectory(&traj)?;
    let ham = RotatingHamiltonian::new(inst, sch, &traj, &frame)?;
    let psi0 = initial_state(inst, sch)?;
    Ok(propagate(&ham, &psi0, sch.total_time, steps, 2)?.final_state().clone())
}

/// Néel success probability versus `T` for the MFCD-compiled schedule and
/// the linear schedule without CD.
pub fn cmd_success_curve(cfg: &RunConfig, out: &Path) -> Result<Outcome<SummaryStats>> {
    let sp = &cfg.success;
    let inst = staggered_instance(sp.n_sites, sp.h)?;
    let delta = cfg.schedule.delta;
    let target = ground_bitstring(&inst, &Schedule::new(1.0, delta, crate::model::ScheduleFamily::TrigDefault)?)?;
    let target_index = crate::quantum::parse_bitstring(&target)?;

    let jobs: Vec<(usize, f64, &str)> = sp
        .total_times
        .iter()
        .enumerate()
        .flat_map(|(i, &t)| [(2 * i, t, "mfcd"), (2 * i + 1, t, "linear")])
        .collect();
    let run = |&(r, t, schedule): &(usize, f64, &str)| -> SuccessPoint {
        let seed = sp.seed.wrapping_add(r as u64);
        let steps = cfg.steps_for(t);
        let state = match schedule {
            "mfcd" => Schedule::new(t, delta, crate::model::ScheduleFamily::TrigDefault)
                .and_then(|sch| rotating_frame_run(&inst, &sch, steps)),
            _ => Schedule::linear(t, delta)
                .and_then(|sch| evolve(&inst, &sch, Drive::None, steps, 2))
                .map(|run| run.final_state().clone()),
        };
        let sampled = state.and_then(|st| {
            let exact = st.amplitudes[target_index].norm_sqr();
            sample_measurements(&st, sp.shots, RngSpec::new(seed)).map(|rec| (exact, rec))
        });
        match sampled {
            Ok((exact, rec)) => {
                let hits = rec.counts.get(&target).copied().unwrap_or(0);
                let (lo, hi) = wilson_interval(hits, sp.shots, Z95);
                SuccessPoint {
                    total_time: t,
                    schedule: schedule.to_string(),
                    seed,
                    shots: sp.shots,
                    successes: Some(hits),
                    probability: Some(hits as f64 / sp.shots as f64),
                    wilson_low: Some(lo),
                    wilson_high: Some(hi),
                    exact_probability: Some(exact),
                    error: None,
                }
            }
            Err(e) => SuccessPoint::failed(t, schedule, seed, sp.shots, &e),
        }
    };
    let points: Vec<SuccessPoint> = pool(cfg.workers)?.install(|| jobs.par_iter().map(run).collect());

    let mut files = Vec::new();
    let mut w = csv::Writer::from_writer(create(out, "success_curve.csv", &mut files)?);
    w.write_record([
        "total_time",
        "schedule",
        "seed",
        "shots",
        "successes",
        "probability",
        "wilson_low",
        "wilson_high",
        "exact_probability",
        "error",
    ])?;
    for p in &points {
        w.write_record(&[
            fmt(p.total_time),
            p.schedule.clone(),
            p.seed.to_string(),
            p.shots.to_string(),
            p.successes.map(|s| s.to_string()).unwrap_or_default(),
            fmt_opt(p.probability),
            fmt_opt(p.wilson_low),
            fmt_opt(p.wilson_high),
            fmt_opt(p.exact_probability),
            p.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    drop(w);

    let failures = points.iter().filter(|p| p.error.is_some()).count();
    let summary = SummaryStats {
        samples: Vec::new(),
        groups: Vec::new(),
        failures,
        success_curve: points,
        neel_target: Some(target),
    };
    let status = if failures > 0 { Status::PartialFailure } else { Status::Ok };
    finish("success-curve", cfg, out, status, summary, files)
}

// ------------------------------------------------------ schedule export

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportSummary {
    pub instance_hash: String,
    pub annealing_time: f64,
    pub mfcd_breakpoints: usize,
    pub mfcd_g_prime_range: (f64, f64),
    pub linear_g_prime_range: (f64, f64),
    pub round_trip_identical: bool,
}

/// MFCD schedule for a uniform-site instance and the matching
/// linear-schedule baseline.
pub fn mfcd_export(
    inst: &ProblemInstance,
    sch: &Schedule,
    steps: usize,
    n_breakpoints: usize,
    ramp_end: f64,
) -> Result<AnnealScheduleExport> {
    let traj = integrate_for_quantum(inst, sch, steps, true)?;
    let frame = frame_angle_from_trajectory(&traj)?;
    let profile = SiteProfile::uniform(inst, sch, &traj, &frame)?;
    let traces = hardware_schedules(sch, &profile);
    export_schedule(&traces, n_breakpoints, ramp_end, ExportMetadata::new(inst, sch, "mfcd"))
}

pub fn linear_export(
    inst: &ProblemInstance,
    sch: &Schedule,
    steps: usize,
    n_breakpoints: usize,
    ramp_end: f64,
) -> Result<AnnealScheduleExport> {
    let traces = hardware_schedules(sch, &SiteProfile::without_cd(inst, sch, 2 * steps));
    export_schedule(&traces, n_breakpoints, ramp_end, ExportMetadata::new(inst, sch, "none"))
}

fn g_range(ex: &AnnealScheduleExport) -> (f64, f64) {
    ex.breakpoints_g.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)))
}

pub fn cmd_export_schedule(cfg: &RunConfig, out: &Path) -> Result<Outcome<ExportSummary>> {
    let e = &cfg.export;
    let inst = e.instance.build()?;
    let t = e.total_time;
    let steps = cfg.steps_for(t);
    let mfcd = mfcd_export(&inst, &cfg.schedule.with_time(t)?, steps, e.n_breakpoints, e.ramp_end)?;
    let linear = linear_export(&inst, &Schedule::linear(t, cfg.schedule.delta)?, steps, e.n_breakpoints, e.ramp_end)?;

    let mut files = Vec::new();
    let mut identical = true;
    for (name, ex) in [("schedule_mfcd", &mfcd), ("schedule_linear", &linear)] {
        ex.validate()?;
        let json_path = out.join(format!("{name}.json"));
        std::fs::create_dir_all(out)?;
        ex.save(&json_path)?;
        files.push(json_path.clone());
        identical &= AnnealScheduleExport::load(&json_path)? == *ex;
        ex.write_csv(create(out, &format!("{name}.csv"), &mut files)?)?;
    }
    let summary = ExportSummary {
        instance_hash: inst.content_hash(),
        annealing_time: t,
        mfcd_breakpoints: mfcd.breakpoints_a.len(),
        mfcd_g_prime_range: g_range(&mfcd),
        linear_g_prime_range: g_range(&linear),
        round_trip_identical: identical,
    };
    let status = if identical { Status::Ok } else { Status::InvariantFailure };
    finish("export-schedule", cfg, out, status, summary, files)
}
