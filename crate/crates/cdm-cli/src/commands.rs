//! The four experiment commands. Configuration problems exit 2 before any
//! file is written; simulation failures exit 3 (partial outputs are kept
//! where they aid diagnosis). Grid cells and swarm evaluations run on the
//! rayon pool; all output orderings and seeds are deterministic.

use rayon::prelude::*;
use serde::Serialize;

use cdm_core::driver::{
    amplitude_calibrate, run_control, ControlLaw, ControlSpec, EtaPathControl,
    ProportionalControl, RotatedControl, RunConfig, SimulationRecord, StopReason, StopRule,
    ThresholdSpec,
};
use cdm_core::model::Material;
use cdm_core::opt::{
    optimize_load_path, DesignComponent, DesignSpace, NmConfig, OptimizationReport, PsoConfig,
};
use cdm_core::path::{PathSpec, RotationSchedule};

use crate::config::{
    self, dispatch_model, CalibrateCfg, EtaPathCfg, ExperimentConfig, OptimizeCfg,
    ProportionalCfg, RotateCfg, Scenario, StopCfg, SurfaceCfg, TensionTorsionCfg,
};
use crate::output::{self, hash_hex, json_string, num, stamp, stop_reason_str, write_file};
use crate::{CliError, CommonArgs};

fn sim_err(e: cdm_core::Error) -> CliError {
    CliError::Sim(e.to_string())
}

fn cfg_err(e: cdm_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn init_threads(n: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        // a second initialization in-process is harmless; keep the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn run_cfg(n_steps: usize, stop: StopRule<f64>, cap: f64) -> RunConfig<f64> {
    let mut rc = RunConfig::new(stop).with_steps(n_steps);
    rc.eps_p_eq_cap = cap;
    rc
}

fn stop_rule(s: &Option<StopCfg>) -> StopRule<f64> {
    match s {
        None => StopRule::RunToEnd,
        Some(StopCfg::XiE(v)) => StopRule::XiE(*v),
        Some(StopCfg::EpsPEq(v)) => StopRule::EpsPeq(*v),
        Some(StopCfg::FirstYield) => StopRule::FirstYield,
    }
}

fn threshold_spec(c: CalibrateCfg) -> ThresholdSpec<f64> {
    match c {
        CalibrateCfg::XiE(v) => ThresholdSpec::XiE(v),
        CalibrateCfg::EpsPEq(v) => ThresholdSpec::EpsPeq(v),
    }
}

fn fin(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

// ---------------------------------------------------------------- simulate

#[derive(Serialize)]
struct Summary {
    config_hash: String,
    version: &'static str,
    model: &'static str,
    scenario: &'static str,
    control: String,
    n_steps: usize,
    stop_reason: String,
    #[serde(rename = "final")]
    final_state: FinalOut,
    crossing: Option<CrossingOut>,
}

#[derive(Serialize)]
struct FinalOut {
    t: f64,
    xi_e: f64,
    f_e: f64,
    eps_p_eq: f64,
    eta: Option<f64>,
    theta_bar: Option<f64>,
}

#[derive(Serialize)]
struct CrossingOut {
    t: f64,
    eps_p_eq: f64,
    xi_e: f64,
    sigma: [f64; 6],
}

pub fn simulate(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, hash) = config::load(&args.config, &args.set)?;
    init_threads(args.threads)?;
    let record = match &cfg.scenario {
        Scenario::TensionTorsion(tt) => {
            dispatch_model!(cfg, |m| sim_tension_torsion(&m, &cfg, tt))?
        }
        Scenario::Proportional(p) => dispatch_model!(cfg, |m| sim_proportional(&m, &cfg, p))?,
        Scenario::EtaPath(p) => dispatch_model!(cfg, |m| sim_eta_path(&m, &cfg, p))?,
        other => {
            return Err(CliError::Config(format!(
                "the simulate subcommand handles tension-torsion, proportional, and eta-path \
                 scenarios; '{}' has its own subcommand",
                other.kind()
            )))
        }
    };

    let last = record.last();
    let summary = Summary {
        config_hash: hash_hex(hash),
        version: output::VERSION,
        model: record.model,
        scenario: cfg.scenario.kind(),
        control: record.control.clone(),
        n_steps: record.n_steps,
        stop_reason: stop_reason_str(&record.stop),
        final_state: FinalOut {
            t: last.t,
            xi_e: last.xi_e,
            f_e: last.f_e,
            eps_p_eq: last.eps_p_eq,
            eta: fin(last.eta),
            theta_bar: fin(last.theta_bar),
        },
        crossing: record.crossing.map(|c| CrossingOut {
            t: c.t,
            eps_p_eq: c.eps_p_eq,
            xi_e: c.xi_e,
            sigma: c.sigma.components(),
        }),
    };
    write_file(&args.out, "run.csv", &output::run_csv(&record, hash))?;
    write_file(&args.out, "summary.json", &json_string(&summary)?)?;
    if let StopReason::Failed { what } = &record.stop {
        return Err(CliError::Sim(format!("run ended in failure: {what} (outputs written)")));
    }
    Ok(())
}

fn sim_tension_torsion<M: Material<f64>>(
    model: &M,
    cfg: &ExperimentConfig,
    tt: &TensionTorsionCfg,
) -> Result<SimulationRecord<f64>, CliError> {
    if !(tt.switch > 0.0 && tt.switch < 1.0) {
        return Err(CliError::Config("switch must lie strictly inside (0, 1)".into()));
    }
    let tz = PathSpec::Pwl {
        knots: vec![(0.0, 0.0), (tt.switch, tt.eps_tz), (1.0, tt.eps_tz)],
    };
    let zz = PathSpec::Pwl {
        knots: vec![(0.0, 0.0), (tt.switch, 0.0), (1.0, tt.eps_zz)],
    };
    let law = ControlSpec::tension_torsion(tz, zz, "tension-torsion");
    run_control(model, &law, &run_cfg(cfg.n_steps, StopRule::RunToEnd, 1.0)).map_err(sim_err)
}

fn sim_proportional<M: Material<f64>>(
    model: &M,
    cfg: &ExperimentConfig,
    p: &ProportionalCfg,
) -> Result<SimulationRecord<f64>, CliError> {
    // reject invalid invariants before simulating
    ProportionalControl::from_invariants(p.eta, p.theta_bar, PathSpec::ramp(0.0, p.amplitude))
        .map_err(cfg_err)?;
    let mut amp = p.amplitude;
    if let Some(cal) = p.calibrate {
        let rc = run_cfg(cfg.n_steps, StopRule::RunToEnd, p.eps_p_eq_cap);
        let scale = amplitude_calibrate(
            |s| {
                let law = ProportionalControl::from_invariants(
                    p.eta,
                    p.theta_bar,
                    PathSpec::ramp(0.0, s * p.amplitude),
                )?;
                run_control(model, &law, &rc)
            },
            threshold_spec(cal),
        )
        .map_err(sim_err)?;
        amp = scale * p.amplitude;
    }
    let law = ProportionalControl::from_invariants(p.eta, p.theta_bar, PathSpec::ramp(0.0, amp))
        .map_err(cfg_err)?;
    let rc = run_cfg(cfg.n_steps, stop_rule(&p.stop), p.eps_p_eq_cap);
    run_control(model, &law, &rc).map_err(sim_err)
}

fn sim_eta_path<M: Material<f64>>(
    model: &M,
    cfg: &ExperimentConfig,
    p: &EtaPathCfg,
) -> Result<SimulationRecord<f64>, CliError> {
    let eta = PathSpec::Bezier {
        control: p.control.clone(),
    };
    let probe = EtaPathControl {
        eta: eta.clone(),
        amplitude: PathSpec::ramp(0.0, p.amplitude),
    };
    probe.validate().map_err(cfg_err)?;
    let mut amp = p.amplitude;
    if let Some(cal) = p.calibrate {
        let rc = run_cfg(cfg.n_steps, StopRule::RunToEnd, p.eps_p_eq_cap);
        let scale = amplitude_calibrate(
            |s| {
                let law = EtaPathControl {
                    eta: eta.clone(),
                    amplitude: PathSpec::ramp(0.0, s * p.amplitude),
                };
                run_control(model, &law, &rc)
            },
            threshold_spec(cal),
        )
        .map_err(sim_err)?;
        amp = scale * p.amplitude;
    }
    let law = EtaPathControl {
        eta,
        amplitude: PathSpec::ramp(0.0, amp),
    };
    let rc = run_cfg(cfg.n_steps, stop_rule(&p.stop), p.eps_p_eq_cap);
    run_control(model, &law, &rc).map_err(sim_err)
}

// -------------------------------------------------------- fracture surface

struct SurfaceRow {
    eta: f64,
    theta_bar: f64,
    eps_p_eq: f64,
    no_failure: bool,
    note: String,
}

pub fn fracture_surface(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, hash) = config::load(&args.config, &args.set)?;
    let s = match &cfg.scenario {
        Scenario::FractureSurface(s) => s,
        other => {
            return Err(CliError::Config(format!(
                "the fracture-surface subcommand needs a fracture-surface scenario, found '{}'",
                other.kind()
            )))
        }
    };
    if s.eta_count == 0 || s.theta_count == 0 {
        return Err(CliError::Config("grid counts must be positive".into()));
    }
    if s.eta_min > s.eta_max || s.theta_min > s.theta_max {
        return Err(CliError::Config("grid bounds must be ordered".into()));
    }
    init_threads(args.threads)?;

    let lin = |lo: f64, hi: f64, n: usize, k: usize| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    };
    let mut cells = Vec::with_capacity(s.eta_count * s.theta_count);
    for i in 0..s.eta_count {
        for j in 0..s.theta_count {
            cells.push((
                lin(s.eta_min, s.eta_max, s.eta_count, i),
                lin(s.theta_min, s.theta_max, s.theta_count, j),
            ));
        }
    }
    let rows: Vec<SurfaceRow> = dispatch_model!(cfg, |m| {
        let model = &m;
        cells
            .par_iter()
            .map(|&(eta, tb)| surface_cell(model, cfg.n_steps, s, eta, tb))
            .collect()
    });

    let mut csv = stamp(hash);
    csv.push_str("eta,theta_bar,eps_p_eq,no_failure,note\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            num(r.eta),
            num(r.theta_bar),
            num(r.eps_p_eq),
            r.no_failure as u8,
            r.note.replace([',', '\n'], ";"),
        ));
    }
    write_file(&args.out, "surface.csv", &csv)
}

/// One grid cell: the proportional amplitude is calibrated so the damage
/// threshold is met exactly at the end of the path (loads near a stress-
/// control limit load approach it along the plateau), and the equivalent
/// plastic strain is read there. Cells that cannot reach the threshold at
/// any load carry the no-failure flag.
fn surface_cell<M: Material<f64>>(
    model: &M,
    n_steps: usize,
    s: &SurfaceCfg,
    eta: f64,
    tb: f64,
) -> SurfaceRow {
    let flagged = |note: String| SurfaceRow {
        eta,
        theta_bar: tb,
        eps_p_eq: f64::NAN,
        no_failure: true,
        note,
    };
    if let Err(e) =
        ProportionalControl::from_invariants(eta, tb, PathSpec::ramp(0.0, s.amplitude))
    {
        return flagged(format!("invalid ray: {e}"));
    }
    match calibrated_run(model, n_steps, s.eps_p_eq_cap, s.threshold_xi_e, |sc| {
        ProportionalControl::from_invariants(eta, tb, PathSpec::ramp(0.0, sc * s.amplitude))
    }) {
        Ok(rec) => SurfaceRow {
            eta,
            theta_bar: tb,
            eps_p_eq: rec.last().eps_p_eq,
            no_failure: false,
            note: "ok".into(),
        },
        Err(e @ cdm_core::Error::NoBracket { .. }) => flagged(format!("no failure: {e}")),
        Err(e) => flagged(format!("error: {e}")),
    }
}

// ----------------------------------------------------------------- optimize

#[derive(Serialize)]
struct RunOut {
    f_e_final: f64,
    xi_e_final: f64,
    eps_p_eq_final: f64,
}

#[derive(Serialize)]
struct OptimizeOut {
    config_hash: String,
    version: &'static str,
    model: &'static str,
    scenario: &'static str,
    seed: u64,
    evaluations: usize,
    feasibility_margin: f64,
    design: Vec<f64>,
    pso_history: Vec<f64>,
    reference: RunOut,
    optimized: RunOut,
}

pub fn optimize(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, hash) = config::load(&args.config, &args.set)?;
    let o = match &cfg.scenario {
        Scenario::Optimize(o) => o,
        other => {
            return Err(CliError::Config(format!(
                "the optimize subcommand needs an optimize scenario, found '{}'",
                other.kind()
            )))
        }
    };
    if !(o.switch > 0.0 && o.switch < 1.0) {
        return Err(CliError::Config("switch must lie strictly inside (0, 1)".into()));
    }
    if !(o.lo < o.hi) {
        return Err(CliError::Config("design bounds must satisfy lo < hi".into()));
    }
    if o.swarm == 0 {
        return Err(CliError::Config("swarm must be positive".into()));
    }
    init_threads(args.threads)?;
    let seed = args.seed.unwrap_or(o.seed);
    let (report, traces) = dispatch_model!(cfg, |m| run_optimize(&m, &cfg, o, seed))?;

    let model_tag = match cfg.model {
        config::ModelId::EccA => "ecc-a",
        config::ModelId::EccI => "ecc-i",
        config::ModelId::LemA => "lem-a",
        config::ModelId::LemI => "lem-i",
    };
    let out = OptimizeOut {
        config_hash: hash_hex(hash),
        version: output::VERSION,
        model: model_tag,
        scenario: "optimize",
        seed,
        evaluations: report.evaluations,
        feasibility_margin: report.feasibility_margin,
        design: report.design.clone(),
        pso_history: report.pso_history.clone(),
        reference: RunOut {
            f_e_final: report.reference.f_e_final,
            xi_e_final: report.reference.xi_e_final,
            eps_p_eq_final: report.reference.eps_p_eq_final,
        },
        optimized: RunOut {
            f_e_final: report.optimized.f_e_final,
            xi_e_final: report.optimized.xi_e_final,
            eps_p_eq_final: report.optimized.eps_p_eq_final,
        },
    };
    let mut csv = stamp(hash);
    csv.push_str("t,eps_tz_ref,eps_zz_ref,eta_ref,eps_tz_opt,eps_zz_opt,eta_opt\n");
    for row in &traces {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            num(row[0]),
            num(row[1]),
            num(row[2]),
            num(row[3]),
            num(row[4]),
            num(row[5]),
            num(row[6]),
        ));
    }
    write_file(&args.out, "report.json", &json_string(&out)?)?;
    write_file(&args.out, "traces.csv", &csv)
}

#[allow(clippy::type_complexity)]
fn run_optimize<M: Material<f64>>(
    model: &M,
    cfg: &ExperimentConfig,
    o: &OptimizeCfg,
    seed: u64,
) -> Result<(OptimizationReport<f64>, Vec<[f64; 7]>), CliError> {
    let ds = DesignSpace {
        components: vec![
            DesignComponent {
                start: 0.0,
                end: o.eps_tz,
                free: o.free,
                lo: o.lo,
                hi: o.hi,
            },
            DesignComponent {
                start: 0.0,
                end: o.eps_zz,
                free: o.free,
                lo: o.lo,
                hi: o.hi,
            },
        ],
    };
    let reference = vec![
        PathSpec::Pwl {
            knots: vec![(0.0, 0.0), (o.switch, o.eps_tz), (1.0, o.eps_tz)],
        },
        PathSpec::Pwl {
            knots: vec![(0.0, 0.0), (o.switch, 0.0), (1.0, o.eps_zz)],
        },
    ];
    let rc = run_cfg(cfg.n_steps, StopRule::RunToEnd, 1.0);
    let pso = PsoConfig {
        swarm: o.swarm,
        inertia: o.inertia,
        cognitive: o.cognitive,
        social: o.social,
        iterations: o.iterations,
        seed,
    };
    let nm = NmConfig {
        scale: o.nm_scale,
        max_iter: o.nm_max_iter,
        ..NmConfig::default()
    };
    let report = optimize_load_path(
        model,
        &ds,
        &reference,
        |p| {
            let mut it = p.into_iter();
            let tz = it.next().unwrap();
            let zz = it.next().unwrap();
            ControlSpec::tension_torsion(tz, zz, "tension-torsion")
        },
        &rc,
        &pso,
        &nm,
    )
    .map_err(sim_err)?;

    let opt_paths = if report.design.is_empty() {
        reference.clone()
    } else {
        ds.paths(&report.design).map_err(sim_err)?
    };
    let mut traces = Vec::with_capacity(cfg.n_steps + 1);
    for k in 0..=cfg.n_steps {
        let t = k as f64 / cfg.n_steps as f64;
        traces.push([
            t,
            reference[0].eval(t),
            reference[1].eval(t),
            report.reference.eta_trace[k],
            opt_paths[0].eval(t),
            opt_paths[1].eval(t),
            report.optimized.eta_trace[k],
        ]);
    }
    Ok((report, traces))
}

// ------------------------------------------------------------------- rotate

#[derive(Serialize)]
struct RotateRow {
    eta: f64,
    theta_bar: f64,
    eps_p_eq_proportional: Option<f64>,
    eps_p_eq_rotated: Option<f64>,
    rel_diff: Option<f64>,
    note: String,
}

#[derive(Serialize)]
struct RotateOut {
    config_hash: String,
    version: &'static str,
    model: &'static str,
    scenario: &'static str,
    threshold_xi_e: f64,
    max_abs_rel_diff: Option<f64>,
    rows: Vec<RotateRow>,
}

pub fn rotate(args: &CommonArgs) -> Result<(), CliError> {
    let (cfg, hash) = config::load(&args.config, &args.set)?;
    let r = match &cfg.scenario {
        Scenario::Rotated(r) => r,
        other => {
            return Err(CliError::Config(format!(
                "the rotate subcommand needs a rotated scenario, found '{}'",
                other.kind()
            )))
        }
    };
    if r.tests.is_empty() {
        return Err(CliError::Config("rotated scenario needs at least one test".into()));
    }
    let schedule = RotationSchedule::sine_bumps(r.alpha, r.beta, r.gamma);
    schedule.validate().map_err(cfg_err)?;
    init_threads(args.threads)?;

    let rows: Vec<RotateRow> = dispatch_model!(cfg, |m| {
        let model = &m;
        r.tests
            .par_iter()
            .map(|&[eta, tb]| rotate_test(model, cfg.n_steps, r, &schedule, eta, tb))
            .collect()
    });

    let model_tag = match cfg.model {
        config::ModelId::EccA => "ecc-a",
        config::ModelId::EccI => "ecc-i",
        config::ModelId::LemA => "lem-a",
        config::ModelId::LemI => "lem-i",
    };
    let max_abs = rows
        .iter()
        .filter_map(|x| x.rel_diff)
        .map(f64::abs)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    let mut csv = stamp(hash);
    csv.push_str("eta,theta_bar,eps_p_eq_proportional,eps_p_eq_rotated,rel_diff,note\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            num(row.eta),
            num(row.theta_bar),
            num(row.eps_p_eq_proportional.unwrap_or(f64::NAN)),
            num(row.eps_p_eq_rotated.unwrap_or(f64::NAN)),
            num(row.rel_diff.unwrap_or(f64::NAN)),
            row.note.replace([',', '\n'], ";"),
        ));
    }
    let out = RotateOut {
        config_hash: hash_hex(hash),
        version: output::VERSION,
        model: model_tag,
        scenario: "rotated",
        threshold_xi_e: r.threshold_xi_e,
        max_abs_rel_diff: max_abs,
        rows,
    };
    write_file(&args.out, "rotate.csv", &csv)?;
    write_file(&args.out, "report.json", &json_string(&out)?)
}

/// Calibrate a load family's amplitude so the final relative stiffness hits
/// the threshold exactly at t = 1, then return that run. An unreachable
/// threshold surfaces as [`cdm_core::Error::NoBracket`].
fn calibrated_run<M: Material<f64>, L: ControlLaw<f64>>(
    model: &M,
    n_steps: usize,
    cap: f64,
    thr: f64,
    make: impl Fn(f64) -> cdm_core::Result<L>,
) -> Result<SimulationRecord<f64>, cdm_core::Error> {
    let rc = run_cfg(n_steps, StopRule::RunToEnd, cap);
    let scale = amplitude_calibrate(
        |s| run_control(model, &make(s)?, &rc),
        ThresholdSpec::XiE(thr),
    )?;
    let rec = run_control(model, &make(scale)?, &rc)?;
    if rec.stop != StopReason::Completed {
        return Err(cdm_core::Error::InvalidState(format!(
            "calibrated run did not complete: {}",
            stop_reason_str(&rec.stop)
        )));
    }
    Ok(rec)
}

/// Equivalent plastic strain at the damage threshold for the proportional
/// path and the rotated-eigenvector path with the same invariants. Both
/// amplitudes are calibrated so the threshold lands at t = 1 — where the
/// Euler angles return to zero — and both results are read at the final row,
/// so the two paths share the time discretization and an identity schedule
/// gives a difference of exactly zero.
fn rotate_test<M: Material<f64>>(
    model: &M,
    n_steps: usize,
    r: &RotateCfg,
    schedule: &RotationSchedule<f64>,
    eta: f64,
    tb: f64,
) -> RotateRow {
    let flagged = |prop: Option<f64>, note: String| RotateRow {
        eta,
        theta_bar: tb,
        eps_p_eq_proportional: prop,
        eps_p_eq_rotated: None,
        rel_diff: None,
        note,
    };

    let ep_prop = match calibrated_run(model, n_steps, r.eps_p_eq_cap, r.threshold_xi_e, |s| {
        ProportionalControl::from_invariants(eta, tb, PathSpec::ramp(0.0, s * r.amplitude))
    }) {
        Ok(rec) => rec.last().eps_p_eq,
        Err(e) => return flagged(None, format!("proportional {e}")),
    };
    let ep_rot = match calibrated_run(model, n_steps, r.eps_p_eq_cap, r.threshold_xi_e, |s| {
        RotatedControl::from_invariants(
            eta,
            tb,
            PathSpec::ramp(0.0, s * r.amplitude),
            schedule.clone(),
        )
    }) {
        Ok(rec) => rec.last().eps_p_eq,
        Err(e) => return flagged(Some(ep_prop), format!("rotated {e}")),
    };

    RotateRow {
        eta,
        theta_bar: tb,
        eps_p_eq_proportional: Some(ep_prop),
        eps_p_eq_rotated: Some(ep_rot),
        rel_diff: Some((ep_rot - ep_prop) / ep_prop),
        note: "ok".into(),
    }
}
