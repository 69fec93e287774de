//! Output files: CSV time series and JSON reports. Every file starts with
//! (or contains) the config digest and the package version so runs can be
//! matched to their exact inputs. Floats print in shortest round-trip form.

use std::fmt::Write as _;
use std::path::Path;

use cdm_core::driver::{SimulationRecord, StopReason};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn stamp(hash: u64) -> String {
    format!("# config_hash={hash:016x} version={VERSION}\n")
}

pub fn hash_hex(hash: u64) -> String {
    format!("{hash:016x}")
}

/// Number formatting with round-trip guarantee (shortest representation
/// that parses back to the same f64; non-finite values as NaN/inf).
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt_num(v: Option<f64>) -> String {
    num(v.unwrap_or(f64::NAN))
}

pub fn stop_reason_str(stop: &StopReason) -> String {
    match stop {
        StopReason::Completed => "completed".into(),
        StopReason::Threshold => "threshold".into(),
        StopReason::FirstYield => "first-yield".into(),
        StopReason::NoFailure => "no-failure cap".into(),
        StopReason::Failed { what } => format!("failed: {what}"),
    }
}

pub const RUN_CSV_HEADER: &str = "t,eps11,eps22,eps33,eps12,eps13,eps23,\
sig11,sig22,sig33,sig12,sig13,sig23,eta,L,theta_bar,eps_p_eq,f_E,xi_E,\
diss_inc,damage_min_eig_b,damage_max_eig_D,D_hyd";

pub fn run_csv(rec: &SimulationRecord<f64>, hash: u64) -> String {
    let mut s = stamp(hash);
    s.push_str(RUN_CSV_HEADER);
    s.push('\n');
    for r in &rec.rows {
        let e = r.eps.components();
        let g = r.sigma.components();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            num(r.t),
            num(e[0]),
            num(e[1]),
            num(e[2]),
            num(e[3]),
            num(e[4]),
            num(e[5]),
            num(g[0]),
            num(g[1]),
            num(g[2]),
            num(g[3]),
            num(g[4]),
            num(g[5]),
            num(r.eta),
            num(r.lode),
            num(r.theta_bar),
            num(r.eps_p_eq),
            num(r.f_e),
            num(r.xi_e),
            num(r.diss_inc),
            opt_num(r.damage.min_eig_b),
            opt_num(r.damage.max_eig_d),
            opt_num(r.damage.d_hyd),
        );
    }
    s
}

pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Sim(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| CliError::Sim(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Pretty JSON with a trailing newline; non-finite floats become null.
pub fn json_string<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Sim(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}
