//! Configuration schema, `--set` overrides, and the config digest embedded
//! in every output file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use cdm_core::hash::fnv1a;
use cdm_core::model::{EccParams, LemParams};

use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    EccA,
    EccI,
    LemA,
    LemI,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelId,
    /// Time steps over the normalized interval [0, 1].
    #[serde(default = "d_steps")]
    pub n_steps: usize,
    /// Material parameter overrides by field name.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub scenario: Scenario,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    TensionTorsion(TensionTorsionCfg),
    Proportional(ProportionalCfg),
    EtaPath(EtaPathCfg),
    FractureSurface(SurfaceCfg),
    Optimize(OptimizeCfg),
    Rotated(RotateCfg),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::TensionTorsion(_) => "tension-torsion",
            Scenario::Proportional(_) => "proportional",
            Scenario::EtaPath(_) => "eta-path",
            Scenario::FractureSurface(_) => "fracture-surface",
            Scenario::Optimize(_) => "optimize",
            Scenario::Rotated(_) => "rotated",
        }
    }
}

/// Strain-driven thin-tube sequence: torsional strain ramps first, axial
/// strain second; transverse and remaining shear stresses held at zero.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensionTorsionCfg {
    #[serde(default = "d_eps_tz")]
    pub eps_tz: f64,
    #[serde(default = "d_eps_zz")]
    pub eps_zz: f64,
    /// Fraction of the time interval spent on the torsion ramp.
    #[serde(default = "d_half")]
    pub switch: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProportionalCfg {
    pub eta: f64,
    pub theta_bar: f64,
    /// Largest principal stress at t = 1, MPa (before calibration).
    pub amplitude: f64,
    /// Rescale the amplitude so the run ends exactly at a threshold.
    #[serde(default)]
    pub calibrate: Option<CalibrateCfg>,
    #[serde(default)]
    pub stop: Option<StopCfg>,
    #[serde(default = "d_cap")]
    pub eps_p_eq_cap: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaPathCfg {
    /// Bezier control values of the triaxiality history eta(t).
    pub control: Vec<f64>,
    /// Driving stress at t = 1, MPa (before calibration).
    pub amplitude: f64,
    #[serde(default)]
    pub calibrate: Option<CalibrateCfg>,
    #[serde(default)]
    pub stop: Option<StopCfg>,
    #[serde(default = "d_cap")]
    pub eps_p_eq_cap: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum CalibrateCfg {
    XiE(f64),
    EpsPEq(f64),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum StopCfg {
    XiE(f64),
    EpsPEq(f64),
    FirstYield,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceCfg {
    #[serde(default = "d_eta_min")]
    pub eta_min: f64,
    #[serde(default = "d_eta_max")]
    pub eta_max: f64,
    #[serde(default = "d_eta_count")]
    pub eta_count: usize,
    #[serde(default = "d_theta_min")]
    pub theta_min: f64,
    #[serde(default = "d_theta_max")]
    pub theta_max: f64,
    #[serde(default = "d_theta_count")]
    pub theta_count: usize,
    /// Relative-stiffness threshold defining the surface.
    #[serde(default = "d_threshold")]
    pub threshold_xi_e: f64,
    /// Largest principal stress at t = 1 per cell, MPa.
    #[serde(default = "d_surface_amplitude")]
    pub amplitude: f64,
    #[serde(default = "d_surface_cap")]
    pub eps_p_eq_cap: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeCfg {
    #[serde(default = "d_eps_tz")]
    pub eps_tz: f64,
    #[serde(default = "d_eps_zz")]
    pub eps_zz: f64,
    #[serde(default = "d_half")]
    pub switch: f64,
    /// Free interior Bezier control values per strain component.
    #[serde(default = "d_free")]
    pub free: usize,
    #[serde(default = "d_lo")]
    pub lo: f64,
    #[serde(default = "d_hi")]
    pub hi: f64,
    #[serde(default = "d_swarm")]
    pub swarm: usize,
    #[serde(default = "d_iterations")]
    pub iterations: usize,
    #[serde(default = "d_inertia")]
    pub inertia: f64,
    #[serde(default = "d_accel")]
    pub cognitive: f64,
    #[serde(default = "d_accel")]
    pub social: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_nm_iter")]
    pub nm_max_iter: usize,
    #[serde(default = "d_nm_scale")]
    pub nm_scale: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotateCfg {
    /// (eta, theta_bar) pairs; defaults to uniaxial tension, tension+shear,
    /// simple shear, and compression+shear.
    #[serde(default = "d_tests")]
    pub tests: Vec<[f64; 2]>,
    /// Euler-angle bump amplitudes in radians (zero at both endpoints).
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    #[serde(default = "d_beta")]
    pub beta: f64,
    #[serde(default = "d_gamma")]
    pub gamma: f64,
    #[serde(default = "d_threshold")]
    pub threshold_xi_e: f64,
    /// Largest principal stress at t = 1, MPa (before calibration).
    #[serde(default = "d_surface_amplitude")]
    pub amplitude: f64,
    #[serde(default = "d_cap")]
    pub eps_p_eq_cap: f64,
}

fn d_steps() -> usize {
    200
}
fn d_eps_tz() -> f64 {
    0.03
}
fn d_eps_zz() -> f64 {
    0.06
}
fn d_half() -> f64 {
    0.5
}
fn d_cap() -> f64 {
    1.0
}
fn d_eta_min() -> f64 {
    -2.0 / 3.0
}
fn d_eta_max() -> f64 {
    2.0 / 3.0
}
fn d_eta_count() -> usize {
    17
}
fn d_theta_min() -> f64 {
    -1.0
}
fn d_theta_max() -> f64 {
    1.0
}
fn d_theta_count() -> usize {
    13
}
fn d_threshold() -> f64 {
    0.8
}
fn d_surface_amplitude() -> f64 {
    1500.0
}
fn d_surface_cap() -> f64 {
    0.5
}
fn d_free() -> usize {
    4
}
fn d_lo() -> f64 {
    -0.05
}
fn d_hi() -> f64 {
    0.1
}
fn d_swarm() -> usize {
    32
}
fn d_iterations() -> usize {
    150
}
fn d_inertia() -> f64 {
    0.72
}
fn d_accel() -> f64 {
    1.49
}
fn d_nm_iter() -> usize {
    400
}
fn d_nm_scale() -> f64 {
    0.01
}
fn d_tests() -> Vec<[f64; 2]> {
    vec![
        [1.0 / 3.0, 1.0],
        [1.0 / 6.0, 0.506],
        [0.0, 0.0],
        [-1.0 / 6.0, -0.506],
    ]
}
fn d_alpha() -> f64 {
    0.4 * std::f64::consts::PI
}
fn d_beta() -> f64 {
    -0.3 * std::f64::consts::PI
}
fn d_gamma() -> f64 {
    0.2 * std::f64::consts::PI
}

/// Load a config file, apply `--set` overrides, and digest the effective
/// document. The digest covers the post-override configuration, so any
/// change to the effective inputs changes every output file's stamp.
pub fn load(path: &Path, sets: &[String]) -> Result<(ExperimentConfig, u64), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut value: toml::Value = text
        .parse()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    for s in sets {
        apply_set(&mut value, s)?;
    }
    let canonical = serde_json::to_string(&value)
        .map_err(|e| CliError::Config(format!("cannot canonicalize configuration: {e}")))?;
    let hash = fnv1a(canonical.as_bytes());
    let cfg: ExperimentConfig = value
        .try_into()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if cfg.n_steps == 0 {
        return Err(CliError::Config("n_steps must be positive".into()));
    }
    Ok((cfg, hash))
}

fn apply_set(root: &mut toml::Value, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=value, got '{spec}'")))?;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("--set path '{path}' has an empty segment")));
    }
    let (parents, leaf) = parts.split_at(parts.len() - 1);
    let mut cur = root;
    for part in parents {
        let table = cur.as_table_mut().ok_or_else(|| {
            CliError::Config(format!("--set path '{path}' descends into a non-table value"))
        })?;
        cur = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = cur.as_table_mut().ok_or_else(|| {
        CliError::Config(format!("--set path '{path}' descends into a non-table value"))
    })?;
    table.insert(leaf[0].to_string(), parse_scalar(raw));
    Ok(())
}

/// Interpret an override value as a TOML scalar, falling back to a string.
fn parse_scalar(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

pub fn ecc_params(
    base: EccParams<f64>,
    overrides: &BTreeMap<String, f64>,
) -> Result<EccParams<f64>, CliError> {
    let mut p = base;
    for (k, &v) in overrides {
        match k.as_str() {
            "lambda" => p.lambda = v,
            "mu" => p.mu = v,
            "tau_y" => p.tau_y = v,
            "h_a" => p.h_a = v,
            "b_a" => p.b_a = v,
            "h_i" => p.h_i = v,
            "delta_tau" => p.delta_tau = v,
            "kappa_u" => p.kappa_u = v,
            "c_i" => p.c_i = v,
            "c_a" => p.c_a = v,
            "m" => p.m = v,
            other => {
                return Err(CliError::Config(format!(
                    "unknown parameter '{other}' (valid: lambda, mu, tau_y, h_a, b_a, h_i, \
                     delta_tau, kappa_u, c_i, c_a, m)"
                )))
            }
        }
    }
    Ok(p)
}

pub fn lem_params(
    base: LemParams<f64>,
    overrides: &BTreeMap<String, f64>,
) -> Result<LemParams<f64>, CliError> {
    let mut p = base;
    for (k, &v) in overrides {
        match k.as_str() {
            "lambda" => p.lambda = v,
            "mu" => p.mu = v,
            "tau_y" => p.tau_y = v,
            "h_a" => p.h_a = v,
            "b_a" => p.b_a = v,
            "delta_tau" => p.delta_tau = v,
            "kappa_u" => p.kappa_u = v,
            "c" => p.c = v,
            "m" => p.m = v,
            "c_hat" => p.c_hat = v,
            "m_hat" => p.m_hat = v,
            other => {
                return Err(CliError::Config(format!(
                    "unknown parameter '{other}' (valid: lambda, mu, tau_y, h_a, b_a, delta_tau, \
                     kappa_u, c, m, c_hat, m_hat)"
                )))
            }
        }
    }
    Ok(p)
}

/// Instantiate the configured model and hand it to a generic continuation.
macro_rules! dispatch_model {
    ($cfg:expr, |$m:ident| $body:expr) => {{
        use cdm_core::model::{EccParams, LemParams, LemVariant};
        use cdm_core::{Ecc, Lem};
        match $cfg.model {
            $crate::config::ModelId::EccA => {
                let $m = Ecc {
                    params: $crate::config::ecc_params(EccParams::anisotropic(), &$cfg.params)?,
                };
                $body
            }
            $crate::config::ModelId::EccI => {
                let $m = Ecc {
                    params: $crate::config::ecc_params(EccParams::isotropic(), &$cfg.params)?,
                };
                $body
            }
            $crate::config::ModelId::LemA => {
                let $m = Lem {
                    params: $crate::config::lem_params(LemParams::reference(), &$cfg.params)?,
                    variant: LemVariant::Anisotropic,
                };
                $body
            }
            $crate::config::ModelId::LemI => {
                let $m = Lem {
                    params: $crate::config::lem_params(LemParams::reference(), &$cfg.params)?,
                    variant: LemVariant::Isotropic,
                };
                $body
            }
        }
    }};
}

pub(crate) use dispatch_model;
