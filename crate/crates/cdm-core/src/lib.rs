//! Material-point toolkit for anisotropic continuum damage mechanics.
//!
//! Two rate-independent small-strain models with tension/compression
//! asymmetry are implemented side by side: an effective-configuration model
//! whose damage variable is a symmetric positive-definite integrity tensor,
//! and a Lemaitre-type model with a symmetric damage tensor and effective
//! stresses. Each comes with an isotropic variant. Around the models sit a
//! load-path driver (mixed stress/strain component control and
//! stress-invariant control), stiffness-based damage measures, and a
//! derivative-free load-path optimizer (particle swarm plus Nelder-Mead).
//!
//! Everything is generic over the scalar type via [`scalar::Real`]; the
//! aliases at the crate root fix f64, which all shipped tolerances assume.

pub mod driver;
pub mod error;
pub mod hash;
pub mod invariants;
pub mod measures;
pub mod model;
pub mod numerics;
pub mod opt;
pub mod path;
pub mod scalar;
pub mod tensor;

pub use driver::{
    run_control, run_eta_path, run_proportional, run_rotated, ControlKind, ControlLaw,
    ControlSpec, RunConfig, SimulationRecord, StepRow, StopReason, StopRule,
};
pub use error::{Error, Result};
pub use model::{DamageMetrics, Ecc, Lem, LemVariant, Material};
pub use opt::{
    nelder_mead, optimize_load_path, pso_minimize, DesignComponent, DesignSpace, NmConfig,
    OptimizationReport, PsoConfig,
};
pub use path::{PathSpec, RotationSchedule};
pub use scalar::Real;

/// Symmetric second-order tensor at the default scalar.
pub type Tensor2 = tensor::SymTensor2<f64>;
/// Fourth-order tensor at the default scalar.
pub type Tensor4 = tensor::SymTensor4<f64>;
/// Positive/negative split configuration at the default scalar.
pub type Split = tensor::SplitConfig<f64>;
