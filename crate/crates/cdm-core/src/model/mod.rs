//! Constitutive models: anisotropic damage-plasticity in two flavors, behind a
//! common strain-driven update interface.
//!
//! Both models are rate-independent small-strain elastoplastic damage models
//! with a microcrack closure-reopening (MCR) split, each with an anisotropic
//! and an isotropic damage variant. `ecc` degrades the stiffness through an
//! integrity tensor (strain-energy equivalence), `lem` through a damage tensor
//! acting on effective stresses (strain equivalence).

pub mod ecc;
pub mod lem;

pub use ecc::{ecc_stiffness, Ecc, EccForces, EccParams, EccState};
pub use lem::{lem_compliance, Lem, LemForces, LemParams, LemState, LemVariant};

use crate::error::{Error, Result};
use crate::numerics::NewtonConfig;
use crate::scalar::Real;
use crate::tensor::{SymTensor2, SymTensor4};

/// Newton settings of the local material solves. Tighter than the general
/// default so that stress noise fed to outer mixed-control iterations stays
/// well below their 1e-8 MPa tolerance.
pub(crate) fn local_newton_cfg<T: Real>() -> NewtonConfig<T> {
    NewtonConfig {
        tol: T::of(1e-12),
        max_iter: 60,
        fd_step: T::of(1e-7),
    }
}

/// Walk a strain increment with bisection substepping: on a recoverable local
/// failure the pending segment is halved, down to 1/1024 of the increment.
pub(crate) fn drive_substeps<T: Real, S: Clone>(
    eps_old: &SymTensor2<T>,
    eps_new: &SymTensor2<T>,
    init: &S,
    mut substep: impl FnMut(&S, &SymTensor2<T>) -> Result<(SymTensor2<T>, S)>,
) -> Result<(SymTensor2<T>, S)> {
    let delta = eps_new.sub(eps_old);
    let min_width = T::of(1.0 / 1024.0);
    let half = T::of(0.5);
    let mut cur = init.clone();
    let mut sigma = SymTensor2::zero();
    let mut s_cur = T::zero();
    let mut stack = vec![T::one()];
    while let Some(&s_top) = stack.last() {
        let target = eps_old.add(&delta.scale(s_top));
        match substep(&cur, &target) {
            Ok((s, next)) => {
                cur = next;
                sigma = s;
                s_cur = s_top;
                stack.pop();
            }
            Err(e @ (Error::NoConvergence { .. } | Error::SingularTensor)) => {
                if s_top - s_cur < min_width {
                    return Err(e);
                }
                stack.push(half * (s_cur + s_top));
            }
            Err(e) => return Err(e),
        }
    }
    Ok((sigma, cur))
}

/// Per-state damage indicators; fields not tracked by a model are `None`.
#[derive(Clone, Copy, Debug)]
pub struct DamageMetrics<T> {
    /// Smallest integrity eigenvalue (1 = virgin, toward 0 with damage).
    pub min_eig_b: Option<T>,
    /// Largest damage eigenvalue (0 = virgin, toward 1 with damage).
    pub max_eig_d: Option<T>,
    /// Volumetric damage tr(D)/3.
    pub d_hyd: Option<T>,
}

/// Strain-driven material point: pure-value state, update by total strain.
pub trait Material<T: Real>: Sync {
    type State: Clone + core::fmt::Debug + Send + Sync;

    /// Undamaged, unloaded initial state.
    fn virgin(&self) -> Self::State;

    /// Advance the state to a new total strain; returns the stress and the
    /// committed new state. The old state is untouched, so rejected trials
    /// (e.g. inside an outer iteration) cost nothing.
    fn update(&self, state: &Self::State, eps_new: &SymTensor2<T>) -> Result<(SymTensor2<T>, Self::State)>;

    /// Degraded elastic stiffness at the given state.
    fn stiffness(&self, state: &Self::State) -> Result<SymTensor4<T>>;

    /// Accumulated equivalent plastic strain.
    fn eq_plastic(&self, state: &Self::State) -> T;

    /// Reduced dissipation increment between two consecutive states
    /// (end-of-step forces times internal-variable increments).
    fn dissipation_increment(&self, old: &Self::State, new: &Self::State) -> Result<T>;

    /// Damage indicators of the state.
    fn damage(&self, state: &Self::State) -> DamageMetrics<T>;

    /// Short model identifier ("ecc-a", "ecc-i", "lem-a", "lem-i").
    fn tag(&self) -> &'static str;

    /// Digest of the parameter set, for output reproducibility metadata.
    fn fingerprint(&self) -> u64;
}
