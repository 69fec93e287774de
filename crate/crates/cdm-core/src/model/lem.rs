//! Damage-tensor elastoplasticity over effective stresses (strain
//! equivalence).
//!
//! A symmetric PSD damage tensor `D` (zero when virgin, eigenvalues bounded by
//! one) maps stresses to effective stresses through H = (I − D)^(−1/2).
//! Plasticity is von Mises-type in the effective relative stress with
//! Armstrong-Frederick kinematic and saturating isotropic hardening; damage
//! grows explicitly with the tensile part of the plastic flow, weighted by an
//! energy-release measure. The MCR split confines the damage weighting to
//! tensile stress modes.

use crate::error::{Error, Result};
use crate::invariants::eq_plastic_increment;
use crate::numerics::newton_solve;
use crate::scalar::Real;
use crate::tensor::{
    pn_split, spectral, Spectral, SplitConfig, SymTensor2, SymTensor4, EIGEN_GAP_TOL,
};

use super::{DamageMetrics, Material};

/// Parameters; moduli and stresses in MPa unless noted.
#[derive(Clone, Copy, Debug)]
pub struct LemParams<T> {
    pub lambda: T,
    pub mu: T,
    pub tau_y: T,
    /// Kinematic hardening modulus.
    pub h_a: T,
    /// Kinematic hardening saturation.
    pub b_a: T,
    /// Isotropic hardening saturation stress.
    pub delta_tau: T,
    /// Isotropic hardening saturation rate.
    pub kappa_u: T,
    /// Damage modulus of the directional variant, 1/MPa.
    pub c: T,
    /// Damage exponent of the directional variant.
    pub m: T,
    /// Damage modulus of the spherical variant, 1/MPa.
    pub c_hat: T,
    /// Damage exponent of the spherical variant.
    pub m_hat: T,
    pub split: SplitConfig<T>,
}

impl<T: Real> LemParams<T> {
    /// Calibrated dual-phase-steel set (both damage variants).
    pub fn reference() -> Self {
        Self {
            lambda: T::of(118875.0),
            mu: T::of(79250.0),
            tau_y: T::of(308.26),
            h_a: T::of(3774.25),
            b_a: T::of(175.55),
            delta_tau: T::of(1.1761e6),
            kappa_u: T::of(301.41),
            c: T::of(1256.7),
            m: T::of(0.2),
            c_hat: T::of(623.1),
            m_hat: T::of(0.2),
            split: SplitConfig::default(),
        }
    }

    /// Poisson ratio implied by the Lame pair.
    pub fn nu(&self) -> T {
        self.lambda / (T::of(2.0) * (self.lambda + self.mu))
    }

    /// Young modulus implied by the Lame pair.
    pub fn e_mod(&self) -> T {
        self.mu * (T::of(3.0) * self.lambda + T::of(2.0) * self.mu) / (self.lambda + self.mu)
    }
}

/// Damage evolution flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemVariant {
    /// Tensor-valued damage from the split plastic flow.
    Anisotropic,
    /// Spherical damage from the equivalent plastic increment.
    Isotropic,
}

/// Material state; all tensors share the fixed cartesian frame.
#[derive(Clone, Debug)]
pub struct LemState<T> {
    /// Total strain the state was committed at.
    pub eps: SymTensor2<T>,
    /// Stress the state was committed at.
    pub sigma: SymTensor2<T>,
    /// Plastic strain.
    pub eps_p: SymTensor2<T>,
    /// Kinematic hardening strain.
    pub a: SymTensor2<T>,
    /// Isotropic hardening variable (accumulated plastic multiplier).
    pub k: T,
    /// Damage tensor (PSD, zero when virgin).
    pub d: SymTensor2<T>,
    /// Accumulated equivalent plastic strain.
    pub eps_p_eq: T,
}

impl<T: Real> LemState<T> {
    pub fn virgin() -> Self {
        Self {
            eps: SymTensor2::zero(),
            sigma: SymTensor2::zero(),
            eps_p: SymTensor2::zero(),
            a: SymTensor2::zero(),
            k: T::zero(),
            d: SymTensor2::zero(),
            eps_p_eq: T::zero(),
        }
    }
}

/// Driving forces: back stress, drag stress, damage-conjugate force tensor,
/// and the scalar damage-weighting measure.
#[derive(Clone, Copy, Debug)]
pub struct LemForces<T> {
    pub alpha: SymTensor2<T>,
    pub kappa: T,
    /// Energy-release conjugate of the damage tensor (negative semidefinite).
    pub y: SymTensor2<T>,
    /// Non-negative scalar damage weight.
    pub y_bar: T,
}

/// Integrity weighting of a damage tensor: spectral data of I − D and
/// H = (I − D)^(−1/2); errors once any damage eigenvalue reaches its cap.
fn integrity<T: Real>(d: &SymTensor2<T>) -> Result<(Spectral<T>, SymTensor2<T>)> {
    let ad = SymTensor2::identity().sub(d);
    let sp = spectral(&ad);
    if sp.vals[2] <= T::of(1e-6) {
        return Err(Error::FullyDamaged {
            max_eig: (T::one() - sp.vals[2]).to_f64().unwrap_or(f64::NAN),
        });
    }
    let h = sp.map(|x| x.sqrt().recip());
    Ok((sp, h))
}

/// Elastic strain for a stress, given precomputed H and volumetric damage.
fn elastic_strain_h<T: Real>(
    sigma: &SymTensor2<T>,
    h: &SymTensor2<T>,
    d_hyd: T,
    p: &LemParams<T>,
) -> SymTensor2<T> {
    let nu = p.nu();
    let e = p.e_mod();
    let sdev = sigma.dev();
    let (sp_, sm) = pn_split(&sdev, &p.split);
    let dev_part = h
        .sandwich(&sp_)
        .add(&sm)
        .dev()
        .scale((T::one() + nu) / e);
    let sh = sigma.hyd();
    let hyd = (T::one() - T::of(2.0) * nu) / e
        * (sh.max(T::zero()) / (T::one() - d_hyd) - (-sh).max(T::zero()));
    dev_part.add(&SymTensor2::identity().scale(hyd))
}

/// Elastic strain response of a stress at the state's damage.
pub fn lem_elastic_strain<T: Real>(
    sigma: &SymTensor2<T>,
    state: &LemState<T>,
    p: &LemParams<T>,
) -> Result<SymTensor2<T>> {
    let (_, h) = integrity(&state.d)?;
    Ok(elastic_strain_h(sigma, &h, state.d.hyd(), p))
}

/// Driving forces at a stress and the internal variables of `state`.
pub fn lem_forces<T: Real>(
    sigma: &SymTensor2<T>,
    state: &LemState<T>,
    p: &LemParams<T>,
) -> Result<LemForces<T>> {
    let (sp_ad, h) = integrity(&state.d)?;
    let nu = p.nu();
    let e = p.e_mod();
    let d_hyd = state.d.hyd();
    let one = T::one();
    let two = T::of(2.0);

    let alpha = state.a.scale(two / T::of(3.0) * p.h_a);
    let kappa = p.delta_tau * (one - (-state.k / p.kappa_u).exp());

    let sdev = sigma.dev();
    let (splus, _) = pn_split(&sdev, &p.split);
    let core = h.sandwich(&splus);
    let sh = sigma.hyd();
    let sh_plus = sh.max(T::zero());
    let hyd_factor = sh_plus / (one - d_hyd);
    let y_bar = (one + nu) / (two * e) * core.ddot(&core)
        + T::of(3.0) * (one - two * nu) / (two * e) * hyd_factor * hyd_factor;

    // chain rule of H = f(I − D): the derivative in D carries a sign flip
    let ad = SymTensor2::identity().sub(&state.d);
    let gap = T::of(EIGEN_GAP_TOL) * T::one().max(ad.norm());
    let df = sp_ad.function_derivative(
        |x| x.sqrt().recip(),
        |x| -T::of(0.5) * x.powf(T::of(-1.5)),
        gap,
    );
    let t_mid = splus.sandwich(&h);
    let y = df
        .ddot_t2(&t_mid)
        .scale((one + two * nu) / e)
        .sub(&SymTensor2::identity().scale(
            (one - two * nu) / (T::of(6.0) * e) * hyd_factor * hyd_factor,
        ));

    Ok(LemForces {
        alpha,
        kappa,
        y,
        y_bar,
    })
}

/// Yield function value at a stress and state.
pub fn lem_yield<T: Real>(sigma: &SymTensor2<T>, state: &LemState<T>, p: &LemParams<T>) -> Result<T> {
    let (_, h) = integrity(&state.d)?;
    let alpha = state.a.scale(T::of(2.0) / T::of(3.0) * p.h_a);
    let kappa = p.delta_tau * (T::one() - (-state.k / p.kappa_u).exp());
    let tau = h.sandwich(&sigma.dev()).sub(&alpha);
    Ok((T::of(1.5) * tau.ddot(&tau)).sqrt() - p.tau_y - kappa)
}

/// Degraded elastic compliance for a damage tensor.
pub fn lem_compliance<T: Real>(d: &SymTensor2<T>, p: &LemParams<T>) -> Result<SymTensor4<T>> {
    let (sp_ad, h) = integrity(d)?;
    let nu = p.nu();
    let e = p.e_mod();
    let one = T::one();
    let third = one / T::of(3.0);
    let d_hyd = d.hyd();
    let h2 = sp_ad.map(|x| x.recip());
    let tr_h2 = h2.trace();
    let id = SymTensor2::identity();
    let hyd_diag = (one + nu) / (T::of(9.0) * e) * (tr_h2 + T::of(3.0) / (one - d_hyd))
        - nu / (e * (one - d_hyd));
    Ok(SymTensor4::symprod(&h, &h)
        .scale((one + nu) / e)
        .add(&SymTensor4::dyad(&id, &h2).scale(-(one + nu) * third / e))
        .add(&SymTensor4::dyad(&h2, &id).scale(-(one + nu) * third / e))
        .add(&SymTensor4::dyad(&id, &id).scale(hyd_diag)))
}

const Z_DIM: usize = 13;

/// One backward-Euler step to `eps_target` without substepping.
fn lem_substep<T: Real>(
    state: &LemState<T>,
    eps_target: &SymTensor2<T>,
    p: &LemParams<T>,
    variant: LemVariant,
) -> Result<(SymTensor2<T>, LemState<T>)> {
    let (_, h) = integrity(&state.d)?;
    let d_hyd = state.d.hyd();
    let tol_yield = T::of(1e-11) * p.tau_y;
    let s_e = eps_target.sub(&state.eps).norm().max(T::of(1e-4));

    // elastic predictor: recover the stress for the frozen plastic strain
    let mut sig = state.sigma.components();
    {
        let mut residual = |x: &[T]| -> Result<Vec<T>> {
            let mut c = [T::zero(); 6];
            c.copy_from_slice(x);
            let sigma = SymTensor2::from_components(c);
            let r = elastic_strain_h(&sigma, &h, d_hyd, p)
                .add(&state.eps_p)
                .sub(eps_target);
            Ok(r.components().to_vec())
        };
        newton_solve(
            &mut sig,
            &mut residual,
            &[s_e; 6],
            &[p.tau_y; 6],
            &super::local_newton_cfg(),
            "elastic stress recovery",
        )?;
    }
    let sigma_trial = SymTensor2::from_components(sig);
    let phi_trial = lem_yield(&sigma_trial, state, p)?;
    if phi_trial <= tol_yield {
        let mut new = state.clone();
        new.eps = *eps_target;
        new.sigma = sigma_trial;
        return Ok((sigma_trial, new));
    }

    // plastic corrector: stress, multiplier, kinematic strain
    let two_thirds_ha = T::of(2.0) / T::of(3.0) * p.h_a;
    let kappa_at = |k: T| p.delta_tau * (T::one() - (-k / p.kappa_u).exp());
    let flow = |sigma: &SymTensor2<T>, a: &SymTensor2<T>| {
        let tau = h.sandwich(&sigma.dev()).sub(&a.scale(two_thirds_ha));
        let teq = (T::of(1.5) * tau.ddot(&tau)).sqrt();
        let n = tau.scale(T::of(1.5) / teq.max(T::of(1e-10) * p.tau_y));
        (teq, n)
    };

    let mut z = [T::zero(); Z_DIM];
    z[0..6].copy_from_slice(&sigma_trial.components());
    z[7..13].copy_from_slice(&state.a.components());
    let mut scales = [s_e; Z_DIM];
    scales[6] = p.tau_y;
    let mut x_scales = [s_e; Z_DIM];
    for s in x_scales[0..6].iter_mut() {
        *s = p.tau_y;
    }

    let mut residual = |zc: &[T]| -> Result<Vec<T>> {
        let mut c6 = [T::zero(); 6];
        c6.copy_from_slice(&zc[0..6]);
        let sigma = SymTensor2::from_components(c6);
        let dlam = zc[6];
        c6.copy_from_slice(&zc[7..13]);
        let a = SymTensor2::from_components(c6);

        let (teq, n) = flow(&sigma, &a);
        let deps_p = h.sandwich(&n).dev().scale(dlam);
        let r_eps = elastic_strain_h(&sigma, &h, d_hyd, p)
            .add(&state.eps_p)
            .add(&deps_p)
            .sub(eps_target);
        let r_phi = teq - p.tau_y - kappa_at(state.k + dlam);
        let r_a = a
            .sub(&state.a)
            .sub(&n.sub(&a.scale(p.b_a)).scale(dlam));
        let mut r = vec![T::zero(); Z_DIM];
        r[0..6].copy_from_slice(&r_eps.components());
        r[6] = r_phi;
        r[7..13].copy_from_slice(&r_a.components());
        Ok(r)
    };

    newton_solve(
        &mut z,
        &mut residual,
        &scales,
        &x_scales,
        &super::local_newton_cfg(),
        "effective-stress return mapping",
    )?;

    let mut c6 = [T::zero(); 6];
    c6.copy_from_slice(&z[0..6]);
    let sigma = SymTensor2::from_components(c6);
    let dlam = z[6];
    c6.copy_from_slice(&z[7..13]);
    let a = SymTensor2::from_components(c6);
    // noise-scale negatives occur for steps barely past the yield surface
    if dlam < -T::of(1e-12) {
        return Err(Error::NoConvergence {
            what: "effective-stress return mapping",
            iterations: 0,
            residual: dlam.to_f64().unwrap_or(f64::NAN),
        });
    }
    let dlam = dlam.max(T::zero());

    let (_, n) = flow(&sigma, &a);
    let deps_p = h.sandwich(&n).dev().scale(dlam);

    // staggered damage: explicit increment from the converged plastic state
    let mut probe = state.clone();
    probe.k = state.k + dlam;
    let y_bar = lem_forces(&sigma, &probe, p)?.y_bar;
    let d_inc = match variant {
        LemVariant::Anisotropic => {
            let (dp, dm) = pn_split(&deps_p, &p.split);
            dp.sub(&dm).scale((p.c * y_bar).powf(p.m))
        }
        LemVariant::Isotropic => SymTensor2::identity()
            .scale((p.c_hat * y_bar).powf(p.m_hat) * eq_plastic_increment(&deps_p)),
    };
    let d_new = state.d.add(&d_inc);
    let max_eig = spectral(&d_new).vals[0];
    if max_eig > T::one() - T::of(1e-6) {
        return Err(Error::FullyDamaged {
            max_eig: max_eig.to_f64().unwrap_or(f64::NAN),
        });
    }

    let new = LemState {
        eps: *eps_target,
        sigma,
        eps_p: state.eps_p.add(&deps_p),
        a,
        k: state.k + dlam,
        d: d_new,
        eps_p_eq: state.eps_p_eq + eq_plastic_increment(&deps_p),
    };
    Ok((sigma, new))
}

/// Strain-driven update with bisection substepping on local-solver failure.
pub fn lem_update<T: Real>(
    state: &LemState<T>,
    eps_new: &SymTensor2<T>,
    p: &LemParams<T>,
    variant: LemVariant,
) -> Result<(SymTensor2<T>, LemState<T>)> {
    super::drive_substeps(&state.eps, eps_new, state, |cur, target| {
        lem_substep(cur, target, p, variant)
    })
}

/// The model as a [`Material`].
#[derive(Clone, Copy, Debug)]
pub struct Lem<T> {
    pub params: LemParams<T>,
    pub variant: LemVariant,
}

impl<T: Real> Lem<T> {
    pub fn anisotropic() -> Self {
        Self {
            params: LemParams::reference(),
            variant: LemVariant::Anisotropic,
        }
    }

    pub fn isotropic() -> Self {
        Self {
            params: LemParams::reference(),
            variant: LemVariant::Isotropic,
        }
    }
}

impl<T: Real> Material<T> for Lem<T> {
    type State = LemState<T>;

    fn virgin(&self) -> LemState<T> {
        LemState::virgin()
    }

    fn update(&self, state: &LemState<T>, eps_new: &SymTensor2<T>) -> Result<(SymTensor2<T>, LemState<T>)> {
        lem_update(state, eps_new, &self.params, self.variant)
    }

    fn stiffness(&self, state: &LemState<T>) -> Result<SymTensor4<T>> {
        lem_compliance(&state.d, &self.params)?.invert4()
    }

    fn eq_plastic(&self, state: &LemState<T>) -> T {
        state.eps_p_eq
    }

    fn dissipation_increment(&self, old: &LemState<T>, new: &LemState<T>) -> Result<T> {
        let f = lem_forces(&new.sigma, new, &self.params)?;
        Ok(new.sigma.ddot(&new.eps_p.sub(&old.eps_p))
            - f.y.ddot(&new.d.sub(&old.d))
            - f.alpha.ddot(&new.a.sub(&old.a))
            - f.kappa * (new.k - old.k))
    }

    fn damage(&self, state: &LemState<T>) -> DamageMetrics<T> {
        DamageMetrics {
            min_eig_b: None,
            max_eig_d: Some(spectral(&state.d).vals[0]),
            d_hyd: Some(state.d.hyd()),
        }
    }

    fn tag(&self) -> &'static str {
        match self.variant {
            LemVariant::Anisotropic => "lem-a",
            LemVariant::Isotropic => "lem-i",
        }
    }

    fn fingerprint(&self) -> u64 {
        crate::hash::fnv1a(format!("{} {:?}", self.tag(), self.params).as_bytes())
    }
}
