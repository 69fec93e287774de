//! Positive/negative spectral split with a regularized Heaviside weight.
//!
//! The positive part of a symmetric tensor is sum_i H(l_i) l_i N_i (x) N_i
//! with H a C1 ramp from g0 to 1 over [x0, x0 + xr] (cubic smoothstep), the
//! negative part is the remainder. The split and its derivative drive the
//! microcrack closure-reopening behavior of both damage models.

use super::spectral::{spectral, Spectral, EIGEN_GAP_TOL};
use super::sym2::SymTensor2;
use super::sym4::SymTensor4;
use crate::scalar::Real;

/// Parameters of the regularized Heaviside ramp.
#[derive(Clone, Copy, Debug)]
pub struct SplitConfig<T> {
    /// Value for arguments left of the ramp.
    pub g0: T,
    /// Ramp start.
    pub x0: T,
    /// Ramp width (must be positive).
    pub xr: T,
}

impl<T: Real> Default for SplitConfig<T> {
    fn default() -> Self {
        Self {
            g0: T::zero(),
            x0: T::zero(),
            xr: T::of(1e-6),
        }
    }
}

impl<T: Real> SplitConfig<T> {
    /// Regularized Heaviside: g0 below x0, 1 above x0 + xr, cubic smoothstep in
    /// between (C1 at both ends).
    pub fn h_reg(&self, x: T) -> T {
        if x <= self.x0 {
            self.g0
        } else if x >= self.x0 + self.xr {
            T::one()
        } else {
            let s = (x - self.x0) / self.xr;
            let ramp = s * s * (T::of(3.0) - T::of(2.0) * s);
            self.g0 + (T::one() - self.g0) * ramp
        }
    }

    fn h_reg_prime(&self, x: T) -> T {
        if x <= self.x0 || x >= self.x0 + self.xr {
            T::zero()
        } else {
            let s = (x - self.x0) / self.xr;
            (T::one() - self.g0) * T::of(6.0) * s * (T::one() - s) / self.xr
        }
    }

    /// Weighted ramp f(x) = H(x) * x whose spectral application gives the
    /// positive part.
    pub fn f(&self, x: T) -> T {
        self.h_reg(x) * x
    }

    /// Derivative of f.
    pub fn df(&self, x: T) -> T {
        self.h_reg_prime(x) * x + self.h_reg(x)
    }
}

/// Positive/negative split (plus, minus) with plus + minus = a exactly.
pub fn pn_split<T: Real>(a: &SymTensor2<T>, cfg: &SplitConfig<T>) -> (SymTensor2<T>, SymTensor2<T>) {
    pn_split_with(a, &spectral(a), cfg)
}

/// Split reusing a precomputed eigendecomposition of `a`.
pub fn pn_split_with<T: Real>(
    a: &SymTensor2<T>,
    s: &Spectral<T>,
    cfg: &SplitConfig<T>,
) -> (SymTensor2<T>, SymTensor2<T>) {
    let plus = s.map(|x| cfg.f(x));
    let minus = a.sub(&plus);
    (plus, minus)
}

/// Derivative of the positive part with respect to the argument.
///
/// The derivative of the negative part is I_sym minus this.
pub fn pn_split_derivative<T: Real>(a: &SymTensor2<T>, cfg: &SplitConfig<T>) -> SymTensor4<T> {
    pn_split_derivative_with(a, &spectral(a), cfg)
}

/// Split derivative reusing a precomputed eigendecomposition of `a`.
pub fn pn_split_derivative_with<T: Real>(
    a: &SymTensor2<T>,
    s: &Spectral<T>,
    cfg: &SplitConfig<T>,
) -> SymTensor4<T> {
    let gap = T::of(EIGEN_GAP_TOL) * T::one().max(a.norm());
    s.function_derivative(|x| cfg.f(x), |x| cfg.df(x), gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type S2 = SymTensor2<f64>;
    type S4 = SymTensor4<f64>;

    fn cfg() -> SplitConfig<f64> {
        SplitConfig::default()
    }

    #[test]
    fn mixed_diagonal_splits_exactly() {
        let (p, n) = pn_split(&S2::diag(1.0, -1.0, 0.0), &cfg());
        assert!(p.sub(&S2::diag(1.0, 0.0, 0.0)).norm() < 1e-12);
        assert!(n.sub(&S2::diag(0.0, -1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn negative_definite_has_zero_positive_part() {
        let a = S2::diag(-0.5, -1.0, -2.0);
        let (p, n) = pn_split(&a, &cfg());
        assert!(p.norm() < 1e-15);
        assert!(n.sub(&a).norm() < 1e-15);
    }

    #[test]
    fn ramp_midpoint_weight_is_half() {
        // eigenvalue in the middle of the ramp: H = 1/2, positive part = x/2
        let x = 0.5e-6;
        let (p, _) = pn_split(&S2::diag(x, -1.0, -2.0), &cfg());
        assert_relative_eq!(p.get(0, 0), 2.5e-7, max_relative = 1e-12);
    }

    #[test]
    fn split_is_additive() {
        let a = S2::from_components([0.6, -0.9, 0.2, 0.33, -0.41, 0.05]);
        let (p, n) = pn_split(&a, &cfg());
        assert!(p.add(&n).sub(&a).norm() < 1e-14 * a.norm());
    }

    #[test]
    fn derivative_of_strongly_positive_tensor_is_identity() {
        let d = pn_split_derivative(&S2::diag(3.0, 2.0, 1.0), &cfg());
        assert!(d.sub(&S4::identity_sym()).frobenius4() < 1e-12);
    }

    #[test]
    fn derivative_of_strongly_negative_tensor_is_zero() {
        let d = pn_split_derivative(&S2::diag(-3.0, -2.0, -1.0), &cfg());
        assert!(d.frobenius4() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let a = S2::from_components([2.0, 1.0, -1.0, 0.3, -0.2, 0.15]);
        let c = cfg();
        let d = pn_split_derivative(&a, &c);
        let h = 1e-7;
        for slot in 0..6 {
            let mut ap = a;
            let mut am = a;
            let mut comps_p = ap.components();
            let mut comps_m = am.components();
            comps_p[slot] += h;
            comps_m[slot] -= h;
            ap = S2::from_components(comps_p);
            am = S2::from_components(comps_m);
            let (pp, _) = pn_split(&ap, &c);
            let (pm, _) = pn_split(&am, &c);
            let fd = pp.sub(&pm).scale(0.5 / h);
            // directional derivative along the slot basis tensor (off-diagonal
            // slots move both mirror components together)
            let mut dir = S2::zero();
            let mut comps = dir.components();
            comps[slot] = 1.0;
            dir = S2::from_components(comps);
            let applied = d.ddot_t2(&dir);
            assert!(
                applied.sub(&fd).norm() <= 1e-6 * (1.0 + fd.norm()),
                "slot {slot}: {:?} vs {:?}",
                applied.components(),
                fd.components()
            );
        }
    }

    #[test]
    fn derivative_is_major_symmetric() {
        let a = S2::from_components([2.0, 1.0, -1.0, 0.3, -0.2, 0.15]);
        let d = pn_split_derivative(&a, &cfg());
        assert!(d.major_asymmetry() < 1e-13);
    }
}
