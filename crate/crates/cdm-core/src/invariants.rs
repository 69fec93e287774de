//! Stress invariants (triaxiality, Lode parameter, Lode angle parameter),
//! the equivalent plastic strain increment, and recovery of principal
//! stresses from prescribed invariants.

use crate::error::{Error, Result};
use crate::numerics::bisect;
use crate::scalar::Real;
use crate::tensor::{spectral, SymTensor2};

/// Invariants of a stress state with distinct extreme principal values.
#[derive(Clone, Copy, Debug)]
pub struct Invariants<T> {
    /// Stress triaxiality.
    pub eta: T,
    /// Lode parameter L in [-1, 1].
    pub lode: T,
    /// Lode angle parameter in [-1, 1].
    pub theta_bar: T,
    /// Principal stresses, descending.
    pub principals: [T; 3],
}

/// Relative tolerance below which a stress state counts as degenerate.
const DEGENERACY_TOL: f64 = 1e-12;

/// Triaxiality, Lode parameter and Lode angle parameter of a stress state.
///
/// Errors with [`Error::DegenerateStress`] when the deviator vanishes or the
/// extreme principal values coincide (relative to the stress magnitude).
pub fn stress_invariants<T: Real>(sigma: &SymTensor2<T>) -> Result<Invariants<T>> {
    let s = spectral(sigma);
    let [s1, s2, s3] = s.vals;
    let scale = sigma.norm();
    let tol = T::of(DEGENERACY_TOL) * scale;
    let dev_norm = sigma.dev().norm();
    if dev_norm <= tol {
        return Err(Error::DegenerateStress("zero deviator"));
    }
    if (s1 - s3).abs() <= tol {
        return Err(Error::DegenerateStress("equal extreme principal stresses"));
    }
    let d12 = s1 - s2;
    let d23 = s2 - s3;
    let d31 = s3 - s1;
    let eta = T::of(2.0).sqrt() / T::of(3.0) * (s1 + s2 + s3)
        / (d12 * d12 + d23 * d23 + d31 * d31).sqrt();
    let lode = (T::of(2.0) * s2 - s1 - s3) / (s1 - s3);
    Ok(Invariants {
        eta,
        lode,
        theta_bar: theta_bar_from_lode(lode),
        principals: s.vals,
    })
}

/// Lode angle parameter as a function of the Lode parameter.
pub fn theta_bar_from_lode<T: Real>(lode: T) -> T {
    let l2 = lode * lode;
    let arg = lode * (lode - T::of(3.0)) * (lode + T::of(3.0)) / (l2 + T::of(3.0)).powf(T::of(1.5));
    let arg = crate::scalar::clamp(arg, -T::one(), T::one());
    T::one() - T::of(2.0) / T::PI() * arg.acos()
}

/// Numeric inverse of [`theta_bar_from_lode`] on [-1, 1].
pub fn lode_from_theta_bar<T: Real>(theta_bar: T) -> Result<T> {
    if theta_bar < -T::one() || theta_bar > T::one() {
        return Err(Error::InvalidState(format!(
            "Lode angle parameter {} outside [-1, 1]",
            theta_bar.to_f64().unwrap_or(f64::NAN)
        )));
    }
    // theta_bar is monotone decreasing in L with range exactly [-1, 1]
    bisect(
        |l| Ok(theta_bar_from_lode(l) - theta_bar),
        -T::one(),
        T::one(),
        T::of(1e-14),
        "Lode parameter from Lode angle parameter",
    )
}

/// Equivalent plastic strain increment sqrt(2/3 de : de).
pub fn eq_plastic_increment<T: Real>(deps_p: &SymTensor2<T>) -> T {
    (T::of(2.0) / T::of(3.0) * deps_p.ddot(deps_p)).sqrt()
}

/// Lode parameter margin below which the closed-form inversion degenerates.
pub const LODE_DEGENERACY_TOL: f64 = 1e-6;

/// Result of [`principal_from_invariants`]: the completed principal triple,
/// the algebraic branch that validated, and whether the preferred branch had
/// to be abandoned for the other one.
#[derive(Clone, Copy, Debug)]
pub struct Inversion<T> {
    pub principals: [T; 3],
    /// Algebraic root branch actually returned (1 = '+', 2 = '-').
    pub branch: u8,
    /// True when the preferred branch failed validation and the other branch
    /// was returned instead.
    pub switched: bool,
}

/// Principal stresses (sigma2, sigma3) completing a prescribed sigma1 to the
/// requested triaxiality eta and Lode parameter L.
///
/// Derivation: the Lode relation fixes sigma3 = a sigma1 - b sigma2 with
/// a = (L+1)/(L-1), b = 2/(L-1), which makes all three principal differences
/// proportional to (sigma1 - sigma2). Squaring the triaxiality relation then
/// yields the quadratic A sigma2^2 + B sigma1 sigma2 + C sigma1^2 = 0 with
///
///   A = (L-3)^2 - e,  B = 4 L (L-3) + 2 e,  C = 4 L^2 - e,
///   e = 9 eta^2 (L^2 + 3).
///
/// A vanishes on a curve in the (eta, L) plane (e.g. |eta| = 2/3, L = -1)
/// where the equation degenerates to a linear one with a single root; that
/// case is handled exactly. Squaring admits a spurious branch (the mirrored
/// triaxiality), so every candidate is validated by recomputing the
/// invariants of diag(sigma1, sigma2, sigma3); a root only counts when it
/// reproduces the inputs within 1e-9. `prefer` (1 or 2) picks the branch to
/// try first; if it fails validation the other branch is returned with
/// `switched = true`.
///
/// Errors: [`Error::DegenerateInversion`] for |L - 1| <= 1e-6, a fully
/// degenerate quadratic, or a discriminant below -1e-12 (scaled);
/// [`Error::NoValidBranch`] when no root validates.
pub fn principal_from_invariants<T: Real>(
    sigma1: T,
    eta: T,
    lode: T,
    prefer: u8,
) -> Result<Inversion<T>> {
    if (lode - T::one()).abs() <= T::of(LODE_DEGENERACY_TOL) {
        return Err(Error::DegenerateInversion(
            "Lode parameter at the axisymmetric limit L = 1",
        ));
    }
    let one = T::one();
    let two = T::of(2.0);
    let three = T::of(3.0);
    let co_a = (lode + one) / (lode - one);
    let co_b = two / (lode - one);
    let l2 = lode * lode;
    let e = T::of(9.0) * eta * eta * (l2 + three);
    let qa = (lode - three) * (lode - three) - e;
    let qb = T::of(4.0) * lode * (lode - three) + two * e;
    let qc = T::of(4.0) * l2 - e;
    let mag = qa.abs().max(qb.abs()).max(qc.abs());
    if !(mag > T::zero()) {
        return Err(Error::DegenerateInversion("inversion equation vanishes"));
    }
    let no_branch = || Error::NoValidBranch {
        eta: eta.to_f64().unwrap_or(f64::NAN),
        lode: lode.to_f64().unwrap_or(f64::NAN),
    };
    // root candidates for sigma2 / sigma1, in branch order (+, -)
    let tiny = T::of(1e-13) * mag;
    let roots: [Option<T>; 2] = if qa.abs() > tiny {
        let mut disc = qb * qb - T::of(4.0) * qa * qc;
        let dscale = (qb * qb).abs().max((T::of(4.0) * qa * qc).abs()).max(one);
        if disc < T::zero() {
            if disc >= -T::of(1e-12) * dscale {
                disc = T::zero();
            } else {
                return Err(Error::DegenerateInversion("negative inversion discriminant"));
            }
        }
        let s = disc.sqrt();
        // cancellation-free forms for each sign
        let plus = if qb <= T::zero() {
            (-qb + s) / (two * qa)
        } else {
            two * qc / (-qb - s)
        };
        let minus = if qb >= T::zero() {
            (-qb - s) / (two * qa)
        } else {
            two * qc / (-qb + s)
        };
        [Some(plus), Some(minus)]
    } else if qb.abs() > tiny {
        // leading coefficient vanishes: single linear root
        [Some(-qc / qb), None]
    } else {
        return Err(Error::DegenerateInversion("inversion equation degenerate"));
    };
    let order: [usize; 2] = if prefer == 2 { [1, 0] } else { [0, 1] };
    let tol = T::of(1e-9);
    let mut tried_first = false;
    for (rank, &idx) in order.iter().enumerate() {
        let Some(r) = roots[idx] else {
            continue;
        };
        let s2 = r * sigma1;
        let s3 = co_a * sigma1 - co_b * s2;
        let candidate = SymTensor2::diag(sigma1, s2, s3);
        if let Ok(inv) = stress_invariants(&candidate) {
            let scale = one.max(eta.abs());
            if (inv.eta - eta).abs() <= tol * scale && (inv.lode - lode).abs() <= tol {
                return Ok(Inversion {
                    principals: [sigma1, s2, s3],
                    branch: idx as u8 + 1,
                    switched: rank > 0 && tried_first,
                });
            }
        }
        tried_first = true;
    }
    Err(no_branch())
}

/// Principal direction ray for prescribed (eta, theta_bar), normalized so the
/// largest-magnitude component is 1.
///
/// For rays with a positive first component this reproduces sigma1-driven
/// proportional loading exactly; it extends to states whose first principal
/// stress vanishes (e.g. uniaxial compression), where the generic inversion has
/// no sigma1 to scale. The axisymmetric limit theta_bar = -1 (L = 1) uses the
/// closed-form family (a, a, c) with c/a = (3 eta - 2)/(1 + 3 eta).
pub fn principal_ray<T: Real>(eta: T, theta_bar: T) -> Result<[T; 3]> {
    let lode = lode_from_theta_bar(theta_bar)?;
    let one = T::one();
    let three = T::of(3.0);
    let mut ray = if (lode - one).abs() <= T::of(LODE_DEGENERACY_TOL) {
        let denom = one + three * eta;
        if denom.abs() <= T::of(1e-9) {
            // uniaxial compression axis
            [T::zero(), T::zero(), -one]
        } else {
            [one + three * eta, one + three * eta, three * eta - T::of(2.0)]
        }
    } else {
        // states dominated by compression may only be realizable with a
        // negative first component
        let inv = match principal_from_invariants(one, eta, lode, 1) {
            Ok(inv) => inv,
            Err(Error::NoValidBranch { .. }) => principal_from_invariants(-one, eta, lode, 1)?,
            Err(e) => return Err(e),
        };
        inv.principals
    };
    ray.sort_by(|x, y| y.partial_cmp(x).unwrap_or(core::cmp::Ordering::Equal));
    let max_abs = ray.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if !(max_abs > T::zero()) {
        return Err(Error::DegenerateStress("zero principal ray"));
    }
    let scaled = [ray[0] / max_abs, ray[1] / max_abs, ray[2] / max_abs];
    // validate against the requested invariants
    let inv = stress_invariants(&SymTensor2::diag(scaled[0], scaled[1], scaled[2]))?;
    let tol = T::of(1e-7);
    if (inv.eta - eta).abs() > tol || (inv.theta_bar - theta_bar).abs() > tol {
        return Err(Error::NoValidBranch {
            eta: eta.to_f64().unwrap_or(f64::NAN),
            lode: lode.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(scaled)
}
