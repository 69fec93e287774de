//! Small dense numerics shared by the local material solves and the driver:
//! Gaussian elimination, a damped Newton iteration with finite-difference
//! Jacobian, and scalar root bracketing/bisection.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solve a dense linear system in place. `a` is row-major n x n, consumed.
pub fn solve_linear<T: Real>(a: &mut [T], b: &mut [T]) -> Result<()> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if !(best > T::zero()) || !best.is_finite() {
            return Err(Error::SingularTensor);
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in (col + 1)..n {
            let f = a[row * n + col] / d;
            if f != T::zero() {
                for j in col..n {
                    let v = a[col * n + j];
                    a[row * n + j] = a[row * n + j] - f * v;
                }
                b[row] = b[row] - f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for j in (col + 1)..n {
            s = s - a[col * n + j] * b[j];
        }
        b[col] = s / a[col * n + col];
    }
    Ok(())
}

/// Settings for [`newton_solve`].
#[derive(Clone, Copy, Debug)]
pub struct NewtonConfig<T> {
    /// Convergence when the scaled residual norm falls below this.
    pub tol: T,
    pub max_iter: usize,
    /// Relative finite-difference step for the Jacobian.
    pub fd_step: T,
}

impl<T: Real> Default for NewtonConfig<T> {
    fn default() -> Self {
        Self {
            tol: T::of(1e-10),
            max_iter: 50,
            fd_step: T::of(1e-7),
        }
    }
}

/// Damped Newton iteration with finite-difference Jacobian.
///
/// `residual` maps the unknown vector to a residual of the same length;
/// `scales[i]` is the typical magnitude of residual component i (the
/// convergence test uses max_i |r_i| / scales_i <= tol, a relative measure).
/// `x_scales[i]` sets the finite-difference step for unknown i. Halving line
/// search (up to 8 cuts) accepts steps that do not increase the scaled
/// residual norm.
///
/// The Jacobian is reused across iterations (chord variant) while progress
/// stays fast, and recomputed at the current iterate when the residual drops
/// by less than a quarter, the line search stalls, or the factorization
/// fails; failure is declared only with a freshly computed Jacobian. Residual
/// evaluations that error during the line search count as rejected steps.
pub fn newton_solve<T: Real>(
    x: &mut [T],
    residual: &mut dyn FnMut(&[T]) -> Result<Vec<T>>,
    scales: &[T],
    x_scales: &[T],
    cfg: &NewtonConfig<T>,
    what: &'static str,
) -> Result<usize> {
    let n = x.len();
    let norm = |r: &[T]| -> T {
        r.iter()
            .zip(scales.iter())
            .fold(T::zero(), |m, (v, s)| m.max(v.abs() / *s))
    };
    let fail = |iterations: usize, rn: T| Error::NoConvergence {
        what,
        iterations,
        residual: rn.to_f64().unwrap_or(f64::NAN),
    };
    let mut r = residual(x)?;
    let mut rn = norm(&r);
    let mut jac = vec![T::zero(); n * n];
    let mut jac_fresh = false; // Jacobian evaluated at the current iterate
    let mut need_jac = true;
    for iter in 0..cfg.max_iter {
        if rn <= cfg.tol {
            return Ok(iter);
        }
        if need_jac {
            for j in 0..n {
                let h = cfg.fd_step * x_scales[j].max(x[j].abs());
                let mut xp = x.to_vec();
                xp[j] += h;
                let rp = residual(&xp)?;
                for i in 0..n {
                    jac[i * n + j] = (rp[i] - r[i]) / h;
                }
            }
            jac_fresh = true;
            need_jac = false;
        }
        let mut lu = jac.clone();
        let mut dx = r.clone();
        if solve_linear(&mut lu, &mut dx).is_err() {
            if jac_fresh {
                return Err(fail(iter + 1, rn));
            }
            need_jac = true;
            continue;
        }
        let mut accepted = false;
        let mut step = T::one();
        for _cut in 0..8 {
            let mut xt = x.to_vec();
            for i in 0..n {
                xt[i] = xt[i] - step * dx[i];
            }
            match residual(&xt) {
                Ok(rt) => {
                    let rtn = norm(&rt);
                    if rtn.is_finite() && (rtn < rn || rtn <= cfg.tol) {
                        // refresh when the residual shrank by less than a quarter
                        need_jac = rtn > T::of(0.25) * rn;
                        x.copy_from_slice(&xt);
                        r = rt;
                        rn = rtn;
                        accepted = true;
                        break;
                    }
                }
                Err(_) => {}
            }
            step = step * T::of(0.5);
        }
        if accepted {
            jac_fresh = false;
        } else {
            if jac_fresh {
                return Err(fail(iter + 1, rn));
            }
            need_jac = true;
        }
    }
    if rn <= cfg.tol {
        Ok(cfg.max_iter)
    } else {
        Err(fail(cfg.max_iter, rn))
    }
}

/// Bisection for a root of `f` on [lo, hi]; requires a sign change.
pub fn bisect<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    mut lo: T,
    mut hi: T,
    tol_x: T,
    what: &'static str,
) -> Result<T> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo * fhi > T::zero() {
        return Err(Error::NoBracket {
            what,
            target: 0.0,
        });
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::of(0.5);
        if (hi - lo).abs() <= tol_x {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if flo * fm < T::zero() {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok((lo + hi) * T::of(0.5))
}
