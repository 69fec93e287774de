//! Damage measures built on the degraded elastic stiffness: Frobenius norms,
//! directional stiffness/compliance, and the relative directional-stiffness
//! minimum over the unit sphere.

use crate::error::{Error, Result};
use crate::model::Material;
use crate::scalar::Real;
use crate::tensor::{SymTensor2, SymTensor4};

/// Frobenius norm sqrt(E :: E) of a fourth-order tensor.
pub fn f_e<T: Real>(e: &SymTensor4<T>) -> T {
    e.frobenius4()
}

/// Squared difference of the Frobenius norms of two stiffness tensors.
pub fn f_e_diff<T: Real>(e: &SymTensor4<T>, e_ref: &SymTensor4<T>) -> T {
    let d = e.frobenius4() - e_ref.frobenius4();
    d * d
}

/// Directional projection [r (x) r] : E : [r (x) r] of a stiffness or
/// compliance tensor onto a unit direction.
pub fn directional<T: Real>(e: &SymTensor4<T>, r: &[T; 3]) -> Result<T> {
    let n2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    if (n2 - T::one()).abs() > T::of(1e-12) {
        return Err(Error::NonUnitDirection {
            norm: n2.sqrt().to_f64().unwrap_or(f64::NAN),
        });
    }
    let rr = SymTensor2::outer(*r);
    Ok(e.quad_form(&rr, &rr))
}

/// Directional stiffness of the virgin isotropic state (independent of the
/// direction): lambda + 2 mu.
pub fn virgin_directional<T: Real>(lambda: T, mu: T) -> T {
    lambda + T::of(2.0) * mu
}

/// Deterministic Fibonacci-lattice unit directions (one hemisphere suffices:
/// the quadratic form is even in r).
fn fibonacci_directions<T: Real>(n: usize) -> Vec<[T; 3]> {
    let golden = (T::one() + T::of(5.0).sqrt()) / T::of(2.0);
    (0..n)
        .map(|k| {
            // z covers (0, 1]: half sphere
            let z = (T::of(k as f64) + T::of(0.5)) / T::of(n as f64);
            let rho = (T::one() - z * z).max(T::zero()).sqrt();
            let phi = T::of(2.0) * T::PI() * T::of(k as f64) / golden;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

fn normalize3<T: Real>(v: &[T; 3]) -> [T; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Minimum directional stiffness over the unit sphere, relative to the virgin
/// directional stiffness `e0`.
///
/// Coarse Fibonacci scan (512 directions) followed by Nelder-Mead refinement
/// in spherical coordinates around the best sample; deterministic and
/// reproducible to about 1e-6 relative.
pub fn xi_e<T: Real>(e: &SymTensor4<T>, e0: T) -> T {
    let value = |r: &[T; 3]| {
        let rr = SymTensor2::outer(*r);
        e.quad_form(&rr, &rr)
    };
    let mut best = T::infinity();
    let mut best_dir = [T::zero(), T::zero(), T::one()];
    for dir in fibonacci_directions(512) {
        let v = value(&dir);
        if v < best {
            best = v;
            best_dir = dir;
        }
    }
    // local refinement in a tangent-plane chart around the best sample
    let [bx, by, bz] = best_dir;
    let (t1, t2) = tangent_basis(&best_dir);
    let g = |u: T, v: T| {
        let p = [
            bx + u * t1[0] + v * t2[0],
            by + u * t1[1] + v * t2[1],
            bz + u * t1[2] + v * t2[2],
        ];
        value(&normalize3(&p))
    };
    let step = T::of(0.1);
    let mut simplex = [
        ([T::zero(), T::zero()], g(T::zero(), T::zero())),
        ([step, T::zero()], g(step, T::zero())),
        ([T::zero(), step], g(T::zero(), step)),
    ];
    for _ in 0..200 {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
        let spread = (simplex[2].1 - simplex[0].1).abs();
        let diam = {
            let d = |a: &[T; 2], b: &[T; 2]| {
                ((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1])).sqrt()
            };
            d(&simplex[0].0, &simplex[1].0).max(d(&simplex[0].0, &simplex[2].0))
        };
        if spread <= T::of(1e-9) * (T::one() + simplex[0].1.abs()) || diam <= T::of(1e-7) {
            break;
        }
        let centroid = [
            (simplex[0].0[0] + simplex[1].0[0]) * T::of(0.5),
            (simplex[0].0[1] + simplex[1].0[1]) * T::of(0.5),
        ];
        let worst = simplex[2];
        let refl = [
            centroid[0] + (centroid[0] - worst.0[0]),
            centroid[1] + (centroid[1] - worst.0[1]),
        ];
        let fr = g(refl[0], refl[1]);
        if fr < simplex[0].1 {
            let exp = [
                centroid[0] + T::of(2.0) * (centroid[0] - worst.0[0]),
                centroid[1] + T::of(2.0) * (centroid[1] - worst.0[1]),
            ];
            let fe = g(exp[0], exp[1]);
            simplex[2] = if fe < fr { (exp, fe) } else { (refl, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (refl, fr);
        } else {
            let con = [
                centroid[0] + T::of(0.5) * (worst.0[0] - centroid[0]),
                centroid[1] + T::of(0.5) * (worst.0[1] - centroid[1]),
            ];
            let fc = g(con[0], con[1]);
            if fc < worst.1 {
                simplex[2] = (con, fc);
            } else {
                for i in 1..3 {
                    let shrunk = [
                        simplex[0].0[0] + T::of(0.5) * (simplex[i].0[0] - simplex[0].0[0]),
                        simplex[0].0[1] + T::of(0.5) * (simplex[i].0[1] - simplex[0].0[1]),
                    ];
                    simplex[i] = (shrunk, g(shrunk[0], shrunk[1]));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
    best.min(simplex[0].1) / e0
}

/// Orthonormal basis of the plane normal to `d`.
fn tangent_basis<T: Real>(d: &[T; 3]) -> ([T; 3], [T; 3]) {
    let pick = if d[0].abs() < T::of(0.9) {
        [T::one(), T::zero(), T::zero()]
    } else {
        [T::zero(), T::one(), T::zero()]
    };
    let t1 = normalize3(&[
        d[1] * pick[2] - d[2] * pick[1],
        d[2] * pick[0] - d[0] * pick[2],
        d[0] * pick[1] - d[1] * pick[0],
    ]);
    let t2 = [
        d[1] * t1[2] - d[2] * t1[1],
        d[2] * t1[0] - d[0] * t1[2],
        d[0] * t1[1] - d[1] * t1[0],
    ];
    (t1, t2)
}

/// Sampled directional relative-stiffness map: (direction, E_r, C_r, xi_C)
/// rows for export. `compliance` must be the inverse of `stiffness`.
pub fn directional_map<T: Real>(
    stiffness: &SymTensor4<T>,
    compliance: &SymTensor4<T>,
    c0: T,
    n: usize,
) -> Vec<([T; 3], T, T, T)> {
    fibonacci_directions(n)
        .into_iter()
        .map(|r| {
            let rr = SymTensor2::outer(r);
            let er = stiffness.quad_form(&rr, &rr);
            let cr = compliance.quad_form(&rr, &rr);
            (r, er, cr, c0 / cr)
        })
        .collect()
}

/// Full scalar damage summary of a material state.
#[derive(Clone, Copy, Debug)]
pub struct DamageSummary<T> {
    pub f_e: T,
    pub f_e_diff: T,
    pub xi_e: T,
    /// Frobenius norm of the virgin stiffness.
    pub f_e_ref: T,
    /// Virgin directional stiffness lambda + 2 mu.
    pub e0: T,
}

/// Evaluate the scalar measures of a state against the virgin reference.
pub fn summarize<T: Real, M: Material<T>>(
    model: &M,
    state: &M::State,
    virgin_stiffness: &SymTensor4<T>,
    e0: T,
) -> Result<DamageSummary<T>> {
    let e = model.stiffness(state)?;
    Ok(DamageSummary {
        f_e: f_e(&e),
        f_e_diff: f_e_diff(&e, virgin_stiffness),
        xi_e: xi_e(&e, e0),
        f_e_ref: virgin_stiffness.frobenius4(),
        e0,
    })
}
