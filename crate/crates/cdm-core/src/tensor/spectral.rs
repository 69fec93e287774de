//! Spectral decomposition of symmetric 3x3 tensors and isotropic tensor
//! functions built from it.
//!
//! Eigenvalues come from a cyclic Jacobi iteration (deterministic, accurate to
//! machine precision for this size), sorted descending. Eigenvector signs are
//! fixed by making each eigenvector's first nonzero component positive.

use super::sym2::{mat3_vec, SymTensor2};
use super::sym4::SymTensor4;
use crate::error::Error;
use crate::scalar::Real;

/// Eigen decomposition A = sum_i vals[i] * vecs[i] (x) vecs[i].
///
/// `vals` are sorted descending; `vecs[i]` is the unit eigenvector of `vals[i]`.
#[derive(Clone, Copy, Debug)]
pub struct Spectral<T> {
    pub vals: [T; 3],
    pub vecs: [[T; 3]; 3],
}

/// Relative eigenvalue gap below which divided differences switch to their
/// analytic limit in spectral-function derivatives.
pub const EIGEN_GAP_TOL: f64 = 1e-8;

/// Decompose a symmetric tensor; always succeeds for finite input.
pub fn spectral<T: Real>(a: &SymTensor2<T>) -> Spectral<T> {
    let (vals, vecs) = jacobi_eigen(&a.to_matrix());
    let mut order = [0usize, 1, 2];
    // descending by eigenvalue; stable for ties
    order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap_or(core::cmp::Ordering::Equal));
    let mut out = Spectral {
        vals: [T::zero(); 3],
        vecs: [[T::zero(); 3]; 3],
    };
    for (slot, &idx) in order.iter().enumerate() {
        out.vals[slot] = vals[idx];
        let mut v = [vecs[0][idx], vecs[1][idx], vecs[2][idx]];
        // sign convention: first component of non-negligible magnitude positive
        let tol = T::of(1e-12);
        for &x in v.iter() {
            if x.abs() > tol {
                if x < T::zero() {
                    for y in v.iter_mut() {
                        *y = -*y;
                    }
                }
                break;
            }
        }
        out.vecs[slot] = v;
    }
    out
}

impl<T: Real> Spectral<T> {
    /// Sum of vals[i] * vecs[i] (x) vecs[i].
    pub fn reconstruct(&self) -> SymTensor2<T> {
        self.map(|x| x)
    }

    /// Isotropic tensor function: applies f to each eigenvalue.
    pub fn map(&self, f: impl Fn(T) -> T) -> SymTensor2<T> {
        let mut out = SymTensor2::zero();
        for i in 0..3 {
            out = out.add(&SymTensor2::outer(self.vecs[i]).scale(f(self.vals[i])));
        }
        out
    }

    /// Mandel vector of the eigenprojection vecs[i] (x) vecs[i].
    pub fn projection_mandel(&self, i: usize) -> [T; 6] {
        SymTensor2::outer(self.vecs[i]).mandel()
    }

    /// Mandel vector of the unit mixed dyad (v_i (x) v_j + v_j (x) v_i)/sqrt(2).
    pub fn mixed_mandel(&self, i: usize, j: usize) -> [T; 6] {
        let (a, b) = (self.vecs[i], self.vecs[j]);
        let mut m = [[T::zero(); 3]; 3];
        for p in 0..3 {
            for q in 0..3 {
                m[p][q] = a[p] * b[q] + b[p] * a[q];
            }
        }
        SymTensor2::from_matrix(&m)
            .scale(T::one() / T::of(2.0).sqrt())
            .mandel()
    }

    /// Derivative of the isotropic tensor function A -> sum_i f(val_i) N_i(x)N_i
    /// with respect to A. In the eigenframe the derivative is diagonal:
    /// df(val_i) on the eigenprojections and divided differences on the mixed
    /// dyads; `gap_tol` is the absolute eigenvalue gap below which the divided
    /// difference switches to its analytic limit df((val_i + val_j)/2).
    pub fn function_derivative(
        &self,
        f: impl Fn(T) -> T,
        df: impl Fn(T) -> T,
        gap_tol: T,
    ) -> SymTensor4<T> {
        let mut out = SymTensor4::zero();
        for i in 0..3 {
            let p = self.projection_mandel(i);
            out.add_outer(&p, df(self.vals[i]));
        }
        let half = T::of(0.5);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (li, lj) = (self.vals[i], self.vals[j]);
                let coeff = if (li - lj).abs() > gap_tol {
                    (f(li) - f(lj)) / (li - lj)
                } else {
                    df(half * (li + lj))
                };
                let s = self.mixed_mandel(i, j);
                out.add_outer(&s, coeff);
            }
        }
        out
    }
}

/// Spectral power A^m for a symmetric positive-definite tensor.
pub fn spectral_pow<T: Real>(a: &SymTensor2<T>, m: T) -> Result<SymTensor2<T>, Error> {
    let s = spectral(a);
    if !(s.vals[2] > T::zero()) {
        return Err(Error::InvalidState(format!(
            "spectral power of non-positive-definite tensor (min eigenvalue {:e})",
            s.vals[2].to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(s.map(|x| x.powf(m)))
}

/// Cyclic Jacobi eigen decomposition of a symmetric 3x3 matrix.
///
/// Returns unsorted eigenvalues and the matrix whose columns are the
/// corresponding eigenvectors.
fn jacobi_eigen<T: Real>(a: &[[T; 3]; 3]) -> ([T; 3], [[T; 3]; 3]) {
    let mut m = *a;
    let mut v = [[T::zero(); 3]; 3];
    for i in 0..3 {
        v[i][i] = T::one();
    }
    let half = T::of(0.5);
    for _sweep in 0..50 {
        let off = (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]).sqrt();
        let scale = m[0][0].abs().max(m[1][1].abs()).max(m[2][2].abs()).max(off);
        if off <= T::epsilon() * scale.max(T::one() * T::min_positive_value().sqrt()) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if m[p][q].abs() <= T::epsilon() * scale * T::of(1e-3) {
                continue;
            }
            let theta = half * (T::of(2.0) * m[p][q]).atan2(m[q][q] - m[p][p]);
            let (c, s) = (theta.cos(), theta.sin());
            // rotate rows/columns p and q
            for k in 0..3 {
                let (mkp, mkq) = (m[k][p], m[k][q]);
                m[k][p] = c * mkp - s * mkq;
                m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let (mpk, mqk) = (m[p][k], m[q][k]);
                m[p][k] = c * mpk - s * mqk;
                m[q][k] = s * mpk + c * mqk;
            }
            for k in 0..3 {
                let (vkp, vkq) = (v[k][p], v[k][q]);
                v[k][p] = c * vkp - s * vkq;
                v[k][q] = s * vkp + c * vkq;
            }
        }
    }
    ([m[0][0], m[1][1], m[2][2]], v)
}

/// Basic rotation about the fixed x-axis.
pub fn rot_x<T: Real>(angle: T) -> [[T; 3]; 3] {
    let (c, s) = (angle.cos(), angle.sin());
    [
        [T::one(), T::zero(), T::zero()],
        [T::zero(), c, -s],
        [T::zero(), s, c],
    ]
}

/// Basic rotation about the fixed y-axis.
pub fn rot_y<T: Real>(angle: T) -> [[T; 3]; 3] {
    let (c, s) = (angle.cos(), angle.sin());
    [
        [c, T::zero(), s],
        [T::zero(), T::one(), T::zero()],
        [-s, T::zero(), c],
    ]
}

/// Basic rotation about the fixed z-axis.
pub fn rot_z<T: Real>(angle: T) -> [[T; 3]; 3] {
    let (c, s) = (angle.cos(), angle.sin());
    [
        [c, -s, T::zero()],
        [s, c, T::zero()],
        [T::zero(), T::zero(), T::one()],
    ]
}

/// Intrinsic z-y'-x'' rotation: first by gamma about e3, then beta about the
/// rotated e2, then alpha about the twice-rotated e1. As fixed-axis matrices
/// this is Rz(gamma) . Ry(beta) . Rx(alpha).
pub fn euler_zyx<T: Real>(alpha: T, beta: T, gamma: T) -> [[T; 3]; 3] {
    let rz = rot_z(gamma);
    let ry = rot_y(beta);
    let rx = rot_x(alpha);
    super::sym2::mat3_mul(&super::sym2::mat3_mul(&rz, &ry), &rx)
}

/// Residual of the eigen equation, for diagnostics and tests.
pub fn eigen_residual<T: Real>(a: &SymTensor2<T>, s: &Spectral<T>) -> T {
    let m = a.to_matrix();
    let mut worst = T::zero();
    for i in 0..3 {
        let av = mat3_vec(&m, &s.vecs[i]);
        for k in 0..3 {
            worst = worst.max((av[k] - s.vals[i] * s.vecs[i][k]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type S2 = SymTensor2<f64>;

    #[test]
    fn diagonal_tensor_recovers_entries() {
        let s = spectral(&S2::diag(3.0, 2.0, 1.0));
        assert_relative_eq!(s.vals[0], 3.0, max_relative = 1e-14);
        assert_relative_eq!(s.vals[1], 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.vals[2], 1.0, max_relative = 1e-14);
        for i in 0..3 {
            assert_relative_eq!(s.vecs[i][i], 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn identity_is_degenerate_but_clean() {
        let s = spectral(&S2::identity());
        let r = s.reconstruct();
        assert!(r.sub(&S2::identity()).norm() < 1e-14);
        for v in s.vals.iter() {
            assert_relative_eq!(*v, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn pure_shear_eigenvalues() {
        let g = 0.37;
        let mut a = S2::zero();
        a.set(0, 1, g);
        let s = spectral(&a);
        assert_relative_eq!(s.vals[0], g, max_relative = 1e-13);
        assert!(s.vals[1].abs() < 1e-13);
        assert_relative_eq!(s.vals[2], -g, max_relative = 1e-13);
    }

    #[test]
    fn random_reconstruction_is_tight() {
        let a = S2::from_components([1.7, -0.9, 0.4, 0.8, -0.3, 0.6]);
        let s = spectral(&a);
        assert!(s.reconstruct().sub(&a).norm() <= 1e-10 * a.norm().max(1.0));
        assert!(eigen_residual(&a, &s) < 1e-12 * a.norm());
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let a = S2::from_components([1.7, -0.9, 0.4, 0.8, -0.3, 0.6]);
        let s = spectral(&a);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| s.vecs[i][k] * s.vecs[j][k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(dot, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn spectral_pow_identity_on_unit() {
        let b = spectral_pow(&S2::identity(), 11.2).unwrap();
        assert!(b.sub(&S2::identity()).norm() < 1e-14);
    }

    #[test]
    fn spectral_pow_rejects_nonpositive() {
        assert!(spectral_pow(&S2::diag(1.0, 1.0, 0.0), 2.0).is_err());
    }

    #[test]
    fn euler_zyx_reduces_to_single_axis() {
        let r = euler_zyx(0.0, 0.0, 0.3);
        let rz = rot_z(0.3);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(r[i][j], rz[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn euler_zyx_is_proper_rotation() {
        let r = euler_zyx(0.4, -0.7, 1.1);
        // R R^T = I
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(dot, expect, epsilon = 1e-14);
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        assert_relative_eq!(det, 1.0, epsilon = 1e-14);
    }
}
