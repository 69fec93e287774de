//! Fourth-order tensors with minor symmetries, stored as 6x6 matrices in the
//! Mandel basis. In this basis double contraction with a (Mandel-scaled)
//! symmetric second-order tensor is a plain matrix-vector product, tensor
//! composition is a matrix product, and inversion on the space of symmetric
//! tensors is a 6x6 matrix inverse; no shear factors appear at call sites.

use super::sym2::{SymTensor2, INDEX_PAIRS};
use crate::error::Error;
use crate::scalar::Real;

/// Fourth-order tensor with minor symmetries (Mandel 6x6 storage).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymTensor4<T> {
    m: [[T; 6]; 6],
}

impl<T: Real> SymTensor4<T> {
    pub fn zero() -> Self {
        Self {
            m: [[T::zero(); 6]; 6],
        }
    }

    /// Symmetric fourth-order identity I_sym (identity matrix in Mandel basis).
    pub fn identity_sym() -> Self {
        let mut t = Self::zero();
        for i in 0..6 {
            t.m[i][i] = T::one();
        }
        t
    }

    /// Build from full index components A_ijkl (must carry minor symmetries).
    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> T) -> Self {
        let s = T::of(2.0).sqrt();
        let w = |slot: usize| if slot < 3 { T::one() } else { s };
        let mut t = Self::zero();
        for (a, &(i, j)) in INDEX_PAIRS.iter().enumerate() {
            for (b, &(k, l)) in INDEX_PAIRS.iter().enumerate() {
                t.m[a][b] = w(a) * w(b) * f(i, j, k, l);
            }
        }
        t
    }

    /// Full index component A_ijkl.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        let slot = |i: usize, j: usize| -> usize {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            INDEX_PAIRS.iter().position(|&p| p == (i, j)).unwrap()
        };
        let (a, b) = (slot(i, j), slot(k, l));
        let s = T::of(2.0).sqrt();
        let w = |x: usize| if x < 3 { T::one() } else { s };
        self.m[a][b] / (w(a) * w(b))
    }

    pub fn mandel_matrix(&self) -> [[T; 6]; 6] {
        self.m
    }

    pub fn from_mandel_matrix(m: [[T; 6]; 6]) -> Self {
        Self { m }
    }

    /// Dyadic product a (x) b.
    pub fn dyad(a: &SymTensor2<T>, b: &SymTensor2<T>) -> Self {
        let (ma, mb) = (a.mandel(), b.mandel());
        let mut t = Self::zero();
        for i in 0..6 {
            for j in 0..6 {
                t.m[i][j] = ma[i] * mb[j];
            }
        }
        t
    }

    /// Symmetrized product: the minor-symmetric tensor mapping
    /// X -> (A . X . B + B . X . A)/2; for A = B it is X -> A . X . A and its
    /// components reduce to (A_ik A_jl + A_il A_jk)/2.
    pub fn symprod(a: &SymTensor2<T>, b: &SymTensor2<T>) -> Self {
        let half = T::of(0.5);
        Self::from_fn(|i, j, k, l| {
            half * (a.get(i, k) * b.get(j, l)
                + a.get(i, l) * b.get(j, k)
                + b.get(i, k) * a.get(j, l)
                + b.get(i, l) * a.get(j, k))
                * half
        })
    }

    /// Isotropic elastic stiffness lambda I(x)I + 2 mu I_sym.
    pub fn hooke(lambda: T, mu: T) -> Self {
        let i2 = SymTensor2::identity();
        let mut t = Self::dyad(&i2, &i2).scale(lambda);
        let two_mu = T::of(2.0) * mu;
        for i in 0..6 {
            t.m[i][i] += two_mu;
        }
        t
    }

    /// Rank-one update: self += c * v (x) v with v a Mandel vector.
    pub fn add_outer(&mut self, v: &[T; 6], c: T) {
        for i in 0..6 {
            for j in 0..6 {
                self.m[i][j] += c * v[i] * v[j];
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = self.m;
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] += other.m[i][j];
            }
        }
        Self { m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut m = self.m;
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] -= other.m[i][j];
            }
        }
        Self { m }
    }

    pub fn scale(&self, s: T) -> Self {
        let mut m = self.m;
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = *x * s;
            }
        }
        Self { m }
    }

    /// Double contraction from the right: (A : x)_ij = A_ijkl x_kl.
    pub fn ddot_t2(&self, x: &SymTensor2<T>) -> SymTensor2<T> {
        let v = x.mandel();
        let mut r = [T::zero(); 6];
        for i in 0..6 {
            let mut s = T::zero();
            for j in 0..6 {
                s += self.m[i][j] * v[j];
            }
            r[i] = s;
        }
        SymTensor2::from_mandel(r)
    }

    /// Double contraction from the left: (x : A)_kl = x_ij A_ijkl.
    pub fn t2_ddot(&self, x: &SymTensor2<T>) -> SymTensor2<T> {
        let v = x.mandel();
        let mut r = [T::zero(); 6];
        for j in 0..6 {
            let mut s = T::zero();
            for i in 0..6 {
                s += v[i] * self.m[i][j];
            }
            r[j] = s;
        }
        SymTensor2::from_mandel(r)
    }

    /// Quadratic form a : A : b.
    pub fn quad_form(&self, a: &SymTensor2<T>, b: &SymTensor2<T>) -> T {
        let (va, vb) = (a.mandel(), b.mandel());
        let mut s = T::zero();
        for i in 0..6 {
            for j in 0..6 {
                s += va[i] * self.m[i][j] * vb[j];
            }
        }
        s
    }

    /// Composition (A : B)_ijkl = A_ijmn B_mnkl.
    pub fn contract44(&self, other: &Self) -> Self {
        let mut m = [[T::zero(); 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                let mut s = T::zero();
                for k in 0..6 {
                    s += self.m[i][k] * other.m[k][j];
                }
                m[i][j] = s;
            }
        }
        Self { m }
    }

    /// Norm sqrt(A :: A) over all 81 index components.
    pub fn frobenius4(&self) -> T {
        let mut s = T::zero();
        for i in 0..6 {
            for j in 0..6 {
                s += self.m[i][j] * self.m[i][j];
            }
        }
        s.sqrt()
    }

    /// Inverse on the space of symmetric second-order tensors.
    pub fn invert4(&self) -> Result<Self, Error> {
        let mut a = self.m;
        let mut inv = Self::identity_sym().m;
        for col in 0..6 {
            let mut piv = col;
            let mut best = a[col][col].abs();
            for row in (col + 1)..6 {
                if a[row][col].abs() > best {
                    best = a[row][col].abs();
                    piv = row;
                }
            }
            if !(best > T::zero()) || !best.is_finite() {
                return Err(Error::SingularTensor);
            }
            a.swap(col, piv);
            inv.swap(col, piv);
            let d = a[col][col];
            for j in 0..6 {
                a[col][j] = a[col][j] / d;
                inv[col][j] = inv[col][j] / d;
            }
            for row in 0..6 {
                if row != col {
                    let f = a[row][col];
                    if f != T::zero() {
                        for j in 0..6 {
                            a[row][j] = a[row][j] - f * a[col][j];
                            inv[row][j] = inv[row][j] - f * inv[col][j];
                        }
                    }
                }
            }
        }
        Ok(Self { m: inv })
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for row in self.m.iter() {
            for x in row.iter() {
                m = m.max(x.abs());
            }
        }
        m
    }

    /// Largest major-symmetry violation |A_ijkl - A_klij|.
    pub fn major_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..6 {
            for j in 0..6 {
                worst = worst.max((self.m[i][j] - self.m[j][i]).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type S2 = SymTensor2<f64>;
    type S4 = SymTensor4<f64>;

    fn naive_full(t: &S4) -> [[[[f64; 3]; 3]; 3]; 3] {
        let mut a = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        a[i][j][k][l] = t.get(i, j, k, l);
                    }
                }
            }
        }
        a
    }

    #[test]
    fn identity_sym_maps_symmetric_tensors_to_themselves() {
        let x = S2::from_components([1.0, -2.0, 0.5, 0.25, -0.75, 1.5]);
        let y = S4::identity_sym().ddot_t2(&x);
        for (a, b) in x.components().iter().zip(y.components().iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-15);
        }
    }

    #[test]
    fn frobenius_of_identity_sym_is_sqrt6() {
        assert_relative_eq!(S4::identity_sym().frobenius4(), 6.0_f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn frobenius_of_hooke_closed_form() {
        let (l, m) = (118_870.0_f64, 79_249.0_f64);
        let expect = (9.0 * l * l + 12.0 * l * m + 24.0 * m * m).sqrt();
        assert_relative_eq!(S4::hooke(l, m).frobenius4(), expect, max_relative = 1e-13);
    }

    #[test]
    fn frobenius_matches_naive_index_sum() {
        let a = S2::from_components([1.0, 2.0, 3.0, 0.5, -0.25, 0.125]);
        let b = S2::from_components([-1.0, 0.5, 2.0, 1.5, 0.75, -2.0]);
        let t = S4::dyad(&a, &b).add(&S4::symprod(&a, &b));
        let full = naive_full(&t);
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        s += full[i][j][k][l] * full[i][j][k][l];
                    }
                }
            }
        }
        assert_relative_eq!(t.frobenius4(), s.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn ddot_matches_naive_contraction() {
        let a = S2::from_components([1.0, 2.0, 3.0, 0.5, -0.25, 0.125]);
        let b = S2::from_components([-1.0, 0.5, 2.0, 1.5, 0.75, -2.0]);
        let x = S2::from_components([0.3, -0.6, 0.9, -1.2, 1.5, -1.8]);
        let t = S4::dyad(&a, &b).add(&S4::symprod(&b, &a).scale(0.7));
        let full = naive_full(&t);
        let y = t.ddot_t2(&x);
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        s += full[i][j][k][l] * x.get(k, l);
                    }
                }
                assert_relative_eq!(y.get(i, j), s, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn contract44_matches_naive_composition() {
        let a = S2::from_components([1.0, 2.0, 3.0, 0.5, -0.25, 0.125]);
        let b = S2::from_components([-1.0, 0.5, 2.0, 1.5, 0.75, -2.0]);
        let t1 = S4::symprod(&a, &a);
        let t2 = S4::dyad(&b, &a);
        let (f1, f2) = (naive_full(&t1), naive_full(&t2));
        let c = t1.contract44(&t2);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let mut s = 0.0;
                        for m in 0..3 {
                            for n in 0..3 {
                                s += f1[i][j][m][n] * f2[m][n][k][l];
                            }
                        }
                        assert_relative_eq!(c.get(i, j, k, l), s, max_relative = 1e-12, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn invert_identity_is_identity() {
        let inv = S4::identity_sym().invert4().unwrap();
        assert_relative_eq!(inv.sub(&S4::identity_sym()).frobenius4(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn invert_hooke_round_trip() {
        let e = S4::hooke(118_870.0, 79_249.0);
        let round = e.invert4().unwrap().contract44(&e);
        assert!(round.sub(&S4::identity_sym()).frobenius4() < 1e-10);
    }

    #[test]
    fn singular_tensor_is_reported() {
        let a = S2::identity();
        assert!(matches!(S4::dyad(&a, &a).invert4(), Err(Error::SingularTensor)));
    }

    #[test]
    fn symprod_identity_pair_is_identity_sym() {
        let i = S2::identity();
        let p = S4::symprod(&i, &i);
        assert_relative_eq!(p.sub(&S4::identity_sym()).frobenius4(), 0.0, epsilon = 1e-14);
    }
}
