//! Symmetric second-order tensors in three dimensions.
//!
//! Components are stored in the order (11, 22, 33, 12, 13, 23) as natural
//! tensor components. The Mandel 6-vector (shear components scaled by sqrt 2)
//! is the bridge to fourth-order operations: with that scaling, double
//! contraction is an exact dot product.

use crate::scalar::Real;

/// Row/column index pairs backing the 6-component storage order.
pub const INDEX_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Symmetric 3x3 tensor, components (11, 22, 33, 12, 13, 23).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SymTensor2<T> {
    c: [T; 6],
}

impl<T: Real> SymTensor2<T> {
    pub fn zero() -> Self {
        Self { c: [T::zero(); 6] }
    }

    pub fn identity() -> Self {
        let mut t = Self::zero();
        t.c[0] = T::one();
        t.c[1] = T::one();
        t.c[2] = T::one();
        t
    }

    /// From components (11, 22, 33, 12, 13, 23).
    pub fn from_components(c: [T; 6]) -> Self {
        Self { c }
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        Self::from_components([a, b, c, T::zero(), T::zero(), T::zero()])
    }

    /// Components in storage order (11, 22, 33, 12, 13, 23).
    pub fn components(&self) -> [T; 6] {
        self.c
    }

    /// Component by storage index (11, 22, 33, 12, 13, 23).
    pub fn component(&self, k: usize) -> T {
        self.c[k]
    }

    /// Set a component by storage index (11, 22, 33, 12, 13, 23).
    pub fn set_component(&mut self, k: usize, v: T) {
        self.c[k] = v;
    }

    /// Component by matrix indices (either triangle).
    pub fn get(&self, i: usize, j: usize) -> T {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match (i, j) {
            (0, 0) => self.c[0],
            (1, 1) => self.c[1],
            (2, 2) => self.c[2],
            (0, 1) => self.c[3],
            (0, 2) => self.c[4],
            (1, 2) => self.c[5],
            _ => panic!("index out of range"),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let slot = match (i, j) {
            (0, 0) => 0,
            (1, 1) => 1,
            (2, 2) => 2,
            (0, 1) => 3,
            (0, 2) => 4,
            (1, 2) => 5,
            _ => panic!("index out of range"),
        };
        self.c[slot] = v;
    }

    /// Mandel 6-vector: (a11, a22, a33, s a12, s a13, s a23) with s = sqrt 2.
    pub fn mandel(&self) -> [T; 6] {
        let s = T::of(2.0).sqrt();
        [
            self.c[0],
            self.c[1],
            self.c[2],
            s * self.c[3],
            s * self.c[4],
            s * self.c[5],
        ]
    }

    pub fn from_mandel(m: [T; 6]) -> Self {
        let s = T::one() / T::of(2.0).sqrt();
        Self::from_components([m[0], m[1], m[2], s * m[3], s * m[4], s * m[5]])
    }

    pub fn to_matrix(&self) -> [[T; 3]; 3] {
        let mut a = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = self.get(i, j);
            }
        }
        a
    }

    /// Symmetrize a full 3x3 matrix (averages the off-diagonal pairs).
    pub fn from_matrix(a: &[[T; 3]; 3]) -> Self {
        let half = T::of(0.5);
        Self::from_components([
            a[0][0],
            a[1][1],
            a[2][2],
            half * (a[0][1] + a[1][0]),
            half * (a[0][2] + a[2][0]),
            half * (a[1][2] + a[2][1]),
        ])
    }

    /// Rank-one symmetric tensor v (x) v.
    pub fn outer(v: [T; 3]) -> Self {
        Self::from_components([
            v[0] * v[0],
            v[1] * v[1],
            v[2] * v[2],
            v[0] * v[1],
            v[0] * v[2],
            v[1] * v[2],
        ])
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(other.c.iter()) {
            *x = *x + *y;
        }
        Self { c }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(other.c.iter()) {
            *x = *x - *y;
        }
        Self { c }
    }

    pub fn scale(&self, s: T) -> Self {
        let mut c = self.c;
        for x in c.iter_mut() {
            *x = *x * s;
        }
        Self { c }
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    pub fn trace(&self) -> T {
        self.c[0] + self.c[1] + self.c[2]
    }

    /// Hydrostatic part tr(a)/3.
    pub fn hyd(&self) -> T {
        self.trace() / T::of(3.0)
    }

    pub fn dev(&self) -> Self {
        let p = self.hyd();
        let mut c = self.c;
        c[0] = c[0] - p;
        c[1] = c[1] - p;
        c[2] = c[2] - p;
        Self { c }
    }

    /// Double contraction a : b.
    pub fn ddot(&self, other: &Self) -> T {
        let two = T::of(2.0);
        self.c[0] * other.c[0]
            + self.c[1] * other.c[1]
            + self.c[2] * other.c[2]
            + two * (self.c[3] * other.c[3] + self.c[4] * other.c[4] + self.c[5] * other.c[5])
    }

    /// Frobenius norm sqrt(a : a).
    pub fn norm(&self) -> T {
        self.ddot(self).sqrt()
    }

    /// Matrix product a . b (generally non-symmetric).
    pub fn dot(&self, other: &Self) -> [[T; 3]; 3] {
        let a = self.to_matrix();
        let b = other.to_matrix();
        mat3_mul(&a, &b)
    }

    /// Sandwich product a . b . a, which is symmetric.
    pub fn sandwich(&self, inner: &Self) -> Self {
        let a = self.to_matrix();
        let b = inner.to_matrix();
        let ab = mat3_mul(&a, &b);
        Self::from_matrix(&mat3_mul(&ab, &a))
    }

    /// Push forward by a rotation: R . a . R^T.
    pub fn rotate(&self, r: &[[T; 3]; 3]) -> Self {
        let a = self.to_matrix();
        let ra = mat3_mul(r, &a);
        let rt = mat3_transpose(r);
        Self::from_matrix(&mat3_mul(&ra, &rt))
    }

    pub fn max_abs(&self) -> T {
        self.c.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

pub fn mat3_mul<T: Real>(a: &[[T; 3]; 3], b: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut c = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = T::zero();
            for k in 0..3 {
                s += a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn mat3_transpose<T: Real>(a: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut t = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

pub fn mat3_vec<T: Real>(a: &[[T; 3]; 3], v: &[T; 3]) -> [T; 3] {
    let mut r = [T::zero(); 3];
    for i in 0..3 {
        for k in 0..3 {
            r[i] += a[i][k] * v[k];
        }
    }
    r
}
